"""Contextuality measures of cyclic systems and their constructive witnesses.

``cnt3`` is the negative-probability measure: the smallest total variation of a
signed measure over atoms reproducing the reduced probability vector, minus 1.
``cntf`` is the contextual fraction: one minus the largest mass of a
nonnegative measure lying below the full probability vector.  Both are solved
exactly; for every cyclic system ``cntf == (n - 1) * cnt3``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .coupling import connection_vector
from .lp import (
    EQ,
    GE,
    LE,
    BlockProgram,
    BlockSolution,
    Constraint,
    ExplicitBlock,
    LinearProgram,
    LpStatus,
    solve,
    solve_blocks,
)
from .system import CyclicSystem, relabel_content
from .vectorization import (
    AtomColumns,
    ConnectionEvent,
    atom_satisfies,
    build_full_vector,
    build_reduced_vector,
    event_bits,
    n_atoms,
)

ZERO = Fraction(0)


class ContextualityError(RuntimeError):
    """An identity that must hold for cyclic systems failed (internal consistency)."""


def _clean(weights: Mapping[int, Fraction]) -> dict[int, Fraction]:
    return {int(v): Fraction(w) for v, w in sorted(weights.items()) if w}


@dataclass(frozen=True)
class SignedMeasure:
    """Sparse signed measure over the ``2^{2n}`` atoms of a rank-``n`` system."""

    rank: int
    weights: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        weights = _clean(self.weights)
        size = n_atoms(self.rank)
        if any(not 0 <= v < size for v in weights):
            raise ValueError(f"atom index outside 0..{size - 1}")
        object.__setattr__(self, "weights", weights)

    def __getitem__(self, atom: int) -> Fraction:
        return self.weights.get(atom, ZERO)

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), ZERO)

    @property
    def l1_norm(self) -> Fraction:
        return sum((abs(w) for w in self.weights.values()), ZERO)

    @property
    def negative_mass(self) -> Fraction:
        return -sum((w for w in self.weights.values() if w < 0), ZERO)

    @property
    def negative_atoms(self) -> tuple[int, ...]:
        return tuple(v for v, w in self.weights.items() if w < 0)

    def dense(self) -> list[Fraction]:
        out = [ZERO] * n_atoms(self.rank)
        for v, w in self.weights.items():
            out[v] = w
        return out


@dataclass(frozen=True)
class DefectiveMeasure(SignedMeasure):
    """Nonnegative measure of total mass at most 1."""

    def __post_init__(self) -> None:
        super().__post_init__()
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("defective measures are nonnegative")
        if self.total > 1:
            raise ValueError(f"total mass {self.total} exceeds 1")


def l1_distance(a: SignedMeasure, b: SignedMeasure) -> Fraction:
    atoms = set(a.weights) | set(b.weights)
    return sum((abs(a[v] - b[v]) for v in atoms), ZERO)


def _apply(system: CyclicSystem, labels, weights: Mapping[int, Fraction]) -> list[Fraction]:
    """``M x`` on the given rows for a sparse measure ``x``."""
    n = system.rank
    return [
        sum((w for v, w in weights.items() if atom_satisfies(v, e, n)), ZERO) for e in labels
    ]


# ---------------------------------------------------------------------------
# Programs


def _reduced_rows(system: CyclicSystem):
    vector = build_reduced_vector(system)
    events = dict(enumerate(vector.labels))
    events[len(vector.labels)] = None
    rhs = tuple(vector.values) + (Fraction(1),)
    return events, rhs


def cnt3_program(system: CyclicSystem) -> BlockProgram:
    """``min 1.y_-`` s.t. ``M (y_+ - y_-) = p*``, ``1.(y_+ - y_-) = 1``."""
    events, rhs = _reduced_rows(system)
    n = system.rank
    return BlockProgram(
        (EQ,) * len(rhs),
        rhs,
        (AtomColumns(n, events, sign=1, cost=0), AtomColumns(n, events, sign=-1, cost=1)),
    )


def cnt3_crash_basis(system: CyclicSystem) -> list[tuple[int, int]]:
    """Feasible starting basis of :func:`cnt3_program`.

    The reduced rows are the monomials ``1``, ``x_k`` and ``x_k x_{k+1}`` in
    the ring of bits, so the atoms ``0``, ``{k}`` and ``{k, k+1}`` give a
    triangular basis.  Its unique signed solution is taken on ``y_+`` where
    nonnegative and on ``y_-`` elsewhere.
    """
    L = 2 * system.rank
    vector = build_reduced_vector(system)
    moment = {
        frozenset(bit for bit, _ in event_bits(e, system.rank)): p
        for e, p in zip(vector.labels, vector.values)
    }
    pairs = {k: moment[frozenset((k, (k + 1) % L))] for k in range(L)}
    singles = {k: moment[frozenset((k,))] - pairs[k] - pairs[(k - 1) % L] for k in range(L)}
    weights = {1 << k | 1 << (k + 1) % L: y for k, y in pairs.items()}
    weights.update({1 << k: y for k, y in singles.items()})
    weights[0] = 1 - sum(weights.values(), ZERO)
    return [(0 if y >= 0 else 1, atom) for atom, y in sorted(weights.items())]


def cntf_program(system: CyclicSystem, presolve: bool = True) -> BlockProgram:
    """``min -1.z`` s.t. ``M(.) z <= p*(.)``, ``1.z <= 1``, ``z >= 0``.

    With ``presolve`` the atoms satisfying a zero-probability event are left
    out: a row ``M_e z <= 0`` with ``z >= 0`` already pins them at zero.
    """
    vector = build_full_vector(system)
    events = dict(enumerate(vector.labels))
    events[len(vector.labels)] = None
    rhs = tuple(vector.values) + (Fraction(1),)
    excluded = [e for e, p in zip(vector.labels, vector.values) if p == 0] if presolve else []
    block = AtomColumns(system.rank, events, sign=1, cost=-1, excluded=excluded)
    return BlockProgram((LE,) * len(rhs), rhs, (block,))


def _cover_excluded(program: BlockProgram, solution: BlockSolution) -> BlockSolution:
    """Extend the duals of a presolved program to a certificate of the full one.

    Lowering the multiplier of a zero-rhs ``<=`` row keeps ``b.y`` and dual
    feasibility of kept columns, and raises the reduced cost of every atom
    satisfying that row's event; a shift of ``1 + sum |c| + sum |y|`` makes
    all of them nonnegative.
    """
    (block,) = program.blocks
    if not block.excluded or solution.status is not LpStatus.OPTIMAL:
        return solution
    shift = 1 + abs(block.cost_value) + sum(abs(y) for y in solution.duals)
    zero_rows = {e for e in block.excluded}
    duals = tuple(
        y - shift if block.rows.get(i) in zero_rows and program.rhs[i] == 0 else y
        for i, y in enumerate(solution.duals)
    )
    return replace(solution, duals=duals)


def solve_cntf_program(system: CyclicSystem) -> BlockSolution:
    """Presolved CNTF program; duals certify optimality over all atoms."""
    program = cntf_program(system)
    return _cover_excluded(program, solve_blocks(program))


def coupling_program(system: CyclicSystem, presolve: bool = True) -> BlockProgram:
    """Feasibility of ``M h = p*``, ``1.h = 1``, ``h >= 0``.

    Any such ``h`` also reproduces the full vector, so with ``presolve`` the
    atoms satisfying a zero-probability event are left out.
    """
    events, rhs = _reduced_rows(system)
    excluded = []
    if presolve:
        vector = build_full_vector(system)
        excluded = [e for e, p in zip(vector.labels, vector.values) if p == 0]
    return BlockProgram((EQ,) * len(rhs), rhs, (AtomColumns(system.rank, events, excluded=excluded),))


def _require_optimal(solution: BlockSolution, what: str) -> BlockSolution:
    if solution.status is not LpStatus.OPTIMAL:
        raise ContextualityError(f"{what} program ended {solution.status.value}")
    return solution


def _signed_witness(rank: int, solution: BlockSolution) -> SignedMeasure:
    pos, neg = solution.values
    weights = dict(pos)
    for v, w in neg.items():
        weights[v] = weights.get(v, ZERO) - w
    return SignedMeasure(rank, weights)


# ---------------------------------------------------------------------------
# Measures


def is_noncontextual(system: CyclicSystem) -> bool:
    result = solve_blocks(coupling_program(system), feasibility_only=True)
    return result.status is LpStatus.OPTIMAL


def cnt3(system: CyclicSystem) -> tuple[Fraction, SignedMeasure]:
    solution = _require_optimal(
        solve_blocks(cnt3_program(system), start=cnt3_crash_basis(system)), "CNT3"
    )
    y = _signed_witness(system.rank, solution)
    value = y.l1_norm - 1
    if value != 2 * solution.objective_value:
        raise ContextualityError("CNT3 witness norm disagrees with twice the negative mass")
    return value, y


def cntf(system: CyclicSystem) -> tuple[Fraction, DefectiveMeasure]:
    solution = _require_optimal(solve_cntf_program(system), "CNTF")
    z = DefectiveMeasure(system.rank, solution.values[0])
    return 1 - z.total, z


def in_pyramid(x: Union[SignedMeasure, Mapping[int, Fraction], Sequence[Fraction]], system: CyclicSystem) -> bool:
    """``M(.) x <= p*(.)`` and ``1.x <= 1``."""
    n = system.rank
    size = n_atoms(n)
    if isinstance(x, SignedMeasure):
        if x.rank != n:
            raise ValueError(f"measure of rank {x.rank} for a rank-{n} system")
        weights = x.weights
    elif isinstance(x, Mapping):
        weights = {int(v): Fraction(w) for v, w in x.items()}
        if any(not 0 <= v < size for v in weights):
            raise ValueError(f"atom index outside 0..{size - 1}")
    else:
        if len(x) != size:
            raise ValueError(f"expected {size} components, got {len(x)}")
        weights = {v: Fraction(w) for v, w in enumerate(x) if w}
    vector = build_full_vector(system)
    if sum(weights.values(), ZERO) > 1:
        return False
    return all(lhs <= p for lhs, p in zip(_apply(system, vector.labels, weights), vector.values))


# ---------------------------------------------------------------------------
# Constructive witnesses


def _zero_cell_connection(system: CyclicSystem) -> tuple[int, bool]:
    """Connection whose coupling has ``Pr(T_i^i = 1, T_i^{i⊖1} = 0) = 0``.

    Returns ``(i, relabel)``; ``relabel`` is set when no connection has that
    cell empty and content ``i`` has to be complemented first.
    """
    couplings = connection_vector(system)
    for i, c in enumerate(couplings, start=1):
        if c.p10 == 0:
            return i, False
    for i, c in enumerate(couplings, start=1):
        if c.p01 == 0:
            return i, True
    raise ContextualityError("multimaximal coupling without a zero off-diagonal cell")


def _content_mask(system: CyclicSystem, content: int) -> int:
    bits = event_bits(ConnectionEvent(content, 1, 1), system.rank)
    return sum(1 << bit for bit, _ in bits)


def _cnt3_with_single_negative(system: CyclicSystem, atom: int) -> BlockSolution:
    events, rhs = _reduced_rows(system)
    n = system.rank
    col = {i: -1 for i, e in events.items() if e is None or atom_satisfies(atom, e, n)}
    program = BlockProgram(
        (EQ,) * len(rhs),
        rhs,
        (AtomColumns(n, events, sign=1, cost=0), ExplicitBlock([col], [1], len(rhs))),
    )
    return solve_blocks(program)


def cnt3_single_negative(system: CyclicSystem, value: Fraction | None = None) -> SignedMeasure:
    """A minimal quasi-coupling whose only negative weight is ``-CNT3/2``.

    The negative atom is searched among atoms satisfying a zero-probability
    cell of a multimaximal connection coupling, in increasing atom order; the
    first atom whose sign-restricted program reaches ``CNT3/2`` wins.
    """
    if value is None:
        value, _ = cnt3(system)
    if value == 0:
        raise ContextualityError("system is noncontextual; no negative mass is needed")
    n = system.rank
    content, relabel = _zero_cell_connection(system)
    work = relabel_content(system, content) if relabel else system
    mask = _content_mask(system, content) if relabel else 0
    target = ConnectionEvent(content, 1, 0)
    for atom in range(n_atoms(n)):
        local = atom ^ mask
        if not atom_satisfies(local, target, n):
            continue
        solution = _cnt3_with_single_negative(work, local)
        if solution.status is LpStatus.OPTIMAL and 2 * solution.objective_value == value:
            pos, neg = solution.values
            weights = {v ^ mask: w for v, w in pos.items()}
            for v, w in neg.items():
                weights[local ^ mask] = weights.get(local ^ mask, ZERO) - w
            return SignedMeasure(n, weights)
    raise ContextualityError("no atom carries a single-negative CNT3 witness")


def lemma2_program(system: CyclicSystem, y: SignedMeasure) -> tuple[LinearProgram, list[int], dict[int, Fraction]]:
    """Mass-removal program turning ``y`` into a defective coupling.

    With ``w`` = ``y`` minus its negative atom, find ``0 <= x <= w`` of least
    total mass such that ``M(.)(w - x) <= p*(.)`` and ``1.(w - x) <= 1``.
    Returns the program, the atom of each variable, and ``w``.
    """
    negatives = y.negative_atoms
    if len(negatives) != 1:
        raise ValueError(f"expected exactly one negative atom, found {len(negatives)}")
    (v,) = negatives
    w = {u: m for u, m in y.weights.items() if u != v}
    support = sorted(w)
    vector = build_full_vector(system)
    n = system.rank
    applied = _apply(system, vector.labels, w)
    constraints = []
    for event, p, mw in zip(vector.labels, vector.values, applied):
        coeffs = [Fraction(int(atom_satisfies(u, event, n))) for u in support]
        constraints.append(Constraint(tuple(coeffs), GE, mw - p))
    ones = (Fraction(1),) * len(support)
    constraints.append(Constraint(ones, GE, sum(w.values(), ZERO) - 1))
    for k, u in enumerate(support):
        unit = [ZERO] * len(support)
        unit[k] = Fraction(1)
        constraints.append(Constraint(tuple(unit), LE, w[u]))
    return LinearProgram(ones, tuple(constraints), "min"), support, w


def lemma2_defective_coupling(system: CyclicSystem, y: SignedMeasure) -> DefectiveMeasure:
    """Defective coupling ``z* = w - x*`` built from a single-negative witness."""
    lp, support, w = lemma2_program(system, y)
    solution = solve(lp)
    if solution.status is not LpStatus.OPTIMAL:
        raise ContextualityError(f"mass-removal program ended {solution.status.value}")
    z = dict(w)
    for u, x in zip(support, solution.values):
        z[u] -= x
    return DefectiveMeasure(system.rank, z)


@dataclass(frozen=True)
class MeasureReport:
    rank: int
    noncontextual: bool
    cnt3: Fraction
    cntf: Fraction
    proportionality_holds: bool
    y_star: SignedMeasure | None = None
    z_star: DefectiveMeasure | None = None

    @property
    def consistent(self) -> bool:
        """Feasibility test, CNT3 and CNTF agree on the contextuality status."""
        return self.noncontextual == (self.cnt3 == 0) == (self.cntf == 0)


def verify_proportionality(system: CyclicSystem, witnesses: bool = False) -> MeasureReport:
    value3, y = cnt3(system)
    valuef, z = cntf(system)
    return MeasureReport(
        rank=system.rank,
        noncontextual=is_noncontextual(system),
        cnt3=value3,
        cntf=valuef,
        proportionality_holds=valuef == (system.rank - 1) * value3,
        y_star=y if witnesses else None,
        z_star=z if witnesses else None,
    )
