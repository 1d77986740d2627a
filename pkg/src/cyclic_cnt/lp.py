"""Exact rational linear programming.

The solver is a two-phase revised simplex over the integers: the basis inverse
is kept as an integer adjugate ``N`` with a positive integer denominator ``d``
(``B^-1 = N / d``), updated by fraction-free (Bareiss) pivots.  No value is ever
rounded; primal values, duals and the objective come out as :class:`Fraction`.

Columns are supplied by :class:`ColumnBlock` objects.  An explicit program uses
:class:`ExplicitBlock`; programs whose columns are implied by a structure (e.g.
the 2^{2n} atoms of an incidence matrix) implement their own pricing so the
columns never have to be materialised.
"""

from __future__ import annotations

import enum
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

LE, EQ, GE = "<=", "==", ">="
_RELATIONS = (LE, EQ, GE)
_INT64_SAFE = 1 << 62


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class PivotRule(str, enum.Enum):
    BLAND = "bland"
    # Most negative reduced cost, smallest index on ties; falls back to Bland
    # after a run of degenerate pivots so it cannot cycle.
    DANTZIG = "dantzig"


# ---------------------------------------------------------------------------
# Column blocks


class ColumnBlock(ABC):
    """A contiguous family of nonnegative variables with integer columns.

    Reduced costs are handled as integer numerators: for weights ``w`` (one per
    row) and a scale ``s`` the numerator of column ``j`` is
    ``s * cost(j) - sum_i w[i] * a[i, j]``.
    """

    size: int

    @abstractmethod
    def column(self, j: int) -> dict[int, int]:
        """Sparse column ``{row: coefficient}``."""

    @abstractmethod
    def cost(self, j: int) -> int: ...

    @abstractmethod
    def first_below(self, weights: Sequence[int], scale: int, threshold: int) -> int | None:
        """Smallest ``j`` whose reduced-cost numerator is ``< threshold``."""

    @abstractmethod
    def minimum(self, weights: Sequence[int], scale: int) -> int | None:
        """Smallest reduced-cost numerator in the block (``None`` if empty)."""

    def first_nonzero(self, weights: Sequence[int]) -> int | None:
        """Smallest ``j`` with ``sum_i w[i] * a[i, j] != 0``."""
        neg = [-w for w in weights]
        hits = [j for j in (self.first_below(weights, 0, 0), self.first_below(neg, 0, 0)) if j is not None]
        return min(hits) if hits else None


def _fits_int64(*bounds: int) -> bool:
    return sum(bounds) < _INT64_SAFE


class ExplicitBlock(ColumnBlock):
    """Columns given one by one; priced with a dense integer matrix."""

    def __init__(self, columns: Sequence[Mapping[int, int]], costs: Sequence[int], n_rows: int):
        if len(columns) != len(costs):
            raise ValueError("one cost per column required")
        self.size = len(columns)
        self._columns = [dict(c) for c in columns]
        self._costs = [int(c) for c in costs]
        entries = [abs(v) for col in self._columns for v in col.values()]
        self._colmax = max((sum(abs(v) for v in col.values()) for col in self._columns), default=0)
        self._costmax = max((abs(c) for c in self._costs), default=0)
        big = max(entries, default=0) >= (1 << 31) or self._costmax >= (1 << 31)
        dtype = object if big else np.int64
        dense = np.zeros((n_rows, self.size), dtype=dtype)
        for j, col in enumerate(self._columns):
            for i, v in col.items():
                dense[i, j] = v
        self._dense = dense
        self._cost_arr = np.array(self._costs, dtype=dtype)

    def column(self, j: int) -> dict[int, int]:
        return self._columns[j]

    def cost(self, j: int) -> int:
        return self._costs[j]

    def _reduced(self, weights: Sequence[int], scale: int) -> np.ndarray:
        wmax = max((abs(w) for w in weights), default=0)
        if self._dense.dtype != object and _fits_int64(wmax * self._colmax, abs(scale) * self._costmax):
            w = np.array(weights, dtype=np.int64)
            return scale * self._cost_arr - w @ self._dense
        w = np.array([int(x) for x in weights], dtype=object)
        return scale * self._cost_arr.astype(object) - w @ self._dense.astype(object)

    def first_below(self, weights, scale, threshold):
        if self.size == 0:
            return None
        hits = np.flatnonzero(self._reduced(weights, scale) < threshold)
        return int(hits[0]) if hits.size else None

    def minimum(self, weights, scale):
        if self.size == 0:
            return None
        return int(self._reduced(weights, scale).min())


# ---------------------------------------------------------------------------
# Block programs


@dataclass(frozen=True)
class BlockProgram:
    """``min sum(cost * x)`` subject to ``rows``, ``x >= 0``, columns from ``blocks``.

    ``relations[i]`` and ``rhs[i]`` describe row ``i``; block columns carry
    integer coefficients and integer costs.
    """

    relations: tuple[str, ...]
    rhs: tuple[Fraction, ...]
    blocks: tuple[ColumnBlock, ...]

    def __post_init__(self) -> None:
        if len(self.relations) != len(self.rhs):
            raise ValueError("one relation per right-hand side required")
        for rel in self.relations:
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
        object.__setattr__(self, "rhs", tuple(Fraction(b) for b in self.rhs))
        object.__setattr__(self, "relations", tuple(self.relations))
        object.__setattr__(self, "blocks", tuple(self.blocks))


@dataclass(frozen=True)
class BlockSolution:
    status: LpStatus
    values: tuple[dict[int, Fraction], ...] = ()
    objective_value: Fraction | None = None
    duals: tuple[Fraction, ...] = ()
    iterations: int = 0


class _SlackBlock(ExplicitBlock):
    pass


class _Engine:
    """Revised simplex on a :class:`BlockProgram` (internal)."""

    def __init__(self, program: BlockProgram, rule: PivotRule, degenerate_limit: int = 50):
        self.rule = PivotRule(rule)
        self.degenerate_limit = degenerate_limit
        m = len(program.rhs)
        self.m = m
        # Rows with negative rhs are negated internally so that b >= 0.
        self.sign = [(-1 if b < 0 else 1) for b in program.rhs]
        self.denom = math.lcm(*(b.denominator for b in program.rhs)) if m else 1
        rhs_int = [int(abs(b) * self.denom) for b in program.rhs]

        slack_cols, slack_rows = [], []
        for i, rel in enumerate(program.relations):
            if rel == LE:
                slack_cols.append({i: 1})
                slack_rows.append(i)
            elif rel == GE:
                slack_cols.append({i: -1})
                slack_rows.append(i)
        slack = _SlackBlock(slack_cols, [0] * len(slack_cols), m)

        basis_from_slack = {}
        for k, (i, col) in enumerate(zip(slack_rows, slack_cols)):
            if col[i] * self.sign[i] == 1:
                basis_from_slack[i] = k
        art_rows = [i for i in range(m) if i not in basis_from_slack]
        art = ExplicitBlock([{i: self.sign[i]} for i in art_rows], [1] * len(art_rows), m)

        self.blocks = list(program.blocks) + [slack, art]
        self.n_user = len(program.blocks)
        self.slack_idx = self.n_user
        self.art_idx = self.n_user + 1
        self.offsets = []
        acc = 0
        for block in self.blocks:
            self.offsets.append(acc)
            acc += block.size

        self.basis: list[tuple[int, int]] = [None] * m  # type: ignore[list-item]
        for i, k in basis_from_slack.items():
            self.basis[i] = (self.slack_idx, k)
        for k, i in enumerate(art_rows):
            self.basis[i] = (self.art_idx, k)

        # T = [N | beta]; B^-1 = N / d, x_B = beta / (d * denom)
        self.T = np.zeros((m, m + 1), dtype=np.int64)
        self.T[:, :m] = np.eye(m, dtype=np.int64)
        if rhs_int and max(rhs_int) >= (1 << 31):
            self.T = self.T.astype(object)
        for i, b in enumerate(rhs_int):
            self.T[i, m] = b
        self.d = 1
        self.iterations = 0
        self.phase = 1

    # -- helpers -----------------------------------------------------------

    def _global(self, key: tuple[int, int]) -> int:
        return self.offsets[key[0]] + key[1]

    def _cost(self, key: tuple[int, int]) -> int:
        block, j = key
        if self.phase == 1:
            return 1 if block == self.art_idx else 0
        if block >= self.n_user:
            return 0
        return self.blocks[block].cost(j)

    def _weights(self) -> list[int]:
        """``w = c_B N`` in the original row orientation."""
        costs = [self._cost(k) for k in self.basis]
        N = self.T[:, : self.m]
        nz = [i for i, c in enumerate(costs) if c]
        if not nz:
            return [0] * self.m
        cmax = max(abs(costs[i]) for i in nz)
        if N.dtype != object and _fits_int64(cmax * int(np.abs(N[nz]).max()) * len(nz)):
            w = np.array([costs[i] for i in nz], dtype=np.int64) @ N[nz]
        else:
            w = np.array([costs[i] for i in nz], dtype=object) @ N[nz].astype(object)
        return [int(x) * s for x, s in zip(w, self.sign)]

    def _column_image(self, col: Mapping[int, int]) -> list[int]:
        """``u = N a`` for an (original orientation) column ``a``."""
        idx = [i for i, v in col.items() if v]
        if not idx:
            return [0] * self.m
        coefs = [col[i] * self.sign[i] for i in idx]
        sub = self.T[:, idx]
        if sub.dtype != object and _fits_int64(
            int(np.abs(sub).max()) * sum(abs(c) for c in coefs)
        ):
            return [int(x) for x in sub @ np.array(coefs, dtype=np.int64)]
        return [int(x) for x in sub.astype(object) @ np.array(coefs, dtype=object)]

    def _scale_for(self, block: int) -> int:
        if self.phase == 1:
            return self.d if block == self.art_idx else 0
        return 0 if block >= self.n_user else self.d

    def _candidate_blocks(self) -> list[int]:
        if self.phase == 1:
            return list(range(len(self.blocks)))
        return list(range(self.art_idx))

    def _entering(self, weights: list[int], bland: bool) -> tuple[int, int] | None:
        blocks = self._candidate_blocks()
        if bland:
            for b in blocks:
                j = self.blocks[b].first_below(weights, self._scale_for(b), 0)
                if j is not None:
                    return (b, j)
            return None
        best, best_block = 0, None
        for b in blocks:
            value = self.blocks[b].minimum(weights, self._scale_for(b))
            if value is not None and value < best:
                best, best_block = value, b
        if best_block is None:
            return None
        j = self.blocks[best_block].first_below(weights, self._scale_for(best_block), best + 1)
        return (best_block, j)

    def _pivot(self, r: int, u: list[int]) -> None:
        T = self.T
        ur = u[r]
        umax = max(abs(x) for x in u)
        if T.dtype != object:
            tmax = int(np.abs(T).max())
            if not _fits_int64(umax * tmax, umax * tmax):
                T = T.astype(object)
        if T.dtype == object:
            uvec = np.array(u, dtype=object)
        else:
            uvec = np.array(u, dtype=np.int64)
        row = T[r].copy()
        numer = ur * T - np.outer(uvec, row)
        q = numer // self.d  # object arrays have no divmod loop
        if np.any(q * self.d != numer):
            raise ArithmeticError("fraction-free pivot lost exactness")
        q[r] = row
        if ur < 0:
            q = -q
        if q.dtype == object and int(np.abs(q).max()) < (1 << 31):
            q = q.astype(np.int64)
        self.T = q
        self.d = abs(ur)

    def _ratio_row(self, u: list[int]) -> int | None:
        beta = self.T[:, self.m]
        best = None
        for i in range(self.m):
            if u[i] <= 0:
                continue
            if best is None:
                best = i
                continue
            lhs = int(beta[i]) * u[best]
            rhs = int(beta[best]) * u[i]
            if lhs < rhs or (lhs == rhs and self._global(self.basis[i]) < self._global(self.basis[best])):
                best = i
        return best

    def _objective_numer(self) -> int:
        """``c_B beta`` (objective times ``d * denom``)."""
        beta = self.T[:, self.m]
        return sum(self._cost(k) * int(beta[i]) for i, k in enumerate(self.basis))

    def _run(self) -> LpStatus:
        degenerate = 0
        bland = self.rule == PivotRule.BLAND
        while True:
            weights = self._weights()
            entering = self._entering(weights, bland or degenerate >= self.degenerate_limit)
            if entering is None:
                return LpStatus.OPTIMAL
            col = self.blocks[entering[0]].column(entering[1])
            u = self._column_image(col)
            r = self._ratio_row(u)
            if r is None:
                return LpStatus.UNBOUNDED
            if int(self.T[r, self.m]) == 0:
                degenerate += 1
            else:
                degenerate = 0
            self._pivot(r, u)
            self.basis[r] = entering
            self.iterations += 1

    def _drive_out_artificials(self) -> None:
        for r in range(self.m):
            if self.basis[r][0] != self.art_idx:
                continue
            row_w = [int(x) * s for x, s in zip(self.T[r, : self.m], self.sign)]
            for b in range(self.art_idx):
                j = self.blocks[b].first_nonzero(row_w)
                if j is not None:
                    u = self._column_image(self.blocks[b].column(j))
                    self._pivot(r, u)
                    self.basis[r] = (b, j)
                    self.iterations += 1
                    break

    def crash(self, start: Sequence[tuple[int, int]]) -> None:
        """Pivot the given user columns into the basis in place of artificials.

        The caller promises that the resulting basic solution is feasible;
        this is checked and a :class:`ValueError` raised otherwise.
        """
        for key in start:
            b, j = key
            if not 0 <= b < self.n_user or not 0 <= j < self.blocks[b].size:
                raise ValueError(f"start column {key} outside the program")
            u = self._column_image(self.blocks[b].column(j))
            rows = [r for r in range(self.m) if self.basis[r][0] == self.art_idx and u[r] != 0]
            if not rows:
                raise ValueError(f"start column {key} is dependent on earlier ones")
            self._pivot(rows[0], u)
            self.basis[rows[0]] = key
            self.iterations += 1
        if any(int(x) < 0 for x in self.T[:, self.m]):
            raise ValueError("start basis is not primal feasible")

    def solve(self, feasibility_only: bool = False) -> BlockSolution:
        self.phase = 1
        if any(k[0] == self.art_idx for k in self.basis):
            self._run()
            if self._objective_numer() != 0:
                return BlockSolution(LpStatus.INFEASIBLE, iterations=self.iterations)
            self._drive_out_artificials()
        self.phase = 2
        if feasibility_only:
            return self._collect(LpStatus.OPTIMAL)
        status = self._run()
        if status is LpStatus.UNBOUNDED:
            return BlockSolution(status, iterations=self.iterations)
        return self._collect(status)

    def _collect(self, status: LpStatus) -> BlockSolution:
        scale = self.d * self.denom
        beta = self.T[:, self.m]
        values: list[dict[int, Fraction]] = [dict() for _ in range(self.n_user)]
        for i, (b, j) in enumerate(self.basis):
            if b < self.n_user and beta[i] != 0:
                values[b][j] = Fraction(int(beta[i]), scale)
        objective = sum(
            (self.blocks[b].cost(j) * x for b, vals in enumerate(values) for j, x in vals.items()),
            Fraction(0),
        )
        duals = tuple(Fraction(w, self.d) for w in self._weights())
        return BlockSolution(status, tuple(values), objective, duals, self.iterations)


def solve_blocks(
    program: BlockProgram,
    rule: PivotRule | str = PivotRule.BLAND,
    feasibility_only: bool = False,
    start: Sequence[tuple[int, int]] = (),
) -> BlockSolution:
    """Minimise a :class:`BlockProgram` exactly.

    ``duals`` are the row multipliers ``y`` of the minimisation in the row
    orientation given by ``program`` (``c - A^T y >= 0`` at optimality).
    ``start`` lists ``(block, column)`` pairs forming a feasible crash basis
    (possibly partial); phase one then only has to remove what is left.
    """
    engine = _Engine(program, PivotRule(rule))
    engine.crash(start)
    return engine.solve(feasibility_only)


# ---------------------------------------------------------------------------
# Explicit programs


@dataclass(frozen=True)
class Constraint:
    coeffs: tuple[Fraction, ...]
    relation: str
    rhs: Fraction

    def __post_init__(self) -> None:
        if self.relation not in _RELATIONS:
            raise ValueError(f"unknown relation {self.relation!r}")
        object.__setattr__(self, "coeffs", tuple(Fraction(c) for c in self.coeffs))
        object.__setattr__(self, "rhs", Fraction(self.rhs))


@dataclass(frozen=True)
class LinearProgram:
    """``min|max objective . x`` subject to ``constraints``.

    Variables are nonnegative unless listed in ``free``.
    """

    objective: tuple[Fraction, ...]
    constraints: tuple[Constraint, ...]
    sense: str = "min"
    free: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        objective = tuple(Fraction(c) for c in self.objective)
        constraints = tuple(
            c if isinstance(c, Constraint) else Constraint(*c) for c in self.constraints
        )
        for k, c in enumerate(constraints):
            if len(c.coeffs) != len(objective):
                raise ValueError(
                    f"constraint {k} has {len(c.coeffs)} coefficients, objective has {len(objective)}"
                )
        free = frozenset(self.free)
        if any(not 0 <= j < len(objective) for j in free):
            raise ValueError("free variable index out of range")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "free", free)

    @property
    def n_vars(self) -> int:
        return len(self.objective)


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    values: tuple[Fraction, ...] = ()
    objective_value: Fraction | None = None
    duals: tuple[Fraction, ...] = ()
    iterations: int = 0


def _lcm_denominators(values: Sequence[Fraction]) -> int:
    return math.lcm(*(v.denominator for v in values)) if values else 1


def _to_blocks(lp: LinearProgram) -> tuple[BlockProgram, list[int], int, list[int]]:
    row_scale = [_lcm_denominators(c.coeffs) for c in lp.constraints]
    sign = -1 if lp.sense == "max" else 1
    cost_scale = _lcm_denominators(lp.objective)
    columns, costs, origin = [], [], []
    for j in range(lp.n_vars):
        col = {
            i: int(c.coeffs[j] * s)
            for i, (c, s) in enumerate(zip(lp.constraints, row_scale))
            if c.coeffs[j] != 0
        }
        cost = int(sign * lp.objective[j] * cost_scale)
        columns.append(col)
        costs.append(cost)
        origin.append(j)
        if j in lp.free:
            columns.append({i: -v for i, v in col.items()})
            costs.append(-cost)
            origin.append(~j)
    m = len(lp.constraints)
    program = BlockProgram(
        tuple(c.relation for c in lp.constraints),
        tuple(c.rhs * s for c, s in zip(lp.constraints, row_scale)),
        (ExplicitBlock(columns, costs, m),),
    )
    return program, row_scale, cost_scale, origin


def solve(lp: LinearProgram, rule: PivotRule | str = PivotRule.BLAND) -> LpSolution:
    """Solve ``lp`` exactly; returns a basic optimal solution with row duals.

    Duals follow the usual convention for the stated sense: for ``min``,
    ``c - A^T y >= 0``, ``y <= 0`` on ``<=`` rows and ``y >= 0`` on ``>=`` rows;
    for ``max`` every inequality flips.  At optimality ``b . y`` equals the
    objective value.
    """
    program, row_scale, cost_scale, origin = _to_blocks(lp)
    result = solve_blocks(program, rule)
    if result.status is not LpStatus.OPTIMAL:
        return LpSolution(result.status, iterations=result.iterations)
    x = [Fraction(0)] * lp.n_vars
    for k, v in result.values[0].items():
        j = origin[k]
        if j >= 0:
            x[j] += v
        else:
            x[~j] -= v
    sign = -1 if lp.sense == "max" else 1
    duals = tuple(sign * y * s / cost_scale for y, s in zip(result.duals, row_scale))
    objective = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LpSolution(LpStatus.OPTIMAL, tuple(x), objective, duals, result.iterations)


def check_feasible(lp: LinearProgram) -> bool:
    """True iff the constraints of ``lp`` admit a point (phase one only)."""
    program, *_ = _to_blocks(lp)
    return solve_blocks(program, feasibility_only=True).status is LpStatus.OPTIMAL


def _row_value(c: Constraint, x: Sequence[Fraction]) -> Fraction:
    return sum((a * v for a, v in zip(c.coeffs, x) if a), Fraction(0))


def is_primal_feasible(lp: LinearProgram, x: Sequence[Fraction]) -> bool:
    if len(x) != lp.n_vars:
        return False
    if any(v < 0 for j, v in enumerate(x) if j not in lp.free):
        return False
    for c in lp.constraints:
        lhs = _row_value(c, x)
        if (c.relation == LE and lhs > c.rhs) or (c.relation == GE and lhs < c.rhs) or (
            c.relation == EQ and lhs != c.rhs
        ):
            return False
    return True


def verify_certificate(lp: LinearProgram, solution: LpSolution) -> bool:
    """Check primal feasibility, dual feasibility and ``b.y == c.x`` exactly."""
    if solution.status is not LpStatus.OPTIMAL:
        return False
    x, y = solution.values, solution.duals
    if len(y) != len(lp.constraints) or not is_primal_feasible(lp, x):
        return False
    flip = 1 if lp.sense == "min" else -1
    for c, yi in zip(lp.constraints, y):
        yi = flip * yi
        if (c.relation == LE and yi > 0) or (c.relation == GE and yi < 0):
            return False
    for j in range(lp.n_vars):
        reduced = flip * (lp.objective[j] - sum((c.coeffs[j] * yi for c, yi in zip(lp.constraints, y)), Fraction(0)))
        if j in lp.free:
            if reduced != 0:
                return False
        elif reduced < 0:
            return False
    dual_value = sum((c.rhs * yi for c, yi in zip(lp.constraints, y)), Fraction(0))
    primal_value = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return dual_value == primal_value == solution.objective_value
