"""Probability vectors and incidence matrices over coupling atoms.

Atom layout: a coupling of a rank-``n`` system has ``2n`` binary variables.
Bit ``k`` of an atom index is the value of variable ``k`` in the order
``S_1^1, S_2^1, S_2^2, S_3^2, ..., S_n^n, S_1^n``; context ``c_i`` owns bits
``2(i-1)`` (first slot) and ``2(i-1)+1`` (second slot).  Read cyclically these
bits form a ring in which every bunch and every connection event touches two
neighbouring bits, which is what makes structured pricing possible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .coupling import connection_vector
from .lp import ColumnBlock
from .system import CyclicSystem, Slot, pred

_SLOT_OFFSET = {"first": 0, "second": 1}


@dataclass(frozen=True)
class Marginal:
    context: int
    slot: Slot
    value: int


@dataclass(frozen=True)
class BunchEvent:
    context: int
    r: int
    s: int


@dataclass(frozen=True)
class ConnectionEvent:
    """``T_i^i = r`` and ``T_i^{i⊖1} = s`` for content ``i``."""

    content: int
    r: int
    s: int


EventLabel = Union[Marginal, BunchEvent, ConnectionEvent]
PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


def n_atoms(rank: int) -> int:
    return 1 << (2 * rank)


def variable_bit(context: int, slot: Slot, rank: int) -> int:
    if not 1 <= context <= rank:
        raise IndexError(f"context {context} outside 1..{rank}")
    return 2 * (context - 1) + _SLOT_OFFSET[slot]


def event_bits(event: EventLabel, rank: int) -> tuple[tuple[int, int], ...]:
    """``((bit, required value), ...)`` characterising ``event``."""
    if isinstance(event, Marginal):
        return ((variable_bit(event.context, event.slot, rank), event.value),)
    if isinstance(event, BunchEvent):
        first = variable_bit(event.context, "first", rank)
        return ((first, event.r), (first + 1, event.s))
    if isinstance(event, ConnectionEvent):
        own = variable_bit(event.content, "first", rank)
        other = variable_bit(pred(event.content, rank), "second", rank)
        return ((own, event.r), (other, event.s))
    raise TypeError(f"not an event label: {event!r}")


def atom_satisfies(atom: int, event: EventLabel, rank: int) -> bool:
    return all((atom >> bit) & 1 == value for bit, value in event_bits(event, rank))


def full_labels(rank: int) -> tuple[EventLabel, ...]:
    """Row labels of the full matrix, in the frozen ``l, b, c`` order."""
    labels: list[EventLabel] = []
    for i in range(1, rank + 1):
        for slot in ("first", "second"):
            labels.extend(Marginal(i, slot, r) for r in (0, 1))
    labels.extend(BunchEvent(i, r, s) for i in range(1, rank + 1) for r, s in PAIRS)
    labels.extend(ConnectionEvent(i, r, s) for i in range(1, rank + 1) for r, s in PAIRS)
    return tuple(labels)


def reduced_labels(rank: int) -> tuple[EventLabel, ...]:
    labels: list[EventLabel] = []
    for i in range(1, rank + 1):
        labels.extend((Marginal(i, "first", 1), Marginal(i, "second", 1)))
    labels.extend(BunchEvent(i, 1, 1) for i in range(1, rank + 1))
    labels.extend(ConnectionEvent(i, 1, 1) for i in range(1, rank + 1))
    return tuple(labels)


def event_probability(system: CyclicSystem, event: EventLabel, couplings=None) -> Fraction:
    if isinstance(event, Marginal):
        p1 = system.bunch(event.context).first if event.slot == "first" else system.bunch(event.context).second
        return p1 if event.value == 1 else 1 - p1
    if isinstance(event, BunchEvent):
        return system.bunch(event.context).prob(event.r, event.s)
    if couplings is None:
        couplings = connection_vector(system)
    return couplings[event.content - 1].prob(event.r, event.s)


@dataclass(frozen=True)
class ProbabilityVector:
    """Labelled exact probabilities; ``values[k]`` is the probability of ``labels[k]``."""

    rank: int
    labels: tuple[EventLabel, ...]
    values: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def as_dict(self) -> dict[EventLabel, Fraction]:
        return dict(zip(self.labels, self.values))


class ProbabilityVectorFull(ProbabilityVector):
    pass


class ProbabilityVectorReduced(ProbabilityVector):
    @property
    def l(self) -> tuple[Fraction, ...]:
        return self.values[: 2 * self.rank]

    @property
    def b(self) -> tuple[Fraction, ...]:
        return self.values[2 * self.rank : 3 * self.rank]

    @property
    def c(self) -> tuple[Fraction, ...]:
        return self.values[3 * self.rank :]


def _vector(system: CyclicSystem, labels: tuple[EventLabel, ...]) -> tuple[Fraction, ...]:
    couplings = connection_vector(system)
    return tuple(event_probability(system, e, couplings) for e in labels)


def build_full_vector(system: CyclicSystem) -> ProbabilityVectorFull:
    labels = full_labels(system.rank)
    return ProbabilityVectorFull(system.rank, labels, _vector(system, labels))


def build_reduced_vector(system: CyclicSystem) -> ProbabilityVectorReduced:
    labels = reduced_labels(system.rank)
    return ProbabilityVectorReduced(system.rank, labels, _vector(system, labels))


def _atom_bits(rank: int) -> np.ndarray:
    """``bits[k, v]`` = bit ``k`` of atom ``v``."""
    atoms = np.arange(n_atoms(rank), dtype=np.int64)
    return ((atoms[None, :] >> np.arange(2 * rank, dtype=np.int64)[:, None]) & 1).astype(np.uint8)


def _event_mask(event: EventLabel | None, rank: int, bits: np.ndarray) -> np.ndarray:
    if event is None:
        return np.ones(bits.shape[1], dtype=bool)
    mask = np.ones(bits.shape[1], dtype=bool)
    for bit, value in event_bits(event, rank):
        mask &= bits[bit] == value
    return mask


@dataclass(frozen=True)
class IncidenceMatrix:
    """0/1 matrix with one row per event and one column per atom.

    Each row is stored as a Python integer bitset: bit ``v`` is set iff atom
    ``v`` satisfies the row's event.
    """

    rank: int
    labels: tuple[EventLabel, ...]
    rows: tuple[int, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), n_atoms(self.rank))

    def entry(self, u: int, v: int) -> int:
        return (self.rows[u] >> v) & 1

    def row_count(self, u: int) -> int:
        return self.rows[u].bit_count() if hasattr(int, "bit_count") else bin(self.rows[u]).count("1")

    def dense(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        n = self.shape[1]
        for u, row in enumerate(self.rows):
            raw = row.to_bytes((n + 7) // 8, "little")
            out[u] = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:n]
        return out

    def matvec(self, x: Mapping[int, Fraction] | Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Exact ``M x`` for a dense sequence or a sparse ``{atom: weight}`` map."""
        items = x.items() if isinstance(x, Mapping) else enumerate(x)
        nz = [(v, Fraction(w)) for v, w in items if w]
        return tuple(
            sum((w for v, w in nz if (row >> v) & 1), Fraction(0)) for row in self.rows
        )


def build_incidence_matrix(labels: Iterable[EventLabel], rank: int) -> IncidenceMatrix:
    labels = tuple(labels)
    bits = _atom_bits(rank)
    n = bits.shape[1]
    rows = []
    for event in labels:
        packed = np.packbits(_event_mask(event, rank, bits), bitorder="little").tobytes()
        rows.append(int.from_bytes(packed, "little") & ((1 << n) - 1))
    return IncidenceMatrix(rank, labels, tuple(rows))


def full_incidence_matrix(rank: int) -> IncidenceMatrix:
    return build_incidence_matrix(full_labels(rank), rank)


def reduced_incidence_matrix(rank: int) -> IncidenceMatrix:
    return build_incidence_matrix(reduced_labels(rank), rank)


# ---------------------------------------------------------------------------
# Atoms as LP columns

# Above this many atoms the dense pricer is replaced by dynamic programming
# around the ring of bits.
DENSE_PRICING_LIMIT = 1 << 12


class AtomColumns(ColumnBlock):
    """One LP variable per atom; column ``v`` is ``sign * (M_rows[:, v])``.

    ``row_events[i]`` names the event of LP row ``i`` (``None`` marks a
    total-mass row where every atom has coefficient 1); rows absent from the
    mapping are untouched by atom columns.

    Atoms satisfying any event in ``excluded`` are left out of the block
    (their variables are fixed at zero and never priced).  Excluded events must
    involve one bit or two ring-neighbour bits, like every row event.
    """

    def __init__(
        self,
        rank: int,
        row_events: Mapping[int, EventLabel | None],
        sign: int = 1,
        cost: int = 0,
        dense: bool | None = None,
        excluded: Iterable[EventLabel] = (),
    ):
        if sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")
        self.rank = rank
        self.size = n_atoms(rank)
        self.sign = sign
        self.cost_value = cost
        self.rows = dict(row_events)
        self._terms = {i: (event_bits(e, rank) if e is not None else ()) for i, e in self.rows.items()}
        self._masks = [
            (i, sum(1 << b for b, _ in t), sum(v << b for b, v in t)) for i, t in self._terms.items()
        ]
        self.excluded = tuple(excluded)
        self._excluded_terms = [event_bits(e, rank) for e in self.excluded]
        if dense is None:
            dense = self.size <= DENSE_PRICING_LIMIT
        self._dense = None
        if dense:
            bits = _atom_bits(rank)
            idx = sorted(self.rows)
            self._dense_rows = idx
            self._dense = np.stack([_event_mask(self.rows[i], rank, bits) for i in idx]).astype(np.int64)
            allowed = np.ones(self.size, dtype=bool)
            for e in self.excluded:
                allowed &= ~_event_mask(e, rank, bits)
            self._allowed = np.flatnonzero(allowed)
            self._dense = self._dense[:, self._allowed]

    def is_excluded(self, j: int) -> bool:
        return any(all((j >> b) & 1 == v for b, v in t) for t in self._excluded_terms)

    def column(self, j: int) -> dict[int, int]:
        return {i: self.sign for i, mask, want in self._masks if j & mask == want}

    def cost(self, j: int) -> int:
        return self.cost_value

    # -- dense pricing -------------------------------------------------------

    def _dense_reduced(self, weights: Sequence[int], scale: int) -> np.ndarray:
        w = [weights[i] for i in self._dense_rows]
        wsum = sum(abs(x) for x in w)
        base = scale * self.cost_value
        if wsum + abs(base) < (1 << 62):
            return base - self.sign * (np.array(w, dtype=np.int64) @ self._dense)
        return base - self.sign * (np.array(w, dtype=object) @ self._dense.astype(object))

    # -- ring pricing ---------------------------------------------------------

    def _tables(self, weights: Sequence[int], scale: int):
        """Reduced cost as ``const + sum unary[k][x_k] + sum pair[k][x_k][x_{k+1}]``."""
        L = 2 * self.rank
        const = scale * self.cost_value
        unary = [[0, 0] for _ in range(L)]
        pair = [[[0, 0], [0, 0]] for _ in range(L)]
        for i, terms in self._terms.items():
            w = weights[i]
            if not w:
                continue
            coef = -self.sign * w
            if not terms:
                const += coef
            elif len(terms) == 1:
                (bit, value), = terms
                unary[bit][value] += coef
            else:
                (b1, v1), (b2, v2) = terms
                if (b1 + 1) % L == b2:
                    pair[b1][v1][v2] += coef
                elif (b2 + 1) % L == b1:
                    pair[b2][v2][v1] += coef
                else:  # pragma: no cover - events always touch ring neighbours
                    raise AssertionError("event bits are not ring neighbours")
        for terms in self._excluded_terms:
            if len(terms) == 1:
                (bit, value), = terms
                unary[bit][value] = math.inf
            else:
                (b1, v1), (b2, v2) = terms
                if (b1 + 1) % L == b2:
                    pair[b1][v1][v2] = math.inf
                else:
                    pair[b2][v2][v1] = math.inf
        return const, unary, pair

    @staticmethod
    def _forward(unary, pair):
        """``F[k] = (f00, f01, f10, f11)``, ``f_ay`` the cheapest bits ``0..k``
        with ``x_0 = a`` and ``x_k = y`` (``inf`` when impossible)."""
        inf = math.inf
        u0, u1 = unary[0]
        f00, f01, f10, f11 = u0, inf, inf, u1
        table = [(f00, f01, f10, f11)]
        for k in range(1, len(unary)):
            (e00, e01), (e10, e11) = pair[k - 1]
            v0, v1 = unary[k]
            f00, f01, f10, f11 = (
                v0 + min(f00 + e00, f01 + e10),
                v1 + min(f00 + e01, f01 + e11),
                v0 + min(f10 + e00, f11 + e10),
                v1 + min(f10 + e01, f11 + e11),
            )
            table.append((f00, f01, f10, f11))
        return table

    @staticmethod
    def _ring_min(const, unary, pair) -> int:
        f00, f01, f10, f11 = AtomColumns._forward(unary, pair)[-1]
        (w00, w01), (w10, w11) = pair[-1]
        return const + min(f00 + w00, f01 + w10, f10 + w01, f11 + w11)

    def _ring_first_below(self, weights, scale, threshold) -> int | None:
        const, unary, pair = self._tables(weights, scale)
        forward = self._forward(unary, pair)
        wrap = pair[-1]
        L = 2 * self.rank
        atom = 0
        top = 0  # value of bit L - 1 once fixed
        nxt = 0  # value of bit k + 1
        above = const  # cost of the bits already fixed, above position k
        for k in range(L - 1, -1, -1):
            f = forward[k]
            for x in (0, 1):
                t = x if k == L - 1 else top
                link = pair[k][x][nxt] if k < L - 1 else 0
                # x_0 = a closes the ring through the wrap edge
                cost = above + link + min(f[x] + wrap[t][0], f[2 + x] + wrap[t][1])
                if cost < threshold:
                    break
            else:
                return None
            if k == L - 1:
                top = x
            atom |= x << k
            above += unary[k][x] + link
            nxt = x
        return atom

    # -- ColumnBlock -----------------------------------------------------------

    def first_below(self, weights, scale, threshold):
        if self._dense is not None:
            hits = np.flatnonzero(self._dense_reduced(weights, scale) < threshold)
            return int(self._allowed[hits[0]]) if hits.size else None
        return self._ring_first_below(weights, scale, threshold)

    def minimum(self, weights, scale):
        if self._dense is not None:
            if not self._allowed.size:
                return None
            return int(self._dense_reduced(weights, scale).min())
        value = self._ring_min(*self._tables(weights, scale))
        return None if value == math.inf else value
