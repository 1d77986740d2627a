"""Cyclic systems of binary random variables.

A rank-``n`` cyclic system has contexts ``c_1 .. c_n``; context ``c_i`` holds the
pair ``(R_i^i, R_{i+1}^i)`` with indices taken cyclically.  Every bunch is stored
as a 2x2 table ``p_ab = Pr(R_i^i = a, R_{i+1}^i = b)``.  Contexts and contents
are 1-based everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Literal, Union

Slot = Literal["first", "second"]
RationalLike = Union[Fraction, int, str, Decimal]

ZERO = Fraction(0)
ONE = Fraction(1)


class InvalidSystemError(ValueError):
    """Raised when a bunch or system violates its invariants."""


def as_fraction(value: RationalLike) -> Fraction:
    """Convert ``value`` to an exact :class:`Fraction`.

    Strings may be ``"a/b"`` or finite decimals (``"0.125"`` becomes 1/8).
    Floats are refused: a binary float such as ``0.1`` is not the decimal the
    user typed, and silently keeping its binary expansion would make every
    downstream measure inexact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Decimal)):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not an exact rational: {value!r}") from exc
    raise TypeError(f"cannot convert {type(value).__name__} exactly; use 'a/b' strings")


def succ(i: int, n: int) -> int:
    """Cyclic successor ``i ⊕ 1`` on ``1..n``."""
    return i % n + 1


def pred(i: int, n: int) -> int:
    """Cyclic predecessor ``i ⊖ 1`` on ``1..n``."""
    return (i - 2) % n + 1


@dataclass(frozen=True)
class BunchDistribution:
    """Joint distribution of the two binary variables of one context."""

    p00: Fraction
    p01: Fraction
    p10: Fraction
    p11: Fraction

    def __post_init__(self) -> None:
        for name in ("p00", "p01", "p10", "p11"):
            try:
                value = as_fraction(getattr(self, name))
            except (TypeError, ValueError) as exc:
                raise InvalidSystemError(f"{name}: {exc}") from exc
            if value < 0 or value > 1:
                raise InvalidSystemError(f"{name} = {value} lies outside [0, 1]")
            object.__setattr__(self, name, value)
        total = self.p00 + self.p01 + self.p10 + self.p11
        if total != 1:
            raise InvalidSystemError(f"bunch sums to {total}, not 1")

    @classmethod
    def from_table(cls, values: Iterable[RationalLike]) -> "BunchDistribution":
        p00, p01, p10, p11 = values
        return cls(p00, p01, p10, p11)

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.p00, self.p01, self.p10, self.p11)

    def prob(self, a: int, b: int) -> Fraction:
        return self.as_tuple()[2 * a + b]

    @property
    def first(self) -> Fraction:
        """``Pr(first variable = 1)``."""
        return self.p10 + self.p11

    @property
    def second(self) -> Fraction:
        """``Pr(second variable = 1)``."""
        return self.p01 + self.p11

    def flip_first(self) -> "BunchDistribution":
        return BunchDistribution(self.p10, self.p11, self.p00, self.p01)

    def flip_second(self) -> "BunchDistribution":
        return BunchDistribution(self.p01, self.p00, self.p11, self.p10)

    def transposed(self) -> "BunchDistribution":
        return BunchDistribution(self.p00, self.p10, self.p01, self.p11)


@dataclass(frozen=True)
class CyclicSystem:
    rank: int
    bunches: tuple[BunchDistribution, ...]

    def __post_init__(self) -> None:
        if not isinstance(self.rank, int) or self.rank < 2:
            raise InvalidSystemError(f"rank must be an integer >= 2, got {self.rank!r}")
        bunches = tuple(self.bunches)
        if len(bunches) != self.rank:
            raise InvalidSystemError(
                f"rank {self.rank} needs {self.rank} bunches, got {len(bunches)}"
            )
        for i, bunch in enumerate(bunches, start=1):
            if not isinstance(bunch, BunchDistribution):
                raise InvalidSystemError(f"bunch {i} is not a BunchDistribution")
        object.__setattr__(self, "bunches", bunches)

    def bunch(self, context: int) -> BunchDistribution:
        _check_index(context, self.rank, "context")
        return self.bunches[context - 1]


def _check_index(i: int, n: int, what: str) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"{what} index {i} outside 1..{n}")


def new_system(rank: int, bunches: Iterable[BunchDistribution | Iterable[RationalLike]]) -> CyclicSystem:
    """Validate and build a cyclic system.

    ``bunches`` may hold :class:`BunchDistribution` objects or 4-sequences
    ``(p00, p01, p10, p11)``.
    """
    built = []
    for i, bunch in enumerate(bunches, start=1):
        if isinstance(bunch, BunchDistribution):
            built.append(bunch)
            continue
        try:
            built.append(BunchDistribution.from_table(bunch))
        except InvalidSystemError as exc:
            raise InvalidSystemError(f"bunch {i}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise InvalidSystemError(f"bunch {i}: expected 4 probabilities ({exc})") from exc
    return CyclicSystem(rank, tuple(built))


def marginal(system: CyclicSystem, context: int, slot: Slot) -> Fraction:
    """``Pr(R = 1)`` for the variable in ``slot`` of ``context``."""
    bunch = system.bunch(context)
    if slot == "first":
        return bunch.first
    if slot == "second":
        return bunch.second
    raise ValueError(f"slot must be 'first' or 'second', got {slot!r}")


def content_marginals(system: CyclicSystem, content: int) -> tuple[Fraction, Fraction]:
    """``(Pr(R_j^j = 1), Pr(R_j^{j⊖1} = 1))`` for content ``j``."""
    _check_index(content, system.rank, "content")
    return (
        marginal(system, content, "first"),
        marginal(system, pred(content, system.rank), "second"),
    )


def is_consistently_connected(system: CyclicSystem) -> bool:
    return all(
        a == b for a, b in (content_marginals(system, j) for j in range(1, system.rank + 1))
    )


def relabel_content(system: CyclicSystem, content: int) -> CyclicSystem:
    """Replace both variables of ``content`` by their 0/1 complements."""
    n = system.rank
    _check_index(content, n, "content")
    bunches = list(system.bunches)
    bunches[content - 1] = bunches[content - 1].flip_first()
    before = pred(content, n)
    bunches[before - 1] = bunches[before - 1].flip_second()
    return CyclicSystem(n, tuple(bunches))
