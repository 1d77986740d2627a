"""Multimaximal couplings of the two-variable connections of a cyclic system."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .system import CyclicSystem, InvalidSystemError, as_fraction, content_marginals


@dataclass(frozen=True)
class ConnectionCoupling:
    """Joint law ``p_rs = Pr(T_i^i = r, T_i^{i⊖1} = s)`` of one connection.

    Given the two marginals a maximal coupling of two binary variables is
    unique, so no tie-breaking is involved anywhere.
    """

    p00: Fraction
    p01: Fraction
    p10: Fraction
    p11: Fraction

    def __post_init__(self) -> None:
        cells = self.as_tuple()
        if any(p < 0 or p > 1 for p in cells) or sum(cells) != 1:
            raise InvalidSystemError(f"not a distribution: {cells}")
        if self.p01 != 0 and self.p10 != 0:
            raise InvalidSystemError("a multimaximal coupling has a zero off-diagonal cell")

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.p00, self.p01, self.p10, self.p11)

    def prob(self, r: int, s: int) -> Fraction:
        return self.as_tuple()[2 * r + s]

    @property
    def agreement(self) -> Fraction:
        return self.p00 + self.p11


def multimaximal_coupling(a: Fraction, b: Fraction) -> ConnectionCoupling:
    """Maximal coupling of ``Bernoulli(a)`` (first) and ``Bernoulli(b)`` (second)."""
    a, b = as_fraction(a), as_fraction(b)
    if not (0 <= a <= 1 and 0 <= b <= 1):
        raise ValueError(f"marginals must lie in [0, 1], got {a}, {b}")
    p11 = min(a, b)
    p00 = min(1 - a, 1 - b)
    return ConnectionCoupling(p00, b - p11, a - p11, p11)


def connection_vector(system: CyclicSystem) -> tuple[ConnectionCoupling, ...]:
    """Coupling of connection ``i`` for ``i = 1..n``, first coordinate from ``c_i``."""
    return tuple(
        multimaximal_coupling(*content_marginals(system, i))
        for i in range(1, system.rank + 1)
    )
