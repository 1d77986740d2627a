"""Consistification: a rank-``2n`` consistently connected twin of a cyclic system.

The new cyclic order is ``c_1, q_2, c_2, q_3, ..., c_n, q_1``.  Odd positions
carry the original bunches unchanged; the bunch at context ``q_j`` is the
multimaximal coupling of connection ``j``, with first slot the copy recorded in
the context just before it (``T_j^{j⊖1}``) and second slot ``T_j^j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .coupling import connection_vector
from .measures import cnt3, cntf, is_noncontextual
from .system import BunchDistribution, CyclicSystem, succ


@dataclass(frozen=True)
class ConsistificationMap:
    original_rank: int

    @property
    def rank(self) -> int:
        return 2 * self.original_rank

    def context_name(self, position: int) -> str:
        """Name of new context ``position`` (1-based): ``c_i`` or ``q_j``."""
        if not 1 <= position <= self.rank:
            raise IndexError(f"position {position} outside 1..{self.rank}")
        half, odd = divmod(position - 1, 2)
        if odd == 0:
            return f"c{half + 1}"
        return f"q{succ(half + 1, self.original_rank)}"

    def content_name(self, position: int) -> str:
        """New content ``position`` as ``q_{ij}`` = content ``q_j`` recorded in ``c_i``."""
        if not 1 <= position <= self.rank:
            raise IndexError(f"position {position} outside 1..{self.rank}")
        n = self.original_rank
        half, odd = divmod(position - 1, 2)
        i = half + 1
        j = i if odd == 0 else succ(i, n)
        return f"q{i}{j}"


def consistify(system: CyclicSystem) -> tuple[CyclicSystem, ConsistificationMap]:
    n = system.rank
    couplings = connection_vector(system)
    bunches = []
    for i in range(1, n + 1):
        bunches.append(system.bunch(i))
        c = couplings[succ(i, n) - 1]
        # coupling cells are (T_j^j, T_j^{j⊖1}); the new bunch wants them reversed
        bunches.append(BunchDistribution(c.p00, c.p10, c.p01, c.p11))
    return CyclicSystem(2 * n, tuple(bunches)), ConsistificationMap(n)


@dataclass(frozen=True)
class ConsistificationCheck:
    rank: int
    cnt3: Fraction
    cntf: Fraction
    cnt3_consistified: Fraction
    cntf_consistified: Fraction
    status_preserved: bool

    @property
    def cntf_invariant(self) -> bool:
        return self.cntf == self.cntf_consistified

    @property
    def cnt3_ratio(self) -> Fraction | None:
        return None if self.cnt3 == 0 else self.cnt3_consistified / self.cnt3

    @property
    def cnt3_ratio_holds(self) -> bool:
        n = self.rank
        return self.cnt3_consistified == Fraction(n - 1, 2 * n - 1) * self.cnt3


def verify_consistification_relations(system: CyclicSystem) -> ConsistificationCheck:
    twin, _ = consistify(system)
    value3, _ = cnt3(system)
    valuef, _ = cntf(system)
    twin3, _ = cnt3(twin)
    twinf, _ = cntf(twin)
    return ConsistificationCheck(
        rank=system.rank,
        cnt3=value3,
        cntf=valuef,
        cnt3_consistified=twin3,
        cntf_consistified=twinf,
        status_preserved=is_noncontextual(system) == is_noncontextual(twin),
    )
