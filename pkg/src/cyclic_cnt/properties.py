"""Exact property checks on a single system, as run by ``cyclic-cnt verify``."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

from .consistify import consistify, verify_consistification_relations
from .coupling import connection_vector
from .measures import (
    SignedMeasure,
    cnt3_single_negative,
    in_pyramid,
    l1_distance,
    lemma2_defective_coupling,
    verify_proportionality,
)
from .system import CyclicSystem, is_consistently_connected
from .vectorization import ConnectionEvent, atom_satisfies, build_reduced_vector, reduced_incidence_matrix


def _zero_cell_events(system: CyclicSystem) -> list[ConnectionEvent]:
    events = []
    for i, c in enumerate(connection_vector(system), start=1):
        for r, s in ((0, 1), (1, 0)):
            if c.prob(r, s) == 0:
                events.append(ConnectionEvent(i, r, s))
    return events


@lru_cache(maxsize=None)
def _reduced_matrix(rank: int):
    return reduced_incidence_matrix(rank)


def is_quasi_coupling(y: SignedMeasure, system: CyclicSystem) -> bool:
    """``M y = p*`` on the reduced rows and ``1.y = 1``."""
    matrix = _reduced_matrix(system.rank)
    return y.total == 1 and matrix.matvec(y.weights) == tuple(build_reduced_vector(system).values)


@dataclass
class TrialOutcome:
    """Named exact checks for one system; ``passed`` iff all of them hold."""

    rank: int
    contextual: bool
    cnt3: Fraction
    cntf: Fraction
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


def lemma_checks(system: CyclicSystem, cnt3: Fraction, cntf: Fraction) -> dict[str, bool]:
    """Single-negative witness and the defective coupling built from it."""
    n = system.rank
    y = cnt3_single_negative(system, cnt3)
    z = lemma2_defective_coupling(system, y)
    negatives = y.negative_atoms
    distance = l1_distance(y, z)
    return {
        "single_negative_atom": len(negatives) == 1,
        "negative_mass_is_half_cnt3": len(negatives) == 1 and y[negatives[0]] == -cnt3 / 2,
        "negative_atom_in_zero_cell": len(negatives) == 1
        and any(atom_satisfies(negatives[0], e, n) for e in _zero_cell_events(system)),
        "single_negative_is_quasi_coupling": is_quasi_coupling(y, system),
        "single_negative_norm": y.l1_norm - 1 == cnt3,
        "defective_in_pyramid": in_pyramid(z, system),
        "defective_mass_is_one_minus_cntf": 1 - z.total == cntf,
        "distance_is_n_cnt3": distance == n * cnt3,
        "distance_is_cntf_plus_cnt3": distance == cntf + cnt3,
        "defective_dominated": all(abs(y[v]) >= w for v, w in z.weights.items()),
    }


def check_system(system: CyclicSystem, deep: bool = False, consistent: bool = False) -> TrialOutcome:
    report = verify_proportionality(system, witnesses=True)
    outcome = TrialOutcome(system.rank, not report.noncontextual, report.cnt3, report.cntf)
    checks = outcome.checks
    checks["proportionality"] = report.proportionality_holds
    checks["status_agreement"] = report.consistent
    checks["cnt3_witness_is_quasi_coupling"] = is_quasi_coupling(report.y_star, system)
    checks["cntf_witness_in_pyramid"] = in_pyramid(report.z_star, system)
    if deep and report.cnt3 > 0:
        checks.update(lemma_checks(system, report.cnt3, report.cntf))
    if consistent:
        relations = verify_consistification_relations(system)
        twin, _ = consistify(system)
        checks["consistified_is_consistently_connected"] = is_consistently_connected(twin)
        checks["cntf_invariant"] = relations.cntf_invariant
        checks["cnt3_ratio"] = relations.cnt3_ratio_holds
        checks["consistified_status"] = relations.status_preserved
    return outcome
