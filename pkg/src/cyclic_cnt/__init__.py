"""Exact contextuality measures for cyclic systems of binary random variables."""

from .consistify import ConsistificationCheck, ConsistificationMap, consistify, verify_consistification_relations
from .coupling import ConnectionCoupling, connection_vector, multimaximal_coupling
from .generators import GeneratorSpec, preset, random_consistent_system, random_correlated_system, random_system
from .measures import (
    ContextualityError,
    DefectiveMeasure,
    MeasureReport,
    SignedMeasure,
    cnt3,
    cnt3_single_negative,
    cntf,
    in_pyramid,
    is_noncontextual,
    lemma2_defective_coupling,
    verify_proportionality,
)
from .system import (
    BunchDistribution,
    CyclicSystem,
    InvalidSystemError,
    is_consistently_connected,
    new_system,
)

__version__ = "0.1.0"

__all__ = [
    "BunchDistribution",
    "ConnectionCoupling",
    "ConsistificationCheck",
    "ConsistificationMap",
    "ContextualityError",
    "CyclicSystem",
    "DefectiveMeasure",
    "GeneratorSpec",
    "InvalidSystemError",
    "MeasureReport",
    "SignedMeasure",
    "cnt3",
    "cnt3_single_negative",
    "cntf",
    "connection_vector",
    "consistify",
    "in_pyramid",
    "is_consistently_connected",
    "is_noncontextual",
    "lemma2_defective_coupling",
    "multimaximal_coupling",
    "new_system",
    "preset",
    "random_consistent_system",
    "random_correlated_system",
    "random_system",
    "verify_consistification_relations",
    "verify_proportionality",
]
