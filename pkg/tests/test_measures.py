from fractions import Fraction as F

import pytest
from hypothesis import given, settings

from cyclic_cnt import (
    ContextualityError,
    SignedMeasure,
    cnt3,
    cnt3_single_negative,
    cntf,
    in_pyramid,
    is_noncontextual,
    lemma2_defective_coupling,
    new_system,
    preset,
    verify_proportionality,
)
from cyclic_cnt.generators import GeneratorSpec, random_correlated_system, sweep_system
from cyclic_cnt.lp import EQ, LE, GE, Constraint, LinearProgram, LpStatus, solve
from cyclic_cnt.measures import DefectiveMeasure, l1_distance, lemma2_program
from cyclic_cnt.properties import is_quasi_coupling, lemma_checks

import oracles
from strategies import systems


def cnt3_by_norm(system):
    """``min ||y||_1 - 1`` over quasi-couplings, with ``t >= |y|`` on the oracle matrix."""
    M = oracles.dense_matrix(system.rank, "reduced")
    p = oracles.reduced_vector(system)
    k = M.shape[1]
    # variables: y (free) then t
    objective = (F(0),) * k + (F(1),) * k
    rows = [Constraint(tuple(F(int(x)) for x in M[u]) + (F(0),) * k, EQ, p[u]) for u in range(M.shape[0])]
    rows.append(Constraint((F(1),) * k + (F(0),) * k, EQ, F(1)))
    for j in range(k):
        unit = [F(0)] * (2 * k)
        unit[j], unit[k + j] = F(-1), F(1)
        rows.append(Constraint(tuple(unit), GE, 0))
        unit[j] = F(1)
        rows.append(Constraint(tuple(unit), GE, 0))
    sol = solve(LinearProgram(objective, tuple(rows), "min", frozenset(range(k))))
    assert sol.status is LpStatus.OPTIMAL
    return sol.objective_value - 1


def cntf_by_oracle(system):
    M = oracles.dense_matrix(system.rank, "full")
    p = oracles.full_vector(system)
    k = M.shape[1]
    rows = [Constraint(tuple(F(int(x)) for x in M[u]), LE, p[u]) for u in range(M.shape[0])]
    rows.append(Constraint((F(1),) * k, LE, F(1)))
    sol = solve(LinearProgram((F(1),) * k, tuple(rows), "max"))
    return 1 - sol.objective_value


def test_example_values():
    for name in ("example1", "example2"):
        system = preset(name)
        assert cnt3(system)[0] == F(1, 8)
        assert cntf(system)[0] == F(1, 4)
        assert not is_noncontextual(system)


def test_noncontextual_examples():
    system = preset("uniform-independent-3")
    assert is_noncontextual(system)
    value, y = cnt3(system)
    assert value == 0 and y.negative_mass == 0
    assert cntf(system)[0] == 0


def test_pr_box():
    system = preset("pr-box")
    assert not is_noncontextual(system)
    assert cnt3(system)[0] == F(1, 3)
    assert cntf(system)[0] == 1


def test_pr_box_every_atom_hits_a_zero_cell():
    system = preset("pr-box")
    p = oracles.full_vector(system)
    zero_rows = [cond for (cond, _), value in zip(oracles.full_rows(4), p) if value == 0]
    assert all(any(oracles.satisfies(v, cond) for cond in zero_rows) for v in range(256))


@pytest.mark.parametrize("n", [2, 3])
def test_measures_match_independent_formulations(n):
    for seed in range(9):
        system = sweep_system(GeneratorSpec(n, seed))
        assert cnt3(system)[0] == cnt3_by_norm(system)
        assert cntf(system)[0] == cntf_by_oracle(system)


@settings(max_examples=40, deadline=None)
@given(systems(min_rank=2, max_rank=2))
def test_rank2_noncontextuality_matches_vertex_enumeration(system):
    assert is_noncontextual(system) == bool(oracles.rank2_coupling_vertices(system))


@settings(max_examples=60, deadline=None)
@given(systems(max_rank=4))
def test_report_invariants(system):
    report = verify_proportionality(system, witnesses=True)
    assert report.proportionality_holds
    assert report.consistent
    y, z = report.y_star, report.z_star
    assert is_quasi_coupling(y, system)
    assert y.l1_norm - 1 == report.cnt3 == 2 * y.negative_mass
    assert in_pyramid(z, system)
    assert 1 - z.total == report.cntf


def test_witness_vectors_against_oracle_matrix():
    system = preset("example2")
    _, y = cnt3(system)
    M = oracles.dense_matrix(3, "reduced")
    produced = [sum((int(M[u, v]) * w for v, w in y.weights.items()), F(0)) for u in range(M.shape[0])]
    assert produced == oracles.reduced_vector(system)


def test_single_negative_example1():
    system = preset("example1")
    y = cnt3_single_negative(system)
    (atom,) = y.negative_atoms
    assert y[atom] == F(-1, 16)
    assert y.l1_norm - 1 == F(1, 8)


def test_single_negative_rejects_noncontextual():
    with pytest.raises(ContextualityError):
        cnt3_single_negative(preset("uniform-independent-2"))


def test_lemma2_examples():
    for name, n in (("example1", 3), ("example2", 3), ("pr-box", 4)):
        system = preset(name)
        value3, valuef = cnt3(system)[0], cntf(system)[0]
        y = cnt3_single_negative(system, value3)
        z = lemma2_defective_coupling(system, y)
        assert l1_distance(y, z) == n * value3 == valuef + value3
        assert all(abs(y[v]) >= w for v, w in z.weights.items())
        assert 1 - z.total == valuef


def test_lemma_checks_on_contextual_seeds():
    seen = 0
    for n in (2, 3, 4):
        for seed in range(12):
            system = random_correlated_system(GeneratorSpec(n, seed))
            value3, valuef = cnt3(system)[0], cntf(system)[0]
            if value3 == 0:
                continue
            seen += 1
            assert all(lemma_checks(system, value3, valuef).values())
    assert seen >= 10


def test_lemma2_program_shape():
    system = preset("example1")
    y = cnt3_single_negative(system)
    program, support, w = lemma2_program(system, y)
    assert support == sorted(w) and len(program.objective) == len(support)
    assert sum(1 for c in program.constraints if c.relation == LE) == len(support)
    with pytest.raises(ValueError):
        lemma2_program(system, SignedMeasure(3, {0: F(1)}))


def test_in_pyramid_inputs():
    system = preset("example1")
    assert in_pyramid(SignedMeasure(3, {}), system)
    assert in_pyramid([F(0)] * 64, system)
    assert in_pyramid({0: F(1, 8)}, system)
    assert not in_pyramid({0: F(1, 2)}, system)  # atom 0 exceeds Pr(R_1 = R_2 = 0) = 1/8
    with pytest.raises(ValueError):
        in_pyramid([F(0)] * 63, system)
    with pytest.raises(ValueError):
        in_pyramid({64: F(0)}, system)
    with pytest.raises(ValueError):
        in_pyramid(SignedMeasure(2, {}), system)


def test_measure_types():
    with pytest.raises(ValueError):
        DefectiveMeasure(2, {0: F(-1, 2)})
    with pytest.raises(ValueError):
        DefectiveMeasure(2, {0: F(3, 4), 1: F(1, 2)})
    y = SignedMeasure(2, {1: F(3, 2), 2: F(-1, 2), 3: F(0)})
    assert y.weights == {1: F(3, 2), 2: F(-1, 2)}
    assert (y.total, y.l1_norm, y.negative_mass, y.negative_atoms) == (1, 2, F(1, 2), (2,))


def test_deterministic_point_mass_system():
    system = new_system(3, [(0, 0, 0, 1)] * 3)
    value, y = cnt3(system)
    assert value == 0 and y.weights == {63: 1}
