import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings

from cyclic_cnt import new_system, preset
from cyclic_cnt.generators import GeneratorSpec, sweep_system
from cyclic_cnt.vectorization import (
    AtomColumns,
    BunchEvent,
    ConnectionEvent,
    Marginal,
    atom_satisfies,
    build_full_vector,
    build_reduced_vector,
    full_incidence_matrix,
    full_labels,
    reduced_incidence_matrix,
    reduced_labels,
)

import oracles
from strategies import systems

H = F(1, 2)


def test_atom_satisfies_examples():
    assert all(atom_satisfies(0, Marginal(i, slot, 0), 3) for i in (1, 2, 3) for slot in ("first", "second"))
    assert atom_satisfies(63, BunchEvent(1, 1, 1), 3)
    # atom 3 at rank 2: S_1^1 = 1, S_2^1 = 1, S_2^2 = 0, S_1^2 = 0
    assert atom_satisfies(3, ConnectionEvent(2, 0, 1), 2)
    assert not atom_satisfies(3, ConnectionEvent(2, 1, 0), 2)
    assert atom_satisfies(3, ConnectionEvent(1, 1, 0), 2)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_labels_match_oracle_rows(n):
    for label, (conditions, _) in zip(full_labels(n), oracles.full_rows(n)):
        for atom in range(1 << (2 * n)):
            assert atom_satisfies(atom, label, n) == oracles.satisfies(atom, conditions)
    assert len(full_labels(n)) == 12 * n
    assert len(reduced_labels(n)) == 4 * n


def test_reduced_vector_example1():
    v = build_reduced_vector(preset("example1"))
    assert v.values == (H,) * 6 + (F(1, 8),) * 3 + (H,) * 3


def test_reduced_vector_example2():
    v = build_reduced_vector(preset("example2"))
    expected = (H, H, H, H, F(7, 16), H, F(1, 8), F(1, 8), F(1, 16), H, H, F(7, 16))
    assert v.values == expected
    assert v.l == expected[:6] and v.b == expected[6:9] and v.c == expected[9:]


def test_full_vector_uniform_rank2():
    v = build_full_vector(new_system(2, [(F(1, 4),) * 4] * 2)).values
    assert v[:8] == (H,) * 8
    assert v[8:16] == (F(1, 4),) * 8
    assert v[16:] == (H, 0, 0, H) * 2


def test_full_vector_example2_connection_block():
    v = build_full_vector(preset("example2")).as_dict()
    assert v[ConnectionEvent(3, 1, 1)] == F(7, 16)
    assert v[ConnectionEvent(3, 0, 1)] == F(1, 16)


def test_deterministic_system_reduced_vector():
    assert set(build_reduced_vector(new_system(3, [(0, 0, 0, 1)] * 3)).values) == {1}


@given(systems(max_rank=4))
def test_vectors_match_oracle(system):
    assert list(build_full_vector(system).values) == oracles.full_vector(system)
    assert list(build_reduced_vector(system).values) == oracles.reduced_vector(system)


@given(systems(max_rank=4))
def test_full_vector_block_sums(system):
    v = build_full_vector(system).values
    n = system.rank
    assert all(v[k] + v[k + 1] == 1 for k in range(0, 4 * n, 2))
    assert all(sum(v[k : k + 4]) == 1 for k in range(4 * n, 12 * n, 4))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_row_and_column_counts(n):
    m = full_incidence_matrix(n)
    size = 1 << (2 * n)
    for u, label in enumerate(m.labels):
        expected = size // 2 if isinstance(label, Marginal) else size // 4
        assert m.row_count(u) == expected
    dense = m.dense()
    assert np.array_equal(dense, oracles.dense_matrix(n, "full"))
    assert (dense[: 4 * n].sum(axis=0) == 2 * n).all()
    assert (dense[4 * n : 8 * n].sum(axis=0) == n).all()
    assert (dense[8 * n :].sum(axis=0) == n).all()


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_reduced_matrix_full_row_rank(n):
    m = reduced_incidence_matrix(n).dense()
    if n <= 4:
        assert oracles.exact_rank(m) == 4 * n
    else:
        # exact elimination on the columns of the single-, pair- and empty
        # atoms, which already span all 4n rows
        L = 2 * n
        cols = [1 << k for k in range(L)] + [(1 << k) | (1 << ((k + 1) % L)) for k in range(L)]
        assert oracles.exact_rank(m[:, cols]) == 4 * n


def test_uniform_measure_reproduces_independent_system():
    n = 3
    size = 1 << (2 * n)
    uniform = [F(1, size)] * size
    system = new_system(n, [(F(1, 4),) * 4] * n)
    # independent fair coins couple with p00 = p11 = 1/2 on connections, which
    # the uniform atom measure does not reproduce; compare the l and b blocks
    produced = full_incidence_matrix(n).matvec(uniform)
    expected = build_full_vector(system).values
    assert produced[: 8 * n] == expected[: 8 * n]
    assert produced[8 * n :] == (F(1, 4),) * (4 * n)


@settings(max_examples=30)
@given(systems(max_rank=3))
def test_l_rows_are_margins_of_b_rows(system):
    n = system.rank
    rng = random.Random(system.rank)
    h = {v: F(rng.randint(0, 5)) for v in range(1 << (2 * n))}
    total = sum(h.values())
    h = {v: w / total for v, w in h.items()}
    out = full_incidence_matrix(n).matvec(h)
    for i in range(n):
        b = out[4 * n + 4 * i : 4 * n + 4 * i + 4]
        assert out[4 * i + 1] == b[2] + b[3]  # first slot = 1
        assert out[4 * i + 3] == b[1] + b[3]  # second slot = 1


@pytest.mark.parametrize("n", [2, 3])
def test_ring_pricing_matches_dense_and_brute_force(n):
    rng = random.Random(n)
    labels = full_labels(n)
    rows = dict(enumerate(labels))
    rows[len(labels)] = None
    for _ in range(150):
        excluded = rng.sample(labels, rng.randint(0, 5))
        sign = rng.choice((1, -1))
        dense = AtomColumns(n, rows, sign=sign, cost=1, dense=True, excluded=excluded)
        ring = AtomColumns(n, rows, sign=sign, cost=1, dense=False, excluded=excluded)
        w = [rng.randint(-6, 6) for _ in rows]
        scale, threshold = rng.randint(0, 3), rng.randint(-20, 10)
        allowed = [j for j in range(1 << (2 * n)) if not any(atom_satisfies(j, e, n) for e in excluded)]
        reduced = {j: scale - sum(w[i] * a for i, a in dense.column(j).items()) for j in allowed}
        assert dense.minimum(w, scale) == ring.minimum(w, scale) == (min(reduced.values()) if reduced else None)
        first = min((j for j in allowed if reduced[j] < threshold), default=None)
        assert dense.first_below(w, scale, threshold) == ring.first_below(w, scale, threshold) == first


def test_sweep_systems_vectors_match_oracle():
    for seed in range(30):
        system = sweep_system(GeneratorSpec(5, seed))
        assert list(build_reduced_vector(system).values) == oracles.reduced_vector(system)
