from decimal import Decimal
from fractions import Fraction as F

import pytest
from hypothesis import given

from cyclic_cnt import cnt3, cntf, is_noncontextual, preset
from cyclic_cnt.system import (
    BunchDistribution,
    CyclicSystem,
    InvalidSystemError,
    as_fraction,
    content_marginals,
    is_consistently_connected,
    marginal,
    new_system,
    pred,
    relabel_content,
    succ,
)

from strategies import systems

EXAMPLE = (F(1, 8), F(3, 8), F(3, 8), F(1, 8))


def test_example1_construction():
    system = new_system(3, [EXAMPLE] * 3)
    assert system == preset("example1")
    assert all(b.as_tuple() == EXAMPLE for b in system.bunches)


def test_independent_rank2_is_valid():
    system = new_system(2, [(F(1, 4),) * 4] * 2)
    assert system.rank == 2


@pytest.mark.parametrize(
    "rank, bunches",
    [
        (3, [EXAMPLE, EXAMPLE, (F(1, 2), F(3, 8), F(1, 8), F(1, 8))]),  # sums to 9/8
        (3, [EXAMPLE] * 2),
        (2, [(F(-1, 8), F(5, 8), F(1, 4), F(1, 4)), EXAMPLE]),
        (2, [(F(9, 8), 0, 0, F(-1, 8)), EXAMPLE]),
        (1, [EXAMPLE]),
    ],
)
def test_invalid_systems_rejected(rank, bunches):
    with pytest.raises(InvalidSystemError):
        new_system(rank, bunches)


def test_as_fraction_is_exact():
    assert as_fraction("0.125") == F(1, 8)
    assert as_fraction(Decimal("0.1")) == F(1, 10)
    assert as_fraction(" 3/16 ") == F(3, 16)
    with pytest.raises(TypeError):
        as_fraction(0.125)
    with pytest.raises(TypeError):
        as_fraction(True)
    with pytest.raises(ValueError):
        as_fraction("one half")


def test_cyclic_neighbours():
    assert [succ(i, 4) for i in range(1, 5)] == [2, 3, 4, 1]
    assert [pred(i, 4) for i in range(1, 5)] == [4, 1, 2, 3]


def test_marginals_example1():
    system = preset("example1")
    for i in range(1, 4):
        assert marginal(system, i, "first") == marginal(system, i, "second") == F(1, 2)


def test_marginal_example2_third_context():
    # bunch (1/8, 7/16, 3/8, 1/16): Pr(first = 1) = 3/8 + 1/16
    system = preset("example2")
    assert marginal(system, 3, "first") == F(7, 16)
    assert marginal(system, 3, "second") == F(1, 2)
    assert content_marginals(system, 3) == (F(7, 16), F(1, 2))


def test_marginal_point_mass_and_bad_index():
    system = new_system(2, [(1, 0, 0, 0), (1, 0, 0, 0)])
    assert marginal(system, 1, "first") == 0
    with pytest.raises(IndexError):
        marginal(system, 3, "first")


def test_consistent_connectedness():
    assert is_consistently_connected(preset("example1"))
    assert not is_consistently_connected(preset("example2"))
    equal = new_system(2, [(F(1, 2), 0, 0, F(1, 2)), (F(1, 4), F(1, 4), F(1, 4), F(1, 4))])
    assert is_consistently_connected(equal)


def test_flip_first_coordinate():
    assert BunchDistribution(*EXAMPLE).flip_first().as_tuple() == (F(3, 8), F(1, 8), F(1, 8), F(3, 8))


def test_relabel_example1_keeps_measures():
    system = preset("example1")
    for j in range(1, 4):
        other = relabel_content(system, j)
        assert cnt3(other)[0] == F(1, 8)
        assert cntf(other)[0] == F(1, 4)


@given(systems())
def test_marginals_complement(system):
    for i in range(1, system.rank + 1):
        b = system.bunch(i)
        assert marginal(system, i, "first") + b.p00 + b.p01 == 1
        assert marginal(system, i, "second") + b.p00 + b.p10 == 1


@given(systems())
def test_relabel_is_an_involution(system):
    for j in range(1, system.rank + 1):
        flipped = relabel_content(system, j)
        assert relabel_content(flipped, j) == system
        a, b = content_marginals(system, j)
        assert content_marginals(flipped, j) == (1 - a, 1 - b)


@given(systems(max_rank=3))
def test_relabel_preserves_measures(system):
    value3, valuef = cnt3(system)[0], cntf(system)[0]
    status = is_noncontextual(system)
    flipped = relabel_content(system, 1)
    assert cnt3(flipped)[0] == value3
    assert cntf(flipped)[0] == valuef
    assert is_noncontextual(flipped) == status
