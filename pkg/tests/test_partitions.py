import math

import pytest
from hypothesis import given, settings, strategies as st

from conftest import shape_key
from entconc.errors import PreconditionError
from entconc.partitions import (
    YoungIndex,
    count_young_indices,
    dim_u,
    dim_v,
    dim_v_determinant,
    dim_v_product,
    enumerate_young_indices,
    staircase,
)


def test_enumeration_small_cases():
    assert [lam.parts for lam in enumerate_young_indices(2, 2)] == [(2, 0), (1, 1)]
    assert [lam.parts for lam in enumerate_young_indices(3, 2)] == [(3, 0), (2, 1)]
    assert len(enumerate_young_indices(6, 3)) == 7
    assert [lam.parts for lam in enumerate_young_indices(0, 2)] == [(0, 0)]


def test_enumeration_is_lexicographically_descending_and_unique():
    for n in range(9):
        for d in range(1, 5):
            parts = [lam.parts for lam in enumerate_young_indices(n, d)]
            assert parts == sorted(parts, reverse=True)
            assert len(set(parts)) == len(parts)


def test_counts_match_brute_force(frozen):
    for key, expected in frozen["partition_counts"].items():
        n, d = map(int, key.split(","))
        assert count_young_indices(n, d) == expected
        assert len(enumerate_young_indices(n, d)) == expected


def test_dimension_examples():
    assert dim_v_determinant(YoungIndex((3, 0))) == 1
    assert dim_v_determinant(YoungIndex((1, 1))) == 1
    assert dim_v_determinant(YoungIndex((2, 1))) == 2
    assert dim_v_product(YoungIndex((2, 1))) == 2
    assert dim_v_product(YoungIndex((5, 0))) == 1
    assert dim_v_product(YoungIndex((2, 2, 0))) == 2
    assert dim_u(YoungIndex((7, 0))) == 8
    assert dim_u(YoungIndex((2, 1))) == 2
    assert dim_u(YoungIndex((1, 1))) == 1


def test_dim_v_matches_tableau_enumeration(frozen):
    for key, count in frozen["syt"].items():
        lam = YoungIndex(shape_key(key))
        assert dim_v(lam) == count
        assert dim_v_product(lam) == count
        if lam.d <= 8:
            assert dim_v_determinant(lam) == count


def test_dim_u_matches_semistandard_count(frozen):
    for key, count in frozen["weyl"].items():
        shape, d = key.split(";")
        assert dim_u(YoungIndex.of(shape_key(shape), int(d))) == count


def test_schur_weyl_dimension_sum():
    for d in range(1, 5):
        for n in range(13):
            total = sum(dim_u(lam) * dim_v(lam) for lam in enumerate_young_indices(n, d))
            assert total == d ** n


def test_two_formulas_agree_up_to_twenty():
    for n in range(1, 21):
        for d in range(1, 6):
            for lam in enumerate_young_indices(n, d):
                assert dim_v_determinant(lam) == dim_v_product(lam)


def test_determinant_formula_refuses_large_d():
    with pytest.raises(PreconditionError):
        dim_v_determinant(YoungIndex((1,) * 9))
    assert dim_v_product(YoungIndex((1,) * 9)) == 1


def test_invalid_indices_rejected():
    with pytest.raises(PreconditionError):
        YoungIndex((1, 2))
    with pytest.raises(PreconditionError):
        YoungIndex((2, -1))
    with pytest.raises(PreconditionError):
        YoungIndex.of((1, 1, 1), 2)


def test_staircase_and_padding():
    assert staircase(4) == (3, 2, 1, 0)
    assert YoungIndex.of((3,), 3).parts == (3, 0, 0)
    assert YoungIndex((2, 1)).shifted() == (3, 1)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 12), min_size=1, max_size=6))
def test_dimensions_positive_and_consistent(raw):
    lam = YoungIndex(tuple(sorted(raw, reverse=True)))
    v = dim_v(lam)
    assert v >= 1 and dim_u(lam) >= 1
    assert v == dim_v_product(lam)
    assert v <= math.factorial(lam.n)
