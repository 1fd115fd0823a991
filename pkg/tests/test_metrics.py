import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hclust.errors import DataError
from hclust.metrics import (
    as_dissimilarity,
    chebyshev,
    cosine_similarity,
    minkowski,
    pairwise,
    similarity_to_dissimilarity,
    squared_euclidean,
)

coord = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
orders = st.one_of(st.sampled_from([1.0, 2.0, 3.0]), st.floats(1.0, 8.0))


def vectors(dim):
    return arrays(np.float64, dim, elements=coord)


@pytest.mark.parametrize(
    "a, b, p, expected",
    [
        ((0, 0), (3, 4), 2, 5.0),
        ((1, 1), (1, 1), 3, 0.0),
        ((0.2, 0.9), (0.5, 0.1), 1, 1.1),
    ],
)
def test_minkowski_examples(a, b, p, expected):
    assert minkowski(a, b, p) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize(
    "a, b, expected",
    [((0, 0), (3, 4), 4.0), ((7.5,), (7.5,), 0.0), ((1, 2, 3), (4, 2, 1), 3.0)],
)
def test_chebyshev_examples(a, b, expected):
    assert chebyshev(a, b) == expected


@pytest.mark.parametrize("a, b, expected", [((1, 0), (1, 0), 1.0), ((1, 0), (0, 1), 0.0), ((2, 0), (1, 0), 1.0)])
def test_cosine_examples(a, b, expected):
    assert cosine_similarity(a, b) == pytest.approx(expected, abs=1e-15)


def test_minkowski_rejects_bad_input():
    with pytest.raises(ValueError):
        minkowski((0, 0), (1, 1), p=0.5)
    with pytest.raises(DataError):
        minkowski((0, 0), (1, 1, 1))


def test_minkowski_infinite_order_is_chebyshev():
    assert minkowski((0, 0), (3, 4), math.inf) == 4.0


def test_cosine_zero_vector():
    with pytest.raises(DataError):
        cosine_similarity((0, 0), (1, 2))


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(vectors(k), vectors(k))), orders)
def test_minkowski_symmetric_and_definite(ab, p):
    a, b = ab
    d = minkowski(a, b, p)
    assert d == minkowski(b, a, p)
    assert d >= 0
    assert (d == 0) == bool(np.array_equal(a, b))


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(vectors(k), vectors(k), vectors(k))), orders)
def test_minkowski_triangle_inequality(abc, p):
    a, b, c = abc
    lhs = minkowski(a, c, p)
    rhs = minkowski(a, b, p) + minkowski(b, c, p)
    assert lhs <= rhs + 1e-12 * max(1.0, rhs)


@settings(max_examples=200)
@given(st.integers(1, 6).flatmap(lambda k: st.tuples(vectors(k), vectors(k))), orders)
def test_chebyshev_bounded_by_minkowski(ab, p):
    a, b = ab
    m = minkowski(a, b, p)
    assert chebyshev(a, b) <= m + 1e-12 * max(1.0, m)


@settings(max_examples=200)
@given(
    st.integers(1, 6).flatmap(
        lambda k: st.tuples(
            arrays(np.float64, k, elements=st.floats(0.1, 10)),
            arrays(np.float64, k, elements=st.floats(-10, 10)),
        )
    ),
    st.floats(1e-3, 1e3),
    st.floats(1e-3, 1e3),
)
def test_cosine_scale_invariant(ab, s, t):
    a, b = ab
    if not np.any(b):
        b = b + 1.0
    assert cosine_similarity(s * a, t * b) == pytest.approx(cosine_similarity(a, b), abs=1e-12)


def test_similarity_constant_off_diagonal():
    S = np.full((4, 4), 0.3)
    np.fill_diagonal(S, 1.0)
    assert np.array_equal(similarity_to_dissimilarity(S), np.zeros((4, 4)))


def test_similarity_pair_with_diagonal_offset():
    S = [[1, 0.3], [0.3, 1]]
    D = similarity_to_dissimilarity(S, include_diagonal=True)
    assert D[0, 1] == pytest.approx(0.7)
    assert D[0, 0] == D[1, 1] == 0.0
    # with the default offset the only off-diagonal pair sits at distance 0
    assert similarity_to_dissimilarity(S)[0, 1] == 0.0


def test_similarity_identity_with_diagonal_offset():
    D = similarity_to_dissimilarity(np.eye(3), include_diagonal=True)
    assert np.array_equal(D, 1.0 - np.eye(3))


def test_similarity_ignores_self_similarity():
    S = np.array([[9.0, 0.0, 0.5], [0.0, 9.0, 0.2], [0.5, 0.2, 9.0]])
    D = similarity_to_dissimilarity(S)
    assert D[0, 1] == 0.5
    assert D[1, 2] == pytest.approx(0.3)
    assert D[0, 2] == 0.0


def test_similarity_rejects_asymmetric():
    with pytest.raises(DataError):
        similarity_to_dissimilarity([[1, 0.2], [0.3, 1]])


def test_pairwise_examples():
    assert np.array_equal(pairwise([[1.0, 2.0], [1.0, 2.0]]), np.zeros((2, 2)))
    assert pairwise([[0, 0], [3, 4]], "squared_euclidean")[0, 1] == 25.0


@pytest.mark.parametrize(
    "metric, p, ref",
    [
        ("euclidean", 2, lambda a, b: minkowski(a, b, 2)),
        ("manhattan", 2, lambda a, b: minkowski(a, b, 1)),
        ("minkowski", 3.5, lambda a, b: minkowski(a, b, 3.5)),
        ("chebyshev", 2, chebyshev),
        ("squared_euclidean", 2, squared_euclidean),
    ],
)
def test_pairwise_matches_per_pair_calls(metric, p, ref):
    X = np.random.default_rng(7).random((6, 3))
    D = pairwise(X, metric, p)
    assert np.array_equal(D, D.T)
    for i in range(6):
        for j in range(6):
            want = 0.0 if i == j else ref(X[i], X[j])
            assert D[i, j] == pytest.approx(want, rel=1e-12, abs=1e-15)


def test_pairwise_rejects_bad_data():
    with pytest.raises(DataError):
        pairwise([[0.0, 1.0]])
    with pytest.raises(DataError):
        pairwise([[0.0, np.nan], [1.0, 1.0]])
    with pytest.raises(ValueError):
        pairwise([[0.0], [1.0]], "hamming")


def test_as_dissimilarity_validation():
    with pytest.raises(DataError):
        as_dissimilarity([[0, 1], [2, 0]])
    with pytest.raises(DataError):
        as_dissimilarity([[0, -1], [-1, 0]])
    with pytest.raises(DataError):
        as_dissimilarity(np.zeros((2, 3)))
    D = as_dissimilarity([[5, 1], [1, 5]])
    assert D[0, 0] == 0 and D[0, 1] == 1
