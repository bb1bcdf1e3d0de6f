import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmatch.errors import DegreeMismatch, LimitExceeded
from cohmatch.matching import (
    DIAG,
    DIAGONAL,
    assignment_cost,
    bottleneck,
    bottleneck_distance,
    compose_matchings,
    cost,
    count_matchings,
    enumerate_assignments,
    enumerate_matchings,
    point_distance,
    proper_bottleneck,
)
from cohmatch.persistence import Cornerpoint, PersistenceDiagram

INF = math.inf


def diagram(points, essential=()):
    return PersistenceDiagram.from_points({0: list(points)}, {0: list(essential)})


def random_points(rng, n, integer=False):
    if integer:
        u = rng.integers(0, 4, n).astype(float)
        return np.c_[u, u + rng.integers(1, 4, n)]
    u = rng.uniform(0, 1, n)
    return np.c_[u, u + rng.uniform(0, 1, n)]


def test_point_distance_examples():
    assert point_distance(Cornerpoint(0, 0.0, 2.0), DIAGONAL) == 1.0
    assert point_distance(Cornerpoint(0, 0.0, 4.0), Cornerpoint(0, 1.0, 5.0)) == 1.0
    assert point_distance(Cornerpoint(0, 3.0), Cornerpoint(0, 3.0)) == 0.0
    assert point_distance(Cornerpoint(0, 3.0), DIAGONAL) == INF
    with pytest.raises(DegreeMismatch):
        point_distance(Cornerpoint(0, 0.0, 1.0), Cornerpoint(1, 0.0, 1.0))


def test_cost_examples():
    D = diagram([(0.0, 2.0)])
    E = diagram([])
    (m,) = enumerate_matchings(D, E, 0)
    assert cost(m) == 1.0
    assert bottleneck(D, E, 0)[0] == 1.0
    d, sigma = bottleneck(D, D, 0)
    assert d == 0.0 and sigma.assignment == (0,)


def test_cost_is_max_of_pairs():
    rng = np.random.default_rng(1)
    D = diagram(random_points(rng, 5))
    E = diagram(random_points(rng, 5))
    for m in enumerate_matchings(D, E, 0)[:50]:
        assert cost(m) == max(m.pair_costs())


def test_enumeration_counts():
    one = diagram([(0.0, 1.0)])
    two = diagram([(0.0, 1.0), (0.5, 2.0)])
    assert len(enumerate_matchings(one, one, 0)) == 2
    assert len(enumerate_matchings(two, one, 0)) == 3 == count_matchings(2, 1)
    (empty,) = enumerate_matchings(diagram([]), diagram([]), 0)
    assert cost(empty) == 0.0
    explicit = {(0, DIAG), (DIAG, 0), (DIAG, DIAG)}
    assert set(enumerate_assignments(2, 1)) == explicit


def test_enumeration_limit():
    D = diagram(random_points(np.random.default_rng(0), 4))
    with pytest.raises(LimitExceeded):
        enumerate_matchings(D, D, 0, limit=3)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 6), st.integers(0, 6), st.booleans())
def test_bottleneck_equals_brute_force(seed, n, m, integer):
    rng = np.random.default_rng(seed)
    P, Q = random_points(rng, n, integer), random_points(rng, m, integer)
    brute = min(assignment_cost(P, Q, s) for s in enumerate_assignments(n, m))
    assert proper_bottleneck(P, Q) == brute
    d, sigma = bottleneck(diagram(P), diagram(Q), 0)
    assert d == brute == cost(sigma)


def test_essential_count_mismatch_is_infinite():
    assert bottleneck(diagram([], [0.0]), diagram([]), 0) == (INF, None)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_metric_laws(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (diagram(random_points(rng, int(rng.integers(0, 5))), [0.0]) for _ in range(3))
    assert bottleneck_distance(A, A) == 0.0
    assert bottleneck_distance(A, B) == bottleneck_distance(B, A)
    assert bottleneck_distance(A, C) <= bottleneck_distance(A, B) + bottleneck_distance(B, C)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_composition_cost_bounded(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (diagram(random_points(rng, int(rng.integers(0, 4)))) for _ in range(3))
    for s in enumerate_matchings(A, B, 0):
        for t in enumerate_matchings(B, C, 0):
            st_ = compose_matchings(s, t)
            assert cost(st_) <= cost(s) + cost(t) + 1e-12
