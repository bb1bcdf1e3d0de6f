import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmatch.complex import build_complex, face_closure
from cohmatch.errors import InvalidWindow
from cohmatch.fixtures import OCTAHEDRON_HEIGHT, octahedron, random_complex, random_field
from cohmatch.matching import bottleneck_distance
from cohmatch.persistence import (
    PersistenceDiagram,
    multiplicity_oracle,
    oracle_diagram,
    pbn_oracle,
    persistence_pairs,
    reduce,
)

INF = math.inf
EDGE = build_complex([(0, 1)], 2)
TRIANGLE = build_complex(face_closure([(0, 1), (1, 2), (0, 2)]), 3)
SQUARE = build_complex(face_closure([(0, 1), (1, 2), (2, 3), (0, 3)]), 4)


def test_edge_single_component():
    D = reduce(EDGE, [0.0, 1.0])
    assert D.essential(0).tolist() == [0.0]
    assert D.n_proper(0) == 0


def test_triangle_boundary():
    # the two 0-vertices share the edge 01 at value 0
    D = reduce(TRIANGLE, [0.0, 0.0, 1.0])
    assert D.essential(0).tolist() == [0.0]
    assert D.n_proper(0) == 0
    assert D.essential(1).tolist() == [1.0]


def test_octahedron_height():
    D = reduce(octahedron(), OCTAHEDRON_HEIGHT)
    assert D.essential(0).tolist() == [-1.0]
    assert D.essential(2).tolist() == [1.0]
    assert D.n_proper(0) == D.n_proper(1) == D.n_proper(2) == 0
    assert len(D.essential(1)) == 0


def test_pbn_examples():
    assert pbn_oracle(EDGE, [0.0, 1.0], 0.0, 0.5) == 1
    assert pbn_oracle(EDGE, [0.0, 1.0], -1.0, 0.5) == 0
    assert pbn_oracle(TRIANGLE, [0.0, 0.0, 1.0], 0.0, 0.5) == 1
    # two components born at 0 that merge at 1
    assert pbn_oracle(SQUARE, [0.0, 1.0, 0.0, 1.0], 0.0, 0.5) == 2


def test_multiplicity_examples():
    assert multiplicity_oracle(EDGE, [0.0, 1.0], 0.0, INF) == 1
    assert multiplicity_oracle(EDGE, [0.0, 1.0], 0.0, 1.0) == 0
    assert multiplicity_oracle(TRIANGLE, [0.0, 0.0, 1.0], 0.0, 1.0) == 0
    assert multiplicity_oracle(SQUARE, [0.0, 1.0, 0.0, 1.0], 0.0, 1.0) == 1
    assert reduce(SQUARE, [0.0, 1.0, 0.0, 1.0]).proper(0).tolist() == [[0.0, 1.0]]


def test_invalid_window():
    with pytest.raises(InvalidWindow):
        pbn_oracle(EDGE, [0.0, 1.0], 1.0, 1.0)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000), st.booleans(), st.sampled_from([2, 3]))
def test_reduce_matches_oracle(seed, integer, p):
    rng = np.random.default_rng(seed)
    K = random_complex(rng, max_simplices=40)
    phi = random_field(rng, K.n_vertices, integer=integer)
    assert reduce(K, phi, p) == oracle_diagram(K, phi, p)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000))
def test_cardinality_matches_pairs(seed):
    rng = np.random.default_rng(seed)
    K = random_complex(rng)
    phi = random_field(rng, K.n_vertices, integer=True)
    pairs, _, vals, _ = persistence_pairs(K, phi)
    D = reduce(K, phi)
    for d in range(K.dim + 1):
        n = sum(1 for deg, (bd, bi), (dd, di) in pairs if deg == d and vals[bd][bi] < vals[dd][di])
        assert D.n_proper(d) == n


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 100_000), st.floats(0.0, 0.5))
def test_one_parameter_stability(seed, eps):
    rng = np.random.default_rng(seed)
    K = random_complex(rng)
    phi = random_field(rng, K.n_vertices)
    psi = phi + rng.uniform(-eps, eps, size=len(phi))
    assert bottleneck_distance(reduce(K, phi), reduce(K, psi)) <= np.abs(phi - psi).max()


def test_scaled_drops_nothing_for_positive_factor():
    D = PersistenceDiagram.from_points({0: [(0.0, 1.0)]}, {0: [0.0]})
    assert D.scaled(2.0).proper(0).tolist() == [[0.0, 2.0]]
