import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cohmatch.coherent import transport_laws
from cohmatch.errors import StartPointNotInDiagram, StepUnderflow
from cohmatch.fixtures import crossing_fixture, octahedron_random, perturbation_pair, perturbation_trio
from cohmatch.foliation import slice_diagram, slice_function
from cohmatch.matching import DIAGONAL, bottleneck, enumerate_matchings, cost
from cohmatch.persistence import Cornerpoint, reduce
from cohmatch.transport import (
    ParameterPath,
    TransportConfig,
    homotopy_matching,
    loop_permutation,
    route,
    transport_across_homotopy,
    transport_matching,
    transport_point,
    transport_state,
)

CROSS = crossing_fixture()
LOOPY = ParameterPath(((0.3, -0.5), (0.7, -0.6), (0.8, 0.8), (0.2, 1.2)))


def first_point(D, degree=0):
    u, v = D.proper(degree)[0]
    return Cornerpoint(degree, float(u), float(v))


def ends(K, f, c, cfg=TransportConfig()):
    s = transport_state(K, f, c, cfg)
    return {d: [s.position(d, l) for l in range(len(s.where[d]))] for d in s.where}


def test_path_basics():
    c = ParameterPath(((0.2, 0.0), (0.4, 0.0), (0.4, 1.0)))
    assert c.length == pytest.approx(1.2)
    assert c.point(0.0) == (0.2, 0.0) and c.point(1.0) == (0.4, 1.0)
    assert c.reversed().waypoints == tuple(reversed(c.waypoints))
    assert (c * c.reversed()).end == c.start
    with pytest.raises(ValueError):
        c * c


def test_route_avoids_disk():
    from cohmatch.foliation import SingularPair

    s = SingularPair((0.5, 0.0), 0.05, "f", 0.0)
    c = route((0.3, 0.0), (0.7, 0.0), [s])
    assert c.start == (0.3, 0.0) and c.end == (0.7, 0.0)
    assert c.clearance([s]) > 0


def test_constant_path_track():
    K, f, _ = CROSS
    X = first_point(slice_diagram(K, f, (0.3, -0.5)))
    tr = transport_point(K, f, X, ParameterPath.constant((0.3, -0.5)))
    assert all((u, v) == (X.birth, X.death) for *_, u, v, _ in tr.samples)
    assert tr.endpoint == X


def test_round_trip_track():
    K, f, _ = CROSS
    D = slice_diagram(K, f, LOOPY.start)
    for row in range(D.n_proper(0)):
        X = Cornerpoint(0, *map(float, D.proper(0)[row]))
        assert transport_point(K, f, X, LOOPY * LOOPY.reversed()).endpoint == X


def test_start_point_must_be_in_diagram():
    K, f, _ = CROSS
    with pytest.raises(StartPointNotInDiagram):
        transport_point(K, f, Cornerpoint(0, 100.0, 200.0), LOOPY)


def fine_step_track(K, f, X, A, B, n=10_000):
    """Reference tracker: nearest proper point (or the diagonal) at each of n uniform steps."""
    u, v = X.birth, X.death
    for k in range(1, n + 1):
        t = k / n
        pt = (A[0] + t * (B[0] - A[0]), A[1] + t * (B[1] - A[1]))
        P = slice_diagram(K, f, pt).proper(0)
        if not len(P):
            return DIAGONAL
        d = np.max(np.abs(P - (u, v)), axis=1)
        i = int(np.argmin(d))
        if (v - u) / 2 < d[i]:
            return DIAGONAL
        u, v = P[i]
    return (float(u), float(v))


def test_matches_fine_step_oracle():
    K, f, _ = CROSS
    A, B = (0.3, 0.0), (0.7, 0.6)
    D = slice_diagram(K, f, A)
    for row in range(D.n_proper(0)):
        X = Cornerpoint(0, *map(float, D.proper(0)[row]))
        got = transport_point(K, f, X, ParameterPath.straight(A, B)).endpoint
        want = fine_step_track(K, f, X, A, B)
        assert (got.birth, got.death) == want


def test_step_refinement_determinism():
    cases = [CROSS[:2]] + [octahedron_random(s) for s in range(3)]
    paths = [LOOPY, ParameterPath.straight((0.05, -2), (0.95, 2)), ParameterPath.circle((0.5, 0.25), 0.2, 16)]
    for K, f in cases:
        for c in paths:
            e1 = ends(K, f, c, TransportConfig(max_step=0.25))
            e2 = ends(K, f, c, TransportConfig(max_step=0.125))
            for d in e1:
                for x, y in zip(e1[d], e2[d]):
                    assert x[2] == y[2]
                    if not x[2]:
                        assert abs(x[0] - y[0]) <= 1e-9 and abs(x[1] - y[1]) <= 1e-9


def test_stalls_at_singular_pair():
    K, f, star = CROSS
    with pytest.raises(StepUnderflow) as err:
        transport_state(K, f, ParameterPath.straight((0.45, 0.2), (0.55, 0.3)))
    assert math.hypot(err.value.where[0] - star[0], err.value.where[1] - star[1]) < 1e-6


def test_matching_constant_and_identity():
    K, f, _ = CROSS
    bp = LOOPY.start
    D = slice_diagram(K, f, bp)
    for m in enumerate_matchings(D, D, 0):
        assert transport_matching(K, f, f, m, ParameterPath.constant(bp)).result == m
    ident = bottleneck(D, D, 0)[1]
    tm = transport_matching(K, f, f, ident, LOOPY)
    assert tm.result.assignment == tuple(range(len(tm.result.left)))
    assert tm.cost == 0.0


@pytest.mark.parametrize("seed", range(4))
def test_homotopy_matching_transport_bounded(seed):
    K, f, g = perturbation_pair(seed)
    norm = f.sup_distance(g)
    bp = (0.5, 0.0)
    for d in range(3):
        sigma = homotopy_matching(K, slice_function(f, bp), slice_function(g, bp), d)
        assert cost(sigma) <= norm
        for c in (LOOPY, ParameterPath.straight(bp, (0.1, 1.5)), ParameterPath.straight(bp, (0.9, -1.5))):
            c = ParameterPath.straight(bp, c.start) * c if c.start != bp else c
            assert transport_matching(K, f, g, sigma, c).cost <= norm


def test_homotopy_trivial_cases():
    K, f, _ = CROSS
    phi = slice_function(f, (0.3, -0.5))
    X = first_point(reduce(K, phi))
    assert transport_across_homotopy(K, phi, phi, X) == X
    Y = transport_across_homotopy(K, phi, phi + 0.25, X)
    assert (Y.birth, Y.death) == (X.birth + 0.25, X.death + 0.25)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.0, 0.1))
def test_homotopy_small_perturbation(seed, eps):
    K, f, _ = CROSS
    rng = np.random.default_rng(seed)
    phi = slice_function(f, (0.3, -0.5))
    psi = phi + rng.uniform(-eps, eps, len(phi))
    for row in reduce(K, phi).proper(0):
        X = Cornerpoint(0, float(row[0]), float(row[1]))
        Y = transport_across_homotopy(K, phi, psi, X)
        bound = np.abs(phi - psi).max()
        if Y is DIAGONAL:
            assert (X.death - X.birth) / 2 <= bound
        else:
            assert max(abs(Y.birth - X.birth), abs(Y.death - X.death)) <= bound


def test_laws_on_crossing_fixture():
    K, f, _ = CROSS
    rng = np.random.default_rng(3)
    g = f + rng.uniform(-0.05, 0.05, f.values.shape)
    h = f + rng.uniform(-0.05, 0.05, f.values.shape)
    c1 = ParameterPath(((0.3, -0.5), (0.7, -0.6), (0.8, 0.8)))
    c2 = ParameterPath(((0.8, 0.8), (0.2, 1.2), (0.35, 2.0)))
    r = transport_laws(K, f, g, h, c1, c2)
    assert r.passed, r.detail


@pytest.mark.parametrize("seed", range(3))
def test_laws_on_trio(seed):
    K, f, g, h = perturbation_trio(seed)
    c1 = ParameterPath(((0.5, 0.0), (0.7, -0.6), (0.8, 0.8)))
    c2 = ParameterPath(((0.8, 0.8), (0.2, 1.2), (0.35, 2.0)))
    assert transport_laws(K, f, g, h, c1, c2).passed


def test_homotopy_invariance_away_from_singular_pairs():
    # both paths stay below the singular pair at b = 1/4 and are homotopic there
    K, f, _ = CROSS
    g = f + 0.01
    A, B = (0.3, -0.5), (0.7, -0.2)
    c1 = ParameterPath((A, (0.3, -0.2), B))
    c2 = ParameterPath((A, (0.5, -0.8), B))
    D = slice_diagram(K, f, A)
    for m in enumerate_matchings(D, slice_diagram(K, g, A), 0):
        assert transport_matching(K, f, g, m, c1).result == transport_matching(K, f, g, m, c2).result


def test_monodromy_transposition():
    K, f, star = CROSS
    r = loop_permutation(K, f, star, 0.1)
    assert r.stable
    assert r.cycles(0) == "(1 2)"
    assert loop_permutation(K, f, star, 0.1, turns=2).is_identity()
    assert loop_permutation(K, f, (0.5, -0.3), 0.1).is_identity()
