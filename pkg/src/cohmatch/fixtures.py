"""Reproducible test bifiltrations.

The crossing fixture is a triangulated 2-sphere containing the path
q - r - p - s - m. All other vertices sit high above the path, so near
(a, b) = (1/2, shift) the degree-0 diagram has two proper points with births
{p, q} and deaths {r, s}. When r enters first the younger of p, q dies at r;
when s enters first p dies at s and q at r. The pairing therefore switches in
exactly one of the four sectors cut out by {p = q} and {r = s}, and a loop
around their intersection exchanges the two points.
"""

from __future__ import annotations

import numpy as np

from .complex import Bifiltration, SimplicialComplex, build_complex, face_closure

OCTAHEDRON = [
    (0, 2, 4), (0, 2, 5), (0, 3, 4), (0, 3, 5),
    (1, 2, 4), (1, 2, 5), (1, 3, 4), (1, 3, 5),
]
OCTAHEDRON_HEIGHT = [-1.0, 1.0, 0.0, 0.0, 0.0, 0.0]


def octahedron() -> SimplicialComplex:
    return build_complex(face_closure(OCTAHEDRON), 6)


def octahedron_height():
    """Octahedron with f1 = f2 = height: one minimum, one maximum, a flat equator."""
    h = np.asarray(OCTAHEDRON_HEIGHT)
    return octahedron(), Bifiltration(np.c_[h, h])


def octahedron_random(seed: int, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    return octahedron(), Bifiltration(rng.uniform(-scale, scale, size=(6, 2)))


def perturbation_pair(seed: int, eps: float = 0.05, scale: float = 1.0):
    """(K, f, g) with g = f + eta, eta uniform in [-eps, eps] per component."""
    rng = np.random.default_rng(seed)
    K = octahedron()
    f = Bifiltration(rng.uniform(-scale, scale, size=(6, 2)))
    g = f + rng.uniform(-eps, eps, size=(6, 2))
    return K, f, g


def perturbation_trio(seed: int, eps: float = 0.05, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    K = octahedron()
    f = Bifiltration(rng.uniform(-scale, scale, size=(6, 2)))
    g = f + rng.uniform(-eps, eps, size=(6, 2))
    h = f + rng.uniform(-eps, eps, size=(6, 2))
    return K, f, g, h


# path vertices, then the three high vertices N, S, W
_Q, _R, _P, _S, _M, _N, _SS, _W = range(8)
_PATH = [_Q, _R, _P, _S, _M]


def _crossing_complex() -> SimplicialComplex:
    tris = []
    for x, y in zip(_PATH, _PATH[1:]):
        tris.append((_N, x, y))
        tris.append((_SS, x, y))
    tris += [(_W, _N, _Q), (_W, _Q, _SS), (_W, _SS, _M), (_W, _M, _N)]
    return build_complex(face_closure(tris), 8)


def crossing_fixture(shift: float = 0.25, high: float = 2.0):
    """(K, f, (a*, b*)): two degree-0 cornerpoints collide at (1/2, shift).

    Near the singular pair, f*(p) = f*(q) along b = shift and f*(r) = f*(s)
    along a = (1 - (b - shift))/2.
    """
    c = shift
    vals = np.zeros((8, 2))
    vals[_P] = (0.0, -2.0)
    vals[_Q] = (-2.0, 0.0)
    vals[_R] = (1.0, 0.5)
    vals[_S] = (0.5, 1.0)
    vals[_M] = (-3.0, -3.0)
    vals[[_N, _SS, _W]] = high
    # shifting f1 up and f2 down by c moves the picture to b = c
    vals[:5, 0] += c
    vals[:5, 1] -= c
    return _crossing_complex(), Bifiltration(vals), (0.5, c)


def monodromy_pair(shift_f: float = 0.25, shift_g: float = -0.25):
    """Two crossing fixtures on one complex whose singular pairs sit apart."""
    K, f, sf = crossing_fixture(shift_f)
    _, g, sg = crossing_fixture(shift_g)
    return K, f, g, sf, sg


def coincident_fixture(eps: float = 0.05, high: float = 2.0):
    """Sphere whose slice at (1/2, 0) has the proper degree-0 point (0, eps) twice.

    On the crossing complex, q and p sit at (0, 0) and r, s at (eps, eps):
    r joins q to p and s joins them to the global minimum m, both at height eps.
    """
    vals = np.full((8, 2), float(high))
    vals[[_Q, _P]] = 0.0
    vals[[_R, _S]] = eps
    vals[_M] = -1.0
    return _crossing_complex(), Bifiltration(vals)


def crossing_random(seed: int, scale: float = 1.0):
    """Crossing complex with uniform random values; usually several proper points per degree."""
    rng = np.random.default_rng(seed)
    return _crossing_complex(), Bifiltration(rng.uniform(-scale, scale, size=(8, 2)))


def random_complex(rng: np.random.Generator, max_simplices: int = 60, n_vertices=None, max_dim: int = 3):
    """Face closure of a few random simplices, rejecting draws above ``max_simplices``."""
    while True:
        n = int(n_vertices or rng.integers(3, 9))
        tops = []
        for _ in range(int(rng.integers(1, 7))):
            k = int(rng.integers(1, min(max_dim, n - 1) + 2))
            tops.append(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
        K = build_complex(face_closure(tops), n)
        if len(K) <= max_simplices:
            return K


def random_field(rng: np.random.Generator, n: int, integer: bool = False):
    if integer:
        return rng.integers(0, 5, size=n).astype(float)
    return rng.uniform(-1, 1, size=n)
