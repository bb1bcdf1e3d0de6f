"""Finite simplicial complexes carrying a two-component filtering function."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from ._linalg import rank_mod_p
from .errors import ComplexError, DuplicateSimplex, EmptyComplex, MissingFace

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimplicialComplex:
    """Face-closed abstract simplicial complex.

    ``simplices[d]`` lists the d-simplices as sorted vertex tuples. Vertex ``i``
    is always ``simplices[0][i] == (i,)``.
    """

    simplices: tuple
    completed_faces: int = 0
    index: dict = field(init=False, repr=False, compare=False)
    facets: tuple = field(init=False, repr=False, compare=False)
    vertex_arrays: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        index = {}
        for d, layer in enumerate(self.simplices):
            for i, s in enumerate(layer):
                index[s] = (d, i)
        facets = [np.zeros((len(self.simplices[0]), 0), dtype=np.int64)]
        for d in range(1, len(self.simplices)):
            rows = []
            for s in self.simplices[d]:
                rows.append([index[s[:k] + s[k + 1:]][1] for k in range(d + 1)])
            facets.append(np.asarray(rows, dtype=np.int64).reshape(len(rows), d + 1))
        arrays = tuple(
            np.asarray(layer, dtype=np.int64).reshape(len(layer), d + 1)
            for d, layer in enumerate(self.simplices)
        )
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "facets", tuple(facets))
        object.__setattr__(self, "vertex_arrays", arrays)

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def n_vertices(self) -> int:
        return len(self.simplices[0])

    def counts(self) -> list:
        return [len(layer) for layer in self.simplices]

    def __len__(self):
        return sum(self.counts())

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * n for d, n in enumerate(self.counts()))

    def all_simplices(self):
        for layer in self.simplices:
            yield from layer

    def boundary(self, simplex) -> list:
        """Codimension-1 faces of ``simplex`` in removal order."""
        s = tuple(simplex)
        if len(s) == 1:
            return []
        return [s[:k] + s[k + 1:] for k in range(len(s))]

    def boundary_matrix(self, d: int, p: int = 2) -> np.ndarray:
        """Signed boundary matrix from d-chains to (d-1)-chains, reduced mod ``p``."""
        if d <= 0 or d > self.dim:
            rows = len(self.simplices[d - 1]) if 0 < d <= self.dim + 1 else 0
            cols = len(self.simplices[d]) if 0 <= d <= self.dim else 0
            return np.zeros((rows, cols), dtype=np.int64)
        D = np.zeros((len(self.simplices[d - 1]), len(self.simplices[d])), dtype=np.int64)
        for j, row in enumerate(self.facets[d]):
            for k, i in enumerate(row):
                D[i, j] = (-1) ** k
        return D % p

    def betti_numbers(self, p: int = 2) -> list:
        ranks = [0] + [rank_mod_p(self.boundary_matrix(d, p), p) for d in range(1, self.dim + 1)] + [0]
        return [len(self.simplices[d]) - ranks[d] - ranks[d + 1] for d in range(self.dim + 1)]


@dataclass(frozen=True)
class Bifiltration:
    """Per-vertex pair (f1, f2)."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(-1, 2)
        if not np.all(np.isfinite(v)):
            raise ValueError("bifiltration values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def f1(self):
        return self.values[:, 0]

    @property
    def f2(self):
        return self.values[:, 1]

    def __len__(self):
        return len(self.values)

    def sup_distance(self, other: "Bifiltration") -> float:
        return float(np.max(np.abs(self.values - other.values))) if len(self) else 0.0

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values))) if len(self) else 0.0

    def __add__(self, eta):
        eta = eta.values if isinstance(eta, Bifiltration) else np.asarray(eta, dtype=float)
        return Bifiltration(self.values + eta)

    def __eq__(self, other):
        return isinstance(other, Bifiltration) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def face_closure(simplices) -> list:
    """Every face of every given simplex, sorted by dimension then vertices."""
    out = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(itertools.combinations(s, k))
    return sorted(out, key=lambda t: (len(t), t))


def build_complex(
    simplex_list: Iterable[Sequence[int]],
    n_vertices: Optional[int] = None,
    strict: bool = True,
) -> SimplicialComplex:
    """Build a complex from vertex tuples.

    Vertices ``0..n_vertices-1`` are always present. In strict mode every other
    face of every listed simplex must itself be listed; lenient mode adds the
    missing faces and records how many it added.
    """
    listed = set()
    top = -1
    for raw in simplex_list:
        s = tuple(int(v) for v in raw)
        if len(s) == 0:
            continue
        if len(set(s)) != len(s):
            raise ComplexError(f"simplex {s} repeats a vertex")
        if any(v < 0 for v in s):
            raise ComplexError(f"simplex {s} has a negative vertex index")
        s = tuple(sorted(s))
        if s in listed:
            raise DuplicateSimplex(f"simplex {s} listed twice")
        listed.add(s)
        top = max(top, max(s))
    if n_vertices is None:
        n_vertices = top + 1
    if n_vertices <= 0:
        raise EmptyComplex("complex has no vertices")
    if top >= n_vertices:
        raise ComplexError(f"simplex references vertex {top} but only {n_vertices} declared")

    present = set(listed) | {(v,) for v in range(n_vertices)}
    added = 0
    for s in sorted(listed, key=len, reverse=True):
        for k in range(1, len(s)):
            for face in itertools.combinations(s, k):
                if face not in present:
                    if strict:
                        raise MissingFace(f"face {face} of simplex {s} is missing")
                    present.add(face)
                    added += 1
    if added:
        log.warning("lenient mode: added %d missing faces", added)
    dim = max(len(s) for s in present) - 1
    layers = tuple(
        tuple(sorted(s for s in present if len(s) == d + 1)) for d in range(dim + 1)
    )
    return SimplicialComplex(layers, completed_faces=added)


@dataclass
class SphereReport:
    m: int
    betti: list
    ok: bool
    warnings: list


def validate_sphere_assumption(K: SimplicialComplex, p: int = 2) -> SphereReport:
    """Check the Betti-number necessary condition for ``K`` being an m-sphere, m >= 2.

    Never raises; failures come back as warnings on the report.
    """
    betti = K.betti_numbers(p)
    m = K.dim
    warnings = []
    if m < 2:
        warnings.append(f"m < 2: top dimension is {m}")
    expected = [1 if d in (0, m) else 0 for d in range(m + 1)]
    if m == 0:
        expected = [2]  # S^0
    for d, (got, want) in enumerate(zip(betti, expected)):
        if got != want:
            warnings.append(f"beta{d} = {got}, expected {want}")
    for w in warnings:
        log.warning("sphere assumption: %s", w)
    return SphereReport(m=m, betti=betti, ok=not warnings, warnings=warnings)


@dataclass
class GapEstimate:
    k: float
    band: float
    witness: Optional[tuple]
    warnings: list


def near_diagonal_gap_estimate(K, f, region, resolution: int = 32, band=None, p: int = 2) -> GapEstimate:
    """Empirical estimate of the near-diagonal gap of the normalized slice diagrams.

    Diagrams are sampled at the cell centres of a ``resolution`` x ``resolution``
    grid. With ``band=None`` the band is the largest k for which every sampled
    pair of proper cornerpoints closer than k to the diagonal is at least k
    apart; the estimate is then the smallest distance between two sampled
    cornerpoints that both lie within the band. Distances are Euclidean.
    Returns ``inf`` when no pair qualifies.
    """
    from .foliation import grid_points, slice_diagram

    pts = grid_points(region, resolution)
    pairs = []  # (dist12, dDelta1, dDelta2, (a, b))
    for a, b in pts:
        D = slice_diagram(K, f, (a, b), normalized=True, p=p)
        for deg in D.degrees:
            P = D.proper(deg)
            if len(P) < 2:
                continue
            dd = (P[:, 1] - P[:, 0]) / math.sqrt(2.0)
            diff = P[:, None, :] - P[None, :, :]
            dist = np.sqrt((diff ** 2).sum(axis=2))
            iu = np.triu_indices(len(P), 1)
            for i, j in zip(*iu):
                pairs.append((float(dist[i, j]), float(dd[i]), float(dd[j]), (a, b)))
    warnings = []
    if band is None:
        band = min((max(t[:3]) for t in pairs), default=math.inf)
    inside = [t for t in pairs if max(t[1], t[2]) <= band]
    if not inside:
        return GapEstimate(math.inf, band, None, warnings)
    best = min(inside, key=lambda t: t[0])
    if best[0] == 0.0:
        warnings.append(f"coincident near-diagonal cornerpoints at (a, b) = {best[3]}; the near-diagonal gap assumption may fail")
        log.warning(warnings[-1])
    return GapEstimate(best[0], band, best[3], warnings)
