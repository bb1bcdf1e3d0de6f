"""Admissible lines, slice functions and singular pairs.

A pair (a, b) with 0 < a < 1 names the line t -> t*(a, 1-a) + (b, -b) in the
plane of the two filtering values. Slicing the bifiltration along it gives the
scalar field ``max((f1 - b)/a, (f2 + b)/(1 - a))``; the normalized version is
multiplied by ``min(a, 1 - a)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complex import Bifiltration, SimplicialComplex
from .errors import EmptyRegion, RegionUnbounded
from .parallel import ordered_map
from .persistence import PersistenceDiagram, reduce

log = logging.getLogger(__name__)

A_MIN = 1e-3


@dataclass(frozen=True)
class ParameterPoint:
    a: float
    b: float

    def __post_init__(self):
        if not (0.0 < self.a < 1.0):
            raise ValueError(f"a must lie in the open interval (0, 1), got {self.a}")
        if not math.isfinite(self.b):
            raise ValueError("b must be finite")

    def __iter__(self):
        return iter((self.a, self.b))

    @property
    def scale(self) -> float:
        return min(self.a, 1.0 - self.a)

    @property
    def direction(self):
        return (self.a, 1.0 - self.a)

    @property
    def offset(self):
        return (self.b, -self.b)


def as_point(p) -> ParameterPoint:
    return p if isinstance(p, ParameterPoint) else ParameterPoint(float(p[0]), float(p[1]))


def line_point(pt, t):
    """Point of the admissible line at parameter ``t``."""
    a, b = pt
    return (t * a + b, t * (1 - a) - b)


def slice_value(f1, f2, a, b, normalized=True):
    """Scalar slice value for one vertex. Works for floats and ``fractions.Fraction``."""
    raw = max((f1 - b) / a, (f2 + b) / (1 - a))
    return min(a, 1 - a) * raw if normalized else raw


def slice_function(f: Bifiltration, pt, normalized: bool = True) -> np.ndarray:
    a, b = as_point(pt)
    v = f.values
    raw = np.maximum((v[:, 0] - b) / a, (v[:, 1] + b) / (1 - a))
    return min(a, 1 - a) * raw if normalized else raw


def slice_diagram(K: SimplicialComplex, f: Bifiltration, pt, normalized: bool = True, p: int = 2) -> PersistenceDiagram:
    return reduce(K, slice_function(f, pt, normalized), p)


def b_bound(f: Bifiltration, g: Optional[Bifiltration] = None) -> float:
    """Largest absolute filtering value over both functions.

    For |b| beyond it every slice is an increasing affine image of a single
    component, so parameter searches can stop there.
    """
    k = f.sup_norm()
    if g is not None:
        k = max(k, g.sup_norm())
    return k


def frozen_component_diagram(K, f: Bifiltration, pt, p: int = 2) -> PersistenceDiagram:
    """Normalized slice diagram for |b| > b_bound(f), computed from one component.

    For b beyond the bound the second branch wins at every vertex, so the slice
    is ``t(f2)`` for the increasing map ``t(u) = m*((u + b)/(1 - a))``; for very
    negative b it is the first component instead.
    """
    a, b = as_point(pt)
    m = min(a, 1 - a)
    bound = b_bound(f)
    if b > bound:
        comp, fn = f.f2, (lambda u: m * ((u + b) / (1 - a)))
    elif b < -bound:
        comp, fn = f.f1, (lambda u: m * ((u - b) / a))
    else:
        raise ValueError(f"|b| = {abs(b)} does not exceed the bound {bound}")
    return reduce(K, comp, p).mapped(fn)


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle of parameter pairs."""

    a_min: float
    a_max: float
    b_min: float
    b_max: float

    def __post_init__(self):
        vals = (self.a_min, self.a_max, self.b_min, self.b_max)
        if any(math.isinf(x) or math.isnan(x) for x in vals):
            raise RegionUnbounded(f"region bounds must be finite: {vals}")
        if not (0.0 < self.a_min < self.a_max < 1.0) or not (self.b_min < self.b_max):
            raise EmptyRegion(f"empty or invalid region: {vals}")

    def contains(self, p) -> bool:
        a, b = p
        return self.a_min <= a <= self.a_max and self.b_min <= b <= self.b_max

    @property
    def center(self):
        return (0.5 * (self.a_min + self.a_max), 0.5 * (self.b_min + self.b_max))

    def cell_size(self, resolution: int):
        return ((self.a_max - self.a_min) / resolution, (self.b_max - self.b_min) / resolution)


def default_region(f: Bifiltration, g: Optional[Bifiltration] = None, a_min: float = A_MIN, margin: float = 1.0) -> Region:
    k = b_bound(f, g) + margin
    return Region(a_min, 1.0 - a_min, -k, k)


def grid_axes(region: Region, resolution: int):
    da, db = region.cell_size(resolution)
    a = region.a_min + da * (np.arange(resolution) + 0.5)
    b = region.b_min + db * (np.arange(resolution) + 0.5)
    return a, b


def grid_points(region: Region, resolution: int) -> list:
    """Cell centres, row-major in (a, b)."""
    a, b = grid_axes(region, resolution)
    return [(float(x), float(y)) for x in a for y in b]


def vertex_lipschitz(f: Bifiltration, a0, a1, b0, b1):
    """Per-vertex constants (La, Lb) with |f*_p - f*_q| <= La|da| + Lb|db| on the box."""
    v = f.values
    La = np.zeros(len(v))
    if a0 <= 0.5:
        s = 1.0 - min(a1, 0.5)
        La = np.maximum(La, np.maximum(np.abs(v[:, 1] + b0), np.abs(v[:, 1] + b1)) / s ** 2)
    if a1 >= 0.5:
        s = max(a0, 0.5)
        La = np.maximum(La, np.maximum(np.abs(v[:, 0] - b0), np.abs(v[:, 0] - b1)) / s ** 2)
    return La, np.ones(len(v))


def variation_bound(f: Bifiltration, a0, a1, b0, b1, center=None) -> float:
    """Upper bound on max over vertices and box points q of |f*_center - f*_q|."""
    ca, cb = center if center is not None else (0.5 * (a0 + a1), 0.5 * (b0 + b1))
    La, Lb = vertex_lipschitz(f, a0, a1, b0, b1)
    da = max(abs(a1 - ca), abs(ca - a0))
    db = max(abs(b1 - cb), abs(cb - b0))
    if len(La) == 0:
        return 0.0
    # relative pad covers rounding in the slice evaluations
    return float(np.max(La * da + Lb * db)) * (1 + 1e-9) + 1e-15


def separation(K, f, pt, p: int = 2) -> float:
    return slice_diagram(K, f, pt, p=p).proper_separation


def _separation_task(args):
    K, f, pt, pf = args
    return separation(K, f, pt, pf)


def separation_grid(K, f, region: Region, resolution: int, p: int = 2, workers=None) -> np.ndarray:
    pts = grid_points(region, resolution)
    vals = ordered_map(_separation_task, [(K, f, pt, p) for pt in pts], workers)
    return np.asarray(vals, dtype=float).reshape(resolution, resolution)


@dataclass(frozen=True)
class SingularPair:
    center: tuple
    radius: float
    which: str
    separation: float


@dataclass
class SingularSet:
    pairs: list = field(default_factory=list)
    min_separation: float = math.inf
    warnings: list = field(default_factory=list)
    grid: Optional[np.ndarray] = field(default=None, repr=False)
    region: Optional[Region] = None

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def centers(self):
        return [s.center for s in self.pairs]

    def merged(self, other: "SingularSet") -> "SingularSet":
        return SingularSet(
            self.pairs + other.pairs,
            min(self.min_separation, other.min_separation),
            self.warnings + other.warnings,
        )

    def blocks(self, p, pad: float = 0.0) -> bool:
        a, b = p
        return any(math.hypot(a - s.center[0], b - s.center[1]) < s.radius + pad for s in self.pairs)


def _cell_slack(f, a0, a1, b0, b1) -> float:
    La, Lb = vertex_lipschitz(f, a0, a1, b0, b1)
    if len(La) == 0:
        return 0.0
    return float(np.max(La * (a1 - a0) / 2 + Lb * (b1 - b0) / 2)) * (1 + 1e-6) + 1e-12


def _zero_search(K, f, p, cells, localization, budget):
    """Branch and bound for zeros of the separation.

    ``cells`` holds (a0, a1, b0, b1, sep at the centre). Points move by at most
    the cell slack, so the separation inside a cell is at least its centre
    value minus twice the slack; cells where that stays positive are dropped.
    Returns leaves of size ``localization`` as (center, sep) and whether the
    budget ran out.
    """
    stack = list(reversed(cells))
    leaves, evals = [], 0
    while stack:
        a0, a1, b0, b1, sep = stack.pop()
        c = (0.5 * (a0 + a1), 0.5 * (b0 + b1))
        if sep is None:
            if evals >= budget:
                return leaves, True
            sep = separation(K, f, c, p)
            evals += 1
        if sep > 2.0 * _cell_slack(f, a0, a1, b0, b1):
            continue
        if max(a1 - a0, b1 - b0) <= 2 * localization:
            leaves.append((c, sep))
            continue
        am, bm = c
        # split the long side only when the cell is very elongated
        if (a1 - a0) > 4 * (b1 - b0):
            kids = [(a0, am, b0, b1), (am, a1, b0, b1)]
        elif (b1 - b0) > 4 * (a1 - a0):
            kids = [(a0, a1, b0, bm), (a0, a1, bm, b1)]
        else:
            kids = [(a0, am, b0, bm), (a0, am, bm, b1), (am, a1, b0, bm), (am, a1, bm, b1)]
        stack += [k + (None,) for k in reversed(kids)]
    return leaves, False


def detect_singular_pairs(
    K,
    f: Bifiltration,
    region: Optional[Region] = None,
    grid: int = 32,
    threshold: Optional[float] = None,
    localization: float = 1e-3,
    exclusion: Optional[float] = None,
    which: str = "f",
    p: int = 2,
    workers=None,
    a_guard: float = 0.02,
    budget: int = 20000,
) -> SingularSet:
    """Locate parameter pairs whose normalized diagram has a multiple proper point.

    The separation (smallest sup-norm distance between proper cornerpoints)
    is sampled on the grid. Starting from the grid cells whose sample is at most
    ``threshold`` (all cells by default), a branch-and-bound search keeps only
    cells where the separation can reach zero, down to cells of size
    ``localization``.

    The separation tends to zero as a approaches 0 or 1, where the normalized
    slices collapse, so the search stays ``a_guard`` away from both ends.
    """
    region = region or default_region(f)
    region = Region(max(region.a_min, a_guard), min(region.a_max, 1.0 - a_guard), region.b_min, region.b_max)
    S = separation_grid(K, f, region, grid, p, workers)
    da, db = region.cell_size(grid)
    a_ax, b_ax = grid_axes(region, grid)
    cells = [
        (region.a_min + i * da, region.a_min + (i + 1) * da, region.b_min + j * db, region.b_min + (j + 1) * db, float(S[i, j]))
        for i in range(grid)
        for j in range(grid)
        if threshold is None or S[i, j] <= threshold
    ]
    found, cut = _zero_search(K, f, p, cells, localization, budget)
    warnings = []
    if cut:
        warnings.append(f"singular-pair search stopped after {budget} evaluations; some cells are unresolved")
    radius = exclusion if exclusion is not None else 10 * localization
    pairs = []
    # leaves of one singular pair cluster within a few localization lengths; keep the lowest
    for c, sep in sorted(found, key=lambda t: (t[1], t[0])):
        dist = [math.hypot(c[0] - q.center[0], c[1] - q.center[1]) for q in pairs]
        if any(d < radius for d in dist):
            continue
        close = [q for q, d in zip(pairs, dist) if d < 2 * radius]
        if close:
            msg = f"singular candidates accumulate near {close[0].center}; normality may fail there"
            warnings.append(msg)
            log.warning(msg)
            continue
        pairs.append(SingularPair((float(c[0]), float(c[1])), radius, which, float(sep)))
    pairs.sort(key=lambda q: q.center)
    return SingularSet(pairs, float(S.min()) if S.size else math.inf, warnings, S, region)
