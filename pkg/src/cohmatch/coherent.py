"""Matching distance, coherent matching distance and the checks relating them.

D_match is bounded by branch and bound: the bottleneck distance at a cell
centre plus the largest possible change of both slice functions over the cell
bounds the value inside it.

The coherent estimate searches a finite part of the path space. Every grid
node is reached from the basepoint along a breadth-first tree of short
straight edges that avoid the exclusion disks; that fixes one homotopy class
per node. Further classes come from words in loops around the detected
singular pairs, applied at the basepoint before the tree run. Since transport
along a word followed by a run is the run applied to the word's result, the
sup over nodes only needs to be evaluated once per distinct basepoint matching.
"""

from __future__ import annotations

import heapq
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .complex import Bifiltration, SimplicialComplex, validate_sphere_assumption
from .errors import BasepointSingular, EssentialCountMismatch, LimitExceeded, StepUnderflow
from .foliation import (
    Region,
    SingularSet,
    default_region,
    detect_singular_pairs,
    grid_points,
    slice_diagram,
    slice_function,
    variation_bound,
)
from .matching import DIAG, assignment_cost, bottleneck_distance, cost, enumerate_matchings, heuristic_matchings, proper_bottleneck
from .transport import (
    DEFAULT,
    ParameterPath,
    TransportConfig,
    VineState,
    homotopy_matching,
    induced_matching,
    route,
    start_state,
    transport_state,
)

log = logging.getLogger(__name__)
INF = math.inf


@dataclass
class DistanceEstimate:
    lower: float
    upper: Optional[float]  # None: no certified upper bound
    witness: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    exact: bool = True  # False when the matching set was heuristic or the budget ran out

    @property
    def value(self) -> float:
        return self.witness.get("estimate", self.lower)


# ----------------------------------------------------------------- branch and bound


def branch_and_bound(objective, slack, region: Region, resolution: int = 32, tol: float = 1e-3, budget: int = 20000, cap: float = INF):
    """Maximize ``objective`` over ``region`` given ``slack(a0, a1, b0, b1)`` bounding its variation from the centre.

    ``cap`` is a global upper bound on the objective. Returns
    (lower, upper, witness, evaluations, converged, depth).
    """
    da, db = region.cell_size(resolution)
    heap = []
    lower, witness, evals, depth = -INF, None, 0, 0

    def push(a0, a1, b0, b1, level):
        nonlocal lower, witness, evals
        c = (0.5 * (a0 + a1), 0.5 * (b0 + b1))
        v = objective(c)
        evals += 1
        if v > lower or witness is None:
            lower, witness = v, c
        heapq.heappush(heap, (-min(v + slack(a0, a1, b0, b1), cap), evals, (a0, a1, b0, b1, level)))

    for i in range(resolution):
        for j in range(resolution):
            a0 = region.a_min + i * da
            b0 = region.b_min + j * db
            push(a0, a0 + da, b0, b0 + db, 0)
    converged = True
    while heap:
        neg, _, cell = heap[0]
        if -neg - lower <= tol:
            break
        if evals + 4 > budget:
            converged = False
            break
        heapq.heappop(heap)
        a0, a1, b0, b1, level = cell
        am, bm = 0.5 * (a0 + a1), 0.5 * (b0 + b1)
        depth = max(depth, level + 1)
        for x0, x1 in ((a0, am), (am, a1)):
            for y0, y1 in ((b0, bm), (bm, b1)):
                push(x0, x1, y0, y1, level + 1)
    upper = max(lower, -heap[0][0]) if heap else lower
    return lower, upper, witness, evals, converged, depth


def _pair_slack(f, g):
    def s(a0, a1, b0, b1):
        return variation_bound(f, a0, a1, b0, b1) + variation_bound(g, a0, a1, b0, b1)
    return s


def dmatch_at(K, f, g, pt, p: int = 2) -> float:
    return bottleneck_distance(slice_diagram(K, f, pt, p=p), slice_diagram(K, g, pt, p=p))


def estimate_dmatch(K, f: Bifiltration, g: Bifiltration, region: Optional[Region] = None, tol: float = 1e-3, resolution: int = 32, budget: int = 20000, p: int = 2) -> DistanceEstimate:
    """Certified bounds on the sup over parameter pairs of the normalized bottleneck distance."""
    region = region or default_region(f, g)
    lo, up, w, evals, conv, depth = branch_and_bound(lambda pt: dmatch_at(K, f, g, pt, p), _pair_slack(f, g), region, resolution, tol, budget, f.sup_distance(g))
    diag = {"grid": resolution, "evaluations": evals, "depth": depth, "converged": conv, "tol": tol}
    return DistanceEstimate(lo, up, {"point": w, "estimate": lo}, diag, exact=conv)


# ----------------------------------------------------------------- gamma infinity


def _sphere_gap(f, g, top):
    # on a sphere the degree-0 class is born at the global minimum and the top class at the maximum
    def gap(pt):
        sf, sg = slice_function(f, pt), slice_function(g, pt)
        best = abs(float(sf.min()) - float(sg.min()))
        if top:
            best = max(best, abs(float(sf.max()) - float(sg.max())))
        return best
    return gap


def _essential_gap(K, f, g, pt, degrees, p, strict):
    Df, Dg = slice_diagram(K, f, pt, p=p), slice_diagram(K, g, pt, p=p)
    best = 0.0
    for d in degrees:
        E1, E2 = Df.essential(d), Dg.essential(d)
        if len(E1) != len(E2):
            if strict:
                raise EssentialCountMismatch(f"degree {d}: {len(E1)} vs {len(E2)} points at infinity at {pt}")
            return INF
        if len(E1):
            best = max(best, float(np.abs(E1 - E2).max()))
    return best


def gamma_infinity(K, f: Bifiltration, g: Bifiltration, region: Optional[Region] = None, degrees=None, resolution: int = 32, tol: float = 1e-3, budget: int = 20000, p: int = 2, strict: bool = False):
    """Sup over parameter pairs of the distance between points at infinity.

    On a homology sphere of dimension m only degrees 0 and m carry such points
    (one each). Otherwise every degree is used and points at infinity are paired
    in sorted order. Returns a DistanceEstimate with ``diagnostics['mode']``.
    """
    region = region or default_region(f, g)
    mode = "sphere"
    if degrees is None:
        rep = validate_sphere_assumption(K, p)
        if rep.ok:
            degrees = sorted({0, rep.m})
        else:
            mode = "general"
            degrees = list(range(K.dim + 1))
    if mode == "sphere" and set(degrees) <= {0, K.dim}:
        objective = _sphere_gap(f, g, K.dim in degrees and K.dim > 0)
    else:
        objective = lambda pt: _essential_gap(K, f, g, pt, degrees, p, strict)  # noqa: E731
    lo, up, w, evals, conv, depth = branch_and_bound(objective, _pair_slack(f, g), region, resolution, tol, budget, f.sup_distance(g))
    diag = {"mode": mode, "degrees": list(degrees), "evaluations": evals, "depth": depth, "converged": conv}
    return DistanceEstimate(lo, up, {"point": w, "estimate": lo}, diag, exact=conv)


# ----------------------------------------------------------------- coherent estimate


@dataclass(frozen=True)
class CoherentConfig:
    resolution: int = 32
    word_length: int = 2
    limit: int = 6  # enumeration limit on proper points per side
    tol: float = 1e-3
    budget: int = 20000
    localization: float = 1e-3
    exclusion: Optional[float] = None
    transport: TransportConfig = DEFAULT


def _clear(A, B, singular) -> bool:
    return route(A, B, singular).waypoints == (tuple(A), tuple(B))


def _choose_basepoint(K, f, g, sing, basepoint, p):
    def regular(pt):
        ok = not sing.blocks(pt)
        return ok and slice_diagram(K, f, pt, p=p).proper_separation > 0 and slice_diagram(K, g, pt, p=p).proper_separation > 0

    if basepoint is not None:
        if not regular(basepoint):
            raise BasepointSingular(f"basepoint {basepoint} is singular or inside an exclusion disk")
        return tuple(basepoint), False
    for k in range(64):
        pt = (0.5 + 0.003 * k * (-1) ** k, 0.0 + 0.002 * k)
        if regular(pt):
            return pt, k > 0
    raise BasepointSingular("no regular basepoint found near (1/2, 0)")


@dataclass
class TransportTree:
    """States of the basepoint labels at every reachable grid node."""

    nodes: list  # (a, b)
    f_states: list
    g_states: list
    parent: list  # index of parent node, -1 for the root link from the basepoint
    unreachable: list
    stalls: list  # locations where transport stalled

    def path_to(self, k: int, basepoint) -> ParameterPath:
        chain = []
        while k != -1:
            chain.append(self.nodes[k])
            k = self.parent[k]
        return ParameterPath((tuple(basepoint),) + tuple(reversed(chain)))


def transport_tree(K, f, g, basepoint, region: Region, resolution: int, singular, cfg: TransportConfig = DEFAULT) -> TransportTree:
    pts = grid_points(region, resolution)
    idx = {(i, j): i * resolution + j for i in range(resolution) for j in range(resolution)}
    blocked = [singular.blocks(pt) for pt in pts]
    fs0 = start_state(K, f, basepoint, cfg.p)
    gs0 = start_state(K, g, basepoint, cfg.p)
    n = len(pts)
    fstates, gstates, parent = [None] * n, [None] * n, [-2] * n
    stalls = []

    def step(fs, gs, A, B):
        c = ParameterPath((tuple(A), tuple(B)))
        try:
            return transport_state(K, f, c, cfg, fs), transport_state(K, g, c, cfg, gs)
        except StepUnderflow as e:
            stalls.append(e.where)
            return None

    # root: nearest clear node
    order = sorted(range(n), key=lambda k: (math.hypot(pts[k][0] - basepoint[0], pts[k][1] - basepoint[1]), k))
    queue = deque()
    for k in order:
        if blocked[k] or not _clear(basepoint, pts[k], singular):
            continue
        r = step(fs0, gs0, basepoint, pts[k])
        if r is not None:
            fstates[k], gstates[k] = r
            parent[k] = -1
            queue.append(k)
            break
    while queue:
        k = queue.popleft()
        i, j = divmod(k, resolution)
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            m = idx.get((i + di, j + dj))
            if m is None or parent[m] != -2 or blocked[m] or not _clear(pts[k], pts[m], singular):
                continue
            r = step(fstates[k], gstates[k], pts[k], pts[m])
            if r is None:
                continue
            fstates[m], gstates[m] = r
            parent[m] = k
            queue.append(m)
    reached = [k for k in range(n) if parent[k] != -2]
    unreachable = [pts[k] for k in range(n) if parent[k] == -2]
    remap = {k: t for t, k in enumerate(reached)}
    return TransportTree(
        [pts[k] for k in reached],
        [fstates[k] for k in reached],
        [gstates[k] for k in reached],
        [-1 if parent[k] == -1 else remap[parent[k]] for k in reached],
        unreachable,
        stalls,
    )


class CostTable:
    """Cost of a transported basepoint matching at every tree node, in one degree.

    Pairs of live labels are evaluated with array operations; nodes holding
    free points (born on the way, or released by a partner on the diagonal)
    add the bottleneck distance between the free sets.
    """

    def __init__(self, tree: TransportTree, degree: int, nf: int, ng: int):
        self.degree = d = degree
        N = len(tree.nodes)
        self.nf, self.ng, self.N = nf, ng, N
        Fp = np.full((N, nf, 2), np.nan)
        Gp = np.full((N, ng, 2), np.nan)
        ess = np.zeros(N)
        self.orph_f, self.orph_g = [], []
        for k in range(N):
            fs, gs = tree.f_states[k], tree.g_states[k]
            Pf, Pg = fs.diagram.proper(d), gs.diagram.proper(d)
            wf, wg = fs.where[d][:nf], gs.where[d][:ng]
            Fp[k, wf >= 0] = Pf[wf[wf >= 0]]
            Gp[k, wg >= 0] = Pg[wg[wg >= 0]]
            self.orph_f.append(Pf[fs.orphans(d)])
            self.orph_g.append(Pg[gs.orphans(d)])
            Ef, Eg = fs.diagram.essential(d), gs.diagram.essential(d)
            if len(Ef) != len(Eg):
                ess[k] = INF
            elif len(Ef):
                # labels at infinity keep their basepoint pairing
                ess[k] = float(np.abs(Ef[fs.ess[d]] - Eg[gs.ess[d]]).max())
        self.Fp, self.Gp, self.ess = Fp, Gp, ess
        self.Fd = np.nan_to_num((Fp[..., 1] - Fp[..., 0]) / 2, nan=0.0)
        self.Gd = np.nan_to_num((Gp[..., 1] - Gp[..., 0]) / 2, nan=0.0)
        self.Fa = ~np.isnan(Fp[..., 0])
        self.Ga = ~np.isnan(Gp[..., 0])
        self.has_orphans = np.array([len(x) > 0 or len(y) > 0 for x, y in zip(self.orph_f, self.orph_g)], dtype=bool)

    def costs(self, assignment: tuple) -> np.ndarray:
        N = self.N
        out = self.ess.copy()
        relF = np.zeros((N, self.nf), dtype=bool)
        relG = np.zeros((N, self.ng), dtype=bool)
        claimed = set()
        for l, j in enumerate(assignment):
            if j == DIAG:
                out = np.maximum(out, self.Fd[:, l])
                continue
            claimed.add(j)
            both = self.Fa[:, l] & self.Ga[:, j]
            dist = np.nan_to_num(np.max(np.abs(self.Fp[:, l] - self.Gp[:, j]), axis=1), nan=0.0)
            out = np.maximum(out, np.where(both, dist, 0.0))
            relF[:, l] = self.Fa[:, l] & ~self.Ga[:, j]
            relG[:, j] = self.Ga[:, j] & ~self.Fa[:, l]
        for j in range(self.ng):
            if j not in claimed:
                out = np.maximum(out, self.Gd[:, j])
        busy = relF.any(axis=1) | relG.any(axis=1) | self.has_orphans
        for k in np.nonzero(busy)[0]:
            P = np.concatenate([self.Fp[k, relF[k]], self.orph_f[k]])
            Q = np.concatenate([self.Gp[k, relG[k]], self.orph_g[k]])
            out[k] = max(out[k], proper_bottleneck(P, Q))
        return out


def _loop_path(s, basepoint, singular, clearance_factor: float = 3.0, n_segments: int = 64) -> ParameterPath:
    """Basepoint -> circle around ``s`` (counter-clockwise) -> basepoint."""
    others = [q for q in singular if q is not s]
    r = clearance_factor * s.radius
    for q in others:
        gap = math.hypot(q.center[0] - s.center[0], q.center[1] - s.center[1]) - q.radius
        r = min(r, max(s.radius * 1.2, 0.5 * gap))
    cx, cy = s.center
    ang = math.atan2(basepoint[1] - cy, basepoint[0] - cx)
    P = (cx + r * math.cos(ang), cy + r * math.sin(ang))
    there = route(basepoint, P, others)
    circle = ParameterPath.circle(s.center, r, n_segments, ang)
    circle = ParameterPath((P,) + circle.waypoints[1:-1] + (P,))
    return there * circle * there.reversed()


def _label_map(state: VineState, degree: int, n_labels: int) -> tuple:
    w = state.where[degree][:n_labels]
    return tuple(int(k) if k >= 0 else DIAG for k in w)


def compose(assignment: tuple, fmap: tuple, gmap: tuple, n_rows_f: int) -> tuple:
    """Basepoint matching after a loop: labels follow ``fmap``/``gmap``; labels left on the diagonal are dropped."""
    out = [DIAG] * n_rows_f
    for l, j in enumerate(assignment):
        r = fmap[l]
        if r == DIAG or j == DIAG:
            continue
        t = gmap[j]
        if t != DIAG:
            out[r] = t
    return tuple(out)


def reduced_words(n_gens: int, L: int):
    """Reduced words over generators 0..n-1 and their inverses (encoded ~i), shortest first."""
    letters = [i for i in range(n_gens)] + [~i for i in range(n_gens)]
    words = [()]
    frontier = [()]
    for _ in range(L):
        nxt = []
        for w in frontier:
            for x in letters:
                if w and w[-1] == ~x:
                    continue
                nxt.append(w + (x,))
        words += nxt
        frontier = nxt
    return words


def word_label(w, names) -> str:
    return "".join(names[x] if x >= 0 else names[~x] + "^-1" for x in w) or "e"


def estimate_cdmatch(
    K: SimplicialComplex,
    f: Bifiltration,
    g: Bifiltration,
    basepoint=None,
    word_length: Optional[int] = None,
    region: Optional[Region] = None,
    config: CoherentConfig = CoherentConfig(),
    singular: Optional[SingularSet] = None,
    gamma: Optional[DistanceEstimate] = None,
) -> DistanceEstimate:
    """Estimate of the coherent matching distance.

    ``lower`` is a lower bound whenever the basepoint matchings were enumerated
    exhaustively (``exact``): each sampled sup is below the true sup and the
    min runs over all matchings. With heuristic matchings ``lower`` falls back
    to the at-infinity term and ``witness['estimate']`` holds the composite.
    """
    cfg = config
    L = cfg.word_length if word_length is None else word_length
    region = region or default_region(f, g)
    tp = cfg.transport
    if singular is None:
        sf = detect_singular_pairs(K, f, region, cfg.resolution, localization=cfg.localization, exclusion=cfg.exclusion, which="f", p=tp.p)
        sg = detect_singular_pairs(K, g, region, cfg.resolution, localization=cfg.localization, exclusion=cfg.exclusion, which="g", p=tp.p)
        singular = sf.merged(sg)
    bp, moved = _choose_basepoint(K, f, g, singular, basepoint, tp.p)
    Df, Dg = slice_diagram(K, f, bp, p=tp.p), slice_diagram(K, g, bp, p=tp.p)
    warnings = list(singular.warnings)
    if moved:
        warnings.append(f"basepoint moved to {bp}")

    tree = transport_tree(K, f, g, bp, region, cfg.resolution, singular, tp)
    if tree.unreachable:
        warnings.append(f"{len(tree.unreachable)} grid nodes unreachable")
    for w in tree.stalls:
        warnings.append(f"transport stalled near {w}; possible undetected singular pair")

    # loop generators
    gens, names = [], []
    for k, s in enumerate(singular):
        c = _loop_path(s, bp, list(singular))
        try:
            fe = transport_state(K, f, c, tp)
            ge = transport_state(K, g, c, tp)
            fi = transport_state(K, f, c.reversed(), tp)
            gi = transport_state(K, g, c.reversed(), tp)
        except StepUnderflow as e:
            warnings.append(f"loop around {s.center} stalled near {e.where}; generator skipped")
            continue
        gens.append((fe, ge, fi, gi))
        names.append(f"{s.which}{k + 1}")
    words = reduced_words(len(gens), L)

    exact = True
    per_degree = {}
    proper_value = 0.0
    best_overall = None
    for d in Df.degrees:
        try:
            S = enumerate_matchings(Df, Dg, d, cfg.limit)
        except LimitExceeded:
            exact = False
            S = heuristic_matchings(Df, Dg, d)
            hm = homotopy_matching(K, slice_function(f, bp), slice_function(g, bp), d, tp)
            if hm not in S:
                S.append(hm)
            warnings.append(f"degree {d}: matching set is heuristic")
        if not S:
            continue
        nf, ng = Df.n_proper(d), Dg.n_proper(d)
        table = CostTable(tree, d, nf, ng) if tree.nodes else None
        maps = [
            (_label_map(fe, d, nf), _label_map(ge, d, ng), _label_map(fi, d, nf), _label_map(gi, d, ng))
            for fe, ge, fi, gi in gens
        ]
        phi_cache = {}

        def phi(tau):
            if tau not in phi_cache:
                if table is None or table.N == 0:
                    phi_cache[tau] = (0.0, -1)
                else:
                    c = table.costs(tau)
                    k = int(np.argmax(c))
                    phi_cache[tau] = (float(c[k]), k)
            return phi_cache[tau]

        rows = []
        for sigma in S:
            best = (-INF, None, None)
            for w in words:
                tau = sigma.assignment
                for x in w:
                    fm, gm, fim, gim = maps[x] if x >= 0 else maps[~x][2:] + maps[~x][:2]
                    tau = compose(tau, fm, gm, nf)
                v, k = phi(tau)
                # the basepoint itself is on every path
                v0 = assignment_only_cost(Df, Dg, d, tau)
                if v0 > v:
                    v, k = v0, -1
                if v > best[0]:
                    best = (v, w, k)
            rows.append({
                "assignment": list(sigma.assignment),
                "sup": best[0],
                "word": word_label(best[1], names),
                "endpoint": list(bp) if best[2] == -1 else list(tree.nodes[best[2]]),
                "basepoint_cost": cost(sigma),
            })
        m = min(range(len(rows)), key=lambda i: (rows[i]["sup"], i))
        per_degree[d] = {"min": rows[m]["sup"], "argmin": m, "table": rows, "exact": exact}
        if rows[m]["sup"] > proper_value or best_overall is None:
            proper_value = max(proper_value, rows[m]["sup"])
            best_overall = (d, rows[m])

    if gamma is None:
        gamma = gamma_infinity(K, f, g, region, resolution=cfg.resolution, tol=cfg.tol, budget=cfg.budget, p=tp.p)
    estimate = max(proper_value, gamma.lower)
    lower = estimate if exact else gamma.lower
    witness = {
        "estimate": estimate,
        "proper": proper_value,
        "gamma_infinity": gamma.lower,
        "gamma_point": gamma.witness.get("point"),
        "basepoint": bp,
    }
    if best_overall is not None:
        d, row = best_overall
        witness.update({"degree": d, "assignment": row["assignment"], "word": row["word"], "endpoint": row["endpoint"]})
    diagnostics = {
        "grid": cfg.resolution,
        "word_length": L,
        "words": [word_label(w, names) for w in words],
        "generators": names,
        "singular": [{"center": list(s.center), "radius": s.radius, "which": s.which} for s in singular],
        "nodes_reached": len(tree.nodes),
        "nodes_unreachable": len(tree.unreachable),
        "per_degree": per_degree,
        "warnings": warnings,
        "gamma_mode": gamma.diagnostics.get("mode"),
    }
    est = DistanceEstimate(lower, None, witness, diagnostics, exact=exact)
    est._tree = tree  # kept for slack computations and replay
    return est


def assignment_only_cost(Df, Dg, degree, tau) -> float:
    return assignment_cost(Df.proper(degree), Dg.proper(degree), tau)


def replay(K, f, g, estimate: DistanceEstimate, degree: int, assignment, word_paths: list, endpoint, config: CoherentConfig = CoherentConfig()) -> float:
    """Cost of the basepoint matching carried along the given loops and the tree run to ``endpoint``."""
    tp = config.transport
    bp = tuple(estimate.witness["basepoint"])
    tree = estimate._tree
    Df, Dg = slice_diagram(K, f, bp, p=tp.p), slice_diagram(K, g, bp, p=tp.p)
    tau = tuple(assignment)
    nf, ng = Df.n_proper(degree), Dg.n_proper(degree)
    for c in word_paths:
        fe, ge = transport_state(K, f, c, tp), transport_state(K, g, c, tp)
        tau = compose(tau, _label_map(fe, degree, nf), _label_map(ge, degree, ng), nf)
    if tuple(endpoint) == bp:
        return assignment_only_cost(Df, Dg, degree, tau)
    k = tree.nodes.index(tuple(endpoint))
    path = tree.path_to(k, bp)
    fs, gs = transport_state(K, f, path, tp), transport_state(K, g, path, tp)
    return cost(induced_matching(degree, tau, fs, gs))


# ----------------------------------------------------------------- checks


@dataclass
class CheckResult:
    name: str
    passed: bool
    lhs: float
    rhs: float
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "passed": self.passed, "lhs": self.lhs, "rhs": self.rhs, "detail": self.detail}


def per_slice_contraction(f: Bifiltration, g: Bifiltration, points) -> bool:
    """|f*_p - g*_p| <= ||f - g|| at every vertex and point, in exact rational arithmetic."""
    from fractions import Fraction

    from .foliation import slice_value

    F = [[Fraction(x) for x in row] for row in f.values]
    G = [[Fraction(x) for x in row] for row in g.values]
    bound = max((abs(x - y) for rf, rg in zip(F, G) for x, y in zip(rf, rg)), default=Fraction(0))
    for a, b in points:
        a, b = Fraction(a), Fraction(b)
        for rf, rg in zip(F, G):
            if abs(slice_value(rf[0], rf[1], a, b) - slice_value(rg[0], rg[1], a, b)) > bound:
                return False
    return True


def stability_check(K, f: Bifiltration, eta, config: CoherentConfig = CoherentConfig(), tol: float = 1e-9) -> CheckResult:
    """Coherent estimate for (f, f + eta) against ||eta||, plus the exact per-slice inequality."""
    eta = np.asarray(eta, dtype=float)
    g = f + eta
    norm = float(np.max(np.abs(eta))) if eta.size else 0.0
    est = estimate_cdmatch(K, f, g, config=config)
    region = default_region(f, g)
    per_slice = per_slice_contraction(f, g, grid_points(region, 8))
    ok = est.lower <= norm + tol and per_slice
    return CheckResult("stability", ok, est.lower, norm, {"estimate": est.witness["estimate"], "per_slice": per_slice, "exact": est.exact})


def compare_distances(K, f: Bifiltration, g: Bifiltration, config: CoherentConfig = CoherentConfig(), dtol: Optional[float] = None) -> CheckResult:
    """D_match lower bound against the coherent estimate plus the slack between their sample sets."""
    region = default_region(f, g)
    tp = config.transport
    D = estimate_dmatch(K, f, g, region, tol=dtol if dtol is not None else config.tol, resolution=config.resolution, budget=config.budget, p=tp.p)
    CD = estimate_cdmatch(K, f, g, region=region, config=config)
    w = D.witness["point"]
    reached = list(CD._tree.nodes) + [tuple(CD.witness["basepoint"])]
    near = min(reached, key=lambda q: math.hypot(q[0] - w[0], q[1] - w[1]))
    a0, a1 = sorted((w[0], near[0]))
    b0, b1 = sorted((w[1], near[1]))
    slack = variation_bound(f, a0, a1, b0, b1, center=w) + variation_bound(g, a0, a1, b0, b1, center=w) if near != tuple(w) else 0.0
    est = CD.witness["estimate"]
    ok = D.lower <= est + slack
    detail = {
        "dmatch_lower": D.lower,
        "dmatch_upper": D.upper,
        "dmatch_point": list(w),
        "cdmatch": est,
        "slack": slack,
        "nearest_node": list(near),
        "strict_gap": est - D.upper if D.upper is not None else None,
    }
    return CheckResult("dmatch<=cdmatch", ok, D.lower, est + slack, detail)


def transport_laws(K, f: Bifiltration, g: Bifiltration, h: Bifiltration, c1: ParameterPath, c2: ParameterPath, cfg: TransportConfig = DEFAULT) -> CheckResult:
    """Exact endpoint equalities for every basepoint matching at c1(0).

    Constant path gives the identity, c1 followed by its reverse returns the
    start matching, c1 * c2 equals c1 then c2, and transport commutes with
    composition f -> g -> h. ``c2`` must start where ``c1`` ends.
    """
    from .matching import compose_matchings
    from .transport import transport_matching

    bp = c1.start
    Df, Dg, Dh = (slice_diagram(K, F, bp, p=cfg.p) for F in (f, g, h))
    fails = {"constant": 0, "round_trip": 0, "concatenation": 0, "functoriality": 0}
    checked = 0
    whole = c1 * c2
    for d in Df.degrees:
        for m in enumerate_matchings(Df, Dg, d):
            checked += 1
            fails["constant"] += transport_matching(K, f, g, m, ParameterPath.constant(bp), cfg).result != m
            fails["round_trip"] += transport_matching(K, f, g, m, c1 * c1.reversed(), cfg).result != m
            once = transport_matching(K, f, g, m, whole, cfg).result
            twice = transport_matching(K, f, g, transport_matching(K, f, g, m, c1, cfg), c2, cfg).result
            fails["concatenation"] += once != twice
        for s in enumerate_matchings(Df, Dg, d):
            sg = transport_matching(K, f, g, s, whole, cfg).result
            for t in enumerate_matchings(Dg, Dh, d):
                checked += 1
                lhs = transport_matching(K, f, h, compose_matchings(s, t), whole, cfg).result
                rhs = compose_matchings(sg, transport_matching(K, g, h, t, whole, cfg).result)
                fails["functoriality"] += lhs != rhs
    total = sum(fails.values())
    return CheckResult("transport_laws", total == 0, float(total), 0.0, {"failures": fails, "checked": checked})
