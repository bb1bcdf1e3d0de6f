"""Continuation of cornerpoints and matchings along paths of scalar fields.

Every transport runs the whole diagram at once. Between consecutive fields
phi, phi' with delta = max |phi - phi'| each diagram point moves by at most
delta (1D stability), so when 2*delta is below the separation of both
diagrams, nearest-neighbour pairing within delta is forced. Points with no
partner must be within delta of the diagonal and die there; unclaimed new
points are births. A track resting on the diagonal keeps the position where
it landed, known up to the step length of its death, and resumes with a birth
that appears within that window. Continuing close to the diagonal and dying
then resuming nearby give the same labels, so only deaths, and births while
some label rests on the diagonal, need short steps.

Parameter paths are polylines; stepping restarts at each waypoint, so
transport along a concatenation equals transport along the pieces in turn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .complex import Bifiltration, SimplicialComplex
from .errors import StartPointNotInDiagram, StepUnderflow
from .foliation import as_point, slice_function
from .matching import DIAG, DIAGONAL, Matching, pairwise, proper_bottleneck, to_diagonal
from .persistence import Cornerpoint, PersistenceDiagram, reduce

INF = math.inf


@dataclass(frozen=True)
class TransportConfig:
    max_step: float = 0.25  # fraction of one path segment
    min_step: float = 1e-9
    gap: float = INF  # near-diagonal gap k; steps need 2*delta < gap
    death_tol: float = 1e-3  # relative; steps in which a track dies are shortened to this
    p: int = 2


DEFAULT = TransportConfig()


# ----------------------------------------------------------------- paths


@dataclass(frozen=True)
class ParameterPath:
    """Polyline c: [0, 1] -> parameter pairs, parameterized by arclength."""

    waypoints: tuple

    def __post_init__(self):
        pts = tuple((float(a), float(b)) for a, b in self.waypoints)
        if not pts:
            raise ValueError("a path needs at least one waypoint")
        for pt in pts:
            as_point(pt)
        object.__setattr__(self, "waypoints", pts)

    @classmethod
    def straight(cls, A, B):
        return cls((tuple(A), tuple(B)))

    @classmethod
    def constant(cls, A):
        return cls((tuple(A),))

    @classmethod
    def circle(cls, center, radius, n_segments=64, start_angle=0.0, turns=1):
        ca, cb = center
        th = start_angle + 2 * math.pi * turns * np.arange(n_segments * turns + 1) / (n_segments * turns)
        pts = [(ca + radius * math.cos(t), cb + radius * math.sin(t)) for t in th]
        pts[-1] = pts[0] if turns else pts[-1]
        return cls(tuple(pts))

    @property
    def start(self):
        return self.waypoints[0]

    @property
    def end(self):
        return self.waypoints[-1]

    def segments(self):
        return list(zip(self.waypoints, self.waypoints[1:]))

    def lengths(self):
        return [math.hypot(B[0] - A[0], B[1] - A[1]) for A, B in self.segments()]

    @property
    def length(self) -> float:
        return float(sum(self.lengths()))

    def point(self, tau: float):
        L = self.lengths()
        total = sum(L)
        if total == 0:
            return self.start
        s = tau * total
        for (A, B), l in zip(self.segments(), L):
            if s <= l or l == total:
                t = 0.0 if l == 0 else min(s / l, 1.0)
                return (A[0] + t * (B[0] - A[0]), A[1] + t * (B[1] - A[1]))
            s -= l
        return self.end

    def reversed(self) -> "ParameterPath":
        return ParameterPath(self.waypoints[::-1])

    def __mul__(self, other: "ParameterPath") -> "ParameterPath":
        """Concatenation: this path, then ``other``."""
        if self.end != other.start:
            raise ValueError(f"cannot concatenate: {self.end} != {other.start}")
        return ParameterPath(self.waypoints + other.waypoints[1:])

    def clearance(self, singular) -> float:
        """Smallest distance from the path to a singular centre minus its exclusion radius."""
        best = INF
        for s in singular:
            for A, B in self.segments() or [(self.start, self.start)]:
                best = min(best, _segment_distance(A, B, s.center) - s.radius)
        return best


def _segment_distance(A, B, C) -> float:
    ax, ay = A
    bx, by = B
    cx, cy = C
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((cx - ax) * dx + (cy - ay) * dy) / L2))
    return math.hypot(ax + t * dx - cx, ay + t * dy - cy)


def route(A, B, singular=(), factor: float = 1.5, arc_points: int = 12, _depth: int = 0) -> ParameterPath:
    """Polyline from A to B that detours around exclusion disks.

    A blocking disk is passed along an arc of ``factor`` times its radius on the
    side of the segment's closest approach.
    """
    A, B = tuple(A), tuple(B)
    blocking = [s for s in singular if _segment_distance(A, B, s.center) < s.radius]
    if not blocking or _depth > 8:
        return ParameterPath((A, B))
    dx, dy = B[0] - A[0], B[1] - A[1]
    s = min(blocking, key=lambda s: (s.center[0] - A[0]) * dx + (s.center[1] - A[1]) * dy)
    cx, cy = s.center
    R = factor * s.radius
    ta = math.atan2(A[1] - cy, A[0] - cx)
    tb = math.atan2(B[1] - cy, B[0] - cx)
    # side of closest approach: sign of cross(B - A, C - A)
    side = dx * (cy - A[1]) - dy * (cx - A[0])
    sweep = (tb - ta) % (2 * math.pi)
    if side > 0:  # centre left of travel: go round clockwise
        sweep -= 2 * math.pi
    arc = [
        (cx + R * math.cos(ta + sweep * k / arc_points), cy + R * math.sin(ta + sweep * k / arc_points))
        for k in range(arc_points + 1)
    ]
    first = route(A, arc[0], singular, factor, arc_points, _depth + 1)
    last = route(arc[-1], B, singular, factor, arc_points, _depth + 1)
    return first * ParameterPath(tuple(arc)) * last


# ----------------------------------------------------------------- state


@dataclass
class VineState:
    """Positions of labelled cornerpoints at the current field.

    Per degree: ``where[d][l]`` is the row of label ``l`` in the current proper
    points, or -1 while the label rests on the diagonal at ``dpos[d][l]``.
    ``ess[d][l]`` is the current row of an at-infinity label.
    """

    diagram: PersistenceDiagram
    values: np.ndarray
    where: dict
    dpos: dict
    group: dict
    ess: dict
    dunc: dict = field(default_factory=dict)  # landing uncertainty of diagonal-resting labels
    deaths: int = 0
    births: int = 0
    resumed: int = 0

    @classmethod
    def start(cls, diagram: PersistenceDiagram, values) -> "VineState":
        where, dpos, group, ess, dunc = {}, {}, {}, {}, {}
        for d in diagram.degrees:
            n = diagram.n_proper(d)
            where[d] = np.arange(n)
            dpos[d] = np.full(n, np.nan)
            dunc[d] = np.zeros(n)
            group[d] = np.zeros(n, dtype=int)
            ess[d] = np.arange(len(diagram.essential(d)))
        return cls(diagram, np.asarray(values, dtype=float), where, dpos, group, ess, dunc)

    def copy(self) -> "VineState":
        return replace(
            self,
            where={d: w.copy() for d, w in self.where.items()},
            dpos={d: w.copy() for d, w in self.dpos.items()},
            group={d: w.copy() for d, w in self.group.items()},
            ess={d: w.copy() for d, w in self.ess.items()},
            dunc={d: w.copy() for d, w in self.dunc.items()},
        )

    def add_diagonal_tracks(self, degree: int, positions, group: int) -> np.ndarray:
        """Append labels resting on the diagonal; returns their label numbers."""
        positions = np.asarray(positions, dtype=float)
        n0 = len(self.where[degree])
        self.where[degree] = np.concatenate([self.where[degree], np.full(len(positions), -1)])
        self.dpos[degree] = np.concatenate([self.dpos[degree], positions])
        self.dunc[degree] = np.concatenate([self.dunc[degree], np.zeros(len(positions))])
        self.group[degree] = np.concatenate([self.group[degree], np.full(len(positions), group)])
        return np.arange(n0, n0 + len(positions))

    def position(self, degree: int, label: int):
        """Current cornerpoint of ``label``, or (c, c, True) on the diagonal."""
        k = self.where[degree][label]
        if k < 0:
            c = float(self.dpos[degree][label])
            return (c, c, True)
        u, v = self.diagram.proper(degree)[k]
        return (float(u), float(v), False)

    def orphans(self, degree: int) -> np.ndarray:
        """Rows of the current diagram that no label occupies (births along the way)."""
        n = self.diagram.n_proper(degree)
        taken = np.zeros(n, dtype=bool)
        w = self.where[degree]
        taken[w[w >= 0]] = True
        return np.nonzero(~taken)[0]


@dataclass
class _StepResult:
    fwd: dict  # degree -> array old row -> new row or -1
    births: dict  # degree -> array of new rows
    ess: dict
    deaths: bool


def _step_map(D: PersistenceDiagram, D2: PersistenceDiagram, r: float) -> Optional[_StepResult]:
    """Forced pairing of consecutive diagrams, or None when the step is too long to decide."""
    fwd, births, ess = {}, {}, {}
    deaths = False
    for d in D.degrees:
        P, Q = D.proper(d), D2.proper(d)
        aP, aQ = to_diagonal(P), to_diagonal(Q)
        if len(P) and len(Q):
            M = pairwise(P, Q) <= r
            cnt = M.sum(axis=1)
            if np.any(cnt > 1) or np.any(M.sum(axis=0) > 1):
                return None
            has = cnt == 1
            f = np.where(has, M.argmax(axis=1), -1)
        else:
            has = np.zeros(len(P), dtype=bool)
            f = np.full(len(P), -1)
        if np.any(~has & (aP > r)):
            return None
        deaths = deaths or bool(np.any(~has))
        claimed = np.zeros(len(Q), dtype=bool)
        claimed[f[has]] = True
        new = np.nonzero(~claimed)[0]
        if np.any(aQ[new] > r):
            return None
        fwd[d], births[d] = f, new
        E, E2 = D.essential(d), D2.essential(d)
        if len(E) != len(E2) or (len(E) and np.abs(E - E2).max() > r):
            return None
        ess[d] = np.arange(len(E))
    return _StepResult(fwd, births, ess, deaths)


def _resumptions(state: VineState, D2: PersistenceDiagram, step: _StepResult, r: float):
    """Diagonal-resting labels that pick up a birth: {degree: [(label, row)]}."""
    out = {}
    for d in D2.degrees:
        resting = np.nonzero(state.where[d] < 0)[0]
        new = step.births.get(d, np.zeros(0, dtype=int))
        if len(resting) == 0 or len(new) == 0:
            continue
        Q = D2.proper(d)[new]
        picks = []
        for l in resting:
            c = state.dpos[d][l]
            dist = np.maximum(np.abs(Q[:, 0] - c), np.abs(Q[:, 1] - c))
            k = int(np.argmin(dist))
            if dist[k] <= r + state.dunc[d][l]:
                picks.append((float(dist[k]), int(l), int(new[k])))
        chosen, used = [], set()
        for dist, l, row in sorted(picks):
            key = (int(state.group[d][l]), row)
            if key not in used:
                used.add(key)
                chosen.append((l, row))
        if chosen:
            out[d] = chosen
    return out


def _may_resume(state: VineState, step: _StepResult) -> bool:
    return any(len(b) and np.any(state.where[d] < 0) for d, b in step.births.items())


def _apply(state: VineState, D2, values2, step: _StepResult, resume, r: float) -> VineState:
    new = state.copy()
    new.diagram, new.values = D2, values2
    for d in state.where:
        w = state.where[d]
        f = step.fwd.get(d, np.zeros(0, dtype=int))
        nw = w.copy()
        live = w >= 0
        nw[live] = f[w[live]] if len(f) else -1
        died = live & (nw < 0)
        if np.any(died):
            P = state.diagram.proper(d)
            new.dpos[d][died] = 0.5 * (P[w[died], 0] + P[w[died], 1])
            new.dunc[d][died] = 0.5 * (P[w[died], 1] - P[w[died], 0]) + r
            new.deaths += int(died.sum())
        for l, row in resume.get(d, []):
            nw[l] = row
            new.dpos[d][l] = np.nan
            new.resumed += 1
        new.where[d] = nw
        new.births += len(step.births.get(d, ()))
        e = step.ess.get(d)
        if e is not None and len(state.ess[d]):
            new.ess[d] = e[state.ess[d]]
    return new


Family = Callable[[float], np.ndarray]


def advance(K: SimplicialComplex, state: VineState, family: Family, cfg: TransportConfig = DEFAULT, on_step=None) -> VineState:
    """Carry ``state`` along ``family(t)``, t in [0, 1]; ``family(0)`` must be the current field.

    ``on_step(t, state)`` is called after every accepted step.
    """
    t, h = 0.0, cfg.max_step
    vals, D = state.values, state.diagram
    while t < 1.0:
        h = min(h, 1.0 - t)
        t2 = 1.0 if t + h >= 1.0 - 1e-15 else t + h
        vals2 = family(t2)
        delta = float(np.max(np.abs(vals2 - vals))) if len(vals) else 0.0
        if delta == 0.0:
            state = replace(state.copy(), values=vals2)
            t = t2
            if on_step:
                on_step(t, state)
            continue
        D2 = reduce(K, vals2, cfg.p)
        scale = 1.0 + float(np.max(np.abs(vals2)))
        r = delta + 1e-12 * scale
        step = None
        if 2 * delta < min(D.separation, D2.separation, cfg.gap):
            step = _step_map(D, D2, r)
        resume = {}
        if step is not None:
            resume = _resumptions(state, D2, step, r)
            # deaths fix a landing point, and births next to a resting label
            # decide whether it resumes; both need short steps
            if (step.deaths or _may_resume(state, step)) and delta > cfg.death_tol * scale:
                step = None
        if step is None:
            h /= 2
            if h < cfg.min_step:
                raise StepUnderflow(f"step size fell below {cfg.min_step} at t = {t}", where=t)
            continue
        state = _apply(state, D2, vals2, step, resume, r)
        vals, D, t = vals2, D2, t2
        h = min(2 * h, cfg.max_step)
        if on_step:
            on_step(t, state)
    return state


def _segment_family(f: Bifiltration, A, B) -> Family:
    def fam(t):
        if t == 1.0:  # land exactly on the waypoint
            return slice_function(f, B)
        return slice_function(f, (A[0] + t * (B[0] - A[0]), A[1] + t * (B[1] - A[1])))
    return fam


def start_state(K, f: Bifiltration, pt, p: int = 2) -> VineState:
    vals = slice_function(f, pt)
    return VineState.start(reduce(K, vals, p), vals)


def transport_state(K, f: Bifiltration, c: ParameterPath, cfg: TransportConfig = DEFAULT, state: Optional[VineState] = None, recorder=None) -> VineState:
    """Transport every cornerpoint of f along ``c``; continue from ``state`` when given."""
    if state is None:
        state = start_state(K, f, c.start, cfg.p)
    L = c.lengths()
    total = sum(L)
    done = 0.0
    for (A, B), l in zip(c.segments(), L):
        if l == 0:
            continue
        hook = None
        if recorder is not None:
            def hook(t, st, A=A, B=B, l=l, done=done):
                recorder((done + t * l) / total, (A[0] + t * (B[0] - A[0]), A[1] + t * (B[1] - A[1])), st)
        try:
            state = advance(K, state, _segment_family(f, A, B), cfg, hook)
        except StepUnderflow as e:
            t = e.where or 0.0
            where = (A[0] + t * (B[0] - A[0]), A[1] + t * (B[1] - A[1]))
            raise StepUnderflow(f"transport stalled near (a, b) = {where}; the path runs into a singular pair", where=where) from None
        done += l
    return state


# ----------------------------------------------------------------- tracks


@dataclass
class CornerpointTrack:
    degree: int
    label: int
    start: Cornerpoint
    samples: list = field(default_factory=list)  # (tau, a, b, birth, death, on_diagonal)

    @property
    def endpoint(self):
        tau, a, b, u, v, on_diag = self.samples[-1]
        return DIAGONAL if on_diag else Cornerpoint(self.degree, u, v)

    @property
    def end_position(self):
        return self.samples[-1][3:5]

    @property
    def diagonal_intervals(self) -> list:
        """Maximal tau-intervals spent on the diagonal."""
        out, cur = [], None
        for tau, *_, on in self.samples:
            if on and cur is None:
                cur = [tau, tau]
            elif on:
                cur[1] = tau
            elif cur is not None:
                out.append(tuple(cur))
                cur = None
        if cur is not None:
            out.append(tuple(cur))
        return out


def find_label(D: PersistenceDiagram, X: Cornerpoint) -> int:
    P = D.proper(X.degree)
    hit = np.nonzero((P[:, 0] == X.birth) & (P[:, 1] == X.death))[0]
    if len(hit) == 0:
        raise StartPointNotInDiagram(f"{X} is not a proper cornerpoint of the start diagram")
    return int(hit[0])


def transport_point(K, f: Bifiltration, X: Cornerpoint, c: ParameterPath, gap: float = INF, cfg: TransportConfig = DEFAULT) -> CornerpointTrack:
    """Admissible track of the proper cornerpoint ``X`` of Dgm(f*_{c(0)}) along ``c``."""
    cfg = replace(cfg, gap=min(gap, cfg.gap))
    state = start_state(K, f, c.start, cfg.p)
    label = find_label(state.diagram, X)
    track = CornerpointTrack(X.degree, label, X)
    track.samples.append((0.0, *c.start, X.birth, X.death, False))

    def rec(tau, pt, st):
        u, v, on = st.position(X.degree, label)
        track.samples.append((tau, pt[0], pt[1], u, v, on))

    transport_state(K, f, c, cfg, state, rec)
    if len(c.waypoints) == 1 or c.length == 0:
        track.samples.append((1.0, *c.start, X.birth, X.death, False))
    return track


def vineyard(K, f: Bifiltration, c: ParameterPath, cfg: TransportConfig = DEFAULT):
    """All tracks along ``c`` as rows (degree, label, tau, a, b, birth, death, on_diagonal)."""
    state = start_state(K, f, c.start, cfg.p)
    rows = []

    def snap(tau, pt, st):
        for d in st.where:
            for l in range(len(st.where[d])):
                u, v, on = st.position(d, l)
                rows.append((d, l, tau, pt[0], pt[1], u, v, on))

    snap(0.0, c.start, state)
    end = transport_state(K, f, c, cfg, state, snap)
    return rows, end


# ----------------------------------------------------------------- matchings


@dataclass
class TransportedMatching:
    """A matching at c(0) carried to c(1).

    ``source`` is keyed by start labels; ``f_state``/``g_state`` locate the
    labels at the end; ``result`` is the induced matching between the end
    diagrams (see ``induced_matching``).
    """

    source: Matching
    f_state: VineState
    g_state: VineState
    result: Matching

    @property
    def cost(self) -> float:
        from .matching import cost

        return cost(self.result)


def free_rows(degree: int, source: tuple, f_state: VineState, g_state: VineState):
    """Rows whose basepoint partner has reached the diagonal, plus rows born on the way."""
    wf, wg = f_state.where[degree], g_state.where[degree]
    ff, fg = list(f_state.orphans(degree)), list(g_state.orphans(degree))
    for l, j in enumerate(source):
        if j == DIAG:
            continue
        if wf[l] >= 0 and wg[j] < 0:
            ff.append(int(wf[l]))
        elif wf[l] < 0 and wg[j] >= 0:
            fg.append(int(wg[j]))
    return np.array(sorted(ff), dtype=int), np.array(sorted(fg), dtype=int)


def induced_matching(degree: int, source: tuple, f_state: VineState, g_state: VineState) -> Matching:
    """End-point matching determined by a label-level assignment and two states.

    Pairs whose labels are both alive travel together, and a label matched to
    the diagonal at the start stays matched to it. Diagonal points are
    interchangeable, so a point whose partner has reached the diagonal is free
    again, as is every point born on the way. Free points of the two sides are
    paired by the lexicographically first optimal matching.
    """
    Df, Dg = f_state.diagram, g_state.diagram
    P, Q = Df.proper(degree), Dg.proper(degree)
    wf, wg = f_state.where[degree], g_state.where[degree]
    s = [DIAG] * len(P)
    for l, j in enumerate(source):
        if wf[l] >= 0 and j != DIAG and wg[j] >= 0:
            s[wf[l]] = int(wg[j])
    ff, fg = free_rows(degree, source, f_state, g_state)
    if len(ff) and len(fg):
        _, t = proper_bottleneck(P[ff], Q[fg], with_assignment=True)
        for i, j in zip(ff, t):
            if j != DIAG:
                s[i] = int(fg[j])
    Ef, Eg = Df.essential(degree), Dg.essential(degree)
    epairs = ()
    if len(Ef) == len(Eg):
        epairs = tuple(sorted((int(f_state.ess[degree][l]), int(g_state.ess[degree][l])) for l in range(len(Ef))))
    return Matching(degree, P, Q, tuple(s), Ef, Eg, epairs)


def transport_matching(K, f: Bifiltration, g: Bifiltration, sigma, c: ParameterPath, cfg: TransportConfig = DEFAULT) -> TransportedMatching:
    """Carry ``sigma`` (a Matching at c(0), or a TransportedMatching ending there) along ``c``."""
    if isinstance(sigma, TransportedMatching):
        src, fs, gs = sigma.source, sigma.f_state, sigma.g_state
        if not np.array_equal(fs.values, slice_function(f, c.start)):
            raise ValueError("path does not start where the transported matching ends")
    else:
        src = sigma
        fs = start_state(K, f, c.start, cfg.p)
        gs = start_state(K, g, c.start, cfg.p)
        if not (np.array_equal(fs.diagram.proper(src.degree), src.left) and np.array_equal(gs.diagram.proper(src.degree), src.right)):
            raise StartPointNotInDiagram("matching is not between the diagrams at c(0)")
    fs = transport_state(K, f, c, cfg, fs)
    gs = transport_state(K, g, c, cfg, gs)
    return TransportedMatching(src, fs, gs, induced_matching(src.degree, src.assignment, fs, gs))


def homotopy_family(phi, psi) -> Family:
    phi, psi = np.asarray(phi, dtype=float), np.asarray(psi, dtype=float)

    def fam(s):
        return (1 - s) * phi + s * psi
    return fam


def homotopy_state(K, phi, psi, cfg: TransportConfig = DEFAULT) -> VineState:
    phi = np.asarray(phi, dtype=float)
    st = VineState.start(reduce(K, phi, cfg.p), phi)
    return advance(K, st, homotopy_family(phi, psi), cfg)


def transport_across_homotopy(K, phi, psi, X: Cornerpoint, cfg: TransportConfig = DEFAULT):
    """Endpoint of X under the straight-line homotopy from phi to psi (a Cornerpoint or DIAGONAL)."""
    phi = np.asarray(phi, dtype=float)
    D = reduce(K, phi, cfg.p)
    label = find_label(D, X)
    if np.sum((D.proper(X.degree) == (X.birth, X.death)).all(axis=1)) > 1:
        raise StartPointNotInDiagram(f"{X} has multiplicity > 1")
    end = homotopy_state(K, phi, psi, cfg)
    u, v, on = end.position(X.degree, label)
    return DIAGONAL if on else Cornerpoint(X.degree, u, v)


def homotopy_matching(K, phi, psi, degree: int, cfg: TransportConfig = DEFAULT) -> Matching:
    """Matching Dgm(phi) -> Dgm(psi) obtained by deforming the identity along the homotopy."""
    phi = np.asarray(phi, dtype=float)
    start = VineState.start(reduce(K, phi, cfg.p), phi)
    end = advance(K, start, homotopy_family(phi, psi), cfg)
    # pair start label l with whatever row it reaches in Dgm(psi)
    P, Q = start.diagram.proper(degree), end.diagram.proper(degree)
    s = tuple(int(k) if k >= 0 else DIAG for k in end.where[degree])
    E1, E2 = start.diagram.essential(degree), end.diagram.essential(degree)
    epairs = tuple((l, int(end.ess[degree][l])) for l in range(len(E1))) if len(E1) == len(E2) else ()
    return Matching(degree, P, Q, s, E1, E2, epairs)


# ----------------------------------------------------------------- monodromy


@dataclass
class LoopResult:
    maps: dict  # degree -> tuple, start row -> end row or DIAG
    n_segments: int
    stable: bool
    basepoint: tuple
    diagram: PersistenceDiagram

    def is_identity(self) -> bool:
        return all(m == tuple(range(len(m))) for m in self.maps.values())

    def cycles(self, degree: int) -> str:
        """Cycle notation with 1-based labels; fixed points omitted, "()" for the identity."""
        m = self.maps[degree]
        seen, parts = set(), []
        for i in range(len(m)):
            if i in seen or m[i] == i:
                continue
            cyc, j = [], i
            while j not in seen and j != DIAG:
                seen.add(j)
                cyc.append(j)
                j = m[j]
            if j == DIAG:
                parts.append("(" + " ".join(str(k + 1) for k in cyc) + " -> D)")
            else:
                parts.append("(" + " ".join(str(k + 1) for k in cyc) + ")")
        return "".join(parts) or "()"

    def compose(self, other: "LoopResult") -> dict:
        """Maps of self followed by other (both at the same basepoint)."""
        out = {}
        for d, m in self.maps.items():
            o = other.maps[d]
            out[d] = tuple(DIAG if k == DIAG else o[k] for k in m)
        return out


def loop_maps(K, f: Bifiltration, c: ParameterPath, cfg: TransportConfig = DEFAULT) -> dict:
    end = transport_state(K, f, c, cfg)
    return {d: tuple(int(k) if k >= 0 else DIAG for k in end.where[d]) for d in end.where}


def loop_permutation(
    K,
    f: Bifiltration,
    s,
    radius: float,
    basepoint=None,
    cfg: TransportConfig = DEFAULT,
    n_segments: int = 64,
    turns: int = 1,
    max_doublings: int = 6,
) -> LoopResult:
    """Permutation of the proper cornerpoints at the basepoint after one loop around ``s``.

    ``s`` is a centre (a, b) or a SingularPair. The loop is the circle of
    ``radius`` traversed counter-clockwise from ``basepoint`` (default: the
    point at angle 0), as a polygon whose segment count is doubled until the
    result agrees for two consecutive doublings.
    """
    center = getattr(s, "center", s)
    if basepoint is None:
        angle = 0.0
    else:
        dx, dy = basepoint[0] - center[0], basepoint[1] - center[1]
        if not math.isclose(math.hypot(dx, dy), radius, rel_tol=1e-9, abs_tol=1e-12):
            raise ValueError("basepoint must lie on the circle")
        angle = math.atan2(dy, dx)
    history = []
    n = n_segments
    for _ in range(max_doublings + 1):
        c = ParameterPath.circle(center, radius, n, angle, turns)
        history.append(loop_maps(K, f, c, cfg))
        if len(history) >= 3 and history[-1] == history[-2] == history[-3]:
            break
        n *= 2
    stable = len(history) >= 3 and history[-1] == history[-2] == history[-3]
    bp = c.start
    return LoopResult(history[-1], n, stable, bp, start_state(K, f, bp, cfg.p).diagram)
