"""Bottleneck distance and explicit matchings between persistence diagrams.

Distances use the sup-norm. A proper point (u, v) is at distance (v - u)/2
from the diagonal; points at infinity are compared by birth only and are
never matched to the diagonal.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegreeMismatch, LimitExceeded
from .persistence import Cornerpoint, PersistenceDiagram

INF = math.inf
DIAG = -1  # assignment value meaning "matched to the diagonal"


class _Diagonal:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "DIAGONAL"


DIAGONAL = _Diagonal()


def point_distance(X, Y) -> float:
    """Sup-norm distance between two cornerpoints, either of which may be ``DIAGONAL``."""
    if X is DIAGONAL and Y is DIAGONAL:
        return 0.0
    if X is not DIAGONAL and Y is not DIAGONAL and X.degree != Y.degree:
        raise DegreeMismatch(f"degrees {X.degree} and {Y.degree}")
    if X is DIAGONAL:
        X, Y = Y, X
    if Y is DIAGONAL:
        return INF if X.at_infinity else (X.death - X.birth) / 2
    if X.at_infinity and Y.at_infinity:
        return abs(X.birth - Y.birth)
    if X.at_infinity or Y.at_infinity:
        return INF
    return max(abs(X.birth - Y.birth), abs(X.death - Y.death))


def pairwise(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    if len(P) == 0 or len(Q) == 0:
        return np.zeros((len(P), len(Q)))
    return np.abs(P[:, None, :] - Q[None, :, :]).max(axis=2)


def to_diagonal(P: np.ndarray) -> np.ndarray:
    return (P[:, 1] - P[:, 0]) / 2 if len(P) else np.zeros(0)


@dataclass(frozen=True, eq=False)
class Matching:
    """Diagonal-augmented bijection between the proper points of two diagrams in one degree.

    ``assignment[i]`` is the right index matched to left point ``i`` or ``DIAG``;
    right points that no left point claims go to the diagonal. Points at
    infinity are paired by ``essential_pairs``.
    """

    degree: int
    left: np.ndarray
    right: np.ndarray
    assignment: tuple
    left_essential: np.ndarray = np.zeros(0)
    right_essential: np.ndarray = np.zeros(0)
    essential_pairs: tuple = ()

    def __post_init__(self):
        used = [j for j in self.assignment if j != DIAG]
        if len(self.assignment) != len(self.left):
            raise ValueError("assignment must cover every left point")
        if len(set(used)) != len(used) or any(not 0 <= j < len(self.right) for j in used):
            raise ValueError(f"not a bijection: {self.assignment}")

    @property
    def key(self) -> tuple:
        return self.assignment

    @property
    def pairs(self) -> list:
        """(left index or None, right index or None); None stands for the diagonal."""
        out = [(i, None if j == DIAG else j) for i, j in enumerate(self.assignment)]
        claimed = set(self.assignment)
        out += [(None, j) for j in range(len(self.right)) if j not in claimed]
        return out

    def pair_costs(self) -> list:
        out = []
        for i, j in self.pairs:
            if i is None:
                c = (self.right[j, 1] - self.right[j, 0]) / 2
            elif j is None:
                c = (self.left[i, 1] - self.left[i, 0]) / 2
            else:
                c = max(abs(self.left[i, 0] - self.right[j, 0]), abs(self.left[i, 1] - self.right[j, 1]))
            out.append(float(c))
        for i, j in self.essential_pairs:
            out.append(float(abs(self.left_essential[i] - self.right_essential[j])))
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Matching)
            and self.degree == other.degree
            and self.assignment == other.assignment
            and np.array_equal(self.left, other.left)
            and np.array_equal(self.right, other.right)
            and self.essential_pairs == other.essential_pairs
        )

    def __hash__(self):
        return hash((self.degree, self.assignment))

    def to_json(self) -> dict:
        def pt(arr, k):
            return None if k is None else [float(arr[k, 0]), float(arr[k, 1])]

        costs = self.pair_costs()
        items = [
            {"left": pt(self.left, i), "right": pt(self.right, j), "cost": c}
            for (i, j), c in zip(self.pairs, costs)
        ]
        items += [
            {"left": [float(self.left_essential[i]), "inf"], "right": [float(self.right_essential[j]), "inf"], "cost": c}
            for (i, j), c in zip(self.essential_pairs, costs[len(self.pairs):])
        ]
        return {"degree": self.degree, "pairs": items, "cost": cost(self)}


def cost(sigma: Matching) -> float:
    """Largest pair distance; the empty matching costs 0."""
    return max(sigma.pair_costs(), default=0.0)


def assignment_cost(P, Q, s) -> float:
    """Cost of assignment ``s`` between proper point arrays, without building a Matching."""
    best = 0.0
    claimed = set()
    for i, j in enumerate(s):
        if j == DIAG:
            c = (P[i, 1] - P[i, 0]) / 2
        else:
            claimed.add(j)
            c = max(abs(P[i, 0] - Q[j, 0]), abs(P[i, 1] - Q[j, 1]))
        best = max(best, c)
    for j in range(len(Q)):
        if j not in claimed:
            best = max(best, (Q[j, 1] - Q[j, 0]) / 2)
    return float(best)


def _essential(D1: PersistenceDiagram, D2: PersistenceDiagram, degree: int):
    E1, E2 = D1.essential(degree), D2.essential(degree)
    if len(E1) != len(E2):
        return INF, None
    # both sorted, so the order-preserving pairing is optimal in one dimension
    pairs = tuple((i, i) for i in range(len(E1)))
    return (float(np.abs(E1 - E2).max()) if len(E1) else 0.0), pairs


def _augmenting(adj, n_left, n_right, forced=None):
    """Size of a maximum matching (Kuhn's algorithm) on left-to-right adjacency lists."""
    match_r = [-1] * n_right

    def try_left(u, seen):
        for w in adj[u]:
            if not seen[w]:
                seen[w] = True
                if match_r[w] == -1 or try_left(match_r[w], seen):
                    match_r[w] = u
                    return True
        return False

    size = 0
    for u in range(n_left):
        if try_left(u, [False] * n_right):
            size += 1
    return size


def _feasible(C, a, b, r, fixed=None):
    """Is there an augmented perfect matching with every pair cost <= r?

    ``C`` (n x m) pairwise costs, ``a``/``b`` diagonal distances. ``fixed``
    pins left points to a right index or DIAG.
    """
    n, m = C.shape
    fixed = fixed or {}
    taken = {j for j in fixed.values() if j != DIAG}
    free_left = [i for i in range(n) if i not in fixed]
    free_right = [j for j in range(m) if j not in taken]
    # left side: free left points then one diagonal slot per free right point
    # right side: free right points then one diagonal slot per free left point
    rpos = {j: k for k, j in enumerate(free_right)}
    nl, nr = len(free_left), len(free_right)
    adj = []
    for k, i in enumerate(free_left):
        row = [rpos[j] for j in free_right if C[i, j] <= r]
        if a[i] <= r:
            row.append(nr + k)
        adj.append(row)
    for k, j in enumerate(free_right):
        row = [k] if b[j] <= r else []
        row += [nr + t for t in range(nl)]
        adj.append(row)
    return _augmenting(adj, nl + nr, nr + nl) == nl + nr


def _lexicographic(C, a, b, r):
    n, m = C.shape
    fixed = {}
    for i in range(n):
        for opt in list(range(m)) + [DIAG]:
            if opt != DIAG and (opt in fixed.values() or C[i, opt] > r):
                continue
            if opt == DIAG and a[i] > r:
                continue
            fixed[i] = opt
            if _feasible(C, a, b, r, fixed):
                break
            del fixed[i]
    return tuple(fixed[i] for i in range(n))


def proper_bottleneck(P: np.ndarray, Q: np.ndarray, with_assignment: bool = False):
    """Bottleneck distance between two proper point sets; optionally the lexicographically smallest optimal assignment."""
    C = pairwise(P, Q)
    a, b = to_diagonal(P), to_diagonal(Q)
    cand = np.unique(np.concatenate([[0.0], C.ravel(), a, b]))
    lo, hi = 0, len(cand) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _feasible(C, a, b, cand[mid]):
            hi = mid
        else:
            lo = mid + 1
    d = float(cand[lo])
    if not with_assignment:
        return d
    return d, _lexicographic(C, a, b, d)


def bottleneck(D1: PersistenceDiagram, D2: PersistenceDiagram, degree: int):
    """(d_B, optimal matching) in one degree.

    Returns ``(inf, None)`` when the numbers of points at infinity differ.
    Among optimal matchings the one with the lexicographically smallest
    assignment (right indices before the diagonal) is returned.
    """
    e, epairs = _essential(D1, D2, degree)
    if epairs is None:
        return INF, None
    P, Q = D1.proper(degree), D2.proper(degree)
    d = max(proper_bottleneck(P, Q), e)
    s = _lexicographic(pairwise(P, Q), to_diagonal(P), to_diagonal(Q), d)
    sigma = Matching(degree, P, Q, s, D1.essential(degree), D2.essential(degree), epairs)
    return d, sigma


def bottleneck_distance(D1: PersistenceDiagram, D2: PersistenceDiagram, degree: Optional[int] = None) -> float:
    """Bottleneck distance in one degree, or the maximum over all degrees."""
    degrees = [degree] if degree is not None else range(max(len(D1.proper_points), len(D2.proper_points)))
    best = 0.0
    for d in degrees:
        e, epairs = _essential(D1, D2, d)
        if epairs is None:
            return INF
        best = max(best, e, proper_bottleneck(D1.proper(d), D2.proper(d)))
    return best


def count_matchings(n: int, m: int) -> int:
    return sum(math.comb(n, k) * math.comb(m, k) * math.factorial(k) for k in range(min(n, m) + 1))


def enumerate_assignments(n: int, m: int):
    """Every partial injection from n left points into m right points, in lexicographic order."""

    def rec(i, used):
        if i == n:
            yield ()
            return
        for j in list(range(m)) + [DIAG]:
            if j != DIAG and j in used:
                continue
            for rest in rec(i + 1, used | {j} if j != DIAG else used):
                yield (j,) + rest

    yield from rec(0, frozenset())


def enumerate_matchings(D1: PersistenceDiagram, D2: PersistenceDiagram, degree: int, limit: int = 6) -> list:
    """All diagonal-augmented matchings of proper points in ``degree``.

    Points at infinity get the order-preserving pairing. Raises
    ``LimitExceeded`` when either side has more than ``limit`` proper points.
    """
    P, Q = D1.proper(degree), D2.proper(degree)
    if len(P) > limit or len(Q) > limit:
        raise LimitExceeded(f"{len(P)} x {len(Q)} points exceeds the enumeration limit {limit}")
    _, epairs = _essential(D1, D2, degree)
    E1, E2 = D1.essential(degree), D2.essential(degree)
    return [Matching(degree, P, Q, s, E1, E2, epairs or ()) for s in enumerate_assignments(len(P), len(Q))]


def neighborhood_assignments(s: tuple, m: int) -> list:
    """``s`` plus every assignment one swap, reroute or diagonal move away."""
    s = tuple(s)
    out = {s}
    n = len(s)
    free = [j for j in range(m) if j not in s]
    for i in range(n):
        for j in free + [DIAG]:
            if j != s[i]:
                out.add(s[:i] + (j,) + s[i + 1:])
        for k in range(i + 1, n):
            t = list(s)
            t[i], t[k] = t[k], t[i]
            out.add(tuple(t))
    return sorted(out)


def heuristic_matchings(D1: PersistenceDiagram, D2: PersistenceDiagram, degree: int) -> list:
    """Optimal matching plus its single-move neighbourhood; used past the enumeration limit."""
    P, Q = D1.proper(degree), D2.proper(degree)
    _, s = proper_bottleneck(P, Q, with_assignment=True)
    _, epairs = _essential(D1, D2, degree)
    E1, E2 = D1.essential(degree), D2.essential(degree)
    return [Matching(degree, P, Q, t, E1, E2, epairs or ()) for t in neighborhood_assignments(s, len(Q))]


def compose_matchings(sigma: Matching, tau: Matching) -> Matching:
    """tau after sigma: left of sigma to right of tau, through the diagonal where either side sends a point there."""
    if sigma.degree != tau.degree or not np.array_equal(sigma.right, tau.left):
        raise ValueError("matchings do not compose")
    s = tuple(DIAG if j == DIAG else tau.assignment[j] for j in sigma.assignment)
    tmap = dict(tau.essential_pairs)
    epairs = tuple(sorted((i, tmap[j]) for i, j in sigma.essential_pairs if j in tmap))
    return Matching(sigma.degree, sigma.left, tau.right, s, sigma.left_essential, tau.right_essential, epairs)
