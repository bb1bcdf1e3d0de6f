"""Persistence diagrams of lower-star filtrations.

``reduce`` is the production path (column reduction with a clearing pass).
``pbn_oracle``/``multiplicity_oracle``/``oracle_diagram`` evaluate persistent
Betti numbers and multiplicities directly from ranks of boundary and inclusion
matrices; they are slow and only meant for cross-checking small complexes.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from ._linalg import nullspace_mod_p, rank_mod_p
from .complex import SimplicialComplex
from .errors import InvalidWindow

INF = math.inf


@dataclass(frozen=True)
class Cornerpoint:
    degree: int
    birth: float
    death: float = INF
    multiplicity: int = 1

    @property
    def at_infinity(self) -> bool:
        return math.isinf(self.death)

    @property
    def persistence(self) -> float:
        return self.death - self.birth


def simplex_values(K: SimplicialComplex, phi) -> list:
    """Lower-star extension: each simplex takes the max of its vertex values."""
    phi = np.asarray(phi)
    return [phi[arr].max(axis=1) for arr in K.vertex_arrays]


def _sorted_rows(P):
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    if len(P) > 1:
        P = P[np.lexsort((P[:, 1], P[:, 0]))]
    return P


@dataclass(frozen=True, eq=False)
class PersistenceDiagram:
    """Per-degree multiset of proper cornerpoints and births at infinity.

    Points of multiplicity r are stored as r identical rows; rows are sorted
    lexicographically so that row indices are stable labels.
    """

    proper_points: tuple
    essential_births: tuple

    @classmethod
    def from_points(cls, proper, essential):
        top = max(list(proper) + list(essential) + [0])
        pp = tuple(_sorted_rows(proper.get(d, [])) for d in range(top + 1))
        ee = tuple(np.sort(np.asarray(essential.get(d, []), dtype=float)) for d in range(top + 1))
        return cls(pp, ee)

    @property
    def degrees(self):
        return range(len(self.proper_points))

    def proper(self, degree: int) -> np.ndarray:
        if 0 <= degree < len(self.proper_points):
            return self.proper_points[degree]
        return np.zeros((0, 2))

    def essential(self, degree: int) -> np.ndarray:
        if 0 <= degree < len(self.essential_births):
            return self.essential_births[degree]
        return np.zeros(0)

    def cornerpoints(self, degree: Optional[int] = None) -> list:
        out = []
        for d in (self.degrees if degree is None else [degree]):
            for (u, v), r in sorted(Counter(map(tuple, self.proper(d).tolist())).items()):
                out.append(Cornerpoint(d, u, v, r))
            for u, r in sorted(Counter(self.essential(d).tolist()).items()):
                out.append(Cornerpoint(d, u, INF, r))
        return out

    def scaled(self, c: float) -> "PersistenceDiagram":
        """Multiply every coordinate by ``c > 0``; points that collapse onto the diagonal are dropped."""
        return self.mapped(lambda x: c * x)

    def mapped(self, fn) -> "PersistenceDiagram":
        """Apply a nondecreasing map to every coordinate."""
        proper, essential = {}, {}
        for d in self.degrees:
            P = self.proper(d)
            Q = np.column_stack([fn(P[:, 0]), fn(P[:, 1])]) if len(P) else P
            proper[d] = Q[Q[:, 0] < Q[:, 1]] if len(Q) else Q
            essential[d] = fn(self.essential(d)) if len(self.essential(d)) else self.essential(d)
        return PersistenceDiagram.from_points(proper, essential)

    def __eq__(self, other):
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        n = max(len(self.proper_points), len(other.proper_points))
        return all(
            np.array_equal(self.proper(d), other.proper(d))
            and np.array_equal(self.essential(d), other.essential(d))
            for d in range(n)
        )

    def __repr__(self):
        parts = []
        for d in self.degrees:
            pts = [tuple(r) for r in self.proper(d).tolist()] + [(u, INF) for u in self.essential(d).tolist()]
            parts.append(f"H{d}: {pts}")
        return "PersistenceDiagram(" + "; ".join(parts) + ")"

    def n_proper(self, degree: int) -> int:
        return len(self.proper(degree))

    @cached_property
    def proper_separation(self) -> float:
        """Smallest sup-norm distance between two proper cornerpoints of equal degree (0 for multiple points)."""
        best = INF
        for d in self.degrees:
            P = self.proper(d)
            if len(P) > 1:
                dist = np.abs(P[:, None, :] - P[None, :, :]).max(axis=2)
                np.fill_diagonal(dist, INF)
                best = min(best, float(dist.min()))
        return best

    @cached_property
    def essential_separation(self) -> float:
        best = INF
        for d in self.degrees:
            E = self.essential(d)
            if len(E) > 1:
                best = min(best, float(np.diff(E).min()))
        return best

    @property
    def separation(self) -> float:
        return min(self.proper_separation, self.essential_separation)


def persistence_pairs(K: SimplicialComplex, phi, p: int = 2):
    """Reduce the filtered boundary matrix.

    Simplices are ordered by (value, dimension, index). Returns
    ``(pairs, essential, values, order)`` where ``pairs`` holds
    (degree, birth simplex, death simplex) as (dim, index) tuples and
    ``essential`` holds (degree, simplex) for unpaired creators.
    """
    vals = simplex_values(K, phi)
    dims = np.concatenate([np.full(len(v), d) for d, v in enumerate(vals)])
    local = np.concatenate([np.arange(len(v)) for v in vals])
    flat = np.concatenate(vals)
    order = np.lexsort((local, dims, flat))
    pos = np.empty(len(order), dtype=np.int64)
    pos[order] = np.arange(len(order))
    offsets = np.cumsum([0] + [len(v) for v in vals])
    # filtration position -> (dim, local index)
    where = [(int(dims[g]), int(local[g])) for g in order]

    cleared = set()
    paired_low = {}
    deaths = set()
    for d in range(K.dim, 0, -1):
        facet_pos = pos[offsets[d - 1] + K.facets[d]]  # (n_d, d+1)
        cols = sorted(range(len(vals[d])), key=lambda i: pos[offsets[d] + i])
        if p == 2:
            low_to_col = {}
            for i in cols:
                g = offsets[d] + i
                if g in cleared:
                    continue
                c = 0
                for r in facet_pos[i]:
                    c ^= 1 << int(r)
                while c:
                    low = c.bit_length() - 1
                    hit = low_to_col.get(low)
                    if hit is None:
                        break
                    c ^= hit
                if c:
                    low = c.bit_length() - 1
                    low_to_col[low] = c
                    paired_low[low] = int(pos[g])
                    cleared.add(int(order[low]))
                    deaths.add(int(pos[g]))
        else:
            low_to_col = {}
            for i in cols:
                g = offsets[d] + i
                if g in cleared:
                    continue
                c = {}
                for k, r in enumerate(facet_pos[i]):
                    c[int(r)] = (-1) ** k % p
                while c:
                    low = max(c)
                    hit = low_to_col.get(low)
                    if hit is None:
                        break
                    factor = c[low] * pow(hit[low], -1, p) % p
                    for r, x in hit.items():
                        y = (c.get(r, 0) - factor * x) % p
                        if y:
                            c[r] = y
                        else:
                            c.pop(r, None)
                if c:
                    low = max(c)
                    low_to_col[low] = c
                    paired_low[low] = int(pos[g])
                    cleared.add(int(order[low]))
                    deaths.add(int(pos[g]))

    pairs = [(where[b][0], where[b], where[dpos]) for b, dpos in sorted(paired_low.items())]
    essential = [
        (where[q][0], where[q])
        for q in range(len(order))
        if q not in paired_low and q not in deaths
    ]
    return pairs, essential, vals, order


def reduce(K: SimplicialComplex, phi, p: int = 2) -> PersistenceDiagram:
    """Persistence diagram of the lower-star filtration of ``phi`` over Z/p, degrees 0..dim K.

    Zero-persistence pairs are discarded.
    """
    pairs, essential, vals, _ = persistence_pairs(K, phi, p)
    proper = {d: [] for d in range(K.dim + 1)}
    ess = {d: [] for d in range(K.dim + 1)}
    for deg, (bd, bi), (dd, di) in pairs:
        u, v = float(vals[bd][bi]), float(vals[dd][di])
        if u < v:
            proper[deg].append((u, v))
    for deg, (sd, si) in essential:
        ess[deg].append(float(vals[sd][si]))
    return PersistenceDiagram.from_points(proper, ess)


class RankOracle:
    """Persistent Betti numbers by explicit rank computations.

    Sublevel sets are identified by their threshold; results are cached on the
    set of simplices present, so evaluating many windows on one function is cheap.
    """

    def __init__(self, K: SimplicialComplex, phi, p: int = 2):
        self.K = K
        self.p = p
        self.vals = simplex_values(K, phi)
        self.phi = np.asarray(phi, dtype=float)
        self._D = [K.boundary_matrix(d, p) for d in range(K.dim + 2)]
        self._cache = {}

    def _mask(self, d, t):
        if d > self.K.dim:
            return np.zeros(0, dtype=bool)
        return self.vals[d] <= t

    def _cycles(self, n, t):
        key = ("Z", n, self._mask(n, t).tobytes())
        if key not in self._cache:
            m = self._mask(n, t)
            if n == 0:
                Z = np.eye(len(m), dtype=np.int64)[:, m]
            else:
                Dn = self._D[n][:, m]
                ker = nullspace_mod_p(Dn, self.p)
                Z = np.zeros((len(m), ker.shape[1]), dtype=np.int64)
                Z[m] = ker
            self._cache[key] = Z
        return self._cache[key]

    def _boundaries(self, n, t):
        if n + 1 > self.K.dim:
            return np.zeros((len(self.K.simplices[n]), 0), dtype=np.int64)
        return self._D[n + 1][:, self._mask(n + 1, t)]

    def betti(self, n, u, v):
        if n < 0 or n > self.K.dim:
            return 0
        key = ("B", n, self._mask(n, u).tobytes(), self._mask(n + 1, v).tobytes() if n < self.K.dim else b"")
        if key not in self._cache:
            Z = self._cycles(n, u)
            B = self._boundaries(n, v)
            if Z.shape[1] == 0:
                r = 0
            else:
                r = rank_mod_p(np.hstack([B, Z]), self.p) - rank_mod_p(B, self.p)
            self._cache[key] = r
        return self._cache[key]

    @property
    def critical_values(self):
        return np.unique(self.phi)

    @property
    def epsilon(self) -> float:
        c = self.critical_values
        return float(np.diff(c).min()) / 4 if len(c) > 1 else 1.0


def pbn_oracle(K, phi, u: float, v: float, degree: int = 0, p: int = 2, oracle=None) -> int:
    """Rank of H_n(sublevel u) -> H_n(sublevel v)."""
    if not u < v:
        raise InvalidWindow(f"need u < v, got ({u}, {v})")
    oracle = oracle or RankOracle(K, phi, p)
    return oracle.betti(degree, u, v)


def multiplicity_oracle(K, phi, u: float, v: float, degree: int = 0, p: int = 2, oracle=None) -> int:
    """Multiplicity of (u, v) (or (u, inf)) via the four-term rank formula.

    The limit in epsilon is taken exactly: for lower-star functions the
    expression is constant for epsilon below the smallest gap between distinct
    vertex values, and a quarter of that gap is used.
    """
    oracle = oracle or RankOracle(K, phi, p)
    e = oracle.epsilon
    if math.isinf(v):
        return oracle.betti(degree, u + e, INF) - oracle.betti(degree, u - e, INF)
    if not u < v:
        raise InvalidWindow(f"need u < v, got ({u}, {v})")
    b = oracle.betti
    return (
        b(degree, u + e, v - e)
        - b(degree, u - e, v - e)
        - b(degree, u + e, v + e)
        + b(degree, u - e, v + e)
    )


def oracle_diagram(K, phi, p: int = 2) -> PersistenceDiagram:
    """Diagram assembled from multiplicities at every pair of critical values."""
    oracle = RankOracle(K, phi, p)
    crit = oracle.critical_values.tolist()
    proper = {d: [] for d in range(K.dim + 1)}
    ess = {d: [] for d in range(K.dim + 1)}
    for d in range(K.dim + 1):
        for i, u in enumerate(crit):
            r = multiplicity_oracle(K, phi, u, INF, d, p, oracle)
            ess[d].extend([u] * r)
            for v in crit[i + 1:]:
                r = multiplicity_oracle(K, phi, u, v, d, p, oracle)
                proper[d].extend([(u, v)] * r)
    return PersistenceDiagram.from_points(proper, ess)
