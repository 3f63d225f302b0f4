"""Minimum bounding polytropes and the dual central subdivision.

A sample is an ``(n, d)`` float array with one point per row.  A *cell* is a
``frozenset`` of directed edges ``(j, i)``; the edge ``j -> i`` stands for the
tight constraint ``x_i - x_j = c_ij`` (vertex ``e_ji`` of the root polytope).
"""

from dataclasses import dataclass
from functools import lru_cache
import itertools
import json

import numpy as np

from .errors import Degenerate, EmptySample, PointOutside, UncoverableElement
from .tropical import DEFAULT_TOL, INF, as_matrix, kleene_star, normalize, wdp_violation


def as_sample(S):
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.size == 0 or S.shape[0] == 0:
        raise EmptySample("sample must contain at least one point")
    if not np.all(np.isfinite(S)):
        raise ValueError("sample points must have finite coordinates")
    return S


def min_bounding_matrix(S):
    """Facet matrix of the smallest polytrope containing the sample.

    Entry ``(i, j)`` is ``max_k (p_i - p_j)`` over the points of ``S``; this
    takes ``O(d^2 n)`` comparisons and the result is its own Kleene star.
    """
    S = as_sample(S)
    d = S.shape[1]
    C = np.empty((d, d))
    for i in range(d):
        C[i] = np.max(S[:, i, None] - S, axis=0)
    np.fill_diagonal(C, 0.0)
    return C


def bounding_contains(S, C, tol=DEFAULT_TOL):
    """True iff the minimum bounding polytrope of ``S`` lies in ``wdp(C)``."""
    C = as_matrix(C)
    Ct = min_bounding_matrix(S)
    mask = np.isfinite(C)
    np.fill_diagonal(mask, False)
    return bool(np.all(Ct[mask] <= C[mask] + tol))


def cell_of_point(C, p, tol=DEFAULT_TOL):
    """Set of edges ``(j, i)`` whose constraint ``p_i - p_j <= c_ij`` is tight at ``p``."""
    C = as_matrix(C)
    p = np.asarray(p, dtype=float)
    if wdp_violation(C, p) > tol:
        raise PointOutside(f"point {p} violates wdp(C) by more than {tol}")
    slack = C - (p[:, None] - p[None, :])
    tight = np.isfinite(C) & (np.abs(slack) <= tol)
    np.fill_diagonal(tight, False)
    return frozenset((int(j), int(i)) for i, j in zip(*np.nonzero(tight)))


def facet_reduce(C, tol=DEFAULT_TOL):
    """Star ``C`` and drop every constraint implied by a two-step path.

    The polyhedron is unchanged; what remains are exactly the facet-defining
    constraints of a full-dimensional ``wdp(C)``.
    """
    S = kleene_star(C)
    d = S.shape[0]
    R = S.copy()
    for i in range(d):
        for j in range(d):
            if i == j or not np.isfinite(S[i, j]):
                continue
            via = S[i, :] + S[:, j]
            via[[i, j]] = INF
            if np.any(via <= S[i, j] + tol):
                R[i, j] = INF
    return R


# -- spanning trees ---------------------------------------------------------


def _prufer_edges(seq, d):
    degree = [1] * d
    for v in seq:
        degree[v] += 1
    edges = []
    for v in seq:
        leaf = min(u for u in range(d) if degree[u] == 1)
        edges.append((min(leaf, v), max(leaf, v)))
        degree[leaf] -= 1
        degree[v] -= 1
    u, w = [x for x in range(d) if degree[x] == 1]
    edges.append((u, w))
    return edges


@lru_cache(maxsize=None)
def spanning_trees(d):
    """All ``d**(d-2)`` spanning trees of the complete graph on ``d`` nodes.

    Returns ``(pairs, trees, paths)``: ``pairs`` lists the unordered pairs
    ``(a, b)`` with ``a < b``; ``trees`` is an ``(T, d-1)`` array of pair
    indices; ``paths`` is an ``(T, d, d-1)`` int8 array with
    ``x = paths[t] @ delta`` where ``delta[e] = x_b - x_a`` for tree edge ``e``
    and the root ``x_0 = 0``.
    """
    pairs = list(itertools.combinations(range(d), 2))
    if d == 1:
        return pairs, np.zeros((1, 0), dtype=np.int64), np.zeros((1, 1, 0), dtype=np.int8)
    index = {p: k for k, p in enumerate(pairs)}
    if d == 2:
        seqs = [()]
    else:
        seqs = itertools.product(range(d), repeat=d - 2)
    trees, paths = [], []
    for seq in seqs:
        edges = _prufer_edges(seq, d)
        trees.append([index[e] for e in edges])
        adj = {v: [] for v in range(d)}
        for k, (a, b) in enumerate(edges):
            adj[a].append((b, k, 1))
            adj[b].append((a, k, -1))
        P = np.zeros((d, d - 1), dtype=np.int8)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w, k, sign in adj[v]:
                if w not in seen:
                    seen.add(w)
                    P[w] = P[v]
                    P[w, k] = sign
                    stack.append(w)
        paths.append(P)
    return pairs, np.array(trees, dtype=np.int64), np.array(paths)


def _oriented_tree_points(C, tol, chunk=1 << 15):
    """Feasible points determined by oriented spanning trees of tight constraints."""
    d = C.shape[0]
    pairs, trees, paths = spanning_trees(d)
    a = np.array([p[0] for p in pairs], dtype=np.int64)
    b = np.array([p[1] for p in pairs], dtype=np.int64)
    # delta = x_b - x_a: forward uses c_ba, backward uses -c_ab
    fwd = C[b, a] if len(pairs) else np.zeros(0)
    bwd = -C[a, b] if len(pairs) else np.zeros(0)
    usable = np.isfinite(fwd) | np.isfinite(bwd)
    keep = np.all(usable[trees], axis=1)
    trees, paths = trees[keep], paths[keep]
    if len(trees) == 0:
        return np.zeros((0, d))
    both = np.isfinite(fwd) & np.isfinite(bwd)
    fwd_only = np.where(np.isfinite(fwd), fwd, bwd)
    if not both.any():
        patterns = [None]
    else:
        patterns = range(1 << (d - 1))
    mask = np.isfinite(C)
    np.fill_diagonal(mask, False)
    ii, jj = np.nonzero(mask)
    cvals = C[ii, jj]
    found = []
    for start in range(0, len(trees), chunk):
        T = trees[start:start + chunk]
        Pm = paths[start:start + chunk].astype(float)
        for pat in patterns:
            if pat is None:
                delta, Pt = fwd_only[T], Pm
            else:
                bits = (pat >> np.arange(d - 1)) & 1
                delta = np.where(bits[None, :] == 1, bwd[T], fwd[T])
                # a single-direction edge is infinite under the wrong bit
                ok = np.all(np.isfinite(delta), axis=1)
                if not ok.any():
                    continue
                delta, Pt = delta[ok], Pm[ok]
            X = np.einsum("tve,te->tv", Pt, delta)
            if len(cvals):
                viol = np.max(X[:, ii] - X[:, jj] - cvals, axis=1)
                X = X[viol <= tol]
            found.append(X)
    return np.concatenate(found) if found else np.zeros((0, d))


def _cluster(X, tol):
    """Group rows of ``X`` equal within ``tol`` (max-norm); returns label array."""
    labels = -np.ones(len(X), dtype=np.int64)
    order = np.argsort(X[:, 1] if X.shape[1] > 1 else X[:, 0], kind="stable")
    key = X[order, 1] if X.shape[1] > 1 else X[order, 0]
    nxt = 0
    for pos, r in enumerate(order):
        if labels[r] >= 0:
            continue
        labels[r] = nxt
        q = pos + 1
        while q < len(order) and key[q] - key[pos] <= tol:
            s = order[q]
            if labels[s] < 0 and np.max(np.abs(X[s] - X[r])) <= tol:
                labels[s] = nxt
            q += 1
        nxt += 1
    return labels


def pseudovertices(C, tol=DEFAULT_TOL, allow_coarse=False):
    """Vertices of ``wdp(C)`` with their cells of tight facet constraints.

    Every spanning tree of the finite-constraint support, with each tree edge
    oriented along a finite constraint, fixes a unique normalized point by
    making its constraints tight.  The feasible ones are the vertices.

    Parameters
    ----------
    C : array_like
        ``(d, d)`` min-plus matrix.  Redundant constraints are removed first,
        so ``C`` need not be a Kleene star.
    tol : float
        Absolute tolerance for feasibility, tightness and coincidence.
    allow_coarse : bool
        Merge coinciding vertices instead of raising :class:`Degenerate`.

    Returns
    -------
    list of (ndarray, frozenset)
        Sorted by the cell's sorted edge list.
    """
    R = facet_reduce(C, tol)
    X = _oriented_tree_points(R, tol)
    if len(X) == 0:
        return []
    labels = _cluster(X, tol)
    nclusters = labels.max() + 1
    if nclusters < len(X) and not allow_coarse:
        raise Degenerate(f"{len(X) - nclusters} spanning trees share a vertex; C is not generic")
    out = []
    for k in range(nclusters):
        x = X[labels == k].mean(axis=0)
        out.append((normalize(x), cell_of_point(R, x, tol=10 * tol)))
    out.sort(key=lambda pc: sorted(pc[1]))
    return out


# -- subdivisions -----------------------------------------------------------


def _spans_tree(cell, d):
    if len(cell) != d - 1:
        return False
    parent = list(range(d))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for j, i in cell:
        rj, ri = find(j), find(i)
        if rj == ri:
            return False
        parent[rj] = ri
    return True


@dataclass(frozen=True)
class Subdivision:
    """Link of the origin in a central subdivision of a root polytope."""

    d: int
    universe: frozenset
    cells: frozenset

    def __post_init__(self):
        object.__setattr__(self, "universe", frozenset(map(tuple, self.universe)))
        object.__setattr__(self, "cells", frozenset(frozenset(map(tuple, c)) for c in self.cells))
        covered = frozenset().union(*self.cells) if self.cells else frozenset()
        if not covered >= self.universe:
            raise UncoverableElement("every universe element must lie in some cell")

    @property
    def sorted_cells(self):
        return sorted(sorted(c) for c in self.cells)

    def key(self):
        """Hashable canonical form used to identify combinatorial types."""
        return (self.d, tuple(sorted(self.universe)), tuple(tuple(c) for c in self.sorted_cells))

    def is_triangulation(self):
        return all(_spans_tree(c, self.d) for c in self.cells)

    def to_json(self):
        return {
            "d": self.d,
            "universe": [list(e) for e in sorted(self.universe)],
            "cells": [[list(e) for e in c] for c in self.sorted_cells],
        }

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(
            d=int(obj["d"]),
            universe=[tuple(e) for e in obj["universe"]],
            cells=[[tuple(e) for e in c] for c in obj["cells"]],
        )


def dual_subdivision(C, tol=DEFAULT_TOL, allow_coarse=False):
    """Dual central subdivision of ``wdp(C)`` as the link of the origin.

    Its maximal cells are the cells of the pseudovertices and its universe
    the facet-defining constraints.
    """
    C = as_matrix(C)
    pvs = pseudovertices(C, tol=tol, allow_coarse=allow_coarse)
    cells = [cell for _, cell in pvs]
    universe = frozenset().union(*cells) if cells else frozenset()
    return Subdivision(d=C.shape[0], universe=universe, cells=cells)


def spurious_facets(C_true, C_est, tol=DEFAULT_TOL):
    """Index pairs ``(i, j)`` where the estimate bounds ``x_i - x_j`` strictly
    below the Kleene star of the true matrix."""
    star = kleene_star(C_true)
    est = as_matrix(C_est)
    d = est.shape[0]
    return {
        (i, j)
        for i in range(d)
        for j in range(d)
        if i != j and np.isfinite(est[i, j]) and est[i, j] < star[i, j] - tol
    }
