"""Set covers of dual triangulations and the minimum sample size census."""

from dataclasses import dataclass, field

import numpy as np

from .errors import Degenerate, UncoverableElement
from .polytrope import Subdivision, dual_subdivision
from .rng import GREEDY_KEY, stream


@dataclass
class CoverResult:
    cells: list
    size: int
    covered: bool


def _bitmasks(sigma):
    elems = sorted(sigma.universe)
    index = {e: k for k, e in enumerate(elems)}
    cells = sigma.sorted_cells
    masks = []
    for c in cells:
        m = 0
        for e in c:
            if e in index:
                m |= 1 << index[e]
        masks.append(m)
    full = (1 << len(elems)) - 1
    covered = 0
    for m in masks:
        covered |= m
    if covered != full:
        missing = [elems[k] for k in range(len(elems)) if not covered >> k & 1]
        raise UncoverableElement(f"elements {missing} lie in no cell")
    return cells, masks, full


def _greedy_once(masks, full, rng):
    chosen = []
    uncovered = full
    while uncovered:
        gains = [bin(m & uncovered).count("1") for m in masks]
        best = max(gains)
        ties = [k for k, g in enumerate(gains) if g == best]
        k = ties[rng.integers(len(ties))] if len(ties) > 1 else ties[0]
        chosen.append(k)
        uncovered &= ~masks[k]
    return chosen


def greedy_cover(sigma, repetitions=100, rng_seed=0):
    """Randomized greedy set cover; the smallest cover over all repetitions.

    Each run repeatedly adds a cell covering the most uncovered elements,
    breaking ties uniformly at random.
    """
    cells, masks, full = _bitmasks(sigma)
    if full == 0:
        return CoverResult(cells=[], size=0, covered=True)
    rng = stream(rng_seed)
    best = None
    for _ in range(max(1, repetitions)):
        chosen = _greedy_once(masks, full, rng)
        if best is None or len(chosen) < len(best):
            best = chosen
    picked = [frozenset(map(tuple, cells[k])) for k in best]
    return CoverResult(cells=picked, size=len(picked), covered=True)


def exact_cover_cells(sigma, budget=1_000_000):
    """Minimum set cover by branch and bound, or ``None`` past ``budget`` nodes."""
    cells, masks, full = _bitmasks(sigma)
    if full == 0:
        return []
    # drop cells contained in another cell; they never help a minimum cover
    order = sorted(range(len(masks)), key=lambda k: -bin(masks[k]).count("1"))
    kept = []
    for k in order:
        if not any(masks[k] | masks[q] == masks[q] for q in kept):
            kept.append(k)
    nbits = full.bit_length()
    containing = [[k for k in kept if masks[k] >> b & 1] for b in range(nbits)]
    maxsize = max(bin(masks[k]).count("1") for k in kept)

    greedy = _greedy_once([masks[k] for k in kept], full, np.random.default_rng(0))
    best = [kept[k] for k in greedy]
    nodes = 0

    def search(uncovered, chosen):
        nonlocal best, nodes
        nodes += 1
        if nodes > budget:
            raise _Budget
        if not uncovered:
            if len(chosen) < len(best):
                best = list(chosen)
            return
        remaining = bin(uncovered).count("1")
        if len(chosen) + -(-remaining // maxsize) >= len(best):
            return
        # branch on the uncovered element with the fewest covering cells
        pivot = min(
            (b for b in range(nbits) if uncovered >> b & 1),
            key=lambda b: len(containing[b]),
        )
        options = sorted(containing[pivot], key=lambda k: -bin(masks[k] & uncovered).count("1"))
        for k in options:
            chosen.append(k)
            search(uncovered & ~masks[k], chosen)
            chosen.pop()

    try:
        search(full, [])
    except _Budget:
        return None
    return [frozenset(map(tuple, cells[k])) for k in best]


class _Budget(Exception):
    pass


def exact_cover(sigma, budget=1_000_000):
    """Exact set cover number, or ``None`` if the search exceeds ``budget``."""
    cover = exact_cover_cells(sigma, budget)
    return None if cover is None else len(cover)


def refine_check(coarse, fine):
    """Whether every cell of ``fine`` lies in some cell of ``coarse``.

    Returns ``(refines, transfer)`` where ``transfer`` maps a cover of ``fine``
    to a cover of ``coarse`` of at most the same size (``None`` when
    ``refines`` is false).
    """
    if coarse.universe != fine.universe:
        return False, None
    parent = {}
    coarse_cells = coarse.sorted_cells
    for c in fine.cells:
        host = next((frozenset(map(tuple, k)) for k in coarse_cells if c <= set(map(tuple, k))), None)
        if host is None:
            return False, None
        parent[c] = host

    def transfer(cover):
        out = []
        for c in cover:
            host = parent[frozenset(c)]
            if host not in out:
                out.append(host)
        return out

    return True, transfer


# -- census -----------------------------------------------------------------


def sample_generic_heights(d, rng, low=-1.0, high=1.0, batch=4096):
    """Lower-triangular ``C`` with i.i.d. uniform weights, conditioned on every
    constraint being facet-defining (strict triangle inequalities)."""
    rows, cols = np.tril_indices(d, -1)
    triples = [(i, j, k) for i in range(d) for k in range(i) for j in range(k + 1, i)]
    ti = np.array([t[0] for t in triples], dtype=np.int64)
    tj = np.array([t[1] for t in triples], dtype=np.int64)
    tk = np.array([t[2] for t in triples], dtype=np.int64)
    while True:
        W = rng.uniform(low, high, size=(batch, d, d))
        if triples:
            ok = np.all(W[:, ti, tk] < W[:, ti, tj] + W[:, tj, tk], axis=1)
        else:
            ok = np.ones(batch, dtype=bool)
        hits = np.flatnonzero(ok)
        if len(hits):
            C = np.full((d, d), np.inf)
            np.fill_diagonal(C, 0.0)
            C[rows, cols] = W[hits[0], rows, cols]
            return C


@dataclass
class TypeRecord:
    subdivision: Subdivision
    count_seen: int = 0
    min_cover_greedy: int = None
    min_cover_exact: int = None


@dataclass
class TypeCensus:
    d: int
    types: dict = field(default_factory=dict)
    draws: int = 0
    rejected: int = 0

    def merge(self, other):
        for key, rec in other.types.items():
            mine = self.types.get(key)
            if mine is None:
                self.types[key] = rec
            else:
                mine.count_seen += rec.count_seen
        self.draws += other.draws
        self.rejected += other.rejected
        return self

    def sorted_types(self):
        return [self.types[k] for k in sorted(self.types)]

    def cover_sizes(self, which="exact"):
        attr = "min_cover_exact" if which == "exact" else "min_cover_greedy"
        return sorted({getattr(r, attr) for r in self.types.values() if getattr(r, attr) is not None})

    def minimum_sample_size(self):
        """Empirical ``c(G)``: the largest observed set cover number."""
        sizes = self.cover_sizes("exact") or self.cover_sizes("greedy")
        return max(sizes) if sizes else None


def draw_triangulation(d, rng, low=-1.0, high=1.0, edges=None, max_tries=1000):
    """Dual triangulation of a random generic lower-triangular ``C``.

    With ``edges`` given, ``C`` is restricted to those DAG edges first.
    Returns ``(subdivision, rejected)``.
    """
    rejected = 0
    for _ in range(max_tries):
        C = sample_generic_heights(d, rng, low, high)
        if edges is not None:
            keep = np.full_like(C, np.inf)
            np.fill_diagonal(keep, 0.0)
            for j, i in edges:
                keep[i, j] = C[i, j]
            C = keep
        try:
            sigma = dual_subdivision(C)
        except Degenerate:
            rejected += 1
            continue
        return sigma, rejected
    raise Degenerate(f"no generic draw in {max_tries} tries")


def census(d, num_samples, rng_seed=0, repetitions=100, budget=1_000_000,
           edges=None, low=-1.0, high=1.0, threads=1):
    """Sample dual triangulations and record set cover numbers per type.

    Draw ``r`` uses its own random stream derived from ``(rng_seed, r)``, so
    the result does not depend on ``threads``.
    """
    def run(indices):
        part = TypeCensus(d=d)
        for r in indices:
            sigma, rej = draw_triangulation(d, stream(rng_seed, r), low, high, edges)
            part.draws += 1
            part.rejected += rej
            key = sigma.key()
            rec = part.types.get(key)
            if rec is None:
                rec = part.types[key] = TypeRecord(subdivision=sigma)
            rec.count_seen += 1
        return part

    indices = list(range(num_samples))
    if threads > 1 and num_samples > 1:
        from concurrent.futures import ThreadPoolExecutor

        chunks = [indices[k::threads] for k in range(threads)]
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(indices)]
    result = TypeCensus(d=d)
    for p in parts:
        result.merge(p)
    # covers are computed once per type, with a stream tied to the type's rank
    for rank, key in enumerate(sorted(result.types)):
        rec = result.types[key]
        rec.min_cover_greedy = greedy_cover(rec.subdivision, repetitions, (rng_seed, GREEDY_KEY, rank)).size
        rec.min_cover_exact = exact_cover(rec.subdivision, budget)
    return result
