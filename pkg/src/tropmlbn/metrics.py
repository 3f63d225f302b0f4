"""Structural comparison of a true DAG with an estimated directed graph."""

from dataclasses import asdict, dataclass
from fractions import Fraction

from .errors import DimensionMismatch


@dataclass(frozen=True)
class MetricReport:
    shd: int
    nshd: Fraction
    fdr: Fraction
    fpr: Fraction
    tpr: Fraction = None  # undefined when the true graph is empty but the estimate is not

    def as_floats(self):
        return {k: (None if v is None else float(v)) for k, v in asdict(self).items()}


def _edge_set(G):
    edges = G.edges if hasattr(G, "edges") else G
    return {(int(j), int(i)) for j, i in edges}


def evaluate(G_true, G_est, d=None):
    """SHD, nSHD, FDR, FPR and TPR over directed edges ``(j, i)``.

    A reversed edge counts once towards the SHD but is both a false discovery
    and a missed true edge.  Rates come back as exact fractions.
    """
    if d is None:
        d_true = getattr(G_true, "d", None)
        d_est = getattr(G_est, "d", None)
        if d_true is not None and d_est is not None and d_true != d_est:
            raise DimensionMismatch(f"graphs on {d_true} and {d_est} nodes")
        d = d_true if d_true is not None else d_est
    E, Ehat = _edge_set(G_true), _edge_set(G_est)
    if d is None:
        d = 1 + max((v for e in E | Ehat for v in e), default=-1)
    for j, i in E | Ehat:
        if j == i or not (0 <= j < d and 0 <= i < d):
            raise DimensionMismatch(f"edge {(j, i)} invalid for d={d}")

    pairs = {frozenset(e) for e in E | Ehat}
    shd = 0
    for pair in pairs:
        a, b = sorted(pair)
        status_true = ((a, b) in E, (b, a) in E)
        status_est = ((a, b) in Ehat, (b, a) in Ehat)
        shd += status_true != status_est

    false = len(Ehat - E)
    hits = len(E & Ehat)
    denom = len(E) + len(Ehat)
    nshd = Fraction(shd, denom) if denom else Fraction(0)
    fdr = Fraction(false, len(Ehat)) if Ehat else Fraction(0)
    negatives = d * (d - 1) - len(E)
    fpr = Fraction(false, negatives) if negatives else Fraction(0)
    if E:
        tpr = Fraction(hits, len(E))
    else:
        tpr = Fraction(1) if not Ehat else None
    return MetricReport(shd=shd, nshd=nshd, fdr=fdr, fpr=fpr, tpr=tpr)
