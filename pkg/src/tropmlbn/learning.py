"""Structure learning from the minimum bounding polytrope and atom scores."""

from dataclasses import asdict, dataclass

import numpy as np

from .errors import TooFewObservations
from .model import find_cycle
from .polytrope import as_sample, min_bounding_matrix
from .tropical import INF, restrict_to_dag

SCORE_KINDS = ("top_k", "quantile_to_mean", "upper_quantile")


@dataclass(frozen=True)
class ScoreConfig:
    kind: str = "top_k"
    k: int = 30
    r_hi: float = 0.95
    r_lo: float = 0.5

    def __post_init__(self):
        if self.kind not in SCORE_KINDS:
            raise ValueError(f"unknown scoring function {self.kind!r}")
        if self.kind == "top_k" and self.k < 2:
            raise ValueError("top_k needs k >= 2")
        if not 0 < self.r_hi < 1:
            raise ValueError("r_hi must lie in (0, 1)")
        if self.kind == "upper_quantile" and not 0 < self.r_lo < self.r_hi:
            raise ValueError("need 0 < r_lo < r_hi")

    def min_observations(self):
        return max(2, self.k) if self.kind == "top_k" else 2


def _score_column(D, cfg):
    """Scores for every column of ``D`` (observations along axis 0)."""
    n = D.shape[0]
    if cfg.kind == "top_k":
        top = -np.partition(-D, (0, cfg.k - 1), axis=0)
        return (top[0] - top[cfg.k - 1]) ** 2
    hi = np.quantile(D, cfg.r_hi, axis=0, method="linear")
    if cfg.kind == "quantile_to_mean":
        return (D.mean(axis=0) - hi) ** 2 / n
    lo = np.quantile(D, cfg.r_lo, axis=0, method="linear")
    return (hi - lo) ** 2 / n


def score_differences(S, cfg):
    """Matrix of scores ``s_ij`` for the differences ``X_i - X_j``.

    A small score means the observations pile up at the maximum, which is
    the signature of an atom and hence of an edge ``j -> i``.  Quantile
    scores divide by the sample size ``n``.
    """
    S = as_sample(S)
    n, d = S.shape
    if n < cfg.min_observations():
        raise TooFewObservations(f"{cfg.kind} needs at least {cfg.min_observations()} points, got {n}")
    scores = np.zeros((d, d))
    for i in range(d):
        scores[i] = _score_column(S[:, i, None] - S, cfg)
    np.fill_diagonal(scores, 0.0)
    return scores


@dataclass
class EstimationResult:
    C_hat: np.ndarray
    edges: frozenset
    scores: np.ndarray
    is_acyclic: bool
    cycle: list = None
    threshold: float = None
    config: ScoreConfig = None

    def to_json(self):
        return {
            "edges": [[j, i, float(self.C_hat[i, j])] for j, i in sorted(self.edges)],
            "acyclic": self.is_acyclic,
            "cycle": self.cycle,
            "scores": self.scores.tolist(),
            "config": {**(asdict(self.config) if self.config else {}), "t": self.threshold},
        }


def edges_of(C):
    """Directed edges ``(j, i)`` for the finite off-diagonal entries ``C[i, j]``."""
    mask = np.isfinite(C)
    np.fill_diagonal(mask, False)
    return frozenset((int(j), int(i)) for i, j in zip(*np.nonzero(mask)))


def calibrate_threshold(scores):
    """Exploratory threshold: the median off-diagonal score.

    Not part of the estimator itself; use only when no threshold is known.
    """
    off = ~np.eye(scores.shape[0], dtype=bool)
    return float(np.median(scores[off]))


def estimate_with_ordering(S, t, cfg=None, scores=None):
    """Estimate DAG and weights without knowing the ordering.

    Starts from the minimum bounding polytrope and, for every pair ``{i, j}``,
    drops both directions when both scores reach ``t`` and otherwise keeps the
    direction with the smaller score.  On an exact tie the edge ``i -> j``
    (``i < j``) is kept.  Cycles are reported, not repaired.
    """
    cfg = cfg or ScoreConfig()
    S = as_sample(S)
    if scores is None:
        scores = score_differences(S, cfg)
    C = min_bounding_matrix(S)
    d = C.shape[0]
    for i in range(d):
        for j in range(i + 1, d):
            s_ij, s_ji = scores[i, j], scores[j, i]
            if s_ij >= t and s_ji >= t:
                C[i, j] = C[j, i] = INF
            elif s_ij < s_ji:
                C[j, i] = INF  # j -> i
            else:
                C[i, j] = INF  # i -> j
    edges = edges_of(C)
    cycle = find_cycle(d, edges)
    return EstimationResult(
        C_hat=C,
        edges=edges,
        scores=scores,
        is_acyclic=cycle is None,
        cycle=cycle,
        threshold=float(t),
        config=cfg,
    )


def known_dag_estimate(S, G):
    """Minimum bounding polytrope restricted to the edges of a known DAG.

    No Kleene star is taken afterwards.
    """
    return restrict_to_dag(min_bounding_matrix(S), G)
