"""Max-linear Bayesian networks in the min-plus (negative log) domain."""

from dataclasses import dataclass, field
import json

import numpy as np

from .errors import InvalidInterval, InvalidProbability, UnrealizableCell
from .polytrope import pseudovertices
from .rng import stream
from .tropical import DEFAULT_TOL, identity, kleene_star, min_plus_mat_vec, normalize


@dataclass(frozen=True)
class Dag:
    """Weighted DAG on nodes ``0..d-1``; key ``(j, i)`` is the edge ``j -> i``."""

    d: int
    weights: dict = field(default_factory=dict)

    def __post_init__(self):
        w = {(int(j), int(i)): float(v) for (j, i), v in dict(self.weights).items()}
        for (j, i), v in w.items():
            if j == i:
                raise ValueError(f"self-loop at node {i}")
            if not (0 <= j < self.d and 0 <= i < self.d):
                raise ValueError(f"edge {(j, i)} out of range for d={self.d}")
            if not np.isfinite(v):
                raise ValueError(f"edge {(j, i)} has non-finite weight")
        object.__setattr__(self, "weights", w)
        if find_cycle(self.d, w) is not None:
            raise ValueError("graph contains a directed cycle")

    @property
    def edges(self):
        return frozenset(self.weights)

    def matrix(self):
        """Min-plus weight matrix: ``C[i, j] = w(j -> i)``, 0 diagonal, ``inf`` elsewhere."""
        C = identity(self.d)
        for (j, i), v in self.weights.items():
            C[i, j] = v
        return C

    def relabel(self, perm):
        """Node ``v`` becomes ``perm[v]``."""
        return Dag(self.d, {(int(perm[j]), int(perm[i])): v for (j, i), v in self.weights.items()})

    @classmethod
    def complete(cls, d, weight=0.0):
        return cls(d, {(j, i): weight for i in range(d) for j in range(i)})


def find_cycle(d, edges):
    """A directed cycle as a node list, or ``None`` if ``edges`` is acyclic."""
    succ = {v: [] for v in range(d)}
    for j, i in edges:
        succ[j].append(i)
    color = [0] * d
    parent = [-1] * d
    for root in range(d):
        if color[root]:
            continue
        stack = [(root, iter(succ[root]))]
        color[root] = 1
        while stack:
            v, it = stack[-1]
            w = next(it, None)
            if w is None:
                color[v] = 2
                stack.pop()
            elif color[w] == 0:
                color[w] = 1
                parent[w] = v
                stack.append((w, iter(succ[w])))
            elif color[w] == 1:
                cycle = [v]
                while cycle[-1] != w:
                    cycle.append(parent[cycle[-1]])
                return cycle[::-1]
    return None


@dataclass(frozen=True)
class InnovationSpec:
    """Law of the i.i.d. innovations.

    Gaussian innovations are drawn directly in the min-plus domain.  Fréchet
    innovations are drawn on ``(0, inf)`` in the max-times domain and mapped
    through ``-log``.
    """

    kind: str = "gaussian"
    mean: float = 0.0
    std: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.kind not in ("gaussian", "frechet"):
            raise ValueError(f"unknown innovation kind {self.kind!r}")
        if not self.std > 0:
            raise ValueError("std must be positive")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    def draw(self, rng, size):
        if self.kind == "gaussian":
            return rng.normal(self.mean, self.std, size=size)
        # Z = E**(-1/alpha) with E ~ Exp(1) is Fréchet(alpha); return -log Z
        return np.log(rng.standard_exponential(size=size)) / self.alpha


@dataclass(frozen=True, eq=False)
class MlbnModel:
    """Model with cached Kleene star.

    ``permutation[v]`` is the observed column of node ``v``; ``None`` means
    columns follow node labels.
    """

    dag: Dag
    permutation: tuple = None

    def __post_init__(self):
        if self.permutation is not None:
            perm = tuple(int(v) for v in self.permutation)
            if sorted(perm) != list(range(self.dag.d)):
                raise ValueError("permutation must be a bijection on the nodes")
            object.__setattr__(self, "permutation", perm)
        C = self.dag.matrix()
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "C_star", kleene_star(C))

    @property
    def d(self):
        return self.dag.d

    def observed_dag(self):
        """The DAG in the labels of the observed columns."""
        return self.dag if self.permutation is None else self.dag.relabel(self.permutation)

    def observed_star(self):
        if self.permutation is None:
            return self.C_star
        p = np.asarray(self.permutation)
        out = np.empty_like(self.C_star)
        out[np.ix_(p, p)] = self.C_star
        return out

    def unpermuted(self):
        return MlbnModel(self.dag)


def random_model(d, p=1.0, tau=1.0, permute=False, rng_seed=0):
    """Random lower-triangular model: each ``j -> i`` with ``j < i`` is present
    with probability ``p`` and weighted uniformly on ``[-tau, tau]``."""
    if not 0 < p <= 1:
        raise InvalidProbability(f"edge probability must lie in (0, 1], got {p}")
    if not tau >= 0:
        raise InvalidInterval(f"tau must be nonnegative, got {tau}")
    rng = stream(rng_seed)
    weights = {}
    for i in range(d):
        for j in range(i):
            # draw both numbers always so the weight stream does not depend on p
            keep = rng.random() < p
            w = rng.uniform(-tau, tau)
            if keep:
                weights[(j, i)] = w
    perm = tuple(int(v) for v in rng.permutation(d)) if permute else None
    return MlbnModel(Dag(d, weights), perm)


def _permute_columns(X, perm):
    if perm is None:
        return X
    out = np.empty_like(X)
    out[:, list(perm)] = X
    return out


def generate_sample(model, n, innov=None, rng_seed=0):
    """``n`` observations ``x = C* ⊙ z`` with i.i.d. innovations ``z``."""
    innov = innov or InnovationSpec()
    if n < 1:
        raise ValueError("n must be positive")
    Z = innov.draw(stream(rng_seed), (n, model.d))
    return sample_from_innovations(model, Z)


def sample_from_innovations(model, Z):
    """Observations for given innovation vectors (one per row)."""
    X = min_plus_mat_vec(model.C_star, np.atleast_2d(Z))
    return normalize(_permute_columns(X, model.permutation))


def atom_sample(model, cover, rng_seed=0, tol=DEFAULT_TOL):
    """One point per cell of ``cover``, tight on every edge of its cell.

    Cells use observed column labels.  Each point is a random convex
    combination of the pseudovertices whose cells contain the requested one.
    """
    cover = [frozenset(map(tuple, c)) for c in cover]
    if not cover:
        return np.zeros((0, model.d))
    pvs = pseudovertices(model.observed_star(), tol=tol)
    rng = stream(rng_seed)
    points = []
    for cell in cover:
        hosts = [x for x, c in pvs if cell <= c]
        if not hosts:
            raise UnrealizableCell(f"no vertex of wdp(C*) is tight on {sorted(cell)}")
        w = rng.dirichlet(np.ones(len(hosts)))
        points.append(w @ np.array(hosts))
    return normalize(np.array(points))


def model_to_json(model):
    return {
        "d": model.d,
        "edges": [[j, i, w] for (j, i), w in sorted(model.dag.weights.items())],
        "permutation": None if model.permutation is None else list(model.permutation),
    }


def model_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    dag = Dag(int(obj["d"]), {(int(j), int(i)): float(w) for j, i, w in obj["edges"]})
    return MlbnModel(dag, obj.get("permutation"))
