"""Min-plus arithmetic on dense numpy arrays.

Tropical matrices are plain ``float64`` arrays of shape ``(d, d)`` in which
``np.inf`` is the tropical zero (the neutral element of ``min``) and ``0`` the
tropical one.  Points of tropical affine space are length-``d`` float arrays
normalized so that the first coordinate is 0.

Node indices are 0-based.  Entry ``C[i, j]`` bounds ``x[i] - x[j]`` and is
the weight of the edge ``j -> i``.
"""

import json

import numpy as np

from .errors import DimensionMismatch, InfiniteCoordinate, NegativeCycle

INF = np.inf
DEFAULT_TOL = 1e-9


def as_matrix(C):
    """Validate and return ``C`` as a square float array (copy)."""
    C = np.array(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {C.shape}")
    if np.isnan(C).any():
        raise ValueError("tropical matrices cannot contain NaN")
    if np.isneginf(C).any():
        raise ValueError("-inf is not an element of the min-plus semiring")
    return C


def identity(d):
    """Tropical identity: zero diagonal, ``inf`` elsewhere."""
    C = np.full((d, d), INF)
    np.fill_diagonal(C, 0.0)
    return C


def normalize(x):
    """Shift ``x`` so that its first coordinate is 0."""
    x = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(x)):
        raise InfiniteCoordinate("tropical affine points must have finite coordinates")
    return x - x[..., :1]


def tropical_add(a, b):
    return np.minimum(a, b)


def tropical_mul(a, b):
    # inf + finite is inf; -inf never occurs, so no NaN can arise
    return np.add(a, b)


def min_plus_matmul(A, B):
    """Min-plus product ``(A ⊙ B)[i, j] = min_k A[i, k] + B[k, j]``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape[-1] != B.shape[0]:
        raise DimensionMismatch(f"cannot multiply {A.shape} by {B.shape}")
    return np.min(A[:, :, None] + B[None, :, :], axis=1)


def kleene_star(C):
    """Kleene star ``I ⊕ C ⊕ C² ⊕ ...`` as an all-pairs shortest path closure.

    The input diagonal is ignored (treated as 0).

    Raises
    ------
    NegativeCycle
        If some directed cycle has negative total weight.
    """
    S = as_matrix(C)
    np.fill_diagonal(S, 0.0)
    d = S.shape[0]
    for k in range(d):
        np.minimum(S, S[:, k, None] + S[None, k, :], out=S)
    if np.any(np.diag(S) < 0):
        raise NegativeCycle("the Kleene star diverges: negative cycle present")
    return S


def min_plus_mat_vec(C, z):
    """Return the normalized point ``x_i = min_j (c_ij + z_j)``.

    ``z`` may also be a 2-d array with one vector per row, in which case one
    point per row is returned.
    """
    C = as_matrix(C)
    z = np.asarray(z, dtype=float)
    if z.shape[-1] != C.shape[0]:
        raise DimensionMismatch(f"vector of length {z.shape[-1]} for a {C.shape} matrix")
    if np.any(np.all(np.isinf(C), axis=1)):
        raise InfiniteCoordinate("matrix has a row without finite entries")
    x = np.min(C + z[..., None, :], axis=-1)
    return normalize(x)


def _finite_offdiag(C):
    mask = np.isfinite(C)
    np.fill_diagonal(mask, False)
    return mask


def wdp_violation(C, P):
    """Largest violation ``max(p_i - p_j - c_ij)`` over finite constraints.

    ``P`` is a point or an ``(n, d)`` array of points; returns a scalar or an
    ``(n,)`` array.  A value ``<= 0`` means the point lies in ``wdp(C)``.
    """
    C = as_matrix(C)
    P = np.asarray(P, dtype=float)
    mask = _finite_offdiag(C)
    if not mask.any():
        return np.full(P.shape[:-1], -INF) if P.ndim > 1 else -INF
    diff = P[..., :, None] - P[..., None, :]
    slack = diff[..., mask] - C[mask]
    return slack.max(axis=-1)


def wdp_contains(C, p, tol=DEFAULT_TOL):
    """True iff ``p_i - p_j <= c_ij + tol`` for every finite off-diagonal ``c_ij``."""
    return bool(wdp_violation(C, p) <= tol)


def restrict_to_dag(C, G):
    """Keep ``c_ij`` only where ``j -> i`` is an edge of ``G``.

    ``G`` is a :class:`~tropmlbn.model.Dag` or any iterable of ``(j, i)`` pairs.
    """
    C = as_matrix(C)
    edges = G.edges if hasattr(G, "edges") else G
    out = identity(C.shape[0])
    for j, i in edges:
        out[i, j] = C[i, j]
    return out


def matrix_to_json(C):
    C = as_matrix(C)
    entries = [["inf" if np.isinf(v) else float(v) for v in row] for row in C]
    return {"d": int(C.shape[0]), "entries": entries}


def matrix_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)
    d = int(obj["d"])
    rows = [[INF if v == "inf" else float(v) for v in row] for row in obj["entries"]]
    C = as_matrix(rows)
    if C.shape != (d, d):
        raise DimensionMismatch(f"declared d={d} but entries have shape {C.shape}")
    return C
