"""Weighted graphs, Laplacians and the dense symmetric eigensolver wrapper."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateDegreeError, NormalizationError

SYMMETRY_TOL = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def check_symmetric(m, name: str = "matrix") -> np.ndarray:
    """Validate squareness and symmetry within SYMMETRY_TOL, return (M + M^T)/2."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractError(f"{name} must be square, got shape {m.shape}")
    finite = np.isfinite(m)
    if not np.array_equal(finite, finite.T):
        raise ContractError(f"{name} is not symmetric")
    diff = np.abs(np.where(finite, m, 0.0) - np.where(finite, m, 0.0).T)
    if diff.size and diff.max() > SYMMETRY_TOL:
        raise ContractError(f"{name} is not symmetric (max |M - M^T| = {diff.max():.3e})")
    with np.errstate(invalid="ignore"):
        return np.where(finite, (m + m.T) / 2, m)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph stored as a dense symmetric similarity matrix.

    Entry ``weights[u, v]`` is the similarity between nodes ``u`` and ``v``;
    zero means no edge.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = check_symmetric(self.weights, "weight matrix")
        if not np.all(np.isfinite(w)):
            raise ContractError("weights must be finite")
        if np.any(w < 0):
            raise ContractError("weights must be nonnegative")
        if np.any(np.diag(w) != 0):
            raise ContractError("weight matrix must have a zero diagonal (no self-loops)")
        object.__setattr__(self, "weights", _frozen(w))

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def edges(self) -> list[tuple[int, int, float]]:
        """Upper-triangular nonzero entries as ``(u, v, w)`` with ``u < v``."""
        iu, iv = np.nonzero(np.triu(self.weights, 1))
        return [(int(u), int(v), float(self.weights[u, v])) for u, v in zip(iu, iv)]

    def with_weight(self, u: int, v: int, w: float) -> WeightedGraph:
        m = self.weights.copy()
        m[u, v] = m[v, u] = w
        return WeightedGraph(m)

    def permuted(self, perm) -> WeightedGraph:
        """Relabel nodes so that new node ``i`` is old node ``perm[i]``."""
        perm = np.asarray(perm)
        return WeightedGraph(self.weights[np.ix_(perm, perm)])

    @classmethod
    def from_edges(cls, n: int, edges) -> WeightedGraph:
        m = np.zeros((n, n))
        for u, v, w in edges:
            m[u, v] = m[v, u] = w
        return cls(m)


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def degrees(g: WeightedGraph) -> np.ndarray:
    return g.weights.sum(axis=1)


def degree_matrix(g: WeightedGraph) -> np.ndarray:
    return np.diag(degrees(g))


def normalized_laplacian(g: WeightedGraph) -> np.ndarray:
    """``I - D^{-1/2} W D^{-1/2}``. Raises on isolated nodes."""
    d = degrees(g)
    if np.any(d <= 0):
        isolated = np.flatnonzero(d <= 0).tolist()
        raise DegenerateDegreeError(f"nodes with zero degree: {isolated}")
    s = 1.0 / np.sqrt(d)
    lap = -(s[:, None] * g.weights * s[None, :])
    np.fill_diagonal(lap, 1.0)
    return (lap + lap.T) / 2


def combinatorial_laplacian(g: WeightedGraph) -> np.ndarray:
    return degree_matrix(g) - g.weights


def eigendecompose(m) -> SpectralDecomposition:
    """Ascending eigenpairs of a symmetric matrix.

    Each eigenvector's first component above 1e-12 in magnitude is made
    positive, so repeated calls on the same input give the same basis.
    """
    m = check_symmetric(m)
    if not np.all(np.isfinite(m)):
        raise ContractError("matrix must be finite")
    vals, vecs = np.linalg.eigh(m)
    vecs = fix_signs(vecs)
    return SpectralDecomposition(_frozen(vals), _frozen(vecs))


def fix_signs(vecs: np.ndarray) -> np.ndarray:
    vecs = np.array(vecs, copy=True)
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            vecs[:, k] = -col
    return vecs


def is_connected(g: WeightedGraph) -> bool:
    return bool(np.all(reachable_from(g.weights > 0, 0)))


def reachable_from(adjacency: np.ndarray, start: int) -> np.ndarray:
    """Breadth-first reachability over a boolean adjacency matrix."""
    n = adjacency.shape[0]
    seen = np.zeros(n, dtype=bool)
    if n == 0:
        return seen
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.flatnonzero(adjacency[u] & ~seen):
            seen[v] = True
            queue.append(int(v))
    return seen


def normalize(x) -> np.ndarray:
    """Scale a signal to unit Euclidean norm."""
    x = np.asarray(x, dtype=float)
    nrm = np.linalg.norm(x)
    if nrm == 0 or not np.isfinite(nrm):
        raise NormalizationError("cannot normalize a zero or non-finite signal")
    return x / nrm


def delta(n: int, u: int) -> np.ndarray:
    x = np.zeros(n)
    x[u] = 1.0
    return x


def check_unit_norm(x, tol: float = 1e-9) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ContractError("signal must be a vector")
    nrm = np.linalg.norm(x)
    if abs(nrm - 1.0) > tol:
        raise NormalizationError(f"signal must have unit norm (got {nrm:.12g}); normalize it first")
    return x
