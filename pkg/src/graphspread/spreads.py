"""Graph spread, spectral spread, graph Fourier transform, p-Dirichlet form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceKind, distances
from .errors import ContractError, DomainError
from .graph import (
    SpectralDecomposition,
    WeightedGraph,
    check_unit_norm,
    eigendecompose,
    normalized_laplacian,
)


@dataclass(frozen=True)
class SpreadPair:
    spectral: float
    graph: float
    u0: int


def graph_spread(dist_from_u0, x) -> float:
    """``sum_u d(u0, u)^2 x(u)^2`` for a unit-norm signal."""
    x = check_unit_norm(x)
    d = np.asarray(dist_from_u0, dtype=float)
    if d.shape != x.shape:
        raise ContractError(f"distance vector has shape {d.shape}, signal {x.shape}")
    if not np.all(np.isfinite(d)):
        raise ContractError("distances must be finite")
    return float(np.sum(d**2 * x**2))


def gft(decomp: SpectralDecomposition, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (decomp.n,):
        raise ContractError(f"signal of length {x.shape} does not match {decomp.n} nodes")
    return decomp.eigenvectors.T @ x


def spectral_spread(decomp: SpectralDecomposition, x) -> float:
    x = check_unit_norm(x)
    xh = gft(decomp, x)
    return float(np.sum(decomp.eigenvalues * xh**2))


def spread_pair(g: WeightedGraph, kind: DistanceKind, u0: int, x) -> SpreadPair:
    d = distances(g, kind, u0)
    decomp = eigendecompose(normalized_laplacian(g))
    return SpreadPair(spectral_spread(decomp, x), graph_spread(d, x), u0)


def dirichlet_form(g: WeightedGraph, x, p: int = 2) -> float:
    """Discrete p-Dirichlet form, with the ``1/p`` power taken per node.

    For odd ``p`` a node whose inner sum is negative has no real ``1/p``
    power, which raises :class:`DomainError`.
    """
    if int(p) != p or p < 1:
        raise ContractError(f"p must be an integer >= 1, got {p}")
    p = int(p)
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ContractError(f"signal of length {x.shape} does not match {g.n} nodes")
    w = g.weights
    diff = x[None, :] - x[:, None]  # diff[u, v] = x(v) - x(u)
    inner = np.sum(np.where(w > 0, w * diff**p, 0.0), axis=1)
    if np.any(inner < 0):
        bad = np.flatnonzero(inner < 0).tolist()
        raise DomainError(f"negative inner sum at nodes {bad}; 1/{p} power undefined")
    return float(np.sum(inner ** (1.0 / p)) / p)
