"""Node distances used by the graph spread.

Length matrices use ``np.inf`` for "no edge". Distance matrices returned by
:func:`distance_matrix` and :func:`distances` are always finite; geodesic
routines that may meet unreachable nodes return ``inf`` and leave the
decision to the caller.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import ContractError, DisconnectedGraphError
from .graph import WeightedGraph, check_symmetric, combinatorial_laplacian

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class NaiveGeodesic:
    """Shortest paths that use the similarity weights themselves as lengths."""

    def __str__(self):
        return "naive"


@dataclass(frozen=True)
class InverseSimilarityGeodesic:
    def __str__(self):
        return "invsim"


@dataclass(frozen=True)
class Diffusion:
    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ContractError(f"diffusion alpha must be positive, got {self.alpha}")

    def __str__(self):
        return f"diffusion:{self.alpha:g}"


@dataclass(frozen=True, eq=False)
class ExplicitLengths:
    """Caller-supplied edge lengths, independent of the weights."""

    lengths: np.ndarray = field(repr=False)
    label: str = "explicit"

    def __post_init__(self):
        object.__setattr__(self, "lengths", as_length_matrix(self.lengths))

    def __str__(self):
        return self.label


DistanceKind = NaiveGeodesic | InverseSimilarityGeodesic | Diffusion | ExplicitLengths


def as_length_matrix(lengths) -> np.ndarray:
    m = check_symmetric(lengths, "length matrix")
    if np.any(np.isnan(m)) or np.any(m < 0):
        raise ContractError("lengths must be nonnegative")
    m = m.copy()
    np.fill_diagonal(m, 0.0)
    m.setflags(write=False)
    return m


def naive_lengths(g: WeightedGraph) -> np.ndarray:
    """Weights read directly as lengths; absent edges become ``inf``."""
    m = np.where(g.weights > 0, g.weights, np.inf)
    np.fill_diagonal(m, 0.0)
    return m


def inverse_similarity(g: WeightedGraph) -> np.ndarray:
    """Lengths ``1/W`` on edges, ``inf`` where ``W == 0`` and ``0`` where ``W == inf``."""
    w = g.weights
    with np.errstate(divide="ignore"):
        m = np.where(w == 0, np.inf, np.where(np.isinf(w), 0.0, 1.0 / w))
    np.fill_diagonal(m, 0.0)
    return m


def geodesic_from(lengths, u0: int) -> np.ndarray:
    """Single-source shortest path lengths (Dijkstra). Unreachable nodes get ``inf``."""
    lengths = np.asarray(lengths, dtype=float)
    n = lengths.shape[0]
    if np.any(lengths < 0):
        raise ContractError("lengths must be nonnegative")
    if not 0 <= u0 < n:
        raise ContractError(f"node {u0} out of range for {n} nodes")
    neighbours = [np.flatnonzero(np.isfinite(row)) for row in lengths]
    dist = np.full(n, np.inf)
    dist[u0] = 0.0
    done = np.zeros(n, dtype=bool)
    heap = [(0.0, u0)]
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v in neighbours[u]:
            if done[v] or v == u:
                continue
            nd = d + lengths[u, v]
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, int(v)))
    return dist


def all_pairs_geodesic(lengths) -> np.ndarray:
    """All-pairs shortest paths; entries stay ``inf`` between disconnected nodes."""
    lengths = np.asarray(lengths, dtype=float)
    d = np.vstack([geodesic_from(lengths, u) for u in range(lengths.shape[0])])
    d = np.minimum(d, d.T)
    if not np.all(np.isfinite(d)):
        log.warning("all-pairs geodesic: %d unreachable pairs", int(np.sum(~reachability(d))) // 2)
    return d


def reachability(d: np.ndarray) -> np.ndarray:
    """Boolean matrix, True where a finite distance exists."""
    return np.isfinite(d)


def _diffusion_operator(g: WeightedGraph, alpha: float) -> np.ndarray:
    if not alpha > 0:
        raise ContractError(f"diffusion alpha must be positive, got {alpha}")
    a = np.eye(g.n) + alpha * combinatorial_laplacian(g)
    z = cho_solve(cho_factor(a, lower=True), np.eye(g.n))
    return (z + z.T) / 2


def diffusion_distance(g: WeightedGraph, alpha: float = 1.0) -> np.ndarray:
    """``d(u, v) = ||(I + alpha L)^{-1} (e_u - e_v)||_2`` for all pairs."""
    z = _diffusion_operator(g, alpha)
    d = np.empty((g.n, g.n))
    for u in range(g.n):
        d[u] = np.linalg.norm(z - z[:, [u]], axis=0)
    d = (d + d.T) / 2
    np.fill_diagonal(d, 0.0)
    return d


def diffusion_from(g: WeightedGraph, u0: int, alpha: float = 1.0) -> np.ndarray:
    z = _diffusion_operator(g, alpha)
    d = np.linalg.norm(z - z[:, [u0]], axis=0)
    d[u0] = 0.0
    return d


def lengths_for(g: WeightedGraph, kind: DistanceKind) -> np.ndarray:
    if isinstance(kind, NaiveGeodesic):
        return naive_lengths(g)
    if isinstance(kind, InverseSimilarityGeodesic):
        return inverse_similarity(g)
    if isinstance(kind, ExplicitLengths):
        if kind.lengths.shape != g.weights.shape:
            raise ContractError("explicit length matrix does not match the graph size")
        return kind.lengths
    raise ContractError(f"{kind} is not a geodesic distance kind")


def distances(g: WeightedGraph, kind: DistanceKind, u0: int) -> np.ndarray:
    """Distances from ``u0`` to every node under ``kind``."""
    if not 0 <= u0 < g.n:
        raise ContractError(f"node {u0} out of range for {g.n} nodes")
    if isinstance(kind, Diffusion):
        return diffusion_from(g, u0, kind.alpha)
    d = geodesic_from(lengths_for(g, kind), u0)
    if not np.all(np.isfinite(d)):
        missing = np.flatnonzero(~np.isfinite(d)).tolist()
        raise DisconnectedGraphError(f"nodes {missing} unreachable from {u0} under {kind}")
    return d


def distance_matrix(g: WeightedGraph, kind: DistanceKind) -> np.ndarray:
    if isinstance(kind, Diffusion):
        return diffusion_distance(g, kind.alpha)
    d = all_pairs_geodesic(lengths_for(g, kind))
    if not np.all(np.isfinite(d)):
        raise DisconnectedGraphError(f"graph is disconnected under {kind}")
    return d


@dataclass
class PropertyReport:
    nonnegative: bool
    zero_equivalence: bool
    monotone: bool
    modulus: float
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.nonnegative and self.zero_equivalence and self.monotone


def perturbation_change(g: WeightedGraph, kind: DistanceKind, u: int, v: int, delta: float) -> np.ndarray:
    """Entry-wise ``d(W + delta e_uv) - d(W)``."""
    before = distance_matrix(g, kind)
    after = distance_matrix(g.with_weight(u, v, g.weights[u, v] + delta), kind)
    return after - before


def check_distance_properties(
    kind: DistanceKind,
    g: WeightedGraph,
    trials: int = 32,
    perturbation: float = 0.1,
    rng=None,
    zero_tol: float = 1e-12,
    profile_tol: float = 1e-9,
    increase_tol: float = 1e-12,
) -> PropertyReport:
    """Empirically check nonnegativity, zero-distance equivalence and monotonicity.

    Monotonicity is probed by raising the weight of ``trials`` randomly chosen
    existing edges by ``perturbation``; the largest absolute change observed
    is reported as ``modulus``.
    """
    rng = np.random.default_rng(rng)
    failures = []
    d = distance_matrix(g, kind)

    p1 = bool(np.all(d >= 0))
    if not p1:
        failures.append(f"negative distance {d.min():.3e}")

    p2 = True
    n = g.n
    for u in range(n):
        for v in range(u + 1, n):
            same_profile = np.max(np.abs(d[u] - d[v])) <= profile_tol
            is_zero = d[u, v] <= zero_tol
            if is_zero and not same_profile:
                p2 = False
                failures.append(f"d({u},{v})=0 but profiles differ")
            elif same_profile and not is_zero:
                p2 = False
                failures.append(f"profiles of {u},{v} agree but d={d[u, v]:.3e}")

    p3 = True
    modulus = 0.0
    edges = g.edges()
    if edges:
        for t in range(trials):
            u, v, w = edges[rng.integers(len(edges))]
            after = distance_matrix(g.with_weight(u, v, w + perturbation), kind)
            change = after - d
            modulus = max(modulus, float(np.max(np.abs(change))))
            if change.max() > increase_tol:
                p3 = False
                failures.append(f"trial {t}: raising W[{u},{v}] increased a distance by {change.max():.3e}")
    return PropertyReport(p1, p2, p3, modulus, failures)
