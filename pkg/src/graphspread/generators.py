"""Graph families: fixed topologies, random weights, geometric and image graphs.

Randomness: every generator takes ``seed`` which may be an int, a
``numpy.random.SeedSequence`` or a ``numpy.random.Generator``. Trial ``i`` of
an experiment seeded with ``s`` draws from :func:`trial_rng` ``(s, i)``,
i.e. PCG64 on ``SeedSequence(s, spawn_key=(i,))``; streams of distinct trials
are independent, so trials can be run in any order or in parallel.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DisconnectedGraphError
from .graph import WeightedGraph, is_connected, reachable_from

log = logging.getLogger(__name__)

GEOMETRIC_RETRIES = 1000


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(trial,))))


def _check_n(n: int):
    if n < 2:
        raise ContractError(f"need at least 2 nodes, got {n}")


def complete_graph(n: int) -> WeightedGraph:
    _check_n(n)
    return WeightedGraph(np.ones((n, n)) - np.eye(n))


def star_graph(n: int) -> WeightedGraph:
    """Node 0 is the centre."""
    _check_n(n)
    w = np.zeros((n, n))
    w[0, 1:] = w[1:, 0] = 1.0
    return WeightedGraph(w)


def path_graph(n: int) -> WeightedGraph:
    _check_n(n)
    w = np.zeros((n, n))
    i = np.arange(n - 1)
    w[i, i + 1] = w[i + 1, i] = 1.0
    return WeightedGraph(w)


def ring_graph(n: int) -> WeightedGraph:
    _check_n(n)
    w = path_graph(n).weights.copy()
    w[0, n - 1] = w[n - 1, 0] = 1.0
    return WeightedGraph(w)


FAMILIES = {
    "complete": complete_graph,
    "star": star_graph,
    "ring": ring_graph,
    "path": path_graph,
}


def randomize_weights(g: WeightedGraph, seed=None) -> WeightedGraph:
    """Same topology, each edge weight redrawn uniformly from (0, 1)."""
    rng = np.random.default_rng(seed)
    iu, iv = np.nonzero(np.triu(g.weights, 1))
    if iu.size == 0:
        raise ContractError("graph has no edges to reweight")
    draws = rng.random(iu.size)
    while np.any(draws == 0.0):
        zero = draws == 0.0
        draws[zero] = rng.random(int(zero.sum()))
    w = np.zeros_like(g.weights)
    w[iu, iv] = w[iv, iu] = draws
    return WeightedGraph(w)


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray  # shape (n, 2), coordinates in [0, 1]

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def to_csv(self) -> str:
        rows = ["x,y"] + [f"{x:.17g},{y:.17g}" for x, y in self.points]
        return "\n".join(rows) + "\n"


def random_geometric(n: int, r: float, seed=None, max_tries: int = GEOMETRIC_RETRIES):
    """Uniform points in the unit square joined when closer than ``r``.

    Returns ``(lengths, cloud)`` where ``lengths[u, v]`` is the Euclidean
    distance divided by the largest distance over all pairs, ``inf`` for
    pairs at distance ``>= r``. Point sets are redrawn until the graph is
    connected.
    """
    _check_n(n)
    if not r > 0:
        raise ContractError(f"radius must be positive, got {r}")
    rng = np.random.default_rng(seed)
    for _ in range(max_tries):
        pts = rng.random((n, 2))
        d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        adj = d < r
        np.fill_diagonal(adj, False)
        if reachable_from(adj, 0).all():
            lengths = np.where(adj, d / d.max(), np.inf)
            np.fill_diagonal(lengths, 0.0)
            return lengths, PointCloud(pts)
    raise DisconnectedGraphError(
        f"no connected geometric graph (n={n}, r={r}): connectivity rate 0/{max_tries} draws"
    )


def gaussian_kernel(lengths, alpha: float = 1.0, beta: float = 1.0) -> WeightedGraph:
    """``W = alpha * exp(-beta * x^2)`` on every edge (finite off-diagonal length)."""
    if not alpha > 0:
        raise ContractError(f"alpha must be positive, got {alpha}")
    if beta < 0:
        raise ContractError(f"beta must be nonnegative, got {beta}")
    x = np.asarray(lengths, dtype=float)
    edge = np.isfinite(x)
    np.fill_diagonal(edge, False)
    w = np.where(edge, alpha * np.exp(-beta * np.where(edge, x, 0.0) ** 2), 0.0)
    return WeightedGraph(w)


def random_geometric_graph(n: int, r: float, alpha: float = 1.0, beta: float = 1.0, seed=None):
    """Geometric graph weighted by the Gaussian kernel: ``(W graph, lengths, cloud)``."""
    lengths, cloud = random_geometric(n, r, seed)
    return gaussian_kernel(lengths, alpha, beta), lengths, cloud


@dataclass(frozen=True, eq=False)
class GrayImage:
    width: int
    height: int
    intensities: np.ndarray  # row-major, values in [0, 1]

    def __post_init__(self):
        a = np.asarray(self.intensities, dtype=float).reshape(-1)
        if a.size != self.width * self.height:
            raise ContractError(f"{a.size} intensities for a {self.width}x{self.height} image")
        if np.any(a < 0) or np.any(a > 1):
            raise ContractError("intensities must lie in [0, 1]")
        object.__setattr__(self, "intensities", a)

    def as_array(self) -> np.ndarray:
        return self.intensities.reshape(self.height, self.width)


def image_grid_graph(img: GrayImage, alpha: float = 1.0, beta: float = 1.0) -> WeightedGraph:
    """8-neighbour pixel graph, weight ``alpha * exp(-beta * (I(u) - I(v))^2)``."""
    if img.width < 2 or img.height < 2:
        raise ContractError("image must be at least 2x2")
    h, wd = img.height, img.width
    a = img.as_array()
    idx = np.arange(h * wd).reshape(h, wd)
    w = np.zeros((h * wd, h * wd))
    # right, down, down-right, down-left
    for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
        ys = slice(0, h - dy)
        xs = slice(max(0, -dx), wd - max(0, dx))
        ys2 = slice(dy, h)
        xs2 = slice(max(0, dx), wd - max(0, -dx))
        u = idx[ys, xs].ravel()
        v = idx[ys2, xs2].ravel()
        diff = (a[ys, xs] - a[ys2, xs2]).ravel()
        w[u, v] = w[v, u] = alpha * np.exp(-beta * diff**2)
    g = WeightedGraph(w)
    assert is_connected(g)
    return g


def synthetic_image(width: int = 32, height: int = 32, pattern: str = "gradient", seed=0) -> GrayImage:
    """Test images standing in for photographs: ``gradient``, ``checker``, ``constant``, ``blobs``."""
    yy, xx = np.mgrid[0:height, 0:width]
    if pattern == "gradient":
        a = (xx + yy) / max(1, width + height - 2)
    elif pattern == "checker":
        a = ((xx + yy) % 2).astype(float)
    elif pattern == "constant":
        a = np.full((height, width), 0.5)
    elif pattern == "blobs":
        rng = np.random.default_rng(seed)
        a = np.zeros((height, width))
        for cx, cy, rad, level in zip(
            rng.random(4) * width, rng.random(4) * height, 2 + rng.random(4) * width / 4, rng.random(4)
        ):
            a[(xx - cx) ** 2 + (yy - cy) ** 2 < rad**2] = level
        a = np.clip(a + 0.05 * rng.standard_normal(a.shape), 0, 1)
    else:
        raise ContractError(f"unknown pattern {pattern!r}")
    return GrayImage(width, height, a)
