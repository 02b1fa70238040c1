"""Lower uncertainty curves traced with supporting lines (sandwich refinement).

For a slope ``m <= 0`` the unit vector minimising ``g - m*s`` over the
feasible set is the smallest eigenvector of ``P^2 - m*L``, where ``L`` is the
normalized Laplacian and ``P^2`` the diagonal of squared distances from the
centre node. The smallest eigenvalue is the intercept of a line that
supports the feasible region from below. Chords between known curve points
give an upper (inner) bound on the curve, supporting lines a lower (outer)
bound, and a segment is refined until the two are within ``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .distances import DistanceKind, distances
from .errors import ContractError, DegenerateSpreadError, RefinementError
from .graph import WeightedGraph, check_symmetric, degrees, normalized_laplacian

log = logging.getLogger(__name__)

MAX_DEPTH = 60
FLAT = 1e-12
# graphs up to this size solve all slopes of a refinement level in one batched call
BATCH_LIMIT = 48
BATCH_ENTRIES = 4_000_000
# larger sparse graphs use shift-invert Lanczos instead of dense solves
SPARSE_LIMIT = 128
SPARSE_DENSITY = 0.05


@dataclass(frozen=True, eq=False)
class CurvePoint:
    s: float
    g: float
    slope: float
    witness: np.ndarray


@dataclass(frozen=True, eq=False)
class UncertaintyCurve:
    points: tuple[CurvePoint, ...]
    gap: float
    u0: int
    kind: str

    @property
    def s(self) -> np.ndarray:
        return np.array([p.s for p in self.points])

    @property
    def g(self) -> np.ndarray:
        return np.array([p.g for p in self.points])

    @property
    def slopes(self) -> np.ndarray:
        return np.array([p.slope for p in self.points])

    def __len__(self):
        return len(self.points)

    def interpolate(self, s) -> np.ndarray:
        """Piecewise-linear curve value; constant beyond the last point."""
        return np.interp(s, self.s, self.g)


def _as_diag(p_squared) -> np.ndarray:
    p = np.asarray(p_squared, dtype=float)
    return np.diag(p).copy() if p.ndim == 2 else p


def _smallest_eigenspace(m: np.ndarray, tol: float):
    """Smallest eigenvalue of a symmetric matrix and a basis of its eigenspace."""
    n = m.shape[0]
    k = 2
    while True:
        k = min(k, n)
        # LAPACK MRRR restricted to the k smallest eigenpairs
        vals, vecs, _, _, info = scipy.linalg.lapack.dsyevr(m, range="I", il=1, iu=k)
        if info != 0:
            vals, vecs = scipy.linalg.eigh(m, subset_by_index=[0, k - 1])
        vals, vecs = vals[:k], vecs[:, :k]
        if k == n or vals[-1] - vals[0] > tol:
            break
        k *= 2
    count = int(np.sum(vals - vals[0] <= tol))
    return float(vals[0]), vecs[:, :count]


class _Spreads:
    """Evaluates both spreads of a signal, the spectral one in edge-difference form.

    With ``f`` the positive null vector of the Laplacian,
    ``x^T L x = sum_{u<v} c_uv (x_u/f_u - x_v/f_v)^2`` where
    ``c_uv = -L_uv f_u f_v``. Unlike the plain quadratic form this keeps full
    relative accuracy for signals close to ``f``, which is where the curve
    is steepest.
    """

    def __init__(self, lap: np.ndarray, p2: np.ndarray, null=None):
        self.lap = lap
        self.p2 = p2
        self.p2_matrix = np.diag(p2)
        self.scale = max(1.0, float(p2.max()) if p2.size else 1.0)
        if null is None:
            _, vecs = np.linalg.eigh(lap)
            null = vecs[:, 0] * np.sign(vecs[:, 0].sum())
        self.null = np.asarray(null, dtype=float)
        self.exact = bool(np.all(self.null > 0) and np.allclose(lap @ self.null, 0, atol=1e-10))
        if self.exact:
            iu, iv = np.nonzero(np.triu(lap != 0, 1))
            self.iu, self.iv = iu, iv
            self.coef = -lap[iu, iv] * self.null[iu] * self.null[iv]
        n = p2.size
        self.sparse = n > SPARSE_LIMIT and np.count_nonzero(lap) <= SPARSE_DENSITY * n * n
        if self.sparse:
            self.lap_csc = scipy.sparse.csc_matrix(lap)
            self.p2_csc = scipy.sparse.diags(p2, format="csc")

    def s(self, x: np.ndarray) -> float:
        if not self.exact:
            return float(x @ self.lap @ x)
        y = x / self.null
        d = y[self.iu] - y[self.iv]
        return float(self.coef @ (d * d))

    def g(self, x: np.ndarray) -> float:
        return float(self.p2 @ (x * x))

    def point(self, x: np.ndarray, m: float) -> CurvePoint:
        x = x / np.sqrt(x @ x)
        if x[np.argmax(np.abs(x))] < 0:
            x = -x
        return CurvePoint(self.s(x), self.g(x), float(m), x)

    def support(self, m: float) -> tuple[float, list[CurvePoint]]:
        if np.isneginf(m):
            _, basis = _smallest_eigenspace(self.lap, 1e-10 * 2.0)
            secondary = self.p2_matrix
        else:
            _, basis = _smallest_eigenspace(self.p2_matrix - m * self.lap, 1e-10 * (self.scale + 2.0 * abs(m)))
            secondary = self.lap

        if basis.shape[1] == 1:
            pts = [self.point(basis[:, 0], m)]
        else:
            _, sub = np.linalg.eigh(basis.T @ secondary @ basis)
            pts = sorted((self.point(basis @ sub[:, j], m) for j in (0, -1)), key=lambda p: p.s)
            if pts[1].s - pts[0].s <= FLAT:
                pts = pts[:1]
        if np.isneginf(m):
            # minimising g along the s = 0 face
            pts = [min(pts, key=lambda p: p.g)]
            return pts[0].g, pts
        return pts[0].g - m * pts[0].s, pts


    def _support_sparse(self, m: float) -> tuple[float, list[CurvePoint]]:
        # P^2 - mL is PSD for m <= 0, so any negative shift lies below the
        # spectrum and the two eigenvalues nearest to it are the smallest.
        # It is also a Z-matrix: the bottom eigenvector is positive, so a
        # constant start vector is never orthogonal to it.
        n = self.p2.size
        sigma = -1e-6 * (self.scale + abs(m))
        a = (self.p2_csc - m * self.lap_csc).tocsc()
        try:
            lu = scipy.sparse.linalg.splu(
                a - sigma * scipy.sparse.identity(n, format="csc"),
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options=dict(SymmetricMode=True),
            )
            inv = scipy.sparse.linalg.LinearOperator(a.shape, matvec=lu.solve, dtype=float)
            vals, vecs = scipy.sparse.linalg.eigsh(
                a, k=2, sigma=sigma, which="LM", OPinv=inv, v0=np.ones(n), tol=1e-12, ncv=12
            )
        except (scipy.sparse.linalg.ArpackError, RuntimeError):
            return self.support(m)
        order = np.argsort(vals)
        vals, vecs = vals[order], vecs[:, order]
        if vals[1] - vals[0] <= 1e-10 * (self.scale + 2.0 * abs(m)):
            return self.support(m)
        pt = self.point(vecs[:, 0], m)
        return pt.g - m * pt.s, [pt]

    def support_many(self, ms) -> list[tuple[float, list[CurvePoint]]]:
        """``support`` for several finite slopes, batched for small graphs."""
        n = self.p2.size
        if n > BATCH_LIMIT:
            one = self._support_sparse if self.sparse else self.support
            return [one(m) for m in ms]
        out = []
        chunk = max(1, BATCH_ENTRIES // (n * n))
        for i in range(0, len(ms), chunk):
            m = np.asarray(ms[i : i + chunk], dtype=float)
            vals, vecs = np.linalg.eigh(self.p2_matrix[None] - m[:, None, None] * self.lap[None])
            x = vecs[:, :, 0]
            x = x / np.linalg.norm(x, axis=1, keepdims=True)
            flip = x[np.arange(len(m)), np.argmax(np.abs(x), axis=1)] < 0
            x[flip] *= -1
            if self.exact:
                y = x / self.null
                d = y[:, self.iu] - y[:, self.iv]
                s = (d * d) @ self.coef
            else:
                s = np.einsum("bi,ij,bj->b", x, self.lap, x)
            g = (x * x) @ self.p2
            if n > 1:
                simple = vals[:, 1] - vals[:, 0] > 1e-10 * (self.scale + 2.0 * np.abs(m))
            else:
                simple = np.ones(len(m), dtype=bool)
            for j, mj in enumerate(m):
                if simple[j]:
                    pt = CurvePoint(float(s[j]), float(g[j]), float(mj), x[j])
                    out.append((pt.g - mj * pt.s, [pt]))
                else:
                    out.append(self.support(float(mj)))
        return out


def supporting_points(l_norm, p_squared, m: float, _spreads=None) -> tuple[float, list[CurvePoint]]:
    """Intercept of the supporting line with slope ``m`` and its contact points.

    Returns one point when the smallest eigenvalue is simple. Otherwise the
    contact set is a segment of the supporting line and both of its ends
    (extreme spectral spread inside the eigenspace) are returned, sorted by
    ``s``. ``m = -inf`` gives the spectral-spread-zero end of the curve.

    The intercept is evaluated as ``g - m*s`` at the first contact point
    rather than taken from the eigensolver, whose absolute error grows
    with ``|m|``.
    """
    lap = np.asarray(l_norm, dtype=float)
    p2 = _as_diag(p_squared)
    if lap.shape != (p2.size, p2.size):
        raise ContractError("Laplacian and distance matrix dimensions differ")
    if m > 0:
        raise ContractError(f"supporting slope must be <= 0, got {m}")
    return (_spreads or _Spreads(lap, p2)).support(m)


def supporting_point(l_norm, p_squared, m: float) -> CurvePoint:
    """Contact point of the supporting line with slope ``m`` (smallest ``s`` if not unique)."""
    return supporting_points(l_norm, p_squared, m)[1][0]


def trace_curve(l_norm, p_squared, tol: float = 1e-6, u0: int = 0, kind: str = "", left=None) -> UncertaintyCurve:
    """Sandwich refinement between the ``s = 0`` and ``g = 0`` ends of the curve.

    ``left`` optionally supplies the unit vector at ``s = 0`` (the first
    Laplacian eigenvector), which is known in closed form for connected graphs.
    """
    if not tol > 0:
        raise ContractError(f"tol must be positive, got {tol}")
    lap = check_symmetric(l_norm, "Laplacian")
    p2 = _as_diag(p_squared)
    if np.all(p2 <= 0):
        raise DegenerateSpreadError("all distances from the centre node are zero")
    spreads = _Spreads(lap, p2, left)

    if left is None:
        start = spreads.support(-np.inf)[1][0]
    else:
        start = spreads.point(np.asarray(left, dtype=float), -np.inf)
    # m = 0 minimises g alone; among g = 0 signals take the smallest s
    end = spreads.support(0.0)[1][0]

    accepted_gap = 0.0
    points = [start, end]
    # breadth-first: every segment of one refinement level is independent
    level = [(start, end)]
    depth = 0
    while level:
        todo = []
        for a, b in level:
            ds, dg = b.s - a.s, b.g - a.g
            # vertical only when exact: the curve leaves s = 0 with infinite
            # slope, so legitimate segments there can be far narrower than FLAT
            if ds > 0 and abs(dg) > FLAT:
                todo.append((a, b, min(dg / ds, 0.0)))
        following = []
        for (a, b, m), (lam, new) in zip(todo, spreads.support_many([t[2] for t in todo])):
            gap = (a.g - m * a.s) - lam
            if gap <= tol:
                accepted_gap = max(accepted_gap, gap)
                continue
            if depth >= MAX_DEPTH:
                raise RefinementError(
                    f"refinement depth {MAX_DEPTH} reached between s={a.s:.6g} and s={b.s:.6g} (gap {gap:.3e})"
                )
            # the segment between two contact points lies on the supporting line
            points.extend(new)
            following += [(a, new[0]), (new[-1], b)]
        level = following
        depth += 1

    points.sort(key=lambda p: p.s)
    log.debug("traced %d curve points, gap %.3e", len(points), accepted_gap)
    return UncertaintyCurve(tuple(points), accepted_gap, u0, kind)


def sandwich_curve(
    g: WeightedGraph,
    u0: int,
    kind: DistanceKind,
    tol: float = 1e-6,
    relative: bool = False,
) -> UncertaintyCurve:
    """Lower uncertainty curve of ``g`` around ``u0``.

    With ``relative=True`` the tolerance applies to the curve after
    normalization, i.e. it is scaled by the graph spread at ``s = 0``.
    """
    lap = normalized_laplacian(g)
    d = distances(g, kind, u0)
    p2 = d**2
    if np.all(p2 <= 0):
        raise DegenerateSpreadError(f"all distances from node {u0} are zero")
    f1 = np.sqrt(degrees(g))
    f1 /= np.linalg.norm(f1)
    if relative:
        tol = tol * float(np.sum(p2 * f1**2))
    return trace_curve(lap, p2, tol, u0=u0, kind=str(kind), left=f1)


def normalize_curve(c: UncertaintyCurve) -> UncertaintyCurve:
    """Scale the graph-spread axis so the curve starts at ``g = 1``."""
    if not c.points:
        raise ContractError("empty curve")
    top = c.points[0].g
    if not top > 0:
        raise DegenerateSpreadError("curve has zero graph spread at s = 0")
    pts = tuple(replace(p, g=p.g / top, slope=p.slope / top) for p in c.points)
    return replace(c, points=pts, gap=c.gap / top)


@dataclass(frozen=True, eq=False)
class MeanCurve:
    s: np.ndarray
    mean_g: np.ndarray
    stddev_g: np.ndarray
    trials: int


def mean_curve(curves, grid_size: int = 101) -> MeanCurve:
    """Point-wise mean of curves resampled on a shared uniform grid in ``s``.

    The grid spans ``[0, min_i s_max_i]``; ``stddev_g`` is the population
    standard deviation.
    """
    curves = list(curves)
    if not curves:
        raise ContractError("mean_curve needs at least one curve")
    if grid_size < 2:
        raise ContractError("grid_size must be at least 2")
    s_max = min(c.points[-1].s for c in curves)
    grid = np.linspace(0.0, s_max, grid_size)
    samples = np.vstack([c.interpolate(grid) for c in curves])
    return MeanCurve(grid, samples.mean(axis=0), samples.std(axis=0), len(curves))
