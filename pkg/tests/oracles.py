"""Reference computations that share no code with the curve tracer."""

import numpy as np


def edge_operator(weights):
    """Matrix B with B^T B equal to the normalized Laplacian, one row per edge."""
    w = np.asarray(weights)
    d = w.sum(1)
    rows = []
    for u in range(len(w)):
        for v in range(u + 1, len(w)):
            if w[u, v] > 0:
                r = np.zeros(len(w))
                r[u] = 1 / np.sqrt(d[u])
                r[v] = -1 / np.sqrt(d[v])
                rows.append(np.sqrt(w[u, v]) * r)
    return np.array(rows)


def sweep_curve(lap, p2, slopes, chunk=10_000, weights=None):
    """Contact points of supporting lines for every slope, by batched dense eigh.

    With ``weights`` the spectral spread is evaluated as ``||B x||^2``, which
    stays accurate for signals near the constant-spectrum end.
    """
    lap = np.asarray(lap)
    p2 = np.asarray(p2)
    b = None if weights is None else edge_operator(weights)
    out = []
    for i in range(0, len(slopes), chunk):
        m = np.asarray(slopes[i : i + chunk])
        mats = np.diag(p2)[None, :, :] - m[:, None, None] * lap[None, :, :]
        _, vecs = np.linalg.eigh(mats)
        x = vecs[:, :, 0]
        if b is None:
            s = np.einsum("bi,ij,bj->b", x, lap, x)
        else:
            s = np.sum((x @ b.T) ** 2, axis=1)
        g = np.einsum("bi,i->b", x**2, p2)
        out.append(np.column_stack([s, g]))
    pts = np.vstack(out)
    return pts[np.argsort(pts[:, 0])]


def log_slopes(count, lo=-8, hi=8):
    return -np.logspace(lo, hi, count)


def random_unit_signals(rng, count, n):
    x = rng.standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def spreads_of(xs, lap, p2):
    return np.einsum("bi,ij,bj->b", xs, lap, xs), xs**2 @ p2
