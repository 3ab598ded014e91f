"""Numpy implementations of the compiled kernels (same signatures)."""
import numpy as np
from scipy.linalg import solve_banded


def edge_apply(x, diag, ex, ey):
    x = np.asarray(x, dtype=np.float64)
    out = diag * x
    if ex.size:
        flux = ex * (x[:, :-1] - x[:, 1:])
        out[:, :-1] += flux
        out[:, 1:] -= flux
    if ey.size:
        flux = ey * (x[:-1, :] - x[1:, :])
        out[:-1, :] += flux
        out[1:, :] -= flux
    return out


def _jacobi(diag, ex, ey):
    d = diag.copy()
    if ex.size:
        d[:, :-1] += ex
        d[:, 1:] += ex
    if ey.size:
        d[:-1, :] += ey
        d[1:, :] += ey
    minv = np.ones_like(d)
    pos = d > 0
    minv[pos] = 1.0 / d[pos]
    return minv


def pcg(diag, ex, ey, b, x0, tol, maxiter):
    diag = np.asarray(diag, dtype=np.float64)
    x = np.array(x0, dtype=np.float64, copy=True)
    bnorm = np.sqrt(np.vdot(b, b))
    if bnorm == 0.0:
        return np.zeros_like(x), 0, 0.0
    minv = _jacobi(diag, ex, ey)
    r = b - edge_apply(x, diag, ex, ey)
    z = minv * r
    p = z.copy()
    rz = np.vdot(r, z)
    rnorm = np.sqrt(np.vdot(r, r))
    it = 0
    while rnorm > tol * bnorm and it < maxiter:
        q = edge_apply(p, diag, ex, ey)
        pq = np.vdot(p, q)
        if pq <= 0.0:
            break
        alpha = rz / pq
        x += alpha * p
        r -= alpha * q
        z = minv * r
        rz_new = np.vdot(r, z)
        p = z + (rz_new / rz) * p
        rz = rz_new
        rnorm = np.sqrt(np.vdot(r, r))
        it += 1
    return x, it, rnorm / bnorm


def tridiag_solve(diag, ew, b):
    diag = np.asarray(diag, dtype=np.float64)
    ew = np.asarray(ew, dtype=np.float64)
    n = diag.size
    ab = np.zeros((3, n))
    main = diag.copy()
    main[:-1] += ew
    main[1:] += ew
    ab[1] = main
    ab[0, 1:] = -ew
    ab[2, :-1] = -ew
    return solve_banded((1, 1), ab, np.asarray(b, dtype=np.float64))


def segment_distance(px, py, segs):
    px = np.asarray(px, dtype=np.float64)
    py = np.asarray(py, dtype=np.float64)
    best = np.full(px.shape, np.inf)
    for ax, ay, bx, by in np.asarray(segs, dtype=np.float64):
        dx, dy = bx - ax, by - ay
        ll = dx * dx + dy * dy
        if ll > 0:
            t = np.clip(((px - ax) * dx + (py - ay) * dy) / ll, 0.0, 1.0)
        else:
            t = np.zeros_like(px)
        d2 = (px - ax - t * dx) ** 2 + (py - ay - t * dy) ** 2
        np.minimum(best, d2, out=best)
    return np.sqrt(best)
