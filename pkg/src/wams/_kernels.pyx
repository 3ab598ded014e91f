# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the matrix-free solvers and the distance field.

Every routine here has a numpy twin in ``_kernels_py`` with the same
signature; ``wams.kernels`` picks one at import time.
"""
import numpy as np
from libc.math cimport sqrt


cdef void _apply(const double[:, ::1] x, const double[:, ::1] diag,
                 const double[:, ::1] ex, const double[:, ::1] ey,
                 double[:, ::1] out) noexcept nogil:
    cdef Py_ssize_t ny = x.shape[0], nx = x.shape[1]
    cdef Py_ssize_t i, j
    cdef double acc, xc, w
    for j in range(ny):
        for i in range(nx):
            out[j, i] = diag[j, i] * x[j, i]
    # x-edges
    for j in range(ny):
        for i in range(nx - 1):
            w = ex[j, i] * (x[j, i] - x[j, i + 1])
            out[j, i] = out[j, i] + w
            out[j, i + 1] = out[j, i + 1] - w
    # y-edges
    for j in range(ny - 1):
        for i in range(nx):
            w = ey[j, i] * (x[j, i] - x[j + 1, i])
            out[j, i] = out[j, i] + w
            out[j + 1, i] = out[j + 1, i] - w


def edge_apply(x, diag, ex, ey):
    """Return ``diag*x + L x`` where ``L`` is the edge-weighted graph Laplacian."""
    cdef const double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef const double[:, ::1] dv = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[:, ::1] exv = np.ascontiguousarray(ex, dtype=np.float64)
    cdef const double[:, ::1] eyv = np.ascontiguousarray(ey, dtype=np.float64)
    out = np.empty_like(np.asarray(xv))
    cdef double[:, ::1] ov = out
    with nogil:
        _apply(xv, dv, exv, eyv, ov)
    return out


cdef void _jacobi(const double[:, ::1] diag, const double[:, ::1] ex,
                  const double[:, ::1] ey, double[:, ::1] minv) noexcept nogil:
    cdef Py_ssize_t ny = diag.shape[0], nx = diag.shape[1]
    cdef Py_ssize_t i, j
    cdef double d
    for j in range(ny):
        for i in range(nx):
            d = diag[j, i]
            if i > 0:
                d = d + ex[j, i - 1]
            if i < nx - 1:
                d = d + ex[j, i]
            if j > 0:
                d = d + ey[j - 1, i]
            if j < ny - 1:
                d = d + ey[j, i]
            minv[j, i] = 1.0 / d if d > 0.0 else 1.0


cdef double _dot(const double[:, ::1] a, const double[:, ::1] b) noexcept nogil:
    cdef Py_ssize_t ny = a.shape[0], nx = a.shape[1]
    cdef Py_ssize_t i, j
    cdef double s = 0.0
    for j in range(ny):
        for i in range(nx):
            s = s + a[j, i] * b[j, i]
    return s


def pcg(diag, ex, ey, b, x0, double tol, Py_ssize_t maxiter):
    """Jacobi-preconditioned conjugate gradients on the edge operator.

    Stops when ``||r|| <= tol * ||b||``. Returns ``(x, iterations, relres)``.
    """
    cdef const double[:, ::1] dv = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[:, ::1] exv = np.ascontiguousarray(ex, dtype=np.float64)
    cdef const double[:, ::1] eyv = np.ascontiguousarray(ey, dtype=np.float64)
    cdef const double[:, ::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    x_arr = np.array(x0, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] x = x_arr
    cdef Py_ssize_t ny = x.shape[0], nx = x.shape[1]
    r_arr = np.empty((ny, nx))
    z_arr = np.empty((ny, nx))
    p_arr = np.empty((ny, nx))
    q_arr = np.empty((ny, nx))
    m_arr = np.empty((ny, nx))
    cdef double[:, ::1] r = r_arr, z = z_arr, p = p_arr, q = q_arr, minv = m_arr
    cdef Py_ssize_t i, j, it = 0
    cdef double bnorm, rnorm, rz, rz_new, alpha, beta, pq, rr

    with nogil:
        bnorm = sqrt(_dot(bv, bv))
        if bnorm == 0.0:
            for j in range(ny):
                for i in range(nx):
                    x[j, i] = 0.0
            rnorm = 0.0
        else:
            _jacobi(dv, exv, eyv, minv)
            _apply(x, dv, exv, eyv, q)
            for j in range(ny):
                for i in range(nx):
                    r[j, i] = bv[j, i] - q[j, i]
                    z[j, i] = minv[j, i] * r[j, i]
                    p[j, i] = z[j, i]
            rz = _dot(r, z)
            rnorm = sqrt(_dot(r, r))
            while rnorm > tol * bnorm and it < maxiter:
                _apply(p, dv, exv, eyv, q)
                pq = _dot(p, q)
                if pq <= 0.0:
                    break
                alpha = rz / pq
                # fused update: x, r, z and both reductions in one sweep
                rz_new = 0.0
                rr = 0.0
                for j in range(ny):
                    for i in range(nx):
                        x[j, i] = x[j, i] + alpha * p[j, i]
                        r[j, i] = r[j, i] - alpha * q[j, i]
                        z[j, i] = minv[j, i] * r[j, i]
                        rz_new = rz_new + r[j, i] * z[j, i]
                        rr = rr + r[j, i] * r[j, i]
                beta = rz_new / rz
                rz = rz_new
                for j in range(ny):
                    for i in range(nx):
                        p[j, i] = z[j, i] + beta * p[j, i]
                rnorm = sqrt(rr)
                it += 1
    relres = rnorm / bnorm if bnorm > 0 else 0.0
    return x_arr, it, relres


def tridiag_solve(diag, ew, b):
    """Solve ``(diag + L) x = b`` for a 1D chain with edge weights ``ew``.

    Thomas elimination; the matrix is a weighted path Laplacian plus a
    positive diagonal, hence diagonally dominant and pivot-free.
    """
    cdef const double[::1] d = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(ew, dtype=np.float64)
    cdef const double[::1] rhs = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t n = d.shape[0]
    x_arr = np.empty(n)
    c_arr = np.empty(n)
    cdef double[::1] x = x_arr, c = c_arr
    cdef Py_ssize_t i
    cdef double main, off_lo, denom
    with nogil:
        # row i: -w[i-1] x[i-1] + (d[i] + w[i-1] + w[i]) x[i] - w[i] x[i+1]
        main = d[0] + (w[0] if n > 1 else 0.0)
        c[0] = (-w[0] / main) if n > 1 else 0.0
        x[0] = rhs[0] / main
        for i in range(1, n):
            off_lo = -w[i - 1]
            main = d[i] + w[i - 1] + (w[i] if i < n - 1 else 0.0)
            denom = main - off_lo * c[i - 1]
            c[i] = (-w[i] / denom) if i < n - 1 else 0.0
            x[i] = (rhs[i] - off_lo * x[i - 1]) / denom
        for i in range(n - 2, -1, -1):
            x[i] = x[i] - c[i] * x[i + 1]
    return x_arr


def segment_distance(px, py, segs):
    """Minimum Euclidean distance from each point to a set of segments.

    ``segs`` has rows ``(ax, ay, bx, by)``.
    """
    cdef const double[::1] xs = np.ascontiguousarray(px, dtype=np.float64)
    cdef const double[::1] ys = np.ascontiguousarray(py, dtype=np.float64)
    cdef const double[:, ::1] sg = np.ascontiguousarray(segs, dtype=np.float64)
    cdef Py_ssize_t n = xs.shape[0], m = sg.shape[0]
    out_arr = np.empty(n)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t k, s
    cdef double best, ax, ay, dx, dy, ll, t, qx, qy, dd
    with nogil:
        for k in range(n):
            best = 1e300
            for s in range(m):
                ax = sg[s, 0]
                ay = sg[s, 1]
                dx = sg[s, 2] - ax
                dy = sg[s, 3] - ay
                ll = dx * dx + dy * dy
                if ll > 0.0:
                    t = ((xs[k] - ax) * dx + (ys[k] - ay) * dy) / ll
                    if t < 0.0:
                        t = 0.0
                    elif t > 1.0:
                        t = 1.0
                else:
                    t = 0.0
                qx = xs[k] - (ax + t * dx)
                qy = ys[k] - (ay + t * dy)
                dd = qx * qx + qy * qy
                if dd < best:
                    best = dd
            out[k] = sqrt(best)
    return out_arr
