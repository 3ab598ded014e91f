"""Small planar-geometry toolkit: convex polygons, segments, 2D polynomials.

Polygons are ``(k, 2)`` float arrays with counter-clockwise vertices.
"""
import numpy as np
from numpy.polynomial import polynomial as P

EPS = 1e-12

# Gauss-Legendre nodes on [0, 1] used with the collapsed-square map for
# triangles; exact for total degree <= 2*_NGAUSS - 2.
_NGAUSS = 6
_gx, _gw = np.polynomial.legendre.leggauss(_NGAUSS)
_GX = 0.5 * (_gx + 1.0)
_GW = 0.5 * _gw


def box_polygon(x0, x1, y0, y1):
    return np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]], dtype=float)


def polygon_area(poly):
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def ensure_ccw(poly):
    poly = np.asarray(poly, dtype=float)
    return poly[::-1].copy() if polygon_area(poly) < 0 else poly


def clip_halfplane(poly, normal, offset):
    """Keep the part of ``poly`` where ``normal . x <= offset``."""
    if len(poly) == 0:
        return poly
    n = np.asarray(normal, dtype=float)
    s = poly @ n - offset
    out = []
    k = len(poly)
    for i in range(k):
        a, b = poly[i], poly[(i + 1) % k]
        sa, sb = s[i], s[(i + 1) % k]
        if sa <= EPS:
            out.append(a)
        if (sa < -EPS and sb > EPS) or (sa > EPS and sb < -EPS):
            t = sa / (sa - sb)
            out.append(a + t * (b - a))
    if len(out) < 3:
        return np.empty((0, 2))
    return np.array(out)


def halfplanes(poly):
    """Outward half-planes ``(normal, offset)`` of a CCW convex polygon."""
    d = np.roll(poly, -1, axis=0) - poly
    n = np.stack([d[:, 1], -d[:, 0]], axis=1)
    nn = np.hypot(n[:, 0], n[:, 1])
    keep = nn > EPS
    n = n[keep] / nn[keep, None]
    c = np.einsum("ij,ij->i", n, poly[keep])
    return list(zip(n, c.tolist()))


def bbox_overlap(p, q):
    """True when the bounding boxes of two polygons overlap with positive area."""
    return bool(np.all(np.minimum(p.max(0), q.max(0)) - np.maximum(p.min(0), q.min(0)) > EPS))


def intersect(p, q):
    """Intersection of two convex polygons (possibly empty)."""
    out = p
    for n, c in halfplanes(q):
        out = clip_halfplane(out, n, c)
        if len(out) == 0:
            break
    return out


def contains(poly, pts, tol=1e-12):
    """Closed containment test, ``pts`` shape ``(m, 2)``."""
    pts = np.atleast_2d(pts)
    inside = np.ones(len(pts), dtype=bool)
    for n, c in halfplanes(poly):
        inside &= pts @ n - c <= tol
    return inside


def integrate(poly, f):
    """Integrate a vectorized ``f(x, y)`` over a convex polygon."""
    if len(poly) < 3:
        return 0.0
    u, v = np.meshgrid(_GX, _GX, indexing="ij")
    w = np.outer(_GW, _GW) * (1.0 - u)
    # collapsed square: (u, v) -> barycentric (u, (1-u) v)
    b1 = u
    b2 = (1.0 - u) * v
    total = 0.0
    a = poly[0]
    for i in range(1, len(poly) - 1):
        b, c = poly[i], poly[i + 1]
        jac = abs((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
        if jac <= 0.0:
            continue
        x = a[0] + b1 * (b[0] - a[0]) + b2 * (c[0] - a[0])
        y = a[1] + b1 * (b[1] - a[1]) + b2 * (c[1] - a[1])
        total += jac * float(np.sum(w * f(x, y)))
    return total


def clip_segment(a, b, poly, tol=1e-12):
    """Parameter range ``(t0, t1)`` of segment ``a + t (b - a)`` inside ``poly``.

    Returns ``None`` when the intersection is empty or a single point.
    """
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    t0, t1 = 0.0, 1.0
    for n, c in halfplanes(poly):
        num = c - n @ a
        den = n @ d
        if abs(den) <= tol:
            if num < -tol:
                return None
            continue
        t = num / den
        if den > 0:
            t1 = min(t1, t)
        else:
            t0 = max(t0, t)
        if t1 - t0 <= tol:
            return None
    return t0, t1


def crossing_params(a, b, poly):
    """Parameters in (0, 1) where segment ``ab`` crosses edges of ``poly``."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    out = []
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        e = q - p
        den = d[0] * e[1] - d[1] * e[0]
        if abs(den) <= EPS:
            continue
        w = p - a
        t = (w[0] * e[1] - w[1] * e[0]) / den
        s = (w[0] * d[1] - w[1] * d[0]) / den
        if EPS < t < 1 - EPS and -EPS <= s <= 1 + EPS:
            out.append(t)
    return out


def point_segment_distance(px, py, a, b):
    ax, ay = a
    dx, dy = b[0] - ax, b[1] - ay
    ll = dx * dx + dy * dy
    t = np.clip(((px - ax) * dx + (py - ay) * dy) / ll, 0.0, 1.0) if ll > 0 else 0.0
    return np.hypot(px - ax - t * dx, py - ay - t * dy)


class Poly2:
    """Bivariate polynomial ``sum c[i, j] x**i y**j`` of total degree <= 3."""

    DEGREE = 3

    def __init__(self, coeffs):
        c = np.zeros((self.DEGREE + 1, self.DEGREE + 1))
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=float))
        if coeffs.shape[0] > c.shape[0] or coeffs.shape[1] > c.shape[1]:
            raise ValueError("polynomial degree exceeds 3")
        c[: coeffs.shape[0], : coeffs.shape[1]] = coeffs
        i, j = np.indices(c.shape)
        if np.any(c[i + j > self.DEGREE] != 0):
            raise ValueError("polynomial total degree exceeds 3")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite polynomial coefficient")
        self.c = c
        self._d = None

    @classmethod
    def constant(cls, value):
        return cls([[value]])

    def __call__(self, x, y):
        return P.polyval2d(x, y, self.c)

    def grad(self, x, y):
        if self._d is None:
            self._d = (P.polyder(self.c, axis=0), P.polyder(self.c, axis=1))
        return P.polyval2d(x, y, self._d[0]), P.polyval2d(x, y, self._d[1])

    def is_constant(self):
        return not np.any(self.c.ravel()[1:])

    def compose_affine(self, mat, shift):
        """Return ``q`` with ``q(x) = self(mat @ x + shift)``."""
        mat = np.asarray(mat, dtype=float)
        shift = np.asarray(shift, dtype=float)
        # fit on a unisolvent set of points; exact for degree <= 3
        idx = [(i, j) for i in range(4) for j in range(4) if i + j <= 3]
        pts = np.array([[a, b] for a in (-1.0, -0.3, 0.4, 1.0) for b in (-1.0, -0.2, 0.5, 1.0)])
        vander = np.stack([pts[:, 0] ** i * pts[:, 1] ** j for i, j in idx], axis=1)
        mapped = pts @ mat.T + shift
        vals = self(mapped[:, 0], mapped[:, 1])
        sol, *_ = np.linalg.lstsq(vander, vals, rcond=None)
        c = np.zeros((4, 4))
        for (i, j), s in zip(idx, sol):
            c[i, j] = s
        c[np.abs(c) < 1e-13 * max(1.0, np.abs(c).max())] = 0.0
        return Poly2(c)

    def __eq__(self, other):
        return isinstance(other, Poly2) and np.array_equal(self.c, other.c)

    def __repr__(self):
        return f"Poly2({self.c.tolist()})"
