"""Explicit recovery sequences: transition profiles, 1D pairs, multi-D profile.

The 1D window is stretched by ``c = 2a`` (see :attr:`Normalization.length_scale`)
so that both normalizations spend ``(1/2) int (v0'^2 + (1 - v0)^2)`` per side.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import integrate

from . import _geometry as geo
from . import kernels
from .energy import DEFAULT_NORMALIZATION, Normalization
from .errors import DomainError, GeometryError, ValidationError
from .fields import Grid, JumpSet, PiecewiseField, ScalarField, Segment, segments_array
from .weights import WeightField


@dataclass(frozen=True)
class TransitionProfile:
    """Exponential transition ``v0(t) = (1 - e^-t) / (1 - e^-T)`` on ``[0, T]``."""

    eta: float
    T: float

    def __post_init__(self):
        if not (self.T > 0 and np.isfinite(self.T)):
            raise ValidationError(f"transition length must be positive, got {self.T}")

    def v0(self, t):
        t = np.clip(np.asarray(t, dtype=float), 0.0, self.T)
        return -np.expm1(-t) / -np.expm1(-self.T)

    def dv0(self, t):
        t = np.asarray(t, dtype=float)
        inside = (t >= 0) & (t <= self.T)
        return np.where(inside, np.exp(-np.clip(t, 0.0, self.T)) / -np.expm1(-self.T), 0.0)

    def energy(self) -> float:
        """Closed form of ``int_0^T (1 - v0)^2 + v0'^2``: ``1 + a^2 T / (1 - a)^2``, ``a = e^-T``."""
        a = np.exp(-self.T)
        return float(1.0 + a * a * self.T / (1.0 - a) ** 2)


def optimal_profile(eta: float) -> TransitionProfile:
    """Profile with ``T = 2 ln(2 / eta)`` whose energy stays within ``1 + eta``.

    The budget is confirmed by numerical quadrature before the profile is
    returned.
    """
    if not 0 < eta < 1:
        raise ValidationError(f"eta must lie in (0, 1), got {eta}")
    prof = TransitionProfile(float(eta), 2.0 * np.log(2.0 / eta))
    val, err = integrate.quad(lambda t: (1.0 - prof.v0(t)) ** 2 + prof.dv0(t) ** 2,
                              0.0, prof.T, epsabs=1e-13, epsrel=1e-13)
    if not (1.0 - 1e-9 <= val <= 1.0 + eta):
        raise ValidationError(f"profile energy {val} misses the budget [1, {1 + eta}]")
    return prof


@dataclass(frozen=True)
class RecoveryPair:
    """Sampled recovery pair together with its closed-form generators."""

    u: ScalarField
    v: ScalarField
    eps: float
    xi: float
    construction: str
    u_exact: Callable = field(repr=False, compare=False)
    v_exact: Callable = field(repr=False, compare=False)
    center: float = float("nan")

    def __post_init__(self):
        s = self.v.samples
        if s.min() < 0.0 or s.max() > 1.0:
            raise ValidationError("recovery v must take values in [0, 1]")


def _single_jump(u: PiecewiseField) -> float:
    if u.dim != 1:
        raise ValidationError("1D recovery pairs need a 1D field")
    if len(u.jumps.points) != 1:
        raise ValidationError(f"expected exactly one jump, found {len(u.jumps.points)}")
    return u.jumps.points[0]


def _default_grid(domain, eps, grid):
    if grid is not None:
        if not np.allclose(grid.bounds, domain, rtol=0, atol=1e-12):
            raise DomainError("grid bounds differ from the field domain")
        return grid
    return Grid.from_spacing(domain, eps / 20.0)


def _window_v(prof, eps, xi, c):
    def v(x, center):
        d = np.abs(np.asarray(x, dtype=float) - center) - xi
        out = np.where(d <= 0, 0.0, prof.v0(d / (c * eps)))
        return np.where(d >= c * eps * prof.T, 1.0, out)
    return v


def _eval_poly_pieces(u: PiecewiseField, x):
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    edges = [u.pieces[0][0][0]] + [b for (_, b), _ in u.pieces]
    k = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(u.pieces) - 1)
    for i, (_, c) in enumerate(u.pieces):
        m = k == i
        out[m] = P.polyval(x[m], c)
    return out


def recovery_pair_continuous(u: PiecewiseField, eps: float, profile: TransitionProfile,
                             grid: Grid = None,
                             norm: Normalization = DEFAULT_NORMALIZATION) -> RecoveryPair:
    """Recovery pair centred on the jump of ``u`` for a weight continuous there.

    ``v`` vanishes on ``|x - x0| <= xi`` (``xi = eps^2``), follows the profile
    over a window of length ``c eps T`` and equals 1 beyond it. ``u`` is
    replaced by an affine bridge on ``|x - x0| < xi / 2``.
    """
    x0 = _single_jump(u)
    return _pair(u, x0, x0, eps, profile, grid, norm, reflect=False)


def recovery_pair_jump(u: PiecewiseField, w: WeightField, eps: float,
                       profile: TransitionProfile, grid: Grid = None,
                       norm: Normalization = DEFAULT_NORMALIZATION) -> RecoveryPair:
    """Recovery pair whose transition sits entirely on the low-weight side.

    The trench is moved by ``2 xi + c eps T`` toward the side carrying
    ``omega^-`` and ``u`` is reflected across ``x0`` on the gap, so the
    relocated jump pays the lower trace. When ``x0`` is not a jump of ``w``
    the continuous construction is returned instead.
    """
    x0 = _single_jump(u)
    norm = Normalization.parse(norm)
    if w.dim != 1:
        raise ValidationError("1D recovery pairs need a 1D weight")
    try:
        w.traces(x0)
    except DomainError:
        return recovery_pair_continuous(u, eps, profile, grid, norm)
    h = 1e-9 * (w.domain[0][1] - w.domain[0][0])
    side = -1.0 if w.evaluate(x0 - h) < w.evaluate(x0 + h) else 1.0
    xi = eps * eps
    shift = 2.0 * xi + norm.length_scale * eps * profile.T
    return _pair(u, x0, x0 + side * shift, eps, profile, grid, norm, reflect=True)


def _pair(u, x0, center, eps, profile, grid, norm, reflect):
    if not eps > 0:
        raise ValidationError("epsilon must be positive")
    norm = Normalization.parse(norm)
    lo, hi = u.domain[0]
    xi = eps * eps
    c = norm.length_scale
    reach = xi + c * eps * profile.T
    if center - reach <= lo or center + reach >= hi:
        raise GeometryError(
            f"transition window [{center - reach:.6g}, {center + reach:.6g}] leaves the domain ({lo}, {hi})")
    if reflect and not lo < 2 * x0 - center < hi:
        raise GeometryError("reflected gap leaves the domain")
    vfun = _window_v(profile, eps, xi, c)
    left_val = u.limits(x0)[0]

    def u_exact(x):
        x = np.asarray(x, dtype=float)
        base = _eval_poly_pieces(u, x)
        if reflect:
            a, b = sorted((center, x0))
            gap = (x > a) & (x < b)
            base = np.where(gap, _eval_poly_pieces(u, 2 * x0 - x), base)
            # one-sided values of the relocated jump at the trench centre
            if center < x0:
                ul, ur = float(_eval_poly_pieces(u, np.array([center]))[0]), \
                    float(_eval_poly_pieces(u, np.array([2 * x0 - center]))[0])
            else:
                ul, ur = float(_eval_poly_pieces(u, np.array([2 * x0 - center]))[0]), \
                    float(_eval_poly_pieces(u, np.array([center]))[0])
        else:
            ul, ur = left_val, u.limits(x0)[1]
        bridge = np.abs(x - center) < 0.5 * xi
        lin = ul + (ur - ul) * (x - (center - 0.5 * xi)) / xi
        return np.where(bridge, lin, base)

    def v_exact(x):
        return vfun(x, center)

    g = _default_grid(u.domain, eps, grid)
    x = g.centers(0)
    tag = "jump-shifted" if reflect else "continuous"
    return RecoveryPair(ScalarField(g, u_exact(x)), ScalarField(g, v_exact(x)), float(eps), xi,
                        tag, u_exact, v_exact, float(center))


# -- multi-dimensional profile ------------------------------------------------

def tilde_v(eps: float, t):
    """Multi-D transition ``0 | 1 - exp(-(t - eps^2) / (2 eps)) | plateau``."""
    if not 0 < eps < 1:
        raise ValidationError(f"epsilon must lie in (0, 1), got {eps}")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise ValidationError("distance must be finite and nonnegative")
    e2 = eps * eps
    top = np.sqrt(eps) + e2
    inner = -np.expm1(-(np.clip(t, e2, top) - e2) / (2.0 * eps))
    out = np.where(t <= e2, 0.0, inner)
    return out if out.ndim else float(out)


def tilde_v_plateau(eps: float) -> float:
    return float(-np.expm1(-1.0 / (2.0 * np.sqrt(eps))))


def distance_field(js: JumpSet, g: Grid) -> ScalarField:
    """Euclidean distance from every cell centre to the nearest jump."""
    if js.is_empty():
        raise ValidationError("distance to an empty jump set is undefined")
    if js.dim != g.dim:
        raise ValidationError("jump set and grid dimensions differ")
    if g.dim == 1:
        x = g.centers(0)
        d = np.min(np.abs(x[:, None] - np.asarray(js.points)[None, :]), axis=1)
        return ScalarField(g, d)
    pts = g.points()
    d = kernels.segment_distance(pts[:, 0], pts[:, 1], segments_array(js))
    return ScalarField(g, d.reshape(g.shape))


def recovery_v_multiD(js: JumpSet, g: Grid, eps: float) -> ScalarField:
    """``tilde_v`` composed with the distance to ``js``."""
    d = distance_field(js, g)
    return ScalarField(g, tilde_v(eps, d.samples))


def recovery_pair_multiD(u: PiecewiseField, g: Grid, eps: float) -> RecoveryPair:
    """Sampled ``u`` paired with the distance-based profile of its jump set."""
    from .fields import sample
    v = recovery_v_multiD(u.jumps, g, eps)

    def v_exact(x):
        raise NotImplementedError("the distance profile is only available on grids")

    return RecoveryPair(sample(u, g), v, float(eps), eps * eps, "multiD-distance",
                        u.evaluate, v_exact)


# -- single-cube reflection ----------------------------------------------------

def reflection_map(center, nu, t):
    """Return ``(mat, shift)`` of the reflection across ``(x - center) . nu = t``."""
    nu = np.asarray(nu, dtype=float)
    c = np.asarray(center, dtype=float)
    mat = np.eye(2) - 2.0 * np.outer(nu, nu)
    shift = 2.0 * (t + c @ nu) * nu
    return mat, shift


def reflect_point(x, center, nu, t):
    mat, shift = reflection_map(center, nu, t)
    return np.asarray(x, dtype=float) @ mat.T + shift


def reflect_construction_2d(u: PiecewiseField, center, r: float, nu, t: float) -> PiecewiseField:
    """Relocate the jump of ``u`` inside one cube by reflecting across an offset plane.

    Inside the cube of side ``r`` centred at ``center``, on the slab between
    the planes ``s = -t`` and ``s = t`` (``s = (x - center) . nu``), the
    result takes the value of ``u`` at the mirror image across ``s = t``.
    Elsewhere it equals ``u``. A jump of ``u`` along ``s = 0`` thus moves to
    ``s = -t``.
    """
    if u.dim != 2:
        raise ValidationError("reflection construction needs a 2D field")
    nu = np.asarray(nu, dtype=float)
    if abs(np.hypot(*nu) - 1.0) > 1e-12:
        raise ValidationError("normal must be a unit vector")
    c = np.asarray(center, dtype=float)
    if not r > 0:
        raise ValidationError("cube side must be positive")
    if not 0 < abs(t) < r / 2:
        raise GeometryError(f"offset {t} must satisfy 0 < |t| < r/2 = {r / 2}")
    (xa, xb), (ya, yb) = u.domain
    half = r / 2
    cube = (c[0] - half, c[0] + half, c[1] - half, c[1] + half)
    tol = 1e-12 * max(xb - xa, yb - ya)
    if cube[0] < xa - tol or cube[1] > xb + tol or cube[2] < ya - tol or cube[3] > yb + tol:
        raise GeometryError(f"cube {cube} leaves the domain")
    cube_poly = geo.box_polygon(*cube)
    at = abs(t)
    off = c @ nu
    slab = geo.clip_halfplane(geo.clip_halfplane(cube_poly, nu, off + at), -nu, -(off - at))
    mat, shift = reflection_map(c, nu, t)
    image = geo.ensure_ccw(slab @ mat.T + shift)
    if len(geo.intersect(image, cube_poly)) == 0 or \
            abs(geo.polygon_area(geo.intersect(image, cube_poly)) - geo.polygon_area(image)) > 1e-9 * r * r:
        raise GeometryError("reflected slab leaves the cube")

    regions = _box_minus(u.domain, cube)
    regions.append(geo.clip_halfplane(cube_poly, nu, off - at))
    regions.append(geo.clip_halfplane(cube_poly, -nu, -(off + at)))
    pieces = []
    for reg in regions:
        if len(reg) == 0:
            continue
        for poly, p in u.pieces:
            cell = geo.intersect(reg, poly)
            if len(cell) and geo.polygon_area(cell) > 1e-14:
                pieces.append((cell, p))
    for poly, p in u.pieces:
        src = geo.intersect(image, poly)
        if len(src) and geo.polygon_area(src) > 1e-14:
            pieces.append((geo.ensure_ccw(src @ mat.T + shift), p.compose_affine(mat, shift)))

    def ubar_value(pts):
        pts = np.atleast_2d(pts)
        inside = geo.contains(slab, pts, tol=0.0) & (np.abs(pts @ nu - off) < at)
        q = np.where(inside[:, None], pts @ mat.T + shift, pts)
        return u.evaluate(q)

    segs = []
    # surviving jumps of u outside the slab
    for s in u.jumps.segments:
        rng = geo.clip_segment(s.start, s.end, slab)
        parts = [(0.0, 1.0)] if rng is None else [(0.0, rng[0]), (rng[1], 1.0)]
        for a, b in parts:
            if b - a > 1e-12:
                segs.append(Segment(s.point(a), s.point(b), s.normal))
    # images of jumps seen through the mirror
    for s in u.jumps.segments:
        rng = geo.clip_segment(s.start, s.end, image)
        if rng is None:
            continue
        p0 = reflect_point(s.point(rng[0]), c, nu, t)
        p1 = reflect_point(s.point(rng[1]), c, nu, t)
        n = np.asarray(s.normal) @ mat.T
        segs.append(Segment(p0, p1, n))
    # slab boundary: keep the stretches where the two sides differ
    k = len(slab)
    scale = max(xb - xa, yb - ya)
    for i in range(k):
        a, b = slab[i], slab[(i + 1) % k]
        if np.hypot(*(b - a)) <= 1e-12:
            continue
        base = Segment.through(a, b)
        ts = {0.0, 1.0}
        for poly, _ in u.pieces:
            ts.update(geo.crossing_params(a, b, poly))
            ts.update(geo.crossing_params(a, b, image))
        for s in u.jumps.segments:
            ts.update(geo.crossing_params(a, b, np.array([s.start, s.end])))
        ts = sorted(ts)
        n = np.asarray(base.normal)
        for t0, t1 in zip(ts[:-1], ts[1:]):
            if t1 - t0 <= 1e-12:
                continue
            m = base.point(0.5 * (t0 + t1))
            d = 1e-9 * scale
            probe = np.array([m - d * n, m + d * n])
            if np.any((probe < [xa, ya]) | (probe > [xb, yb])):
                continue  # on the domain boundary
            lo_v, hi_v = ubar_value(probe)
            if abs(lo_v - hi_v) > 1e-12 * max(1.0, abs(lo_v), abs(hi_v)):
                segs.append(Segment(base.point(t0), base.point(t1), n))
    return PiecewiseField.polygons(u.domain, pieces, JumpSet.of_segments(*segs))


def _box_minus(domain, cube):
    """Axis-aligned boxes tiling ``domain`` minus ``cube``."""
    (xa, xb), (ya, yb) = domain
    cx0, cx1, cy0, cy1 = cube
    out = []
    for bx in ((xa, cx0, ya, yb), (cx1, xb, ya, yb), (cx0, cx1, ya, cy0), (cx0, cx1, cy1, yb)):
        if bx[1] - bx[0] > 1e-14 and bx[3] - bx[2] > 1e-14:
            out.append(geo.box_polygon(*bx))
    return out


def changed_area(u: PiecewiseField, ubar: PiecewiseField, g: Grid) -> float:
    """Area of the cells whose centres see different values of ``u`` and ``ubar``."""
    from .fields import sample
    a = sample(u, g).samples
    b = sample(ubar, g).samples
    return float(np.count_nonzero(np.abs(a - b) > 1e-12) * g.cell_volume)
