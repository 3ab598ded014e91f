"""Diffuse and sharp energies, slicing, and the interval Hausdorff distance.

All grid sums go through ``np.sum`` on contiguous arrays, which uses
pairwise summation in a fixed order; results do not depend on threading.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from . import _geometry as geo
from .errors import (DegenerateGeometryError, DomainError, UnsupportedDirectionError,
                     ValidationError)
from .fields import PiecewiseField, ScalarField, _diff_components
from .weights import WeightField


class Normalization(enum.Enum):
    """Coefficients ``(a, b)`` of ``a eps |grad v|^2 + (b / eps) (1 - v)^2``.

    Both choices give a unit sharp jump cost.
    """

    HALF = (0.5, 0.5)
    QUARTER = (1.0, 0.25)

    @property
    def a(self) -> float:
        return self.value[0]

    @property
    def b(self) -> float:
        return self.value[1]

    @property
    def tag(self) -> str:
        return self.name.lower()

    @property
    def length_scale(self) -> float:
        """Factor ``c`` such that ``v(x) = v0(x / (c eps))`` has half-line cost
        ``(1/2) int (v0'^2 + (1 - v0)^2)``."""
        return 2.0 * self.a

    @classmethod
    def parse(cls, text) -> "Normalization":
        if isinstance(text, Normalization):
            return text
        key = str(text).strip().lower().replace(" ", "")
        aliases = {"half": cls.HALF, "1/2,1/2": cls.HALF, "0.5,0.5": cls.HALF,
                   "quarter": cls.QUARTER, "1,1/4": cls.QUARTER, "1,0.25": cls.QUARTER}
        if key not in aliases:
            raise ValidationError(
                f"normalization must be 'half' (1/2,1/2) or 'quarter' (1,1/4), got {text!r}")
        return aliases[key]


DEFAULT_NORMALIZATION = Normalization.QUARTER

CSV_HEADER = "eps,grad,phase,jump,fidelity,total,normalization"


@dataclass(frozen=True)
class EnergyReport:
    """Decomposed energy; ``total`` is the sum of the four components."""

    grad_term: float
    phase_term: float
    jump_term: float
    fidelity: float
    epsilon: Optional[float]
    normalization: Optional[str]
    total: float

    def __post_init__(self):
        parts = (self.grad_term, self.phase_term, self.jump_term, self.fidelity)
        if any(p < 0 or not np.isfinite(p) for p in parts):
            raise ValidationError(f"energy components must be finite and >= 0: {parts}")
        s = sum(parts)
        if abs(self.total - s) > 1e-12 * max(abs(s), 1.0):
            raise ValidationError("energy total differs from the sum of its components")

    @classmethod
    def make(cls, grad=0.0, phase=0.0, jump=0.0, fidelity=0.0, epsilon=None,
             normalization=None) -> "EnergyReport":
        grad, phase, jump, fidelity = (float(t) for t in (grad, phase, jump, fidelity))
        tag = normalization.tag if isinstance(normalization, Normalization) else normalization
        return cls(grad, phase, jump, fidelity, epsilon, tag, grad + phase + jump + fidelity)

    def csv_row(self) -> str:
        eps = "" if self.epsilon is None else repr(float(self.epsilon))
        vals = (self.grad_term, self.phase_term, self.jump_term, self.fidelity, self.total)
        return ",".join([eps, *(repr(float(v)) for v in vals), self.normalization or "sharp"])

    @classmethod
    def from_csv_row(cls, row: str) -> "EnergyReport":
        f = row.strip().split(",")
        if len(f) != 7:
            raise ValidationError(f"energy row needs 7 fields: {row!r}")
        eps = float(f[0]) if f[0] else None
        norm = None if f[6] == "sharp" else f[6]
        return cls(*(float(t) for t in f[1:5]), eps, norm, float(f[5]))


# -- diffuse energies --------------------------------------------------------

def _check_pair(u, v, eps):
    if u.grid != v.grid:
        raise DomainError("u and v live on different grids")
    if not eps > 0:
        raise ValidationError(f"epsilon must be positive, got {eps}")


def grad_sq(f: ScalarField) -> np.ndarray:
    """Per-cell ``|grad f|^2`` from forward differences."""
    comps = _diff_components(f.samples, f.grid)
    out = comps[0] ** 2
    for c in comps[1:]:
        out = out + c ** 2
    return out


def phase_density(v: ScalarField, omega: np.ndarray, eps: float,
                  norm: Normalization = DEFAULT_NORMALIZATION) -> np.ndarray:
    """Per-cell contribution ``[a eps |grad v|^2 + (b/eps)(1-v)^2] omega h^N``."""
    norm = Normalization.parse(norm)
    dens = norm.a * eps * grad_sq(v) + (norm.b / eps) * (1.0 - v.samples) ** 2
    return dens * omega * v.grid.cell_volume


def at_energy(u: ScalarField, v: ScalarField, w: WeightField, eps: float,
              norm: Normalization = DEFAULT_NORMALIZATION, lam: float = 0.0,
              u0: Optional[ScalarField] = None) -> EnergyReport:
    """Weighted Ambrosio-Tortorelli energy with optional L2 fidelity."""
    _check_pair(u, v, eps)
    norm = Normalization.parse(norm)
    if lam < 0:
        raise ValidationError("fidelity weight must be >= 0")
    om = w.on_grid(u.grid)
    vol = u.grid.cell_volume
    grad = np.sum(v.samples ** 2 * grad_sq(u) * om) * vol
    phase = np.sum(phase_density(v, om, eps, norm))
    fid = fidelity_term(u, u0, lam)
    return EnergyReport.make(grad, phase, 0.0, fid, eps, norm)


def fidelity_term(u: ScalarField, u0: Optional[ScalarField], lam: float) -> float:
    if lam == 0:
        return 0.0
    if u0 is None:
        raise ValidationError("a positive fidelity weight needs u0")
    if u0.grid != u.grid:
        raise DomainError("u0 lives on a different grid")
    return float(lam * np.sum((u.samples - u0.samples) ** 2) * u.grid.cell_volume)


def g_epsilon(u: ScalarField, v: ScalarField, eps: float,
              norm: Normalization = DEFAULT_NORMALIZATION, lam: float = 0.0,
              u0: Optional[ScalarField] = None, alpha: float = 1.0) -> EnergyReport:
    """Unweighted functional ``alpha * AT_eps(u, v) + lam * |u - u0|^2``.

    Kept as a separate code path from :func:`at_energy` for cross-checks.
    """
    _check_pair(u, v, eps)
    norm = Normalization.parse(norm)
    h = u.grid.spacing
    vol = float(np.prod(h))
    grad = 0.0
    dv2 = np.zeros(u.grid.shape)
    du2 = np.zeros(u.grid.shape)
    for k, hk in enumerate(h):
        ax = u.grid.dim - 1 - k
        for src, dst in ((u.samples, du2), (v.samples, dv2)):
            d = np.diff(src, axis=ax) / hk
            d = np.concatenate([d, np.take(d, [-1], axis=ax)], axis=ax)
            dst += d * d
    grad = alpha * np.sum(v.samples ** 2 * du2) * vol
    phase = alpha * np.sum(norm.a * eps * dv2 + norm.b / eps * (1.0 - v.samples) ** 2) * vol
    return EnergyReport.make(grad, phase, 0.0, fidelity_term(u, u0, lam), eps, norm)


# -- sharp energy -------------------------------------------------------------

def ms_energy(u: PiecewiseField, w: WeightField, lam: float = 0.0,
              u0: Optional[PiecewiseField] = None) -> EnergyReport:
    """Weighted Mumford-Shah energy with lower-trace jump cost.

    ``grad_term`` integrates ``|grad u|^2 omega`` exactly over pieces;
    ``jump_term`` sums the lower trace ``omega^-`` over the jumps of ``u``
    (points in 1D, arc length in 2D). Listed jump locations where ``u`` is
    actually continuous cost nothing.
    """
    if u.dim != w.dim or not np.allclose(u.domain, w.domain, rtol=0, atol=1e-12):
        raise DomainError("u and omega have different domains")
    if u.dim == 1:
        grad, jump = _ms_1d(u, w)
    else:
        grad, jump = _ms_2d(u, w)
    fid = 0.0
    if lam:
        if u0 is None:
            raise ValidationError("a positive fidelity weight needs u0")
        fid = lam * _l2_sq(u, u0)
    return EnergyReport.make(grad, 0.0, jump, fid, None, None)


def _ms_1d(u, w):
    grad_parts = []
    for (a, b), c in u.pieces:
        dq = P.polyder(c)
        if not np.any(dq):
            continue
        integrand = P.polyint(P.polymul(dq, dq))
        for box in w.boxes:
            lo, hi = max(a, box.bounds[0]), min(b, box.bounds[1])
            if hi > lo:
                grad_parts.append(box.value * (P.polyval(hi, integrand) - P.polyval(lo, integrand)))
    jump_parts = []
    for x in u.jumps.points:
        left, right = u.limits(x)
        if left == right:
            continue
        try:
            jump_parts.append(w.traces(x)[0])
        except DomainError:
            jump_parts.append(w.evaluate(x))
    return float(np.sum(grad_parts)), float(np.sum(jump_parts))


def _ms_2d(u, w):
    boxes = [geo.box_polygon(*b.bounds) for b in w.boxes]
    grad_parts = []
    for poly, p in u.pieces:
        if p.is_constant():
            continue

        def g2(x, y, p=p):
            gx, gy = p.grad(x, y)
            return gx * gx + gy * gy

        for box, bp in zip(w.boxes, boxes):
            if not geo.bbox_overlap(poly, bp):
                continue
            cell = geo.intersect(poly, bp)
            if len(cell):
                grad_parts.append(box.value * geo.integrate(cell, g2))
    jump_parts = []
    (xa, xb), (ya, yb) = w.domain
    scale = max(xb - xa, yb - ya)
    delta = 1e-9 * scale
    for seg in u.jumps.segments:
        ts = {0.0, 1.0}
        for bp in boxes:
            ts.update(geo.crossing_params(seg.start, seg.end, bp))
        ts = sorted(ts)
        n = np.asarray(seg.normal)
        spans = [(t0, t1) for t0, t1 in zip(ts[:-1], ts[1:]) if t1 - t0 > 1e-14]
        for t0, t1 in spans:
            if _on_boundary(seg, t0, t1, w.domain):
                raise DegenerateGeometryError(
                    f"jump segment {seg.start}->{seg.end} runs along the domain boundary; "
                    "the lower trace there is one-sided only")
        if not spans:
            continue
        mids = np.array([seg.point(0.5 * (t0 + t1)) for t0, t1 in spans])
        probes = np.concatenate([mids - delta * n, mids + delta * n])
        uv = u.evaluate(probes).reshape(2, -1)
        om = w._eval2(probes).reshape(2, -1)
        for k, (t0, t1) in enumerate(spans):
            if uv[0, k] == uv[1, k]:
                continue
            jump_parts.append(seg.length * (t1 - t0) * float(min(om[0, k], om[1, k])))
    return float(np.sum(grad_parts)), float(np.sum(jump_parts))


def _on_boundary(seg, t0, t1, domain):
    (xa, xb), (ya, yb) = domain
    tol = 1e-12 * max(xb - xa, yb - ya)
    p, q = seg.point(t0), seg.point(t1)
    for k, (lo, hi) in enumerate(domain):
        for edge in (lo, hi):
            if abs(p[k] - edge) <= tol and abs(q[k] - edge) <= tol:
                return True
    return False


def _l2_sq(u, u0):
    if u0.dim != u.dim:
        raise DomainError("u0 dimension differs from u")
    parts = []
    if u.dim == 1:
        for (a, b), c in u.pieces:
            for (a0, b0), c0 in u0.pieces:
                lo, hi = max(a, a0), min(b, b0)
                if hi <= lo:
                    continue
                d = P.polysub(c, c0)
                q = P.polyint(P.polymul(d, d))
                parts.append(P.polyval(hi, q) - P.polyval(lo, q))
    else:
        for poly, p in u.pieces:
            for poly0, p0 in u0.pieces:
                cell = geo.intersect(poly, poly0)
                if len(cell):
                    parts.append(geo.integrate(cell, lambda x, y, p=p, p0=p0: (p(x, y) - p0(x, y)) ** 2))
    return float(np.sum(parts))


# -- slicing ------------------------------------------------------------------

_E1 = np.array([1.0, 0.0])
_E2 = np.array([0.0, 1.0])


def slice_restrict(f: ScalarField, nu, offset: float):
    """Samples of ``t -> f(x + t nu)`` along the grid line through ``x``.

    ``offset`` is the coordinate of ``x`` on the hyperplane orthogonal to
    ``nu`` (measured along ``nu`` rotated by +90 degrees; for ``e1`` this is
    ``y``, for ``e2`` it is ``-x``). Supported directions are the axes and,
    on square cells, the diagonals. Returns ``(samples, spacing)``.
    """
    if f.grid.dim != 2:
        raise ValidationError("slicing needs a 2D field")
    nu = np.asarray(nu, dtype=float)
    if abs(np.hypot(*nu) - 1.0) > 1e-12:
        raise ValidationError("direction must be a unit vector")
    hx, hy = f.grid.spacing
    axis_dir = np.isclose(np.abs(nu), 1.0, atol=1e-12).any()
    diag_dir = np.allclose(np.abs(nu), np.sqrt(0.5), atol=1e-12)
    if not (axis_dir or (diag_dir and abs(hx - hy) <= 1e-12 * hx)):
        raise UnsupportedDirectionError(
            f"direction {tuple(nu)} is not an axis or (on square cells) a diagonal")
    perp = np.array([-nu[1], nu[0]])
    x, y = f.grid.coords()
    s = x * perp[0] + y * perp[1]
    step = hy if abs(nu[0]) == 1 else hx if abs(nu[1]) == 1 else hx * np.sqrt(0.5)
    nearest = s.flat[np.argmin(np.abs(s - offset))]
    if abs(nearest - offset) > 0.5 * step + 1e-12:
        raise DomainError(f"offset {offset} misses every grid line in direction {tuple(nu)}")
    mask = np.abs(s - nearest) <= 1e-9 * step
    t = (x * nu[0] + y * nu[1])[mask]
    order = np.argsort(t, kind="stable")
    vals = f.samples[mask][order]
    spacing = hx if abs(nu[0]) == 1 else hy if abs(nu[1]) == 1 else hx * np.sqrt(2.0)
    return vals, spacing


def line_offsets(grid, nu):
    """Hyperplane coordinates of every grid line in direction ``nu`` (axes only)."""
    nu = np.asarray(nu, dtype=float)
    if np.allclose(nu, _E1):
        return grid.centers(1)
    if np.allclose(nu, _E2):
        return -grid.centers(0)
    raise UnsupportedDirectionError("line enumeration supports e1 and e2")


class SlicingCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


def slicing_lower_bound_check(u: ScalarField, v: ScalarField, w: WeightField, nu) -> SlicingCheck:
    """Compare the full weighted energy with the Fubini sum of 1D slices.

    ``lhs = sum v^2 |grad u|^2 omega h^2`` and ``rhs`` integrates
    ``v^2 |d/dt u(x + t nu)|^2 omega`` along every grid line in ``nu``.
    """
    if u.grid != v.grid:
        raise DomainError("u and v live on different grids")
    if u.grid.dim != 2:
        raise ValidationError("slicing check needs 2D fields")
    nu = np.asarray(nu, dtype=float)
    if not (np.allclose(nu, _E1) or np.allclose(nu, _E2)):
        raise UnsupportedDirectionError("slicing check supports e1 and e2")
    g = u.grid
    om = ScalarField(g, w.on_grid(g))
    lhs = float(np.sum(v.samples ** 2 * grad_sq(u) * om.samples) * g.cell_volume)
    hx, hy = g.spacing
    perp_step = hy if np.allclose(nu, _E1) else hx
    per_line = []
    for off in line_offsets(g, nu):
        us, step = slice_restrict(u, nu, off)
        vs, _ = slice_restrict(v, nu, off)
        ws, _ = slice_restrict(om, nu, off)
        du = np.diff(us) / step
        du = np.append(du, du[-1])
        per_line.append(np.sum(vs ** 2 * du ** 2 * ws) * step)
    rhs = float(np.sum(per_line) * perp_step)
    return SlicingCheck(lhs, rhs, bool(lhs >= rhs - 1e-10))


# -- Hausdorff distance on intervals -----------------------------------------

def hausdorff_interval(a1: float, b1: float, a2: float, b2: float) -> float:
    """Capped Hausdorff distance ``min(1, max(|a1-a2|, |b1-b2|))`` of two intervals."""
    vals = (a1, b1, a2, b2)
    if not all(np.isfinite(vals)):
        raise ValidationError("interval endpoints must be finite")
    if a1 > b1 or a2 > b2:
        raise ValidationError(f"inverted interval: [{a1}, {b1}] / [{a2}, {b2}]")
    return min(1.0, max(abs(a1 - a2), abs(b1 - b2)))
