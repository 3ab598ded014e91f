"""Piecewise-constant weights with a positive lower bound.

A weight is a list of disjoint axis-aligned boxes covering the domain, each
carrying a positive value. Its jump set is the union of shared faces between
boxes of different value. On a face the weight is identified with the mean
of the two adjacent values; the lower trace on a face is the smaller one.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .fields import Grid, JumpSet, ScalarField, Segment, _shared_face
from .errors import DomainError, PartitionError, ValidationError


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``(x0, x1)`` or ``(x0, x1, y0, y1)`` with a value."""

    bounds: tuple
    value: float

    def __post_init__(self):
        b = tuple(float(t) for t in self.bounds)
        if len(b) not in (2, 4):
            raise ValidationError(f"box needs 2 or 4 coordinates, got {b}")
        if b[1] <= b[0] or (len(b) == 4 and b[3] <= b[2]):
            raise ValidationError(f"box {b} is empty or inverted")
        object.__setattr__(self, "bounds", b)
        object.__setattr__(self, "value", float(self.value))

    @property
    def dim(self):
        return len(self.bounds) // 2

    @property
    def volume(self):
        b = self.bounds
        return (b[1] - b[0]) * (b[3] - b[2] if self.dim == 2 else 1.0)


class WeightField:
    """Piecewise-constant weight ``omega`` with lower bound ``l > 0``.

    Parameters
    ----------
    domain : sequence of (lo, hi)
    boxes : sequence of Box
    lower_bound : float, optional
        Defaults to the smallest box value.
    """

    def __init__(self, domain, boxes, lower_bound=None):
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.dim = len(self.domain)
        self.boxes = tuple(boxes)
        if not self.boxes:
            raise PartitionError("a weight needs at least one box")
        vals = np.array([b.value for b in self.boxes])
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValidationError("weight values must be finite and strictly positive")
        self.lower_bound = float(vals.min()) if lower_bound is None else float(lower_bound)
        if self.lower_bound <= 0 or np.any(vals < self.lower_bound):
            raise ValidationError(
                f"weight values must be >= the lower bound {self.lower_bound} > 0")
        if any(b.dim != self.dim for b in self.boxes):
            raise ValidationError("box dimension differs from the domain")
        self._check_partition()
        if self.dim == 1:
            order = np.argsort([b.bounds[0] for b in self.boxes], kind="stable")
            self.boxes = tuple(self.boxes[i] for i in order)
            self._edges = np.array([self.boxes[0].bounds[0]] + [b.bounds[1] for b in self.boxes])
            self._vals = np.array([b.value for b in self.boxes])
        self.jump_set = self._derive_jumps()

    # construction helpers ---------------------------------------------------
    @classmethod
    def constant(cls, domain, value):
        domain = tuple((float(a), float(b)) for a, b in domain)
        return cls(domain, [Box(tuple(t for ab in domain for t in ab), value)])

    @classmethod
    def step(cls, domain, x0, left, right):
        """Two-box weight split at ``x = x0`` (1D or 2D)."""
        domain = tuple((float(a), float(b)) for a, b in domain)
        (xa, xb) = domain[0]
        rest = tuple(t for ab in domain[1:] for t in ab)
        return cls(domain, [Box((xa, x0) + rest, left), Box((x0, xb) + rest, right)])

    def with_values(self, values) -> "WeightField":
        return WeightField(self.domain, [Box(b.bounds, v) for b, v in zip(self.boxes, values)])

    def scaled(self, c: float) -> "WeightField":
        return WeightField(self.domain, [Box(b.bounds, c * b.value) for b in self.boxes],
                           lower_bound=c * self.lower_bound)

    def normalized(self) -> "WeightField":
        """Rescale so that the lower bound equals 1."""
        return self.scaled(1.0 / self.lower_bound)

    @property
    def values(self) -> np.ndarray:
        return np.array([b.value for b in self.boxes])

    def _check_partition(self):
        dom_vol = float(np.prod([b - a for a, b in self.domain]))
        tol = 1e-12 * max(b - a for a, b in self.domain)
        for box in self.boxes:
            for (lo, hi), (a, b) in zip(self.domain, zip(box.bounds[::2], box.bounds[1::2])):
                if a < lo - tol or b > hi + tol:
                    raise PartitionError(f"box {box.bounds} leaves the domain {self.domain}")
        if self.dim == 1:
            spans = sorted(b.bounds for b in self.boxes)
            if abs(spans[0][0] - self.domain[0][0]) > tol or abs(spans[-1][1] - self.domain[0][1]) > tol:
                raise PartitionError("boxes do not cover the domain")
            for (a0, a1), (b0, b1) in zip(spans[:-1], spans[1:]):
                if b0 < a1 - tol:
                    raise PartitionError(f"boxes {(a0, a1)} and {(b0, b1)} overlap")
                if b0 > a1 + tol:
                    raise PartitionError(f"gap between {a1} and {b0}")
            return
        arr = np.array([b.bounds for b in self.boxes])
        ox = np.minimum(arr[:, None, 1], arr[None, :, 1]) - np.maximum(arr[:, None, 0], arr[None, :, 0])
        oy = np.minimum(arr[:, None, 3], arr[None, :, 3]) - np.maximum(arr[:, None, 2], arr[None, :, 2])
        overlap = np.clip(ox, 0, None) * np.clip(oy, 0, None)
        np.fill_diagonal(overlap, 0.0)
        if np.any(overlap > tol * tol):
            i, k = np.argwhere(overlap > tol * tol)[0]
            raise PartitionError(f"boxes {arr[i].tolist()} and {arr[k].tolist()} overlap")
        if abs(sum(b.volume for b in self.boxes) - dom_vol) > 1e-9 * dom_vol:
            raise PartitionError("boxes do not cover the domain")

    def _derive_jumps(self) -> JumpSet:
        if self.dim == 1:
            pts = [self._edges[k] for k in range(1, len(self.boxes))
                   if self._vals[k - 1] != self._vals[k]]
            return JumpSet.at(*pts)
        segs = []
        for i, bi in enumerate(self.boxes):
            for bk in self.boxes[i + 1:]:
                if bi.value == bk.value:
                    continue
                face = _shared_face(bi.bounds, bk.bounds)
                if face is None:
                    continue
                a, b = face
                lo, hi = (bi, bk) if bi.value < bk.value else (bk, bi)
                c = lo.bounds
                center = ((c[0] + c[1]) / 2, (c[2] + c[3]) / 2)
                seg = Segment.through(a, b)
                # normal points from the lower value toward the higher one
                mid = 0.5 * (np.asarray(a) + np.asarray(b))
                if np.dot(np.subtract(mid, center), seg.normal) < 0:
                    seg = Segment(seg.start, seg.end, tuple(-np.asarray(seg.normal)))
                segs.append(seg)
        return JumpSet.of_segments(*segs)

    # evaluation -------------------------------------------------------------
    def evaluate(self, x):
        """Weight at one point (scalar) or at an array of points.

        Points on a shared face get the mean of the adjacent values.
        """
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0 if self.dim == 1 else arr.ndim == 1
        pts = arr.reshape(-1) if self.dim == 1 else arr.reshape(-1, 2)
        out = self._eval1(pts) if self.dim == 1 else self._eval2(pts)
        return float(out[0]) if scalar else out

    def _eval1(self, p):
        lo, hi = self.domain[0]
        tol = 1e-12 * (hi - lo)
        if np.any((p < lo - tol) | (p > hi + tol)):
            raise DomainError(f"point outside the domain ({lo}, {hi})")
        edges, vals = self._edges, self._vals
        k = np.clip(np.searchsorted(edges, p, side="right") - 1, 0, len(vals) - 1)
        out = vals[k].copy()
        inner = edges[1:-1]
        if inner.size:
            j = np.clip(np.searchsorted(inner, p), 0, inner.size - 1)
            on = np.abs(p - inner[j]) <= tol
            out[on] = 0.5 * (vals[j[on]] + vals[j[on] + 1])
        return out

    def _eval2(self, p):
        tol = 1e-12 * max(b - a for a, b in self.domain)
        total = np.zeros(len(p))
        count = np.zeros(len(p))
        for box in self.boxes:
            x0, x1, y0, y1 = box.bounds
            m = ((p[:, 0] >= x0 - tol) & (p[:, 0] <= x1 + tol)
                 & (p[:, 1] >= y0 - tol) & (p[:, 1] <= y1 + tol))
            total[m] += box.value
            count[m] += 1
        if np.any(count == 0):
            raise DomainError("point outside the weight's domain")
        return total / count

    def on_grid(self, grid: Grid) -> np.ndarray:
        """Weight at the cell centers of ``grid`` (array of ``grid.shape``)."""
        if not np.allclose(grid.bounds, self.domain, rtol=0, atol=1e-12):
            raise DomainError(f"grid bounds {grid.bounds} differ from weight domain {self.domain}")
        if self.dim == 1:
            return self._eval1(grid.centers(0))
        return self._eval2(grid.points()).reshape(grid.shape)

    def traces(self, x, normal=None):
        """One-sided values ``(omega_minus, omega_plus)`` at a jump point, sorted."""
        return traces(self, x, normal)

    def __repr__(self):
        return f"WeightField(domain={self.domain}, boxes={len(self.boxes)}, l={self.lower_bound})"


def evaluate(w: WeightField, x):
    return w.evaluate(x)


def traces(w: WeightField, x, normal=None):
    """Return ``(omega_minus, omega_plus)`` with ``omega_minus <= omega_plus``.

    Raises DomainError when ``x`` is not on the weight's jump set.
    """
    if w.dim == 1:
        x = float(np.asarray(x).reshape(-1)[0])
        if normal is not None and abs(abs(float(np.asarray(normal).reshape(-1)[0])) - 1.0) > 1e-12:
            raise ValidationError("1D normal must be +1 or -1")
        tol = 1e-12 * (w.domain[0][1] - w.domain[0][0])
        inner = w._edges[1:-1]
        hit = np.flatnonzero(np.abs(inner - x) <= tol)
        if hit.size == 0 or w._vals[hit[0]] == w._vals[hit[0] + 1]:
            raise DomainError(f"{x} is not on the weight's jump set")
        a, b = w._vals[hit[0]], w._vals[hit[0] + 1]
        return (float(min(a, b)), float(max(a, b)))
    p = np.asarray(x, dtype=float).reshape(2)
    scale = max(b - a for a, b in w.domain)
    tol = 1e-12 * scale
    seg = None
    for s in w.jump_set.segments:
        a, b = np.asarray(s.start), np.asarray(s.end)
        d = b - a
        t = np.clip(np.dot(p - a, d) / np.dot(d, d), 0.0, 1.0)
        if np.hypot(*(p - a - t * d)) <= tol:
            seg = s
            break
    if seg is None:
        raise DomainError(f"{tuple(p)} is not on the weight's jump set")
    n = np.asarray(seg.normal if normal is None else normal, dtype=float)
    if abs(np.hypot(*n) - 1.0) > 1e-12:
        raise ValidationError("normal must have unit length")
    d = np.subtract(seg.end, seg.start)
    if abs(np.dot(n, d)) > 1e-9 * np.hypot(*d):
        raise ValidationError("normal is not normal to the jump segment")
    delta = 1e-9 * scale
    lo, hi = w._eval2(np.array([p - delta * n, p + delta * n]))
    return (float(min(lo, hi)), float(max(lo, hi)))


def build_partition_weight(partition, domain) -> WeightField:
    """Assemble ``alpha_P(x) = alpha_Q`` for ``x`` in ``Q``.

    Parameters
    ----------
    partition : sequence of (bounds, alpha)
        Disjoint boxes covering ``domain`` with their constants.
    domain : sequence of (lo, hi)

    Equal neighbouring constants do not create jumps. The lower bound is the
    smallest constant.
    """
    boxes = []
    for bounds, alpha in partition:
        alpha = float(alpha)
        if not np.isfinite(alpha) or alpha <= 0:
            raise ValidationError(f"alpha must be positive, got {alpha} on box {tuple(bounds)}")
        boxes.append(Box(bounds, alpha))
    return WeightField(domain, boxes)


def weighted_inner(f: ScalarField, g: ScalarField, w: WeightField) -> float:
    """Discrete ``<f, g>_omega = sum f g omega h^N`` over cells."""
    if f.grid != g.grid:
        raise DomainError("fields live on different grids")
    om = w.on_grid(f.grid)
    return float(np.sum(f.samples * g.samples * om) * f.grid.cell_volume)


# -- weight description files -----------------------------------------------

def read_weight_file(path) -> WeightField:
    """Read ``x0 x1 [y0 y1] alpha`` lines; the domain is the boxes' bounding box."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"weight file not found: {path}")
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            rows.append([float(t) for t in line.split()])
        except ValueError as exc:
            raise ValidationError(f"{path}:{lineno}: non-numeric entry") from exc
        if len(rows[-1]) not in (3, 5):
            raise ValidationError(f"{path}:{lineno}: expected 'x0 x1 [y0 y1] alpha'")
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValidationError(f"{path}: empty file or mixed 1D/2D boxes")
    arr = np.array(rows)
    dim = (arr.shape[1] - 1) // 2
    domain = [(arr[:, 2 * k].min(), arr[:, 2 * k + 1].max()) for k in range(dim)]
    try:
        return build_partition_weight([(r[:-1], r[-1]) for r in rows], domain)
    except ValidationError as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def write_weight_file(w: WeightField, path) -> None:
    lines = [" ".join(repr(t) for t in (*b.bounds, b.value)) for b in w.boxes]
    Path(path).write_text("\n".join(lines) + "\n")
