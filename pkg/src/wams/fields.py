"""Grids, grid-sampled fields, jump sets and piecewise-polynomial functions.

Conventions
-----------
* Cells are uniform and cell-centered. Geometric axes are ordered ``(x, y)``.
* A 1D field has samples of shape ``(nx,)``; a 2D field has shape ``(ny, nx)``
  so that ``samples[j]`` is the row of cells at height ``y_j`` (row-major,
  ``x`` varies fastest).
* Discrete gradients are forward differences, with the backward difference
  reused at the last cell of each axis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _geometry as geo
from .errors import DomainError, ValidationError

MAX_CELLS = 2 ** 24


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centered grid on an interval or an axis-aligned rectangle.

    Parameters
    ----------
    bounds : sequence of (lo, hi)
        Domain bounds per geometric axis, ``x`` first.
    counts : sequence of int
        Cell count per axis.
    max_cells : int
        Cap on the total number of cells.
    """

    bounds: tuple
    counts: tuple
    max_cells: int = field(default=MAX_CELLS, compare=False, repr=False)

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        counts = tuple(int(c) for c in self.counts)
        if len(bounds) not in (1, 2) or len(bounds) != len(counts):
            raise ValidationError("grid must be 1D or 2D with one count per axis")
        for (lo, hi), n in zip(bounds, counts):
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise ValidationError(f"invalid axis bounds ({lo}, {hi})")
            if n < 2:
                raise ValidationError(f"cell count per axis must be >= 2, got {n}")
        if int(np.prod(counts)) > self.max_cells:
            raise ValidationError(
                f"grid has {int(np.prod(counts))} cells, above the cap {self.max_cells}")
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_spacing(cls, bounds, h, even=True, **kw):
        """Grid whose spacing is at most ``h`` on every axis.

        With ``even=True`` the counts are rounded up to even numbers so that
        the midpoint of each axis is a cell face.
        """
        counts = []
        for lo, hi in bounds:
            n = int(np.ceil((hi - lo) / h - 1e-9))
            if even and n % 2:
                n += 1
            counts.append(max(n, 2))
        return cls(tuple(bounds), tuple(counts), **kw)

    @property
    def dim(self) -> int:
        return len(self.counts)

    @property
    def spacing(self) -> tuple:
        return tuple((hi - lo) / n for (lo, hi), n in zip(self.bounds, self.counts))

    @property
    def shape(self) -> tuple:
        return tuple(reversed(self.counts))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacing))

    def centers(self, axis: int = 0) -> np.ndarray:
        (lo, _), n, h = self.bounds[axis], self.counts[axis], self.spacing[axis]
        return lo + (np.arange(n) + 0.5) * h

    def coords(self) -> tuple:
        """Cell-center coordinate arrays, each of shape ``self.shape``."""
        if self.dim == 1:
            return (self.centers(0),)
        x, y = np.meshgrid(self.centers(0), self.centers(1), indexing="xy")
        return (x, y)

    def points(self) -> np.ndarray:
        """Cell centers as an ``(size, dim)`` array in row-major order."""
        return np.stack([c.ravel() for c in self.coords()], axis=1)

    def contains(self, x, tol=0.0) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return all(lo - tol <= xi <= hi + tol for xi, (lo, hi) in zip(x, self.bounds))

    def header(self) -> str:
        counts = "x".join(str(c) for c in self.counts)
        bounds = ",".join(repr(b) for ab in self.bounds for b in ab)
        return f"grid:{self.dim}:{counts}:{bounds}"

    @classmethod
    def from_header(cls, text: str) -> "Grid":
        try:
            tag, dim, counts, bounds = text.strip().split(":")
            dim = int(dim)
            counts = tuple(int(c) for c in counts.split("x"))
            flat = [float(b) for b in bounds.split(",")]
        except ValueError as exc:
            raise ValidationError(f"malformed grid header {text!r}") from exc
        if tag != "grid" or len(counts) != dim or len(flat) != 2 * dim:
            raise ValidationError(f"malformed grid header {text!r}")
        return cls(tuple(zip(flat[::2], flat[1::2])), counts)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """Real samples on a grid, one per cell."""

    grid: Grid
    samples: np.ndarray

    def __post_init__(self):
        arr = np.array(self.samples, dtype=np.float64)
        if arr.size != self.grid.size:
            raise ValidationError(
                f"sample count {arr.size} does not match grid size {self.grid.size}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("field samples must be finite")
        arr = arr.reshape(self.grid.shape)
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    @classmethod
    def constant(cls, grid, value) -> "ScalarField":
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid, func) -> "ScalarField":
        return cls(grid, func(*grid.coords()))

    def with_samples(self, samples) -> "ScalarField":
        return ScalarField(self.grid, samples)

    def __eq__(self, other):
        return (isinstance(other, ScalarField) and self.grid == other.grid
                and np.array_equal(self.samples, other.samples))

    __hash__ = None


def gradient(f: ScalarField) -> list:
    """Per-axis forward differences of ``f`` (``x`` component first)."""
    return [ScalarField(f.grid, d) for d in _diff_components(f.samples, f.grid)]


def _diff_components(arr, grid):
    out = []
    for k, h in enumerate(grid.spacing):
        ax = grid.dim - 1 - k
        fwd = np.diff(arr, axis=ax) / h
        last = np.take(fwd, [-1], axis=ax)
        out.append(np.concatenate([fwd, last], axis=ax))
    return out


# -- jump sets ---------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """Oriented segment with unit normal ``normal``."""

    start: tuple
    end: tuple
    normal: tuple

    def __post_init__(self):
        a = tuple(float(t) for t in self.start)
        b = tuple(float(t) for t in self.end)
        n = tuple(float(t) for t in self.normal)
        if len(a) != 2 or len(b) != 2 or len(n) != 2:
            raise ValidationError("segments live in the plane")
        if abs(np.hypot(*n) - 1.0) > 1e-12:
            raise ValidationError(f"segment normal {n} is not unit length")
        d = np.subtract(b, a)
        if np.hypot(*d) == 0.0:
            raise ValidationError("segment has zero length")
        if abs(np.dot(d, n)) > 1e-9 * np.hypot(*d):
            raise ValidationError("segment normal is not perpendicular to the segment")
        object.__setattr__(self, "start", a)
        object.__setattr__(self, "end", b)
        object.__setattr__(self, "normal", n)

    @classmethod
    def through(cls, start, end, toward=None):
        """Segment with the normal chosen by rotating the direction clockwise.

        If ``toward`` is given the normal is flipped to point at it.
        """
        d = np.subtract(end, start).astype(float)
        n = np.array([d[1], -d[0]]) / np.hypot(*d)
        if toward is not None and np.dot(np.subtract(toward, start), n) < 0:
            n = -n
        return cls(tuple(start), tuple(end), tuple(n))

    @property
    def length(self) -> float:
        return float(np.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1]))

    def point(self, t):
        return np.add(self.start, t * np.subtract(self.end, self.start))


@dataclass(frozen=True)
class JumpSet:
    """Discontinuity set: points in 1D, oriented segments in 2D."""

    dim: int
    points: tuple = ()
    segments: tuple = ()

    def __post_init__(self):
        pts = tuple(sorted(float(p) for p in self.points))
        if self.dim not in (1, 2):
            raise ValidationError("jump set dimension must be 1 or 2")
        if self.dim == 1 and self.segments:
            raise ValidationError("1D jump sets hold points only")
        if self.dim == 2 and pts:
            raise ValidationError("2D jump sets hold segments only")
        if len(set(pts)) != len(pts):
            raise ValidationError("jump coordinates must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "segments", tuple(self.segments))

    @classmethod
    def at(cls, *points) -> "JumpSet":
        return cls(1, points=points)

    @classmethod
    def of_segments(cls, *segments) -> "JumpSet":
        return cls(2, segments=segments)

    def __len__(self):
        return len(self.points) if self.dim == 1 else len(self.segments)

    def is_empty(self) -> bool:
        return len(self) == 0

    def measure(self) -> float:
        """Counting measure in 1D, total length in 2D."""
        if self.dim == 1:
            return float(len(self.points))
        return float(sum(s.length for s in self.segments))

    def check_interior(self, bounds) -> None:
        if self.dim == 1:
            lo, hi = bounds[0]
            for p in self.points:
                if not lo < p < hi:
                    raise DomainError(f"jump point {p} is not interior to ({lo}, {hi})")
        else:
            (x0, x1), (y0, y1) = bounds
            for s in self.segments:
                for q in (s.start, s.end):
                    if not (x0 - 1e-12 <= q[0] <= x1 + 1e-12 and y0 - 1e-12 <= q[1] <= y1 + 1e-12):
                        raise DomainError(f"jump segment endpoint {q} lies outside the domain")


# -- piecewise polynomial functions -----------------------------------------

class PiecewiseField:
    """Piecewise-polynomial function with an explicit jump set.

    In 1D the pieces are the intervals between consecutive ``breaks`` and each
    carries ascending polynomial coefficients (degree <= 3). In 2D the pieces
    are convex polygons carrying bivariate cubics, and the jump set is given
    explicitly.

    Use the class constructors (:meth:`intervals`, :meth:`step`,
    :meth:`constant`, :meth:`boxes`, :meth:`polygons`) rather than
    ``__init__``.
    """

    def __init__(self, domain, jumps, pieces):
        self.domain = tuple((float(a), float(b)) for a, b in domain)
        self.dim = len(self.domain)
        self.jumps = jumps
        self.pieces = tuple(pieces)
        self._validate()

    # constructors -----------------------------------------------------------
    @classmethod
    def intervals(cls, domain, breaks, coeffs):
        domain = _as_domain(domain, 1)
        lo, hi = domain[0]
        breaks = [float(b) for b in breaks]
        if sorted(breaks) != breaks:
            raise ValidationError("breaks must be increasing")
        if len(coeffs) != len(breaks) + 1:
            raise ValidationError("need one coefficient vector per piece")
        edges = [lo, *breaks, hi]
        pieces = []
        for (a, b), c in zip(zip(edges[:-1], edges[1:]), coeffs):
            c = np.atleast_1d(np.asarray(c, dtype=float))
            if c.size > 4:
                raise ValidationError("piece polynomials are limited to degree 3")
            pieces.append(((a, b), c))
        return cls(domain, JumpSet.at(*breaks), pieces)

    @classmethod
    def step(cls, domain, x0=0.0, left=0.0, right=1.0):
        """1D step with the given one-sided values, or a 2D step across ``x = x0``."""
        domain = _as_domain(domain)
        if len(domain) == 1:
            return cls.intervals(domain, [x0], [[left], [right]])
        (xa, xb), (ya, yb) = domain
        return cls.boxes(domain, [(xa, x0, ya, yb), (x0, xb, ya, yb)], [[[left]], [[right]]])

    @classmethod
    def constant(cls, domain, value):
        domain = _as_domain(domain)
        if len(domain) == 1:
            return cls.intervals(domain, [], [[value]])
        (xa, xb), (ya, yb) = domain
        return cls.boxes(domain, [(xa, xb, ya, yb)], [[[value]]])

    @classmethod
    def boxes(cls, domain, boxes, coeffs):
        """2D function constant/polynomial on axis-aligned boxes.

        The jump set is every shared face on which the two adjacent
        polynomials differ; its normal points toward the larger side.
        """
        domain = _as_domain(domain, 2)
        polys = [c if isinstance(c, geo.Poly2) else geo.Poly2(c) for c in coeffs]
        rects = [tuple(float(t) for t in b) for b in boxes]
        pieces = [(geo.box_polygon(*r), p) for r, p in zip(rects, polys)]
        segs = []
        for i in range(len(rects)):
            for k in range(i + 1, len(rects)):
                if polys[i] == polys[k]:
                    continue
                face = _shared_face(rects[i], rects[k])
                if face is None:
                    continue
                a, b = face
                mid = 0.5 * (np.asarray(a) + np.asarray(b))
                seg = Segment.through(a, b)
                n = np.asarray(seg.normal)
                i_plus = geo.contains(pieces[i][0], (mid + 1e-9 * n)[None])[0]
                plus, minus = (polys[i], polys[k]) if i_plus else (polys[k], polys[i])
                if minus(*mid) > plus(*mid):
                    seg = Segment(seg.start, seg.end, tuple(-n))
                segs.append(seg)
        return cls(domain, JumpSet.of_segments(*segs), pieces)

    @classmethod
    def polygons(cls, domain, pieces, jumps):
        domain = _as_domain(domain, 2)
        out = []
        for poly, c in pieces:
            out.append((geo.ensure_ccw(poly), c if isinstance(c, geo.Poly2) else geo.Poly2(c)))
        return cls(domain, jumps, out)

    # validation -------------------------------------------------------------
    def _validate(self):
        if self.jumps.dim != self.dim:
            raise ValidationError("jump set dimension differs from the domain")
        if self.dim == 1:
            lo, hi = self.domain[0]
            self.jumps.check_interior(self.domain)
            edges = [lo] + [p[0][1] for p in self.pieces]
            if not np.allclose(edges[-1], hi) or any(b <= a for a, b in zip(edges[:-1], edges[1:])):
                raise ValidationError("1D pieces must tile the domain")
            for (_, c) in self.pieces:
                if not np.all(np.isfinite(c)):
                    raise ValidationError("non-finite piece coefficients")
            return
        self.jumps.check_interior(self.domain)
        (xa, xb), (ya, yb) = self.domain
        dom = geo.box_polygon(xa, xb, ya, yb)
        total = 0.0
        for poly, _ in self.pieces:
            area = geo.polygon_area(poly)
            if area <= 0:
                raise ValidationError("piece polygon has no area")
            if abs(geo.polygon_area(geo.intersect(poly, dom)) - area) > 1e-9 * area:
                raise ValidationError("piece polygon leaves the domain")
            total += area
        if abs(total - (xb - xa) * (yb - ya)) > 1e-9 * (xb - xa) * (yb - ya):
            raise ValidationError("pieces do not tile the domain")

    # evaluation -------------------------------------------------------------
    def evaluate(self, points):
        """Values at ``points``; on a piece boundary the one-sided values are averaged."""
        return self._accumulate(points, value=True)

    def gradient(self, points):
        """Gradient (``(m, dim)`` array), averaged across piece boundaries."""
        return self._accumulate(points, value=False)

    def _accumulate(self, points, value=True):
        pts = np.asarray(points, dtype=float)
        if self.dim == 1:
            pts = pts.reshape(-1)
            total = np.zeros(pts.shape if value else (pts.size, 1))
            count = np.zeros(pts.size)
            scale = self.domain[0][1] - self.domain[0][0]
            tol = 1e-12 * scale
            for (a, b), c in self.pieces:
                m = (pts >= a - tol) & (pts <= b + tol)
                if not m.any():
                    continue
                if value:
                    total[m] += np.polynomial.polynomial.polyval(pts[m], c)
                else:
                    total[m, 0] += np.polynomial.polynomial.polyval(
                        pts[m], np.polynomial.polynomial.polyder(c))
                count[m] += 1
        else:
            pts = pts.reshape(-1, 2)
            total = np.zeros(len(pts) if value else (len(pts), 2))
            count = np.zeros(len(pts))
            tol = 1e-12 * max(b - a for a, b in self.domain)
            for poly, p in self.pieces:
                m = geo.contains(poly, pts, tol=tol)
                if not m.any():
                    continue
                if value:
                    total[m] += p(pts[m, 0], pts[m, 1])
                else:
                    gx, gy = p.grad(pts[m, 0], pts[m, 1])
                    total[m, 0] += gx
                    total[m, 1] += gy
                count[m] += 1
        if np.any(count == 0):
            raise DomainError("evaluation point outside the domain")
        return total / (count if value else count[:, None])

    def limits(self, x: float):
        """One-sided limits ``(u(x-), u(x+))`` of a 1D field."""
        if self.dim != 1:
            raise ValidationError("one-sided limits along x are defined for 1D fields")
        left = right = None
        for (a, b), c in self.pieces:
            if a < x <= b:
                left = float(np.polynomial.polynomial.polyval(x, c))
            if a <= x < b:
                right = float(np.polynomial.polynomial.polyval(x, c))
        if left is None or right is None:
            raise DomainError(f"{x} is not interior to the domain")
        return left, right

    def side_values(self, point, normal, delta=None):
        """Values just before and after ``point`` along ``normal`` (2D)."""
        point = np.asarray(point, dtype=float)
        normal = np.asarray(normal, dtype=float)
        if delta is None:
            delta = 1e-9 * max(b - a for a, b in self.domain)
        lo = self.evaluate((point - delta * normal)[None])[0]
        hi = self.evaluate((point + delta * normal)[None])[0]
        return float(lo), float(hi)


def sample(p: PiecewiseField, g: Grid) -> ScalarField:
    """Cell-centered samples of ``p`` on ``g``.

    A center lying exactly on a piece boundary receives the average of the
    one-sided values.
    """
    if g.dim != p.dim or not np.allclose(g.bounds, p.domain, rtol=0, atol=1e-12):
        raise DomainError(f"grid bounds {g.bounds} do not match the field domain {p.domain}")
    p.jumps.check_interior(g.bounds)
    vals = p.evaluate(g.points() if g.dim == 2 else g.centers(0))
    return ScalarField(g, vals.reshape(g.shape))


def _as_domain(domain, dim=None):
    dom = tuple((float(a), float(b)) for a, b in np.reshape(np.asarray(domain, dtype=float), (-1, 2)))
    if dim is not None and len(dom) != dim:
        raise ValidationError(f"expected a {dim}D domain, got {dom}")
    return dom


def _shared_face(r, s):
    """Shared face (as two endpoints) of two axis-aligned boxes, or None."""
    ax0, ax1, ay0, ay1 = r
    bx0, bx1, by0, by1 = s
    for xr, xs in ((ax1, bx0), (ax0, bx1)):
        if abs(xr - xs) <= 1e-12:
            lo, hi = max(ay0, by0), min(ay1, by1)
            if hi - lo > 1e-12:
                return (xr, lo), (xr, hi)
    for yr, ys in ((ay1, by0), (ay0, by1)):
        if abs(yr - ys) <= 1e-12:
            lo, hi = max(ax0, bx0), min(ax1, bx1)
            if hi - lo > 1e-12:
                return (lo, yr), (hi, yr)
    return None


# -- serialization -----------------------------------------------------------

def write_csv(f: ScalarField, path) -> None:
    """One sample per line after a ``grid:<dim>:<counts>:<bounds>`` header."""
    path = Path(path)
    lines = [f.grid.header()]
    lines.extend(repr(float(v)) for v in f.samples.ravel())
    path.write_text("\n".join(lines) + "\n")


def read_csv(path) -> ScalarField:
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"field file not found: {path}")
    lines = [ln.strip() for ln in path.read_text().splitlines() if ln.strip()]
    if not lines:
        raise ValidationError(f"empty field file: {path}")
    grid = Grid.from_header(lines[0])
    try:
        vals = np.array([float(v) for v in lines[1:]])
    except ValueError as exc:
        raise ValidationError(f"non-numeric sample in {path}") from exc
    return ScalarField(grid, vals)


def write_pgm(f: ScalarField, path, maxval: int = 65535) -> None:
    """ASCII PGM (P2) with linear min-max scaling; scale goes to ``<path>.scale``.

    Image row 0 is the top row (largest ``y``).
    """
    if f.grid.dim != 2:
        raise ValidationError("PGM output needs a 2D field")
    path = Path(path)
    arr = f.samples
    lo, hi = float(arr.min()), float(arr.max())
    span = hi - lo if hi > lo else 1.0
    img = np.rint((arr - lo) / span * maxval).astype(np.int64)[::-1]
    ny, nx = img.shape
    rows = [" ".join(str(v) for v in row) for row in img]
    path.write_text(f"P2\n{nx} {ny}\n{maxval}\n" + "\n".join(rows) + "\n")
    Path(str(path) + ".scale").write_text(f"min {lo!r}\nmax {hi!r}\n{f.grid.header()}\n")


def read_pgm(path) -> ScalarField:
    """Read a P2 file, undoing the scaling recorded by :func:`write_pgm` if present.

    Without a sidecar the values map to ``[0, 1]`` on a unit-pixel grid.
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"PGM file not found: {path}")
    tokens = []
    for line in path.read_text().splitlines():
        tokens.extend(line.split("#", 1)[0].split())
    if not tokens or tokens[0] != "P2":
        raise ValidationError(f"{path} is not an ASCII (P2) PGM file")
    nx, ny, maxval = int(tokens[1]), int(tokens[2]), int(tokens[3])
    data = np.array([int(t) for t in tokens[4:4 + nx * ny]], dtype=float)
    if data.size != nx * ny:
        raise ValidationError(f"{path}: expected {nx * ny} pixels, got {data.size}")
    img = data.reshape(ny, nx)[::-1] / maxval
    side = Path(str(path) + ".scale")
    if side.is_file():
        meta = side.read_text().splitlines()
        lo = float(meta[0].split()[1])
        hi = float(meta[1].split()[1])
        grid = Grid.from_header(meta[2])
        span = hi - lo if hi > lo else 1.0
        return ScalarField(grid, lo + img * span)
    return ScalarField(Grid(((0.0, float(nx)), (0.0, float(ny))), (nx, ny)), img)


def read_field(path) -> ScalarField:
    """Dispatch on the file suffix (``.pgm`` or CSV)."""
    path = Path(path)
    return read_pgm(path) if path.suffix.lower() == ".pgm" else read_csv(path)


def write_field(f: ScalarField, path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".pgm":
        write_pgm(f, path)
    else:
        write_csv(f, path)


def read_piecewise(path) -> PiecewiseField:
    """Piece file: ``domain x0 x1 [y0 y1]`` then one piece per line.

    1D piece lines read ``a b c0 [c1 c2 c3]`` (interval and ascending
    coefficients); 2D lines read ``x0 x1 y0 y1 value`` (constant boxes).
    """
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"piecewise file not found: {path}")
    rows = [ln.split("#", 1)[0].split() for ln in path.read_text().splitlines()]
    rows = [r for r in rows if r]
    if not rows or rows[0][0] != "domain":
        raise ValidationError(f"{path}: first line must be 'domain x0 x1 [y0 y1]'")
    try:
        dom = [float(t) for t in rows[0][1:]]
        body = [[float(t) for t in r] for r in rows[1:]]
    except ValueError as exc:
        raise ValidationError(f"{path}: non-numeric entry") from exc
    if len(dom) == 2:
        body.sort(key=lambda r: r[0])
        breaks = [r[1] for r in body[:-1]]
        for prev, nxt in zip(body[:-1], body[1:]):
            if abs(prev[1] - nxt[0]) > 1e-12:
                raise ValidationError(f"{path}: intervals must be contiguous")
        return PiecewiseField.intervals([dom], breaks, [r[2:] for r in body])
    if len(dom) == 4:
        return PiecewiseField.boxes([dom[:2], dom[2:]], [r[:4] for r in body],
                                    [[[r[4]]] for r in body])
    raise ValidationError(f"{path}: domain needs 2 or 4 numbers")


def read_jumps(path) -> JumpSet:
    """Jump file: one point ``x`` per line (1D) or ``ax ay bx by nx ny`` (2D)."""
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"jump-set file not found: {path}")
    rows = [ln.split("#", 1)[0].split() for ln in path.read_text().splitlines()]
    rows = [[float(t) for t in r] for r in rows if r]
    if all(len(r) == 1 for r in rows):
        return JumpSet.at(*[r[0] for r in rows])
    if all(len(r) == 6 for r in rows):
        return JumpSet.of_segments(*[Segment(r[0:2], r[2:4], r[4:6]) for r in rows])
    raise ValidationError(f"{path}: lines must hold 1 (1D) or 6 (2D) numbers")


def segments_array(js: JumpSet) -> np.ndarray:
    return np.array([[*s.start, *s.end] for s in js.segments], dtype=float).reshape(-1, 4)


__all__ = [
    "Grid", "ScalarField", "Segment", "JumpSet", "PiecewiseField", "gradient", "sample",
    "write_csv", "read_csv", "write_pgm", "read_pgm", "read_field", "write_field",
    "read_piecewise", "read_jumps", "MAX_CELLS",
]
