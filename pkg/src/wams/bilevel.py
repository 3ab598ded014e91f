"""Bilevel weight learning over cube partitions.

Level 2 picks, for every cube, the constant ``alpha`` whose unweighted
solve on that cube lands closest to the clean image. Level 1 assembles
those constants into a weight, solves the weighted problem on the whole
domain and keeps the candidate partition with the smallest squared error.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from ._parallel import ordered_map
from .errors import GeometryError, PartitionError, ValidationError
from .fields import Grid, ScalarField, write_field
from .solver import SolverConfig, alternate
from .weights import Box, WeightField, build_partition_weight, write_weight_file

DEFAULT_ALPHAS = tuple(float(a) for a in np.logspace(-2, 2, 17))
DEFAULT_EPS = 0.02

_TIE = 1e-12


def default_config(**kw) -> SolverConfig:
    """Solver settings used for both levels unless the caller overrides them."""
    kw.setdefault("eps", DEFAULT_EPS)
    return SolverConfig(**kw)


@dataclass(frozen=True)
class PartitionSpec:
    """Disjoint cubes covering the domain; every side is at least ``1/K`` (``K >= 1``)."""

    K: int
    cubes: Tuple[Tuple[float, ...], ...]
    domain: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        dom = tuple((float(a), float(b)) for a, b in self.domain)
        cubes = tuple(tuple(float(t) for t in c) for c in self.cubes)
        object.__setattr__(self, "domain", dom)
        object.__setattr__(self, "cubes", cubes)
        if int(self.K) != self.K or self.K < 0:
            raise ValidationError(f"K must be a nonnegative integer, got {self.K}")
        if not cubes:
            raise PartitionError("a partition needs at least one cube")
        if self.K == 0:
            whole = tuple(t for ab in dom for t in ab)
            if cubes != (whole,):
                raise PartitionError("K = 0 means the single cube equal to the domain")
        else:
            for c in cubes:
                sides = [c[2 * k + 1] - c[2 * k] for k in range(len(dom))]
                if min(sides) < 1.0 / self.K - 1e-12:
                    raise PartitionError(f"cube {c} has a side shorter than 1/K = {1 / self.K}")
        # reuse the weight partition check for disjointness and coverage
        WeightField(dom, [Box(c, 1.0) for c in cubes])

    def __len__(self):
        return len(self.cubes)


def dyadic_partition(domain, K: int) -> PartitionSpec:
    """Uniform partition with ``floor(extent * K)`` cells per axis (at least 1).

    Each cube side is then ``>= 1/K``; ``K = 0`` gives the whole domain.
    """
    dom = tuple((float(a), float(b)) for a, b in domain)
    if K == 0:
        return PartitionSpec(0, (tuple(t for ab in dom for t in ab),), dom)
    edges = []
    for a, b in dom:
        n = max(1, int(np.floor((b - a) * K + 1e-9)))
        e = np.linspace(a, b, n + 1)
        e[0], e[-1] = a, b
        edges.append(e)
    if len(dom) == 1:
        cubes = [(edges[0][i], edges[0][i + 1]) for i in range(len(edges[0]) - 1)]
    else:
        ex, ey = edges
        cubes = [(ex[i], ex[i + 1], ey[j], ey[j + 1])
                 for j in range(len(ey) - 1) for i in range(len(ex) - 1)]
    return PartitionSpec(int(K), tuple(cubes), dom)


def _cube_mask(grid: Grid, cube) -> np.ndarray:
    """Cells whose centres lie in the half-open cube ``[lo, hi)`` (closed at the domain's top)."""
    masks = []
    for k in range(grid.dim):
        c = grid.centers(k)
        lo, hi = cube[2 * k], cube[2 * k + 1]
        top = grid.bounds[k][1]
        m = (c >= lo) & ((c < hi) | ((hi >= top) & (c <= hi)))
        masks.append(m)
    if grid.dim == 1:
        return masks[0]
    return masks[1][:, None] & masks[0][None, :]


def _subgrid(grid: Grid, mask: np.ndarray):
    """Grid covering exactly the masked (rectangular) block of cells."""
    if mask.all():
        return grid, (slice(None),) * grid.dim
    idx = []
    bounds = []
    for k in range(grid.dim):
        ax = grid.dim - 1 - k
        sel = np.flatnonzero(mask.any(axis=1 - ax) if grid.dim == 2 else mask)
        if sel.size < 2:
            raise GeometryError("cube holds fewer than two cells along an axis")
        lo = grid.bounds[k][0] + sel[0] * grid.spacing[k]
        hi = grid.bounds[k][0] + (sel[-1] + 1) * grid.spacing[k]
        idx.append(slice(sel[0], sel[-1] + 1))
        bounds.append((lo, hi))
    counts = tuple(s.stop - s.start for s in idx)
    return Grid(tuple(bounds), counts), tuple(reversed(idx))


def _score(u: np.ndarray, ug: np.ndarray, vol: float) -> float:
    return float(np.sum((u - ug) ** 2) * vol)


def level2_alpha(u0: ScalarField, ug: ScalarField, cube, alphas: Sequence[float] = DEFAULT_ALPHAS,
                 cfg: Optional[SolverConfig] = None, threads: Optional[int] = None):
    """Best constant weight for one cube.

    Returns ``(alpha, scores)`` where ``scores[i]`` belongs to ``alphas[i]``.
    Scores within 1e-12 of the minimum count as ties and the smaller alpha wins.
    """
    cfg = default_config() if cfg is None else cfg
    alphas = _check_alphas(alphas)
    if u0.grid != ug.grid:
        raise ValidationError("u0 and u_g live on different grids")
    mask = _cube_mask(u0.grid, cube)
    if not mask.any():
        raise GeometryError(f"cube {tuple(cube)} contains no cell of the grid")
    sub, sl = _subgrid(u0.grid, mask)
    f0 = ScalarField(sub, u0.samples[sl])
    fg = ug.samples[sl]

    def run(alpha):
        res = alternate(f0, WeightField.constant(sub.bounds, alpha), cfg)
        return _score(res.u.samples, fg, sub.cell_volume)

    scores = []
    for val, exc in ordered_map(run, alphas, threads):
        if exc is not None:
            raise exc
        scores.append(val)
    return _argmin(alphas, scores), tuple(scores)


def _check_alphas(alphas):
    alphas = tuple(float(a) for a in alphas)
    if not alphas:
        raise ValidationError("alpha grid is empty")
    if any(not np.isfinite(a) or a <= 0 for a in alphas):
        raise ValidationError("alpha grid must be finite and positive")
    if any(b <= a for a, b in zip(alphas, alphas[1:])):
        raise ValidationError("alpha grid must be strictly increasing")
    return alphas


def _argmin(alphas, scores):
    best = min(scores)
    for a, s in zip(alphas, scores):
        if s <= best + _TIE:
            return a
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class TableRow:
    candidate: int
    cube: int
    alpha: float
    score: float


@dataclass(frozen=True)
class BilevelResult:
    """Winning candidate with its weight, recovered image and the full score table."""

    K: int
    partition: PartitionSpec
    alphas: Tuple[float, ...]
    weight: WeightField
    u: ScalarField
    score: float
    candidate_scores: Tuple[Tuple[int, float], ...]
    table: Tuple[TableRow, ...]
    eps: float

    def table_csv(self) -> str:
        lines = ["candidate,cube,alpha,score"]
        lines += [f"{r.candidate},{r.cube},{r.alpha!r},{r.score!r}" for r in self.table]
        return "\n".join(lines) + "\n"

    def candidates_csv(self) -> str:
        lines = ["K,score"] + [f"{k},{s!r}" for k, s in self.candidate_scores]
        return "\n".join(lines) + "\n"

    def write(self, outdir) -> list:
        out = Path(outdir)
        out.mkdir(parents=True, exist_ok=True)
        paths = [out / "scores.csv", out / "candidates.csv", out / "weight.txt",
                 out / ("u.pgm" if self.u.grid.dim == 2 else "u.csv")]
        paths[0].write_text(self.table_csv())
        paths[1].write_text(self.candidates_csv())
        write_weight_file(self.weight, paths[2])
        write_field(self.u, paths[3])
        if self.u.grid.dim == 2:
            paths.append(Path(str(paths[3]) + ".scale"))
        return paths


def _evaluate_candidate(u0, ug, spec: PartitionSpec, alphas, cfg, threads):
    chosen, rows = [], []
    for ci, cube in enumerate(spec.cubes):
        a, scores = level2_alpha(u0, ug, cube, alphas, cfg, threads)
        chosen.append(a)
        rows += [TableRow(spec.K, ci, al, s) for al, s in zip(alphas, scores)]
    weight = build_partition_weight(list(zip(spec.cubes, chosen)), spec.domain)
    res = alternate(u0, weight, cfg)
    score = _score(res.u.samples, ug.samples, u0.grid.cell_volume)
    return tuple(chosen), weight, res.u, score, rows


def train(u0: ScalarField, ug: ScalarField, candidates: Sequence[PartitionSpec],
          alphas: Sequence[float] = DEFAULT_ALPHAS, cfg: Optional[SolverConfig] = None,
          threads: Optional[int] = None) -> BilevelResult:
    """Level-1 selection over candidate partitions; ties keep the earlier candidate."""
    cfg = default_config() if cfg is None else cfg
    alphas = _check_alphas(alphas)
    candidates = list(candidates)
    if not candidates:
        raise ValidationError("train needs at least one candidate partition")
    if u0.grid != ug.grid:
        raise ValidationError("u0 and u_g live on different grids")
    for spec in candidates:
        if not np.allclose(spec.domain, u0.grid.bounds, rtol=0, atol=1e-12):
            raise ValidationError(f"partition K={spec.K} has a different domain than the grid")
    best = None
    table, cand_scores = [], []
    for spec in candidates:
        chosen, weight, u, score, rows = _evaluate_candidate(u0, ug, spec, alphas, cfg, threads)
        table += rows
        cand_scores.append((spec.K, score))
        if best is None or score < best[4]:
            best = (spec, chosen, weight, u, score)
    spec, chosen, weight, u, score = best
    return BilevelResult(spec.K, spec, chosen, weight, u, score, tuple(cand_scores),
                         tuple(table), cfg.eps)


def scheme_b(u0: ScalarField, ug: ScalarField, alphas: Sequence[float] = DEFAULT_ALPHAS,
             cfg: Optional[SolverConfig] = None) -> BilevelResult:
    """Single global ``alpha``: scan, pick the best, report the solve at that alpha.

    Written as a direct scan on the full grid, independent of :func:`train`.
    """
    cfg = default_config() if cfg is None else cfg
    alphas = _check_alphas(alphas)
    dom = u0.grid.bounds
    best = None
    scores = []
    for a in alphas:
        res = alternate(u0, WeightField.constant(dom, a), cfg)
        s = _score(res.u.samples, ug.samples, u0.grid.cell_volume)
        scores.append(s)
    a = _argmin(alphas, scores)
    weight = WeightField.constant(dom, a)
    res = alternate(u0, weight, cfg)
    best = _score(res.u.samples, ug.samples, u0.grid.cell_volume)
    spec = dyadic_partition(dom, 0)
    table = tuple(TableRow(0, 0, al, s) for al, s in zip(alphas, scores))
    return BilevelResult(0, spec, (a,), weight, res.u, best, ((0, best),), table, cfg.eps)


def two_noise_synthetic(n: int = 256, sigma=(0.3, 0.03), seed: int = 0, domain=((-1.0, 1.0),)):
    """1D test image: a two-step clean signal, strong noise on the left half, weak on the right.

    Returns ``(u0, u_g)`` on an ``n``-cell grid.
    """
    g = Grid(domain, (n,))
    x = g.centers(0)
    (lo, hi), = g.bounds
    mid = 0.5 * (lo + hi)
    span = hi - lo
    ug = np.where(x < mid - 0.25 * span, 0.0, 1.0) + np.where(x > mid + 0.25 * span, -0.5, 0.0)
    rng = np.random.default_rng(seed)
    noise = rng.standard_normal(n) * np.where(x < mid, sigma[0], sigma[1])
    return ScalarField(g, ug + noise), ScalarField(g, ug)
