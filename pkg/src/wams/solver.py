"""Alternating minimization of the weighted Ambrosio-Tortorelli energy.

Each half-step is an exact convex quadratic solve. The discrete energy is a
sum over cells of ``kappa_i |D u|_i^2`` where ``D`` is the forward
difference with the last difference repeated, so its Hessian is a graph
Laplacian whose edge ``(i, i+1)`` carries ``kappa_i / h^2`` and the last
edge also carries the last cell's ``kappa``.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .energy import (DEFAULT_NORMALIZATION, EnergyReport, Normalization, at_energy,
                     grad_sq)
from .errors import DomainError, SingularSystemError, SolverError, ValidationError
from .fields import ScalarField
from .weights import WeightField


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of the alternating solver.

    Parameters
    ----------
    eps : float
        Phase-field width.
    normalization : Normalization
        ``(a, b)`` pair of the transition term.
    lam : float
        Fidelity weight; the u-step needs ``lam > 0``.
    v_floor : float
        ``k`` in ``(v^2 + k)`` used by the u-step (and counted in the energy).
    tol : float
        Relative residual target of the linear solves.
    max_outer : int
        Cap on outer iterations per continuation stage.
    outer_tol : float
        Stop once the relative energy decrease of one outer iteration drops below this.
    max_linear_iterations : int
        Cap on conjugate-gradient iterations (2D).
    continuation_start : float or None
        If set, solve first at this width and halve it until ``eps`` is
        reached, warm-starting each stage from the previous one.
    """

    eps: float
    normalization: Normalization = DEFAULT_NORMALIZATION
    lam: float = 1.0
    v_floor: float = 0.0
    tol: float = 1e-8
    max_outer: int = 200
    outer_tol: float = 1e-7
    max_linear_iterations: int = 20000
    continuation_start: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "normalization", Normalization.parse(self.normalization))
        if not (self.eps > 0 and np.isfinite(self.eps)):
            raise ValidationError(f"eps must be positive, got {self.eps}")
        if not self.lam >= 0:
            raise ValidationError(f"lam must be >= 0, got {self.lam}")
        if not self.v_floor >= 0:
            raise ValidationError(f"v_floor must be >= 0, got {self.v_floor}")
        if not (self.tol > 0 and self.outer_tol > 0):
            raise ValidationError("tolerances must be positive")
        if self.max_outer < 1 or self.max_linear_iterations < 1:
            raise ValidationError("iteration caps must be >= 1")
        if self.continuation_start is not None and not self.continuation_start > 0:
            raise ValidationError("continuation_start must be positive")

    def schedule(self) -> Tuple[float, ...]:
        """Widths visited by :func:`alternate`, ending with ``eps``."""
        out = []
        e = self.continuation_start
        if e is not None:
            while e > self.eps * (1 + 1e-9):
                out.append(float(e))
                e /= 2.0
        out.append(float(self.eps))
        return tuple(out)


@dataclass(frozen=True)
class SolveResult:
    """Output of :func:`alternate`.

    ``trace`` holds the energy of the starting point of the final stage and
    then one entry per half-step of that stage.
    """

    u: ScalarField
    v: ScalarField
    trace: Tuple[EnergyReport, ...]
    iterations: int
    converged: bool
    stage_iterations: Tuple[int, ...] = ()

    @property
    def energy(self) -> EnergyReport:
        return self.trace[-1]


# -- operator assembly ----------------------------------------------------------

def edge_weights(kappa: np.ndarray, grid):
    """Edge weights ``(ex, ey)`` for the Hessian of ``sum kappa |D u|^2``.

    Arrays are 2D with shape ``(ny, nx)`` (1D grids use ``ny = 1``).
    """
    k2 = np.atleast_2d(kappa)
    hs = grid.spacing
    ex = k2[:, :-1] / hs[0] ** 2
    ex[:, -1] += k2[:, -1] / hs[0] ** 2
    if grid.dim == 2:
        ey = k2[:-1, :] / hs[1] ** 2
        ey[-1, :] += k2[-1, :] / hs[1] ** 2
    else:
        ey = np.zeros((0, k2.shape[1]))
    return np.ascontiguousarray(ex), np.ascontiguousarray(ey)


def _solve(grid, diag, ex, ey, rhs, x0, cfg: SolverConfig, what: str):
    if grid.dim == 1:
        if x0 is None:
            x = kernels.tridiag_solve(diag.ravel(), ex.ravel(), rhs.ravel())
        else:
            # correction from the warm start; exact when x0 already solves the system
            x0 = np.asarray(x0, dtype=float).reshape(1, -1)
            r = rhs.reshape(1, -1) - kernels.edge_apply(x0, diag.reshape(1, -1), ex, ey)
            x = x0.ravel() + kernels.tridiag_solve(diag.ravel(), ex.ravel(), r.ravel())
        if not np.all(np.isfinite(x)):
            raise SolverError(f"{what}: tridiagonal solve produced non-finite values")
        return x
    d2 = np.ascontiguousarray(diag.reshape(grid.shape))
    b2 = np.ascontiguousarray(rhs.reshape(grid.shape))
    start = np.zeros(grid.shape) if x0 is None else np.asarray(x0, dtype=float).reshape(grid.shape)
    x, iters, relres = kernels.pcg(d2, ex, ey, b2, start, cfg.tol, cfg.max_linear_iterations)
    if not relres <= cfg.tol:
        raise SolverError(f"{what}: conjugate gradients stopped at relative residual {relres:.3e} "
                          f"after {iters} iterations", residual=relres, iterations=iters)
    return x


def _check_grid(*fields):
    g = fields[0].grid
    for f in fields[1:]:
        if f.grid != g:
            raise DomainError("fields live on different grids")
    return g


def solve_u(v: ScalarField, w: WeightField, u0: ScalarField, cfg: SolverConfig,
            x0: Optional[ScalarField] = None) -> ScalarField:
    """Minimize ``sum (v^2 + k) |grad u|^2 omega h^N + lam sum (u - u0)^2 h^N`` over u."""
    g = _check_grid(v, u0)
    if cfg.lam == 0:
        raise SingularSystemError("lam = 0 leaves the u-step without a unique minimizer")
    om = w.on_grid(g)
    # divided by lam, so v = 0 returns u0 without rounding
    kappa = (v.samples ** 2 + cfg.v_floor) * om / cfg.lam
    ex, ey = edge_weights(kappa, g)
    diag = np.ones(g.shape)
    rhs = u0.samples
    start = (u0 if x0 is None else x0).samples
    x = _solve(g, diag, ex, ey, rhs, start, cfg, "u-step")
    return ScalarField(g, x.reshape(g.shape))


def solve_v(u: ScalarField, w: WeightField, cfg: SolverConfig,
            x0: Optional[ScalarField] = None) -> ScalarField:
    """Minimize the v-dependent part of the energy; the result is clamped to [0, 1]."""
    g = u.grid
    if x0 is not None:
        _check_grid(u, x0)
    om = w.on_grid(g)
    a, b, eps = cfg.normalization.a, cfg.normalization.b, cfg.eps
    ex, ey = edge_weights(a * eps * om, g)
    diag = grad_sq(u) * om + (b / eps) * om
    rhs = (b / eps) * om
    start = np.ones(g.shape) if x0 is None else x0.samples
    x = _solve(g, diag, ex, ey, rhs, start, cfg, "v-step")
    return ScalarField(g, np.clip(x.reshape(g.shape), 0.0, 1.0))


# -- outer loop -----------------------------------------------------------------

def energy_report(u, v, w, u0, cfg: SolverConfig) -> EnergyReport:
    """Energy minimized by the solver (includes the ``v_floor`` contribution)."""
    rep = at_energy(u, v, w, cfg.eps, cfg.normalization, cfg.lam, u0)
    if cfg.v_floor == 0:
        return rep
    extra = cfg.v_floor * float(np.sum(grad_sq(u) * w.on_grid(u.grid)) * u.grid.cell_volume)
    return EnergyReport.make(rep.grad_term + extra, rep.phase_term, 0.0, rep.fidelity,
                             rep.epsilon, rep.normalization)


def outer_step(u, v, w, u0, cfg: SolverConfig):
    """One v-step followed by one u-step; returns ``(u, v, (E_half, E_full))``."""
    v = solve_v(u, w, cfg, x0=v)
    e1 = energy_report(u, v, w, u0, cfg)
    u = solve_u(v, w, u0, cfg, x0=u)
    e2 = energy_report(u, v, w, u0, cfg)
    return u, v, (e1, e2)


def alternate(u0: ScalarField, w: WeightField, cfg: SolverConfig) -> SolveResult:
    """Alternate exact v- and u-steps from ``u = u0, v = 1`` until stationary.

    Hitting ``max_outer`` returns ``converged=False`` rather than raising.
    """
    if not np.all(np.isfinite(u0.samples)):
        raise ValidationError("u0 must be finite")
    if cfg.lam == 0:
        raise SingularSystemError("lam = 0 leaves the u-step without a unique minimizer")
    u = u0
    v = ScalarField.constant(u0.grid, 1.0)
    stages = []
    trace = []
    converged = False
    for k, eps in enumerate(cfg.schedule()):
        scfg = dataclasses.replace(cfg, eps=eps)
        prev = energy_report(u, v, w, u0, scfg)
        trace = [prev]
        converged = False
        it = 0
        while it < cfg.max_outer:
            u, v, (e1, e2) = outer_step(u, v, w, u0, scfg)
            trace.extend((e1, e2))
            it += 1
            if _stalled(prev.total, e2.total, cfg.outer_tol):
                converged = True
                break
            prev = e2
        stages.append(it)
    return SolveResult(u, v, tuple(trace), stages[-1], converged, tuple(stages))


def _stalled(before: float, after: float, tol: float) -> bool:
    if before <= 0.0:
        return True
    return (before - after) / before < tol
