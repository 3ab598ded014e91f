"""Epsilon sweeps and jump-cost probes for the Gamma-limit checks."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from ._parallel import ordered_map
from .energy import (DEFAULT_NORMALIZATION, CSV_HEADER, EnergyReport, Normalization,
                     at_energy, ms_energy, phase_density)
from .errors import ResolutionError, ValidationError, WamsError
from .fields import Grid, JumpSet, PiecewiseField, ScalarField, sample
from .profiles import distance_field, optimal_profile, recovery_pair_jump
from .solver import SolverConfig, alternate, solve_v
from .weights import WeightField

MODES = ("solve", "fixed-u", "recovery")


def probe_radius(eps: float) -> float:
    """Default probe radius ``sqrt(eps) + 2 eps^2``."""
    return float(np.sqrt(eps) + 2.0 * eps * eps)


def jump_cost_probe(v: ScalarField, w: WeightField, eps: float,
                    norm: Normalization = DEFAULT_NORMALIZATION, jumps=None,
                    rho: Optional[float] = None) -> float:
    """Phase energy of the cells within distance ``rho`` of ``jumps``.

    ``jumps`` is a :class:`JumpSet` or, in 1D, a sequence of points. The
    default radius is :func:`probe_radius`.
    """
    g = v.grid
    if jumps is None:
        raise ValidationError("jump_cost_probe needs the jump locations")
    if not isinstance(jumps, JumpSet):
        jumps = JumpSet.at(*np.atleast_1d(jumps))
    rho = probe_radius(eps) if rho is None else float(rho)
    h = max(g.spacing)
    if rho < 2 * h:
        raise ResolutionError(f"probe radius {rho:.4g} is below two cells (h = {h:.4g})")
    dens = phase_density(v, w.on_grid(g), eps, norm)
    near = distance_field(jumps, g).samples <= rho
    return float(np.sum(np.where(near, dens, 0.0)))


@dataclass(frozen=True)
class Scenario:
    """What a sweep evaluates at each width.

    ``mode`` is ``"solve"`` (alternating solve from ``u0``), ``"fixed-u"``
    (``u = u0`` held fixed, v-step only) or ``"recovery"`` (the explicit
    jump recovery pair, 1D).
    """

    u0: PiecewiseField
    weight: WeightField
    mode: str = "solve"
    lam: float = 1.0
    normalization: Normalization = DEFAULT_NORMALIZATION
    continuation_start: Optional[float] = None
    eta: float = 0.1
    reference: Optional[PiecewiseField] = None

    def __post_init__(self):
        object.__setattr__(self, "normalization", Normalization.parse(self.normalization))
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode == "recovery" and self.u0.dim != 1:
            raise ValidationError("recovery sweeps are 1D")
        if self.lam < 0:
            raise ValidationError("lam must be >= 0")


@dataclass(frozen=True)
class SweepPlan:
    """Decreasing widths, grid rule ``h = eps / h_ratio`` and a scenario."""

    scenario: Scenario
    eps: Tuple[float, ...] = (0.1, 0.05, 0.025, 0.0125, 0.00625)
    h_ratio: float = 20.0
    counts: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        eps = tuple(float(e) for e in self.eps)
        object.__setattr__(self, "eps", eps)
        if not eps:
            raise ValidationError("a sweep needs at least one eps")
        if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValidationError(f"eps sequence must be positive and strictly decreasing: {eps}")
        if self.h_ratio < 20:
            raise ValidationError("grid rule requires h <= eps / 20")

    @classmethod
    def halving(cls, scenario, start=0.1, steps=5, **kw):
        return cls(scenario, tuple(start / 2 ** k for k in range(steps)), **kw)

    def grid(self, eps: float) -> Grid:
        dom = self.scenario.u0.domain
        if self.counts is not None:
            return Grid(dom, self.counts)
        return Grid.from_spacing(dom, eps / self.h_ratio)


@dataclass(frozen=True)
class SweepRow:
    eps: float
    h: float
    report: EnergyReport
    probe: float
    iterations: int
    converged: bool


@dataclass(frozen=True)
class Verdict:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class SweepReport:
    plan: SweepPlan
    rows: Tuple[SweepRow, ...]
    reference: EnergyReport
    lower_trace_cost: float
    verdicts: Tuple[Verdict, ...] = ()
    error: Optional[str] = None
    fields: tuple = field(default=(), repr=False, compare=False)

    @property
    def probes(self):
        return [r.probe for r in self.rows]

    @property
    def passed(self) -> bool:
        return self.error is None and all(v.passed for v in self.verdicts)

    def to_csv(self) -> str:
        lines = [CSV_HEADER + ",h,probe,iterations,converged"]
        for r in self.rows:
            lines.append(f"{r.report.csv_row()},{r.h!r},{r.probe!r},{r.iterations},{int(r.converged)}")
        return "\n".join(lines) + "\n"

    def verdict_text(self) -> str:
        out = [f"reference_total {self.reference.total!r}",
               f"lower_trace_cost {self.lower_trace_cost!r}"]
        for v in self.verdicts:
            out.append(f"{'PASS' if v.passed else 'FAIL'} {v.name}: {v.detail}")
        if self.error:
            out.append(f"ERROR {self.error}")
        out.append(f"overall {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(out) + "\n"


def _run_step(plan: SweepPlan, eps: float):
    sc = plan.scenario
    g = plan.grid(eps)
    norm = sc.normalization
    w = sc.weight
    jumps = sc.u0.jumps
    if sc.mode == "recovery":
        pair = recovery_pair_jump(sc.u0, w, eps, optimal_profile(sc.eta), grid=g, norm=norm)
        u, v = pair.u, pair.v
        rep = at_energy(u, v, w, eps, norm)
        jumps = JumpSet.at(pair.center)
        its, conv = 0, True
    elif sc.mode == "fixed-u":
        u = sample(sc.u0, g)
        cfg = SolverConfig(eps=eps, normalization=norm, lam=sc.lam)
        v = solve_v(u, w, cfg)
        rep = at_energy(u, v, w, eps, norm)
        its, conv = 1, True
    else:
        u0 = sample(sc.u0, g)
        cfg = SolverConfig(eps=eps, normalization=norm, lam=sc.lam,
                           continuation_start=sc.continuation_start)
        res = alternate(u0, w, cfg)
        u, v = res.u, res.v
        rep = res.energy
        its, conv = res.iterations, res.converged
    if jumps.is_empty():
        probe = 0.0
    else:
        probe = jump_cost_probe(v, w, eps, norm, jumps)
    return SweepRow(eps, max(g.spacing), rep, probe, its, conv), (u, v)


def _count_nonincreasing(seq):
    return sum(1 for a, b in zip(seq, seq[1:]) if b <= a + 1e-12)


def gamma_sweep(plan: SweepPlan, threads: Optional[int] = None) -> SweepReport:
    """Run every width of ``plan`` and judge the trends.

    A failing step ends the sweep; the report then holds the rows before it
    and the error message.
    """
    sc = plan.scenario
    ref_field = sc.reference if sc.reference is not None else sc.u0
    u0_ref = sc.u0 if sc.mode == "solve" and sc.lam > 0 else None
    reference = ms_energy(ref_field, sc.weight, sc.lam if u0_ref is not None else 0.0, u0_ref)
    cost = ms_energy(ref_field, sc.weight).jump_term
    results = ordered_map(lambda e: _run_step(plan, e), plan.eps, threads)
    rows, fields, error = [], [], None
    for eps, (res, exc) in zip(plan.eps, results):
        if exc is not None:
            if not isinstance(exc, WamsError):
                raise exc
            error = f"eps={eps!r}: {type(exc).__name__}: {exc}"
            break
        rows.append(res[0])
        fields.append(res[1])
    verdicts = _verdicts(sc, rows, cost)
    return SweepReport(plan, tuple(rows), reference, cost, tuple(verdicts), error, tuple(fields))


def _verdicts(sc: Scenario, rows, cost):
    out = []
    if not rows:
        return out
    probes = [r.probe for r in rows]
    ok = all(r.probe <= r.report.phase_term + 1e-12 for r in rows)
    out.append(Verdict("probe_below_phase", ok, "probe <= phase_term + 1e-12 at every eps"))
    if sc.mode == "recovery":
        bound = (1 + sc.eta) * cost + 0.05
        ok = all(p <= bound for p in probes)
        out.append(Verdict("within_budget", ok,
                           f"max probe {max(probes):.6g} vs (1+eta)*cost + 0.05 = {bound:.6g}"))
        return out
    steps = len(probes) - 1
    mono = _count_nonincreasing(probes)
    need = max(steps - 1, 0)
    out.append(Verdict("probe_trend", mono >= need,
                       f"{mono} of {steps} steps nonincreasing (need {need})"))
    final = probes[-1]
    if cost == 0:
        ok = abs(final) <= 1e-12
        detail = f"final probe {final:.6g}, lower-trace cost 0"
    else:
        ok = abs(final - cost) <= 0.1 * cost
        detail = f"final probe {final:.6g} vs lower-trace cost {cost:.6g} (10%)"
    out.append(Verdict("final_near_cost", ok, detail))
    return out
