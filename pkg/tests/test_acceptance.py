"""Acceptance suite: ten criteria at their stated tolerances and time limits.

Each criterion records one PASS/FAIL line in ``RESULTS``; ``conftest.py``
prints them at the end of the session. Running this file directly prints
the same lines.
"""
import time

import numpy as np
import pytest

from oracles import dense_u, dense_v, hausdorff_bruteforce, profile_energy_oracle
from wams.bilevel import dyadic_partition, scheme_b, train, two_noise_synthetic
from wams.energy import hausdorff_interval, ms_energy, slicing_lower_bound_check
from wams.fields import Grid, JumpSet, PiecewiseField, ScalarField, Segment
from wams.gammalab import jump_cost_probe
from wams.profiles import optimal_profile, recovery_pair_jump, tilde_v, tilde_v_plateau
from wams.solver import SolverConfig, alternate, solve_u, solve_v
from wams.weights import Box, WeightField

RESULTS = {}


def record(n, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    RESULTS[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  ({detail}; {elapsed:.2f}s < {limit}s)"
    return ok


def _step_1d(eps):
    g = Grid.from_spacing([(-1, 1)], eps / 20)
    x = g.centers(0)
    return g, ScalarField(g, (x > 0).astype(float))


# 1 -------------------------------------------------------------------------------

def criterion_1():
    t0 = time.perf_counter()
    w = WeightField.constant([(-1, 1)], 1.0)
    probes = []
    for eps in (0.04, 0.02, 0.01):
        g, u = _step_1d(eps)
        v = solve_v(u, w, SolverConfig(eps=eps))
        probes.append(jump_cost_probe(v, w, eps, jumps=[0.0]))
    near = abs(probes[-1] - 1.0) <= 0.1
    decreasing = sum(b < a for a, b in zip(probes, probes[1:]))
    dt = time.perf_counter() - t0
    detail = (f"probes {', '.join(f'{p:.4f}' for p in probes)}; |final-1|<=0.1: {near}; "
              f"decreasing in {decreasing} of 2 steps (need 2)")
    return record(1, near and decreasing >= 2, detail, dt, 10)


# 2 -------------------------------------------------------------------------------

def criterion_2():
    t0 = time.perf_counter()
    w = WeightField.step([(-1, 1)], 0.0, 1.0, 3.0)
    probes = []
    for eps in (0.04, 0.02, 0.01):
        g, u0 = _step_1d(eps)
        res = alternate(u0, w, SolverConfig(eps=eps, lam=10.0, continuation_start=0.32))
        probes.append(jump_cost_probe(res.v, w, eps, jumps=[0.0]))
    eps = 0.01
    u = PiecewiseField.step([(-1, 1)], 0.0, 0.0, 1.0)
    pair = recovery_pair_jump(u, w, eps, optimal_profile(0.1))
    oracle = jump_cost_probe(pair.v, w, eps, jumps=[pair.center])
    ok = probes[-1] < 1.5 and probes[-1] < probes[-2] and oracle <= 1.1 * 1.0 + 0.05
    dt = time.perf_counter() - t0
    detail = (f"solver probes {', '.join(f'{p:.4f}' for p in probes)}; "
              f"recovery-pair probe {oracle:.4f} <= 1.15")
    return record(2, ok, detail, dt, 30)


# 3 -------------------------------------------------------------------------------

def _d5(f, t, d):
    return (-f(t + 2 * d) + 8 * f(t + d) - 8 * f(t - d) + f(t - 2 * d)) / (12 * d)


def criterion_3():
    t0 = time.perf_counter()
    worst, bp_err = 0.0, 0.0
    for eps in (1e-2, 1e-3):
        lo, hi = eps * eps, np.sqrt(eps) + eps * eps
        d = 1e-6 * (hi - lo)
        ts = np.linspace(lo, hi, 102)[1:-1]
        f = lambda t: tilde_v(eps, t)  # noqa: E731
        res = np.abs(_d5(f, ts, d) - (1 - f(ts)) / (2 * eps))
        worst = max(worst, res.max())
        bp_err = max(bp_err, abs(tilde_v(eps, lo)),
                     abs(tilde_v(eps, hi) - (1 - np.exp(-1 / (2 * np.sqrt(eps))))),
                     abs(tilde_v_plateau(eps) - (1 - np.exp(-1 / (2 * np.sqrt(eps))))))
    dt = time.perf_counter() - t0
    return record(3, worst <= 1e-8 and bp_err <= 1e-12,
                  f"max ODE residual {worst:.2e} <= 1e-8; breakpoint error {bp_err:.1e} <= 1e-12", dt, 1)


# 4 -------------------------------------------------------------------------------

def criterion_4():
    t0 = time.perf_counter()
    vals = []
    ok = True
    for eta in (0.5, 0.1, 0.02):
        prof = optimal_profile(eta)
        e = profile_energy_oracle(prof.T)
        vals.append(e)
        ok &= 1.0 <= e <= 1.0 + eta
    dt = time.perf_counter() - t0
    return record(4, ok, "oracle energies " + ", ".join(f"{v:.9f}" for v in vals), dt, 1)


# 5 -------------------------------------------------------------------------------

def _random_weight(rng, dom, dim):
    if dim == 1:
        (a, b), = dom
        cut = rng.uniform(a + 0.2 * (b - a), a + 0.8 * (b - a))
        return WeightField.step(dom, cut, *rng.uniform(1, 5, 2))
    (xa, xb), (ya, yb) = dom
    cx = rng.uniform(xa + 0.2, xb - 0.2)
    cy = rng.uniform(ya + 0.2, yb - 0.2)
    boxes = [Box((xa, cx, ya, cy), rng.uniform(1, 5)), Box((cx, xb, ya, cy), rng.uniform(1, 5)),
             Box((xa, cx, cy, yb), rng.uniform(1, 5)), Box((cx, xb, cy, yb), rng.uniform(1, 5))]
    return WeightField(dom, boxes)


def criterion_5():
    t0 = time.perf_counter()
    rng = np.random.default_rng(5)
    worst = 0.0
    cases = [(1, (int(rng.integers(2, 9)),)) for _ in range(20)]
    cases += [(2, tuple(int(c) for c in rng.integers(2, 5, 2))) for _ in range(5)]
    for dim, counts in cases:
        dom = [(-1.0, 1.0)] * dim
        g = Grid(dom, counts)
        w = _random_weight(rng, g.bounds, dim)
        om = w.on_grid(g)
        eps, lam = rng.uniform(0.05, 0.5), rng.uniform(0.5, 10)
        cfg = SolverConfig(eps=eps, lam=lam, tol=1e-14)
        v = ScalarField(g, rng.random(g.shape))
        u0 = ScalarField(g, rng.standard_normal(g.shape))
        u = ScalarField(g, rng.standard_normal(g.shape))
        ru = dense_u(v.samples, om, u0.samples, lam, g.shape, g.spacing)
        rv = dense_v(u.samples, om, eps, 1.0, 0.25, g.shape, g.spacing)
        worst = max(worst, np.abs(solve_u(v, w, u0, cfg).samples - ru).max(),
                    np.abs(solve_v(u, w, cfg).samples - rv).max())
    descent = 0.0
    for k in range(20):
        dim = 1 if k < 14 else 2
        counts = (int(rng.integers(8, 40)),) if dim == 1 else (int(rng.integers(4, 10)),) * 2
        g = Grid([(-1.0, 1.0)] * dim, counts)
        w = _random_weight(rng, g.bounds, dim)
        u0 = ScalarField(g, rng.standard_normal(g.shape))
        res = alternate(u0, w, SolverConfig(eps=rng.uniform(0.05, 0.5), lam=rng.uniform(0.5, 10),
                                            max_outer=30))
        tot = np.array([r.total for r in res.trace])
        descent = max(descent, np.max(np.diff(tot), initial=-np.inf))
    dt = time.perf_counter() - t0
    return record(5, worst <= 1e-8 and descent <= 1e-10,
                  f"max |solver - dense| {worst:.1e} <= 1e-8; max energy increase {descent:.1e} <= 1e-10",
                  dt, 5)


# 6 -------------------------------------------------------------------------------

def _smooth(rng, g):
    x, y = g.coords()
    out = np.zeros(g.shape)
    for _ in range(4):
        kx, ky = rng.uniform(-3, 3, 2)
        out += rng.standard_normal() * np.sin(kx * x + ky * y + rng.uniform(0, 6))
    return out


def criterion_6():
    t0 = time.perf_counter()
    rng = np.random.default_rng(6)
    holds = True
    worst_gap = 0.0
    for _ in range(100):
        g = Grid([(-1.0, 1.0), (-1.0, 1.0)], tuple(int(c) for c in rng.integers(4, 24, 2)))
        w = _random_weight(rng, g.bounds, 2)
        u = ScalarField(g, _smooth(rng, g))
        v = ScalarField(g, 0.5 + 0.5 * np.tanh(_smooth(rng, g)))
        for nu in ((1.0, 0.0), (0.0, 1.0)):
            holds &= slicing_lower_bound_check(u, v, w, nu).holds
        # gradient parallel to nu: equality
        x, y = g.coords()
        ux = ScalarField(g, np.sin(2 * x) + x ** 2)
        uy = ScalarField(g, np.cos(3 * y) - y)
        for f, nu in ((ux, (1.0, 0.0)), (uy, (0.0, 1.0))):
            c = slicing_lower_bound_check(f, v, w, nu)
            worst_gap = max(worst_gap, abs(c.lhs - c.rhs) / max(c.lhs, 1e-300))
    dt = time.perf_counter() - t0
    return record(6, holds and worst_gap <= 1e-12,
                  f"inequality holds on 200 checks: {holds}; parallel-case relative gap {worst_gap:.1e}",
                  dt, 5)


# 7 -------------------------------------------------------------------------------

def criterion_7():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst, capped = 0.0, 0
    pairs = []
    for k in range(1000):
        span = 3.0 if k % 4 == 0 else 0.6
        a1, b1 = np.sort(rng.uniform(-span, span, 2))
        a2, b2 = np.sort(rng.uniform(-span, span, 2))
        pairs.append((a1, b1, a2, b2))
    pairs[:3] = [(0.0, 0.1, 5.0, 9.0), (0.1, 0.3, 0.2, 0.5), (-1.0, 1.0, -1.0, 1.0)]
    for p in pairs:
        got = hausdorff_interval(*p)
        ref = hausdorff_bruteforce(*p)
        capped += got == 1.0
        worst = max(worst, abs(got - ref))
    dt = time.perf_counter() - t0
    return record(7, worst <= 2e-4 and capped > 0,
                  f"max |formula - brute force| {worst:.1e} <= 2e-4 over 1000 pairs ({capped} capped)",
                  dt, 5)


# 8 -------------------------------------------------------------------------------

def criterion_8():
    t0 = time.perf_counter()
    g = Grid([(-1.0, 1.0), (-1.0, 1.0)], (256, 256))
    x, _ = g.coords()
    u0 = ScalarField(g, (x > 0).astype(float))
    w = WeightField.step(g.bounds, 0.0, 1.0, 3.0)
    eps = 0.02
    res = alternate(u0, w, SolverConfig(eps=eps, lam=10.0, continuation_start=0.32))
    line = JumpSet.of_segments(Segment((0.0, -1.0), (0.0, 1.0), (1.0, 0.0)))
    per_len = jump_cost_probe(res.v, w, eps, jumps=line) / line.measure()
    dt = time.perf_counter() - t0
    return record(8, 0.7 < per_len < 1.6, f"probe per unit length {per_len:.4f} in (0.7, 1.6)", dt, 120)


# 9 -------------------------------------------------------------------------------

def criterion_9():
    t0 = time.perf_counter()
    u0, ug = two_noise_synthetic()
    dom = u0.grid.bounds
    both = train(u0, ug, [dyadic_partition(dom, 0), dyadic_partition(dom, 1)])
    only0 = train(u0, ug, [dyadic_partition(dom, 0)])
    b = scheme_b(u0, ug)
    same = (only0.alphas == b.alphas and only0.score == b.score
            and np.array_equal(only0.u.samples, b.u.samples))
    dt = time.perf_counter() - t0
    return record(9, both.score <= only0.score and same,
                  f"score K in {{0,1}}: {both.score:.6g} <= K=0: {only0.score:.6g}; "
                  f"K=0 equals scheme B bit for bit: {same}", dt, 120)


# 10 ------------------------------------------------------------------------------

def _scenario_1d(rng):
    """Alternating low/high weight; u jumps on weight faces and inside low boxes."""
    edges = np.sort(rng.uniform(-0.9, 0.9, int(rng.integers(1, 5))))
    bounds = np.array([-1.0, *edges, 1.0])
    nb = len(edges) + 1
    vals = np.where(np.arange(nb) % 2 == 0, rng.uniform(1, 2, nb), rng.uniform(3, 4, nb))
    bump = np.where(np.arange(nb) % 2 == 1, rng.uniform(1.5, 9, nb), 1.0)
    boxes = lambda vv: [Box((bounds[i], bounds[i + 1]), vv[i]) for i in range(nb)]  # noqa: E731
    dom = [(-1.0, 1.0)]
    k = int(rng.integers(1, len(edges) + 1))
    ujumps = list(rng.choice(edges, size=k, replace=False))
    for i in range(0, nb, 2):
        a, b = bounds[i], bounds[i + 1]
        ujumps.append(rng.uniform(a + 0.25 * (b - a), b - 0.25 * (b - a)))
    ujumps = sorted(ujumps)
    coeffs = [rng.standard_normal(int(rng.integers(1, 4))) for _ in range(len(ujumps) + 1)]
    u = PiecewiseField.intervals(dom, ujumps, coeffs)
    return u, WeightField(dom, boxes(vals)), WeightField(dom, boxes(vals * bump))


def _scenario_2d(rng):
    """Checkerboard weight; u jumps along one vertical and one horizontal board line."""
    n = int(rng.integers(2, 6))
    xs = np.linspace(-1, 1, n + 1)
    boxes, boxes2 = [], []
    for j in range(n):
        for i in range(n):
            b = (xs[i], xs[i + 1], xs[j], xs[j + 1])
            if (i + j) % 2 == 0:
                val = rng.uniform(1, 2)
                boxes.append(Box(b, val))
                boxes2.append(Box(b, val))
            else:
                val = rng.uniform(3, 4)
                boxes.append(Box(b, val))
                boxes2.append(Box(b, val * rng.uniform(1.5, 9)))
    dom = [(-1.0, 1.0), (-1.0, 1.0)]
    cx, cy = xs[int(rng.integers(1, n))], xs[int(rng.integers(1, n))]
    ubox = [(-1, cx, -1, cy), (cx, 1, -1, cy), (-1, cx, cy, 1), (cx, 1, cy, 1)]
    coeffs = [[[rng.standard_normal(), rng.standard_normal()], [rng.standard_normal(), 0.0]]
              for _ in range(4)]
    u = PiecewiseField.boxes(dom, ubox, coeffs)
    return u, WeightField(dom, boxes), WeightField(dom, boxes2)


def criterion_10():
    t0 = time.perf_counter()
    rng = np.random.default_rng(10)
    identical, nonzero = 0, 0
    for k in range(50):
        u, w, w2 = (_scenario_1d if k % 2 == 0 else _scenario_2d)(rng)
        a, b = ms_energy(u, w).jump_term, ms_energy(u, w2).jump_term
        identical += a == b
        nonzero += a > 0
    dt = time.perf_counter() - t0
    return record(10, identical == 50 and nonzero == 50,
                  f"jump_term bit-identical in {identical}/50 scenarios", dt, 1)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("crit", [
    pytest.param(c, id=f"criterion_{i}", marks=[pytest.mark.slow] if i == 8 else [])
    for i, c in enumerate(CRITERIA, 1)
])
def test_criterion(crit):
    ok = crit()
    n = CRITERIA.index(crit) + 1
    print(RESULTS[n])
    assert ok, RESULTS[n]


if __name__ == "__main__":
    for c in CRITERIA:
        c()
        print(RESULTS[CRITERIA.index(c) + 1], flush=True)
