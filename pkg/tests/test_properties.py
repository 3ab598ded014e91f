import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import hausdorff_bruteforce
from wams.energy import at_energy, hausdorff_interval
from wams.fields import Grid, PiecewiseField, ScalarField, gradient, sample
from wams.profiles import tilde_v
from wams.solver import SolverConfig, solve_v
from wams.weights import Box, WeightField, weighted_inner

D1 = [(-1.0, 1.0)]
SETTINGS = settings(max_examples=60, deadline=None,
                    suppress_health_check=[HealthCheck.too_slow])

# magnitudes kept away from the underflow range so squares stay representable
finite = st.just(0.0) | st.floats(1e-6, 10) | st.floats(-10, -1e-6)
values = arrays(np.float64, st.integers(3, 30), elements=finite)
positive = st.floats(0.1, 10.0)


@st.composite
def weights_1d(draw, max_boxes=5):
    k = draw(st.integers(1, max_boxes))
    cuts = sorted(set(draw(st.lists(st.floats(-0.9, 0.9), min_size=k - 1, max_size=k - 1))))
    cuts = [c for i, c in enumerate(cuts) if i == 0 or c - cuts[i - 1] > 1e-3]
    edges = [-1.0] + cuts + [1.0]
    vals = draw(st.lists(positive, min_size=len(edges) - 1, max_size=len(edges) - 1))
    return WeightField(D1, [Box((a, b), v) for a, b, v in zip(edges[:-1], edges[1:], vals)])


@st.composite
def field_pair(draw):
    n = draw(st.integers(3, 30))
    g = Grid(D1, (n,))
    a = draw(arrays(np.float64, n, elements=finite))
    b = draw(arrays(np.float64, n, elements=finite))
    return ScalarField(g, a), ScalarField(g, b)


interval = st.tuples(st.floats(0, 1), st.floats(0, 1)).map(sorted)


@SETTINGS
@given(field_pair(), finite, finite)
def test_gradient_is_linear(pair, a, b):
    f, g = pair
    lhs = gradient(ScalarField(f.grid, a * f.samples + b * g.samples))[0].samples
    rhs = a * gradient(f)[0].samples + b * gradient(g)[0].samples
    scale = 1 + np.abs(lhs).max()
    assert np.allclose(lhs, rhs, rtol=0, atol=1e-9 * scale)


@SETTINGS
@given(interval, interval, interval)
def test_hausdorff_is_a_metric(p, q, r):
    d = hausdorff_interval
    assert d(*p, *q) == d(*q, *p)
    assert d(*p, *p) == 0.0
    assert d(*p, *r) <= d(*p, *q) + d(*q, *r) + 1e-15
    assert 0.0 <= d(*p, *q) <= 1.0


@SETTINGS
@given(interval, interval)
def test_hausdorff_matches_bruteforce(p, q):
    # the brute-force search resolves delta on a 1e-4 grid
    assert abs(hausdorff_interval(*p, *q) - hausdorff_bruteforce(*p, *q)) <= 1e-4 + 1e-12


@SETTINGS
@given(weights_1d(), st.floats(0.1, 10.0))
def test_weight_scaling(w, c):
    x = np.linspace(-0.999, 0.999, 57)
    s = w.scaled(c)
    assert np.allclose(s.evaluate(x), c * w.evaluate(x), rtol=1e-14)
    assert s.lower_bound == c * w.lower_bound
    assert np.allclose(w.normalized().values.min(), 1.0)


@SETTINGS
@given(weights_1d(), st.data())
def test_weight_bounded_below(w, data):
    x = np.random.default_rng(data.draw(st.integers(0, 2 ** 32 - 1))).uniform(-1, 1, 10_000)
    assert np.all(w.evaluate(x) >= w.lower_bound)


@SETTINGS
@given(field_pair(), weights_1d(), finite)
def test_weighted_inner_product(pair, w, c):
    f, g = pair
    ip = weighted_inner
    assert ip(f, g, w) == ip(g, f, w)
    scale = 1 + abs(ip(f, f, w)) + abs(ip(g, g, w))
    h = ScalarField(f.grid, c * f.samples + g.samples)
    assert abs(ip(h, g, w) - (c * ip(f, g, w) + ip(g, g, w))) <= 1e-9 * scale * (1 + abs(c))
    assert ip(f, f, w) >= 0.0
    if np.any(f.samples != 0):
        assert ip(f, f, w) > 0.0


@SETTINGS
@given(field_pair(), weights_1d(), st.floats(0.1, 10.0), st.floats(0.01, 0.5))
def test_at_energy_is_homogeneous_in_weight(pair, w, c, eps):
    u, v = pair
    v = ScalarField(v.grid, np.abs(np.tanh(v.samples)))
    a = at_energy(u, v, w, eps).total
    b = at_energy(u, v, w.scaled(c), eps).total
    assert np.isclose(b, c * a, rtol=1e-12, atol=0)


@SETTINGS
@given(st.floats(1e-4, 0.9), st.lists(st.floats(0, 3), min_size=2, max_size=50))
def test_tilde_v_monotone_and_bounded(eps, ts):
    t = np.sort(ts)
    v = tilde_v(eps, t)
    assert np.all(np.diff(v) >= 0)
    assert np.all((v >= 0) & (v <= 1))


@SETTINGS
@given(st.floats(1e-4, 0.9), st.sampled_from([0.0, 1.0]))
def test_tilde_v_continuous_at_breakpoints(eps, which):
    t0 = eps * eps if which == 0.0 else np.sqrt(eps) + eps * eps
    # Lipschitz with constant 1 / (2 eps) across both breakpoints
    d = 1e-10
    assert abs(tilde_v(eps, t0 + d) - tilde_v(eps, t0 - d)) <= (2 * d) / (2 * eps) * (1 + 1e-6)


@SETTINGS
@given(st.integers(2, 12), st.integers(1, 6), st.data())
def test_sample_is_idempotent(n, m, data):
    g = Grid(D1, (n * m,))
    edges = np.linspace(-1, 1, n + 1)
    vals = data.draw(st.lists(finite, min_size=n, max_size=n))
    p = PiecewiseField.intervals(D1, list(edges[1:-1]), [[c] for c in vals])
    s = sample(p, g)
    # piecewise constant on the grid's own cells reproduces the samples
    q = PiecewiseField.intervals(D1, list(np.linspace(-1, 1, n * m + 1)[1:-1]),
                                 [[c] for c in s.samples])
    assert np.array_equal(sample(q, g).samples, s.samples)


@SETTINGS
@given(values, weights_1d(), st.floats(0.1, 10.0))
def test_solve_v_invariant_under_weight_scaling(u, w, c):
    g = Grid(D1, (u.size,))
    f = ScalarField(g, u)
    cfg = SolverConfig(eps=0.1)
    a = solve_v(f, w, cfg).samples
    b = solve_v(f, w.scaled(c), cfg).samples
    assert np.allclose(a, b, rtol=0, atol=1e-10)
