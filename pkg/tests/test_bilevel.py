import numpy as np
import pytest

from wams.bilevel import (DEFAULT_ALPHAS, PartitionSpec, default_config, dyadic_partition,
                          level2_alpha, scheme_b, train, two_noise_synthetic)
from wams.errors import GeometryError, PartitionError, ValidationError
from wams.fields import Grid, ScalarField, read_field
from wams.weights import read_weight_file

D1 = ((-1.0, 1.0),)


@pytest.fixture(scope="module")
def data():
    return two_noise_synthetic(128)


def test_default_alpha_grid():
    assert len(DEFAULT_ALPHAS) == 17
    assert DEFAULT_ALPHAS[0] == pytest.approx(1e-2) and DEFAULT_ALPHAS[-1] == pytest.approx(1e2)
    assert default_config().eps == 0.02


@pytest.mark.parametrize("K,count", [(0, 1), (1, 2), (2, 4), (4, 8)])
def test_dyadic_partition_counts(K, count):
    spec = dyadic_partition(D1, K)
    assert len(spec) == count
    if K:
        assert min(b - a for a, b in spec.cubes) >= 1.0 / K


def test_dyadic_partition_2d():
    spec = dyadic_partition(((-1, 1), (0, 1)), 2)
    assert len(spec) == 4 * 2


def test_partition_spec_validation():
    with pytest.raises(PartitionError):
        PartitionSpec(2, ((-1.0, 0.0), (0.0, 0.2), (0.2, 1.0)), D1)
    with pytest.raises(PartitionError):
        PartitionSpec(1, ((-1.0, 0.0),), D1)
    with pytest.raises(PartitionError):
        PartitionSpec(0, ((-1.0, 0.0), (0.0, 1.0)), D1)
    with pytest.raises(ValidationError):
        PartitionSpec(-1, ((-1.0, 1.0),), D1)


def test_level2_noiseless_pinned(data):
    _, ug = data
    alpha, scores = level2_alpha(ug, ug, (-1.0, 1.0))
    assert alpha == DEFAULT_ALPHAS[0]
    assert np.all(np.diff(scores) >= 0)
    assert scores[0] == pytest.approx(3.92031815877874e-05, rel=1e-6)


def test_level2_singleton_grid(data):
    u0, ug = data
    alpha, scores = level2_alpha(u0, ug, (-1.0, 0.0), alphas=[0.7])
    assert alpha == 0.7 and len(scores) == 1


def test_level2_ties_pick_smaller():
    g = Grid(D1, (32,))
    c = ScalarField.constant(g, 0.4)
    alpha, scores = level2_alpha(c, c, (-1.0, 1.0), alphas=[0.5, 2.0, 8.0])
    assert scores == (0.0, 0.0, 0.0) and alpha == 0.5


def test_level2_noise_levels(data):
    u0, ug = data
    strong, _ = level2_alpha(u0, ug, (-1.0, 0.0))
    weak, _ = level2_alpha(u0, ug, (0.0, 1.0))
    assert strong > weak


def test_level2_validation(data):
    u0, ug = data
    with pytest.raises(ValidationError):
        level2_alpha(u0, ug, (-1.0, 1.0), alphas=[])
    with pytest.raises(ValidationError):
        level2_alpha(u0, ug, (-1.0, 1.0), alphas=[1.0, -1.0])
    with pytest.raises(ValidationError):
        level2_alpha(u0, ug, (-1.0, 1.0), alphas=[2.0, 1.0])
    with pytest.raises(GeometryError):
        level2_alpha(u0, ug, (1.5, 2.0))


def test_train_k0_reproduces_scheme_b(data):
    u0, ug = data
    a = train(u0, ug, [dyadic_partition(D1, 0)])
    b = scheme_b(u0, ug)
    assert a.alphas == b.alphas and a.score == b.score
    assert np.array_equal(a.u.samples, b.u.samples)


def test_train_superset_optimality(data):
    u0, ug = data
    small = train(u0, ug, [dyadic_partition(D1, 0)])
    big = train(u0, ug, [dyadic_partition(D1, k) for k in (0, 1, 2)])
    assert big.score <= small.score
    assert big.score == min(s for _, s in big.candidate_scores)
    assert big.K >= 1


def test_train_noiseless_beats_every_fixed_alpha():
    _, ug = two_noise_synthetic(64)
    res = train(ug, ug, [dyadic_partition(D1, 0), dyadic_partition(D1, 1)])
    fixed = [s for r in res.table if r.candidate == 0 for s in [r.score]]
    assert res.score <= min(fixed) + 1e-15


def test_train_is_deterministic(data):
    u0, ug = data
    cands = [dyadic_partition(D1, k) for k in (0, 1)]
    a, b = train(u0, ug, cands, threads=1), train(u0, ug, cands, threads=3)
    assert a.table == b.table and np.array_equal(a.u.samples, b.u.samples)


def test_train_validation(data):
    u0, ug = data
    with pytest.raises(ValidationError):
        train(u0, ug, [])
    with pytest.raises(ValidationError):
        train(u0, ug, [dyadic_partition(((0.0, 1.0),), 0)])


def test_result_write(tmp_path, data):
    u0, ug = data
    res = train(u0, ug, [dyadic_partition(D1, 0), dyadic_partition(D1, 1)])
    paths = res.write(tmp_path)
    names = sorted(p.name for p in paths)
    assert names == ["candidates.csv", "scores.csv", "u.csv", "weight.txt"]
    assert (tmp_path / "scores.csv").read_text().startswith("candidate,cube,alpha,score")
    w = read_weight_file(tmp_path / "weight.txt")
    assert tuple(w.values) == res.alphas or len(set(res.alphas)) == 1
    assert np.array_equal(read_field(tmp_path / "u.csv").samples, res.u.samples)


def test_two_noise_synthetic_shape():
    u0, ug = two_noise_synthetic(100, seed=3)
    x = u0.grid.centers(0)
    left = (u0.samples - ug.samples)[x < 0].std()
    right = (u0.samples - ug.samples)[x > 0].std()
    assert left > 5 * right
