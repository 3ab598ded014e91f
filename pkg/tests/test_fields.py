import numpy as np
import pytest

from wams.errors import DomainError, ValidationError
from wams.fields import (Grid, JumpSet, PiecewiseField, ScalarField, Segment, gradient,
                         read_field, read_jumps, read_piecewise, sample, write_field)


def test_grid_spacing_and_header_roundtrip():
    g = Grid([(-1.0, 1.0), (0.0, 3.0)], (4, 6))
    assert g.spacing == (0.5, 0.5)
    assert g.shape == (6, 4)
    assert Grid.from_header(g.header()) == g


@pytest.mark.parametrize("counts", [(1,), (0,), (3, 1)])
def test_grid_rejects_too_few_cells(counts):
    with pytest.raises(ValidationError):
        Grid([(0, 1)] * len(counts), counts)


def test_grid_cap():
    with pytest.raises(ValidationError):
        Grid([(0, 1), (0, 1)], (64, 64), max_cells=1000)


def test_from_spacing_puts_midpoint_on_a_face():
    g = Grid.from_spacing([(-1, 1)], 0.3)
    assert g.counts[0] % 2 == 0
    assert g.spacing[0] <= 0.3
    assert not np.any(np.isclose(g.centers(0), 0.0))


def test_scalar_field_validation():
    g = Grid([(0, 1)], (4,))
    with pytest.raises(ValidationError):
        ScalarField(g, np.zeros(5))
    with pytest.raises(ValidationError):
        ScalarField(g, [0, 1, np.nan, 2])
    f = ScalarField(g, np.arange(4.0))
    with pytest.raises(ValueError):
        f.samples[0] = 3.0


def test_sample_constant():
    p = PiecewiseField.constant([(-1, 1)], 3.0)
    f = sample(p, Grid([(-1, 1)], (7,)))
    assert np.all(f.samples == 3.0)


def test_sample_step_avoiding_zero():
    p = PiecewiseField.step([(-1, 1)], 0.0, -1.0, 1.0)
    g = Grid([(-1, 1)], (8,))
    assert np.array_equal(sample(p, g).samples, np.sign(g.centers(0)))


def test_sample_step_center_on_jump_averages():
    p = PiecewiseField.step([(-1, 1)], 0.0, -1.0, 1.0)
    g = Grid([(-1, 1)], (5,))
    s = sample(p, g).samples
    assert s[2] == 0.0
    assert np.array_equal(s[[0, 1, 3, 4]], [-1, -1, 1, 1])


def test_sample_domain_mismatch():
    p = PiecewiseField.constant([(-1, 1)], 1.0)
    with pytest.raises(DomainError):
        sample(p, Grid([(0, 1)], (4,)))


def test_sample_2d_boxes():
    p = PiecewiseField.boxes([(-1, 1), (-1, 1)], [(-1, 0, -1, 1), (0, 1, -1, 1)],
                             [[[0.0]], [[0.0, 2.0]]])
    g = Grid([(-1, 1), (-1, 1)], (4, 4))
    x, y = g.coords()
    assert np.allclose(sample(p, g).samples, np.where(x > 0, 2 * y, 0.0))


def test_gradient_constant_is_zero():
    g = Grid([(0, 1), (0, 1)], (5, 3))
    for comp in gradient(ScalarField.constant(g, 4.2)):
        assert np.all(comp.samples == 0.0)


def test_gradient_affine_1d():
    g = Grid([(0, 1)], (10,))
    d, = gradient(ScalarField(g, g.centers(0)))
    assert np.allclose(d.samples, 1.0, rtol=0, atol=1e-12)


def test_gradient_affine_2d():
    g = Grid([(0, 1), (-1, 2)], (6, 9))
    gx, gy = gradient(ScalarField.from_function(g, lambda x, y: 2 * x + 3 * y))
    assert np.allclose(gx.samples, 2.0, atol=1e-12)
    assert np.allclose(gy.samples, 3.0, atol=1e-12)


def test_upper_boundary_repeats_last_difference():
    g = Grid([(0, 1)], (4,))
    d, = gradient(ScalarField(g, [0.0, 1.0, 4.0, 9.0]))
    assert d.samples[-1] == d.samples[-2]


def test_jumpset_invariants():
    with pytest.raises(ValidationError):
        JumpSet.at(0.1, 0.1)
    with pytest.raises(ValidationError):
        Segment((0, 0), (0, 1), (0.9, 0.0))
    js = JumpSet.at(0.5, -0.5)
    assert js.points == (-0.5, 0.5)
    with pytest.raises(ValidationError):
        JumpSet.at(1.0).check_interior(((-1.0, 1.0),))


def test_segment_through_orientation():
    s = Segment.through((0, -1), (0, 1), toward=(1, 0))
    assert s.normal == (1.0, 0.0)
    assert s.length == 2.0


def test_piecewise_limits_and_degree_cap():
    p = PiecewiseField.intervals([(-1, 1)], [0.0], [[1.0, 2.0], [5.0]])
    assert p.limits(0.0) == (1.0, 5.0)
    with pytest.raises(ValidationError):
        PiecewiseField.intervals([(-1, 1)], [], [[1, 2, 3, 4, 5]])


def test_boxes_must_tile():
    with pytest.raises(ValidationError):
        PiecewiseField.boxes([(-1, 1), (-1, 1)], [(-1, 0, -1, 1)], [[[1.0]]])


def test_boxes_derive_jumps_only_where_values_differ():
    dom = [(-1, 1), (-1, 1)]
    same = PiecewiseField.boxes(dom, [(-1, 0, -1, 1), (0, 1, -1, 1)], [[[1.0]], [[1.0]]])
    assert same.jumps.is_empty()
    step = PiecewiseField.step(dom, 0.0, 0.0, 1.0)
    assert len(step.jumps) == 1 and step.jumps.measure() == 2.0
    # normal points toward the larger value
    assert step.jumps.segments[0].normal == (1.0, 0.0)


@pytest.mark.parametrize("shape", [((-1, 1),), ((-1, 1), (0, 2))])
def test_field_file_roundtrip(tmp_path, shape):
    counts = (5,) if len(shape) == 1 else (4, 3)
    g = Grid(shape, counts)
    f = ScalarField(g, np.random.default_rng(0).standard_normal(g.shape))
    path = tmp_path / ("f.csv" if len(shape) == 1 else "f.pgm")
    write_field(f, path)
    back = read_field(path)
    assert back.grid == g
    tol = 0.0 if len(shape) == 1 else (f.samples.max() - f.samples.min()) / 65535
    assert np.allclose(back.samples, f.samples, rtol=0, atol=tol)


def test_piecewise_and_jump_files(tmp_path):
    pw = tmp_path / "u.txt"
    pw.write_text("domain -1 1\n-1 0 0\n0 1 1 0.5\n")
    u = read_piecewise(pw)
    assert u.limits(0.0) == (0.0, 1.0)
    js = tmp_path / "j.txt"
    js.write_text("0 -1 0 1 1 0\n")
    assert read_jumps(js).measure() == 2.0
    with pytest.raises(ValidationError, match="missing"):
        read_piecewise(tmp_path / "missing.txt")
