import numpy as np
import pytest

from mfflow.ensemble import eval_network
from mfflow.sampling import RngSpec, init_ensemble, make_dataset, sample_uniform_cube
from mfflow.targets import TargetFunction, eval_target


def test_uniform_cube_mean():
    x = sample_uniform_cube(1000, 8, 1.0, RngSpec(0))
    assert np.all(np.abs(x.mean(axis=0)) <= 0.1)


def test_uniform_cube_deterministic():
    a = sample_uniform_cube(50, 3, 1.0, RngSpec(42, "dataset"))
    b = sample_uniform_cube(50, 3, 1.0, RngSpec(42, "dataset"))
    np.testing.assert_array_equal(a, b)


def test_uniform_cube_half_width():
    x = sample_uniform_cube(5000, 4, 0.5, RngSpec(1))
    assert x.min() >= -0.5 and x.max() <= 0.5


@pytest.mark.parametrize("n,d,hw", [(0, 2, 1.0), (5, 0, 1.0), (5, 2, 0.0), (5, 2, -1.0)])
def test_uniform_cube_rejects_bad_args(n, d, hw):
    with pytest.raises(ValueError):
        sample_uniform_cube(n, d, hw, RngSpec(0))


def test_substreams_differ():
    root = RngSpec(7)
    a = sample_uniform_cube(10, 2, 1.0, root.substream("dataset"))
    b = sample_uniform_cube(10, 2, 1.0, root.substream("population"))
    assert not np.array_equal(a, b)


def test_rngspec_validation():
    with pytest.raises(ValueError):
        RngSpec(-1)
    with pytest.raises(ValueError):
        RngSpec(0, "bogus")


def test_dataset_labels_exact():
    t = TargetFunction("max-difference", 5)
    ds = make_dataset(t, 100, 1.0, RngSpec(3, "dataset"))
    for x, y in zip(ds.points, ds.labels):
        assert y == eval_target(t, x)


def test_dataset_csv(tmp_path):
    ds = make_dataset(TargetFunction("norm-difference", 2), 3, 1.0, RngSpec(0))
    ds.to_csv(tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == "x_1,x_2,y"
    assert len(lines) == 4
    assert float(lines[1].split(",")[2]) == ds.labels[0]


def test_init_bias_constant():
    ens = init_ensemble(10, 3, RngSpec(0))
    assert np.all(ens.b == 0.125)


def test_init_variances():
    ens = init_ensemble(5000, 9, RngSpec(0, "init"))
    assert 0.92 <= ens.a.var(ddof=1) <= 1.08
    wv = ens.w.var(axis=0, ddof=1)
    assert np.all((wv >= 0.184) & (wv <= 0.216))


def test_init_prediction_near_zero():
    m = 2000
    ens = init_ensemble(m, 8, RngSpec(11, "init"))
    x = sample_uniform_cube(2000, 8, 1.0, RngSpec(11, "population"))
    assert abs(np.mean(eval_network(ens, x))) <= 5 / np.sqrt(m)


def test_init_deterministic():
    a = init_ensemble(20, 4, RngSpec(5, "init"))
    b = init_ensemble(20, 4, RngSpec(5, "init"))
    np.testing.assert_array_equal(a.theta(), b.theta())
