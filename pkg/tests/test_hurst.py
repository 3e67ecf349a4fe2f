import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfrl.hurst import AffineInT, Constant, GriddedTable, HurstField, Sinusoidal, eval_hurst, validate_hurst


def test_constant_eval():
    f = HurstField.constant([0.5, 0.5])
    np.testing.assert_array_equal(eval_hurst(f, [0.3, 0.7]), [0.5, 0.5])


def test_sinusoidal_at_zero(sin1):
    assert eval_hurst(sin1, [0.0])[0] == pytest.approx(0.5)


def test_affine_eval():
    f = HurstField.affine([0.4], [[0.2]])
    assert eval_hurst(f, [0.5])[0] == pytest.approx(0.5)


def test_dimension_mismatch():
    with pytest.raises(ValueError):
        eval_hurst(HurstField.constant(0.5, d=2), [0.1, 0.2, 0.3])


def test_eval_batched_matches_pointwise(sin2, rng):
    pts = rng.uniform(size=(20, 2))
    batch = eval_hurst(sin2, pts)
    for p, h in zip(pts, batch):
        np.testing.assert_array_equal(eval_hurst(sin2, p), h)


def test_clamping_table_overshoot():
    axes = (np.array([0.0, 1.0]),)
    table = GriddedTable(axes, np.array([[0.2], [0.9]]))
    f = HurstField(table, alpha=0.3, beta=0.8, gamma=1.0, holder_const=1.0)
    assert eval_hurst(f, [0.0])[0] == 0.3
    assert eval_hurst(f, [1.0])[0] == 0.8
    assert eval_hurst(f, [0.5])[0] == pytest.approx(0.55)


@pytest.mark.parametrize("kw", [
    dict(alpha=0.0, beta=0.5), dict(alpha=0.6, beta=0.5), dict(alpha=0.5, beta=1.0),
    dict(alpha=0.5, beta=0.5, gamma=0.0), dict(alpha=0.5, beta=0.5, gamma=1.5),
    dict(alpha=0.5, beta=0.5, holder_const=0.0),
])
def test_invalid_regularity(kw):
    args = dict(gamma=1.0, holder_const=1.0)
    args.update(kw)
    with pytest.raises(ValueError):
        HurstField(Constant([0.5]), **args)


def test_validate_constant_passes():
    rep = validate_hurst(HurstField.constant(0.5), 17)
    assert rep.passed
    assert rep["hurst_holder_ratio"].value == 0.0


def test_validate_sinusoidal_passes():
    # gamma = 1, K = 2 pi * 0.2: the largest derivative of 0.2 sin(2 pi t)
    f = HurstField(Sinusoidal(0.5, 0.2, 1.0), alpha=0.3, beta=0.7, gamma=1.0,
                   holder_const=2 * np.pi * 0.2)
    rep = validate_hurst(f, 1001)
    assert rep.passed
    # dense sweep: the adjacent-pair ratio approaches the derivative bound from below
    assert rep["hurst_holder_ratio"].value == pytest.approx(0.4 * np.pi, rel=1e-4)


def test_validate_locates_bound_violation():
    f = HurstField(AffineInT([0.4], [[0.5]]), alpha=0.3, beta=0.7, gamma=1.0, holder_const=1.0)
    rep = validate_hurst(f, 10)
    assert not rep.passed
    chk = rep["hurst_bounds"]
    assert not chk.passed
    assert chk.value == 4  # H = 0.4 + 0.5 t exceeds 0.7 at t = 0.7, 0.8, 0.9, 1.0
    assert "t=[0.7]" in chk.notes


def test_validate_holder_violation():
    f = HurstField(Sinusoidal(0.5, 0.2, 3.0), alpha=0.3, beta=0.7, gamma=1.0, holder_const=1.0)
    rep = validate_hurst(f, 101)
    assert not rep["hurst_holder_ratio"].passed
    assert validate_hurst(f, 101, slack=3.0)["hurst_holder_ratio"].passed


def test_validate_grid_resolution():
    with pytest.raises(ValueError):
        validate_hurst(HurstField.constant(0.5), 1)


def test_separability():
    assert HurstField.constant(0.5, d=2).separable
    assert HurstField.sinusoidal(0.5, 0.1, d=3).separable
    assert HurstField.affine([0.5, 0.5], [[0.1, 0.0], [0.0, 0.1]]).separable
    assert not HurstField.affine([0.5, 0.5], [[0.1, 0.05], [0.0, 0.1]]).separable


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=30, deadline=None)
@given(seed=seeds, res=st.integers(3, 40), d=st.integers(1, 2))
def test_doubling_resolution_never_lowers_ratio(seed, res, d):
    r = np.random.default_rng(seed)
    kind = r.integers(3)
    if kind == 0:
        f = HurstField.sinusoidal(0.5, r.uniform(0.01, 0.3), 1.0, d=d)
    elif kind == 1:
        f = HurstField.affine(np.full(d, 0.3), np.diag(r.uniform(0.0, 0.3, d)))
    else:
        f = HurstField.constant(r.uniform(0.1, 0.9, d))
    gamma = float(r.uniform(0.3, 1.0))
    f = HurstField(f.spec, f.alpha, f.beta, gamma, f.holder_const)
    coarse = validate_hurst(f, res)["hurst_holder_ratio"].value
    fine = validate_hurst(f, 2 * res)["hurst_holder_ratio"].value
    assert fine >= coarse - 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=seeds)
def test_eval_deterministic_and_within_bounds(seed):
    r = np.random.default_rng(seed)
    f = HurstField.sinusoidal(r.uniform(0.3, 0.7, 2), r.uniform(0, 0.2, 2), r.uniform(0, 3, 2))
    pts = r.uniform(size=(10, 2))
    h1, h2 = eval_hurst(f, pts), eval_hurst(f, pts)
    np.testing.assert_array_equal(h1, h2)
    assert np.all(h1 >= f.alpha) and np.all(h1 <= f.beta)
