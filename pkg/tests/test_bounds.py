import numpy as np
import pytest

from nbturbo import bounds


def test_e0_zero_rho_gives_unity_bound_factor():
    assert bounds._e0(0.0, 1.0) == pytest.approx(0.0, abs=1e-9)


def test_rcb_useless_channel_saturates():
    # sigma -> infinity: exponent collapses, bound clips at 1
    assert bounds.rcb_bound(128, 64, -20.0) == pytest.approx(1.0)


def test_rcb_monotone_in_ebno():
    vals = [bounds.rcb_bound(192, 64, db) for db in np.linspace(0, 4, 6)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    assert vals[-1] < 1e-3


def test_rcb_validates_dimensions():
    with pytest.raises(ValueError):
        bounds.rcb_bound(128, 0, 1.0)
    with pytest.raises(ValueError):
        bounds.rcb_bound(128, 128, 1.0)


def test_spb_small_blocklength_computable():
    v = bounds.spb_bound(3, 1, 2.0)
    assert 0.0 < v < 1.0


def test_spb_below_rcb_quick_scan():
    for db in (0.5, 1.5, 2.5, 3.5):
        r = bounds.rcb_bound(256, 128, db)
        s = bounds.spb_bound(256, 128, db)
        assert s <= r


def test_spb_monotone_low_rate():
    vals = [bounds.spb_bound(768, 128, db) for db in np.linspace(-1, 3, 6)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))


def test_spb_large_blocklength_stable():
    v = bounds.spb_bound(2048, 1024, 1.5)
    assert np.isfinite(v) and 0.0 <= v < 1e-6


def test_bound_crossing_bracketing():
    x = bounds.bound_crossing(bounds.rcb_bound, 192, 64, 1e-3)
    assert 0.0 < x < 6.0
    lo = bounds.rcb_bound(192, 64, x - 0.05)
    hi = bounds.rcb_bound(192, 64, x + 0.05)
    assert lo > 1e-3 > hi
    with pytest.raises(ValueError):
        bounds.bound_crossing(bounds.rcb_bound, 192, 64, 1e-3, 8.0, 14.0)


def test_cone_half_angle_underflow_path():
    # forces the log-domain fallback branch (k too large for betaincinv)
    theta_big = bounds._cone_half_angle(3072, 1024)
    assert 0.0 < theta_big < np.pi / 2
