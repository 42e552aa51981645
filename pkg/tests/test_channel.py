import numpy as np
import pytest

from nbturbo import channel as ch
from nbturbo import encoding as enc
from nbturbo.construction import random_spec
from nbturbo.galois import Field


def test_sigma2_formula():
    m = ch.ChannelModel(ebno_db=0.0, rate_bits=1 / 3)
    assert m.sigma2 == pytest.approx(1.5)
    m2 = ch.ChannelModel(ebno_db=3.0103, rate_bits=0.5)
    assert m2.sigma2 == pytest.approx(0.5, rel=1e-4)


def test_modulate_antipodal_unit_energy():
    f = Field(4)
    x = ch.modulate(f, np.array([0, 1, 5, 15]))
    assert x.shape == (4, 4)
    assert np.all(np.abs(x) == 1.0)
    assert np.all(x[0] == 1.0)  # symbol 0: all bits 0 -> +1
    assert np.all(x[3] == -1.0)  # symbol 15: all bits 1


def test_demodulate_near_noiseless_is_delta():
    f = Field(8)
    rng = np.random.default_rng(0)
    syms = rng.integers(0, 256, size=20)
    y = ch.modulate(f, syms)  # zero noise
    p = ch.demodulate(f, y, sigma2=1e-6)
    assert np.array_equal(np.argmax(p, axis=1), syms)
    assert np.allclose(p.max(axis=1), 1.0)


def test_demodulate_single_bit_llr_closed_form():
    f = Field(1)
    sigma2 = 0.7
    for y in (-1.3, -0.2, 0.4, 2.0):
        p = ch.demodulate(f, np.array([[y]]), sigma2)[0]
        # P(0)/P(1) = exp(+y/s2) / exp(-y/s2) = exp(2y/s2)
        assert p[0] / p[1] == pytest.approx(np.exp(2 * y / sigma2), rel=1e-9)


def test_transmit_frame_punctured_positions_uniform():
    f = Field(4)
    spec = random_spec(f, 8, "pccc", seed=1, target_rate=0.5)
    rng = np.random.default_rng(1)
    u = rng.integers(0, 16, size=8)
    pm = ch.transmit_frame(spec, enc.encode(spec, u), 0.5, rng)
    assert pm.shape == (24, 16)
    punct = sorted(spec.puncture.punctured)
    assert np.allclose(pm[punct], 1 / 16.0)
    kept = spec.transmitted_indices
    assert not np.allclose(pm[kept], 1 / 16.0)


def test_transmit_frame_mr_combining_noiseless():
    f = Field(4)
    spec = random_spec(f, 8, "pccc", seed=2, mr_factor=2)
    rng = np.random.default_rng(2)
    u = rng.integers(0, 16, size=8)
    c = enc.encode(spec, u)
    pm = ch.transmit_frame(spec, c, 1e-6, rng)
    assert np.array_equal(np.argmax(pm, axis=1), c)


def test_noise_calibration():
    # empirical per-dimension variance within 1% over 1e6 samples
    rng = np.random.default_rng(3)
    sigma2 = 0.37
    x = np.ones(1_000_000)
    y = x + rng.normal(0.0, np.sqrt(sigma2), size=x.shape)
    emp = np.var(y - x)
    assert abs(emp - sigma2) / sigma2 < 0.01


def test_demodulate_rows_normalized():
    f = Field(8)
    rng = np.random.default_rng(4)
    y = rng.normal(size=(100, 8))
    p = ch.demodulate(f, y, 0.9)
    assert np.allclose(p.sum(axis=1), 1.0, atol=1e-12)
    assert np.all(p >= 0)
