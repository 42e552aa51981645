"""Analytic block-error references for (n, k) binary-antipodal AWGN codes.

rcb_bound: Gallager's random-coding upper bound
    P_e <= 2^(-n * max_{rho in [0,1]} [E0(rho) - rho k/n]),
with E0 evaluated by numerical integration over the channel output and the
maximization done by bounded scalar search.

spb_bound: sphere-packing lower bound for the continuous-input AWGN
channel (cone-packing form): the error probability of any code of M = 2^k
unit-power codewords in n dimensions is at least the probability that the
noise tilts the received vector outside a cone whose solid angle is a
1/M fraction of the sphere.  Both the cone half-angle equation and the
tilt probability are evaluated in the log domain, which stays finite for
every blocklength used here (verified up to n = 4096).
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, optimize, special


def _e0(rho: float, sigma2: float) -> float:
    """Gallager E0 for the binary-input AWGN channel, in bits."""
    a = 1.0 / (1.0 + rho)
    sig = math.sqrt(sigma2)

    def integrand(y):
        # [0.5 p(y|+1)^a + 0.5 p(y|-1)^a]^(1+rho), densities N(+-1, sigma2)
        c = (2.0 * math.pi * sigma2) ** (-0.5 * a)
        t1 = np.exp(-a * (y - 1.0) ** 2 / (2.0 * sigma2))
        t2 = np.exp(-a * (y + 1.0) ** 2 / (2.0 * sigma2))
        return (0.5 * c * (t1 + t2)) ** (1.0 + rho)

    lim = 1.0 + 15.0 * sig
    val, err = integrate.quad(integrand, -lim, lim, limit=300,
                              points=(-1.0, 0.0, 1.0), epsabs=0.0,
                              epsrel=1e-10)
    if not np.isfinite(val) or val <= 0.0 or err > 1e-6 * max(val, 1e-300):
        raise ArithmeticError("E0 integration did not converge")
    return -math.log2(val)


def rcb_bound(n_bits: int, k_bits: int, ebno_db: float) -> float:
    """Random-coding upper bound on block error probability."""
    if not 0 < k_bits < n_bits:
        raise ValueError("need 0 < k < n")
    rate = k_bits / n_bits
    sigma2 = 1.0 / (2.0 * rate * 10.0 ** (ebno_db / 10.0))

    res = optimize.minimize_scalar(
        lambda rho: -(_e0(rho, sigma2) - rho * rate),
        bounds=(0.0, 1.0),
        method="bounded",
        options={"xatol": 1e-6},
    )
    exponent = max(float(-res.fun), 0.0)
    return float(min(1.0, 2.0 ** (-n_bits * exponent)))


def _cone_half_angle(n: int, k: int) -> float:
    """theta with Omega(theta)/Omega(pi) = 2^-k for the n-sphere.

    The solid-angle fraction is 0.5 * I_{sin^2 theta}((n-1)/2, 1/2) for
    theta <= pi/2 (regularized incomplete beta).
    """
    a, b = (n - 1) / 2.0, 0.5
    target = 2.0 ** (1 - k)  # 2 * 2^-k
    if target > 0.0 and special.betainc(a, b, 1.0) >= target:
        x = special.betaincinv(a, b, target)
        if x > 0.0:
            return math.asin(math.sqrt(x))
    # underflow fallback: log I_x(a, 1/2) ~ a log x - log a - log B(a, b)
    log_target = (1 - k) * math.log(2.0)
    log_beta = special.betaln(a, b)
    log_x = (log_target + math.log(a) + log_beta) / a
    return math.asin(math.exp(0.5 * log_x))


def _log_tilt_integrand(phi: np.ndarray, n: int, s: float) -> np.ndarray:
    """log density (up to a phi-independent constant) of the angle between
    the transmitted vector (norm s) and received vector in n dimensions:

        sin^(n-2)(phi) * e^{-(s sin phi)^2 / 2}
            * integral_0^inf r^(n-1) e^{-(r - s cos phi)^2 / 2} dr,

    the inner integral evaluated by log-domain trapezoid around its
    Laplace point."""
    phi = np.asarray(phi, dtype=np.float64)
    b = s * np.cos(phi)
    # peak of (n-1) ln r - (r-b)^2/2 at r* = (b + sqrt(b^2 + 4(n-1)))/2
    rstar = 0.5 * (b + np.sqrt(b * b + 4.0 * (n - 1.0)))
    width = 1.0 / np.sqrt(1.0 + (n - 1.0) / rstar**2)
    lo = np.maximum(rstar - 12.0 * width, 1e-12)
    hi = rstar + 12.0 * width
    t = np.linspace(0.0, 1.0, 240)
    r = lo[:, None] + (hi - lo)[:, None] * t[None, :]
    log_f = (n - 1.0) * np.log(r) - 0.5 * (r - b[:, None]) ** 2
    mx = log_f.max(axis=1)
    inner = mx + np.log(np.trapezoid(np.exp(log_f - mx[:, None]), r, axis=1))
    with np.errstate(divide="ignore"):
        log_sin = (n - 2.0) * np.log(np.sin(phi))
    return log_sin + inner - 0.5 * (s * np.sin(phi)) ** 2


def _log_integral(log_f: np.ndarray, x: np.ndarray) -> float:
    mx = log_f.max()
    if not np.isfinite(mx):
        return -np.inf
    return mx + math.log(np.trapezoid(np.exp(log_f - mx), x))


def spb_bound(n_bits: int, k_bits: int, ebno_db: float) -> float:
    """Sphere-packing lower bound on block error probability."""
    if not 0 < k_bits < n_bits:
        raise ValueError("need 0 < k < n")
    n = n_bits
    rate = k_bits / n_bits
    snr_dim = 2.0 * rate * 10.0 ** (ebno_db / 10.0)  # per-dimension Es/(N0/2)
    s = math.sqrt(n * snr_dim)
    theta = _cone_half_angle(n, k_bits)

    grid_out = np.linspace(theta, math.pi, 6000)[1:-1]
    grid_all = np.unique(np.concatenate([
        np.linspace(1e-9, math.pi - 1e-9, 6000),
        grid_out,
    ]))
    log_all = _log_tilt_integrand(grid_all, n, s)
    log_out = _log_tilt_integrand(grid_out, n, s)
    denom = _log_integral(log_all, grid_all)
    numer = _log_integral(log_out, grid_out)
    if not np.isfinite(denom):
        raise ArithmeticError("sphere-packing normalization vanished")
    p = math.exp(min(float(numer - denom), 0.0)) if np.isfinite(numer) else 0.0
    return float(min(1.0, max(p, 0.0)))


def bound_crossing(bound, n_bits: int, k_bits: int, target: float,
                   lo_db: float = -4.0, hi_db: float = 14.0) -> float:
    """Eb/N0 (dB) at which `bound(n, k, ebno)` falls to `target`."""

    def fn(db):
        return math.log(max(bound(n_bits, k_bits, db), 1e-300)) - math.log(target)

    f_lo, f_hi = fn(lo_db), fn(hi_db)
    if f_lo < 0.0 or f_hi > 0.0:
        raise ValueError(
            f"target {target} not bracketed by bound on [{lo_db}, {hi_db}] dB"
        )
    return optimize.brentq(fn, lo_db, hi_db, xtol=1e-4)
