"""Symbol-MAP (BCJR) decoding of the time-variant memory-1 component codes.

The accumulator trellis has q states (the state equals the previous parity
symbol); one step multiplies the input pmf and the state pmf through
scalar-multiplication permutations and one XOR convolution, so a whole
forward or backward sweep costs O(K q log q) with the fast transform.

Tail-biting is handled two ways:

``exact``   The forward/backward metrics carry the wrap (starting) state as
            an extra axis: metric[s0, s] conditions on starting state s0,
            anchored to the identity matrix at both ends of the ring.
            Summing the start axis at readout yields the exact circular
            posterior, at q times the arithmetic of a plain sweep.
``wrap``    The classic approximation: sweep the ring repeatedly from a
            uniform metric until the wrap-point pmf moves less than `eps`
            in L1 (at most `max_wraps` turns), then one clean final sweep.
            Converges to a dominant-eigenvector fixed point, not the exact
            circular posterior; cheap, and the default for q > 64.

The non-recursive differentiator (state = previous input symbol) gets the
same treatment through its own step kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import pmf as pm
from .construction import CodeSpec, build_parity_check
from .galois import Field


class DecodingFailure(RuntimeError):
    """Observations are inconsistent (a metric vanished entirely)."""


@dataclass
class TrellisObservations:
    """Per-step input/output pmfs and coefficients for one component code."""

    gamma_u: np.ndarray  # (N, q) input-symbol pmfs (channel x a-priori)
    gamma_p: np.ndarray  # (N, q) output-symbol pmfs
    g: np.ndarray  # (N,) input coefficients
    f: np.ndarray  # (N,) feedback / memory coefficients

    def __post_init__(self):
        self.gamma_u = np.asarray(self.gamma_u, dtype=np.float64)
        self.gamma_p = np.asarray(self.gamma_p, dtype=np.float64)
        self.g = np.asarray(self.g, dtype=np.int64)
        self.f = np.asarray(self.f, dtype=np.int64)
        n = len(self.g)
        if not (len(self.f) == n and self.gamma_u.shape[0] == n == self.gamma_p.shape[0]):
            raise ValueError("observation arrays disagree on step count")


@dataclass
class ExtrinsicOutput:
    mu: np.ndarray  # (N, q) extrinsic pmfs (on inputs for the accumulator,
    #                 on outputs for the differentiator)
    app: np.ndarray  # (N, q) posterior for the same symbols as mu
    state_app: np.ndarray  # (N+1, q) posterior pmfs of the trellis states
    tb_converged: bool = True


def _norm_total(x: np.ndarray) -> np.ndarray:
    s = x.sum()
    if s <= 0.0:
        raise DecodingFailure("metric vanished: inconsistent observations")
    return x / s


# Step kernels.  All share the signature (field, metric, gu, gp, g_i, f_i,
# method) so the sweep/readout machinery is generic; the differentiator
# ignores g_i (its input enters unscaled).

def forward_step(f: Field, phi, gu, gp, g_i, f_i, method="wht"):
    """Accumulator forward update (unnormalized).

    new_phi[s] = gp[s] * sum_{s'} phi[s'] * gu(input taking s' to s): the
    XOR convolution of the f-permuted state pmf with the g-permuted input
    pmf, gated by the parity observation.  Broadcasts over leading axes.
    """
    conv = pm.convolve(pm.permute_scalar(f, phi, int(f_i)),
                       pm.permute_scalar(f, gu, int(g_i)), method)
    return gp * conv


def backward_step(f: Field, beta, gu_n, gp_n, g_n, f_n, method="wht"):
    """Accumulator backward update (unnormalized), mirror of forward_step."""
    conv = pm.convolve(beta * gp_n, pm.permute_scalar(f, gu_n, int(g_n)), method)
    return pm.permute_scalar_inv(f, conv, int(f_n))


def _acc_extrinsic(f: Field, phi_prev, beta, gu, gp, g_i, f_i, method="wht"):
    """Extrinsic pmf on the accumulator input symbol (excludes gu)."""
    conv = pm.convolve(pm.permute_scalar(f, phi_prev, int(f_i)), beta * gp, method)
    return pm.permute_scalar_inv(f, conv, int(g_i))


def diff_forward_step(f: Field, phi, gu, gv, g_i, h_i, method="wht"):
    """Differentiator forward update; the state is the previous input."""
    return gu * pm.convolve(pm.permute_scalar(f, phi, int(h_i)), gv, method)


def diff_backward_step(f: Field, beta, gu_n, gv_n, g_n, h_n, method="wht"):
    return pm.permute_scalar_inv(f, pm.convolve(beta * gu_n, gv_n, method),
                                 int(h_n))


def _diff_extrinsic(f: Field, phi_prev, beta, gu, gv, g_i, h_i, method="wht"):
    """Extrinsic pmf on the differentiator output symbol (excludes gv)."""
    return pm.convolve(pm.permute_scalar(f, phi_prev, int(h_i)), gu * beta, method)


@dataclass(frozen=True)
class _Kernel:
    fwd: callable
    bwd: callable
    ext: callable
    app_obs: str  # which observation multiplies mu to form the posterior


ACCUMULATOR = _Kernel(forward_step, backward_step, _acc_extrinsic, "gamma_u")
DIFFERENTIATOR = _Kernel(diff_forward_step, diff_backward_step, _diff_extrinsic,
                         "gamma_p")


def _sweeps(f, obs, start, end, kernel, method):
    """Forward metrics from `start` and backward metrics anchored at `end`.

    start/end may carry leading axes (the start-state axis of the exact
    tail-biting mode); each step renormalizes over the *whole* metric so
    relative weights across the extra axes survive.
    """
    n = len(obs.g)
    phis = [None] * (n + 1)
    phis[0] = start
    for t in range(1, n + 1):
        phis[t] = _norm_total(
            kernel.fwd(f, phis[t - 1], obs.gamma_u[t - 1], obs.gamma_p[t - 1],
                       obs.g[t - 1], obs.f[t - 1], method)
        )
    betas = [None] * (n + 1)
    betas[n] = end
    for t in range(n - 1, -1, -1):
        betas[t] = _norm_total(
            kernel.bwd(f, betas[t + 1], obs.gamma_u[t], obs.gamma_p[t],
                       obs.g[t], obs.f[t], method)
        )
    return phis, betas


def _readout(f, obs, phis, betas, kernel, method, tb_converged=True):
    """Extrinsic/posterior pmfs and state posteriors from metric sweeps."""
    n = len(obs.g)
    q = obs.gamma_u.shape[-1]
    app_obs = getattr(obs, kernel.app_obs)
    mu = np.empty((n, q))
    app = np.empty((n, q))
    state_app = np.empty((n + 1, q))
    for t in range(n + 1):
        joint = phis[t] * betas[t]
        state_app[t] = _norm_total(joint.reshape(-1, q).sum(axis=0))
    for t in range(n):
        e = kernel.ext(f, phis[t], betas[t + 1], obs.gamma_u[t], obs.gamma_p[t],
                       obs.g[t], obs.f[t], method)
        mu[t] = _norm_total(e.reshape(-1, q).sum(axis=0))
        app[t] = _norm_total(mu[t] * app_obs[t])
    return ExtrinsicOutput(mu, app, state_app, tb_converged)


def bcjr_terminated(f: Field, obs: TrellisObservations, method="wht",
                    kernel: _Kernel = ACCUMULATOR) -> ExtrinsicOutput:
    """Forward-backward on a trellis anchored in state 0 at both ends.

    The observation block must already include the termination step, so a
    K-symbol message arrives as K+1 steps.
    """
    start = pm.delta(f.q, 0)
    end = pm.delta(f.q, 0)
    phis, betas = _sweeps(f, obs, start, end, kernel, method)
    return _readout(f, obs, phis, betas, kernel, method)


def bcjr_tailbiting(f: Field, obs: TrellisObservations, method="wht",
                    algorithm="exact", eps=1e-6, max_wraps=4,
                    kernel: _Kernel = ACCUMULATOR) -> ExtrinsicOutput:
    """Circular-trellis symbol MAP; see module docstring for the two modes."""
    if algorithm == "auto":
        algorithm = "exact" if f.q <= 64 else "wrap"
    if algorithm == "exact":
        anchor = np.eye(f.q)
        phis, betas = _sweeps(f, obs, anchor / f.q, anchor, kernel, method)
        return _readout(f, obs, phis, betas, kernel, method)
    if algorithm != "wrap":
        raise ValueError(f"unknown tail-biting algorithm {algorithm!r}")

    phi0, fwd_ok = _wrap_fixed_point(f, obs, kernel, method, eps, max_wraps,
                                     backward=False)
    beta0, bwd_ok = _wrap_fixed_point(f, obs, kernel, method, eps, max_wraps,
                                      backward=True)
    phis, betas = _sweeps(f, obs, phi0, beta0, kernel, method)
    return _readout(f, obs, phis, betas, kernel, method,
                    tb_converged=fwd_ok and bwd_ok)


def _wrap_fixed_point(f, obs, kernel, method, eps, max_wraps, backward):
    n = len(obs.g)
    cur = pm.uniform(f.q)
    for _ in range(max_wraps):
        nxt = cur
        if backward:
            for t in range(n - 1, -1, -1):
                nxt = _norm_total(kernel.bwd(f, nxt, obs.gamma_u[t], obs.gamma_p[t],
                                             obs.g[t], obs.f[t], method))
        else:
            for t in range(n):
                nxt = _norm_total(kernel.fwd(f, nxt, obs.gamma_u[t], obs.gamma_p[t],
                                             obs.g[t], obs.f[t], method))
        done = np.abs(nxt - cur).sum() < eps
        cur = nxt
        if done:
            return cur, True
    return cur, False


def bcjr_tailbiting_diff(f: Field, obs: TrellisObservations, method="wht",
                         algorithm="exact", **kw) -> ExtrinsicOutput:
    """Tail-biting MAP for the differentiator trellis.

    Observation roles: gamma_u = input-symbol pmfs, gamma_p = output-symbol
    pmfs, f = memory coefficients (g is ignored).  In the result, mu/app
    describe the *output* symbols and state_app the input symbols.
    """
    return bcjr_tailbiting(f, obs, method, algorithm, kernel=DIFFERENTIATOR, **kw)


# ---------------------------------------------------------------------------
# turbo schedules
# ---------------------------------------------------------------------------


@dataclass
class TurboResult:
    message: np.ndarray
    iterations: int
    converged: bool
    degenerate: bool = False
    tb_warnings: int = 0
    app_u: np.ndarray | None = None


def _decide(app: np.ndarray) -> np.ndarray:
    # argmax breaks ties toward the smaller field index
    return np.argmax(app, axis=-1)


def turbo_decode_parallel(spec: CodeSpec, channel_pmfs: np.ndarray,
                          max_iter: int = 20, algorithm: str = "auto",
                          method: str = "wht") -> TurboResult:
    """Parallel schedule: each accumulator decodes in turn, exchanging
    extrinsic pmfs on the systematic symbols through the interleaver; stops
    early when the joint hard decision satisfies every parity check.

    A run whose posteriors are exactly uniform (no information at all)
    reports failure even though the all-zero word passes the syndrome test.
    """
    f = spec.field
    K, q = spec.K, f.q
    chan_u = channel_pmfs[:K]
    chan_p1 = channel_pmfs[K : 2 * K]
    chan_p2 = channel_pmfs[2 * K :]
    perm = spec.perm
    h = build_parity_check(spec)

    apri1 = np.full((K, q), 1.0 / q)
    mu1 = np.full((K, q), 1.0 / q)
    mu2_deint = np.full((K, q), 1.0 / q)
    warnings = 0
    it = 0
    try:
        for it in range(1, max_iter + 1):
            obs1 = TrellisObservations(pm.normalize(chan_u * apri1), chan_p1,
                                       spec.g1, spec.f1)
            r1 = bcjr_tailbiting(f, obs1, method, algorithm)
            warnings += not r1.tb_converged
            mu1 = r1.mu

            obs2 = TrellisObservations(pm.normalize(chan_u[perm] * mu1[perm]),
                                       chan_p2, spec.g2, spec.f2)
            r2 = bcjr_tailbiting(f, obs2, method, algorithm)
            warnings += not r2.tb_converged
            mu2_deint = np.empty_like(mu1)
            mu2_deint[perm] = r2.mu
            apri1 = mu2_deint

            app_u = pm.normalize(chan_u * mu1 * mu2_deint)
            hard = np.concatenate([
                _decide(app_u),
                _decide(r1.state_app[1:]),
                _decide(r2.state_app[1:]),
            ])
            if not h.syndrome(f, hard).any():
                degenerate = bool(np.allclose(app_u, 1.0 / q))
                return TurboResult(hard[:K], it, not degenerate, degenerate,
                                   warnings, app_u)
    except (DecodingFailure, pm.PmfUnderflowError):
        pass
    try:
        app_u = pm.normalize(chan_u * mu1 * mu2_deint)
    except pm.PmfUnderflowError:
        app_u = chan_u
    return TurboResult(_decide(app_u), it, False, False, warnings, app_u)


def turbo_decode_serial(spec: CodeSpec, channel_pmfs: np.ndarray,
                        max_iter: int = 20, algorithm: str = "auto",
                        method: str = "wht") -> TurboResult:
    """Serial schedule for the differentiate-accumulate construction.

    Inner accumulator and outer differentiator exchange extrinsic pmfs on
    the intermediate symbols; the accumulator input w relates to the
    differentiator output v by w[perm[i]] = inv(g2[i]) * v[i], applied to
    pmfs as a position shuffle plus a scalar-multiplication permutation.
    """
    if spec.mode not in ("da12", "da13"):
        raise ValueError("serial decoding applies to the da modes")
    f = spec.field
    K, q = spec.K, f.q
    chan_u = channel_pmfs[:K]
    chan_p = channel_pmfs[K : 2 * K]
    if spec.mode == "da13":
        chan_v = channel_pmfs[2 * K :]
    else:
        chan_v = np.full((K, q), 1.0 / q)
    perm = spec.perm
    h = build_parity_check(spec)
    ones = np.ones(K, dtype=np.int64)
    inv_g2 = f.inv_table[spec.g2]

    ext_inner_v = np.full((K, q), 1.0 / q)
    ext_outer_v = np.full((K, q), 1.0 / q)
    warnings = 0
    it = 0
    try:
        for it in range(1, max_iter + 1):
            # inner accumulator; its input observation carries everything
            # known about v except the inner code's own extrinsic
            belief_v = pm.normalize(chan_v * ext_outer_v)
            gu_w = np.empty((K, q))
            for i in range(K):
                gu_w[perm[i]] = pm.permute_scalar(f, belief_v[i], int(inv_g2[i]))
            obs_in = TrellisObservations(gu_w, chan_p, spec.g1, spec.f1)
            r_in = bcjr_tailbiting(f, obs_in, method, algorithm)
            warnings += not r_in.tb_converged
            for i in range(K):
                ext_inner_v[i] = pm.permute_scalar(f, r_in.mu[perm[i]],
                                                   int(spec.g2[i]))

            # outer differentiator
            gv = pm.normalize(chan_v * ext_inner_v)
            obs_out = TrellisObservations(chan_u, gv, ones, spec.f2)
            r_out = bcjr_tailbiting_diff(f, obs_out, method, algorithm)
            warnings += not r_out.tb_converged
            ext_outer_v = r_out.mu

            app_u = r_out.state_app[1:]
            hard_u = _decide(app_u)
            parts = [hard_u, _decide(r_in.state_app[1:])]
            if spec.mode == "da13":
                app_v = pm.normalize(chan_v * ext_inner_v * ext_outer_v)
                parts.append(_decide(app_v))
            hard = np.concatenate(parts)
            if not h.syndrome(f, hard).any():
                degenerate = bool(np.allclose(app_u, 1.0 / q))
                return TurboResult(hard_u, it, not degenerate, degenerate,
                                   warnings, app_u)
    except (DecodingFailure, pm.PmfUnderflowError):
        pass
    return TurboResult(np.argmax(chan_u, axis=-1), it, False, False, warnings)
