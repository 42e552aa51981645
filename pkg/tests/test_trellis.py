import itertools

import numpy as np
import pytest

from nbturbo import pmf, trellis
from nbturbo import encoding as enc
from nbturbo.channel import transmit_frame
from nbturbo.construction import CodeSpec, build_parity_check, random_spec
from nbturbo.galois import Field
from nbturbo.interleave import relative_prime_interleaver

F4 = Field(2)
Q = 4


def rand_pmfs(rng, n, q=Q, floor=1e-3):
    x = rng.random((n, q)) + floor
    return x / x.sum(axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# single-step oracles: explicit sum over trellis edges (s', s)
# ---------------------------------------------------------------------------


def fwd_oracle(f, phi, gu, gp, g, fb):
    q = f.q
    out = np.zeros(q)
    for s_prev in range(q):
        for u in range(q):
            s = f.mul(g, u) ^ f.mul(fb, s_prev)
            out[s] += phi[s_prev] * gu[u] * gp[s]
    return out / out.sum()


def bwd_oracle(f, beta, gu, gp, g, fb):
    q = f.q
    out = np.zeros(q)
    for s in range(q):
        for u in range(q):
            s_next = f.mul(g, u) ^ f.mul(fb, s)
            out[s] += beta[s_next] * gu[u] * gp[s_next]
    return out / out.sum()


def test_forward_step_noiseless_delta_propagation():
    rng = np.random.default_rng(0)
    for _ in range(20):
        g = int(rng.integers(1, Q))
        fb = int(rng.integers(1, Q))
        u = int(rng.integers(0, Q))
        s_prev = int(rng.integers(0, Q))
        out = trellis.forward_step(F4, pmf.delta(Q, s_prev), pmf.delta(Q, u),
                                   pmf.uniform(Q), g, fb)
        s = F4.mul(g, u) ^ F4.mul(fb, s_prev)
        assert np.argmax(out) == s
        assert out[s] == pytest.approx(out.sum())


def test_forward_step_uniform_inputs_reduce_to_parity():
    rng = np.random.default_rng(1)
    gp = rand_pmfs(rng, 1)[0]
    out = trellis.forward_step(F4, pmf.uniform(Q), pmf.uniform(Q), gp, 2, 3)
    assert np.allclose(out / out.sum(), gp / gp.sum())


def test_steps_match_edge_enumeration_oracle():
    rng = np.random.default_rng(2)
    for _ in range(100):
        phi, gu, gp, beta = rand_pmfs(rng, 4)
        g = int(rng.integers(1, Q))
        fb = int(rng.integers(1, Q))
        fwd = trellis.forward_step(F4, phi, gu, gp, g, fb)
        assert np.allclose(fwd / fwd.sum(), fwd_oracle(F4, phi, gu, gp, g, fb),
                           atol=1e-13)
        bwd = trellis.backward_step(F4, beta, gu, gp, g, fb)
        assert np.allclose(bwd / bwd.sum(), bwd_oracle(F4, beta, gu, gp, g, fb),
                           atol=1e-13)


def test_forward_step_inconsistent_observations_signal():
    # state delta at 0, input delta at 1 forces parity 1, but gp says 2
    with pytest.raises(trellis.DecodingFailure):
        trellis._norm_total(
            trellis.forward_step(F4, pmf.delta(Q, 0), pmf.delta(Q, 1),
                                 pmf.delta(Q, 2), 1, 1))


# ---------------------------------------------------------------------------
# whole-trellis oracles
# ---------------------------------------------------------------------------


def terminated_posterior(f, gu, gp, g, fb, K):
    post = np.zeros((K, f.q))
    for u in itertools.product(range(f.q), repeat=K):
        u_ext, p = enc.accumulate_terminated(f, np.array(u), g, fb)
        w = 1.0
        for i in range(K + 1):
            w *= gu[i][u_ext[i]] * gp[i][p[i]]
        for i in range(K):
            post[i, u[i]] += w
    return post / post.sum(axis=1, keepdims=True)


def tailbiting_posterior(f, gu, gp, g, fb, K):
    post = np.zeros((K, f.q))
    for u in itertools.product(range(f.q), repeat=K):
        p = enc.accumulate_tailbiting(f, np.array(u), g, fb)
        w = 1.0
        for i in range(K):
            w *= gu[i][u[i]] * gp[i][p[i]]
        for i in range(K):
            post[i, u[i]] += w
    return post / post.sum(axis=1, keepdims=True)


def test_bcjr_terminated_matches_exhaustive():
    rng = np.random.default_rng(3)
    for _ in range(25):
        K = int(rng.integers(2, 5))
        g = rng.integers(1, Q, size=K + 1)
        fb = rng.integers(1, Q, size=K + 1)
        gu = rand_pmfs(rng, K + 1)
        gp = rand_pmfs(rng, K + 1)
        want = terminated_posterior(F4, gu, gp, g, fb, K)
        out = trellis.bcjr_terminated(F4, trellis.TrellisObservations(gu, gp, g, fb))
        assert np.max(np.abs(out.app[:K] - want) / want) < 1e-10


def test_bcjr_terminated_noiseless_decodes():
    rng = np.random.default_rng(4)
    K = 6
    g = rng.integers(1, Q, size=K + 1)
    fb = rng.integers(1, Q, size=K + 1)
    u = rng.integers(0, Q, size=K)
    u_ext, p = enc.accumulate_terminated(F4, u, g, fb)
    eps = 1e-9
    gu = np.full((K + 1, Q), eps)
    gp = np.full((K + 1, Q), eps)
    gu[np.arange(K + 1), u_ext] = 1
    gp[np.arange(K + 1), p] = 1
    out = trellis.bcjr_terminated(F4, trellis.TrellisObservations(gu, gp, g, fb))
    assert np.array_equal(np.argmax(out.app[:K], axis=1), u)


def test_bcjr_terminated_uniform_parity_extrinsic_vs_oracle():
    # with no parity observations anywhere, the extrinsic on u_i must match
    # the oracle posterior computed without gu_i
    rng = np.random.default_rng(5)
    K = 3
    g = rng.integers(1, Q, size=K + 1)
    fb = rng.integers(1, Q, size=K + 1)
    gu = rand_pmfs(rng, K + 1)
    gp = np.full((K + 1, Q), 0.25)
    out = trellis.bcjr_terminated(F4, trellis.TrellisObservations(gu, gp, g, fb))
    for i in range(K):
        gu_loo = gu.copy()
        gu_loo[i] = 0.25
        want = terminated_posterior(F4, gu_loo, gp, g, fb, K)[i]
        assert np.allclose(out.mu[i], want, atol=1e-12)


def test_bcjr_tailbiting_exact_matches_exhaustive():
    rng = np.random.default_rng(6)
    for _ in range(25):
        K = int(rng.integers(2, 5))
        while True:
            g = rng.integers(1, Q, size=K)
            fb = rng.integers(1, Q, size=K)
            if F4.prod(fb) != 1:
                break
        gu = rand_pmfs(rng, K)
        gp = rand_pmfs(rng, K)
        want = tailbiting_posterior(F4, gu, gp, g, fb, K)
        out = trellis.bcjr_tailbiting(F4, trellis.TrellisObservations(gu, gp, g, fb),
                                      algorithm="exact")
        assert np.max(np.abs(out.app - want) / want) < 1e-6


def test_bcjr_tailbiting_uniform_observations_stay_uniform():
    K = 5
    obs = trellis.TrellisObservations(np.full((K, Q), 0.25), np.full((K, Q), 0.25),
                                      np.ones(K, int), np.array([1, 1, 1, 1, 2]))
    for algorithm in ("exact", "wrap"):
        out = trellis.bcjr_tailbiting(F4, obs, algorithm=algorithm)
        assert np.allclose(out.app, 0.25, atol=1e-12)


def test_bcjr_tailbiting_wrap_noiseless_recovery():
    rng = np.random.default_rng(7)
    K = 8
    while True:
        g = rng.integers(1, Q, size=K)
        fb = rng.integers(1, Q, size=K)
        if F4.prod(fb) != 1:
            break
    u = rng.integers(0, Q, size=K)
    p = enc.accumulate_tailbiting(F4, u, g, fb)
    eps = 1e-12
    gu = np.full((K, Q), eps)
    gp = np.full((K, Q), eps)
    gu[np.arange(K), u] = 1
    gp[np.arange(K), p] = 1
    out = trellis.bcjr_tailbiting(F4, trellis.TrellisObservations(gu, gp, g, fb),
                                  algorithm="wrap")
    assert out.tb_converged
    assert np.array_equal(np.argmax(out.app, axis=1), u)


def test_wht_and_direct_backends_agree():
    rng = np.random.default_rng(8)
    K = 4
    g = rng.integers(1, Q, size=K)
    fb = np.array([1, 2, 3, 1])
    gu = rand_pmfs(rng, K)
    gp = rand_pmfs(rng, K)
    obs = trellis.TrellisObservations(gu, gp, g, fb)
    a = trellis.bcjr_tailbiting(F4, obs, method="wht")
    b = trellis.bcjr_tailbiting(F4, obs, method="direct")
    assert np.max(np.abs(a.app - b.app)) < 1e-12
    assert np.max(np.abs(a.mu - b.mu)) < 1e-12


def test_extrinsic_excludes_own_observation():
    rng = np.random.default_rng(9)
    K = 4
    g = rng.integers(1, Q, size=K)
    fb = np.array([2, 1, 1, 1])
    gu = rand_pmfs(rng, K)
    gp = rand_pmfs(rng, K)
    out1 = trellis.bcjr_tailbiting(F4, trellis.TrellisObservations(gu, gp, g, fb))
    gu2 = gu.copy()
    gu2[2] = rand_pmfs(rng, 1)[0]
    out2 = trellis.bcjr_tailbiting(F4, trellis.TrellisObservations(gu2, gp, g, fb))
    assert np.allclose(out1.mu[2], out2.mu[2], atol=1e-12)


def test_pmfs_normalized_throughout():
    rng = np.random.default_rng(10)
    K = 5
    g = rng.integers(1, Q, size=K)
    fb = np.array([1, 1, 2, 1, 1])
    obs = trellis.TrellisObservations(rand_pmfs(rng, K), rand_pmfs(rng, K), g, fb)
    out = trellis.bcjr_tailbiting(F4, obs)
    for arr in (out.mu, out.app, out.state_app):
        assert np.allclose(arr.sum(axis=1), 1.0, atol=1e-9)


# ---------------------------------------------------------------------------
# differentiator trellis
# ---------------------------------------------------------------------------


def diff_posterior(f, gu, gv, h, K):
    post_u = np.zeros((K, f.q))
    post_v = np.zeros((K, f.q))
    for u in itertools.product(range(f.q), repeat=K):
        v = enc.differentiate(f, np.array(u), h)
        w = 1.0
        for i in range(K):
            w *= gu[i][u[i]] * gv[i][v[i]]
        for i in range(K):
            post_u[i, u[i]] += w
            post_v[i, v[i]] += w
    post_u /= post_u.sum(axis=1, keepdims=True)
    post_v /= post_v.sum(axis=1, keepdims=True)
    return post_u, post_v


def test_differentiator_map_matches_exhaustive():
    rng = np.random.default_rng(11)
    for _ in range(20):
        K = int(rng.integers(2, 5))
        h = rng.integers(1, Q, size=K)
        gu = rand_pmfs(rng, K)
        gv = rand_pmfs(rng, K)
        want_u, want_v = diff_posterior(F4, gu, gv, h, K)
        obs = trellis.TrellisObservations(gu, gv, np.ones(K, int), h)
        out = trellis.bcjr_tailbiting_diff(F4, obs, algorithm="exact")
        assert np.max(np.abs(out.state_app[1:] - want_u) / want_u) < 1e-9
        assert np.max(np.abs(out.app - want_v) / want_v) < 1e-9


def test_differentiator_with_uniform_output_obs_is_prior_only():
    # no observation of v at all: posterior on u factorizes to gu
    rng = np.random.default_rng(12)
    K = 4
    h = rng.integers(1, Q, size=K)
    gu = rand_pmfs(rng, K)
    gv = np.full((K, Q), 0.25)
    obs = trellis.TrellisObservations(gu, gv, np.ones(K, int), h)
    out = trellis.bcjr_tailbiting_diff(F4, obs)
    assert np.allclose(out.state_app[1:], gu, atol=1e-12)


# ---------------------------------------------------------------------------
# turbo schedules
# ---------------------------------------------------------------------------


def petersen_spec():
    inter = relative_prime_interleaver(5, 1, 2)
    rng = np.random.default_rng(40)
    while True:
        g1, f1, g2, f2 = (rng.integers(1, Q, size=5) for _ in range(4))
        if F4.prod(f1) != 1 and F4.prod(f2) != 1:
            return CodeSpec(field=F4, K=5, mode="pccc", g1=g1, f1=f1, g2=g2,
                            f2=f2, interleaver=inter)


def test_turbo_parallel_noiseless():
    spec = petersen_spec()
    rng = np.random.default_rng(13)
    for _ in range(20):
        u = rng.integers(0, Q, size=5)
        pmfs = transmit_frame(spec, enc.encode(spec, u), 1e-6, rng)
        res = trellis.turbo_decode_parallel(spec, pmfs, max_iter=10)
        assert res.converged and res.iterations <= 2
        assert np.array_equal(res.message, u)


def test_turbo_parallel_uniform_inputs_flagged_failed():
    spec = petersen_spec()
    res = trellis.turbo_decode_parallel(spec, np.full((15, Q), 0.25), max_iter=5)
    assert not res.converged


def test_turbo_parallel_conflicting_observations_flagged_not_raised():
    spec = petersen_spec()
    pmfs = np.full((15, Q), 1e-12)
    pmfs[np.arange(15), 0] = 1.0  # all-zero codeword ...
    pmfs[5] = 1e-12
    pmfs[5, 3] = 1.0  # ... except an impossible parity claim
    res = trellis.turbo_decode_parallel(spec, pmf.normalize(pmfs), max_iter=3)
    assert isinstance(res, trellis.TurboResult)


@pytest.mark.parametrize("mode", ["da12", "da13"])
def test_turbo_serial_noiseless(mode):
    spec = random_spec(F4, 6, mode, seed=14)
    rng = np.random.default_rng(15)
    for _ in range(20):
        u = rng.integers(0, Q, size=6)
        pmfs = transmit_frame(spec, enc.encode(spec, u), 1e-6, rng)
        res = trellis.turbo_decode_serial(spec, pmfs, max_iter=10)
        assert res.converged and res.iterations <= 2
        assert np.array_equal(res.message, u)


def test_turbo_serial_first_iteration_matches_restricted_oracle():
    # after one inner pass, the outer posterior on u must equal the
    # exhaustive posterior given (i) the channel u-observations and (ii)
    # per-symbol v-beliefs formed from channel and inner extrinsic
    K = 4
    spec = random_spec(F4, K, "da13", seed=16)
    rng = np.random.default_rng(17)
    u = rng.integers(0, Q, size=K)
    pmfs = transmit_frame(spec, enc.encode(spec, u), 0.8, rng)
    chan_u, chan_p, chan_v = pmfs[:K], pmfs[K:2 * K], pmfs[2 * K:]

    inv_g2 = spec.field.inv_table[spec.g2]
    gu_w = np.empty((K, Q))
    for i in range(K):
        gu_w[spec.perm[i]] = pmf.permute_scalar(F4, chan_v[i], int(inv_g2[i]))
    r_in = trellis.bcjr_tailbiting(
        F4, trellis.TrellisObservations(gu_w, chan_p, spec.g1, spec.f1))
    ext_v = np.empty((K, Q))
    for i in range(K):
        ext_v[i] = pmf.permute_scalar(F4, r_in.mu[spec.perm[i]], int(spec.g2[i]))

    gv = pmf.normalize(chan_v * ext_v)
    obs_out = trellis.TrellisObservations(chan_u, gv, np.ones(K, int), spec.f2)
    r_out = trellis.bcjr_tailbiting_diff(F4, obs_out)
    want_u, _ = diff_posterior(F4, chan_u, gv, spec.f2, K)
    assert np.max(np.abs(r_out.state_app[1:] - want_u)) < 1e-9


def test_turbo_parallel_high_snr_smoke():
    # Es/N0 = 10 dB on the K=5 graph: CER < 1e-3 over 1e4 frames
    spec = petersen_spec()
    sigma2 = 1.0 / (2.0 * 10.0)
    rng = np.random.default_rng(18)
    n_frames = 10_000
    errors = 0
    for _ in range(n_frames):
        u = rng.integers(0, Q, size=5)
        pmfs = transmit_frame(spec, enc.encode(spec, u), sigma2, rng)
        res = trellis.turbo_decode_parallel(spec, pmfs, max_iter=20)
        errors += not np.array_equal(res.message, u)
    assert errors / n_frames < 1e-3


def test_turbo_serial_rejects_pccc():
    spec = petersen_spec()
    with pytest.raises(ValueError):
        trellis.turbo_decode_serial(spec, np.full((15, Q), 0.25))
