import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from whtdm.equalizer import (
    DetectorParams, cdmamp_detect, cdmamp_detect_memory, cdmamp_iterations, mmse_one_tap,
    qpsk_denoiser,
)
from whtdm.waveforms import RxObservation

from conftest import QPSK, crandn, hard, ml_detect, random_qpsk, well_conditioned, whtdm_instance

BOUND = 1 / np.sqrt(2) + 1e-12


class TestParams:
    def test_defaults(self):
        p = DetectorParams()
        assert (p.iterations, p.damping, p.band_half_width, p.variance_floor) == (50, 0.6, 8, 1e-8)
        assert not p.memory_enabled and p.early_stop_tol is None

    @pytest.mark.parametrize("kw", [dict(iterations=0), dict(damping=0.0), dict(damping=1.0),
                                    dict(variance_floor=0.0), dict(band_half_width=-1),
                                    dict(early_stop_tol=0.0)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            DetectorParams(**kw)


class TestMmse:
    def test_examples(self):
        assert np.allclose(mmse_one_tap([0.3 - 2j], [1.0], 0.0), [0.3 - 2j])
        assert mmse_one_tap([2.0], [2.0], 0.0)[0] == 1.0
        assert mmse_one_tap([1.0], [1.0], 1.0)[0] == 0.5
        assert mmse_one_tap([1.0], [0.0], 0.0)[0] == 0.0

    def test_checks(self):
        with pytest.raises(ValueError):
            mmse_one_tap([1, 2], [1], 0.1)
        with pytest.raises(ValueError):
            mmse_one_tap([1], [1], -0.1)


class TestDenoiser:
    def test_examples(self):
        assert qpsk_denoiser(0j, 1.0) == 0
        assert abs(qpsk_denoiser(10 + 10j, 0.01) - (1 + 1j) / np.sqrt(2)) < 1e-9
        # tanh(sqrt(2) * 0.5) / sqrt(2)
        assert abs(qpsk_denoiser(0.5, 1.0) - 0.4305285857902738) < 1e-12

    @given(st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False),
           st.floats(1e-8, 1e3))
    def test_bounded_and_conjugate_symmetric(self, p, tau):
        out = qpsk_denoiser(p, tau)
        assert abs(out.real) <= BOUND and abs(out.imag) <= BOUND
        assert qpsk_denoiser(np.conj(p), tau) == np.conj(out)

    @given(st.floats(-3, 3), st.floats(0.01, 0.99), st.floats(0.1, 10))
    def test_monotone(self, a, step, tau):
        # strict only before tanh saturates in double precision
        assume(np.sqrt(2) * max(abs(a), abs(a + step)) / tau < 15)
        assert qpsk_denoiser(a + step, tau).real > qpsk_denoiser(a, tau).real


class TestCdMamp:
    @pytest.mark.parametrize("alpha", [0.2, 0.6, 0.9])
    @pytest.mark.parametrize("scale", [1.0, 2.0])
    def test_scaled_identity_recovery(self, rng, alpha, scale):
        x, _ = random_qpsk(rng, 64)
        G = scale * np.eye(64, dtype=complex)
        out = cdmamp_detect(scale * x, G, DetectorParams(damping=alpha), 0.0)
        assert np.array_equal(hard(out), hard(x))

    def test_memory_collapses_to_plain_for_identity(self, rng):
        x, _ = random_qpsk(rng, 32)
        z = x + 0.3 * crandn(rng, 32)
        G = np.eye(32, dtype=complex)
        plain = cdmamp_detect(z, G, DetectorParams(), 0.09)
        mem = cdmamp_detect_memory(z, G, DetectorParams(), 0.09)
        assert np.max(np.abs(plain - mem)) < 1e-14
        for state in cdmamp_iterations(z, G, DetectorParams(iterations=5), 0.09, memory=True):
            assert np.max(np.abs(state.gamma - state.residual)) < 1e-14

    def test_ml_oracle_small(self, rng):
        agree = 0
        trials = 100
        for _ in range(trials):
            G = well_conditioned(rng)
            x, _ = random_qpsk(rng, 8)
            z = G @ x
            assert np.array_equal(ml_detect(z, G), x)
            agree += np.array_equal(hard(cdmamp_detect(z, G, DetectorParams(), 0.0)), hard(x))
        assert agree >= 0.95 * trials

    def test_memory_no_worse_on_small_instances(self, rng):
        wins = 0
        trials = 100
        for _ in range(trials):
            G = well_conditioned(rng)
            x, _ = random_qpsk(rng, 8)
            z = G @ x
            e_plain = np.sum(hard(cdmamp_detect(z, G, DetectorParams(), 0.0)) != hard(x))
            e_mem = np.sum(hard(cdmamp_detect_memory(z, G, DetectorParams(), 0.0)) != hard(x))
            wins += e_mem <= e_plain
        assert wins >= 0.8 * trials

    def test_state_invariants(self):
        eq, x, z, s2 = whtdm_instance(5)
        params = DetectorParams(iterations=30)
        prev = np.zeros(64, complex)
        for mem in (False, True):
            prev = np.zeros(64, complex)
            for state in cdmamp_iterations(RxObservation("WHTDM", z, s2), eq, params, memory=mem):
                assert np.all(state.tau >= params.variance_floor)
                assert abs(state.theta - 64 / eq.frobenius_norm_sq) < 1e-15
                assert abs(state.theta_m - 1 / eq.lambda_max) < 1e-15
                assert abs(state.tau - (s2 + np.mean(np.abs(state.residual) ** 2))) < 1e-12
                for part in (np.real, np.imag):
                    lo = np.minimum(part(prev), part(state.x_undamped)) - 1e-15
                    hi = np.maximum(part(prev), part(state.x_undamped)) + 1e-15
                    assert np.all((lo <= part(state.x_hat)) & (part(state.x_hat) <= hi))
                    assert np.all(np.abs(part(state.x_hat)) <= BOUND)
                prev = state.x_hat

    def test_fixed_point(self, rng):
        eq, x, _, _ = whtdm_instance(8)
        z = (eq.banded @ x[:, None])[:, 0]
        for s2 in (0.0, 0.01):
            state = next(cdmamp_iterations(z, eq, DetectorParams(), s2, x_init=x))
            assert np.max(np.abs(state.residual)) < 1e-14
            assert abs(state.tau - max(s2, 1e-8)) < 1e-14
            assert np.array_equal(hard(state.x_hat), hard(x))

    def test_band_override_and_raw_matrix(self):
        eq, x, z, s2 = whtdm_instance(2)
        a = cdmamp_detect(z, eq, DetectorParams(band_half_width=4), s2)
        b = cdmamp_detect(z, eq.full, DetectorParams(band_half_width=4), s2)
        assert np.allclose(a, b, atol=1e-12)

    def test_batched_matches_single(self):
        insts = [whtdm_instance(s) for s in range(3)]
        G = np.stack([i[0].full for i in insts])
        z = np.stack([i[2] for i in insts])
        batch = cdmamp_detect(z, G, DetectorParams(), 0.01)
        for k, (eq, _, zk, _) in enumerate(insts):
            assert np.allclose(batch[k], cdmamp_detect(zk, eq.full, DetectorParams(), 0.01), atol=1e-12)

    def test_early_stop(self, rng):
        x, _ = random_qpsk(rng, 16)
        G = np.eye(16, dtype=complex)
        states = list(cdmamp_iterations(x, G, DetectorParams(early_stop_tol=1e-6), 0.0))
        assert len(states) < 50
        assert np.array_equal(hard(states[-1].x_hat), hard(x))

    def test_options(self, rng):
        x, _ = random_qpsk(rng, 16)
        G = np.eye(16) + 0.1 * rng.standard_normal((16, 16))
        z = G @ x
        herm = cdmamp_detect(z, G, DetectorParams(), 0.0)
        literal = cdmamp_detect(z, G, DetectorParams(hermitian=False), 0.0)
        assert np.allclose(herm, literal)
        halved = cdmamp_detect(z, G, DetectorParams(tau_per_real_dim=True), 0.0)
        assert np.array_equal(hard(halved), hard(x))

    def test_rejects_bad_input(self):
        G = np.eye(8, dtype=complex)
        z = np.ones(8, complex)
        with pytest.raises(ValueError):
            cdmamp_detect(z[:4], G)
        bad = z.copy()
        bad[0] = np.nan
        with pytest.raises(ValueError, match="non-finite"):
            cdmamp_detect(bad, G)

    def test_convergence_time_memory_vs_plain(self):
        # iterations until ||r||^2/N < 2 sigma^2, capped at the iteration budget
        params = DetectorParams()
        plain_t, mem_t = [], []
        for seed in range(200):
            eq, _, z, s2 = whtdm_instance(seed)
            for mem, out in ((False, plain_t), (True, mem_t)):
                t_hit = params.iterations
                for st_ in cdmamp_iterations(z, eq, params, s2, memory=mem):
                    if st_.residual_power < 2 * s2:
                        t_hit = st_.iteration
                        break
                out.append(t_hit)
        print(f"median iterations: plain {np.median(plain_t)}, memory {np.median(mem_t)}; "
              f"reached: plain {np.mean(np.array(plain_t) < 50):.2f}, memory {np.mean(np.array(mem_t) < 50):.2f}")
        assert np.median(mem_t) <= np.median(plain_t)
