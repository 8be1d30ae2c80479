import json

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from oracles import lti_harmonic_gain, mathieu_circulant_gain
from tsresolvent.baseflow import trivial_base_flow
from tsresolvent.errors import (ConfigurationError, DimensionError, ResonanceError,
                                SingularShiftError, ZeroGainError)
from tsresolvent.grid import SpectralGrid
from tsresolvent.resolvent import (QuasiPeriodicSignal, ResolventSolution, TsrOperator,
                                   assemble_tsr, classical_resolvent_gain, normalize_modes,
                                   reconstruct_time_signal, sigma_min_L, solve_full_resolvent)
from tsresolvent.systems import MathieuParams, build_system, mathieu_system

W0 = np.sqrt(2.0)


def lti_mathieu(n_ts=5):
    s = mathieu_system(MathieuParams(alpha=0.0))
    return s, trivial_base_flow(s, SpectralGrid(n_ts, W0))


class TestAssembly:
    def test_mathieu_shape_and_blocks(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.0)
        assert op.L.shape == (10, 10)
        assert len(op.block_jacobians) == 5
        for J, t in zip(op.block_jacobians, mathieu_base.grid.times):
            k = 1 + 0.2 * np.cos(W0 * t)
            assert np.allclose(J, [[0, 1], [-k, -0.2]])
        # cos is even in theta, so blocks j and n_ts - j coincide
        assert len({np.round(J, 14).tobytes() for J in op.block_jacobians}) == 3

    def test_lti_blocks_equal(self):
        s, base = lti_mathieu()
        op = assemble_tsr(base, s, 1.0)
        assert all(np.array_equal(J, op.block_jacobians[0]) for J in op.block_jacobians)

    def test_two_term_structure(self, vdp, vdp_base):
        op = assemble_tsr(vdp_base, vdp, 0.7)
        D = vdp_base.grid.diff
        Jb = sp.block_diag(op.block_jacobians).toarray()
        L = 0.7j * np.eye(op.size) - Jb + vdp_base.omega0 * np.kron(D, np.eye(2))
        assert np.abs(op.dense_L() - L).max() <= 1e-13

    def test_constant_jacobian_spectrum(self):
        # omega_f = 0 with constant J: eigenvalues of L are -(lambda_i(J) - j k omega0)
        s, base = lti_mathieu(7)
        op = assemble_tsr(base, s, 0.0)
        J = op.block_jacobians[0]
        lam = np.linalg.eigvals(J)
        ks = np.arange(-3, 4)
        expected = np.concatenate([-(lam - 1j * k * W0) for k in ks])
        got = np.linalg.eigvals(op.dense_L())
        for e in expected:
            assert np.min(np.abs(got - e)) <= 1e-10

    @pytest.mark.parametrize("mode", ["harmonic", "quasi_periodic"])
    def test_input_map(self, mathieu, mathieu_base, mode):
        op = assemble_tsr(mathieu_base, mathieu, 1.0, mode)
        B = mathieu.input_matrix
        if mode == "harmonic":
            expected = np.kron(np.ones((5, 1)), B) / np.sqrt(5)
        else:
            expected = np.kron(np.eye(5), B)
        assert np.allclose(op.input_map.toarray(), expected)

    def test_bad_input_mode(self, mathieu, mathieu_base):
        with pytest.raises(ConfigurationError):
            assemble_tsr(mathieu_base, mathieu, 1.0, "periodic")

    def test_dimension_mismatch(self, vdp_base, cgl):
        with pytest.raises(DimensionError):
            assemble_tsr(vdp_base, cgl, 1.0)

    def test_with_frequency(self, vdp, vdp_base):
        op = assemble_tsr(vdp_base, vdp, 0.5)
        a = op.with_frequency(0.9).dense_L()
        assert np.allclose(a, assemble_tsr(vdp_base, vdp, 0.9).dense_L())


class TestFullResolvent:
    def test_lti_static_gain(self):
        s, base = lti_mathieu()
        op = assemble_tsr(base, s, 0.0, "harmonic")
        assert solve_full_resolvent(op).gain == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("omega", [0.3, 1.0, 2.2])
    def test_lti_matches_analytic(self, omega):
        s, base = lti_mathieu()
        op = assemble_tsr(base, s, omega, "harmonic")
        g = solve_full_resolvent(op).gain
        # analytic |H(j omega)| for the unit-input oscillator
        assert g == pytest.approx(lti_harmonic_gain(omega), rel=1e-12)

    @pytest.mark.parametrize("omega", [0.4, 1.0, 1.9])
    def test_mathieu_matches_circulant_oracle(self, mathieu, mathieu_base, omega):
        op = assemble_tsr(mathieu_base, mathieu, omega, "harmonic")
        assert solve_full_resolvent(op).gain == pytest.approx(
            mathieu_circulant_gain(omega, 5), rel=1e-12)

    def test_zero_input(self, mathieu_base):
        s = mathieu_system()
        op = TsrOperator(mathieu_base.grid, [s.dense_jacobian(np.zeros(2), t)
                                             for t in mathieu_base.grid.times],
                         1.0, "harmonic", np.zeros((2, 1)))
        assert solve_full_resolvent(op).gain == 0.0

    def test_resonance_error(self, vdp, vdp_base_fine):
        # at n_ts=31 truncation leaves sigma_min/sigma_max ~1e-8, right at the
        # threshold; the resolved 101-point orbit is singular to round-off
        op = assemble_tsr(vdp_base_fine, vdp, vdp_base_fine.omega0)
        with pytest.raises(ResonanceError, match="transverse"):
            solve_full_resolvent(op)

    def test_response_relation(self, vdp, vdp_base):
        op = assemble_tsr(vdp_base, vdp, 0.7 * vdp_base.omega0)
        sol = solve_full_resolvent(op)
        lhs = op.L @ (sol.gain * sol.response_mode)
        rhs = op.input_map @ sol.forcing_mode
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(rhs)
        assert np.linalg.norm(sol.response_mode) == pytest.approx(1.0)

    def test_sigma_min(self, vdp, vdp_base):
        op = assemble_tsr(vdp_base, vdp, vdp_base.omega0)
        smax = np.linalg.norm(op.dense_L(), 2)
        assert sigma_min_L(op) <= 1e-6 * smax
        assert sigma_min_L(op.with_frequency(0.5)) > 1e-3

    def test_sigma_min_sparse_path(self, vdp, vdp_base):
        op = assemble_tsr(vdp_base, vdp, 0.5)
        assert sigma_min_L(op, dense_limit=10) == pytest.approx(sigma_min_L(op), rel=1e-8)

    def test_json(self, vdp, vdp_base):
        sol = solve_full_resolvent(assemble_tsr(vdp_base, vdp, 0.5))
        d = json.loads(json.dumps(sol.to_dict()))
        assert d["variant"] == "full" and d["gain"] == sol.gain
        assert np.array(d["forcing_mode"]).shape == (sol.forcing_mode.size, 2)

    def test_bad_variant(self):
        with pytest.raises(ConfigurationError):
            ResolventSolution(1.0, np.ones(1), np.ones(1), "partial", 1.0)


class TestClassical:
    def test_scalar_pole(self):
        assert classical_resolvent_gain(-np.eye(1), np.eye(1), 0.0) == pytest.approx(1.0)

    def test_dominant_pole(self):
        assert classical_resolvent_gain(np.diag([-1.0, -2.0]), np.eye(2), 0.0) == pytest.approx(1.0)

    def test_matches_lti_tsr(self):
        s, base = lti_mathieu()
        op = assemble_tsr(base, s, 1.0, "harmonic")
        J = op.block_jacobians[0]
        g = classical_resolvent_gain(J, s.input_matrix, 1.0)
        assert g == pytest.approx(solve_full_resolvent(op).gain, rel=1e-12)

    def test_singular(self):
        with pytest.raises(SingularShiftError):
            classical_resolvent_gain(np.zeros((2, 2)), np.eye(2), 0.0)


class TestNormalize:
    def sol(self, vdp, vdp_base):
        op = assemble_tsr(vdp_base, vdp, 0.6)
        return op, solve_full_resolvent(op)

    def test_idempotent(self, vdp, vdp_base):
        op, sol = self.sol(vdp, vdp_base)
        a = normalize_modes(sol, op, vdp_base)
        b = normalize_modes(a, op, vdp_base)
        assert np.allclose(a.response_mode, b.response_mode, atol=1e-13)
        assert np.allclose(a.forcing_mode, b.forcing_mode, atol=1e-13)

    def test_phase_alignment(self, vdp, vdp_base):
        op, sol = self.sol(vdp, vdp_base)
        u = normalize_modes(sol, op, vdp_base).response_mode
        ip = np.vdot(vdp_base.states, u)
        assert ip.real >= 0 and abs(ip.imag) <= 1e-12

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0, 2 * np.pi))
    def test_gauge_invariance(self, phi):
        s = mathieu_system()
        base = trivial_base_flow(s, SpectralGrid(5, W0))
        op = assemble_tsr(base, s, 1.0)
        sol = solve_full_resolvent(op)
        rotated = ResolventSolution(sol.gain, sol.forcing_mode * np.exp(1j * phi),
                                    sol.response_mode * np.exp(1j * phi), "full", 1.0)
        a, b = normalize_modes(sol, op, base), normalize_modes(rotated, op, base)
        assert np.allclose(a.response_mode, b.response_mode, atol=1e-10)
        assert np.allclose(a.forcing_mode, b.forcing_mode, atol=1e-10)

    def test_mathieu_pair_relation(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.0, "harmonic")
        sol = normalize_modes(solve_full_resolvent(op), op, mathieu_base)
        Rv = op.solve(op.input_map @ sol.forcing_mode)
        assert np.linalg.norm(Rv - sol.gain * sol.response_mode) <= 1e-10 * sol.gain

    def test_zero_gain(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.0)
        z = ResolventSolution(0.0, np.ones(5), np.ones(10), "full", 1.0)
        with pytest.raises(ZeroGainError):
            normalize_modes(z, op, mathieu_base)


class TestTimeSignal:
    def test_t0(self, vdp_base):
        mode = np.arange(62) + 1j
        assert np.allclose(reconstruct_time_signal(mode, vdp_base.grid, 0.4, 0.0), mode[:2])

    def test_constant_envelope(self):
        g = SpectralGrid(5, 1.0)
        c = np.array([1.0 + 2j, -0.5])
        t = np.linspace(0, 9, 17)
        x = reconstruct_time_signal(np.tile(c, 5), g, 2.3, t)
        assert np.allclose(x, np.exp(2.3j * t)[:, None] * c)

    def test_sidebands(self):
        g = SpectralGrid(5, 1.0)
        th = g.thetas
        env = (1.0 + 0.5 * np.exp(1j * th))[:, None]
        wf = np.sqrt(2.0)
        sig = QuasiPeriodicSignal(env.ravel(), wf, 1.0, 5)
        t = np.arange(2 ** 14) * 0.05
        x = sig(t)[:, 0] * np.hanning(t.size)
        spec = np.abs(np.fft.fft(x))
        freqs = 2 * np.pi * np.fft.fftfreq(t.size, 0.05)
        dw = 2 * np.pi / (t.size * 0.05)
        peak = (spec > np.roll(spec, 1)) & (spec > np.roll(spec, -1)) & (spec > 0.05 * spec.max())
        found = np.sort(freqs[peak])
        assert found.size == 2
        assert np.allclose(found, [wf, wf + 1.0], atol=dw)
        # main-lobe energy removes the scalloping loss of single bins
        idx = np.flatnonzero(peak)
        energy = np.sort([np.sum(spec[i - 3:i + 4] ** 2) for i in idx])
        assert np.sqrt(energy[0] / energy[1]) == pytest.approx(0.5, rel=0.01)

    def test_bad_length(self):
        with pytest.raises(DimensionError):
            reconstruct_time_signal(np.ones(7), SpectralGrid(5, 1.0), 1.0, 0.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.2, 3.0))
def test_harmonic_gain_below_quasi_periodic(ratio):
    s = mathieu_system()
    base = trivial_base_flow(s, SpectralGrid(5, W0))
    h = solve_full_resolvent(assemble_tsr(base, s, ratio * W0, "harmonic")).gain
    q = solve_full_resolvent(assemble_tsr(base, s, ratio * W0, "quasi_periodic")).gain
    assert h <= q * (1 + 1e-12)


@settings(max_examples=10, deadline=None)
@given(st.integers(1, 30), st.floats(0.1, 0.9))
def test_gain_invariant_under_cyclic_relabeling(shift, ratio):
    # shifting the orbit phase conjugates L_TS by a block permutation
    from tsresolvent.baseflow import make_base_flow, vdp_orbit
    vdp = build_system("vdp")
    base = _VDP.get("b") or _VDP.setdefault("b", vdp_orbit(vdp, 31))
    rolled = make_base_flow(vdp, base.grid, np.roll(base.blocks, shift, axis=0).ravel())
    w = ratio * base.omega0
    a = solve_full_resolvent(assemble_tsr(base, vdp, w)).gain
    b = solve_full_resolvent(assemble_tsr(rolled, vdp, w)).gain
    assert a == pytest.approx(b, rel=1e-10)


_VDP = {}


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 2.0), st.integers(0, 2 ** 31))
def test_full_response_reproduces_forcing(ratio, seed):
    s = mathieu_system()
    base = trivial_base_flow(s, SpectralGrid(5, W0))
    op = assemble_tsr(base, s, ratio * W0)
    sol = solve_full_resolvent(op)
    r = op.L @ (sol.gain * sol.response_mode) - op.input_map @ sol.forcing_mode
    assert np.linalg.norm(r) <= 1e-10 * max(1.0, sol.gain)
