import csv

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import vdp_period_by_marching
from tsresolvent.errors import InsufficientSpanError, SettleError, StiffnessError, ZeroGainError
from tsresolvent.floquet import slowest_decay_rate
from tsresolvent.resolvent import assemble_tsr, solve_full_resolvent
from tsresolvent.transverse import (build_projector, resonant_full_forcing, solve_reconstructed,
                                    transverse_svd)
from tsresolvent.validation import (IntegrationResult, LinearizedDynamics, choose_window,
                                    export_stroboscopic, export_time_series, fit_slope,
                                    forcing_envelope, integrate, measure_gain, measure_gains,
                                    settle_time, simulate_linearized, stroboscopic_series,
                                    synthesize_forcing, transverse_component)

W0 = np.sqrt(2.0)


class TestIntegrate:
    def test_exponential(self):
        r = integrate(lambda t, y: -y, [1.0], (0, 1), rtol=1e-10)
        assert r.states[-1, 0] == pytest.approx(np.exp(-1), rel=1e-9)
        assert np.all(np.diff(r.times) > 0)
        assert r.solver_stats["nfev"] > 0

    def test_circle_radius(self):
        T = 2 * np.pi
        r = integrate(lambda t, y: np.array([-y[1], y[0]]), [1.0, 0.0], (0, 100 * T),
                      rtol=1e-10, atol=1e-12)
        assert abs(np.hypot(*r.states[-1]) - 1) <= 1e-6

    def test_vdp_settles_on_orbit(self, vdp):
        r = integrate(lambda t, y: vdp.rhs(y, t), [0.1, 0.0], (0, 120), dense_output=True)
        # zero up-crossings of y after the transient
        t = np.linspace(60, 120, 60001)
        y = r.dense(t)[:, 0]
        up = t[1:][(y[:-1] < 0) & (y[1:] >= 0)]
        assert np.mean(np.diff(up)) == pytest.approx(vdp_period_by_marching(), rel=1e-4)

    def test_non_finite_start(self):
        with pytest.raises(ValueError):
            integrate(lambda t, y: -y, [np.nan], (0, 1))

    def test_step_underflow(self):
        with pytest.raises(StiffnessError):
            integrate(lambda t, y: y ** 2, [1.0], (0, 2))

    def test_dense_shape(self):
        r = integrate(lambda t, y: -y, np.ones((3, 2)), (0, 1), dense_output=True)
        assert r.dense(np.array([0.1, 0.2])).shape == (2, 3, 2)


class TestForcing:
    def test_harmonic_is_sinusoid(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.0, "harmonic")
        sol = solve_full_resolvent(op)
        t = np.linspace(0, 20, 301)
        f = synthesize_forcing(sol, op, t, real=False)
        assert np.allclose(np.abs(f[:, 1]), np.abs(f[0, 1]))
        assert np.allclose(f[:, 1], f[0, 1] * np.exp(1j * t))
        assert np.allclose(f[:, 0], 0)

    def test_quasi_periodic_sidebands(self, mathieu, mathieu_base):
        wf = 0.37 * W0 * np.pi
        op = assemble_tsr(mathieu_base, mathieu, wf, "quasi_periodic")
        sol = solve_full_resolvent(op)
        dt = 0.05
        t = np.arange(2 ** 15) * dt
        x = synthesize_forcing(sol, op, t, real=False)[:, 1] * np.hanning(t.size)
        spec = np.abs(np.fft.fft(x))
        freqs = 2 * np.pi * np.fft.fftfreq(t.size, dt)
        peak = (spec > np.roll(spec, 1)) & (spec > np.roll(spec, -1)) & (spec > 1e-6 * spec.max())
        dw = 2 * np.pi / (t.size * dt)
        allowed = wf + W0 * np.arange(-2, 3)
        for w in freqs[peak]:
            assert np.min(np.abs(allowed - w)) <= 1.5 * dw

    def test_commensurate_periodicity(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.5 * W0, "quasi_periodic")
        sol = solve_full_resolvent(op)
        T = 2 * (2 * np.pi / W0)
        a, b = synthesize_forcing(sol, op, [0.0, T])
        assert np.allclose(a, b, atol=1e-12)


class TestWindows:
    def test_non_autonomous(self):
        assert choose_window(0.37, 20, False) == 20

    def test_integer_ratio(self):
        assert choose_window(1.0, 20, True) == 20

    def test_beat_resolved(self):
        # ratio 1.5: even windows cancel the cross terms exactly
        assert choose_window(1.5, 21, True) % 2 == 0

    def test_settle(self):
        assert settle_time(2.0, 0.1) == pytest.approx(300.0)
        assert settle_time(2.0, None) == pytest.approx(100.0)


class TestMeasureGain:
    def test_mathieu_resonance(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.0, "harmonic")
        sol = solve_full_resolvent(op)
        m = measure_gain(mathieu, mathieu_base, forcing_envelope(sol, op), 1.0,
                         decay_rate=slowest_decay_rate(mathieu_base, mathieu) or 0.1)
        assert abs(m.simulated_gain - sol.gain) / sol.gain <= 1e-3
        assert m.window_periods == 20 and m.simulated_gain >= 0

    def test_window_doubling(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 0.8, "harmonic")
        env = forcing_envelope(solve_full_resolvent(op), op)
        a = measure_gain(mathieu, mathieu_base, env, 0.8, settle_periods=70, window_periods=20)
        b = measure_gain(mathieu, mathieu_base, env, 0.8, settle_periods=70, window_periods=40)
        assert abs(a.simulated_gain - b.simulated_gain) / a.simulated_gain <= 1e-3

    def test_zero_forcing(self, mathieu, mathieu_base):
        with pytest.raises(ZeroGainError):
            measure_gain(mathieu, mathieu_base, np.zeros(10), 1.0, settle_periods=5)

    def test_unsettled(self, mathieu, mathieu_base):
        op = assemble_tsr(mathieu_base, mathieu, 1.0, "harmonic")
        env = forcing_envelope(solve_full_resolvent(op), op)
        with pytest.raises(SettleError, match="settle_periods"):
            measure_gain(mathieu, mathieu_base, env, 1.0, settle_periods=0, window_periods=2)

    def test_batch_equals_single(self, mathieu, mathieu_base):
        envs, ws = [], [0.7, 1.9]
        for w in ws:
            op = assemble_tsr(mathieu_base, mathieu, w, "harmonic")
            envs.append(forcing_envelope(solve_full_resolvent(op), op))
        batch = measure_gains(mathieu, mathieu_base, envs, ws, settle_periods=70)
        single = measure_gain(mathieu, mathieu_base, envs[1], ws[1], settle_periods=70)
        assert batch[1].simulated_gain == pytest.approx(single.simulated_gain, rel=1e-6)

    def test_vdp_reconstructed(self, vdp, vdp_base, vdp_pair):
        w = 0.6 * vdp_base.omega0
        op = assemble_tsr(vdp_base, vdp, w)
        rec = solve_reconstructed(op, vdp_pair)
        m = measure_gain(vdp, vdp_base, op.input_map @ rec.solution.forcing_mode, w,
                         decay_rate=slowest_decay_rate(vdp_base, vdp))
        assert abs(m.simulated_gain - rec.solution.gain) / rec.solution.gain <= 1e-2


class TestTransverseComponent:
    def test_p0(self, vdp_pair):
        from tsresolvent.grid import Interpolant
        t = 1.234
        p = Interpolant(vdp_pair.p0.reshape(31, -1))(np.mod(vdp_pair.grid.omega0 * t, 2 * np.pi))
        c, v = transverse_component(p, vdp_pair, t)
        assert c == pytest.approx(1.0) and np.linalg.norm(v) <= 1e-12

    def test_orthogonal(self, vdp_pair):
        q = vdp_pair.q0[:2]
        eta = np.array([q[1], -q[0]]).conj()
        c, _ = transverse_component(eta, vdp_pair, 0.0)
        assert abs(c) <= 1e-14


class TestStroboscopic:
    def test_zero_forcing(self, vdp, vdp_base, vdp_pair):
        r = simulate_linearized(vdp, vdp_base, np.zeros(62), 1.0, 11 * vdp_base.period)
        s = stroboscopic_series(r, vdp_pair)
        assert np.all(s.c == 0) and len(s.k) == 12

    def test_insufficient_span(self, vdp, vdp_base, vdp_pair):
        r = simulate_linearized(vdp, vdp_base, np.zeros(62), 1.0, 3 * vdp_base.period)
        with pytest.raises(InsufficientSpanError):
            stroboscopic_series(r, vdp_pair)

    def test_projected_vs_unprojected(self, vdp, vdp_base, vdp_pair, tmp_path):
        op = assemble_tsr(vdp_base, vdp, vdp_base.omega0)
        P = build_projector(op, vdp_pair)
        sol = transverse_svd(op, P)
        T = 20 * vdp_base.period
        slopes = {}
        for tag, v in (("proj", sol.forcing_mode), ("full", resonant_full_forcing(op, P))):
            r = simulate_linearized(vdp, vdp_base, op.input_map @ v, op.omega_f, T)
            s = stroboscopic_series(r, vdp_pair)
            slopes[tag] = abs(s.slope())
            if tag == "proj":
                assert slopes[tag] <= 1e-3 * s.v_norm.max()
                export_stroboscopic(tmp_path / "s.csv", s)
        assert slopes["full"] > 10 * slopes["proj"]
        rows = list(csv.reader(open(tmp_path / "s.csv")))
        assert rows[0] == ["k", "c_re", "c_im", "v_norm"] and len(rows) == 22


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-1, 1))
def test_fit_slope_exact_for_lines(a, b, noise_free):
    k = np.arange(12)
    assert fit_slope(k, a + b * k) == pytest.approx(b, abs=1e-10)


def test_linearized_rhs_uses_interpolated_state(vdp, vdp_base):
    dyn = LinearizedDynamics(vdp, vdp_base)
    t = 0.77
    w = dyn.state(t)
    assert np.allclose(dyn.jacobian(t), vdp.dense_jacobian(w, t))
    f = dyn.rhs(None)
    y = np.array([0.3, -0.2])
    assert np.allclose(f(t, y), vdp.dense_jacobian(w, t) @ y)


def test_export_time_series(tmp_path):
    t = np.linspace(0, 1, 5)
    x = np.column_stack([t, 1j * t])
    export_time_series(tmp_path / "a.csv", t, x, part="complex")
    rows = list(csv.reader(open(tmp_path / "a.csv")))
    assert rows[0] == ["t", "x0_re", "x1_re", "x0_im", "x1_im"]
    assert float(rows[-1][4]) == 1.0


def test_integration_result_fields():
    r = integrate(lambda t, y: -y, [1.0], (0, 1))
    assert isinstance(r, IntegrationResult)
    assert np.all(np.isfinite(r.states))
