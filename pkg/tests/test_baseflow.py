import numpy as np
import pytest

from oracles import vdp_period_by_marching
from tsresolvent.baseflow import (BaseFlow, cgl_plane_wave, cgl_plane_wave_frequency,
                                  collocation_residual, make_base_flow, march_to_orbit,
                                  resample_base_flow, solve_orbit_newton, trivial_base_flow,
                                  vdp_orbit)
from tsresolvent.errors import (ConfigurationError, InvalidBaseFlowError, OrbitSolveError)
from tsresolvent.grid import SpectralGrid, fourier_coefficients
from tsresolvent.systems import CglParams, build_system, circle_system


class TestTrivial:
    def test_mathieu_zero(self, mathieu_base):
        assert not np.any(mathieu_base.states)
        assert mathieu_base.collocation_residual_norm == 0.0

    def test_cgl_zero_is_valid(self, cgl):
        base = trivial_base_flow(cgl, SpectralGrid(5, 0.19))
        assert base.collocation_residual_norm == 0.0

    def test_rejects_non_equilibrium(self):
        sys_ = build_system("mathieu")
        shifted = type(sys_)(**{**sys_.__dict__, "rhs": lambda w, t: w + 1.0})
        with pytest.raises(InvalidBaseFlowError):
            trivial_base_flow(shifted, SpectralGrid(5, 1.0))


class TestVdpOrbit:
    def test_period_and_residual(self, vdp_base):
        assert abs(vdp_base.period - 6.67) / 6.67 <= 0.01
        assert vdp_base.collocation_residual_norm <= 1e-10
        assert vdp_base.period == pytest.approx(2 * np.pi / vdp_base.omega0)

    def test_period_matches_time_march(self, vdp_base_fine):
        assert vdp_base_fine.period == pytest.approx(vdp_period_by_marching(), rel=1e-9)

    def test_stored_residual_is_truthful(self, vdp, vdp_base):
        r = collocation_residual(vdp, vdp_base.grid, vdp_base.states)
        expected = np.linalg.norm(r) / max(1.0, np.linalg.norm(vdp_base.states))
        assert vdp_base.collocation_residual_norm == pytest.approx(expected, abs=1e-16)

    def test_period_converges_with_doubling(self, vdp):
        # 41 -> 81: both grids resolve the orbit to machine precision
        a, b = vdp_orbit(vdp, 41), vdp_orbit(vdp, 81)
        assert abs(a.period - b.period) <= 1e-8

    def test_on_orbit_guess_converges_fast(self, vdp, vdp_base):
        base, info = solve_orbit_newton(vdp, vdp_base.grid, vdp_base.states, vdp_base.period,
                                        return_info=True)
        assert info["iterations"] <= 2
        assert base.period == pytest.approx(vdp_base.period, rel=1e-12)

    def test_phase_shifted_guess_gives_same_orbit(self, vdp, vdp_base):
        blocks = np.roll(vdp_base.blocks, 7, axis=0)
        base = solve_orbit_newton(vdp, vdp_base.grid, blocks.ravel(), vdp_base.period)
        m1 = np.sort(np.abs(fourier_coefficients(vdp_base.blocks)).ravel())
        m2 = np.sort(np.abs(fourier_coefficients(base.blocks)).ravel())
        assert np.abs(m1 - m2).max() <= 1e-8

    def test_requires_autonomous(self, mathieu):
        with pytest.raises(ConfigurationError):
            solve_orbit_newton(mathieu, SpectralGrid(5, 1.0), np.zeros(10), 6.0)

    def test_non_convergence_reports_residual(self, vdp, vdp_base):
        guess = vdp_base.states * 1.5
        with pytest.raises(OrbitSolveError) as exc:
            solve_orbit_newton(vdp, vdp_base.grid, guess, vdp_base.period * 1.1, max_iter=1)
        assert exc.value.residual > 0

    def test_march_to_orbit(self, vdp):
        states, period = march_to_orbit(vdp, [2.0, 0.0], 31)
        assert period == pytest.approx(6.663, rel=1e-3)
        assert states.size == 62


class TestCglPlaneWave:
    def test_frequency(self):
        k = 2 * np.pi / 20
        assert cgl_plane_wave_frequency(CglParams(), "continuous") == pytest.approx(
            0.2 * (1 - k * k) + 0.1 * k * k)
        assert cgl_plane_wave_frequency(CglParams(), "continuous") == pytest.approx(0.19013, abs=1e-5)

    def test_amplitude(self, cgl_base):
        w = cgl_base.blocks
        amp = np.sqrt(w[:, :50] ** 2 + w[:, 50:] ** 2)
        # second-order stencil sees k_eff^2 = (2 - 2 cos(k dx)) / dx^2
        p = CglParams()
        k2 = (2 - 2 * np.cos(p.wavenumber * p.dx)) / p.dx ** 2
        assert amp == pytest.approx(np.full_like(amp, np.sqrt(1 - k2)), abs=1e-12)
        # and stays within the stencil error of the continuous amplitude
        assert amp[0, 0] == pytest.approx(np.sqrt(1 - p.wavenumber ** 2), abs=1e-4)

    def test_discrete_wave_is_exact_collocation_solution(self, cgl_base):
        assert cgl_base.collocation_residual_norm <= 1e-12

    def test_continuous_wave_residual_is_reported(self):
        p = CglParams()
        w0 = cgl_plane_wave_frequency(p, "continuous")
        base = cgl_plane_wave(p, SpectralGrid(21, w0), wavenumber_model="continuous", rtol=1e-3)
        # O(dx^2) stencil error shows up in the residual rather than being hidden
        assert 1e-6 < base.collocation_residual_norm < 1e-2

    def test_frequency_mismatch(self):
        with pytest.raises(ConfigurationError):
            cgl_plane_wave(CglParams(), SpectralGrid(21, 0.3))


class TestSerialization:
    def test_json_round_trip(self, vdp_base):
        b = BaseFlow.from_json(vdp_base.to_json())
        assert np.array_equal(b.states, vdp_base.states)
        assert b.grid == vdp_base.grid and b.period == vdp_base.period

    def test_resample(self, vdp, vdp_base_fine):
        # upsampling a resolved orbit is exact up to interpolation round-off
        b = resample_base_flow(vdp, vdp_base_fine, 303)
        assert b.collocation_residual_norm <= 1e-9
        assert b.period == vdp_base_fine.period


def test_circle_orbit_exact():
    sys_ = circle_system(1.0)
    g = SpectralGrid(7, 1.0)
    states = np.column_stack([np.cos(g.thetas), np.sin(g.thetas)]).ravel()
    assert make_base_flow(sys_, g, states).collocation_residual_norm <= 1e-14
