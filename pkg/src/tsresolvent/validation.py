"""Time-domain oracles for resolvent predictions.

Forced linearized (and nonlinear) dynamics are integrated with an adaptive
embedded Runge-Kutta pair and the steady response is compared with the
time-spectral prediction.  Forcing is applied as the complex analytic signal
``f(t) = f_hat(omega0 t) exp(j omega_f t)``; the linear response to the real
forcing ``Re f`` is the real part of the complex response.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .baseflow import BaseFlow
from .errors import InsufficientSpanError, SettleError, StiffnessError, ZeroGainError
from .floquet import FloquetPair
from .grid import Interpolant, SpectralGrid
from .resolvent import EnvelopeSignal, ResolventSolution, TsrOperator
from .systems import SystemModel


@dataclass(frozen=True, eq=False)
class IntegrationResult:
    """Trajectory returned by :func:`integrate`.

    Attributes
    ----------
    times : ndarray
        Strictly increasing output times.
    states : ndarray, shape (len(times), ...)
    solver_stats : dict
        ``nfev``, ``steps`` and ``method``.
    dense : callable or None
        Continuous extension ``dense(t)`` when requested.
    """

    times: np.ndarray
    states: np.ndarray
    solver_stats: dict
    dense: Optional[Callable] = None


def integrate(rhs: Callable, y0, t_span, rtol: float = 1e-10, atol: float = 1e-12,
              method: str = "DOP853", t_eval=None, dense_output: bool = False,
              max_step: float = np.inf) -> IntegrationResult:
    """Adaptive Dormand-Prince integration of ``y' = rhs(t, y)``.

    Parameters
    ----------
    rhs : callable
        ``rhs(t, y)``; complex states are allowed.
    y0 : array_like
    t_span : (float, float)
    method : {"DOP853", "RK45"}
        Embedded Dormand-Prince pairs of order 8 and 5.

    Raises
    ------
    StiffnessError
        When the step size underflows.
    """
    y0 = np.asarray(y0)
    if not np.all(np.isfinite(y0)):
        raise ValueError("initial state must be finite")
    sol = solve_ivp(rhs, t_span, y0.ravel(), method=method, rtol=rtol, atol=atol,
                    t_eval=t_eval, dense_output=dense_output, max_step=max_step)
    if sol.status < 0:
        raise StiffnessError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    states = sol.y.T.reshape((sol.t.size,) + y0.shape)
    stats = {"nfev": int(sol.nfev), "steps": int(sol.t.size), "method": method}
    dense = None
    if dense_output:
        shape = y0.shape

        def dense(t):
            out = sol.sol(np.asarray(t, dtype=float))
            return np.moveaxis(out, 0, -1).reshape(np.shape(t) + shape)
    return IntegrationResult(sol.t, states, stats, dense)


class LinearizedDynamics:
    """``eta' = J(w_bar(t), t) eta + f(t)`` along a sampled base flow.

    The base state at time ``t`` comes from trigonometric interpolation of
    the collocation states; the Jacobian is then evaluated analytically.
    """

    def __init__(self, sys: SystemModel, base: BaseFlow):
        self.sys = sys
        self.base = base
        self.omega0 = base.omega0
        self.zero = not np.any(base.states)
        self.interp = Interpolant(base.blocks)

    def state(self, t) -> np.ndarray:
        theta = np.mod(self.omega0 * np.asarray(t, dtype=float), 2 * np.pi)
        return self.interp(theta).real

    def jacobian(self, t):
        w = np.zeros(self.sys.state_dim) if self.zero else self.state(t)
        return self.sys.jacobian(w, t)

    def rhs(self, forcing: Optional[Callable], batch: int = 1) -> Callable:
        """ODE right-hand side for ``batch`` independent responses.

        ``forcing(t)`` must return an array of shape ``(batch, n)`` (or
        ``(n,)`` when ``batch == 1``).
        """
        n = self.sys.state_dim

        def f(t, y):
            Y = y.reshape(batch, n)
            w = np.zeros(n) if self.zero else self.state(t)
            dY = self.sys.apply_jacobian(w, t, Y.T).T
            if forcing is not None:
                dY = dY + np.reshape(forcing(t), (batch, n))
            return dY.ravel()
        return f


class BatchForcing:
    """Several quasi-periodic forcings ``f_i(t) = env_i(omega0 t) exp(j omega_i t)``.

    Parameters
    ----------
    envelopes : sequence of ndarray
        Stacked physical forcing envelopes (``B_TS v``), each ``n * n_ts``.
    omegas : sequence of float
        Carrier frequencies.
    grid : SpectralGrid
    scale : float
        Common amplitude factor.
    """

    def __init__(self, envelopes: Sequence[np.ndarray], omegas: Sequence[float],
                 grid: SpectralGrid, scale: float = 1.0):
        env = np.stack([np.asarray(e, dtype=complex).reshape(grid.n_ts, -1)
                        for e in envelopes], axis=1)  # (n_ts, batch, n)
        self.batch, self.n = env.shape[1], env.shape[2]
        self.interp = Interpolant(scale * env)
        self.omegas = np.asarray(omegas, dtype=float)
        self.omega0 = grid.omega0

    def __call__(self, t):
        theta = np.mod(self.omega0 * t, 2 * np.pi)
        carrier = np.exp(1j * self.omegas * t)
        return self.interp(theta) * carrier[:, None]


def forcing_envelope(sol: ResolventSolution, op: TsrOperator) -> np.ndarray:
    """Stacked physical forcing envelope ``B_TS v`` for a solution."""
    return op.input_map @ np.asarray(sol.forcing_mode, dtype=complex)


def synthesize_forcing(sol: ResolventSolution, op: TsrOperator, t, real: bool = True):
    """Physical forcing at time(s) ``t``.

    Interpolates the envelope ``B_TS v``, multiplies by the carrier and, by
    default, returns the real part.
    """
    sig = EnvelopeSignal(forcing_envelope(sol, op).reshape(op.grid.n_ts, -1),
                         op.grid.omega0, op.omega_f)
    out = sig(t)
    return out.real if real else out


@dataclass(frozen=True)
class GainMeasurement:
    """Steady-state gain extracted from a simulation.

    Attributes
    ----------
    omega_f : float
    simulated_gain : float
    settle_periods : float
        Base periods integrated before the analysis window.
    window_periods : int
        Base periods in the analysis window.
    trend : float
        Relative change of the response RMS between the two last windows.
    """

    omega_f: float
    simulated_gain: float
    settle_periods: float
    window_periods: int
    trend: float = 0.0


def choose_window(ratio: float, min_periods: int, autonomous: bool,
                  max_factor: int = 50) -> int:
    """Whole number of base periods for the averaging window.

    For autonomous systems the response mixes carriers ``omega_f + k omega0``
    with the neutral mode at ``k omega0``.  Their cross terms average to
    ``sin(pi m r) / (pi m d)`` over ``m`` periods (``d`` the distance of the
    ratio ``r`` to the nearest integer), so ``m`` is chosen to minimise
    ``|sin(pi m r)| / m``.  The search covers at least one beat period
    ``1 / d`` beyond ``min_periods``, capped at ``max_factor * min_periods``.
    """
    if not autonomous:
        return int(min_periods)
    d = abs(ratio - np.round(ratio))
    upper = 3 * min_periods
    if d > 0:
        upper = max(upper, int(np.ceil(1.0 / d)) + min_periods)
    upper = min(upper, max_factor * min_periods)
    ms = np.arange(min_periods, upper + 1)
    score = np.abs(np.sin(np.pi * ms * ratio)) / ms
    # shortest window among the (numerically) best ones
    return int(ms[np.argmax(score <= score.min() + 1e-12)])


def settle_time(period: float, decay_rate: Optional[float] = None,
                time_constants: float = 30.0, default_periods: float = 50.0) -> float:
    """``time_constants / decay_rate`` when the slowest decay is known, else a fixed span."""
    if decay_rate is not None and decay_rate > 0:
        return time_constants / decay_rate
    return default_periods * period


def window_rms(samples: np.ndarray) -> np.ndarray:
    """RMS over the sample axis (axis 0), summing over the state axis (last)."""
    return np.sqrt(np.mean(np.sum(np.abs(samples) ** 2, axis=-1), axis=0))


def measure_gains(sys: SystemModel, base: BaseFlow, envelopes: Sequence[np.ndarray],
                  omegas: Sequence[float], settle_periods: Optional[float] = None,
                  window_periods: int = 20, decay_rate: Optional[float] = None,
                  samples_per_period: Optional[int] = None, rtol: float = 1e-10,
                  atol: float = 1e-13, method: str = "DOP853", trend_tol: float = 0.01,
                  check_trend: bool = True) -> list:
    """Simulated gains for a batch of forcings, integrated from rest.

    All forcings share one integration (a block-diagonal system), which keeps
    the Python overhead per step independent of the batch size.

    Parameters
    ----------
    envelopes : sequence of ndarray
        Stacked physical forcing envelopes ``B_TS v``.
    omegas : sequence of float
        Carrier frequencies.
    settle_periods : float, optional
        Base periods before the analysis; by default 30 decay times when
        ``decay_rate`` is known, else 50 periods.
    window_periods : int
        Minimum averaging window, in base periods.

    Returns
    -------
    list of GainMeasurement

    Raises
    ------
    SettleError
        If the RMS response of two consecutive windows differs by more than
        ``trend_tol``.
    """
    grid = base.grid
    T0 = grid.period
    if settle_periods is None:
        settle_periods = settle_time(T0, decay_rate) / T0
    omegas = np.asarray(omegas, dtype=float)
    forcing = BatchForcing(envelopes, omegas, grid)
    dyn = LinearizedDynamics(sys, base)
    ms = [choose_window(w / grid.omega0, window_periods, sys.autonomous) for w in omegas]
    m_max = max(ms)
    t_settle = np.ceil(settle_periods) * T0
    t_end = t_settle + 2 * m_max * T0
    S = samples_per_period or max(64, 4 * grid.n_ts)
    n = sys.state_dim
    y0 = np.zeros((forcing.batch, n), dtype=complex)
    res = integrate(dyn.rhs(forcing, forcing.batch), y0, (0.0, t_end), rtol=rtol,
                    atol=atol, method=method, dense_output=True)
    out = []
    for i, (w, m) in enumerate(zip(omegas, ms)):
        t1 = t_end - m * T0 + T0 * np.arange(m * S) / S
        t0 = t1 - m * T0
        eta1 = res.dense(t1)[:, i, :]
        eta0 = res.dense(t0)[:, i, :]
        f1 = np.stack([forcing(t)[i] for t in t1])
        fr = window_rms(f1)
        if fr == 0:
            raise ZeroGainError("zero forcing in the analysis window")
        g1, g0 = window_rms(eta1) / fr, window_rms(eta0) / fr
        trend = abs(g1 - g0) / max(g1, 1e-300)
        if check_trend and trend > trend_tol:
            raise SettleError(
                f"response at omega_f={w:.6g} still changing by {100 * trend:.2f}% between "
                f"windows; increase settle_periods")
        out.append(GainMeasurement(float(w), float(g1), float(t_settle / T0 + m), m, trend))
    return out


def measure_gain(sys: SystemModel, base: BaseFlow, forcing_envelope, omega_f: float,
                 settle_periods: Optional[float] = None, window_periods: int = 20,
                 **kw) -> GainMeasurement:
    """Simulated gain for one forcing envelope; see :func:`measure_gains`."""
    return measure_gains(sys, base, [forcing_envelope], [omega_f], settle_periods,
                         window_periods, **kw)[0]


def simulate_linearized(sys: SystemModel, base: BaseFlow, envelope, omega_f: float,
                        t_end: float, y0=None, rtol: float = 1e-10, atol: float = 1e-13,
                        method: str = "DOP853", scale: float = 1.0) -> IntegrationResult:
    """Linearized response to one complex forcing, with dense output."""
    forcing = BatchForcing([envelope], [omega_f], base.grid, scale)
    dyn = LinearizedDynamics(sys, base)
    y0 = np.zeros(sys.state_dim, complex) if y0 is None else np.asarray(y0, complex)
    return integrate(dyn.rhs(forcing, 1), y0, (0.0, t_end), rtol=rtol, atol=atol,
                     method=method, dense_output=True)


def simulate_nonlinear(sys: SystemModel, base: BaseFlow, envelope, omega_f: float,
                       eps: float, t_end: float, rtol: float = 1e-10, atol: float = 1e-12,
                       method: str = "DOP853") -> IntegrationResult:
    """Nonlinear system driven by ``eps * Re(f(t))`` starting on the orbit at ``t = 0``."""
    forcing = BatchForcing([envelope], [omega_f], base.grid, eps)
    w0 = LinearizedDynamics(sys, base).state(0.0)

    def rhs(t, w):
        return sys.rhs(w, t) + forcing(t)[0].real

    return integrate(rhs, w0, (0.0, t_end), rtol=rtol, atol=atol, method=method,
                     dense_output=True)


def _pair_interpolants(pair: FloquetPair):
    n_ts = pair.grid.n_ts
    return (Interpolant(pair.p0.reshape(n_ts, -1)), Interpolant(pair.q0.reshape(n_ts, -1)))


def transverse_component(eta_t, pair: FloquetPair, t: float, tol: float = 1e-14):
    """Split a perturbation into phase drift and shape deformation.

    ``c = <q0(t), eta> / <q0(t), p0(t)>`` and ``v = eta - c p0(t)``, with the
    modes interpolated in phase.

    Returns
    -------
    c : complex
    v : ndarray
    """
    P, Q = _pair_interpolants(pair)
    theta = np.mod(pair.grid.omega0 * t, 2 * np.pi)
    p, q = P(theta), Q(theta)
    den = np.vdot(q, p)
    if abs(den) <= tol:
        raise ZeroGainError("neutral and adjoint modes are orthogonal at this phase")
    eta_t = np.asarray(eta_t)
    c = np.vdot(q, eta_t) / den
    return c, eta_t - c * p


@dataclass(frozen=True)
class StroboscopicSeries:
    """Phase coordinate and deformation sampled once per base period."""

    k: np.ndarray
    c: np.ndarray
    v_norm: np.ndarray

    def slope(self, start: int = 0) -> complex:
        """Least-squares slope of ``c_k`` against ``k`` (complex)."""
        return fit_slope(self.k[start:], self.c[start:])

    def rows(self):
        return list(zip(self.k.tolist(), self.c.tolist(), self.v_norm.tolist()))


def fit_slope(k, c) -> complex:
    k = np.asarray(k, dtype=float)
    c = np.asarray(c, dtype=complex)
    A = np.column_stack([np.ones_like(k), k])
    coef, *_ = np.linalg.lstsq(A, c, rcond=None)
    return complex(coef[1])


def stroboscopic_series(result: IntegrationResult, pair: FloquetPair,
                        min_periods: int = 10) -> StroboscopicSeries:
    """Sample ``c(t_k)`` and ``||v(t_k)||`` at ``t_k = k T0``.

    Raises
    ------
    InsufficientSpanError
        If the integration covers fewer than ``min_periods`` base periods.
    """
    T0 = pair.grid.period
    span = result.times[-1] - result.times[0]
    K = int(np.floor(span / T0 + 1e-9))
    if K < min_periods:
        raise InsufficientSpanError(
            f"integration spans {span / T0:.2f} base periods, need {min_periods}")
    if result.dense is None:
        raise InsufficientSpanError("integration result has no dense output")
    ks = np.arange(K + 1)
    cs, vs = [], []
    n = pair.state_dim
    p, q = pair.p0[:n], pair.q0[:n]
    den = np.vdot(q, p)
    for k in ks:
        eta = np.asarray(result.dense(result.times[0] + k * T0)).reshape(-1)[:n]
        c = np.vdot(q, eta) / den
        cs.append(c)
        vs.append(np.linalg.norm(eta - c * p))
    return StroboscopicSeries(ks, np.array(cs), np.array(vs))


def export_time_series(path, times, states, names: Optional[Sequence[str]] = None,
                       part: str = "real") -> None:
    """Write ``t`` and state components (real or complex parts) to CSV."""
    states = np.asarray(states).reshape(len(times), -1)
    n = states.shape[1]
    names = list(names) if names is not None else [f"x{i}" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if part == "complex" and np.iscomplexobj(states):
            w.writerow(["t"] + [f"{s}_re" for s in names] + [f"{s}_im" for s in names])
            for t, row in zip(times, states):
                w.writerow([repr(float(t))] + [repr(float(x)) for x in row.real]
                           + [repr(float(x)) for x in row.imag])
        else:
            w.writerow(["t"] + names)
            for t, row in zip(times, states):
                w.writerow([repr(float(t))] + [repr(float(x)) for x in np.real(row)])


def export_stroboscopic(path, series: StroboscopicSeries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "c_re", "c_im", "v_norm"])
        for k, c, v in series.rows():
            w.writerow([k, repr(c.real), repr(c.imag), repr(v)])
