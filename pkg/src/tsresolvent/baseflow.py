"""Periodic base flows sampled on the collocation grid.

States are stacked point-major: entry ``j * n + i`` is state ``i`` at phase
``theta_j``.  This matches ``kron(D, I_n)``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.integrate import solve_ivp

from .errors import (ConfigurationError, DimensionError, InvalidBaseFlowError,
                     OrbitSolveError)
from .grid import Interpolant, SpectralGrid
from .systems import CglParams, SystemModel, cgl_modified_wavenumber_sq, cgl_system


@dataclass(frozen=True)
class BaseFlow:
    """Periodic orbit at the collocation points.

    Attributes
    ----------
    grid : SpectralGrid
    states : ndarray, shape (n * n_ts,)
        Stacked real states.
    period : float
        ``2 pi / grid.omega0``.
    collocation_residual_norm : float
        ``||omega0 (D x I) w - r(w)|| / max(1, ||w||)`` as evaluated.
    """

    grid: SpectralGrid
    states: np.ndarray
    period: float
    collocation_residual_norm: float

    def __post_init__(self):
        s = np.array(self.states, dtype=float).ravel()
        if s.size % self.grid.n_ts:
            raise DimensionError("state vector length is not a multiple of n_ts")
        s.setflags(write=False)
        object.__setattr__(self, "states", s)

    @property
    def state_dim(self) -> int:
        return self.states.size // self.grid.n_ts

    @property
    def blocks(self) -> np.ndarray:
        """States as an ``(n_ts, n)`` array."""
        return self.states.reshape(self.grid.n_ts, self.state_dim)

    @property
    def omega0(self) -> float:
        return self.grid.omega0

    def to_dict(self) -> dict:
        return {
            "n_ts": self.grid.n_ts,
            "omega0": self.grid.omega0,
            "period": self.period,
            "collocation_residual_norm": self.collocation_residual_norm,
            "state_dim": self.state_dim,
            "states": self.states.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "BaseFlow":
        grid = SpectralGrid(int(d["n_ts"]), float(d["omega0"]))
        return cls(grid, np.asarray(d["states"], dtype=float), float(d["period"]),
                   float(d["collocation_residual_norm"]))

    @classmethod
    def from_json(cls, text: str) -> "BaseFlow":
        return cls.from_dict(json.loads(text))


def _stacked_rhs(sys: SystemModel, grid: SpectralGrid, blocks: np.ndarray) -> np.ndarray:
    times = grid.times
    return np.concatenate([sys.rhs(blocks[j], times[j]) for j in range(grid.n_ts)])


def collocation_residual(sys: SystemModel, grid: SpectralGrid, states) -> np.ndarray:
    """Residual vector ``omega0 (D x I) w - r(w)`` of the time-spectral equations."""
    states = np.asarray(states, dtype=float)
    n = sys.state_dim
    if states.size != n * grid.n_ts:
        raise DimensionError(
            f"expected {n * grid.n_ts} stacked states, got {states.size}")
    blocks = states.reshape(grid.n_ts, n)
    deriv = grid.omega0 * (grid.diff @ blocks)
    return deriv.ravel() - _stacked_rhs(sys, grid, blocks)


def _relative_residual(sys, grid, states) -> float:
    res = collocation_residual(sys, grid, states)
    return float(np.linalg.norm(res) / max(1.0, np.linalg.norm(states)))


def make_base_flow(sys: SystemModel, grid: SpectralGrid, states) -> BaseFlow:
    """Wrap sampled states, recording their collocation residual."""
    states = np.asarray(states, dtype=float).ravel()
    return BaseFlow(grid, states, grid.period, _relative_residual(sys, grid, states))


def trivial_base_flow(sys: SystemModel, grid: SpectralGrid, tol: float = 1e-14) -> BaseFlow:
    """Zero base flow, valid when the origin is an equilibrium at all times.

    Raises
    ------
    InvalidBaseFlowError
        If ``rhs(0, t) != 0`` at some collocation time.
    """
    zero = np.zeros(sys.state_dim)
    for t in grid.times:
        if np.linalg.norm(sys.rhs(zero, t)) > tol:
            raise InvalidBaseFlowError(
                f"the origin is not an equilibrium of {sys.name} (rhs(0, {t:.3g}) != 0)")
    return BaseFlow(grid, np.zeros(sys.state_dim * grid.n_ts), grid.period, 0.0)


def cgl_plane_wave(p: CglParams, grid: SpectralGrid, wavenumber_model: str = "discrete",
                   rtol: float = 1e-9) -> BaseFlow:
    """Sampled plane wave ``a exp(j(k x - omega0 t))`` of the CGL equation.

    Parameters
    ----------
    p : CglParams
    grid : SpectralGrid
        Its ``omega0`` must equal the plane-wave frequency.
    wavenumber_model : {"discrete", "continuous"}
        ``"continuous"`` uses ``k**2`` in the amplitude and frequency relations,
        which leaves an O(dx**2) collocation residual.  ``"discrete"`` uses the
        eigenvalue of the finite-difference Laplacian on ``exp(j k x)`` so the
        sampled wave is an exact orbit of the discretized equations.
    """
    if wavenumber_model == "continuous":
        k2 = p.wavenumber ** 2
    elif wavenumber_model == "discrete":
        k2 = cgl_modified_wavenumber_sq(p)
    else:
        raise ConfigurationError(f"unknown wavenumber model {wavenumber_model!r}")
    if k2 >= 1:
        raise ConfigurationError("plane wave requires k^2 < 1")
    omega0 = p.beta * (1 - k2) + p.alpha * k2
    if abs(grid.omega0 - omega0) > rtol * omega0:
        raise ConfigurationError(
            f"grid omega0={grid.omega0:.12g} differs from plane-wave frequency {omega0:.12g}")
    amp = np.sqrt(1 - k2)
    x = p.nodes
    phase = p.wavenumber * x[None, :] - grid.thetas[:, None]
    A = amp * np.exp(1j * phase)
    states = np.concatenate([A.real, A.imag], axis=1).ravel()
    return make_base_flow(cgl_system(p), grid, states)


def cgl_plane_wave_frequency(p: CglParams, wavenumber_model: str = "discrete") -> float:
    """Temporal frequency of the CGL plane wave."""
    k2 = cgl_modified_wavenumber_sq(p) if wavenumber_model == "discrete" else p.wavenumber ** 2
    return p.beta * (1 - k2) + p.alpha * k2


def march_to_orbit(sys: SystemModel, y0, n_ts: int, t_settle: float = 100.0,
                   rtol: float = 1e-10, atol: float = 1e-12):
    """Initial guess for an orbit solve from an unforced time march.

    Integrates past ``t_settle``, locates successive maxima of the first
    state component and samples the last full cycle on ``n_ts`` points,
    starting at a maximum.

    Returns
    -------
    states : ndarray
        Stacked guess of length ``n * n_ts``.
    period : float
    """
    n = sys.state_dim

    def f(t, y):
        return sys.rhs(y, t)

    def at_max(t, y):
        return f(t, y)[0]
    at_max.direction = -1

    sol = solve_ivp(f, (0.0, t_settle), np.asarray(y0, float), method="DOP853",
                    rtol=rtol, atol=atol, events=at_max, dense_output=True)
    if sol.status < 0:
        raise OrbitSolveError(f"time march failed: {sol.message}")
    tev = sol.t_events[0]
    if tev.size < 3:
        raise OrbitSolveError("time march found fewer than three maxima; "
                              "the trajectory is not oscillating")
    period = float(tev[-1] - tev[-2])
    ts = tev[-2] + period * np.arange(n_ts) / n_ts
    states = sol.sol(ts).T.reshape(-1)
    assert states.size == n * n_ts
    return states, period


def solve_orbit_newton(sys: SystemModel, grid0: SpectralGrid, initial_guess,
                       period_guess: float | None = None, tol: float = 1e-10,
                       max_iter: int = 50, return_info: bool = False):
    """Time-spectral Newton solve for a periodic orbit of an autonomous system.

    The unknowns are the stacked states and ``omega0``.  One extra equation
    fixes the phase: the spectral time derivative of the first state
    component vanishes at ``theta_0``.

    Parameters
    ----------
    sys : SystemModel
        Must be autonomous.
    grid0 : SpectralGrid
        Grid size; its ``omega0`` is the frequency guess unless
        ``period_guess`` is given.
    initial_guess : array_like
        Stacked states of length ``n * n_ts``.
    tol : float
        Convergence threshold on the relative collocation residual.
    return_info : bool
        Also return ``{"iterations": ..., "residual": ...}``.

    Raises
    ------
    OrbitSolveError
        When ``max_iter`` is reached.  ``exc.residual`` holds the last value.
    """
    if not sys.autonomous:
        raise ConfigurationError("orbit solve with unknown period needs an autonomous system")
    n, nts = sys.state_dim, grid0.n_ts
    w = np.asarray(initial_guess, dtype=float).ravel().copy()
    if w.size != n * nts:
        raise DimensionError(f"initial guess has length {w.size}, expected {n * nts}")
    omega = 2 * np.pi / period_guess if period_guess else grid0.omega0
    D = grid0.diff
    Dk = np.kron(D, np.eye(n))
    phase_row = Dk[0]

    def residual(w, omega):
        blocks = w.reshape(nts, n)
        r = omega * (Dk @ w) - np.concatenate([sys.rhs(b, 0.0) for b in blocks])
        return np.append(r, phase_row @ w)

    def scaled(res, w):
        return np.linalg.norm(res[:-1]) / max(1.0, np.linalg.norm(w)) + abs(res[-1])

    res = residual(w, omega)
    err = scaled(res, w)
    it = 0
    for it in range(max_iter + 1):
        if err <= tol:
            break
        if it == max_iter:
            raise OrbitSolveError(
                f"Newton did not converge in {max_iter} iterations (residual {err:.3e})",
                residual=err)
        blocks = w.reshape(nts, n)
        Jblk = sla.block_diag(*[sys.dense_jacobian(b, 0.0) for b in blocks])
        jac = np.zeros((n * nts + 1, n * nts + 1))
        jac[:-1, :-1] = omega * Dk - Jblk
        jac[:-1, -1] = Dk @ w
        jac[-1, :-1] = phase_row
        try:
            lu = sla.lu_factor(jac, check_finite=True)
            udiag = np.abs(np.diag(lu[0]))
            if udiag.min() <= 1e-14 * udiag.max():
                raise sla.LinAlgError("singular")
            with np.errstate(all="raise"):
                step = sla.lu_solve(lu, -res)
        except (sla.LinAlgError, FloatingPointError, ValueError):
            raise ConfigurationError(
                "singular Newton system; check the phase condition and initial guess") from None
        if not np.all(np.isfinite(step)):
            raise ConfigurationError("singular Newton system; non-finite update")
        lam = 1.0
        while True:
            w_new = w + lam * step[:-1]
            om_new = omega + lam * step[-1]
            res_new = residual(w_new, om_new)
            err_new = scaled(res_new, w_new)
            if err_new < err or lam < 1e-4:
                break
            lam *= 0.5
        w, omega, res, err = w_new, om_new, res_new, err_new
    if omega <= 0:
        raise OrbitSolveError(f"converged to non-positive frequency {omega}", residual=err)
    base = make_base_flow(sys, SpectralGrid(nts, omega), w)
    if return_info:
        return base, {"iterations": it, "residual": err}
    return base


def vdp_orbit(sys: SystemModel, n_ts: int = 31, tol: float = 1e-10) -> BaseFlow:
    """Van der Pol-type orbit from a time-march guess followed by Newton."""
    y0 = np.zeros(sys.state_dim)
    y0[0] = 2.0
    guess, period = march_to_orbit(sys, y0, n_ts)
    grid = SpectralGrid(n_ts, 2 * np.pi / period)
    return solve_orbit_newton(sys, grid, guess, period, tol=tol)


def resample_base_flow(sys: SystemModel, base: BaseFlow, n_ts: int) -> BaseFlow:
    """Trigonometric resampling of a base flow onto another odd grid."""
    grid = SpectralGrid(n_ts, base.omega0)
    interp = Interpolant(base.blocks)
    states = interp(grid.thetas).real
    return make_base_flow(sys, grid, states)


def default_base_flow(sys: SystemModel, n_ts: int) -> BaseFlow:
    """Base flow of a built-in system on an ``n_ts`` grid.

    Zero state for the Mathieu oscillator, Newton-converged orbit for van der
    Pol and the analytic plane wave for CGL.
    """
    if sys.name == "mathieu":
        return trivial_base_flow(sys, SpectralGrid(n_ts, sys.params.omega0))
    if sys.name == "vdp":
        return vdp_orbit(sys, n_ts)
    if sys.name == "cgl":
        return cgl_plane_wave(sys.params, SpectralGrid(n_ts, sys.base_frequency_hint))
    raise ConfigurationError(f"no default base flow for system {sys.name!r}")
