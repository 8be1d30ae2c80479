"""Time-spectral resolvent operator, full SVD path and mode handling.

With stacked point-major vectors the operator is

    L_TS = j omega_f I - blkdiag(J(theta_j)) + omega0 kron(D, I_n),

and the time-spectral Jacobian is ``J_TS = blkdiag(J) - omega0 kron(D, I_n)``
so that ``L_TS = j omega_f I - J_TS``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .baseflow import BaseFlow
from .errors import (ConfigurationError, DimensionError, ResonanceError,
                     SingularShiftError, ZeroGainError)
from .grid import Interpolant, SpectralGrid
from .systems import SystemModel

INPUT_MODES = ("harmonic", "quasi_periodic")
VARIANTS = ("full", "transverse", "reconstructed")

#: sigma_min / sigma_max below which the full operator is treated as singular
RESONANCE_RTOL = 1e-8
#: largest stacked size for which dense SVD is used by default
DENSE_LIMIT = 5000


def stacked_jacobians(base: BaseFlow, sys: SystemModel) -> list:
    """Jacobians at the collocation states, ``J(w_j, t_j)``."""
    if base.state_dim != sys.state_dim:
        raise DimensionError(
            f"base flow has {base.state_dim} states, system {sys.name} has {sys.state_dim}")
    blocks = base.blocks
    times = base.grid.times
    return [sys.jacobian(blocks[j], times[j]) for j in range(base.grid.n_ts)]


@dataclass(frozen=True, eq=False)
class TsrOperator:
    """Assembled time-spectral resolvent operator at one forcing frequency.

    Attributes
    ----------
    grid : SpectralGrid
    block_jacobians : list
        ``n_ts`` Jacobians, dense arrays or sparse matrices.
    omega_f : float
        Forcing (carrier) angular frequency.
    input_mode : {"harmonic", "quasi_periodic"}
    B : ndarray, shape (n, m)
    """

    grid: SpectralGrid
    block_jacobians: list
    omega_f: float
    input_mode: str
    B: np.ndarray

    def __post_init__(self):
        if self.input_mode not in INPUT_MODES:
            raise ConfigurationError(
                f"input_mode must be one of {INPUT_MODES}, got {self.input_mode!r}")
        if len(self.block_jacobians) != self.grid.n_ts:
            raise DimensionError("need one Jacobian per collocation point")
        B = np.asarray(self.B, dtype=float)
        if B.ndim != 2 or B.shape[0] != self.block_jacobians[0].shape[0]:
            raise DimensionError("input matrix rows must match the state dimension")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "omega_f", float(self.omega_f))

    @property
    def state_dim(self) -> int:
        return self.B.shape[0]

    @property
    def forcing_dim(self) -> int:
        return self.B.shape[1]

    @property
    def size(self) -> int:
        return self.state_dim * self.grid.n_ts

    @cached_property
    def jacobian_block(self) -> sp.csr_matrix:
        return sp.block_diag([sp.csr_matrix(J) for J in self.block_jacobians],
                             format="csr")

    @cached_property
    def derivative_op(self) -> sp.csr_matrix:
        """``omega0 kron(D, I_n)`` in CSR form."""
        return sp.kron(sp.csr_matrix(self.grid.omega0 * self.grid.diff),
                       sp.identity(self.state_dim), format="csr")

    @cached_property
    def J_ts(self) -> sp.csr_matrix:
        return (self.jacobian_block - self.derivative_op).tocsr()

    @cached_property
    def L(self) -> sp.csc_matrix:
        eye = sp.identity(self.size, dtype=complex, format="csc")
        return (1j * self.omega_f * eye - self.J_ts).tocsc()

    @cached_property
    def input_map(self) -> sp.csr_matrix:
        """``B_TS``: stacked forcing from the forcing coordinates."""
        B = sp.csr_matrix(self.B)
        n_ts = self.grid.n_ts
        if self.input_mode == "harmonic":
            ones = sp.csr_matrix(np.ones((n_ts, 1)) / np.sqrt(n_ts))
            return sp.kron(ones, B, format="csr")
        return sp.kron(sp.identity(n_ts), B, format="csr")

    @property
    def input_size(self) -> int:
        return self.input_map.shape[1]

    def dense_L(self) -> np.ndarray:
        return self.L.toarray()

    def with_frequency(self, omega_f: float) -> "TsrOperator":
        """Same Jacobians at another forcing frequency (cached parts reused)."""
        new = TsrOperator(self.grid, self.block_jacobians, omega_f, self.input_mode, self.B)
        for name in ("jacobian_block", "derivative_op", "J_ts", "input_map"):
            if name in self.__dict__:
                new.__dict__[name] = self.__dict__[name]
        return new

    @cached_property
    def _lu(self):
        return spla.splu(self.L)

    def solve(self, rhs, adjoint: bool = False) -> np.ndarray:
        """Direct sparse solve with ``L_TS`` (or its conjugate transpose)."""
        rhs = np.asarray(rhs, dtype=complex)
        return self._lu.solve(rhs, trans="H" if adjoint else "N")


def assemble_tsr(base: BaseFlow, sys: SystemModel, omega_f: float,
                 input_mode: str = "quasi_periodic") -> TsrOperator:
    """Assemble the time-spectral resolvent operator around a base flow.

    Parameters
    ----------
    base : BaseFlow
    sys : SystemModel
    omega_f : float
        Carrier frequency of the forcing.
    input_mode : {"harmonic", "quasi_periodic"}
        ``"harmonic"`` forces with a constant envelope, ``B_TS = kron(1, B)/sqrt(n_ts)``.
        ``"quasi_periodic"`` lets the envelope vary, ``B_TS = blkdiag(B, ..., B)``.
    """
    jacs = stacked_jacobians(base, sys)
    return TsrOperator(base.grid, jacs, omega_f, input_mode, sys.input_matrix)


@dataclass(frozen=True, eq=False)
class ResolventSolution:
    """Leading singular triplet of a resolvent-type operator.

    Attributes
    ----------
    gain : float
    forcing_mode : ndarray
        Unit vector in forcing coordinates (length ``m`` for harmonic input,
        ``m * n_ts`` for quasi-periodic input).
    response_mode : ndarray
        Unit stacked response envelope of length ``n * n_ts``.
    variant : {"full", "transverse", "reconstructed"}
    omega_f : float
    info : dict
        Extra diagnostics (solver iterations, residuals, drift coefficient...).
    """

    gain: float
    forcing_mode: np.ndarray
    response_mode: np.ndarray
    variant: str
    omega_f: float
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ConfigurationError(f"unknown variant {self.variant!r}")

    def to_dict(self) -> dict:
        from .io import complex_to_json
        return {
            "gain": float(self.gain),
            "omega_f": float(self.omega_f),
            "variant": self.variant,
            "forcing_mode": complex_to_json(self.forcing_mode),
            "response_mode": complex_to_json(self.response_mode),
            "info": {k: v for k, v in self.info.items() if _jsonable(v)},
        }


def _jsonable(v) -> bool:
    return isinstance(v, (int, float, str, bool, type(None), list))


def _check_resonance(op: TsrOperator, rtol: float) -> tuple[float, float]:
    if op.size <= DENSE_LIMIT:
        s = sla.svdvals(op.dense_L())
        smax, smin = float(s[0]), float(s[-1])
    else:
        smax = float(spla.svds(op.L, k=1, return_singular_vectors=False)[0])
        smin = float(1.0 / spla.svds(spla.LinearOperator(
            op.L.shape, matvec=op.solve, rmatvec=lambda x: op.solve(x, adjoint=True),
            dtype=complex), k=1, return_singular_vectors=False)[0])
    if smin < rtol * smax:
        raise ResonanceError(
            f"L_TS is numerically singular at omega_f={op.omega_f:.6g} "
            f"(sigma_min/sigma_max = {smin / smax:.2e}); use the transverse resolvent")
    return smin, smax


def sigma_min_L(op: TsrOperator, dense_limit: int = 1000) -> float:
    """Smallest singular value of ``L_TS``.

    Dense SVD up to ``dense_limit`` unknowns; beyond that the largest singular
    value of ``L^{-1}`` is found with ARPACK on top of the sparse LU.  An
    exactly singular factorization returns 0.
    """
    if op.size <= dense_limit:
        return float(sla.svdvals(op.dense_L())[-1])
    try:
        inv = spla.LinearOperator(op.L.shape, matvec=op.solve,
                                  rmatvec=lambda x: op.solve(x, adjoint=True), dtype=complex)
        s = spla.svds(inv, k=1, return_singular_vectors=False, random_state=0)[0]
    except RuntimeError:
        return 0.0
    return float(1.0 / s) if np.isfinite(s) and s > 0 else 0.0


def solve_full_resolvent(op: TsrOperator, check_resonance: bool = True,
                         resonance_rtol: float = RESONANCE_RTOL) -> ResolventSolution:
    """Leading singular triplet of ``R_TS = L_TS^{-1} B_TS`` by dense SVD.

    Raises
    ------
    ResonanceError
        If ``sigma_min(L_TS) < resonance_rtol * sigma_max(L_TS)``.
    """
    info = {}
    if check_resonance:
        smin, smax = _check_resonance(op, resonance_rtol)
        info.update(sigma_min_L=smin, sigma_max_L=smax)
    Bts = op.input_map.toarray().astype(complex)
    if not np.any(Bts):
        v = np.zeros(op.input_size, complex)
        v[0] = 1.0
        u = np.zeros(op.size, complex)
        u[0] = 1.0
        return ResolventSolution(0.0, v, u, "full", op.omega_f, info)
    R = op.solve(Bts)
    U, s, Vh = np.linalg.svd(R, full_matrices=False)
    return ResolventSolution(float(s[0]), Vh[0].conj(), U[:, 0], "full", op.omega_f, info)


def classical_resolvent_gain(J, B, omega: float, rtol: float = 1e-13) -> float:
    """``sigma_max((j omega I - J)^{-1} B)`` for a time-invariant system."""
    J = np.atleast_2d(np.asarray(J, dtype=complex))
    B = np.asarray(B, dtype=complex).reshape(J.shape[0], -1)
    A = 1j * omega * np.eye(J.shape[0]) - J
    s = sla.svdvals(A)
    if s[-1] <= rtol * s[0]:
        raise SingularShiftError(f"j*{omega}*I - J is singular")
    return float(sla.svdvals(np.linalg.solve(A, B))[0])


def full_forward(op: TsrOperator) -> Callable:
    return lambda f: op.solve(op.input_map @ f)


def full_adjoint(op: TsrOperator) -> Callable:
    return lambda u: op.input_map.T @ op.solve(u, adjoint=True)


def align_phase(u: np.ndarray, reference: Optional[np.ndarray] = None,
                tol: float = 1e-12) -> complex:
    """Unit phase factor that makes ``<reference, u>`` real and non-negative.

    Falls back to making the largest-modulus entry of ``u`` real positive
    when the pairing is negligible (for example a zero base flow).
    """
    u = np.asarray(u)
    if reference is not None:
        ref = np.asarray(reference)
        ip = np.vdot(ref, u)
        if abs(ip) > tol * max(np.linalg.norm(ref), 1e-300) * np.linalg.norm(u):
            return np.conj(ip) / abs(ip)
    i = int(np.argmax(np.round(np.abs(u), 12)))
    if u[i] == 0:
        return 1.0 + 0j
    return np.conj(u[i]) / abs(u[i])


def normalize_modes(sol: ResolventSolution, op: TsrOperator, base: BaseFlow,
                    adjoint_action: Optional[Callable] = None) -> ResolventSolution:
    """Fix the phase of the response and recompute the matching forcing.

    The response is rotated so its inner product with the base flow is real
    and non-negative.  The forcing is then ``R^H u / sigma``; ``adjoint_action``
    supplies ``R^H`` (defaults to the full operator).
    """
    if not sol.gain > 0:
        raise ZeroGainError("cannot normalize modes of a zero-gain solution")
    u = np.asarray(sol.response_mode, dtype=complex)
    u = u / np.linalg.norm(u)
    u = u * align_phase(u, base.states)
    if adjoint_action is None:
        adjoint_action = full_adjoint(op)
    v = adjoint_action(u) / sol.gain
    return replace(sol, forcing_mode=np.asarray(v), response_mode=u)


@dataclass(frozen=True, eq=False)
class QuasiPeriodicSignal:
    """``x(t) = envelope(omega0 t) exp(j omega_f t)`` from grid samples.

    Attributes
    ----------
    envelope_samples : ndarray
        Stacked envelope of length ``n * n_ts``.
    omega_f : float
        Carrier frequency.
    omega0 : float
        Base frequency; the envelope is ``2 pi / omega0`` periodic.
    n_ts : int
    """

    envelope_samples: np.ndarray
    omega_f: float
    omega0: float
    n_ts: int

    @cached_property
    def _signal(self) -> "EnvelopeSignal":
        blocks = np.asarray(self.envelope_samples).reshape(self.n_ts, -1)
        return EnvelopeSignal(blocks, self.omega0, self.omega_f)

    def envelope(self, t):
        return self._signal.envelope(t)

    def __call__(self, t):
        return self._signal(t)


def reconstruct_time_signal(mode, grid: SpectralGrid, omega_f: float, t):
    """Evaluate ``eta(t) = eta_hat(omega0 t) exp(j omega_f t)``.

    Parameters
    ----------
    mode : array_like
        Stacked envelope of length ``n * n_ts``.
    grid : SpectralGrid
    omega_f : float
    t : float or array_like

    Returns
    -------
    ndarray
        Complex state of shape ``(n,)`` for scalar ``t`` or ``(len(t), n)``.
        The physical signal is the real part.
    """
    mode = np.asarray(mode)
    if mode.size % grid.n_ts:
        raise DimensionError("envelope length must be a multiple of n_ts")
    sig = signal_from_envelope(mode, grid, omega_f)
    return sig(t)


def signal_from_envelope(mode, grid: SpectralGrid, omega_f: float) -> "EnvelopeSignal":
    return EnvelopeSignal(np.asarray(mode).reshape(grid.n_ts, -1), grid.omega0, omega_f)


class EnvelopeSignal:
    """Callable quasi-periodic signal built from a stacked envelope."""

    def __init__(self, blocks, omega0: float, omega_f: float):
        self.interp = Interpolant(np.asarray(blocks, dtype=complex))
        self.omega0 = float(omega0)
        self.omega_f = float(omega_f)

    def envelope(self, t):
        theta = np.mod(self.omega0 * np.asarray(t, dtype=float), 2 * np.pi)
        return self.interp(theta)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return self.envelope(t) * np.asarray(np.exp(1j * self.omega_f * t))[..., None]
