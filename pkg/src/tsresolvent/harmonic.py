"""Harmonic resolvent reference implementation.

The harmonic resolvent works on Fourier coefficients of the response,
ordered ``k = -n_har, ..., n_har``.  It is dense and meant for desk-scale
cross-checks of the time-spectral operator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg as sla

from .baseflow import BaseFlow, resample_base_flow
from .errors import AliasingError, ConfigurationError, InvalidGridError, SingularShiftError
from .grid import dft_matrix, fourier_coefficients
from .resolvent import assemble_tsr, solve_full_resolvent
from .systems import SystemModel

log = logging.getLogger(__name__)


def jacobian_fourier_coeffs(base: BaseFlow, sys: SystemModel, max_ell: int,
                            n_samples: int | None = None, alias: bool = False) -> np.ndarray:
    """Fourier coefficients of the periodic Jacobian, ``J(t) = sum_l J_l e^{j l omega0 t}``.

    Parameters
    ----------
    base : BaseFlow
    sys : SystemModel
    max_ell : int
        Largest harmonic returned.
    n_samples : int, optional
        Sample the Jacobian on a finer odd grid (base states resampled by
        trigonometric interpolation) to resolve more harmonics.
    alias : bool
        Return the periodic (aliased) extension ``J_{l mod n}`` for harmonics
        beyond the grid resolution instead of raising.  This reproduces the
        block-circulant coupling of the time-spectral operator exactly.

    Returns
    -------
    ndarray, shape (2 * max_ell + 1, n, n)
        Entry ``i`` holds ``J_l`` with ``l = i - max_ell``.

    Raises
    ------
    AliasingError
        If ``max_ell`` exceeds ``(n_ts - 1) / 2`` and ``alias`` is False.
    """
    if n_samples is not None and n_samples != base.grid.n_ts:
        base = resample_base_flow(sys, base, n_samples)
    grid = base.grid
    K = grid.n_har
    if max_ell < 0:
        raise ConfigurationError("max_ell must be non-negative")
    if max_ell > K and not alias:
        raise AliasingError(
            f"harmonic {max_ell} is not resolved by {grid.n_ts} samples (max {K}); "
            "sample on a finer grid or request aliased coefficients")
    blocks, times = base.blocks, grid.times
    samples = np.stack([sys.dense_jacobian(blocks[j], times[j]) for j in range(grid.n_ts)])
    coeffs = fourier_coefficients(samples, axis=0)  # centered, -K..K
    ells = np.arange(-max_ell, max_ell + 1)
    # identity map for |l| <= K, periodic alias beyond
    return coeffs[(ells + K) % grid.n_ts]


@dataclass(frozen=True, eq=False)
class HrOperator:
    """Truncated harmonic resolvent operator.

    Attributes
    ----------
    n_har : int
    jac_coeffs : ndarray, shape (2 * max_ell + 1, n, n)
    omega_f, omega0 : float
    B : ndarray
    L : ndarray
        Dense block-Toeplitz matrix of size ``n (2 n_har + 1)``.
    B_hr : ndarray
        ``blkdiag(B, ..., B)``.
    """

    n_har: int
    jac_coeffs: np.ndarray
    omega_f: float
    omega0: float
    B: np.ndarray
    L: np.ndarray
    B_hr: np.ndarray

    def block(self, i: int, j: int) -> np.ndarray:
        n = self.B.shape[0]
        return self.L[i * n:(i + 1) * n, j * n:(j + 1) * n]


def assemble_hr(coeffs, omega_f: float, omega0: float, n_har: int, B) -> HrOperator:
    """Block-Toeplitz ``L_HR`` with diagonal blocks ``j(omega_f + k omega0) I - J_0``.

    Off-diagonal block ``(k, l)`` is ``-J_{k-l}``.  ``coeffs`` must cover
    ``|l| <= 2 n_har``.
    """
    coeffs = np.asarray(coeffs)
    max_ell = (coeffs.shape[0] - 1) // 2
    if n_har < 0:
        raise ConfigurationError("n_har must be non-negative")
    if max_ell < 2 * n_har:
        raise ConfigurationError(
            f"need Jacobian coefficients up to |l| = {2 * n_har}, have {max_ell}")
    B = np.atleast_2d(np.asarray(B, dtype=float))
    n = coeffs.shape[1]
    N = 2 * n_har + 1
    L = np.zeros((n * N, n * N), dtype=complex)
    ks = np.arange(-n_har, n_har + 1)
    eye = np.eye(n)
    for i, k in enumerate(ks):
        for j, l in enumerate(ks):
            blk = -coeffs[max_ell + (k - l)]
            if i == j:
                blk = blk + 1j * (omega_f + k * omega0) * eye
            L[i * n:(i + 1) * n, j * n:(j + 1) * n] = blk
    B_hr = np.kron(np.eye(N), B)
    return HrOperator(n_har, coeffs, float(omega_f), float(omega0), B, L, B_hr)


def hr_gain(hr: HrOperator, rtol: float = 1e-8, return_modes: bool = False):
    """``sigma_max(L_HR^{-1} B_HR)``.

    Raises
    ------
    SingularShiftError
        If ``L_HR`` is numerically singular (resonance of an autonomous
        system); use the transverse time-spectral path instead.
    """
    if not np.any(hr.B_hr):
        return (0.0, None, None) if return_modes else 0.0
    s = sla.svdvals(hr.L)
    if s[-1] < rtol * s[0]:
        raise SingularShiftError(
            f"L_HR is singular at omega_f={hr.omega_f:.6g}; use the transverse resolvent")
    R = np.linalg.solve(hr.L, hr.B_hr.astype(complex))
    if return_modes:
        U, sv, Vh = np.linalg.svd(R, full_matrices=False)
        return float(sv[0]), U[:, 0], Vh[0].conj()
    return float(sla.svdvals(R)[0])


@dataclass(frozen=True)
class EquivalenceReport:
    """TSR and HR comparison at matched truncation."""

    gain_ts: float
    gain_hr: float
    rel_deviation: float
    alignment: float


def time_to_harmonics(u, n_ts: int) -> np.ndarray:
    """Unitary map of a stacked time-domain vector to centered harmonic blocks."""
    u = np.asarray(u)
    F = dft_matrix(n_ts, centered=True)
    return (F @ u.reshape(n_ts, -1)).ravel()


def equivalence_check(base: BaseFlow, sys: SystemModel, omega_f: float,
                      n_ts: int | None = None) -> EquivalenceReport:
    """Compare TSR (quasi-periodic input) with HR at ``n_ts = 2 n_har + 1``.

    The HR operator uses the aliased Jacobian coefficients of the same grid,
    which makes the two operators unitarily similar.
    """
    if n_ts is not None and n_ts != base.grid.n_ts:
        base = resample_base_flow(sys, base, n_ts)
    n_ts = base.grid.n_ts
    n_har = (n_ts - 1) // 2
    op = assemble_tsr(base, sys, omega_f, "quasi_periodic")
    ts = solve_full_resolvent(op, check_resonance=False)
    coeffs = jacobian_fourier_coeffs(base, sys, 2 * n_har, alias=True)
    hr = assemble_hr(coeffs, omega_f, base.omega0, n_har, sys.input_matrix)
    g_hr, u_hr, _ = hr_gain(hr, return_modes=True)
    u_map = time_to_harmonics(ts.response_mode, n_ts)
    align = float(abs(np.vdot(u_map, u_hr)) / (np.linalg.norm(u_map) * np.linalg.norm(u_hr)))
    return EquivalenceReport(ts.gain, g_hr, abs(ts.gain - g_hr) / g_hr, align)


@dataclass(frozen=True)
class ConvergenceTable:
    """Gain error against a fine-grid reference.

    Attributes
    ----------
    rows : list of (n_ts, gain, rel_error)
    slope : float
        Least-squares slope of ``log(rel_error)`` against ``n_ts``, with zero
        errors floored at machine epsilon.
    ground_truth : float
    """

    rows: list
    slope: float
    ground_truth: float

    def to_csv_rows(self):
        return [(n, g, e) for n, g, e in self.rows]


def _check_odd(values):
    for v in values:
        if int(v) != v or v < 3 or v % 2 == 0:
            raise InvalidGridError(f"n_ts values must be odd integers >= 3, got {v}")


def convergence_study(base_builder: Callable[[int], BaseFlow], sys: SystemModel,
                      omega_f: float, nts_list: Sequence[int], ground_truth_nts: int,
                      input_mode: str = "harmonic") -> ConvergenceTable:
    """Relative gain error versus ``n_ts`` and its log-linear slope.

    Parameters
    ----------
    base_builder : callable
        ``n_ts -> BaseFlow``.
    nts_list : sequence of odd int
    ground_truth_nts : odd int
        Reference resolution, normally much larger than ``max(nts_list)``.
    """
    _check_odd(list(nts_list) + [ground_truth_nts])

    def gain(n):
        base = base_builder(int(n))
        op = assemble_tsr(base, sys, omega_f, input_mode)
        return solve_full_resolvent(op, check_resonance=False).gain

    truth = gain(ground_truth_nts)
    rows = []
    for n in nts_list:
        g = truth if n == ground_truth_nts else gain(n)
        rows.append((int(n), g, abs(g - truth) / truth))
    errs = np.maximum(np.array([r[2] for r in rows]), np.finfo(float).eps)
    ns = np.array([r[0] for r in rows], dtype=float)
    slope = float(np.polyfit(ns, np.log(errs), 1)[0]) if len(rows) > 1 else float("nan")
    return ConvergenceTable(rows, slope, truth)


def hr_monotonicity(base: BaseFlow, sys: SystemModel, omega_f: float,
                    n_har_list: Sequence[int], tol: float = 1e-10) -> tuple[list, bool]:
    """HR gains for increasing truncation and whether they are non-decreasing.

    The coefficients are sampled from the base flow's own grid, which must
    resolve ``2 * max(n_har_list)`` harmonics.  A decrease larger than ``tol``
    is logged, not raised.
    """
    max_ell = 2 * max(n_har_list)
    coeffs = jacobian_fourier_coeffs(base, sys, max_ell)
    gains = []
    for nh in n_har_list:
        c = coeffs[max_ell - 2 * nh: max_ell + 2 * nh + 1]
        gains.append(hr_gain(assemble_hr(c, omega_f, base.omega0, nh, sys.input_matrix)))
    mono = all(b >= a - tol * abs(a) for a, b in zip(gains, gains[1:]))
    if not mono:
        log.info("HR gain not monotone in n_har at omega_f=%g: %s", omega_f, gains)
    return gains, mono
