"""Collocation grids, Fourier spectral differentiation and interpolation.

Harmonics are always stored in centered order, k = -K, ..., K with
K = (n_ts - 1) / 2.  The natural FFT order is only used internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .errors import DimensionError, InvalidGridError


def _check_nts(n_ts) -> int:
    if isinstance(n_ts, bool) or int(n_ts) != n_ts:
        raise InvalidGridError(f"n_ts must be an integer, got {n_ts!r}")
    n_ts = int(n_ts)
    if n_ts < 3 or n_ts % 2 == 0:
        raise InvalidGridError(f"n_ts must be odd and >= 3, got {n_ts}")
    return n_ts


def build_diff_matrix(n_ts: int) -> np.ndarray:
    """Fourier spectral differentiation matrix on an odd periodic grid.

    Parameters
    ----------
    n_ts : int
        Number of equispaced collocation points on [0, 2*pi).

    Returns
    -------
    ndarray, shape (n_ts, n_ts)
        ``D[j, k] = 0.5 * (-1)**(j-k) / sin(pi*(j-k)/n_ts)`` off the diagonal
        and zero on it.
    """
    n_ts = _check_nts(n_ts)
    idx = np.arange(n_ts)
    diff = idx[:, None] - idx[None, :]
    off = diff != 0
    out = np.zeros((n_ts, n_ts))
    sign = np.where(diff % 2 == 0, 1.0, -1.0)
    out[off] = 0.5 * sign[off] / np.sin(np.pi * diff[off] / n_ts)
    return out


def centered_harmonics(n_ts: int) -> np.ndarray:
    """Integer harmonics ``-K..K`` for an odd grid."""
    n_ts = _check_nts(n_ts)
    K = (n_ts - 1) // 2
    return np.arange(-K, K + 1)


def dft_matrix(n_ts: int, centered: bool = False) -> np.ndarray:
    """Unitary DFT matrix ``F[p, q] = exp(-2j*pi*p*q/n) / sqrt(n)``.

    With ``centered=True`` the rows are reordered so that row ``i`` holds
    harmonic ``k = i - K``; then ``F D F^H = diag(1j * k)``.
    """
    n_ts = _check_nts(n_ts)
    if centered:
        p = centered_harmonics(n_ts)
    else:
        p = np.arange(n_ts)
    q = np.arange(n_ts)
    return np.exp(-2j * np.pi * np.outer(p, q) / n_ts) / np.sqrt(n_ts)


def fourier_coefficients(samples, axis: int = 0) -> np.ndarray:
    """Centered Fourier series coefficients of grid samples.

    ``samples[j] = sum_k c[k] exp(1j*k*theta_j)``, with ``c`` returned in
    centered order along ``axis``.
    """
    samples = np.asarray(samples)
    n_ts = _check_nts(samples.shape[axis])
    coeffs = np.fft.fft(samples, axis=axis) / n_ts
    return np.fft.fftshift(coeffs, axes=axis)


def synthesize(coeffs, theta, axis: int = 0) -> np.ndarray:
    """Evaluate a centered Fourier series at phases ``theta``.

    The output has the phase axis first (a scalar ``theta`` drops it).
    """
    coeffs = np.moveaxis(np.asarray(coeffs), axis, 0)
    k = centered_harmonics(coeffs.shape[0])
    theta = np.asarray(theta, dtype=float)
    basis = np.exp(1j * np.multiply.outer(theta, k))
    return np.tensordot(basis, coeffs, axes=(basis.ndim - 1, 0))


def trig_interpolate(samples, theta, axis: int = 0, n_ts: int | None = None):
    """Trigonometric interpolant of periodic grid samples.

    Parameters
    ----------
    samples : array_like
        Values on the ``n_ts`` collocation points along ``axis``.
    theta : float or array_like
        Phase(s) in radians.  Any real value is accepted.
    n_ts : int, optional
        Expected grid size; a different sample count raises DimensionError.

    Returns
    -------
    complex or ndarray
        Interpolant value(s).  Reproduces ``samples[j]`` at ``theta_j``.
    """
    samples = np.asarray(samples)
    if samples.ndim == 0:
        raise DimensionError("samples must have at least one dimension")
    if n_ts is not None and samples.shape[axis] != n_ts:
        raise DimensionError(f"expected {n_ts} samples, got {samples.shape[axis]}")
    _check_nts(samples.shape[axis])
    return synthesize(fourier_coefficients(samples, axis=axis), theta)


class Interpolant:
    """Cached trigonometric interpolant of stacked grid data.

    Parameters
    ----------
    samples : array_like, shape (n_ts, ...)
        Periodic samples, phase axis first.
    """

    def __init__(self, samples):
        samples = np.asarray(samples)
        self.n_ts = _check_nts(samples.shape[0])
        self.coeffs = fourier_coefficients(samples, axis=0)
        self._k = centered_harmonics(self.n_ts)
        self._flat = self.coeffs.reshape(self.n_ts, -1)
        self._shape = samples.shape[1:]

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        basis = np.exp(1j * np.multiply.outer(theta, self._k))
        out = basis @ self._flat
        return out.reshape(theta.shape + self._shape)


def _fd_weights(order: int) -> np.ndarray:
    # central stencil weights for offsets 1..order/2 (antisymmetric)
    if order == 2:
        return np.array([1 / 2])
    if order == 4:
        return np.array([2 / 3, -1 / 12])
    if order == 6:
        return np.array([3 / 4, -3 / 20, 1 / 60])
    raise InvalidGridError(f"finite difference order must be 2, 4 or 6, got {order}")


def fd_order_for(n_ts: int, order: int = 6) -> int:
    """Highest supported central FD order <= ``order`` whose stencil fits."""
    while order > 2 and order + 1 > n_ts:
        order -= 2
    return order


def build_fd_diff_matrix(n_ts: int, order: int = 6) -> sp.csr_matrix:
    """Periodic central finite-difference derivative in theta.

    Parameters
    ----------
    n_ts : int
        Grid size.  The stencil order is reduced when it does not fit.
    order : {2, 4, 6}
        Requested accuracy order.
    """
    n_ts = _check_nts(n_ts)
    order = fd_order_for(n_ts, order)
    h = 2 * np.pi / n_ts
    w = _fd_weights(order) / h
    rows, cols, vals = [], [], []
    idx = np.arange(n_ts)
    for s, ws in enumerate(w, start=1):
        for sign in (1, -1):
            rows.append(idx)
            cols.append((idx + sign * s) % n_ts)
            vals.append(np.full(n_ts, sign * ws))
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_ts, n_ts),
    )
    return mat.tocsr()


@dataclass(frozen=True)
class SpectralGrid:
    """Equispaced collocation grid for T0-periodic functions.

    Parameters
    ----------
    n_ts : int
        Odd number of collocation points.
    omega0 : float
        Base angular frequency.
    """

    n_ts: int
    omega0: float
    _diff: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n_ts = _check_nts(self.n_ts)
        object.__setattr__(self, "n_ts", n_ts)
        if not np.isfinite(self.omega0) or self.omega0 <= 0:
            raise InvalidGridError(f"omega0 must be positive, got {self.omega0}")
        object.__setattr__(self, "omega0", float(self.omega0))
        diff = build_diff_matrix(n_ts)
        diff.setflags(write=False)
        object.__setattr__(self, "_diff", diff)

    @property
    def diff(self) -> np.ndarray:
        return self._diff

    @cached_property
    def thetas(self) -> np.ndarray:
        th = 2 * np.pi * np.arange(self.n_ts) / self.n_ts
        th.setflags(write=False)
        return th

    @property
    def times(self) -> np.ndarray:
        """Collocation times ``theta_j / omega0`` within one period."""
        return self.thetas / self.omega0

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega0

    @property
    def n_har(self) -> int:
        return (self.n_ts - 1) // 2

    @property
    def harmonics(self) -> np.ndarray:
        return centered_harmonics(self.n_ts)

    def with_omega0(self, omega0: float) -> "SpectralGrid":
        return SpectralGrid(self.n_ts, omega0)

    def time_derivative_op(self, state_dim: int) -> sp.csr_matrix:
        """Sparse ``omega0 * kron(D, I_n)`` acting on stacked vectors."""
        return sp.csr_matrix(self.omega0 * np.kron(self.diff, np.eye(state_dim)))
