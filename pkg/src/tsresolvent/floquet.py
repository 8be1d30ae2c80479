"""Neutral and adjoint neutral Floquet modes of a time-spectral Jacobian.

For an autonomous orbit the tangent ``p0 = omega0 (D x I) w`` spans the right
null space of ``J_TS``.  The adjoint mode ``q0`` spans the left null space and
is scaled so that ``q0^H p0 = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .baseflow import BaseFlow
from .errors import AdjointSolveError, DegenerateOrbitError, DimensionError
from .grid import SpectralGrid
from .resolvent import assemble_tsr
from .systems import SystemModel


@dataclass(frozen=True, eq=False)
class FloquetPair:
    """Biorthonormal neutral pair with residual diagnostics.

    Attributes
    ----------
    p0 : ndarray
        Unit-norm orbit tangent (stacked).
    q0 : ndarray
        Adjoint neutral mode with ``vdot(q0, p0) == 1``.
    neutral_residual : float
        ``||J_TS p0|| / ||p0||``.
    adjoint_residual : float
        ``||J_TS^H q0|| / ||q0||``.
    pairing : complex
        ``vdot(q0, p0)`` after normalization.
    grid : SpectralGrid
    """

    p0: np.ndarray
    q0: np.ndarray
    neutral_residual: float
    adjoint_residual: float
    pairing: complex
    grid: SpectralGrid
    info: dict = field(default_factory=dict)

    @property
    def state_dim(self) -> int:
        return self.p0.size // self.grid.n_ts

    def block(self, which: str, j: int) -> np.ndarray:
        """State-sized slice of ``p0`` or ``q0`` at collocation point ``j``."""
        v = self.p0 if which == "p0" else self.q0
        n = self.state_dim
        return v[j * n:(j + 1) * n]

    def modulated(self, ratio: float) -> tuple[np.ndarray, np.ndarray]:
        """``(p_omega, q_omega)`` for the forcing-to-base frequency ratio."""
        return (modulated_mode(self.p0, self.grid, ratio),
                modulated_mode(self.q0, self.grid, ratio))

    def to_dict(self) -> dict:
        from .io import complex_to_json
        return {
            "n_ts": self.grid.n_ts,
            "omega0": self.grid.omega0,
            "p0": complex_to_json(self.p0),
            "q0": complex_to_json(self.q0),
            "neutral_residual": self.neutral_residual,
            "adjoint_residual": self.adjoint_residual,
            "pairing": [float(np.real(self.pairing)), float(np.imag(self.pairing))],
        }


def time_spectral_jacobian(base: BaseFlow, sys: SystemModel) -> sp.csr_matrix:
    """``J_TS = blkdiag(J(w_j)) - omega0 kron(D, I_n)``."""
    return assemble_tsr(base, sys, 0.0).J_ts


def neutral_mode(base: BaseFlow, sys: SystemModel, refine: bool = True,
                 refine_tol: float = 1e-12, tol: float = 1e-12, return_info: bool = False):
    """Unit orbit tangent and its residual ``||J_TS p0||``.

    The tangent is the spectral derivative ``omega0 (D x I) w``.  On a grid
    that does not fully resolve the orbit this is only an approximate null
    vector of ``J_TS``: the collocation equations admit a one-parameter family
    of solutions whose tangent differs from the spectral derivative by the
    aliasing error.  With ``refine=True`` the nearest exact null vector is
    found by the same bordered least-squares solve used for the adjoint mode
    (``min ||J_TS p||`` subject to ``<p_spectral, p> = 1``).

    Returns
    -------
    p0 : ndarray (complex)
    residual : float
        ``||J_TS p0||`` of the returned unit vector.
    info : dict, optional
        ``spectral_residual`` and solver details (``return_info=True``).

    Raises
    ------
    DegenerateOrbitError
        If the tangent vanishes (the base flow is an equilibrium).
    """
    grid = base.grid
    tangent = grid.omega0 * (grid.diff @ base.blocks)
    tangent = tangent.ravel().astype(complex)
    nrm = np.linalg.norm(tangent)
    if nrm <= tol * max(1.0, np.linalg.norm(base.states)):
        raise DegenerateOrbitError("orbit tangent is zero; base flow is an equilibrium")
    p0 = tangent / nrm
    J = time_spectral_jacobian(base, sys)
    spectral = float(np.linalg.norm(J @ p0))
    info = {"spectral_residual": spectral, "refined": False}
    residual = spectral
    if refine and spectral > refine_tol:
        JH = J.conj().T.tocsr()
        p, rinfo = adjoint_mode(JH, p0, method="auto")
        p = p / np.linalg.norm(p)
        p = p * (abs(np.vdot(p, p0)) / np.vdot(p, p0))
        r = float(np.linalg.norm(J @ p))
        if r < spectral:
            p0, residual = p, r
            info.update(refined=True, refine_method=rinfo["method"])
    if return_info:
        return p0, residual, info
    return p0, residual


def _bordered_gmres(J: sp.spmatrix, p0: np.ndarray, restart: int, maxiter: int,
                    rtol: float):
    N = J.shape[0]
    JH = J.conj().T.tocsr()

    def matvec(x):
        q, lam = x[:N], x[N]
        top = J @ (JH @ q) - p0 * lam
        return np.append(top, np.vdot(p0, q))

    A = spla.LinearOperator((N + 1, N + 1), matvec=matvec, dtype=complex)
    rhs = np.zeros(N + 1, complex)
    rhs[-1] = 1.0
    history = []
    x, status = spla.gmres(A, rhs, rtol=rtol, atol=0.0, restart=restart,
                           maxiter=maxiter, callback=history.append,
                           callback_type="pr_norm")
    true_res = np.linalg.norm(matvec(x) - rhs)
    if status != 0 and true_res > 10 * rtol:
        raise AdjointSolveError(
            f"bordered adjoint GMRES stagnated (status {status}, residual {true_res:.2e})",
            residuals=history)
    return x[:N], complex(x[N]), len(history), history


def _bordered_direct(J: sp.spmatrix, p0: np.ndarray):
    # [[J^H, p0], [p0^H, 0]] [q; mu] = [0; 1]; nonsingular when the left
    # null vector of J is not orthogonal to p0
    N = J.shape[0]
    col = sp.csr_matrix(p0.reshape(-1, 1))
    A = sp.bmat([[J.conj().T, col], [col.conj().T, None]], format="csc")
    rhs = np.zeros(N + 1, complex)
    rhs[-1] = 1.0
    x = spla.spsolve(A, rhs)
    return x[:N], complex(x[N])


def adjoint_mode(J_ts: sp.spmatrix, p0: np.ndarray, method: str = "gmres",
                 restart: int = 50, maxiter: int = 2000, rtol: float = 1e-10):
    """Adjoint neutral mode from a bordered least-squares system.

    Solves ``[[J J^H, -p0], [p0^H, 0]] [q; lam] = [0; 1]`` with restarted
    GMRES, applying ``J J^H`` as two sparse products.  The result is scaled so
    that ``vdot(q0, p0) == 1``.

    Parameters
    ----------
    J_ts : sparse matrix
        Time-spectral Jacobian.
    p0 : ndarray
        Neutral mode.
    method : {"gmres", "direct", "auto"}
        ``"direct"`` solves the equivalent bordered system
        ``[[J^H, p0], [p0^H, 0]]`` by sparse LU.  ``"auto"`` tries GMRES and
        falls back to the direct solve on stagnation.

    Returns
    -------
    q0 : ndarray
    info : dict
        ``lam``, ``iterations``, ``method`` and ``residuals``.
    """
    p0 = np.asarray(p0, dtype=complex)
    J = sp.csr_matrix(J_ts, dtype=complex)
    if J.shape[0] != p0.size:
        raise DimensionError("p0 length does not match J_TS")
    info = {"method": method}
    if method in ("gmres", "auto"):
        try:
            q, lam, its, hist = _bordered_gmres(J, p0, restart, maxiter, rtol)
            info.update(lam=lam, iterations=its, residuals=hist, method="gmres")
        except AdjointSolveError as exc:
            if method == "gmres":
                raise
            q, lam = _bordered_direct(J, p0)
            info.update(lam=lam, iterations=len(exc.residuals), method="direct",
                        gmres_failure=str(exc))
    elif method == "direct":
        q, lam = _bordered_direct(J, p0)
        info.update(lam=lam, iterations=0)
    else:
        raise ValueError(f"unknown method {method!r}")
    pairing = np.vdot(q, p0)
    q = q / np.conj(pairing)
    return q, info


def floquet_pair(base: BaseFlow, sys: SystemModel, method: str = "gmres",
                 refine: bool = True, **gmres_kw) -> FloquetPair:
    """Neutral mode, adjoint mode and their diagnostics in one call."""
    p0, nres, ninfo = neutral_mode(base, sys, refine=refine, return_info=True)
    J = time_spectral_jacobian(base, sys)
    q0, info = adjoint_mode(J, p0, method=method, **gmres_kw)
    info.update(ninfo)
    ares = float(np.linalg.norm(J.conj().T @ q0) / np.linalg.norm(q0))
    return FloquetPair(p0, q0, nres, ares, complex(np.vdot(q0, p0)), base.grid, info)


def modulated_mode(v, grid: SpectralGrid, ratio: float) -> np.ndarray:
    """Multiply block ``j`` of ``v`` by ``exp(-j ratio theta_j)``."""
    v = np.asarray(v, dtype=complex)
    if v.size % grid.n_ts:
        raise DimensionError("vector length is not a multiple of n_ts")
    n = v.size // grid.n_ts
    phase = np.exp(-1j * ratio * grid.thetas)
    return (v.reshape(grid.n_ts, n) * phase[:, None]).ravel()


def eigen_ladder_check(base: BaseFlow, sys: SystemModel, k_max: int,
                       p0: np.ndarray | None = None) -> list:
    """Residuals of the shifted neutral eigenpairs.

    For ``k = 0..k_max`` returns ``||J_TS p_k - j k omega0 p_k||`` with
    ``p_k = exp(-j k theta) p0``.  Beyond the grid resolution the residual
    shows wrap-around and is only reported.
    """
    if p0 is None:
        p0, _ = neutral_mode(base, sys, refine=False)
    J = time_spectral_jacobian(base, sys)
    out = []
    for k in range(0, int(k_max) + 1):
        pk = modulated_mode(p0, base.grid, k)
        out.append(float(np.linalg.norm(J @ pk - 1j * k * base.omega0 * pk)))
    return out


def floquet_exponent_ladders(base: BaseFlow, sys: SystemModel, tol: float = 0.05,
                             band: float = 0.5):
    """Group eigenvalues of ``J_TS`` by real part.

    Returns a list of ``(mean real part, count)`` sorted by decreasing real
    part, merging eigenvalues whose real parts differ by less than ``tol``.
    As in :func:`slowest_decay_rate`, only ``|Im| <= band * n_har * omega0``
    is kept; eigenvalues near the Nyquist harmonic are not Floquet exponents.
    """
    J = time_spectral_jacobian(base, sys).toarray()
    lam = np.linalg.eigvals(J)
    lam = lam[np.abs(lam.imag) <= band * base.grid.n_har * base.omega0 + 1e-12]
    re = np.sort(lam.real)[::-1]
    groups = []
    for r in re:
        if groups and abs(groups[-1][0] / groups[-1][1] - r) < tol:
            groups[-1][0] += r
            groups[-1][1] += 1
        else:
            groups.append([r, 1])
    return [(s / c, c) for s, c in groups]


def slowest_decay_rate(base: BaseFlow, sys: SystemModel, neutral_tol: float = 1e-6,
                       band: float = 0.5) -> float | None:
    """Decay rate ``-Re(lambda)`` of the least stable decaying Floquet exponent.

    Only eigenvalues of ``J_TS`` with ``|Im| <= band * n_har * omega0`` are
    used; those near the Nyquist harmonic are discretization artifacts.
    Returns None when no decaying exponent is found.
    """
    J = time_spectral_jacobian(base, sys).toarray()
    lam = np.linalg.eigvals(J)
    lam = lam[np.abs(lam.imag) <= band * base.grid.n_har * base.omega0 + 1e-12]
    decaying = -lam.real[lam.real < -neutral_tol]
    return float(decaying.min()) if decaying.size else None
