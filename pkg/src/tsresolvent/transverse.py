"""Transverse (projected) resolvent for autonomous periodic orbits.

The oblique projector ``P = I - p q^H`` built from the modulated neutral pair
removes the phase direction from forcing and response, so the projected
resolvent ``P L^{-1} P`` stays bounded at ``omega_f = k omega0``.  Everything
here is matrix free: the projector is applied through inner products and the
linear solves use GMRES preconditioned by a sparse LU of a finite-difference
version of ``L_TS``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import ConfigurationError, IterativeSolveError, PreconditionerError, ZeroGainError
from .floquet import FloquetPair
from .grid import build_fd_diff_matrix, fd_order_for
from .resolvent import ResolventSolution, TsrOperator, align_phase

log = logging.getLogger(__name__)

#: distance from an integer frequency ratio treated as exact resonance
RESONANCE_RATIO_TOL = 1e-10


@dataclass(frozen=True)
class TransverseSolveConfig:
    """Solver settings for the projected resolvent.

    Attributes
    ----------
    gmres_restart, gmres_tol, gmres_maxiter
        Restarted GMRES settings for forward and adjoint solves.
    fd_order : int
        Stencil order of the finite-difference preconditioner.
    rsvd_rank, rsvd_oversample, rsvd_power_iters
        Randomized SVD settings.
    seed : int
        Seed of the random test matrix.
    solver : {"gmres", "direct"}
        ``"direct"`` replaces GMRES by a sparse LU of ``L_TS`` (bordered with
        the neutral pair at exact resonance).
    tikhonov : bool
        Add ``1e-12 ||L||`` to the diagonal (fallback for stubborn resonant
        solves; off by default).
    restrict_forcing : bool
        Restrict forcing coordinates to ``v`` with ``q^H B_TS v = 0`` so that
        the realizable forcing ``B_TS v`` itself lies in the transverse
        subspace.  ``False`` gives the literal operator ``P L^{-1} P B_TS``.
    """

    gmres_restart: int = 100
    gmres_tol: float = 1e-10
    gmres_maxiter: int = 5000
    fd_order: int = 6
    rsvd_rank: int = 8
    rsvd_oversample: int = 8
    rsvd_power_iters: int = 2
    seed: int = 0
    solver: str = "gmres"
    tikhonov: bool = False
    restrict_forcing: bool = True

    def __post_init__(self):
        for name in ("gmres_restart", "gmres_maxiter", "rsvd_rank"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be positive")
        if self.rsvd_oversample < 0 or self.rsvd_power_iters < 0:
            raise ConfigurationError("oversampling and power iterations must be >= 0")
        if not self.gmres_tol > 0:
            raise ConfigurationError("gmres_tol must be positive")
        if self.fd_order not in (2, 4, 6):
            raise ConfigurationError("fd_order must be 2, 4 or 6")
        if self.solver not in ("gmres", "direct"):
            raise ConfigurationError("solver must be 'gmres' or 'direct'")


@dataclass(frozen=True, eq=False)
class ObliqueProjector:
    """``P x = x - p <q, x>`` with ``<q, p> = 1``.

    Attributes
    ----------
    p_mod, q_mod : ndarray
        Modulated neutral and adjoint modes.
    ratio : float
        ``omega_f / omega0`` used for the modulation.
    resonant : bool
        True when the pair was refined to the exact null vectors of ``L_TS``
        at an integer ratio.
    """

    p_mod: np.ndarray
    q_mod: np.ndarray
    ratio: float
    resonant: bool = False

    def apply(self, x, adjoint: bool = False) -> np.ndarray:
        return apply_projector(self, x, adjoint)

    def dense(self) -> np.ndarray:
        return np.eye(self.p_mod.size) - np.outer(self.p_mod, self.q_mod.conj())


def apply_projector(P: ObliqueProjector, x, adjoint: bool = False) -> np.ndarray:
    """Forward ``x - p (q^H x)`` or adjoint ``x - q (p^H x)``.

    ``x`` may be a vector or a matrix of column vectors.
    """
    x = np.asarray(x, dtype=complex)
    a, b = (P.q_mod, P.p_mod) if adjoint else (P.p_mod, P.q_mod)
    if x.ndim == 1:
        return x - a * np.vdot(b, x)
    return x - np.outer(a, b.conj() @ x)


def _refine_null_pair(L: sp.spmatrix, p: np.ndarray, q: np.ndarray):
    # exact right/left null vectors of a (numerically) singular L near the
    # guesses, via the bordered least-squares solves used for the adjoint mode
    from .floquet import adjoint_mode
    LH = L.conj().T.tocsr()
    p_new, _ = adjoint_mode(LH, p, method="auto")
    q_new, _ = adjoint_mode(L, p_new, method="auto")
    p_new = p_new / np.linalg.norm(p_new)
    p_new = p_new * (abs(np.vdot(p_new, p)) / np.vdot(p_new, p))
    q_new = q_new / np.conj(np.vdot(q_new, p_new))
    return p_new, q_new


def is_resonant(ratio: float, tol: float = RESONANCE_RATIO_TOL) -> bool:
    return abs(ratio - round(ratio)) <= tol


def build_projector(op: TsrOperator, pair: FloquetPair,
                    refine_at_resonance: bool = True) -> ObliqueProjector:
    """Projector for the operator's frequency ratio.

    At an exact integer ratio the modulated pair is refined to the exact null
    vectors of ``L_TS``; on under-resolved grids the shifted tangent is only an
    approximate null vector, and the refinement keeps the singular solve
    consistent.
    """
    ratio = op.omega_f / op.grid.omega0
    p, q = pair.modulated(ratio)
    resonant = is_resonant(ratio)
    if resonant and refine_at_resonance:
        p, q = pair.modulated(float(round(ratio)))
        if np.linalg.norm(op.L @ p) > 1e-12:
            p, q = _refine_null_pair(op.L, p, q)
    q = q / np.conj(np.vdot(q, p))
    return ObliqueProjector(p, q, ratio, resonant)


class FdPreconditioner:
    """Sparse LU of ``j omega_f I - J_block + omega0 kron(D_FD, I)``.

    Attributes
    ----------
    order : int
        Stencil order actually used (reduced on small grids).
    """

    def __init__(self, op: TsrOperator, order: int = 6):
        self.order = fd_order_for(op.grid.n_ts, order)
        dfd = build_fd_diff_matrix(op.grid.n_ts, self.order)
        deriv = sp.kron(op.grid.omega0 * dfd, sp.identity(op.state_dim))
        eye = sp.identity(op.size, dtype=complex)
        self.matrix = (1j * op.omega_f * eye - op.jacobian_block + deriv).tocsc()
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error")
                self._lu = spla.splu(self.matrix)
        except (RuntimeError, Warning) as exc:
            raise PreconditionerError(f"preconditioner factorization failed: {exc}") from None

    def solve(self, x, adjoint: bool = False) -> np.ndarray:
        return self._lu.solve(np.asarray(x, dtype=complex), trans="H" if adjoint else "N")


def build_fd_preconditioner(op: TsrOperator, cfg: TransverseSolveConfig = TransverseSolveConfig()
                            ) -> FdPreconditioner:
    """Factor the finite-difference preconditioner once per forcing frequency."""
    pre = FdPreconditioner(op, cfg.fd_order)
    if pre.order != cfg.fd_order:
        log.info("n_ts=%d too small for order-%d stencil; using order %d",
                 op.grid.n_ts, cfg.fd_order, pre.order)
    return pre


@dataclass
class SolveStats:
    """Accumulated Krylov telemetry."""

    solves: int = 0
    iterations: int = 0
    max_residual: float = 0.0
    history: list = field(default_factory=list)


def gmres_solve(A, b, precond: Optional[Callable], cfg: TransverseSolveConfig,
                stats: Optional[SolveStats] = None) -> np.ndarray:
    """Right-preconditioned restarted GMRES; the tolerance is on the true residual.

    Raises
    ------
    IterativeSolveError
        If the relative residual stays above ``cfg.gmres_tol`` (with a small
        safety factor) after ``cfg.gmres_maxiter`` iterations.
    """
    b = np.asarray(b, dtype=complex)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return np.zeros_like(b)
    N = b.size
    if precond is None:
        Aop = spla.aslinearoperator(A)
    else:
        Aop = spla.LinearOperator((N, N), matvec=lambda y: A @ precond(y), dtype=complex)
    history = []
    y, status = spla.gmres(Aop, b, rtol=cfg.gmres_tol, atol=0.0, restart=cfg.gmres_restart,
                           maxiter=cfg.gmres_maxiter, callback=history.append,
                           callback_type="pr_norm")
    x = precond(y) if precond is not None else y
    rel = float(np.linalg.norm(A @ x - b) / bnorm)
    if stats is not None:
        stats.solves += 1
        stats.iterations += len(history)
        stats.max_residual = max(stats.max_residual, rel)
    if rel > 10 * cfg.gmres_tol:
        raise IterativeSolveError(
            f"GMRES reached relative residual {rel:.2e} (status {status}, "
            f"{len(history)} iterations)", residuals=history)
    return x


class ProjectedResolvent:
    """Matrix-free ``P L^{-1} P`` with cached factorizations.

    Parameters
    ----------
    op : TsrOperator
    P : ObliqueProjector
    cfg : TransverseSolveConfig
    """

    def __init__(self, op: TsrOperator, P: ObliqueProjector,
                 cfg: TransverseSolveConfig = TransverseSolveConfig(),
                 precond: Optional[FdPreconditioner] = None):
        self.op, self.P, self.cfg = op, P, cfg
        self.stats = SolveStats()
        L = op.L
        if cfg.tikhonov:
            shift = 1e-12 * spla.norm(L, 1)
            L = (L + shift * sp.identity(op.size, format="csc")).tocsc()
        self.L = L
        self.precond = precond
        self._direct = None
        if cfg.solver == "direct":
            self._direct = self._factor_direct()
        elif precond is None:
            try:
                self.precond = build_fd_preconditioner(op, cfg)
            except PreconditionerError as exc:
                warnings.warn(f"{exc}; continuing with unpreconditioned GMRES")

    def _factor_direct(self):
        N = self.op.size
        if self.P.resonant:
            # bordered system [[L, p], [q^H, 0]] is regular when L is singular
            # with null vector p and left null vector q
            pcol = sp.csc_matrix(self.P.p_mod.reshape(-1, 1))
            qrow = sp.csc_matrix(self.P.q_mod.conj().reshape(1, -1))
            A = sp.bmat([[self.L, pcol], [qrow, None]], format="csc")
            lu = spla.splu(A)
            return lambda x, adj: lu.solve(np.append(x, 0.0), trans="H" if adj else "N")[:N]
        lu = spla.splu(self.L.tocsc())
        return lambda x, adj: lu.solve(x, trans="H" if adj else "N")

    def _deflated(self, adjoint: bool):
        # at resonance L is singular with null pair (p, q); L + s p q^H is
        # regular and agrees with L on the transverse subspace, since any
        # solution of (L + s p q^H) x = f with q^H f = 0 has q^H x = 0
        if adjoint:
            a, b = self.P.q_mod, self.P.p_mod
            A0 = self.L.conj().T.tocsr()
            s = np.conj(self._shift)
        else:
            a, b = self.P.p_mod, self.P.q_mod
            A0 = self.L
            s = self._shift
        N = self.op.size
        A = spla.LinearOperator((N, N), matvec=lambda x: A0 @ x + s * a * np.vdot(b, x),
                                dtype=complex)
        pc = None
        if self.precond is not None:
            Ma = self.precond.solve(a, adjoint=adjoint)
            denom = 1.0 + s * np.vdot(b, Ma)

            def pc(y):
                My = self.precond.solve(y, adjoint=adjoint)
                return My - Ma * (s * np.vdot(b, My) / denom)
        return A, pc

    @property
    def _shift(self) -> complex:
        return complex(self.op.grid.omega0)

    def _solve(self, rhs, adjoint: bool) -> np.ndarray:
        if self._direct is not None:
            self.stats.solves += 1
            return self._direct(np.asarray(rhs, dtype=complex), adjoint)
        if self.P.resonant and not self.cfg.tikhonov:
            A, pc = self._deflated(adjoint)
            return gmres_solve(A, rhs, pc, self.cfg, self.stats)
        A = self.L.conj().T.tocsr() if adjoint else self.L
        pc = None
        if self.precond is not None:
            pc = lambda y: self.precond.solve(y, adjoint=adjoint)  # noqa: E731
        return gmres_solve(A, rhs, pc, self.cfg, self.stats)

    def __call__(self, f, adjoint: bool = False) -> np.ndarray:
        f = np.asarray(f, dtype=complex)
        rhs = apply_projector(self.P, f, adjoint)
        if f.ndim == 1:
            eta = self._solve(rhs, adjoint)
        else:
            eta = np.column_stack([self._solve(rhs[:, i], adjoint) for i in range(f.shape[1])])
        return apply_projector(self.P, eta, adjoint)


def projected_resolvent_action(op: TsrOperator, P: ObliqueProjector, f, adjoint: bool = False,
                               cfg: TransverseSolveConfig = TransverseSolveConfig(),
                               precond: Optional[FdPreconditioner] = None) -> np.ndarray:
    """Apply ``P L^{-1} P`` (or ``P* L^{-H} P*``) to a stacked vector.

    Steps: project the right-hand side, solve with FD-preconditioned GMRES,
    project the result.
    """
    return ProjectedResolvent(op, P, cfg, precond=precond)(f, adjoint)


def randomized_svd(forward: Callable, adjoint: Callable, n_in: int, rank: int = 8,
                   oversample: int = 8, power_iters: int = 2,
                   rng: Optional[np.random.Generator] = None):
    """Randomized SVD of an operator known through its actions.

    Range finder with power iterations followed by a small dense SVD.
    ``forward`` and ``adjoint`` act on matrices of column vectors.

    Returns
    -------
    U : ndarray, shape (n_out, r)
    s : ndarray, shape (r,)
    V : ndarray, shape (n_in, r)
        Right singular vectors as columns.
    """
    rng = np.random.default_rng() if rng is None else rng
    ell = min(rank + oversample, n_in)
    omega = rng.standard_normal((n_in, ell)) + 1j * rng.standard_normal((n_in, ell))
    Q, _ = np.linalg.qr(forward(omega))
    for _ in range(power_iters):
        Z, _ = np.linalg.qr(adjoint(Q))
        Q, _ = np.linalg.qr(forward(Z))
    Bh = adjoint(Q)  # = (Q^H A)^H
    Ub, s, Vh = np.linalg.svd(Bh.conj().T, full_matrices=False)
    r = min(rank, s.size)
    return Q @ Ub[:, :r], s[:r], Vh[:r].conj().T


class TransverseResolvent:
    """Forcing-to-response map ``P L^{-1} P B_TS`` (optionally restricted).

    With ``cfg.restrict_forcing`` the forcing coordinates are restricted to
    the complement of ``b = B_TS^H q``, so that the physical forcing
    ``B_TS v`` has no component along the adjoint neutral mode.
    """

    def __init__(self, op: TsrOperator, P: ObliqueProjector,
                 cfg: TransverseSolveConfig = TransverseSolveConfig()):
        self.op, self.P, self.cfg = op, P, cfg
        self.solver = ProjectedResolvent(op, P, cfg)
        self.Bts = op.input_map.astype(complex)
        b = self.Bts.conj().T @ P.q_mod
        nb = np.linalg.norm(b)
        self.b = b / nb if (cfg.restrict_forcing and nb > 0) else None

    @property
    def n_in(self) -> int:
        return self.Bts.shape[1]

    def restrict(self, v, adjoint: bool = False) -> np.ndarray:
        v = np.asarray(v, dtype=complex)
        if self.b is None:
            return v
        if v.ndim == 1:
            return v - self.b * np.vdot(self.b, v)
        return v - np.outer(self.b, self.b.conj() @ v)

    def forward(self, v) -> np.ndarray:
        return self.solver(self.Bts @ self.restrict(v))

    def adjoint(self, u) -> np.ndarray:
        return self.restrict(self.Bts.conj().T @ self.solver(u, adjoint=True))

    def dense(self) -> np.ndarray:
        return self.forward(np.eye(self.n_in, dtype=complex))


def transverse_svd(op: TsrOperator, P: ObliqueProjector,
                   cfg: TransverseSolveConfig = TransverseSolveConfig(),
                   method: str = "randomized") -> ResolventSolution:
    """Leading singular triplet of the transverse resolvent.

    Parameters
    ----------
    method : {"randomized", "dense"}
        ``"dense"`` forms the operator column by column (desk scale only).
    """
    T = TransverseResolvent(op, P, cfg)
    if method == "dense":
        U, s, Vh = np.linalg.svd(T.dense(), full_matrices=False)
        u, sig, v = U[:, 0], s[0], Vh[0].conj()
    elif method == "randomized":
        rng = np.random.default_rng(cfg.seed)
        U, s, V = randomized_svd(T.forward, T.adjoint, T.n_in, cfg.rsvd_rank,
                                 cfg.rsvd_oversample, cfg.rsvd_power_iters, rng)
        u, sig, v = U[:, 0], s[0], V[:, 0]
    else:
        raise ConfigurationError(f"unknown method {method!r}")
    # fix the gauge so repeated runs give identical vectors
    ph = align_phase(v)
    u, v = u * ph, v * ph
    st = T.solver.stats
    info = {"ratio": P.ratio, "resonant": P.resonant, "restricted": T.b is not None,
            "solves": st.solves, "gmres_iterations": st.iterations,
            "max_relative_residual": st.max_residual, "singular_values": s[:8].tolist(),
            "method": method}
    return ResolventSolution(float(sig), v, u, "transverse", op.omega_f, info)


def _theta0_pairing(pair: FloquetPair):
    n = pair.state_dim
    p0, q0 = pair.p0[:n], pair.q0[:n]
    den = np.vdot(q0, p0)
    if abs(den) == 0:
        raise ZeroGainError("adjoint and neutral modes are orthogonal at theta_0")
    return p0, q0, den


def drift_coefficient(eta_sigma_at_0, pair: FloquetPair):
    """Neutral-mode amplitude that cancels the response at ``t = 0``.

    ``c = -<q0(0), x> / <q0(0), p0(0)>`` on the ``theta_0`` block, so that
    ``x + c p0(0)`` has no adjoint component.  Pass the real part of the
    transverse response for a real (physical) forcing, or the complex
    envelope for the analytic-signal formulation.
    """
    x = np.asarray(eta_sigma_at_0)
    p0, q0, den = _theta0_pairing(pair)
    if x.size != p0.size:
        raise ConfigurationError("expected one state-sized block")
    c = -np.vdot(q0, x) / den
    if abs(np.imag(c)) <= 1e-12 * max(abs(c), 1e-300):
        return float(np.real(c))
    return complex(c)


def reconstructed_gain(sol_transverse: ResolventSolution, c, pair: FloquetPair,
                       forcing_norm: float = 1.0, neutral: Optional[np.ndarray] = None,
                       cross_term: bool = True) -> ResolventSolution:
    """Gain of the transverse response plus a neutral-mode component.

    ``G_rec^2 = (||eta_S||^2 + 2 Re(c <eta_S, p>) + |c|^2 ||p||^2) / ||f||^2``
    with ``eta_S = G_S * forcing_norm * u``.

    Parameters
    ----------
    sol_transverse : ResolventSolution
    c : complex
        Neutral amplitude for a forcing of norm ``forcing_norm``.
    pair : FloquetPair
    neutral : ndarray, optional
        Neutral envelope ``p``; defaults to ``pair.p0``.  At resonance
        ``omega_f = k omega0`` pass the shifted mode so the envelope sum is
        the actual response.
    cross_term : bool
        Drop the cross term when the two parts oscillate at incommensurate
        frequencies.
    """
    p = pair.p0 if neutral is None else np.asarray(neutral)
    eta = sol_transverse.gain * forcing_norm * sol_transverse.response_mode
    total = eta + c * p
    if cross_term:
        g2 = np.linalg.norm(total) ** 2
    else:
        g2 = np.linalg.norm(eta) ** 2 + abs(c) ** 2 * np.linalg.norm(p) ** 2
    gain = float(np.sqrt(max(g2, 0.0)) / forcing_norm)
    nt = np.linalg.norm(total)
    resp = total / nt if nt > 0 else total
    info = dict(sol_transverse.info)
    info.update(drift_coefficient=complex(c), transverse_gain=sol_transverse.gain)
    return ResolventSolution(gain, sol_transverse.forcing_mode, resp, "reconstructed",
                             sol_transverse.omega_f, info)


@dataclass(frozen=True, eq=False)
class ReconstructedResponse:
    """Physical response to transverse optimal forcing from rest.

    The response is ``full(t) + c_h p0(t)`` where ``full`` is the quasi-periodic
    particular solution (envelope, carrier ``omega_f``) and ``p0(t)`` is the
    neutral mode at its own period.  At resonance both share the carrier and
    ``full`` is the single envelope ``eta_S + c p_k``.

    Attributes
    ----------
    solution : ResolventSolution
        Variant ``reconstructed``; ``gain`` is the long-time RMS gain.
    particular : ndarray
        Particular envelope for the unit forcing.
    neutral_amplitude : complex
        Coefficient of the T0-periodic neutral mode (zero at resonance, where
        it is folded into ``particular``).
    """

    solution: ResolventSolution
    particular: np.ndarray
    neutral_amplitude: complex
    resonant: bool


def reconstruct_response(op: TsrOperator, pair: FloquetPair, P: ObliqueProjector,
                         sol_transverse: ResolventSolution) -> ReconstructedResponse:
    """Long-time response to the transverse optimal forcing from a zero state.

    Off resonance the particular response ``L^{-1} B_TS v`` exists and differs
    from ``eta_S`` by a multiple ``a`` of the modulated mode; the homogeneous
    neutral part then has amplitude ``c - a`` and a different carrier, so the
    two add in quadrature.  At resonance the response is ``eta_S + c p_k``.
    """
    v = sol_transverse.forcing_mode
    eta_s = sol_transverse.gain * sol_transverse.response_mode
    c = drift_coefficient(eta_s[:pair.state_dim], pair)
    if P.resonant:
        rec = reconstructed_gain(sol_transverse, c, pair, 1.0, neutral=P.p_mod)
        return ReconstructedResponse(rec, rec.gain * rec.response_mode, 0.0, True)
    full = op.solve(op.input_map @ v)
    n = pair.state_dim
    p0, q0, den = _theta0_pairing(pair)
    c_h = -np.vdot(q0, full[:n]) / den
    g2 = np.linalg.norm(full) ** 2 + abs(c_h) ** 2 * np.linalg.norm(pair.p0) ** 2
    info = dict(sol_transverse.info)
    info.update(drift_coefficient=complex(c), neutral_amplitude=complex(c_h),
                transverse_gain=sol_transverse.gain,
                modulated_amplitude=complex(np.vdot(P.q_mod, full)))
    nf = np.linalg.norm(full)
    sol = ResolventSolution(float(np.sqrt(g2)), v, full / nf, "reconstructed", op.omega_f, info)
    return ReconstructedResponse(sol, full, complex(c_h), False)


def phase_drift_rate(q_samples, forcing_samples, grid) -> complex:
    """Neutral-mode amplitude accumulated over one base period.

    Trapezoidal rule on the collocation grid (spectrally accurate for
    periodic integrands): ``(T0 / n_ts) sum_j q(theta_j)^H f(theta_j)``.
    """
    q = np.asarray(q_samples, dtype=complex).ravel()
    f = np.asarray(forcing_samples, dtype=complex).ravel()
    if q.size != f.size:
        raise ConfigurationError("mode and forcing sample sizes differ")
    return complex(grid.period / grid.n_ts * np.vdot(q, f))


def resonant_full_forcing(op: TsrOperator, P: ObliqueProjector) -> np.ndarray:
    """Optimal forcing of the full operator in the limit ``omega_f -> k omega0``.

    Near resonance ``L^{-1} ~ p q^H / sigma_min``, so the leading right
    singular vector of ``L^{-1} B_TS`` tends to ``B_TS^H q`` (normalized).
    This forcing has the largest possible projection on the adjoint mode and
    drives secular phase drift.
    """
    b = op.input_map.conj().T @ P.q_mod
    nb = np.linalg.norm(b)
    if nb == 0:
        raise ZeroGainError("input map does not reach the adjoint neutral mode")
    b = b / nb
    return b * align_phase(b)


def solve_reconstructed(op: TsrOperator, pair: FloquetPair,
                        cfg: TransverseSolveConfig = TransverseSolveConfig(),
                        method: str = "randomized") -> ReconstructedResponse:
    """Transverse SVD followed by response reconstruction at one frequency."""
    P = build_projector(op, pair)
    sol = transverse_svd(op, P, cfg, method=method)
    return reconstruct_response(op, pair, P, sol)
