"""Dynamical system models with analytic Jacobians.

A :class:`SystemModel` bundles the unforced right-hand side ``r(w, t)``, its
Jacobian, and the constant input matrix ``B`` of

    dw/dt = r(w, t) + B u(t).

Three reference systems are provided: the parametrically forced Mathieu
oscillator, the van der Pol oscillator and a 1-D complex Ginzburg-Landau
equation split into real and imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp

from .errors import ConfigurationError


@dataclass(frozen=True)
class SystemModel:
    """Right-hand side, Jacobian and input matrix of a dynamical system.

    Attributes
    ----------
    name : str
    state_dim : int
        Number of real states ``n``.
    forcing_dim : int
        Number of forcing channels ``m``.
    rhs : callable
        ``rhs(w, t) -> ndarray`` of shape ``(n,)``.
    jacobian : callable
        ``jacobian(w, t)`` returning an ``(n, n)`` dense array or sparse matrix.
    input_matrix : ndarray, shape (n, m)
    autonomous : bool
    base_frequency_hint : float or None
        Base angular frequency when it is known a priori (forcing frequency of
        a non-autonomous system, analytic orbit frequency, ...).
    params : object
        Parameter record the model was built from.
    sparse_jacobian : bool
    jacobian_action : callable, optional
        ``jacobian_action(w, t, X)`` returning ``J(w, t) @ X`` for a vector or
        a matrix of columns without forming ``J``; used by time integrators.
    """

    name: str
    state_dim: int
    forcing_dim: int
    rhs: Callable
    jacobian: Callable
    input_matrix: np.ndarray
    autonomous: bool
    base_frequency_hint: Optional[float] = None
    params: object = None
    sparse_jacobian: bool = False
    jacobian_action: Optional[Callable] = None

    def __post_init__(self):
        B = np.asarray(self.input_matrix, dtype=float)
        if B.shape != (self.state_dim, self.forcing_dim):
            raise ConfigurationError(
                f"input matrix has shape {B.shape}, expected "
                f"({self.state_dim}, {self.forcing_dim})"
            )
        B.setflags(write=False)
        object.__setattr__(self, "input_matrix", B)

    def apply_jacobian(self, w, t, X):
        """``J(w, t) @ X`` for a vector or a matrix of columns."""
        if self.jacobian_action is not None:
            return self.jacobian_action(w, t, X)
        return self.jacobian(w, t) @ X

    def dense_jacobian(self, w, t=0.0) -> np.ndarray:
        J = self.jacobian(w, t)
        return J.toarray() if sp.issparse(J) else np.asarray(J)

    def check_jacobian(self, n_points: int = 20, seed: int = 0, scale: float = 1.0,
                       h: float = 1e-6) -> float:
        """Largest relative error between the Jacobian and central differences.

        Parameters
        ----------
        n_points : int
            Number of random ``(w, t)`` samples.
        scale : float
            Standard deviation of the random states.
        h : float
            Finite-difference step.
        """
        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(n_points):
            w = scale * rng.standard_normal(self.state_dim)
            t = rng.uniform(0.0, 10.0)
            J = self.dense_jacobian(w, t)
            fd = np.empty_like(J)
            for i in range(self.state_dim):
                e = np.zeros(self.state_dim)
                e[i] = h
                fd[:, i] = (self.rhs(w + e, t) - self.rhs(w - e, t)) / (2 * h)
            err = np.linalg.norm(J - fd) / max(np.linalg.norm(J), 1e-300)
            worst = max(worst, err)
        return worst

    def check_autonomy(self, n_points: int = 10, seed: int = 0) -> bool:
        """True when ``rhs`` shows no explicit time dependence on random samples."""
        rng = np.random.default_rng(seed)
        for _ in range(n_points):
            w = rng.standard_normal(self.state_dim)
            t1, t2 = rng.uniform(0.0, 100.0, size=2)
            if not np.allclose(self.rhs(w, t1), self.rhs(w, t2), rtol=1e-14, atol=1e-14):
                return False
        return True


def _positive(**kw):
    for k, v in kw.items():
        if not (np.isfinite(v) and v > 0):
            raise ConfigurationError(f"{k} must be positive, got {v}")


@dataclass(frozen=True)
class MathieuParams:
    """Damped Mathieu oscillator ``y'' + 2 zeta y' + (omega_n^2 + alpha cos(omega0 t)) y = u``."""

    omega_n: float = 1.0
    zeta: float = 0.1
    alpha: float = 0.2
    omega0: float = float(np.sqrt(2.0))

    def __post_init__(self):
        _positive(omega_n=self.omega_n, zeta=self.zeta, omega0=self.omega0)
        if not np.isfinite(self.alpha) or self.alpha < 0:
            raise ConfigurationError(f"alpha must be non-negative, got {self.alpha}")


@dataclass(frozen=True)
class VdpParams:
    """Van der Pol oscillator ``y'' - mu (1 - y^2) y' + y = u``."""

    mu: float = 1.0

    def __post_init__(self):
        _positive(mu=self.mu)


@dataclass(frozen=True)
class CglParams:
    """Complex Ginzburg-Landau equation on a periodic interval.

    ``A_t = A + (1 + j alpha) A_xx - (1 + j beta) |A|^2 A`` with ``A = w1 + j w2``.
    ``fd_order`` selects the central-difference Laplacian (2, 4 or 6).
    """

    alpha: float = 0.1
    beta: float = 0.2
    domain_length: float = 20.0
    n_node: int = 50
    wavenumber: Optional[float] = None
    fd_order: int = 2

    def __post_init__(self):
        _positive(domain_length=self.domain_length)
        if int(self.n_node) != self.n_node or self.n_node < 8:
            raise ConfigurationError(f"n_node must be an integer >= 8, got {self.n_node}")
        if self.fd_order not in (2, 4, 6):
            raise ConfigurationError(f"fd_order must be 2, 4 or 6, got {self.fd_order}")
        if self.wavenumber is None:
            object.__setattr__(self, "wavenumber", 2 * np.pi / self.domain_length)

    @property
    def dx(self) -> float:
        return self.domain_length / self.n_node

    @property
    def nodes(self) -> np.ndarray:
        return self.dx * np.arange(self.n_node)


def mathieu_system(p: MathieuParams = MathieuParams()) -> SystemModel:
    """Mathieu oscillator in first-order form with state ``[y, y']``."""
    wn2, z2, a, w0 = p.omega_n ** 2, 2 * p.zeta, p.alpha, p.omega0

    def stiffness(t):
        return wn2 + a * np.cos(w0 * t)

    def rhs(w, t):
        return np.array([w[1], -stiffness(t) * w[0] - z2 * w[1]])

    def jacobian(w, t):
        return np.array([[0.0, 1.0], [-stiffness(t), -z2]])

    return SystemModel("mathieu", 2, 1, rhs, jacobian, np.array([[0.0], [1.0]]),
                       autonomous=False, base_frequency_hint=w0, params=p)


def vdp_system(p: VdpParams = VdpParams()) -> SystemModel:
    """Van der Pol oscillator with state ``[y, y']``."""
    mu = p.mu

    def rhs(w, t=0.0):
        y, v = w[0], w[1]
        return np.array([v, mu * (1 - y * y) * v - y])

    def jacobian(w, t=0.0):
        y, v = w[0], w[1]
        return np.array([[0.0, 1.0], [-2 * mu * y * v - 1.0, mu * (1 - y * y)]])

    return SystemModel("vdp", 2, 1, rhs, jacobian, np.array([[0.0], [1.0]]),
                       autonomous=True, params=p)


def periodic_laplacian(n_node: int, dx: float, order: int = 2) -> sp.csr_matrix:
    """Central finite-difference Laplacian with periodic wrap."""
    weights = {
        2: [-2.0, 1.0],
        4: [-5 / 2, 4 / 3, -1 / 12],
        6: [-49 / 18, 3 / 2, -3 / 20, 1 / 90],
    }[order]
    idx = np.arange(n_node)
    rows, cols, vals = [idx], [idx], [np.full(n_node, weights[0])]
    for s, ws in enumerate(weights[1:], start=1):
        for sign in (1, -1):
            rows.append(idx)
            cols.append((idx + sign * s) % n_node)
            vals.append(np.full(n_node, ws))
    lap = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_node, n_node),
    )
    return (lap.tocsr() / dx ** 2).tocsr()


def cgl_modified_wavenumber_sq(p: CglParams) -> float:
    """Eigenvalue ``-kappa`` of the discrete Laplacian on ``exp(j k x)``."""
    k, dx = p.wavenumber, p.dx
    lap = periodic_laplacian(p.n_node, dx, p.fd_order)
    row = lap.getrow(0).toarray().ravel()
    offs = np.arange(p.n_node)
    return float(-np.real(np.sum(row * np.exp(1j * k * dx * offs))))


def cgl_system(p: CglParams = CglParams()) -> SystemModel:
    """CGL equation with state ``[w1 (n_node), w2 (n_node)]``.

    The Jacobian is returned as a CSR matrix.
    """
    n = p.n_node
    lap = periodic_laplacian(n, p.dx, p.fd_order)
    eye = sp.identity(n, format="csr")
    lin = sp.bmat([[eye + lap, -p.alpha * lap], [p.alpha * lap, eye + lap]]).tocsr()
    beta = p.beta

    def rhs(w, t=0.0):
        w1, w2 = w[:n], w[n:]
        s = w1 * w1 + w2 * w2
        nl = np.concatenate([s * (w1 - beta * w2), s * (beta * w1 + w2)])
        return lin @ w - nl

    def jacobian(w, t=0.0):
        w1, w2 = w[:n], w[n:]
        s = w1 * w1 + w2 * w2
        a = w1 - beta * w2
        b = beta * w1 + w2
        d11 = -2 * w1 * a - s
        d12 = -2 * w2 * a + beta * s
        d21 = -2 * w1 * b - beta * s
        d22 = -2 * w2 * b - s
        nl = sp.bmat([[sp.diags(d11), sp.diags(d12)], [sp.diags(d21), sp.diags(d22)]])
        return (lin + nl).tocsr()

    def jacobian_action(w, t, X):
        w1, w2 = w[:n], w[n:]
        s = w1 * w1 + w2 * w2
        a = w1 - beta * w2
        b = beta * w1 + w2
        if X.ndim == 2:
            w1, w2, s, a, b = (z[:, None] for z in (w1, w2, s, a, b))
        x1, x2 = X[:n], X[n:]
        top = (-2 * w1 * a - s) * x1 + (-2 * w2 * a + beta * s) * x2
        bot = (-2 * w1 * b - beta * s) * x1 + (-2 * w2 * b - s) * x2
        return lin @ X + np.concatenate([top, bot])

    k2 = cgl_modified_wavenumber_sq(p)
    hint = beta * (1 - k2) + p.alpha * k2
    return SystemModel("cgl", 2 * n, 2 * n, rhs, jacobian, np.eye(2 * n),
                       autonomous=True, base_frequency_hint=hint, params=p,
                       sparse_jacobian=True, jacobian_action=jacobian_action)


def circle_system(omega: float = 1.0) -> SystemModel:
    """Marginal linear rotation ``x' = -omega y, y' = omega x``.

    Every circle is a periodic orbit, which makes it a convenient exact test
    case for neutral and adjoint modes.
    """
    A = np.array([[0.0, -omega], [omega, 0.0]])

    def rhs(w, t=0.0):
        return A @ w

    def jacobian(w, t=0.0):
        return A.copy()

    return SystemModel("circle", 2, 2, rhs, jacobian, np.eye(2), autonomous=True,
                       base_frequency_hint=omega, params={"omega": omega})


def build_system(name: str, **overrides) -> SystemModel:
    """Construct a built-in system by name with parameter overrides."""
    name = name.lower()
    table = {"mathieu": (MathieuParams, mathieu_system),
             "vdp": (VdpParams, vdp_system),
             "cgl": (CglParams, cgl_system)}
    if name not in table:
        raise ConfigurationError(f"unknown system {name!r}; expected one of {sorted(table)}")
    cls, factory = table[name]
    try:
        params = cls(**overrides)
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {name}: {exc}") from None
    return factory(params)
