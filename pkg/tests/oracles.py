"""Independent reference computations used by the tests.

None of these reuse the package's operators; they are built from textbook
formulas (FFT differentiation, analytic Fourier series, direct time marching,
dense linear algebra).
"""

import numpy as np
from scipy.integrate import solve_ivp


def fft_derivative(samples):
    """Spectral derivative of periodic samples on [0, 2 pi) via the FFT."""
    n = len(samples)
    k = np.fft.fftfreq(n, d=1.0 / n)
    return np.fft.ifft(1j * k * np.fft.fft(samples))


def lti_harmonic_gain(omega, omega_n=1.0, zeta=0.1):
    """|G(j omega)| of y'' + 2 zeta y' + omega_n^2 y = u (output: full state).

    The state is (y, y'), so the response to unit forcing has norm
    |H| sqrt(1 + omega^2) with H = 1 / (omega_n^2 - omega^2 + 2 j zeta omega).
    """
    H = 1.0 / (omega_n ** 2 - omega ** 2 + 2j * zeta * omega)
    return abs(H) * np.sqrt(1.0 + omega ** 2)


def mathieu_circulant_gain(omega_f, n_ts, omega_n=1.0, zeta=0.1, alpha=0.2,
                           omega0=np.sqrt(2.0), harmonic=True):
    """Mathieu time-spectral gain built in the harmonic domain by hand.

    The TSR operator is block-circulant in the DFT basis: harmonic ``k`` has
    diagonal block ``j(omega_f + k omega0) I - J0`` and couples to ``k +- 1``
    (cyclically, as the grid is periodic) through ``-J1``.
    """
    K = (n_ts - 1) // 2
    ks = np.arange(-K, K + 1)
    J0 = np.array([[0.0, 1.0], [-omega_n ** 2, -2 * zeta]])
    J1 = np.array([[0.0, 0.0], [-alpha / 2, 0.0]])
    L = np.zeros((2 * n_ts, 2 * n_ts), complex)
    for i, k in enumerate(ks):
        L[2 * i:2 * i + 2, 2 * i:2 * i + 2] = 1j * (omega_f + k * omega0) * np.eye(2) - J0
        for d in (-1, 1):
            j = (i + d) % n_ts
            L[2 * i:2 * i + 2, 2 * j:2 * j + 2] -= J1
    B = np.zeros((2 * n_ts, n_ts), complex)
    for i in range(n_ts):
        B[2 * i + 1, i] = 1.0
    if harmonic:
        B = B[:, [K]]
    return np.linalg.svd(np.linalg.solve(L, B), compute_uv=False)[0]


def mathieu_true_hr_gain(omega_f, n_har, omega_n=1.0, zeta=0.1, alpha=0.2,
                         omega0=np.sqrt(2.0)):
    """Truncated (non-periodic) harmonic resolvent for quasi-periodic input."""
    N = 2 * n_har + 1
    ks = np.arange(-n_har, n_har + 1)
    J0 = np.array([[0.0, 1.0], [-omega_n ** 2, -2 * zeta]])
    J1 = np.array([[0.0, 0.0], [-alpha / 2, 0.0]])
    L = np.zeros((2 * N, 2 * N), complex)
    for i, k in enumerate(ks):
        L[2 * i:2 * i + 2, 2 * i:2 * i + 2] = 1j * (omega_f + k * omega0) * np.eye(2) - J0
        for j in (i - 1, i + 1):
            if 0 <= j < N:
                L[2 * i:2 * i + 2, 2 * j:2 * j + 2] = -J1
    B = np.kron(np.eye(N), np.array([[0.0], [1.0]]))
    return np.linalg.svd(np.linalg.solve(L, B), compute_uv=False)[0]


def vdp_period_by_marching(mu=1.0, t_settle=200.0, n_cycles=20):
    """Mean period from upward zero crossings of y after transients decay."""
    def f(t, w):
        y, v = w
        return [v, mu * (1 - y * y) * v - y]

    def cross(t, w):
        return w[0]
    cross.direction = 1
    sol = solve_ivp(f, (0, t_settle + 7.0 * (n_cycles + 2)), [2.0, 0.0], method="DOP853",
                    rtol=1e-12, atol=1e-12, events=cross)
    tc = sol.t_events[0]
    tc = tc[tc > t_settle]
    return float(np.mean(np.diff(tc[:n_cycles + 1])))


def vdp_floquet_exponent(mu=1.0):
    """Non-trivial Floquet exponent from Liouville's formula.

    Sum of exponents = mean trace of the Jacobian over one period; the neutral
    exponent is zero, so the other one equals mean(mu (1 - y^2)).
    """
    T = vdp_period_by_marching(mu)

    def f(t, w):
        y, v = w[0], w[1]
        return [v, mu * (1 - y * y) * v - y, mu * (1 - y * y)]

    def f2(t, w):
        return f(t, w)[:2]

    pre = solve_ivp(f2, (0, 200.0), [2.0, 0.0], method="DOP853", rtol=1e-12, atol=1e-12)
    sol = solve_ivp(f, (0, T), [*pre.y[:, -1], 0.0], method="DOP853", rtol=1e-12, atol=1e-12)
    return sol.y[2, -1] / T


def dense_transverse_operator(L, B, p, q):
    """``P L^+ P B`` with dense linear algebra.

    Off resonance ``L^+ = L^{-1}``; at resonance the minimum-norm least-squares
    solution is used, which differs from any other solution by a multiple of
    ``p`` and is therefore mapped to the same result by ``P``.
    """
    P = np.eye(L.shape[0]) - np.outer(p, q.conj()) / np.vdot(q, p)
    rhs = P @ B
    X = np.linalg.lstsq(L, rhs, rcond=1e-13)[0]
    return P @ X
