"""Multisymplectic structure  M Z_t + J Z_x + K Z_y = grad S(Z)  and loop averages.

Only the real Ginzburg-Landau instance ships.  Its state is

    Z = (u, p, r, w) in R^8,   p = u_x, r = u_y,

with w the auxiliary coordinate enforcing p_y = r_x (gauge w = 0 on rolls).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError

DEFAULT_N_THETA = 32

J2 = np.array([[0.0, -1.0], [1.0, 0.0]])
I2 = np.eye(2)
O2 = np.zeros((2, 2))

# infinitesimal rotation d/dtheta of G_theta = R_theta (+) R_theta (+) R_theta (+) R_theta
SIGMA = np.kron(np.eye(4), J2)


def rotation(theta: float) -> np.ndarray:
    """G_theta acting on R^8 (the same 2x2 rotation on every block)."""
    c, s = np.cos(theta), np.sin(theta)
    return np.kron(np.eye(4), np.array([[c, -s], [s, c]]))


@dataclass(frozen=True)
class SystemModel:
    dim: int
    M: np.ndarray
    J: np.ndarray
    K: np.ndarray
    S: Callable[[np.ndarray], float]
    gradS: Callable[[np.ndarray], np.ndarray]
    hessS: Callable[[np.ndarray], np.ndarray]
    d3S: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
    name: str = "custom"
    params: dict = field(default_factory=dict)


def build_rgl_system(quartic: float = 0.25) -> SystemModel:
    """RGL equation in dimension 8.

    ``quartic`` is the coefficient c in S = |u|^2/2 + |p|^2/2 + |r|^2/2 - c|u|^4.
    Only c = 1/4 reproduces Psi_t = Lap Psi + Psi - |Psi|^2 Psi; other values are
    accepted so the validation suite can demonstrate that they are rejected.
    """
    M = np.zeros((8, 8))
    M[:2, :2] = I2
    J = np.block([
        [O2, -I2, O2, O2],
        [I2, O2, O2, O2],
        [O2, O2, O2, I2],
        [O2, O2, -I2, O2],
    ])
    K = np.block([
        [O2, O2, -I2, O2],
        [O2, O2, O2, -I2],
        [I2, O2, O2, O2],
        [O2, I2, O2, O2],
    ])
    c = float(quartic)

    def S(Z):
        Z = np.asarray(Z, dtype=float)
        u2 = Z[:2] @ Z[:2]
        return 0.5 * (Z[:6] @ Z[:6]) - c * u2 * u2

    def gradS(Z):
        Z = np.asarray(Z, dtype=float)
        g = Z.copy()
        g[:2] -= 4.0 * c * (Z[:2] @ Z[:2]) * Z[:2]
        g[6:] = 0.0
        return g

    def hessS(Z):
        u = np.asarray(Z, dtype=float)[:2]
        H = np.eye(8)
        H[6:, 6:] = 0.0
        H[:2, :2] = (1.0 - 4.0 * c * (u @ u)) * I2 - 8.0 * c * np.outer(u, u)
        return H

    def d3S(Z, a, b):
        # D^3 S(Z)[a, b]; only the u-block is nonzero
        u = np.asarray(Z, dtype=float)[:2]
        ua, ub = np.asarray(a)[:2], np.asarray(b)[:2]
        out = np.zeros(8)
        out[:2] = -8.0 * c * ((ua @ ub) * u + (u @ ub) * ua + (u @ ua) * ub)
        return out

    return SystemModel(8, M, J, K, S, gradS, hessS, d3S, name="rgl", params={"quartic": c})


@dataclass(frozen=True)
class LoopFunction:
    """State vectors at N equispaced theta points on [0, 2pi); no duplicated endpoint."""
    samples: np.ndarray  # shape (n_theta, dim)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.ndim != 2:
            raise DimensionError("loop samples must have shape (n_theta, dim)")
        n = s.shape[0]
        if n < 2 or n & (n - 1):
            raise DimensionError(f"n_theta must be a power of two, got {n}")
        object.__setattr__(self, "samples", s)

    @property
    def n_theta(self) -> int:
        return self.samples.shape[0]

    @property
    def dim(self) -> int:
        return self.samples.shape[1]

    @property
    def theta(self) -> np.ndarray:
        return 2 * np.pi * np.arange(self.n_theta) / self.n_theta

    def derivative(self) -> "LoopFunction":
        """Spectral d/dtheta."""
        n = self.n_theta
        j = np.fft.fftfreq(n, 1.0 / n)
        j[n // 2] = 0.0  # odd derivative: drop the Nyquist mode
        coeffs = np.fft.fft(self.samples, axis=0)
        return LoopFunction(np.fft.ifft(1j * j[:, None] * coeffs, axis=0).real)

    def apply(self, A: np.ndarray) -> "LoopFunction":
        return LoopFunction(self.samples @ np.asarray(A).T)

    @classmethod
    def from_function(cls, f: Callable[[float], np.ndarray], n_theta: int = DEFAULT_N_THETA):
        th = 2 * np.pi * np.arange(n_theta) / n_theta
        return cls(np.array([f(t) for t in th]))


def loop_average_inner(a: LoopFunction, b: LoopFunction) -> float:
    """<<a, b>> = (1/2pi) int_0^{2pi} <a, b> dtheta by the periodic trapezoidal rule."""
    if a.samples.shape != b.samples.shape:
        raise DimensionError(
            f"loop shapes differ: {a.samples.shape} vs {b.samples.shape}")
    return float(np.einsum("ij,ij->", a.samples, b.samples) / a.n_theta)


def steady_residual(sys: SystemModel, Z: LoopFunction, k: float, l: float) -> float:
    """max over theta of |(kJ + lK) Z_theta - grad S(Z)|."""
    Zt = Z.derivative().samples
    A = k * sys.J + l * sys.K
    grads = np.array([sys.gradS(z) for z in Z.samples])
    return float(np.max(np.abs(Zt @ A.T - grads)))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    error: float
    tol: float


@dataclass(frozen=True)
class StructureReport:
    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def _random_states(dim, n, rng, max_norm=2.0):
    v = rng.standard_normal((n, dim))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.uniform(0.05, max_norm, size=(n, 1))


def check_structure(sys: SystemModel, n_samples: int = 20, seed: int = 0) -> StructureReport:
    """Verify the SystemModel invariants; failures are report entries, never raised."""
    rng = np.random.default_rng(seed)
    states = _random_states(sys.dim, n_samples, rng)
    checks = []

    skew_J = float(np.max(np.abs(sys.J + sys.J.T)))
    skew_K = float(np.max(np.abs(sys.K + sys.K.T)))
    checks.append(CheckResult("J_skew", skew_J == 0.0, skew_J, 0.0))
    checks.append(CheckResult("K_skew", skew_K == 0.0, skew_K, 0.0))
    sym_M = float(np.max(np.abs(sys.M - sys.M.T)))
    checks.append(CheckResult("M_symmetric", sym_M == 0.0, sym_M, 0.0))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (sys.M + sys.M.T))))
    checks.append(CheckResult("M_psd", min_eig >= -1e-14, max(0.0, -min_eig), 1e-14))

    h = 1e-5
    eye = np.eye(sys.dim)
    g_err = H_err = H_sym = T_err = 0.0
    for Z in states:
        g = sys.gradS(Z)
        fd = np.array([(sys.S(Z + h * e) - sys.S(Z - h * e)) / (2 * h) for e in eye])
        g_err = max(g_err, np.max(np.abs(fd - g)) / max(1.0, np.max(np.abs(g))))

        H = sys.hessS(Z)
        H_sym = max(H_sym, float(np.max(np.abs(H - H.T))))
        fdH = np.array([(sys.gradS(Z + h * e) - sys.gradS(Z - h * e)) / (2 * h) for e in eye]).T
        H_err = max(H_err, np.max(np.abs(fdH - H)) / max(1.0, np.max(np.abs(H))))

        a, b = rng.standard_normal((2, sys.dim))
        T = sys.d3S(Z, a, b)
        fdT = (sys.hessS(Z + h * a) - sys.hessS(Z - h * a)) @ b / (2 * h)
        T_err = max(T_err, np.max(np.abs(fdT - T)) / max(1.0, np.max(np.abs(T))))

    checks.append(CheckResult("gradS_fd", g_err < 1e-6, float(g_err), 1e-6))
    checks.append(CheckResult("hessS_symmetric", H_sym < 1e-14, H_sym, 1e-14))
    checks.append(CheckResult("hessS_fd", H_err < 1e-6, float(H_err), 1e-6))
    checks.append(CheckResult("d3S_fd", T_err < 1e-5, float(T_err), 1e-5))
    return StructureReport(tuple(checks))
