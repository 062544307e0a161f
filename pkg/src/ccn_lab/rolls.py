"""Roll family of the RGL equation in the 8-dimensional representation.

All vectors are stored at theta = 0 with the phase normalization u_hat = (|u_hat|, 0);
the loop at any other theta is G_theta applied to the stored vector.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import OutsideExistenceError
from .msys import DEFAULT_N_THETA, J2, SIGMA, LoopFunction, rotation

FD_STEP = 1e-5


@dataclass(frozen=True)
class Wavenumber:
    k: float
    l: float

    def __post_init__(self):
        if not (math.isfinite(self.k) and math.isfinite(self.l)):
            raise ValueError("wavenumber components must be finite")

    @property
    def q2(self) -> float:
        return self.k * self.k + self.l * self.l

    @property
    def q_norm(self) -> float:
        return math.hypot(self.k, self.l)

    @property
    def angle(self) -> float:
        """Orientation of (k, l) in the plane."""
        return math.atan2(self.l, self.k)

    def __iter__(self):
        yield self.k
        yield self.l


def as_wavenumber(kl) -> Wavenumber:
    if isinstance(kl, Wavenumber):
        return kl
    k, l = kl
    return Wavenumber(float(k), float(l))


class DomainClass(str, enum.Enum):
    outside_D = "outside_D"
    D_plus = "D_plus"
    D_minus = "D_minus"
    boundary_existence = "boundary_existence"
    boundary_zz = "boundary_zz"


@dataclass(frozen=True)
class RollState:
    kl: Wavenumber
    u_hat: np.ndarray
    amp2: float
    Zhat0: np.ndarray
    Ztheta0: np.ndarray
    Zk0: np.ndarray
    Zl0: np.ndarray
    Zkk0: np.ndarray
    Zkl0: np.ndarray
    Zll0: np.ndarray
    # max relative gap between analytic and finite-difference second derivatives
    second_derivative_defect: float


# Zhat(k, l) = s * (1, 0, 0, k, 0, l, 0, 0) with s = sqrt(1 - k^2 - l^2), because
# J2 e1 = e2.  The k- and l-slots are the second components of the p and r blocks.
_IK, _IL = 3, 5


def _shape(k, l):
    v = np.zeros(8)
    v[0], v[_IK], v[_IL] = 1.0, k, l
    return v


def _first_derivatives(k, l):
    a = 1.0 - k * k - l * l
    s = math.sqrt(a)
    v = _shape(k, l)
    Zk = (-k / s) * v
    Zk[_IK] += s
    Zl = (-l / s) * v
    Zl[_IL] += s
    return Zk, Zl


def _second_derivatives(k, l):
    a = 1.0 - k * k - l * l
    s = math.sqrt(a)
    s_k, s_l = -k / s, -l / s
    s_kk = -1.0 / s - k * k / s**3
    s_kl = -k * l / s**3
    s_ll = -1.0 / s - l * l / s**3
    v = _shape(k, l)
    Zkk = s_kk * v
    Zkk[_IK] += 2 * s_k
    Zkl = s_kl * v
    Zkl[_IK] += s_l
    Zkl[_IL] += s_k
    Zll = s_ll * v
    Zll[_IL] += 2 * s_l
    return Zkk, Zkl, Zll


def _fd_second_derivatives(k, l, h=FD_STEP):
    kp, lp = _first_derivatives(k + h, l), _first_derivatives(k, l + h)
    km, lm = _first_derivatives(k - h, l), _first_derivatives(k, l - h)
    Zkk = (kp[0] - km[0]) / (2 * h)
    Zkl = (lp[0] - lm[0]) / (2 * h)  # d/dl of Z_k
    Zll = (lp[1] - lm[1]) / (2 * h)
    return Zkk, Zkl, Zll


def solve_roll(kl) -> RollState:
    """Closed-form roll at wavenumber (k, l); requires k^2 + l^2 < 1."""
    kl = as_wavenumber(kl)
    k, l = kl.k, kl.l
    amp2 = 1.0 - k * k - l * l
    if not amp2 > 0.0:
        raise OutsideExistenceError(
            f"(k, l) = ({k}, {l}) lies outside the existence disc k^2 + l^2 < 1")
    s = math.sqrt(amp2)
    Z0 = s * _shape(k, l)
    Zk, Zl = _first_derivatives(k, l)
    second = _second_derivatives(k, l)
    fd = _fd_second_derivatives(k, l)
    defect = max(
        float(np.max(np.abs(x - y)) / max(1.0, np.max(np.abs(x))))
        for x, y in zip(second, fd)
    )
    return RollState(
        kl=kl,
        u_hat=np.array([s, 0.0]),
        amp2=amp2,
        Zhat0=Z0,
        Ztheta0=SIGMA @ Z0,
        Zk0=Zk,
        Zl0=Zl,
        Zkk0=second[0],
        Zkl0=second[1],
        Zll0=second[2],
        second_derivative_defect=defect,
    )


def fd_second_derivatives(kl, h: float = FD_STEP):
    """Central differences of the closed-form Z_k, Z_l: (Z_kk, Z_kl, Z_ll) at theta = 0."""
    kl = as_wavenumber(kl)
    return _fd_second_derivatives(kl.k, kl.l, h)


def roll_loop(state: RollState, n_theta: int = DEFAULT_N_THETA, which: str = "Zhat") -> LoopFunction:
    """Sample G_theta v on the theta grid, v one of the stored theta = 0 vectors."""
    v = {
        "Zhat": state.Zhat0, "Ztheta": state.Ztheta0,
        "Zk": state.Zk0, "Zl": state.Zl0,
        "Zkk": state.Zkk0, "Zkl": state.Zkl0, "Zll": state.Zll0,
    }[which]
    return LoopFunction.from_function(lambda t: rotation(t) @ v, n_theta)


def classify(kl, tol: float = 1e-9) -> DomainClass:
    from .coeffs import delta_zz_closed

    kl = as_wavenumber(kl)
    q2 = kl.q2
    if abs(1.0 - q2) <= tol:
        return DomainClass.boundary_existence
    if q2 > 1.0:
        return DomainClass.outside_D
    dzz = delta_zz_closed(kl.k, kl.l)
    if abs(dzz) <= tol:
        return DomainClass.boundary_zz
    return DomainClass.D_minus if dzz < 0 else DomainClass.D_plus


def printed_Zk_Zl(kl) -> tuple[np.ndarray, np.ndarray]:
    """Z_k and Z_l at theta = 0 assembled block by block from u_hat and J2 u_hat,
    independently of the shape-vector route used in solve_roll."""
    kl = as_wavenumber(kl)
    k, l = kl.k, kl.l
    a = 1.0 - kl.q2
    if not a > 0:
        raise OutsideExistenceError(f"({k}, {l}) lies outside the existence disc")
    u = np.array([math.sqrt(a), 0.0])
    Ju = J2 @ u
    zero = np.zeros(2)
    Zk = np.concatenate([-k / a * u, (a - k * k) / a * Ju, -k * l / a * Ju, zero])
    Zl = np.concatenate([-l / a * u, -k * l / a * Ju, (a - l * l) / a * Ju, zero])
    return Zk, Zl
