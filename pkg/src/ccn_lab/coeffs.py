"""Conservation-law fluxes, characteristics, the twisted Jordan chain and the
coefficients of the linear CN and characteristic CN (CCN) phase equations.

Every coefficient is available along two independent routes: closed forms of
the RGL fluxes, and first-principles inner products on the roll family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    CoalescingCharacteristicsError,
    ComplexCharacteristicsError,
    DegenerateCharacteristicsError,
    NotACharacteristicError,
    OutsideExistenceError,
)
from .msys import DEFAULT_N_THETA, SIGMA, SystemModel, build_rgl_system, loop_average_inner
from .rolls import RollState, Wavenumber, as_wavenumber, roll_loop, solve_roll

COALESCENCE_TOL = 1e-9
LEADING_COEFF_TOL = 1e-12
OBSTRUCTION_TOL = 1e-8
KAPPA_FD_STEP = 1e-4

_RGL = build_rgl_system()


def _system(sys):
    return _RGL if sys is None else sys


def _branch_sign(branch) -> int:
    if branch in ("plus", "+", 1, +1):
        return 1
    if branch in ("minus", "-", -1):
        return -1
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


def branch_name(branch) -> str:
    return "plus" if _branch_sign(branch) > 0 else "minus"


# --------------------------------------------------------------------------- fluxes

def flux_B(k, l):
    return k * (1.0 - k * k - l * l)


def flux_A(k, l):
    return l * (1.0 - k * k - l * l)


def delta_zz_closed(k, l):
    q2 = k * k + l * l
    return (1.0 - 3.0 * q2) * (1.0 - q2)


@dataclass(frozen=True)
class FluxData:
    B: float
    A: float
    Bk: float
    Bl: float
    Ak: float
    Al: float
    delta_zz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.B, self.A, self.Bk, self.Bl, self.Ak, self.Al])


def _make_flux(B, A, Bk, Bl, Ak, Al):
    return FluxData(B, A, Bk, Bl, Ak, Al, Al * Bk - Ak * Bl)


def fluxes_closed(kl) -> FluxData:
    kl = as_wavenumber(kl)
    k, l = kl.k, kl.l
    if not kl.q2 < 1.0:
        raise OutsideExistenceError(f"(k, l) = ({k}, {l}) lies outside the existence disc")
    return _make_flux(
        flux_B(k, l), flux_A(k, l),
        1.0 - 3 * k * k - l * l, -2 * k * l,
        -2 * k * l, 1.0 - k * k - 3 * l * l,
    )


def fluxes_quadrature(state: RollState, sys: SystemModel | None = None,
                      n_theta: int = DEFAULT_N_THETA) -> FluxData:
    """B = <<J Z_theta, Z>>/2 etc. as loop averages, Jacobian from <<J Z_theta, Z_k>> etc."""
    sys = _system(sys)
    Z = roll_loop(state, n_theta)
    Zt = Z.derivative()
    Zk = roll_loop(state, n_theta, "Zk")
    Zl = roll_loop(state, n_theta, "Zl")
    JZt, KZt = Zt.apply(sys.J), Zt.apply(sys.K)
    return _make_flux(
        0.5 * loop_average_inner(JZt, Z), 0.5 * loop_average_inner(KZt, Z),
        loop_average_inner(JZt, Zk), loop_average_inner(JZt, Zl),
        loop_average_inner(KZt, Zk), loop_average_inner(KZt, Zl),
    )


def tau_quadrature(state: RollState, sys: SystemModel | None = None,
                   n_theta: int = DEFAULT_N_THETA) -> float:
    """tau = <<M Z_theta, Z_theta>>."""
    sys = _system(sys)
    Zt = roll_loop(state, n_theta, "Ztheta")
    return loop_average_inner(Zt.apply(sys.M), Zt)


# ------------------------------------------------------------------ characteristics

def characteristics(fd: FluxData) -> tuple[float, float]:
    """(C+, C-) with the +/- taken literally from the root formula (never re-sorted)."""
    if fd.delta_zz >= 0.0:
        raise ComplexCharacteristicsError(
            f"complex characteristics (D_plus): delta_zz = {fd.delta_zz:.6g} >= 0")
    if abs(fd.Al) < LEADING_COEFF_TOL:
        raise DegenerateCharacteristicsError(
            f"degenerate leading coefficient A_l = {fd.Al:.3g}")
    mid = -(fd.Bl + fd.Ak) / (2.0 * fd.Al)
    half = math.sqrt(-fd.delta_zz) / fd.Al
    return mid + half, mid - half


def characteristic_residual(fd: FluxData, C: float) -> float:
    return fd.Al * C * C + (fd.Bl + fd.Ak) * C + fd.Bk


def cn_quadratic(fd: FluxData, m1, m2):
    """Q(m); a Fourier mode of the linear CN equation grows at -Q(m)/tau."""
    return fd.Bk * m1 * m1 + (fd.Bl + fd.Ak) * m1 * m2 + fd.Al * m2 * m2


def cn_quadratic_diag1(fd: FluxData, m1, m2):
    g1 = (fd.Bl + fd.Ak) / (2.0 * fd.Bk)
    return fd.Bk * (m1 + g1 * m2) ** 2 + fd.delta_zz / fd.Bk * m2 * m2


def cn_quadratic_diag2(fd: FluxData, m1, m2):
    g2 = (fd.Bl + fd.Ak) / (2.0 * fd.Al)
    return fd.Al * (m2 + g2 * m1) ** 2 + fd.delta_zz / fd.Al * m1 * m1


# ------------------------------------------------------------------ Jordan chain

def assemble_L(state: RollState, sys: SystemModel | None = None) -> np.ndarray:
    """Linearization D^2S(Zhat) - (kJ + lK) d/dtheta in the reduced representation."""
    sys = _system(sys)
    k, l = state.kl
    return sys.hessS(state.Zhat0) - (k * sys.J + l * sys.K) @ SIGMA


def solvability(state: RollState, F) -> float:
    """Fredholm obstruction <Z_theta, F>/|Z_theta| for L V = F."""
    x1 = state.Ztheta0
    return float(x1 @ np.asarray(F) / np.linalg.norm(x1))


def bordered_solve(L: np.ndarray, F: np.ndarray, kernel: np.ndarray):
    """Solve L x = F with <x, kernel> = 0 through the bordered system

        [ L       kernel ] [x ]   [F]
        [ kernel^T  0    ] [mu] = [0].

    Returns (x, mu |kernel|), the second entry being the normalized obstruction
    <kernel, F>/|kernel| (zero iff the equation is solvable).
    """
    n = L.shape[0]
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = L
    A[:n, n] = kernel
    A[n, :n] = kernel
    sol = np.linalg.solve(A, np.append(F, 0.0))
    return sol[:n], float(sol[n] * np.linalg.norm(kernel))


@dataclass(frozen=True)
class ChainVectors:
    branch: str
    C: float
    xi1: np.ndarray
    xi2: np.ndarray
    xi3: np.ndarray
    xi4: np.ndarray
    pencil: np.ndarray  # J + C K
    L: np.ndarray

    def residuals(self) -> dict:
        P, L = self.pencil, self.L
        return {
            "xi1": float(np.max(np.abs(L @ self.xi1))),
            "xi2": float(np.max(np.abs(L @ self.xi2 - P @ self.xi1))),
            "xi3": float(np.max(np.abs(L @ self.xi3 - P @ self.xi2))),
            "xi4": float(np.max(np.abs(L @ self.xi4 - P @ self.xi3))),
        }

    def termination(self) -> float:
        """-<Z_theta, (J + C K) xi4>; equals curlyK for a chain of length four."""
        return float(-(self.xi1 @ self.pencil @ self.xi4))


def twisted_chain(state: RollState, branch="plus", sys: SystemModel | None = None,
                  C: float | None = None) -> ChainVectors:
    """xi1 = Z_theta, xi2 = Z_k + C Z_l, L xi3 = (J + CK) xi2, L xi4 = (J + CK) xi3.

    ``C`` defaults to the characteristic of ``branch``; passing another value
    makes the xi3 system unsolvable and raises NotACharacteristicError.
    """
    sys = _system(sys)
    if C is None:
        Cp, Cm = characteristics(fluxes_closed(state.kl))
        C = Cp if _branch_sign(branch) > 0 else Cm
    L = assemble_L(state, sys)
    P = sys.J + C * sys.K
    xi1 = state.Ztheta0
    xi2 = state.Zk0 + C * state.Zl0
    F = P @ xi2
    xi3, obs3 = bordered_solve(L, F, xi1)
    # relative to |F|: near A_l = 0 the characteristic (and F) grow without bound
    if abs(obs3) > OBSTRUCTION_TOL * max(1.0, float(np.linalg.norm(F))):
        raise NotACharacteristicError(
            f"C = {C:.12g} is not a characteristic: xi3 obstruction {obs3:.3e}")
    xi4, _ = bordered_solve(L, P @ xi3, xi1)
    return ChainVectors(branch_name(branch), float(C), xi1, xi2, xi3, xi4, P, L)


def with_xi3(cv: ChainVectors, xi3: np.ndarray) -> ChainVectors:
    """Same chain with xi3 replaced (e.g. shifted along the kernel); xi4 is re-solved."""
    xi4, _ = bordered_solve(cv.L, cv.pencil @ xi3, cv.xi1)
    return ChainVectors(cv.branch, cv.C, cv.xi1, cv.xi2, xi3, xi4, cv.pencil, cv.L)


def curlyK_chain(cv: ChainVectors) -> float:
    """curlyK = <xi2, (J + C K) xi3>; the kernel part of xi3 drops out."""
    return float(cv.xi2 @ cv.pencil @ cv.xi3)


def curlyK_closed(kl, C: float) -> float:
    kl = as_wavenumber(kl)
    amp2 = 1.0 - kl.q2
    return -(1.0 + C * C) * (kl.k + C * kl.l) ** 2 / amp2


def printed_xi3(state: RollState, C: float) -> np.ndarray:
    """Closed-form particular solution of L xi3 = (J + CK) xi2 (RGL)."""
    k, l = state.kl
    u = state.u_hat
    xi3 = np.zeros(8)
    xi3[2:4] = -(k + C * l) / state.amp2 * u
    xi3[4:6] = -C * (k + C * l) / state.amp2 * u
    return xi3


def kappa_solvability(state: RollState, cv: ChainVectors, sys: SystemModel | None = None) -> float:
    """-kappa = <<Z_theta, (J+CK)(Z_kk + 2C Z_lk + C^2 Z_ll + (xi3)_theta) - D^3S(Z)(xi2, xi3)>>."""
    sys = _system(sys)
    C = cv.C
    second = state.Zkk0 + 2 * C * state.Zkl0 + C * C * state.Zll0
    F = cv.pencil @ (second + SIGMA @ cv.xi3) - sys.d3S(state.Zhat0, cv.xi2, cv.xi3)
    return float(-(cv.xi1 @ F))


def kappa_flux(kl, C: float, h: float = KAPPA_FD_STEP) -> float:
    """(d_k + C d_l)^2 (B + C A) with C frozen, five-point fourth-order stencil."""
    kl = as_wavenumber(kl)

    def f(s):
        k, l = kl.k + s, kl.l + C * s
        return flux_B(k, l) + C * flux_A(k, l)

    return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)


def kappa_exact(kl, C: float) -> float:
    """Exact directional second derivative of (k + Cl)(1 - k^2 - l^2)."""
    kl = as_wavenumber(kl)
    return -6.0 * (1.0 + C * C) * (kl.k + C * kl.l)


def kappa_printed(kl, C: float) -> float:
    """The phi_X phi_XX coefficient exactly as printed for RGL (known to disagree)."""
    kl = as_wavenumber(kl)
    k, l = kl.k, kl.l
    return -6 * k - 6 * C * l - (2 * k + 4 * l) * C**2 - 6 * C**3 * l


def phi_xy_printed(kl, C: float) -> float:
    kl = as_wavenumber(kl)
    k, l = kl.k, kl.l
    return 4 * k * l - 2 * C * (1 - 3 * l * l - k * k)


# ------------------------------------------------------------------ CCN bundle

@dataclass(frozen=True)
class CoeffBundle:
    kl: Wavenumber
    branch: str
    C: float
    tau: float
    sigma: float
    kappa: float
    curlyK: float
    cxy: float
    delta_zz: float
    flux: FluxData
    checks: dict = field(default_factory=dict)

    @property
    def branch_sign(self) -> int:
        return _branch_sign(self.branch)


def ccn_bundle(kl, branch="plus", sys: SystemModel | None = None,
               n_theta: int = DEFAULT_N_THETA) -> CoeffBundle:
    """All coefficients of  tau phi_T = cxy phi_XY + kappa phi_X phi_XX + curlyK phi_XXXX.

    ``checks`` holds the cross-route discrepancies; nothing is silently trusted.
    """
    kl = as_wavenumber(kl)
    sign = _branch_sign(branch)
    state = solve_roll(kl)
    fd = fluxes_closed(kl)
    if abs(fd.delta_zz) < COALESCENCE_TOL:
        raise CoalescingCharacteristicsError(
            f"coalescing characteristics: |delta_zz| = {abs(fd.delta_zz):.3e} < {COALESCENCE_TOL}")
    Cp, Cm = characteristics(fd)
    C = Cp if sign > 0 else Cm
    cv = twisted_chain(state, branch, sys, C=C)
    fq = fluxes_quadrature(state, sys, n_theta)

    tau = tau_quadrature(state, sys, n_theta)
    sigma = 2.0 * math.sqrt(-fd.delta_zz)
    kappa = kappa_solvability(state, cv, sys)
    curlyK = curlyK_chain(cv)
    cxy = -(fd.Ak + fd.Bl + 2.0 * C * fd.Al)

    k_flux = kappa_flux(kl, C)
    k_print = kappa_printed(kl, C)
    K_closed = curlyK_closed(kl, C)
    checks = {
        "quadratic_residual": abs(characteristic_residual(fd, C)),
        "flux_quadrature_vs_closed": float(
            np.max(np.abs(fq.as_array() - fd.as_array())) / max(1e-300, np.max(np.abs(fd.as_array())))),
        "tau_vs_amp2": abs(tau - state.amp2),
        "chain_residuals": cv.residuals(),
        "curlyK_closed": K_closed,
        "curlyK_rel_err": abs(curlyK - K_closed) / abs(K_closed),
        "curlyK_termination": cv.termination(),
        "kappa_flux": k_flux,
        "kappa_rel_err": abs(kappa - k_flux) / max(abs(k_flux), 1e-300),
        "kappa_printed": k_print,
        "kappa_printed_discrepancy": k_print - kappa,
        # phi_XY coefficient is -(A_k + B_l + 2C A_l) = -(+/-)sigma for branch +/-
        "phi_xy_branch_identity": abs(cxy + sign * sigma),
        "phi_xy_printed_form": abs(cxy - phi_xy_printed(kl, C)),
    }
    return CoeffBundle(kl, branch_name(branch), float(C), tau, sigma, kappa, curlyK,
                       cxy, fd.delta_zz, fd, checks)
