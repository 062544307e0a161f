"""Integrating-factor (Lawson) RK4 evolvers for the RGL and CCN equations."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..coeffs import CoeffBundle, flux_A, flux_B
from ..errors import ConfigurationError, DivergenceError, IllPosedError
from ..rolls import as_wavenumber
from .grid import Field2D, derivative

RGL_DEALIAS = 0.5
DEFAULT_M2_BAND = 8
STABILITY_MARGIN = 0.5


@dataclass(frozen=True)
class StepperConfig:
    """``t_end`` is the integration length measured from the initial field's time."""
    dt: float
    t_end: float
    scheme: str = "lawson_rk4"
    m2_band: int | None = None
    observe_every: int | None = None

    def __post_init__(self):
        if self.scheme != "lawson_rk4":
            raise ConfigurationError(f"unsupported scheme {self.scheme!r}")
        if not self.dt > 0:
            raise ConfigurationError("dt must be positive")
        if not self.t_end >= 0:
            raise ConfigurationError("t_end must be non-negative")
        if self.m2_band is not None and self.m2_band < 0:
            raise ConfigurationError("m2_band must be non-negative")

    def steps(self) -> tuple[int, float]:
        n = max(1, math.ceil(self.t_end / self.dt - 1e-9)) if self.t_end > 0 else 0
        return n, (self.t_end / n if n else self.dt)


Observer = Callable[[Field2D], None]


def lawson_rk4(u_hat, lin, nonlinear, dt, nsteps, *, t0=0.0, observer=None, every=None,
               to_field=None):
    """Advance u' = lin*u + nonlinear(u) in Fourier space; lin is a diagonal multiplier."""
    E = np.exp(lin * dt)
    E2 = np.exp(lin * dt / 2)
    u = u_hat
    if observer is not None:
        observer(to_field(u, t0))
    for n in range(1, nsteps + 1):
        k1 = nonlinear(u)
        k2 = nonlinear(E2 * (u + 0.5 * dt * k1))
        k3 = nonlinear(E2 * u + 0.5 * dt * k2)
        k4 = nonlinear(E * u + dt * (E2 * k3))
        u = E * u + dt / 6.0 * (E * k1 + 2.0 * E2 * (k2 + k3) + k4)
        if not np.all(np.isfinite(u)):
            raise DivergenceError(f"non-finite state at t = {t0 + n * dt:.6g}", t=t0 + n * dt)
        if observer is not None and every and n % every == 0:
            observer(to_field(u, t0 + n * dt))
    return u


def _check_margin(rate_max, dt):
    if dt * max(rate_max, 0.0) >= STABILITY_MARGIN:
        raise ConfigurationError(
            f"dt * max linear growth rate = {dt * rate_max:.3g} >= {STABILITY_MARGIN}")


# --------------------------------------------------------------------------- RGL

def rgl_linear_symbol(grid):
    mx, my = grid.wavenumbers()
    return 1.0 - (mx * mx + my * my)


def rgl_cubic(u_hat, mask):
    """Projection onto ``mask`` of the Fourier transform of -|psi|^2 psi, psi = ifft2(u_hat)."""
    psi = np.fft.ifft2(u_hat)
    return mask * np.fft.fft2(-(psi.real**2 + psi.imag**2) * psi)


def rgl_evolve(psi0: Field2D, cfg: StepperConfig, *, observer: Observer | None = None,
               dealias: float = RGL_DEALIAS) -> Field2D:
    """Psi_t = Lap Psi + Psi - |Psi|^2 Psi.

    The linear part is exact; the cubic term is evaluated pseudospectrally on
    modes |j| < dealias*n/2 (the 1/2 rule removes all cubic aliasing).  The
    initial data are projected onto that band.
    """
    if psi0.kind != "rgl_psi":
        raise ConfigurationError("rgl_evolve needs an rgl_psi field")
    grid = psi0.grid
    nsteps, dt = cfg.steps()
    lin = rgl_linear_symbol(grid)
    mask = grid.dealias_mask(dealias)
    _check_margin(float(np.max(lin[mask])), dt)
    lin = np.where(mask, lin, 0.0)

    def nonlinear(u):
        return rgl_cubic(u, mask)

    def to_field(u, t):
        return Field2D(grid, np.fft.ifft2(u), "rgl_psi", t, dict(psi0.meta))

    u0 = mask * np.fft.fft2(psi0.values)
    u = lawson_rk4(u0, lin, nonlinear, dt, nsteps, t0=psi0.t, observer=observer,
                   every=cfg.observe_every, to_field=to_field)
    return to_field(u, psi0.t + nsteps * dt)


# --------------------------------------------------------------------------- CCN

def ccn_linear_symbol(grid, bundle: CoeffBundle):
    """Fourier multiplier of (cxy phi_XY + curlyK phi_XXXX)/tau."""
    mx, my = grid.wavenumbers()
    return (-bundle.cxy * mx * my + bundle.curlyK * mx**4) / bundle.tau


def ccn_band_mask(grid, m2_band):
    _, jy = grid.index()
    keep = np.ones((grid.ny, grid.nx), dtype=bool)
    if m2_band is not None:
        keep &= np.abs(jy) <= m2_band
    return keep


def ccn_evolve(phi0: Field2D, bundle: CoeffBundle, cfg: StepperConfig, *,
               observer: Observer | None = None) -> Field2D:
    """tau phi_T = cxy phi_XY + kappa phi_X phi_XX + curlyK phi_XXXX.

    Y-modes with |j_y| > m2_band are removed from the state (the equation is only
    asymptotically meaningful at O(1) slow wavenumbers).  X/Y dealiasing uses the
    grid's fraction for the quadratic term, written as (kappa/2)(phi_X^2)_X.
    """
    if phi0.kind != "ccn_phi":
        raise ConfigurationError("ccn_evolve needs a ccn_phi field")
    m2_band = cfg.m2_band
    if m2_band is None:
        if bundle.curlyK > 0:
            raise IllPosedError(
                "curlyK > 0 makes the CCN equation ill-posed; refusing without a band limit")
        m2_band = DEFAULT_M2_BAND
    grid = phi0.grid
    nsteps, dt = cfg.steps()
    keep = ccn_band_mask(grid, m2_band)
    mask = keep & grid.dealias_mask()
    lin = np.where(keep, ccn_linear_symbol(grid, bundle), 0.0)
    _check_margin(float(np.max(lin)), dt)
    mx, _ = grid.wavenumbers()
    ikx = 1j * mx
    ikx[:, grid.nx // 2] = 0.0
    c_nl = 0.5 * bundle.kappa / bundle.tau

    def nonlinear(u):
        phix = np.fft.ifft2(ikx * u).real
        return mask * (c_nl * ikx * np.fft.fft2(phix * phix))

    def to_field(u, t):
        f = Field2D(grid, np.fft.ifft2(u).real, "ccn_phi", t, dict(phi0.meta))
        f.meta["m2_band"] = m2_band
        return f

    u0 = mask * np.fft.fft2(phi0.values)
    u = lawson_rk4(u0, lin, nonlinear, dt, nsteps, t0=phi0.t, observer=observer,
                   every=cfg.observe_every, to_field=to_field)
    return to_field(u, phi0.t + nsteps * dt)


def ccn_linear_exact(phi0: Field2D, bundle: CoeffBundle, t: float,
                     m2_band=DEFAULT_M2_BAND) -> Field2D:
    """Exact solution of the linear CCN equation (kappa dropped) after time t,
    on the same retained mode set as ccn_evolve."""
    grid = phi0.grid
    keep = ccn_band_mask(grid, m2_band) & grid.dealias_mask()
    lin = ccn_linear_symbol(grid, bundle)
    u = keep * np.exp(lin * t) * np.fft.fft2(phi0.values)
    return Field2D(grid, np.fft.ifft2(u).real, "ccn_phi", phi0.t + t)


# ------------------------------------------------------------------ nonlinear CN

def cn_rhs(phi: Field2D, kl) -> Field2D:
    """d_X B(k + phi_X, l + phi_Y) + d_Y A(k + phi_X, l + phi_Y), pointwise, not divided by tau.

    Diagnostic only: the CN equation is ill-posed in D_minus and is never stepped.
    """
    kl = as_wavenumber(kl)
    g = phi.grid
    q = derivative(phi.values, g, 1, 0)
    r = derivative(phi.values, g, 0, 1)
    K, L = kl.k + q, kl.l + r
    out_of_range = bool(np.any(K * K + L * L >= 1.0))
    rhs = derivative(flux_B(K, L), g, 1, 0) + derivative(flux_A(K, L), g, 0, 1)
    f = Field2D(g, rhs, "ccn_phi", phi.t, {"out_of_range": out_of_range})
    if out_of_range:
        warnings.warn("local wavenumber (k+q, l+r) leaves the existence disc", RuntimeWarning)
    return f
