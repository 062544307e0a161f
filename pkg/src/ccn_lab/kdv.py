"""Steady CCN solutions of KdV solitary-wave type.

With q = phi_X the steady CCN equation

    0 = cxy q_Y + kappa q q_X + curlyK q_XXX

is a KdV equation in which Y plays the role of time.  Dividing by cxy gives

    q_Y + a_nl q q_X + a_disp q_XXX = 0,   a_nl = kappa/cxy,  a_disp = curlyK/cxy,

and the substitution X = alpha Xt, Y = beta Yt, q = gamma qt brings it to the
standard form qt_Yt + qt qt_Xt + qt_XtXtXt = 0, whose solitary wave is

    qt = 3 c3 sech^2(sqrt(c3)/2 (Xt - c3 Yt)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .coeffs import CoeffBundle
from .errors import CoalescingCharacteristicsError, DegenerateReductionError, ParameterError
from .pde.grid import Field2D, PeriodicGrid2D, derivative

CXY_TOL = 1e-12
# profile half-width in units of 1/sqrt(c3); sech^2 tails are below 1e-20 there
DEFAULT_HALF_WIDTH = 30.0
# The 2-D embedding uses a wider period so that the profile is only marginally
# resolved at n = 256 and fully resolved at n = 512: spectral convergence is then visible.
MAP_HALF_WIDTH = 100.0


@dataclass(frozen=True)
class SteadyReduction:
    a_nl: float
    a_disp: float
    cxy: float
    degenerate: bool = False


def steady_reduction(bundle: CoeffBundle) -> SteadyReduction:
    cxy = bundle.cxy
    if abs(cxy) < CXY_TOL:
        raise CoalescingCharacteristicsError(f"phi_XY coefficient {cxy:.3e} vanishes")
    a_nl = bundle.kappa / cxy
    a_disp = bundle.curlyK / cxy
    # kappa = 0 leaves a linear Airy equation with no solitary wave
    return SteadyReduction(a_nl, a_disp, cxy, degenerate=(bundle.kappa == 0.0))


@dataclass(frozen=True)
class KdVScaling:
    alpha: float
    beta: float
    gamma: float
    a_nl: float
    a_disp: float

    def matching_residuals(self) -> tuple[float, float]:
        """The three products gamma/beta, gamma^2 a_nl/alpha, gamma a_disp/alpha^3
        must coincide; returns the two relative gaps."""
        a = self.gamma / self.beta
        b = self.gamma**2 * self.a_nl / self.alpha
        c = self.gamma * self.a_disp / self.alpha**3
        s = max(abs(a), 1e-300)
        return abs(a - b) / s, abs(a - c) / s


def solve_scaling(a_nl: float, a_disp: float) -> KdVScaling:
    """alpha = sqrt|a_disp| > 0, beta = alpha^3/a_disp, gamma = sign(a_disp)/a_nl.

    beta takes the sign of a_disp; gamma absorbs the sign of a_nl.
    """
    if a_nl == 0 or a_disp == 0 or not (math.isfinite(a_nl) and math.isfinite(a_disp)):
        raise DegenerateReductionError(
            f"KdV scaling needs nonzero finite coefficients, got a_nl={a_nl}, a_disp={a_disp}")
    alpha = math.sqrt(abs(a_disp))
    beta = alpha**3 / a_disp
    gamma = a_disp / (alpha * alpha * a_nl)
    return KdVScaling(alpha, beta, gamma, float(a_nl), float(a_disp))


def sech2_profile(zeta, c3: float):
    return 3.0 * c3 / np.cosh(0.5 * math.sqrt(c3) * np.asarray(zeta)) ** 2


@dataclass
class SolitonProfile:
    c3: float
    zeta: np.ndarray
    samples: np.ndarray
    domain_half_width: float

    @property
    def period(self) -> float:
        return 2.0 * self.domain_half_width

    def ode_residual(self) -> float:
        """max |-c3 q' + q q' + q'''| with spectral derivatives on the periodic grid."""
        n = self.samples.size
        m = 2 * np.pi * np.fft.fftfreq(n, self.period / n)
        m_odd = m.copy()
        m_odd[n // 2] = 0.0
        qh = np.fft.fft(self.samples)
        q1 = np.fft.ifft(1j * m_odd * qh).real
        q3 = np.fft.ifft((1j * m_odd) ** 3 * qh).real
        return float(np.max(np.abs(-self.c3 * q1 + self.samples * q1 + q3)))


def soliton(c3: float, n: int = 512, half_width: float | None = None) -> SolitonProfile:
    """Sample 3 c3 sech^2(sqrt(c3) zeta/2) on [-W, W) with zeta = 0 on the grid."""
    if not c3 > 0:
        raise ParameterError(f"c3 must be positive, got {c3}")
    W = DEFAULT_HALF_WIDTH / math.sqrt(c3) if half_width is None else float(half_width)
    zeta = -W + 2.0 * W * np.arange(n) / n
    return SolitonProfile(float(c3), zeta, sech2_profile(zeta, c3), W)


def wrap(zeta, period: float):
    return (np.asarray(zeta) + 0.5 * period) % period - 0.5 * period


def soliton_grid(profile: SolitonProfile, scaling: KdVScaling, n: int = 512) -> PeriodicGrid2D:
    """Square-sample grid on which zeta = X/alpha - c3 Y/beta is periodic:
    one X period and one Y period each advance zeta by exactly one profile period."""
    P = profile.period
    return PeriodicGrid2D(n, n, abs(scaling.alpha) * P, abs(scaling.beta) * P / profile.c3)


@dataclass
class MappedSoliton:
    phi: Field2D
    q: np.ndarray
    q_mean: float
    third_angle: float
    slope: float
    meta: dict = field(default_factory=dict)


def map_back(profile: SolitonProfile, scaling: KdVScaling, bundle: CoeffBundle | None = None,
             grid: PeriodicGrid2D | None = None, shift: float = 0.0) -> MappedSoliton:
    """q(X, Y) = gamma qt(X/alpha - c3 Y/beta) on a periodic grid, and phi with phi_X = q.

    Because q has nonzero X-mean, phi is the ramp q_mean*X plus a zero-mean
    periodic part from the spectral antiderivative.  Only the periodic part is
    stored in the field; the ramp slope is kept in ``q_mean``.
    """
    grid = soliton_grid(profile, scaling) if grid is None else grid
    X, Y = grid.mesh()
    c3 = profile.c3
    zeta = wrap(X / scaling.alpha - c3 * Y / scaling.beta - shift, profile.period)
    q = scaling.gamma * sech2_profile(zeta, c3)
    q_mean = float(q.mean())
    mx, _ = grid.wavenumbers()
    qh = np.fft.fft2(q - q_mean)
    with np.errstate(divide="ignore", invalid="ignore"):
        inv = np.where(mx != 0, 1.0 / (1j * mx), 0.0)
    phi = np.fft.ifft2(inv * qh).real
    slope = scaling.beta / (scaling.alpha * c3)
    meta = {"c3": c3, "alpha": scaling.alpha, "beta": scaling.beta, "gamma": scaling.gamma,
            "phi_ramp": q_mean, "crest_slope_dY_dX": slope, "delta_L": "read as -delta_zz"}
    if bundle is not None:
        meta.update(branch=bundle.branch, k=bundle.kl.k, l=bundle.kl.l)
    return MappedSoliton(Field2D(grid, phi, "ccn_phi", 0.0, meta), q, q_mean,
                         math.atan(slope), slope, meta)


def steady_ccn_residual(mapped: MappedSoliton, bundle: CoeffBundle) -> float:
    """max |cxy phi_XY + kappa phi_X phi_XX + curlyK phi_XXXX| on the mapped field.

    The X-derivatives of phi are taken through q, so the linear ramp is exact.
    """
    g = mapped.phi.grid
    q = mapped.q
    qx = derivative(q, g, 1, 0)
    qy = derivative(q, g, 0, 1)
    qxxx = derivative(q, g, 3, 0)
    return float(np.max(np.abs(bundle.cxy * qy + bundle.kappa * q * qx + bundle.curlyK * qxxx)))


@dataclass
class SolitonReport:
    reduction: SteadyReduction
    scaling: KdVScaling
    profile: SolitonProfile
    mapped: MappedSoliton
    ode_residual: float
    ccn_residual: float
    peak_error: float
    tail: float
    q_far: float


def build_soliton(bundle: CoeffBundle, c3: float = 1.0, n: int = 512,
                  half_width: float | None = None,
                  map_half_width: float | None = None) -> SolitonReport:
    """Reduce, rescale, sample and map back; every residual of the construction in one place.

    The crest line is oblique, so the far field is measured along zeta: ``q_far``
    is |q| at the periodic seam zeta = +-W of the 2-D embedding.
    """
    red = steady_reduction(bundle)
    sc = solve_scaling(red.a_nl, red.a_disp)
    prof = soliton(c3, n, half_width)
    W2 = (MAP_HALF_WIDTH / math.sqrt(c3)) if map_half_width is None else map_half_width
    wide = soliton(c3, n, W2)
    mapped = map_back(wide, sc, bundle, soliton_grid(wide, sc, n))
    return SolitonReport(red, sc, prof, mapped, prof.ode_residual(),
                         steady_ccn_residual(mapped, bundle),
                         abs(prof.samples.max() - 3 * c3),
                         float(max(prof.samples[0], prof.samples[-1])),
                         abs(sc.gamma) * float(sech2_profile(W2, c3)))
