"""Phase extraction, growth-rate fitting and the zig-zag (sideband) experiment."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..coeffs import cn_quadratic, fluxes_closed
from ..errors import DefectPresentError, OutsideExistenceError
from ..rolls import as_wavenumber
from .evolve import StepperConfig, rgl_evolve
from .grid import Field2D, PeriodicGrid2D
from .sideband import sideband_growth

MIN_AMPLITUDE = 0.05


@dataclass
class GrowthFit:
    rate: float
    r2: float
    intercept: float = 0.0
    n_points: int = 0


@dataclass
class PhaseDiagnostics:
    phi_field: Field2D
    amp_defect: float
    growth_fit: GrowthFit | None = None


def phase_extract(psi: Field2D, kl) -> PhaseDiagnostics:
    """Slow phase phi = unwrap(arg Psi) - (k x + l y), shifted to zero mean."""
    kl = as_wavenumber(kl)
    g = psi.grid
    mod = np.abs(psi.values)
    if mod.min() <= MIN_AMPLITUDE:
        raise DefectPresentError(
            f"min |Psi| = {mod.min():.3g} <= {MIN_AMPLITUDE}: phase singularity present")
    X, Y = g.mesh()
    # demodulating first keeps the residual phase small, so per-axis unwrapping suffices
    raw = np.angle(psi.values * np.exp(-1j * (kl.k * X + kl.l * Y)))
    phi = np.unwrap(np.unwrap(raw, axis=1), axis=0)
    phi -= phi.mean()
    amp = math.sqrt(max(0.0, 1.0 - kl.q2))
    return PhaseDiagnostics(Field2D(g, phi, "ccn_phi", psi.t), float(np.max(np.abs(mod - amp))))


def fit_growth(t, amplitude, *, floor: float = 0.0, ceiling: float = 1e-2,
               t_min: float | None = None) -> GrowthFit:
    """Least-squares line through log(amplitude) over the window where
    10*floor < amplitude < ceiling (and t >= t_min)."""
    t = np.asarray(t, dtype=float)
    a = np.asarray(amplitude, dtype=float)
    sel = (a > 10 * floor) & (a < ceiling) & (a > 0)
    if t_min is not None:
        sel &= t >= t_min
    if sel.sum() < 3:
        return GrowthFit(float("nan"), float("nan"), float("nan"), int(sel.sum()))
    ts, ya = t[sel], np.log(a[sel])
    slope, intercept = np.polyfit(ts, ya, 1)
    resid = ya - (slope * ts + intercept)
    ss_tot = float(np.sum((ya - ya.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return GrowthFit(float(slope), float(min(max(r2, 0.0), 1.0)), float(intercept), int(sel.sum()))


@dataclass
class ZigzagReport:
    kl: tuple
    snapped_kl: tuple
    snap: float
    verdict: str
    measured_rate: float
    predicted_rate: float
    cn_prediction: float
    dominant_mode: tuple | None
    mode_rates: dict
    mode_predictions: dict
    r2: float
    series: dict = field(default_factory=dict)

    @property
    def relative_error(self) -> float:
        if not self.predicted_rate:
            return float("nan")
        return abs(self.measured_rate - self.predicted_rate) / abs(self.predicted_rate)


def default_modes(n: int = 3):
    """Long-wave seeds along x and y, in units of the base wavenumber."""
    return [(j, 0) for j in range(1, n + 1)] + [(0, j) for j in range(1, n + 1)]


def zigzag_experiment(kl, amplitude: float = 1e-4, t_end: float = 80.0, *,
                      mu: float = 0.05, modes=None, nx: int = 128, ny: int = 16,
                      dt: float = 0.05, seed: int = 0, t_fit: float | None = None,
                      sample_every: int = 10) -> ZigzagReport:
    """Evolve a roll plus small seeded long-wave phase noise in full RGL.

    The domain is 2 pi/mu square, the roll wavenumber is snapped onto the grid and
    each seeded Bloch mode m = mu * (jx, jy) is tracked through the modulus of the
    Fourier coefficients at k + m and k - m.
    """
    kl = as_wavenumber(kl)
    if not kl.q2 < 1.0:
        raise OutsideExistenceError(f"{tuple(kl)} lies outside the existence disc")
    modes = default_modes() if modes is None else [tuple(m) for m in modes]
    L = 2 * np.pi / mu
    grid = PeriodicGrid2D(nx, ny, L, L)
    k_s, jk = grid.snap_k(kl.k)
    l_s, jl = grid.snap_l(kl.l)
    if not k_s * k_s + l_s * l_s < 1.0:
        raise OutsideExistenceError("snapped wavenumber leaves the existence disc")
    snap = math.hypot(k_s - kl.k, l_s - kl.l)
    A = math.sqrt(1.0 - k_s * k_s - l_s * l_s)

    rng = np.random.default_rng(seed)
    X, Y = grid.mesh()
    phase = np.zeros_like(X)
    for jx, jy in modes:
        phase += np.cos(mu * (jx * X + jy * Y) + rng.uniform(0, 2 * np.pi))
    phase *= amplitude
    psi0 = Field2D(grid, A * np.exp(1j * (k_s * X + l_s * Y + phase)), "rgl_psi")

    times, amps = [], {m: [] for m in modes}
    lead = {m: [] for m in modes}

    def observe(f):
        spectrum = np.fft.fft2(f.values) / (nx * ny)
        times.append(f.t)
        for jx, jy in modes:
            plus = spectrum[(jl + jy) % ny, (jk + jx) % nx]
            minus = spectrum[(jl - jy) % ny, (jk - jx) % nx]
            amps[(jx, jy)].append(math.sqrt(abs(plus) ** 2 + abs(minus) ** 2))
            lead[(jx, jy)].append(plus)

    rgl_evolve(psi0, StepperConfig(dt, t_end, observe_every=sample_every), observer=observe)

    predictions = {m: sideband_growth((k_s, l_s), (mu * m[0], mu * m[1])) for m in modes}
    fd = fluxes_closed((k_s, l_s))
    cn_pred = max(-cn_quadratic(fd, mu * m[0], mu * m[1]) / A**2 for m in modes)
    if t_fit is None:
        # the partner eigenvalue decays at about -2A^2; wait it out
        t_fit = min(0.5 * t_end, 12.0 / (2 * A * A))

    if amplitude == 0:
        return ZigzagReport(tuple(kl), (k_s, l_s), snap, "stable-degenerate", 0.0,
                            max(predictions.values()), cn_pred, None, {}, predictions,
                            float("nan"), {"t": np.array(times)})

    fits = {m: fit_growth(times, amps[m], floor=1e-14, ceiling=1e-2, t_min=t_fit) for m in modes}
    rates = {m: f.rate for m, f in fits.items()}
    dom = max(rates, key=lambda m: rates[m])
    measured = rates[dom]
    verdict = "unstable" if measured > 0 else "stable"
    series = {"t": np.array(times), "dominant_amplitude": np.array(amps[dom]),
              "dominant_mode": np.array(lead[dom])}
    return ZigzagReport(tuple(kl), (k_s, l_s), snap, verdict, measured,
                        max(predictions.values()), cn_pred, dom, rates, predictions,
                        fits[dom].r2, series)
