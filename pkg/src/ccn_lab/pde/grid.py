"""Periodic rectangular grids, fields on them, and Fourier-space operators."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError

KINDS = ("rgl_psi", "ccn_phi")


@dataclass(frozen=True)
class PeriodicGrid2D:
    nx: int
    ny: int
    Lx: float
    Ly: float
    dealias: float = 2.0 / 3.0

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if n < 8 or n & (n - 1):
                raise ConfigurationError(f"grid sizes must be powers of two >= 8, got {n}")
        if not (self.Lx > 0 and self.Ly > 0):
            raise ConfigurationError("domain lengths must be positive")
        if not 0 < self.dealias <= 1:
            raise ConfigurationError("dealias fraction must lie in (0, 1]")

    @property
    def x(self) -> np.ndarray:
        return self.Lx * np.arange(self.nx) / self.nx

    @property
    def y(self) -> np.ndarray:
        return self.Ly * np.arange(self.ny) / self.ny

    def mesh(self):
        """(X, Y) arrays of shape (ny, nx)."""
        return np.meshgrid(self.x, self.y)

    def index(self):
        """Integer mode numbers (jx, jy) broadcastable to (ny, nx)."""
        jx = np.fft.fftfreq(self.nx, 1.0 / self.nx)
        jy = np.fft.fftfreq(self.ny, 1.0 / self.ny)
        return jx[None, :], jy[:, None]

    def wavenumbers(self):
        """(mx, my) = 2 pi j / L, broadcastable to (ny, nx)."""
        jx, jy = self.index()
        return 2 * np.pi * jx / self.Lx, 2 * np.pi * jy / self.Ly

    def dealias_mask(self, fraction: float | None = None) -> np.ndarray:
        """Keep |j| < fraction * n / 2 in both directions (2/3 rule: quadratic, 1/2: cubic)."""
        f = self.dealias if fraction is None else fraction
        jx, jy = self.index()
        return (np.abs(jx) < f * self.nx / 2) & (np.abs(jy) < f * self.ny / 2)

    def snap_k(self, k: float) -> tuple[float, int]:
        """Nearest x-wavenumber representable on the grid and its mode number."""
        j = int(round(k * self.Lx / (2 * np.pi)))
        return 2 * np.pi * j / self.Lx, j

    def snap_l(self, l: float) -> tuple[float, int]:
        j = int(round(l * self.Ly / (2 * np.pi)))
        return 2 * np.pi * j / self.Ly, j


@dataclass
class Field2D:
    grid: PeriodicGrid2D
    values: np.ndarray  # (ny, nx), row-major
    kind: str
    t: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown field kind {self.kind!r}")
        dtype = complex if self.kind == "rgl_psi" else float
        v = np.asarray(self.values)
        if self.kind == "ccn_phi" and np.iscomplexobj(v):
            v = v.real
        self.values = np.ascontiguousarray(v, dtype=dtype)
        if self.values.shape != (self.grid.ny, self.grid.nx):
            raise ConfigurationError(
                f"values shape {self.values.shape} != (ny, nx) = {(self.grid.ny, self.grid.nx)}")
        if not np.all(np.isfinite(self.values)):
            raise ConfigurationError("field contains non-finite entries")

    @property
    def is_complex(self) -> bool:
        return self.kind == "rgl_psi"

    def spectrum(self) -> np.ndarray:
        return np.fft.fft2(self.values)

    def copy(self, values=None, t=None) -> "Field2D":
        return Field2D(self.grid, self.values.copy() if values is None else values,
                       self.kind, self.t if t is None else t, dict(self.meta))


def derivative(values: np.ndarray, grid: PeriodicGrid2D, ox: int = 0, oy: int = 0) -> np.ndarray:
    """Spectral d^ox/dx^ox d^oy/dy^oy; odd orders drop the Nyquist mode."""
    mx, my = grid.wavenumbers()
    mx = mx.copy()
    my = my.copy()
    if ox % 2:
        mx[:, grid.nx // 2] = 0.0
    if oy % 2:
        my[grid.ny // 2, :] = 0.0
    symbol = (1j * mx) ** ox * (1j * my) ** oy
    out = np.fft.ifft2(symbol * np.fft.fft2(values))
    return out if np.iscomplexobj(values) else out.real


def mode_amplitude(values: np.ndarray, jx: int, jy: int) -> complex:
    """Normalized Fourier coefficient of exp(i(2 pi jx x/Lx + 2 pi jy y/Ly))."""
    ny, nx = values.shape
    return complex(np.fft.fft2(values)[jy % ny, jx % nx] / (nx * ny))
