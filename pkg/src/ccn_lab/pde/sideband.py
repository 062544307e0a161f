"""Exact long-wave sideband dispersion of RGL rolls.

Writing Psi = exp(i k.x) (A + v) with A^2 = 1 - |k|^2 and linearizing,

    v_t = Lap v + 2i k.grad v - A^2 (v + conj v).

The Bloch ansatz v = a e^{i m.x + lam t} + conj(b) e^{-i m.x + conj(lam) t}
closes on the real symmetric matrix

    [ -|m|^2 - 2 k.m - A^2        -A^2              ]
    [       -A^2            -|m|^2 + 2 k.m - A^2    ]

whose larger eigenvalue is -|m|^2 - A^2 + sqrt(A^4 + 4 (k.m)^2).
"""
from __future__ import annotations

import numpy as np

from ..coeffs import cn_quadratic, fluxes_closed
from ..rolls import as_wavenumber


def sideband_matrix(kl, m) -> np.ndarray:
    kl = as_wavenumber(kl)
    A2 = 1.0 - kl.q2
    m1, m2 = m
    km = kl.k * m1 + kl.l * m2
    mm = m1 * m1 + m2 * m2
    return np.array([[-mm - 2 * km - A2, -A2], [-A2, -mm + 2 * km - A2]])


def sideband_growth(kl, m) -> float:
    """Leading eigenvalue of the sideband matrix for Bloch wavevector m."""
    return float(np.max(np.linalg.eigvalsh(sideband_matrix(kl, m))))


def cn_growth(kl, m) -> float:
    """Long-wave prediction -Q(m)/tau of the linear CN equation."""
    kl = as_wavenumber(kl)
    fd = fluxes_closed(kl)
    return -cn_quadratic(fd, m[0], m[1]) / (1.0 - kl.q2)


def richardson_dispersion(kl, direction, mu0: float | None = None, levels: int = 3) -> float:
    """Limit of sideband_growth(mu * d)/mu^2 as mu -> 0, by Richardson extrapolation in mu^2.

    The default mu0 shrinks with the roll amplitude since the expansion parameter
    is (k.m)/A^2.
    """
    kl = as_wavenumber(kl)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    if mu0 is None:
        mu0 = 0.05 * min(1.0, 1.0 - kl.q2)
    mus = mu0 / 2.0 ** np.arange(levels)
    T = [sideband_growth(kl, mu * d) / mu**2 for mu in mus]
    # repeated elimination of mu^2, mu^4, ... terms
    for j in range(1, levels):
        T = [(4**j * T[i + 1] - T[i]) / (4**j - 1) for i in range(len(T) - 1)]
    return float(T[0])
