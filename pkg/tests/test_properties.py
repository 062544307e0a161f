import math

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ccn_lab.coeffs import (characteristic_residual, characteristics, cn_quadratic, cn_quadratic_diag1,
                            cn_quadratic_diag2, curlyK_chain, curlyK_closed, fluxes_closed, twisted_chain,
                            with_xi3)
from ccn_lab.kdv import solve_scaling
from ccn_lab.pde.grid import PeriodicGrid2D
from ccn_lab.rolls import solve_roll

radius = st.floats(0.6, 0.97)
angle = st.floats(0.0, 2 * math.pi)
coef = st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3)


def annulus_point(r, t):
    k, l = r * math.cos(t), r * math.sin(t)
    fd = fluxes_closed((k, l))
    assume(abs(fd.Al) > 0.05 and abs(fd.Bk) > 0.05)
    return (k, l), fd


@given(radius, angle)
def test_vieta(r, t):
    kl, fd = annulus_point(r, t)
    Cp, Cm = characteristics(fd)
    assert math.isclose(Cp * Cm, fd.Bk / fd.Al, rel_tol=1e-10, abs_tol=1e-12)
    assert math.isclose(Cp + Cm, -(fd.Bl + fd.Ak) / fd.Al, rel_tol=1e-10, abs_tol=1e-12)
    scale = abs(fd.Al) * max(1.0, Cp * Cp, Cm * Cm)
    assert abs(characteristic_residual(fd, Cp)) <= 1e-12 * scale
    assert abs(characteristic_residual(fd, Cm)) <= 1e-12 * scale


@given(radius, angle, st.floats(-3, 3), st.floats(-3, 3))
def test_quadratic_factorizations_agree(r, t, m1, m2):
    kl, fd = annulus_point(r, t)
    q = cn_quadratic(fd, m1, m2)
    Cp, Cm = characteristics(fd)
    scale = 1.0 + abs(fd.Bk) * m1 * m1 + abs(fd.Al) * m2 * m2 + abs(fd.Bl + fd.Ak) * abs(m1 * m2)
    assert abs(q - cn_quadratic_diag1(fd, m1, m2)) <= 1e-10 * scale
    assert abs(q - cn_quadratic_diag2(fd, m1, m2)) <= 1e-10 * scale
    # the real characteristics factor Q along the directions (C, -1)
    assert abs(q - fd.Al * (m2 - Cp * m1) * (m2 - Cm * m1)) <= 1e-9 * scale * max(1.0, Cp * Cp, Cm * Cm)


@given(radius, angle, st.sampled_from(["plus", "minus"]))
def test_dispersion_negative(r, t, branch):
    kl, fd = annulus_point(r, t)
    Cp, Cm = characteristics(fd)
    C = Cp if branch == "plus" else Cm
    assert curlyK_closed(kl, C) < 0


@settings(max_examples=40, deadline=None)
@given(radius, angle, st.floats(-5, 5))
def test_curlyK_gauge_invariant(r, t, shift):
    kl, fd = annulus_point(r, t)
    cv = twisted_chain(solve_roll(kl), "plus")
    base = curlyK_chain(cv)
    moved = curlyK_chain(with_xi3(cv, cv.xi3 + shift * cv.xi1))
    assert math.isclose(base, moved, rel_tol=1e-9, abs_tol=1e-10)
    assert math.isclose(base, curlyK_closed(kl, cv.C), rel_tol=1e-8, abs_tol=1e-10)


@given(coef, coef)
def test_scaling_matching(a_nl, a_disp):
    sc = solve_scaling(a_nl, a_disp)
    assert sc.alpha > 0
    assert max(sc.matching_residuals()) < 1e-12


@given(st.sampled_from([8, 16, 32, 64]), st.sampled_from([8, 16, 32]), st.sampled_from([0.5, 2 / 3]))
def test_dealias_mask(nx, ny, fraction):
    g = PeriodicGrid2D(nx, ny, 2 * np.pi, 2 * np.pi)
    mask = g.dealias_mask(fraction)
    jx, jy = g.index()
    assert mask.shape == (ny, nx)
    assert mask[0, 0]
    # symmetric under j -> -j, so masked real fields stay real
    assert np.array_equal(mask, np.roll(mask[::-1, ::-1], (1, 1), axis=(0, 1)))
    kept_x = np.abs(np.broadcast_to(jx, mask.shape)[mask])
    kept_y = np.abs(np.broadcast_to(jy, mask.shape)[mask])
    assert kept_x.max() <= fraction * nx / 2
    assert kept_y.max() <= fraction * ny / 2
