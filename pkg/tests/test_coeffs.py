import math

import numpy as np
import pytest

from conftest import SQRT23_3, A_oracle, B_oracle, dzz_oracle
from ccn_lab.coeffs import (
    assemble_L,
    bordered_solve,
    ccn_bundle,
    characteristic_residual,
    characteristics,
    cn_quadratic,
    cn_quadratic_diag1,
    cn_quadratic_diag2,
    curlyK_chain,
    curlyK_closed,
    fluxes_closed,
    fluxes_quadrature,
    kappa_flux,
    kappa_printed,
    kappa_solvability,
    printed_xi3,
    solvability,
    tau_quadrature,
    twisted_chain,
    with_xi3,
)
from ccn_lab.errors import (
    CoalescingCharacteristicsError,
    ComplexCharacteristicsError,
    DegenerateCharacteristicsError,
    NotACharacteristicError,
    OutsideExistenceError,
)
from ccn_lab.rolls import solve_roll
from ccn_lab.validation import annulus_sample


# ------------------------------------------------------------------- fluxes

def test_fluxes_origin():
    fd = fluxes_closed((0.0, 0.0))
    assert (fd.B, fd.A, fd.Bk, fd.Al, fd.Bl, fd.Ak, fd.delta_zz) == (0, 0, 1, 1, 0, 0, 1)


def test_fluxes_08():
    fd = fluxes_closed((0.8, 0.0))
    assert fd.B == pytest.approx(0.288, abs=1e-15)
    assert fd.Bk == pytest.approx(-0.92, abs=1e-15)
    assert fd.Al == pytest.approx(0.36, abs=1e-15)
    assert fd.delta_zz == pytest.approx(-0.3312, abs=1e-15)


def test_delta_zz_at_06_05():
    assert fluxes_closed((0.6, 0.5)).delta_zz == pytest.approx(-0.33 * -0.11 - 0.36, abs=1e-14)


def test_fluxes_outside_disc():
    with pytest.raises(OutsideExistenceError):
        fluxes_closed((1.0, 0.5))


@pytest.mark.parametrize("kl", [(0.0, 0.7), (0.8, 0.0), (0.5, 0.5), (-0.2, 0.3), (0.6, -0.6)])
def test_quadrature_fluxes_vs_closed(kl):
    fq = fluxes_quadrature(solve_roll(kl))
    fc = fluxes_closed(kl)
    assert np.allclose(fq.as_array(), fc.as_array(), atol=1e-12)
    assert fq.B == pytest.approx(B_oracle(*kl), abs=1e-14)
    assert fq.A == pytest.approx(A_oracle(*kl), abs=1e-14)
    assert fq.Bl == pytest.approx(fq.Ak, abs=1e-12)


def test_quadrature_Bl_Ak_at_05_05():
    fq = fluxes_quadrature(solve_roll((0.5, 0.5)))
    assert fq.Bl == pytest.approx(-0.5, abs=1e-13)
    assert fq.Ak == pytest.approx(-0.5, abs=1e-13)


def test_quadrature_Bk_independent_of_theta_samples():
    a = fluxes_quadrature(solve_roll((0.8, 0.0)), n_theta=8)
    b = fluxes_quadrature(solve_roll((0.8, 0.0)), n_theta=64)
    assert a.Bk == pytest.approx(-0.92, abs=1e-14)
    assert b.Bk == pytest.approx(-0.92, abs=1e-14)


def test_delta_zz_factorization_grid():
    g = np.linspace(-1, 1, 200)
    K, L = np.meshgrid(g, g)
    inside = K * K + L * L < 1
    for k, l in zip(K[inside][::97], L[inside][::97]):
        assert fluxes_closed((k, l)).delta_zz == pytest.approx(dzz_oracle(k, l), abs=1e-13)


def test_tau_equals_amp2():
    for kl in annulus_sample(10):
        st = solve_roll(kl)
        assert tau_quadrature(st) == pytest.approx(st.amp2, abs=1e-12)


# ----------------------------------------------------------- characteristics

def test_characteristics_08():
    Cp, Cm = characteristics(fluxes_closed((0.8, 0.0)))
    assert Cp == pytest.approx(SQRT23_3, abs=1e-14)
    assert Cm == pytest.approx(-SQRT23_3, abs=1e-14)


def test_characteristics_06_05_vieta():
    fd = fluxes_closed((0.6, 0.5))
    Cp, Cm = characteristics(fd)
    assert Cp == pytest.approx(-10.6267, abs=1e-4)
    # the quoted -0.28238 is off in the fifth digit; Vieta fixes the value
    assert Cm == pytest.approx(fd.Bk / fd.Al / Cp, abs=1e-14)
    assert Cm == pytest.approx(-0.282306, abs=1e-6)
    assert Cp * Cm == pytest.approx(3.0, abs=1e-12)
    assert Cp * Cm == pytest.approx(fd.Bk / fd.Al, abs=1e-12)


def test_branch_labels_not_resorted():
    # A_l < 0 here, so the "plus" root is the smaller one
    fd = fluxes_closed((0.2, 0.75))
    assert fd.Al < 0 and fd.delta_zz < 0
    Cp, Cm = characteristics(fd)
    assert Cp < Cm


def test_complex_characteristics():
    with pytest.raises(ComplexCharacteristicsError):
        characteristics(fluxes_closed((0.3, 0.3)))


def test_degenerate_leading_coefficient():
    l = math.sqrt((1 - 0.64) / 3)
    fd = fluxes_closed((0.8, l))
    assert abs(fd.Al) < 1e-12
    with pytest.raises(DegenerateCharacteristicsError):
        characteristics(fd)


def test_vieta_and_quadratic_on_annulus():
    for kl in annulus_sample(20):
        fd = fluxes_closed(kl)
        Cp, Cm = characteristics(fd)
        assert abs(characteristic_residual(fd, Cp)) < 1e-12
        assert abs(characteristic_residual(fd, Cm)) < 1e-12
        assert Cp + Cm == pytest.approx(-(fd.Bl + fd.Ak) / fd.Al, abs=1e-12)
        assert Cp * Cm == pytest.approx(fd.Bk / fd.Al, abs=1e-12)


# ---------------------------------------------------------------- CN quadratic

def test_cn_quadratic_values():
    fd = fluxes_closed((0.8, 0.0))
    assert cn_quadratic(fd, 1, 0) == pytest.approx(-0.92, abs=1e-15)
    assert cn_quadratic(fd, 0, 1) == pytest.approx(0.36, abs=1e-15)


def test_cn_quadratic_diagonal_forms(rng):
    fd = fluxes_closed((0.6, 0.3))
    for m1, m2 in rng.standard_normal((20, 2)):
        q = cn_quadratic(fd, m1, m2)
        assert cn_quadratic_diag1(fd, m1, m2) == pytest.approx(q, abs=1e-12)
        assert cn_quadratic_diag2(fd, m1, m2) == pytest.approx(q, abs=1e-12)


# ------------------------------------------------------------------ L and chain

def test_L_symmetric_rank():
    st = solve_roll((0.7, 0.2))
    L = assemble_L(st)
    assert np.max(np.abs(L - L.T)) == 0.0
    assert np.linalg.matrix_rank(L) == 7
    assert np.max(np.abs(L @ st.Ztheta0)) < 1e-13


def test_L_at_origin():
    # the kernel at the origin is three-dimensional (documented deviation)
    st = solve_roll((0.0, 0.0))
    L = assemble_L(st)
    assert np.allclose(L[:2, :2], -2 * np.outer([1, 0], [1, 0]))
    assert np.allclose(L @ np.eye(8)[1], 0)
    assert np.linalg.matrix_rank(L) == 5


def test_L_Zk_identity_08(rgl):
    st = solve_roll((0.8, 0.0))
    assert np.max(np.abs(assemble_L(st) @ st.Zk0 - rgl.J @ st.Ztheta0)) < 1e-12


def test_solvability_of_range(rng):
    st = solve_roll((0.6, 0.4))
    L = assemble_L(st)
    for v in rng.standard_normal((5, 8)):
        assert abs(solvability(st, L @ v)) < 1e-12


def test_solvability_dichotomy(rgl):
    st = solve_roll((0.8, 0.0))
    fd = fluxes_closed((0.8, 0.0))
    roots = characteristics(fd)
    for C in np.linspace(-3, 3, 61):
        F = (rgl.J + C * rgl.K) @ (st.Zk0 + C * st.Zl0)
        obs = solvability(st, F)
        # oracle: obstruction is minus the characteristic quadratic, scaled
        q = -(fd.Bk + C * (fd.Bl + fd.Ak) + C * C * fd.Al)
        assert obs * np.linalg.norm(st.Ztheta0) == pytest.approx(q, abs=1e-12)
    for C in roots:
        F = (rgl.J + C * rgl.K) @ (st.Zk0 + C * st.Zl0)
        assert abs(solvability(st, F)) < 1e-10
        assert abs(solvability(st, (rgl.J + (C + 0.1) * rgl.K) @ (st.Zk0 + (C + 0.1) * st.Zl0))) > 1e-3


def test_bordered_solve_orthogonal_to_kernel(rng):
    st = solve_roll((0.6, 0.4))
    L = assemble_L(st)
    F = L @ rng.standard_normal(8)
    x, obs = bordered_solve(L, F, st.Ztheta0)
    assert abs(obs) < 1e-12
    assert abs(x @ st.Ztheta0) < 1e-12
    assert np.max(np.abs(L @ x - F)) < 1e-12


@pytest.mark.parametrize("kl", [(0.8, 0.0), (0.6, 0.5), (0.45, 0.45), (-0.3, 0.7)])
@pytest.mark.parametrize("branch", ["plus", "minus"])
def test_chain_contract(kl, branch):
    st = solve_roll(kl)
    cv = twisted_chain(st, branch)
    assert np.array_equal(cv.xi1, st.Ztheta0)
    assert np.allclose(cv.xi2, st.Zk0 + cv.C * st.Zl0)
    r = cv.residuals()
    assert r["xi3"] < 1e-10 and r["xi4"] < 1e-10
    assert abs(cv.xi3 @ cv.xi1) < 1e-12 and abs(cv.xi4 @ cv.xi1) < 1e-12
    assert cv.termination() != 0
    assert cv.termination() == pytest.approx(curlyK_chain(cv), rel=1e-10)


def test_xi3_printed_form_08():
    st = solve_roll((0.8, 0.0))
    cv = twisted_chain(st, "plus")
    p = printed_xi3(st, cv.C)
    assert np.all(p[:2] == 0) and np.all(p[6:] == 0)
    d = cv.xi3 - p
    d -= (d @ cv.xi1) / (cv.xi1 @ cv.xi1) * cv.xi1
    assert np.max(np.abs(d)) < 1e-10


def test_not_a_characteristic():
    with pytest.raises(NotACharacteristicError):
        twisted_chain(solve_roll((0.8, 0.0)), "plus", C=SQRT23_3 + 0.1)


# ---------------------------------------------------------------- curlyK, kappa

def test_curlyK_spot_value():
    cv = twisted_chain(solve_roll((0.8, 0.0)), "plus")
    assert curlyK_chain(cv) == pytest.approx(-512 / 81, rel=1e-12)
    assert curlyK_closed((0.8, 0.0), SQRT23_3) == pytest.approx(-(1 / 0.36) * (32 / 9) * 0.64, rel=1e-14)


def test_curlyK_even_in_C_when_l_zero():
    assert curlyK_closed((0.8, 0.0), SQRT23_3) == curlyK_closed((0.8, 0.0), -SQRT23_3)


def test_curlyK_06_05_minus():
    cv = twisted_chain(solve_roll((0.6, 0.5)), "minus")
    assert curlyK_chain(cv) == pytest.approx(curlyK_closed((0.6, 0.5), cv.C), rel=1e-10)


@pytest.mark.parametrize("c", np.arange(-10, 11, 2.5))
def test_gauge_invariance(c):
    st = solve_roll((0.6, 0.5))
    cv = twisted_chain(st, "minus")
    shifted = with_xi3(cv, cv.xi3 + c * cv.xi1)
    assert curlyK_chain(shifted) == pytest.approx(curlyK_chain(cv), rel=1e-12)
    assert kappa_solvability(st, shifted) == pytest.approx(kappa_solvability(st, cv), rel=1e-10)


def test_kappa_08_plus():
    st = solve_roll((0.8, 0.0))
    cv = twisted_chain(st, "plus")
    expected = -6 * (1 + 23 / 9) * 0.8
    assert expected == pytest.approx(-17.0667, abs=1e-4)
    assert kappa_solvability(st, cv) == pytest.approx(expected, rel=1e-10)
    assert kappa_flux((0.8, 0.0), cv.C) == pytest.approx(expected, rel=1e-8)


def test_kappa_flux_independent_stencil():
    # oracle: wide second difference of the flux oracles along (1, C)
    k, l, C, h = 0.6, 0.5, 0.7, 1e-3
    f = lambda s: B_oracle(k + s, l + C * s) + C * A_oracle(k + s, l + C * s)
    ref = (f(h) - 2 * f(0) + f(-h)) / h**2
    assert kappa_flux((k, l), C) == pytest.approx(ref, rel=1e-5)


def test_kappa_flux_zero_at_origin():
    assert abs(kappa_flux((0.0, 0.0), 1.3)) < 1e-9


def test_kappa_odd_symmetry():
    st_p, st_m = solve_roll((0.6, 0.5)), solve_roll((-0.6, -0.5))
    cv = twisted_chain(st_p, "plus")
    cv_m = twisted_chain(st_m, "plus", C=cv.C)
    assert kappa_solvability(st_m, cv_m) == pytest.approx(-kappa_solvability(st_p, cv), rel=1e-10)


def test_kappa_routes_agree_on_annulus():
    for kl in annulus_sample(20, seed=3):
        st = solve_roll(kl)
        for br in ("plus", "minus"):
            cv = twisted_chain(st, br)
            assert kappa_solvability(st, cv) == pytest.approx(kappa_flux(kl, cv.C), rel=1e-6)


def test_printed_kappa_differs_off_diagonal():
    st = solve_roll((0.8, 0.0))
    cv = twisted_chain(st, "plus")
    assert kappa_printed((0.8, 0.0), cv.C) == pytest.approx(-80 / 9, rel=1e-12)
    assert abs(kappa_printed((0.8, 0.0), cv.C) - kappa_solvability(st, cv)) > 1


# ---------------------------------------------------------------------- bundle

def test_bundle_08_plus(bundle_08_plus):
    b = bundle_08_plus
    assert b.tau == pytest.approx(0.36, abs=1e-12)
    assert b.sigma == pytest.approx(2 * math.sqrt(0.3312), abs=1e-14)
    assert b.sigma == pytest.approx(1.151000, abs=1e-6)
    assert b.cxy == pytest.approx(-b.sigma, abs=1e-12)
    assert b.curlyK == pytest.approx(-512 / 81, rel=1e-12)


def test_bundle_branch_antisymmetry(bundle_08_plus, bundle_08_minus):
    assert bundle_08_plus.cxy + bundle_08_minus.cxy == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("kl", [(0.45, 0.45), (0.6, 0.5), (-0.7, 0.2)])
@pytest.mark.parametrize("branch", ["plus", "minus"])
def test_bundle_identities(kl, branch):
    b = ccn_bundle(kl, branch)
    c = b.checks
    assert c["quadratic_residual"] < 1e-12
    assert c["flux_quadrature_vs_closed"] < 1e-10
    assert c["tau_vs_amp2"] < 1e-12
    assert max(c["chain_residuals"].values()) < 1e-10
    assert c["curlyK_rel_err"] < 1e-10
    assert c["kappa_rel_err"] < 1e-6
    assert c["phi_xy_branch_identity"] < 1e-12
    assert c["phi_xy_printed_form"] < 1e-12
    assert b.curlyK < 0


def test_bundle_printed_kappa_matches_on_diagonal():
    b = ccn_bundle((0.45, 0.45), "plus")
    assert abs(b.checks["kappa_printed_discrepancy"]) < 1e-9 * abs(b.kappa)


def test_bundle_coalescing():
    with pytest.raises(CoalescingCharacteristicsError):
        ccn_bundle((1 / math.sqrt(3), 0.0))


def test_bundle_complex():
    with pytest.raises(ComplexCharacteristicsError):
        ccn_bundle((0.2, 0.2))


def test_rotation_covariance_of_scalars():
    q, th = 0.75, 0.4
    a = ccn_bundle((q, 0.0))
    b = ccn_bundle((q * math.cos(th), q * math.sin(th)))
    assert b.tau == pytest.approx(a.tau, abs=1e-14)
    assert b.delta_zz == pytest.approx(a.delta_zz, abs=1e-14)
    fd = fluxes_closed((q * math.cos(th), q * math.sin(th)))
    assert abs(characteristic_residual(fd, b.C)) < 1e-12
