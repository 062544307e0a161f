import math

import numpy as np
import pytest

from ccn_lab.coeffs import assemble_L
from ccn_lab.errors import OutsideExistenceError
from ccn_lab.msys import loop_average_inner
from ccn_lab.rolls import (
    DomainClass,
    Wavenumber,
    classify,
    fd_second_derivatives,
    printed_Zk_Zl,
    roll_loop,
    solve_roll,
)


def test_origin_roll():
    st = solve_roll((0.0, 0.0))
    assert np.array_equal(st.u_hat, [1.0, 0.0])
    assert np.array_equal(st.Zhat0, np.eye(8)[0])


def test_Ztheta_at_08():
    st = solve_roll((0.8, 0.0))
    assert st.amp2 == pytest.approx(0.36, abs=1e-15)
    assert np.allclose(st.Ztheta0, [0, 0.6, -0.48, 0, 0, 0, 0, 0], atol=1e-15)


def test_outside_disc_raises():
    with pytest.raises(OutsideExistenceError):
        solve_roll((0.9, 0.5))


def test_wavenumber_rejects_nonfinite():
    with pytest.raises(ValueError):
        Wavenumber(float("nan"), 0.0)


@pytest.mark.parametrize("kl", [(0.3, 0.4), (0.8, 0.0), (-0.5, 0.6), (0.1, -0.9)])
def test_first_derivatives_match_blockwise_forms(kl):
    st = solve_roll(kl)
    Zk, Zl = printed_Zk_Zl(kl)
    assert np.max(np.abs(st.Zk0 - Zk)) < 1e-12
    assert np.max(np.abs(st.Zl0 - Zl)) < 1e-12


@pytest.mark.parametrize("kl", [(0.3, 0.4), (0.8, 0.0), (0.45, 0.45)])
def test_second_derivatives_analytic_vs_fd(kl):
    st = solve_roll(kl)
    fd = fd_second_derivatives(kl)
    for a, b in zip((st.Zkk0, st.Zkl0, st.Zll0), fd):
        assert np.max(np.abs(a - b)) < 1e-8
    assert st.second_derivative_defect < 1e-8


def test_second_derivatives_vs_independent_fd_of_Zhat():
    # oracle: second differences of the roll itself, not of its derivatives
    k, l, h = 0.5, 0.3, 1e-4

    def Z(a, b):
        return solve_roll((a, b)).Zhat0

    Zkk = (Z(k + h, l) - 2 * Z(k, l) + Z(k - h, l)) / h**2
    Zkl = (Z(k + h, l + h) - Z(k + h, l - h) - Z(k - h, l + h) + Z(k - h, l - h)) / (4 * h * h)
    st = solve_roll((k, l))
    assert np.allclose(st.Zkk0, Zkk, atol=1e-6)
    assert np.allclose(st.Zkl0, Zkl, atol=1e-6)


def test_roll_loop_samples():
    st = solve_roll((0.5, 0.2))
    loop = roll_loop(st, 16)
    assert np.allclose(loop.samples[0], st.Zhat0, atol=1e-15)
    assert np.allclose(loop.samples[8], -st.Zhat0, atol=1e-15)


def test_tau_identity_on_loop(rgl):
    st = solve_roll((0.6, 0.3))
    Zt = roll_loop(st, which="Ztheta")
    MZt = Zt.apply(rgl.M)
    assert loop_average_inner(Zt, MZt) == pytest.approx(st.amp2, abs=1e-14)


@pytest.mark.parametrize("kl, cls", [
    ((0.0, 0.0), DomainClass.D_plus),
    ((0.8, 0.0), DomainClass.D_minus),
    ((1.2, 0.0), DomainClass.outside_D),
    ((1.0, 0.0), DomainClass.boundary_existence),
    ((1 / math.sqrt(3), 0.0), DomainClass.boundary_zz),
])
def test_classify(kl, cls):
    assert classify(kl) == cls


def test_rotation_covariance_of_amplitude():
    q = 0.7
    ref = solve_roll((q, 0.0)).amp2
    for th in np.linspace(0, 2 * np.pi, 13):
        assert solve_roll((q * np.cos(th), q * np.sin(th))).amp2 == pytest.approx(ref, abs=1e-14)


def test_linearization_identities(rgl, rng):
    for _ in range(100):
        r, t = 0.98 * math.sqrt(rng.uniform()), rng.uniform(0, 2 * math.pi)
        st = solve_roll((r * math.cos(t), r * math.sin(t)))
        L = assemble_L(st, rgl)
        assert np.max(np.abs(L @ st.Ztheta0)) < 1e-12
        assert np.max(np.abs(L @ st.Zk0 - rgl.J @ st.Ztheta0)) < 1e-12
        assert np.max(np.abs(L @ st.Zl0 - rgl.K @ st.Ztheta0)) < 1e-12
