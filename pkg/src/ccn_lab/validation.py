"""The acceptance gates, runnable from tests, the CLI and scripts.

Each gate returns a GateResult with its measured numbers in ``details``; gate
functions never raise on a failed check, only on programming errors.
"""
from __future__ import annotations

import dataclasses
import math
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

import numpy as np

from .coeffs import (
    assemble_L,
    bordered_solve,
    ccn_bundle,
    characteristic_residual,
    characteristics,
    curlyK_chain,
    curlyK_closed,
    delta_zz_closed,
    fluxes_closed,
    fluxes_quadrature,
    kappa_flux,
    kappa_printed,
    kappa_solvability,
    phi_xy_printed,
    printed_xi3,
    twisted_chain,
    with_xi3,
)
from .kdv import build_soliton
from .msys import build_rgl_system, check_structure, steady_residual
from .parallel import pmap
from .pde.diagnostics import zigzag_experiment
from .pde.evolve import StepperConfig, ccn_evolve, ccn_linear_exact, rgl_evolve
from .pde.grid import Field2D, PeriodicGrid2D
from .pde.sideband import cn_growth, richardson_dispersion
from .regions import region_map
from .rolls import printed_Zk_Zl, roll_loop, solve_roll

QUICK_GATES = (1, 2, 3, 4, 5, 6, 7, 8, 10, 11)
FULL_GATES = tuple(range(1, 13))
SEED = 20240601


@dataclass
class GateResult:
    number: int
    name: str
    passed: bool
    runtime: float = 0.0
    details: dict = field(default_factory=dict)
    notes: str = ""


def annulus_sample(n: int, seed: int = SEED, q2_range=(0.4, 0.95), min_al: float = 0.05):
    """Random points of D_minus away from its boundaries.

    Points where A_l is small are skipped: there one characteristic runs off to
    infinity and relative errors in C-dependent quantities lose their meaning.
    """
    rng = np.random.default_rng(seed)
    pts = []
    while len(pts) < n:
        q = math.sqrt(rng.uniform(*q2_range))
        t = rng.uniform(0.0, 2 * math.pi)
        k, l = q * math.cos(t), q * math.sin(t)
        if abs(1 - k * k - 3 * l * l) >= min_al:
            pts.append((k, l))
    return pts


def disc_sample(n: int, seed: int = SEED, r_max: float = 0.98):
    rng = np.random.default_rng(seed)
    r = r_max * np.sqrt(rng.uniform(0, 1, n))
    t = rng.uniform(0, 2 * np.pi, n)
    return list(zip(r * np.cos(t), r * np.sin(t)))


def dminus_polar_grid(n_r: int = 40, n_t: int = 25):
    """n_r * n_t points of D_minus: radii strictly inside (1/sqrt 3, 1), angles
    offset so that no point lands where A_l = 0."""
    r = np.sqrt(np.linspace(1 / 3, 1, n_r + 2)[1:-1])
    t = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t + 0.1
    return [(ri * math.cos(ti), ri * math.sin(ti)) for ri in r for ti in t]


def _rel(a, b, floor=1e-300):
    return abs(a - b) / max(abs(b), floor)


# ----------------------------------------------------------------------- gates

def gate_structure(sys=None):
    sys = build_rgl_system() if sys is None else sys
    rep = check_structure(sys)
    d = {c.name: c.error for c in rep.checks}
    return rep.passed, d


def gate_rolls(sys=None):
    sys = build_rgl_system() if sys is None else sys
    res = amp = zk = 0.0
    for kl in disc_sample(100):
        st = solve_roll(kl)
        res = max(res, steady_residual(sys, roll_loop(st), *kl))
        amp = max(amp, abs(st.amp2 - (1 - kl[0] ** 2 - kl[1] ** 2)))
        pk, pl = printed_Zk_Zl(kl)
        zk = max(zk, float(np.max(np.abs(pk - st.Zk0))), float(np.max(np.abs(pl - st.Zl0))))
    d = {"steady_residual": res, "amp2_error": amp, "Zk_Zl_vs_printed": zk}
    return res < 1e-12 and amp < 1e-14 and zk < 1e-12, d


def gate_fluxes(sys=None):
    quad = sym = 0.0
    for kl in disc_sample(50):
        fc = fluxes_closed(kl)
        fq = fluxes_quadrature(solve_roll(kl), sys)
        a, b = fq.as_array(), fc.as_array()
        quad = max(quad, float(np.max(np.abs(a - b)) / max(1e-300, np.max(np.abs(b)))))
        sym = max(sym, abs(fq.Bl - fq.Ak))
    g = np.linspace(-1, 1, 200)
    K, L = np.meshgrid(g, g)
    inside = K * K + L * L < 1
    K, L = K[inside], L[inside]
    Bk, Al, Bl = 1 - 3 * K * K - L * L, 1 - K * K - 3 * L * L, -2 * K * L
    q2 = K * K + L * L
    fact = float(np.max(np.abs(Al * Bk - Bl * Bl - (1 - 3 * q2) * (1 - q2))))
    fact = max(fact, float(np.max(np.abs(delta_zz_closed(K, L) - (Al * Bk - Bl * Bl)))))
    d = {"quadrature_vs_closed": quad, "Bl_minus_Ak": sym, "delta_zz_factorization": fact}
    return quad < 1e-10 and sym < 1e-12 and fact < 1e-13, d


def gate_characteristics(sys=None):
    quad = vieta = 0.0
    for kl in annulus_sample(20):
        fd = fluxes_closed(kl)
        Cp, Cm = characteristics(fd)
        quad = max(quad, abs(characteristic_residual(fd, Cp)), abs(characteristic_residual(fd, Cm)))
        vieta = max(vieta, abs(Cp + Cm + (fd.Bl + fd.Ak) / fd.Al), abs(Cp * Cm - fd.Bk / fd.Al))
    st = solve_roll((0.8, 0.0))
    sys_ = build_rgl_system() if sys is None else sys
    L = assemble_L(st, sys_)
    obs = {}
    for name, C in zip(("plus", "minus"), characteristics(fluxes_closed((0.8, 0.0)))):
        for dc in (0.0, -0.1, 0.1):
            F = (sys_.J + (C + dc) * sys_.K) @ (st.Zk0 + (C + dc) * st.Zl0)
            obs[f"{name}{dc:+.1f}"] = abs(bordered_solve(L, F, st.Ztheta0)[1])
    at_root = max(obs["plus+0.0"], obs["minus+0.0"])
    off_root = min(v for key, v in obs.items() if not key.endswith("+0.0"))
    d = {"quadratic_residual": quad, "vieta": vieta, "obstruction_at_roots": at_root,
         "obstruction_off_roots_min": off_root}
    return quad < 1e-12 and vieta < 1e-12 and at_root < 1e-12 and off_root > 1e-3, d


def gate_chain(sys=None):
    res = xi3 = gauge = 0.0
    for kl in annulus_sample(20) + [(0.8, 0.0)]:
        st = solve_roll(kl)
        for br in ("plus", "minus"):
            cv = twisted_chain(st, br, sys)
            r = cv.residuals()
            res = max(res, r["xi3"], r["xi4"])
            diff = cv.xi3 - printed_xi3(st, cv.C)
            x1 = cv.xi1
            diff -= (diff @ x1) / (x1 @ x1) * x1
            xi3 = max(xi3, float(np.max(np.abs(diff))))
            base = (curlyK_chain(cv), cv.termination(), kappa_solvability(st, cv, sys))
            for shift in (0.37, -1.3):
                cv2 = with_xi3(cv, cv.xi3 + shift * x1)
                new = (curlyK_chain(cv2), cv2.termination(), kappa_solvability(st, cv2, sys))
                gauge = max(gauge, max(_rel(a, b, 1.0) for a, b in zip(new, base)))
    d = {"chain_residual": res, "xi3_vs_printed_mod_kernel": xi3, "gauge_variation": gauge}
    return res < 1e-10 and xi3 < 1e-10 and gauge < 1e-10, d


def gate_curlyK(sys=None):
    rel = 0.0
    for kl in annulus_sample(20):
        st = solve_roll(kl)
        for br in ("plus", "minus"):
            cv = twisted_chain(st, br, sys)
            rel = max(rel, _rel(curlyK_chain(cv), curlyK_closed(kl, cv.C)))
    worst, count = -np.inf, 0
    for k, l in dminus_polar_grid():
        st = solve_roll((k, l))
        for br in ("plus", "minus"):
            worst = max(worst, curlyK_chain(twisted_chain(st, br, sys)))
        count += 1
    spot = curlyK_chain(twisted_chain(solve_roll((0.8, 0.0)), "plus", sys))
    spot_err = abs(spot + 512 / 81)
    d = {"chain_vs_closed": rel, "max_curlyK_on_grid": float(worst), "grid_points": count,
         "spot_0.8_0_plus": spot, "spot_error": spot_err}
    return rel < 1e-10 and worst < 0 and spot_err < 1e-10, d


def gate_kappa(sys=None):
    rel, printed = 0.0, []
    for kl in annulus_sample(20, seed=SEED + 7):
        st = solve_roll(kl)
        for br in ("plus", "minus"):
            cv = twisted_chain(st, br, sys)
            kap = kappa_solvability(st, cv, sys)
            rel = max(rel, _rel(kap, kappa_flux(kl, cv.C)))
            printed.append(abs(kappa_printed(kl, cv.C) - kap))
    b = ccn_bundle((0.8, 0.0), "plus", sys)
    d = {"solvability_vs_flux": rel, "printed_discrepancy_max": max(printed),
         "printed_at_0.8_0_plus": b.checks["kappa_printed"], "kappa_at_0.8_0_plus": b.kappa}
    return rel < 1e-6, d


def gate_phi_xy(sys=None):
    ident = printed = 0.0
    for kl in annulus_sample(20) + [(0.8, 0.0), (0.6, 0.5)]:
        fd = fluxes_closed(kl)
        sigma = 2 * math.sqrt(-fd.delta_zz)
        for sign, C in zip((1, -1), characteristics(fd)):
            cxy = -(fd.Ak + fd.Bl + 2 * C * fd.Al)
            # the phi_XY coefficient is -(+/-) sigma on the +/- branch
            ident = max(ident, abs(cxy + sign * sigma))
            printed = max(printed, abs(cxy - phi_xy_printed(kl, C)))
    d = {"cxy_branch_identity": ident, "printed_form": printed}
    return ident < 1e-12 and printed < 1e-12, d


def gate_dispersion(sys=None):
    worst = 0.0
    for kl in annulus_sample(20):
        for direction in ((1.0, 0.0), (0.0, 1.0)):
            r = richardson_dispersion(kl, direction)
            p = cn_growth(kl, direction)
            worst = max(worst, abs(r - p) / max(abs(p), 1e-8))
    rep = zigzag_experiment((0.8, 0.0), modes=[(1, 0)], mu=0.05)
    d = {"richardson_vs_cn": worst, "rgl_measured_rate": rep.measured_rate,
         "sideband_rate": rep.predicted_rate, "rgl_rel_err": rep.relative_error}
    return worst < 0.01 and rep.relative_error < 0.10, d


def gate_regions(sys=None):
    rm = region_map(512)
    s = rm.summary()
    h = rm.cell
    ok = (abs(s["inner_radius"] - 1 / math.sqrt(3)) <= h and abs(s["outer_radius"] - 1) <= h
          and abs(s["D_minus_area_fraction"] - 2 / 3) <= 0.01)
    return ok, s


def gate_soliton(sys=None):
    b = ccn_bundle((0.8, 0.0), "plus", sys)
    coarse = build_soliton(b, 1.0, 256)
    fine = build_soliton(b, 1.0, 512)
    drop = coarse.ccn_residual / max(fine.ccn_residual, 1e-300)
    d = {"ode_residual": fine.ode_residual, "ccn_residual_256": coarse.ccn_residual,
         "ccn_residual_512": fine.ccn_residual, "refinement_drop": drop,
         "peak_error": fine.peak_error, "tail": fine.tail, "far_field": fine.q_far,
         "third_angle": fine.mapped.third_angle}
    ok = (fine.ode_residual < 1e-8 and fine.ccn_residual < 1e-6 and drop >= 100
          and fine.peak_error < 1e-12 and fine.tail < 1e-10)
    return ok, d


def _order(sols):
    e1 = np.max(np.abs(sols[0] - sols[1]))
    e2 = np.max(np.abs(sols[1] - sols[2]))
    return math.log2(e1 / e2)


def rgl_convergence_order(dt0=0.2, t_end=2.0):
    g = PeriodicGrid2D(32, 32, 2 * np.pi / 0.5, 2 * np.pi / 0.5)
    X, Y = g.mesh()
    psi0 = Field2D(g, 0.6 * np.exp(1j * 0.5 * X) * (1 + 0.2 * np.cos(0.5 * Y))
                   + 0.1 * np.exp(-1j * 0.5 * Y), "rgl_psi")
    sols = [rgl_evolve(psi0, StepperConfig(dt0 / 2**j, t_end)).values for j in range(3)]
    return _order(sols)


def ccn_convergence_order(dt0=0.01, t_end=2.0):
    """Measured where dt * max|linear rate| <= 0.5.  For larger steps the strongly
    damped modes are slaved to the forcing and Lawson RK4 drops to low order."""
    b = ccn_bundle((0.8, 0.0), "plus")
    L = 16 * np.pi
    g = PeriodicGrid2D(32, 32, L, L)
    X, Y = g.mesh()
    s = 2 * np.pi / L
    phi0 = Field2D(g, 0.5 * np.sin(s * (X + Y)) + 0.3 * np.cos(s * (2 * X - Y)), "ccn_phi")
    sols = [ccn_evolve(phi0, b, StepperConfig(dt0 / 2**j, t_end, m2_band=4)).values
            for j in range(3)]
    return _order(sols)


def roll_drift(kl=(0.6, 0.2), t_end=10.0):
    g = PeriodicGrid2D(32, 32, 2 * np.pi / 0.2, 2 * np.pi / 0.2)
    k, _ = g.snap_k(kl[0])
    l, _ = g.snap_l(kl[1])
    X, Y = g.mesh()
    psi0 = Field2D(g, math.sqrt(1 - k * k - l * l) * np.exp(1j * (k * X + l * Y)), "rgl_psi")
    psi = rgl_evolve(psi0, StepperConfig(0.02, t_end))
    return float(np.max(np.abs(psi.values - psi0.values))) / t_end


def ccn_linear_gap(t_end=1.0):
    b = dataclasses.replace(ccn_bundle((0.8, 0.0), "plus"), kappa=0.0)
    g = PeriodicGrid2D(64, 32, 4 * np.pi, 2 * np.pi)
    rng = np.random.default_rng(SEED)
    phi0 = Field2D(g, np.fft.ifft2(np.fft.fft2(rng.standard_normal((32, 64)))
                                   * g.dealias_mask(0.25)).real, "ccn_phi")
    num = ccn_evolve(phi0, b, StepperConfig(0.01, t_end))
    ex = ccn_linear_exact(phi0, b, num.t - phi0.t)
    return float(np.max(np.abs(num.values - ex.values)))


def gate_solvers(sys=None):
    d = {"rgl_order": rgl_convergence_order(), "ccn_order": ccn_convergence_order(),
         "roll_drift_per_time": roll_drift(), "ccn_linear_gap": ccn_linear_gap()}
    ok = (d["rgl_order"] > 3.9 and d["ccn_order"] > 3.9 and d["roll_drift_per_time"] < 1e-9
          and d["ccn_linear_gap"] < 1e-10)
    return ok, d


GATES = {
    1: ("structure", gate_structure),
    2: ("rolls", gate_rolls),
    3: ("fluxes", gate_fluxes),
    4: ("characteristics", gate_characteristics),
    5: ("jordan_chain", gate_chain),
    6: ("curlyK", gate_curlyK),
    7: ("kappa", gate_kappa),
    8: ("phi_xy", gate_phi_xy),
    9: ("dispersion", gate_dispersion),
    10: ("regions", gate_regions),
    11: ("soliton", gate_soliton),
    12: ("solvers", gate_solvers),
}

NOTES = {
    7: "printed kappa polynomial reported with its discrepancy; not a failure condition",
    8: "cxy = -(A_k + B_l + 2C A_l) = -sigma on the plus branch, +sigma on the minus branch",
}


def run_gate(number: int, sys=None) -> GateResult:
    name, fn = GATES[number]
    t0 = time.perf_counter()
    try:
        passed, details = fn(sys)
        notes = NOTES.get(number, "")
    except Exception as exc:  # a crashing gate is a failed gate
        passed, details, notes = False, {}, f"{type(exc).__name__}: {exc}"
    return GateResult(number, name, bool(passed), time.perf_counter() - t0, details, notes)


def run_validation(level: str = "quick", sys=None, gates=None, workers: int | None = None):
    if gates is None:
        gates = {"quick": QUICK_GATES, "full": FULL_GATES}[level]
    return pmap(lambda n: run_gate(n, sys), gates, workers)


def summary_lines(results) -> list[str]:
    out = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        out.append(f"[{status}] gate {r.number:2d} {r.name:<16s} {r.runtime:8.2f} s")
    return out


def write_junit(results, path, suite="ccn-lab-validate"):
    failures = sum(not r.passed for r in results)
    root = ET.Element("testsuite", name=suite, tests=str(len(results)), failures=str(failures),
                      time=f"{sum(r.runtime for r in results):.3f}")
    for r in results:
        case = ET.SubElement(root, "testcase", classname=suite,
                             name=f"gate_{r.number:02d}_{r.name}", time=f"{r.runtime:.3f}")
        text = "\n".join(f"{k} = {v!r}" for k, v in r.details.items())
        if not r.passed:
            ET.SubElement(case, "failure", message=r.notes or "gate failed").text = text
        else:
            ET.SubElement(case, "system-out").text = text
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)
    return path
