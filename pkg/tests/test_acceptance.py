"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; every tolerance is pinned here, nothing is deferred to calibration.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from gridrbf.bases import make_basis
from gridrbf.cardinal import cardinal_samples, fix_strang_fit, lagrange_symbol
from gridrbf.constants import heat_constants, interp_constants, symbol_constant, threshold_rho
from gridrbf.evolve import cross_validate, generator_stencil, initial_state, integrate_mol
from gridrbf.multiplier import defect_check, heat_excess, wiener_error_scheme
from gridrbf.spectral import interp_error_norm, make_density, weighted_l1_norm
from gridrbf.symbols import make_symbol

GAUSS = make_basis("gaussian", 1, c=1.0)
MQ = make_basis("multiquadric", 1, c=1.0)
MQ2 = make_basis("multiquadric", 2, c=1.0)
POLY = make_basis("polyharmonic", 1, p=3.0)
HEAT = make_symbol("heat")
GAUSS_DATA = make_density("gaussian")


def _verdict(num: int, label: str, ok: bool, detail: str = ""):
    state = "PASS" if ok else "FAIL"
    print(f"ACCEPTANCE {num:2d} [{state}] {label}" + (f"  ({detail})" if detail else ""))
    assert ok, f"criterion {num}: {label}: {detail}"


def test_criterion_01_cardinal_property():
    worst = {}
    for basis in (GAUSS, MQ, POLY):
        t0 = time.perf_counter()
        card = cardinal_samples(basis, R=12.0)
        elapsed = time.perf_counter() - t0
        vals = card.at_integers(10)
        target = np.zeros(21)
        target[10] = 1.0
        worst[basis.family] = (float(np.max(np.abs(vals - target))), elapsed)
    ok = all(err < 1e-8 and dt < 10.0 for err, dt in worst.values())
    detail = ", ".join(f"{k}: err {e:.1e} in {t:.1f}s" for k, (e, t) in worst.items())
    _verdict(1, "cardinal delta property |L1(j) - delta| < 1e-8, |j| <= 10", ok, detail)


def test_criterion_02_partition_of_unity():
    rng = np.random.default_rng(2024)
    worst = {}
    for basis, K in ((GAUSS, 4), (MQ, 10), (POLY, 400)):
        eta = rng.uniform(-math.pi, math.pi, size=1000)
        shifts = 2.0 * math.pi * np.arange(-K, K + 1)
        pts = (eta[:, None] + shifts[None, :]).ravel()
        vals = np.asarray(lagrange_symbol(basis, pts)).reshape(1000, -1)
        worst[basis.family] = float(np.max(np.abs(vals.sum(axis=1) - 1.0)))
    ok = all(v < 1e-9 for v in worst.values())
    detail = ", ".join(f"{k}: {v:.1e}" for k, v in worst.items())
    _verdict(2, "partition of unity |sum_k L1_hat(eta + 2 pi k) - 1| < 1e-9", ok, detail)


def test_criterion_03_fix_strang_orders():
    fits = {
        "multiquadric n=1 (2)": (fix_strang_fit(MQ).slope, 2.0),
        "multiquadric n=2 (3)": (fix_strang_fit(MQ2).slope, 3.0),
        "polyharmonic (4)": (fix_strang_fit(POLY).slope, 4.0),
    }
    ok = all(abs(got - want) < 0.1 for got, want in fits.values())
    detail = ", ".join(f"{k}: {got:.3f}" for k, (got, want) in fits.items())
    _verdict(3, "Fix-Strang vanishing order within 0.1 of kappa", ok, detail)


def test_criterion_04_interpolation_rates():
    hs = 2.0 ** -np.arange(2, 10)
    results = {}
    for basis, want in ((POLY, 4.0), (MQ, 2.0)):
        t0 = time.perf_counter()
        errs = [interp_error_norm(GAUSS_DATA, basis, h) for h in hs]
        slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
        results[basis.family] = (slope, want, time.perf_counter() - t0)
    ok = all(abs(s - w) < 0.2 and dt < 120.0 for s, w, dt in results.values())
    detail = ", ".join(f"{k}: rate {s:.3f} in {dt:.1f}s" for k, (s, w, dt) in results.items())
    _verdict(4, "interpolation Wiener rates 4 +/- 0.2 and 2 +/- 0.2", ok, detail)


def test_criterion_05_exact_interpolation_limit():
    predicted = interp_constants(POLY)["l_upper"] * weighted_l1_norm(GAUSS_DATA, ("hom", 4.0))
    ratios = []
    for h in (2.0**-8, 2.0**-9):
        err = interp_error_norm(GAUSS_DATA, POLY, h)
        ratios.append(err * h**-4.0 / predicted)
    ok = all(abs(r - 1.0) < 0.05 for r in ratios)
    _verdict(
        5, "h^-kappa error within 5% of l_kappa * ||f||_kappa at two finest h",
        ok, f"ratios {ratios[0]:.4f}, {ratios[1]:.4f}",
    )


def test_criterion_06_reduced_rate_law():
    slopes = {}
    for r in (1, 2, 3):
        data = make_density("algebraic", m=(r + 1.25) / 2.0)
        hs = 2.0 ** -np.arange(3, 9)
        errs = [interp_error_norm(data, POLY, h) for h in hs]
        slopes[r] = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
    ok = all(abs(slopes[r] - r) < 0.3 for r in slopes)
    detail = ", ".join(f"r={r}: {s:.3f}" for r, s in slopes.items())
    _verdict(6, "reduced rates r +/- 0.3 for slowly decaying data", ok, detail)


def test_criterion_07_heat_scheme_rates():
    hs1 = 2.0 ** -np.arange(2, 9)
    t0 = time.perf_counter()
    errs1 = [wiener_error_scheme(GAUSS_DATA, POLY, HEAT, h, 1.0) for h in hs1]
    slope1 = float(np.polyfit(np.log(hs1), np.log(errs1), 1)[0])
    dt1 = time.perf_counter() - t0

    data2 = make_density("gaussian", n=2)
    heat2 = make_symbol("heat", n=2)
    hs2 = 2.0 ** -np.arange(1, 7)
    t0 = time.perf_counter()
    errs2 = [wiener_error_scheme(data2, MQ2, heat2, h, 1.0) for h in hs2]
    slope2 = float(np.polyfit(np.log(hs2), np.log(errs2), 1)[0])
    dt2 = time.perf_counter() - t0
    ok = abs(slope1 - 2.0) < 0.2 and abs(slope2 - 1.0) < 0.2 and dt2 < 300.0
    _verdict(
        7, "heat-scheme rates kappa - 2 (1-D: 2, 2-D multiquadric: 1)",
        ok, f"rates {slope1:.3f}, {slope2:.3f}; n=2 in {dt2:.0f}s",
    )


def test_criterion_08_heat_exact_limit():
    # closed zeta(2) oracle: g = 2 zeta(2) / (2 pi)^2 = 1/12 for |eta|^-4
    g_oracle = 2.0 * (math.pi**2 / 6.0) / (2.0 * math.pi) ** 2
    assert g_oracle == pytest.approx(1.0 / 12.0, rel=1e-15)
    t = 1.0
    weight, _ = integrate.quad(lambda x: x**4 * math.exp(-2.0 * x * x), -np.inf, np.inf)
    predicted = g_oracle * t * weight
    h = 2.0**-8
    err = wiener_error_scheme(GAUSS_DATA, POLY, HEAT, h, t)
    ratio = err * h**-2.0 / predicted
    _verdict(8, "heat limit h^-2 error within 5% of g * t * integral", abs(ratio - 1.0) < 0.05,
             f"ratio {ratio:.4f}")


def test_criterion_09_kappa2_saturation_bracket():
    t = 1.0
    hs = 2.0 ** -np.arange(3, 10)
    errs = [wiener_error_scheme(GAUSS_DATA, MQ, HEAT, h, t) for h in hs]
    monotone = all(e2 <= e1 * (1.0 + 1e-9) for e1, e2 in zip(errs, errs[1:]))
    hc = heat_constants(MQ)

    def envelope(g):
        val, _ = integrate.quad(
            lambda x: -math.expm1(-g * t * x * x) * math.exp(-2.0 * t * x * x),
            -np.inf, np.inf,
        )
        return val

    lo, hi = envelope(hc["g_lower"]), envelope(hc["g_upper"])
    plateau = float(np.mean(errs[-3:]))
    ok = monotone and (0.9 * lo <= plateau <= 1.1 * hi)
    _verdict(
        9, "kappa = 2 heat error saturates inside the [g_lower, g_upper] envelope",
        ok, f"plateau {plateau:.3e} in [{lo:.3e}, {hi:.3e}], monotone {monotone}",
    )


def test_criterion_10_gaussian_interpolation_plateau():
    hs = 2.0 ** -np.arange(1, 10)
    wiener = weighted_l1_norm(GAUSS_DATA)
    plateaus, orders_ok = {}, {}
    for c in (1.0, 1.5, 2.0):
        basis = make_basis("gaussian", 1, c=c)
        errs = np.array([interp_error_norm(GAUSS_DATA, basis, h) for h in hs])
        pred = interp_constants(basis)["l_upper"] * wiener
        plateaus[c] = (float(np.mean(errs[-3:])), pred)
        pair = np.diff(np.log(errs)) / np.diff(np.log(hs))
        orders_ok[c] = float(np.max(pair))
    within2 = all(0.5 <= meas / pred <= 2.0 for meas, pred in plateaus.values())
    ratio_ok = True
    for c1, c2 in ((1.0, 1.5), (1.5, 2.0)):
        measured = plateaus[c2][0] / plateaus[c1][0]
        law = math.exp(-4.0 * math.pi**2 * (c2**2 - c1**2))
        ratio_ok &= 1.0 / 3.0 <= measured / law <= 3.0
    slopes_ok = all(v >= 4.0 for v in orders_ok.values())
    ok = within2 and ratio_ok and slopes_ok
    detail = "; ".join(
        f"c={c}: plateau {m:.2e} vs {p:.2e}, max order {orders_ok[c]:.1f}"
        for c, (m, p) in plateaus.items()
    )
    _verdict(10, "flat-gaussian saturation levels, ratios and apparent order", ok, detail)


def test_criterion_11_scheme_plateau_shape_sweep():
    t = 1.0
    hs = 2.0 ** -np.arange(4, 10)
    plateaus = {}
    for c in (1.0, 2.0, 4.0):
        basis = make_basis("multiquadric", 1, c=c)
        errs = [wiener_error_scheme(GAUSS_DATA, basis, HEAT, h, t) for h in hs]
        plateaus[c] = float(np.mean(errs[-3:]))
    decreasing = plateaus[1.0] > plateaus[2.0] > plateaus[4.0]
    big_drop = plateaus[1.0] / plateaus[4.0] >= 10.0
    ok = decreasing and big_drop
    detail = ", ".join(f"c={c}: {p:.2e}" for c, p in plateaus.items())
    _verdict(11, "heat plateau decreases with the shape parameter (>= 10x over c: 1 -> 4)",
             ok, detail)


def test_criterion_12_defect_bound_uniformity():
    hs = 2.0 ** -np.arange(3, 9)
    spreads = {
        "heat": defect_check(POLY, HEAT, hs)["spread"],
        "fractional s=0.75": defect_check(POLY, make_symbol("fractional_reg", s=0.75), hs)[
            "spread"
        ],
    }
    ok = all(v < 2.0 for v in spreads.values())
    detail = ", ".join(f"{k}: spread {v:.3f}" for k, v in spreads.items())
    _verdict(12, "normalized multiplier defect uniform over the h-ladder (< 2x)", ok, detail)


def test_criterion_13_exact_symbol_limits():
    t = 1.0
    frac = make_symbol("fractional_reg", s=0.75)
    g_a = symbol_constant(POLY, frac)

    def re_a(x):
        return float(np.asarray(frac(np.array([abs(x)])))[0].real)

    weight, _ = integrate.quad(
        lambda x: abs(x) ** 4 * math.exp(-x * x) * math.exp(-t * re_a(x)), -14, 14, limit=400
    )
    predicted = abs(g_a) * t * weight
    h = 2.0**-8
    err = wiener_error_scheme(GAUSS_DATA, POLY, frac, h, t)
    ratio = err * h ** -(POLY.kappa - frac.order) / predicted

    transport = make_symbol("transport", v=1.0)
    hs = 2.0 ** -np.arange(3, 9)
    errs_t = [wiener_error_scheme(GAUSS_DATA, POLY, transport, h_, t) for h_ in hs]
    slope_t = float(np.polyfit(np.log(hs), np.log(errs_t), 1)[0])
    ok = abs(ratio - 1.0) < 0.10 and slope_t > POLY.kappa - 1.0
    _verdict(
        13, "fractional limit within 10%; transport order beats kappa - 1",
        ok, f"ratio {ratio:.4f}, transport order {slope_t:.2f}",
    )


def test_criterion_14_cross_path_validation():
    reports = {}
    for name, sym in (("heat", HEAT), ("transport", make_symbol("transport", v=1.0))):
        reports[name] = cross_validate(GAUSS_DATA, MQ, sym, h=0.25, J=64, T=0.5, budget=1e-4)
    h = 0.25
    stencil = generator_stencil(MQ, HEAT, h=h, J_s=64)
    state = initial_state(GAUSS_DATA.spatial, h, 64)
    ref = integrate_mol(state, stencil, 0.5, "exponential")
    dts = np.array([0.008, 0.004, 0.002])
    errs = [
        float(np.max(np.abs(integrate_mol(state, stencil, 0.5, "rk4", dt=dt).coeffs - ref.coeffs)))
        for dt in dts
    ]
    order = float(np.polyfit(np.log(dts), np.log(errs), 1)[0])
    ok = all(r["discrepancy"] < 1e-4 for r in reports.values()) and abs(order - 4.0) < 0.3
    detail = (
        f"heat {reports['heat']['discrepancy']:.1e}, "
        f"transport {reports['transport']['discrepancy']:.1e}, rk4 order {order:.2f}"
    )
    _verdict(14, "time-domain and spectral paths agree at nodes; rk4 is 4th order", ok, detail)


def test_criterion_15_constants_self_consistency():
    checks = {}
    for basis in (POLY, MQ):
        limit_fit = fix_strang_fit(basis).limit_constant
        formula = interp_constants(basis)["l_upper"]
        checks[f"l ({basis.family})"] = abs(limit_fit / formula - 1.0)
        lad = 2.0 ** -np.arange(9, 12)
        empirical_g = float((np.asarray(heat_excess(basis, lad)) / lad**basis.kappa)[-1])
        checks[f"g ({basis.family})"] = abs(empirical_g / heat_constants(basis)["g_upper"] - 1.0)
    formula_ok = all(v < 0.05 for v in checks.values())

    slopes = {}
    for fam, cs, want in (
        ("gaussian", np.array([1.0, 1.4, 2.0, 2.8]), -2.0),
        ("multiquadric", np.array([1.0, 2.0, 4.0, 8.0]), -1.0),
    ):
        rhos = [threshold_rho(make_basis(fam, 1, c=c), 0.5)["rho"] for c in cs]
        slopes[fam] = (float(np.polyfit(np.log(cs), np.log(rhos), 1)[0]), want)
    rho_ok = all(abs(got - want) <= 0.3 for got, want in slopes.values())
    ok = formula_ok and rho_ok
    detail = (
        ", ".join(f"{k}: {v:.3%}" for k, v in checks.items())
        + "; "
        + ", ".join(f"rho({k}) ~ c^{got:.2f}" for k, (got, want) in slopes.items())
    )
    _verdict(15, "formula constants match empirical fits (5%); rho shape laws", ok, detail)
