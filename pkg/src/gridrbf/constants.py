"""Closed-form error constants of the lattice interpolation scheme.

All saturation and exact-rate constants reduce to weighted lattice sums of
``phi_hat`` over the dual lattice ``2 pi Z^n`` divided by the limit
amplitude of ``|eta|^kappa phi_hat(eta)`` at the origin:

    interpolation:  l = (2/A) sum_{k != 0} phi_hat(2 pi k)
    heat scheme:    g = (1/A) sum_{k != 0} |2 pi k|^2 phi_hat(2 pi k)
    general symbol: g_a = (1/A) sum_{k != 0} a_inf(2 pi k) phi_hat(2 pi k)

with the kappa = 0 interpolation case using A + R(0) in the denominator.
The admissible-range threshold rho(eps) quantifies how far from the origin
the symbol defect stays within (1 + eps) of its limit, and carries the
basis shape-parameter laws.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from typing import Optional, Sequence

import numpy as np
from scipy import special

from .bases import BasisFunction
from .symbols import Symbol, asymptotic_limit
from . import cardinal

__all__ = [
    "ConstantsReport",
    "heat_constants",
    "interp_constants",
    "limit_amplitudes",
    "polynomial_symbol_constants",
    "shape_sweep",
    "symbol_constant",
    "threshold_rho",
]


# ---------------------------------------------------------------------------
# Dual-lattice sums
# ---------------------------------------------------------------------------

def dual_lattice_sum(basis: BasisFunction, weight_power: float = 0.0, tol: float = 1e-14) -> float:
    """sum_{k != 0} |2 pi k|^w phi_hat(2 pi k) with controlled truncation."""
    if basis.decay_n <= basis.n + weight_power:
        raise ValueError("dual lattice sum diverges: decay exponent too small")
    if basis.family == "polyharmonic" and basis.n == 1:
        s = basis.n + basis.p - weight_power
        return 2.0 * basis.amplitude * (2.0 * math.pi) ** (-s) * float(special.zeta(s, 1.0))
    K = basis.alias_truncation(tol, weight_power=weight_power)
    offs = cardinal._offsets(basis.n, max(K, 8))
    r = 2.0 * math.pi * np.sqrt(np.sum(offs * offs, axis=-1))
    total = float(np.sum(r**weight_power * basis.fourier_radial(r)))
    if basis.family == "polyharmonic":
        total += basis.alias_tail_bound(max(K, 8), weight_power) * 0.5  # midpoint of [0, bound]
    return total


def dual_lattice_symbol_sum(basis: BasisFunction, a_inf, tol: float = 1e-14) -> complex:
    """sum_{k != 0} a_inf(2 pi k) phi_hat(2 pi k) for a homogeneous profile.

    For the slowly decaying homogeneous basis the truncated sum is completed
    by an integral-comparison tail using the numerically probed degree of
    the profile.
    """
    K = basis.alias_truncation(tol, weight_power=0.0) if basis.family != "polyharmonic" else 400
    offs = cardinal._offsets(basis.n, max(K, 8))
    pts = 2.0 * math.pi * offs
    r = np.sqrt(np.sum(pts * pts, axis=-1))
    avals = np.asarray(a_inf(pts[:, 0] if basis.n == 1 else pts))
    total = complex(np.sum(avals * basis.fourier_radial(r)))
    if basis.family == "polyharmonic" and basis.n == 1:
        probe = np.array([1e3, 2e3])
        a_probe = np.asarray(a_inf(probe))
        with np.errstate(divide="ignore"):
            mags = np.abs(a_probe)
        if mags[0] > 0 and mags[1] > 0:
            deg = math.log(mags[1] / mags[0]) / math.log(2.0)
            coef = complex(a_probe[1]) / probe[1] ** deg
            s_eff = basis.n + basis.p - deg
            if s_eff > 1.0:
                Keff = max(K, 8)
                # even completion; odd profiles cancel pairwise anyway
                tail = (
                    2.0
                    * coef
                    * basis.amplitude
                    * (2.0 * math.pi) ** -s_eff
                    * (Keff + 0.5) ** (1.0 - s_eff)
                    / (s_eff - 1.0)
                )
                if abs(complex(a_inf(np.array([-probe[0]]))[0]) - complex(a_probe[0])) < 1e-9 * mags[0]:
                    total += tail
    return total


# ---------------------------------------------------------------------------
# Limit amplitudes
# ---------------------------------------------------------------------------

def limit_amplitudes(basis: BasisFunction, m_range=(6, 16), rtol: float = 1e-4) -> tuple:
    """(A_lower, A_upper): lim inf/sup of |eta|^kappa phi_hat along eta -> 0.

    Extrapolated on dyadic radial ladders over a direction sample (axes and
    the main diagonal); radial transforms are detected and use one
    direction.  Raises if the ladder has not settled.
    """
    m = np.arange(m_range[0], m_range[1] + 1, dtype=float)
    radii = 2.0**-m
    dirs = [np.eye(basis.n)[i] for i in range(basis.n)]
    if basis.n > 1:
        dirs.append(np.ones(basis.n) / math.sqrt(basis.n))
    # radiality probe: two directions at a fixed radius
    if basis.n > 1:
        v1 = float(basis.fourier(0.3 * dirs[0]))
        v2 = float(basis.fourier(0.3 * dirs[-1]))
        if abs(v1 - v2) <= 1e-12 * abs(v1):
            dirs = dirs[:1]
    limits = []
    for d in dirs:
        pts = radii[:, None] * d[None, :]
        vals = radii**basis.kappa * np.asarray(
            basis.fourier(pts if basis.n > 1 else pts[:, 0])
        )
        if abs(vals[-1] - vals[-2]) > rtol * abs(vals[-1]):
            raise ValueError("limit amplitude has not converged on the ladder")
        limits.append(float(vals[-1]))
    return min(limits), max(limits)


# ---------------------------------------------------------------------------
# Interpolation / scheme constants
# ---------------------------------------------------------------------------

def interp_constants(basis: BasisFunction, q_list: Sequence[float] = ()) -> dict:
    """Saturation constants of stationary interpolation.

    Returns l_upper/l_lower (and the q-weighted variants ``l_q`` used by
    the rough scheme estimates).  For kappa = 0 the denominators carry the
    extra alias mass R(0).
    """
    a_lo, a_hi = limit_amplitudes(basis)
    R0 = dual_lattice_sum(basis, 0.0)
    if basis.kappa > 0.0:
        l_up, l_lo = 2.0 * R0 / a_lo, 2.0 * R0 / a_hi
    else:
        l_up = 2.0 * R0 / (a_lo + R0)
        l_lo = 2.0 * R0 / (a_hi + R0)
    l_q = {}
    for q in q_list:
        if basis.decay_n <= basis.n + q:
            raise ValueError(f"l_q diverges for q = {q}")
        l_q[float(q)] = (R0 + dual_lattice_sum(basis, float(q))) / a_lo
    return {
        "a_lower": a_lo,
        "a_upper": a_hi,
        "alias_mass": R0,
        "l_upper": l_up,
        "l_lower": l_lo,
        "l_q": l_q,
    }


def heat_constants(basis: BasisFunction) -> dict:
    """g_upper/g_lower controlling the heat-scheme saturation."""
    if basis.decay_n <= basis.n + 2:
        raise ValueError("heat constants need decay exponent > n + 2")
    a_lo, a_hi = limit_amplitudes(basis)
    S2 = dual_lattice_sum(basis, 2.0)
    return {"g_upper": S2 / a_lo, "g_lower": S2 / a_hi}


def symbol_constant(basis: BasisFunction, symbol: Symbol) -> complex:
    """Exact-rate constant g_a = A^{-1} sum_{k != 0} a_inf(2 pi k) phi_hat(2 pi k).

    Requires the asymptotic profile of the symbol; refuses when the dyadic
    extrapolation reports none.
    """
    a_lo_, a_hi_ = limit_amplitudes(basis)
    A_ = 0.5 * (a_lo_ + a_hi_)
    if symbol.hom_profile is not None:
        kind = symbol.hom_profile[0]
        if kind == "power":
            coef = symbol.hom_profile[1]
            return coef * dual_lattice_sum(basis, symbol.order) / A_
        if kind == "linear":
            # odd profile against an even transform: exact pairwise cancellation
            return 0.0 + 0.0j
    a_inf = symbol.a_inf
    if a_inf is None:
        probe = asymptotic_limit(symbol, np.ones(symbol.n) if symbol.n > 1 else 1.0)
        if probe is None:
            raise ValueError("symbol has no asymptotic profile; g_a undefined")

        def a_inf(xi, _s=symbol):
            xi = np.asarray(xi, dtype=float)
            flat = xi.reshape(-1) if _s.n == 1 else xi.reshape(-1, _s.n)
            out = np.array([asymptotic_limit(_s, p) for p in flat], dtype=complex)
            return out.reshape(xi.shape if _s.n == 1 else xi.shape[:-1])

    a_lo, a_hi = limit_amplitudes(basis)
    total = dual_lattice_symbol_sum(basis, a_inf)
    return total / (0.5 * (a_lo + a_hi))


def polynomial_symbol_constants(basis: BasisFunction, parts: Sequence) -> list:
    """Per-homogeneous-degree constants for a differential-operator symbol.

    ``parts`` lists the homogeneous components (callables), highest degree
    first; the degree-0 part contributes nothing (its scheme multiplier is
    itself).
    """
    out = []
    a_lo, a_hi = limit_amplitudes(basis)
    A = 0.5 * (a_lo + a_hi)
    for part in parts:
        out.append(dual_lattice_symbol_sum(basis, part) / A)
    return out


# ---------------------------------------------------------------------------
# Shape-parameter thresholds
# ---------------------------------------------------------------------------

def seminorm_p_r(basis: BasisFunction, r: float, shells: int = 40, samples: int = 33) -> float:
    """p_r = sum_{k != 0} sup_{|eta| <= r} |grad phi_hat(eta + 2 pi k)|.

    The sup over each ball is taken on a 33^n sample (a documented lower
    bound of the true sup); shells are added until they stop contributing.
    """
    if basis.n != 1:
        raise NotImplementedError("threshold analysis is 1-D")
    grid = np.linspace(-r, r, samples)
    total = 0.0
    for mshell in range(1, shells + 1):
        shell = 0.0
        for sgn in (-1.0, 1.0):
            pts = np.abs(grid + sgn * 2.0 * math.pi * mshell)
            shell += float(np.max(np.abs(basis.fourier_radial_grad(pts))))
        total += shell
        if shell < 1e-16 * total:
            break
    return total


def threshold_rho(
    basis: BasisFunction,
    eps: float = 0.5,
    r: Optional[float] = None,
) -> dict:
    """Admissibility radius rho(eps) = min(rho_1, rho_2) for one basis.

    rho_2 is the largest radius on which |eta|^kappa phi_hat stays within
    (1 - eps) of its limit amplitude; rho_1 = min(r, eps R(0) / p_r) keeps
    the alias mass within (1 + eps) of R(0).  With ``r=None`` the free
    parameter is optimized over a dyadic grid (a fixed r underestimates
    rho badly for sharply localized transforms); pass ``r = pi`` for the
    plain single-radius bound.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    a_lo, _ = limit_amplitudes(basis)
    rad = np.geomspace(1e-6, math.pi, 4096)
    vals = rad**basis.kappa * np.asarray(basis.fourier_radial(rad))
    bad = vals < (1.0 - eps) * a_lo
    rho2 = math.pi if not np.any(bad) else float(rad[np.argmax(bad)])
    R0 = dual_lattice_sum(basis, 0.0)
    r_grid = [r] if r is not None else list(math.pi * 2.0 ** -np.arange(0, 18, dtype=float))
    best_rho1 = 0.0
    best = None
    for r_try in r_grid:
        p_r = seminorm_p_r(basis, r_try)
        rho1 = min(r_try, eps * R0 / p_r) if p_r > 0 else r_try
        if rho1 > best_rho1:
            best_rho1 = rho1
            best = (r_try, p_r)
    return {
        "rho": min(best_rho1, rho2),
        "rho1": best_rho1,
        "rho2": rho2,
        "r_used": best[0],
        "p_r": best[1],
        "eps": eps,
    }


# ---------------------------------------------------------------------------
# Reports and sweeps
# ---------------------------------------------------------------------------

@dataclass
class ConstantsReport:
    """All closed-form constants for one basis (and optional symbol)."""

    basis_family: str
    n: int
    c: float
    p: float
    kappa: float
    a_lower: float
    a_upper: float
    alias_mass: float
    l_upper: float
    l_lower: float
    g_upper: Optional[float] = None
    g_lower: Optional[float] = None
    l_q: dict = field(default_factory=dict)
    g_symbol: dict = field(default_factory=dict)
    rho: Optional[float] = None
    rho1: Optional[float] = None
    rho2: Optional[float] = None
    p_r: Optional[float] = None
    tail_tol: float = 1e-14

    def validate(self):
        assert self.l_lower <= self.l_upper * (1 + 1e-12)
        assert self.l_lower >= 0 and self.l_upper >= 0
        if self.g_upper is not None:
            assert self.g_lower <= self.g_upper * (1 + 1e-12)
            assert self.g_upper >= self.l_upper  # termwise |2 pi k|^2 >= 4 pi^2 > 2

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    def to_csv_row(self) -> dict:
        row = asdict(self)
        row.pop("l_q")
        row.pop("g_symbol")
        return row


def constants_report(
    basis: BasisFunction,
    symbol: Optional[Symbol] = None,
    q_list: Sequence[float] = (),
    with_rho: bool = False,
    eps: float = 0.5,
) -> ConstantsReport:
    base = interp_constants(basis, q_list)
    rep = ConstantsReport(
        basis_family=basis.family,
        n=basis.n,
        c=basis.c,
        p=basis.p,
        kappa=basis.kappa,
        **{k: base[k] for k in ("a_lower", "a_upper", "alias_mass", "l_upper", "l_lower")},
        l_q=base["l_q"],
    )
    if basis.decay_n > basis.n + 2:
        rep.g_upper = heat_constants(basis)["g_upper"]
        rep.g_lower = heat_constants(basis)["g_lower"]
    if symbol is not None:
        g = symbol_constant(basis, symbol)
        rep.g_symbol[symbol.kind] = [g.real, g.imag]
    if with_rho and basis.n == 1:
        rho = threshold_rho(basis, eps)
        rep.rho, rep.rho1, rep.rho2, rep.p_r = (
            rho["rho"], rho["rho1"], rho["rho2"], rho["p_r"],
        )
    rep.validate()
    return rep


def shape_sweep(
    family: str,
    n: int,
    c_list: Sequence[float],
    p: float = 0.0,
    q_list: Sequence[float] = (),
    with_rho: bool = False,
) -> list:
    """Constants across a shape-parameter sweep (one report per c)."""
    from .bases import make_basis

    out = []
    for c in c_list:
        kw = {"c": float(c)}
        if family == "polyharmonic":
            kw["p"] = p
        out.append(constants_report(make_basis(family, n, **kw), q_list=q_list, with_rho=with_rho))
    return out
