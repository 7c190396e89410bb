"""Evolution symbols a(xi) for constant-coefficient semigroups.

The catalogue provides smooth symbols of polynomial growth with nonnegative
real part: the heat and free-Schroedinger multipliers, transport, and
regularized half-wave / fractional-diffusion symbols whose homogeneous
profile is switched on outside a smooth radial cutoff.  Generators of
compound-Poisson processes are built from their jump distribution by
quadrature of the characteristic-exponent integral.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from .bases import CutoffSpec

__all__ = [
    "LevySpec",
    "Symbol",
    "asymptotic_limit",
    "levy_symbol",
    "make_symbol",
    "verify_symbol_order",
]


@dataclass(frozen=True)
class Symbol:
    """Fourier multiplier with order metadata.

    ``value`` maps points (shape (..., n), or bare arrays for n = 1) to
    complex numbers; ``order`` is the growth exponent q in
    |a(xi)| <= C (1 + |xi|)^q; ``re_nonneg`` asserts Re a >= 0.

    ``hom_profile`` optionally exposes the exact large-argument form
    a(xi) = coef * |xi|^order valid for |xi| >= hom_radius ("linear" marks
    the purely imaginary drift form i (v, xi)); alias sums and asymptotic
    limits use it when present.
    """

    n: int
    kind: str
    value: Callable = field(repr=False)
    order: float = 0.0
    re_nonneg: bool = True
    params: dict = field(default_factory=dict)
    a_inf: Optional[Callable] = field(repr=False, default=None)
    hom_profile: Optional[tuple] = None  # ("power", coef, radius) | ("linear", v)

    def __call__(self, xi):
        return self.value(xi)

    def to_json(self) -> str:
        return json.dumps({"kind": self.kind, "n": self.n, "params": self.params})

    @staticmethod
    def from_json(text: str) -> "Symbol":
        spec = json.loads(text)
        return make_symbol(spec["kind"], n=spec.get("n", 1), **spec.get("params", {}))


def _rad(xi, n):
    xi = np.asarray(xi, dtype=float)
    if n == 1:
        if xi.ndim >= 2 and xi.shape[-1] == 1:
            xi = xi[..., 0]
        return np.abs(xi), xi
    return np.sqrt(np.sum(xi * xi, axis=-1)), xi


def make_symbol(kind: str, n: int = 1, **params) -> Symbol:
    """Catalogue symbols.

    ``heat``            : |xi|^2
    ``transport``       : i (v, xi)            (params: v, scalar or vector)
    ``schrodinger``     : i |xi|^2
    ``halfwave_reg``    : i (1 - chi(|xi|)) |xi|        (cutoff inside r0)
    ``fractional_reg``  : (1 - chi(|xi|)) |xi|^{2s},  s in (0, 1)
    """
    if kind == "heat":

        def val(xi):
            r, _ = _rad(xi, n)
            return (r * r).astype(complex)

        return Symbol(
            n=n, kind=kind, value=val, order=2.0, re_nonneg=True,
            a_inf=lambda xi: _rad(xi, n)[0] ** 2 + 0j,
            hom_profile=("power", 1.0, 0.0),
        )
    if kind == "schrodinger":

        def val(xi):
            r, _ = _rad(xi, n)
            return 1j * r * r

        return Symbol(
            n=n, kind=kind, value=val, order=2.0, re_nonneg=True,
            a_inf=lambda xi: 1j * _rad(xi, n)[0] ** 2,
            hom_profile=("power", 1j, 0.0),
        )
    if kind == "transport":
        v = np.atleast_1d(np.asarray(params.get("v", 1.0), dtype=float))
        if n == 1:
            v = v[:1]
        if v.shape != (n,):
            raise ValueError("transport velocity must match the dimension")

        def val(xi, _v=v):
            xi = np.asarray(xi, dtype=float)
            if n == 1:
                return 1j * _v[0] * xi
            return 1j * np.sum(xi * _v, axis=-1)

        return Symbol(
            n=n, kind=kind, value=val, order=1.0, re_nonneg=True,
            params={"v": v.tolist()}, a_inf=val, hom_profile=("linear", v),
        )
    if kind in ("halfwave_reg", "fractional_reg"):
        cutoff = params.get("cutoff") or CutoffSpec(1.0, 2.0)
        if isinstance(cutoff, (tuple, list)):
            cutoff = CutoffSpec(*cutoff)
        if kind == "halfwave_reg":
            power, coef = 1.0, 1j
            meta = {"cutoff": [cutoff.r0, cutoff.r1]}
        else:
            s = float(params["s"])
            if not 0.0 < s < 1.0:
                raise ValueError("fractional order must satisfy 0 < s < 1")
            power, coef = 2.0 * s, 1.0
            meta = {"s": s, "cutoff": [cutoff.r0, cutoff.r1]}

        def val(xi, _p=power, _c=coef, _chi=cutoff):
            r, _ = _rad(xi, n)
            return _c * (1.0 - _chi(r)) * r**_p

        def limit(xi, _p=power, _c=coef):
            return _c * _rad(xi, n)[0] ** _p

        return Symbol(
            n=n, kind=kind, value=val, order=power, re_nonneg=True,
            params=meta, a_inf=limit, hom_profile=("power", coef, cutoff.r1),
        )
    raise ValueError(f"unknown symbol kind {kind!r}")


# ---------------------------------------------------------------------------
# Generators from jump processes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevySpec:
    """Drift / diffusion / finite jump measure triple (1-D quadrature path).

    The jump part must be a finite measure: ``intensity`` times a
    probability density ``jump_density``; singular jump densities are out of
    catalogue and enter only through user-supplied closed-form symbols.
    """

    drift: float = 0.0
    diffusion: float = 0.0  # variance coefficient (Sigma), >= 0
    intensity: float = 0.0
    jump_density: Optional[Callable] = None
    compensator_cutoff: Optional[CutoffSpec] = None
    support: float = 40.0

    def validate(self) -> float:
        """Checks integrability of the jump measure; returns its mass."""
        if self.diffusion < 0.0:
            raise ValueError("diffusion coefficient must be >= 0")
        if self.intensity == 0.0:
            return 0.0
        mass, _ = integrate.quad(self.jump_density, -self.support, self.support, limit=200)
        if not 0.5 < mass < 1.5:
            raise ValueError(f"jump density mass {mass:.3f} is not close to 1")
        return self.intensity * mass

    @staticmethod
    def from_json(text: str) -> "LevySpec":
        """Nested JSON form: drift/diffusion/intensity plus a jump block.

        Supported jump densities: {"kind": "gaussian", "sd": ...} and
        {"kind": "laplace", "scale": ...}.  The optional compensator block
        is [r0, r1].
        """
        spec = json.loads(text)
        jump = spec.get("jump")
        density = None
        if jump is not None:
            if jump["kind"] == "gaussian":
                sd = float(jump["sd"])
                density = lambda x: math.exp(-(x * x) / (2 * sd * sd)) / (
                    sd * math.sqrt(2 * math.pi)
                )
            elif jump["kind"] == "laplace":
                b = float(jump["scale"])
                density = lambda x: math.exp(-abs(x) / b) / (2 * b)
            else:
                raise ValueError(f"unknown jump density kind {jump['kind']!r}")
        cutoff = spec.get("compensator_cutoff")
        return LevySpec(
            drift=float(spec.get("drift", 0.0)),
            diffusion=float(spec.get("diffusion", 0.0)),
            intensity=float(spec.get("intensity", 0.0)),
            jump_density=density,
            compensator_cutoff=CutoffSpec(*cutoff) if cutoff else None,
        )


def levy_symbol(spec: LevySpec, params_tag: str = "levy") -> Symbol:
    """Negative characteristic exponent of the process as a Symbol.

    a(xi) = -[ i mu xi - (Sigma/2) xi^2
               + lambda int (e^{i x xi} - 1 - i x xi chi(x)) rho(x) dx ].
    """
    spec.validate()
    chi = spec.compensator_cutoff

    comp = 0.0
    if spec.intensity and chi is not None:
        comp, _ = integrate.quad(
            lambda x: x * chi(np.abs(np.atleast_1d(x)))[0] * spec.jump_density(x),
            -spec.support,
            spec.support,
            limit=200,
        )

    mass = 0.0
    if spec.intensity:
        mass, _ = integrate.quad(spec.jump_density, -spec.support, spec.support, limit=200)

    def char_integral(x_freq: float) -> complex:
        if x_freq == 0.0:
            return 0.0 + 0.0j
        # oscillatory-weight rule handles large frequencies gracefully
        re, _ = integrate.quad(
            spec.jump_density, -spec.support, spec.support,
            weight="cos", wvar=x_freq, limit=400,
        )
        im, _ = integrate.quad(
            spec.jump_density, -spec.support, spec.support,
            weight="sin", wvar=x_freq, limit=400,
        )
        return complex(re - mass, im)

    def val(xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        out = np.empty(xi.shape, dtype=complex)
        flat = xi.ravel()
        res = np.empty(flat.shape, dtype=complex)
        for i, x_freq in enumerate(flat):
            jump = spec.intensity * char_integral(x_freq) if spec.intensity else 0.0
            psi = (
                1j * spec.drift * x_freq
                - 0.5 * spec.diffusion * x_freq**2
                + jump
                - 1j * spec.intensity * comp * x_freq
            )
            res[i] = -psi
        out.ravel()[:] = res
        return out if xi.shape else complex(res[0])

    order = 2.0 if spec.diffusion > 0 else (1.0 if spec.drift else 0.0)
    a_inf = None
    if spec.diffusion > 0:
        a_inf = lambda xi: 0.5 * spec.diffusion * np.asarray(xi) ** 2 + 0j
    elif spec.drift == 0.0 and spec.intensity > 0:
        # jump transform vanishes at infinity (Riemann-Lebesgue)
        a_inf = lambda xi: spec.intensity * np.ones_like(np.asarray(xi, dtype=complex))
    return Symbol(
        n=1, kind=params_tag, value=val, order=order, re_nonneg=True,
        params={"intensity": spec.intensity, "diffusion": spec.diffusion},
        a_inf=a_inf,
    )


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------

def verify_symbol_order(symbol: Symbol, radii=None) -> dict:
    """Fit the growth exponent of |a| on large radii; check the alpha = 1 bound.

    Returns a dict with ``q_fit``, ``constant``, ``grad_constant`` and an
    ``unbounded`` flag when no power law fits.
    """
    n = symbol.n
    radii = np.geomspace(10.0, 1e5, 40) if radii is None else np.asarray(radii)
    pts = radii if n == 1 else _axis_pts(radii, n)
    vals = np.abs(np.asarray(symbol(pts)))
    logs = np.log1p(radii)
    positive = vals > 0
    if positive.sum() < 5:
        q_fit = 0.0
    else:
        q_fit = float(np.polyfit(logs[positive], np.log(vals[positive]), 1)[0])
    const = float(np.max(vals / (1.0 + radii) ** max(symbol.order, q_fit)))
    # alpha = 1: central difference along the first axis
    step = 1e-4
    if n == 1:
        grad = np.abs(np.asarray(symbol(radii + step)) - np.asarray(symbol(radii - step))) / (
            2 * step
        )
    else:
        e = np.zeros(n)
        e[0] = 1.0
        grad = np.abs(
            np.asarray(symbol(_axis_pts(radii, n) + step * e))
            - np.asarray(symbol(_axis_pts(radii, n) - step * e))
        ) / (2 * step)
    grad_const = float(np.max(grad / (1.0 + radii) ** symbol.order))
    resid = vals / (1.0 + radii) ** (q_fit + 1.0)
    unbounded = bool(np.any(~np.isfinite(vals))) or float(np.max(resid)) > 1e3
    return {
        "q_fit": q_fit,
        "constant": const,
        "grad_constant": grad_const,
        "unbounded": unbounded,
    }


def asymptotic_limit(symbol: Symbol, xi, m_range=(6, 16), rtol: float = 1e-6):
    """lim a(lambda xi) / lambda^q over the dyadic ladder, or None.

    Returns the extrapolated limit when the last ladder values are Cauchy
    within ``rtol`` (relative to the largest magnitude seen); "none" is a
    legitimate outcome, not an error.
    """
    xi = np.asarray(xi, dtype=float)
    lams = 2.0 ** np.arange(m_range[0], m_range[1] + 1)
    vals = np.array(
        [complex(np.asarray(symbol(lam * xi)).ravel()[0]) / lam**symbol.order for lam in lams]
    )
    scale = np.max(np.abs(vals))
    if scale == 0.0:
        return 0.0 + 0.0j
    tail = np.abs(np.diff(vals[-4:]))
    if np.all(tail <= rtol * scale):
        return complex(vals[-1])
    return None


def _axis_pts(radii, n):
    pts = np.zeros((len(radii), n))
    pts[:, 0] = radii
    return pts
