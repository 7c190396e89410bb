"""Catalogue of lattice-admissible radial basis functions.

Each basis function is represented primarily through its Fourier transform
``phi_hat``, which must be strictly positive away from the origin, have an
elliptic power singularity ``|eta|^{-kappa}`` at the origin, and decay at
infinity fast enough for lattice periodization to converge.  The catalogue
ships Gaussians, Hardy multiquadrics and polyharmonic (homogeneous) bases
with exact transforms.

The Fourier convention throughout the package is

    f_hat(xi) = integral f(x) exp(-i (x, xi)) dx.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special

__all__ = [
    "BasisFunction",
    "CutoffSpec",
    "MembershipReport",
    "make_basis",
    "modified_bessel_k",
    "verify_membership",
]

_EULER_GAMMA = 0.5772156649015328606

FAMILIES = ("gaussian", "multiquadric", "polyharmonic")


# ---------------------------------------------------------------------------
# Modified Bessel function of the second kind (MacDonald function)
# ---------------------------------------------------------------------------

def _bessel_i_series(n: int, x: float) -> float:
    # Power series for I_n, adequate for x <= 2.5 (converges for all x).
    half = 0.5 * x
    term = half**n / math.factorial(n)
    total = term
    for m in range(1, 40):
        term *= half * half / (m * (m + n))
        total += term
        if term < 1e-18 * total:
            break
    return total


def _bessel_k01_series(x: float) -> tuple[float, float]:
    """K_0(x), K_1(x) by the ascending series with logarithmic part, x <= 2."""
    half = 0.5 * x
    lh = math.log(half)
    # K_0 = -(log(x/2) + gamma) I_0 + sum_{m>=1} (x^2/4)^m / (m!)^2 * H_m
    i0 = _bessel_i_series(0, x)
    z = half * half
    term = 1.0
    harmonic = 0.0
    s0 = 0.0
    for m in range(1, 40):
        term *= z / (m * m)
        harmonic += 1.0 / m
        s0 += term * harmonic
        if term * harmonic < 1e-18 * max(s0, 1e-300):
            break
    k0 = -(lh + _EULER_GAMMA) * i0 + s0
    # K_1 = 1/x + log(x/2) I_1 - (x/4) sum_m (psi(m+1)+psi(m+2)) / (m!(m+1)!) z^m
    i1 = _bessel_i_series(1, x)
    term = 1.0
    psi1 = -_EULER_GAMMA
    psi2 = 1.0 - _EULER_GAMMA
    s1 = psi1 + psi2
    for m in range(1, 40):
        term *= z / (m * (m + 1))
        psi1 += 1.0 / m
        psi2 += 1.0 / (m + 1)
        s1 += term * (psi1 + psi2)
        if abs(term * (psi1 + psi2)) < 1e-18 * abs(s1):
            break
    k1 = 1.0 / x + lh * i1 - 0.25 * x * s1
    return k0, k1


def _bessel_k01_cf(x: float) -> tuple[float, float]:
    """K_0(x), K_1(x) by the Thompson-Barnett continued fraction, x >= 2.

    This is the convergent completion of the large-argument expansion; the
    truncated asymptotic series alone stalls near 1e-6 relative error for
    moderate x, which is not good enough here.
    """
    mu2 = 0.0  # integer orders are reached from order 0
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1 = 0.0
    q2 = 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, 600):
        a -= 2.0 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < 1e-17:
            break
    h = a1 * h
    k0 = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    k1 = k0 * (x + 0.5 - h) / x
    return k0, k1


def modified_bessel_k(nu: float, x: float) -> float:
    """MacDonald function K_nu(x) for the orders used by the catalogue.

    Parameters
    ----------
    nu : float
        Order, one of 1/2, 1, 3/2, 2, 5/2.
    x : float
        Positive argument.

    Returns
    -------
    float
        K_nu(x) to about 1e-10 relative accuracy or better.

    Raises
    ------
    ValueError
        If ``x <= 0`` or the order is unsupported.
    """
    if x <= 0.0:
        raise ValueError(f"modified_bessel_k requires x > 0, got {x}")
    two_nu = round(2.0 * nu)
    if abs(2.0 * nu - two_nu) > 1e-12 or two_nu not in (1, 2, 3, 4, 5):
        raise ValueError(f"unsupported order nu={nu}")
    pref = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
    if two_nu == 1:
        return pref
    if two_nu == 3:
        return pref * (1.0 + 1.0 / x)
    if two_nu == 5:
        return pref * (1.0 + 3.0 / x + 3.0 / (x * x))
    if x < 2.0:
        k0, k1 = _bessel_k01_series(x)
    else:
        k0, k1 = _bessel_k01_cf(x)
    if two_nu == 2:
        return k1
    return k0 + 2.0 * k1 / x  # upward recurrence K_2 = K_0 + (2/x) K_1


# ---------------------------------------------------------------------------
# Smooth radial cutoff
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CutoffSpec:
    """Radial cutoff equal to 1 inside ``r0``, 0 outside ``r1``.

    The transition uses the bump profile exp(1 - 1/(1 - s^2)) with
    s = (r - r0)/(r1 - r0); it is smooth on the open transition interval
    and C^1 at the inner edge.
    """

    r0: float = 1.0
    r1: float = 2.0

    def __post_init__(self):
        if not (0.0 < self.r0 < self.r1):
            raise ValueError(f"need 0 < r0 < r1, got ({self.r0}, {self.r1})")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        s = (r - self.r0) / (self.r1 - self.r0)
        out = np.ones_like(r)
        out[s >= 1.0] = 0.0
        mid = (s > 0.0) & (s < 1.0)
        sm = s[mid]
        out[mid] = np.exp(1.0 - 1.0 / (1.0 - sm * sm))
        return out


# ---------------------------------------------------------------------------
# Basis functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisFunction:
    """Radial basis function given through its Fourier transform.

    Attributes
    ----------
    n : int
        Spatial dimension.
    family : str
        One of ``gaussian``, ``multiquadric``, ``polyharmonic``.
    c : float
        Shape parameter (dilation ``x -> x/c``).
    p : float
        Homogeneity power (polyharmonic family only).
    kappa : float
        Order of the power singularity of ``phi_hat`` at the origin.
    decay_n : float
        Power-decay exponent of ``phi_hat`` at infinity; ``inf`` encodes
        super-polynomial (exponential or Gaussian) decay.
    amplitude : float
        Exact limit of ``|eta|^kappa * phi_hat(eta)`` as ``eta -> 0``;
        lower and upper limit amplitudes coincide for the catalogue.
    """

    n: int
    family: str
    c: float = 1.0
    p: float = 0.0
    kappa: float = 0.0
    decay_n: float = math.inf
    amplitude: float = 1.0

    # -- radial profile -----------------------------------------------------

    @property
    def bessel_order(self) -> float:
        return 0.5 * (self.n + 1)

    @property
    def decay_label(self) -> str:
        return "super-polynomial" if math.isinf(self.decay_n) else f"{self.decay_n:g}"

    @property
    def a_lower(self) -> float:
        return self.amplitude

    @property
    def a_upper(self) -> float:
        return self.amplitude

    def log_fourier_radial(self, r):
        """log(phi_hat) as a function of the radius |eta| (vectorized)."""
        r = np.asarray(r, dtype=float)
        if self.family == "gaussian":
            return self.n * math.log(self.c) - (self.c * r) ** 2
        if self.family == "polyharmonic":
            return -self.p * math.log(self.c) - (self.n + self.p) * np.log(r)
        nu = self.bessel_order
        coef = math.log(2.0 * math.pi * self.c) * nu - math.log(math.pi)
        z = self.c * r
        # kve = K_nu(z) e^z keeps the exponential range manageable
        return coef - nu * np.log(r) + np.log(special.kve(nu, z)) - z

    def fourier_radial(self, r):
        return np.exp(self.log_fourier_radial(r))

    def fourier(self, eta):
        """phi_hat(eta) for points ``eta`` of shape (..., n) (or scalars, n=1)."""
        return self.fourier_radial(self._radius(eta))

    def fourier_radial_grad(self, r):
        """d phi_hat / dr along the radius (vectorized)."""
        r = np.asarray(r, dtype=float)
        if self.family == "gaussian":
            return -2.0 * self.c**2 * r * self.fourier_radial(r)
        if self.family == "polyharmonic":
            return -(self.n + self.p) / r * self.fourier_radial(r)
        nu = self.bessel_order
        z = self.c * r
        kv = special.kve(nu, z)
        kv_prime = -0.5 * (special.kve(nu - 1.0, z) + special.kve(nu + 1.0, z))
        coef = (2.0 * math.pi * self.c) ** nu / math.pi
        return coef * r ** (-nu) * np.exp(-z) * (
            -nu / r * kv + self.c * kv_prime
        )

    def _radius(self, eta):
        eta = np.asarray(eta, dtype=float)
        if self.n == 1:
            if eta.ndim >= 2 and eta.shape[-1] == 1:
                eta = eta[..., 0]
            return np.abs(eta)
        if eta.shape[-1] != self.n:
            raise ValueError(f"expected last axis of size {self.n}")
        return np.sqrt(np.sum(eta * eta, axis=-1))

    # -- spatial side -------------------------------------------------------

    @property
    def has_spatial(self) -> bool:
        return self.family in ("gaussian", "multiquadric")

    def spatial(self, x):
        """phi(x) where a closed spatial form exists.

        The polyharmonic transform is kept unnormalized (the cardinal symbol
        is invariant under positive scaling of ``phi_hat``), so no matching
        spatial profile is exposed for that family.
        """
        x = np.asarray(x, dtype=float)
        if self.n == 1:
            rad = np.abs(x)
        else:
            rad = np.sqrt(np.sum(x * x, axis=-1))
        if self.family == "gaussian":
            return (4.0 * math.pi) ** (-self.n / 2.0) * np.exp(
                -(rad / (2.0 * self.c)) ** 2
            )
        if self.family == "multiquadric":
            return -np.sqrt(rad * rad + self.c**2)
        raise ValueError(f"no spatial form for family {self.family!r}")

    # -- lattice truncation helpers ----------------------------------------

    def alias_truncation(self, tol: float, weight_power: float = 0.0) -> int:
        """Half-width K so that the lattice tail, weighted by |eta|^w, is < tol.

        Shells ``|k|_inf = m > K`` are bounded by the shell count times the
        radially decreasing profile at distance ``2 pi (m - 1/2)``.
        """
        if self.decay_n <= self.n + weight_power:
            raise ValueError(
                "lattice tail not summable: decay exponent "
                f"{self.decay_n} <= n + weight = {self.n + weight_power}"
            )
        best = None
        acc = 0.0
        terms = []
        for m in range(2, 4000):
            r = 2.0 * math.pi * (m - 0.5)
            shell = (2 * m + 1) ** self.n - (2 * m - 1) ** self.n
            t = shell * r**weight_power * float(self.fourier_radial(r))
            terms.append(t)
            if t < 1e-320:
                break
        # cumulative tails from the far end; append an integral-comparison
        # remainder for the power-law family
        tail_beyond = 0.0
        if self.family == "polyharmonic":
            m_end = len(terms) + 2
            sigma = self.decay_n - weight_power  # > n by the guard above
            if self.n == 1:
                # sum_{m>M} 2 (2 pi (m-1/2))^{-sigma} ~ integral comparison
                tail_beyond = (
                    2.0 * (2.0 * math.pi) ** -sigma * (m_end - 0.5) ** (1.0 - sigma) / (sigma - 1.0)
                )
            else:
                tail_beyond = (
                    8.0 * (2.0 * math.pi) ** -sigma * (m_end - 0.5) ** (2.0 - sigma) / (sigma - 2.0)
                )
        suffix = tail_beyond
        tails = [0.0] * len(terms)
        for i in range(len(terms) - 1, -1, -1):
            suffix += terms[i]
            tails[i] = suffix
        for i, t in enumerate(tails):
            if t < tol:
                best = i + 1  # tail starting at shell m = i+2 is below tol
                break
        if best is None:
            raise ValueError("could not meet lattice tail tolerance")
        return max(best, 1)

    def alias_tail_bound(self, K: int, weight_power: float = 0.0) -> float:
        """Upper bound for the weighted lattice sum over shells beyond K."""
        total = 0.0
        for m in range(K + 1, K + 2000):
            r = 2.0 * math.pi * (m - 0.5)
            shell = (2 * m + 1) ** self.n - (2 * m - 1) ** self.n
            t = shell * r**weight_power * float(self.fourier_radial(r))
            total += t
            if t < 1e-320 or t < 1e-16 * total:
                break
        return total

    # -- serialization ------------------------------------------------------

    def to_json(self) -> str:
        spec = {"family": self.family, "n": self.n, "c": self.c}
        if self.family == "polyharmonic":
            spec["p"] = self.p
        return json.dumps(spec)

    @staticmethod
    def from_json(text: str) -> "BasisFunction":
        spec = json.loads(text)
        params = {}
        if "c" in spec:
            params["c"] = spec["c"]
        if "p" in spec:
            params["p"] = spec["p"]
        return make_basis(spec["family"], spec["n"], **params)


def make_basis(family: str, n: int, c: float = 1.0, p: float = 0.0) -> BasisFunction:
    """Construct a catalogue basis function.

    ``gaussian``     : phi_hat(eta) = c^n exp(-c^2 |eta|^2), kappa = 0.
    ``multiquadric`` : phi(x) = -sqrt(|x|^2 + c^2), kappa = n + 1,
                       phi_hat via the MacDonald function of order (n+1)/2.
    ``polyharmonic`` : phi_hat(eta) = c^{-p} |eta|^{-n-p}, kappa = n + p
                       (unnormalized homogeneous transform).
    """
    if n < 1 or int(n) != n:
        raise ValueError(f"dimension must be a positive integer, got {n}")
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    if family == "polyharmonic":
        if p <= 0.0:
            raise ValueError("polyharmonic basis needs p > 0")
        if c <= 0.0:
            raise ValueError("shape parameter must be positive")
        return BasisFunction(
            n=n, family=family, c=c, p=p, kappa=n + p, decay_n=float(n + p),
            amplitude=c ** (-p),
        )
    if c <= 0.0:
        raise ValueError("shape parameter must be positive")
    if family == "gaussian":
        return BasisFunction(
            n=n, family=family, c=c, kappa=0.0, decay_n=math.inf, amplitude=c**n
        )
    # multiquadric: limit amplitude A_n = 2^n pi^{(n-1)/2} Gamma((n+1)/2),
    # independent of the shape parameter
    nu = 0.5 * (n + 1)
    if n > 4:
        raise ValueError("multiquadric catalogue covers n <= 4")
    amp = 2.0**n * math.pi ** ((n - 1) / 2.0) * math.gamma(nu)
    return BasisFunction(
        n=n, family=family, c=c, kappa=float(n + 1), decay_n=math.inf, amplitude=amp
    )


# ---------------------------------------------------------------------------
# Membership diagnostics
# ---------------------------------------------------------------------------

@dataclass
class MembershipReport:
    """Outcome of the sampled admissibility checks for one basis."""

    basis: Optional[BasisFunction]
    positivity: bool = False
    ellipticity: bool = False
    derivative_bounds: bool = False
    decay: bool = False
    a_lower_fit: float = math.nan
    a_upper_fit: float = math.nan
    decay_slope: float = math.nan
    derivative_constants: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.positivity and self.ellipticity and self.derivative_bounds and self.decay


def _directional_samples(n: int, radii: np.ndarray) -> np.ndarray:
    dirs = [np.eye(n)[i] for i in range(n)]
    if n > 1:
        dirs.append(np.ones(n) / math.sqrt(n))
    pts = np.concatenate([r * d for d in dirs for r in radii[:, None, None]], axis=0)
    return pts.reshape(-1, n)


def verify_membership(
    basis_or_fourier,
    n: Optional[int] = None,
    kappa: Optional[float] = None,
    decay_n: Optional[float] = None,
    growth_tol: float = 4.0,
) -> MembershipReport:
    """Sampled checks of admissibility: positivity, elliptic singularity,
    derivative bounds up to order 2, and decay at infinity.

    Accepts either a catalogue :class:`BasisFunction` or a bare callable
    ``eta -> value`` together with ``n``, ``kappa``, ``decay_n``.  Failures
    are recorded in the report rather than raised.
    """
    if isinstance(basis_or_fourier, BasisFunction):
        basis = basis_or_fourier
        fourier = basis.fourier
        n = basis.n
        kappa = basis.kappa
        decay_n = basis.decay_n
        report = MembershipReport(basis=basis)
    else:
        fourier = basis_or_fourier
        if n is None or kappa is None:
            raise ValueError("callable input needs explicit n and kappa")
        decay_n = math.inf if decay_n is None else decay_n
        report = MembershipReport(basis=None)

    rng = np.random.default_rng(7)
    # (ii) strict positivity on scattered samples
    pts = rng.uniform(-8.0, 8.0, size=(400, n))
    pts = pts[np.linalg.norm(pts, axis=-1) > 1e-3]
    vals = np.asarray(fourier(pts if n > 1 else pts[:, 0]))
    report.positivity = bool(np.all(vals > 0.0))

    # (iii) two-sided power bound at the origin, alpha = 0
    radii = 2.0 ** -np.arange(1, 17, dtype=float)
    small = _directional_samples(n, radii)
    sv = np.asarray(fourier(small if n > 1 else small[:, 0]))
    weighted = np.linalg.norm(small, axis=-1) ** kappa * sv
    report.a_lower_fit = float(np.min(weighted))
    report.a_upper_fit = float(np.max(weighted))
    report.ellipticity = bool(
        np.isfinite(report.a_upper_fit)
        and report.a_lower_fit > 0.0
        and report.a_upper_fit / report.a_lower_fit < growth_tol
    )

    # (iii) finite-difference bounds |d^a phi_hat| <= C |eta|^{-kappa-|a|}, |a| <= 2
    ok = True
    for order in (1, 2):
        consts = []
        for r in 2.0 ** -np.arange(2, 12, dtype=float):
            step = r / 64.0
            e = np.zeros(n)
            e[0] = 1.0
            base = r * e
            if order == 1:
                d = (_eval(fourier, base + step * e, n) - _eval(fourier, base - step * e, n)) / (
                    2 * step
                )
            else:
                d = (
                    _eval(fourier, base + step * e, n)
                    - 2.0 * _eval(fourier, base, n)
                    + _eval(fourier, base - step * e, n)
                ) / step**2
            consts.append(abs(d) * r ** (kappa + order))
        consts = np.asarray(consts)
        report.derivative_constants[order] = float(np.max(consts))
        # the normalized constants must not blow up towards the origin;
        # decaying constants just mean the bound is not saturated
        ladder = 2.0 ** -np.arange(2, 12, dtype=float)
        trend = np.polyfit(np.log(ladder), np.log(np.maximum(consts, 1e-300)), 1)[0]
        if trend < -0.15:
            ok = False
    report.derivative_bounds = ok

    # (iv) decay at infinity, alpha = 0 and 1; cap the range before underflow
    r_max = 64.0
    while r_max > 2.0 and _eval(fourier, _axis_points(np.array([r_max]), n)[0], n) < 1e-280:
        r_max /= 2.0
    far = np.geomspace(1.0, r_max, 25)
    farv = np.asarray(fourier(_axis_points(far, n) if n > 1 else far))
    with np.errstate(invalid="ignore", divide="ignore"):
        slope = np.polyfit(np.log(far), np.log(np.abs(farv)), 1)[0]
    report.decay_slope = float(slope)
    if math.isinf(decay_n):
        report.decay = bool(slope < -(n + 2))
    else:
        report.decay = bool(slope <= -decay_n + 0.3)
    if not report.positivity:
        report.notes.append("sign change detected in phi_hat samples")
    return report


def _axis_points(radii, n):
    pts = np.zeros((len(radii), n))
    pts[:, 0] = radii
    return pts


def _eval(fourier, point, n):
    if n == 1:
        return float(np.asarray(fourier(float(point[0]))))
    return float(np.asarray(fourier(point)))
