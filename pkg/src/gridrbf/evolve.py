"""Time-domain method-of-lines path on a truncated lattice.

The semi-discrete scheme evolves nodal coefficients by the convolution
system

    dc_j/dt = - sum_k  (a(h^{-1} D) L1)(j - k) c_k(t),   c_j(0) = f(h j).

On the truncated index box |j|_inf <= J the boundary is closed
periodically, which keeps the generator an exact circulant: the
exponential integrator diagonalizes it by FFT and is exact in time, while
an rk4 stepper exercises the literal ODE formulation.  The whole path is
cross-validated against the spectral solution, which is computed
independently from the scheme multiplier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bases import BasisFunction
from .symbols import Symbol
from . import cardinal, multiplier, spectral

__all__ = [
    "GeneratorStencil",
    "LatticeState",
    "cross_validate",
    "generator_stencil",
    "integrate_mol",
    "initial_state",
    "solve_spectral",
]


# ---------------------------------------------------------------------------
# Generator stencil
# ---------------------------------------------------------------------------

@dataclass
class GeneratorStencil:
    """Samples of a(h^{-1} D) L1 at integer offsets |j|_inf <= J_s (1-D)."""

    basis: BasisFunction
    symbol: Symbol
    h: float
    values: np.ndarray  # complex, index j = -J_s..J_s
    J_s: int
    decay_fit: float
    extent_flag: bool
    row_sum: complex

    def wrap(self, N: int) -> np.ndarray:
        """Fold the stencil onto a circulant kernel of length N."""
        kernel = np.zeros(N, dtype=complex)
        for j in range(-self.J_s, self.J_s + 1):
            kernel[j % N] += self.values[j + self.J_s]
        return kernel


def generator_stencil(
    basis: BasisFunction,
    symbol: Symbol,
    h: float,
    J_s: int = 64,
    oversample: int = 64,
    tol: float = 1e-9,
) -> GeneratorStencil:
    """Stencil entries by quadrature of the symbol-weighted cardinal symbol.

    (a(h^{-1} D) L1)(j) = (2 pi)^{-n} int a(eta / h) L1_hat(eta) e^{i j eta}.

    The frequency box is doubled once to flag insufficient extent.
    """
    if basis.n != 1:
        raise NotImplementedError("stencils are built in 1-D")
    if basis.decay_n <= basis.n + symbol.order:
        raise ValueError("stencil integral needs decay exponent > n + q")

    def compute(ov):
        period = max(256, 4 * J_s)
        n_freq = ov * period
        d_eta = 2.0 * math.pi / period
        eta = (np.arange(n_freq) - n_freq // 2) * d_eta
        sym = np.asarray(cardinal.lagrange_symbol(basis, eta)) * np.asarray(
            symbol(eta / h)
        )
        x, vals = cardinal.inverse_transform_uniform(sym, d_eta)
        stride = int(round(1.0 / (x[1] - x[0])))
        mid = int(np.argmin(np.abs(x)))
        idx = mid + stride * np.arange(-J_s, J_s + 1)
        return vals[idx]

    vals = compute(oversample)
    vals2 = compute(2 * oversample)
    extent_flag = bool(np.max(np.abs(vals - vals2)) > max(tol, 1e-12))
    vals = vals2
    j = np.arange(-J_s, J_s + 1)
    mask = np.abs(j) >= 5
    mag = np.abs(vals[mask])
    good = mag > 1e-280
    decay_fit = float(
        np.polyfit(np.log(np.abs(j[mask][good])), np.log(mag[good]), 1)[0]
    )
    return GeneratorStencil(
        basis=basis,
        symbol=symbol,
        h=h,
        values=vals,
        J_s=J_s,
        decay_fit=decay_fit,
        extent_flag=extent_flag,
        row_sum=complex(np.sum(vals)),
    )


# ---------------------------------------------------------------------------
# Lattice states and integrators
# ---------------------------------------------------------------------------

@dataclass
class LatticeState:
    """Nodal coefficients on the truncated lattice |j|_inf <= J."""

    h: float
    J: int
    coeffs: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        if self.coeffs.shape != (2 * self.J + 1,):
            raise ValueError("coefficient array must have length 2J + 1")

    @property
    def nodes(self) -> np.ndarray:
        return self.h * np.arange(-self.J, self.J + 1)

    def check_finite(self):
        if not np.all(np.isfinite(self.coeffs)):
            raise FloatingPointError("non-finite lattice coefficients")

    def export_csv(self, path: str):
        import csv

        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j", "re", "im"])
            for j, c in zip(range(-self.J, self.J + 1), self.coeffs):
                w.writerow([j, c.real, c.imag])


def initial_state(f, h: float, J: int) -> LatticeState:
    """State with c_j(0) = f(h j)."""
    j = np.arange(-J, J + 1)
    return LatticeState(h=h, J=J, coeffs=np.asarray(f(h * j), dtype=complex), t=0.0)


def integrate_mol(
    state: LatticeState,
    stencil: GeneratorStencil,
    T: float,
    method: str = "exponential",
    dt: Optional[float] = None,
) -> LatticeState:
    """Advance the coefficient system to time ``state.t + T``.

    ``exponential`` diagonalizes the periodic-wrap circulant by FFT (exact
    in time); ``rk4`` steps the ODE system explicitly and converges to the
    exponential answer at fourth order in dt.
    """
    if T < 0:
        raise ValueError("T must be >= 0")
    N = 2 * state.J + 1
    kernel = -stencil.wrap(N)  # dc/dt = kernel (*) c
    kernel_hat = np.fft.fft(kernel)
    # coefficients are stored j = -J..J; FFT convolution indexes 0..N-1
    c0 = np.roll(state.coeffs, -state.J)
    if T == 0.0:
        out = state.coeffs.copy()
    elif method == "exponential":
        c_hat = np.fft.fft(c0)
        c_hat *= np.exp(T * kernel_hat)
        out = np.roll(np.fft.ifft(c_hat), state.J)
    elif method == "rk4":
        if dt is None or dt <= 0:
            raise ValueError("rk4 needs a positive dt")
        steps = max(1, int(round(T / dt)))
        step = T / steps

        def rhs(c):
            return np.fft.ifft(kernel_hat * np.fft.fft(c))

        c = c0
        for _ in range(steps):
            k1 = rhs(c)
            k2 = rhs(c + 0.5 * step * k1)
            k3 = rhs(c + 0.5 * step * k2)
            k4 = rhs(c + step * k3)
            c = c + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        out = np.roll(c, state.J)
    else:
        raise ValueError(f"unknown integrator {method!r}")
    new = LatticeState(h=state.h, J=state.J, coeffs=np.asarray(out), t=state.t + T)
    new.check_finite()
    bound = 1e6 * (np.max(np.abs(state.coeffs)) + 1e-300)
    if np.max(np.abs(new.coeffs)) > bound:
        raise FloatingPointError("integrator instability: coefficients blew up")
    return new


def generator_fourier_diagonal(stencil: GeneratorStencil, J: int) -> np.ndarray:
    """Eigenvalues of the periodic-wrap generator (it samples -G_a)."""
    N = 2 * J + 1
    return np.fft.fft(-stencil.wrap(N))


# ---------------------------------------------------------------------------
# Spectral reference path
# ---------------------------------------------------------------------------

def solve_spectral(
    data: spectral.SpectralDensity,
    basis: BasisFunction,
    symbol: Symbol,
    h: float,
    t: float,
    xi,
    tol: float = 1e-12,
):
    """u_h_hat(xi, t) = exp(-t G_a(xi; h)) * alias(f_hat)(xi)."""
    xi = np.asarray(xi, dtype=float)
    g_star = np.asarray(multiplier.scheme_multiplier(basis, symbol, xi, h, tol))
    alias = np.asarray(spectral.alias_apply(data, basis, h, xi, tol))
    expo = np.exp(np.clip(-t * g_star.real, -700.0, 0.0) - 1j * t * g_star.imag)
    return expo * alias


def spectral_nodal_values(
    data: spectral.SpectralDensity,
    basis: BasisFunction,
    symbol: Symbol,
    h: float,
    t: float,
    J: int,
    extent_cells: int = 32,
    points_per_cell: int = 64,
):
    """Inverse transform of the spectral solution at the lattice nodes h j."""
    E = extent_cells * math.pi / h
    # the x-periodization (period 2 pi/dxi) must clear the node range
    period_x = max(64.0, 6.0 * J * h)
    dxi = 2.0 * math.pi / period_x
    N = int(math.ceil(2.0 * E / dxi))
    xi = (np.arange(N) - N // 2) * dxi
    u_hat = solve_spectral(data, basis, symbol, h, t, xi)
    nodes = h * np.arange(-J, J + 1)
    phases = np.exp(1j * np.outer(nodes, xi))
    return (phases @ u_hat) * dxi / (2.0 * math.pi)


def cross_validate(
    data: spectral.SpectralDensity,
    basis: BasisFunction,
    symbol: Symbol,
    h: float = 0.25,
    J: int = 64,
    T: float = 0.5,
    J_s: int = 64,
    budget: float = 1e-4,
) -> dict:
    """Compare the MOL path against the spectral path at the lattice nodes.

    Returns the max nodal discrepancy, whether it is within budget, and
    whether it is truncation-dominated (halves when J is doubled).
    """
    if data.spatial is None:
        raise ValueError("cross validation needs a datum with a spatial form")
    stencil = generator_stencil(basis, symbol, h, J_s=J_s)

    def run(J_run):
        state = initial_state(data.spatial, h, J_run)
        state = integrate_mol(state, stencil, T, method="exponential")
        u_spec = spectral_nodal_values(data, basis, symbol, h, T, J_run)
        inner = slice(J_run // 4, len(u_spec) - J_run // 4)
        return float(np.max(np.abs(state.coeffs[inner] - u_spec[inner])))

    disc = run(J)
    disc2 = run(2 * J)
    return {
        "h": h,
        "J": J,
        "T": T,
        "discrepancy": disc,
        "passed": bool(disc < budget),
        "discrepancy_2J": disc2,
        "truncation_dominated": bool(disc2 < 0.75 * disc),
    }
