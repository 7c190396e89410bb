"""Semi-discrete evolution schemes: rates, saturation and the two solution paths.

The lattice method of lines for d/dt u + a(D) u = 0 converges in Wiener
norm at order kappa - q.  The demo measures that for the heat equation and
a regularized fractional diffusion, shows the kappa = 2 saturation of the
1-D multiquadric, and cross-checks the time-domain exponential integrator
against the independent spectral-multiplier solution at the lattice nodes.
"""

import numpy as np

from gridrbf import make_basis, make_density, make_symbol, wiener_error_scheme
from gridrbf.constants import heat_constants, symbol_constant
from gridrbf.evolve import cross_validate, generator_stencil, initial_state, integrate_mol

data = make_density("gaussian")
poly = make_basis("polyharmonic", 1, p=3.0)
mq = make_basis("multiquadric", 1, c=1.0)
heat = make_symbol("heat")
t = 1.0

print("=== heat equation, kappa = 4 basis: order kappa - 2 = 2 ===")
hs = 2.0 ** -np.arange(2, 9)
errs = [wiener_error_scheme(data, poly, heat, h, t) for h in hs]
print("errors:", ["%.3e" % e for e in errs])
print("fitted rate:", np.polyfit(np.log(hs), np.log(errs), 1)[0])

print("\n=== fractional diffusion (order 1.5): rate kappa - q = 2.5 ===")
frac = make_symbol("fractional_reg", s=0.75)
errs = [wiener_error_scheme(data, poly, frac, h, t) for h in hs]
print("fitted rate:", np.polyfit(np.log(hs), np.log(errs), 1)[0])
print("exact-limit constant |g_a| =", abs(symbol_constant(poly, frac)))

print("\n=== kappa = 2 multiquadric: no convergence, exact saturation ===")
errs = [wiener_error_scheme(data, mq, heat, h, t) for h in 2.0 ** -np.arange(3, 10)]
print("errors:", ["%.4e" % e for e in errs])
print("heat constants:", heat_constants(mq))

print("\n=== method of lines vs spectral path (h = 1/4, J = 64, T = 1/2) ===")
for name, sym in (("heat", heat), ("transport", make_symbol("transport", v=1.0))):
    rep = cross_validate(data, mq, sym, h=0.25, J=64, T=0.5)
    print(f"{name:10s} max nodal discrepancy {rep['discrepancy']:.2e}")

print("\n=== rk4 stepping converges to the exponential integrator at order 4 ===")
stencil = generator_stencil(mq, heat, h=0.25, J_s=64)
state = initial_state(data.spatial, 0.25, 64)
ref = integrate_mol(state, stencil, 0.5, "exponential")
for dt in (0.008, 0.004, 0.002):
    out = integrate_mol(state, stencil, 0.5, "rk4", dt=dt)
    print(f"dt = {dt:6.4f}: max deviation {np.max(np.abs(out.coeffs - ref.coeffs)):.3e}")
