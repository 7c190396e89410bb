import json
import math

import numpy as np
import pytest
from scipy import integrate, special

from gridrbf.bases import (
    BasisFunction,
    CutoffSpec,
    make_basis,
    modified_bessel_k,
    verify_membership,
)

# K_1(1) by quadrature of the integral representation
# int_0^inf exp(-cosh t) cosh t dt, computed independently and frozen.
K1_AT_1 = 0.6019072301972346


class TestModifiedBesselK:
    def test_half_order_closed_form(self):
        val = modified_bessel_k(0.5, 1.0)
        assert val == pytest.approx(math.sqrt(math.pi / 2.0) * math.exp(-1.0), rel=1e-14)
        assert val == pytest.approx(0.46106850, abs=5e-9)

    def test_integral_representation_oracle(self):
        assert modified_bessel_k(1.0, 1.0) == pytest.approx(K1_AT_1, rel=1e-10)
        # re-derive the oracle here so the frozen value stays honest
        live, err = integrate.quad(lambda t: math.exp(-math.cosh(t)) * math.cosh(t), 0, 30)
        assert live == pytest.approx(K1_AT_1, abs=10 * err)

    @pytest.mark.parametrize("nu", [0.5, 1.0])
    def test_leading_asymptotic_at_50(self, nu):
        lead = math.sqrt(math.pi / 100.0) * math.exp(-50.0)
        assert modified_bessel_k(nu, 50.0) / lead == pytest.approx(1.0, abs=0.02)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 1.5, 2.0, 2.5])
    def test_two_term_asymptotic_at_50(self, nu):
        # higher orders need the (4 nu^2 - 1)/(8x) correction to reach percent level
        lead = math.sqrt(math.pi / 100.0) * math.exp(-50.0)
        corrected = lead * (1.0 + (4.0 * nu * nu - 1.0) / (8.0 * 50.0))
        assert modified_bessel_k(nu, 50.0) / corrected == pytest.approx(1.0, abs=0.01)

    @pytest.mark.parametrize("nu", [0.5, 1.0, 1.5, 2.0, 2.5])
    def test_against_scipy_across_regimes(self, nu):
        for x in np.geomspace(0.02, 90.0, 120):
            assert modified_bessel_k(nu, float(x)) == pytest.approx(
                float(special.kv(nu, x)), rel=1e-10
            )

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            modified_bessel_k(1.0, 0.0)
        with pytest.raises(ValueError):
            modified_bessel_k(1.0, -2.0)
        with pytest.raises(ValueError):
            modified_bessel_k(3.3, 1.0)


class TestMakeBasis:
    def test_multiquadric_n1_kappa(self):
        b = make_basis("multiquadric", 1, c=1.0)
        assert b.kappa == 2.0

    def test_gaussian_kappa_zero(self):
        assert make_basis("gaussian", 1, c=1.0).kappa == 0.0

    def test_polyharmonic_kappa_and_transform(self):
        b = make_basis("polyharmonic", 1, p=3.0)
        assert b.kappa == 4.0
        assert b.decay_n == 4.0
        eta = np.array([0.5, 2.0])
        np.testing.assert_allclose(b.fourier(eta), np.abs(eta) ** -4.0, rtol=1e-14)

    def test_rejections(self):
        with pytest.raises(ValueError):
            make_basis("polyharmonic", 1, p=0.0)
        with pytest.raises(ValueError):
            make_basis("polyharmonic", 1, p=-1.0)
        with pytest.raises(ValueError):
            make_basis("multiquadric", 7)
        with pytest.raises(ValueError):
            make_basis("gaussian", 1, c=-1.0)
        with pytest.raises(ValueError):
            make_basis("wendland", 1)

    def test_gaussian_transform_value(self):
        b = make_basis("gaussian", 1, c=2.0)
        eta = np.array([0.0, 1.0, 3.0])
        np.testing.assert_allclose(b.fourier(eta), 2.0 * np.exp(-4.0 * eta**2), rtol=1e-14)

    def test_json_roundtrip(self):
        for b in (
            make_basis("gaussian", 1, c=1.5),
            make_basis("multiquadric", 2, c=2.0),
            make_basis("polyharmonic", 1, p=3.0),
        ):
            b2 = BasisFunction.from_json(b.to_json())
            assert b2 == b
        spec = json.loads(make_basis("polyharmonic", 1, p=3.0).to_json())
        assert spec == {"family": "polyharmonic", "n": 1, "c": 1.0, "p": 3.0}


class TestScalingLaws:
    def test_multiquadric_spatial_identity(self):
        # phi(x) = c * phi_1(x/c) exactly for the spatial profile
        c = 2.5
        b = make_basis("multiquadric", 1, c=c)
        b1 = make_basis("multiquadric", 1, c=1.0)
        x = np.linspace(-7, 7, 41)
        np.testing.assert_allclose(b.spatial(x), c * b1.spatial(x / c), rtol=1e-15)

    @pytest.mark.parametrize("family,kw", [("gaussian", {}), ("polyharmonic", {"p": 3.0})])
    def test_dilation_law_of_transform(self, family, kw):
        # phi_c_hat(eta) = c^n phi_1_hat(c eta) for a plain dilation x -> x/c
        c = 1.7
        b = make_basis(family, 1, c=c, **kw)
        b1 = make_basis(family, 1, c=1.0, **kw)
        eta = np.array([0.3, 1.1, 2.4])
        np.testing.assert_allclose(b.fourier(eta), c * b1.fourier(c * eta), rtol=1e-12)

    def test_multiquadric_transform_dilation_with_extra_factor(self):
        # the multiquadric profile carries an additional factor c
        c = 2.0
        b = make_basis("multiquadric", 1, c=c)
        b1 = make_basis("multiquadric", 1, c=1.0)
        eta = np.array([0.4, 1.3])
        np.testing.assert_allclose(b.fourier(eta), c * c * b1.fourier(c * eta), rtol=1e-12)


class TestMultiquadricTransformOracle:
    def test_distributional_pairing(self):
        """Pair phi_hat against a test function vanishing to second order at 0.

        <phi_hat, psi> = <phi, psi_hat> kills the delta-type parts at the
        origin, so the MacDonald-function formula can be checked against
        direct quadrature of the spatial profile.
        """
        c = 1.0
        b = make_basis("multiquadric", 1, c=c)

        g0 = 3.0  # center of the bump, away from the origin

        def psi(eta):
            return eta**2 * np.exp(-((eta - g0) ** 2))

        def psi_hat(x):
            # FT of eta^2 e^{-(eta-g0)^2}: -(d/dx)^2 of sqrt(pi) e^{-x^2/4 - i g0 x}
            gp = -x / 2.0 - 1j * g0
            return -math.sqrt(math.pi) * (gp * gp - 0.5) * np.exp(-(x**2) / 4.0 - 1j * g0 * x)

        lhs, _ = integrate.quad(
            lambda e: float(b.fourier(np.array([abs(e)]))[0]) * psi(e),
            -12, 12, points=[0.0], limit=400,
        )
        rhs_re, _ = integrate.quad(lambda x: float(b.spatial(np.array([x]))[0]) * psi_hat(x).real,
                                   -60, 60, limit=500)
        rhs_im, _ = integrate.quad(lambda x: float(b.spatial(np.array([x]))[0]) * psi_hat(x).imag,
                                   -60, 60, limit=500)
        assert abs(rhs_im) < 1e-8
        assert lhs == pytest.approx(rhs_re, rel=1e-7)

    def test_gaussian_spatial_fourier_consistency(self):
        # FFT of a fine sampling of the spatial profile matches the transform
        b = make_basis("gaussian", 1, c=1.3)
        x = np.linspace(-40, 40, 2**14, endpoint=False)
        dx = x[1] - x[0]
        for xi in (0.3, 1.0, 2.2):
            approx = np.sum(b.spatial(x) * np.exp(-1j * x * xi)) * dx
            assert approx.real == pytest.approx(float(b.fourier(np.array([xi]))[0]), rel=1e-10)


class TestMembership:
    @pytest.mark.parametrize(
        "family,kw",
        [
            ("gaussian", {"c": 1.0}),
            ("gaussian", {"c": 2.0}),
            ("multiquadric", {"c": 1.0}),
            ("polyharmonic", {"p": 3.0}),
        ],
    )
    def test_catalogue_passes(self, family, kw):
        rep = verify_membership(make_basis(family, 1, **kw))
        assert rep.passed, rep.notes

    def test_multiquadric_2d_passes(self):
        assert verify_membership(make_basis("multiquadric", 2)).passed

    def test_gaussian_report_values(self):
        rep = verify_membership(make_basis("gaussian", 1))
        assert rep.decay_slope < -3.0  # super-polynomial decay in the fit window

    def test_polyharmonic_exact_amplitudes(self):
        rep = verify_membership(make_basis("polyharmonic", 1, p=3.0))
        assert rep.a_lower_fit == pytest.approx(1.0, rel=1e-12)
        assert rep.a_upper_fit == pytest.approx(1.0, rel=1e-12)

    def test_sign_changing_counterexample_fails(self):
        rep = verify_membership(
            lambda e: np.cos(e) * np.abs(e) ** -2.0, n=1, kappa=2.0, decay_n=2.0
        )
        assert not rep.passed
        assert not rep.positivity


class TestCutoffSpec:
    def test_plateau_and_support(self):
        chi = CutoffSpec(1.0, 2.0)
        r = np.linspace(0, 3, 301)
        v = chi(r)
        assert np.all(v[r <= 1.0] == 1.0)
        assert np.all(v[r >= 2.0] == 0.0)
        assert np.all((0.0 <= v) & (v <= 1.0))
        assert np.all(np.diff(v) <= 1e-15)  # monotone transition

    def test_continuity_at_edges(self):
        chi = CutoffSpec(1.0, 2.0)
        eps = 1e-8
        assert chi(np.array([1.0 + eps]))[0] == pytest.approx(1.0, abs=1e-6)
        assert chi(np.array([2.0 - eps]))[0] == pytest.approx(0.0, abs=1e-6)

    def test_invalid_radii(self):
        with pytest.raises(ValueError):
            CutoffSpec(2.0, 1.0)
        with pytest.raises(ValueError):
            CutoffSpec(0.0, 1.0)
