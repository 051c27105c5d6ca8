import cmath
import math

import numpy as np
import pytest

from qsd.clifford import QI, QJ, QK, UnitQuaternion
from qsd.engine import (
    Backend,
    DiffRequest,
    central_difference,
    csd_derivative,
    differentiate,
    function_registry,
    log_slope,
    lookup,
    qsd_derivative,
    relative_error,
)
from qsd.errors import EvaluationError, NonInvertibleError, UndefinedReferenceError

EPS = np.finfo(float).eps
Z_LYNESS = complex(math.pi / 4, math.pi / 3)
TAGS = ["lyness", "exp", "sin", "cos", "tan", "ln", "sqrt", "arcsin", "arccos", "arctan", "inv", "poly"]
QSD_BACKENDS = [Backend.BICOMPLEX, Backend.MULTIVECTOR, Backend.PAULI2, Backend.REAL4]


def lyness_numeric(z):
    return cmath.exp(z) / (cmath.cos(z) ** 3 + cmath.sin(z) ** 3)


def random_points(rng, n):
    # keep clear of the real-axis cuts of ln, sqrt and the arc functions
    return [
        complex(rng.uniform(-1.5, 1.5), rng.uniform(0.2, 1.5) * rng.choice([-1, 1]))
        for _ in range(n)
    ]


def ulp_close(a, b, ulps):
    scale = max(abs(a), abs(b))
    return abs(a - b) <= ulps * EPS * scale


class TestRegistry:
    def test_tags(self):
        assert [e.tag for e in function_registry()] == TAGS

    def test_unknown(self):
        with pytest.raises(ValueError):
            lookup("gamma")

    @pytest.mark.parametrize("tag", TAGS)
    def test_reference_against_central_difference(self, tag):
        # oracle: 8th-order central difference, error ~ h^8
        entry = lookup(tag)
        z = complex(0.4, 0.6)
        h = 1e-3
        stencil = (1 / 280, -4 / 105, 1 / 5, -4 / 5, 0, 4 / 5, -1 / 5, 4 / 105, -1 / 280)
        fd = sum(c * entry.complex(z + (k - 4) * h) for k, c in enumerate(stencil)) / h
        assert entry.reference_derivative(z) == pytest.approx(fd, rel=1e-9)

    def test_lyness_reference_is_derived_form(self):
        z = Z_LYNESS
        c, s = cmath.cos(z), cmath.sin(z)
        g = lyness_numeric(z)
        want = g * (1 - 3 * (s * s * c - c * c * s) / (c**3 + s**3))
        assert lookup("lyness").reference_derivative(z) == want

    def test_reference_examples(self):
        z = complex(0.3, -2.0)
        assert lookup("ln").reference_derivative(z) == 1 / z
        assert lookup("exp").reference_derivative(z) == cmath.exp(z)

    def test_poly_coefficients(self):
        entry = lookup("poly:1,2,3")
        assert entry.complex(2.0) == 1 + 4 + 12
        assert entry.reference_derivative(2.0) == 2 + 12

    def test_bicomplex_matches_complex_on_axis(self):
        from qsd.clifford import Bicomplex

        for e in function_registry():
            z = complex(0.4, 0.6)
            got = e.bicomplex(Bicomplex(z, 0j)).z1
            assert got == pytest.approx(e.complex(z), rel=1e-14)


class TestQsd:
    @pytest.mark.parametrize("backend", QSD_BACKENDS)
    def test_exp_at_zero(self, backend):
        assert qsd_derivative("exp", 0, 1e-20, QJ, backend) == 1

    def test_lyness(self):
        est = qsd_derivative("lyness", Z_LYNESS)
        ref = lookup("lyness").reference_derivative(Z_LYNESS)
        assert relative_error(est, ref) <= 1e-13

    @pytest.mark.parametrize("z", [-0.5, -1e-10, 1e-10, complex(-3, 1e-300)])
    def test_ln_on_branch_cut(self, z):
        est = qsd_derivative("ln", z)
        assert relative_error(est, 1 / complex(z)) < 1e-13

    @pytest.mark.parametrize("q", [QI, QJ, QK, UnitQuaternion(1, -2, 0.5)])
    @pytest.mark.parametrize("backend", [Backend.BICOMPLEX, Backend.MULTIVECTOR, Backend.REAL4])
    def test_direction_agnostic(self, backend, q):
        est = qsd_derivative("lyness", Z_LYNESS, 1e-20, q, backend)
        ref = lookup("lyness").reference_derivative(Z_LYNESS)
        assert relative_error(est, ref) <= 1e-13

    def test_pauli2_k_cancels(self):
        est = qsd_derivative("lyness", Z_LYNESS, 1e-20, QK, Backend.PAULI2)
        ref = lookup("lyness").reference_derivative(Z_LYNESS)
        assert relative_error(est, ref) > 1e-6

    @pytest.mark.parametrize("tag", TAGS)
    @pytest.mark.parametrize("backend", [Backend.MULTIVECTOR, Backend.REAL4])
    def test_backend_agreement(self, backend, tag):
        rng = np.random.default_rng(0)
        for z in random_points(rng, 50):
            q = UnitQuaternion(*rng.normal(size=3))
            b = qsd_derivative(tag, z, 1e-20, q, Backend.BICOMPLEX)
            other = qsd_derivative(tag, z, 1e-20, q, backend)
            assert ulp_close(other, b, 4), f"{abs(other - b) / (EPS * abs(b)):.1f} ulps at z={z}"

    @pytest.mark.parametrize("z", [complex(-0.75, 1e-12), complex(-0.75, -1e-12), complex(-2, 1e-8)])
    def test_sqrt_near_cut(self, z):
        # 1 + U cancels here; the derivative must still be right
        est = qsd_derivative("sqrt", z)
        assert relative_error(est, 0.5 / cmath.sqrt(z)) < 1e-13

    @pytest.mark.parametrize("tag", TAGS)
    def test_accuracy_everywhere(self, tag):
        rng = np.random.default_rng(1)
        entry = lookup(tag)
        for z in random_points(rng, 50):
            est = qsd_derivative(tag, z)
            assert relative_error(est, entry.reference_derivative(z)) < 1e-12

    def test_pole_surfaces(self):
        with pytest.raises((NonInvertibleError, EvaluationError)):
            qsd_derivative("inv", 0.0, 1e-200)

    def test_bad_backend(self):
        with pytest.raises(ValueError):
            qsd_derivative("exp", 0, 1e-20, QJ, Backend.CENTRAL)


class TestCsd:
    @pytest.mark.parametrize("tag", ["exp", "sin"])
    def test_at_zero(self, tag):
        assert csd_derivative(tag, 0.0) == 1.0

    @pytest.mark.parametrize("tag", ["lyness", "exp", "sin", "cos", "tan", "arctan", "inv", "poly"])
    def test_matches_qsd_real_part(self, tag):
        for x in (0.5, -0.3, 1.2):
            c = csd_derivative(tag, x)
            q = qsd_derivative(tag, x)
            assert abs(c - q.real) <= 4 * EPS * abs(q.real)

    def test_complex_point_rejected(self):
        with pytest.raises(ValueError):
            csd_derivative("exp", 1j)


class TestCentralDifference:
    def test_quadratic_exact(self):
        z = complex(0.7, -0.2)
        assert central_difference("poly", z, 1e-3) == pytest.approx(2 * z, rel=1e-12)

    def test_second_order(self):
        d2 = central_difference("exp", 0.0, 1e-4, order=2)
        assert abs(d2 - 1) < 1e-6

    def test_v_curve(self):
        ref = lookup("lyness").reference_derivative(Z_LYNESS)
        err = {h: relative_error(central_difference("lyness", Z_LYNESS, h), ref) for h in (1e-6, 1e-8, 1e-12)}
        assert err[1e-8] < 1e-7
        assert err[1e-12] > 100 * err[1e-6]

    def test_imaginary_direction(self):
        z = complex(0.5, 0.2)
        d = central_difference("exp", z, 1e-4, step_direction=1j)
        assert d == pytest.approx(cmath.exp(z), rel=1e-8)

    def test_bad_direction(self):
        with pytest.raises(ValueError):
            central_difference("exp", 0, 1e-3, step_direction=2)


class TestConvergence:
    def test_floor_reached_and_kept(self):
        ref = lookup("lyness").reference_derivative(Z_LYNESS)
        hs = [10.0**-k for k in range(1, 21)]
        errs = [relative_error(qsd_derivative("lyness", Z_LYNESS, h), ref) for h in hs]
        assert errs[-1] <= 1e-13
        for a, b in zip(errs, errs[1:]):
            assert b <= 10 * max(a, 1e-15)

    def test_taylor_order(self):
        ref = lookup("lyness").reference_derivative(Z_LYNESS)
        hs = [1e-2, 1e-3, 1e-4, 1e-5]
        errs = [relative_error(qsd_derivative("lyness", Z_LYNESS, h), ref) for h in hs]
        assert 1.8 <= log_slope(hs, errs) <= 2.2

    def test_log_slope(self):
        hs = [1e-1, 1e-2, 1e-3]
        assert log_slope(hs, [h**2 for h in hs]) == pytest.approx(2.0)


class TestRelativeError:
    def test_examples(self):
        assert relative_error(1 + 1j, 1 + 1j) == 0
        assert relative_error(1.01, 1.0) == pytest.approx(0.01)
        assert relative_error(1 + 1e-15, 1.0) == pytest.approx(1e-15, rel=0.2)

    @pytest.mark.parametrize("ref", [0, complex("nan"), complex("inf")])
    def test_undefined(self, ref):
        with pytest.raises(UndefinedReferenceError):
            relative_error(1.0, ref)


class TestRequests:
    def test_differentiate(self):
        r = differentiate(DiffRequest("lyness", Z_LYNESS))
        assert r.rel_err <= 1e-13

    def test_higher_order_has_no_reference(self):
        r = differentiate(DiffRequest("exp", 0j, 1e-3, backend=Backend.CENTRAL, order=2))
        assert r.reference is None

    def test_reference_at_pole(self):
        with pytest.raises(UndefinedReferenceError):
            differentiate(DiffRequest("ln", 0j))

    @pytest.mark.parametrize(
        "kwargs",
        [dict(h=0.0), dict(h=-1.0), dict(backend=Backend.CENTRAL, order=0), dict(backend=Backend.CSD)],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            DiffRequest("exp", 1j, **{"h": 1e-3, **kwargs})
