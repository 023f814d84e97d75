# -*- coding: utf-8 -*-

import math

import pytest
import numpy as np

from sierpinski.geometry import SQRT3, Point2
from sierpinski.schemes import (
    ArcsineDomainError, SineScheme, AutoSine, GasketScheme, Tent2D, ModTent2D,
    build_scheme, profile_function, step_tent2d, step_mod_tent2d, psi_term,
    step_auto_sine, gasket_project, gasket_term, tent, mod_tent,
)
from sierpinski.tests import assert_point_close


def test_tent():
    assert tent(0.5) == 1.5
    assert tent(0.0) == 0.0
    assert tent(1.0) == 0.0
    assert_point_close(step_tent2d(Point2(0.2, 0.7)), (0.6, 0.9))


def test_mod_tent():
    assert_point_close(step_mod_tent2d(Point2(0.4, 0.7)), (1.2, 0.9))
    # escaped values are folded back by 3 (v mod 1)
    assert_point_close(step_mod_tent2d(Point2(1.5, 1.5)), (1.5, 1.5))
    assert_point_close(step_mod_tent2d(Point2(0.5, 1.0)), (1.5, 0.0))
    values = np.array([0.25, 0.75, 1.25])
    np.testing.assert_allclose(mod_tent(values), [0.75, 0.75, 0.75])


class TestSineScheme(object):
    def test_amplitude(self):
        scheme = SineScheme(3, 3)
        assert scheme.amplitude == pytest.approx(2 / SQRT3)
        assert SineScheme(3, 2).amplitude == pytest.approx(1.0)

    def test_parameters(self):
        for a, b in [(1, 3), (3, 1), (3, 0.5), (float("nan"), 3)]:
            with pytest.raises(ValueError):
                SineScheme(a, b)

    def test_psi_term(self):
        scheme = SineScheme(3, 3)
        p = psi_term(scheme, Point2(0.5, 0.5), 1)
        assert_point_close(p, (1.1547005, 1.1547005))
        p = psi_term(scheme, Point2(1 / 6, 1 / 6), 1)
        assert_point_close(p, (0.5773503, 0.5773503))
        p = psi_term(scheme, Point2(1 / 6, 1 / 6), 2)
        assert_point_close(p, (1.1547005, 1.1547005))
        with pytest.raises(ValueError):
            psi_term(scheme, Point2(0.5, 0.5), 0)

    def test_psi_term_is_not_iterated(self):
        scheme = SineScheme(3, 3)
        p0 = Point2(0.3, 0.7)
        # the n-th term is the same whatever was computed before
        assert psi_term(scheme, p0, 4) == psi_term(scheme, p0, 4)
        direct = (
            scheme.amplitude * math.sin(math.pi * 27 * 0.3),
            scheme.amplitude * math.sin(math.pi * 27 * 0.7),
        )
        assert_point_close(psi_term(scheme, p0, 4), direct, tol=1e-12)


class TestAutoSine(object):
    def test_step(self):
        scheme = AutoSine(3, 3)
        assert_point_close(step_auto_sine(scheme, Point2(0.5, 0.0)), (1.125, 0.0))

    def test_outside_arcsine_domain(self):
        scheme = AutoSine(3, 3)
        with pytest.raises(ArcsineDomainError):
            step_auto_sine(scheme, Point2(1.2, 0.0))
        with pytest.raises(ValueError):
            step_auto_sine(scheme, Point2(0.0, -1.2))

    def test_step_arrays_nan_outside(self):
        scheme = AutoSine(3, 3)
        xs, ys = scheme.step_arrays(np.array([0.5, 1.2]), np.array([0.0, 0.0]))
        assert xs[0] == pytest.approx(1.125, abs=1e-7)
        assert np.isnan(xs[1])
        assert bool(scheme.violates(xs)[1])


class TestGasket(object):
    def test_project(self):
        assert_point_close(
            gasket_project(Point2(0, 0.5773503)), (0.2886751, 0.2886751, 0.5773503))
        assert_point_close(
            gasket_project(Point2(0.5, 0.8660254)), (0.8660254, 0.0, 0.8660254))

    def test_term(self):
        scheme = GasketScheme.classical()
        half = SQRT3 / 2
        assert_point_close(
            gasket_term(scheme, Point2(0, SQRT3 / 3), 1), (half, half, -half))
        assert_point_close(
            gasket_term(scheme, Point2(0, SQRT3 / 6), 2), (half, half, -half))
        with pytest.raises(ValueError):
            gasket_term(scheme, Point2(0, 0), 0)

    def test_profiles(self):
        scheme = GasketScheme("cos", "cos(x)^2", "tan", 2)
        assert scheme.alpha(0.0) == 1.0
        assert scheme.beta(0.0) == 1.0
        assert scheme.gamma(0.0) == 0.0
        assert profile_function("sin").text == "sin(x)"
        with pytest.raises(ValueError):
            profile_function("sin(y)")

    def test_frequency(self):
        scheme = GasketScheme.classical()
        assert scheme.frequency(1) == pytest.approx(4 * math.pi / SQRT3)
        assert scheme.frequency(3) == pytest.approx(4 * scheme.frequency(1))


def test_build_scheme():
    assert isinstance(build_scheme("tent"), Tent2D)
    assert isinstance(build_scheme("mod-tent"), ModTent2D)
    assert build_scheme("sine") == SineScheme(3, 3)
    assert build_scheme("auto-sine", a=4, b=4) == AutoSine(4, 4)
    gasket = build_scheme("gasket", a=4)
    assert gasket.a == 4.0
    assert gasket.alpha.text == "sin(x)"

    with pytest.raises(ValueError) as e:
        build_scheme("sien")
    assert "did you mean 'sine'" in str(e.value)
    with pytest.raises(ValueError) as e:
        build_scheme("sine", a=3, b=0)
    assert "param 'b' validation error" in str(e.value)


if __name__ == "__main__":
    import os

    basename = os.path.basename(__file__)
    pytest.main([basename, "-s", "--tb=native"])
