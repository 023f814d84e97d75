# -*- coding: utf-8 -*-

import pytest
import numpy as np

from sierpinski.geometry import SQRT3, Point2
from sierpinski.schemes import (
    EscapeCriterion, Tent2D, ModTent2D, SineScheme, AutoSine, GasketScheme,
    escape_index, escape_indices,
)

BOTH = EscapeCriterion.BothSimultaneous


class TestCarpetEscape(object):
    def test_mod_tent(self):
        scheme = ModTent2D()
        assert escape_index(scheme, BOTH, Point2(0.5, 0.5), 6) == 1
        assert escape_index(scheme, BOTH, Point2(1 / 6, 1 / 2), 6) == 2
        assert escape_index(scheme, BOTH, Point2(1 / 6, 0), 6) is None
        assert escape_index(scheme, BOTH, Point2(0, 0), 6) is None

    def test_depth_bounds_index(self):
        scheme = ModTent2D()
        assert escape_index(scheme, BOTH, Point2(1 / 6, 1 / 2), 1) is None
        assert escape_index(scheme, BOTH, Point2(1 / 6, 1 / 2), 2) == 2

    def test_sine(self):
        scheme = SineScheme(3, 3)
        assert escape_index(scheme, BOTH, Point2(1 / 6, 1 / 6), 6) == 2
        assert escape_index(scheme, BOTH, Point2(0.5, 0.5), 6) == 1

    def test_auto_sine(self):
        scheme = AutoSine(3, 3)
        assert escape_index(scheme, BOTH, Point2(0.0, 0.0), 6) is None
        # x leaves at stage 1, y never does
        assert escape_index(scheme, EscapeCriterion.AnyCoordinate, Point2(0.5, 0.0), 6) == 1
        assert escape_index(scheme, BOTH, Point2(0.5, 0.0), 6) is None

    def test_criteria(self):
        scheme = Tent2D()
        p = Point2(0.5, 0.2)
        assert escape_index(scheme, EscapeCriterion.AnyCoordinate, p, 4) == 1
        # tent(0.2) = 0.6, tent(0.6) = 1.2: y escapes at stage 2, x at stage 1
        assert escape_index(scheme, EscapeCriterion.BothEventually, p, 4) == 2
        assert escape_index(scheme, BOTH, p, 4) is None

    def test_errors(self):
        with pytest.raises(ValueError):
            escape_index(ModTent2D(), BOTH, Point2(1.5, 0.5), 3)
        with pytest.raises(ValueError):
            escape_index(ModTent2D(), BOTH, Point2(0.5, 0.5), 0)
        with pytest.raises(ValueError):
            escape_index(ModTent2D(), None, Point2(0.5, 0.5), 3)
        with pytest.raises(TypeError):
            escape_index(ModTent2D(), "both-simultaneous", Point2(0.5, 0.5), 3)

    def test_rounded_boundary_points_are_inside(self):
        assert escape_index(ModTent2D(), BOTH, Point2(1 + 1e-12, 0.0), 3) is None


class TestGasketEscape(object):
    def test_classical(self):
        scheme = GasketScheme.classical()
        assert escape_index(scheme, None, Point2(0, 0), 10) is None
        assert escape_index(scheme, None, Point2(0, SQRT3 / 3), 10) == 1
        assert escape_index(scheme, None, Point2(0, SQRT3 / 6), 10) == 2

    def test_outside_triangle(self):
        with pytest.raises(ValueError):
            escape_index(GasketScheme.classical(), None, Point2(0.4, 0.1), 3)

    def test_criterion_rejected(self):
        scheme = GasketScheme.classical()
        with pytest.raises(ValueError) as e:
            escape_index(scheme, BOTH, Point2(0, SQRT3 / 3), 3)
        assert "criterion" in str(e.value)
        with pytest.raises(ValueError):
            escape_indices(scheme, BOTH, np.array([0.0]), np.array([0.5]), 3)


def test_escape_indices_vectorized():
    scheme = ModTent2D()
    xs = np.array([0.5, 1 / 6, 1 / 6])
    ys = np.array([0.5, 0.5, 0.0])
    assert escape_indices(scheme, BOTH, xs, ys, 6).tolist() == [1, 2, 0]
    assert escape_indices(scheme, BOTH, np.array([]), np.array([]), 6).size == 0


if __name__ == "__main__":
    import os

    basename = os.path.basename(__file__)
    pytest.main([basename, "-s", "--tb=native"])
