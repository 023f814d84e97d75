# -*- coding: utf-8 -*-

import math

import numpy as np

from sierpinski.geometry import Point2, GridSpec, UNIT_SQUARE
from sierpinski.schemes import EscapeCriterion, ModTent2D, membership_grid


def assert_point_close(actual, expected, tol=1e-7):
    """
    Assert that two points (or tuples) agree coordinate by coordinate.
    """
    if isinstance(actual, Point2):
        actual = actual.as_tuple()
    if isinstance(expected, Point2):
        expected = expected.as_tuple()
    assert len(actual) == len(expected)
    for a, e in zip(actual, expected):
        assert abs(a - e) <= tol, "{} != {} (tol {})".format(actual, expected, tol)


def assert_subset(small, large):
    """
    Assert that every member cell of ``small`` is a member cell of ``large``.
    """
    assert not np.any(small.members & ~large.members)


def unit_grid(n: int) -> GridSpec:
    return GridSpec(UNIT_SQUARE, n, n)


def in_carpet(ix: int, iy: int, k: int) -> bool:
    """
    Brute force ternary digit test of lattice cell ``(ix, iy)`` at depth ``k``.
    """
    for _ in range(k):
        if ix % 3 == 1 and iy % 3 == 1:
            return False
        ix //= 3
        iy //= 3
    return True


def circle_points(n: int, radius: float = 1.0):
    return [
        Point2(radius * math.cos(2 * math.pi * i / n), radius * math.sin(2 * math.pi * i / n))
        for i in range(n)
    ]


class CarpetBaseTest(object):
    """
    Shares one classical carpet raster between the tests of a class.
    """
    depth = 4
    size = 81
    grid = None

    @classmethod
    def setup_class(cls):
        cls.grid = membership_grid(
            ModTent2D(), EscapeCriterion.BothSimultaneous, unit_grid(cls.size), cls.depth,
        )
