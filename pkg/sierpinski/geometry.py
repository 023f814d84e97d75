# -*- coding: utf-8 -*-

"""
Plane primitives, domains, raster grids and the escape index raster model.

A raster cell value of 0 means the cell center is a member of the k-th
approximation, ``n`` in ``[1..k]`` means it was excluded at stage ``n``
and ``k + 1`` is the sentinel for cells that lie outside the sampled
domain (gasket cells outside the triangle, mapped cells without a
preimage).
"""

import math
import typing

import attr
import numpy as np

SQRT3 = math.sqrt(3.0)

TRIANGLE_TOLERANCE = 1e-8
"""
absolute slack of the triangle membership test, so that vertices given
with rounded coordinates (``(0.5, 0.8660254)``) are still inside.
"""


def _finite(instance, attribute, value):
    if not math.isfinite(value):
        raise ValueError(
            "param '{}' validation error: {!r} is not finite!".format(
                attribute.name, value)
        )


@attr.s(frozen=True, slots=True)
class Point2(object):
    """
    A point of the plane.
    """
    x: float = attr.ib(converter=float, validator=_finite)
    y: float = attr.ib(converter=float, validator=_finite)

    def as_tuple(self) -> typing.Tuple[float, float]:
        return (self.x, self.y)


def _ordered_bounds(instance, attribute, value):
    if not (instance.x_min < instance.x_max):
        raise ValueError(
            "param 'domain' validation error: x_min {} must be < x_max {}!".format(
                instance.x_min, instance.x_max)
        )
    if not (instance.y_min < instance.y_max):
        raise ValueError(
            "param 'domain' validation error: y_min {} must be < y_max {}!".format(
                instance.y_min, instance.y_max)
        )


@attr.s(frozen=True, slots=True)
class RectDomain(object):
    """
    Axis aligned rectangle ``[x_min, x_max] x [y_min, y_max]``.
    """
    x_min: float = attr.ib(converter=float, validator=_finite)
    x_max: float = attr.ib(converter=float, validator=_finite)
    y_min: float = attr.ib(converter=float, validator=_finite)
    y_max: float = attr.ib(converter=float, validator=[_finite, _ordered_bounds])

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def contains(self, p: Point2, tol: float = 0.0) -> bool:
        return (
            (self.x_min - tol <= p.x <= self.x_max + tol)
            and (self.y_min - tol <= p.y <= self.y_max + tol)
        )

    def contains_array(self, xs: np.ndarray, ys: np.ndarray, tol: float = 0.0) -> np.ndarray:
        return (
            (xs >= self.x_min - tol) & (xs <= self.x_max + tol)
            & (ys >= self.y_min - tol) & (ys <= self.y_max + tol)
        )

    def padded(self, fraction: float) -> "RectDomain":
        dx = self.width * fraction
        dy = self.height * fraction
        return RectDomain(
            self.x_min - dx, self.x_max + dx, self.y_min - dy, self.y_max + dy,
        )

    @classmethod
    def parse(cls, text: str) -> "RectDomain":
        """
        Parse the ``x_min,x_max,y_min,y_max`` command line form.
        """
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 4:
            raise ValueError(
                "domain '{}' must have 4 comma separated numbers".format(text))
        try:
            values = [float(p) for p in parts]
        except ValueError:
            raise ValueError("domain '{}' has a non numeric bound".format(text))
        return cls(*values)

    def to_text(self) -> str:
        return "{!r},{!r},{!r},{!r}".format(
            self.x_min, self.x_max, self.y_min, self.y_max)


UNIT_SQUARE = RectDomain(0.0, 1.0, 0.0, 1.0)

TRIANGLE_BOX = RectDomain(-0.5, 0.5, 0.0, SQRT3 / 2.0)
"""
bounding box of the unit equilateral triangle.
"""


def in_triangle(p: Point2) -> bool:
    """
    True iff ``-y/sqrt(3) <= x <= y/sqrt(3)`` and ``0 <= y <= sqrt(3)/2``.
    """
    return bool(in_triangle_array(np.float64(p.x), np.float64(p.y)))


def in_triangle_array(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    bound = ys / SQRT3
    tol = TRIANGLE_TOLERANCE
    return (
        (xs >= -bound - tol) & (xs <= bound + tol)
        & (ys >= -tol) & (ys <= SQRT3 / 2.0 + tol)
    )


@attr.s(frozen=True, slots=True)
class TriangleDomain(object):
    """
    The fixed unit equilateral triangle with vertices
    ``(0, 0)``, ``(-1/2, sqrt(3)/2)``, ``(1/2, sqrt(3)/2)``.
    """

    @property
    def vertices(self) -> typing.Tuple[Point2, Point2, Point2]:
        return (
            Point2(0.0, 0.0),
            Point2(-0.5, SQRT3 / 2.0),
            Point2(0.5, SQRT3 / 2.0),
        )

    @property
    def centroid(self) -> Point2:
        return Point2(0.0, SQRT3 / 3.0)

    @property
    def bounding_box(self) -> RectDomain:
        return TRIANGLE_BOX

    def contains(self, p: Point2) -> bool:
        return in_triangle(p)


def _positive_int(instance, attribute, value):
    if value < 1:
        raise ValueError(
            "param '{}' validation error: {} must be >= 1!".format(
                attribute.name, value)
        )


@attr.s(frozen=True, slots=True)
class GridSpec(object):
    """
    A raster of ``width x height`` cells laid over ``domain``.
    Row ``j = 0`` is the row of minimal y.
    """
    domain: RectDomain = attr.ib(validator=attr.validators.instance_of(RectDomain))
    width: int = attr.ib(converter=int, validator=_positive_int)
    height: int = attr.ib(converter=int, validator=_positive_int)

    @property
    def shape(self) -> typing.Tuple[int, int]:
        """numpy shape, ``(rows, columns)``"""
        return (self.height, self.width)

    @property
    def dx(self) -> float:
        return (self.domain.x_max - self.domain.x_min) / self.width

    @property
    def dy(self) -> float:
        return (self.domain.y_max - self.domain.y_min) / self.height

    def x_centers(self) -> np.ndarray:
        return self.domain.x_min + (np.arange(self.width) + 0.5) * self.dx

    def y_centers(self) -> np.ndarray:
        return self.domain.y_min + (np.arange(self.height) + 0.5) * self.dy

    def centers(self) -> typing.Tuple[np.ndarray, np.ndarray]:
        """
        Cell centers as two ``(height, width)`` arrays, same arithmetic as
        :func:`cell_center`.
        """
        return np.meshgrid(self.x_centers(), self.y_centers())

    @staticmethod
    def parse_size(text: str) -> typing.Tuple[int, int]:
        """
        Parse the ``WxH`` command line form.
        """
        parts = str(text).lower().split("x")
        if len(parts) != 2:
            raise ValueError("grid '{}' must look like WIDTHxHEIGHT".format(text))
        try:
            width, height = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError("grid '{}' must look like WIDTHxHEIGHT".format(text))
        if width < 1 or height < 1:
            raise ValueError("grid '{}' must have positive sizes".format(text))
        return width, height


def cell_center(spec: GridSpec, i: int, j: int) -> Point2:
    """
    Midpoint of cell ``(i, j)``, ``i`` is the column, ``j`` the row.
    """
    if not (0 <= i < spec.width):
        raise IndexError("column {} out of range [0, {})".format(i, spec.width))
    if not (0 <= j < spec.height):
        raise IndexError("row {} out of range [0, {})".format(j, spec.height))
    return Point2(
        spec.domain.x_min + (i + 0.5) * spec.dx,
        spec.domain.y_min + (j + 0.5) * spec.dy,
    )


def _positive_depth(instance, attribute, value):
    if value < 1:
        raise ValueError(
            "param 'depth' validation error: {} must be >= 1!".format(value))


@attr.s(frozen=True, slots=True, eq=False)
class MembershipGrid(object):
    """
    The k-th approximation of a fractal sampled on ``spec``.

    ``cells[j, i]`` is the escape index of the center of cell ``(i, j)``.
    """
    spec: GridSpec = attr.ib(validator=attr.validators.instance_of(GridSpec))
    depth: int = attr.ib(converter=int, validator=_positive_depth)
    cells: np.ndarray = attr.ib()

    @cells.validator
    def _check_cells(self, attribute, value):
        if not isinstance(value, np.ndarray):
            raise TypeError("param 'cells' validation error: not a numpy array!")
        if value.shape != self.spec.shape:
            raise ValueError(
                "param 'cells' validation error: shape {} != {}!".format(
                    value.shape, self.spec.shape)
            )
        if value.size and (value.min() < 0 or value.max() > self.depth + 1):
            raise ValueError(
                "param 'cells' validation error: values outside [0, {}]!".format(
                    self.depth + 1)
            )

    @property
    def sentinel(self) -> int:
        return self.depth + 1

    @property
    def members(self) -> np.ndarray:
        return self.cells == 0

    @property
    def outside(self) -> np.ndarray:
        return self.cells == self.sentinel

    @property
    def member_count(self) -> int:
        return int(np.count_nonzero(self.members))

    def value_at(self, i: int, j: int) -> int:
        return int(self.cells[j, i])

    def same_cells(self, other: "MembershipGrid") -> bool:
        return (
            self.depth == other.depth
            and self.cells.shape == other.cells.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    def member_centers(self) -> typing.List[Point2]:
        """
        Centers of all member cells in row-major order.
        """
        xs, ys = self.spec.centers()
        mask = self.members
        return [Point2(x, y) for x, y in zip(xs[mask], ys[mask])]
