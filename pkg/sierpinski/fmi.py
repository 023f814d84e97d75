# -*- coding: utf-8 -*-

"""
Fractal mapping iteration.

A fractal mapped by an invertible plane map ``Phi`` is built by running
the escape iteration on the preimage of every target point, so the
resulting set is ``Phi(F)``. Forward-only maps are handled by mapping the
member cell centers (point clouds) instead.

Usage::

    >>> from sierpinski.fmi import get_map, mapped_membership_grid
    >>> phi = get_map("sumsq")
    >>> target = GridSpec(default_target_domain(phi), 243, 243)
    >>> grid = mapped_membership_grid(
    ...     phi, ModTent2D(), EscapeCriterion.BothSimultaneous, target, 4)
"""

import typing
import logging

import attr
import numpy as np

from .geometry import (
    Point2, RectDomain, GridSpec, MembershipGrid, UNIT_SQUARE,
)
from .helpers import unknown_name_message
from .mapexpr import MapDef, parse_map, evaluate_array
from .schemes import (
    Scheme, EscapeCriterion, DOMAIN_TOLERANCE,
    escape_indices, membership_grid,
)
from .analysis import GridComparison, compare_grids

logger = logging.getLogger(__name__)

OUTSIDE = "outside"
"""
returned by :func:`mapped_escape_index` for target points without a
preimage in the scheme's domain.
"""

TARGET_LATTICE_SIZE = 64
"""
points per side of the boundary-inclusive lattice used to guess ``D'``.
"""

TARGET_PADDING = 0.05
"""
relative padding of the default ``D'`` bounding box.
"""

MappedGridSpec = GridSpec
"""
a raster over the mapped domain ``D'``, same contract as :class:`GridSpec`.
"""

ArrayMap = typing.Callable[[np.ndarray, np.ndarray], typing.Tuple[np.ndarray, np.ndarray]]


class NoInverseError(ValueError):
    pass


class OutsideImageError(ValueError):
    """
    The point has no preimage, it is not in ``D'``.
    """


class MapEvaluationError(ValueError):
    def __init__(self, message: str, point: Point2):
        super(MapEvaluationError, self).__init__(message)
        self.point = point


@attr.s(frozen=True)
class PlaneMap(object):
    """
    A plane map ``Phi = (phi1, phi2)`` with an optional inverse
    ``(phi3, phi4)``. Both callables work on numpy arrays and return NaN
    where the formula is undefined.

    :param text: the expression form of the map, when it has one.
    """
    name: str = attr.ib()
    forward: ArrayMap = attr.ib()
    inverse: typing.Optional[ArrayMap] = attr.ib(default=None)
    text: str = attr.ib(default="")
    domain: RectDomain = attr.ib(default=UNIT_SQUARE)

    @property
    def invertible(self) -> bool:
        return self.inverse is not None


def _scalar(fn: ArrayMap, p: Point2) -> typing.Tuple[float, float]:
    with np.errstate(all="ignore"):
        xs, ys = fn(np.array([p.x]), np.array([p.y]))
    return float(xs[0]), float(ys[0])


def apply_forward(phi: PlaneMap, p: Point2) -> Point2:
    x, y = _scalar(phi.forward, p)
    if not (np.isfinite(x) and np.isfinite(y)):
        raise MapEvaluationError(
            "map '{}' cannot be evaluated at {}".format(phi.name, p.as_tuple()), p)
    return Point2(x, y)


def apply_inverse(phi: PlaneMap, q: Point2) -> Point2:
    if not phi.invertible:
        raise NoInverseError("map '{}' has no inverse".format(phi.name))
    x, y = _scalar(phi.inverse, q)
    if not (np.isfinite(x) and np.isfinite(y)):
        raise OutsideImageError(
            "{} is not in D' of map '{}'".format(q.as_tuple(), phi.name))
    return Point2(x, y)


# --- built-in maps ---
def _identity(xs, ys):
    return np.array(xs, dtype=np.float64), np.array(ys, dtype=np.float64)


def _sumsq(xs, ys):
    return xs ** 2 + ys ** 2, xs - ys


def _sumsq_inverse(xs, ys):
    with np.errstate(invalid="ignore"):
        y = (-ys + np.sqrt(2 * xs - ys ** 2)) / 2
    return y + ys, y


def _sincos(xs, ys):
    return np.sin(xs) + ys, np.cos(xs)


def _sincos_inverse(xs, ys):
    with np.errstate(invalid="ignore"):
        return np.arccos(ys), xs - np.sqrt(1 - ys ** 2)


def _quadratic(xs, ys):
    return xs ** 2 - ys, xs + ys ** 2


def _cuberoot(xs, ys):
    return xs + ys ** 2, xs - 2 * np.cbrt(ys ** 2)


def _shear(xs, ys):
    return xs + 0.3 * ys, ys + 0.1 * np.sin(xs)


BUILTIN_MAP_TEXTS = {
    "identity": "x, y | x, y",
    "sumsq": "x^2+y^2, x-y | (-y+sqrt(2*x-y^2))/2+y, (-y+sqrt(2*x-y^2))/2",
    "sincos": "sin(x)+y, cos(x) | acos(y), x-sqrt(1-y^2)",
    "quadratic": "x^2-y, x+y^2",
    "cuberoot": "x+y^2, x-2*cbrt(y^2)",
    "shear": "x+0.3*y, y+0.1*sin(x)",
}
"""
the expression form of every registered map, inverse after ``|``.
"""

_NATIVE = {
    "identity": (_identity, _identity),
    "sumsq": (_sumsq, _sumsq_inverse),
    "sincos": (_sincos, _sincos_inverse),
    "quadratic": (_quadratic, None),
    "cuberoot": (_cuberoot, None),
    "shear": (_shear, None),
}

MAP_NAMES = tuple(list(_NATIVE) + ["affine"])


def affine_map(a: float, b: float, c: float, d: float, e: float, f: float) -> PlaneMap:
    """
    ``(a x + b y + e, c x + d y + f)``, invertible unless ``a d - b c = 0``.
    """
    def forward(xs, ys):
        return a * xs + b * ys + e, c * xs + d * ys + f

    det = a * d - b * c
    inverse = None
    if det != 0:
        def inverse(xs, ys):
            u, v = xs - e, ys - f
            return (d * u - b * v) / det, (-c * u + a * v) / det

    text = "{a!r}*x+{b!r}*y+{e!r}, {c!r}*x+{d!r}*y+{f!r}".format(
        a=a, b=b, c=c, d=d, e=e, f=f)
    return PlaneMap(name="affine", forward=forward, inverse=inverse, text=text)


def map_from_def(map_def: MapDef) -> PlaneMap:
    """
    Wrap an expression map, domain errors evaluate to NaN.
    """
    def compile_pair(pair):
        first, second = pair

        def fn(xs, ys):
            env = dict(x=np.asarray(xs, dtype=np.float64), y=np.asarray(ys, dtype=np.float64))
            return evaluate_array(first, env), evaluate_array(second, env)

        return fn

    return PlaneMap(
        name=map_def.name,
        forward=compile_pair(map_def.forward),
        inverse=compile_pair(map_def.inverse) if map_def.invertible else None,
        text=map_def.text,
    )


def builtin_map(name: str) -> PlaneMap:
    forward, inverse = _NATIVE[name]
    return PlaneMap(
        name=name, forward=forward, inverse=inverse, text=BUILTIN_MAP_TEXTS[name],
    )


def get_map(name_or_text: str) -> PlaneMap:
    """
    Resolve a registry name (``"sumsq"``), an affine map
    (``"affine:a,b,c,d,e,f"``) or an expression map
    (``"x/2, y/2 | 2*x, 2*y"``).
    """
    text = name_or_text.strip()
    if text in _NATIVE:
        return builtin_map(text)
    if text.startswith("affine:"):
        try:
            coefficients = [float(v) for v in text[len("affine:"):].split(",")]
        except ValueError:
            raise ValueError("affine map '{}' has a non numeric coefficient".format(text))
        if len(coefficients) != 6:
            raise ValueError("affine map '{}' needs 6 coefficients a,b,c,d,e,f".format(text))
        return affine_map(*coefficients)
    if "," in text:
        return map_from_def(parse_map(text))
    raise ValueError(unknown_name_message("map", text, MAP_NAMES))


# --- mapped sets ---
def default_target_domain(phi: PlaneMap, domain: RectDomain = UNIT_SQUARE) -> RectDomain:
    """
    Bounding box of the images of a boundary-inclusive lattice on
    ``domain``, padded by :data:`TARGET_PADDING`.
    """
    xs, ys = np.meshgrid(
        np.linspace(domain.x_min, domain.x_max, TARGET_LATTICE_SIZE),
        np.linspace(domain.y_min, domain.y_max, TARGET_LATTICE_SIZE),
    )
    with np.errstate(all="ignore"):
        fx, fy = phi.forward(xs.ravel(), ys.ravel())
    ok = np.isfinite(fx) & np.isfinite(fy)
    if not ok.any():
        raise MapEvaluationError(
            "map '{}' is undefined on the whole lattice".format(phi.name),
            Point2(domain.x_min, domain.y_min),
        )
    box_x_min, box_x_max = fx[ok].min(), fx[ok].max()
    box_y_min, box_y_max = fy[ok].min(), fy[ok].max()
    # a degenerate image still needs a proper rectangle
    if box_x_max - box_x_min <= 0:
        box_x_min, box_x_max = box_x_min - 0.5, box_x_max + 0.5
    if box_y_max - box_y_min <= 0:
        box_y_min, box_y_max = box_y_min - 0.5, box_y_max + 0.5
    return RectDomain(box_x_min, box_x_max, box_y_min, box_y_max).padded(TARGET_PADDING)


def _require_inverse(phi: PlaneMap):
    if not phi.invertible:
        raise NoInverseError("map '{}' has no inverse".format(phi.name))


def mapped_escape_index(
    phi: PlaneMap,
    scheme: Scheme,
    criterion: typing.Optional[EscapeCriterion],
    q0: Point2,
    k: int,
) -> typing.Union[int, None, str]:
    """
    Escape index of the preimage of ``q0``; :data:`OUTSIDE` when ``q0``
    has no preimage in the scheme's domain.
    """
    _require_inverse(phi)
    try:
        p0 = apply_inverse(phi, q0)
    except OutsideImageError:
        return OUTSIDE
    inside = scheme.domain_contains(np.array([p0.x]), np.array([p0.y]), DOMAIN_TOLERANCE)
    if not inside[0]:
        return OUTSIDE
    index = int(escape_indices(scheme, criterion, np.array([p0.x]), np.array([p0.y]), k)[0])
    return index or None


def mapped_membership_grid(
    phi: PlaneMap,
    scheme: Scheme,
    criterion: typing.Optional[EscapeCriterion],
    spec: MappedGridSpec,
    k: int,
) -> MembershipGrid:
    """
    Raster of :func:`mapped_escape_index` over the cell centers of ``D'``,
    cells without a preimage hold the sentinel ``k + 1``.
    """
    _require_inverse(phi)
    logger.debug("mapped grid '%s' %dx%d depth %d", phi.name, spec.width, spec.height, k)
    qx, qy = spec.centers()
    with np.errstate(all="ignore"):
        px, py = phi.inverse(qx, qy)
    px = np.broadcast_to(np.asarray(px, dtype=np.float64), qx.shape)
    py = np.broadcast_to(np.asarray(py, dtype=np.float64), qx.shape)
    valid = np.isfinite(px) & np.isfinite(py)
    valid[valid] = scheme.domain_contains(px[valid], py[valid], DOMAIN_TOLERANCE)
    cells = np.full(qx.shape, k + 1, dtype=np.int32)
    cells[valid] = escape_indices(scheme, criterion, px[valid], py[valid], k)
    return MembershipGrid(spec=spec, depth=k, cells=cells)


@attr.s(frozen=True)
class PointFailure(object):
    point: Point2 = attr.ib()
    message: str = attr.ib()


@attr.s(frozen=True)
class ForwardImage(object):
    """
    Images of member cell centers, failures are reported with their
    source point.
    """
    points: typing.List[Point2] = attr.ib()
    failures: typing.List[PointFailure] = attr.ib(factory=list)


def _map_points(phi: PlaneMap, xs: np.ndarray, ys: np.ndarray):
    with np.errstate(all="ignore"):
        fx, fy = phi.forward(xs, ys)
    fx = np.broadcast_to(np.asarray(fx, dtype=np.float64), xs.shape)
    fy = np.broadcast_to(np.asarray(fy, dtype=np.float64), xs.shape)
    ok = np.isfinite(fx) & np.isfinite(fy)
    return fx, fy, ok


def _image(phi: PlaneMap, xs: np.ndarray, ys: np.ndarray) -> ForwardImage:
    fx, fy, ok = _map_points(phi, xs, ys)
    points = [Point2(x, y) for x, y in zip(fx[ok], fy[ok])]
    failures = [
        PointFailure(
            Point2(x, y),
            "map '{}' cannot be evaluated at {}".format(phi.name, (x, y)),
        )
        for x, y in zip(xs[~ok], ys[~ok])
    ]
    if failures:
        logger.warning("map '%s' failed on %d point(s)", phi.name, len(failures))
    return ForwardImage(points=points, failures=failures)


def forward_image_points(phi: PlaneMap, grid: MembershipGrid) -> ForwardImage:
    """
    Apply ``phi`` to the center of every member cell, row-major order.
    """
    xs, ys = grid.spec.centers()
    mask = grid.members
    return _image(phi, xs[mask], ys[mask])


@attr.s(frozen=True)
class Orbit(object):
    """
    ``sets[i]`` is ``S_i = Phi^i(S_0)``, ``failures[i]`` the points of
    ``S_(i-1)`` that could not be mapped.
    """
    sets: typing.List[typing.List[Point2]] = attr.ib()
    failures: typing.List[typing.List[PointFailure]] = attr.ib()


def discrete_orbit(phi: PlaneMap, points: typing.Sequence[Point2], m: int) -> Orbit:
    if m < 0:
        raise ValueError("param 'm' validation error: {} must be >= 0!".format(m))
    sets = [list(points)]
    failures = [list()]
    for _ in range(m):
        current = sets[-1]
        xs = np.array([p.x for p in current], dtype=np.float64)
        ys = np.array([p.y for p in current], dtype=np.float64)
        image = _image(phi, xs, ys)
        sets.append(image.points)
        failures.append(image.failures)
    return Orbit(sets=sets, failures=failures)


def rasterize_points(
    xs: np.ndarray,
    ys: np.ndarray,
    spec: GridSpec,
    depth: int = 1,
) -> MembershipGrid:
    """
    Bin points into the cells of ``spec``: a cell is a member (0) when at
    least one point lands in it, otherwise 1. Points off the grid are
    ignored.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    cells = np.ones(spec.shape, dtype=np.int32)
    with np.errstate(invalid="ignore"):
        i = np.floor((xs - spec.domain.x_min) / spec.dx)
        j = np.floor((ys - spec.domain.y_min) / spec.dy)
    ok = (i >= 0) & (i < spec.width) & (j >= 0) & (j < spec.height)
    cells[j[ok].astype(np.intp), i[ok].astype(np.intp)] = 0
    return MembershipGrid(spec=spec, depth=depth, cells=cells)


QUAD_TOLERANCE = 1e-9
"""
slack, in target cell units, of the point-in-quadrilateral test.
"""


def _cell_corners(spec: GridSpec) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Corner lattice of ``spec``, shape ``(height + 1, width + 1)``.
    """
    xs = spec.domain.x_min + np.arange(spec.width + 1) * spec.dx
    ys = spec.domain.y_min + np.arange(spec.height + 1) * spec.dy
    return np.meshgrid(xs, ys)


def _fill_quads(qx: np.ndarray, qy: np.ndarray, spec: GridSpec, cells: np.ndarray):
    """
    Set to 0 every cell of ``spec`` whose center lies in one of the
    quadrilaterals ``(qx[m], qy[m])``, corners in boundary order.
    """
    # target cell units, centers on the integers
    u = (qx - spec.domain.x_min) / spec.dx - 0.5
    v = (qy - spec.domain.y_min) / spec.dy - 0.5
    i0 = np.clip(np.ceil(u.min(axis=1) - QUAD_TOLERANCE), 0, spec.width).astype(np.intp)
    i1 = np.clip(np.floor(u.max(axis=1) + QUAD_TOLERANCE), -1, spec.width - 1).astype(np.intp)
    j0 = np.clip(np.ceil(v.min(axis=1) - QUAD_TOLERANCE), 0, spec.height).astype(np.intp)
    j1 = np.clip(np.floor(v.max(axis=1) + QUAD_TOLERANCE), -1, spec.height - 1).astype(np.intp)
    keep = (i1 >= i0) & (j1 >= j0)
    if not keep.any():
        return
    u, v, i0, i1, j0, j1 = u[keep], v[keep], i0[keep], i1[keep], j0[keep], j1[keep]
    du = np.roll(u, -1, axis=1) - u
    dv = np.roll(v, -1, axis=1) - v
    for di in range(int((i1 - i0).max()) + 1):
        for dj in range(int((j1 - j0).max()) + 1):
            pi, pj = i0 + di, j0 + dj
            sel = (pi <= i1) & (pj <= j1)
            cross = (
                du[sel] * (pj[sel][:, None] - v[sel])
                - dv[sel] * (pi[sel][:, None] - u[sel])
            )
            inside = (
                (cross >= -QUAD_TOLERANCE).all(axis=1)
                | (cross <= QUAD_TOLERANCE).all(axis=1)
            )
            cells[pj[sel][inside], pi[sel][inside]] = 0


def forward_image_grid(phi: PlaneMap, grid: MembershipGrid, spec: MappedGridSpec) -> MembershipGrid:
    """
    Rasterized forward image of the members of ``grid`` on ``spec``.

    Every member cell is mapped as the quadrilateral spanned by its mapped
    corners, and a cell of ``spec`` is a member when its center lies in
    one of them. Cells with a corner the map cannot evaluate fall back to
    binning their mapped center.
    """
    mask = grid.members
    cx, cy = _cell_corners(grid.spec)
    fx, fy, ok = _map_points(phi, cx, cy)
    corner_ok = ok[:-1, :-1] & ok[:-1, 1:] & ok[1:, 1:] & ok[1:, :-1]
    quads = mask & corner_ok

    def corners(values):
        return np.stack([
            values[:-1, :-1][quads], values[:-1, 1:][quads],
            values[1:, 1:][quads], values[1:, :-1][quads],
        ], axis=1)

    cells = np.ones(spec.shape, dtype=np.int32)
    _fill_quads(corners(fx), corners(fy), spec, cells)

    rest = mask & ~corner_ok
    if rest.any():
        xs, ys = grid.spec.centers()
        px, py, pok = _map_points(phi, xs[rest], ys[rest])
        binned = rasterize_points(px[pok], py[pok], spec)
        cells[binned.members] = 0
    return MembershipGrid(spec=spec, depth=grid.depth, cells=cells)


def verify_pushforward(
    phi: PlaneMap,
    scheme: Scheme,
    criterion: typing.Optional[EscapeCriterion],
    spec: GridSpec,
    target: MappedGridSpec,
    k: int,
    slack: int = 0,
) -> GridComparison:
    """
    Compare the rasterized forward image of the k-th approximation with the
    set built by the mapping iteration on ``target``. Both describe
    ``Phi(F_k)``, so the agreement is 1.0 up to rasterization.

    :param slack: cells of boundary tolerance, the default compares exactly.
    """
    _require_inverse(phi)
    source = membership_grid(scheme, criterion, spec, k)
    pushed = forward_image_grid(phi, source, target)
    mapped = mapped_membership_grid(phi, scheme, criterion, target, k)
    report = compare_grids(pushed, mapped, slack=slack)
    logger.info("pushforward of '%s': agreement %.6f", phi.name, report.agreement)
    return report
