# -*- coding: utf-8 -*-

"""
Independent checks of the escape schemes: IFS oracles for the classical
carpet and gasket, box counting dimension, raster comparison and an
empirical bi-Lipschitz estimate.
"""

import math
import typing

import attr
import numpy as np
from scipy import ndimage
from scipy.stats import linregress, qmc

from .geometry import (
    SQRT3, RectDomain, GridSpec, MembershipGrid, UNIT_SQUARE, in_triangle_array,
)

LOW_DISCREPANCY_SEED = 20140817
"""
fixed seed of the scrambled Halton sequence used for pair sampling.
"""

CARPET = "carpet"
GASKET = "gasket"
IFS_TAGS = (CARPET, GASKET)


@attr.s(frozen=True)
class AffineMap(object):
    """
    ``p -> matrix @ p + offset``.
    """
    matrix: typing.Tuple[typing.Tuple[float, float], typing.Tuple[float, float]] = attr.ib()
    offset: typing.Tuple[float, float] = attr.ib()

    def apply(self, xs: np.ndarray, ys: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
        (a, b), (c, d) = self.matrix
        return a * xs + b * ys + self.offset[0], c * xs + d * ys + self.offset[1]

    @property
    def ratio(self) -> float:
        return float(np.linalg.norm(np.array(self.matrix), 2))


@attr.s(frozen=True)
class IfsSpec(object):
    tag: str = attr.ib()
    maps: typing.Tuple[AffineMap, ...] = attr.ib(converter=tuple)

    @maps.validator
    def _check_contractions(self, attribute, value):
        for m in value:
            if not (m.ratio < 1.0):
                raise ValueError("map {} is not a contraction".format(m))


def _carpet_ifs() -> IfsSpec:
    third = 1.0 / 3.0
    maps = [
        AffineMap(((third, 0.0), (0.0, third)), (dx * third, dy * third))
        for dy in range(3)
        for dx in range(3)
        if (dx, dy) != (1, 1)
    ]
    return IfsSpec(CARPET, maps)


def _gasket_ifs() -> IfsSpec:
    half = ((0.5, 0.0), (0.0, 0.5))
    return IfsSpec(GASKET, [
        AffineMap(half, (0.0, 0.0)),
        AffineMap(half, (-0.25, SQRT3 / 4.0)),
        AffineMap(half, (0.25, SQRT3 / 4.0)),
    ])


CARPET_IFS = _carpet_ifs()
"""
8 maps of ratio 1/3 on the unit square.
"""

GASKET_IFS = _gasket_ifs()
"""
3 maps of ratio 1/2 on the unit triangle, map ``i`` is address digit ``i``.
"""


def get_ifs(tag: str) -> IfsSpec:
    if tag == CARPET:
        return CARPET_IFS
    if tag == GASKET:
        return GASKET_IFS
    raise ValueError("unknown fractal tag '{}', choose from: {}".format(
        tag, ", ".join(IFS_TAGS)))


@attr.s(frozen=True)
class CellSet(object):
    """
    Depth ``k`` cells of an IFS attractor. Carpet cells are ``(ix, iy)``
    indices on the ``3^k`` lattice, gasket cells are address strings over
    ``{0, 1, 2}``, outermost map first.
    """
    tag: str = attr.ib()
    depth: int = attr.ib()
    cells: frozenset = attr.ib(converter=frozenset)

    def __len__(self):
        return len(self.cells)

    def truncated(self, depth: int) -> "CellSet":
        if self.tag == CARPET:
            scale = 3 ** (self.depth - depth)
            cells = {(ix // scale, iy // scale) for ix, iy in self.cells}
        else:
            cells = {address[:depth] for address in self.cells}
        return CellSet(self.tag, depth, cells)


def ifs_cells(tag: str, k: int) -> CellSet:
    """
    Hutchinson iteration of the tagged IFS to depth ``k``.
    """
    if k < 0:
        raise ValueError("param 'k' validation error: {} must be >= 0!".format(k))
    ifs = get_ifs(tag)
    if tag == CARPET:
        digits = [
            (int(round(m.offset[0] * 3)), int(round(m.offset[1] * 3)))
            for m in ifs.maps
        ]
        cells = {(0, 0)}
        for level in range(k):
            scale = 3 ** level
            cells = {
                (ix + dx * scale, iy + dy * scale)
                for dx, dy in digits
                for ix, iy in cells
            }
    else:
        cells = {""}
        for _ in range(k):
            cells = {str(i) + address for i in range(len(ifs.maps)) for address in cells}
    return CellSet(tag, k, cells)


def _carpet_codes(cells: CellSet, spec: GridSpec) -> typing.Tuple[np.ndarray, np.ndarray]:
    n = 3 ** cells.depth
    xs, ys = spec.centers()
    inside = UNIT_SQUARE.contains_array(xs, ys)
    ix = np.clip(np.floor(xs * n), 0, n - 1).astype(np.int64)
    iy = np.clip(np.floor(ys * n), 0, n - 1).astype(np.int64)
    codes = iy * n + ix
    member_codes = np.array([iy_ * n + ix_ for ix_, iy_ in cells.cells], dtype=np.int64)
    return np.isin(codes, member_codes) & inside, inside


def _gasket_codes(cells: CellSet, spec: GridSpec) -> typing.Tuple[np.ndarray, np.ndarray]:
    k = cells.depth
    n = 2 ** k
    xs, ys = spec.centers()
    inside = in_triangle_array(xs, ys)
    u = np.clip(xs + ys / SQRT3, 0.0, 1.0) * n
    v = np.clip(-xs + ys / SQRT3, 0.0, 1.0) * n
    big_u = np.clip(np.floor(u), 0, n - 1).astype(np.int64)
    big_v = np.clip(np.floor(v), 0, n - 1).astype(np.int64)
    # the upright half of lattice cell (U, V) is the scaled copy
    upright = (u - big_u) + (v - big_v) <= 1.0
    valid = inside & upright & ((big_u & big_v) == 0)
    codes = np.zeros(xs.shape, dtype=np.int64)
    for bit in range(k - 1, -1, -1):
        digit = 2 * ((big_u >> bit) & 1) + ((big_v >> bit) & 1)
        codes = codes * 3 + digit
    member_codes = np.array(
        [int(address, 3) if address else 0 for address in cells.cells], dtype=np.int64)
    return np.isin(codes, member_codes) & valid, inside


def cells_to_grid(cells: CellSet, spec: GridSpec) -> MembershipGrid:
    """
    Rasterize by cell-center containment: members 0, other cells 1, gasket
    cells outside the triangle hold the sentinel.
    """
    depth = max(cells.depth, 1)
    grid_cells = np.ones(spec.shape, dtype=np.int32)
    if cells.tag == CARPET:
        members, _ = _carpet_codes(cells, spec)
    else:
        members, inside = _gasket_codes(cells, spec)
        grid_cells[~inside] = depth + 1
    grid_cells[members] = 0
    return MembershipGrid(spec=spec, depth=depth, cells=grid_cells)


def oracle_grid(tag: str, spec: GridSpec, k: int) -> MembershipGrid:
    return cells_to_grid(ifs_cells(tag, k), spec)


@attr.s(frozen=True)
class BoxCountResult(object):
    """
    Occupied box counts per dyadic box size and the fitted slope of
    ``log N`` against ``log(1 / size)``.
    """
    scales: typing.Tuple[int, ...] = attr.ib(converter=tuple)
    counts: typing.Tuple[int, ...] = attr.ib(converter=tuple)
    slope: float = attr.ib()
    intercept: float = attr.ib()
    r2: float = attr.ib()


def count_boxes(mask: np.ndarray, size: int) -> int:
    """
    Number of ``size x size`` boxes, anchored at cell ``(0, 0)``, holding at
    least one True cell.
    """
    height, width = mask.shape
    padded_h = -(-height // size) * size
    padded_w = -(-width // size) * size
    padded = np.zeros((padded_h, padded_w), dtype=bool)
    padded[:height, :width] = mask
    blocks = padded.reshape(padded_h // size, size, padded_w // size, size)
    return int(blocks.any(axis=(1, 3)).sum())


def default_levels(spec: GridSpec) -> int:
    return max(3, int(math.floor(math.log2(min(spec.width, spec.height)))))


def crop_to_members(mask: np.ndarray) -> np.ndarray:
    """
    The smallest sub array of ``mask`` holding every True cell.
    """
    rows = np.flatnonzero(mask.any(axis=1))
    cols = np.flatnonzero(mask.any(axis=0))
    return mask[rows[0]:rows[-1] + 1, cols[0]:cols[-1] + 1]


def box_dimension(grid: MembershipGrid, levels: int) -> BoxCountResult:
    """
    Box counting dimension of the member cells over box sizes
    ``2^0 .. 2^(levels - 1)`` cells. Boxes are anchored at the first member
    row and column, so the counts do not depend on where the set sits in
    the raster.
    """
    if levels < 3:
        raise ValueError("param 'levels' validation error: {} must be >= 3!".format(levels))
    mask = grid.members
    if not mask.any():
        raise ValueError("grid has no member cells")
    mask = crop_to_members(mask)
    scales = [2 ** i for i in range(levels)]
    counts = [count_boxes(mask, s) for s in scales]
    log_inv_size = -np.log(np.array(scales, dtype=np.float64))
    log_counts = np.log(np.array(counts, dtype=np.float64))
    fit = linregress(log_inv_size, log_counts)
    if np.ptp(log_counts) == 0:
        r2 = 1.0
    else:
        r2 = float(fit.rvalue ** 2)
    return BoxCountResult(
        scales=scales,
        counts=counts,
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        r2=r2,
    )


@attr.s(frozen=True)
class GridComparison(object):
    """
    :param agreement: fraction of compared cells where both grids agree on
        membership.
    :param a_only: member in ``a`` only (after slack).
    :param b_only: member in ``b`` only (after slack).
    :param compared: cells that are not sentinel in either grid.
    """
    agreement: float = attr.ib()
    a_only: int = attr.ib()
    b_only: int = attr.ib()
    compared: int = attr.ib()

    def to_lines(self) -> typing.List[str]:
        return [
            "agreement: {:.6f}".format(self.agreement),
            "a_only: {}".format(self.a_only),
            "b_only: {}".format(self.b_only),
            "compared: {}".format(self.compared),
        ]


def compare_grids(a: MembershipGrid, b: MembershipGrid, slack: int = 0) -> GridComparison:
    """
    Membership agreement of two rasters of the same size.

    :param slack: a member cell of one grid also agrees when the other grid
        has a member within ``slack`` cells (chessboard distance).
    """
    if a.cells.shape != b.cells.shape:
        raise ValueError("grid sizes differ: {} vs {}".format(a.cells.shape, b.cells.shape))
    compared = ~(a.outside | b.outside)
    am = a.members & compared
    bm = b.members & compared
    if slack > 0:
        structure = np.ones((3, 3), dtype=bool)
        am_near = ndimage.binary_dilation(am, structure=structure, iterations=slack)
        bm_near = ndimage.binary_dilation(bm, structure=structure, iterations=slack)
    else:
        am_near, bm_near = am, bm
    a_only = am & ~bm & ~bm_near
    b_only = bm & ~am & ~am_near
    total = int(compared.sum())
    mismatches = int(a_only.sum() + b_only.sum())
    agreement = 1.0 if total == 0 else (total - mismatches) / total
    return GridComparison(
        agreement=agreement,
        a_only=int(a_only.sum()),
        b_only=int(b_only.sum()),
        compared=total,
    )


@attr.s(frozen=True)
class LipschitzEstimate(object):
    l1: float = attr.ib()
    l2: float = attr.ib()
    samples: int = attr.ib()


def quasi_random_points(domain: RectDomain, n: int, dims: int = 2) -> np.ndarray:
    """
    ``n`` scrambled Halton points in ``domain``, shape ``(n, dims)``; with
    ``dims = 4`` every row is a pair of points.
    """
    sampler = qmc.Halton(d=dims, scramble=True, seed=LOW_DISCREPANCY_SEED)
    unit = sampler.random(n)
    lower = [domain.x_min, domain.y_min] * (dims // 2)
    upper = [domain.x_max, domain.y_max] * (dims // 2)
    return qmc.scale(unit, lower, upper)


def estimate_bilipschitz(phi, domain: RectDomain, samples: int) -> LipschitzEstimate:
    """
    Min and max of ``|Phi(u) - Phi(v)| / |u - v|`` over quasi-random pairs.
    ``phi`` is any object with a vectorized ``forward`` (a
    :class:`~sierpinski.fmi.PlaneMap`).
    """
    if samples < 2:
        raise ValueError("param 'samples' validation error: {} must be >= 2!".format(samples))
    pairs = quasi_random_points(domain, samples, dims=4)
    ux, uy, vx, vy = pairs.T
    distance = np.hypot(ux - vx, uy - vy)
    keep = distance > 0
    ux, uy, vx, vy, distance = ux[keep], uy[keep], vx[keep], vy[keep], distance[keep]
    with np.errstate(all="ignore"):
        fux, fuy = phi.forward(ux, uy)
        fvx, fvy = phi.forward(vx, vy)
    image_distance = np.hypot(fux - fvx, fuy - fvy)
    if not np.all(np.isfinite(image_distance)):
        raise ValueError("map '{}' cannot be evaluated on the whole domain".format(
            getattr(phi, "name", phi)))
    ratio = image_distance / distance
    return LipschitzEstimate(
        l1=float(ratio.min()), l2=float(ratio.max()), samples=int(keep.sum()),
    )


def carpet_cell_count(k: int) -> int:
    return 8 ** k


def gasket_cell_count(k: int) -> int:
    return 3 ** k
