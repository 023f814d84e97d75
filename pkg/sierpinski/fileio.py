# -*- coding: utf-8 -*-

"""
Deterministic file outputs: PGM / PPM rasters, CSV point clouds and text
reports, plus the small netpbm reader used to read rasters back.

Raster orientation: the top row of an image is the row of maximal y.
Every file is written through :func:`atomicwrites.atomic_write`, a failed
run never leaves a partial file behind.
"""

import typing
import logging

import attr
import numpy as np
from pathlib_mate import Path
from pathlib_mate.helper import repr_data_size
from atomicwrites import atomic_write

from .geometry import Point2, GridSpec, MembershipGrid, RectDomain
from .flow import TrajectorySample

logger = logging.getLogger(__name__)

MEMBER_GRAY = 0
SENTINEL_GRAY = 255
RAMP_BASE = 55
RAMP_SPAN = 200

CSV_FORMAT = ".9g"


def _write_bytes(path, data: bytes):
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    with atomic_write(p.abspath, mode="wb", overwrite=True) as f:
        f.write(data)
    logger.debug("wrote %s (%s)", p.abspath, repr_data_size(len(data)))


def gray_levels(grid: MembershipGrid) -> np.ndarray:
    """
    Gray value per cell in image order: member 0, stage ``n`` maps to
    ``55 + floor(200 n / k)``, sentinel 255.
    """
    k = grid.depth
    cells = grid.cells.astype(np.int64)
    gray = RAMP_BASE + (RAMP_SPAN * cells) // k
    gray = np.where(cells == 0, MEMBER_GRAY, gray)
    gray = np.where(cells == grid.sentinel, SENTINEL_GRAY, gray)
    return np.flipud(gray).astype(np.uint8)


def pgm_bytes(grid: MembershipGrid) -> bytes:
    header = "P5\n{} {}\n255\n".format(grid.spec.width, grid.spec.height)
    return header.encode("ascii") + np.ascontiguousarray(gray_levels(grid)).tobytes()


def write_pgm(grid: MembershipGrid, path):
    """
    Binary PGM (P5) of the escape stages.
    """
    _write_bytes(path, pgm_bytes(grid))


@attr.s(frozen=True)
class Palette(object):
    """
    Colors of the PPM output: escape stage ``n`` uses
    ``ramp[(n - 1) % len(ramp)]``.
    """
    member: typing.Tuple[int, int, int] = attr.ib(default=(0, 0, 0))
    sentinel: typing.Tuple[int, int, int] = attr.ib(default=(255, 255, 255))
    ramp: typing.Tuple[typing.Tuple[int, int, int], ...] = attr.ib(
        default=(
            (230, 25, 75),
            (245, 130, 48),
            (255, 225, 25),
            (60, 180, 75),
            (70, 240, 240),
            (0, 130, 200),
            (145, 30, 180),
            (240, 50, 230),
        ),
        converter=tuple,
    )

    @ramp.validator
    def _check_ramp(self, attribute, value):
        if not value:
            raise ValueError("param 'ramp' validation error: needs at least one color!")

    def lookup_table(self, k: int) -> np.ndarray:
        """
        ``(k + 2, 3)`` table indexed by cell value.
        """
        table = [self.member]
        table.extend(self.ramp[(n - 1) % len(self.ramp)] for n in range(1, k + 1))
        table.append(self.sentinel)
        return np.array(table, dtype=np.uint8)


DEFAULT_PALETTE = Palette()


def ppm_bytes(grid: MembershipGrid, palette: Palette = DEFAULT_PALETTE) -> bytes:
    rgb = palette.lookup_table(grid.depth)[np.flipud(grid.cells)]
    header = "P6\n{} {}\n255\n".format(grid.spec.width, grid.spec.height)
    return header.encode("ascii") + np.ascontiguousarray(rgb).tobytes()


def write_ppm(grid: MembershipGrid, path, palette: Palette = DEFAULT_PALETTE):
    """
    Binary PPM (P6) with one palette color per escape stage.
    """
    _write_bytes(path, ppm_bytes(grid, palette))


def write_raster(grid: MembershipGrid, path):
    """
    PPM for ``.ppm`` paths, PGM otherwise.
    """
    if Path(path).ext.lower() == ".ppm":
        write_ppm(grid, path)
    else:
        write_pgm(grid, path)


@attr.s(frozen=True)
class PnmImage(object):
    magic: str = attr.ib()
    maxval: int = attr.ib()
    pixels: np.ndarray = attr.ib()

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


def _header_tokens(data: bytes, count: int) -> typing.Tuple[typing.List[bytes], int]:
    tokens = []
    pos = 0
    while len(tokens) < count:
        if pos >= len(data):
            raise ValueError("truncated netpbm header")
        c = data[pos:pos + 1]
        if c == b"#":
            end = data.find(b"\n", pos)
            pos = len(data) if end == -1 else end + 1
        elif c.isspace():
            pos += 1
        else:
            start = pos
            while pos < len(data) and not data[pos:pos + 1].isspace():
                pos += 1
            tokens.append(data[start:pos])
    # exactly one whitespace byte separates the header from the raster
    return tokens, pos + 1


def read_pnm(path) -> PnmImage:
    """
    Read a binary 8 bit PGM (P5) or PPM (P6) file, header comments allowed.
    """
    data = Path(path).read_bytes()
    if data[:2] not in (b"P5", b"P6"):
        raise ValueError("{} is not a binary PGM / PPM file".format(path))
    tokens, offset = _header_tokens(data, 4)
    magic = tokens[0].decode("ascii")
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise ValueError("{} has a malformed netpbm header".format(path))
    if maxval < 1 or maxval > 255:
        raise ValueError("{}: only 8 bit images are supported".format(path))
    channels = 1 if magic == "P5" else 3
    size = width * height * channels
    raster = data[offset:offset + size]
    if len(raster) != size:
        raise ValueError("{}: truncated raster, {} of {} bytes".format(
            path, len(raster), size))
    pixels = np.frombuffer(raster, dtype=np.uint8).reshape(
        (height, width) if channels == 1 else (height, width, 3))
    return PnmImage(magic=magic, maxval=maxval, pixels=pixels.copy())


def grid_from_pnm(path, domain: RectDomain) -> MembershipGrid:
    """
    Recover the membership of a raster written by this package: black
    pixels are members, white pixels are read as the sentinel and every
    other pixel is a non-member. The result has depth 1, escape stages are
    not recovered.

    In a PGM the last escape stage shares gray 255 with the sentinel, so
    those cells come back as sentinel too; a PPM keeps them apart.
    """
    image = read_pnm(path)
    pixels = image.pixels
    if pixels.ndim == 3:
        black = (pixels == MEMBER_GRAY).all(axis=2)
        white = (pixels == SENTINEL_GRAY).all(axis=2)
    else:
        black = pixels == MEMBER_GRAY
        white = pixels == SENTINEL_GRAY
    cells = np.select([black, white], [0, 2], default=1)
    spec = GridSpec(domain, image.width, image.height)
    return MembershipGrid(spec=spec, depth=1, cells=np.flipud(cells).astype(np.int32))


def format_value(v: float) -> str:
    # adding 0.0 turns -0.0 into 0.0
    return format(float(v) + 0.0, CSV_FORMAT)


def _flatten_samples(samples) -> typing.List[typing.Union[Point2, TrajectorySample]]:
    flat = []
    for item in samples:
        if isinstance(item, (Point2, TrajectorySample)):
            flat.append(item)
        else:
            flat.extend(item)
    return flat


def csv_text(samples) -> str:
    """
    ``x,y`` records for points, ``t,x,y`` for trajectory samples; a
    sequence of trajectories is written one after the other.
    """
    rows = _flatten_samples(samples)
    if rows and isinstance(rows[0], TrajectorySample):
        lines = ["t,x,y"]
        lines.extend(
            "{},{},{}".format(format_value(s.t), format_value(s.p.x), format_value(s.p.y))
            for s in rows
        )
    else:
        lines = ["x,y"]
        lines.extend(
            "{},{}".format(format_value(p.x), format_value(p.y)) for p in rows
        )
    return "\n".join(lines) + "\n"


def write_csv_points(samples, path):
    _write_bytes(path, csv_text(samples).encode("ascii"))


def read_csv_points(path) -> typing.List[Point2]:
    """
    Read an ``x,y`` (or ``t,x,y``) file, the last two columns are the point.
    """
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise ValueError("{}: empty file, expected an x,y header".format(path))
    header = [h.strip() for h in lines[0].split(",")]
    if header[-2:] != ["x", "y"]:
        raise ValueError("{} line 1: expected header x,y or t,x,y, got '{}'".format(
            path, lines[0]))
    points = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(header):
            raise ValueError("{} line {}: expected {} fields, got {}".format(
                path, lineno, len(header), len(fields)))
        try:
            points.append(Point2(float(fields[-2]), float(fields[-1])))
        except ValueError:
            raise ValueError("{} line {}: malformed point '{}'".format(path, lineno, line))
    return points


def report_text(lines: typing.Iterable[str]) -> str:
    return "".join(line + "\n" for line in lines)


def write_report(lines: typing.Iterable[str], path):
    """
    Write ``key: value`` lines.
    """
    _write_bytes(path, report_text(lines).encode("utf-8"))
