# -*- coding: utf-8 -*-

"""
Escape criterion iteration schemes for Sierpinski carpets and gaskets.

Every scheme has a scalar API working on :class:`~sierpinski.geometry.Point2`
and a vectorized core working on numpy arrays of starting points. The grid
builders only use the vectorized core, one numpy pass per stage.
"""

import enum
import math
import typing
import logging
from concurrent.futures import ThreadPoolExecutor

import attr
import numpy as np

from .geometry import (
    SQRT3, Point2, GridSpec, MembershipGrid, UNIT_SQUARE,
    in_triangle, in_triangle_array,
)
from .helpers import validate_enum_arg, unknown_name_message
from .mapexpr import FuncDef, UNARY_FUNCTIONS, parse_func

logger = logging.getLogger(__name__)

DOMAIN_TOLERANCE = 1e-9
"""
slack of the scalar domain pre-check, keeps rounded boundary points in.
"""


class EscapeCriterion(enum.Enum):
    """
    How per-axis escapes of a carpet scheme group into an exclusion.
    """
    AnyCoordinate = "any"
    BothEventually = "both-eventually"
    BothSimultaneous = "both-simultaneous"


class ArcsineDomainError(ValueError):
    """
    The autonomous sine step left ``[-B, B]``.
    """


# --- one axis value maps ---
def tent(v):
    return 1.5 - 3.0 * np.abs(v - 0.5)


def mod_tent(v):
    return np.where(
        (v <= 0.5) | (v > 1.0),
        3.0 * np.mod(v, 1.0),
        3.0 * (1.0 - v),
    )


def _greater_than_one(v):
    return v > 1.0


def _abs_greater_than_one(v):
    # NaN marks an autonomous sine value that left the arcsine domain
    return ~(np.abs(v) <= 1.0)


def _greater_than_one_param(instance, attribute, value):
    if not (math.isfinite(value) and value > 1.0):
        raise ValueError(
            "param '{}' validation error: {} must be > 1!".format(
                attribute.name, value)
        )


# --- carpet schemes ---
class CarpetScheme(object):
    """
    Base of the carpet schemes over ``[0, 1] x [0, 1]``.
    """
    name = None
    domain = UNIT_SQUARE

    def terms(self, xs: np.ndarray, ys: np.ndarray, k: int):
        """
        Yield ``(n, xs_n, ys_n)`` for ``n = 1 .. k``.
        """
        raise NotImplementedError

    def violates(self, values: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def domain_contains(self, xs: np.ndarray, ys: np.ndarray, tol: float = 0.0) -> np.ndarray:
        return self.domain.contains_array(xs, ys, tol)


class _IteratedCarpet(CarpetScheme):
    def step_arrays(self, xs, ys):
        raise NotImplementedError

    def terms(self, xs, ys, k):
        for n in range(1, k + 1):
            xs, ys = self.step_arrays(xs, ys)
            yield n, xs, ys


@attr.s(frozen=True, slots=True)
class Tent2D(_IteratedCarpet):
    """
    ``(x, y) -> (3/2 - 3|x - 1/2|, 3/2 - 3|y - 1/2|)``, escape when ``v > 1``.
    """
    name = "tent"

    def step_arrays(self, xs, ys):
        return tent(xs), tent(ys)

    def violates(self, values):
        return _greater_than_one(values)


@attr.s(frozen=True, slots=True)
class ModTent2D(_IteratedCarpet):
    """
    Modified tent map, escaped values are folded back by ``3 (v mod 1)``.
    """
    name = "mod-tent"

    def step_arrays(self, xs, ys):
        return mod_tent(xs), mod_tent(ys)

    def violates(self, values):
        return _greater_than_one(values)


class _SineParameters(object):
    @property
    def amplitude(self) -> float:
        """``B = 1 / sin(pi / b)``"""
        s = math.sin(math.pi / self.b)
        if s <= 0.0 or not math.isfinite(1.0 / s):
            raise ValueError(
                "param 'b' validation error: sin(pi / {}) must be positive!".format(self.b))
        return 1.0 / s

    def violates(self, values):
        return _abs_greater_than_one(values)


@attr.s(frozen=True, slots=True)
class SineScheme(_SineParameters, CarpetScheme):
    """
    Non-autonomous scheme ``psi_n(v) = B sin(A_n v)``, ``A_n = pi a^(n-1)``.
    """
    name = "sine"

    a: float = attr.ib(converter=float, validator=_greater_than_one_param)
    b: float = attr.ib(converter=float, validator=_greater_than_one_param)

    def frequency(self, n: int) -> float:
        return math.pi * self.a ** (n - 1)

    def terms(self, xs, ys, k):
        amplitude = self.amplitude
        for n in range(1, k + 1):
            freq = self.frequency(n)
            yield n, amplitude * np.sin(freq * xs), amplitude * np.sin(freq * ys)


@attr.s(frozen=True, slots=True)
class AutoSine(_SineParameters, _IteratedCarpet):
    """
    Autonomous sine scheme ``v -> B sin(a asin(v / B))``. A value outside
    ``[-B, B]`` becomes NaN and counts as escaped from then on.
    """
    name = "auto-sine"

    a: float = attr.ib(converter=float, validator=_greater_than_one_param)
    b: float = attr.ib(converter=float, validator=_greater_than_one_param)

    def _step(self, values, amplitude):
        ratio = values / amplitude
        with np.errstate(invalid="ignore"):
            result = amplitude * np.sin(self.a * np.arcsin(ratio))
        return np.where(np.abs(ratio) <= 1.0, result, np.nan)

    def step_arrays(self, xs, ys):
        amplitude = self.amplitude
        return self._step(xs, amplitude), self._step(ys, amplitude)


# --- gasket scheme ---
def profile_function(value: typing.Union[str, FuncDef]) -> FuncDef:
    """
    A gasket profile from a built-in function name (``"sin"``) or an
    expression in ``x`` (``"sin(x)"``, ``"cos(x)^2"``).
    """
    if isinstance(value, FuncDef):
        return value
    text = str(value).strip()
    if text in UNARY_FUNCTIONS:
        return parse_func("{}(x)".format(text))
    return parse_func(text)


@attr.s(frozen=True)
class GasketScheme(object):
    """
    Gasket recursion ``(alpha(A_n x'), beta(A_n x''), gamma(A_n y))`` with
    ``A_n = (2 / sqrt(3)) pi a^n``. A point is excluded at the first stage
    where ``x'_n > 0``, ``x''_n > 0`` and ``y_n < 0``.
    """
    name = "gasket"

    alpha: FuncDef = attr.ib(converter=profile_function)
    beta: FuncDef = attr.ib(converter=profile_function)
    gamma: FuncDef = attr.ib(converter=profile_function)
    a: float = attr.ib(converter=float, validator=_greater_than_one_param)

    @classmethod
    def classical(cls) -> "GasketScheme":
        return cls("sin", "sin", "sin", 2.0)

    def frequency(self, n: int) -> float:
        return (2.0 / SQRT3) * math.pi * self.a ** n

    def domain_contains(self, xs, ys, tol: float = 0.0) -> np.ndarray:
        return in_triangle_array(xs, ys)

    def terms(self, xs, ys, k):
        """
        Yield ``(n, x'_n, x''_n, y_n)`` for ``n = 1 .. k``.
        """
        xp, xpp, y = gasket_project_arrays(xs, ys)
        for n in range(1, k + 1):
            freq = self.frequency(n)
            yield n, self.alpha(freq * xp), self.beta(freq * xpp), self.gamma(freq * y)


Scheme = typing.Union[Tent2D, ModTent2D, SineScheme, AutoSine, GasketScheme]

SCHEME_NAMES = ("tent", "mod-tent", "sine", "auto-sine", "gasket")


def build_scheme(
    name: str,
    a: typing.Optional[float] = None,
    b: typing.Optional[float] = None,
    alpha: typing.Optional[str] = None,
    beta: typing.Optional[str] = None,
    gamma: typing.Optional[str] = None,
) -> Scheme:
    """
    Create a scheme from its command line name and parameters. Missing
    parameters take the classical values (``a = b = 3``, gasket ``sin`` and
    ``a = 2``).
    """
    if name == "tent":
        return Tent2D()
    if name == "mod-tent":
        return ModTent2D()
    if name == "sine":
        return SineScheme(3.0 if a is None else a, 3.0 if b is None else b)
    if name == "auto-sine":
        return AutoSine(3.0 if a is None else a, 3.0 if b is None else b)
    if name == "gasket":
        return GasketScheme(
            alpha or "sin", beta or "sin", gamma or "sin",
            2.0 if a is None else a,
        )
    raise ValueError(unknown_name_message("scheme", name, SCHEME_NAMES))


# --- scalar steps ---
def step_tent2d(p: Point2) -> Point2:
    return Point2(tent(p.x), tent(p.y))


def step_mod_tent2d(p: Point2) -> Point2:
    return Point2(float(mod_tent(p.x)), float(mod_tent(p.y)))


def psi_term(scheme: SineScheme, p0: Point2, n: int) -> Point2:
    """
    ``(B sin(A_n x0), B sin(A_n y0))``, depends only on ``p0`` and ``n``.
    """
    if n < 1:
        raise ValueError("param 'n' validation error: {} must be >= 1!".format(n))
    amplitude = scheme.amplitude
    freq = scheme.frequency(n)
    return Point2(amplitude * math.sin(freq * p0.x), amplitude * math.sin(freq * p0.y))


def step_auto_sine(scheme: AutoSine, p: Point2) -> Point2:
    amplitude = scheme.amplitude
    for value in (p.x, p.y):
        if abs(value) / amplitude > 1.0:
            raise ArcsineDomainError(
                "{} is outside the arcsine domain [-{}, {}]".format(
                    value, amplitude, amplitude)
            )
    return Point2(
        amplitude * math.sin(scheme.a * math.asin(p.x / amplitude)),
        amplitude * math.sin(scheme.a * math.asin(p.y / amplitude)),
    )


def gasket_project_arrays(xs, ys):
    return (SQRT3 * xs + ys) / 2.0, (-SQRT3 * xs + ys) / 2.0, ys


def gasket_project(p: Point2) -> typing.Tuple[float, float, float]:
    """
    ``(x', x'', y)`` with ``x' = (sqrt(3) x + y) / 2`` and
    ``x'' = (-sqrt(3) x + y) / 2``.
    """
    xp, xpp, y = gasket_project_arrays(p.x, p.y)
    return (float(xp), float(xpp), float(y))


def gasket_term(scheme: GasketScheme, p: Point2, n: int) -> typing.Tuple[float, float, float]:
    if n < 1:
        raise ValueError("param 'n' validation error: {} must be >= 1!".format(n))
    xp, xpp, y = gasket_project(p)
    freq = scheme.frequency(n)
    return (
        float(scheme.alpha(freq * xp)),
        float(scheme.beta(freq * xpp)),
        float(scheme.gamma(freq * y)),
    )


# --- escape indices ---
def _check_depth(k: int):
    if k < 1:
        raise ValueError("param 'k' validation error: depth {} must be >= 1!".format(k))


def _check_criterion(scheme: Scheme, criterion: typing.Optional[EscapeCriterion]):
    if isinstance(scheme, GasketScheme):
        if criterion is not None:
            raise ValueError(
                "param 'criterion' validation error: "
                "the gasket scheme has its own exclusion rule, got {!r}!".format(criterion)
            )
        return
    if criterion is None:
        raise ValueError(
            "param 'criterion' validation error: "
            "the {} scheme needs an escape criterion!".format(scheme.name)
        )
    validate_enum_arg(EscapeCriterion, "criterion", criterion)


def escape_indices(
    scheme: Scheme,
    criterion: typing.Optional[EscapeCriterion],
    xs: np.ndarray,
    ys: np.ndarray,
    k: int,
) -> np.ndarray:
    """
    Vectorized escape index: 0 for members of the k-th approximation,
    otherwise the first stage at which the exclusion fires.
    """
    _check_depth(k)
    _check_criterion(scheme, criterion)
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    result = np.zeros(np.broadcast(xs, ys).shape, dtype=np.int32)
    if result.size == 0:
        return result

    if isinstance(scheme, GasketScheme):
        for n, xp, xpp, y in scheme.terms(xs, ys, k):
            fired = (xp > 0.0) & (xpp > 0.0) & (y < 0.0)
            result[fired & (result == 0)] = n
            if result.all():
                break
        return result

    x_latched = np.zeros(result.shape, dtype=bool)
    y_latched = np.zeros(result.shape, dtype=bool)
    for n, xn, yn in scheme.terms(xs, ys, k):
        x_violates = scheme.violates(xn)
        y_violates = scheme.violates(yn)
        x_latched |= x_violates
        y_latched |= y_violates
        if criterion is EscapeCriterion.AnyCoordinate:
            fired = x_latched | y_latched
        elif criterion is EscapeCriterion.BothEventually:
            fired = x_latched & y_latched
        else:
            fired = x_violates & y_violates
        result[fired & (result == 0)] = n
        if result.all():
            break
    return result


def escape_index(
    scheme: Scheme,
    criterion: typing.Optional[EscapeCriterion],
    p0: Point2,
    k: int,
) -> typing.Optional[int]:
    """
    The smallest stage ``n <= k`` at which ``p0`` is excluded, None for a
    member of the k-th approximation.
    """
    if isinstance(scheme, GasketScheme):
        inside = in_triangle(p0)
    else:
        inside = scheme.domain.contains(p0, tol=DOMAIN_TOLERANCE)
    if not inside:
        raise ValueError("point {} is outside the {} scheme domain".format(
            p0.as_tuple(), scheme.name))
    index = int(escape_indices(scheme, criterion, np.array([p0.x]), np.array([p0.y]), k)[0])
    return index or None


def _grid_rows(scheme, criterion, xs, ys, k) -> np.ndarray:
    if not isinstance(scheme, GasketScheme):
        return escape_indices(scheme, criterion, xs, ys, k)
    cells = np.full(xs.shape, k + 1, dtype=np.int32)
    inside = in_triangle_array(xs, ys)
    cells[inside] = escape_indices(scheme, criterion, xs[inside], ys[inside], k)
    return cells


def membership_grid(
    scheme: Scheme,
    criterion: typing.Optional[EscapeCriterion],
    spec: GridSpec,
    k: int,
    workers: int = 1,
) -> MembershipGrid:
    """
    Sample the k-th approximation at every cell center of ``spec``.

    :param workers: number of threads, each computes a block of rows. The
        cell values do not depend on it.
    """
    _check_depth(k)
    _check_criterion(scheme, criterion)
    logger.debug(
        "membership grid %s %dx%d depth %d", scheme.name, spec.width, spec.height, k)
    xs, ys = spec.centers()
    workers = max(1, int(workers))
    if workers == 1 or spec.height == 1:
        cells = _grid_rows(scheme, criterion, xs, ys, k)
    else:
        bounds = np.linspace(0, spec.height, min(workers, spec.height) + 1).astype(int)
        blocks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(
                lambda rows: _grid_rows(scheme, criterion, xs[rows], ys[rows], k),
                blocks,
            ))
        cells = np.concatenate(parts, axis=0)
    return MembershipGrid(spec=spec, depth=k, cells=cells)
