# -*- coding: utf-8 -*-

"""
Planar ODE systems and their motions.

A motion ``A_t`` maps a starting point to the state of the system at time
``t`` (all points start at ``t = 0``). Fractal point sets are moved point
by point, with one fixed step fourth order Runge-Kutta integration per
point. Integration is vectorized over points; every point sees the same
arithmetic no matter how the points are batched.

Usage::

    >>> system = VanDerPol(mu=0.5)
    >>> cfg = IntegratorConfig(h=1e-3)
    >>> flow_to(system, Point2(1, 0), 1.0, cfg)
    >>> result = evolve_points(system, points, SectionRequest([1, 3, 5]), cfg)
"""

import enum
import math
import typing
import logging
from concurrent.futures import ThreadPoolExecutor

import attr
import numpy as np

from .geometry import Point2
from .helpers import validate_enum_arg, unknown_name_message
from .mapexpr import (
    Expr, ODE_VARIABLES, parse_expr, eval_expr, evaluate_array, variables_of,
)

logger = logging.getLogger(__name__)

BLOW_UP_NORM = 1e12
"""
a state whose euclidean norm exceeds this aborts the integration of its
point.
"""

STEP_COUNT_SLACK = 1e-9
"""
``floor(t / h + slack)`` full steps are taken before the final partial
step, so ``t = n * h`` with rounding noise does not cost an extra step.
"""


class BlowUpError(ArithmeticError):
    """
    The state became non-finite or too large.
    """

    def __init__(self, message: str, time: float):
        super(BlowUpError, self).__init__("{} (t = {!r})".format(message, time))
        self.message = message
        self.time = time


def _finite_param(instance, attribute, value):
    if not math.isfinite(value):
        raise ValueError(
            "param '{}' validation error: {!r} is not finite!".format(attribute.name, value))


# --- systems ---
class OdeSystem(object):
    """
    Right hand side ``s' = g(t, s)`` of a planar system.

    Subclasses implement :meth:`field` on numpy arrays of states.
    """
    name = None  # type: str
    autonomous = True

    def field(self, t: float, xs: np.ndarray, ys: np.ndarray) -> typing.Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def at(self, t: float, p: Point2) -> Point2:
        dx, dy = self.field(float(t), np.float64(p.x), np.float64(p.y))
        return Point2(float(dx), float(dy))


@attr.s(frozen=True)
class VanDerPol(OdeSystem):
    """
    ``x' = y, y' = mu (1 - x^2) y - x``; ``mu`` is the damping parameter.
    """
    mu: float = attr.ib(converter=float, validator=_finite_param)

    name = "vdp"

    def field(self, t, xs, ys):
        return ys, self.mu * (1.0 - xs * xs) * ys - xs


@attr.s(frozen=True)
class Duffing(OdeSystem):
    """
    ``x' = y, y' = -delta y - beta x - alpha x^3 + gamma cos(omega t)``.
    """
    delta: float = attr.ib(converter=float, validator=_finite_param)
    beta: float = attr.ib(converter=float, validator=_finite_param)
    alpha: float = attr.ib(converter=float, validator=_finite_param)
    gamma: float = attr.ib(converter=float, validator=_finite_param)
    omega: float = attr.ib(converter=float, validator=_finite_param)

    name = "duffing"

    @property
    def autonomous(self) -> bool:
        return self.gamma == 0.0 or self.omega == 0.0

    def field(self, t, xs, ys):
        forcing = self.gamma * math.cos(self.omega * t)
        return ys, -self.delta * ys - self.beta * xs - self.alpha * xs ** 3 + forcing


@attr.s(frozen=True)
class ExprSystem(OdeSystem):
    """
    Right hand side given by two expressions in ``t, x, y``.
    """
    dx: Expr = attr.ib()
    dy: Expr = attr.ib()
    text: str = attr.ib(default="", eq=False)

    name = "expr"

    @classmethod
    def parse(cls, dx: str, dy: str) -> "ExprSystem":
        return cls(
            dx=parse_expr(dx, ODE_VARIABLES),
            dy=parse_expr(dy, ODE_VARIABLES),
            text="{}, {}".format(dx, dy),
        )

    @property
    def autonomous(self) -> bool:
        return "t" not in (variables_of(self.dx) | variables_of(self.dy))

    def field(self, t, xs, ys):
        xs = np.asarray(xs, dtype=np.float64)
        ys = np.asarray(ys, dtype=np.float64)
        env = dict(t=np.float64(t), x=xs, y=ys)
        shape = np.broadcast(xs, ys).shape
        return (
            np.broadcast_to(evaluate_array(self.dx, env), shape),
            np.broadcast_to(evaluate_array(self.dy, env), shape),
        )

    def at(self, t, p):
        env = dict(t=float(t), x=p.x, y=p.y)
        return Point2(eval_expr(self.dx, env), eval_expr(self.dy, env))


@attr.s(frozen=True)
class BackwardSystem(OdeSystem):
    """
    The reversed motion ``A_(-t)``: integrates ``s' = -g(-t, s)``.
    """
    forward: OdeSystem = attr.ib(validator=attr.validators.instance_of(OdeSystem))

    @property
    def name(self) -> str:
        return "backward-{}".format(self.forward.name)

    @property
    def autonomous(self) -> bool:
        return self.forward.autonomous

    def field(self, t, xs, ys):
        dx, dy = self.forward.field(-t, xs, ys)
        return -dx, -dy

    def at(self, t, p):
        v = self.forward.at(-t, p)
        return Point2(-v.x, -v.y)


SYSTEM_NAMES = ("vdp", "duffing", "expr")


def build_system(
    name: str,
    mu: typing.Optional[float] = None,
    delta: typing.Optional[float] = None,
    beta: typing.Optional[float] = None,
    alpha: typing.Optional[float] = None,
    gamma: typing.Optional[float] = None,
    omega: typing.Optional[float] = None,
    dx: typing.Optional[str] = None,
    dy: typing.Optional[str] = None,
) -> OdeSystem:
    """
    Build a system from its command line name, missing parameters take the
    values of the reproduced figures (``mu = 0.5``; ``delta = 0.08,
    beta = 0, alpha = 1, gamma = 0.2, omega = 1``).
    """
    if name == "vdp":
        return VanDerPol(mu=0.5 if mu is None else mu)
    if name == "duffing":
        return Duffing(
            delta=0.08 if delta is None else delta,
            beta=0.0 if beta is None else beta,
            alpha=1.0 if alpha is None else alpha,
            gamma=0.2 if gamma is None else gamma,
            omega=1.0 if omega is None else omega,
        )
    if name == "expr":
        if dx is None or dy is None:
            raise ValueError(
                "param 'system' validation error: the expr system needs --dx and --dy!")
        return ExprSystem.parse(dx, dy)
    raise ValueError(unknown_name_message("system", name, SYSTEM_NAMES))


def duffing_energy(system: Duffing, p: Point2) -> float:
    """
    ``H = y^2/2 + beta x^2/2 + alpha x^4/4``, conserved when
    ``delta = gamma = 0``.
    """
    return (
        p.y * p.y / 2.0
        + system.beta * p.x * p.x / 2.0
        + system.alpha * p.x ** 4 / 4.0
    )


# --- integrator ---
class IntegrationMethod(enum.Enum):
    RK4 = "rk4"


@attr.s(frozen=True)
class IntegratorConfig(object):
    h: float = attr.ib(default=1e-3, converter=float)
    method: IntegrationMethod = attr.ib(default=IntegrationMethod.RK4)

    @h.validator
    def _check_h(self, attribute, value):
        if not (math.isfinite(value) and value > 0):
            raise ValueError("param 'h' validation error: {!r} must be > 0!".format(value))

    @method.validator
    def _check_method(self, attribute, value):
        validate_enum_arg(IntegrationMethod, "method", value)


def _ascending_times(instance, attribute, value):
    for t in value:
        if not (math.isfinite(t) and t >= 0):
            raise ValueError(
                "param 'times' validation error: {!r} must be a finite time >= 0!".format(t))
    for a, b in zip(value[:-1], value[1:]):
        if not (b > a):
            raise ValueError(
                "param 'times' validation error: {!r} must be strictly ascending!".format(value))


@attr.s(frozen=True)
class SectionRequest(object):
    times: typing.Tuple[float, ...] = attr.ib(
        converter=lambda v: tuple(float(t) for t in v),
        validator=_ascending_times,
    )

    @classmethod
    def parse(cls, text: str) -> "SectionRequest":
        """
        Parse the ``1,3,5,7`` command line form.
        """
        try:
            return cls([float(part) for part in str(text).split(",")])
        except ValueError as e:
            if "validation error" in str(e):
                raise
            raise ValueError("times '{}' must be comma separated numbers".format(text))

    @property
    def smallest_gap(self) -> typing.Optional[float]:
        if len(self.times) < 2:
            return None
        return min(b - a for a, b in zip(self.times[:-1], self.times[1:]))


@attr.s(frozen=True)
class TrajectorySample(object):
    t: float = attr.ib()
    p: Point2 = attr.ib()


def _rk4_arrays(system: OdeSystem, t: float, xs, ys, h: float):
    half = h / 2.0
    k1x, k1y = system.field(t, xs, ys)
    k2x, k2y = system.field(t + half, xs + half * k1x, ys + half * k1y)
    k3x, k3y = system.field(t + half, xs + half * k2x, ys + half * k2y)
    k4x, k4y = system.field(t + h, xs + h * k3x, ys + h * k3y)
    return (
        xs + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x),
        ys + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
    )


def vector_field(system: OdeSystem, t: float, s: Point2) -> Point2:
    """
    ``(x', y')`` of ``system`` at time ``t`` and state ``s``.
    """
    return system.at(t, s)


def rk4_step(system: OdeSystem, t: float, s: Point2, h: float) -> Point2:
    """
    One classical Runge-Kutta step from ``(t, s)``.
    """
    if not (h > 0):
        raise ValueError("param 'h' validation error: {!r} must be > 0!".format(h))
    with np.errstate(all="ignore"):
        x, y = _rk4_arrays(system, t, np.array([s.x]), np.array([s.y]), h)
    if not (np.isfinite(x[0]) and np.isfinite(y[0])):
        raise BlowUpError("non-finite state", t + h)
    return Point2(x[0], y[0])


def _full_steps(t: float, h: float) -> int:
    return int(math.floor(t / h + STEP_COUNT_SLACK))


class _Integration(object):
    """
    Integrates a batch of points through ascending times, never restarting.
    Dead points keep a zero state and a failure time.
    """

    def __init__(self, system: OdeSystem, xs: np.ndarray, ys: np.ndarray, h: float):
        self.system = system
        self.h = h
        self.xs = np.array(xs, dtype=np.float64)
        self.ys = np.array(ys, dtype=np.float64)
        self.step = 0
        self.alive = np.ones(self.xs.shape, dtype=bool)
        self.failed_at = np.full(self.xs.shape, np.nan)

    def _guard(self, xs, ys, t: float):
        with np.errstate(all="ignore"):
            bad = ~(np.isfinite(xs) & np.isfinite(ys)) | (np.hypot(xs, ys) > BLOW_UP_NORM)
        bad &= self.alive
        if bad.any():
            self.failed_at[bad] = t
            self.alive &= ~bad
        xs = np.where(self.alive, xs, 0.0)
        ys = np.where(self.alive, ys, 0.0)
        return xs, ys

    def advance(self, target: float) -> typing.Tuple[np.ndarray, np.ndarray]:
        """
        States at ``target``, the stored state stays on the step lattice.
        """
        h = self.h
        n = _full_steps(target, h)
        with np.errstate(all="ignore"):
            while self.step < n:
                xs, ys = _rk4_arrays(self.system, self.step * h, self.xs, self.ys, h)
                self.step += 1
                self.xs, self.ys = self._guard(xs, ys, self.step * h)
            rest = target - n * h
            if rest == 0.0:
                return self.xs.copy(), self.ys.copy()
            xs, ys = _rk4_arrays(self.system, n * h, self.xs, self.ys, rest)
            return self._guard(xs, ys, target)


def flow_to(system: OdeSystem, s0: Point2, t_target: float, cfg: IntegratorConfig) -> Point2:
    """
    The state at ``t_target`` of the solution starting at ``s0`` at ``t = 0``.

    :raises BlowUpError: with the time at which the state became non-finite
        or exceeded :data:`BLOW_UP_NORM`.
    """
    if not (t_target >= 0):
        raise ValueError(
            "param 't_target' validation error: {!r} must be >= 0!".format(t_target))
    if t_target == 0:
        return s0
    run = _Integration(system, [s0.x], [s0.y], cfg.h)
    xs, ys = run.advance(t_target)
    if not run.alive[0]:
        raise BlowUpError("state of {} blew up".format(s0.as_tuple()), float(run.failed_at[0]))
    return Point2(xs[0], ys[0])


@attr.s(frozen=True)
class FlowFailure(object):
    index: int = attr.ib()
    start: Point2 = attr.ib()
    time: float = attr.ib()

    @property
    def message(self) -> str:
        return "point #{} {} blew up at t = {!r}".format(
            self.index, self.start.as_tuple(), self.time)


@attr.s(frozen=True)
class EvolutionResult(object):
    """
    ``sections[i]`` holds the surviving points at ``times[i]``, in input
    order, and ``indices[i]`` their positions in the input. A failed point
    is missing from every section at or after its failure time.
    """
    times: typing.Tuple[float, ...] = attr.ib(converter=tuple)
    sections: typing.List[typing.List[Point2]] = attr.ib()
    indices: typing.List[typing.List[int]] = attr.ib()
    failures: typing.List[FlowFailure] = attr.ib(factory=list)

    def summary_lines(self) -> typing.List[str]:
        lines = [
            "t = {!r}: {} points".format(t, len(section))
            for t, section in zip(self.times, self.sections)
        ]
        lines.append("failures: {}".format(len(self.failures)))
        lines.extend(f.message for f in self.failures)
        return lines


def _evolve_block(system, xs, ys, times, h):
    run = _Integration(system, xs, ys, h)
    states = []
    for t in times:
        sx, sy = run.advance(t)
        states.append((sx, sy, run.alive.copy()))
    return states, run.failed_at


def _check_step(sections: SectionRequest, cfg: IntegratorConfig):
    gap = sections.smallest_gap
    if gap is not None and cfg.h > gap:
        raise ValueError(
            "param 'h' validation error: step {!r} exceeds the smallest "
            "section gap {!r}!".format(cfg.h, gap))


def evolve_points(
    system: OdeSystem,
    points: typing.Sequence[Point2],
    sections: SectionRequest,
    cfg: IntegratorConfig,
    workers: int = 1,
) -> EvolutionResult:
    """
    Move every point through all section times in one integration run.

    :param workers: number of threads, each integrates a block of points.
        The result does not depend on it.
    """
    _check_step(sections, cfg)
    times = sections.times
    points = list(points)
    if not points:
        return EvolutionResult(
            times=times, sections=[[] for _ in times], indices=[[] for _ in times])
    logger.info(
        "evolving %d points under %s to t = %s", len(points), system.name,
        ", ".join(repr(t) for t in times))
    xs = np.array([p.x for p in points], dtype=np.float64)
    ys = np.array([p.y for p in points], dtype=np.float64)

    workers = max(1, int(workers))
    if workers == 1 or len(points) == 1:
        states, failed_at = _evolve_block(system, xs, ys, times, cfg.h)
    else:
        bounds = np.linspace(0, len(points), min(workers, len(points)) + 1).astype(int)
        blocks = [slice(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(max_workers=workers) as executor:
            parts = list(executor.map(
                lambda block: _evolve_block(system, xs[block], ys[block], times, cfg.h),
                blocks,
            ))
        states = [
            tuple(np.concatenate([part[0][i][c] for part in parts]) for c in range(3))
            for i in range(len(times))
        ]
        failed_at = np.concatenate([part[1] for part in parts])

    result_sections = [
        [Point2(x, y) for x, y in zip(sx[alive], sy[alive])]
        for sx, sy, alive in states
    ]
    indices = [np.flatnonzero(alive).tolist() for _, _, alive in states]
    failures = [
        FlowFailure(index=int(i), start=points[i], time=float(failed_at[i]))
        for i in np.flatnonzero(~np.isnan(failed_at))
    ]
    if failures:
        logger.warning("%d point(s) blew up and were dropped", len(failures))
    return EvolutionResult(
        times=times, sections=result_sections, indices=indices, failures=failures)


def sample_times(t_end: float, dt_sample: float) -> typing.List[float]:
    """
    ``0, dt, 2 dt, ..., t_end``; ``t_end`` closes the list even when it is
    not a multiple of ``dt``.
    """
    if not (dt_sample > 0 and dt_sample <= t_end):
        raise ValueError(
            "param 'dt_sample' validation error: need 0 < {!r} <= t_end {!r}!".format(
                dt_sample, t_end))
    m = _full_steps(t_end, dt_sample)
    times = [i * dt_sample for i in range(m + 1)]
    if abs(times[-1] - t_end) <= STEP_COUNT_SLACK * max(1.0, t_end):
        times[-1] = t_end
    else:
        times.append(t_end)
    return times


@attr.s(frozen=True)
class TrajectoryResult(object):
    """
    ``trajectories[i]`` are the samples of the i-th surviving point.
    """
    trajectories: typing.List[typing.List[TrajectorySample]] = attr.ib()
    failures: typing.List[FlowFailure] = attr.ib(factory=list)


def trajectory_samples(
    system: OdeSystem,
    points: typing.Sequence[Point2],
    t_end: float,
    dt_sample: float,
    cfg: IntegratorConfig,
    workers: int = 1,
) -> TrajectoryResult:
    """
    Sample ``(t, x, y)`` along the motion of every point, for 3D trajectory
    export. Points that blow up are dropped entirely.
    """
    times = sample_times(t_end, dt_sample)
    points = list(points)
    evolution = evolve_points(system, points, SectionRequest(times), cfg, workers=workers)
    failed = {f.index for f in evolution.failures}
    survivors = [i for i in range(len(points)) if i not in failed]
    trajectories = [[] for _ in survivors]
    for t, section, indices in zip(times, evolution.sections, evolution.indices):
        by_index = dict(zip(indices, section))
        for slot, i in enumerate(survivors):
            trajectories[slot].append(TrajectorySample(t=t, p=by_index[i]))
    return TrajectoryResult(trajectories=trajectories, failures=evolution.failures)
