# -*- coding: utf-8 -*-

"""
The ``sierpinski`` command line.

Subcommands: ``generate``, ``map``, ``evolve``, ``dimension``, ``compare``
and ``oracle``. Exit status is 0 on success, 1 on a usage error and 2 when
the computation fails. Diagnostics go to stderr, data only to files;
reports go to ``--report`` or stdout.

Example::

    sierpinski generate --scheme mod-tent --criterion both-simultaneous \\
        --depth 6 --grid 729x729 --out carpet.pgm
"""

import re
import sys
import typing
import logging
import argparse

from pathlib_mate import Path

from ._version import __version__
from .config import (
    UsageError, ConfigError, RunConfig, read_config, flag_name, parse_number,
)
from .geometry import GridSpec, MembershipGrid, UNIT_SQUARE
from .helpers import enum_by_value
from .schemes import (
    EscapeCriterion, GasketScheme, ModTent2D, build_scheme, membership_grid,
    profile_function,
)
from .fmi import (
    get_map, default_target_domain, mapped_membership_grid, forward_image_points,
    forward_image_grid, discrete_orbit,
)
from .flow import (
    IntegratorConfig, SectionRequest, BackwardSystem, build_system,
    evolve_points, trajectory_samples, sample_times,
)
from .analysis import box_dimension, default_levels, compare_grids, oracle_grid
from .fileio import (
    write_raster, write_csv_points, read_csv_points, grid_from_pnm,
    write_report, report_text, format_value,
)

logger = logging.getLogger("sierpinski")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_COMPUTE = 2

_PARAM_ERROR = re.compile(r"param '(\w+)' validation error: (.*)", re.S)


class ArgumentParser(argparse.ArgumentParser):
    """
    Raises :class:`UsageError` instead of printing usage and exiting.
    """

    def error(self, message):
        raise UsageError(message)


# --- option groups ---
SCHEME_OPTIONS = (
    "scheme", "criterion", "a", "b", "alpha", "beta", "gamma",
    "depth", "grid", "domain", "workers",
)
COMMON_OPTIONS = ("verbose", "quiet", "report")

SUBCOMMAND_OPTIONS = dict(
    generate=SCHEME_OPTIONS + ("out", "points_out"),
    map=SCHEME_OPTIONS + (
        "map", "mode", "target_domain", "target_grid", "orbit", "out", "points_out",
    ),
    evolve=SCHEME_OPTIONS + (
        "system", "mu", "delta", "omega", "dx", "dy", "h", "times",
        "t_end", "dt_sample", "backward", "input", "out_prefix", "trajectory_out",
    ),
    dimension=SCHEME_OPTIONS + ("input", "levels"),
    compare=("left", "right", "slack"),
    oracle=("fractal", "depth", "grid", "domain", "check", "out", "workers"),
)

HELP = dict(
    scheme="tent | mod-tent | sine | auto-sine | gasket",
    criterion="any | both-eventually | both-simultaneous (carpet schemes)",
    a="frequency growth factor of the sine and gasket schemes",
    b="sine amplitude parameter, B = 1 / sin(pi / b)",
    alpha="gasket profile (name or expression in x), or the Duffing alpha",
    beta="gasket profile (name or expression in x), or the Duffing beta",
    gamma="gasket profile (name or expression in x), or the Duffing gamma",
    depth="approximation depth k",
    grid="raster size WIDTHxHEIGHT",
    domain="sampled rectangle x_min,x_max,y_min,y_max",
    workers="threads used for rasters and flows",
    map="registry name, affine:a,b,c,d,e,f or 'e1, e2 | e3, e4'",
    mode="inverse (mapping iteration) or forward (point images)",
    target_domain="mapped rectangle D', defaults to the padded image box",
    target_grid="raster size of the mapped domain",
    orbit="number of forward map iterations written as point sets",
    system="vdp | duffing | expr",
    mu="Van der Pol damping",
    delta="Duffing damping",
    omega="Duffing forcing frequency",
    dx="x' expression in t, x, y",
    dy="y' expression in t, x, y",
    h="RK4 step",
    times="section times, comma separated",
    t_end="end of the trajectory samples",
    dt_sample="trajectory sampling interval",
    backward="integrate the reversed motion",
    input="input CSV point set (evolve) or raster (dimension)",
    levels="number of dyadic box sizes",
    fractal="carpet | gasket",
    check="compare the oracle with the classical scheme",
    slack="cells of boundary tolerance",
    left="first raster",
    right="second raster",
    out="output raster, .pgm or .ppm",
    points_out="output CSV of member cell centers / image points",
    out_prefix="prefix of the section CSV files",
    trajectory_out="output CSV of t,x,y trajectory samples",
    report="write the report here instead of stdout",
    verbose="debug logging",
    quiet="warnings only",
)


def make_parser() -> ArgumentParser:
    fields = {a.name: a for a in RunConfig.fields()}
    parser = ArgumentParser(
        prog="sierpinski",
        description="Escape time Sierpinski fractals, mapped fractals and their motions.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="subcommand")
    for subcommand, names in SUBCOMMAND_OPTIONS.items():
        sub = subparsers.add_parser(subcommand)
        sub.add_argument("--config", default=None, help="key = value config file")
        for name in names + COMMON_OPTIONS:
            attribute = fields[name]
            flag = "--" + flag_name(attribute)
            if attribute.metadata["kind"] == "bool":
                sub.add_argument(
                    flag, dest=name, action="store_const", const=True, default=None,
                    help=HELP[name])
            else:
                sub.add_argument(flag, dest=name, default=None, help=HELP[name])
    return parser


# --- logging ---
_handler = None  # type: typing.Optional[logging.Handler]


def configure_logging(verbose: bool = False, quiet: bool = False):
    global _handler
    if _handler is not None:
        logger.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    logger.addHandler(_handler)
    if verbose:
        logger.setLevel(logging.DEBUG)
    elif quiet:
        logger.setLevel(logging.WARNING)
    else:
        logger.setLevel(logging.INFO)


# --- option to object ---
def usage_from_param_error(e: ValueError) -> UsageError:
    """
    Turn a ``param 'b' validation error: ...`` message into a usage error
    naming ``--b``.
    """
    match = _PARAM_ERROR.match(str(e))
    if match is None:
        return UsageError(str(e))
    return UsageError("--{}: {}".format(match.group(1).replace("_", "-"), match.group(2)))


def scheme_from_config(cfg: RunConfig, profiles: bool = True):
    """
    :param profiles: pass ``--alpha / --beta / --gamma`` to the gasket
        scheme, otherwise the classical ``sin`` profiles are used.
    """
    given = dict()
    if profiles and cfg.scheme == "gasket":
        for name in ("alpha", "beta", "gamma"):
            value = getattr(cfg, name)
            if value is not None:
                try:
                    given[name] = profile_function(value)
                except ValueError as e:
                    raise UsageError("--{}: {}".format(name, e))
    try:
        return build_scheme(cfg.scheme, a=cfg.a, b=cfg.b, **given)
    except ValueError as e:
        if str(e).startswith("unknown scheme"):
            raise UsageError("--scheme: {}".format(e))
        raise usage_from_param_error(e)


def criterion_from_config(cfg: RunConfig, scheme) -> typing.Optional[EscapeCriterion]:
    if isinstance(scheme, GasketScheme):
        if cfg.criterion is not None:
            raise UsageError("--criterion: the gasket scheme has its own exclusion rule")
        return None
    try:
        return enum_by_value(EscapeCriterion, "criterion", cfg.criterion)
    except ValueError as e:
        raise usage_from_param_error(e)


def system_from_config(cfg: RunConfig):
    duffing = {}
    if cfg.system == "duffing":
        for name in ("alpha", "beta", "gamma"):
            value = getattr(cfg, name)
            if value is not None:
                try:
                    duffing[name] = parse_number(value)
                except ValueError as e:
                    raise UsageError("--{}: {}".format(name, e))
    try:
        system = build_system(
            cfg.system, mu=cfg.mu, delta=cfg.delta, omega=cfg.omega,
            dx=cfg.dx, dy=cfg.dy, **duffing)
    except ValueError as e:
        if str(e).startswith("unknown system"):
            raise UsageError("--system: {}".format(e))
        raise usage_from_param_error(e)
    if cfg.backward:
        system = BackwardSystem(system)
    return system


def map_from_config(cfg: RunConfig):
    try:
        return get_map(cfg.map)
    except ValueError as e:
        raise UsageError("--map: {}".format(e))


def _uses_profiles(cfg: RunConfig, subcommand: str) -> bool:
    # evolve shares --alpha / --beta / --gamma with the Duffing system
    return not (subcommand == "evolve" and cfg.system == "duffing")


def preflight(cfg: RunConfig, subcommand: str):
    """
    Build every model object once, so parameter errors are reported before
    missing outputs and before any computation.
    """
    if subcommand == "map":
        map_from_config(cfg)
    if subcommand in ("generate", "map") or (
            subcommand in ("evolve", "dimension") and cfg.input is None):
        scheme = scheme_from_config(cfg, profiles=_uses_profiles(cfg, subcommand))
        criterion_from_config(cfg, scheme)
    if subcommand == "evolve":
        system_from_config(cfg)
        if cfg.times is not None:
            gap = SectionRequest(cfg.times).smallest_gap
            if gap is not None and cfg.h > gap:
                raise UsageError(
                    "--h: step {!r} exceeds the smallest section gap {!r}".format(cfg.h, gap))
        if cfg.t_end is not None and cfg.dt_sample is not None:
            try:
                sample_times(cfg.t_end, cfg.dt_sample)
            except ValueError as e:
                raise usage_from_param_error(e)
            if cfg.h > cfg.dt_sample:
                raise UsageError("--h: step {!r} exceeds --dt-sample {!r}".format(
                    cfg.h, cfg.dt_sample))


def load_config(ns: argparse.Namespace) -> RunConfig:
    names = [a.name for a in RunConfig.fields()]
    given = RunConfig.from_mapping({
        name: getattr(ns, name) for name in names if hasattr(ns, name)
    })
    if ns.config is not None:
        try:
            from_file = read_config(ns.config)
        except ConfigError as e:
            raise UsageError("{}: {}".format(ns.config, e))
        except OSError as e:
            raise UsageError("--config: cannot read {} ({})".format(ns.config, e))
        given = from_file.merged(given)
    cfg = given.with_defaults(ns.subcommand)
    preflight(cfg, ns.subcommand)
    cfg.validate(ns.subcommand)
    return cfg


# --- subcommands ---
def emit_report(cfg: RunConfig, lines: typing.List[str]):
    if cfg.report is not None:
        write_report(lines, cfg.report)
    else:
        sys.stdout.write(report_text(lines))


def _scheme_grid(cfg: RunConfig, scheme, criterion) -> MembershipGrid:
    spec = GridSpec(cfg.domain, *cfg.grid)
    return membership_grid(scheme, criterion, spec, cfg.depth, workers=cfg.workers)


def run_generate(cfg: RunConfig):
    scheme = scheme_from_config(cfg)
    criterion = criterion_from_config(cfg, scheme)
    grid = _scheme_grid(cfg, scheme, criterion)
    if cfg.out is not None:
        write_raster(grid, cfg.out)
    if cfg.points_out is not None:
        write_csv_points(grid.member_centers(), cfg.points_out)
    emit_report(cfg, [
        "scheme: {}".format(scheme.name),
        "depth: {}".format(cfg.depth),
        "grid: {}x{}".format(*cfg.grid),
        "members: {}".format(grid.member_count),
    ])


def _numbered(path, i: int) -> str:
    p = Path(path)
    return p.change(new_fname="{}_{}".format(p.fname, i)).abspath


def run_map(cfg: RunConfig):
    phi = map_from_config(cfg)
    scheme = scheme_from_config(cfg)
    criterion = criterion_from_config(cfg, scheme)
    if cfg.mode == "inverse" and not phi.invertible:
        raise UsageError(
            "--mode: map '{}' has no inverse, use --mode forward".format(phi.name))
    target_domain = cfg.target_domain or default_target_domain(phi, cfg.domain)
    target = GridSpec(target_domain, *cfg.target_grid)
    lines = [
        "map: {}".format(phi.name),
        "mode: {}".format(cfg.mode),
        "target-domain: {}".format(target_domain.to_text()),
    ]
    if cfg.mode == "inverse":
        grid = mapped_membership_grid(phi, scheme, criterion, target, cfg.depth)
        if cfg.out is not None:
            write_raster(grid, cfg.out)
        if cfg.points_out is not None:
            write_csv_points(grid.member_centers(), cfg.points_out)
        lines.append("members: {}".format(grid.member_count))
    else:
        source = _scheme_grid(cfg, scheme, criterion)
        image = forward_image_points(phi, source)
        if cfg.out is not None:
            write_raster(forward_image_grid(phi, source, target), cfg.out)
        if cfg.points_out is not None:
            write_csv_points(image.points, cfg.points_out)
        lines.append("points: {}".format(len(image.points)))
        lines.append("failures: {}".format(len(image.failures)))
        if cfg.orbit:
            orbit = discrete_orbit(phi, source.member_centers(), cfg.orbit)
            for i, points in enumerate(orbit.sets):
                write_csv_points(points, _numbered(cfg.points_out, i))
            lines.append("orbit-sets: {}".format(len(orbit.sets)))
    emit_report(cfg, lines)


def run_evolve(cfg: RunConfig):
    system = system_from_config(cfg)
    if cfg.input is not None:
        points = read_csv_points(cfg.input)
    else:
        scheme = scheme_from_config(cfg, profiles=_uses_profiles(cfg, "evolve"))
        points = _scheme_grid(cfg, scheme, criterion_from_config(cfg, scheme)).member_centers()
    integrator = IntegratorConfig(h=cfg.h)
    lines = ["system: {}".format(system.name), "points: {}".format(len(points))]
    if cfg.times is not None:
        result = evolve_points(
            system, points, SectionRequest(cfg.times), integrator, workers=cfg.workers)
        for t, section in zip(result.times, result.sections):
            write_csv_points(section, "{}_t{}.csv".format(cfg.out_prefix, format_value(t)))
        lines.extend(result.summary_lines())
    if cfg.trajectory_out is not None:
        trajectories = trajectory_samples(
            system, points, cfg.t_end, cfg.dt_sample, integrator, workers=cfg.workers)
        write_csv_points(trajectories.trajectories, cfg.trajectory_out)
        lines.append("trajectories: {}".format(len(trajectories.trajectories)))
    emit_report(cfg, lines)


def run_dimension(cfg: RunConfig):
    if cfg.input is not None:
        grid = grid_from_pnm(cfg.input, cfg.domain)
    else:
        scheme = scheme_from_config(cfg)
        grid = _scheme_grid(cfg, scheme, criterion_from_config(cfg, scheme))
    levels = cfg.levels or default_levels(grid.spec)
    result = box_dimension(grid, levels)
    emit_report(cfg, [
        "slope: {:.6f}".format(result.slope),
        "intercept: {:.6f}".format(result.intercept),
        "r2: {:.6f}".format(result.r2),
        "levels: {}".format(levels),
        "counts: {}".format(",".join(str(c) for c in result.counts)),
    ])


def run_compare(cfg: RunConfig):
    left = grid_from_pnm(cfg.left, UNIT_SQUARE)
    right = grid_from_pnm(cfg.right, UNIT_SQUARE)
    emit_report(cfg, compare_grids(left, right, slack=cfg.slack).to_lines())


def run_oracle(cfg: RunConfig):
    spec = GridSpec(cfg.domain, *cfg.grid)
    grid = oracle_grid(cfg.fractal, spec, cfg.depth)
    if cfg.out is not None:
        write_raster(grid, cfg.out)
    lines = [
        "fractal: {}".format(cfg.fractal),
        "depth: {}".format(cfg.depth),
        "members: {}".format(grid.member_count),
    ]
    if cfg.check:
        if cfg.fractal == "gasket":
            scheme, criterion = GasketScheme.classical(), None
        else:
            scheme, criterion = ModTent2D(), EscapeCriterion.BothSimultaneous
        generated = membership_grid(scheme, criterion, spec, cfg.depth, workers=cfg.workers)
        lines.extend(compare_grids(generated, grid).to_lines())
    emit_report(cfg, lines)


RUNNERS = dict(
    generate=run_generate,
    map=run_map,
    evolve=run_evolve,
    dimension=run_dimension,
    compare=run_compare,
    oracle=run_oracle,
)


def run_cli(args: typing.Optional[typing.Sequence[str]] = None) -> int:
    """
    Run one command line, return the exit status.
    """
    parser = make_parser()
    try:
        ns = parser.parse_args(args)
        if ns.subcommand is None:
            raise UsageError("missing subcommand, choose from: {}".format(
                ", ".join(RUNNERS)))
        configure_logging(verbose=bool(ns.verbose), quiet=bool(ns.quiet))
        cfg = load_config(ns)
        configure_logging(verbose=cfg.verbose, quiet=cfg.quiet)
        RUNNERS[ns.subcommand](cfg)
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else EXIT_OK
    except UsageError as e:
        logger.error("usage error: %s", e)
        return EXIT_USAGE
    except (ValueError, ArithmeticError, OSError) as e:
        logger.error("%s", e, exc_info=logger.isEnabledFor(logging.DEBUG))
        return EXIT_COMPUTE
    return EXIT_OK


def main():  # pragma: no cover
    sys.exit(run_cli())


if __name__ == "__main__":  # pragma: no cover
    main()
