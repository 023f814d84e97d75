# -*- coding: utf-8 -*-

"""
Run configuration shared by the command line and ``key = value`` files.

Every option is a field of :class:`RunConfig`; ``None`` means "not given".
A config file fills the fields first, command line flags override them
field by field, then :meth:`RunConfig.with_defaults` and
:meth:`RunConfig.validate` run before any computation.

Example config file::

    # classical carpet
    scheme = mod-tent
    criterion = both-simultaneous
    depth = 6
    grid = 729x729
"""

import typing

import attr
from pathlib_mate import Path

from .geometry import RectDomain, GridSpec, UNIT_SQUARE, TRIANGLE_BOX
from .helpers import unknown_name_message
from .mapexpr import VARIABLES, ODE_VARIABLES, UNARY_FUNCTIONS, parse_expr, eval_expr
from .flow import SectionRequest
from .fmi import get_map

SUBCOMMANDS = ("generate", "map", "evolve", "dimension", "compare", "oracle")

CARPET_GRID = (729, 729)
GASKET_GRID = (1024, 887)


class UsageError(Exception):
    """
    Wrong, missing or conflicting options. The message names the flag.
    """


class ConfigError(ValueError):
    def __init__(self, message: str, line: int):
        super(ConfigError, self).__init__("line {}: {}".format(line, message))
        self.message = message
        self.line = line


# --- value kinds ---
def _to_int(text: str) -> int:
    try:
        return int(str(text).strip())
    except ValueError:
        raise ValueError("'{}' is not an integer".format(text))


def parse_number(text: str) -> float:
    """
    A real number or a constant expression such as ``2*pi``.
    """
    text = str(text).strip()
    try:
        return float(text)
    except ValueError:
        pass
    try:
        return eval_expr(parse_expr(text, VARIABLES), {})
    except ValueError as e:
        raise ValueError("'{}' is not a number ({})".format(text, e))


def _to_expr(text: str) -> str:
    # syntax check only, the meaning depends on the subcommand
    text = str(text).strip()
    if text not in UNARY_FUNCTIONS:
        parse_expr(text, VARIABLES)
    return text


def _to_map(text: str) -> str:
    get_map(str(text))
    return str(text).strip()


def _to_ode_expr(text: str) -> str:
    parse_expr(str(text), ODE_VARIABLES)
    return str(text).strip()


def _to_size(text: str) -> typing.Tuple[int, int]:
    return GridSpec.parse_size(text)


def _to_domain(text: str) -> RectDomain:
    return RectDomain.parse(text)


def _to_times(text: str) -> typing.Tuple[float, ...]:
    return SectionRequest.parse(text).times


def _to_bool(text) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError("'{}' is not a boolean".format(text))


def _to_str(text: str) -> str:
    return str(text).strip()


KINDS = dict(
    int=_to_int,
    const=parse_number,
    expr=_to_expr,
    ode_expr=_to_ode_expr,
    map=_to_map,
    size=_to_size,
    domain=_to_domain,
    times=_to_times,
    bool=_to_bool,
    str=_to_str,
    path=_to_str,
)


def option(kind: str, flag: typing.Optional[str] = None):
    return attr.ib(default=None, metadata=dict(kind=kind, flag=flag))


@attr.s
class RunConfig(object):
    # scheme selection
    scheme = option("str")
    criterion = option("str")
    a = option("const")
    b = option("const")
    alpha = option("expr")
    beta = option("expr")
    gamma = option("expr")
    depth = option("int")
    grid = option("size")
    domain = option("domain")
    workers = option("int")

    # mapping
    map = option("map")
    mode = option("str")
    target_domain = option("domain")
    target_grid = option("size")
    orbit = option("int")

    # flow
    system = option("str")
    mu = option("const")
    delta = option("const")
    omega = option("const")
    dx = option("ode_expr")
    dy = option("ode_expr")
    h = option("const")
    times = option("times")
    t_end = option("const")
    dt_sample = option("const")
    backward = option("bool")

    # analysis
    levels = option("int")
    fractal = option("str")
    check = option("bool")
    slack = option("int")
    left = option("path")
    right = option("path")

    # files
    input = option("path", flag="in")
    out = option("path")
    points_out = option("path")
    out_prefix = option("path")
    trajectory_out = option("path")
    report = option("path")

    # logging
    verbose = option("bool")
    quiet = option("bool")

    @classmethod
    def fields(cls) -> typing.List[attr.Attribute]:
        return list(attr.fields(cls))

    @classmethod
    def key_map(cls) -> typing.Dict[str, attr.Attribute]:
        """
        Config file key / flag name -> field, keys use ``-``.
        """
        return {flag_name(a): a for a in cls.fields()}

    @classmethod
    def from_mapping(cls, values: typing.Mapping[str, typing.Any]) -> "RunConfig":
        """
        Build from raw option values keyed by field name, each value is
        converted by its kind. Conversion errors name the flag.
        """
        by_name = {a.name: a for a in cls.fields()}
        kwargs = dict()
        for name, raw in values.items():
            if raw is None:
                continue
            attribute = by_name[name]
            try:
                kwargs[name] = convert(attribute, raw)
            except ValueError as e:
                raise UsageError("--{}: {}".format(flag_name(attribute), e))
        return cls(**kwargs)

    def merged(self, other: "RunConfig") -> "RunConfig":
        """
        ``self`` with every field given in ``other`` replaced.
        """
        changes = {
            a.name: getattr(other, a.name)
            for a in self.fields()
            if getattr(other, a.name) is not None
        }
        return attr.evolve(self, **changes)

    def with_defaults(self, subcommand: str) -> "RunConfig":
        cfg = attr.evolve(self)
        if cfg.scheme is None:
            cfg.scheme = "mod-tent"
        if cfg.fractal is None:
            cfg.fractal = "carpet"
        if subcommand == "oracle":
            gasket = cfg.fractal == "gasket"
        else:
            gasket = cfg.scheme == "gasket"
        if cfg.criterion is None and cfg.scheme != "gasket":
            cfg.criterion = "both-simultaneous"
        if cfg.depth is None:
            cfg.depth = 6
        if cfg.grid is None:
            cfg.grid = GASKET_GRID if gasket else CARPET_GRID
        if cfg.domain is None:
            cfg.domain = TRIANGLE_BOX if gasket else UNIT_SQUARE
        if cfg.workers is None:
            cfg.workers = 1
        if cfg.mode is None:
            cfg.mode = "inverse"
        if cfg.target_grid is None:
            cfg.target_grid = cfg.grid
        if cfg.orbit is None:
            cfg.orbit = 0
        if cfg.system is None:
            cfg.system = "vdp"
        if cfg.h is None:
            cfg.h = 1e-3
        if cfg.backward is None:
            cfg.backward = False
        if cfg.check is None:
            cfg.check = False
        if cfg.slack is None:
            cfg.slack = 0
        if cfg.verbose is None:
            cfg.verbose = False
        if cfg.quiet is None:
            cfg.quiet = False
        return cfg

    def validate(self, subcommand: str):
        """
        Check required and conflicting options of ``subcommand``.

        :raises UsageError: naming the offending flag.
        """
        if subcommand not in SUBCOMMANDS:
            raise UsageError(unknown_name_message("subcommand", subcommand, SUBCOMMANDS))
        if self.verbose and self.quiet:
            raise UsageError("--verbose and --quiet cannot be combined")
        for name in ("depth", "workers"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise UsageError("--{}: {} must be >= 1".format(name, value))
        if self.orbit is not None and self.orbit < 0:
            raise UsageError("--orbit: {} must be >= 0".format(self.orbit))
        if self.slack is not None and self.slack < 0:
            raise UsageError("--slack: {} must be >= 0".format(self.slack))
        if self.levels is not None and self.levels < 3:
            raise UsageError("--levels: {} must be >= 3".format(self.levels))
        if self.h is not None and not self.h > 0:
            raise UsageError("--h: {} must be > 0".format(self.h))

        getattr(self, "_validate_{}".format(subcommand))()

    def _need_output(self, *names: str):
        if all(getattr(self, n) is None for n in names):
            flags = " or ".join("--" + flag_name(attr.fields_dict(RunConfig)[n]) for n in names)
            raise UsageError("missing required flag {}".format(flags))

    def _validate_generate(self):
        self._need_output("out", "points_out")

    def _validate_map(self):
        if self.map is None:
            raise UsageError("missing required flag --map")
        if self.mode not in ("forward", "inverse"):
            raise UsageError("--mode: " + unknown_name_message(
                "mode", str(self.mode), ("forward", "inverse")))
        if self.mode == "inverse" and self.orbit:
            raise UsageError("--orbit needs --mode forward")
        if self.orbit and self.points_out is None:
            raise UsageError("--orbit needs --points-out")
        self._need_output("out", "points_out")

    def _validate_evolve(self):
        if self.times is None and self.t_end is None:
            raise UsageError("missing required flag --times (or --t-end)")
        if self.times is not None and self.out_prefix is None:
            raise UsageError("missing required flag --out-prefix")
        if self.trajectory_out is not None:
            if self.t_end is None:
                raise UsageError("--trajectory-out needs --t-end")
            if self.dt_sample is None:
                raise UsageError("--trajectory-out needs --dt-sample")
        elif self.t_end is not None or self.dt_sample is not None:
            raise UsageError("--t-end and --dt-sample need --trajectory-out")

    def _validate_dimension(self):
        pass

    def _validate_compare(self):
        if self.left is None:
            raise UsageError("missing required flag --left")
        if self.right is None:
            raise UsageError("missing required flag --right")

    def _validate_oracle(self):
        if self.fractal not in ("carpet", "gasket"):
            raise UsageError("--fractal: " + unknown_name_message(
                "fractal", str(self.fractal), ("carpet", "gasket")))
        if self.out is None and not self.check:
            raise UsageError("missing required flag --out (or --check)")


def flag_name(attribute: attr.Attribute) -> str:
    return attribute.metadata.get("flag") or attribute.name.replace("_", "-")


def convert(attribute: attr.Attribute, raw) -> typing.Any:
    if isinstance(raw, bool) and attribute.metadata["kind"] == "bool":
        return raw
    return KINDS[attribute.metadata["kind"]](raw)


def read_config(path) -> RunConfig:
    """
    Parse a ``key = value`` file. ``#`` starts a comment, keys may use
    ``-`` or ``_``.

    :raises ConfigError: for unknown keys and malformed values, with the
        line number.
    """
    keys = RunConfig.key_map()
    values = dict()
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        content = line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError("expected 'key = value', got '{}'".format(content), lineno)
        key, value = (part.strip() for part in content.split("=", 1))
        key = key.replace("_", "-")
        if key not in keys:
            raise ConfigError(unknown_name_message("key", key, keys), lineno)
        attribute = keys[key]
        try:
            values[attribute.name] = convert(attribute, value)
        except ValueError as e:
            raise ConfigError("{}: {}".format(key, e), lineno)
    return RunConfig(**values)
