# -*- coding: utf-8 -*-

"""
One command line per reproduced figure. ``{out}`` in an argument is
replaced by the output directory.

Usage::

    >>> from sierpinski.recipes import run_recipe
    >>> run_recipe("classical-carpet", "/tmp/figures")
    0
"""

import typing

import attr
from pathlib_mate import Path

from .cli import run_cli
from .helpers import unknown_name_message


@attr.s(frozen=True)
class Recipe(object):
    name: str = attr.ib()
    description: str = attr.ib()
    args: typing.Tuple[str, ...] = attr.ib(converter=tuple)

    def command_line(self, out_dir: str) -> typing.List[str]:
        return [arg.format(out=out_dir) for arg in self.args]

    def shell_text(self) -> str:
        quoted = [
            "'{}'".format(arg) if any(c in arg for c in " |*()^") else arg
            for arg in self.args
        ]
        return "sierpinski " + " ".join(quoted).format(out=".")


def _carpet(name, description, scheme, depth, extra=()):
    return Recipe(name, description, [
        "generate", "--scheme", scheme, "--depth", str(depth),
        "--grid", "729x729", "--domain", "0,1,0,1",
    ] + list(extra) + ["--out", "{{out}}/{}.pgm".format(name)])


def _sine(name, description, scheme, a, b, depth):
    return _carpet(name, description, scheme, depth, [
        "--criterion", "both-simultaneous", "--a", a, "--b", b,
    ])


def _gasket(name, description, alpha, beta, gamma, a, depth):
    return Recipe(name, description, [
        "generate", "--scheme", "gasket",
        "--alpha", alpha, "--beta", beta, "--gamma", gamma, "--a", a,
        "--depth", str(depth), "--grid", "1024x887",
        "--out", "{{out}}/{}.pgm".format(name),
    ])


def _mapped_carpet(name, description, map_name, a, b):
    return Recipe(name, description, [
        "map", "--map", map_name, "--mode", "inverse",
        "--scheme", "sine", "--criterion", "both-simultaneous", "--a", a, "--b", b,
        "--depth", "5", "--target-grid", "729x729",
        "--out", "{{out}}/{}.ppm".format(name),
    ])


def _mapped_gasket(name, description, map_name, profile):
    return Recipe(name, description, [
        "map", "--map", map_name, "--mode", "forward",
        "--scheme", "gasket", "--alpha", profile, "--beta", profile, "--gamma", profile,
        "--a", "2", "--depth", "7", "--grid", "1024x887", "--target-grid", "800x800",
        "--out", "{{out}}/{}.pgm".format(name),
    ])


def _sections(name, description, system_args, source_args, times):
    return Recipe(name, description, [
        "evolve",
    ] + list(system_args) + list(source_args) + [
        "--h", "0.001", "--times", times,
        "--out-prefix", "{{out}}/{}".format(name),
    ])


def _trajectory(name, description, system_args, source_args, t_end):
    return Recipe(name, description, [
        "evolve",
    ] + list(system_args) + list(source_args) + [
        "--h", "0.001", "--t-end", t_end, "--dt-sample", "0.1",
        "--trajectory-out", "{{out}}/{}.csv".format(name),
    ])


VDP_CARPET = ("--scheme", "mod-tent", "--criterion", "both-simultaneous",
              "--depth", "4", "--grid", "243x243")
DUFFING_GASKET = ("--scheme", "gasket", "--depth", "5", "--grid", "256x222")
DUFFING = ("--system", "duffing", "--delta", "0.08", "--beta", "0",
           "--alpha", "1", "--gamma", "0.2", "--omega", "1")

_RECIPES = [
    _gasket("classical-gasket", "8th approximation of the Sierpinski gasket",
            "sin(x)", "sin(x)", "sin(x)", "2", 8),
    _carpet("classical-carpet", "6th approximation of the Sierpinski carpet",
            "mod-tent", 6, ["--criterion", "both-simultaneous"]),
    _carpet("cantor-dust", "3rd approximation of the Cantor dust",
            "tent", 3, ["--criterion", "any"]),
    _carpet("cantor-set-2d", "3rd approximation of the two dimensional Cantor set",
            "tent", 3, ["--criterion", "both-eventually"]),
    _carpet("corner-similar-set", "5th approximation of the corner-similar set",
            "tent", 5, ["--criterion", "both-simultaneous"]),
    _sine("sine-carpet-a3-b3", "sine scheme carpet, a = b = 3", "sine", "3", "3", 6),
    _sine("sine-carpet-a4-b4", "sine scheme carpet, a = b = 4", "sine", "4", "4", 4),
    _sine("sine-carpet-a6-b3", "sine scheme carpet, a = 6, b = 3", "sine", "6", "3", 3),
    _sine("sine-carpet-a3-b4", "sine scheme carpet, a = 3, b = 4", "sine", "3", "4", 5),
    _sine("sine-carpet-a2-b3.5", "sine scheme carpet, a = 2, b = 3.5", "sine", "2", "3.5", 6),
    _sine("auto-sine-carpet-a3-b3", "irregular carpet of the autonomous scheme, a = b = 3",
          "auto-sine", "3", "3", 6),
    _sine("auto-sine-carpet-a4-b4", "irregular carpet of the autonomous scheme, a = b = 4",
          "auto-sine", "4", "4", 5),
    _gasket("gasket-sin-a4", "gasket, sin profiles, a = 4",
            "sin(x)", "sin(x)", "sin(x)", "4", 4),
    _gasket("gasket-cos-a2", "gasket, cos profiles, a = 2",
            "cos(x)", "cos(x)", "cos(x)", "2", 7),
    _gasket("gasket-tan-cos-a2", "gasket, alpha = tan, beta = gamma = cos, a = 2",
            "tan(x)", "cos(x)", "cos(x)", "2", 7),
    _gasket("gasket-atan-cos-a7", "gasket, alpha = atan, beta = gamma = cos, a = 7",
            "atan(x)", "cos(x)", "cos(x)", "7", 3),
    _mapped_carpet("mapped-carpet-sumsq-a3-b3", "carpet a = b = 3 mapped by (x^2+y^2, x-y)",
                   "sumsq", "3", "3"),
    _mapped_carpet("mapped-carpet-sumsq-a3-b4", "carpet a = 3, b = 4 mapped by (x^2+y^2, x-y)",
                   "sumsq", "3", "4"),
    _mapped_carpet("mapped-carpet-sincos-a2-b3.5",
                   "carpet a = 2, b = 3.5 mapped by (sin x + y, cos x)", "sincos", "2", "3.5"),
    _mapped_carpet("mapped-carpet-sincos-a2-b1.5",
                   "carpet a = 2, b = 1.5 mapped by (sin x + y, cos x)", "sincos", "2", "1.5"),
    _mapped_gasket("mapped-gasket-quadratic", "Sierpinski gasket mapped by (x^2-y, x+y^2)",
                   "quadratic", "sin(x)"),
    _mapped_gasket("mapped-gasket-cuberoot",
                   "cos gasket mapped by (x+y^2, x-2y^(2/3))", "cuberoot", "cos(x)"),
    _trajectory("vdp-trajectory-mu0.5", "Van der Pol motion of the carpet, mu = 0.5, 0 <= t <= 8",
                ["--system", "vdp", "--mu", "0.5"], VDP_CARPET, "8"),
    _sections("vdp-sections-mu0.5", "Van der Pol sections, mu = 0.5, t = 1, 3, 5, 7",
              ["--system", "vdp", "--mu", "0.5"], VDP_CARPET, "1,3,5,7"),
    _sections("vdp-sections-mu1.3", "Van der Pol sections, mu = 1.3, t = 1, 3",
              ["--system", "vdp", "--mu", "1.3"], VDP_CARPET, "1,3"),
    _trajectory("duffing-trajectory", "Duffing motion of the gasket, 0 <= t <= 3",
                DUFFING, DUFFING_GASKET, "3"),
    _sections("duffing-sections", "Duffing sections, t = 0.8, 1.4, 2.0, 2.6",
              DUFFING, DUFFING_GASKET, "0.8,1.4,2.0,2.6"),
]

FIGURE_RECIPES = {recipe.name: recipe for recipe in _RECIPES}


def get_recipe(name: str) -> Recipe:
    try:
        return FIGURE_RECIPES[name]
    except KeyError:
        raise ValueError(unknown_name_message("recipe", name, FIGURE_RECIPES))


def run_recipe(name: str, out_dir: str, workers: int = 1) -> int:
    """
    Run one recipe with its outputs under ``out_dir``, return the exit
    status.
    """
    recipe = get_recipe(name)
    Path(out_dir).mkdir(parents=True, exist_ok=True)
    args = recipe.command_line(Path(out_dir).abspath)
    if args[0] in ("generate", "map", "evolve"):
        args += ["--workers", str(workers)]
    return run_cli(args + ["--quiet", "--report", "{}/{}.txt".format(Path(out_dir).abspath, name)])
