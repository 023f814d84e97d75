# -*- coding: utf-8 -*-

"""
Sierpinski carpets and gaskets by escape criterion iteration, their images
under plane maps and their motions under planar ODE flows.
"""

from ._version import __version__

__short_description__ = (
    "Escape criterion Sierpinski fractals, fractal mapping iteration "
    "and fractal dynamics under ODE flows."
)
__license__ = "MIT"
__author__ = "Sanhe Hu"
__author_email__ = "husanhe@gmail.com"
__maintainer__ = "Sanhe Hu"
__maintainer_email__ = "husanhe@gmail.com"
__github_username__ = "MacHu-GWU"

try:
    from .geometry import (
        Point2, RectDomain, TriangleDomain, GridSpec, MembershipGrid,
        UNIT_SQUARE, TRIANGLE_BOX, cell_center, in_triangle,
    )
    from .schemes import (
        EscapeCriterion, Tent2D, ModTent2D, SineScheme, AutoSine, GasketScheme,
        build_scheme, escape_index, membership_grid,
    )
    from .mapexpr import parse_expr, parse_map, parse_func, eval_expr
    from .fmi import (
        PlaneMap, get_map, mapped_escape_index, mapped_membership_grid,
        forward_image_points, discrete_orbit, verify_pushforward,
    )
    from .flow import (
        VanDerPol, Duffing, ExprSystem, BackwardSystem, IntegratorConfig,
        SectionRequest, vector_field, rk4_step, flow_to, evolve_points,
        trajectory_samples,
    )
    from .analysis import (
        ifs_cells, cells_to_grid, box_dimension, compare_grids, estimate_bilipschitz,
    )
except ImportError as e:  # pragma: no cover
    print(e)
except:  # pragma: no cover
    raise
