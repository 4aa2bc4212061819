"""Solutions of the lens equation z - k/sin(conj z) = w in the strip |Re z| < pi/2.

The package finds every solution, classifies source positions by solution
count through winding numbers of image curves, traces critical curves,
caustics and cusps, and renders basins of attraction of the associated
anti-analytic iteration.
"""
__version__ = "0.1.0"

from .core import InvalidParam, LensParams, PoleError, eval_f, parse_complex  # noqa: E402
from .solver import SolveReport, Solution, Orientation, find_all, find_all_shear  # noqa: E402
from .oracle import oracle_find_all  # noqa: E402
from .caustic import find_cusps, trace_caustic  # noqa: E402
from .critical import trace_critical  # noqa: E402
from .classifier import classify, sweep  # noqa: E402
from .basins import render_basins  # noqa: E402

__all__ = [
    "InvalidParam", "LensParams", "PoleError", "eval_f", "parse_complex",
    "SolveReport", "Solution", "Orientation", "find_all", "find_all_shear",
    "oracle_find_all", "find_cusps", "trace_caustic", "trace_critical",
    "classify", "sweep", "render_basins",
]
