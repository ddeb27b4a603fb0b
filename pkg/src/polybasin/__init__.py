"""Newton-type fixed point iteration schemes, interval convergence
certificates, and basin-of-attraction rendering for complex polynomials."""

from .bracket import (ConditionViolated, ErrorBounds, Interval,
                      IntervalReport, SolveReport, check_conditions,
                      error_bounds, solve)
from .poly import (ParseError, Polynomial, RootFindingError, RootSet,
                   find_roots, parse, to_text)
from .render import (PAPER_WINDOW, BasinImage, RenderConfig, Window,
                     basin_dump, colorize, pixel_to_point, render, write_ppm)
from .schemes import (Chain, DerivativeVanished, NewtonMap, OrbitResult,
                      Sen, SenMap, SHybrid, StopRule, build_map, convex_step,
                      kadioglu, newton, newton_step, parse_scheme,
                      picard_mann, run_orbit, s_hybrid, scheme_step,
                      three_step)

__all__ = [
    "BasinImage", "Chain", "ConditionViolated", "DerivativeVanished",
    "ErrorBounds", "Interval", "IntervalReport", "NewtonMap", "OrbitResult",
    "PAPER_WINDOW", "ParseError", "Polynomial", "RenderConfig",
    "RootFindingError", "RootSet", "SHybrid", "Sen", "SenMap", "SolveReport",
    "StopRule", "Window", "basin_dump", "build_map", "check_conditions",
    "colorize", "convex_step", "error_bounds", "find_roots", "kadioglu",
    "newton", "newton_step", "parse", "parse_scheme", "picard_mann",
    "pixel_to_point", "render", "run_orbit", "s_hybrid", "scheme_step",
    "solve", "three_step", "to_text",
]

__version__ = "0.1.0"
