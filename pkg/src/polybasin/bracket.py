"""Convergence certificates for Newton-type iterations on an interval.

For a real polynomial f on [a, b] the classical hypotheses are

    (f1) f(a) * f(b) < 0
    (f2) f' does not vanish on [a, b]
    (f3) 2m > M,  m = min |f'|, M = max |f'| over [a, b]

check_conditions() evaluates all three with m and M computed from critical
points rather than sampling: conditions like 2m > M are knife-edge, and a
sampled minimum can falsely certify. error_bounds() turns the report into
the a-posteriori factors C with |x_n - x*| <= C * |step|, and solve() runs
the three-stage chain (relax by beta, relax by alpha, full Newton) while
recording the factor-weighted step sizes.

Caveat on the combined-scheme factor: for a monotonically converging
superlinear run we always have |x_n - x*| >= |x_n - x_{n+1}|, so a factor
below 1 cannot bound the error of the iterate the step starts from. The
factor is reported for diagnostics; callers comparing it against a true
root should expect violations (they are logged by the empirical checks in
the test suite, not raised here).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

from .poly import Polynomial, find_roots
from .schemes import NewtonMap, OrbitResult, StopRule, kadioglu, run_orbit

log = logging.getLogger(__name__)


class ConditionViolated(ValueError):
    """An operation required (f1)-(f3) and they do not hold."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"need a < b, got [{self.a}, {self.b}]")

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.a + self.b)

    def contains(self, x: float) -> bool:
        return self.a <= x <= self.b


@dataclass(frozen=True)
class IntervalReport:
    """Outcome of the (f1)-(f3) check plus the derivative bounds.

    m and M bound |f'|, M2 bounds |f''|; m1 is an alias of m kept for the
    second-derivative estimate M2/(2*m1).
    """

    f1_holds: bool
    f2_holds: bool
    f3_holds: bool
    m: float
    M: float
    M2: float

    @property
    def m1(self) -> float:
        return self.m

    @property
    def all_hold(self) -> bool:
        return self.f1_holds and self.f2_holds and self.f3_holds

    def summary(self) -> str:
        mark = lambda ok: "holds" if ok else "VIOLATED"
        return (
            f"f1 (sign change)        : {mark(self.f1_holds)}\n"
            f"f2 (f' nonzero, m > 0)  : {mark(self.f2_holds)}   m = {self.m:.12g}\n"
            f"f3 (2m > M)             : {mark(self.f3_holds)}   M = {self.M:.12g}\n"
            f"M2 (max |f''|)          : {self.M2:.12g}"
        )


@dataclass(frozen=True)
class ErrorBounds:
    """A-posteriori factors: |x_n - x*| <= factor * |x_n - x_{n+1}|.

    demidovich uses second-derivative data, berinde is M/m for plain
    Newton, karaca_yildirim is the three-stage chain factor
    m*M / ((1+alpha)*M^2 - beta*m^2), and pm_bound is the two-stage
    factor m*M / (M^2 - alpha*m^2).
    """

    demidovich: float
    berinde: float
    karaca_yildirim: float
    pm_bound: float


def _real_roots_in(q: Polynomial, a: float, b: float) -> list[float]:
    """Real roots of q inside [a, b]; near-real and near-endpoint roots are
    snapped in, which can only add candidate points, never lose extrema."""
    if q.degree < 1:
        return []
    rs = find_roots(q, tol=1e-12)
    out = []
    for r in rs.roots:
        if abs(r.imag) > 1e-8:
            continue
        x = min(max(r.real, a), b)
        if abs(x - r.real) <= 1e-9 * (1.0 + abs(r.real)):
            out.append(x)
    return out


def _abs_range(q: Polynomial, a: float, b: float) -> tuple[float, float]:
    """Min and max of |q| over [a, b] via endpoints, critical points of q,
    and zeros of q (|q| attains interior minima at its kinks)."""
    pts = [a, b]
    if q.degree >= 2:
        pts += _real_roots_in(q.derivative(), a, b)
    pts += _real_roots_in(q, a, b)
    vals = [abs(q(complex(x, 0.0)).real) for x in pts]
    return min(vals), max(vals)


def check_conditions(f: Polynomial, iv: Interval) -> IntervalReport:
    """Evaluate (f1)-(f3) for a real polynomial on iv.

    m, M come from |f'| at the endpoints, the real zeros of f'' and the
    real zeros of f' inside the interval; M2 likewise for |f''|. All of it
    is exact up to root refinement, no sampling.
    """
    if not f.is_real():
        raise ValueError("interval conditions are defined for real polynomials")
    if f.degree < 1:
        raise ValueError("degree >= 1 required")
    fa = f(complex(iv.a, 0.0)).real
    fb = f(complex(iv.b, 0.0)).real
    f1 = fa * fb < 0.0
    df = f.derivative()
    m, M = _abs_range(df, iv.a, iv.b)
    if df.degree >= 1:
        _, M2 = _abs_range(df.derivative(), iv.a, iv.b)
    else:
        M2 = 0.0
    return IntervalReport(f1_holds=f1, f2_holds=m > 0.0,
                          f3_holds=2.0 * m > M, m=m, M=M, M2=M2)


def error_bounds(report: IntervalReport, alpha: float, beta: float) -> ErrorBounds:
    """The four a-posteriori factors for the given report.

    Requires (f2) and (f3); alpha and beta must be in (0, 1).
    """
    if not (0.0 < alpha < 1.0 and 0.0 < beta < 1.0):
        raise ValueError("alpha and beta must lie in (0, 1)")
    if not (report.f2_holds and report.f3_holds):
        raise ConditionViolated(
            f"need f2 and f3: m = {report.m:g}, M = {report.M:g}")
    m, M = report.m, report.M
    return ErrorBounds(
        demidovich=report.M2 / (2.0 * report.m1),
        berinde=M / m,
        karaca_yildirim=(m * M) / ((1.0 + alpha) * M * M - beta * m * m),
        pm_bound=(m * M) / (M * M - alpha * m * m),
    )


@dataclass(frozen=True)
class SolveStep:
    index: int
    x: float
    dx: float
    bound: float | None
    residual: float


@dataclass(frozen=True)
class SolveReport:
    orbit: OrbitResult
    conditions: IntervalReport
    bounds: ErrorBounds | None
    certified: bool
    steps: tuple
    left_interval: bool

    @property
    def root(self) -> float:
        return self.orbit.final.real

    @property
    def converged(self) -> bool:
        return self.orbit.converged

    def table(self) -> str:
        """Plain-text step table: index, x_n, |x_n - x_{n+1}|, factor-
        weighted bound, residual f(x_n)."""
        lines = [f"{'step':>4}  {'x_n':>18}  {'|x_n-x_n+1|':>14}  "
                 f"{'bound':>14}  {'f(x_n)':>14}"]
        for s in self.steps:
            bound = f"{s.bound:.6e}" if s.bound is not None else "-"
            lines.append(f"{s.index:>4}  {s.x:>18.12g}  {s.dx:>14.6e}  "
                         f"{bound:>14}  {s.residual:>14.6e}")
        return "\n".join(lines)


def solve(f: Polynomial, iv: Interval, alpha: float = 0.8, beta: float = 0.6,
          stop: StopRule | None = None, x0: float | None = None) -> SolveReport:
    """Run the three-stage chain (beta, alpha, then full Newton) on the
    real line from x0 (interval midpoint by default).

    The run is *certified* when (f1)-(f3) all hold; otherwise it proceeds
    anyway with a warning, since the iteration often converges well outside
    the hypotheses and the report is the diagnostic. Iterates are never
    clamped to the interval; leaving it is logged and flagged.
    """
    report = check_conditions(f, iv)
    if not report.all_hold:
        log.warning("conditions not satisfied on [%g, %g]; run is uncertified",
                    iv.a, iv.b)
    try:
        bounds = error_bounds(report, alpha, beta)
    except ConditionViolated:
        bounds = None

    if x0 is None:
        x0 = iv.midpoint
    if not iv.contains(x0):
        raise ValueError(f"x0 = {x0} outside [{iv.a}, {iv.b}]")
    if stop is None:
        stop = StopRule(criterion="displacement", eps=1e-12, max_iter=100)

    orbit = run_orbit(kadioglu(alpha, beta), NewtonMap(f), complex(x0, 0.0), stop)
    xs = [z.real for z in orbit.trace]
    left = any(not iv.contains(x) for x in xs)
    if left:
        log.warning("iterates left [%g, %g] (not clamped)", iv.a, iv.b)

    factor = bounds.karaca_yildirim if bounds is not None else None
    steps = tuple(
        SolveStep(index=n, x=xs[n], dx=abs(xs[n] - xs[n + 1]),
                  bound=None if factor is None else factor * abs(xs[n] - xs[n + 1]),
                  residual=f(complex(xs[n], 0.0)).real)
        for n in range(len(xs) - 1)
    )
    return SolveReport(orbit=orbit, conditions=report, bounds=bounds,
                       certified=report.all_hold, steps=steps,
                       left_interval=left)
