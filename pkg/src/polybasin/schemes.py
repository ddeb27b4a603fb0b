"""Newton-type fixed point iteration schemes over the complex plane.

Every scheme is built from the Newton map N(z) = z - p(z)/p'(z) and the
relaxed step (1-t)*z + t*N(z):

* ``Chain(weights)`` applies relaxed steps in sequence. Weights are listed
  innermost-first, i.e. in the order they are applied. The classic methods
  are chains: ``newton()`` is Chain[1], ``picard_mann(a)`` is Chain[a, 1],
  ``three_step(g, b, a)`` is Chain[g, b, a], and ``kadioglu(a, b)`` is
  Chain[b, a, 1] (relaxed step with b, then a, then a full Newton step).
* ``SHybrid(a, b)`` mixes the Newton images of the point and of a relaxed
  point: out = (1-a)*N(z) + a*N(y) with y = (1-b)*z + b*N(z).
* ``Sen`` divides by f' plus a sign-aligned slope bound M instead of f'
  alone; it is a real-line method, on complex inputs the sign of Re p'(z)
  is used (experimental).

All magnitude tests go through cmag() and companion helpers so that the
vectorized renderer can reproduce orbits bit for bit; see render.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .poly import Polynomial


class DerivativeVanished(ArithmeticError):
    """p'(z) (or a Sen denominator) fell below the vanishing floor; the
    orbit through this point cannot continue."""


def cmag(z: complex) -> float:
    """|z| as sqrt(re^2 + im^2).

    Deliberately not hypot: plain multiply/add/sqrt are correctly rounded
    IEEE operations, so numpy reproduces this value exactly lane by lane.
    """
    return math.sqrt(z.real * z.real + z.imag * z.imag)


def ipow(x: float, n: int) -> float:
    """x**n for n >= 0 by binary squaring (same multiply chain as the
    vectorized path, unlike libm pow)."""
    r = 1.0
    b = x
    while n:
        if n & 1:
            r = r * b
        n >>= 1
        if n:
            b = b * b
    return r


# |p'(z)| at or below FLOOR_SCALE * (1 + |z|**(deg p - 1)) counts as vanished.
FLOOR_SCALE = 1e-14


@dataclass(frozen=True)
class NewtonMap:
    """A polynomial with its derivative cached."""

    p: Polynomial
    dp: Polynomial = field(init=False, default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.p.degree < 1:
            raise ValueError("NewtonMap requires degree >= 1")
        object.__setattr__(self, "dp", self.p.derivative())

    def floor_at(self, z: complex) -> float:
        return FLOOR_SCALE * (1.0 + ipow(cmag(z), self.p.degree - 1))


@dataclass(frozen=True)
class SenMap(NewtonMap):
    """NewtonMap plus the slope bound M used by the Sen denominator."""

    m_bound: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not (self.m_bound > 0):
            raise ValueError("m_bound must be positive")


@dataclass(frozen=True)
class Chain:
    """Sequence of relaxed Newton steps; weights applied left to right."""

    weights: tuple

    def __post_init__(self):
        ws = tuple(float(w) for w in self.weights)
        if not ws:
            raise ValueError("chain needs at least one weight")
        for w in ws:
            if not 0.0 < w <= 1.0:
                raise ValueError(f"chain weight {w} outside (0, 1]")
        object.__setattr__(self, "weights", ws)


@dataclass(frozen=True)
class SHybrid:
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name}={v} outside (0, 1)")


@dataclass(frozen=True)
class Sen:
    """Marker for the sign-aligned denominator scheme. ``m_bound`` is only
    a construction hint carried from the CLI; the bound that is actually
    used lives on the SenMap."""

    m_bound: float | None = None


def newton() -> Chain:
    return Chain((1.0,))


def picard_mann(alpha: float) -> Chain:
    return Chain((alpha, 1.0))


def three_step(gamma: float, beta: float, alpha: float) -> Chain:
    """Arguments in application order: gamma first, alpha last."""
    return Chain((gamma, beta, alpha))


def kadioglu(alpha: float, beta: float) -> Chain:
    """Relaxed step with beta, then alpha, then a full Newton step."""
    return Chain((beta, alpha, 1.0))


def s_hybrid(alpha: float, beta: float) -> SHybrid:
    return SHybrid(alpha, beta)


@dataclass(frozen=True)
class StopRule:
    """When to stop an orbit: displacement |z1 - z0| < eps, or residual
    |p(z1)| < eps, capped at max_iter steps. Defaults are the rendering
    parameters eps = 0.001, max_iter = 12."""

    criterion: str = "displacement"
    eps: float = 1e-3
    max_iter: int = 12

    def __post_init__(self):
        if self.criterion not in ("displacement", "residual"):
            raise ValueError(f"unknown stop criterion {self.criterion!r}")
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class OrbitResult:
    final: complex
    iterations: int
    converged: bool
    trace: tuple


def newton_step(map_: NewtonMap, z: complex) -> complex:
    """One Newton step z - p(z)/p'(z).

    Raises DerivativeVanished when |p'(z)| is at or below the floor
    FLOOR_SCALE * (1 + |z|**(deg-1)).
    """
    dv = map_.dp(z)
    if cmag(dv) <= map_.floor_at(z):
        raise DerivativeVanished(f"|p'({z})| below floor")
    return z - map_.p(z) / dv


def convex_step(map_: NewtonMap, z: complex, t: float) -> complex:
    """Relaxed Newton step (1-t)*z + t*N(z); t = 1 gives newton_step exactly."""
    n = newton_step(map_, z)
    return (1.0 - t) * z + t * n


def _sen_step(map_: SenMap, z: complex) -> complex:
    dv = map_.dp(z)
    if cmag(dv) <= map_.floor_at(z):
        raise DerivativeVanished(f"|p'({z})| below floor")
    s = 1.0 if dv.real > 0.0 else (-1.0 if dv.real < 0.0 else 0.0)
    denom = dv + s * map_.m_bound
    if cmag(denom) <= map_.floor_at(z):
        raise DerivativeVanished(f"Sen denominator vanished at {z}")
    return z - 2.0 * map_.p(z) / denom


def scheme_step(scheme, map_: NewtonMap, z: complex) -> complex:
    """Advance z by one outer iteration of the scheme."""
    if isinstance(scheme, Chain):
        for t in scheme.weights:
            z = convex_step(map_, z, t)
        return z
    if isinstance(scheme, SHybrid):
        nz = newton_step(map_, z)
        y = (1.0 - scheme.beta) * z + scheme.beta * nz
        ny = newton_step(map_, y)
        return (1.0 - scheme.alpha) * nz + scheme.alpha * ny
    if isinstance(scheme, Sen):
        if not isinstance(map_, SenMap):
            raise TypeError("Sen scheme requires a SenMap")
        return _sen_step(map_, z)
    raise TypeError(f"unknown scheme {scheme!r}")


def run_orbit(scheme, map_: NewtonMap, z0: complex, stop: StopRule) -> OrbitResult:
    """Iterate scheme_step from z0 until the stop rule fires or max_iter.

    A DerivativeVanished anywhere marks the orbit non-convergent and
    truncates the trace at the last good iterate.
    """
    trace = [z0]
    z = z0
    converged = False
    for _ in range(stop.max_iter):
        try:
            zn = scheme_step(scheme, map_, z)
        except DerivativeVanished:
            break
        trace.append(zn)
        if stop.criterion == "displacement":
            hit = cmag(zn - z) < stop.eps
        else:
            hit = cmag(map_.p(zn)) < stop.eps
        z = zn
        if hit:
            converged = True
            break
    return OrbitResult(final=z, iterations=len(trace) - 1,
                       converged=converged, trace=tuple(trace))


# CLI / config syntax: name[:p1,p2,...]. Missing parameters fall back to
# the defaults passed in (the experiment values 0.8 / 0.6 / 0.5).
def parse_scheme(text: str, alpha: float = 0.8, beta: float = 0.6,
                 gamma: float = 0.5):
    """Parse a scheme spec string.

    Recognized forms: ``newton``, ``picard_mann:a``, ``three_step:g,b,a``
    (application order, innermost first), ``kadioglu:a,b``, ``s:a,b``,
    ``chain:t1,t2,...``, ``sen:M``.
    """
    name, _, argstr = text.strip().partition(":")
    name = name.strip().lower()
    try:
        args = [float(a) for a in argstr.split(",")] if argstr.strip() else []
    except ValueError:
        raise ValueError(f"bad scheme parameters in {text!r}") from None

    def want(n, defaults):
        if not args:
            return list(defaults)
        if len(args) != n:
            raise ValueError(f"scheme {name!r} takes {n} parameters, got {len(args)}")
        return args

    if name == "newton":
        if args:
            raise ValueError("newton takes no parameters")
        return newton()
    if name == "picard_mann":
        (a,) = want(1, [alpha])
        return picard_mann(a)
    if name == "three_step":
        g, b, a = want(3, [gamma, beta, alpha])
        return three_step(g, b, a)
    if name == "kadioglu":
        a, b = want(2, [alpha, beta])
        return kadioglu(a, b)
    if name == "s":
        a, b = want(2, [alpha, beta])
        return s_hybrid(a, b)
    if name == "chain":
        if not args:
            raise ValueError("chain needs at least one weight")
        return Chain(tuple(args))
    if name == "sen":
        (m,) = want(1, [None])
        if m is None:
            raise ValueError("sen needs a slope bound, e.g. sen:3.2")
        return Sen(m_bound=m)
    raise ValueError(f"unknown scheme {name!r}")


def build_map(scheme, p: Polynomial) -> NewtonMap:
    """Make the map a scheme iterates: a SenMap for Sen, NewtonMap otherwise."""
    if isinstance(scheme, Sen):
        if scheme.m_bound is None:
            raise ValueError("Sen scheme needs m_bound to build its map")
        return SenMap(p, m_bound=scheme.m_bound)
    return NewtonMap(p)
