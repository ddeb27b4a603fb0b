"""Complex polynomials: parsing, Horner evaluation, derivatives, and a
simultaneous root finder used to label basins of attraction.

Coefficients are stored in ascending order: ``coeffs[i]`` multiplies ``z**i``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from decimal import Decimal


class ParseError(ValueError):
    """Raised for malformed polynomial expressions.

    ``position`` is the 0-based index into the source text where the
    problem was detected, or None for whole-expression problems.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class RootFindingError(RuntimeError):
    """Raised when the simultaneous root iteration fails to reach the
    requested residual tolerance; carries the best roots found so far."""

    def __init__(self, message, roots, residuals):
        super().__init__(message)
        self.roots = tuple(roots)
        self.residuals = tuple(residuals)


@dataclass(frozen=True)
class Polynomial:
    """Polynomial with complex coefficients, ascending order.

    A valid polynomial has degree >= 1 and a nonzero leading coefficient.
    Degree-0 values can arise internally (derivative of a linear) and are
    tolerated, but `parse` and the iteration engines reject them.
    """

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(complex(c) for c in self.coeffs)
        if not cs:
            raise ValueError("polynomial needs at least one coefficient")
        for c in cs:
            if not (math.isfinite(c.real) and math.isfinite(c.imag)):
                raise ValueError(f"non-finite coefficient {c!r}")
        if len(cs) > 1 and cs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z: complex) -> complex:
        """Evaluate at z by Horner's scheme."""
        v = self.coeffs[-1]
        for c in self.coeffs[-2::-1]:
            v = v * z + c
        return v

    def derivative(self) -> "Polynomial":
        """Formal derivative; degree drops by one."""
        if self.degree < 1:
            raise ValueError("cannot differentiate a constant polynomial")
        return Polynomial(tuple((i + 1) * c for i, c in enumerate(self.coeffs[1:])))

    def is_real(self) -> bool:
        return all(c.imag == 0.0 for c in self.coeffs)

    def to_text(self, variable: str = "z") -> str:
        return to_text(self, variable)

    def __str__(self):
        return self.to_text()


def _fmt_real(v: float) -> str:
    """Positional decimal form that round-trips through float()."""
    if v == int(v) and abs(v) < 1e16:
        return str(int(v))
    return format(Decimal(repr(v)), "f")


def to_text(p: Polynomial, variable: str = "z") -> str:
    """Canonical printer: descending powers, explicit '*' and '^', real
    coefficients in plain decimal. Output re-parses to the same value
    whenever every coefficient is real."""
    parts = []
    for power in range(p.degree, -1, -1):
        c = p.coeffs[power]
        if c == 0:
            continue
        if c.imag != 0.0:
            body = f"({c.real}{c.imag:+}j)"
            negative = False
        else:
            negative = c.real < 0
            body = _fmt_real(abs(c.real))
        if power == 0:
            term = body
        else:
            var = variable if power == 1 else f"{variable}^{power}"
            term = var if body == "1" else f"{body}*{var}"
        if not parts:
            parts.append(f"-{term}" if negative else term)
        else:
            parts.append(f" - {term}" if negative else f" + {term}")
    if not parts:
        return "0"
    return "".join(parts)


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str | None:
        self.skip_ws()
        if self.pos >= len(self.text):
            return None
        return self.text[self.pos]

    def take(self) -> str:
        ch = self.peek()
        if ch is None:
            raise ParseError("unexpected end of expression", len(self.text))
        self.pos += 1
        return ch

    def number(self) -> float:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos < len(self.text) and self.text[self.pos] == ".":
            self.pos += 1
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
        tok = self.text[start:self.pos]
        if tok in ("", "."):
            raise ParseError("expected a number", start)
        return float(tok)

    def integer(self) -> int:
        self.skip_ws()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        tok = self.text[start:self.pos]
        if not tok:
            raise ParseError("expected an integer exponent", start)
        return int(tok)


def parse(text: str, variable: str = "z") -> Polynomial:
    """Parse a polynomial expression in one variable.

    Grammar (whitespace ignored)::

        expr := ['+'|'-'] term (('+'|'-') term)*
        term := coef ['*' var ['^' int]] | var ['^' int]
        coef := decimal          # e.g. 2, 0.5, .5
        int  := positive integer

    Scientific notation is not accepted (an exponent letter would be
    ambiguous with a variable named 'e'); coefficients are plain decimals.

    Raises ParseError for syntax errors (with position), for a term in a
    different variable, and for a constant (degree-0) result.
    """
    if len(variable) != 1 or not variable.isalpha():
        raise ValueError(f"variable must be a single letter, got {variable!r}")
    sc = _Scanner(text)
    powers: dict[int, float] = {}
    sign = 1.0
    ch = sc.peek()
    if ch is None:
        raise ParseError("empty expression", 0)
    if ch in "+-":
        sc.take()
        sign = -1.0 if ch == "-" else 1.0
    while True:
        coef, power = _parse_term(sc, variable)
        powers[power] = powers.get(power, 0.0) + sign * coef
        ch = sc.peek()
        if ch is None:
            break
        if ch not in "+-":
            raise ParseError(f"expected '+' or '-', found {ch!r}", sc.pos)
        sc.take()
        sign = -1.0 if ch == "-" else 1.0
    degree = max((k for k, v in powers.items() if v != 0.0), default=0)
    if degree < 1:
        raise ParseError("expression reduces to a constant (degree 0)")
    coeffs = [0.0] * (degree + 1)
    for k, v in powers.items():
        if k <= degree:
            coeffs[k] = v
    return Polynomial(tuple(coeffs))


def _parse_term(sc: _Scanner, variable: str):
    ch = sc.peek()
    if ch is None:
        raise ParseError("expected a term", sc.pos)
    if ch.isdigit() or ch == ".":
        coef = sc.number()
        if sc.peek() == "*":
            sc.take()
            power = _parse_var_power(sc, variable)
            return coef, power
        return coef, 0
    if ch.isalpha():
        power = _parse_var_power(sc, variable)
        return 1.0, power
    raise ParseError(f"unexpected character {ch!r}", sc.pos)


def _parse_var_power(sc: _Scanner, variable: str) -> int:
    pos = sc.pos
    ch = sc.take()
    if not ch.isalpha():
        raise ParseError(f"expected variable {variable!r}, found {ch!r}", pos)
    if ch != variable:
        raise ParseError(f"unknown variable {ch!r} (expected {variable!r})", pos)
    if sc.peek() == "^":
        sc.take()
        pos = sc.pos
        k = sc.integer()
        if k < 1:
            raise ParseError("exponent must be a positive integer", pos)
        return k
    return 1


@dataclass(frozen=True)
class RootSet:
    """All roots of a polynomial, sorted by (real, imag), with the
    residuals |p(root)| observed at each."""

    roots: tuple
    residuals: tuple

    def __len__(self):
        return len(self.roots)


# Sweeps cap for the simultaneous iteration; generous, typical runs need <20.
_MAX_SWEEPS = 400


def find_roots(p: Polynomial, tol: float = 1e-12) -> RootSet:
    """Find all complex roots of p simultaneously (Aberth-Ehrlich).

    Starting points sit on a circle of radius 1 + max|c_i/c_n|, rotated by
    0.4 rad so symmetric polynomials like z^n - 1 do not stall. Iterates
    are refined until max_i |p(r_i)| < tol. Roots come back sorted by real
    part, then imaginary part, which fixes basin color assignment.

    Raises RootFindingError if the residual target is not met within the
    sweep cap.
    """
    n = p.degree
    if n < 1:
        raise ValueError("find_roots requires degree >= 1")
    if n == 1:
        r = -p.coeffs[0] / p.coeffs[1]
        return RootSet((r,), (abs(p(r)),))

    lead = p.coeffs[-1]
    radius = 1.0 + max(abs(c / lead) for c in p.coeffs[:-1])
    zs = [radius * cmath.exp(1j * (2.0 * math.pi * k / n + 0.4)) for k in range(n)]
    dp = p.derivative()

    best = None
    for _ in range(_MAX_SWEEPS):
        residual = max(abs(p(z)) for z in zs)
        if best is None or residual < best[0]:
            best = (residual, list(zs))
        if residual < tol:
            ordered = sorted(zs, key=lambda z: (z.real, z.imag))
            return RootSet(tuple(ordered), tuple(abs(p(z)) for z in ordered))
        for i in range(n):
            zi = zs[i]
            pv = p(zi)
            if pv == 0:
                continue
            dv = dp(zi)
            if dv == 0:
                # off a critical point; nudge deterministically
                zs[i] = zi * 1.000001 + 1e-6
                continue
            w = pv / dv
            s = sum(1.0 / (zi - zs[j]) for j in range(n) if j != i)
            denom = 1.0 - w * s
            zs[i] = zi - (w if denom == 0 else w / denom)

    res, zs = best
    ordered = sorted(zs, key=lambda z: (z.real, z.imag))
    raise RootFindingError(
        f"roots not refined below {tol:g} within {_MAX_SWEEPS} sweeps "
        f"(best residual {res:g})",
        ordered,
        tuple(abs(p(z)) for z in ordered),
    )
