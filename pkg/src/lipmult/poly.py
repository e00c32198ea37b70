"""Exact sparse multivariate polynomials over the Gaussian rationals.

Symbolic routes (order, initial form, Jacobian quotients) work on
:class:`Polynomial` exactly.  Numeric routes convert at the boundary through
:meth:`Polynomial.restrict_to_line`, :meth:`Polynomial.evaluate` and
:class:`DenseBivariate`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

import numpy as np
from numpy.polynomial import polynomial as npp

__all__ = [
    "GaussianRational",
    "Polynomial",
    "UnivariateComplexPoly",
    "DenseBivariate",
    "ParseError",
    "INFINITE",
    "parse",
    "format_poly",
    "default_variables",
]

INFINITE = math.inf


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            re, im = re.re, re.im + Fraction(im)
        elif isinstance(re, complex):
            raise TypeError("complex floats are not exact; use GaussianRational.from_complex")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Rational)):
            return cls(value)
        if isinstance(value, float):
            return cls(Fraction(value))
        if isinstance(value, complex):
            return cls.from_complex(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussianRational")

    @classmethod
    def from_complex(cls, value: complex, max_denominator: int | None = None):
        re, im = Fraction(value.real), Fraction(value.imag)
        if max_denominator is not None:
            re, im = re.limit_denominator(max_denominator), im.limit_denominator(max_denominator)
        return cls(re, im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __add__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.im and not other.im:
            return GaussianRational(self.re * other.re)
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inverse(self):
        n = self.norm2()
        if not n:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, other):
        try:
            other = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if not other.im:
            if not other.re:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational(self.re / other.re, self.im / other.re)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result, base = GaussianRational(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re!s}, {self.im!s})"

    def __str__(self):
        return _format_coefficient(self)


ONE = GaussianRational(1)
ZERO = GaussianRational(0)


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _format_coefficient(c: GaussianRational) -> str:
    if not c.im:
        return _format_rational(c.re)
    if c.im == 1:
        imag = "i"
    elif c.im == -1:
        imag = "-i"
    else:
        imag = f"{_format_rational(c.im)}*i"
    if not c.re:
        return imag
    sign = "-" if c.im < 0 else "+"
    mag = imag.lstrip("-")
    return f"({_format_rational(c.re)}{sign}{mag})"


def default_variables(n: int) -> list[str]:
    """Default variable names: x, y, z, w, then x1..xn."""
    if n <= 4:
        return ["x", "y", "z", "w"][:n]
    return [f"x{k}" for k in range(1, n + 1)]


class Polynomial:
    """Immutable sparse polynomial in a fixed number of variables.

    ``terms`` maps exponent tuples to nonzero :class:`GaussianRational`
    coefficients.  Arithmetic between polynomials with different variable
    counts raises ``ValueError``.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 1:
            raise ValueError("nvars must be positive")
        clean: dict[tuple[int, ...], GaussianRational] = {}
        for exps, coef in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars:
                raise ValueError(f"monomial {exps} does not have {nvars} exponents")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = GaussianRational.coerce(coef)
            if c:
                clean[exps] = clean.get(exps, ZERO) + c
                if not clean[exps]:
                    del clean[exps]
        object.__setattr__(self, "nvars", nvars)
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # construction helpers
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls(nvars)

    @classmethod
    def constant(cls, nvars: int, c) -> "Polynomial":
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        exps = [0] * nvars
        exps[index] = 1
        return cls(nvars, {tuple(exps): 1})

    @classmethod
    def linear_form(cls, coeffs: Sequence) -> "Polynomial":
        n = len(coeffs)
        terms = {}
        for k, c in enumerate(coeffs):
            e = [0] * n
            e[k] = 1
            terms[tuple(e)] = c
        return cls(n, terms)

    # basic protocol
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Rational, GaussianRational)):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            object.__setattr__(self, "_hash", hash((self.nvars, frozenset(self.terms.items()))))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)

    def _check(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(
                    f"variable count mismatch: {self.nvars} vs {other.nvars}"
                )
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other):
        other = self._check(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, ZERO) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Polynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out: dict[tuple[int, ...], GaussianRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, ZERO) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("only non-negative integer powers")
        result, base = Polynomial.constant(self.nvars, 1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c) -> "Polynomial":
        c = GaussianRational.coerce(c)
        return Polynomial(self.nvars, {e: c * v for e, v in self.terms.items()})

    # graded structure
    @property
    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def ord0(self):
        """Order at the origin: lowest total degree present, ``INFINITE`` for 0."""
        if not self.terms:
            return INFINITE
        return min(sum(e) for e in self.terms)

    def homog_components(self) -> dict[int, "Polynomial"]:
        groups: dict[int, dict] = {}
        for e, c in self.terms.items():
            groups.setdefault(sum(e), {})[e] = c
        return {d: Polynomial(self.nvars, groups[d]) for d in sorted(groups)}

    def initial_form(self) -> "Polynomial":
        if not self.terms:
            raise ValueError("the zero polynomial has no initial form")
        m = self.ord0()
        return Polynomial(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == m})

    def is_homogeneous(self) -> tuple[bool, int | None]:
        """Return ``(flag, degree)``; the zero polynomial counts as homogeneous."""
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True, None
        if len(degs) == 1:
            return True, degs.pop()
        return False, None

    def derivative(self, var: int) -> "Polynomial":
        if not 0 <= var < self.nvars:
            raise IndexError(f"variable index {var} out of range for {self.nvars} variables")
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                ne = list(e)
                ne[var] -= 1
                out[tuple(ne)] = c * e[var]
        return Polynomial(self.nvars, out)

    def gradient(self) -> list["Polynomial"]:
        return [self.derivative(k) for k in range(self.nvars)]

    def truncate(self, degree: int) -> "Polynomial":
        """Drop every term of total degree >= ``degree``."""
        return Polynomial(self.nvars, {e: c for e, c in self.terms.items() if sum(e) < degree})

    def degree_in(self, var: int) -> int:
        return max((e[var] for e in self.terms), default=-1)

    def constant_term(self) -> GaussianRational:
        return self.terms.get((0,) * self.nvars, ZERO)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    # substitution and evaluation
    def compose_linear(self, matrix: Sequence[Sequence], shift: Sequence | None = None) -> "Polynomial":
        """Exact substitution ``z -> matrix @ w + shift``.

        ``matrix`` has ``self.nvars`` rows; its column count is the variable
        count of the result.
        """
        rows = [[GaussianRational.coerce(a) for a in row] for row in matrix]
        if len(rows) != self.nvars:
            raise ValueError("matrix must have one row per variable")
        m = len(rows[0])
        shift = [ZERO] * self.nvars if shift is None else [GaussianRational.coerce(s) for s in shift]
        images = []
        for k in range(self.nvars):
            terms = {tuple(1 if j == i else 0 for j in range(m)): rows[k][i] for i in range(m)}
            terms[(0,) * m] = shift[k]
            images.append(Polynomial(m, terms))
        result = Polynomial(m)
        power_cache: dict[tuple[int, int], Polynomial] = {}

        def power(k, e):
            key = (k, e)
            if key not in power_cache:
                power_cache[key] = images[k] ** e
            return power_cache[key]

        for e, c in self.terms.items():
            term = Polynomial.constant(m, c)
            for k, ek in enumerate(e):
                if ek:
                    term = term * power(k, ek)
            result = result + term
        return result

    def evaluate(self, point: Sequence, exact: bool | None = None):
        """Evaluate by nested Horner on the first variable.

        With exact coordinates (ints, Fractions, GaussianRationals) the value
        is exact unless ``exact=False``; otherwise a Python complex.
        """
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        if exact is None:
            exact = all(isinstance(p, (int, Rational, GaussianRational)) for p in point)
        if exact:
            pt = [GaussianRational.coerce(p) for p in point]
            zero = ZERO
            coef = lambda c: c  # noqa: E731
        else:
            pt = [complex(p) for p in point]
            zero = 0j
            coef = complex
        if not self.terms:
            return zero
        return _horner(list(self.terms.items()), pt, 0, zero, coef)

    def __call__(self, *point):
        return self.evaluate(point)

    def restrict_to_line(self, base: Sequence[complex], direction: Sequence[complex]) -> "UnivariateComplexPoly":
        """Coefficients of ``t -> f(base + t*direction)`` in double precision."""
        base = np.asarray(base, dtype=complex)
        direction = np.asarray(direction, dtype=complex)
        if base.shape != (self.nvars,) or direction.shape != (self.nvars,):
            raise ValueError(f"base and direction must have {self.nvars} coordinates")
        if not np.any(direction):
            raise ValueError("direction must be nonzero")
        deg = max(self.degree, 0)
        out = np.zeros(deg + 1, dtype=complex)
        lines = [np.array([base[k], direction[k]]) for k in range(self.nvars)]
        cache: dict[tuple[int, int], np.ndarray] = {}
        for e, c in self.terms.items():
            acc = np.array([complex(c)])
            for k, ek in enumerate(e):
                if ek:
                    if (k, ek) not in cache:
                        cache[(k, ek)] = npp.polypow(lines[k], ek)
                    acc = npp.polymul(acc, cache[(k, ek)])
            out[: len(acc)] += acc
        return UnivariateComplexPoly(out)

    def to_dense(self) -> np.ndarray:
        """Dense complex coefficient array indexed by exponents."""
        shape = tuple(self.degree_in(k) + 1 if self.terms else 1 for k in range(self.nvars))
        arr = np.zeros(shape, dtype=complex)
        for e, c in self.terms.items():
            arr[e] = complex(c)
        return arr

    def sorted_terms(self) -> list[tuple[tuple[int, ...], GaussianRational]]:
        """Terms in graded-lexicographic descending order."""
        return sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0]), reverse=True)


def _horner(terms, pt, idx, zero, coef):
    if idx == len(pt):
        return sum((coef(c) for _, c in terms), zero)
    groups: dict[int, list] = {}
    for e, c in terms:
        groups.setdefault(e[idx], []).append((e, c))
    acc = zero
    x = pt[idx]
    for d in range(max(groups), -1, -1):
        acc = acc * x
        if d in groups:
            acc = acc + _horner(groups[d], pt, idx + 1, zero, coef)
    return acc


@dataclass(frozen=True)
class UnivariateComplexPoly:
    """Dense univariate polynomial with complex double coefficients, ascending."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        nz = np.nonzero(c)[0]
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if np.any(self.coeffs) else -1

    def __call__(self, t):
        return npp.polyval(t, self.coeffs)

    def derivative(self) -> "UnivariateComplexPoly":
        return UnivariateComplexPoly(npp.polyder(self.coeffs) if len(self.coeffs) > 1 else [0])

    def __eq__(self, other):
        if not isinstance(other, UnivariateComplexPoly):
            return NotImplemented
        return self.coeffs.shape == other.coeffs.shape and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(self.coeffs.tobytes())


class DenseBivariate:
    """Complex double view of a 2-variable polynomial for vectorised slicing.

    ``coef[i, j]`` multiplies ``x**i * y**j``.
    """

    def __init__(self, f: Polynomial):
        if f.nvars != 2:
            raise ValueError("DenseBivariate needs a polynomial in 2 variables")
        self.poly = f
        self.coef = f.to_dense()
        self.dx = np.array(npp.polyder(self.coef, axis=0)) if self.coef.shape[0] > 1 else np.zeros((1, self.coef.shape[1]), complex)
        self.dy = np.array(npp.polyder(self.coef, axis=1)) if self.coef.shape[1] > 1 else np.zeros((self.coef.shape[0], 1), complex)

    def swapped(self) -> "DenseBivariate":
        return DenseBivariate(self.poly.compose_linear([[0, 1], [1, 0]]))

    def y_coeffs(self, x) -> np.ndarray:
        """Ascending coefficients in y of f(x, .) for each x; shape (..., degy+1)."""
        x = np.asarray(x, dtype=complex)
        powers = x[..., None] ** np.arange(self.coef.shape[0])
        return powers @ self.coef

    def __call__(self, x, y):
        return npp.polyval2d(x, y, self.coef)

    def grad(self, x, y):
        return npp.polyval2d(x, y, self.dx), npp.polyval2d(x, y, self.dy)

    def distance_estimate(self, x, y):
        """First-order distance to V(f): |f| / |grad f|."""
        fx, fy = self.grad(x, y)
        g = np.sqrt(np.abs(fx) ** 2 + np.abs(fy) ** 2)
        val = np.abs(self(x, y))
        with np.errstate(divide="ignore", invalid="ignore"):
            d = np.where(g > 0, val / np.where(g > 0, g, 1), np.where(val > 0, np.inf, 0.0))
        return d


# ---------------------------------------------------------------------------
# parsing and formatting

class ParseError(ValueError):
    """Raised on malformed polynomial text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^/()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str]):
        self.vars = {name: k for k, name in enumerate(variables)}
        self.n = len(variables)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise ParseError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r} (implicit multiplication is not allowed)", pos)
        return result

    def expr(self):
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[1] == "*":
            self.take()
            acc = acc * self.unary()
        return acc

    def unary(self):
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            val = self.unary()
            return -val if op == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise ParseError("exponent must be a non-negative integer literal", pos)
            base = base ** int(val)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            value = Fraction(int(val))
            if self.peek()[1] == "/":
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "num":
                    raise ParseError("'/' is only allowed between integer literals", p2)
                if int(v2) == 0:
                    raise ParseError("zero denominator", p2)
                value = value / int(v2)
            return Polynomial.constant(self.n, value)
        if kind == "name":
            if val == "i":
                return Polynomial.constant(self.n, GaussianRational(0, 1))
            if val not in self.vars:
                raise ParseError(f"unknown variable {val!r}", pos)
            return Polynomial.variable(self.n, self.vars[val])
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {val or 'end of input'!r}", pos)


def parse(text: str, variables: Sequence[str] | None = None) -> Polynomial:
    """Parse polynomial text over the given variable names.

    Grammar: integer literals, rational literals ``p/q``, the imaginary unit
    ``i``, declared variables, ``+ - *``, ``^`` to non-negative integer
    literals and parentheses.  Implicit multiplication is rejected.
    """
    if variables is None:
        variables = default_variables(2)
    variables = list(variables)
    if not variables:
        raise ValueError("at least one variable is required")
    if "i" in variables:
        raise ValueError("'i' is reserved for the imaginary unit")
    if len(set(variables)) != len(variables):
        raise ValueError("duplicate variable names")
    return _Parser(text, variables).parse()


def _format_monomial(e: tuple[int, ...], names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def format_poly(f: Polynomial, variables: Sequence[str] | None = None) -> str:
    """Canonical text: graded-lex descending terms, exact coefficients."""
    names = list(variables) if variables is not None else default_variables(f.nvars)
    if f.is_zero():
        return "0"
    pieces = []
    for e, c in f.sorted_terms():
        negative = c.re < 0 or (not c.re and c.im < 0)
        mag = -c if negative else c
        mono = _format_monomial(e, names)
        cs = _format_coefficient(mag)
        if not mono:
            body = cs
        elif mag == ONE:
            body = mono
        else:
            body = f"{cs}*{mono}"
        pieces.append(("-" if negative else "+", body))
    out = ("-" if pieces[0][0] == "-" else "") + pieces[0][1]
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def product(factors: Iterable[Polynomial]) -> Polynomial:
    factors = list(factors)
    result = Polynomial.constant(factors[0].nvars, 1)
    for g in factors:
        result = result * g
    return result
