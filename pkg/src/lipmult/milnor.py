"""Milnor numbers, transversal Milnor numbers and the Randell Euler characteristic.

The local Milnor number is computed as the dimension of
``C[z] / (J + M^D)`` where J is the Jacobian ideal and M the maximal ideal
at 0.  If the dimension is the same for D and D+1 then M^D lies in
J + M^(D+1), hence (Nakayama) in the localisation of J, and the common value
is the local Milnor number.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import GaussianRational, Polynomial
from .seeding import rng_for

__all__ = [
    "MilnorResult",
    "EulerData",
    "NotIsolatedError",
    "milnor_number",
    "quotient_dimension",
    "transversal_milnor",
    "randell_chi",
    "euler_data",
    "recover_degree",
    "total_tjurina",
    "degree_polynomial",
    "descartes_sign_changes",
]


class NotIsolatedError(ArithmeticError):
    """The quotient dimension did not stabilise: the critical point may not be isolated."""


@dataclass(frozen=True)
class MilnorResult:
    mu: int
    truncation_degree: int
    stabilized: bool
    dimensions: tuple[int, ...] = ()

    def to_json(self) -> dict:
        return {"mu": self.mu, "truncationDegree": self.truncation_degree,
                "stabilized": self.stabilized, "dimensions": list(self.dimensions)}


def _monomials_below(nvars: int, D: int):
    """Exponent vectors of total degree < D, ordered by degree then lexicographically."""
    out = []
    for deg in range(D):
        for e in itertools.product(range(deg + 1), repeat=nvars):
            if sum(e) == deg:
                out.append(e)
    return out


def _field_terms(p: Polynomial, real: bool):
    if real:
        return [(e, c.re) for e, c in p.terms.items()]
    return list(p.terms.items())


def quotient_dimension(generators: Sequence[Polynomial], D: int) -> int:
    """dim of C[z] / (I + M^D) for the ideal I spanned by ``generators``.

    Rows are the degree-(<D) truncations of ``z^a * g`` with ``|a| < D``;
    their rank is found by exact sparse elimination.
    """
    if not generators:
        raise ValueError("need at least one generator")
    n = generators[0].nvars
    monos = _monomials_below(n, D)
    index = {e: i for i, e in enumerate(monos)}
    real = all(g.is_real() for g in generators)
    gens = [_field_terms(g, real) for g in generators]
    pivots: dict[int, dict[int, object]] = {}
    for a in monos:
        for terms in gens:
            row: dict[int, object] = {}
            for e, c in terms:
                m = tuple(x + y for x, y in zip(a, e))
                if sum(m) < D:
                    row[index[m]] = c
            _reduce_insert(row, pivots)
    return len(monos) - len(pivots)


def _reduce_insert(row: dict, pivots: dict) -> None:
    while row:
        lead = min(row)
        c = row[lead]
        piv = pivots.get(lead)
        if piv is None:
            inv = 1 / c if isinstance(c, Fraction) else c.inverse()
            pivots[lead] = {k: v * inv for k, v in row.items()}
            return
        for k, v in piv.items():
            nv = row.get(k, 0) - c * v if k in row else -(c * v)
            if nv:
                row[k] = nv
            else:
                row.pop(k, None)


def milnor_number(f: Polynomial, max_degree: int | None = None) -> MilnorResult:
    """Local Milnor number of f at 0 by truncated elimination.

    D runs from 1 upward; the first D with equal dimensions at D and D+1
    certifies the answer.  Raises :class:`NotIsolatedError` if this does not
    happen by ``max_degree`` (default ``2 * deg(f)**2``).
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no isolated critical point")
    grads = [g for g in f.gradient() if not g.is_zero()]
    if not grads:
        raise NotIsolatedError("f is constant")
    limit = 2 * f.degree ** 2 if max_degree is None else max_degree
    dims = [quotient_dimension(grads, 1)]
    for D in range(1, limit + 1):
        dims.append(quotient_dimension(grads, D + 1))
        if dims[-1] == dims[-2]:
            return MilnorResult(dims[-1], D, True, tuple(dims))
    raise NotIsolatedError(
        f"quotient dimension did not stabilise by D = {limit} (dimensions {dims}); "
        "singularity possibly non-isolated")


def _local_length(generators, limit: int) -> int:
    """Length of the local quotient by ``generators`` at 0, certified by the ladder."""
    prev = quotient_dimension(generators, 1)
    for D in range(1, limit + 1):
        cur = quotient_dimension(generators, D + 1)
        if cur == prev:
            return cur
        prev = cur
    raise NotIsolatedError(f"local quotient did not stabilise by D = {limit}")


def _graded_quotient_dimension(f: Polynomial, k: int) -> int:
    """dim of the degree-k part of C[z] / (partial derivatives of f), f homogeneous."""
    n = f.nvars
    grads = [g for g in f.gradient() if not g.is_zero()]
    monos = [e for e in itertools.product(range(k + 1), repeat=n) if sum(e) == k]
    index = {e: i for i, e in enumerate(monos)}
    shift = f.degree - 1
    real = f.is_real()
    pivots: dict[int, dict[int, object]] = {}
    if k >= shift:
        multipliers = [e for e in itertools.product(range(k - shift + 1), repeat=n)
                       if sum(e) == k - shift]
        for a in multipliers:
            for g in grads:
                row = {index[tuple(x + y for x, y in zip(a, e))]: c
                       for e, c in _field_terms(g, real)}
                _reduce_insert(row, pivots)
    return len(monos) - len(pivots)


def total_tjurina(f: Polynomial, max_degree: int | None = None) -> int:
    """Sum of Tjurina numbers over all singular lines of a homogeneous f in 3 variables.

    The Jacobian ideal of a homogeneous f contains f, so its degree-k
    quotient dimension is eventually the length of the singular scheme of
    the projective curve f = 0.  The value is read off once two consecutive
    degrees from ``3(d-1)`` on agree.
    """
    d = f.degree
    limit = 6 * d if max_degree is None else max_degree
    prev = _graded_quotient_dimension(f, 3 * (d - 1))
    for k in range(3 * (d - 1) + 1, limit + 1):
        cur = _graded_quotient_dimension(f, k)
        if cur == prev:
            return cur
        prev = cur
    raise NotIsolatedError(f"graded quotient did not stabilise by degree {limit}")


def _rational(rng, lo=-2, hi=2, den=8, nonzero=False) -> Fraction:
    while True:
        q = Fraction(int(rng.integers(lo * den, hi * den + 1)), den)
        if q or not nonzero:
            return q


def _det3(m) -> GaussianRational:
    a, b, c = m
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def _find_singular_axis(f: Polynomial):
    grads = f.gradient()
    for k in range(f.nvars):
        pt = [0] * f.nvars
        pt[k] = 1
        if all(not g.evaluate(pt) for g in grads):
            return tuple(pt)
    raise ValueError("no coordinate axis lies in the singular locus; pass the line explicitly")


def transversal_milnor(f: Polynomial, line: Sequence | None = None, seed: int = 0,
                       retries: int = 10, check_components: bool = True) -> int:
    """Milnor number of a generic plane slice of f at a generic point of a singular line.

    f is a homogeneous polynomial in 3 variables whose singular locus is a
    line L through 0, given by an exact direction (default: the first
    coordinate axis along which the gradient vanishes).  A point p = c * L
    and two directions u, w spanning a plane transverse to L are drawn from
    a seeded generator with small rational entries; the Milnor number of
    ``(s, t) -> f(p + s u + t w)`` at 0 is returned.  Non-isolated slices
    are redrawn up to ``retries`` times.

    With ``check_components`` the Tjurina number of the slice is compared
    with the total over all singular lines, and a singular locus with
    further components is rejected.
    """
    if f.nvars != 3:
        raise ValueError("transversal_milnor handles polynomials in 3 variables")
    homog, _ = f.is_homogeneous()
    if f.is_zero() or not homog:
        raise ValueError("f must be a nonzero homogeneous polynomial")
    direction = _find_singular_axis(f) if line is None else tuple(line)
    ell = [GaussianRational.coerce(c) for c in direction]
    if not any(ell):
        raise ValueError("line direction must be nonzero")
    bad = [k for k, g in enumerate(f.gradient()) if g.evaluate(ell)]
    if bad:
        raise ValueError(f"the gradient does not vanish on the line {direction}: bad line")
    rng = rng_for(seed, "transversal-milnor")
    failures = []
    for attempt in range(retries):
        c = _rational(rng, 1, 2)
        u = [_rational(rng) for _ in range(3)]
        w = [_rational(rng) for _ in range(3)]
        if not _det3([ell, u, w]):
            continue
        p = [c * e for e in ell]
        g = f.compose_linear([[u[k], w[k]] for k in range(3)], p)
        try:
            mu = milnor_number(g).mu
        except NotIsolatedError as exc:
            failures.append(str(exc))
            continue
        if check_components:
            slice_tjurina = _local_length([g, *g.gradient()], 2 * g.degree ** 2)
            total = total_tjurina(f)
            if total != slice_tjurina:
                raise ValueError(
                    f"singular locus has more than one line (total Tjurina {total}, "
                    f"this line {slice_tjurina}); pass each component separately")
        return mu
    raise NotIsolatedError(
        f"slice not isolated in {retries} attempts (f may be non-reduced or singular "
        f"along more than this line): {failures[-1] if failures else 'degenerate draws'}")


@dataclass(frozen=True)
class EulerData:
    d: int
    n: int
    mu_prime: int
    chi: int

    def to_json(self) -> dict:
        return {"d": self.d, "n": self.n, "muPrime": self.mu_prime, "chi": self.chi}


def randell_chi(d: int, n: int, mu_prime: int) -> int:
    """Euler characteristic of the Milnor fibre of a homogeneous f: C^(n+1) -> C.

    ``1 + (-1)^n ((d-1)^(n+1) - d * mu_prime)`` for f of degree d with
    one-dimensional singular locus of transversal Milnor number mu_prime
    (mu_prime = 0 for an isolated singularity).
    """
    if d < 1 or n < 1 or mu_prime < 0:
        raise ValueError("need d >= 1, n >= 1 and mu_prime >= 0")
    return 1 + (-1) ** n * ((d - 1) ** (n + 1) - d * mu_prime)


def euler_data(d: int, n: int, mu_prime: int) -> EulerData:
    return EulerData(d, n, mu_prime, randell_chi(d, n, mu_prime))


def degree_polynomial(chi: int, n: int, mu_prime: int) -> list[int]:
    """Coefficients (descending) of P(s) whose positive roots are s = d - 1.

    ``randell_chi(d, n, mu) = chi`` rearranges to
    ``s^(n+1) - mu*s - mu - (-1)^n (chi - 1) = 0``.
    """
    coeffs = [0] * (n + 2)
    coeffs[0] = 1
    coeffs[n] -= mu_prime
    coeffs[n + 1] = -mu_prime - (-1) ** n * (chi - 1)
    return coeffs


def descartes_sign_changes(coeffs: Sequence[int]) -> int:
    """Number of sign changes in a coefficient sequence, zeros skipped."""
    signs = [c > 0 for c in coeffs if c]
    return sum(a != b for a, b in zip(signs, signs[1:]))


def recover_degree(chi: int, n: int, mu_prime: int) -> set[int]:
    """All degrees d >= 2 with ``randell_chi(d, n, mu_prime) == chi``.

    Past ``d = mu_prime + |chi - 1| + 3`` the term (d-1)^(n+1) dominates, so
    the search is finite.  When chi = 0 and mu_prime >= 1, the degree
    polynomial has one sign change and the answer has at most one element.
    """
    if n < 1 or mu_prime < 0:
        raise ValueError("need n >= 1 and mu_prime >= 0")
    bound = mu_prime + abs(chi - 1) + 3
    return {d for d in range(2, bound + 1) if randell_chi(d, n, mu_prime) == chi}
