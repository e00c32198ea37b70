"""Multiplicity of hypersurface germs at 0 by independent routes.

Routes
------
order
    lowest degree of f (exact).
line
    number of intersections of a generic line near 0 with V(f), counted by
    the argument principle on a small disc.
cone
    sum over tangent lines of the relative multiplicities (plane curves).
density
    Monte Carlo area of V(f) in a small ball divided by the area of a
    complex line in it (plane curves).
hilbert
    leading coefficient of the Hilbert-Samuel polynomial of the principal
    initial ideal, times d!.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .branches import generic_coordinates, relative_multiplicities
from .poly import Polynomial
from .seeding import derive_seed, rng_for
from .uniroots import RootOnBoundaryError, batch_roots, count_roots_in_disc

__all__ = [
    "MultiplicityReport",
    "HilbertData",
    "GenericLineResult",
    "DensityResult",
    "LipschitzBounds",
    "RouteError",
    "mult_order",
    "mult_generic_line",
    "mult_cone_sum",
    "mult_density",
    "hilbert_function_hypersurface",
    "hilbert_samuel_extract",
    "growth_exponent",
    "lipschitz_mult_bounds",
    "report",
    "ALL_ROUTES",
]

ALL_ROUTES = ("order", "line", "cone", "density", "hilbert")
LINE_RADII = (1e-2, 5e-3, 2.5e-3)
OFFSET_RATIO = 0.1
DENSITY_RADII = (1e-1, 3e-2, 1e-2)
DENSITY_SAMPLES = 100_000
DENSITY_TOLERANCE = 0.1


class RouteError(RuntimeError):
    """A numeric route failed to stabilise; ``table`` holds the evidence."""

    def __init__(self, message: str, table=None):
        super().__init__(message)
        self.table = table


def _check_germ(f: Polynomial):
    if f.is_zero():
        raise ValueError("the zero polynomial does not define a hypersurface germ")
    if f.constant_term():
        raise ValueError("f(0) != 0: the germ is not at the origin")


def mult_order(f: Polynomial) -> int:
    _check_germ(f)
    return int(f.ord0())


# -- generic line ---------------------------------------------------------------

@dataclass
class GenericLineResult:
    value: int
    direction: np.ndarray
    offset: np.ndarray
    radius: float
    votes: list[dict]

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "direction": [[z.real, z.imag] for z in self.direction],
            "offset": [[z.real, z.imag] for z in self.offset],
            "radius": self.radius,
            "votes": self.votes,
        }


def _unit(rng, n, size=None):
    shape = (n,) if size is None else (size, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def mult_generic_line(f: Polynomial, seed: int = 0, radii: Sequence[float] = LINE_RADII,
                      offset_ratio: float = OFFSET_RATIO, voters: int = 3) -> GenericLineResult:
    """Count the points of V(f) on a generic line slice near 0.

    Each voter draws 16 unit directions and keeps the one where the initial
    form is largest (farthest from the tangent cone), and a random offset w
    with |w| = offset_ratio * rho.  Roots of t -> f(w + t v) in |t| < rho are
    counted by :func:`count_roots_in_disc` for every rho in ``radii``; a
    voter is stable when all its counts agree.  Stable voters must agree.
    """
    _check_germ(f)
    if f.nvars < 2:
        raise ValueError("the generic-line route needs at least 2 variables")
    form = f.initial_form()
    votes = []
    witness = None
    for s in range(voters):
        rng = rng_for(seed, f"generic-line/{s}")
        cands = _unit(rng, f.nvars, 16)
        scores = [abs(form.evaluate(list(c), exact=False)) for c in cands]
        v = cands[int(np.argmax(scores))]
        u = _unit(rng, f.nvars)
        counts = []
        for rho in radii:
            w = offset_ratio * rho * u
            try:
                counts.append(count_roots_in_disc(f.restrict_to_line(w, v), 0.0, rho))
            except RootOnBoundaryError:
                counts.append(None)
        stable = None not in counts and len(set(counts)) == 1
        votes.append({"voter": s, "counts": counts, "stable": stable})
        if stable and witness is None:
            witness = (counts[0], v, offset_ratio * radii[0] * u, radii[0])
    values = {vt["counts"][0] for vt in votes if vt["stable"]}
    if len(values) != 1 or sum(vt["stable"] for vt in votes) < 2:
        raise RouteError("generic-line counts did not stabilise across radii and voters", votes)
    value, v, w, rho = witness
    for vt in votes:
        if vt["stable"] and vt["counts"][0] != value:  # pragma: no cover - guarded above
            raise RouteError("voters disagree", votes)
    return GenericLineResult(int(value), v, w, rho, votes)


# -- cone sum ---------------------------------------------------------------------

def mult_cone_sum(f: Polynomial, seed: int = 0, relmult=None) -> int:
    """Sum of k(L) * m(L, 0) over tangent lines; lines have multiplicity 1."""
    _check_germ(f)
    rm = relative_multiplicities(f, seed=seed) if relmult is None else relmult
    return sum(k * 1 for _, k in rm.entries)


# -- density ------------------------------------------------------------------------

@dataclass
class DensityResult:
    estimate: float
    std_error: float
    radius: float
    table: list[dict]
    discarded: int

    def to_json(self) -> dict:
        return {"estimate": self.estimate, "stdError": self.std_error, "radius": self.radius,
                "table": self.table, "discarded": self.discarded}


def _density_at(dense, r: float, n: int, rng) -> tuple[float, float, int]:
    x = r * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    ys = batch_roots(dense.y_coeffs(x))
    xb = np.broadcast_to(x[:, None], ys.shape)
    fx, fy = dense.grad(xb, ys)
    inside = np.abs(xb) ** 2 + np.abs(ys) ** 2 <= r * r
    with np.errstate(divide="ignore", invalid="ignore"):
        slope2 = np.abs(fx / fy) ** 2
    bad = inside & ~(np.isfinite(slope2) & (slope2 < 1e26))
    rows_bad = bad.any(axis=1)
    weights = np.where(inside, 1.0 + np.where(np.isfinite(slope2), slope2, 0.0), 0.0).sum(axis=1)
    keep = weights[~rows_bad]
    return float(keep.mean()), float(keep.std(ddof=1) / np.sqrt(len(keep))), int(rows_bad.sum())


def mult_density(f: Polynomial, radii: Sequence[float] = DENSITY_RADII,
                 samples_per_radius: int = DENSITY_SAMPLES, seed: int = 0,
                 block: int = 25_000) -> DensityResult:
    """Area density of a plane curve at 0 (complex lines have density 1).

    In generic unitary coordinates, V(f) near 0 is a union of graphs over
    the x-disc.  For x uniform in |x| < r every y-root with |(x, y)| <= r
    contributes its graph area factor 1 + |dy/dx|^2, dy/dx = -f_x/f_y; the
    sample mean is area / (pi r^2).  The estimate at the smallest radius is
    returned, with the whole table.  Samples where f_y vanishes are
    discarded (more than 1% is an error).
    """
    _check_germ(f)
    if f.nvars != 2:
        raise ValueError("the density route is implemented for plane curves")
    radii = sorted(radii, reverse=True)
    dense = generic_coordinates(f, seed).dense
    table = []
    total_bad = 0
    for r in radii:
        sums, sq, count, bad = 0.0, 0.0, 0, 0
        done = 0
        k = 0
        while done < samples_per_radius:
            m = min(block, samples_per_radius - done)
            rng = rng_for(seed, f"density/{r!r}/{k}")
            mean, se, nbad = _density_at(dense, r, m, rng)
            kept = m - nbad
            # combine block means and variances
            var = (se ** 2) * kept
            sums += mean * kept
            sq += (var * (kept - 1) + mean * mean * kept)
            count += kept
            bad += nbad
            done += m
            k += 1
        mean = sums / count
        var = (sq - count * mean * mean) / max(count - 1, 1)
        if bad > 0.01 * samples_per_radius:
            raise RouteError(f"{bad} of {samples_per_radius} samples discarded at r={r:g}")
        total_bad += bad
        table.append({"radius": r, "estimate": mean, "stdError": math.sqrt(max(var, 0) / count),
                      "samples": count, "discarded": bad})
    last = table[-1]
    return DensityResult(last["estimate"], last["stdError"], last["radius"], table, total_bad)


# -- Hilbert-Samuel ----------------------------------------------------------------------

def hilbert_function_hypersurface(nvars: int, m: int | None, k: int) -> int:
    """dim of C[z]/(M^k + (g)) for a form g of degree m; ``m=None``: zero ideal.

    Equals C(n+k-1, n) - C(n+k-1-m, n) with C(a, n) = 0 for a < n.
    """
    if nvars < 1 or k < 0:
        raise ValueError("need nvars >= 1 and k >= 0")
    total = _binom(nvars + k - 1, nvars)
    if m is None:
        return total
    if m < 1:
        raise ValueError("a hypersurface germ through 0 has order >= 1")
    return total - _binom(nvars + k - 1 - m, nvars)


def _binom(a: int, n: int) -> int:
    return math.comb(a, n) if a >= n >= 0 else 0


@dataclass
class HilbertData:
    values: dict[int, int]
    samuel_polynomial_coeffs: list[Fraction]
    e: int
    d: int

    def samuel(self, t) -> Fraction:
        return sum((c * Fraction(t) ** j for j, c in enumerate(self.samuel_polynomial_coeffs)), Fraction(0))


def hilbert_samuel_extract(values: Mapping[int, int], d: int) -> HilbertData:
    """Fit the Hilbert-Samuel polynomial of degree d on the stable tail.

    The tail is the longest final run of consecutive k on which the (d+1)-th
    finite differences vanish; it must hold at least d+2 values.  The
    multiplicity is e = d! * leading coefficient = the constant d-th
    difference.
    """
    if d < 0:
        raise ValueError("dimension must be non-negative")
    ks = sorted(values)
    if not ks:
        raise ValueError("no values given")
    # longest contiguous final run
    start = len(ks) - 1
    while start > 0 and ks[start - 1] == ks[start] - 1:
        start -= 1
    run = ks[start:]
    vals = [Fraction(values[k]) for k in run]
    lo = len(run)
    # extend the window leftwards while the (d+1)-th differences stay zero
    best = None
    for begin in range(len(run) - (d + 2), -1, -1):
        window = vals[begin:]
        if all(x == 0 for x in _diff(window, d + 1)):
            best = begin
        else:
            break
    if best is None:
        raise ValueError(f"window too small: need {d + 2} consecutive values in the polynomial regime")
    window_k = run[best:]
    window = vals[best:]
    lead_diff = _diff(window, d)[0]
    if lead_diff.denominator != 1 or lead_diff <= 0:
        raise ValueError(f"multiplicity {lead_diff} is not a positive integer")
    coeffs = _newton_to_monomial(window_k[0], window, d)
    del lo
    return HilbertData({k: int(values[k]) for k in window_k}, coeffs, int(lead_diff), d)


def _diff(seq, order):
    seq = list(seq)
    for _ in range(order):
        seq = [b - a for a, b in zip(seq, seq[1:])]
    return seq


def _newton_to_monomial(k0: int, window: list[Fraction], d: int) -> list[Fraction]:
    """Monomial coefficients of the degree-d interpolant through window."""
    # forward differences at k0: P(k0 + s) = sum_j Delta^j * C(s, j)
    deltas = [_diff(window, j)[0] for j in range(d + 1)]
    coeffs = [Fraction(0)] * (d + 1)
    for j, dj in enumerate(deltas):
        # C(s, j) with s = t - k0, expanded in t
        poly = [Fraction(1)]
        for r in range(j):
            # multiply by (t - k0 - r)
            c0 = Fraction(-(k0 + r))
            new = [Fraction(0)] * (len(poly) + 1)
            for a, pa in enumerate(poly):
                new[a] += pa * c0
                new[a + 1] += pa
            poly = new
        fact = math.factorial(j)
        for a, pa in enumerate(poly):
            coeffs[a] += dj * pa / fact
    return coeffs


# -- growth exponent ----------------------------------------------------------------

GROWTH_SCALES = tuple(np.geomspace(1e-2, 1e-5, 7))


def growth_exponent(f: Polynomial, sample_scales: Sequence[float] = GROWTH_SCALES,
                    rays_per_scale: int = 32, seed: int = 0, max_misfit: float = 0.1) -> float:
    """Growth exponent of |f| at 0: least log-log slope over random rays.

    Along a ray t -> t v, the slope of log|f(t v)| against log t is fitted
    over ``sample_scales``.  Rays where |f| < 1e-14 at the largest scale, or
    whose log-log data are not a straight line to ``max_misfit``, lie close
    to the zero set of the initial form and are dropped.
    """
    if f.is_zero():
        raise ValueError("the zero polynomial has no growth exponent")
    rng = rng_for(seed, "growth")
    scales = np.sort(np.asarray(sample_scales, dtype=float))[::-1]
    logt = np.log(scales)
    slopes = []
    for _ in range(8):
        for v in _unit(rng, f.nvars, rays_per_scale):
            p = f.restrict_to_line(np.zeros(f.nvars, complex), v)
            vals = np.abs(p(scales))
            if vals[0] < 1e-14 or np.any(vals == 0):
                continue
            logf = np.log(vals)
            slope, icpt = np.polyfit(logt, logf, 1)
            if np.max(np.abs(logf - (slope * logt + icpt))) > max_misfit:
                continue
            slopes.append(slope)
        if slopes:
            return float(min(slopes))
    raise RouteError("every ray landed near the zero set; resample")


# -- Lipschitz bounds ------------------------------------------------------------------

@dataclass
class LipschitzBounds:
    lower: float
    upper: float
    integers: list[int]
    pinned: bool

    @property
    def verdict(self) -> str:
        return "multiplicity pinned" if self.pinned else "not pinned"


def lipschitz_mult_bounds(m: int, C1: float, C2: float, d: int) -> LipschitzBounds:
    """Interval [m/(C1 C2)^(2d), m (C1 C2)^(2d)] for the multiplicity of the image.

    ``pinned`` is True when the interval contains exactly one integer.
    """
    if m < 1 or d < 1:
        raise ValueError("need m >= 1 and d >= 1")
    if C1 * C2 < 1:
        raise ValueError(f"C1*C2 = {C1 * C2:g} < 1 cannot bound a bi-Lipschitz map")
    K = (C1 * C2) ** (2 * d)
    lo, hi = m / K, m * K
    slack = 1e-12 * max(1.0, hi)
    ints = list(range(math.ceil(lo - slack), math.floor(hi + slack) + 1))
    return LipschitzBounds(lo, hi, ints, len(ints) == 1)


# -- report ------------------------------------------------------------------------------

@dataclass
class MultiplicityReport:
    order_route: int | None = None
    generic_line_route: GenericLineResult | None = None
    cone_sum_route: int | None = None
    density_route: DensityResult | None = None
    hilbert_route: int | None = None
    agree: bool = False
    notes: list[str] = field(default_factory=list)
    density_tolerance: float = DENSITY_TOLERANCE
    requested: tuple[str, ...] = ()
    failed: list[str] = field(default_factory=list)

    def integer_routes(self) -> dict[str, int]:
        out = {}
        if self.order_route is not None:
            out["order"] = self.order_route
        if self.generic_line_route is not None:
            out["line"] = self.generic_line_route.value
        if self.cone_sum_route is not None:
            out["cone"] = self.cone_sum_route
        if self.hilbert_route is not None:
            out["hilbert"] = self.hilbert_route
        return out

    def routes_json(self) -> dict:
        """Every requested route; failed or skipped routes map to None."""
        values = {
            "order": self.order_route,
            "line": None if self.generic_line_route is None else self.generic_line_route.to_json(),
            "cone": self.cone_sum_route,
            "density": None if self.density_route is None else self.density_route.to_json(),
            "hilbert": self.hilbert_route,
        }
        names = self.requested or tuple(k for k, v in values.items() if v is not None)
        return {k: values[k] for k in ALL_ROUTES if k in names}


def _agreement(rep: MultiplicityReport) -> bool:
    if rep.failed:
        return False
    ints = set(rep.integer_routes().values())
    if len(ints) != 1:
        return False
    if rep.density_route is not None:
        return abs(rep.density_route.estimate - ints.pop()) <= rep.density_tolerance
    return True


def report(f: Polynomial, routes: Sequence[str] = ALL_ROUTES, seed: int = 0,
           density_radii: Sequence[float] = DENSITY_RADII,
           density_samples: int = DENSITY_SAMPLES) -> MultiplicityReport:
    """Run every applicable route; failures become notes, not exceptions.

    ``agree`` is true when no applicable route failed, the integer routes
    coincide and the density estimate is within tolerance of them.
    Routes that do not apply (plane-only routes in higher dimension) are
    noted as skipped and do not affect ``agree``.
    """
    _check_germ(f)
    unknown = set(routes) - set(ALL_ROUTES)
    if unknown:
        raise ValueError(f"unknown routes: {sorted(unknown)}")
    rep = MultiplicityReport(requested=tuple(routes))
    plane = f.nvars == 2
    if "order" in routes:
        rep.order_route = mult_order(f)
    if "hilbert" in routes:
        n, m = f.nvars, int(f.ord0())
        vals = {k: hilbert_function_hypersurface(n, m, k) for k in range(1, m + n + 4)}
        rep.hilbert_route = hilbert_samuel_extract(vals, n - 1).e
    if "line" in routes:
        if f.nvars < 2:
            rep.notes.append("line: needs at least 2 variables; skipped")
        else:
            try:
                rep.generic_line_route = mult_generic_line(f, derive_seed(seed, "line"))
            except RouteError as exc:
                rep.failed.append("line")
                rep.notes.append(f"line: {exc}; votes={exc.table}")
    if "cone" in routes:
        if not plane:
            rep.notes.append("cone: implemented for plane curves only; skipped")
        else:
            try:
                rep.cone_sum_route = mult_cone_sum(f, derive_seed(seed, "cone"))
            except (RuntimeError, ValueError) as exc:
                rep.failed.append("cone")
                rep.notes.append(f"cone: {type(exc).__name__}: {exc}")
    if "density" in routes:
        if not plane:
            rep.notes.append("density: implemented for plane curves only; skipped")
        else:
            try:
                rep.density_route = mult_density(f, density_radii, density_samples,
                                                 derive_seed(seed, "density"))
            except (RuntimeError, ValueError) as exc:
                rep.failed.append("density")
                rep.notes.append(f"density: {type(exc).__name__}: {exc}")
    rep.agree = _agreement(rep)
    return rep
