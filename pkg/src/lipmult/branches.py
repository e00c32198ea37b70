"""Local branches of plane-curve germs by monodromy of the y-roots.

After a generic unitary change of coordinates, the roots y_j(x) of f(x, y)
that tend to 0 with x are followed once around the circle |x| = eps.  Cycles
of the resulting permutation are the local branches; a cycle of length q is a
branch of order q.  The tangent slope of a branch is the circle average of
(sum of the cycle's roots)/x, which is exact for the linear Taylor
coefficient of that single-valued function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .cone import TangentLine, _ugcd, hypersurface_cone, projective_distance
from .poly import DenseBivariate, GaussianRational, Polynomial, UnivariateComplexPoly
from .seeding import rng_for
from .uniroots import TrackingError, permutation_cycles, track_roots

__all__ = [
    "Branch",
    "BranchDecomposition",
    "RelativeMultiplicities",
    "GenericCoordinates",
    "NotSquarefreeError",
    "StabilizationError",
    "GenericityError",
    "cayley_unitary",
    "generic_coordinates",
    "branches",
    "relative_multiplicities",
    "stabilize_epsilon",
    "EPSILON_LADDER",
]

EPSILON_LADDER = tuple(10.0 ** -k for k in range(1, 7))
LOCAL_FACTOR = 4.0
FAR_FACTOR = 8.0
MAX_SLOPE = 2.0
TANGENT_TOL = 1e-6


class NotSquarefreeError(ValueError):
    """The curve has a repeated component."""


class StabilizationError(RuntimeError):
    """No rung of the epsilon ladder gave a stable decomposition."""


class GenericityError(RuntimeError):
    """No random unitary made the vertical direction non-tangent."""


class _RungFailure(RuntimeError):
    pass


@dataclass(frozen=True)
class Branch:
    cycle: tuple[int, ...]
    order: int
    tangent: TangentLine
    witness_radius: float
    slope: complex = 0j

    def to_json(self) -> dict:
        return {"order": self.order, "cycle": list(self.cycle),
                "tangent": self.tangent.to_json(), "witnessRadius": self.witness_radius}


@dataclass
class BranchDecomposition:
    branches: list[Branch]
    epsilon_used: float
    coordinate_change: np.ndarray
    ord0: int
    notes: list[str] = field(default_factory=list)

    @property
    def total_order(self) -> int:
        return sum(b.order for b in self.branches)

    @property
    def conserved(self) -> bool:
        return self.total_order == self.ord0

    def to_json(self) -> dict:
        return {
            "branches": [b.to_json() for b in self.branches],
            "epsilonUsed": self.epsilon_used,
            "coordinateChange": [[[z.real, z.imag] for z in row] for row in self.coordinate_change],
            "totalOrder": self.total_order,
            "ord0": self.ord0,
            "conserved": self.conserved,
            "notes": list(self.notes),
        }


@dataclass
class RelativeMultiplicities:
    entries: list[tuple[TangentLine, int]]
    notes: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum(k for _, k in self.entries)

    def get(self, line, tol: float = TANGENT_TOL):
        for ln, k in self.entries:
            if ln.same_line(line, tol):
                return k
        return None

    def to_json(self) -> list:
        return [{"line": ln.to_json(), "k": k} for ln, k in self.entries]


# -- generic coordinates ------------------------------------------------------

def _rand_rational(rng, bound=2, den=8) -> Fraction:
    return Fraction(int(rng.integers(-bound * den, bound * den + 1)), den)


def cayley_unitary(rng) -> list[list[GaussianRational]]:
    """Exact 2x2 unitary (I - A)(I + A)^-1 with A skew-Hermitian over Q(i)."""
    a, c = _rand_rational(rng), _rand_rational(rng)
    b = GaussianRational(_rand_rational(rng), _rand_rational(rng))
    A = [[GaussianRational(0, a), b], [-b.conjugate(), GaussianRational(0, c)]]
    P = [[1 + A[0][0], A[0][1]], [A[1][0], 1 + A[1][1]]]
    M = [[1 - A[0][0], -A[0][1]], [-A[1][0], 1 - A[1][1]]]
    det = P[0][0] * P[1][1] - P[0][1] * P[1][0]
    inv = [[P[1][1] / det, -P[0][1] / det], [-P[1][0] / det, P[0][0] / det]]
    return [[M[i][0] * inv[0][j] + M[i][1] * inv[1][j] for j in range(2)] for i in range(2)]


@dataclass
class GenericCoordinates:
    unitary: list[list[GaussianRational]]
    matrix: np.ndarray
    transformed: Polynomial
    dense: DenseBivariate
    max_slope: float


def generic_coordinates(f: Polynomial, seed: int = 0, tries: int = 20,
                        max_slope: float = MAX_SLOPE) -> GenericCoordinates:
    """Random exact unitary U with g = f(U w) having no vertical tangent.

    Requires every tangent line (1:a) of g to have |a| <= ``max_slope`` and
    the y^deg coefficient of g to be nonzero (so the y-degree is constant).
    The first acceptable draw is used; otherwise the draw with the smallest
    worst slope, if any draw is finite.
    """
    if f.nvars != 2:
        raise ValueError("generic coordinates are implemented for plane curves only")
    lines = hypersurface_cone(f).lines
    rng = rng_for(seed, "generic-coordinates")
    best = None
    for _ in range(tries):
        U = cayley_unitary(rng)
        Un = np.array([[complex(z) for z in row] for row in U])
        slopes = []
        for ln in lines:
            w = Un.conj().T @ np.array(ln.direction)
            slopes.append(np.inf if abs(w[0]) < 1e-12 * np.linalg.norm(w) else abs(w[1] / w[0]))
        worst = max(slopes, default=0.0)
        if not np.isfinite(worst):
            continue
        g = f.compose_linear(U)
        top = g.homog_components()[g.degree]
        lead = abs(complex(top.terms.get((0, g.degree), 0)))
        scale = max(abs(complex(c)) for c in top.terms.values())
        if lead < 1e-6 * scale:
            continue
        cand = (worst, U, Un, g)
        if worst <= max_slope:
            best = cand
            break
        if best is None or worst < best[0]:
            best = cand
    if best is None:
        raise GenericityError(f"no generic coordinates found in {tries} random tries")
    worst, U, Un, g = best
    return GenericCoordinates(U, Un, g, DenseBivariate(g), float(worst))


def _check_squarefree(g: Polynomial, seed: int) -> None:
    """Exact test on two generic specialisations x = x0: gcd(g, dg/dy) = 1."""
    rng = rng_for(seed, "squarefree")
    dy = g.derivative(1)
    nontrivial = 0
    for _ in range(2):
        x0 = GaussianRational(Fraction(int(rng.integers(1, 97)), 13), Fraction(int(rng.integers(1, 97)), 17))
        uni = _specialise_x(g, x0)
        duni = _specialise_x(dy, x0)
        if len(uni) <= 2:
            return
        if len(_ugcd(uni, duni)) > 1:
            nontrivial += 1
    if nontrivial == 2:
        raise NotSquarefreeError("the curve has a repeated component (input must be reduced)")


def _specialise_x(g: Polynomial, x0: GaussianRational) -> list[GaussianRational]:
    deg = g.degree_in(1)
    out = [GaussianRational(0)] * (deg + 1)
    for (i, j), c in g.terms.items():
        out[j] = out[j] + c * x0 ** i
    while out and not out[-1]:
        out.pop()
    return out


# -- monodromy at one radius ---------------------------------------------------

def _loop_branches(gc: GenericCoordinates, eps: float, steps: int = 64):
    dense = gc.dense
    family = lambda s: UnivariateComplexPoly(dense.y_coeffs(eps * np.exp(2j * np.pi * s)))  # noqa: E731
    grid = np.linspace(0.0, 1.0, steps + 1)
    try:
        tp = track_roots(family, grid)
    except TrackingError as exc:
        raise _RungFailure(f"tracking failed at eps={eps:g}: {exc}") from exc
    if not tp.closed:
        raise _RungFailure(f"root set did not close up at eps={eps:g}")
    params = tp.parameters
    roots = tp.roots
    mags = np.abs(roots)
    local = np.all(mags <= LOCAL_FACTOR * eps, axis=0)
    far = np.all(mags >= FAR_FACTOR * eps, axis=0)
    if not np.all(local | far):
        raise _RungFailure(f"roots not separated into local/far sheets at eps={eps:g}")
    local_idx = set(np.nonzero(local)[0].tolist())
    on_grid = np.isin(params, grid[:-1])
    xs = eps * np.exp(2j * np.pi * params[on_grid])
    ys = roots[on_grid]
    found = []
    for cyc in permutation_cycles(tp.permutation):
        if cyc[0] not in local_idx:
            continue
        if not set(cyc) <= local_idx:
            raise _RungFailure("a monodromy cycle mixes local and far roots")
        csum = ys[:, cyc].sum(axis=1)
        slope = complex(np.mean(csum / xs) / len(cyc))
        found.append((tuple(sorted(cyc)), len(cyc), slope))
    return found


def _decompose(gc: GenericCoordinates, eps: float):
    big = _loop_branches(gc, eps)
    small = _loop_branches(gc, eps / 2)
    if sorted(o for _, o, _ in big) != sorted(o for _, o, _ in small):
        raise _RungFailure(f"branch orders differ between eps={eps:g} and eps/2")
    paired = []
    unused = list(small)
    for cyc, order, s1 in big:
        cands = [b for b in unused if b[1] == order]
        j = min(range(len(cands)), key=lambda k: abs(cands[k][2] - s1))
        s2 = cands[j][2]
        if abs(s2 - s1) > 1e-3 * (1 + abs(s1)):
            raise _RungFailure(f"tangent estimates disagree between eps={eps:g} and eps/2")
        unused.remove(cands[j])
        paired.append((cyc, order, 2 * s2 - s1))
    return paired


def _to_branches(gc: GenericCoordinates, eps: float, paired) -> list[Branch]:
    out = []
    for cyc, order, slope in paired:
        direction = gc.matrix @ np.array([1.0, slope])
        out.append(Branch(cyc, order, TangentLine(direction, 1), eps, slope))
    return out


def stabilize_epsilon(f: Polynomial, seed: int = 0, ladder=EPSILON_LADDER) -> float:
    """Largest eps on the ladder whose decomposition agrees with eps/2."""
    return _stabilized(f, seed, ladder)[0]


def _stabilized(f, seed, ladder):
    gc = _prepare(f, seed)
    failures = []
    for eps in ladder:
        try:
            return eps, gc, _decompose(gc, eps)
        except _RungFailure as exc:
            failures.append(str(exc))
    raise StabilizationError(
        "no stable epsilon on the ladder; consider exact preprocessing. " + "; ".join(failures))


def _prepare(f: Polynomial, seed: int) -> GenericCoordinates:
    if f.nvars != 2:
        raise ValueError("branches are implemented for plane curves (2 variables)")
    if f.is_zero():
        raise ValueError("the zero polynomial is not a curve")
    if f.constant_term():
        raise ValueError("f(0) != 0: the germ is not at the origin")
    gc = generic_coordinates(f, seed)
    _check_squarefree(gc.transformed, seed)
    return gc


def branches(f: Polynomial, epsilon: float | None = None, seed: int = 0) -> BranchDecomposition:
    """Decompose the plane-curve germ V(f) at 0 into local branches."""
    notes = []
    if epsilon is None:
        eps, gc, paired = _stabilized(f, seed, EPSILON_LADDER)
    else:
        gc = _prepare(f, seed)
        eps = float(epsilon)
        try:
            paired = _decompose(gc, eps)
        except _RungFailure as exc:
            raise StabilizationError(str(exc)) from exc
    if gc.max_slope > MAX_SLOPE:
        notes.append(f"coordinates only moderately generic (max tangent slope {gc.max_slope:.3g})")
    dec = BranchDecomposition(_to_branches(gc, eps, paired), eps, gc.matrix, int(f.ord0()), notes)
    if not dec.conserved:
        dec.notes.append(f"sum of branch orders {dec.total_order} != ord0 {dec.ord0}")
    return dec


def relative_multiplicities(f: Polynomial, seed: int = 0,
                            decomposition: BranchDecomposition | None = None) -> RelativeMultiplicities:
    """k(L) = sum of the orders of the branches tangent to L.

    Keys are the lines of the tangent cone when a branch tangent matches one
    within 1e-6 (projective distance); unmatched tangents are kept as found
    and reported in ``notes``.
    """
    dec = branches(f, seed=seed) if decomposition is None else decomposition
    cone_lines = hypersurface_cone(f).lines
    entries: list[list] = []
    notes = []
    for b in dec.branches:
        key = None
        for ln in cone_lines:
            if projective_distance(ln.direction, b.tangent.direction) <= TANGENT_TOL:
                key = ln
                break
        if key is None:
            notes.append(f"branch tangent {b.tangent.direction} is not a cone line")
            key = b.tangent
        for entry in entries:
            if entry[0].same_line(key, TANGENT_TOL):
                entry[1] += b.order
                break
        else:
            entries.append([key, b.order])
    return RelativeMultiplicities([(ln, k) for ln, k in entries], notes)
