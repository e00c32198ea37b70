"""Tangent cones of hypersurface germs and numeric tangent-map estimates."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .poly import GaussianRational, Polynomial, ZERO
from .uniroots import find_roots

__all__ = [
    "TangentLine",
    "ConeDescription",
    "SecantDirections",
    "MapSample",
    "DerivativeEstimate",
    "hypersurface_cone",
    "tangent_lines",
    "secant_directions",
    "map_derivative_estimate",
    "projective_distance",
    "normalize_direction",
]

LINE_TOL = 1e-9


def normalize_direction(v: Sequence[complex]) -> tuple[complex, ...]:
    """Divide by the first max-modulus coordinate so that it becomes 1."""
    v = np.asarray(v, dtype=complex)
    if not np.any(v):
        raise ValueError("direction must be nonzero")
    mags = np.abs(v)
    k = int(np.argmax(mags >= mags.max() * (1 - 1e-12)))
    w = v / v[k]
    w[k] = 1.0
    return tuple(complex(a) for a in w)


def projective_distance(u: Sequence[complex], v: Sequence[complex]) -> float:
    """Sine of the angle between the complex lines spanned by u and v."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    u = u / np.linalg.norm(u)
    v = v / np.linalg.norm(v)
    # Lagrange identity: |u|^2 |v|^2 - |<u, v>|^2 = sum_{i<j} |u_i v_j - u_j v_i|^2,
    # which avoids the cancellation in 1 - cos^2
    wedge = np.outer(u, v) - np.outer(v, u)
    return float(min(1.0, np.sqrt(0.5 * np.sum(np.abs(wedge) ** 2))))


@dataclass(frozen=True)
class TangentLine:
    """A complex line through 0, with its multiplicity in the initial form."""

    direction: tuple[complex, ...]
    cone_multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "direction", normalize_direction(self.direction))
        if self.cone_multiplicity < 1:
            raise ValueError("cone multiplicity must be positive")

    def same_line(self, other, tol: float = LINE_TOL) -> bool:
        d = other.direction if isinstance(other, TangentLine) else other
        return projective_distance(self.direction, d) <= tol

    def unit(self) -> np.ndarray:
        v = np.array(self.direction)
        return v / np.linalg.norm(v)

    def to_json(self) -> dict:
        return {
            "direction": [[z.real, z.imag] for z in self.direction],
            "coneMultiplicity": self.cone_multiplicity,
        }


@dataclass
class ConeDescription:
    defining_form: Polynomial
    lines: list[TangentLine] = field(default_factory=list)


# -- exact univariate helpers over Q(i), ascending coefficient lists ----------

def _trim(a):
    a = list(a)
    while a and not a[-1]:
        a.pop()
    return a


def _udivmod(a, b):
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [ZERO] * max(len(a) - len(b) + 1, 1)
    lead_inv = b[-1].inverse()
    while len(a) >= len(b) and a:
        k = len(a) - len(b)
        c = a[-1] * lead_inv
        q[k] = c
        for j, bj in enumerate(b):
            a[j + k] = a[j + k] - c * bj
        a = _trim(a[:-1]) if not a[-1] else _trim(a)
    return _trim(q), a


def _monic(a):
    a = _trim(a)
    inv = a[-1].inverse()
    return [c * inv for c in a]


def _ugcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        _, r = _udivmod(a, b)
        a, b = b, r
    return _monic(a) if a else a


def _uderiv(a):
    return _trim([a[k] * k for k in range(1, len(a))])


def squarefree_decomposition(a) -> list[tuple[list, int]]:
    """Yun's algorithm: [(g_k, k)] with a = lead * prod g_k^k, g_k squarefree."""
    a = _monic(a)
    if len(a) <= 1:
        return []
    out = []
    da = _uderiv(a)
    g = _ugcd(a, da)
    b, _ = _udivmod(a, g)
    c, _ = _udivmod(da, g)
    k = 1
    while len(_trim(b)) > 1:
        d = [x - y for x, y in zip(_pad(c, len(b)), _pad(_uderiv(b), len(b)))]
        d = _trim(d)
        h = _ugcd(b, d) if d else _monic(b)
        if len(h) > 1:
            out.append((h, k))
        b, _ = _udivmod(b, h)
        c, _ = _udivmod(d, h) if d else ([], [])
        k += 1
    return out


def _pad(a, n):
    return list(a) + [ZERO] * (n - len(a))


# -- cone operations -----------------------------------------------------------

def hypersurface_cone(f: Polynomial) -> ConeDescription:
    """Tangent cone of V(f) at 0: the zero set of the initial form."""
    if f.is_zero():
        raise ValueError("the zero polynomial does not define a hypersurface germ")
    if f.constant_term():
        raise ValueError("f(0) != 0: the germ is not at the origin")
    form = f.initial_form()
    lines = tangent_lines(form) if f.nvars == 2 else []
    return ConeDescription(form, lines)


def tangent_lines(f2: Polynomial, tol: float = 1e-12) -> list[TangentLine]:
    """Linear factors of a homogeneous binary form, as lines with multiplicity.

    Lines (1:lam) come from the roots of f2(1, lam); the line (0:1) carries
    the degree drop of f2(1, lam).  Multiplicities are exact (squarefree
    decomposition over Q(i)); the roots of each squarefree part are found
    numerically.
    """
    if f2.nvars != 2:
        raise ValueError("tangent_lines needs a form in 2 variables")
    homog, d = f2.is_homogeneous()
    if f2.is_zero() or not homog:
        raise ValueError("tangent_lines needs a nonzero homogeneous form")
    uni = _trim([f2.terms.get((d - j, j), ZERO) for j in range(d + 1)])
    r = len(uni) - 1
    lines = []
    for factor, k in squarefree_decomposition(uni):
        rs = find_roots(np.array([complex(c) for c in factor]), tol)
        if not rs.converged:
            raise ArithmeticError(f"root finder did not converge (residual {rs.residual:.3g})")
        lines.extend(TangentLine((1.0, lam), k) for lam in rs.roots)
    if d - r:
        lines.append(TangentLine((0.0, 1.0), d - r))
    return lines


@dataclass
class SecantDirections:
    """Unit secant directions of sampled points, clustered projectively."""

    points: np.ndarray
    directions: np.ndarray
    labels: np.ndarray
    centers: np.ndarray

    @property
    def cluster_count(self) -> int:
        return len(self.centers)


def _random_unit(rng, n, size=None):
    shape = (n,) if size is None else (size, n)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def secant_directions(f: Polynomial, scale: float, count: int = 200, seed: int = 0,
                      threshold: float | None = None) -> SecantDirections:
    """Directions from 0 to points of V(f) at distance about ``scale``.

    Random complex lines through points at distance ``scale/2`` are
    intersected with V(f); intersection points with norm in
    ``[scale/2, 2*scale]`` are kept until ``count`` are found.  Directions are
    clustered by single linkage on :func:`projective_distance`; each cluster
    centre is the top eigenvector of the summed projectors.

    The default threshold is ``max(10*scale, sqrt(scale))``.  Secants of a
    branch y ~ x^(p/q) deviate from its tangent by about scale^(p/q - 1) and
    spread over a phase circle of that radius, so a purely linear threshold
    would split a cusp into many clusters.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    rng = np.random.default_rng(seed)
    n = f.nvars
    pts = []
    attempts = 0
    while len(pts) < count and attempts < 50 * count:
        attempts += 1
        base = 0.5 * scale * _random_unit(rng, n)
        v = _random_unit(rng, n)
        p = f.restrict_to_line(base, v)
        if p.degree < 1:
            continue
        rs = find_roots(p)
        for t in rs.roots:
            z = base + t * v
            if scale / 2 <= np.linalg.norm(z) <= 2 * scale:
                pts.append(z)
    if not pts:
        raise ValueError(f"no points of V(f) found at scale {scale:g}")
    pts = np.array(pts[:max(count, 1)])
    dirs = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    threshold = max(10 * scale, np.sqrt(scale)) if threshold is None else threshold
    labels = _single_linkage(dirs, threshold)
    centers = []
    for lab in range(labels.max() + 1):
        members = dirs[labels == lab]
        proj = members.T @ members.conj()
        w, vecs = np.linalg.eigh(proj)
        c = vecs[:, -1]
        centers.append(np.array(normalize_direction(c)) / np.linalg.norm(normalize_direction(c)))
    return SecantDirections(pts, dirs, labels, np.array(centers))


def _single_linkage(dirs: np.ndarray, threshold: float) -> np.ndarray:
    from scipy.sparse import csr_matrix
    from scipy.sparse.csgraph import connected_components

    # pairwise sin(angle) by the Lagrange identity (unit rows)
    wedge = dirs[:, None, :, None] * dirs[None, :, None, :]
    wedge = wedge - np.swapaxes(wedge, 2, 3)
    dist = np.sqrt(0.5 * np.sum(np.abs(wedge) ** 2, axis=(2, 3)))
    adj = csr_matrix(dist <= threshold)
    _, labels = connected_components(adj, directed=False)
    return labels


@dataclass
class MapSample:
    """A caller-supplied map, assumed bi-Lipschitz near 0 with map(0) = 0."""

    map: Callable[[np.ndarray], np.ndarray]
    lipschitz_hint: tuple[float, float] | None = None
    dim: int | None = None

    def __call__(self, z):
        return np.asarray(self.map(np.asarray(z, dtype=complex)), dtype=complex)


@dataclass
class DerivativeEstimate:
    value: np.ndarray
    estimates: np.ndarray
    tgrid: np.ndarray
    differences: np.ndarray
    converged: bool
    diagnostic: str


DEFAULT_TGRID = 1e-2 * 0.5 ** np.arange(14)


def map_derivative_estimate(phi, v: Sequence[complex], tgrid: Sequence[float] | None = None) -> DerivativeEstimate:
    """Estimate the tangent map at 0 in direction v as the limit of phi(t v)/t.

    The value is the estimate at the smallest t (no extrapolation).  The
    diagnostic compares successive estimates: their differences are expected
    to shrink as t decreases; a stall or growth is reported, not raised.
    """
    if not isinstance(phi, MapSample):
        phi = MapSample(phi)
    v = np.asarray(v, dtype=complex)
    tgrid = DEFAULT_TGRID if tgrid is None else np.asarray(tgrid, dtype=float)
    if len(tgrid) < 4:
        raise ValueError("tgrid needs at least 4 entries")
    if np.any(tgrid <= 0) or np.any(np.diff(tgrid) >= 0):
        raise ValueError("tgrid must be positive and strictly decreasing")
    origin = phi(np.zeros_like(v))
    if np.linalg.norm(origin) > 1e-12:
        raise ValueError(f"map(0) = {origin} is not 0")
    est = np.array([phi(t * v) / t for t in tgrid])
    diffs = np.linalg.norm(np.diff(est, axis=0), axis=1)
    size = max(np.linalg.norm(est[-1]), 1e-300)
    floor = 1e-12 * size
    significant = diffs > floor
    if not significant.any():
        converged, msg = True, "estimates agree to rounding"
    else:
        d = np.where(significant, diffs, floor)
        stalled = (d[1:] >= d[:-1] * (1 - 1e-6)) & (d[1:] > floor)
        converged = not stalled.any()
        msg = "successive differences decrease" if converged else (
            f"successive differences fail to decrease at {int(stalled.sum())} step(s); "
            "the limit may not exist")
    return DerivativeEstimate(est[-1], est, tgrid, diffs, bool(converged), msg)
