"""Univariate complex root finding, disc counting and root continuation.

``find_roots`` runs the Aberth-Ehrlich simultaneous iteration; ``count_roots_in_disc``
is an independent check by the argument principle; ``track_roots`` follows the
roots of a polynomial family along a parameter path and reports the induced
permutation of the root set (the monodromy when the path is a loop).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import polynomial as npp

from .poly import UnivariateComplexPoly

__all__ = [
    "RootSet",
    "TrackedPath",
    "RootOnBoundaryError",
    "TrackingError",
    "find_roots",
    "batch_roots",
    "count_roots_in_disc",
    "track_roots",
    "permutation_cycles",
    "compose_permutations",
]

MAX_ITER = 200


class RootOnBoundaryError(ValueError):
    """A root lies (numerically) on the counting circle; perturb the radius."""


class TrackingError(RuntimeError):
    """Root continuation could not separate roots above the minimum step."""

    def __init__(self, message: str, location=None):
        super().__init__(message)
        self.location = location


@dataclass
class RootSet:
    roots: np.ndarray
    residual: float
    converged: bool
    iterations: int = 0

    def __len__(self):
        return len(self.roots)

    def count_in_disc(self, center: complex, radius: float) -> int:
        return int(np.count_nonzero(np.abs(self.roots - center) < radius))


def _coeffs(p) -> np.ndarray:
    if isinstance(p, UnivariateComplexPoly):
        return p.coeffs
    return UnivariateComplexPoly(p).coeffs


def _residual(c: np.ndarray, z: np.ndarray) -> float:
    """max |p(z)| relative to sum |a_k| max(1,|z|)^k."""
    vals = np.abs(npp.polyval(z, c))
    scale = npp.polyval(np.maximum(1.0, np.abs(z)), np.abs(c))
    return float(np.max(vals / scale)) if len(z) else 0.0


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    n = len(c) - 1
    radius = 1.0 + np.max(np.abs(c[:-1] / c[-1]))
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return radius * np.exp(1j * angles)


def _aberth_step(c, dc, z):
    p = npp.polyval(z, c)
    dp = npp.polyval(z, dc)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(p == 0, 0, p / dp)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0)
        s = inv.sum(axis=1)
        w = ratio / (1 - ratio * s)
    bad = ~np.isfinite(w)
    if bad.any():
        # derivative vanished or collision: nudge off the critical point
        w = np.where(bad, 1e-8 * (1 + np.abs(z)) * np.exp(1j * np.arange(len(z))), w)
    return z - w, w


def find_roots(p, tol: float = 1e-12, initial: Sequence[complex] | None = None,
               max_iter: int = MAX_ITER) -> RootSet:
    """All roots of ``p`` with multiplicity by Aberth-Ehrlich iteration.

    Parameters
    ----------
    p : UnivariateComplexPoly or array_like
        Polynomial, coefficients ascending.
    tol : float
        Target residual, relative to the coefficient norm (see ``RootSet``).
    initial : array_like, optional
        Warm start, e.g. the roots of a nearby polynomial.  Defaults to a
        circle of radius equal to the Cauchy root bound.

    Returns
    -------
    RootSet
        ``converged`` is False when the iteration cap is hit before the
        residual drops below ``tol``; the partial roots are returned.
    """
    c = _coeffs(p)
    n = len(c) - 1
    if n < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    if abs(c[-1]) <= 1e-300:
        raise ValueError("leading coefficient is numerically zero")
    c = c / c[-1]
    if n == 1:
        z = np.array([-c[0]])
        return RootSet(z, _residual(c, z), True, 0)
    dc = npp.polyder(c)
    if initial is not None:
        z = np.array(initial, dtype=complex)
        if z.shape != (n,):
            raise ValueError(f"initial guess must have {n} entries")
        # coincident warm-start points freeze the iteration
        z = z + 1e-14 * (1 + np.abs(z)) * np.exp(1j * (0.7 + np.arange(n)))
    else:
        z = _initial_guesses(c)
    res = np.inf
    back_tol = 16 * len(c) * np.finfo(float).eps
    absc = np.abs(c)
    best_step, stagnant = np.inf, 0
    for it in range(1, max_iter + 1):
        z, w = _aberth_step(c, dc, z)
        res = _residual(c, z)
        # backward error of each root; clustered small roots need this, the
        # coefficient-scaled residual is tiny across the whole cluster
        denom = npp.polyval(np.abs(z), absc)
        with np.errstate(divide="ignore", invalid="ignore"):
            back = np.where(denom > 0, np.abs(npp.polyval(z, c)) / denom, 0.0)
        if np.all(back <= back_tol) and res <= tol:
            z, _ = _aberth_step(c, dc, z)
            return RootSet(z, _residual(c, z), True, it + 1)
        step = float(np.max(np.abs(w)))
        if step < 0.5 * best_step:
            best_step, stagnant = step, 0
        else:
            stagnant += 1
        # multiple roots at 0 never reach a small backward error
        if stagnant >= 8 and res <= tol:
            return RootSet(z, res, True, it)
    return RootSet(z, res, bool(res <= tol), max_iter)


def batch_roots(coeffs: np.ndarray, polish: int = 2) -> np.ndarray:
    """Roots of many polynomials of one degree at once.

    ``coeffs`` has shape (N, deg+1), ascending, with nonzero leading
    coefficients.  Uses stacked companion-matrix eigenvalues followed by a
    few Newton polishing steps.  Returns shape (N, deg).
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    n = coeffs.shape[1] - 1
    if n < 1:
        return np.zeros((coeffs.shape[0], 0), complex)
    monic = coeffs / coeffs[:, -1:]
    if n == 1:
        return -monic[:, :1]
    comp = np.zeros((coeffs.shape[0], n, n), dtype=complex)
    comp[:, 1:, :-1] = np.eye(n - 1)
    comp[:, :, -1] = -monic[:, :-1]
    roots = np.linalg.eigvals(comp)
    dmonic = monic[:, 1:] * np.arange(1, n + 1)
    for _ in range(polish):
        p = _batch_polyval(monic, roots)
        dp = _batch_polyval(dmonic, roots)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(np.abs(dp) > 0, p / dp, 0)
        # skip Newton where it would jump further than the root's own cluster
        ok = np.isfinite(step) & (np.abs(step) < 1e-3 * (1 + np.abs(roots)))
        roots = np.where(ok, roots - step, roots)
    return roots


def _batch_polyval(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    acc = np.zeros_like(z)
    for k in range(c.shape[1] - 1, -1, -1):
        acc = acc * z + c[:, k: k + 1]
    return acc


def count_roots_in_disc(p, center: complex, radius: float, guard: float = 1e-6,
                        min_samples: int = 64) -> int:
    """Number of roots in the open disc, by the winding number of p on its rim.

    Phase increments are summed over at least ``64*degree`` points; the
    sampling is doubled until two successive counts agree and no single
    increment exceeds pi/2.  Raises :class:`RootOnBoundaryError` when some
    root is within ``guard*radius`` of the circle, judged by |p|/|p'|.
    """
    c = _coeffs(p)
    n = len(c) - 1
    if radius <= 0:
        raise ValueError("radius must be positive")
    if n < 1:
        if not np.any(c):
            raise ValueError("the zero polynomial has no isolated roots")
        return 0
    dc = npp.polyder(c)
    samples = max(min_samples, 64 * n)
    previous = None
    for _ in range(12):
        theta = 2 * np.pi * np.arange(samples + 1) / samples
        z = center + radius * np.exp(1j * theta)
        vals = npp.polyval(z, c)
        dvals = npp.polyval(z, dc)
        with np.errstate(divide="ignore", invalid="ignore"):
            dist = np.abs(vals) / np.abs(dvals)
        if np.any(vals == 0) or np.nanmin(dist) < guard * radius:
            k = int(np.nanargmin(dist)) if not np.any(vals == 0) else int(np.argmin(np.abs(vals)))
            raise RootOnBoundaryError(
                f"a root lies within {guard:g}*radius of the circle near {z[k]:.6g}; "
                "perturb the radius"
            )
        steps = np.angle(vals[1:] / vals[:-1])
        winding = int(round(steps.sum() / (2 * np.pi)))
        if np.max(np.abs(steps)) < np.pi / 2 and winding == previous:
            return winding
        previous = winding
        samples *= 2
    raise RootOnBoundaryError("winding number did not stabilise; perturb the radius")


@dataclass
class TrackedPath:
    """Root lists along a path and the induced permutation.

    ``permutation[i] = j`` means the root that started as ``samples[0][1][i]``
    ends at the position of start root ``j``.  ``closed`` is False when the
    end root set differs from the start set (an arc rather than a loop); the
    permutation is then the identity labelling along the path.
    """

    samples: list[tuple[complex, np.ndarray]]
    permutation: tuple[int, ...]
    closed: bool = True
    refinements: int = 0
    min_margin: float = field(default=np.inf)

    @property
    def parameters(self) -> np.ndarray:
        return np.array([s for s, _ in self.samples])

    @property
    def roots(self) -> np.ndarray:
        return np.array([r for _, r in self.samples])

    def cycles(self) -> list[list[int]]:
        return permutation_cycles(self.permutation)


def _match(old: np.ndarray, new: np.ndarray, ratio: float = 1 / 3):
    """Nearest-neighbour matching with a separation margin.

    Returns the reordered ``new`` (aligned with ``old``) and the worst
    nearest/second-nearest distance ratio, or None when ambiguous.
    """
    d = np.abs(old[:, None] - new[None, :])
    order = np.argsort(d, axis=1)
    nearest = order[:, 0]
    if len(new) > 1:
        d1 = d[np.arange(len(old)), nearest]
        d2 = d[np.arange(len(old)), order[:, 1]]
        with np.errstate(divide="ignore", invalid="ignore"):
            worst = float(np.max(np.where(d2 > 0, d1 / d2, np.where(d1 > 0, np.inf, 0.0))))
    else:
        worst = 0.0
    if worst > ratio or len(set(nearest.tolist())) != len(old):
        return None, worst
    return new[nearest], worst


def track_roots(family: Callable[[complex], object], path: Sequence, tol: float = 1e-12,
                min_step: float = 1e-9, max_refinements: int = 100000) -> TrackedPath:
    """Continue the roots of ``family(s)`` along the discretised ``path``.

    Each step warm-starts :func:`find_roots` from the previous roots and
    matches by nearest neighbour; a step whose closest match is not three
    times closer than the second closest is halved.  Raises
    :class:`TrackingError` when a step below ``min_step`` (relative to the
    segment length) is still ambiguous.
    """
    path = list(path)
    if len(path) < 2:
        raise ValueError("path needs at least two parameter values")
    start = find_roots(family(path[0]), tol)
    if not start.converged:
        raise TrackingError("root finding failed at path start", path[0])
    current = start.roots
    degree = len(current)
    samples = [(path[0], current.copy())]
    refinements = 0
    min_margin = np.inf
    for a, b in zip(path[:-1], path[1:]):
        seg = abs(b - a)
        stack = [b]
        left = a
        while stack:
            right = stack[-1]
            p = family(right)
            if UnivariateComplexPoly(_coeffs(p)).degree != degree:
                raise TrackingError(f"degree of the family changes at parameter {right}", right)
            rs = find_roots(p, tol, initial=current)
            if not rs.converged:
                rs = find_roots(p, tol)
            matched, worst = _match(current, rs.roots) if rs.converged else (None, np.inf)
            if matched is None:
                if abs(right - left) < min_step * max(seg, 1e-300) or refinements >= max_refinements:
                    raise TrackingError(
                        f"roots could not be separated near parameter {right} "
                        f"(match ratio {worst:.3g})", right)
                stack.append((left + right) / 2)
                refinements += 1
                continue
            min_margin = min(min_margin, worst)
            current = matched
            samples.append((right, current.copy()))
            left = stack.pop()
    start_roots = samples[0][1]
    end = samples[-1][1]
    d = np.abs(end[:, None] - start_roots[None, :])
    nearest = np.argmin(d, axis=1)
    dist = float(np.max(d[np.arange(degree), nearest]))
    limit = min(1e-6 * (1 + float(np.max(np.abs(start_roots)))), float(np.min(_pairwise_gaps(start_roots))) / 3)
    closed = len(set(nearest.tolist())) == degree and dist <= limit
    perm = tuple(int(j) for j in nearest) if closed else tuple(range(degree))
    return TrackedPath(samples, perm, closed, refinements, min_margin)


def _pairwise_gaps(z: np.ndarray) -> np.ndarray:
    if len(z) < 2:
        return np.array([np.inf])
    d = np.abs(z[:, None] - z[None, :])
    return d[np.triu_indices(len(z), 1)]


def permutation_cycles(perm: Sequence[int]) -> list[list[int]]:
    seen = set()
    cycles = []
    for i in range(len(perm)):
        if i in seen:
            continue
        cyc = []
        j = i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = perm[j]
        cycles.append(cyc)
    return cycles


def compose_permutations(first: Sequence[int], second: Sequence[int]) -> tuple[int, ...]:
    """Permutation of following ``first`` then ``second``."""
    return tuple(second[first[i]] for i in range(len(first)))
