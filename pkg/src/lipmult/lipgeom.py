"""Inner distances, LNE evidence and Lipschitz extension on sampled curves.

A curve germ V(f) in C^2 is sampled on vertical slices in generic unitary
coordinates and stored as a real point cloud in R^4.  Graph edges are kept
only if the segment stays on the curve: the first-order distance
|f| / |grad f| at interior points of the segment must be small relative to
its length.  Shortest paths in this graph approximate the inner metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from .branches import branches, generic_coordinates
from .poly import DenseBivariate, Polynomial
from .seeding import rng_for
from .uniroots import batch_roots

__all__ = [
    "PointCloud",
    "LneEstimate",
    "LneDecision",
    "LipschitzViolation",
    "sample_curve",
    "build_cloud",
    "inner_distance",
    "lne_ratio",
    "cloud_ratio",
    "lne_decide_plane_curve",
    "lipschitz_extend",
    "format_line",
]

DEFAULT_K = 8
DEFAULT_COUNT = 2000
EDGE_TOL = 0.05
_INTERIOR = np.array([0.25, 0.5, 0.75])


def _to_real(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.concatenate([z.real, z.imag], axis=-1)
    return z.astype(float)


def _to_complex(p: np.ndarray) -> np.ndarray:
    n = p.shape[-1] // 2
    return p[..., :n] + 1j * p[..., n:]


@dataclass
class PointCloud:
    """Real points (C^n flattened to R^(2n): real parts, then imaginary parts) and a graph.

    ``edges`` holds index pairs; weights are always the Euclidean lengths.
    ``slice_ids`` groups samples found on the same slice (-1 for none).
    """

    points: np.ndarray
    edges: np.ndarray
    scale: float
    origin_index: int | None = None
    slice_ids: np.ndarray | None = None
    notes: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        self.edges = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        if self.slice_ids is None:
            self.slice_ids = np.full(len(self.points), -1)

    def __len__(self):
        return len(self.points)

    @property
    def complex_points(self) -> np.ndarray:
        return _to_complex(self.points)

    @property
    def weights(self) -> np.ndarray:
        a, b = self.edges.T
        return np.linalg.norm(self.points[a] - self.points[b], axis=1)

    def graph(self):
        """Symmetric sparse adjacency matrix with Euclidean weights."""
        n = len(self.points)
        # duplicates would be summed by the sparse conversion
        e = np.unique(np.sort(self.edges, axis=1), axis=0)
        e = e[e[:, 0] != e[:, 1]]
        a, b = e.T
        # zero-length edges would vanish from a sparse matrix
        w = np.maximum(np.linalg.norm(self.points[a] - self.points[b], axis=1), 1e-300)
        m = coo_matrix((np.concatenate([w, w]), (np.concatenate([a, b]), np.concatenate([b, a]))),
                       shape=(n, n))
        return m.tocsr()

    def with_edges(self, extra) -> "PointCloud":
        extra = np.asarray(extra, dtype=int).reshape(-1, 2)
        return PointCloud(self.points, np.vstack([self.edges, extra]), self.scale,
                          self.origin_index, self.slice_ids, list(self.notes))

    def transformed(self, A) -> "PointCloud":
        """Image under the real linear map A (same graph, new weights)."""
        A = np.asarray(A, dtype=float)
        return PointCloud(self.points @ A.T, self.edges, self.scale, self.origin_index,
                          self.slice_ids, list(self.notes))


def _segment_ok(dense: DenseBivariate | None, pa: np.ndarray, pb: np.ndarray,
                tol: float = EDGE_TOL) -> np.ndarray:
    """True where the segment pa-pb (complex, shape (m, 2)) stays within tol*length of V."""
    if dense is None:
        return np.ones(len(pa), dtype=bool)
    length = np.linalg.norm(pa - pb, axis=1)
    worst = np.zeros(len(pa))
    for t in _INTERIOR:
        q = (1 - t) * pa + t * pb
        with np.errstate(divide="ignore", invalid="ignore"):
            d = dense.distance_estimate(q[:, 0], q[:, 1])
        worst = np.maximum(worst, np.where(np.isfinite(d), d, np.inf))
    return worst <= tol * length


def build_cloud(points, scale: float, k: int = DEFAULT_K, f: Polynomial | DenseBivariate | None = None,
                adjoin_origin: bool = True, slice_ids=None, tol: float = EDGE_TOL) -> PointCloud:
    """k-NN graph on complex points (shape (N, n)), optionally validated against V(f).

    Candidates are the 3k nearest neighbours; with ``f`` given only segments
    that stay on V(f) (see module notes) are kept.  The adjoined origin is
    joined to every sample whose segment to 0 stays on V(f) (to its k
    nearest samples when ``f`` is None).
    """
    z = np.asarray(points, dtype=complex)
    if z.ndim != 2 or len(z) < 2:
        raise ValueError("need at least 2 points given as an (N, n) array")
    dense = DenseBivariate(f) if isinstance(f, Polynomial) else f
    if dense is not None and z.shape[1] != 2:
        raise ValueError("edge validation is implemented for plane curves")
    slice_ids = np.full(len(z), -1) if slice_ids is None else np.asarray(slice_ids)
    origin_index = None
    if adjoin_origin:
        origin_index = len(z)
        z = np.vstack([z, np.zeros((1, z.shape[1]))])
        slice_ids = np.append(slice_ids, -1)
    real = _to_real(z)
    tree = cKDTree(real)
    kk = min(3 * k, len(z) - 1)
    _, nbr = tree.query(real, kk + 1)
    a = np.repeat(np.arange(len(z)), kk)
    b = nbr[:, 1:].ravel()
    if origin_index is not None:
        mask = (a != origin_index) & (b != origin_index)
        a, b = a[mask], b[mask]
    pairs = np.unique(np.sort(np.stack([a, b], axis=1), axis=1), axis=0)
    ok = _segment_ok(dense, z[pairs[:, 0]], z[pairs[:, 1]], tol)
    pairs = pairs[ok]
    if dense is None:
        # plain k-NN: keep the k nearest per point
        keep = set()
        for i in range(len(z)):
            for j in nbr[i, 1:k + 1]:
                if origin_index is None or origin_index not in (i, j):
                    keep.add((min(i, j), max(i, j)))
        pairs = np.array(sorted(keep), dtype=int).reshape(-1, 2)
    edges = [pairs]
    if origin_index is not None:
        samples = np.arange(origin_index)
        if dense is None:
            near = np.argsort(np.linalg.norm(real[:-1], axis=1))[:k]
        else:
            near = samples[_segment_ok(dense, np.zeros_like(z[:-1]), z[:-1], tol)]
        edges.append(np.stack([np.full(len(near), origin_index), near], axis=1))
    cloud = PointCloud(real, np.vstack(edges), scale, origin_index, slice_ids)
    if len(cloud.edges) == 0:
        cloud.notes.append("no edge survived validation")
    return cloud


def sample_curve(f: Polynomial, scale: float, count: int = DEFAULT_COUNT, seed: int = 0,
                 k: int = DEFAULT_K, adjoin_origin: bool = True) -> PointCloud:
    """Sample V(f) near 0 with norms in [scale/4, scale] and build its graph.

    Slices are vertical lines x = c in generic coordinates with c uniform in
    the disc of radius ``scale``; all roots y of each slice with norm in
    range are kept.  The unit-scale draws do not depend on ``scale``, so a
    homogeneous f yields exactly rescaled clouds.  Points are returned in the
    original coordinates.
    """
    if f.nvars != 2:
        raise ValueError("space curves are not supported: f must have 2 variables")
    if scale <= 0:
        raise ValueError("scale must be positive")
    gc = generic_coordinates(f, seed)
    rng = rng_for(seed, "sample-curve")
    pts, ids = [], []
    slice_no = 0
    for _ in range(50):
        need = count - len(pts)
        if need <= 0:
            break
        m = max(64, 2 * need)
        u = np.sqrt(rng.random(m)) * np.exp(2j * np.pi * rng.random(m))
        x = scale * u
        ys = batch_roots(gc.dense.y_coeffs(x))
        for i in range(m):
            for y in ys[i]:
                r = math.hypot(abs(x[i]), abs(y))
                if scale / 4 <= r <= scale:
                    pts.append((x[i], y))
                    ids.append(slice_no)
            slice_no += 1
            if len(pts) >= count:
                break
    if len(pts) < count:
        raise ValueError(f"only {len(pts)} of {count} points found at scale {scale:g}")
    w = np.array(pts)
    z = w @ gc.matrix.T
    cloud = build_cloud(z, scale, k, f, adjoin_origin, np.array(ids))
    return cloud


def inner_distance(cloud: PointCloud, a: int, b: int) -> float:
    """Graph shortest-path length between samples a and b (inf if disconnected)."""
    if a == b:
        return 0.0
    d = dijkstra(cloud.graph(), directed=False, indices=a)
    return float(d[b])


@dataclass
class LneEstimate:
    ratio: float
    witness_pair: tuple[int, int]
    witness_points: tuple[tuple[complex, ...], tuple[complex, ...]]
    scale: float
    pairs_checked: int
    label: str = "evidence"

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "witnessPair": list(self.witness_pair),
            "witnessPoints": [[[z.real, z.imag] for z in p] for p in self.witness_points],
            "scale": self.scale,
            "pairsChecked": self.pairs_checked,
            "label": self.label,
        }


def _pair_sample(cloud: PointCloud, rng, sources: int, targets: int) -> np.ndarray:
    n = len(cloud)
    samples = np.array([i for i in range(n) if i != cloud.origin_index])
    src = rng.choice(samples, size=min(sources, len(samples)), replace=False)
    pairs = []
    ids = cloud.slice_ids
    for s in src:
        if ids[s] >= 0:
            mates = samples[(ids[samples] == ids[s]) & (samples != s)]
            pairs.extend((s, t) for t in mates)
        for t in rng.choice(samples, size=targets):
            if t != s:
                pairs.append((s, t))
    return np.array(pairs, dtype=int).reshape(-1, 2)


def cloud_ratio(cloud: PointCloud, pairs: np.ndarray) -> tuple[float, tuple[int, int]]:
    """max of graph distance / Euclidean distance over the given index pairs."""
    pairs = np.asarray(pairs, dtype=int).reshape(-1, 2)
    src = np.unique(pairs[:, 0])
    where = {s: i for i, s in enumerate(src)}
    dist = dijkstra(cloud.graph(), directed=False, indices=src)
    inner = dist[[where[s] for s in pairs[:, 0]], pairs[:, 1]]
    eucl = np.linalg.norm(cloud.points[pairs[:, 0]] - cloud.points[pairs[:, 1]], axis=1)
    ratio = inner / eucl
    i = int(np.argmax(ratio))
    return float(ratio[i]), (int(pairs[i, 0]), int(pairs[i, 1]))


def lne_ratio(f: Polynomial, scale: float, count: int = DEFAULT_COUNT, seed: int = 0,
              k: int = DEFAULT_K, sources: int = 150, targets: int = 12,
              cloud: PointCloud | None = None) -> LneEstimate:
    """Largest inner/Euclidean distance ratio over a stratified pair sample.

    Pairs are random sources with random targets plus every other root on
    the source's slice (these are the cross-branch pairs that detect
    tangency).  A pair whose own segment stays on V(f) is joined directly.
    """
    if cloud is None:
        cloud = sample_curve(f, scale, count, seed, k)
    rng = rng_for(seed, f"lne-pairs/{len(cloud)}")
    pairs = _pair_sample(cloud, rng, sources, targets)
    z = cloud.complex_points
    direct = _segment_ok(DenseBivariate(f), z[pairs[:, 0]], z[pairs[:, 1]])
    full = cloud.with_edges(pairs[direct])
    ratio, (a, b) = cloud_ratio(full, pairs)
    return LneEstimate(ratio, (a, b), (tuple(z[a]), tuple(z[b])), scale, len(pairs))


def format_line(direction: Sequence[complex], digits: int = 6) -> str:
    """Projective coordinates like ``(1:0)`` or ``(1:-0.5+2i)``."""
    def one(c: complex) -> str:
        re, im = round(c.real, digits) + 0.0, round(c.imag, digits) + 0.0
        fmt = lambda v: str(int(v)) if v == int(v) else f"{v:g}"  # noqa: E731
        if im == 0:
            return fmt(re)
        if re == 0:
            return f"{fmt(im)}i"
        return f"{fmt(re)}{'+' if im > 0 else '-'}{fmt(abs(im))}i"
    return "(" + ":".join(one(complex(c)) for c in direction) + ")"


@dataclass
class LneDecision:
    is_lne: bool
    reason: str
    label: str = "decision"

    def __bool__(self):
        return self.is_lne

    def to_json(self) -> dict:
        return {"lne": self.is_lne, "reason": self.reason, "label": self.label}


def lne_decide_plane_curve(f: Polynomial, seed: int = 0, decomposition=None) -> LneDecision:
    """A plane curve germ is LNE iff its branches are smooth and pairwise transverse."""
    if f.nvars != 2:
        raise ValueError("space curves are not supported: f must have 2 variables")
    dec = branches(f, seed=seed) if decomposition is None else decomposition
    for b in dec.branches:
        if b.order != 1:
            return LneDecision(False, f"branch of order {b.order}")
    seen = []
    for b in dec.branches:
        for t in seen:
            if t.same_line(b.tangent, 1e-6):
                return LneDecision(False, f"shared tangent {format_line(t.direction)}")
        seen.append(b.tangent)
    return LneDecision(True, f"{len(dec.branches)} smooth branch(es) with distinct tangents")


class LipschitzViolation(ValueError):
    def __init__(self, i: int, j: int, gap: float, bound: float):
        super().__init__(f"samples {i} and {j} violate the Lipschitz bound: "
                         f"|h_i - h_j| = {gap:.17g} > C*|p_i - p_j| = {bound:.17g}")
        self.pair = (i, j)


def lipschitz_extend(samples, C: float, query, check: bool = True):
    """McShane extension H(q) = min_i (h_i + C |q - p_i|).

    ``samples`` is a sequence of (point, value); values may be scalars or
    vectors (extended coordinatewise with the same C).  ``query`` is one
    point or an array of points.  Raises :class:`LipschitzViolation` naming
    the first offending pair if the samples are not C-Lipschitz.
    """
    if C < 0:
        raise ValueError("C must be non-negative")
    if not samples:
        raise ValueError("need at least one sample")
    P = _to_real(np.array([np.atleast_1d(np.asarray(p)) for p, _ in samples]))
    H = np.array([np.asarray(v, dtype=float) for _, v in samples])
    vector = H.ndim > 1
    Hm = H if vector else H[:, None]
    if check:
        D = np.linalg.norm(P[:, None, :] - P[None, :, :], axis=2)
        gaps = np.abs(Hm[:, None, :] - Hm[None, :, :]).max(axis=2)
        bad = np.argwhere(gaps > C * D + 1e-12 * np.maximum(1.0, C * D))
        if len(bad):
            i, j = bad[0]
            raise LipschitzViolation(int(i), int(j), float(gaps[i, j]), float(C * D[i, j]))
    q = np.asarray(query)
    single = q.ndim == 1 if np.ndim(samples[0][0]) else q.ndim == 0
    Q = _to_real(np.atleast_2d(q).reshape(-1, P.shape[1] if not np.iscomplexobj(q) else P.shape[1] // 2))
    dist = np.linalg.norm(Q[:, None, :] - P[None, :, :], axis=2)
    out = (Hm[None, :, :] + C * dist[:, :, None]).min(axis=1)
    # exact agreement at sample points
    hit = dist == 0
    rows, cols = np.nonzero(hit)
    out[rows] = Hm[cols]
    if not vector:
        out = out[:, 0]
    return out[0] if single else out
