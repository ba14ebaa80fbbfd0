"""Seeded generators for the example pipelines.

All generators are pure functions of (parameters, seed), using numpy's
PCG64 generator.  Substreams for sample batches are derived through
SeedSequence([master_seed, *indices]) so batches can be produced in
parallel and stay reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class SampleSet:
    """A generated point cloud and/or distance matrix with vertex values."""

    kind: str
    label: str
    seed: int
    points: np.ndarray | None = field(repr=False, default=None)
    distances: np.ndarray = field(repr=False, default=None)
    vertex_values: np.ndarray = field(repr=False, default=None)


def derive_seed(master: int, *indices: int) -> int:
    """Deterministic substream seed for a batch element."""
    return int(np.random.SeedSequence([master, *indices]).generate_state(1)[0])


def _euclidean_distances(points: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - points[None, :, :]
    d = np.sqrt((diff ** 2).sum(-1))
    np.fill_diagonal(d, 0.0)
    return np.minimum(d, d.T)


def gen_circles(n_per_circle: int, colouring: str, noise_sigma: float,
                seed: int) -> SampleSet:
    """Points on two concentric circles (radii 1 and 3) with colour values.

    Colouring A gives the large circle colour 0.5 and the small circle
    1.5; colouring B swaps them.  Noise perturbs each point's radius and
    colour by independent normals; angles are left alone.
    """
    if n_per_circle < 1:
        raise InputError("n_per_circle must be >= 1")
    if colouring not in ("A", "B"):
        raise InputError(f"colouring must be A or B, got {colouring!r}")
    if noise_sigma < 0:
        raise InputError("noise_sigma must be >= 0")
    rng = np.random.default_rng(seed)
    n = int(n_per_circle)
    theta = rng.uniform(0.0, 2.0 * np.pi, 2 * n)
    radius = np.concatenate([np.full(n, 1.0), np.full(n, 3.0)])
    small_colour, large_colour = (1.5, 0.5) if colouring == "A" else (0.5, 1.5)
    colour = np.concatenate([np.full(n, small_colour), np.full(n, large_colour)])
    if noise_sigma > 0:
        radius = radius + rng.normal(0.0, noise_sigma, 2 * n)
        colour = colour + rng.normal(0.0, noise_sigma, 2 * n)
    points = np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)
    return SampleSet("circles", f"circles-{colouring}", seed, points=points,
                     distances=_euclidean_distances(points), vertex_values=colour)


def gen_disc(space: str, n: int, seed: int) -> SampleSet:
    """Geodesic distances of n points drawn uniformly by area from a
    radius-1 disc of constant curvature -1, 0 or +1.

    Radii come from the inverse CDF of the area measure in each
    geometry; distances use the hyperbolic/Euclidean/spherical laws of
    cosines.
    """
    if space not in ("hyperbolic", "euclidean", "elliptic"):
        raise InputError(f"unknown space {space!r}")
    if n < 1:
        raise InputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, n)
    u = rng.uniform(0.0, 1.0, n)
    dth = theta[:, None] - theta[None, :]
    if space == "hyperbolic":
        r = np.arccosh(1.0 + u * (np.cosh(1.0) - 1.0))
        c = (np.cosh(r)[:, None] * np.cosh(r)[None, :]
             - np.sinh(r)[:, None] * np.sinh(r)[None, :] * np.cos(dth))
        d = np.arccosh(np.maximum(c, 1.0))
    elif space == "euclidean":
        r = np.sqrt(u)
        d2 = (r[:, None] ** 2 + r[None, :] ** 2
              - 2.0 * r[:, None] * r[None, :] * np.cos(dth))
        d = np.sqrt(np.maximum(d2, 0.0))
    else:
        r = np.arccos(1.0 - u * (1.0 - np.cos(1.0)))
        c = (np.cos(r)[:, None] * np.cos(r)[None, :]
             + np.sin(r)[:, None] * np.sin(r)[None, :] * np.cos(dth))
        d = np.arccos(np.clip(c, -1.0, 1.0))
    np.fill_diagonal(d, 0.0)
    d = np.minimum(d, d.T)
    return SampleSet(space, f"disc-{space}", seed, distances=d)


def knn_codensity(distances, k: int) -> np.ndarray:
    """Distance from each point to its k-th nearest other point."""
    d = np.asarray(distances, np.float64)
    n = d.shape[0]
    if k < 1 or k >= n:
        raise InputError(f"need 1 <= k < {n}, got k={k}")
    others = np.sort(d + np.diag(np.full(n, np.inf)), axis=1)
    return others[:, k - 1]


def gaussian_kde(data, sigma: float, xs) -> np.ndarray:
    """Gaussian kernel density estimate on a 1-d grid."""
    data = np.asarray(data, np.float64)
    xs = np.asarray(xs, np.float64)
    if data.size == 0:
        raise InputError("data must be nonempty")
    if sigma <= 0:
        raise InputError("sigma must be > 0")
    z = (xs[:, None] - data[None, :]) / sigma
    k = np.exp(-0.5 * z ** 2) / (sigma * np.sqrt(2.0 * np.pi))
    return k.mean(axis=1)


def gen_kde_surface(data, sigmas, xs):
    """Graded triangulation of the KDE surface over xs x sigmas.

    Each grid cell splits along its lower-left to upper-right diagonal;
    a triangle's grade is (mean bandwidth of its vertices, 1 - mean
    density of its vertices), so both axes filter upward.  Feed the
    result to build_closure_bicomplex.

    Returns (triangles, grades, n_vertices) with vertex (i, j) at index
    i * len(sigmas) + j for x index i and bandwidth index j.
    """
    sigmas = np.asarray(sigmas, np.float64)
    xs = np.asarray(xs, np.float64)
    if len(sigmas) < 2 or len(xs) < 2:
        raise InputError("need at least 2 values per axis")
    if np.any(np.diff(sigmas) <= 0) or np.any(np.diff(xs) <= 0):
        raise InputError("axes must be strictly increasing")
    dens = np.stack([gaussian_kde(data, s, xs) for s in sigmas], axis=1)  # (nx, ns)
    ns = len(sigmas)

    def vid(i, j):
        return i * ns + j

    triangles, grades = [], []
    for i in range(len(xs) - 1):
        for j in range(ns - 1):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            for tri in ((v00, v10, v11), (v00, v01, v11)):
                ii = [t // ns for t in tri]
                jj = [t % ns for t in tri]
                sig = float(np.mean(sigmas[jj]))
                p = float(np.mean(dens[ii, jj]))
                triangles.append(tri)
                grades.append((sig, 1.0 - p))
    return triangles, grades, len(xs) * ns


def trimodal_sample() -> np.ndarray:
    """Synthetic 1-d sample with three well-separated, equally tall modes.

    22 values in clusters at 22, 28 and 34 (sizes 8/7/7): each cluster
    places its points at normal quantiles (i + 1/2)/n scaled so that the
    three KDE peaks match, which makes the modal-count signature of the
    landscape norms sharp.  A deterministic stand-in for a small
    real-valued measurement series.
    """
    out = []
    for centre, size, spread in ((22.0, 8, 0.95), (28.0, 7, 0.807), (34.0, 7, 0.807)):
        q = (np.arange(size) + 0.5) / size
        z = np.sqrt(2.0) * _erfinv(2.0 * q - 1.0)
        out.append(centre + spread * z)
    return np.sort(np.concatenate(out))


def _erfinv(y: np.ndarray) -> np.ndarray:
    from scipy.special import erfinv

    return erfinv(y)
