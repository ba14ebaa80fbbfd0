"""Statistics on landscape grids.

Grids with identical layout live in a common vector space: integrals use
Riemann sums with node weight resolution**2 (counting measure on the
depth index k), and all distances are computed after truncation to the
grid region, which keeps them finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy import stats as sps

from .errors import InputError
from .grid import LandscapeGrid, Region, same_layout


@dataclass(frozen=True)
class FunctionalSpec:
    """Integrate the depth-k landscape plane over an axis-aligned box."""

    k: int
    box: Region


def mean_landscape(grids) -> LandscapeGrid:
    """Pointwise mean of landscape grids with identical layout."""
    grids = list(grids)
    if not grids:
        raise InputError("need at least one grid")
    first = grids[0]
    for g in grids[1:]:
        if not same_layout(first, g):
            raise InputError("grid layouts differ")
    values = np.mean([g.values for g in grids], axis=0)
    return LandscapeGrid(first.region, first.resolution, first.k_max,
                         first.weight, first.hom_dim, values)


def q_distance(g1: LandscapeGrid, g2: LandscapeGrid, q: float) -> float:
    """Lq distance between grids: Riemann sum over nodes, max for q = inf."""
    if not same_layout(g1, g2):
        raise InputError("grid layouts differ")
    delta = np.abs(g1.values - g2.values)
    if math.isinf(q):
        return float(delta.max()) if delta.size else 0.0
    if q < 1:
        raise InputError("q must be in [1, inf]")
    cell = g1.resolution ** 2
    return float((np.sum(delta ** q) * cell) ** (1.0 / q))


def functional_integral(grid: LandscapeGrid, spec: FunctionalSpec) -> float:
    """Riemann sum of the depth-k plane over nodes inside the box.

    Nodes on the box boundary are included; node weight is resolution**2.
    """
    if not 1 <= spec.k <= grid.k_max:
        raise InputError(f"k must be in 1..{grid.k_max}")
    if not grid.region.contains_region(spec.box):
        raise InputError("integration box extends outside the grid region")
    tol = 1e-9 * max(1.0, abs(spec.box.x1_max), abs(spec.box.x2_max))
    xs1, xs2 = grid.xs1, grid.xs2
    m1 = (xs1 >= spec.box.x1_min - tol) & (xs1 <= spec.box.x1_max + tol)
    m2 = (xs2 >= spec.box.x2_min - tol) & (xs2 <= spec.box.x2_max + tol)
    plane = grid.values[spec.k - 1]
    return float(plane[np.ix_(m2, m1)].sum() * grid.resolution ** 2)


def confidence_interval(values, alpha: float) -> tuple[float, float]:
    """Normal-approximation (1 - alpha) confidence interval for the mean."""
    v = np.asarray(values, np.float64)
    if v.ndim != 1 or len(v) < 2:
        raise InputError("need at least 2 values")
    if not 0 < alpha < 1:
        raise InputError("alpha must be in (0, 1)")
    z = NormalDist().inv_cdf(1.0 - alpha / 2.0)
    mean = float(v.mean())
    half = z * float(v.std(ddof=1)) / math.sqrt(len(v))
    return (mean - half, mean + half)


def two_sample_t(values_a, values_b) -> float:
    """Two-sided Welch t-test p-value on two samples of functional values."""
    a = np.asarray(values_a, np.float64)
    b = np.asarray(values_b, np.float64)
    if len(a) < 2 or len(b) < 2:
        raise InputError("each sample needs at least 2 values")
    va, vb = a.var(ddof=1), b.var(ddof=1)
    na, nb = len(a), len(b)
    se2 = va / na + vb / nb
    if se2 == 0.0:
        return 1.0 if a.mean() == b.mean() else 0.0
    t = (a.mean() - b.mean()) / math.sqrt(se2)
    df = se2 ** 2 / ((va / na) ** 2 / (na - 1) + (vb / nb) ** 2 / (nb - 1))
    return float(2.0 * sps.t.sf(abs(t), df))


def permutation_test(values_a, values_b, n_perm: int, seed: int) -> float:
    """Two-sided label-permutation p-value for the difference of means.

    p = (c + 1) / (n_perm + 1) where c counts permutations with absolute
    mean difference >= the observed one; deterministic under the seed.
    """
    if n_perm < 100:
        raise InputError("n_perm must be >= 100")
    a = np.asarray(values_a, np.float64)
    b = np.asarray(values_b, np.float64)
    observed = abs(a.mean() - b.mean())
    pooled = np.concatenate([a, b])
    na = len(a)
    rng = np.random.default_rng(seed)
    count = 0
    for _ in range(n_perm):
        perm = rng.permutation(pooled)
        if abs(perm[:na].mean() - perm[na:].mean()) >= observed:
            count += 1
    return (count + 1) / (n_perm + 1)


def vectorize(grid: LandscapeGrid) -> np.ndarray:
    """Row-major flatten (k, then x2 ascending, then x1 ascending)."""
    return grid.values.ravel(order="C").copy()


def export_features_csv(path, grids, labels=None) -> None:
    """One row per grid in vectorize order, prefixed by a label column.

    The first line records the shared grid-metadata hash as a comment.
    """
    grids = list(grids)
    if not grids:
        raise InputError("need at least one grid")
    for g in grids[1:]:
        if not same_layout(grids[0], g):
            raise InputError("grid layouts differ")
    if labels is None:
        labels = [str(i) for i in range(len(grids))]
    n_feat = grids[0].values.size
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# grid_meta_hash={grids[0].meta_hash()}\n")
        fh.write("label," + ",".join(f"f{i:06d}" for i in range(n_feat)) + "\n")
        for label, g in zip(labels, grids):
            row = ",".join(format(x, ".17g") for x in vectorize(g))
            fh.write(f"{label},{row}\n")
