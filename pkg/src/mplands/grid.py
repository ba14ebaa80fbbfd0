"""Landscape values of bifiltered complexes on rectangular grids.

The landscape value at a point is read off the barcode of the weighted
diagonal through it, so the grid computation groups nodes by diagonal,
computes one barcode per diagonal, and evaluates the whole profile of
node times from that single barcode.  Node values are exact landscape
values; off-node accuracy follows from the Lipschitz property and is a
documentation-level guarantee (nearest node is the query rule).
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bifilt import BifilteredComplex, push_to_line, validate_weight
from .errors import InputError
from .landscape import landscape_eval
from .reduction import compute_barcode


@dataclass(frozen=True)
class Region:
    """Axis-aligned query window [x1_min, x1_max] x [x2_min, x2_max]."""

    x1_min: float
    x1_max: float
    x2_min: float
    x2_max: float

    def __post_init__(self):
        if not (self.x1_min < self.x1_max and self.x2_min < self.x2_max):
            raise InputError(f"degenerate region {self}")

    def contains_point(self, p, tol: float = 0.0) -> bool:
        return (self.x1_min - tol <= p[0] <= self.x1_max + tol
                and self.x2_min - tol <= p[1] <= self.x2_max + tol)

    def contains_region(self, other: "Region", tol: float = 1e-12) -> bool:
        return (self.x1_min - tol <= other.x1_min and other.x1_max <= self.x1_max + tol
                and self.x2_min - tol <= other.x2_min and other.x2_max <= self.x2_max + tol)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1_min, self.x1_max, self.x2_min, self.x2_max)


def quantize_lattice(region: Region, eps: float) -> tuple[Region, float, float]:
    """Snap the resolution to 26 significant bits and the region origin to
    the induced power-of-two lattice.

    Returns (region, resolution, unit).  Grid computations also snap the
    input grades onto the same lattice: every coordinate difference in a
    tent evaluation is then an exact multiple of the unit, so values are
    computed in exact arithmetic and adjacent nodes respect the discrete
    Lipschitz bound with no floating-point slop.  The perturbation is
    below eps * 2**-26 per coordinate.
    """
    m, e = np.frexp(eps)
    eps_q = float(np.ldexp(np.round(np.ldexp(m, 26)), e - 26))
    unit = float(np.ldexp(1.0, e - 26))
    lo1 = round(region.x1_min / unit) * unit
    lo2 = round(region.x2_min / unit) * unit
    return Region(lo1, region.x1_max, lo2, region.x2_max), eps_q, unit


def _quantize_grades(cx: BifilteredComplex, unit: float) -> BifilteredComplex:
    snapped = np.round(cx.grades_flat / unit) * unit
    if np.array_equal(snapped, cx.grades_flat):
        return cx
    out = BifilteredComplex._from_arrays(cx.n_vertices, cx.verts_flat, cx.verts_off,
                                         snapped, cx.grades_off)
    out._facets = dict(cx._facets)
    return out


def _axis_nodes(lo: float, hi: float, eps: float) -> np.ndarray:
    n = int(np.floor((hi - lo) / eps + 1e-9)) + 1
    return lo + eps * np.arange(n)


@dataclass(frozen=True)
class LandscapeGrid:
    """Landscape values on the nodes of a rectangular grid.

    values[k-1, j, i] is the depth-k landscape at (xs1[i], xs2[j]).
    Values are nonnegative and non-increasing in k; adjacent nodes obey
    the weighted 1-Lipschitz bound.
    """

    region: Region
    resolution: float
    k_max: int
    weight: tuple[float, float]
    hom_dim: int
    values: np.ndarray = field(repr=False)

    @property
    def xs1(self) -> np.ndarray:
        return _axis_nodes(self.region.x1_min, self.region.x1_max, self.resolution)

    @property
    def xs2(self) -> np.ndarray:
        return _axis_nodes(self.region.x2_min, self.region.x2_max, self.resolution)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape

    def value_at(self, k: int, p) -> float:
        """Nearest-node landscape value at a point inside the region."""
        if not 1 <= k <= self.k_max:
            raise InputError(f"k must be in 1..{self.k_max}")
        if not self.region.contains_point(p, tol=1e-9):
            raise InputError(f"point {p} outside grid region")
        i = int(np.clip(round((p[0] - self.region.x1_min) / self.resolution),
                        0, len(self.xs1) - 1))
        j = int(np.clip(round((p[1] - self.region.x2_min) / self.resolution),
                        0, len(self.xs2) - 1))
        return float(self.values[k - 1, j, i])

    def meta(self) -> dict:
        return {
            "region": list(self.region.as_tuple()),
            "resolution": self.resolution,
            "k_max": self.k_max,
            "weight": list(self.weight),
            "hom_dim": self.hom_dim,
        }

    def meta_hash(self) -> str:
        payload = json.dumps(self.meta(), sort_keys=True).encode()
        return hashlib.sha256(payload).hexdigest()[:12]


def same_layout(a: LandscapeGrid, b: LandscapeGrid) -> bool:
    return (a.region == b.region and a.resolution == b.resolution
            and a.k_max == b.k_max and a.weight == b.weight
            and a.hom_dim == b.hom_dim)


def eval_point(cx: BifilteredComplex, x, k: int, weight=(1.0, 1.0),
               hom_dim: int = 0) -> float:
    """Landscape value at a single point: one barcode, evaluated at time 0."""
    if k < 1:
        raise InputError("k must be >= 1")
    filt = push_to_line(cx, x, weight)
    bc = compute_barcode(filt, hom_dim)
    return landscape_eval(bc, k, 0.0)


def _diagonal_groups(n1: int, n2: int, w: tuple[float, float]):
    """Group grid node indices (i, j) lying on a common weighted diagonal.

    Nodes share a diagonal when i*w1 - j*w2 agrees; for w1 == w2 this is
    the anti-diagonal family indexed by the integer offset i - j.  Keys
    that fail exact float equality just yield extra singleton diagonals,
    which changes cost but not values.
    """
    ii, jj = np.meshgrid(np.arange(n1), np.arange(n2), indexing="ij")
    ii, jj = ii.ravel(), jj.ravel()
    if w[0] == w[1]:
        keys = ii - jj
    else:
        keys = ii * w[0] - jj * w[1]
    order = np.lexsort((ii, keys))
    keys = keys[order]
    starts = np.flatnonzero(np.concatenate([[True], keys[1:] != keys[:-1]]))
    bounds = np.concatenate([starts, [len(keys)]])
    for s, e in zip(bounds[:-1], bounds[1:]):
        yield ii[order[s:e]], jj[order[s:e]]


def _push_at_nodes(cx: BifilteredComplex, sids, x1, x2, w):
    """Entry time of each simplex in sids on the diagonal through each node.

    Returns an (len(sids), len(x1)) array of min-over-grades of
    max_i(w_i * (g_i - x_i)); every subtraction anchors at the node, so
    values at different nodes share one rounding chain per grade.
    """
    off = cx.grades_off
    starts = off[sids]
    counts = off[sids + 1] - starts
    gather = np.repeat(starts, counts) + _ranges(counts)
    g = cx.grades_flat[gather]
    vals = np.maximum(w[0] * (g[:, 0][:, None] - x1[None, :]),
                      w[1] * (g[:, 1][:, None] - x2[None, :]))
    seg = np.concatenate([[0], np.cumsum(counts)])[:-1]
    return np.minimum.reduceat(vals, seg, axis=0)


def _ranges(counts):
    total = int(counts.sum())
    out = np.arange(total)
    out -= np.repeat(np.concatenate([[0], np.cumsum(counts)[:-1]]), counts)
    return out


def _bar_values_at_nodes(cx, barcode, x1, x2, w, k_max):
    """Depth profiles at nodes from a barcode's pairing, re-anchored per node."""
    out = np.zeros((k_max, len(x1)))
    nb = len(barcode)
    if nb == 0:
        return out
    births = barcode.birth_simplex
    deaths = barcode.death_simplex
    up = -_push_at_nodes(cx, births, x1, x2, w)
    finite = deaths >= 0
    down = np.full_like(up, np.inf)
    if finite.any():
        down[finite] = _push_at_nodes(cx, deaths[finite], x1, x2, w)
    tents = np.maximum(np.minimum(up, down), 0.0)
    kk = min(k_max, nb)
    if nb > kk:
        tents = -np.partition(-tents, kk - 1, axis=0)[:kk]
        tents.sort(axis=0)
        tents = tents[::-1]
    else:
        tents = -np.sort(-tents, axis=0)
    out[:kk] = tents[:kk]
    return out


def compute_landscape_grid(cx: BifilteredComplex, region: Region, resolution: float,
                           k_max: int, weight=(1.0, 1.0), hom_dim: int = 0,
                           threads: int = 1) -> LandscapeGrid:
    """Landscape grid via one barcode per weighted diagonal.

    The boundary reduction runs once per diagonal (the pairing of birth
    and death simplices is invariant along the line); every node then
    evaluates its tent values anchored at itself.  Node coordinates and
    grades are snapped to a common dyadic lattice (relative perturbation
    below 2**-26), which keeps the whole evaluation in exact arithmetic:
    the grid is bitwise identical to eval_point on the snapped complex
    and adjacent nodes obey the Lipschitz bound with no rounding slop.
    """
    if resolution <= 0:
        raise InputError("resolution must be > 0")
    if k_max < 1:
        raise InputError("k_max must be >= 1")
    w = validate_weight(weight)
    region, resolution, unit = quantize_lattice(region, resolution)
    cx = _quantize_grades(cx, unit)
    xs1 = _axis_nodes(region.x1_min, region.x1_max, resolution)
    xs2 = _axis_nodes(region.x2_min, region.x2_max, resolution)
    n1, n2 = len(xs1), len(xs2)
    values = np.zeros((k_max, n2, n1))

    groups = list(_diagonal_groups(n1, n2, w))

    def work(group):
        gi, gj = group
        base = (float(xs1[gi[0]]), float(xs2[gj[0]]))
        filt = push_to_line(cx, base, w)
        bc = compute_barcode(filt, hom_dim)
        return gi, gj, _bar_values_at_nodes(cx, bc, xs1[gi], xs2[gj], w, k_max)

    if threads <= 1:
        results = map(work, groups)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, groups))
    for gi, gj, prof in results:
        values[:, gj, gi] = prof
    return LandscapeGrid(region, float(resolution), int(k_max), w, int(hom_dim), values)


def rescale_bigrades(cx: BifilteredComplex, weight) -> BifilteredComplex:
    """Multiply every grade coordinatewise by the weight vector."""
    w = validate_weight(weight)
    out = BifilteredComplex._from_arrays(
        cx.n_vertices, cx.verts_flat, cx.verts_off,
        cx.grades_flat * np.array(w)[None, :], cx.grades_off)
    out._facets = dict(cx._facets)
    return out


def recover_rank_from_landscape(grid: LandscapeGrid, a, b) -> int:
    """Largest k with landscape(k, midpoint) >= half the side length.

    Valid for hypercube pairs a <= b (equal side lengths up to the grid
    resolution) whose midpoint lies in the grid region; may be off at
    points sharing a coordinate with a generator or relation grade.
    """
    a = (float(a[0]), float(a[1]))
    b = (float(b[0]), float(b[1]))
    if not (a[0] <= b[0] and a[1] <= b[1]):
        raise InputError("need a <= b")
    s1, s2 = b[0] - a[0], b[1] - a[1]
    if abs(s1 - s2) > grid.resolution:
        raise InputError(f"pair does not span a hypercube: sides {s1} vs {s2}")
    mid = ((a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0)
    if not grid.region.contains_point(mid, tol=1e-9):
        raise InputError(f"midpoint {mid} outside grid region")
    h = max(s1, s2) / 2.0
    best = 0
    for k in range(1, grid.k_max + 1):
        v = grid.value_at(k, mid)
        if v >= h and v > 0.0:
            best = k
        else:
            break
    return best


def lipschitz_excess(grid: LandscapeGrid) -> float:
    """Worst violation of the weighted 1-Lipschitz bound over adjacent nodes.

    Nonpositive iff every adjacent pair satisfies the bound; bounds use
    the actual node coordinate differences.
    """
    v = grid.values
    xs1, xs2 = grid.xs1, grid.xs2
    w1, w2 = grid.weight
    worst = -np.inf
    if v.shape[2] > 1:
        d = np.abs(np.diff(v, axis=2)) - w1 * np.diff(xs1)[None, None, :]
        worst = max(worst, float(d.max()))
    if v.shape[1] > 1:
        d = np.abs(np.diff(v, axis=1)) - w2 * np.diff(xs2)[None, :, None]
        worst = max(worst, float(d.max()))
    return worst


# ---------------------------------------------------------------------------
# file formats


def save_landscape_grid(grid: LandscapeGrid, out_dir, stem: str,
                        pgm: bool = False) -> list[str]:
    """Write <stem>.json plus one CSV matrix per k (rows x2-descending).

    Returns the list of files written, relative to out_dir.
    """
    import os

    os.makedirs(out_dir, exist_ok=True)
    written = []
    manifest = grid.meta()
    manifest["xs1"] = [float(x) for x in grid.xs1]
    manifest["xs2"] = [float(x) for x in grid.xs2]
    manifest["k_files"] = {str(k): f"{stem}_k{k}.csv" for k in range(1, grid.k_max + 1)}
    if pgm:
        manifest["pgm_files"] = {str(k): f"{stem}_k{k}.pgm" for k in range(1, grid.k_max + 1)}
    path = os.path.join(out_dir, f"{stem}.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=1)
        fh.write("\n")
    written.append(f"{stem}.json")

    for k in range(1, grid.k_max + 1):
        rows = grid.values[k - 1, ::-1, :]
        name = f"{stem}_k{k}.csv"
        with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="\n") as fh:
            for r in rows:
                fh.write(",".join(format(x, ".17g") for x in r))
                fh.write("\n")
        written.append(name)

    if pgm:
        vmax = float(grid.values.max())
        for k in range(1, grid.k_max + 1):
            name = f"{stem}_k{k}.pgm"
            img = grid.values[k - 1, ::-1, :]
            pix = (np.zeros_like(img, np.int64) if vmax == 0.0
                   else np.round(255.0 * img / vmax).astype(np.int64))
            with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="\n") as fh:
                fh.write(f"P2\n{img.shape[1]} {img.shape[0]}\n255\n")
                for r in pix:
                    fh.write(" ".join(str(int(x)) for x in r))
                    fh.write("\n")
            written.append(name)
    return written


def load_landscape_grid(json_path) -> LandscapeGrid:
    import os

    with open(json_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    region = Region(*manifest["region"])
    k_max = int(manifest["k_max"])
    base = os.path.dirname(json_path)
    planes = []
    for k in range(1, k_max + 1):
        name = manifest["k_files"][str(k)]
        with open(os.path.join(base, name), encoding="utf-8") as fh:
            rows = [[float(v) for v in line.split(",")] for line in fh if line.strip()]
        planes.append(np.array(rows)[::-1, :])
    values = np.stack(planes)
    return LandscapeGrid(region, float(manifest["resolution"]), k_max,
                         tuple(manifest["weight"]), int(manifest["hom_dim"]), values)
