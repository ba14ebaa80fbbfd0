"""Barcodes of slice filtrations and a rank-invariant oracle.

``compute_barcode`` runs standard persistent homology over GF(2) on a
pushed slice filtration, reducing one boundary matrix per homology
dimension with the clearing optimization (the pass in dimension d+1
marks its pivot rows, which are skipped as known cycles in the pass for
dimension d).

``brute_force_rank`` is an independent oracle: it computes the rank of
the map H(X_a) -> H(X_b) directly by GF(2) elimination on cycle and
boundary spaces, without ever ordering simplices or pairing them.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .bifilt import BifilteredComplex, SliceFiltration
from .errors import InputError

# cumulative per-process counters; reset with reset_perf()
PERF = {"reductions": 0, "column_adds": 0, "seconds": 0.0}
_PERF_LOCK = threading.Lock()
_TLS = threading.local()


def reset_perf() -> None:
    with _PERF_LOCK:
        PERF.update(reductions=0, column_adds=0, seconds=0.0)


@dataclass(frozen=True)
class Bar:
    birth: float
    death: float
    dim: int


@dataclass(frozen=True)
class Barcode:
    """Finite and essential bars of one homology dimension on a slice.

    birth_simplex / death_simplex hold the global ids of the paired
    simplices (death -1 for essential classes); the pairing is a
    property of the whole line, so bars can be re-anchored at any base
    point on it.
    """

    births: np.ndarray
    deaths: np.ndarray
    hom_dim: int
    base_point: tuple[float, float] | None = None
    weight: tuple[float, float] | None = None
    birth_simplex: np.ndarray | None = None
    death_simplex: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.births)

    @property
    def bars(self) -> list[Bar]:
        return [Bar(float(b), float(d), self.hom_dim)
                for b, d in zip(self.births, self.deaths)]


def _workspace(n_cols: int, words: int) -> np.ndarray:
    """Per-thread reusable reduction buffer (at least n_cols x words)."""
    buf = getattr(_TLS, "buf", None)
    if buf is None or buf.shape[0] < n_cols or buf.shape[1] < words:
        buf = np.empty((max(n_cols, 256), max(words, 4)), np.uint64)
        _TLS.buf = buf
    return buf


def _reduce_dim(times, ids_cols, ids_rows, facets, cleared):
    """Reduce the boundary matrix of one dimension block.

    Returns (low, owner, row_order, col_order) where `low[c]` is the
    pivot row rank of column c (-1 when the reduced column is zero) and
    `owner[r]` the column owning pivot row r (-1 when free).
    """
    n_cols, n_rows = len(ids_cols), len(ids_rows)
    row_order = np.lexsort((ids_rows, times[ids_rows]))
    row_rank = np.empty(n_rows, np.int64)
    row_rank[row_order] = np.arange(n_rows)
    col_order = np.lexsort((ids_cols, times[ids_cols]))

    words = max((n_rows + 63) >> 6, 1)
    R = _workspace(n_cols, words)
    low = np.empty(n_cols, np.int64)
    owner = np.full(n_rows, -1, np.int64)
    t0 = time.perf_counter()
    n_adds = _kernels.reduce_columns(R, facets, col_order, n_rows, row_rank,
                                     cleared, low, owner)
    dt = time.perf_counter() - t0
    with _PERF_LOCK:
        PERF["reductions"] += 1
        PERF["column_adds"] += int(n_adds)
        PERF["seconds"] += dt
    return low, owner, row_order, row_rank


def compute_barcode(filtration: SliceFiltration, hom_dim: int) -> Barcode:
    """Persistent homology of the slice in one dimension, GF(2) coefficients.

    Simplices are ordered by (entry time, dimension, index); bars with
    zero persistence are dropped; essential classes get death = inf.
    """
    if hom_dim < 0:
        raise InputError("hom_dim must be >= 0")
    cx = filtration.complex
    times = np.asarray(filtration.times, np.float64)
    d = hom_dim

    ids_d = cx.dim_ids(d)
    if len(ids_d) == 0:
        return Barcode(np.empty(0), np.empty(0), d, filtration.base_point,
                       filtration.weight, np.empty(0, np.int64), np.empty(0, np.int64))
    _check_time_monotone(cx, times, (d, d + 1))

    # pass in dimension d+1: deaths of d-cycles; its pivot rows are cleared below
    ids_up = cx.dim_ids(d + 1)
    paired_death = np.full(len(ids_d), np.inf)
    killer = np.full(len(ids_d), -1, np.int64)
    cleared_d = np.zeros(len(ids_d), np.bool_)
    if len(ids_up):
        fac_up = cx.facets_local(d + 1)
        low_up, _, row_order_d, row_rank_d = _reduce_dim(
            times, ids_up, ids_d, fac_up, np.zeros(len(ids_up), np.bool_))
        for c in range(len(ids_up)):
            l = low_up[c]
            if l >= 0:
                r = row_order_d[l]
                paired_death[r] = times[ids_up[c]]
                killer[r] = ids_up[c]
                cleared_d[r] = True

    # pass in dimension d: which d-simplices create cycles
    if d == 0:
        positive = np.ones(len(ids_d), np.bool_)
    else:
        ids_down = cx.dim_ids(d - 1)
        fac_d = cx.facets_local(d)
        low_d, _, _, _ = _reduce_dim(times, ids_d, ids_down, fac_d, cleared_d)
        positive = cleared_d | (low_d < 0)

    births = times[ids_d[positive]]
    deaths = paired_death[positive]
    birth_sid = ids_d[positive]
    death_sid = killer[positive]
    keep = births < deaths
    births, deaths = births[keep], deaths[keep]
    birth_sid, death_sid = birth_sid[keep], death_sid[keep]
    order = np.lexsort((deaths, births))
    return Barcode(births[order], deaths[order], d,
                   filtration.base_point, filtration.weight,
                   birth_sid[order], death_sid[order])


def _check_time_monotone(cx: BifilteredComplex, times, dims) -> None:
    for d in dims:
        ids = cx.dim_ids(d)
        if d == 0 or len(ids) == 0:
            continue
        lower = cx.dim_ids(d - 1)
        fac = cx.facets_local(d)
        if np.any(times[lower[fac]] > times[ids][:, None]):
            raise InputError("entry time of a face exceeds a coface time")


def barcode_to_csv(barcode: Barcode) -> str:
    """CSV export: dim,birth,death with `inf` for essential classes."""
    lines = ["dim,birth,death"]
    for b, dth in zip(barcode.births, barcode.deaths):
        dtxt = "inf" if np.isinf(dth) else format(float(dth), ".17g")
        lines.append(f"{barcode.hom_dim},{format(float(b), '.17g')},{dtxt}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# independent rank oracle


def _gf2_rank(rows: list[int]) -> int:
    rank = 0
    pivots: list[int] = []
    for r in rows:
        for p in pivots:
            r = min(r, r ^ p)
        if r:
            pivots.append(r)
            pivots.sort(reverse=True)
            rank += 1
    return rank


def _present_mask(cx: BifilteredComplex, p) -> np.ndarray:
    g = cx.grades_flat
    ok = (g[:, 0] <= p[0]) & (g[:, 1] <= p[1])
    out = np.zeros(len(cx), np.bool_)
    off = cx.grades_off
    for i in range(len(cx)):
        out[i] = ok[off[i]:off[i + 1]].any()
    return out


def _boundary_bitmask(cx: BifilteredComplex, gid: int, index) -> int:
    vs = cx.simplex_vertices(gid)
    m = 0
    for f in range(len(vs)):
        face = vs[:f] + vs[f + 1:]
        m ^= 1 << index[face]
    return m


def brute_force_rank(cx: BifilteredComplex, a, b, hom_dim: int) -> int:
    """Rank of H(X_a) -> H(X_b) by direct GF(2) elimination.

    X_p contains the simplices having some grade <= p.  The rank equals
    dim(Z_a / (Z_a ∩ B_b)) = rank(Z_a ∪ gens B_b) - rank(gens B_b),
    computed on explicit cycle and boundary generators.  Intended for
    small complexes; independent of the reduction pipeline.
    """
    a = (float(a[0]), float(a[1]))
    b = (float(b[0]), float(b[1]))
    if not (a[0] <= b[0] and a[1] <= b[1]):
        raise InputError(f"need a <= b coordinatewise, got {a}, {b}")
    if hom_dim < 0:
        raise InputError("hom_dim must be >= 0")

    present_a = _present_mask(cx, a)
    present_b = _present_mask(cx, b)
    index = {cx.simplex_vertices(i): i for i in range(len(cx))}
    k = hom_dim

    ids_k_a = [i for i in np.flatnonzero(cx.dims == k) if present_a[i]]
    if not ids_k_a:
        return 0

    # cycle basis of X_a: reduce the boundary of k-chains, tracking combinations
    cycles: list[int] = []
    pivots: dict[int, tuple[int, int]] = {}  # low bit -> (reduced column, combo)
    for ci, gid in enumerate(ids_k_a):
        col = _boundary_bitmask(cx, int(gid), index) if k > 0 else 0
        combo = 1 << ci
        while col:
            low = col.bit_length() - 1
            if low not in pivots:
                pivots[low] = (col, combo)
                combo = 0
                break
            pc, pk = pivots[low]
            col ^= pc
            combo ^= pk
        if combo:
            # combo is a cycle in coordinates of ids_k_a; lift to global k-ids
            z = 0
            for j, gj in enumerate(ids_k_a):
                if (combo >> j) & 1:
                    z |= 1 << int(gj)
            cycles.append(z)

    bnd: list[int] = []
    for gid in np.flatnonzero(cx.dims == k + 1):
        if present_b[gid]:
            bnd.append(_boundary_bitmask(cx, int(gid), index))

    return _gf2_rank(cycles + bnd) - _gf2_rank(bnd)
