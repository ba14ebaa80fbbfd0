"""Two-parameter filtered simplicial complexes.

A bifiltered complex assigns each simplex an antichain of minimal entry
bigrades (x1, x2).  Most constructions are one-critical (a single grade
per simplex); closure bicomplexes built from graded triangulations are
the multi-critical case.  The central operation is pushing a complex
onto a weighted diagonal line, which turns it into an ordinary
1-parameter filtration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError

Bigrade = tuple[float, float]


def validate_weight(weight) -> tuple[float, float]:
    """Check that a weight vector has positive entries and max-norm 1."""
    w = tuple(float(v) for v in weight)
    if len(w) != 2:
        raise InputError(f"weight must have 2 components, got {len(w)}")
    if not all(v > 0.0 and np.isfinite(v) for v in w):
        raise InputError(f"weight components must be positive finite, got {w}")
    if max(w) != 1.0:
        raise InputError(f"weight must be normalized to max-norm 1, got {w}")
    return w


def minimal_elements(grades: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    """Minimal elements of a finite set of bigrades under coordinatewise order."""
    pts = sorted(set((float(a), float(b)) for a, b in grades))
    keep = []
    for p in pts:
        if not any(q[0] <= p[0] and q[1] <= p[1] and q != p for q in pts):
            keep.append(p)
    return tuple(keep)


@dataclass(frozen=True)
class Simplex:
    """A simplex with its antichain of minimal entry bigrades."""

    vertices: tuple[int, ...]
    grades: tuple[tuple[float, float], ...]

    def __post_init__(self):
        v = self.vertices
        if not v or any(v[i] >= v[i + 1] for i in range(len(v) - 1)):
            raise InputError(f"vertices must be strictly increasing, got {v}")
        if not self.grades:
            raise InputError("simplex needs at least one grade")
        for g in self.grades:
            if len(g) != 2 or not all(np.isfinite(c) for c in g):
                raise InputError(f"bad bigrade {g}")
        for i, g in enumerate(self.grades):
            for j, h in enumerate(self.grades):
                if i != j and g[0] <= h[0] and g[1] <= h[1]:
                    raise InputError(f"grades of {v} are not an antichain: {g} vs {h}")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


class BifilteredComplex:
    """A face-closed, monotone two-parameter filtered complex.

    Stored internally as flat arrays (vertex lists, grade lists, facet
    index tables) so that pushing onto many diagonal slices stays cheap.
    Instances are immutable after construction; all operations on them
    are pure functions.
    """

    def __init__(self, n_vertices: int, simplices: Sequence[Simplex]):
        arrays = _arrays_from_simplices(n_vertices, simplices)
        self._init_from_arrays(*arrays, check_faces=True)

    @classmethod
    def _from_arrays(cls, n_vertices, verts_flat, verts_off, grades_flat, grades_off,
                     check_faces=False):
        self = cls.__new__(cls)
        self._init_from_arrays(n_vertices, verts_flat, verts_off, grades_flat, grades_off,
                               check_faces=check_faces)
        return self

    def _init_from_arrays(self, n_vertices, verts_flat, verts_off, grades_flat, grades_off,
                          check_faces):
        self.n_vertices = int(n_vertices)
        self.verts_flat = np.asarray(verts_flat, np.int64)
        self.verts_off = np.asarray(verts_off, np.int64)
        self.grades_flat = np.asarray(grades_flat, np.float64).reshape(-1, 2)
        self.grades_off = np.asarray(grades_off, np.int64)
        self.dims = np.diff(self.verts_off).astype(np.int64) - 1
        self._dim_ids: dict[int, np.ndarray] = {}
        self._facets: dict[int, np.ndarray] = {}
        self._simplex_index: dict[tuple[int, ...], int] | None = None
        if not np.all(np.isfinite(self.grades_flat)):
            raise InputError("bigrades must be finite")
        if check_faces:
            self._check_face_closure()

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def max_dim(self) -> int:
        return int(self.dims.max()) if len(self.dims) else -1

    def simplex_vertices(self, i: int) -> tuple[int, ...]:
        return tuple(self.verts_flat[self.verts_off[i]:self.verts_off[i + 1]])

    def simplex_grades(self, i: int) -> tuple[tuple[float, float], ...]:
        g = self.grades_flat[self.grades_off[i]:self.grades_off[i + 1]]
        return tuple((float(a), float(b)) for a, b in g)

    @property
    def simplices(self) -> list[Simplex]:
        return [Simplex(self.simplex_vertices(i), self.simplex_grades(i))
                for i in range(len(self))]

    def _index(self) -> dict[tuple[int, ...], int]:
        if self._simplex_index is None:
            self._simplex_index = {self.simplex_vertices(i): i for i in range(len(self))}
        return self._simplex_index

    def dim_ids(self, d: int) -> np.ndarray:
        """Global simplex ids of dimension d, in input order."""
        if d not in self._dim_ids:
            self._dim_ids[d] = np.flatnonzero(self.dims == d)
        return self._dim_ids[d]

    def facets_local(self, d: int) -> np.ndarray:
        """(n_d, d+1) array: facets of each d-simplex as local (d-1)-simplex indices."""
        if d in self._facets:
            return self._facets[d]
        ids = self.dim_ids(d)
        lower = self.dim_ids(d - 1)
        local = {int(g): i for i, g in enumerate(lower)}
        index = self._index()
        out = np.empty((len(ids), d + 1), np.int64)
        for r, gid in enumerate(ids):
            vs = self.simplex_vertices(int(gid))
            for f in range(d + 1):
                face = vs[:f] + vs[f + 1:]
                gi = index.get(face)
                if gi is None:
                    raise InputError(f"complex not face-closed: missing face {face} of {vs}")
                out[r, f] = local[gi]
        self._facets[d] = out
        return out

    def _set_facets(self, d: int, table: np.ndarray):
        self._facets[d] = np.asarray(table, np.int64)

    def _check_face_closure(self):
        for d in range(1, self.max_dim + 1):
            self.facets_local(d)


def _arrays_from_simplices(n_vertices, simplices):
    verts_flat, verts_off = [], [0]
    grades_flat, grades_off = [], [0]
    for s in simplices:
        if s.vertices[-1] >= n_vertices or s.vertices[0] < 0:
            raise InputError(f"vertex id out of range in {s.vertices}")
        verts_flat.extend(s.vertices)
        verts_off.append(len(verts_flat))
        grades_flat.extend(s.grades)
        grades_off.append(len(grades_flat))
    return (n_vertices, np.array(verts_flat, np.int64), np.array(verts_off, np.int64),
            np.array(grades_flat, np.float64).reshape(-1, 2), np.array(grades_off, np.int64))


@dataclass(frozen=True)
class MonotoneReport:
    """Result of a monotonicity validation: empty violations means ok."""

    violations: tuple[tuple[int, int], ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_monotone(complex: BifilteredComplex) -> MonotoneReport:
    """Check that every coface grade dominates some grade of each facet.

    Returns a report listing (face id, coface id) pairs that violate
    monotonicity.  Checking facets suffices: the relation is transitive
    along the face lattice.
    """
    bad = []
    for d in range(1, complex.max_dim + 1):
        ids = complex.dim_ids(d)
        lower = complex.dim_ids(d - 1)
        fac = complex.facets_local(d)
        for r, gid in enumerate(ids):
            cg = complex.simplex_grades(int(gid))
            for f in fac[r]:
                fid = int(lower[f])
                fg = complex.simplex_grades(fid)
                for g in cg:
                    if not any(h[0] <= g[0] and h[1] <= g[1] for h in fg):
                        bad.append((fid, int(gid)))
                        break
    return MonotoneReport(tuple(bad))


def build_function_rips(distances, vertex_values, max_scale: float,
                        max_dim: int) -> BifilteredComplex:
    """Vietoris-Rips in the first parameter, a vertex function in the second.

    Each simplex gets the single grade (diameter, max vertex value); only
    simplices with diameter <= max_scale and dimension <= max_dim are kept.

    Parameters
    ----------
    distances : (n, n) array
        Symmetric matrix of nonnegative distances with zero diagonal.
    vertex_values : (n,) array
        Second filtration value per vertex (colour, codensity, ...).
    max_scale : float
        Diameter truncation for the Rips parameter.
    max_dim : int
        Largest simplex dimension to include.
    """
    D = np.asarray(distances, np.float64)
    f = np.asarray(vertex_values, np.float64)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InputError(f"distance matrix must be square, got shape {D.shape}")
    n = D.shape[0]
    if not np.all(np.isfinite(D)) or not np.all(np.isfinite(f)):
        raise InputError("distances and vertex values must be finite")
    if np.any(D != D.T):
        raise InputError("distance matrix must be symmetric")
    if np.any(np.diag(D) != 0.0):
        raise InputError("distance matrix must have zero diagonal")
    if f.shape != (n,):
        raise InputError(f"vertex_values must have length {n}, got {f.shape}")
    if max_dim < 0:
        raise InputError("max_dim must be >= 0")

    vert_lists = [np.arange(n, dtype=np.int64).reshape(-1, 1)]
    grade_list = [np.stack([np.zeros(n), f], axis=1)]

    edge_rank = np.full((n, n), -1, np.int64)
    n_edges = 0
    iu = ju = None
    if max_dim >= 1 and n >= 2:
        iu, ju = np.triu_indices(n, 1)
        ed = D[iu, ju]
        keep = ed <= max_scale
        iu, ju, ed = iu[keep], ju[keep], ed[keep]
        n_edges = len(ed)
        edge_rank[iu, ju] = np.arange(n_edges)
        edge_rank[ju, iu] = np.arange(n_edges)
        vert_lists.append(np.stack([iu, ju], 1))
        grade_list.append(np.stack([ed, np.maximum(f[iu], f[ju])], 1))

    t_idx = None
    if max_dim >= 2 and n_edges:
        rows = []
        cols = np.arange(n)
        for a in range(n):
            da = D[a]
            for b in range(a + 1, n):
                if D[a, b] > max_scale:
                    continue
                cs = cols[b + 1:]
                dm = np.maximum(D[a, b], np.maximum(da[b + 1:], D[b, b + 1:]))
                ok = dm <= max_scale
                if ok.any():
                    sel = cs[ok]
                    rows.append(np.stack([np.full(len(sel), a), np.full(len(sel), b),
                                          sel, dm[ok]], 1))
        if rows:
            tri = np.concatenate(rows)
            t_idx = tri[:, :3].astype(np.int64)
            vert_lists.append(t_idx)
            tf = np.maximum(f[t_idx[:, 0]], np.maximum(f[t_idx[:, 1]], f[t_idx[:, 2]]))
            grade_list.append(np.stack([tri[:, 3], tf], 1))

    if max_dim >= 3:
        # high-dimensional skeleta only appear on small inputs
        prev = [tuple(int(v) for v in t) for t in (t_idx if t_idx is not None else [])]
        for d in range(3, max_dim + 1):
            cur = []
            for s in prev:
                for c in range(s[-1] + 1, n):
                    cand = s + (c,)
                    sub = np.array(cand)
                    if D[np.ix_(sub, sub)].max() <= max_scale:
                        cur.append(cand)
            cur.sort()
            if not cur:
                break
            arr = np.array(cur, np.int64)
            vert_lists.append(arr)
            dm = np.array([D[np.ix_(s, s)].max() for s in arr])
            grade_list.append(np.stack([dm, f[arr].max(axis=1)], 1))
            prev = cur

    counts = np.concatenate([np.full(len(v), v.shape[1], np.int64) for v in vert_lists])
    verts_off = np.concatenate([[0], np.cumsum(counts)])
    verts_flat = np.concatenate([v.ravel() for v in vert_lists])
    grades_flat = np.concatenate(grade_list)
    grades_off = np.arange(len(verts_off), dtype=np.int64)

    cx = BifilteredComplex._from_arrays(n, verts_flat, verts_off, grades_flat, grades_off)
    # facet tables come for free from the rank arrays
    if n_edges:
        cx._set_facets(1, np.stack([iu, ju], 1))
    if t_idx is not None:
        cx._set_facets(2, np.stack([
            edge_rank[t_idx[:, 0], t_idx[:, 1]],
            edge_rank[t_idx[:, 0], t_idx[:, 2]],
            edge_rank[t_idx[:, 1], t_idx[:, 2]],
        ], 1))
    return cx


def build_closure_bicomplex(triangulation, triangle_grades,
                            n_vertices: int | None = None) -> BifilteredComplex:
    """Simplicial closure of graded 2-simplices.

    Each triangle carries its given bigrade; every face receives the
    antichain of minimal elements of its cofaces' grades.  Every vertex
    and edge must belong to at least one triangle, otherwise its entry
    grade would be undefined.
    """
    tris = [tuple(sorted(int(v) for v in t)) for t in triangulation]
    grades = [(float(a), float(b)) for a, b in triangle_grades]
    if len(tris) != len(grades):
        raise InputError("one grade per triangle required")
    for t in tris:
        if len(set(t)) != 3:
            raise InputError(f"degenerate triangle {t}")
    if n_vertices is None:
        n_vertices = max(v for t in tris for v in t) + 1 if tris else 0

    covered = set(v for t in tris for v in t)
    orphan = [v for v in range(n_vertices) if v not in covered]
    if orphan:
        raise InputError(f"orphan vertices with undefined entry grade: {orphan[:10]}")

    face_grades: dict[tuple[int, ...], list[tuple[float, float]]] = {}
    for t, g in zip(tris, grades):
        a, b, c = t
        for face in ((a,), (b,), (c,), (a, b), (a, c), (b, c)):
            face_grades.setdefault(face, []).append(g)

    simplices = []
    for face in sorted(face_grades, key=lambda f: (len(f), f)):
        simplices.append(Simplex(face, minimal_elements(face_grades[face])))
    tri_order = sorted(range(len(tris)), key=lambda i: tris[i])
    for i in tri_order:
        simplices.append(Simplex(tris[i], (grades[i],)))
    return BifilteredComplex(n_vertices, simplices)


@dataclass(frozen=True)
class SliceFiltration:
    """A complex pushed onto the weighted diagonal through a base point.

    The diagonal is parametrized so that position at time t is
    ``base_point + t * (1/w1, 1/w2)``; the entry time of a simplex is the
    smallest t at which one of its grades is dominated.
    """

    complex: BifilteredComplex
    base_point: tuple[float, float]
    weight: tuple[float, float]
    times: np.ndarray = field(repr=False)

    @property
    def entries(self) -> list[tuple[int, float]]:
        return [(i, float(t)) for i, t in enumerate(self.times)]


def push_to_line(complex: BifilteredComplex, base_point,
                 weight=(1.0, 1.0)) -> SliceFiltration:
    """Entry times of all simplices on the weighted diagonal through base_point.

    t(simplex) = min over its grades g of max_i w_i * (g_i - p_i).
    """
    w1, w2 = validate_weight(weight)
    p1, p2 = float(base_point[0]), float(base_point[1])
    g = complex.grades_flat
    vals = np.maximum(w1 * (g[:, 0] - p1), w2 * (g[:, 1] - p2))
    times = np.minimum.reduceat(vals, complex.grades_off[:-1]) if len(g) else np.empty(0)
    return SliceFiltration(complex, (p1, p2), (w1, w2), times)


def translate_grades(complex: BifilteredComplex, v) -> BifilteredComplex:
    """Shift every grade of the complex by the vector v."""
    v = np.asarray(v, np.float64)
    out = BifilteredComplex._from_arrays(
        complex.n_vertices, complex.verts_flat, complex.verts_off,
        complex.grades_flat + v[None, :], complex.grades_off)
    out._facets = dict(complex._facets)
    return out


@dataclass(frozen=True)
class GridFunction:
    """Strictly increasing grid values per axis, used for discretization."""

    axis1: np.ndarray
    axis2: np.ndarray

    def __post_init__(self):
        for ax in (self.axis1, self.axis2):
            a = np.asarray(ax, np.float64)
            if a.ndim != 1 or len(a) < 2 or np.any(np.diff(a) <= 0):
                raise InputError("grid axes must be strictly increasing with >= 2 values")

    @property
    def size(self) -> float:
        """Largest gap between consecutive grid values over both axes."""
        return float(max(np.diff(self.axis1).max(), np.diff(self.axis2).max()))


def snap_up_to_grid(complex: BifilteredComplex, grid: GridFunction) -> BifilteredComplex:
    """Round every grade coordinate up to the next grid value.

    Snapped antichains are re-minimalized (distinct grades can collapse).
    The grid must cover the range of the grades on both axes.
    """
    axes = (np.asarray(grid.axis1, np.float64), np.asarray(grid.axis2, np.float64))
    g = complex.grades_flat
    snapped = np.empty_like(g)
    for c in (0, 1):
        idx = np.searchsorted(axes[c], g[:, c], side="left")
        if np.any(idx >= len(axes[c])) or np.any(g[:, c] < axes[c][0]):
            raise InputError("grid does not cover the grade range")
        snapped[:, c] = axes[c][idx]

    off = complex.grades_off
    new_flat, new_off = [], [0]
    for i in range(len(complex)):
        ac = minimal_elements(map(tuple, snapped[off[i]:off[i + 1]]))
        new_flat.extend(ac)
        new_off.append(len(new_flat))
    out = BifilteredComplex._from_arrays(
        complex.n_vertices, complex.verts_flat, complex.verts_off,
        np.array(new_flat, np.float64).reshape(-1, 2), np.array(new_off, np.int64))
    out._facets = dict(complex._facets)
    return out
