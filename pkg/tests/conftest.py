import numpy as np
import pytest

from mplands import BifilteredComplex, Simplex, build_closure_bicomplex, build_function_rips


def hollow_triangle_complex(vertex_grade=(0.0, 0.0), edge_grade=(1.0, 1.0)):
    """Three vertices, three edges, no 2-cell: one essential H1 class."""
    simplices = [Simplex((v,), (vertex_grade,)) for v in range(3)]
    simplices += [Simplex(e, (edge_grade,)) for e in ((0, 1), (0, 2), (1, 2))]
    return BifilteredComplex(3, simplices)


def filled_triangle_complex(vertex_grade=(0.0, 0.0), edge_grade=(1.0, 1.0),
                            tri_grade=(2.0, 2.0)):
    simplices = [Simplex((v,), (vertex_grade,)) for v in range(3)]
    simplices += [Simplex(e, (edge_grade,)) for e in ((0, 1), (0, 2), (1, 2))]
    simplices.append(Simplex((0, 1, 2), (tri_grade,)))
    return BifilteredComplex(3, simplices)


def rect_module_complex(rects):
    """Complex whose H1 module is the direct sum of the given rectangles.

    Each rectangle [a, b) becomes a hollow triangle entering at a whose
    2-cell enters on the antichain {(b1, a2), (a1, b2)}: the cycle dies
    as soon as either coordinate passes b.
    """
    simplices = []
    n = 0
    for a1, a2, b1, b2 in np.asarray(rects, np.float64).reshape(-1, 4):
        vs = (n, n + 1, n + 2)
        simplices += [Simplex((v,), ((a1, a2),)) for v in vs]
        simplices += [Simplex(e, ((a1, a2),))
                      for e in ((vs[0], vs[1]), (vs[0], vs[2]), (vs[1], vs[2]))]
        simplices.append(Simplex(vs, ((b1, a2), (a1, b2))))
        n += 3
    return BifilteredComplex(n, simplices)


def random_small_complex(rng):
    """A random bifiltered complex with at most a dozen simplices."""
    if rng.random() < 0.5:
        pts = rng.uniform(0.0, 2.0, (4, 2))
        d = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))
        d = np.minimum(d, d.T)
        np.fill_diagonal(d, 0.0)
        vals = rng.uniform(0.0, 1.0, 4)
        scale = float(np.median(d[np.triu_indices(4, 1)]))
        return build_function_rips(d, vals, max_scale=scale, max_dim=2)
    n_tri = rng.integers(1, 3)
    tris, grades = [], []
    pool = [(0, 1, 2), (1, 2, 3), (0, 2, 3)]
    for t in range(n_tri):
        tris.append(pool[t])
        grades.append(tuple(np.round(rng.uniform(0.0, 2.0, 2), 2)))
    used = sorted({v for t in tris for v in t})
    remap = {v: i for i, v in enumerate(used)}
    tris = [tuple(sorted(remap[v] for v in t)) for t in tris]
    return build_closure_bicomplex(tris, grades, n_vertices=len(used))


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)
