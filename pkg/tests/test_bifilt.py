import numpy as np
import pytest

from mplands import (
    BifilteredComplex,
    GridFunction,
    InputError,
    Simplex,
    build_closure_bicomplex,
    build_function_rips,
    minimal_elements,
    push_to_line,
    snap_up_to_grid,
    translate_grades,
    validate_monotone,
    validate_weight,
)

from conftest import hollow_triangle_complex, random_small_complex


def three_points_unit():
    d = np.ones((3, 3)) - np.eye(3)
    return d


class TestFunctionRips:
    def test_unit_triangle_counts_and_grades(self):
        cx = build_function_rips(three_points_unit(), [0.0, 0.0, 0.0],
                                 max_scale=1.0, max_dim=2)
        assert len(cx) == 7
        for i in range(len(cx)):
            if cx.dims[i] == 1:
                assert cx.simplex_grades(i) == ((1.0, 0.0),)
            if cx.dims[i] == 2:
                assert cx.simplex_grades(i) == ((1.0, 0.0),)

    def test_vertex_function_max(self):
        cx = build_function_rips(three_points_unit(), [0.0, 1.0, 2.0],
                                 max_scale=1.0, max_dim=2)
        idx = {cx.simplex_vertices(i): i for i in range(len(cx))}
        assert cx.simplex_grades(idx[(1, 2)]) == ((1.0, 2.0),)

    def test_scale_threshold_excludes_edge(self):
        d = np.array([[0.0, 5.0], [5.0, 0.0]])
        cx = build_function_rips(d, [0.0, 0.0], max_scale=1.0, max_dim=2)
        assert len(cx) == 2
        assert cx.max_dim == 0

    def test_input_validation(self):
        d = np.array([[0.0, 1.0], [2.0, 0.0]])
        with pytest.raises(InputError):
            build_function_rips(d, [0.0, 0.0], 1.0, 1)
        nan = np.array([[0.0, np.nan], [np.nan, 0.0]])
        with pytest.raises(InputError):
            build_function_rips(nan, [0.0, 0.0], 1.0, 1)
        with pytest.raises(InputError):
            build_function_rips(three_points_unit(), [0.0, 0.0, 0.0], 1.0, -1)

    def test_three_skeleton_on_tetrahedron(self):
        d = np.ones((4, 4)) - np.eye(4)
        cx = build_function_rips(d, np.zeros(4), max_scale=1.0, max_dim=3)
        # 4 vertices + 6 edges + 4 triangles + 1 tetrahedron
        assert len(cx) == 15
        assert validate_monotone(cx).ok


class TestClosureBicomplex:
    def test_shared_edge_antichain(self):
        cx = build_closure_bicomplex([(0, 1, 2), (1, 2, 3)], [(1.0, 1.0), (2.0, 0.0)])
        idx = {cx.simplex_vertices(i): i for i in range(len(cx))}
        assert set(cx.simplex_grades(idx[(1, 2)])) == {(1.0, 1.0), (2.0, 0.0)}
        assert validate_monotone(cx).ok

    def test_single_triangle_propagates_grade(self):
        cx = build_closure_bicomplex([(0, 1, 2)], [(3.0, 7.0)])
        for i in range(len(cx)):
            assert cx.simplex_grades(i) == ((3.0, 7.0),)

    def test_dominated_grade_dropped(self):
        cx = build_closure_bicomplex([(0, 1, 2), (1, 2, 3)], [(1.0, 1.0), (2.0, 2.0)])
        idx = {cx.simplex_vertices(i): i for i in range(len(cx))}
        assert cx.simplex_grades(idx[(1, 2)]) == ((1.0, 1.0),)

    def test_orphan_vertex_rejected(self):
        with pytest.raises(InputError):
            build_closure_bicomplex([(0, 1, 2)], [(1.0, 1.0)], n_vertices=5)


class TestValidateMonotone:
    def test_construction_is_monotone(self, rng):
        for _ in range(10):
            assert validate_monotone(random_small_complex(rng)).ok

    def test_detects_violation(self):
        simplices = [Simplex((0,), ((3.0, 3.0),)), Simplex((1,), ((0.0, 0.0),)),
                     Simplex((0, 1), ((2.0, 2.0),))]
        report = validate_monotone(BifilteredComplex(2, simplices))
        assert not report.ok
        assert report.violations == ((0, 2),)

    def test_empty_complex_ok(self):
        assert validate_monotone(BifilteredComplex(0, [])).ok


class TestPushToLine:
    def test_single_grade_max(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((3.0, 1.0),))])
        f = push_to_line(cx, (0.0, 0.0), (1.0, 1.0))
        assert f.times[0] == 3.0

    def test_antichain_min_of_max(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((3.0, 1.0), (1.0, 3.0)))])
        f = push_to_line(cx, (0.0, 0.0), (1.0, 1.0))
        assert f.times[0] == 3.0

    def test_weighted_push(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((3.0, 1.0),))])
        f = push_to_line(cx, (0.0, 0.0), (1.0, 0.5))
        assert f.times[0] == 3.0

    def test_rejects_bad_weight(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((0.0, 0.0),))])
        with pytest.raises(InputError):
            push_to_line(cx, (0.0, 0.0), (0.5, 0.5))
        with pytest.raises(InputError):
            push_to_line(cx, (0.0, 0.0), (1.0, -1.0))

    def test_translation_covariance(self, rng):
        cx = random_small_complex(rng)
        base = (0.25, -0.5)
        delta = 0.75
        f0 = push_to_line(cx, base, (1.0, 1.0))
        f1 = push_to_line(cx, (base[0] + delta, base[1] + delta), (1.0, 1.0))
        assert np.allclose(f0.times - delta, f1.times, atol=1e-12)

    def test_antichain_push_equals_min_over_grades(self, rng):
        for _ in range(20):
            grades = minimal_elements(
                (round(rng.uniform(0, 4), 2), round(rng.uniform(0, 4), 2))
                for _ in range(3))
            cx = BifilteredComplex(1, [Simplex((0,), grades)])
            base = tuple(rng.uniform(-1, 1, 2))
            w = (1.0, float(round(rng.uniform(0.2, 1.0), 2)))
            t = push_to_line(cx, base, w).times[0]
            singles = [push_to_line(BifilteredComplex(1, [Simplex((0,), (g,))]),
                                    base, w).times[0] for g in grades]
            assert t == min(singles)

    def test_one_critical_entry_matches_grade_order(self):
        cx = hollow_triangle_complex()
        p = (0.5, 0.5)
        f = push_to_line(cx, p, (1.0, 1.0))
        for i in range(len(cx)):
            g = cx.simplex_grades(i)[0]
            for t in (0.0, 0.3, 0.6):
                entered = f.times[i] <= t
                dominated = g[0] <= p[0] + t and g[1] <= p[1] + t
                assert entered == dominated

    def test_face_times_dominate(self, rng):
        cx = random_small_complex(rng)
        f = push_to_line(cx, (0.1, 0.2), (1.0, 0.75))
        for d in range(1, cx.max_dim + 1):
            ids = cx.dim_ids(d)
            lower = cx.dim_ids(d - 1)
            fac = cx.facets_local(d)
            assert np.all(f.times[lower[fac]] <= f.times[ids][:, None])


class TestGridSnap:
    def test_size_is_max_gap(self):
        g = GridFunction(np.array([0.0, 0.5, 1.5]), np.array([0.0, 0.25, 0.5]))
        assert g.size == 1.0

    def test_snap_rounds_up(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((0.3, 0.6),))])
        g = GridFunction(np.arange(0.0, 2.1, 0.5), np.arange(0.0, 2.1, 0.5))
        snapped = snap_up_to_grid(cx, g)
        assert snapped.simplex_grades(0) == ((0.5, 1.0),)

    def test_snap_reminimalizes_antichain(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((0.1, 0.9), (0.4, 0.6)))])
        g = GridFunction(np.array([0.0, 0.5, 1.0]), np.array([0.0, 0.5, 1.0]))
        snapped = snap_up_to_grid(cx, g)
        assert snapped.simplex_grades(0) == ((0.5, 1.0),)

    def test_snap_out_of_range_rejected(self):
        cx = BifilteredComplex(1, [Simplex((0,), ((5.0, 0.0),))])
        g = GridFunction(np.array([0.0, 1.0]), np.array([0.0, 1.0]))
        with pytest.raises(InputError):
            snap_up_to_grid(cx, g)


def test_translate_grades():
    cx = hollow_triangle_complex()
    shifted = translate_grades(cx, (0.5, 0.25))
    assert shifted.simplex_grades(0) == ((0.5, 0.25),)
    assert shifted.simplex_grades(3) == ((1.5, 1.25),)


def test_validate_weight():
    assert validate_weight((1.0, 0.5)) == (1.0, 0.5)
    assert validate_weight((0.25, 1)) == (0.25, 1.0)
    for bad in ((2.0, 1.0), (0.9, 0.9), (1.0, 0.0), (1.0,)):
        with pytest.raises(InputError):
            validate_weight(bad)


def test_minimal_elements():
    assert minimal_elements([(1.0, 1.0), (2.0, 0.0)]) == ((1.0, 1.0), (2.0, 0.0))
    assert minimal_elements([(1.0, 1.0), (2.0, 2.0)]) == ((1.0, 1.0),)
    assert minimal_elements([(1.0, 1.0), (1.0, 1.0)]) == ((1.0, 1.0),)


def test_simplex_validation():
    with pytest.raises(InputError):
        Simplex((1, 0), ((0.0, 0.0),))
    with pytest.raises(InputError):
        Simplex((0, 1), ())
    with pytest.raises(InputError):
        Simplex((0,), ((0.0, 0.0), (1.0, 1.0)))
    with pytest.raises(InputError):
        Simplex((0,), ((np.inf, 0.0),))
