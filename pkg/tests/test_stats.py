import math

import numpy as np
import pytest

from mplands import (
    FunctionalSpec,
    InputError,
    Region,
    confidence_interval,
    functional_integral,
    mean_landscape,
    permutation_test,
    q_distance,
    rect_landscape_grid,
    shift_rects,
    two_sample_t,
    vectorize,
)
from mplands.grid import LandscapeGrid
from mplands.stats import export_features_csv


def const_grid(value, region=Region(0.0, 1.0, 0.0, 1.0), eps=0.25, k_max=1):
    g = rect_landscape_grid([], region, eps, k_max)
    return LandscapeGrid(g.region, g.resolution, g.k_max, g.weight, g.hom_dim,
                         np.full_like(g.values, value))


def bisection_z(alpha, iters=200):
    """Oracle: inverse standard normal CDF by bisection on erf."""
    target = 1.0 - alpha / 2.0
    lo, hi = 0.0, 10.0
    for _ in range(iters):
        mid = (lo + hi) / 2
        if 0.5 * (1.0 + math.erf(mid / math.sqrt(2.0))) < target:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


class TestMeanLandscape:
    def test_mean_of_single(self, rng):
        g = rect_landscape_grid([(0.0, 0.0, 2.0, 2.0)], Region(0.0, 2.0, 0.0, 2.0),
                                0.5, 2)
        m = mean_landscape([g])
        assert np.array_equal(m.values, g.values)

    def test_mean_with_zero_grid(self):
        g = rect_landscape_grid([(0.0, 0.0, 2.0, 2.0)], Region(0.0, 2.0, 0.0, 2.0),
                                0.5, 2)
        z = rect_landscape_grid([], Region(0.0, 2.0, 0.0, 2.0), 0.5, 2)
        m = mean_landscape([g, z])
        assert np.array_equal(m.values, g.values / 2.0)

    def test_mean_of_copies_exact(self):
        g = rect_landscape_grid([(0.0, 0.0, 2.0, 2.0)], Region(0.0, 2.0, 0.0, 2.0),
                                0.5, 2)
        m = mean_landscape([g] * 5)
        assert np.array_equal(m.values, g.values)

    def test_layout_mismatch_rejected(self):
        g1 = rect_landscape_grid([], Region(0.0, 2.0, 0.0, 2.0), 0.5, 2)
        g2 = rect_landscape_grid([], Region(0.0, 2.0, 0.0, 2.0), 0.25, 2)
        with pytest.raises(InputError):
            mean_landscape([g1, g2])


class TestQDistance:
    def test_identical_grids(self):
        g = rect_landscape_grid([(0.0, 0.0, 2.0, 2.0)], Region(0.0, 2.0, 0.0, 2.0),
                                0.5, 2)
        assert q_distance(g, g, 2.0) == 0.0
        assert q_distance(g, g, np.inf) == 0.0

    def test_constant_difference_unit_region(self):
        # unit-area region: both the sup and the L2 Riemann sum give c
        g0 = const_grid(0.0)
        c = 0.75
        gc = const_grid(c)
        assert q_distance(g0, gc, np.inf) == c
        # nodes at spacing 0.25 on [0,1]^2: 25 nodes x cell 1/16
        assert q_distance(g0, gc, 2.0) == pytest.approx(c * math.sqrt(25 / 16), rel=1e-12)

    def test_shift_stability_instance(self):
        rects = [(0.0, 0.0, 3.0, 3.0)]
        region = Region(-1.0, 5.0, -1.0, 5.0)
        g0 = rect_landscape_grid(rects, region, 0.125, 2)
        g1 = rect_landscape_grid(shift_rects(rects, (0.25, 0.0)), region, 0.125, 2)
        assert q_distance(g0, g1, np.inf) <= 0.25 + 1e-12

    def test_pseudometric_properties(self, rng):
        region = Region(0.0, 4.0, 0.0, 4.0)

        def rand_grid():
            n = int(rng.integers(0, 4))
            rects = [(a, b, a + w, b + h) for a, b, w, h in
                     zip(rng.uniform(0, 3, n), rng.uniform(0, 3, n),
                         rng.uniform(0.2, 1, n), rng.uniform(0.2, 1, n))]
            return rect_landscape_grid(rects, region, 0.25, 2)

        for q in (1.0, 2.0, np.inf):
            for _ in range(10):
                a, b, c = rand_grid(), rand_grid(), rand_grid()
                dab, dba = q_distance(a, b, q), q_distance(b, a, q)
                assert dab == dba
                assert q_distance(a, a, q) == 0.0
                assert dab <= q_distance(a, c, q) + q_distance(c, b, q) + 1e-12

    def test_q_below_one_rejected(self):
        g = const_grid(0.0)
        with pytest.raises(InputError):
            q_distance(g, g, 0.5)


class TestFunctionalIntegral:
    def test_zero_grid(self):
        g = const_grid(0.0)
        assert functional_integral(g, FunctionalSpec(1, Region(0.0, 1.0, 0.0, 1.0))) == 0.0

    def test_constant_plane_aligned_box(self):
        g = const_grid(2.0, region=Region(0.0, 2.0, 0.0, 2.0), eps=0.25)
        # box [0,1]x[0,1]: 5x5 nodes, node weight 1/16
        got = functional_integral(g, FunctionalSpec(1, Region(0.0, 1.0, 0.0, 1.0)))
        assert got == pytest.approx(2.0 * 25 / 16, rel=1e-12)

    def test_functional_bounded_by_sup_distance(self, rng):
        region = Region(0.0, 2.0, 0.0, 2.0)
        box = Region(0.25, 1.75, 0.25, 1.75)
        spec = FunctionalSpec(1, box)
        for _ in range(10):
            r1 = [(0.0, 0.0, rng.uniform(0.5, 2), rng.uniform(0.5, 2))]
            r2 = [(0.0, 0.0, rng.uniform(0.5, 2), rng.uniform(0.5, 2))]
            g1 = rect_landscape_grid(r1, region, 0.25, 1)
            g2 = rect_landscape_grid(r2, region, 0.25, 1)
            lhs = abs(functional_integral(g1, spec) - functional_integral(g2, spec))
            # node-count x cell area overestimates the box area slightly
            nodes_area = 49 * 0.25 ** 2
            assert lhs <= nodes_area * q_distance(g1, g2, np.inf) + 1e-12

    def test_box_outside_region_rejected(self):
        g = const_grid(1.0)
        with pytest.raises(InputError):
            functional_integral(g, FunctionalSpec(1, Region(0.0, 2.0, 0.0, 1.0)))
        with pytest.raises(InputError):
            functional_integral(g, FunctionalSpec(2, Region(0.0, 1.0, 0.0, 1.0)))


class TestConfidenceInterval:
    def test_constant_values(self):
        lo, hi = confidence_interval([3.0, 3.0, 3.0], 0.05)
        assert lo == hi == 3.0

    def test_alpha_001_quantile(self):
        # z for alpha=0.01 from an erf bisection oracle
        z = bisection_z(0.01)
        assert z == pytest.approx(2.5758, abs=2e-4)
        vals = [0.0, 1.0, 2.0, 3.0]
        lo, hi = confidence_interval(vals, 0.01)
        s = np.std(vals, ddof=1)
        assert hi - lo == pytest.approx(2 * z * s / 2.0, rel=1e-6)

    def test_monte_carlo_coverage(self):
        rng = np.random.default_rng(4242)
        n, reps, covered = 30, 2000, 0
        for _ in range(reps):
            sample = rng.normal(0.0, 1.0, n)
            lo, hi = confidence_interval(sample, 0.05)
            covered += lo <= 0.0 <= hi
        assert abs(covered / reps - 0.95) <= 0.02

    def test_input_validation(self):
        with pytest.raises(InputError):
            confidence_interval([1.0], 0.05)
        with pytest.raises(InputError):
            confidence_interval([1.0, 2.0], 1.5)


class TestTwoSampleT:
    def test_identical_nonconstant_groups(self):
        vals = [0.1, 0.2, 0.3, 0.4]
        assert two_sample_t(vals, vals) == 1.0

    def test_separated_groups(self):
        a = [0.40, 0.44, 0.47, 0.41]
        b = [0.006, 0.007, 0.008, 0.005]
        p = two_sample_t(a, b)
        assert p < 0.001
        # permutation cross-check: 4+4 values admit only 70 splits, and the
        # observed one is the most extreme, so the floor is about 2/70
        assert permutation_test(a, b, 10000, seed=5) < 0.05

    def test_zero_variance_equal_means(self):
        assert two_sample_t([2.0, 2.0], [2.0, 2.0]) == 1.0

    def test_welch_formula_hand_computed(self):
        a, b = [1.0, 2.0, 3.0], [2.0, 4.0, 6.0]
        va, vb = np.var(a, ddof=1), np.var(b, ddof=1)
        t = (np.mean(a) - np.mean(b)) / math.sqrt(va / 3 + vb / 3)
        from scipy import stats as sps

        df = (va / 3 + vb / 3) ** 2 / ((va / 3) ** 2 / 2 + (vb / 3) ** 2 / 2)
        want = 2 * sps.t.sf(abs(t), df)
        assert two_sample_t(a, b) == pytest.approx(want, rel=1e-12)


class TestPermutationTest:
    def test_identical_groups_p_near_one(self):
        vals = [0.1, 0.5, 0.9, 0.2]
        assert permutation_test(vals, vals, 500, seed=1) > 0.5

    def test_disjoint_ranges(self):
        a = [0.0, 0.1, 0.2, 0.3, 0.4]
        b = [10.0, 10.1, 10.2, 10.3, 10.4]
        assert permutation_test(a, b, 10000, seed=2) <= 0.01

    def test_seed_determinism(self):
        a, b = [0.1, 0.4, 0.3], [0.2, 0.6, 0.5]
        p1 = permutation_test(a, b, 1000, seed=7)
        p2 = permutation_test(a, b, 1000, seed=7)
        assert p1 == p2

    def test_min_permutations_enforced(self):
        with pytest.raises(InputError):
            permutation_test([1.0, 2.0], [3.0, 4.0], 10, seed=0)


class TestVectorize:
    def test_flatten_order(self):
        g = const_grid(0.0, region=Region(0.0, 1.0, 0.0, 1.0), eps=1.0)
        vals = np.array([[[1.0, 2.0], [3.0, 4.0]]])
        g = LandscapeGrid(g.region, g.resolution, 1, g.weight, g.hom_dim, vals)
        assert vectorize(g).tolist() == [1.0, 2.0, 3.0, 4.0]

    def test_zero_grid_length(self):
        g = rect_landscape_grid([], Region(0.0, 2.0, 0.0, 1.0), 0.5, 3)
        assert vectorize(g).shape == (3 * 3 * 5,)
        assert np.all(vectorize(g) == 0.0)

    def test_linear_in_mean(self):
        g1 = rect_landscape_grid([(0.0, 0.0, 2.0, 1.0)], Region(0.0, 2.0, 0.0, 1.0),
                                 0.5, 2)
        g2 = rect_landscape_grid([(0.5, 0.0, 1.5, 1.0)], Region(0.0, 2.0, 0.0, 1.0),
                                 0.5, 2)
        m = mean_landscape([g1, g2])
        assert np.array_equal(vectorize(m), (vectorize(g1) + vectorize(g2)) / 2.0)


class TestEmpiricalSLLN:
    def test_mean_landscape_converges(self):
        # distance between the n-mean and 2n-mean shrinks with n on average
        region = Region(0.0, 4.0, 0.0, 4.0)

        def sample_grid(rng):
            a1, a2 = rng.uniform(0.5, 1.5, 2)
            w, h = rng.uniform(1.0, 2.0, 2)
            return rect_landscape_grid([(a1, a2, a1 + w, a2 + h)], region, 0.25, 1)

        gaps = []
        for n in (10, 20, 40):
            vals = []
            for seed in range(5):
                rng = np.random.default_rng(1000 + seed)
                grids = [sample_grid(rng) for _ in range(2 * n)]
                m1 = mean_landscape(grids[:n])
                m2 = mean_landscape(grids)
                vals.append(q_distance(m1, m2, np.inf))
            gaps.append(np.mean(vals))
        assert gaps[0] > gaps[1] > gaps[2]


def test_export_features_csv(tmp_path):
    g1 = rect_landscape_grid([(0.0, 0.0, 2.0, 1.0)], Region(0.0, 2.0, 0.0, 1.0), 0.5, 2)
    g2 = rect_landscape_grid([], Region(0.0, 2.0, 0.0, 1.0), 0.5, 2)
    path = tmp_path / "features.csv"
    export_features_csv(path, [g1, g2], labels=["a", "b"])
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# grid_meta_hash=")
    header = lines[1].split(",")
    assert header[0] == "label" and len(header) == 1 + g1.values.size
    assert lines[2].split(",")[0] == "a"
    assert len(lines) == 4
