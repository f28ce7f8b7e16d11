import math

import numpy as np
import pytest
from conftest import SQUARE, TRIANGLE, random_sets
from oracles import min_depth_lp

from hdd.approx2d import (
    ConsistencyError,
    Outcome,
    eliminate_halfplane,
    error_bound,
    median_approx,
)
from hdd.depth import depth_direct
from hdd.errors import NoIntersectionsError
from hdd.geometry import Flat1, PointSet, bounding_square, enumerate_family
from hdd.median import median_bruteforce, median_exact


def probe(base, direction):
    return Flat1(np.array(base, float), np.array(direction, float))


def fam(pts):
    return enumerate_family(PointSet(pts))


def box_holds_median(points, center, half, best):
    low, _ = min_depth_lp(points, center, half + 1e-9)
    return low <= best + 1e-9 * (1 + best)


class TestErrorBound:
    def test_examples(self):
        assert error_bound(1.0, 3) == pytest.approx(math.sqrt(2) / 16, rel=1e-15)
        assert error_bound(1.0, 3) == pytest.approx(0.08839, abs=1e-5)
        assert error_bound(0.0, 7) == 0.0
        assert error_bound(4.0, 6) == pytest.approx(0.0442, abs=1e-4)

    def test_halves_per_step(self):
        for m in range(12):
            assert error_bound(3.0, m + 1) == error_bound(3.0, m) / 2

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            error_bound(-1.0, 2)


class TestEliminateHalfplane:
    def test_square_off_center_probe(self):
        out = eliminate_halfplane(probe([0.3, 0.0], [0, 1]), fam(SQUARE))
        assert out.kind is Outcome.HALF_PLANE_RETAINED
        hp = out.retained
        assert abs(hp.point[0] - 0.3) <= 1e-15 and hp.normal.tolist() == [1.0, 0.0]
        assert hp.contains([0.5, 0.5]) and not hp.contains([0.2, 0.5])

    def test_square_center_probe(self):
        out = eliminate_halfplane(probe([0.5, 0.0], [0, 1]), fam(SQUARE))
        assert out.kind is Outcome.EXACT_MEDIAN_FOUND
        assert np.allclose(out.median_point, [0.5, 0.5], atol=1e-15)
        assert out.depth == pytest.approx(2.0, abs=1e-15)

    def test_parallel_probe(self):
        H = fam([[0, 0], [1, 1], [2, 2]])
        with pytest.raises(NoIntersectionsError):
            eliminate_halfplane(probe([0.0, 1.0], [1, 1]), H)

    def test_neighbour_rule_alone_is_not_a_certificate(self):
        # the line minimum on y=3 is (2,3), deeper than both its neighbours on
        # h_min, yet the median (1.75, 2.75) lies strictly below the probe
        pts = [[1, 2], [2, 3], [4, 0], [4, 2], [1, 3]]
        H = fam(pts)
        out = eliminate_halfplane(probe([0.0, 3.0], [1, 0]), H)
        w = out.witness
        assert np.allclose(w.i_min, [2, 3])
        assert w.i_min_depth == pytest.approx(6.410085037766459, rel=1e-12)
        assert w.i_u_depth > w.i_min_depth and w.i_d_depth > w.i_min_depth
        assert out.kind is Outcome.HALF_PLANE_RETAINED and w.reason == "descent"
        best = median_bruteforce(PointSet(pts))
        assert np.allclose(best.point, [1.75, 2.75])
        assert best.depth == pytest.approx(6.075714077781315, rel=1e-12)
        assert out.retained.contains(best.point) and out.retained.normal[1] < 0

    def test_missing_neighbour(self):
        pts = [[1, 3], [3, 0], [0, 1], [4, 2]]
        out = eliminate_halfplane(probe([0.0, 0.0], [1, 0]), fam(pts))
        assert out.kind is Outcome.HALF_PLANE_RETAINED
        best = median_bruteforce(PointSet(pts))
        assert np.allclose(best.point, [2, 1.5])
        assert out.retained.contains(best.point)

    def test_soundness(self, rng):
        retained = exact = 0
        for P in random_sets(70, 40, 2, 3, 12):
            H = enumerate_family(P)
            best = median_bruteforce(H)
            lo, hi = P.points.min(0), P.points.max(0)
            for _ in range(6):
                base = rng.uniform(lo, hi)
                u = rng.normal(size=2)
                out = eliminate_halfplane(probe(base, u / np.linalg.norm(u)), H)
                if out.kind is Outcome.EXACT_MEDIAN_FOUND:
                    exact += 1
                    assert abs(out.depth - best.depth) <= 1e-9 * (1 + best.depth)
                    continue
                retained += 1
                hp = out.retained
                # some minimizer lies in the retained closed half-plane
                assert any(hp.contains(t, 1e-9) for t in best.ties) or _halfplane_lp(
                    P.points, hp, best.depth
                )
        assert retained > 0

    def test_axis_probes_through_vertices(self):
        for P in random_sets(71, 30, 2, 3, 10):
            H = enumerate_family(P)
            best = median_bruteforce(H)
            for p in P.points:
                for d in ([1, 0], [0, 1]):
                    try:
                        out = eliminate_halfplane(probe(p, d), H)
                    except ConsistencyError:
                        pytest.fail("convexity violated")
                    if out.kind is Outcome.EXACT_MEDIAN_FOUND:
                        assert abs(out.depth - best.depth) <= 1e-9 * (1 + best.depth)
                    else:
                        hp = out.retained
                        assert any(hp.contains(t, 1e-9) for t in best.ties) or _halfplane_lp(
                            P.points, hp, best.depth
                        )


def _halfplane_lp(points, hp, best):
    # bounded stand-in for the half-plane: a large box on its inner side
    far = 1e3
    center = hp.point + hp.normal * far
    low, _ = min_depth_lp(points, center, far)
    return low <= best + 1e-9 * (1 + best)


class TestMedianApprox:
    def test_square_zero_steps(self):
        res = median_approx(PointSet(SQUARE), 0)
        assert res.point.tolist() == [0.5, 0.5]
        assert res.error_bound == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
        assert not res.exact

    def test_square_one_step_is_exact(self):
        x, bound, exact = median_approx(PointSet(SQUARE), 1)
        assert exact and bound == 0.0
        assert np.allclose(x, [0.5, 0.5], atol=1e-15)

    def test_triangle(self):
        res = median_approx(PointSet(TRIANGLE), 6)
        assert np.linalg.norm(res.point - [2, 1]) <= 4 * math.sqrt(2) / 2**7

    def test_collinear_input(self):
        # the first probe is vertical and coincides with the only line
        with pytest.raises(NoIntersectionsError):
            median_approx(PointSet([[0, 0], [0, 1], [0, 2]]), 2)
        # a slanted collinear set is crossed by the probe at zero depth
        res = median_approx(PointSet([[0, 0], [1, 1], [2, 2]]), 2)
        assert res.exact and res.depth == 0.0

    def test_squares_shrink(self):
        res = median_approx(PointSet([[0, 0], [3, 0.2], [1, 2.5], [2.2, 1.1], [0.3, 0.9]]), 5)
        half0 = res.trace[0].half_side
        for sq in res.trace:
            assert sq.half_side == half0 / 2**sq.steps_done

    def test_certified_error_and_containment(self):
        for P in random_sets(72, 30, 2, 3, 12):
            best = median_bruteforce(P)
            for m in range(1, 11):
                res = median_approx(P, m)
                if res.exact:
                    assert abs(res.depth - best.depth) <= 1e-9 * (1 + best.depth)
                    continue
                for sq in res.trace:
                    assert box_holds_median(P.points, sq.center, sq.half_side, best.depth)
                # nearest minimizer inside the final square
                last = res.trace[-1]
                low, x_star = min_depth_lp(P.points, last.center, last.half_side)
                assert low <= best.depth + 1e-9 * (1 + best.depth)
                assert np.linalg.norm(res.point - x_star) <= res.error_bound + 1e-12
                if len(best.ties) == 1:
                    assert np.linalg.norm(res.point - best.point) <= res.error_bound + 1e-12

    def test_family_input_needs_square(self):
        H = fam(SQUARE)
        with pytest.raises(ValueError):
            median_approx(H, 2)
        res = median_approx(H, 2, square=bounding_square(PointSet(SQUARE)))
        assert res.exact


def test_exact_medians_agree_with_exact_solver():
    for P in random_sets(73, 20, 2, 3, 10):
        res = median_approx(P, 10)
        if res.exact:
            assert res.depth == pytest.approx(median_exact(P).depth, rel=1e-9, abs=1e-12)
            assert res.depth == pytest.approx(depth_direct(res.point, enumerate_family(P)), rel=1e-12)
