"""
Test suite for subdivision box coverings:
- dyadic splitting and half-open box membership
- sample-descend-select steps
- coverings of known Pareto sets
"""

import pytest
import sys
import os
import numpy as np
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from nsmoo.core.errors import ParetoSetLostError, PreconditionError
from nsmoo.problems.catalog import make_paraboloid, make_sphere, paraboloid_solution, segment_distance
from nsmoo.solvers.subdivision import Box, BoxCovering, cover, select, subdivide


def closed_contains(box: Box, point: np.ndarray) -> bool:
    return bool(np.all(box.lower - 1e-12 <= point) and np.all(point <= box.upper + 1e-12))


class TestBoxes:
    """Splitting and membership"""

    @classmethod
    def setup_class(cls):
        print("\n=== TESTING BOXES ===")

    def test_split_square(self):
        left, right = Box([0.0, 0.0], [1.0, 1.0]).split()
        np.testing.assert_allclose(left.upper, [0.5, 1.0])
        np.testing.assert_allclose(right.lower, [0.5, 0.0])
        assert left.depth == right.depth == 1

    def test_split_longest_edge(self):
        left, right = Box([0.0, 0.0], [1.0, 2.0]).split()
        np.testing.assert_allclose(left.upper, [1.0, 1.0])
        np.testing.assert_allclose(right.lower, [0.0, 1.0])

    def test_four_subdivisions_give_congruent_cells(self):
        domain = Box([0.0, 0.0], [1.0, 1.0])
        cov = BoxCovering.from_domain(domain)
        for _ in range(4):
            cov = subdivide(cov)
        assert len(cov.boxes) == 16
        assert cov.depth == 4
        for box in cov.boxes:
            np.testing.assert_allclose(box.upper - box.lower, [0.25, 0.25])
        assert cov.volume() == pytest.approx(1.0)
        print("✓ 16 congruent cells")

    def test_half_open_membership(self):
        domain = Box([0.0, 0.0], [1.0, 1.0])
        cov = subdivide(BoxCovering.from_domain(domain))
        # the shared face belongs to the upper box only
        assert cov.locate(np.array([[0.5, 0.3]])).tolist() == [False, True]
        # the domain's upper boundary stays covered
        assert cov.locate(np.array([[1.0, 1.0]])).tolist() == [False, True]
        assert not cov.contains([1.5, 0.5])

    def test_rejects_inverted_box(self):
        with pytest.raises(PreconditionError):
            Box([1.0, 0.0], [0.0, 1.0])

    def test_dict_round_trip(self):
        cov = subdivide(BoxCovering.from_domain(Box([-1.0, -1.0], [1.0, 1.0])))
        restored = BoxCovering.from_dict(cov.to_dict())
        assert restored.depth == cov.depth
        assert [b.to_dict() for b in restored.boxes] == [b.to_dict() for b in cov.boxes]


class TestSelection:
    """select and cover"""

    @classmethod
    def setup_class(cls):
        print("\n=== TESTING SUBDIVISION ===")
        cls.paraboloid = make_paraboloid([0.0, 0.0], [1.0, 0.5])
        cls.segment = paraboloid_solution([0.0, 0.0], [1.0, 0.5])

    def test_select_rejects_zero_steps(self):
        cov = subdivide(BoxCovering.from_domain(Box([-2.0, -2.0], [2.0, 2.0])))
        with pytest.raises(PreconditionError):
            select(cov, self.paraboloid, steps=0)

    def test_cover_rejects_depth_zero(self):
        with pytest.raises(PreconditionError):
            cover(self.paraboloid, Box([-2.0, -2.0], [2.0, 2.0]), 0)

    def test_depth_one_equals_one_selection(self):
        domain = Box([-2.0, -2.0], [2.0, 2.0])
        direct = select(subdivide(BoxCovering.from_domain(domain, 4)), self.paraboloid, steps=3, seed=5)
        covered = cover(self.paraboloid, domain, 1, seed=5, samples_per_box=4, steps=3)
        assert covered.to_dict() == direct.to_dict()

    def test_cover_is_deterministic(self):
        domain = Box([-2.0, -2.0], [2.0, 2.0])
        first = cover(self.paraboloid, domain, 5, seed=1, samples_per_box=5, steps=5)
        second = cover(self.paraboloid, domain, 5, seed=1, samples_per_box=5, steps=5)
        assert first.to_dict() == second.to_dict()

    def test_workers_do_not_change_the_result(self):
        domain = Box([-2.0, -2.0], [2.0, 2.0])
        serial = cover(self.paraboloid, domain, 4, seed=2, samples_per_box=5, steps=5, workers=1)
        threaded = cover(self.paraboloid, domain, 4, seed=2, samples_per_box=5, steps=5, workers=3)
        assert serial.to_dict() == threaded.to_dict()

    def test_volume_is_non_increasing(self):
        domain = Box([-2.0, -2.0], [2.0, 2.0])
        cov = BoxCovering.from_domain(domain, 5)
        volumes = [cov.volume()]
        for _ in range(6):
            cov = select(subdivide(cov), self.paraboloid, steps=5, seed=0)
            volumes.append(cov.volume())
        assert all(b <= a + 1e-12 for a, b in zip(volumes, volumes[1:]))
        assert len(cov.history) == 6
        assert cov.history[-1] == len(cov.boxes)

    def test_boxes_hug_the_segment(self):
        """Every start in this domain is within reach of the descent budget"""
        domain = Box([-0.25, -0.25], [1.25, 0.75])
        cov = cover(self.paraboloid, domain, 8, seed=0, steps=10)
        a, b = np.array([0.0, 0.0]), np.array([1.0, 0.5])
        u = np.linspace(0.0, 1.0, 11)
        for box in cov.boxes:
            grid = [box.lower + np.array([s, t]) * (box.upper - box.lower) for s in u for t in u]
            gap = min(segment_distance(p, a, b) for p in grid)
            assert gap <= box.diagonal, f"box {box.to_dict()} is {gap:.3f} away"
        print(f"✓ {len(cov.boxes)} boxes near the segment")

    def test_sphere_collapses_to_center(self):
        center = np.array([0.3, -0.2])
        cov = cover(make_sphere(center), Box([-1.0, -1.0], [1.0, 1.0]), 6, seed=0)
        assert 1 <= len(cov.boxes) <= 2
        assert any(closed_contains(box, center) for box in cov.boxes)
        for box in cov.boxes:
            assert np.linalg.norm(0.5 * (box.lower + box.upper) - center) <= box.diagonal

    def test_lost_pareto_set(self):
        """All samples leave a domain far from the minimizer"""
        problem = make_sphere([5.0, 5.0])
        with pytest.raises(ParetoSetLostError) as info:
            cover(problem, Box([0.0, 0.0], [0.1, 0.1]), 2, steps=10)
        assert info.value.depth == 1
        assert "Pareto set lost at depth 1" in str(info.value)

    @pytest.mark.slow
    def test_paraboloid_depth_twelve(self):
        """No segment point is lost and the covering is small"""
        domain = Box([-2.0, -2.0], [2.0, 2.0])
        cov = cover(self.paraboloid, domain, 12, seed=0, samples_per_box=10, steps=10)
        c2 = np.array([1.0, 0.5])
        for t in np.linspace(0.0, 1.0, 1001):
            point = t * c2
            assert any(closed_contains(box, point) for box in cov.boxes), f"lost {point}"
        assert cov.volume() <= 0.05 * domain.volume
        print(f"✓ depth 12: {len(cov.boxes)} boxes, volume {cov.volume():.4f}")
