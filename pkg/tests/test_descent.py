"""
Test suite for the non-smooth descent method:
- direction computation and bundle enrichment
- Armijo-type line search
- full runs to Pareto criticality on smooth and non-smooth problems
"""

import pytest
import sys
import os
import numpy as np
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from nsmoo.core.errors import EnrichmentError, PreconditionError
from nsmoo.core.problem import MopProblem, Objective, SimplexWeights, evaluate
from nsmoo.problems.catalog import (abs_biobjective_solution, make_abs_biobjective, make_paraboloid,
                                    paraboloid_solution)
from nsmoo.solvers.descent import (DescentConfig, Termination, compute_direction, find_enriching_subgradient,
                                   line_search, solve)
from nsmoo.solvers.minnorm import HullQpResult, min_norm_point


def one_dimensional_pair() -> MopProblem:
    """f(x) = (x^2, (x - 2)^2) on R"""
    return MopProblem(name="pair_1d", n=1, objectives=[
        Objective(lambda x: float(x[0] ** 2), lambda x: np.array([2.0 * x[0]])),
        Objective(lambda x: float((x[0] - 2.0) ** 2), lambda x: np.array([2.0 * (x[0] - 2.0)])),
    ])


def single(value_fn, subgrad_fn, smooth=True) -> MopProblem:
    return MopProblem(name="single", n=1, objectives=[Objective(value_fn, subgrad_fn, smooth=smooth)])


class TestDirection:
    """compute_direction and find_enriching_subgradient"""

    @classmethod
    def setup_class(cls):
        print("\n=== TESTING DESCENT DIRECTIONS ===")
        cls.paraboloid = make_paraboloid([0.0, 0.0], [1.0, 0.5])
        cls.abs_pair = make_abs_biobjective(2.0)
        cls.cfg = DescentConfig()

    def test_direction_off_the_pareto_set(self):
        cert = compute_direction(self.paraboloid, [2.0, 1.0], 0.1, self.cfg)
        np.testing.assert_allclose(cert.direction, [-2.0, -1.0], atol=1e-12)
        assert cert.residual == pytest.approx(np.sqrt(5.0))
        assert cert.accepted
        assert cert.enrichments == 0

    def test_critical_point_of_one_dimensional_pair(self):
        cert = compute_direction(one_dimensional_pair(), [1.0], 0.01, self.cfg)
        assert cert.residual <= 1e-12
        assert cert.is_critical(self.cfg.tol_crit)

    def test_direction_on_abs_pair(self):
        cert = compute_direction(self.abs_pair, [1.0, 1.0], 0.1, self.cfg)
        assert cert.direction[1] < 0.0
        assert abs(cert.direction[0]) <= 1e-12
        fx = evaluate(self.abs_pair, [1.0, 1.0])
        f_trial = evaluate(self.abs_pair, np.array([1.0, 1.0]) + (0.1 / cert.residual) * cert.direction)
        assert np.all(f_trial <= fx - self.cfg.c * 0.1 * cert.residual)

    def test_epsilon_must_be_positive(self):
        with pytest.raises(PreconditionError):
            compute_direction(self.paraboloid, [2.0, 1.0], 0.0, self.cfg)

    def test_enriching_subgradient_abs(self):
        problem = single(lambda x: abs(float(x[0])), lambda x: np.sign(x), smooth=False)
        xi = find_enriching_subgradient(problem, [1.0], np.array([-2.0]), 0, 4.0, 0.5)
        np.testing.assert_allclose(xi, [-1.0])
        print("✓ Enriching subgradient found across the kink")

    def test_enriching_subgradient_quartic(self):
        problem = single(lambda x: float(x[0] ** 4), lambda x: 4.0 * x ** 3)
        v = np.array([-4.0])
        xi = find_enriching_subgradient(problem, [1.0], v, 0, 8.0, 0.5)
        assert float(xi @ v) > -0.5 * 16.0

    def test_enriching_subgradient_rejects_zero_direction(self):
        problem = single(lambda x: float(x[0] ** 2), lambda x: 2.0 * x)
        with pytest.raises(PreconditionError):
            find_enriching_subgradient(problem, [1.0], np.array([0.0]), 0, 0.1, 0.25)


    def test_default_stop_is_acceptance_or_criticality(self):
        """Without stop_residual a returned direction is accepted or critical"""
        cert = compute_direction(self.paraboloid, [0.5, 0.3], 0.1, self.cfg)
        assert cert.accepted or cert.residual <= self.cfg.tol_crit

    def test_stop_residual_returns_early(self):
        cert = compute_direction(self.paraboloid, [0.5, 0.3], 0.1, self.cfg, stop_residual=0.1)
        assert not cert.accepted
        assert cert.residual == pytest.approx(np.sqrt(0.008))
        assert cert.enrichments == 0

    def test_direction_is_bundle_combination(self):
        cert = compute_direction(self.abs_pair, [0.02, 0.001], 0.1, self.cfg)
        combined = np.array(cert.bundle_vectors).T @ cert.bundle_weights.weights
        np.testing.assert_allclose(cert.direction, -combined, atol=1e-10)
        assert len(cert.bundle_vectors) == 2 + cert.enrichments

    def test_residual_history_non_increasing(self):
        cert = compute_direction(self.abs_pair, [0.02, 0.001], 0.1, self.cfg)
        history = cert.residual_history
        assert len(history) == cert.enrichments + 1
        assert history[-1] == pytest.approx(cert.residual)
        assert all(b <= a for a, b in zip(history[:-1], history[1:]))

    def test_smooth_consistency_at_small_epsilon(self):
        """At epsilon 1e-6 the direction is minus the min-norm element of the gradients"""
        rng = np.random.default_rng(5)
        for x in rng.uniform(-2.0, 2.0, size=(10, 2)):
            cert = compute_direction(self.paraboloid, x, 1e-6, self.cfg)
            gradients = self.paraboloid.subgradients(x)
            expected = -min_norm_point(gradients).point
            np.testing.assert_allclose(cert.direction, expected, atol=1e-4)

    def test_stalled_enrichment_is_reported(self, monkeypatch):
        def shortest_generator(generators):
            P = np.atleast_2d(np.asarray(generators, dtype=float))
            i = int(np.argmin(np.sum(P * P, axis=1)))
            weights = np.zeros(P.shape[0])
            weights[i] = 1.0
            return HullQpResult(point=P[i].copy(), weights=SimplexWeights(weights), iterations=1)

        monkeypatch.setattr("nsmoo.solvers.descent.min_norm_point", shortest_generator)
        with pytest.raises(EnrichmentError) as excinfo:
            compute_direction(self.paraboloid, [0.5, 0.3], 0.1, self.cfg)
        assert excinfo.value.stalled
        assert len(excinfo.value.bundle) == 3

class TestLineSearch:
    """Backtracking from t = epsilon / ||v||"""

    def test_initial_step_accepted(self):
        t = line_search(one_dimensional_pair(), [3.0], np.array([-2.0]), 0.01, DescentConfig())
        assert t == pytest.approx(0.005)

    def test_backtracking_reduces_step(self):
        problem = single(lambda x: float(x[0] ** 2), lambda x: 2.0 * x)
        # t0 = 1 overshoots to x = -1; one halving lands on 0
        t = line_search(problem, [1.0], np.array([-2.0]), 2.0, DescentConfig())
        assert t == pytest.approx(0.5)

    def test_rejects_zero_direction(self):
        with pytest.raises(PreconditionError):
            line_search(one_dimensional_pair(), [3.0], np.array([0.0]), 0.01)


class TestSolve:
    """Full descent runs"""

    @classmethod
    def setup_class(cls):
        print("\n=== TESTING DESCENT RUNS ===")
        cls.paraboloid = make_paraboloid([0.0, 0.0], [1.0, 0.5])
        cls.segment = paraboloid_solution([0.0, 0.0], [1.0, 0.5])
        cls.abs_pair = make_abs_biobjective(2.0)
        cls.abs_set = abs_biobjective_solution(2.0)

    def test_paraboloid_from_far_start(self):
        trace = solve(self.paraboloid, [-1.0, 2.0])
        assert trace.termination == Termination.CRITICAL
        assert self.segment.distance(trace.final_x) <= 1e-3
        assert trace.certificate.residual <= 1e-6
        assert trace.certificate.epsilon <= 1e-6
        print(f"✓ Converged in {trace.accepted_steps} steps to {trace.final_x}")

    def test_abs_pair_from_far_start(self):
        trace = solve(self.abs_pair, [3.0, 1.0])
        assert not trace.termination.is_failure
        assert self.abs_set.distance(trace.final_x) <= 1e-3

    def test_critical_start_takes_no_steps(self):
        trace = solve(self.paraboloid, [0.5, 0.25])
        assert trace.termination == Termination.CRITICAL
        assert trace.accepted_steps == 0
        np.testing.assert_allclose(trace.final_x, [0.5, 0.25])

    def test_single_outer_iteration_is_a_budget_stop(self):
        trace = solve(self.paraboloid, [-1.0, 2.0], DescentConfig(max_outer=1))
        assert trace.termination == Termination.MAX_ITERATIONS
        assert trace.accepted_steps == 1
        assert not trace.termination.is_failure

    def test_step_limit(self):
        trace = solve(self.paraboloid, [-1.0, 2.0], max_steps=3)
        assert trace.termination == Termination.STEP_LIMIT
        assert trace.accepted_steps == 3

    def test_trace_frame_columns(self):
        frame = solve(self.paraboloid, [-1.0, 2.0], max_steps=2).to_frame()
        assert list(frame.columns) == ["iter", "x_1", "x_2", "f_1", "f_2", "eps", "residual", "step"]
        assert len(frame) == 3

    def test_paraboloid_random_starts(self):
        """Twenty uniform starts in [-2, 2]^2 all reach the segment"""
        rng = np.random.default_rng(42)
        for x0 in rng.uniform(-2.0, 2.0, size=(20, 2)):
            trace = solve(self.paraboloid, x0)
            assert trace.termination == Termination.CRITICAL, f"start {x0}"
            assert self.segment.distance(trace.final_x) <= 1e-3, f"start {x0}"
        print("✓ 20 random starts converged")

    def test_abs_pair_random_starts_descend_monotonically(self):
        """Every accepted step decreases both objectives by at least c t ||v||^2"""
        rng = np.random.default_rng(3)
        cfg = DescentConfig()
        starts = np.column_stack([rng.uniform(-1.0, 3.0, 20), rng.uniform(-1.0, 1.0, 20)])
        for x0 in starts:
            trace = solve(self.abs_pair, x0, cfg)
            assert self.abs_set.distance(trace.final_x) <= 1e-3, f"start {x0}"
            for before, after in zip(trace.iterates[:-1], trace.iterates[1:]):
                required = cfg.c * before.step_length * before.residual ** 2
                assert np.all(after.f <= before.f - required + 1e-12)
                assert np.all(after.f < before.f)
        print("✓ Monotone decrease on 20 non-smooth runs")

    def test_start_with_minimum_near_segment_endpoint(self):
        """Iterates approach the endpoint where one gradient almost vanishes"""
        trace = solve(self.paraboloid, [-1.62329061, 1.90248941])
        assert trace.termination == Termination.CRITICAL, trace.message
        assert self.segment.distance(trace.final_x) <= 1e-3

    def test_stalled_enrichment_shrinks_epsilon(self, monkeypatch):
        def shortest_generator(generators):
            P = np.atleast_2d(np.asarray(generators, dtype=float))
            i = int(np.argmin(np.sum(P * P, axis=1)))
            weights = np.zeros(P.shape[0])
            weights[i] = 1.0
            return HullQpResult(point=P[i].copy(), weights=SimplexWeights(weights), iterations=1)

        monkeypatch.setattr("nsmoo.solvers.descent.min_norm_point", shortest_generator)
        trace = solve(self.paraboloid, [0.5, 0.3], DescentConfig(max_outer=5))
        assert trace.termination == Termination.MAX_ITERATIONS
        assert trace.eps_reductions == 5
        assert trace.accepted_steps == 0
        assert trace.certificate is None
