"""
Test suite for inverse multiobjective problems:
- assembly of the stationarity system
- smallest singular vectors against eigenvalue oracles
- recovery of the paraboloid objectives from Pareto critical data
"""

import pytest
import sys
import os
import numpy as np
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from nsmoo.core.errors import ConfigError, PreconditionError
from nsmoo.core.problem import SimplexWeights
from nsmoo.solvers.inverse import (BasisFunction, BasisSet, ParetoDatum, assemble_system, infer,
                                   load_pareto_data, make_basis, polynomial_basis, radial2_basis,
                                   smallest_singular_vector)

C2 = np.array([1.0, 0.5])


def paraboloid_data(ts=(0.1, 0.3, 0.5, 0.7, 0.9)):
    return [ParetoDatum(t * C2, SimplexWeights(np.array([1.0 - t, t]))) for t in ts]


class TestSystemAssembly:
    """Stationarity matrix layout"""

    @classmethod
    def setup_class(cls):
        print("\n=== TESTING INVERSE SYSTEM ===")
        cls.basis = BasisSet(n=1, functions=[
            BasisFunction("x", lambda x: float(x[0]), lambda x: np.array([1.0])),
            BasisFunction("x^2", lambda x: float(x[0] ** 2), lambda x: np.array([2.0 * x[0]])),
        ])

    def test_single_datum_row(self):
        M = assemble_system([ParetoDatum(np.array([2.0]), SimplexWeights(np.array([1.0])))], self.basis, 1)
        np.testing.assert_allclose(M, [[1.0, 4.0]])

    def test_zero_weight_block(self):
        datum = ParetoDatum(np.array([2.0]), SimplexWeights(np.array([1.0, 0.0])))
        M = assemble_system([datum], self.basis, 2)
        np.testing.assert_allclose(M, [[1.0, 4.0, 0.0, 0.0]])

    def test_layout(self):
        data = paraboloid_data((0.2, 0.6))
        basis = polynomial_basis(2, 2)
        M = assemble_system(data, basis, 2)
        assert M.shape == (4, 12)
        d = basis.d
        G = basis.gradients(data[1].x).T
        np.testing.assert_allclose(M[2:4, d:2 * d], 0.6 * G)

    def test_empty_data_rejected(self):
        with pytest.raises(PreconditionError):
            assemble_system([], self.basis, 1)


class TestSmallestSingularVector:
    """SVD certificate"""

    def test_diagonal(self):
        s, v = smallest_singular_vector(np.diag([3.0, 1.0]))
        assert s == pytest.approx(1.0)
        np.testing.assert_allclose(v, [0.0, 1.0], atol=1e-15)

    def test_wide_matrix_has_null_vector(self):
        s, v = smallest_singular_vector(np.array([[1.0, 4.0]]))
        assert s == 0.0
        np.testing.assert_allclose(v, np.array([4.0, -1.0]) / np.sqrt(17.0), atol=1e-12)

    def test_random_tall_matrix_against_gram_eigenvalues(self):
        rng = np.random.default_rng(17)
        M = rng.standard_normal((20, 6))
        s, v = smallest_singular_vector(M)
        assert s ** 2 == pytest.approx(np.linalg.eigvalsh(M.T @ M)[0], abs=1e-8)
        assert np.linalg.norm(v) == pytest.approx(1.0, abs=1e-12)
        assert abs(np.linalg.norm(M @ v) - s) <= 1e-10 * np.linalg.norm(M, 2)

    def test_sign_convention(self):
        _, v = smallest_singular_vector(np.diag([3.0, 2.0, 1.0]))
        nonzero = v[np.abs(v) > 0.0]
        assert nonzero[0] > 0.0


class TestInfer:
    """Recovering objectives from data"""

    @classmethod
    def setup_class(cls):
        print("\n=== TESTING INVERSE RECOVERY ===")
        cls.data = paraboloid_data()

    def test_poly2_finds_exact_certificate(self):
        result = infer(self.data, polynomial_basis(2, 2), 2)
        assert result.smallest_singular <= 1e-8
        assert np.all(result.residuals <= 1e-8)
        assert np.linalg.norm(result.coefficients) == pytest.approx(1.0, abs=1e-12)
        # constants are invisible to the stationarity system
        assert np.all(result.coefficients[:, -1] == 0.0)

    def test_radial2_recovers_objectives_up_to_scale(self):
        result = infer(self.data, radial2_basis(2), 2)
        assert result.smallest_singular <= 1e-8
        assert result.null_dim == 1
        # f1 = |x|^2 and f2 = |x - c2|^2 without its constant
        expected = np.array([[1.0, 0.0, 0.0, 0.0], [1.0, -2.0, -1.0, 0.0]])
        expected /= np.linalg.norm(expected)
        np.testing.assert_allclose(result.coefficients, expected, atol=1e-8)
        for t in (0.2, 0.8):
            x = t * C2
            grad = (1.0 - t) * result.objective_gradient(0, x) + t * result.objective_gradient(1, x)
            assert np.linalg.norm(grad) <= 1e-8
        print("✓ Objectives recovered up to a common factor")

    def test_poly2_is_not_identifiable_on_collinear_data(self):
        """Data on a line leave several quadratic certificates"""
        result = infer(self.data, polynomial_basis(2, 2), 2)
        assert result.null_dim > 1

    def test_radial2_gradients_align_with_true_gradients(self):
        result = infer(self.data, radial2_basis(2), 2)
        for datum in self.data:
            x = datum.x
            for i, true_grad in enumerate((2.0 * x, 2.0 * (x - C2))):
                grad = result.objective_gradient(i, x)
                cross = grad[0] * true_grad[1] - grad[1] * true_grad[0]
                angle = np.arctan2(abs(cross), grad @ true_grad)
                assert angle <= 1e-4, f"objective {i} at {x}"

    def test_radial2_objective_values(self):
        result = infer(self.data, radial2_basis(2), 2)
        scale = 1.0 / np.sqrt(7.0)
        for x in (np.array([0.3, -0.2]), np.array([2.0, 1.0])):
            assert result.objective_value(0, x) == pytest.approx(scale * (x @ x), abs=1e-8)
            shifted = (x - C2) @ (x - C2) - C2 @ C2
            assert result.objective_value(1, x) == pytest.approx(scale * shifted, abs=1e-8)

    def test_random_multipliers_leave_positive_certificate(self):
        rng = np.random.default_rng(99)
        data = [ParetoDatum(d.x, SimplexWeights.from_raw(rng.uniform(0.05, 1.0, 2))) for d in self.data]
        result = infer(data, radial2_basis(2), 2)
        assert result.smallest_singular > 1e-6
        assert np.all(result.residuals <= result.smallest_singular + 1e-12)

    def test_single_datum_is_underdetermined(self):
        result = infer(self.data[:1], polynomial_basis(2, 2), 2)
        assert result.underdetermined
        assert result.smallest_singular == 0.0
        assert result.null_dim > 1

    def test_scaled_basis_scales_certificate(self):
        rng = np.random.default_rng(5)
        data = [ParetoDatum(d.x, SimplexWeights.from_raw(rng.uniform(0.05, 1.0, 2))) for d in self.data]
        basis = radial2_basis(2)
        scaled = BasisSet(n=2, name="scaled", functions=[
            BasisFunction(b.name, (lambda f: lambda x: 3.0 * f.value(x))(b),
                          (lambda f: lambda x: 3.0 * f.gradient(x))(b))
            for b in basis.functions
        ])
        base, tripled = infer(data, basis, 2), infer(data, scaled, 2)
        assert tripled.smallest_singular == pytest.approx(3.0 * base.smallest_singular, rel=1e-9)
        np.testing.assert_allclose(tripled.coefficients, base.coefficients, atol=1e-9)

    def test_unknown_basis(self):
        with pytest.raises(PreconditionError):
            make_basis("fourier", 2)

    def test_polynomial_basis_order(self):
        assert polynomial_basis(2, 2).labels == ["x1", "x2", "x1^2", "x1*x2", "x2^2", "1"]
        assert polynomial_basis(2, 3).d == 10


class TestLoadData:
    """CSV input"""

    def test_load_pareto_data(self, tmp_path):
        path = tmp_path / "front.csv"
        path.write_text("x_1,x_2,alpha_1,alpha_2\n0.1,0.05,0.9,0.1\n0.5,0.25,0.5,0.5\n")
        data = load_pareto_data(path)
        assert len(data) == 2
        np.testing.assert_allclose(data[1].x, [0.5, 0.25])
        np.testing.assert_allclose(data[0].alpha.weights, [0.9, 0.1])

    def test_rejects_bad_multipliers(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x_1,alpha_1,alpha_2\n0.1,0.7,0.7\n")
        with pytest.raises(ConfigError):
            load_pareto_data(path)

    def test_rejects_missing_columns(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x_1,w_1\n0.1,1.0\n")
        with pytest.raises(ConfigError):
            load_pareto_data(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_pareto_data(tmp_path / "missing.csv")
