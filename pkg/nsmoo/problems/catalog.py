#!/usr/bin/env python3
"""
Analytic Test Problems
Factories for problems with known Pareto sets or regularization paths
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from nsmoo.core.errors import DimensionMismatchError, PreconditionError
from nsmoo.core.problem import MopProblem, Objective
from nsmoo.core.utils import as_vector, sign_with_zero
from nsmoo.solvers.continuation import SmoothObjective

logger = logging.getLogger(__name__)


@dataclass
class KnownSolution:
    """Declared Pareto set (or path) of a catalog problem"""
    kind: str
    description: str
    data: Dict[str, Any] = field(default_factory=dict)
    distance_fn: Optional[Callable[[np.ndarray], float]] = None

    def distance(self, x: Sequence[float]) -> float:
        if self.distance_fn is None:
            raise PreconditionError(f"no distance available for a known {self.kind}")
        return float(self.distance_fn(np.asarray(x, dtype=float)))


def segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance from x to the segment [a, b]"""
    ab = b - a
    t = float(np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0))
    return float(np.linalg.norm(x - (a + t * ab)))


def _quadratic(center: np.ndarray, label: str) -> Objective:
    return Objective(value_fn=lambda x: float(np.sum((x - center) ** 2)),
                     subgrad_fn=lambda x: 2.0 * (x - center),
                     smooth=True, label=label)


def make_paraboloid(c1: Sequence[float], c2: Sequence[float]) -> MopProblem:
    """f(x) = (||x - c1||^2, ||x - c2||^2); Pareto set is the segment [c1, c2]"""
    c1 = as_vector(c1, name="c1")
    c2 = as_vector(c2, c1.shape[0], name="c2")
    if np.array_equal(c1, c2):
        raise PreconditionError("paraboloid centers must differ")
    return MopProblem(name="paraboloid", n=c1.shape[0],
                      objectives=[_quadratic(c1, "f1"), _quadratic(c2, "f2")],
                      params={"c1": c1.tolist(), "c2": c2.tolist()})


def paraboloid_solution(c1: Sequence[float], c2: Sequence[float]) -> KnownSolution:
    a, b = np.asarray(c1, dtype=float), np.asarray(c2, dtype=float)
    return KnownSolution(kind="segment", description="segment [c1, c2]",
                         data={"endpoints": [a.tolist(), b.tolist()]},
                         distance_fn=lambda x: segment_distance(x, a, b))


def make_abs_biobjective(shift: float) -> MopProblem:
    """
    f1 = |x1| + x2^2, f2 = |x1 - shift| + x2^2 on R^2

    Subgradients use 0 from [-1, 1] at the kinks.
    """
    if not shift > 0.0:
        raise PreconditionError(f"shift must be positive, got {shift}")
    shift = float(shift)

    def objective(offset: float, label: str) -> Objective:
        return Objective(value_fn=lambda x: abs(x[0] - offset) + x[1] ** 2,
                         subgrad_fn=lambda x: np.array([sign_with_zero(x[0] - offset), 2.0 * x[1]]),
                         smooth=False, label=label)

    return MopProblem(name="abs_biobjective", n=2,
                      objectives=[objective(0.0, "f1"), objective(shift, "f2")],
                      lipschitz_hint=None, params={"shift": shift})


def abs_biobjective_solution(shift: float) -> KnownSolution:
    a, b = np.zeros(2), np.array([float(shift), 0.0])
    return KnownSolution(kind="segment", description="{x2 = 0, 0 <= x1 <= shift}",
                         data={"endpoints": [a.tolist(), b.tolist()]},
                         distance_fn=lambda x: segment_distance(x, a, b))


def make_l1_quadratic(A: Sequence[Sequence[float]], b: Sequence[float]) -> Tuple[SmoothObjective, MopProblem]:
    """
    L(x) = 0.5 ||Ax - b||^2 and the bi-objective problem (L, ||x||_1)

    Rank-deficient A is accepted with a warning; its path need not be unique.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = as_vector(b, name="b")
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatchError(f"A has {A.shape[0]} rows but b has length {b.shape[0]}")
    n = A.shape[1]
    if np.linalg.matrix_rank(A) < n:
        logger.warning(f"⚠️ A has rank {np.linalg.matrix_rank(A)} < {n}; the path may not be unique")
    AtA = A.T @ A

    L = SmoothObjective(n=n,
                        value_fn=lambda x: 0.5 * float(np.sum((A @ x - b) ** 2)),
                        gradient_fn=lambda x: A.T @ (A @ x - b),
                        hessian_fn=lambda x: AtA,
                        label="L")
    l1 = Objective(value_fn=lambda x: float(np.sum(np.abs(x))),
                   subgrad_fn=lambda x: sign_with_zero(x),
                   smooth=False, label="l1")
    problem = MopProblem(name="l1_quadratic", n=n,
                         objectives=[Objective(L.value, L.gradient, smooth=True, label="L"), l1],
                         params={"A": A.tolist(), "b": b.tolist()})
    return L, problem


def l1_quadratic_solution(A: Sequence[Sequence[float]], b: Sequence[float]) -> Optional[KnownSolution]:
    """Soft-thresholding closed form, available when A has orthonormal columns"""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if not np.allclose(A.T @ A, np.eye(A.shape[1]), atol=1e-12):
        return None
    z = A.T @ np.asarray(b, dtype=float)
    return KnownSolution(kind="path", description="x(lambda) = sign(A^T b) max(0, |A^T b| - lambda)",
                         data={"lambda_max": float(np.max(np.abs(z))) if z.size else 0.0,
                               "path": lambda lam: np.sign(z) * np.maximum(0.0, np.abs(z) - lam)})


def make_sphere(center: Sequence[float]) -> MopProblem:
    """Single objective ||x - center||^2; the Pareto set is the center"""
    center = as_vector(center, name="center")
    return MopProblem(name="sphere", n=center.shape[0], objectives=[_quadratic(center, "f")],
                      params={"center": center.tolist()})


def sphere_solution(center: Sequence[float]) -> KnownSolution:
    c = np.asarray(center, dtype=float)
    return KnownSolution(kind="point", description="the center", data={"point": c.tolist()},
                         distance_fn=lambda x: float(np.linalg.norm(x - c)))


@dataclass
class ProblemCatalogEntry:
    name: str
    description: str
    factory: Callable[..., MopProblem]
    defaults: Dict[str, Any]
    known_solution: Optional[Callable[..., Optional[KnownSolution]]] = None

    def build(self, params: Optional[Dict[str, Any]] = None) -> MopProblem:
        merged = {**self.defaults, **(params or {})}
        unknown = set(merged) - set(self.defaults)
        if unknown:
            raise PreconditionError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        return self.factory(**merged)

    def solution(self, params: Optional[Dict[str, Any]] = None) -> Optional[KnownSolution]:
        if self.known_solution is None:
            return None
        return self.known_solution(**{**self.defaults, **(params or {})})


CATALOG = [
    ProblemCatalogEntry("paraboloid", "two squared distances; Pareto set is the segment between the centers",
                        make_paraboloid, {"c1": [0.0, 0.0], "c2": [1.0, 0.5]}, paraboloid_solution),
    ProblemCatalogEntry("abs_biobjective", "non-smooth pair |x1| + x2^2, |x1 - shift| + x2^2",
                        make_abs_biobjective, {"shift": 2.0}, abs_biobjective_solution),
    ProblemCatalogEntry("l1_quadratic", "least squares 0.5||Ax - b||^2 against the l1 norm",
                        lambda A, b: make_l1_quadratic(A, b)[1],
                        {"A": [[1.0, 0.0], [0.0, 1.0]], "b": [3.0, 1.0]}, l1_quadratic_solution),
    ProblemCatalogEntry("sphere", "single squared distance to a center",
                        make_sphere, {"center": [0.0, 0.0]}, sphere_solution),
]
