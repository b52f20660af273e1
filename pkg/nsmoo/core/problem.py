"""
Problem models and shared primitives for multiobjective optimization
Objective oracles, dominance, KKT residuals and criticality certificates
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from nsmoo.core.errors import DimensionMismatchError, EvaluationError, PreconditionError
from nsmoo.core.utils import as_vector

logger = logging.getLogger(__name__)

SIMPLEX_TOL = 1e-12


@dataclass(frozen=True)
class Objective:
    """One objective oracle: a value and one Clarke subgradient per point"""
    value_fn: Callable[[np.ndarray], float]
    subgrad_fn: Callable[[np.ndarray], np.ndarray]
    smooth: bool = True
    label: str = ""

    def value(self, x: np.ndarray) -> float:
        return float(self.value_fn(x))

    def subgrad(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.subgrad_fn(x), dtype=float).reshape(-1)


@dataclass
class MopProblem:
    """Multiobjective problem on R^n with k objective oracles"""
    name: str
    n: int
    objectives: List[Objective]
    lipschitz_hint: Optional[List[float]] = None
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f"dimension must be positive, got {self.n}")
        if not self.objectives:
            raise PreconditionError("a problem needs at least one objective")
        if self.lipschitz_hint is not None and len(self.lipschitz_hint) != len(self.objectives):
            raise DimensionMismatchError("lipschitz_hint needs one entry per objective")

    @property
    def k(self) -> int:
        return len(self.objectives)

    def subgradients(self, x: np.ndarray) -> List[np.ndarray]:
        """One subgradient per objective at x"""
        return [obj.subgrad(x) for obj in self.objectives]

    def is_smooth(self) -> bool:
        return all(obj.smooth for obj in self.objectives)


@dataclass(frozen=True)
class SimplexWeights:
    """Convex-combination weights: non-negative, summing to one"""
    weights: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size == 0:
            raise PreconditionError("simplex weights must not be empty")
        if np.any(~np.isfinite(w)) or np.any(w < 0.0):
            raise PreconditionError(f"simplex weights must be non-negative, got {w}")
        if abs(w.sum() - 1.0) > SIMPLEX_TOL:
            raise PreconditionError(f"simplex weights must sum to 1, got {w.sum():.17g}")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_raw(cls, raw: Sequence[float]) -> "SimplexWeights":
        """Clip round-off negatives and renormalize solver output"""
        w = np.clip(np.asarray(raw, dtype=float).reshape(-1), 0.0, None)
        total = w.sum()
        if total <= 0.0:
            raise PreconditionError("weights vanish after clipping")
        return cls(w / total)

    @classmethod
    def uniform(cls, m: int) -> "SimplexWeights":
        return cls(np.full(m, 1.0 / m))

    def __len__(self) -> int:
        return int(self.weights.shape[0])


@dataclass
class CriticalityCertificate:
    """Approximate steepest-descent direction together with its bundle"""
    direction: np.ndarray
    residual: float
    bundle: List[Tuple[int, np.ndarray]]
    bundle_weights: SimplexWeights
    epsilon: float
    accepted: bool = False
    enrichments: int = 0
    residual_history: List[float] = field(default_factory=list)

    @property
    def bundle_vectors(self) -> List[np.ndarray]:
        return [g for _, g in self.bundle]

    def is_critical(self, tol: float) -> bool:
        return self.residual <= tol


class Dominance(str, Enum):
    STRICTLY = "strictly"
    WEAKLY = "weakly"
    NONE = "none"


def evaluate(problem: MopProblem, x: Sequence[float]) -> np.ndarray:
    """
    Evaluate all objectives at x

    Raises:
        EvaluationError: objective i returned a non-finite value
    """
    x = as_vector(x, problem.n)
    values = np.empty(problem.k)
    for i, obj in enumerate(problem.objectives):
        value = obj.value(x)
        if not np.isfinite(value):
            raise EvaluationError(i, f"objective {i} ({obj.label or problem.name}) returned {value}")
        values[i] = value
    return values


def dominates(a: Sequence[float], b: Sequence[float]) -> Dominance:
    """Dominance of image a over image b (minimization)"""
    a = np.asarray(a, dtype=float).reshape(-1)
    b = np.asarray(b, dtype=float).reshape(-1)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"cannot compare images of length {a.size} and {b.size}")
    if np.all(a < b):
        return Dominance.STRICTLY
    if np.all(a <= b) and np.any(a != b):
        return Dominance.WEAKLY
    return Dominance.NONE


def kkt_residual(problem: MopProblem, x: Sequence[float], alpha: SimplexWeights) -> float:
    """Norm of the alpha-weighted gradient combination at x"""
    x = as_vector(x, problem.n)
    if len(alpha) != problem.k:
        raise DimensionMismatchError(f"alpha has length {len(alpha)}, expected {problem.k}")
    combined = np.zeros(problem.n)
    for a_i, g in zip(alpha.weights, problem.subgradients(x)):
        combined += a_i * g
    return float(np.linalg.norm(combined))


def check_subgradients(problem: MopProblem,
                       rng: np.random.Generator,
                       samples: int = 5,
                       scale: float = 2.0,
                       tol: float = 1e-5,
                       step: float = 1e-6) -> List[Tuple[int, float]]:
    """
    Compare declared-smooth subgradients with central finite differences

    Returns:
        List of (objective index, relative error) for every violation
    """
    failures = []
    for _ in range(samples):
        x = rng.uniform(-scale, scale, size=problem.n)
        for i, obj in enumerate(problem.objectives):
            if not obj.smooth:
                continue
            g = obj.subgrad(x)
            fd = np.empty(problem.n)
            for j in range(problem.n):
                e = np.zeros(problem.n)
                e[j] = step
                fd[j] = (obj.value(x + e) - obj.value(x - e)) / (2 * step)
            err = float(np.linalg.norm(g - fd))
            if err > tol * (1.0 + np.linalg.norm(g)):
                failures.append((i, err))
    if failures:
        logger.warning(f"⚠️ {problem.name}: {len(failures)} subgradient mismatches")
    return failures


def pareto_filter(values: np.ndarray) -> np.ndarray:
    """
    Boolean mask of the nondominated rows of an image matrix (N x k)

    Identical images are kept together; for k = 2 a sort-and-sweep is used.
    """
    F = np.asarray(values, dtype=float)
    if F.ndim != 2:
        raise DimensionMismatchError("values must be an N x k matrix")
    N, k = F.shape
    if N == 0:
        return np.zeros(0, dtype=bool)
    if k == 1:
        return F[:, 0] == F[:, 0].min()
    if k == 2:
        order = np.lexsort((F[:, 1], F[:, 0]))
        f1 = F[order, 0]
        f2 = F[order, 1]
        prev_min = np.concatenate(([np.inf], np.minimum.accumulate(f2)[:-1]))
        keep = f2 < prev_min
        # exact duplicates of a kept image stay kept
        same_as_prev = np.concatenate(([False], (f1[1:] == f1[:-1]) & (f2[1:] == f2[:-1])))
        for idx in np.flatnonzero(same_as_prev):
            keep[idx] = keep[idx - 1]
        mask = np.zeros(N, dtype=bool)
        mask[order] = keep
        return mask
    mask = np.ones(N, dtype=bool)
    for i in range(N):
        dominated = np.all(F <= F[i], axis=1) & np.any(F < F[i], axis=1)
        if np.any(dominated):
            mask[i] = False
    return mask
