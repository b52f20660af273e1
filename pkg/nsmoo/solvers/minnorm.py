"""
Minimum-norm point of a convex hull
Wolfe's active-set method with major/minor cycles over affinely independent corrals
"""
import logging
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from nsmoo.core.errors import MinNormError, PreconditionError
from nsmoo.core.problem import SimplexWeights

logger = logging.getLogger(__name__)

DEDUP_TOL = 1e-14
WEIGHT_TOL = 1e-14
# major-cycle optimality gap, relative to the current point
GAP_TOL = 1e-12
# origin counts as reached only at rounding level of the longest generator
ORIGIN_TOL = 1e-14


@dataclass
class HullQpResult:
    """Minimizer of ||xi||^2 over conv(generators) with certifying weights"""
    point: np.ndarray
    weights: SimplexWeights
    iterations: int
    n_unique: int = 0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.point))


def _deduplicate(P: np.ndarray) -> List[int]:
    """Indices of the first occurrence of every distinct generator"""
    keep: List[int] = []
    for i in range(P.shape[0]):
        if not any(np.max(np.abs(P[i] - P[j])) <= DEDUP_TOL for j in keep):
            keep.append(i)
    return keep


def _affine_minimizer(C: np.ndarray) -> np.ndarray:
    """Weights of the min-norm point of the affine hull of the rows of C"""
    m = C.shape[0]
    if m == 1:
        return np.ones(1)
    M = np.zeros((m + 1, m + 1))
    M[0, 1:] = 1.0
    M[1:, 0] = 1.0
    M[1:, 1:] = C @ C.T
    rhs = np.zeros(m + 1)
    rhs[0] = 1.0
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    alpha = sol[1:]
    return alpha / alpha.sum()


def min_norm_point(generators: Sequence[Sequence[float]], max_iter: int = 500) -> HullQpResult:
    """
    Minimum-norm element of conv(generators)

    Args:
        generators: m vectors of R^n (rows)
        max_iter: bound on major cycles

    Returns:
        HullQpResult with point, simplex weights over all m generators
        (duplicates receive weight 0) and the number of major cycles
    """
    if generators is None or len(generators) == 0:
        raise MinNormError("min_norm_point needs at least one generator")
    P_all = np.atleast_2d(np.asarray(generators, dtype=float))
    if not np.all(np.isfinite(P_all)):
        raise PreconditionError("generators must be finite")

    uniq = _deduplicate(P_all)
    P = P_all[uniq]
    sq_norms = np.sum(P * P, axis=1)
    g_max = float(np.sqrt(np.max(sq_norms)))

    # start from the shortest generator, lowest index on ties
    first = int(np.argmin(sq_norms))
    corral = [first]
    lam = np.ones(1)
    x = P[first].copy()

    iterations = 0
    for iterations in range(1, max_iter + 1):
        xx = float(x @ x)
        if np.sqrt(xx) <= ORIGIN_TOL * g_max:
            break
        dots = P @ x
        j = int(np.argmin(dots))
        if xx - dots[j] <= GAP_TOL * max(xx, np.sqrt(xx) * g_max) or j in corral:
            break
        saved = (list(corral), lam.copy(), x.copy())
        corral.append(j)
        lam = np.append(lam, 0.0)

        # minor cycles: move toward the affine minimizer until it is interior
        while True:
            C = P[corral]
            alpha = _affine_minimizer(C)
            if np.all(alpha > WEIGHT_TOL):
                lam = alpha
                x = C.T @ lam
                break
            neg = alpha <= WEIGHT_TOL
            denom = lam[neg] - alpha[neg]
            ratios = np.where(denom > 0, lam[neg] / np.where(denom > 0, denom, 1.0), np.inf)
            theta = float(min(1.0, np.min(ratios)))
            lam = theta * alpha + (1.0 - theta) * lam
            drop = np.flatnonzero(lam <= WEIGHT_TOL)
            if drop.size == 0:
                drop = np.flatnonzero(neg)[:1]
            keep = [i for i in range(len(corral)) if i not in set(drop.tolist())]
            corral = [corral[i] for i in keep]
            lam = lam[keep]
            lam = lam / lam.sum()
            x = P[corral].T @ lam
            if len(corral) == 1:
                break

        # keep the previous corral if rounding increased the norm
        if x @ x > xx:
            corral, lam, x = saved
            break
    else:
        logger.warning(f"⚠️ min_norm_point hit the major-cycle limit ({max_iter})")

    weights = np.zeros(P_all.shape[0])
    for pos, idx in enumerate(corral):
        weights[uniq[idx]] += lam[pos]
    simplex = SimplexWeights.from_raw(weights)
    point = P_all.T @ simplex.weights
    return HullQpResult(point=point, weights=simplex, iterations=iterations, n_unique=len(uniq))


def contains_origin(generators: Sequence[Sequence[float]], tol: float = 1e-8) -> bool:
    """True iff the hull of the generators reaches the origin within tol"""
    return min_norm_point(generators).norm <= tol
