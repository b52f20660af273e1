#!/usr/bin/env python3
"""
Inverse Multiobjective Problems
Recovers objective coefficients over a function basis from Pareto critical
points and their KKT multipliers via the smallest singular vector of the
stacked stationarity system
"""
import logging
import re
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from pathlib import Path
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy import linalg

from nsmoo.core.errors import ConfigError, DimensionMismatchError, PreconditionError
from nsmoo.core.problem import SimplexWeights
from nsmoo.core.utils import as_vector

logger = logging.getLogger(__name__)

NULL_TOL = 1e-9
ZERO_GRAD_TOL = 0.0
ALPHA_SUM_TOL = 1e-9


@dataclass(frozen=True)
class BasisFunction:
    name: str
    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]

    def value(self, x: np.ndarray) -> float:
        return float(self.value_fn(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.gradient_fn(x), dtype=float).reshape(-1)


@dataclass
class BasisSet:
    """Functions b_1..b_d on R^n"""
    n: int
    functions: List[BasisFunction]
    name: str = "custom"

    def __post_init__(self):
        if not self.functions:
            raise PreconditionError("a basis needs at least one function")

    @property
    def d(self) -> int:
        return len(self.functions)

    @property
    def labels(self) -> List[str]:
        return [b.name for b in self.functions]

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.array([b.value(x) for b in self.functions])

    def gradients(self, x: np.ndarray) -> np.ndarray:
        """d x n matrix of basis gradients at x"""
        return np.vstack([b.gradient(x) for b in self.functions])


def _monomial(exponents: Tuple[int, ...]) -> BasisFunction:
    e = np.array(exponents, dtype=int)
    label = "*".join(f"x{i + 1}" + (f"^{p}" if p > 1 else "") for i, p in enumerate(e) if p > 0) or "1"

    def value(x: np.ndarray) -> float:
        return float(np.prod(np.asarray(x, dtype=float) ** e))

    def gradient(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        g = np.zeros(e.shape[0])
        for j in np.flatnonzero(e):
            lowered = e.copy()
            lowered[j] -= 1
            g[j] = e[j] * np.prod(x ** lowered)
        return g

    return BasisFunction(label, value, gradient)


def polynomial_basis(n: int, degree: int) -> BasisSet:
    """All monomials of total degree 1..degree in ascending degree, then the constant"""
    if n < 1 or degree < 1:
        raise PreconditionError(f"polynomial basis needs n >= 1 and degree >= 1, got n={n}, degree={degree}")
    functions = []
    for deg in range(1, degree + 1):
        for combo in combinations_with_replacement(range(n), deg):
            functions.append(_monomial(tuple(combo.count(i) for i in range(n))))
    functions.append(_monomial(tuple([0] * n)))
    return BasisSet(n=n, functions=functions, name=f"poly{degree}")


def radial2_basis(n: int) -> BasisSet:
    """{||x||^2, x_1..x_n, 1}: spans every isotropic quadratic"""
    functions = [BasisFunction("|x|^2", lambda x: float(np.dot(x, x)), lambda x: 2.0 * np.asarray(x, dtype=float))]
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        functions.append(_monomial(e))
    functions.append(_monomial(tuple([0] * n)))
    return BasisSet(n=n, functions=functions, name="radial2")


BASES: Dict[str, Callable[[int], BasisSet]] = {
    "poly2": lambda n: polynomial_basis(n, 2),
    "poly3": lambda n: polynomial_basis(n, 3),
    "radial2": radial2_basis,
}


def make_basis(name: str, n: int) -> BasisSet:
    try:
        return BASES[name](n)
    except KeyError:
        raise PreconditionError(f"unknown basis '{name}', expected one of {sorted(BASES)}") from None


@dataclass(frozen=True)
class ParetoDatum:
    """Pareto critical point x with KKT multiplier alpha"""
    x: np.ndarray
    alpha: SimplexWeights

    def __post_init__(self):
        object.__setattr__(self, "x", as_vector(self.x))
        if not isinstance(self.alpha, SimplexWeights):
            object.__setattr__(self, "alpha", SimplexWeights(self.alpha))


@dataclass
class InverseResult:
    """Recovered coefficients c (k x d, unit Frobenius norm) and certificate s"""
    coefficients: np.ndarray
    smallest_singular: float
    residuals: np.ndarray
    basis: BasisSet
    null_dim: int = 1
    underdetermined: bool = False
    singular_values: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def k(self) -> int:
        return int(self.coefficients.shape[0])

    def objective_value(self, i: int, x: Sequence[float]) -> float:
        return float(self.coefficients[i] @ self.basis.values(as_vector(x, self.basis.n)))

    def objective_gradient(self, i: int, x: Sequence[float]) -> np.ndarray:
        return self.coefficients[i] @ self.basis.gradients(as_vector(x, self.basis.n))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "basis": self.basis.name,
            "labels": self.basis.labels,
            "k": self.k,
            "smallest_singular": self.smallest_singular,
            "null_dim": self.null_dim,
            "underdetermined": self.underdetermined,
            "coefficients": self.coefficients.tolist(),
            "residuals": self.residuals.tolist(),
        }


def assemble_system(data: Sequence[ParetoDatum], basis: BasisSet, k: int) -> np.ndarray:
    """
    Stationarity matrix of shape (|D| n) x (k d)

    Row m*n + l holds component l of datum m; column i*d + j holds
    alpha_i * grad b_j(x).
    """
    if not data:
        raise PreconditionError("inverse problem needs at least one datum")
    n, d = basis.n, basis.d
    M = np.zeros((len(data) * n, k * d))
    for m, datum in enumerate(data):
        if datum.x.shape[0] != n:
            raise DimensionMismatchError(f"datum {m} has dimension {datum.x.shape[0]}, basis expects {n}")
        if len(datum.alpha) != k:
            raise DimensionMismatchError(f"datum {m} has {len(datum.alpha)} multipliers, expected {k}")
        G = basis.gradients(datum.x).T
        for i, a_i in enumerate(datum.alpha.weights):
            M[m * n:(m + 1) * n, i * d:(i + 1) * d] = a_i * G
    return M


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 0.0)
    if nz.size and v[nz[0]] < 0.0:
        return -v
    return v


def _svd(M: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Singular values (padded with zeros to the column count) and V^T"""
    _, S, Vt = linalg.svd(M, full_matrices=True, lapack_driver="gesvd")
    cols = M.shape[1]
    if S.shape[0] < cols:
        S = np.concatenate([S, np.zeros(cols - S.shape[0])])
    return S, Vt


def smallest_singular_vector(M: np.ndarray) -> Tuple[float, np.ndarray]:
    """
    sigma_min(M) and a unit right singular vector for it

    Wide matrices have a nontrivial null space, so s = 0 there. The sign
    makes the first nonzero entry positive.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise PreconditionError("matrix must be nonempty")
    S, Vt = _svd(M)
    return float(S[-1]), _canonical_sign(Vt[-1].copy())


def infer(data: Sequence[ParetoDatum], basis: BasisSet, k: int) -> InverseResult:
    """
    Coefficients c with f_i = sum_j c_ij b_j that make every datum closest to
    Pareto critical; every residual is bounded by the reported s
    """
    M = assemble_system(data, basis, k)
    d = basis.d
    # basis functions without gradient on the data cannot be identified
    live = [j for j in range(d) if np.any(np.abs(M[:, [i * d + j for i in range(k)]]) > ZERO_GRAD_TOL)]
    cols = [i * d + j for i in range(k) for j in live]
    c_flat = np.zeros(k * d)

    if not cols:
        logger.warning("⚠️ every basis gradient vanishes on the data")
        c_flat[0] = 1.0
        s, S, null_dim = 0.0, np.zeros(k * d), k * d
    else:
        R = M[:, cols]
        S, Vt = _svd(R)
        s = float(S[-1])
        c_flat[cols] = _canonical_sign(Vt[-1].copy())
        null_dim = int(np.sum(S <= NULL_TOL * max(1.0, float(S[0]))))

    n = basis.n
    Mc = M @ c_flat
    residuals = np.array([np.linalg.norm(Mc[m * n:(m + 1) * n]) for m in range(len(data))])
    underdetermined = len(cols) > M.shape[0]
    if null_dim > 1:
        logger.warning(f"⚠️ null space of dimension {null_dim}: coefficients are one representative")
    logger.info(f"🔎 inverse: s={s:.3e}, basis={basis.name}, k={k}, null_dim={null_dim}")
    return InverseResult(coefficients=c_flat.reshape(k, d), smallest_singular=s, residuals=residuals,
                         basis=basis, null_dim=null_dim, underdetermined=underdetermined,
                         singular_values=S)


def _indexed_columns(columns: Sequence[str], prefix: str) -> List[str]:
    pattern = re.compile(rf"^{prefix}_(\d+)$")
    found = sorted((int(m.group(1)), c) for c in columns if (m := pattern.match(c)))
    if not found or [i for i, _ in found] != list(range(1, len(found) + 1)):
        raise ConfigError(f"data file needs columns {prefix}_1..{prefix}_m, got {list(columns)}")
    return [c for _, c in found]


def load_pareto_data(path: Union[str, Path]) -> List[ParetoDatum]:
    """Read x_1..x_n, alpha_1..alpha_k columns; multipliers are renormalized to the simplex"""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"data file not found: {path}")
    df = pd.read_csv(path)
    x_cols = _indexed_columns(df.columns, "x")
    a_cols = _indexed_columns(df.columns, "alpha")
    data = []
    for row, (x, a) in enumerate(zip(df[x_cols].to_numpy(dtype=float), df[a_cols].to_numpy(dtype=float))):
        if np.any(a < 0.0) or abs(a.sum() - 1.0) > ALPHA_SUM_TOL:
            raise ConfigError(f"{path.name} row {row + 1}: multipliers must be non-negative and sum to 1")
        data.append(ParetoDatum(x=x, alpha=SimplexWeights.from_raw(a)))
    logger.info(f"📄 loaded {len(data)} data points from {path}")
    return data
