#!/usr/bin/env python3
"""
Scalarization Sweeps
Weighted-sum and Pascoletti-Serafini scalarizations solved with the
non-smooth descent method, plus dominance-filtered front sweeps
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from nsmoo.core.errors import DescentFailureError, DimensionMismatchError, NsmooError, PreconditionError
from nsmoo.core.problem import MopProblem, Objective, SimplexWeights, evaluate
from nsmoo.core.utils import as_vector
from nsmoo.solvers.descent import DescentConfig, DescentTrace, solve

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12
DOMINANCE_SLACK = 1e-9


@dataclass(frozen=True)
class PsSpec:
    """Reference point z and strictly positive target direction r"""
    z: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=float).reshape(-1)
        r = np.asarray(self.r, dtype=float).reshape(-1)
        if z.shape != r.shape:
            raise DimensionMismatchError("z and r must have equal length")
        if np.any(~np.isfinite(r)) or np.any(r <= 0.0):
            raise PreconditionError(f"target direction must be strictly positive, got {r}")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "r", r)


ScalarizationSpec = Union[SimplexWeights, PsSpec]


@dataclass
class ScalarResult:
    x: np.ndarray
    f: np.ndarray
    value: float
    trace: DescentTrace


def _run_scalar(problem: MopProblem, scalar: MopProblem, x0, cfg: DescentConfig) -> DescentTrace:
    trace = solve(scalar, x0, cfg)
    if trace.termination.is_failure:
        raise DescentFailureError(f"{scalar.name}: {trace.termination.value} ({trace.message})", trace)
    return trace


def weighted_sum_problem(problem: MopProblem, alpha: SimplexWeights) -> MopProblem:
    """Single-objective problem sum_i alpha_i f_i with subgradient sum_i alpha_i xi_i"""
    if len(alpha) != problem.k:
        raise DimensionMismatchError(f"alpha has length {len(alpha)}, expected {problem.k}")
    w = alpha.weights

    def value(x: np.ndarray) -> float:
        return float(sum(w_i * obj.value(x) for w_i, obj in zip(w, problem.objectives)))

    def subgrad(x: np.ndarray) -> np.ndarray:
        return sum(w_i * obj.subgrad(x) for w_i, obj in zip(w, problem.objectives))

    smooth = all(obj.smooth for w_i, obj in zip(w, problem.objectives) if w_i > 0)
    return MopProblem(name=f"{problem.name}[ws]", n=problem.n,
                      objectives=[Objective(value, subgrad, smooth=smooth, label="weighted_sum")])


def weighted_sum_solve(problem: MopProblem,
                       alpha: SimplexWeights,
                       x0: Sequence[float],
                       cfg: Optional[DescentConfig] = None) -> ScalarResult:
    """Critical point of the alpha-weighted sum of the objectives"""
    cfg = cfg or DescentConfig()
    scalar = weighted_sum_problem(problem, alpha)
    trace = _run_scalar(problem, scalar, x0, cfg)
    x = trace.final_x
    f = evaluate(problem, x)
    return ScalarResult(x=x, f=f, value=float(alpha.weights @ f), trace=trace)


def ps_problem(problem: MopProblem, spec: PsSpec) -> MopProblem:
    """Min-max form max_i (f_i(x) - z_i) / r_i of the Pascoletti-Serafini problem"""
    if spec.z.shape[0] != problem.k:
        raise DimensionMismatchError(f"reference point has length {spec.z.shape[0]}, expected {problem.k}")

    def scaled(x: np.ndarray) -> np.ndarray:
        return (np.array([obj.value(x) for obj in problem.objectives]) - spec.z) / spec.r

    def value(x: np.ndarray) -> float:
        return float(np.max(scaled(x)))

    def subgrad(x: np.ndarray) -> np.ndarray:
        s = scaled(x)
        # lowest maximizing index
        i = int(np.flatnonzero(s >= s.max() - TIE_TOL)[0])
        return problem.objectives[i].subgrad(x) / spec.r[i]

    return MopProblem(name=f"{problem.name}[ps]", n=problem.n,
                      objectives=[Objective(value, subgrad, smooth=False, label="pascoletti_serafini")])


def ps_solve(problem: MopProblem,
             spec: PsSpec,
             x0: Sequence[float],
             cfg: Optional[DescentConfig] = None) -> ScalarResult:
    """
    Solve the Pascoletti-Serafini problem through its min-max form

    Returns:
        ScalarResult whose value is tau = max_i (f_i(x) - z_i) / r_i
    """
    cfg = cfg or DescentConfig()
    scalar = ps_problem(problem, spec)
    trace = _run_scalar(problem, scalar, x0, cfg)
    x = trace.final_x
    f = evaluate(problem, x)
    tau = float(np.max((f - spec.z) / spec.r))
    return ScalarResult(x=x, f=f, value=tau, trace=trace)


@dataclass
class StartStrategy:
    """Start points for a sweep: fixed x0, or warm start from the previous entry"""
    x0: np.ndarray
    warm: bool = False

    def start_for(self, previous: Optional[np.ndarray]) -> np.ndarray:
        if self.warm and previous is not None:
            return previous
        return self.x0


@dataclass
class SweepEntry:
    spec: ScalarizationSpec
    x: Optional[np.ndarray]
    f: Optional[np.ndarray]
    scalar_value: Optional[float]
    accepted: bool = False
    status: str = ""


@dataclass
class FrontSweep:
    entries: List[SweepEntry] = field(default_factory=list)
    nondominated: bool = True

    @property
    def accepted(self) -> List[SweepEntry]:
        return [e for e in self.entries if e.accepted]

    @property
    def failures(self) -> List[SweepEntry]:
        return [e for e in self.entries if e.x is None]

    def to_frame(self) -> pd.DataFrame:
        """Sweep table: spec columns, x_*, f_*, scalar_value, accepted, status"""
        rows = []
        for e in self.entries:
            row = {}
            if isinstance(e.spec, PsSpec):
                row.update({f"z_{i + 1}": v for i, v in enumerate(e.spec.z)})
                row.update({f"r_{i + 1}": v for i, v in enumerate(e.spec.r)})
            else:
                row.update({f"w_{i + 1}": v for i, v in enumerate(e.spec.weights)})
            if e.x is not None:
                row.update({f"x_{i + 1}": v for i, v in enumerate(e.x)})
                row.update({f"f_{i + 1}": v for i, v in enumerate(e.f)})
            row["scalar_value"] = e.scalar_value
            row["accepted"] = e.accepted
            row["status"] = e.status
            rows.append(row)
        return pd.DataFrame(rows)


def _filter_entries(entries: List[SweepEntry]) -> bool:
    """
    Mark the nondominated representatives; returns False if any solved
    entry had to be dropped for dominance (duplicates do not count)
    """
    solved = [e for e in entries if e.f is not None]
    clean = True
    for e in solved:
        e.accepted = True
    for i, e in enumerate(solved):
        for j, other in enumerate(solved):
            if i == j or not other.accepted:
                continue
            if np.all(np.abs(other.f - e.f) <= DOMINANCE_SLACK):
                if j < i:
                    e.accepted = False
                    break
                continue
            if np.all(other.f <= e.f + DOMINANCE_SLACK):
                e.accepted = False
                clean = False
                break
    return clean


def front_sweep(problem: MopProblem,
                specs: Sequence[ScalarizationSpec],
                x0_strategy: Union[StartStrategy, Sequence[float]],
                cfg: Optional[DescentConfig] = None) -> FrontSweep:
    """
    Solve every scalarization and filter the images for nondominance

    Per-entry failures are recorded in the entry status; the sweep goes on.
    """
    if not specs:
        raise PreconditionError("front_sweep needs at least one specification")
    cfg = cfg or DescentConfig()
    strategy = x0_strategy if isinstance(x0_strategy, StartStrategy) else StartStrategy(as_vector(x0_strategy, problem.n))

    entries: List[SweepEntry] = []
    previous: Optional[np.ndarray] = None
    for spec in specs:
        x0 = strategy.start_for(previous)
        try:
            if isinstance(spec, PsSpec):
                result = ps_solve(problem, spec, x0, cfg)
            else:
                result = weighted_sum_solve(problem, spec, x0, cfg)
        except NsmooError as e:
            logger.warning(f"⚠️ sweep entry failed: {e}")
            entries.append(SweepEntry(spec=spec, x=None, f=None, scalar_value=None, status=f"error: {e}"))
            continue
        previous = result.x
        entries.append(SweepEntry(spec=spec, x=result.x, f=result.f, scalar_value=result.value,
                                  status=result.trace.termination.value))

    sweep = FrontSweep(entries=entries)
    sweep.nondominated = _filter_entries(entries)
    logger.info(f"📈 sweep: {len(sweep.accepted)}/{len(entries)} accepted, nondominated={sweep.nondominated}")
    return sweep
