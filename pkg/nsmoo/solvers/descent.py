#!/usr/bin/env python3
"""
Descent Method for Non-smooth Multiobjective Problems
Approximates the Goldstein epsilon-subdifferential by a growing bundle of
subgradients, takes Armijo-type steps and drives epsilon to zero
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from nsmoo.core.errors import EnrichmentError, LineSearchError, NsmooError, PreconditionError
from nsmoo.core.problem import CriticalityCertificate, MopProblem, evaluate
from nsmoo.core.utils import as_vector
from nsmoo.solvers.minnorm import min_norm_point

logger = logging.getLogger(__name__)


class DescentConfig(BaseModel):
    """Parameters of the epsilon-subdifferential descent method"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    c: float = Field(0.25, gt=0.0, lt=1.0, description="acceptance constant")
    eps0: float = Field(0.1, gt=0.0, description="initial epsilon")
    theta_eps: float = Field(0.5, gt=0.0, lt=1.0, description="epsilon shrink factor")
    kappa: float = Field(1.0, gt=0.0, description="residual-to-epsilon ratio triggering a shrink")
    beta: float = Field(0.5, gt=0.0, lt=1.0, description="backtracking factor")
    max_outer: int = Field(10_000, ge=1)
    max_enrich: int = Field(100, ge=0)
    tol_crit: float = Field(1e-6, gt=0.0)
    tol_eps: float = Field(1e-6, gt=0.0)
    max_backtracks: int = Field(60, ge=0)
    max_bisections: int = Field(50, ge=1)


class Termination(str, Enum):
    CRITICAL = "critical"
    MAX_ITERATIONS = "max_iterations"
    LINE_SEARCH_FAILURE = "line_search_failure"
    ENRICHMENT_FAILURE = "enrichment_failure"
    STEP_LIMIT = "step_limit"

    @property
    def is_failure(self) -> bool:
        return self in (Termination.LINE_SEARCH_FAILURE, Termination.ENRICHMENT_FAILURE)


@dataclass
class TraceEntry:
    x: np.ndarray
    f: np.ndarray
    epsilon: float
    residual: float
    step_length: float


@dataclass
class DescentTrace:
    """Accepted iterates of one descent run"""
    iterates: List[TraceEntry] = field(default_factory=list)
    termination: Termination = Termination.MAX_ITERATIONS
    certificate: Optional[CriticalityCertificate] = None
    outer_iterations: int = 0
    eps_reductions: int = 0
    message: str = ""

    @property
    def final_x(self) -> np.ndarray:
        return self.iterates[-1].x

    @property
    def final_f(self) -> np.ndarray:
        return self.iterates[-1].f

    @property
    def accepted_steps(self) -> int:
        return max(0, len(self.iterates) - 1)

    def to_frame(self) -> pd.DataFrame:
        """Trace table: iter, x_1..x_n, f_1..f_k, eps, residual, step"""
        rows = []
        for j, entry in enumerate(self.iterates):
            row = {"iter": j}
            row.update({f"x_{i + 1}": v for i, v in enumerate(entry.x)})
            row.update({f"f_{i + 1}": v for i, v in enumerate(entry.f)})
            row.update({"eps": entry.epsilon, "residual": entry.residual, "step": entry.step_length})
            rows.append(row)
        return pd.DataFrame(rows)


def _check_direction(v: np.ndarray) -> float:
    norm_v = float(np.linalg.norm(v))
    if norm_v == 0.0:
        raise PreconditionError("direction must be nonzero")
    return norm_v


def find_enriching_subgradient(problem: MopProblem,
                               x: np.ndarray,
                               v: np.ndarray,
                               failing_i: int,
                               epsilon: float,
                               c: float,
                               max_bisections: int = 50) -> np.ndarray:
    """
    Locate a subgradient of objective failing_i that is not in conv(W)

    Bisects [0, epsilon/||v||] on h(t) = f_i(x+tv) - f_i(x) + c t ||v||^2,
    keeping h(a) < h(b), and returns the first sampled subgradient xi with
    <xi, v> > -c ||v||^2.
    """
    x = as_vector(x, problem.n)
    v = as_vector(v, problem.n, name="v")
    norm_v = _check_direction(v)
    if epsilon <= 0.0:
        raise PreconditionError("epsilon must be positive")
    obj = problem.objectives[failing_i]
    bound = -c * norm_v ** 2
    f0 = obj.value(x)

    def h(t: float) -> float:
        return obj.value(x + t * v) - f0 + c * t * norm_v ** 2

    a, b = 0.0, epsilon / norm_v
    f_b = obj.value(x + b * v)
    # same comparison as the acceptance test in compute_direction
    if not f_b > f0 - c * epsilon * norm_v:
        raise PreconditionError(f"acceptance holds for objective {failing_i}; nothing to enrich")
    h_b = f_b - f0 + c * b * norm_v ** 2

    for _ in range(max_bisections):
        t = 0.5 * (a + b)
        xi = obj.subgrad(x + t * v)
        if float(xi @ v) > bound:
            return xi
        h_t = h(t)
        if h_b > h_t:
            a = t
        else:
            b, h_b = t, h_t
    raise EnrichmentError(f"no enriching subgradient for objective {failing_i} after {max_bisections} bisections")


def compute_direction(problem: MopProblem,
                      x: Sequence[float],
                      epsilon: float,
                      cfg: Optional[DescentConfig] = None,
                      stop_residual: Optional[float] = None) -> CriticalityCertificate:
    """
    Acceptable descent direction at x for the given epsilon

    Starts from one subgradient per objective and enriches the bundle until
    the direction passes the acceptance test at t = epsilon/||v|| or the
    residual drops to tol_crit. A caller may raise that threshold with
    stop_residual; solve passes kappa * epsilon and then shrinks epsilon.

    Raises:
        EnrichmentError: enrichment budget exhausted, or an enriching
            subgradient did not lower the residual
    """
    cfg = cfg or DescentConfig()
    x = as_vector(x, problem.n)
    if epsilon <= 0.0:
        raise PreconditionError("epsilon must be positive")
    threshold = cfg.tol_crit if stop_residual is None else max(cfg.tol_crit, stop_residual)

    bundle = [(i, g) for i, g in enumerate(problem.subgradients(x))]
    fx = evaluate(problem, x)
    history: List[float] = []

    for enrichments in range(cfg.max_enrich + 1):
        qp = min_norm_point([g for _, g in bundle])
        v = -qp.point
        residual = float(np.linalg.norm(v))
        if history and residual >= history[-1]:
            raise EnrichmentError(f"enrichment stalled at residual {history[-1]:.3e}", bundle, stalled=True)
        history.append(residual)
        cert = CriticalityCertificate(direction=v, residual=residual, bundle=list(bundle),
                                      bundle_weights=qp.weights, epsilon=epsilon,
                                      enrichments=enrichments, residual_history=list(history))
        if residual <= threshold:
            return cert

        f_trial = evaluate(problem, x + (epsilon / residual) * v)
        failing = np.flatnonzero(f_trial > fx - cfg.c * epsilon * residual)
        if failing.size == 0:
            cert.accepted = True
            return cert
        if enrichments == cfg.max_enrich:
            break

        i = int(failing[0])
        xi = find_enriching_subgradient(problem, x, v, i, epsilon, cfg.c, cfg.max_bisections)
        logger.debug(f"enrich: objective {i}, <xi,v>={xi @ v:.3e}, residual={residual:.3e}")
        bundle.append((i, xi))

    raise EnrichmentError(f"no acceptable direction after {cfg.max_enrich} enrichments", bundle)


def line_search(problem: MopProblem,
                x: Sequence[float],
                v: Sequence[float],
                epsilon: float,
                cfg: Optional[DescentConfig] = None) -> float:
    """
    Largest t in {epsilon/||v|| * beta^m} with f_i(x+tv) <= f_i(x) - c t ||v||^2

    Raises:
        LineSearchError: no admissible step within max_backtracks
    """
    cfg = cfg or DescentConfig()
    x = as_vector(x, problem.n)
    v = as_vector(v, problem.n, name="v")
    norm_v = _check_direction(v)
    fx = evaluate(problem, x)
    t = epsilon / norm_v
    for _ in range(cfg.max_backtracks + 1):
        if np.all(evaluate(problem, x + t * v) <= fx - cfg.c * t * norm_v ** 2):
            return t
        t *= cfg.beta
    raise LineSearchError(f"no admissible step after {cfg.max_backtracks} backtracks")


def solve(problem: MopProblem,
          x0: Sequence[float],
          cfg: Optional[DescentConfig] = None,
          max_steps: Optional[int] = None) -> DescentTrace:
    """
    Run the descent method from x0 until Pareto criticality or a budget ends

    Args:
        problem: multiobjective problem
        x0: starting point
        cfg: solver parameters
        max_steps: optional bound on accepted steps

    Returns:
        DescentTrace; failures are recorded in its termination field
    """
    cfg = cfg or DescentConfig()
    x = as_vector(x0, problem.n, name="x0")
    fx = evaluate(problem, x)
    eps = cfg.eps0
    trace = DescentTrace()
    cert: Optional[CriticalityCertificate] = None

    for outer in range(1, cfg.max_outer + 1):
        trace.outer_iterations = outer
        try:
            cert = compute_direction(problem, x, eps, cfg, stop_residual=cfg.kappa * eps)
        except EnrichmentError as e:
            if e.stalled:
                # residual is at rounding level for this epsilon
                eps *= cfg.theta_eps
                trace.eps_reductions += 1
                logger.debug(f"eps -> {eps:.3e} after {e}")
                continue
            trace.termination = Termination.ENRICHMENT_FAILURE
            trace.message = str(e)
            break

        if cert.residual <= cfg.tol_crit and eps <= cfg.tol_eps:
            trace.termination = Termination.CRITICAL
            break
        if cert.residual <= cfg.kappa * eps or not cert.accepted:
            eps *= cfg.theta_eps
            trace.eps_reductions += 1
            logger.debug(f"eps -> {eps:.3e} (residual {cert.residual:.3e})")
            continue

        try:
            t = line_search(problem, x, cert.direction, eps, cfg)
        except LineSearchError as e:
            trace.termination = Termination.LINE_SEARCH_FAILURE
            trace.message = str(e)
            break

        trace.iterates.append(TraceEntry(x=x.copy(), f=fx.copy(), epsilon=eps,
                                         residual=cert.residual, step_length=t))
        x = x + t * cert.direction
        fx = evaluate(problem, x)
        if max_steps is not None and len(trace.iterates) >= max_steps:
            trace.termination = Termination.STEP_LIMIT
            break
    else:
        trace.termination = Termination.MAX_ITERATIONS

    if trace.termination != Termination.CRITICAL:
        # certificate must describe the final iterate
        try:
            cert = compute_direction(problem, x, eps, cfg, stop_residual=cfg.kappa * eps)
        except NsmooError:
            cert = None
    trace.certificate = cert
    trace.iterates.append(TraceEntry(x=x.copy(), f=fx.copy(), epsilon=eps,
                                     residual=cert.residual if cert is not None else float("nan"),
                                     step_length=0.0))
    logger.debug(f"descent on {problem.name}: {trace.termination.value} after {trace.outer_iterations} "
                 f"iterations, {trace.accepted_steps} steps")
    return trace
