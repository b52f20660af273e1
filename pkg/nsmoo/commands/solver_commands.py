#!/usr/bin/env python3
"""
Solver Commands for the CLI
solve, cover, scalarize, path and infer drivers writing CSV/JSON artifacts
"""
import logging
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from nsmoo.commands.base_command import EXIT_BUDGET, EXIT_FAILURE, EXIT_OK, BaseCommand
from nsmoo.core.config import RunConfig
from nsmoo.core.errors import ConfigError
from nsmoo.core.problem import SimplexWeights
from nsmoo.core.utils import as_vector
from nsmoo.problems.catalog import make_l1_quadratic
from nsmoo.problems.problem_registry import problem_registry
from nsmoo.services.artifact_service import ArtifactService
from nsmoo.solvers.continuation import PathConfig, trace_path
from nsmoo.solvers.descent import Termination, solve
from nsmoo.solvers.inverse import infer, load_pareto_data, make_basis
from nsmoo.solvers.scalarize import PsSpec, StartStrategy, front_sweep
from nsmoo.solvers.subdivision import Box, cover

logger = logging.getLogger(__name__)

TERMINATION_EXIT = {
    Termination.CRITICAL: EXIT_OK,
    Termination.MAX_ITERATIONS: EXIT_BUDGET,
    Termination.STEP_LIMIT: EXIT_BUDGET,
    Termination.LINE_SEARCH_FAILURE: EXIT_FAILURE,
    Termination.ENRICHMENT_FAILURE: EXIT_FAILURE,
}


def _build_problem(cfg: RunConfig):
    section = cfg.require_problem()
    return problem_registry.build(section.name, section.params)


class SolveCommand(BaseCommand):
    """
    Descent run from one start point: trace.csv and summary.json
    """

    def __init__(self):
        super().__init__(name="solve", description="Run the non-smooth descent method from x0")

    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        problem = _build_problem(cfg)
        section = cfg.require("solve")
        trace = solve(problem, section.x0, cfg.solver, section.max_steps)
        cert = trace.certificate

        artifacts.write_csv("trace.csv", trace.to_frame())
        summary = {
            "problem": problem.name,
            "final_x": trace.final_x,
            "final_f": trace.final_f,
            "residual": cert.residual if cert is not None else None,
            "epsilon": cert.epsilon if cert is not None else None,
            "termination": trace.termination.value,
            "outer_iterations": trace.outer_iterations,
            "accepted_steps": trace.accepted_steps,
            "eps_reductions": trace.eps_reductions,
        }
        artifacts.write_json("summary.json", summary)
        exit_code = TERMINATION_EXIT[trace.termination]
        if exit_code != EXIT_OK:
            summary["error"] = f"termination {trace.termination.value} {trace.message}".strip()
        summary["exit_code"] = exit_code
        return summary


class CoverCommand(BaseCommand):
    """
    Subdivision covering of the Pareto set: covering.json
    """

    def __init__(self):
        super().__init__(name="cover", description="Box covering of the Pareto set by subdivision")

    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        problem = _build_problem(cfg)
        section = cfg.require("cover")
        domain = Box(section.lower, section.upper)
        covering = cover(problem, domain, section.depth, cfg.solver, seed=cfg.seed,
                         samples_per_box=section.samples_per_box, steps=section.steps,
                         workers=section.workers)
        payload = {"problem": problem.name, "seed": cfg.seed, **covering.to_dict(),
                   "boxes_per_depth": covering.history, "volume": covering.volume()}
        artifacts.write_json("covering.json", payload)
        return {"boxes": len(covering.boxes), "depth": covering.depth, "volume": covering.volume()}


def _weight_grid(count: int, k: int) -> List[SimplexWeights]:
    if k != 2:
        raise ConfigError(f"weight_count needs a bi-objective problem, got k={k}")
    if count == 1:
        return [SimplexWeights.uniform(2)]
    return [SimplexWeights(np.array([a, 1.0 - a])) for a in np.linspace(0.0, 1.0, count)]


class ScalarizeCommand(BaseCommand):
    """
    Weighted-sum / Pascoletti-Serafini front sweep: sweep.csv and sweep.json
    """

    def __init__(self):
        super().__init__(name="scalarize", description="Front sweep over scalarization parameters")

    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        problem = _build_problem(cfg)
        section = cfg.require("scalarize")
        specs: List[Any] = [SimplexWeights(w) for w in section.weights]
        if section.weight_count is not None:
            specs.extend(_weight_grid(section.weight_count, problem.k))
        specs.extend(PsSpec(np.array(p.z), np.array(p.r)) for p in section.ps)
        strategy = StartStrategy(as_vector(section.x0, problem.n, name="x0"), warm=section.warm_start)

        sweep = front_sweep(problem, specs, strategy, cfg.solver)
        artifacts.write_csv("sweep.csv", sweep.to_frame())
        entries = []
        for e in sweep.entries:
            spec = {"z": e.spec.z, "r": e.spec.r} if isinstance(e.spec, PsSpec) else {"weights": e.spec.weights}
            entries.append({"kind": "ps" if isinstance(e.spec, PsSpec) else "weighted_sum", **spec,
                            "x": e.x, "f": e.f, "scalar_value": e.scalar_value,
                            "accepted": e.accepted, "status": e.status})
        artifacts.write_json("sweep.json", {"problem": problem.name, "nondominated": sweep.nondominated,
                                            "entries": entries})

        solved = len(sweep.entries) - len(sweep.failures)
        result: Dict[str, Any] = {"entries": len(sweep.entries), "solved": solved,
                                  "accepted": len(sweep.accepted), "nondominated": sweep.nondominated}
        if solved == 0:
            result.update(exit_code=EXIT_FAILURE, error="every sweep entry failed")
        return result


class PathCommand(BaseCommand):
    """
    Regularization path of (L, ||x||_1): path.csv and events.json
    """

    def __init__(self):
        super().__init__(name="path", description="Trace the l1 regularization path")

    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        section = cfg.require_problem()
        if section.name != "l1_quadratic":
            raise ConfigError(f"path needs problem 'l1_quadratic', got '{section.name}'")
        entry = problem_registry.get("l1_quadratic")
        params = {**entry.defaults, **section.params}
        try:
            L, _ = make_l1_quadratic(**params)
        except TypeError as e:
            raise ConfigError(f"problem 'l1_quadratic': {e}") from e

        path = trace_path(L, cfg.path or PathConfig())
        artifacts.write_csv("path.csv", path.to_frame(L))
        artifacts.write_json("events.json", {
            "lambda_max": path.lam_max,
            "complete": path.complete,
            "budget_exhausted": path.budget_exhausted,
            "diagnostic": path.diagnostic,
            "events": [ev.to_dict() for ev in path.events()],
            "segments": [{"active_set": [i + 1 for i in seg.active_set], "signs": seg.signs,
                          "lambda_range": list(seg.lam_range)} for seg in path.segments],
        })
        result: Dict[str, Any] = {"segments": len(path.segments),
                                  "events": [ev.lam for ev in path.events()],
                                  "complete": path.complete}
        if not path.complete:
            result.update(exit_code=EXIT_BUDGET if path.budget_exhausted else EXIT_FAILURE, error=path.diagnostic)
        return result


class InferCommand(BaseCommand):
    """
    Inverse problem from Pareto critical data: inverse.json and residuals.csv
    """

    needs_problem = False

    def __init__(self):
        super().__init__(name="infer", description="Recover objectives from Pareto critical data")

    def execute(self, cfg: RunConfig, artifacts: ArtifactService) -> Dict[str, Any]:
        section = cfg.require("infer")
        data = load_pareto_data(section.data)
        basis = make_basis(section.basis, data[0].x.shape[0])
        result = infer(data, basis, section.k)

        artifacts.write_json("inverse.json", result.to_dict())
        rows = []
        for m, (datum, residual) in enumerate(zip(data, result.residuals), start=1):
            row = {"datum": m}
            row.update({f"x_{i + 1}": v for i, v in enumerate(datum.x)})
            row["residual"] = residual
            rows.append(row)
        table = pd.DataFrame(rows)
        artifacts.write_csv("residuals.csv", table)
        return {"smallest_singular": result.smallest_singular, "null_dim": result.null_dim,
                "residuals": table}
