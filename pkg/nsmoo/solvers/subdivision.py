#!/usr/bin/env python3
"""
Subdivision Box Coverings of the Pareto Set
Alternates dyadic box refinement with a sample-descend-select step
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.stats import qmc

from nsmoo.core.errors import NsmooError, ParetoSetLostError, PreconditionError
from nsmoo.core.problem import MopProblem
from nsmoo.core.utils import as_vector, get_env_int
from nsmoo.solvers.descent import DescentConfig, solve

logger = logging.getLogger(__name__)

DEFAULT_SAMPLES_PER_BOX = 10
DEFAULT_STEPS = 10


@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lower, upper] at a subdivision depth"""
    lower: np.ndarray
    upper: np.ndarray
    depth: int = 0

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        if lower.shape != upper.shape:
            raise PreconditionError("box corners must have equal length")
        if np.any(lower > upper):
            raise PreconditionError(f"box lower corner exceeds upper corner: {lower} > {upper}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def n(self) -> int:
        return int(self.lower.shape[0])

    @property
    def volume(self) -> float:
        return float(np.prod(self.upper - self.lower))

    @property
    def diagonal(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def split(self) -> List["Box"]:
        """Halve along the longest edge, lowest axis on ties"""
        axis = int(np.argmax(self.upper - self.lower))
        mid = 0.5 * (self.lower[axis] + self.upper[axis])
        left_upper = self.upper.copy()
        left_upper[axis] = mid
        right_lower = self.lower.copy()
        right_lower[axis] = mid
        return [Box(self.lower.copy(), left_upper, self.depth + 1),
                Box(right_lower, self.upper.copy(), self.depth + 1)]

    def contains_points(self, points: np.ndarray, domain: Optional["Box"] = None) -> np.ndarray:
        """
        Half-open containment [lower, upper); faces on the domain's upper
        boundary are closed
        """
        P = np.atleast_2d(points)
        inside = np.all(P >= self.lower, axis=1)
        closed = np.zeros(self.n, dtype=bool) if domain is None else (self.upper >= domain.upper)
        below = np.where(closed, P <= self.upper, P < self.upper)
        return inside & np.all(below, axis=1)

    def to_dict(self) -> Dict[str, Any]:
        return {"lower": self.lower.tolist(), "upper": self.upper.tolist()}


@dataclass
class BoxCovering:
    """Equal-depth cells of the dyadic subdivision of a domain"""
    boxes: List[Box]
    domain: Box
    depth: int = 0
    samples_per_box: int = DEFAULT_SAMPLES_PER_BOX
    history: List[int] = field(default_factory=list)

    @classmethod
    def from_domain(cls, domain: Box, samples_per_box: int = DEFAULT_SAMPLES_PER_BOX) -> "BoxCovering":
        return cls(boxes=[Box(domain.lower, domain.upper, 0)], domain=domain,
                   depth=0, samples_per_box=samples_per_box)

    def volume(self) -> float:
        return float(sum(box.volume for box in self.boxes))

    def locate(self, points: np.ndarray) -> np.ndarray:
        """Mask over boxes: True where the box holds at least one point"""
        P = np.atleast_2d(points)
        return np.array([bool(np.any(box.contains_points(P, self.domain))) for box in self.boxes],
                        dtype=bool)

    def contains(self, point: Sequence[float]) -> bool:
        return bool(np.any(self.locate(np.asarray(point, dtype=float))))

    def to_dict(self) -> Dict[str, Any]:
        """JSON schema: {domain, depth, boxes: [{lower, upper}]}"""
        return {
            "domain": self.domain.to_dict(),
            "depth": self.depth,
            "boxes": [box.to_dict() for box in self.boxes],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any], samples_per_box: int = DEFAULT_SAMPLES_PER_BOX) -> "BoxCovering":
        depth = int(data["depth"])
        domain = Box(data["domain"]["lower"], data["domain"]["upper"], 0)
        boxes = [Box(b["lower"], b["upper"], depth) for b in data["boxes"]]
        return cls(boxes=boxes, domain=domain, depth=depth, samples_per_box=samples_per_box)


def subdivide(cov: BoxCovering) -> BoxCovering:
    """Split every box once; depth increases by one"""
    boxes = [child for box in cov.boxes for child in box.split()]
    return BoxCovering(boxes=boxes, domain=cov.domain, depth=cov.depth + 1,
                       samples_per_box=cov.samples_per_box, history=list(cov.history))


def _unit_samples(n: int, count: int, seed: int) -> np.ndarray:
    sampler = qmc.Halton(d=n, scramble=True, seed=seed)
    return sampler.random(count)


def select(cov: BoxCovering,
           problem: MopProblem,
           cfg: Optional[DescentConfig] = None,
           steps: int = DEFAULT_STEPS,
           seed: int = 0,
           workers: Optional[int] = None) -> BoxCovering:
    """
    Keep the boxes that contain at least one advanced sample

    Every box receives samples_per_box Halton points; each point takes at
    most `steps` accepted descent steps. Failed runs keep their last iterate.
    """
    if steps < 1:
        raise PreconditionError(f"steps must be at least 1, got {steps}")
    if problem.n != cov.domain.n:
        raise PreconditionError(f"problem dimension {problem.n} does not match domain dimension {cov.domain.n}")
    cfg = cfg or DescentConfig()
    workers = workers or get_env_int("NSMOO_WORKERS", 1)
    if not cov.boxes:
        return BoxCovering(boxes=[], domain=cov.domain, depth=cov.depth,
                           samples_per_box=cov.samples_per_box, history=list(cov.history))

    unit = _unit_samples(problem.n, cov.samples_per_box, seed)
    starts = [box.lower + unit[s] * (box.upper - box.lower)
              for box in cov.boxes for s in range(unit.shape[0])]

    def advance(x0: np.ndarray) -> np.ndarray:
        try:
            return solve(problem, x0, cfg, max_steps=steps).final_x
        except NsmooError as e:
            logger.debug(f"sample at {x0} kept in place: {e}")
            return x0

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            finals = list(pool.map(advance, starts))
    else:
        finals = [advance(x0) for x0 in starts]

    hit = cov.locate(np.vstack(finals))
    kept = [box for box, keep in zip(cov.boxes, hit) if keep]
    logger.debug(f"depth {cov.depth}: kept {len(kept)}/{len(cov.boxes)} boxes")
    return BoxCovering(boxes=kept, domain=cov.domain, depth=cov.depth,
                       samples_per_box=cov.samples_per_box, history=list(cov.history) + [len(kept)])


def cover(problem: MopProblem,
          domain: Box,
          target_depth: int,
          cfg: Optional[DescentConfig] = None,
          seed: int = 0,
          samples_per_box: int = DEFAULT_SAMPLES_PER_BOX,
          steps: int = DEFAULT_STEPS,
          workers: Optional[int] = None) -> BoxCovering:
    """
    Box covering of the Pareto set at target_depth

    Raises:
        ParetoSetLostError: selection emptied the covering
    """
    if target_depth < 1:
        raise PreconditionError(f"target_depth must be at least 1, got {target_depth}")
    as_vector(domain.lower, problem.n, name="domain.lower")
    cov = BoxCovering.from_domain(domain, samples_per_box)
    for depth in range(1, target_depth + 1):
        cov = select(subdivide(cov), problem, cfg, steps, seed, workers)
        if not cov.boxes:
            raise ParetoSetLostError(depth)
        logger.info(f"📦 depth {depth}: {len(cov.boxes)} boxes, volume {cov.volume():.4g}")
    return cov
