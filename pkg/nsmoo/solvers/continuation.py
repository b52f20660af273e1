#!/usr/bin/env python3
"""
Regularization Path Continuation
Traces the Pareto critical set of min (L(x), ||x||_1) as lambda decreases from
lambda_max, one smooth piece per active set, with predictor-corrector steps and
bisection-localized activation/deactivation events
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from nsmoo.core.errors import CorrectorError, PredictorError, PreconditionError, SignViolationError
from nsmoo.core.utils import as_vector, sign_with_zero

logger = logging.getLogger(__name__)

NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
FD_STEP = 1e-5
COND_LIMIT = 1e12
DUAL_SLACK = 1e-12
PRIMARY_BRANCH_NOTE = "only the primary lambda-homotopy branch from (lambda_max, 0) is traced"


@dataclass
class SmoothObjective:
    """Smooth loss L with gradient and optional analytic Hessian"""
    n: int
    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]
    hessian_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = "L"

    def value(self, x: np.ndarray) -> float:
        return float(self.value_fn(x))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(self.gradient_fn(x), dtype=float).reshape(-1)

    def hessian(self, x: np.ndarray) -> np.ndarray:
        """Analytic Hessian if supplied, else symmetrized central differences of the gradient"""
        x = np.asarray(x, dtype=float)
        if self.hessian_fn is not None:
            return np.asarray(self.hessian_fn(x), dtype=float).reshape(self.n, self.n)
        H = np.empty((self.n, self.n))
        for j in range(self.n):
            h = FD_STEP * (1.0 + abs(x[j]))
            e = np.zeros(self.n)
            e[j] = h
            H[:, j] = (self.gradient(x + e) - self.gradient(x - e)) / (2.0 * h)
        return 0.5 * (H + H.T)


class PathConfig(BaseModel):
    """Step control of the path tracer"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    dlam_init: float = Field(0.1, gt=0.0)
    dlam_max: float = Field(0.5, gt=0.0)
    dlam_min: float = Field(1e-8, gt=0.0)
    grow: float = Field(1.2, ge=1.0)
    shrink: float = Field(0.5, gt=0.0, lt=1.0)
    lam_stop: float = Field(1e-6, ge=0.0)
    max_segments: int = Field(100, ge=1)
    max_steps: int = Field(10_000, ge=1)
    event_tol: float = Field(1e-9, gt=0.0)


class EventKind(str, Enum):
    ACTIVATE = "activate"
    DEACTIVATE = "deactivate"
    START = "start"
    END = "end"
    NONE = "none"


@dataclass
class PathEvent:
    """Kink of the path; index is 0-based, lam is where the change happens"""
    kind: EventKind
    lam: float
    index: int = -1
    sign: int = 0
    x: Optional[np.ndarray] = None

    @property
    def is_kink(self) -> bool:
        return self.kind in (EventKind.ACTIVATE, EventKind.DEACTIVATE)

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "lambda": self.lam,
                "index": self.index + 1 if self.index >= 0 else None, "sign": self.sign}


@dataclass
class PathSegment:
    active_set: List[int]
    signs: List[int]
    samples: List[Tuple[float, np.ndarray]] = field(default_factory=list)
    entry_event: Optional[PathEvent] = None
    exit_event: Optional[PathEvent] = None

    @property
    def lam_range(self) -> Tuple[float, float]:
        """(lowest, highest) lambda covered by the samples"""
        lams = [lam for lam, _ in self.samples]
        return min(lams), max(lams)


@dataclass
class RegPath:
    """Piecewise-smooth regularization path over (0, lambda_max]"""
    n: int
    lam_max: float
    segments: List[PathSegment] = field(default_factory=list)
    complete: bool = True
    budget_exhausted: bool = False
    diagnostic: str = PRIMARY_BRANCH_NOTE

    def events(self) -> List[PathEvent]:
        return [seg.entry_event for seg in self.segments
                if seg.entry_event is not None and seg.entry_event.is_kink]

    def samples(self) -> List[Tuple[float, np.ndarray, PathSegment]]:
        return [(lam, x, seg) for seg in self.segments for lam, x in seg.samples]

    def solution_at(self, lam: float, L: Optional[SmoothObjective] = None) -> np.ndarray:
        """
        Path point at lam: linear interpolation between neighbouring samples,
        polished by the corrector when L is given
        """
        if lam < 0.0:
            raise PreconditionError(f"lambda must be non-negative, got {lam}")
        if lam >= self.lam_max or not self.segments:
            return np.zeros(self.n)
        for seg in self.segments:
            lo, hi = seg.lam_range
            if lo <= lam <= hi:
                break
        else:
            seg = self.segments[-1]
        lams = np.array([s[0] for s in seg.samples])
        X = np.vstack([s[1] for s in seg.samples])
        # samples are stored with decreasing lambda
        guess = np.array([np.interp(lam, lams[::-1], X[::-1, i]) for i in range(self.n)])
        if L is None or not seg.active_set:
            return guess
        return corrector(L, seg.active_set, seg.signs, lam, guess, check_signs=False)

    def to_frame(self, L: SmoothObjective) -> pd.DataFrame:
        """Path table: lambda, active_set (1-based, ';'-joined), x_*, L_value, l1_norm"""
        rows = []
        for lam, x, seg in self.samples():
            row = {"lambda": lam, "active_set": ";".join(str(i + 1) for i in seg.active_set)}
            row.update({f"x_{i + 1}": v for i, v in enumerate(x)})
            row["L_value"] = L.value(x)
            row["l1_norm"] = float(np.abs(x).sum())
            rows.append(row)
        return pd.DataFrame(rows)


def lambda_max(L: SmoothObjective) -> float:
    """Smallest lambda for which x = 0 is critical: ||grad L(0)||_inf"""
    return float(np.max(np.abs(L.gradient(np.zeros(L.n)))))


def _restrict(x: np.ndarray, A: Sequence[int]) -> np.ndarray:
    out = np.zeros_like(x)
    out[list(A)] = x[list(A)]
    return out


def corrector(L: SmoothObjective,
              A: Sequence[int],
              signs: Sequence[int],
              lam: float,
              x_guess: Sequence[float],
              check_signs: bool = True) -> np.ndarray:
    """
    Newton's method on grad_A L(x) + lam * sigma = 0 with x_i = 0 off A

    Raises:
        CorrectorError: no convergence to 1e-10 within 50 iterations
        SignViolationError: converged x_A leaves the sign pattern sigma
    """
    if lam < 0.0:
        raise PreconditionError(f"lambda must be non-negative, got {lam}")
    A = list(A)
    sigma = np.asarray(signs, dtype=float)
    if sigma.shape[0] != len(A):
        raise PreconditionError("one sign per active index required")
    x = _restrict(as_vector(x_guess, L.n, name="x_guess"), A)
    if not A:
        return x

    for _ in range(NEWTON_MAX_ITER + 1):
        r = L.gradient(x)[A] + lam * sigma
        if np.max(np.abs(r)) <= NEWTON_TOL:
            break
        H = L.hessian(x)[np.ix_(A, A)]
        try:
            dx = np.linalg.solve(H, -r)
        except np.linalg.LinAlgError as e:
            raise CorrectorError(f"singular reduced Hessian at lambda={lam:.6g}") from e
        x[A] = x[A] + dx
    else:
        raise CorrectorError(f"Newton did not converge at lambda={lam:.6g} (residual {np.max(np.abs(r)):.3e})")

    if check_signs:
        bad = [i for i, s in zip(A, sigma) if s * x[i] < 0.0]
        if bad:
            raise SignViolationError(f"x_{bad[0] + 1}={x[bad[0]]:.3e} violates its sign at lambda={lam:.6g}",
                                     bad[0])
    return x


def tangent(L: SmoothObjective, A: Sequence[int], signs: Sequence[int], x: np.ndarray) -> np.ndarray:
    """dx/dlambda = -(hess_AA L)^-1 sigma on A, zero elsewhere"""
    A = list(A)
    t = np.zeros(L.n)
    if not A:
        return t
    H = L.hessian(x)[np.ix_(A, A)]
    if not np.all(np.isfinite(H)):
        raise PredictorError(f"reduced Hessian on {[i + 1 for i in A]} is not finite")
    s = np.linalg.svd(H, compute_uv=False)
    if s[0] == 0.0 or s[-1] * COND_LIMIT < s[0]:
        raise PredictorError(f"reduced Hessian on {[i + 1 for i in A]} is singular")
    t[A] = -np.linalg.solve(H, np.asarray(signs, dtype=float))
    return t


def predictor(L: SmoothObjective,
              A: Sequence[int],
              signs: Sequence[int],
              lam: float,
              x: Sequence[float],
              dlam: float) -> Tuple[float, np.ndarray]:
    """First-order step from (lam, x) to lam - dlam along the path tangent"""
    x = as_vector(x, L.n)
    if dlam == 0.0:
        return lam, x.copy()
    return lam - dlam, x - dlam * tangent(L, A, signs, x)


def _holds(L: SmoothObjective, i: int, in_active: bool, sign: int, lam: float, x: np.ndarray) -> bool:
    if in_active:
        return sign * x[i] > 0.0
    return abs(L.gradient(x)[i]) <= lam + DUAL_SLACK * (1.0 + lam)


def detect_event(L: SmoothObjective,
                 A: Sequence[int],
                 signs: Sequence[int],
                 lam_from: float,
                 x_from: np.ndarray,
                 lam_to: float,
                 x_to: Optional[np.ndarray] = None,
                 tol: float = 1e-9) -> PathEvent:
    """
    First kink met when moving from lam_from to lam_to on the active set A

    An active x_i crossing zero deactivates i; an inactive index reaching
    |grad L(x)_i| = lambda activates with sign -sign(grad L(x)_i). Every
    crossing is bisected to |dlambda| <= tol and reported at its last
    admissible lambda; the crossing nearest lam_from wins, lowest index on ties.
    """
    A = list(A)
    sign_of = dict(zip(A, signs))
    x_from = as_vector(x_from, L.n, name="x_from")
    if x_to is None:
        x_to = corrector(L, A, signs, lam_to, x_from, check_signs=False)

    def x_at(lam: float) -> np.ndarray:
        w = (lam - lam_from) / (lam_to - lam_from)
        return corrector(L, A, signs, lam, (1.0 - w) * x_from + w * x_to, check_signs=False)

    crossings: List[Tuple[float, int]] = []
    for i in range(L.n):
        active = i in sign_of
        if _holds(L, i, active, sign_of.get(i, 0), lam_to, x_to):
            continue
        good, bad = lam_from, lam_to
        while abs(good - bad) > tol:
            mid = 0.5 * (good + bad)
            if _holds(L, i, active, sign_of.get(i, 0), mid, x_at(mid)):
                good = mid
            else:
                bad = mid
        crossings.append((good, i))

    if not crossings:
        return PathEvent(kind=EventKind.NONE, lam=lam_to, x=x_to)

    direction = 1.0 if lam_from > lam_to else -1.0
    best = max(direction * c for c, _ in crossings)
    lam_e, index = min(((c, i) for c, i in crossings if direction * c >= best - tol), key=lambda t: t[1])
    x_e = x_at(lam_e) if lam_e != lam_from else x_from.copy()
    if index in sign_of:
        kind, sign = EventKind.DEACTIVATE, sign_of[index]
    else:
        kind, sign = EventKind.ACTIVATE, int(-sign_with_zero(L.gradient(x_e)[index]))
    logger.debug(f"event {kind.value} x_{index + 1} at lambda={lam_e:.12g}")
    return PathEvent(kind=kind, lam=lam_e, index=index, sign=sign, x=x_e)


def _apply_event(L: SmoothObjective, A: List[int], signs: List[int],
                 event: PathEvent) -> Tuple[List[int], List[int], np.ndarray]:
    pairs = dict(zip(A, signs))
    x = event.x.copy()
    if event.kind == EventKind.ACTIVATE:
        pairs[event.index] = event.sign
    else:
        pairs.pop(event.index)
    A_new = sorted(pairs)
    signs_new = [pairs[i] for i in A_new]
    if event.kind == EventKind.DEACTIVATE:
        x[event.index] = 0.0
        x = corrector(L, A_new, signs_new, event.lam, x, check_signs=False)
    return A_new, signs_new, x


def trace_path(L: SmoothObjective, cfg: Optional[PathConfig] = None) -> RegPath:
    """
    Regularization path from (lambda_max, 0) down to lam_stop

    Stagnation (dlambda below dlam_min) or exhausted budgets return the partial
    path with complete=False and the reason in diagnostic.
    """
    cfg = cfg or PathConfig()
    n = L.n
    lam = lambda_max(L)
    x = np.zeros(n)
    path = RegPath(n=n, lam_max=lam)

    if lam <= cfg.lam_stop:
        seg = PathSegment(active_set=[], signs=[], samples=[(lam, x.copy())],
                          entry_event=PathEvent(EventKind.START, lam),
                          exit_event=PathEvent(EventKind.END, 0.0))
        if lam > 0.0:
            seg.samples.append((0.0, x.copy()))
        path.segments.append(seg)
        logger.info(f"📉 path degenerate: lambda_max={lam:.3g}, x=0 throughout")
        return path

    g0 = L.gradient(x)
    i0 = int(np.argmax(np.abs(g0)))
    entry = PathEvent(EventKind.ACTIVATE, lam, index=i0, sign=int(-sign_with_zero(g0[i0])), x=x.copy())
    A, signs = [i0], [entry.sign]
    seg = PathSegment(active_set=list(A), signs=list(signs), samples=[(lam, x.copy())], entry_event=entry)
    dlam = cfg.dlam_init
    steps = 0

    while lam > cfg.lam_stop:
        steps += 1
        if steps > cfg.max_steps:
            path.complete = False
            path.budget_exhausted = True
            path.diagnostic = f"step budget {cfg.max_steps} exhausted at lambda={lam:.6g}; {PRIMARY_BRANCH_NOTE}"
            break
        target = max(lam - dlam, cfg.lam_stop)
        try:
            lam_p, guess = predictor(L, A, signs, lam, x, lam - target)
            x_p = corrector(L, A, signs, lam_p, guess, check_signs=False)
        except (PredictorError, CorrectorError) as e:
            dlam *= cfg.shrink
            logger.debug(f"step rejected at lambda={lam:.6g}: {e}; dlam -> {dlam:.3e}")
            if dlam < cfg.dlam_min:
                path.complete = False
                path.diagnostic = f"stagnation at lambda={lam:.6g}: {e}; {PRIMARY_BRANCH_NOTE}"
                break
            continue

        event = detect_event(L, A, signs, lam, x, lam_p, x_p, cfg.event_tol)
        dlam = min(dlam * cfg.grow, cfg.dlam_max)
        if event.kind == EventKind.NONE:
            lam, x = lam_p, x_p
            seg.samples.append((lam, x.copy()))
            continue

        seg.samples.append((event.lam, event.x.copy()))
        seg.exit_event = event
        path.segments.append(seg)
        if len(path.segments) >= cfg.max_segments:
            path.complete = False
            path.budget_exhausted = True
            path.diagnostic = f"segment budget {cfg.max_segments} exhausted; {PRIMARY_BRANCH_NOTE}"
            return path
        try:
            A, signs, x = _apply_event(L, A, signs, event)
        except CorrectorError as e:
            path.complete = False
            path.diagnostic = f"corrector failed after event at lambda={event.lam:.6g}: {e}; {PRIMARY_BRANCH_NOTE}"
            return path
        lam = event.lam
        seg = PathSegment(active_set=list(A), signs=list(signs), samples=[(lam, x.copy())], entry_event=event)

    seg.exit_event = PathEvent(EventKind.END, lam)
    path.segments.append(seg)
    logger.info(f"📉 path: {len(path.segments)} segments, {len(path.events())} events, complete={path.complete}")
    return path


def weighted_sum_residual(L: SmoothObjective, x: Sequence[float], lam: float) -> float:
    """
    Distance of 0 from a1 grad L(x) + a2 d||x||_1 (inf-norm),
    with a1 = 1/(1+lam) and a2 = lam/(1+lam)
    """
    x = as_vector(x, L.n)
    a1, a2 = 1.0 / (1.0 + lam), lam / (1.0 + lam)
    g = a1 * L.gradient(x)
    nonzero = x != 0.0
    res = np.where(nonzero, np.abs(g + a2 * np.sign(x)), np.maximum(0.0, np.abs(g) - a2))
    return float(np.max(res)) if res.size else 0.0
