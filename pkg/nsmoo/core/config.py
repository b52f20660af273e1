#!/usr/bin/env python3
"""
Run Configuration
TOML run files validated by pydantic models; errors carry the offending line
"""
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from nsmoo.core.errors import ConfigError
from nsmoo.core.utils import get_env_value
from nsmoo.solvers.continuation import PathConfig
from nsmoo.solvers.descent import DescentConfig

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "results"


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class ProblemSection(_Section):
    name: str
    params: Dict[str, Any] = Field(default_factory=dict)


class SolveSection(_Section):
    x0: List[float]
    max_steps: Optional[int] = Field(None, ge=1)


class CoverSection(_Section):
    lower: List[float]
    upper: List[float]
    depth: int = Field(..., ge=1)
    samples_per_box: int = Field(10, ge=1)
    steps: int = Field(10, ge=1)
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _check_box(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper must have equal length")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("lower must be strictly below upper in every coordinate")
        return self


class PsEntry(_Section):
    z: List[float]
    r: List[float]

    @field_validator("r")
    @classmethod
    def _positive(cls, r: List[float]) -> List[float]:
        if any(v <= 0.0 for v in r):
            raise ValueError("target direction r must be strictly positive")
        return r


class ScalarizeSection(_Section):
    x0: List[float]
    weights: List[List[float]] = Field(default_factory=list)
    weight_count: Optional[int] = Field(None, ge=1, description="uniform bi-objective grid alpha_1 = 1 .. 0")
    ps: List[PsEntry] = Field(default_factory=list)
    warm_start: bool = False

    @model_validator(mode="after")
    def _nonempty(self):
        if not self.weights and not self.ps and self.weight_count is None:
            raise ValueError("give weights, weight_count or ps entries")
        return self


class PathSection(PathConfig):
    pass


class InferSection(_Section):
    data: str
    basis: Literal["poly2", "poly3", "radial2"] = "poly2"
    k: int = Field(2, ge=1)


class RunConfig(_Section):
    """One run file: problem, solver parameters and the command sections"""
    problem: Optional[ProblemSection] = None
    solver: DescentConfig = Field(default_factory=DescentConfig)
    seed: int = Field(0, ge=0)
    output_dir: Optional[str] = None
    solve: Optional[SolveSection] = None
    cover: Optional[CoverSection] = None
    scalarize: Optional[ScalarizeSection] = None
    path: Optional[PathSection] = None
    infer: Optional[InferSection] = None

    def require(self, section: str) -> Any:
        value = getattr(self, section)
        if value is None:
            raise ConfigError(f"missing [{section}] section")
        return value

    def require_problem(self) -> ProblemSection:
        return self.require("problem")

    def with_overrides(self, seed: Optional[int] = None, output_dir: Optional[str] = None) -> "RunConfig":
        updates: Dict[str, Any] = {}
        if seed is not None:
            updates["seed"] = seed
        if output_dir is not None:
            updates["output_dir"] = output_dir
        return self.model_copy(update=updates) if updates else self

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir or get_env_value("NSMOO_OUTPUT_DIR", DEFAULT_OUTPUT_DIR))


_HEADER = re.compile(r"^\s*\[+\s*([^\]]+?)\s*\]+")
_KEY = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*=")


def locate_key(text: str, loc: Sequence[Union[str, int]]) -> Optional[int]:
    """1-based line of the key addressed by a validation location, if found"""
    keys = [str(p) for p in loc if isinstance(p, str)]
    if not keys:
        return None
    table, key = ".".join(keys[:-1]), keys[-1]
    current = ""
    header_line = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        header = _HEADER.match(line)
        if header:
            current = header.group(1)
            if current == ".".join(keys) or (header_line is None and current == keys[0]):
                header_line = lineno
            continue
        m = _KEY.match(line)
        if m and m.group(1) == key and current == table:
            return lineno
    return header_line


def _format_validation(e: ValidationError, text: str) -> Tuple[str, Optional[int]]:
    err = e.errors()[0]
    loc = err.get("loc", ())
    where = ".".join(str(p) for p in loc)
    message = f"{where}: {err['msg']}" if where else err["msg"]
    return message, locate_key(text, loc)


def parse_config(text: str) -> RunConfig:
    """
    Parse TOML text into a RunConfig

    Raises:
        ConfigError: syntax error or schema violation, with its line number
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        m = re.search(r"line (\d+)", str(e))
        raise ConfigError(f"malformed TOML: {e}", int(m.group(1)) if m else None) from e
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as e:
        message, line = _format_validation(e, text)
        raise ConfigError(message, line) from e


def load_config(path: Union[str, Path]) -> RunConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    logger.debug(f"📄 loading config {path}")
    return parse_config(path.read_text(encoding="utf-8"))
