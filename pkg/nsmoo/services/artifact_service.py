# nsmoo/services/artifact_service.py
"""
Artifact writer: CSV tables through pandas, JSON through a fixed-precision
serializer so repeated runs produce identical bytes
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    text = format(x, ".17g")
    # keep floats recognizable as floats
    if all(ch not in text for ch in ".eEn"):
        text += ".0"
    return text


def to_json(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """Serialize nested dicts/lists/numpy values; floats with 17 significant digits"""
    pad = " " * (indent * (_level + 1))
    close = " " * (indent * _level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.bool_, bool)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (np.integer, int)):
        return str(int(obj))
    if isinstance(obj, (np.floating, float)):
        return format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {to_json(v, indent, _level + 1)}"
                 for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{close}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(to_json(v, indent, _level + 1) for v in obj) + "]"
        items = [f"{pad}{to_json(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{close}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


class ArtifactService:
    """Writes the files of one run into an output directory"""

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.written: List[Path] = []

    def _target(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self._target(name)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        self.written.append(path)
        logger.debug(f"💾 wrote {path} ({len(frame)} rows)")
        return path

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self._target(name)
        path.write_text(to_json(payload) + "\n", encoding="utf-8")
        self.written.append(path)
        logger.debug(f"💾 wrote {path}")
        return path


def read_json(path: Union[str, Path]) -> Any:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path)
