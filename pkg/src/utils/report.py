"""Experiment reports: metadata, per-step metric traces and summary scalars."""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .logger import get_logger

logger = get_logger(__name__)

REPORT_FORMATS = ("csv", "json", "both")
CSV_FLOAT_FORMAT = "%.17g"


def report_stem(probe: str, mode: str, seed: int) -> str:
    """File stem encoding probe name, mode and seed."""
    mode = str(mode).replace("/", "_").replace(" ", "_")
    return f"{probe}-{mode}-{seed}"


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and enums to JSON-native values.

    Non-finite floats become the strings ``"nan"``, ``"inf"`` or ``"-inf"``.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if hasattr(value, "value") and isinstance(getattr(value, "value"), (str, int)):
        return value.value
    if isinstance(value, Path):
        return str(value)
    return value


@dataclass
class ExperimentReport:
    """Result of one probe or training run.

    Attributes:
        name: Probe name
        metadata: Resolved configuration, seed and mode
        traces: Metric name -> list of (step, value), steps strictly increasing
        summary: Scalar results
        diverged: Whether the run was halted by divergence
    """

    name: str
    metadata: Dict[str, Any] = field(default_factory=dict)
    traces: Dict[str, List[Tuple[int, float]]] = field(default_factory=dict)
    summary: Dict[str, Any] = field(default_factory=dict)
    diverged: bool = False

    def record(self, trace: str, step: int, value: float) -> None:
        """Append one point; steps must increase within a trace."""
        points = self.traces.setdefault(trace, [])
        if points and step <= points[-1][0]:
            raise ValueError(
                f"trace {trace!r} steps must increase: got {step} after {points[-1][0]}"
            )
        points.append((int(step), float(value)))

    def record_many(self, step: int, values: Dict[str, float]) -> None:
        for trace, value in values.items():
            self.record(trace, step, value)

    def steps(self, trace: str) -> List[int]:
        return [s for s, _ in self.traces[trace]]

    def values(self, trace: str) -> List[float]:
        return [v for _, v in self.traces[trace]]

    def last(self, trace: str) -> float:
        return self.traces[trace][-1][1]

    def first(self, trace: str) -> float:
        return self.traces[trace][0][1]

    def mark_diverged(self, step: int, reason: str) -> None:
        self.diverged = True
        self.summary["diverged_at_step"] = int(step)
        self.summary["divergence_reason"] = reason
        logger.warning(f"{self.name}: diverged at step {step} ({reason})")

    def merge(self, other: "ExperimentReport", prefix: str) -> None:
        """Copy another report's traces and summary under ``prefix/``."""
        for trace, points in other.traces.items():
            self.traces[f"{prefix}/{trace}"] = list(points)
        for key, value in other.summary.items():
            self.summary[f"{prefix}/{key}"] = value
        self.diverged = self.diverged or other.diverged

    def trace_frame(self, trace: str) -> pd.DataFrame:
        points = self.traces[trace]
        return pd.DataFrame(
            {"step": [s for s, _ in points], trace: [v for _, v in points]}
        )

    def to_dict(self) -> Dict[str, Any]:
        return to_jsonable(
            {
                "name": self.name,
                "metadata": self.metadata,
                "summary": self.summary,
                "diverged": self.diverged,
                "traces": {k: [[s, v] for s, v in pts] for k, pts in self.traces.items()},
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "ExperimentReport":
        traces = {
            k: [(int(s), float(v)) for s, v in pts] for k, pts in payload.get("traces", {}).items()
        }
        return cls(
            name=payload["name"],
            metadata=payload.get("metadata", {}),
            traces=traces,
            summary=payload.get("summary", {}),
            diverged=bool(payload.get("diverged", False)),
        )

    def write(self, out_dir: Union[str, Path], stem: str, fmt: str = "both") -> List[Path]:
        """Write ``<stem>.json`` and/or one ``<stem>-<trace>.csv`` per trace.

        Returns:
            Paths written, JSON first
        """
        if fmt not in REPORT_FORMATS:
            raise ValueError(f"format must be one of {REPORT_FORMATS}, got {fmt!r}")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written: List[Path] = []

        if fmt in ("json", "both"):
            path = out / f"{stem}.json"
            path.write_text(self.to_json() + "\n")
            written.append(path)
        if fmt in ("csv", "both"):
            for trace in sorted(self.traces):
                path = out / f"{stem}-{_safe(trace)}.csv"
                self.trace_frame(trace).to_csv(
                    path, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n"
                )
                written.append(path)

        logger.debug(f"Wrote {len(written)} report files for {self.name} to {out}")
        return written


def load_report(path: Union[str, Path]) -> ExperimentReport:
    return ExperimentReport.from_dict(json.loads(Path(path).read_text()))


def _safe(trace: str) -> str:
    return trace.replace("/", "_").replace(" ", "_")
