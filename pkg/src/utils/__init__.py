"""Utility modules: configuration, logging, timing, errors and reports."""

from .config import Config
from .errors import (
    ConfigError,
    FormatError,
    IDInitError,
    ShapeError,
    TrainingUnsupportedError,
    UnsupportedShapeError,
    UnsupportedSizeError,
)
from .logger import get_logger, setup_logger
from .report import ExperimentReport, load_report, report_stem, to_jsonable
from .time_utils import Stopwatch, TimeUtils

__all__ = [
    "Config",
    "ConfigError",
    "ExperimentReport",
    "FormatError",
    "IDInitError",
    "ShapeError",
    "Stopwatch",
    "TimeUtils",
    "TrainingUnsupportedError",
    "UnsupportedShapeError",
    "UnsupportedSizeError",
    "get_logger",
    "load_report",
    "report_stem",
    "setup_logger",
    "to_jsonable",
]
