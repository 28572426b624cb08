"""Command-line front end."""

from .commands import build_parser, cmd_dump_init, cmd_experiment, cmd_verify, main, run_one
from .run_config import EXPERIMENTS, RunConfig, resolve_run_config
from .verify import CHECKS, SUITES, Verdict, list_checks, run_suite

__all__ = [
    "CHECKS",
    "EXPERIMENTS",
    "RunConfig",
    "SUITES",
    "Verdict",
    "build_parser",
    "cmd_dump_init",
    "cmd_experiment",
    "cmd_verify",
    "list_checks",
    "main",
    "resolve_run_config",
    "run_one",
    "run_suite",
]
