"""Command-line front end: dump-init, verify and experiment.

Exit codes: 0 success, 1 verification failure, 2 usage or configuration error.
"""

import argparse
import json
import sys
import typing
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from ..initializers import InitMethod, InitSpec, construct, construct_kernel
from ..tensor_core import write_matrix_binary, write_matrix_csv
from ..utils import (
    Config,
    ConfigError,
    IDInitError,
    Stopwatch,
    TimeUtils,
    get_logger,
    report_stem,
    setup_logger,
    to_jsonable,
)
from .run_config import EXPERIMENTS, FORMATS, RunConfig, resolve_run_config
from .verify import SUITES, list_checks, run_suite

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2

USAGE_ERRORS = (IDInitError, ValidationError, FileNotFoundError)


# -- parser -------------------------------------------------------------------


def _flag_type(annotation: Any) -> Tuple[Any, bool]:
    """Scalar argparse type for a pydantic field annotation, and whether it is a list."""
    origin = typing.get_origin(annotation)
    if origin is typing.Union:
        inner = [a for a in typing.get_args(annotation) if a is not type(None)]
        return _flag_type(inner[0])
    if origin in (list, List, tuple):
        args = typing.get_args(annotation)
        return (args[0] if args else str), True
    return annotation, False


def _add_param_flags(parser: argparse.ArgumentParser, name: str) -> None:
    model = EXPERIMENTS[name]
    group = parser.add_argument_group(f"{name} parameters")
    defaults = model()
    for field_name, field in model.model_fields.items():
        flag = f"--{field_name.replace('_', '-')}"
        kind, is_list = _flag_type(field.annotation)
        help_text = f"(default: {getattr(defaults, field_name)!r})"
        if kind is bool:
            group.add_argument(
                flag, dest=field_name, action=argparse.BooleanOptionalAction, default=None, help=help_text
            )
        elif is_list:
            group.add_argument(flag, dest=field_name, type=kind, nargs="+", default=None, help=help_text)
        else:
            group.add_argument(flag, dest=field_name, type=kind, default=None, help=help_text)


def _parse_seeds(value: str) -> List[int]:
    try:
        return [int(s) for s in value.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="idinit",
        description="Identity-preserving initializers: construct, verify and run experiments",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py dump-init --method idi --dout 4 --din 2 --tau 1 --loose 0
  python main.py verify all
  python main.py experiment toy --r 1
  python main.py experiment rank --init idinit --seeds 0,1,2 --workers 3
        """,
    )
    parser.add_argument("--log-level", default=None, help="Override logging.level")
    commands = parser.add_subparsers(dest="command", required=True)

    dump = commands.add_parser("dump-init", help="Construct an initializer and write it to disk")
    dump.add_argument("--method", required=True, choices=[m.value for m in InitMethod])
    dump.add_argument("--dout", type=int, help="Rows of a matrix")
    dump.add_argument("--din", type=int, help="Columns of a matrix")
    dump.add_argument("--n", type=int, help="Square size (sets --dout and --din)")
    dump.add_argument("--k", type=int, help="Kernel size")
    dump.add_argument("--cin", type=int, help="Kernel input channels")
    dump.add_argument("--cout", type=int, help="Kernel output channels")
    dump.add_argument("--tau", type=float, default=1.0)
    dump.add_argument("--epsilon", type=float, default=1e-6)
    dump.add_argument("--loose", type=float, default=0.0, help="Loose-condition noise std")
    dump.add_argument("--seed", type=int, default=0)
    dump.add_argument("--out", default=".", help="Output directory (default: current)")

    verify = commands.add_parser("verify", help="Run property-check suites")
    verify.add_argument("suite", nargs="?", default="all", choices=SUITES)
    verify.add_argument("--list", action="store_true", help="List checks without running them")
    verify.add_argument("--out", default=None, help="Also write the JSON verdict to this file")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="YAML/JSON file with experiment sections")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--seeds", type=_parse_seeds, default=None, help="Comma-separated seeds")
    common.add_argument("--workers", type=int, default=None, help="Parallel seed workers")
    common.add_argument("--out", default=None, help="Output directory")
    common.add_argument("--format", dest="fmt", choices=FORMATS, default=None)
    common.add_argument("--progress", action="store_true", help="Show progress bars")
    common.add_argument(
        "--save-weights",
        action="store_true",
        help="Write final weights and any --snapshot-epochs under <out>/weights",
    )

    experiment = commands.add_parser("experiment", help="Run a named experiment")
    names = experiment.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sub = names.add_parser(name, parents=[common], help=f"{name} experiment")
        _add_param_flags(sub, name)
    return parser


# -- dump-init ----------------------------------------------------------------


def _require_positive(**dims: int) -> None:
    bad = {name: value for name, value in dims.items() if value < 1}
    if bad:
        raise ConfigError(f"dimensions must be positive, got {bad}")


def cmd_dump_init(args: argparse.Namespace) -> Dict[str, Any]:
    """Construct one initializer and write CSV, binary and a JSON sidecar.

    Kernels are written as their (c_out, k*k*c_in) matrix view.
    """
    spec = InitSpec(
        method=args.method, tau=args.tau, epsilon=args.epsilon, loose_eps=args.loose, seed=args.seed
    )
    is_kernel = spec.method.is_kernel or args.k is not None
    sidecar: Dict[str, Any] = {"spec": spec.model_dump(mode="json")}

    if is_kernel:
        if None in (args.k, args.cin, args.cout):
            raise ConfigError(f"{spec.method.value} needs --k, --cin and --cout")
        _require_positive(k=args.k, cin=args.cin, cout=args.cout)
        kernel = construct_kernel(spec, args.k, args.cin, args.cout)
        matrix = kernel.to_matrix()
        sidecar.update(kind="kernel", kernel_shape=list(kernel.shape))
    else:
        d_out = args.n if args.n is not None else args.dout
        d_in = args.n if args.n is not None else args.din
        if d_out is None or d_in is None:
            raise ConfigError(f"{spec.method.value} needs --dout and --din (or --n)")
        _require_positive(dout=d_out, din=d_in)
        matrix = construct(spec, d_out, d_in)
        sidecar["kind"] = "matrix"
    sidecar["shape"] = list(matrix.shape)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = spec.method.value
    csv_path = write_matrix_csv(out / f"{stem}.csv", matrix)
    bin_path = write_matrix_binary(out / f"{stem}.bin", matrix)
    meta_path = out / f"{stem}.json"
    meta_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")

    logger.info(f"dump-init {stem} {matrix.shape} -> {out}")
    return {"csv": str(csv_path), "binary": str(bin_path), "sidecar": str(meta_path), **sidecar}


# -- verify -------------------------------------------------------------------


def cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        listing = [
            {"name": c.name, "suite": c.suite, "description": c.description}
            for c in list_checks(args.suite)
        ]
        print(json.dumps(listing, indent=2))
        return EXIT_OK

    verdict = run_suite(args.suite)
    payload = json.dumps(to_jsonable(verdict.to_dict()), indent=2, sort_keys=True)
    print(payload)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(payload + "\n")
    return EXIT_OK if verdict.passed else EXIT_VERIFY_FAILED


# -- experiment ---------------------------------------------------------------


def run_dir(run: RunConfig, seed: int, stamp: str) -> Path:
    """Where one seed's files go.

    ``--out`` with a single seed is used as is; with several seeds each gets a
    ``<experiment>-<seed>`` child. Without ``--out`` the directory is
    ``<base_dir>/<experiment>-<seed>-<stamp>``.
    """
    if run.out_dir is None:
        return Path(run.base_dir) / f"{run.experiment}-{seed}-{stamp}"
    if len(run.seeds) == 1:
        return Path(run.out_dir)
    return Path(run.out_dir) / f"{run.experiment}-{seed}"


def run_one(job: Dict[str, Any]) -> Dict[str, Any]:
    """Execute a single seed and write its files; picklable for process pools."""
    name, seed = job["experiment"], job["seed"]
    params = EXPERIMENTS[name].model_validate(job["params"])
    out = Path(job["out_dir"])
    weights_dir = str(out / "weights") if job["save_weights"] else None

    with Stopwatch() as watch:
        report = params.run(seed, progress=job["progress"], weights_dir=weights_dir)
    report.metadata["config"] = job["echo"]

    stem = report_stem(name, params.mode_label(), seed)
    written = report.write(out, stem, job["format"])
    (out / "timing.json").write_text(json.dumps(watch.as_dict(), indent=2) + "\n")

    logger.info(f"{name} seed={seed} finished in {watch.elapsed_s:.2f}s -> {out}")
    return {
        "experiment": name,
        "seed": seed,
        "out_dir": str(out),
        "files": [str(p) for p in written],
        "weights_dir": weights_dir,
        "diverged": report.diverged,
        "summary": report.summary,
    }


def cmd_experiment(args: argparse.Namespace, defaults: Optional[Config]) -> List[Dict[str, Any]]:
    name = args.experiment
    overrides = {f: getattr(args, f, None) for f in EXPERIMENTS[name].model_fields}
    seeds = args.seeds or ([args.seed] if args.seed is not None else None)
    file_config = Config(args.config) if args.config else None

    run = resolve_run_config(
        name,
        defaults=defaults,
        file_config=file_config,
        overrides=overrides,
        seeds=seeds,
        out_dir=args.out,
        fmt=args.fmt,
        workers=args.workers,
        progress=args.progress,
        save_weights=args.save_weights,
    )

    stamp = TimeUtils.run_stamp()
    jobs = [
        {
            "experiment": name,
            "params": run.params.model_dump(),
            "seed": seed,
            "out_dir": str(run_dir(run, seed, stamp)),
            "format": run.format,
            "progress": run.progress and run.workers == 1,
            "save_weights": run.save_weights,
            "echo": run.echo(seed),
        }
        for seed in run.seeds
    ]

    if run.workers > 1 and len(jobs) > 1:
        logger.info(f"{name}: {len(jobs)} seeds on {run.workers} workers")
        with ProcessPoolExecutor(max_workers=min(run.workers, len(jobs))) as pool:
            results = list(pool.map(run_one, jobs))
    else:
        results = [run_one(job) for job in jobs]

    for result in results:
        print(json.dumps(to_jsonable(result), sort_keys=True))
    return results


# -- entry point --------------------------------------------------------------


def _load_defaults() -> Optional[Config]:
    try:
        return Config()
    except ConfigError as e:
        logger.warning(f"Default config unavailable, using built-in defaults: {e}")
        return None


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    defaults = _load_defaults()
    level = args.log_level or (defaults.get("logging.level", "INFO") if defaults else "INFO")
    log_file = defaults.get("logging.file") if defaults else None
    setup_logger("idinit", log_level=level, log_file=log_file)

    try:
        if args.command == "dump-init":
            print(json.dumps(cmd_dump_init(args), sort_keys=True))
            return EXIT_OK
        if args.command == "verify":
            return cmd_verify(args)
        cmd_experiment(args, defaults)
        return EXIT_OK
    except USAGE_ERRORS as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
