"""Parameter snapshots: one binary matrix per weight plus a JSON manifest."""

import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Union

import numpy as np

from ..tensor_core import ConvKernel, read_matrix_binary, write_matrix_binary, write_matrix_csv
from ..utils import FormatError, get_logger
from .params import ParamSet, parse_name

logger = get_logger(__name__)

MANIFEST = "manifest.json"
PathLike = Union[str, Path]


def save_snapshot(params: ParamSet, directory: PathLike) -> Path:
    """Write every array and kernel of ``params`` under ``directory``.

    Gates are stored as 1x1 matrices and kernels through their matrix view;
    the manifest records the original shape of each entry.

    Returns:
        Path of the manifest
    """
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    entries: List[Dict[str, Any]] = []

    for name, array in params.arrays.items():
        path = write_matrix_binary(out / f"{name}.bin", np.asarray(array).reshape(array.shape or (1, 1)))
        entries.append(_entry(name, "array", list(array.shape), params.roles.get(name), path.name))
    for name, kernel in params.kernels.items():
        path = write_matrix_binary(out / f"{name}.bin", kernel.to_matrix())
        entries.append(_entry(name, "kernel", list(kernel.shape), params.roles.get(name), path.name))

    manifest = out / MANIFEST
    manifest.write_text(json.dumps({"entries": entries}, indent=2, sort_keys=True) + "\n")
    logger.debug(f"Saved snapshot with {len(entries)} entries to {out}")
    return manifest


def _entry(name: str, kind: str, shape: List[int], role, filename: str) -> Dict[str, Any]:
    layer, _ = parse_name(name)
    return {"name": name, "kind": kind, "layer": layer, "shape": shape, "role": role, "file": filename}


def load_snapshot(directory: PathLike) -> ParamSet:
    """Inverse of ``save_snapshot``; momentum buffers come back zeroed."""
    root = Path(directory)
    manifest_path = root / MANIFEST
    if not manifest_path.exists():
        raise FormatError(f"no snapshot manifest in {root}", field="manifest")
    manifest = json.loads(manifest_path.read_text())

    arrays: Dict[str, np.ndarray] = {}
    kernels: Dict[str, ConvKernel] = {}
    roles: Dict[str, str] = {}
    for entry in manifest.get("entries", []):
        matrix = read_matrix_binary(root / entry["file"])
        shape = tuple(entry["shape"])
        if entry["kind"] == "kernel":
            k_h, k_w, c_in, _ = shape
            kernels[entry["name"]] = ConvKernel.from_matrix(matrix, k_h, k_w, c_in)
        else:
            arrays[entry["name"]] = matrix.reshape(shape)
        if entry.get("role") is not None:
            roles[entry["name"]] = entry["role"]
    return ParamSet(arrays=arrays, kernels=kernels, roles=roles)


def export_weights_csv(params: ParamSet, directory: PathLike) -> List[Path]:
    """One CSV per 2-D weight (kernels via their matrix view), for distribution plots."""
    out = Path(directory)
    written = []
    for name, array in params.arrays.items():
        if array.ndim == 2:
            written.append(write_matrix_csv(out / f"{name}.csv", array))
    for name, kernel in params.kernels.items():
        written.append(write_matrix_csv(out / f"{name}.csv", kernel.to_matrix()))
    return written


def save_weights(
    final: ParamSet, snapshots: Mapping[int, ParamSet], directory: PathLike
) -> List[Path]:
    """Persist a training run's weights under ``directory``.

    Each requested epoch goes to ``epoch-<n>/`` and the final parameters to
    ``final/``, every one as a snapshot plus a ``csv/`` export.

    Returns:
        Manifest paths, epochs in ascending order and ``final`` last
    """
    root = Path(directory)
    targets = [(f"epoch-{epoch}", snapshots[epoch]) for epoch in sorted(snapshots)]
    targets.append(("final", final))

    manifests = []
    for label, params in targets:
        manifests.append(save_snapshot(params, root / label))
        export_weights_csv(params, root / label / "csv")
    logger.info(f"Saved {len(manifests)} weight sets to {root}")
    return manifests
