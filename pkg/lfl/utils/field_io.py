"""
Field storage utilities.

Binary field layout (``.lfld``), all integers little-endian:

    magic   8 bytes  b"LFLD1\\0\\0\\0"
    rank    u32
    sizes   rank x u32
    kind    u8       0 = real float64, 1 = complex128
    payload row-major, little-endian

Each field file has a JSON sidecar (``<name>.json``) holding the model it
was sampled on. Differential forms are stored as one field file per
component plus a JSON manifest listing the components.
"""

import json
import logging
import struct
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
from pydantic import ValidationError

from lfl.exceptions import ConfigError, GridMismatchError
from lfl.models.foliation import FoliatedModel
from lfl.services.exterior import DifferentialForm

logger = logging.getLogger(__name__)

MAGIC = b"LFLD1\0\0\0"
REAL, COMPLEX = 0, 1
PathLike = Union[str, Path]


def _sidecar(path: Path) -> Path:
    return path.with_suffix(".json")


def write_field(path: PathLike, values: np.ndarray, model: FoliatedModel = None) -> Path:
    """
    Write a real or complex field, plus the model sidecar when given.

    Returns:
        Path of the field file
    """
    path = Path(path)
    values = np.asarray(values)
    if model is not None and values.shape != model.shape:
        raise GridMismatchError(f"field shape {values.shape} does not match {model.describe()}")
    kind = COMPLEX if np.iscomplexobj(values) else REAL
    payload = np.ascontiguousarray(values, dtype="<c16" if kind == COMPLEX else "<f8")

    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack(f"<I{values.ndim}I", values.ndim, *values.shape))
        fh.write(struct.pack("<B", kind))
        fh.write(payload.tobytes(order="C"))
    if model is not None:
        _sidecar(path).write_text(model.model_dump_json(indent=2))
    logger.info(f"Field written to: {path}")
    return path


def read_field(path: PathLike) -> np.ndarray:
    """
    Read a ``.lfld`` field.

    Raises:
        ConfigError: on a missing file, bad magic or truncated payload
    """
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as e:
        raise ConfigError(f"cannot read field file {path}: {e}") from e

    if raw[:8] != MAGIC:
        raise ConfigError(f"{path} is not an LFLD1 field file")
    try:
        (rank,) = struct.unpack_from("<I", raw, 8)
        sizes = struct.unpack_from(f"<{rank}I", raw, 12)
        (kind,) = struct.unpack_from("<B", raw, 12 + 4 * rank)
    except struct.error as e:
        raise ConfigError(f"truncated header in {path}") from e
    if kind not in (REAL, COMPLEX):
        raise ConfigError(f"unknown value kind {kind} in {path}")

    dtype = np.dtype("<c16" if kind == COMPLEX else "<f8")
    offset = 13 + 4 * rank
    expected = int(np.prod(sizes, dtype=np.int64)) * dtype.itemsize
    if len(raw) - offset != expected:
        raise ConfigError(f"{path}: payload has {len(raw) - offset} bytes, header announces {expected}")
    values = np.frombuffer(raw, dtype=dtype, offset=offset).reshape(sizes)
    return values.astype(np.complex128 if kind == COMPLEX else np.float64)


def read_model(path: PathLike) -> FoliatedModel:
    """Model stored in the JSON sidecar of a field file."""
    sidecar = _sidecar(Path(path))
    try:
        return FoliatedModel.model_validate_json(sidecar.read_text())
    except OSError as e:
        raise ConfigError(f"missing model sidecar {sidecar}") from e
    except ValidationError as e:
        raise ConfigError(f"invalid model sidecar {sidecar}: {e}") from e


def load_field(path: PathLike, model: FoliatedModel) -> np.ndarray:
    """Read a field and make sure it was sampled on ``model``."""
    values = read_field(path)
    sidecar = _sidecar(Path(path))
    if sidecar.exists() and read_model(path) != model:
        raise ConfigError(f"{path} was sampled on {read_model(path).describe()}, not {model.describe()}")
    if values.shape != model.shape:
        raise GridMismatchError(f"field shape {values.shape} does not match {model.describe()}")
    return values


def _component_name(index: Tuple[int, ...]) -> str:
    return "c" + "_".join(str(a) for a in index) if index else "c"


def save_form(directory: PathLike, name: str, form: DifferentialForm, model: FoliatedModel) -> Path:
    """
    Write a form as ``<name>.manifest.json`` plus one field file per component.

    Returns:
        Path of the manifest
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files: Dict[str, str] = {}
    for index in form.indices:
        filename = f"{name}.{_component_name(index)}.lfld"
        write_field(directory / filename, form.components[index], model)
        files[",".join(str(a) for a in index)] = filename

    manifest = directory / f"{name}.manifest.json"
    manifest.write_text(
        json.dumps(
            {"dim": form.dim, "degree": form.degree, "model": model.model_dump(mode="json"), "components": files},
            indent=2,
        )
    )
    logger.info(f"Form {name} ({len(files)} components) written to: {manifest}")
    return manifest


def load_form(manifest: PathLike) -> Tuple[DifferentialForm, FoliatedModel]:
    """Inverse of ``save_form``."""
    manifest = Path(manifest)
    try:
        data = json.loads(manifest.read_text())
        model = FoliatedModel.model_validate(data["model"])
        dim, degree, files = int(data["dim"]), int(data["degree"]), data["components"]
    except (OSError, ValueError, KeyError, ValidationError) as e:
        raise ConfigError(f"invalid form manifest {manifest}: {e}") from e

    components = {}
    for key, filename in files.items():
        index = tuple(int(a) for a in key.split(",")) if key else ()
        components[index] = load_field(manifest.parent / filename, model).astype(np.complex128)
    return DifferentialForm(dim, degree, components), model
