import json
import logging
import math
from typing import Annotated, Literal

import numpy as np
from pydantic import BaseModel, Field, TypeAdapter, ValidationError

from src.circle_fourier import Arc, ArcPartition, MatrixCircleFunction, PiecewiseArcs, Sampled

logger = logging.getLogger(__name__)

# each matrix is a row-major list of [re, im] pairs
MatrixEntries = Annotated[list[tuple[float, float]], Field(min_length=1)]


class PiecewiseDocument(BaseModel):
    kind: Literal["piecewise"]
    arcs: list[tuple[float, float]] = Field(..., min_length=1)
    values: list[MatrixEntries] = Field(..., min_length=1)


class SampledDocument(BaseModel):
    kind: Literal["sampled"]
    grid_size: int = Field(..., ge=2)
    offset: float = Field(default=0.0, ge=0.0, lt=1.0)
    samples: list[MatrixEntries] = Field(..., min_length=2)


WeightDocument = Annotated[PiecewiseDocument | SampledDocument, Field(discriminator="kind")]
_documents = TypeAdapter(WeightDocument)


def _matrices(entries: list[MatrixEntries]) -> np.ndarray:
    arr = np.asarray(entries, dtype=float)
    if arr.ndim != 3 or arr.shape[1] == 0:
        raise ValueError("every matrix needs at least one [re, im] entry")
    size = arr.shape[1]
    n = math.isqrt(size)
    if n * n != size:
        raise ValueError(f"matrix with {size} entries is not square")
    return (arr[..., 0] + 1j * arr[..., 1]).reshape(arr.shape[0], n, n)


def _entries(values: np.ndarray) -> list[list[list[float]]]:
    flat = np.asarray(values, dtype=complex).reshape(values.shape[0], -1)
    return [[[float(z.real), float(z.imag)] for z in row] for row in flat]


def build_weight(document: PiecewiseDocument | SampledDocument) -> MatrixCircleFunction:
    """Matrix circle function described by a validated weight document."""
    if isinstance(document, PiecewiseDocument):
        partition = ArcPartition(tuple(Arc(a, b) for a, b in document.arcs))
        return PiecewiseArcs(partition, _matrices(document.values))
    samples = _matrices(document.samples)
    if samples.shape[0] != document.grid_size:
        raise ValueError(f"grid_size {document.grid_size} but {samples.shape[0]} samples given")
    return Sampled(samples, document.offset)


def parse_weight(data) -> MatrixCircleFunction:
    return build_weight(_documents.validate_python(data))


def weight_to_document(W: MatrixCircleFunction) -> dict:
    if isinstance(W, PiecewiseArcs):
        return {
            "kind": "piecewise",
            "arcs": [[arc.start, arc.start + arc.length] for arc in W.partition.arcs],
            "values": _entries(W.values),
        }
    return {
        "kind": "sampled",
        "grid_size": W.grid_size,
        "offset": W.offset,
        "samples": _entries(W.samples),
    }


def load_weight(path: str) -> MatrixCircleFunction:
    """Read a JSON weight file."""
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except OSError as e:
        logger.error(f"Failed to read weight file '{path}': {e}")
        raise
    except json.JSONDecodeError as e:
        raise ValueError(f"Weight file '{path}' is not valid JSON: {e}") from e
    try:
        W = parse_weight(data)
    except (ValidationError, ValueError) as e:
        raise ValueError(f"Weight file '{path}' is malformed: {e}") from e
    logger.info(f"Loaded {type(W).__name__} weight of dimension {W.dim} from '{path}'")
    return W


def save_weight(W: MatrixCircleFunction, path: str) -> str:
    try:
        with open(path, "w", encoding="utf-8") as f:
            json.dump(weight_to_document(W), f, indent=2)
    except OSError as e:
        logger.error(f"Failed to write weight file '{path}': {e}")
        raise
    return path
