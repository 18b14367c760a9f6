import json
import math

import numpy as np
import pytest

from src.circle_fourier import PiecewiseArcs, Sampled
from src.weight_loader import _matrices, load_weight, parse_weight, save_weight, weight_to_document
from src.weights import coupled_weight, three_arc_perturbation


def _write(path, data):
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_load_piecewise(tmp_path):
    """Test loading a piecewise weight file."""
    path = _write(
        tmp_path / "w.json",
        {
            "kind": "piecewise",
            "arcs": [[0.0, math.pi], [math.pi, 2 * math.pi]],
            "values": [
                [[1, 0], [0, 1], [0, -1], [2, 0]],
                [[3, 0], [0, 0], [0, 0], [1, 0]],
            ],
        },
    )
    W = load_weight(path)
    assert isinstance(W, PiecewiseArcs)
    np.testing.assert_allclose(W.values[0], [[1, 1j], [-1j, 2]])
    assert W.partition.measures == pytest.approx([0.5, 0.5])


def test_load_sampled(tmp_path):
    """Test loading a sampled weight file."""
    samples = [[[1.0 + k, 0.0]] for k in range(4)]
    path = _write(tmp_path / "s.json", {"kind": "sampled", "grid_size": 4, "offset": 0.5, "samples": samples})
    W = load_weight(path)
    assert isinstance(W, Sampled)
    assert W.offset == 0.5
    np.testing.assert_allclose(W.samples[:, 0, 0], [1, 2, 3, 4])


def test_save_and_load(tmp_path):
    """Test that a saved piecewise weight loads back unchanged."""
    W = three_arc_perturbation().map_values(lambda v: np.eye(2) + 0.5 * v)
    path = save_weight(W, str(tmp_path / "three.json"))
    loaded = load_weight(path)
    np.testing.assert_allclose(loaded.values, W.values)


def test_document_of_sampled():
    """Test the document form of a sampled weight."""
    doc = weight_to_document(coupled_weight(1.0, 8))
    assert doc["kind"] == "sampled"
    assert doc["grid_size"] == 8
    assert len(doc["samples"][0]) == 4
    W = parse_weight(doc)
    np.testing.assert_allclose(W.samples, coupled_weight(1.0, 8).samples)


def test_malformed_names_file(tmp_path):
    """Test that malformed documents raise ValueError with the file name."""
    path = _write(tmp_path / "bad.json", {"kind": "piecewise", "arcs": [[0.0, 1.0]], "values": []})
    with pytest.raises(ValueError, match="bad.json"):
        load_weight(path)


def test_non_square_matrix(tmp_path):
    """Test that a matrix with a non-square entry count is rejected."""
    path = _write(
        tmp_path / "odd.json",
        {"kind": "piecewise", "arcs": [[0.0, 2 * math.pi]], "values": [[[1, 0], [0, 0], [1, 0]]]},
    )
    with pytest.raises(ValueError, match="odd.json"):
        load_weight(path)


def test_grid_size_mismatch(tmp_path):
    """Test that the declared grid size must match the samples."""
    path = _write(tmp_path / "g.json", {"kind": "sampled", "grid_size": 8, "samples": [[[1, 0]]] * 4})
    with pytest.raises(ValueError):
        load_weight(path)


def test_partition_not_covering(tmp_path):
    """Test that arcs must cover the circle."""
    path = _write(
        tmp_path / "gap.json",
        {"kind": "piecewise", "arcs": [[0.0, 1.0]], "values": [[[1, 0]]]},
    )
    with pytest.raises(ValueError, match="gap.json"):
        load_weight(path)


def test_invalid_json(tmp_path):
    """Test that broken JSON raises ValueError."""
    path = tmp_path / "x.json"
    path.write_text("[", encoding="utf-8")
    with pytest.raises(ValueError):
        load_weight(str(path))


def test_missing_file(tmp_path):
    """Test that a missing file raises OSError."""
    with pytest.raises(OSError):
        load_weight(str(tmp_path / "missing.json"))


def test_empty_matrix_rejected(tmp_path):
    """Test that a matrix with no entries raises ValueError instead of IndexError."""
    document = {"kind": "piecewise", "arcs": [[0.0, 2 * math.pi]], "values": [[]]}
    path = _write(tmp_path / "empty.json", document)
    with pytest.raises(ValueError, match="empty.json"):
        load_weight(path)


def test_empty_matrix_bypassing_schema():
    """Test that the matrix decoder itself refuses an entry-less stack."""
    with pytest.raises(ValueError):
        _matrices([[]])
