"""Experiment reports and their JSON / CSV serialization."""

import csv
import io
import json
import logging
import os
from typing import Any

import numpy as np
from pydantic import BaseModel, Field

from src.evaluation import Claim, summarize_claims

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["experiment", "param_name", "param_value", "metric", "value", "tolerance", "pass"]


class Report(BaseModel):
    experiment: str
    seed: int
    config: dict[str, Any]
    values: dict[str, Any] = Field(default_factory=dict)
    diagnostics: dict[str, Any] = Field(default_factory=dict)
    claims: list[Claim] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(claim.passed for claim in self.claims)


def to_plain(value):
    """Arrays and complex numbers as nested lists with [re, im] pairs."""
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump())
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, list | tuple):
        return [to_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_plain(value.tolist())
    if isinstance(value, complex | np.complexfloating):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def report_to_json(report: Report) -> str:
    payload = to_plain(report)
    payload["summary"] = summarize_claims(report.claims)
    return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def report_rows(report: Report) -> list[dict]:
    rows = []
    for claim in report.claims:
        rows.append(
            {
                "experiment": report.experiment,
                "param_name": claim.param_name or "",
                "param_value": "" if claim.param_value is None else repr(claim.param_value),
                "metric": claim.metric,
                "value": repr(claim.value),
                "tolerance": "" if claim.tolerance is None else repr(claim.tolerance),
                "pass": str(claim.passed).lower(),
            }
        )
    return rows


def report_to_csv(report: Report) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(report_rows(report))
    return buffer.getvalue()


def emit_report(report: Report, out_dir: str, fmt: str = "json") -> str:
    """Write the report to `out_dir` and return the file path."""
    if fmt not in ("json", "csv"):
        raise ValueError(f"Unsupported report format: {fmt}")
    text = report_to_json(report) if fmt == "json" else report_to_csv(report)
    path = os.path.join(out_dir, f"{report.experiment}.{fmt}")
    try:
        os.makedirs(out_dir, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        logger.error(f"Failed to write report '{path}': {e}")
        raise
    logger.info(f"Wrote {report.experiment} report to {path}")
    return path
