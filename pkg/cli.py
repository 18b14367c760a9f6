"""Command-line driver: factor weights, compare them, and run the experiment reports."""

import argparse
import logging
import sys

import numpy as np

from src.config import LOG_LEVEL, OUTPUT_DIR, SOLVER_METHOD, TRUNCATION
from src.errors import FactorizationError
from src.evaluation import check_small
from src.experiments import EXPERIMENTS, ExperimentConfig, load_config, run_experiment
from src.interp_spaces import operator_distortion, sampled_copy
from src.matrix_utils import op_norm
from src.reports import Report, emit_report
from src.spectral_factorization import METHODS, factor_at_zero, szego_geometric_mean
from src.weight_loader import load_weight

logger = logging.getLogger("cli")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="outer-factor", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", default=None, help="output directory for reports")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--truncation", type=int, default=None, help="Toeplitz truncation M")
        p.add_argument("--grid", type=int, default=None, help="sampling grid size (power of two)")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--method", choices=METHODS, default=None)
        p.add_argument("--no-richardson", action="store_true")

    factor = sub.add_parser("factor", help="|F_W(0)|² for a weight file")
    factor.add_argument("--weight", required=True)
    common(factor)

    distortion = sub.add_parser("distortion", help="‖F_W(0) F_W2(0)⁻¹‖ for two weight files")
    distortion.add_argument("--weight", required=True)
    distortion.add_argument("--weight2", required=True)
    common(distortion)

    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", default=None, help="JSON experiment configuration")
        common(p)
    return parser


def resolve_config(args) -> ExperimentConfig:
    """File values override the environment defaults; flags override the file."""
    config = load_config(args.config) if getattr(args, "config", None) else ExperimentConfig()
    overrides = {
        "truncation": args.truncation,
        "grid_size": args.grid,
        "seed": args.seed,
        "method": args.method,
        "output_dir": args.out,
    }
    data = config.model_dump()
    data.update({k: v for k, v in overrides.items() if v is not None})
    if args.no_richardson:
        data["richardson"] = False
    return ExperimentConfig.model_validate(data)


def _solver(args) -> dict:
    return {
        "method": args.method or SOLVER_METHOD,
        "richardson": not args.no_richardson,
    }


def _load(args, path: str):
    W = load_weight(path)
    if args.grid is not None:
        if args.grid < 4 or args.grid & (args.grid - 1):
            raise ValueError(f"--grid must be a power of two of at least 4, got {args.grid}")
        W = sampled_copy(W, args.grid)
    return W


def _truncation(args, W) -> int:
    M = args.truncation or TRUNCATION
    if hasattr(W, "grid_size"):
        M = min(M, W.grid_size // 2 - 1)
    return M


def run_factor(args) -> Report:
    W = _load(args, args.weight)
    result = factor_at_zero(W, _truncation(args, W), **_solver(args))
    report = Report(
        experiment="factor",
        seed=args.seed or 0,
        config={
            "weight": args.weight,
            "truncation": result.truncation,
            "grid_size": args.grid,
            **_solver(args),
        },
        values={"M0": result.M0, "F0": result.F0, "M0_raw": result.M0_raw},
        diagnostics={
            "constancy_residual": result.constancy_residual,
            "constancy_rms": result.constancy_rms,
            "neumann_ratio": result.neumann_ratio,
            "iterations": result.iterations,
            "extrapolated": result.extrapolated,
        },
    )
    values = W.point_values()
    if np.allclose(values, np.einsum("kii->ki", values)[:, :, None] * np.eye(W.dim), atol=1e-12):
        geometric = szego_geometric_mean(W)
        report.values["geometric_mean"] = geometric
        error = op_norm(result.M0 - geometric)
        report.claims.append(check_small("geometric_mean_error", error, 1e-6, "THEOREM"))
    return report


def run_distortion(args) -> Report:
    W, W2 = _load(args, args.weight), _load(args, args.weight2)
    first = factor_at_zero(W, _truncation(args, W), **_solver(args))
    second = factor_at_zero(W2, _truncation(args, W2), **_solver(args))
    value = operator_distortion(first.F0, second.F0)
    return Report(
        experiment="distortion",
        seed=args.seed or 0,
        config={"weight": args.weight, "weight2": args.weight2, "grid_size": args.grid, **_solver(args)},
        values={"distortion": value, "F0": first.F0, "F0_2": second.F0},
        diagnostics={
            "constancy_residual": first.constancy_residual,
            "constancy_residual_2": second.constancy_residual,
        },
    )


def main(argv=None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "factor":
            report = run_factor(args)
        elif args.command == "distortion":
            report = run_distortion(args)
        else:
            report = run_experiment(args.command, resolve_config(args))
        out_dir = args.out or getattr(report, "config", {}).get("output_dir") or OUTPUT_DIR
        path = emit_report(report, out_dir, args.format)
    except (FactorizationError, ValueError, np.linalg.LinAlgError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(path)
    if not report.passed:
        logger.warning(f"{report.experiment}: some claims failed, see {path}")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
