"""
Main CLI application for counterfactual-drm.
"""

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from src.solver.config import SolverConfig
from src.utils.config import ConfigurationError, load_settings, setup_logging
from src.utils.errors import DrmError

from .config import RunConfig, load_run_config
from .runner import CommandRunner, exit_code_for

logger = logging.getLogger(__name__)


def _parse_point(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Expected comma-separated numbers, got {text!r}") from e


def _parse_list(text: str) -> list[str]:
    return [v.strip() for v in text.split(",") if v.strip()]


class DrmApp:
    """Main CLI application class."""

    def __init__(self) -> None:
        self.runner = CommandRunner()

    def create_parser(self) -> argparse.ArgumentParser:
        """Create and configure the argument parser."""
        parser = argparse.ArgumentParser(
            prog="counterfactual-drm",
            description="Counterfactual distributions and causal effects under a "
            "density ratio model fitted by empirical likelihood",
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog="""
Examples:
  counterfactual-drm simulate --family gaussian --n 1000 --seed 7
  counterfactual-drm --config run.json fit --data data.csv --marginal
  counterfactual-drm --config run.json effects --data data.csv --cate-point 1,2
  counterfactual-drm --workers 8 replicate --family gaussian --repetitions 100
  counterfactual-drm --config run.json plot-data --kind cate-grid --data data.csv
            """,
        )

        parser.add_argument("--config", type=Path, help="JSON run configuration")
        parser.add_argument("--seed", type=int, help="Seed (base seed for replicate)")
        parser.add_argument("--out-dir", type=Path, help="Output directory (default: out/)")
        parser.add_argument("--workers", type=int, help="Worker processes for replicate")
        parser.add_argument("--env-file", help="Optional .env file with DRM_* settings")
        parser.add_argument("--verbose", action="store_true", help="Enable verbose output")

        commands = parser.add_subparsers(dest="command", required=True)

        fit = commands.add_parser("fit", help="Fit the model and write a JSON report")
        self._add_data_arguments(fit)
        fit.add_argument(
            "--freeze-theta",
            action="store_true",
            help="Hold theta at zero (debug: baseline-only fit)",
        )
        fit.add_argument(
            "--query",
            type=_parse_point,
            action="append",
            default=[],
            help="Covariate point x1,x2,... for conditional CDF output (repeatable)",
        )
        fit.add_argument(
            "--marginal",
            action="store_true",
            help="Write marginal counterfactual CDFs over all units",
        )

        effects = commands.add_parser("effects", help="Estimate ATE, QTET and CATE")
        self._add_data_arguments(effects)
        self._add_estimand_arguments(effects)
        effects.add_argument(
            "--cate-point",
            type=_parse_point,
            action="append",
            default=[],
            help="Covariate point for DRM CATE (repeatable)",
        )

        simulate = commands.add_parser("simulate", help="Generate a synthetic dataset")
        simulate.add_argument("--family", required=True, help="gaussian, gamma, poisson or exponential")
        simulate.add_argument("--n", type=int, default=1000, help="Sample size (default: 1000)")
        simulate.add_argument("--truth", action="store_true", help="Also write the true effects")
        simulate.add_argument(
            "--truth-draws",
            type=int,
            help="Re-derive the true effects by Monte-Carlo with this many draws",
        )

        replicate = commands.add_parser("replicate", help="Run a replication study")
        self._add_study_arguments(replicate)
        self._add_estimand_arguments(replicate)

        plot = commands.add_parser("plot-data", help="Write tidy tables for plots")
        plot.add_argument(
            "--kind",
            required=True,
            choices=["cdf-overlay", "cate-grid", "boxplot-raw"],
        )
        plot.add_argument("--data", type=Path, help="Input CSV (cdf-overlay, cate-grid)")
        plot.add_argument("--grid-size", type=int, default=20, help="Points per axis (default: 20)")
        plot.add_argument(
            "--truth-family",
            help="Add the closed-form CATE of this family to cate-grid",
        )
        self._add_study_arguments(plot)
        self._add_estimand_arguments(plot)

        return parser

    def _add_data_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--data", type=Path, required=True, help="Input CSV")
        parser.add_argument("--algorithm", choices=["iterative", "marginal-approx"])

    def _add_estimand_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--estimators", type=_parse_list, help="Comma-separated tags")
        parser.add_argument("--probs", type=_parse_point, help="QTET levels, e.g. 0.25,0.5")
        parser.add_argument("--treated", help="Treated level (label or index)")
        parser.add_argument("--control", help="Control level (label or index)")

    def _add_study_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--family", help="Data-generating family")
        parser.add_argument("--n", type=int, help="Sample size per repetition")
        parser.add_argument("--repetitions", type=int, help="Number of repetitions")

    def resolve_config(self, parsed: argparse.Namespace) -> RunConfig:
        """Apply command-line overrides to the configuration document."""
        config = load_run_config(parsed.config)
        config = config.with_overrides(
            probs=tuple(parsed.probs) if getattr(parsed, "probs", None) else None,
            estimators=tuple(parsed.estimators) if getattr(parsed, "estimators", None) else None,
            treated=getattr(parsed, "treated", None),
            control=getattr(parsed, "control", None),
        )
        algorithm = getattr(parsed, "algorithm", None)
        if algorithm:
            solver = config.solver.to_dict() | {"algorithm": algorithm}
            config = config.with_overrides(solver=SolverConfig.from_dict(solver))
        rep_changes = {
            "family": getattr(parsed, "family", None) if parsed.command != "simulate" else None,
            "n": getattr(parsed, "n", None) if parsed.command != "simulate" else None,
            "repetitions": getattr(parsed, "repetitions", None),
            "base_seed": parsed.seed,
        }
        rep_changes = {k: v for k, v in rep_changes.items() if v is not None}
        if rep_changes:
            config = config.with_overrides(replication=replace(config.replication, **rep_changes))
        return config

    def run(self, args: list[str] | None = None) -> int:
        """Run the application with given arguments."""
        parser = self.create_parser()
        parsed_args = parser.parse_args(args)

        try:
            settings = load_settings(parsed_args.env_file)
            if parsed_args.verbose:
                settings.log_level = "INFO"
            setup_logging(settings)

            config = self.resolve_config(parsed_args)
            out_dir = parsed_args.out_dir or settings.out_dir
            workers = parsed_args.workers or config.replication.workers or settings.workers
            if workers < 1:
                raise ConfigurationError("--workers must be positive")

            if parsed_args.verbose:
                print(f"🔧 Command: {parsed_args.command}")
                print(f"📁 Output: {out_dir}")
                print(f"⚙️  Algorithm: {config.solver.algorithm}")
                print()

            return self._dispatch(parsed_args, config, out_dir, workers)

        except DrmError as e:
            print(f"❌ Error [{e.code}]: {e}", file=sys.stderr)
            if parsed_args.verbose and e.details:
                print(f"   details: {e.details}", file=sys.stderr)
            return exit_code_for(e)
        except Exception as e:
            print(f"❌ Error: {e}", file=sys.stderr)
            if parsed_args.verbose:
                import traceback

                traceback.print_exc()
            return exit_code_for(e)

    def _dispatch(
        self, parsed: argparse.Namespace, config: RunConfig, out_dir: Path, workers: int
    ) -> int:
        command = parsed.command
        if command == "fit":
            return self.runner.run_fit(
                config,
                parsed.data,
                out_dir,
                freeze_theta=parsed.freeze_theta,
                query_points=parsed.query,
                marginal=parsed.marginal,
                verbose=parsed.verbose,
            )
        if command == "effects":
            return self.runner.run_effects(
                config, parsed.data, out_dir, cate_points=parsed.cate_point
            )
        if command == "simulate":
            return self.runner.run_simulate(
                parsed.family,
                parsed.n,
                parsed.seed if parsed.seed is not None else 0,
                out_dir,
                truth=parsed.truth,
                truth_draws=parsed.truth_draws,
            )
        if command == "replicate":
            plan = self.runner.build_plan(config, workers)
            return self.runner.run_replicate(plan, out_dir, verbose=parsed.verbose)
        plan = self.runner.build_plan(config, workers) if parsed.kind == "boxplot-raw" else None
        return self.runner.run_plot_data(
            parsed.kind,
            config,
            out_dir,
            data_path=parsed.data,
            plan=plan,
            grid_size=parsed.grid_size,
            family=parsed.truth_family,
        )
