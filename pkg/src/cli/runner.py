"""
Command execution for counterfactual-drm.
"""

import json
import logging
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

import numpy as np

from src.counterfactual.estimators import (
    Subpopulation,
    conditional_cdf,
    marginal_counterfactual_cdf,
)
from src.counterfactual.export import write_cdf_csv
from src.datagen.families import DgpSpec, Family, generate, parse_family
from src.datagen.truth import true_effects
from src.effects.drm import drm_ate, drm_cate_report, drm_qtet
from src.effects.formatter import EffectFormatter
from src.effects.models import EffectReport, Estimand
from src.harness.error_tracker import ErrorTracker
from src.harness.estimators import (
    Estimate,
    EstimationContext,
    Method,
    parse_tag,
    run_estimator,
)
from src.harness.ingest import export_csv, ingest_csv
from src.harness.plot_data import PlotKind, emit_plot_data
from src.harness.replication import ReplicationPlan, SimStudyResult, run_replication
from src.model.dataset import Dataset
from src.model.params import DrmFit
from src.model.spec import ModelSpec
from src.solver.mele import fit_mele
from src.utils.config import ConfigurationError
from src.utils.errors import DrmError

from .config import RunConfig

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3

INPUT_CODES = {
    "CONFIG",
    "INVALID_SPEC",
    "INVALID_DATA",
    "INGEST",
    "SUPPORT_DOMAIN",
    "UNSUPPORTED_FAMILY",
    "INVALID_QUERY",
}
SOLVER_CODES = {"SOLVER_FAILURE", "INFEASIBLE_STATE"}

DEFAULT_EFFECT_ESTIMATORS = ("DRM", "G-formula", "IPW", "AIPW")
DEFAULT_STUDY_ESTIMATORS = ("DRM(full)", "G-formula(full)", "IPW(full)", "AIPW(full)")

FIT_REPORT = "fit_report.json"
EFFECTS_REPORT = "effects.json"


def exit_code_for(error: Exception) -> int:
    """Map an error onto the process exit status."""
    code = error.code if isinstance(error, DrmError) else ""
    if code in INPUT_CODES:
        return EXIT_INPUT
    if code in SOLVER_CODES:
        return EXIT_SOLVER
    return EXIT_FAILURE


def _write_json(path: Path, payload: dict[str, Any]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
    return path


class CommandRunner:
    """Runs one command against a resolved run configuration."""

    def __init__(self) -> None:
        self.formatter = EffectFormatter()
        self.tracker = ErrorTracker()

    def load_data(self, path: Path, config: RunConfig) -> Dataset:
        """
        Ingest a table. Without an explicit level order, the model's labels
        give the order when they name exactly the labels in the file.
        """
        data = ingest_csv(path, config.columns, config.levels)
        model = config.model
        if (
            config.levels is None
            and model is not None
            and set(model.treatment_levels) == set(data.labels)
            and model.treatment_levels != data.labels
        ):
            data = ingest_csv(path, config.columns, model.treatment_levels)
        return data

    def model_for(self, config: RunConfig, data: Dataset) -> ModelSpec:
        """The configured model with its level names taken from the data."""
        if config.model is None:
            raise ConfigurationError("This command needs a 'model' section in --config")
        if config.model.K != data.K:
            raise ConfigurationError(
                f"Model has {config.model.K} treatment levels, data has {data.K}"
            )
        return replace(config.model, treatment_levels=data.labels)

    def run_fit(
        self,
        config: RunConfig,
        data_path: Path,
        out_dir: Path,
        *,
        freeze_theta: bool = False,
        query_points: Sequence[Sequence[float]] = (),
        marginal: bool = False,
        verbose: bool = False,
    ) -> int:
        """Fit the model, write the JSON report and any requested CDFs."""
        report_path = out_dir / FIT_REPORT
        try:
            data = self.load_data(data_path, config)
            model = self.model_for(config, data)
            fit = fit_mele(data, model, config.solver, freeze_theta=freeze_theta)
            outputs = self._write_cdfs(fit, data, out_dir, query_points, marginal)
        except DrmError as e:
            _write_json(report_path, {"status": "failed", "error": e.to_dict()})
            raise

        report = {
            "status": fit.diagnostics.status,
            "data": {
                "path": str(data_path),
                "n": data.n,
                "n_k": list(data.n_k),
                "labels": list(data.labels),
            },
            "fit": fit.to_dict(),
            "outputs": [str(p) for p in outputs],
        }
        _write_json(report_path, report)
        residuals = fit.diagnostics.residuals
        print(f"✅ Fit {fit.diagnostics.status} in {fit.diagnostics.iterations} iterations")
        if verbose:
            for name, value in residuals.items():
                print(f"  - residual {name}: {value:.3e}")
        print(f"📄 Report: {report_path}")
        return EXIT_OK

    def _write_cdfs(
        self,
        fit: DrmFit,
        data: Dataset,
        out_dir: Path,
        query_points: Sequence[Sequence[float]],
        marginal: bool,
    ) -> list[Path]:
        paths = []
        labels = fit.spec.treatment_levels
        for i, point in enumerate(query_points, start=1):
            for k, label in enumerate(labels, start=1):
                cdf = conditional_cdf(fit, point, k)
                paths.append(write_cdf_csv(cdf, out_dir / f"cdf_level_{label}_point_{i}.csv", label))
        if marginal:
            for k, label in enumerate(labels, start=1):
                cdf = marginal_counterfactual_cdf(fit, data, k, Subpopulation.all_units())
                paths.append(write_cdf_csv(cdf, out_dir / f"cdf_level_{label}_marginal.csv", label))
        return paths

    def run_effects(
        self,
        config: RunConfig,
        data_path: Path,
        out_dir: Path,
        *,
        cate_points: Sequence[Sequence[float]] = (),
    ) -> int:
        """DRM and comparator effect estimates on one dataset."""
        data = self.load_data(data_path, config)
        model = self.model_for(config, data)
        tags = [parse_tag(t) for t in (config.estimators or DEFAULT_EFFECT_ESTIMATORS)]
        treated, control = config.treated, config.control
        t_name = data.labels[model.level_index(treated) - 1]
        c_name = data.labels[model.level_index(control) - 1]
        ctx = EstimationContext(
            treated=t_name,
            control=c_name,
            probs=config.probs,
            solver=config.solver,
            model=model,
        )

        reports: list[EffectReport] = []
        for tag in tags:
            if tag.method is Method.DRM:
                fit = fit_mele(data, ctx.drm_spec(tag), config.solver)
                ate = drm_ate(fit, data, t_name, c_name)
                reports.append(EffectReport(Estimand.ATE, tag.name, (ate,), t_name, c_name))
                qtet = drm_qtet(fit, data, t_name, c_name, config.probs)
                reports.append(replace(qtet, estimator=tag.name))
                if cate_points:
                    cate = drm_cate_report(fit, np.asarray(cate_points), t_name, c_name)
                    reports.append(replace(cate, estimator=tag.name))
            else:
                reports.extend(
                    _reports_from(run_estimator(tag, data, ctx), t_name, c_name)
                )

        path = out_dir / EFFECTS_REPORT
        out_dir.mkdir(parents=True, exist_ok=True)
        path.write_text(
            self.formatter.to_json(reports, {"data": str(data_path), "n": data.n}),
            encoding="utf-8",
        )
        print(self.formatter.to_text(reports), end="")
        print(f"📄 Report: {path}")
        return EXIT_OK

    def run_simulate(
        self,
        family: Family | str,
        n: int,
        seed: int,
        out_dir: Path,
        *,
        truth: bool = False,
        truth_draws: int | None = None,
    ) -> int:
        """Write one generated dataset in the ingestion schema."""
        fam = parse_family(family)
        data = generate(DgpSpec(fam, n, seed))
        path = export_csv(data, out_dir / f"{fam}_n{n}_seed{seed}.csv")
        print(f"✅ Simulated {fam} data: n={n}, seed={seed} -> {path}")
        if truth:
            effects = (
                true_effects(fam, monte_carlo=True, draws=truth_draws)
                if truth_draws
                else true_effects(fam)
            )
            truth_path = _write_json(out_dir / f"{fam}_truth.json", effects.to_dict())
            print(f"📄 True effects: {truth_path}")
        return EXIT_OK

    def build_plan(
        self, config: RunConfig, workers: int, estimators: Sequence[str] | None = None
    ) -> ReplicationPlan:
        rep = config.replication
        chosen = tuple(estimators or config.estimators or DEFAULT_STUDY_ESTIMATORS)
        return ReplicationPlan(
            family=rep.family,
            n=rep.n,
            repetitions=rep.repetitions,
            base_seed=rep.base_seed,
            estimators=chosen,
            probs=config.probs,
            solver=config.solver,
            workers=workers,
        )

    def run_replicate(self, plan: ReplicationPlan, out_dir: Path, verbose: bool = False) -> int:
        """Run a replication study and write its tables."""
        result = self._replicate(plan)
        paths = result.write(out_dir)
        print(self._table_text(result), end="")
        stats = result.failure_stats
        if stats["total_errors"]:
            print(f"⚠️  {stats['total_errors']} estimator failures: {stats['error_codes']}")
        if verbose:
            for path in paths:
                print(f"  - {path}")
        print(f"📄 Tables: {out_dir}")
        return EXIT_OK

    def _replicate(self, plan: ReplicationPlan) -> SimStudyResult:
        self.tracker.clear_backlog()
        return run_replication(plan, self.tracker)

    def _table_text(self, result: SimStudyResult) -> str:
        def cell(value: float | None) -> str:
            return "" if value is None else f"{value:.4f}"

        rows = [
            [
                f"{a.estimator} {a.estimand}" + (f"@{a.level:g}" if a.level is not None else ""),
                str(a.count),
                cell(a.bias),
                cell(a.abs_bias),
                cell(a.se),
                cell(a.rmse),
            ]
            for a in result.aggregates
        ]
        return self.formatter.table_text(
            ["estimator", "reps", "bias", "abs_bias", "se", "rmse"], rows
        )

    def run_plot_data(
        self,
        kind: str,
        config: RunConfig,
        out_dir: Path,
        *,
        data_path: Path | None = None,
        plan: ReplicationPlan | None = None,
        grid_size: int = 20,
        family: Family | str | None = None,
    ) -> int:
        """Emit tidy plot tables from a fresh fit or a fresh replication."""
        if kind == PlotKind.BOXPLOT_RAW:
            if plan is None:
                raise ConfigurationError("boxplot-raw needs a replication plan")
            paths = emit_plot_data(self._replicate(plan), kind, out_dir)
        else:
            if data_path is None:
                raise ConfigurationError(f"{kind} needs --data")
            data = self.load_data(data_path, config)
            fit = fit_mele(data, self.model_for(config, data), config.solver)
            paths = emit_plot_data(
                fit,
                kind,
                out_dir,
                data=data,
                treated=config.treated,
                control=config.control,
                grid_size=grid_size,
                family=parse_family(family) if family else None,
            )
        for path in paths:
            print(f"✅ {path}")
        return EXIT_OK


def _reports_from(estimates: list[Estimate], treated: str, control: str) -> list[EffectReport]:
    """Group flat estimates into one ATE report and one QTET report."""
    reports = []
    ate = [e for e in estimates if e.estimand is Estimand.ATE]
    qtet = [e for e in estimates if e.estimand is Estimand.QTET]
    for e in ate:
        reports.append(EffectReport(Estimand.ATE, e.estimator, (e.value,), treated, control))
    if qtet:
        reports.append(
            EffectReport(
                Estimand.QTET,
                qtet[0].estimator,
                tuple(e.value for e in qtet),
                treated,
                control,
                probs=tuple(float(e.level) for e in qtet if e.level is not None),
            )
        )
    return reports
