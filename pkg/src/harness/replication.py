"""
Seeded Monte-Carlo replication studies.

Repetition r draws a fresh dataset with seed base_seed + r, runs every
requested estimator on it and scores the estimates against the true
effects. Repetitions run in a joblib pool; records are sorted before any
reduction so the tables do not depend on the worker count.
"""

import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from src.datagen.families import DgpSpec, Family, generate, parse_family
from src.datagen.truth import TrueEffects, true_effects
from src.effects.models import DEFAULT_PROBS, Estimand, EstimationError, check_probs
from src.harness.error_tracker import ErrorTracker
from src.harness.estimators import (
    EstimationContext,
    EstimatorTag,
    check_tag_for_family,
    parse_tag,
    run_estimator,
)
from src.solver.config import SolverConfig
from src.utils.config import ConfigurationError
from src.utils.errors import DrmError

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.10g"
AGGREGATE_FILE = "replication_aggregates.csv"
RECORDS_FILE = "replication_records.csv"
SUMMARY_FILE = "replication_summary.json"


@dataclass(frozen=True)
class ReplicationPlan:
    """What to simulate, how often, and which estimators to score."""

    family: Family
    n: int
    repetitions: int
    base_seed: int
    estimators: tuple[str, ...]
    probs: tuple[float, ...] = DEFAULT_PROBS
    solver: SolverConfig = field(default_factory=SolverConfig)
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", parse_family(self.family))
        if self.repetitions < 1:
            raise ConfigurationError("repetitions must be at least 1")
        if self.n < 2:
            raise ConfigurationError("n must be at least 2")
        if self.workers < 1:
            raise ConfigurationError("workers must be positive")
        if self.base_seed < 0:
            raise ConfigurationError("base_seed must be nonnegative")
        if not self.estimators:
            raise ConfigurationError("At least one estimator is required")
        tags = tuple(parse_tag(t).name for t in self.estimators)
        if len(set(tags)) != len(tags):
            raise ConfigurationError(f"Duplicate estimators: {list(tags)}")
        for tag in self.tags(tags):
            check_tag_for_family(tag, self.family)
        object.__setattr__(self, "estimators", tags)
        probs = check_probs(self.probs)
        published = set(DEFAULT_PROBS)
        if not set(probs) <= published:
            raise ConfigurationError(
                f"True QTET values are known only at {list(DEFAULT_PROBS)}"
            )
        object.__setattr__(self, "probs", probs)

    @staticmethod
    def tags(names: tuple[str, ...]) -> list[EstimatorTag]:
        return [parse_tag(t) for t in names]

    def seed_for(self, rep: int) -> int:
        return self.base_seed + rep

    def to_dict(self) -> dict[str, Any]:
        return {
            "family": str(self.family),
            "n": self.n,
            "repetitions": self.repetitions,
            "base_seed": self.base_seed,
            "estimators": list(self.estimators),
            "probs": list(self.probs),
            "solver": self.solver.to_dict(),
            "workers": self.workers,
        }


@dataclass(frozen=True)
class RepRecord:
    seed: int
    estimator: str
    estimand: str
    level: float | None
    value: float
    truth: float

    @property
    def error(self) -> float:
        return self.value - self.truth

    def sort_key(self) -> tuple[str, str, float, int]:
        return (self.estimator, self.estimand, -1.0 if self.level is None else self.level, self.seed)


@dataclass(frozen=True)
class Aggregate:
    """
    Summary of one (estimator, estimand, level) cell.

    bias is the mean signed error, abs_bias the mean absolute error, se the
    sample standard deviation of the estimates (absent for one repetition)
    and rmse the root mean squared error.
    """

    estimator: str
    estimand: str
    level: float | None
    count: int
    failures: int
    bias: float | None
    abs_bias: float | None
    se: float | None
    rmse: float | None

    @classmethod
    def from_records(
        cls, key: tuple[str, str, float | None], records: list[RepRecord], failures: int
    ) -> "Aggregate":
        estimator, estimand, level = key
        if not records:
            return cls(estimator, estimand, level, 0, failures, None, None, None, None)
        values = np.array([r.value for r in records])
        errors = np.array([r.error for r in records])
        se = float(np.std(values, ddof=1)) if values.size > 1 else None
        return cls(
            estimator=estimator,
            estimand=estimand,
            level=level,
            count=int(values.size),
            failures=failures,
            bias=float(np.mean(errors)),
            abs_bias=float(np.mean(np.abs(errors))),
            se=se,
            rmse=float(np.sqrt(np.mean(errors**2))),
        )

    def identity_gap(self) -> float:
        """|rmse^2 - (bias^2 + se^2 (R-1)/R)|; zero up to rounding."""
        if self.rmse is None or self.bias is None:
            return 0.0
        spread = 0.0 if self.se is None else self.se**2 * (self.count - 1) / self.count
        return abs(self.rmse**2 - (self.bias**2 + spread))


def _level_text(level: float | None) -> str:
    return "" if level is None else f"{level:g}"


@dataclass
class SimStudyResult:
    plan: ReplicationPlan
    truth: TrueEffects
    records: tuple[RepRecord, ...]
    aggregates: tuple[Aggregate, ...]
    failure_stats: dict[str, Any]

    def records_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {
                "seed": [r.seed for r in self.records],
                "estimator": [r.estimator for r in self.records],
                "estimand": [r.estimand for r in self.records],
                "level": [_level_text(r.level) for r in self.records],
                "value": [r.value for r in self.records],
                "truth": [r.truth for r in self.records],
            }
        )

    def aggregates_frame(self) -> pd.DataFrame:
        rows = [
            {
                "estimator": a.estimator,
                "estimand": a.estimand,
                "level": _level_text(a.level),
                "count": a.count,
                "failures": a.failures,
                "bias": a.bias,
                "abs_bias": a.abs_bias,
                "se": a.se,
                "rmse": a.rmse,
            }
            for a in self.aggregates
        ]
        return pd.DataFrame(rows, columns=list(_AGGREGATE_COLUMNS))

    def aggregate(self, estimator: str, estimand: str, level: float | None = None) -> Aggregate:
        for a in self.aggregates:
            if a.estimator == estimator and a.estimand == estimand and a.level == level:
                return a
        raise KeyError(f"No aggregate for {estimator} {estimand} {level}")

    def write(self, out_dir: Path) -> list[Path]:
        """Write aggregate and record CSVs plus a JSON summary."""
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = [out_dir / AGGREGATE_FILE, out_dir / RECORDS_FILE, out_dir / SUMMARY_FILE]
        self.aggregates_frame().to_csv(
            paths[0], index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
        self.records_frame().to_csv(
            paths[1], index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
        summary = {
            "plan": self.plan.to_dict(),
            "truth": self.truth.to_dict(),
            "failures": self.failure_stats,
        }
        paths[2].write_text(json.dumps(summary, indent=2, sort_keys=True), encoding="utf-8")
        logger.info(f"Wrote replication tables to {out_dir}")
        return paths


_AGGREGATE_COLUMNS = (
    "estimator",
    "estimand",
    "level",
    "count",
    "failures",
    "bias",
    "abs_bias",
    "se",
    "rmse",
)


def _truth_for(truth: TrueEffects, estimand: Estimand, level: float | None) -> float:
    if estimand is Estimand.ATE:
        return truth.ate
    assert level is not None
    return truth.qtet_at(level)


def run_repetition(
    plan: ReplicationPlan, rep: int
) -> tuple[list[RepRecord], list[dict[str, Any]]]:
    """
    Generate one dataset and run every estimator on it.

    Returns:
        (records, failures); a failure is a plain dict so it crosses
        process boundaries
    """
    seed = plan.seed_for(rep)
    truth = true_effects(plan.family)
    ctx = EstimationContext(
        treated="1",
        control="0",
        probs=plan.probs,
        solver=plan.solver,
        family=plan.family,
    )
    records: list[RepRecord] = []
    failures: list[dict[str, Any]] = []

    def failed(estimator: str, error: Exception) -> dict[str, Any]:
        return {
            "seed": seed,
            "estimator": estimator,
            "error_type": type(error).__name__,
            "error_code": error.code if isinstance(error, DrmError) else "UNEXPECTED",
            "error_message": str(error),
        }

    try:
        data = generate(DgpSpec(plan.family, plan.n, seed))
    except DrmError as e:
        return [], [failed(name, e) for name in plan.estimators]

    for tag in plan.tags(plan.estimators):
        try:
            estimates = run_estimator(tag, data, ctx)
        except Exception as e:
            failures.append(failed(tag.name, e))
            continue
        records.extend(
            RepRecord(
                seed=seed,
                estimator=est.estimator,
                estimand=str(est.estimand),
                level=est.level,
                value=est.value,
                truth=_truth_for(truth, est.estimand, est.level),
            )
            for est in estimates
        )
    logger.debug(f"Repetition {rep} (seed {seed}): {len(records)} estimates")
    return records, failures


def aggregate_records(
    plan: ReplicationPlan, records: list[RepRecord], tracker: ErrorTracker
) -> tuple[Aggregate, ...]:
    """One aggregate per expected (estimator, estimand, level) cell."""
    ordered = sorted(records, key=RepRecord.sort_key)
    grouped: dict[tuple[str, str, float | None], list[RepRecord]] = {
        key: list(group)
        for key, group in itertools.groupby(
            ordered, key=lambda r: (r.estimator, r.estimand, r.level)
        )
    }
    cells: list[Aggregate] = []
    for tag in plan.tags(plan.estimators):
        for estimand in tag.estimands:
            levels: tuple[float | None, ...] = (
                (None,) if estimand is Estimand.ATE else plan.probs
            )
            for level in levels:
                key = (tag.name, str(estimand), level)
                cells.append(
                    Aggregate.from_records(
                        key, grouped.get(key, []), tracker.failures_for(tag.name)
                    )
                )
    return tuple(
        sorted(cells, key=lambda a: (a.estimator, a.estimand, -1.0 if a.level is None else a.level))
    )


def run_replication(
    plan: ReplicationPlan, tracker: ErrorTracker | None = None
) -> SimStudyResult:
    """
    Run all repetitions and aggregate them.

    Failure counts and stats cover this study only; a given tracker also
    receives its failures.

    Raises:
        EstimationError: when every estimator failed on every repetition
    """
    study = ErrorTracker()
    logger.info(
        f"Replicating {plan.family}: R={plan.repetitions}, n={plan.n}, "
        f"estimators={list(plan.estimators)}, workers={plan.workers}"
    )
    reps = range(1, plan.repetitions + 1)
    if plan.workers > 1:
        outputs = Parallel(n_jobs=plan.workers)(
            delayed(run_repetition)(plan, rep) for rep in reps
        )
    else:
        outputs = [run_repetition(plan, rep) for rep in reps]

    records: list[RepRecord] = []
    for rep_records, rep_failures in outputs:
        records.extend(rep_records)
        for failure in rep_failures:
            study.record_error(
                failure["seed"],
                failure["estimator"],
                error_type=failure["error_type"],
                error_code=failure["error_code"],
                error_message=failure["error_message"],
            )
    if tracker is not None:
        tracker.absorb(study)
    if not records:
        raise EstimationError(
            "Every repetition failed for every estimator", study.get_error_stats()
        )

    aggregates = aggregate_records(plan, records, study)
    stats = study.get_error_stats()
    stats["recent_errors"] = [
        {k: v for k, v in e.items() if k != "timestamp"} for e in stats["recent_errors"]
    ]
    return SimStudyResult(
        plan=plan,
        truth=true_effects(plan.family),
        records=tuple(sorted(records, key=RepRecord.sort_key)),
        aggregates=aggregates,
        failure_stats=stats,
    )
