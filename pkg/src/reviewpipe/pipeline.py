"""End-to-end orchestration: load -> score -> [dequantize] -> [calibrate]
-> fuse -> rank -> report, plus the gray-area agreement policy.

The gray-area report compares the raw and calibrated decision lists:
papers accepted (or rejected) by both are decided automatically, papers
where the two rankings disagree are flagged for human adjudication and
never auto-decided.

All artifacts are written atomically (temp file + rename) and are
byte-identical across runs with the same config and seed.
"""

from __future__ import annotations

import json
import os
import tempfile
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .calibration import (
    CalibrationInputs,
    GridSpec,
    acceptance_probability,
    aggregate_calibrated,
    calibrate_meta,
    fit_hyperparams,
    posterior,
)
from .dequant import DequantConfig, dequantize
from .plots import histogram_artifact, scatter_artifact
from .records import encode_likert, load_reviews, validate
from .scoring import (
    DecisionConfig,
    DecisionList,
    ScoreTable,
    build_score_table,
    decision_list_csv,
    rank_and_cut,
    review_score,
    score_index,
    score_table_csv,
    score_table_json,
)

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "GrayAreaReport",
    "PipelineStageError",
    "run_pipeline",
    "gray_area",
    "emit_plots",
    "write_atomic",
]


class PipelineStageError(RuntimeError):
    """A pipeline stage failed; the message names the stage and context."""


@dataclass(frozen=True)
class PipelineConfig:
    reviews_path: str
    meta_path: str | None = None
    format: str = "csv"
    out_dir: str = "out"
    dequantize: bool = False
    calibrate: bool = False
    dequant: DequantConfig = field(default_factory=DequantConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    decision: DecisionConfig = field(default_factory=DecisionConfig)
    n_samples: int = 1000
    seed: int = 0


@dataclass
class GrayAreaReport:
    """Agreement classes between the raw and calibrated decisions."""

    agree_accept: list[str] = field(default_factory=list)
    agree_reject: list[str] = field(default_factory=list)
    disagree: list[str] = field(default_factory=list)
    notice: str | None = None

    @property
    def counts(self) -> dict[str, int]:
        return {
            "agree-accept": len(self.agree_accept),
            "agree-reject": len(self.agree_reject),
            "disagree": len(self.disagree),
        }

    def to_dict(self) -> dict:
        out = {
            "counts": self.counts,
            "agree_accept": self.agree_accept,
            "agree_reject": self.agree_reject,
            "disagree": self.disagree,
        }
        if self.notice:
            out["notice"] = self.notice
        return out


@dataclass
class PipelineResult:
    table: ScoreTable
    decisions: DecisionList
    decisions_calibrated: DecisionList | None
    gray: GrayAreaReport
    fit_summary: dict | None
    artifacts: list[str]


def write_atomic(path, text: str):
    """Write text to ``path`` via a temp file in the same directory."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def gray_area(raw: DecisionList, calibrated: DecisionList) -> GrayAreaReport:
    """Partition papers by agreement between the two decision lists."""
    raw_papers = {d.paper for d in raw.decisions}
    cal_papers = {d.paper for d in calibrated.decisions}
    if raw_papers != cal_papers:
        raise ValueError("decision lists cover different paper sets")
    report = GrayAreaReport()
    cal_accepted = calibrated.accepted
    for d in sorted(raw.decisions, key=lambda d: d.paper):
        if d.accept and d.paper in cal_accepted:
            report.agree_accept.append(d.paper)
        elif not d.accept and d.paper not in cal_accepted:
            report.agree_reject.append(d.paper)
        else:
            report.disagree.append(d.paper)
    return report


def emit_plots(table: ScoreTable, mu_y, estimate, meta_raw, out_dir) -> list[str]:
    """Write the three figure artifacts (CSV + SVG each): calibrated-score
    histogram, acceptance probability vs calibrated paper score, original
    vs calibrated meta score."""
    if table.sR_cal is None or table.sM_cal is None:
        raise ValueError("plots need the calibrated score columns")
    out_dir = Path(out_dir)
    written = []

    def emit(name, artifact):
        write_atomic(out_dir / f"{name}.csv", artifact.csv_text)
        write_atomic(out_dir / f"{name}.svg", artifact.svg_text)
        written.extend([str(out_dir / f"{name}.csv"), str(out_dir / f"{name}.svg")])

    emit(
        "calibrated_score_histogram",
        histogram_artifact(
            mu_y, bins=30, title="Calibrated review scores", xlabel="calibrated score"
        ),
    )
    emit(
        "acceptance_probability",
        scatter_artifact(
            table.sR_cal,
            estimate.probability,
            title="Acceptance probability vs calibrated score",
            xlabel="calibrated reviewer score",
            ylabel="acceptance probability",
        ),
    )
    emit(
        "meta_calibration_scatter",
        scatter_artifact(
            meta_raw,
            table.sM_cal,
            title="Original vs calibrated meta-reviewer scores",
            xlabel="normalized meta score",
            ylabel="calibrated meta score",
        ),
    )
    return written


def _stage(name: str):
    """Decorator-free stage context: wrap exceptions with the stage name."""

    class _Ctx:
        def __enter__(self):
            return self

        def __exit__(self, exc_type, exc, tb):
            if exc is not None and not isinstance(exc, PipelineStageError):
                raise PipelineStageError(f"stage {name!r} failed: {exc}") from exc
            return False

    return _Ctx()


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    """Run the full decision pipeline and write all artifacts.

    Deterministic: the same config and seed produce byte-identical
    outputs.  Calibration off leaves the calibrated columns absent and
    the gray-area report empty-by-construction with a notice.
    """
    out_dir = Path(cfg.out_dir)
    artifacts: list[str] = []

    with _stage("load"):
        loaded = load_reviews(cfg.reviews_path, cfg.format, cfg.meta_path)
        report = validate(loaded.reviews, loaded.metas)
        report.rejected = loaded.report.rejected
        report.warnings = loaded.report.warnings + report.warnings
        write_atomic(
            out_dir / "validation.json",
            json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n",
        )
        artifacts.append(str(out_dir / "validation.json"))

    with _stage("score"):
        scores = [review_score(f) for f in loaded.reviews]
        review_values = None
        if cfg.dequantize:
            groups = defaultdict(list)
            for sc in scores:
                groups[sc.paper].append((sc.reviewer, sc.value))
            review_values = dequantize(dict(groups), cfg.dequant).scores
        table = build_score_table(loaded.reviews, loaded.metas, review_values)

    fit_summary = None
    estimate = None
    mu_y = None
    if cfg.calibrate:
        with _stage("calibrate"):
            inputs = _calibration_inputs(loaded.reviews, scores, table, review_values)
            hp, grid_table = fit_hyperparams(inputs, cfg.grid, collect_grid=True)
            mu_y, sigma_y = posterior(inputs, hp)
            table.sR_cal = aggregate_calibrated(
                mu_y, inputs.paper_idx, inputs.confidences, inputs.n_papers
            )
            table.sM_cal = _calibrated_meta(loaded.metas, table, cfg.grid)
            table.SI_cal = np.asarray(score_index(table.sR_cal, table.sM_cal))
            estimate = acceptance_probability(
                mu_y, sigma_y, inputs, cfg.decision, cfg.n_samples, cfg.seed
            )
            fit_summary = {
                "hyperparams": {
                    "mu_q": hp.mu_q,
                    "sigma_q2": hp.sigma_q2,
                    "sigma_b2": hp.sigma_b2,
                    "sigma_e2": hp.sigma_e2,
                },
                "grid": grid_table,
                "n_samples": cfg.n_samples,
                "seed": cfg.seed,
            }
            write_atomic(
                out_dir / "calibration_fit.json",
                json.dumps(fit_summary, indent=2, sort_keys=True) + "\n",
            )
            artifacts.append(str(out_dir / "calibration_fit.json"))

    with _stage("rank"):
        decisions = rank_and_cut(table, cfg.decision)
        decisions_cal = rank_and_cut(table, cfg.decision, use_calibrated=True) if cfg.calibrate else None

    with _stage("report"):
        if decisions_cal is not None:
            gray = gray_area(decisions, decisions_cal)
        else:
            gray = GrayAreaReport(notice="calibration disabled: no gray-area comparison")
        write_atomic(out_dir / "score_table.csv", score_table_csv(table))
        write_atomic(out_dir / "score_table.json", score_table_json(table))
        write_atomic(out_dir / "decisions.csv", decision_list_csv(decisions))
        if decisions_cal is not None:
            write_atomic(out_dir / "decisions_calibrated.csv", decision_list_csv(decisions_cal))
            artifacts.append(str(out_dir / "decisions_calibrated.csv"))
        write_atomic(
            out_dir / "gray_area.json", json.dumps(gray.to_dict(), indent=2, sort_keys=True) + "\n"
        )
        artifacts += [
            str(out_dir / "score_table.csv"),
            str(out_dir / "score_table.json"),
            str(out_dir / "decisions.csv"),
            str(out_dir / "gray_area.json"),
        ]
        if cfg.calibrate:
            artifacts += emit_plots(table, mu_y, estimate, table.sM_norm, out_dir)

    return PipelineResult(
        table=table,
        decisions=decisions,
        decisions_calibrated=decisions_cal,
        gray=gray,
        fit_summary=fit_summary,
        artifacts=artifacts,
    )


def _calibration_inputs(reviews, scores, table: ScoreTable, review_values) -> CalibrationInputs:
    """Stack per-review composite scores (optionally dequantized) with
    paper/reviewer labels aligned to the score table's paper order."""
    paper_ids = table.papers
    pidx = {p: i for i, p in enumerate(paper_ids)}
    reviewer_ids = sorted({sc.reviewer for sc in scores})
    ridx = {r: i for i, r in enumerate(reviewer_ids)}
    ordered = sorted(scores, key=lambda sc: (pidx[sc.paper], sc.reviewer))
    s = np.array(
        [
            review_values[(sc.reviewer, sc.paper)] if review_values else sc.value
            for sc in ordered
        ]
    )
    return CalibrationInputs(
        s=s,
        paper_idx=np.array([pidx[sc.paper] for sc in ordered]),
        reviewer_idx=np.array([ridx[sc.reviewer] for sc in ordered]),
        paper_ids=list(paper_ids),
        reviewer_ids=reviewer_ids,
        confidences=np.array([sc.confidence for sc in ordered]),
    )


def _calibrated_meta(metas, table: ScoreTable, grid: GridSpec) -> np.ndarray:
    pidx = {p: i for i, p in enumerate(table.papers)}
    mids = sorted({m.metareviewer for m in metas})
    midx = {m: i for i, m in enumerate(mids)}
    ordered = sorted(metas, key=lambda m: (pidx[m.paper], m.metareviewer))
    xi = np.array([encode_likert(m.recommendation, "recommendation") for m in ordered], dtype=float)
    return calibrate_meta(
        xi,
        np.array([pidx[m.paper] for m in ordered]),
        np.array([midx[m.metareviewer] for m in ordered]),
        list(table.papers),
        mids,
        grid,
    )
