"""Command-line entry points for the review decision pipeline.

Subcommands: validate, assign, score, dequantize, calibrate, rank,
report, pipeline.  A config file of ``key = value`` lines (same keys as
the long flag names, without dashes) can be passed with ``--config``;
values from the file override the flags, so a checked-in config wins
over ad-hoc command lines.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from collections import defaultdict
from pathlib import Path

from .assignment import AssignmentConstraints, SimilaritySources, assign
from .calibration import GridSpec
from .dequant import DequantConfig, dequantize
from .pipeline import PipelineConfig, run_pipeline, write_atomic
from .records import load_reviews, validate
from .scoring import DecisionConfig, review_score

CONFIG_KEYS = {
    "input": str,
    "meta": str,
    "out": str,
    "format": str,
    "seed": int,
    "acceptance_rate": float,
    "lambda": float,
    "grid_min": float,
    "grid_max": float,
    "grid_points": int,
    "samples": int,
    "dequantize": lambda v: v.lower() in ("1", "true", "yes", "on"),
    "calibrate": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def _load_config(path) -> dict:
    """Parse ``key = value`` lines; '#' starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise SystemExit(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = CONFIG_KEYS[key](value)
    return out


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--input", required=True, help="reviews CSV/JSON export")
    p.add_argument("--meta", help="meta-reviews CSV (CSV format only)")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--acceptance-rate", type=float, default=40.0, dest="acceptance_rate")
    p.add_argument("--config", help="key = value config file overriding flags")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reviewpipe",
        description="Conference review scoring, calibration, and decision pipeline",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="ingest exports and report findings")
    _add_common(p)

    p = sub.add_parser("assign", help="build a reviewer-paper assignment")
    p.add_argument("--similarities", required=True,
                   help="CSV: reviewer_id,paper_id,bid,subject_relevance,tpms")
    p.add_argument("--tags", help="CSV: reviewer_id,tag")
    p.add_argument("--conflicts", help="CSV: reviewer_id,paper_id")
    p.add_argument("--min-reviewers", type=int, default=4)
    p.add_argument("--max-papers", type=int, default=6)
    p.add_argument("--out", default="out")

    p = sub.add_parser("score", help="compute the per-paper score table")
    _add_common(p)
    p.add_argument("--dequantize", action="store_true")
    p.add_argument("--lambda", type=float, default=2.0, dest="lam")

    p = sub.add_parser("dequantize", help="emit per-review dequantized scores")
    _add_common(p)
    p.add_argument("--lambda", type=float, default=2.0, dest="lam")

    p = sub.add_parser("calibrate", help="fit the bias model and emit calibrated columns")
    _add_common(p)
    _add_calibration_flags(p)

    p = sub.add_parser("rank", help="rank papers and apply the acceptance cutoff")
    _add_common(p)

    p = sub.add_parser("report", help="full pipeline plus gray-area report (alias)")
    _add_common(p)
    _add_calibration_flags(p)
    p.add_argument("--dequantize", action="store_true")
    p.add_argument("--lambda", type=float, default=2.0, dest="lam")

    p = sub.add_parser("pipeline", help="run every stage end to end")
    _add_common(p)
    _add_calibration_flags(p)
    p.add_argument("--dequantize", action="store_true")
    p.add_argument("--no-calibrate", action="store_true")
    p.add_argument("--lambda", type=float, default=2.0, dest="lam")

    return parser


def _add_calibration_flags(p):
    p.add_argument("--grid-min", type=float, default=1e-2, dest="grid_min")
    p.add_argument("--grid-max", type=float, default=1e2, dest="grid_max")
    p.add_argument("--grid-points", type=int, default=13, dest="grid_points")
    p.add_argument("--samples", type=int, default=1000)


def _apply_config(args):
    if getattr(args, "config", None):
        overrides = _load_config(args.config)
        mapping = {"input": "input", "meta": "meta", "out": "out", "lambda": "lam"}
        for key, value in overrides.items():
            setattr(args, mapping.get(key, key), value)
    return args


def _pipeline_config(args, dequant=False, calibrate=False) -> PipelineConfig:
    return PipelineConfig(
        reviews_path=args.input,
        meta_path=getattr(args, "meta", None),
        format=args.format,
        out_dir=args.out,
        dequantize=dequant or bool(getattr(args, "dequantize", False)),
        calibrate=calibrate,
        dequant=DequantConfig(lam=getattr(args, "lam", 2.0)),
        grid=GridSpec(
            lo=getattr(args, "grid_min", 1e-2),
            hi=getattr(args, "grid_max", 1e2),
            points=getattr(args, "grid_points", 13),
        ),
        decision=DecisionConfig(acceptance_rate=args.acceptance_rate),
        n_samples=getattr(args, "samples", 1000),
        seed=args.seed,
    )


def cmd_validate(args) -> int:
    loaded = load_reviews(args.input, args.format, args.meta)
    report = validate(loaded.reviews, loaded.metas)
    report.rejected = loaded.report.rejected
    report.warnings = loaded.report.warnings + report.warnings
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    write_atomic(Path(args.out) / "validation.json", text)
    sys.stdout.write(text)
    return 0 if not report.rejected else 1


def cmd_assign(args) -> int:
    sources: dict[tuple[str, str], SimilaritySources] = {}
    papers, reviewers = set(), set()
    with open(args.similarities, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            r, p = row["reviewer_id"], row["paper_id"]
            papers.add(p)
            reviewers.add(r)
            tpms = row.get("tpms", "")
            sources[(r, p)] = SimilaritySources(
                bid=float(row["bid"]),
                subject=float(row["subject_relevance"]),
                tpms=float(tpms) if tpms not in ("", None) else None,
            )
    tags = {}
    if args.tags:
        with open(args.tags, newline="", encoding="utf-8") as fh:
            tags = {row["reviewer_id"]: row["tag"] for row in csv.DictReader(fh)}
    conflicts = set()
    if args.conflicts:
        with open(args.conflicts, newline="", encoding="utf-8") as fh:
            conflicts = {(row["reviewer_id"], row["paper_id"]) for row in csv.DictReader(fh)}
    constraints = AssignmentConstraints(
        min_reviewers_per_paper=args.min_reviewers,
        max_papers_per_reviewer=args.max_papers,
        conflicts=frozenset(conflicts),
    )
    result = assign(sorted(papers), sorted(reviewers), sources, constraints, tags)
    lines = ["reviewer_id,paper_id"]
    lines += [f"{r},{p}" for r, p in sorted(result.pairs)]
    write_atomic(Path(args.out) / "assignment.csv", "\n".join(lines) + "\n")
    audit = {
        "total_similarity": result.total_similarity,
        "feasible": result.feasible,
        "shortfalls": result.shortfalls,
        "constraints": result.report.to_dict(),
    }
    write_atomic(
        Path(args.out) / "assignment_audit.json",
        json.dumps(audit, indent=2, sort_keys=True) + "\n",
    )
    return 0 if result.feasible and result.report.ok else 1


def cmd_score(args) -> int:
    result = run_pipeline(_pipeline_config(args))
    sys.stdout.write(f"scored {len(result.table.papers)} papers -> {args.out}\n")
    return 0


def cmd_dequantize(args) -> int:
    loaded = load_reviews(args.input, args.format, args.meta)
    scores = [review_score(f) for f in loaded.reviews]
    groups = defaultdict(list)
    for sc in scores:
        groups[sc.paper].append((sc.reviewer, sc.value))
    result = dequantize(dict(groups), DequantConfig(lam=args.lam))
    lines = ["paper_id,reviewer_id,s,s_dq"]
    for sc in sorted(scores, key=lambda sc: (sc.paper, sc.reviewer)):
        lines.append(f"{sc.paper},{sc.reviewer},{sc.value!r},{result.scores[(sc.reviewer, sc.paper)]!r}")
    write_atomic(Path(args.out) / "dequantized.csv", "\n".join(lines) + "\n")
    sys.stdout.write(f"dequantized {len(scores)} reviews (lambda={args.lam}) -> {args.out}\n")
    return 0


def cmd_calibrate(args) -> int:
    result = run_pipeline(_pipeline_config(args, calibrate=True))
    sys.stdout.write(f"calibrated {len(result.table.papers)} papers -> {args.out}\n")
    return 0


def cmd_rank(args) -> int:
    result = run_pipeline(_pipeline_config(args))
    sys.stdout.write(
        f"accepted {result.decisions.n_accept} of {len(result.table.papers)} papers "
        f"(rate {args.acceptance_rate}%) -> {args.out}\n"
    )
    return 0


def cmd_pipeline(args) -> int:
    calibrate = not getattr(args, "no_calibrate", False)
    result = run_pipeline(_pipeline_config(args, calibrate=calibrate))
    counts = result.gray.counts
    sys.stdout.write(
        f"pipeline complete: {len(result.table.papers)} papers, "
        f"{result.decisions.n_accept} accepted, gray-area {counts}\n"
    )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser.parse_args(argv))
    handlers = {
        "validate": cmd_validate,
        "assign": cmd_assign,
        "score": cmd_score,
        "dequantize": cmd_dequantize,
        "calibrate": cmd_calibrate,
        "rank": cmd_rank,
        "report": cmd_pipeline,
        "pipeline": cmd_pipeline,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    raise SystemExit(main())
