"""Reviewer-paper assignment: similarity-weighted greedy construction with
swap local search, under load, coverage, and misconduct constraints.

Pair similarity is a convex combination of reviewer bid, matching-service
affinity, and subject-area relevance (default weights 0.2 / 0.3 / 0.5).
Hard constraints: a minimum number of reviewers per paper, a per-reviewer
paper capacity, at most one author-reviewer (tag Rev2) per paper, and no
conflicted pairs.  The solver is deterministic: candidate order is fixed
by (similarity desc, reviewer id, paper id).
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = [
    "SimilaritySources",
    "AssignmentConstraints",
    "AssignmentResult",
    "ConstraintReport",
    "combined_similarity",
    "assign",
    "check_constraints",
]

DEFAULT_WEIGHTS = (0.2, 0.3, 0.5)  # bid, matching service, subject area
AUTHOR_TAG = "Rev2"


@dataclass(frozen=True)
class SimilaritySources:
    """Per-pair evidence in [0, 1]; the matching-service score may be
    absent (None) for unregistered reviewers."""

    bid: float
    subject: float
    tpms: float | None = None

    def __post_init__(self):
        for name, v in (("bid", self.bid), ("subject", self.subject), ("tpms", self.tpms)):
            if v is not None and not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} similarity {v} outside [0, 1]")


def combined_similarity(src: SimilaritySources, weights=DEFAULT_WEIGHTS) -> float:
    """Convex combination of the three sources.

    A missing matching-service score has its weight renormalized onto the
    remaining sources rather than imputed as zero, so reviewers outside
    the service are not systematically penalized.
    """
    w_bid, w_tpms, w_subj = weights
    if min(w_bid, w_tpms, w_subj) < 0:
        raise ValueError("weights must be nonnegative")
    if abs(w_bid + w_tpms + w_subj - 1.0) > 1e-9:
        raise ValueError("weights must sum to 1")
    if src.tpms is None:
        rest = w_bid + w_subj
        if rest == 0:
            raise ValueError("cannot renormalize: only the missing source has weight")
        return (w_bid * src.bid + w_subj * src.subject) / rest
    return w_bid * src.bid + w_tpms * src.tpms + w_subj * src.subject


@dataclass(frozen=True)
class AssignmentConstraints:
    min_reviewers_per_paper: int = 4
    max_papers_per_reviewer: int = 6
    max_author_reviewers_per_paper: int = 1
    conflicts: frozenset[tuple[str, str]] = frozenset()  # (reviewer, paper)

    def __post_init__(self):
        if self.min_reviewers_per_paper < 1:
            raise ValueError("need at least one reviewer per paper")
        if self.max_papers_per_reviewer < 1:
            raise ValueError("reviewer capacity must be positive")
        if self.max_author_reviewers_per_paper < 0:
            raise ValueError("author-reviewer cap must be nonnegative")


@dataclass
class ConstraintReport:
    """Per-constraint pass/fail with the violating pairs listed."""

    checks: dict[str, list] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(not v for v in self.checks.values())

    def to_dict(self) -> dict:
        return {
            name: {"pass": not violations, "violations": violations}
            for name, violations in self.checks.items()
        }


@dataclass
class AssignmentResult:
    pairs: set[tuple[str, str]]
    total_similarity: float
    report: ConstraintReport
    feasible: bool
    shortfalls: dict[str, int] = field(default_factory=dict)


class InfeasibleInstanceError(ValueError):
    """Aggregate reviewer capacity cannot cover the paper demand."""


def _similarity_map(papers, reviewers, sources, weights) -> dict[tuple[str, str], float]:
    sim = {}
    for r in reviewers:
        for p in papers:
            src = sources.get((r, p))
            if src is None:
                continue
            sim[(r, p)] = combined_similarity(src, weights)
    return sim


def assign(
    papers: list[str],
    reviewers: list[str],
    sources: dict[tuple[str, str], SimilaritySources],
    constraints: AssignmentConstraints,
    tags: dict[str, str] | None = None,
    weights=DEFAULT_WEIGHTS,
) -> AssignmentResult:
    """Build an assignment maximizing total pair similarity.

    Greedy pass over candidates in similarity order, then swap local
    search (replacing an assigned reviewer with a better feasible one)
    until no improving move remains.  Papers that cannot reach the minimum
    coverage are reported as shortfalls rather than silently violated.
    Raises :class:`InfeasibleInstanceError` when aggregate capacity is
    short of aggregate demand.
    """
    tags = tags or {}
    demand = constraints.min_reviewers_per_paper * len(papers)
    capacity = constraints.max_papers_per_reviewer * len(reviewers)
    if capacity < demand:
        raise InfeasibleInstanceError(
            f"capacity {capacity} < demand {demand} "
            f"(binding constraint: max {constraints.max_papers_per_reviewer} papers/reviewer)"
        )

    sim = _similarity_map(papers, reviewers, sources, weights)
    candidates = sorted(sim, key=lambda k: (-sim[k], k[0], k[1]))
    candidates = [k for k in candidates if k not in constraints.conflicts]

    assigned: set[tuple[str, str]] = set()
    load: dict[str, int] = {r: 0 for r in reviewers}
    cover: dict[str, int] = {p: 0 for p in papers}
    rev2: dict[str, int] = {p: 0 for p in papers}

    def feasible_add(r, p):
        if (r, p) in assigned:
            return False
        if load[r] >= constraints.max_papers_per_reviewer:
            return False
        if tags.get(r) == AUTHOR_TAG and rev2[p] >= constraints.max_author_reviewers_per_paper:
            return False
        return True

    def add(r, p):
        assigned.add((r, p))
        load[r] += 1
        cover[p] += 1
        if tags.get(r) == AUTHOR_TAG:
            rev2[p] += 1

    def remove(r, p):
        assigned.discard((r, p))
        load[r] -= 1
        cover[p] -= 1
        if tags.get(r) == AUTHOR_TAG:
            rev2[p] -= 1

    # greedy: fill papers up to the minimum coverage in similarity order
    for r, p in candidates:
        if cover[p] < constraints.min_reviewers_per_paper and feasible_add(r, p):
            add(r, p)

    # local search: replace an assigned reviewer with a better unassigned one
    # whenever the swap stays feasible
    improved = True
    while improved:
        improved = False
        for r, p in sorted(assigned):
            best_gain, best_new = 0.0, None
            for r2, p2 in candidates:
                if p2 != p or (r2, p2) in assigned or r2 == r:
                    continue
                if load[r2] >= constraints.max_papers_per_reviewer:
                    continue
                if (
                    tags.get(r2) == AUTHOR_TAG
                    and rev2[p] - (tags.get(r) == AUTHOR_TAG)
                    >= constraints.max_author_reviewers_per_paper
                ):
                    continue
                gain = sim[(r2, p)] - sim[(r, p)]
                if gain > best_gain + 1e-12:
                    best_gain, best_new = gain, r2
            if best_new is not None:
                remove(r, p)
                add(best_new, p)
                improved = True

    total = sum(sim[k] for k in assigned)
    shortfalls = {
        p: constraints.min_reviewers_per_paper - cover[p]
        for p in papers
        if cover[p] < constraints.min_reviewers_per_paper
    }
    report = check_constraints(assigned, papers, constraints, tags)
    return AssignmentResult(
        pairs=assigned,
        total_similarity=total,
        report=report,
        feasible=not shortfalls,
        shortfalls=shortfalls,
    )


def check_constraints(
    pairs: set[tuple[str, str]],
    papers: list[str],
    constraints: AssignmentConstraints,
    tags: dict[str, str] | None = None,
) -> ConstraintReport:
    """Audit an assignment: coverage floor, reviewer capacity, lone-wolf
    mitigation (author-reviewer cap), and conflicts."""
    tags = tags or {}
    report = ConstraintReport()
    cover: dict[str, list] = {p: [] for p in papers}
    load: dict[str, list] = {}
    for r, p in sorted(pairs):
        cover.setdefault(p, []).append(r)
        load.setdefault(r, []).append(p)

    report.checks["minimum reviewers per paper"] = [
        (p, len(rs))
        for p, rs in sorted(cover.items())
        if len(rs) < constraints.min_reviewers_per_paper
    ]
    report.checks["maximum papers per reviewer"] = [
        (r, len(ps))
        for r, ps in sorted(load.items())
        if len(ps) > constraints.max_papers_per_reviewer
    ]
    lone_wolf = []
    for p, rs in sorted(cover.items()):
        authors = [r for r in rs if tags.get(r) == AUTHOR_TAG]
        if len(authors) > constraints.max_author_reviewers_per_paper:
            lone_wolf.extend((r, p) for r in authors)
    report.checks["lone-wolf mitigation"] = lone_wolf
    report.checks["conflicts"] = sorted(pairs & constraints.conflicts)
    return report
