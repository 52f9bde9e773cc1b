import pytest

from reviewpipe.assignment import (
    AssignmentConstraints,
    InfeasibleInstanceError,
    SimilaritySources,
    assign,
    check_constraints,
    combined_similarity,
)


def full_sources(papers, reviewers, rng=None, default=0.5):
    src = {}
    for r in reviewers:
        for p in papers:
            if rng is None:
                src[(r, p)] = SimilaritySources(bid=default, subject=default, tpms=default)
            else:
                src[(r, p)] = SimilaritySources(
                    bid=float(rng.uniform()), subject=float(rng.uniform()), tpms=float(rng.uniform())
                )
    return src


class TestCombinedSimilarity:
    def test_equal_sources(self):
        assert combined_similarity(SimilaritySources(1.0, 1.0, 1.0)) == pytest.approx(1.0)

    def test_subject_weight(self):
        assert combined_similarity(SimilaritySources(bid=0.0, subject=1.0, tpms=0.0)) == 0.5

    def test_missing_tpms_renormalized(self):
        sim = combined_similarity(SimilaritySources(bid=1.0, subject=0.0, tpms=None))
        assert sim == pytest.approx(0.2 / 0.7)

    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            combined_similarity(SimilaritySources(0.5, 0.5), weights=(0.5, 0.4, 0.2))

    def test_negative_weight_rejected(self):
        with pytest.raises(ValueError):
            combined_similarity(SimilaritySources(0.5, 0.5, 0.5), weights=(-0.2, 0.7, 0.5))

    def test_source_range_checked(self):
        with pytest.raises(ValueError):
            SimilaritySources(bid=1.5, subject=0.0)

    def test_monotone_and_bounded(self, rng):
        for _ in range(100):
            bid, subj, tpms = rng.uniform(size=3)
            base = combined_similarity(SimilaritySources(bid, subj, tpms))
            assert 0.0 <= base <= 1.0
            bumped = combined_similarity(
                SimilaritySources(min(bid + 0.1, 1.0), subj, tpms)
            )
            assert bumped >= base


class TestAssign:
    def test_forced_perfect_matching(self):
        papers = ["P1", "P2"]
        reviewers = [f"R{i}" for i in range(8)]
        constraints = AssignmentConstraints(min_reviewers_per_paper=4, max_papers_per_reviewer=1)
        result = assign(papers, reviewers, full_sources(papers, reviewers), constraints)
        assert result.feasible and result.report.ok
        per_paper = {p: sum(1 for _, q in result.pairs if q == p) for p in papers}
        assert per_paper == {"P1": 4, "P2": 4}
        assert len({r for r, _ in result.pairs}) == 8  # no reviewer reused

    def test_author_reviewer_cap_and_shortfall(self):
        papers = ["P1"]
        reviewers = [f"R{i}" for i in range(5)]
        tags = {"R0": "Rev2", "R1": "Rev2", "R2": "Rev2"}
        constraints = AssignmentConstraints(min_reviewers_per_paper=4, max_papers_per_reviewer=1)
        result = assign(papers, reviewers, full_sources(papers, reviewers), constraints, tags)
        assigned_tags = [tags.get(r) for r, _ in result.pairs]
        assert assigned_tags.count("Rev2") == 1
        assert len(result.pairs) == 3  # 1 author reviewer + 2 others
        assert result.shortfalls == {"P1": 1}
        assert not result.feasible

    def test_conflicts_never_assigned(self, rng):
        papers = [f"P{i}" for i in range(4)]
        reviewers = [f"R{i}" for i in range(12)]
        conflicts = frozenset({("R0", "P0"), ("R1", "P1"), ("R2", "P2")})
        constraints = AssignmentConstraints(
            min_reviewers_per_paper=3, max_papers_per_reviewer=2, conflicts=conflicts
        )
        result = assign(papers, reviewers, full_sources(papers, reviewers, rng), constraints)
        assert not (result.pairs & conflicts)
        assert result.report.checks["conflicts"] == []

    def test_local_search_beats_pure_greedy(self, rng):
        # swap phase can only add similarity on top of the greedy pass
        for seed in range(10):
            import numpy as np

            local = np.random.default_rng(seed)
            papers = [f"P{i}" for i in range(20)]
            reviewers = [f"R{i}" for i in range(60)]
            sources = full_sources(papers, reviewers, local)
            constraints = AssignmentConstraints(min_reviewers_per_paper=4, max_papers_per_reviewer=3)
            result = assign(papers, reviewers, sources, constraints)
            greedy_only = _greedy_baseline(papers, reviewers, sources, constraints)
            assert result.total_similarity >= greedy_only - 1e-12
            assert result.feasible and result.report.ok

    def test_deterministic(self, rng):
        papers = [f"P{i}" for i in range(6)]
        reviewers = [f"R{i}" for i in range(20)]
        sources = full_sources(papers, reviewers, rng)
        constraints = AssignmentConstraints(min_reviewers_per_paper=3, max_papers_per_reviewer=2)
        a = assign(papers, reviewers, sources, constraints)
        b = assign(papers, reviewers, sources, constraints)
        assert a.pairs == b.pairs and a.total_similarity == b.total_similarity

    def test_capacity_shortfall_is_infeasible(self):
        papers = [f"P{i}" for i in range(10)]
        reviewers = ["R0", "R1"]
        constraints = AssignmentConstraints(min_reviewers_per_paper=4, max_papers_per_reviewer=2)
        with pytest.raises(InfeasibleInstanceError, match="papers/reviewer"):
            assign(papers, reviewers, full_sources(papers, reviewers), constraints)


def _greedy_baseline(papers, reviewers, sources, constraints):
    sim = {
        (r, p): combined_similarity(src)
        for (r, p), src in sources.items()
        if (r, p) not in constraints.conflicts
    }
    load = {r: 0 for r in reviewers}
    cover = {p: 0 for p in papers}
    total = 0.0
    for (r, p) in sorted(sim, key=lambda k: (-sim[k], k[0], k[1])):
        if cover[p] < constraints.min_reviewers_per_paper and load[r] < constraints.max_papers_per_reviewer:
            load[r] += 1
            cover[p] += 1
            total += sim[(r, p)]
    return total


class TestCheckConstraints:
    def test_compliant(self):
        pairs = {("R0", "P0"), ("R1", "P0")}
        constraints = AssignmentConstraints(min_reviewers_per_paper=2, max_papers_per_reviewer=1)
        report = check_constraints(pairs, ["P0"], constraints)
        assert report.ok

    def test_lone_wolf_violation_lists_pairs(self):
        pairs = {("R0", "P0"), ("R1", "P0"), ("R2", "P0"), ("R3", "P0")}
        tags = {"R0": "Rev2", "R1": "Rev2"}
        constraints = AssignmentConstraints(min_reviewers_per_paper=2, max_papers_per_reviewer=1)
        report = check_constraints(pairs, ["P0"], constraints, tags)
        assert report.checks["lone-wolf mitigation"] == [("R0", "P0"), ("R1", "P0")]
        assert not report.ok

    def test_conflict_violation(self):
        pairs = {("R0", "P0"), ("R1", "P0")}
        constraints = AssignmentConstraints(
            min_reviewers_per_paper=1, max_papers_per_reviewer=2, conflicts=frozenset({("R0", "P0")})
        )
        report = check_constraints(pairs, ["P0"], constraints)
        assert report.checks["conflicts"] == [("R0", "P0")]

    def test_coverage_violation(self):
        constraints = AssignmentConstraints(min_reviewers_per_paper=4, max_papers_per_reviewer=2)
        report = check_constraints({("R0", "P0")}, ["P0"], constraints)
        assert report.checks["minimum reviewers per paper"] == [("P0", 1)]


def test_random_feasible_instances_satisfy_all_constraints(rng):
    import numpy as np

    for seed in range(20):
        local = np.random.default_rng(seed)
        n_papers = int(local.integers(3, 8))
        n_reviewers = int(local.integers(16, 30))
        papers = [f"P{i}" for i in range(n_papers)]
        reviewers = [f"R{i}" for i in range(n_reviewers)]
        tags = {r: "Rev2" for r in reviewers if local.uniform() < 0.2}
        conflicts = frozenset(
            (r, p) for r in reviewers for p in papers if local.uniform() < 0.02
        )
        constraints = AssignmentConstraints(
            min_reviewers_per_paper=4,
            max_papers_per_reviewer=3,
            conflicts=conflicts,
        )
        result = assign(papers, reviewers, full_sources(papers, reviewers, local), constraints, tags)
        assert result.feasible, f"seed {seed} unexpectedly infeasible"
        assert result.report.ok
