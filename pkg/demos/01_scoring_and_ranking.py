"""Scoring a small conference by hand.

Walks the core scoring path: each review form turns into a composite score
(recommendation + four criteria + award flag, on a 0.5 lattice), papers
aggregate their reviews with confidence weights, reviewer and meta-reviewer
columns are min-max normalized onto [0, 100], fused by a harmonic mean, and
the top 40% are accepted.
"""

import numpy as np

from reviewpipe import (
    DecisionConfig,
    MetaReviewForm,
    ReviewForm,
    build_score_table,
    rank_and_cut,
    review_score,
)

reviews = [
    ReviewForm("castle", "ana", "Accept", ("Very good",) * 4, "Excellent", award=0),
    ReviewForm("castle", "bo", "Borderline", ("Good",) * 4, "Poor", award=0),
    ReviewForm("dune", "ana", "Strong Accept", ("Excellent",) * 4, "Good", award=1),
    ReviewForm("echo", "bo", "Weak Reject", ("Fair",) * 4, "Very good", award=0),
    ReviewForm("echo", "cy", "Reject", ("Fair", "Poor", "Fair", "Good"), "Good", award=0),
    ReviewForm("fjord", "cy", "Weak Accept", ("Good",) * 4, "Good", award=0),
    ReviewForm("fjord", "dee", "Accept", ("Good",) * 4, "Good", award=0),
]
metas = [
    MetaReviewForm("castle", "m1", "Accept"),
    MetaReviewForm("dune", "m1", "Strong Accept"),
    MetaReviewForm("echo", "m2", "Reject"),
    MetaReviewForm("fjord", "m2", "Weak Accept"),
]

print("Per-review composite scores (0.5 lattice in [-7, 8]):")
for form in reviews:
    rs = review_score(form)
    print(f"  {rs.paper:<7} {rs.reviewer:<4} score={rs.value:+.1f}  conf-weight={rs.confidence}")

table = build_score_table(reviews, metas)
print("\nPer-paper table (confidence-weighted mean, normalized, fused):")
print(f"  {'paper':<7} {'s_p':>6} {'xi_p':>6} {'sR':>7} {'sM':>7} {'SI':>7}")
for i, p in enumerate(table.papers):
    print(
        f"  {p:<7} {table.s_p[i]:>6.2f} {table.xi_p[i]:>6.2f}"
        f" {table.sR_norm[i]:>7.2f} {table.sM_norm[i]:>7.2f} {table.SI[i]:>7.2f}"
    )

decisions = rank_and_cut(table, DecisionConfig(acceptance_rate=40.0))
print(f"\nAcceptance cutoff: floor(40% of {len(table.papers)}) = {decisions.n_accept} paper(s)")
for d in decisions.decisions:
    print(f"  #{d.rank} {d.paper:<7} SI={d.score_index:6.2f} -> {'ACCEPT' if d.accept else 'reject'}")

# The harmonic mean punishes disagreement between the two columns: a paper
# needs both a good review score and a good meta score to rank high.
si = np.array(table.SI)
print(f"\nHarmonic-mean fusion: SI <= min column + spread penalty; max SI = {si.max():.2f}")
