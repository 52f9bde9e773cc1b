import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from reviewpipe.records import (
    MetaReviewForm,
    ReviewForm,
    UnknownLabelError,
    encode_likert,
    export_json,
    export_metas_csv,
    export_reviews_csv,
    likert_labels,
    load_reviews,
    validate,
)

from conftest import make_review

REVIEW_HEADER = "paper_id,reviewer_id,recommendation,c1,c2,c3,c4,confidence,award,comments"


def write_reviews(tmp_path, rows, name="reviews.csv"):
    path = tmp_path / name
    path.write_text("\n".join([REVIEW_HEADER] + rows) + "\n", encoding="utf-8")
    return path


def review_row(paper="P1", reviewer="R1", rec="Accept", crit="Good", conf="Good", award="0"):
    return f"{paper},{reviewer},{rec},{crit},{crit},{crit},{crit},{conf},{award},fine"


class TestEncodeLikert:
    def test_recommendation_weights(self):
        assert encode_likert("Strong Accept", "recommendation") == 3
        assert encode_likert("Accept", "recommendation") == 2
        assert encode_likert("Borderline", "recommendation") == 0
        assert encode_likert("Strong Reject", "recommendation") == -3

    def test_criterion_vs_confidence(self):
        assert encode_likert("Excellent", "criterion") == 1.0
        assert encode_likert("Excellent", "confidence") == 1.2
        assert encode_likert("Poor", "confidence") == 0.8

    def test_case_insensitive_trimmed(self):
        assert encode_likert("  weak ACCEPT ", "recommendation") == 1

    def test_unknown_label(self):
        with pytest.raises(UnknownLabelError):
            encode_likert("Maybe", "recommendation")

    def test_unknown_scale(self):
        with pytest.raises(ValueError):
            encode_likert("Good", "vibes")

    @pytest.mark.parametrize(
        "scale,count", [("recommendation", 7), ("criterion", 5), ("confidence", 5)]
    )
    def test_injective_and_total(self, scale, count):
        labels = likert_labels(scale)
        assert len(labels) == count
        weights = [encode_likert(label, scale) for label in labels]
        assert len(set(weights)) == count


class TestLoad:
    def test_well_formed_rows(self, tmp_path):
        path = write_reviews(tmp_path, [review_row(reviewer=f"R{i}") for i in range(3)])
        result = load_reviews(path)
        assert len(result.reviews) == 3
        assert not result.report.rejected
        assert result.assignments.review_pairs == {(f"R{i}", "P1") for i in range(3)}

    def test_unknown_label_rejected_not_aborted(self, tmp_path):
        path = write_reviews(
            tmp_path, [review_row(), review_row(reviewer="R2", rec="Maybe")]
        )
        result = load_reviews(path)
        assert len(result.reviews) == 1
        assert len(result.report.rejected) == 1
        row, reason = result.report.rejected[0]
        assert "unknown label" in reason and row["recommendation"] == "Maybe"

    def test_unknown_column_aborts(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text(REVIEW_HEADER + ",sentiment\n", encoding="utf-8")
        with pytest.raises(ValueError, match="unknown column"):
            load_reviews(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            load_reviews(tmp_path / "nope.csv")

    def test_missing_confidence_defaults_with_warning(self, tmp_path):
        path = write_reviews(tmp_path, ["P1,R1,Accept,Good,Good,Good,Good,,0,"])
        result = load_reviews(path)
        assert result.reviews[0].confidence == "Good"
        assert any("confidence" in w for w in result.report.warnings)

    def test_missing_award_defaults_zero(self, tmp_path):
        path = write_reviews(tmp_path, ["P1,R1,Accept,Good,Good,Good,Good,Good,,"])
        result = load_reviews(path)
        assert result.reviews[0].award == 0

    def test_meta_csv(self, tmp_path):
        path = write_reviews(tmp_path, [review_row()])
        meta = tmp_path / "meta.csv"
        meta.write_text("paper_id,metareviewer_id,recommendation\nP1,M1,Accept\n")
        result = load_reviews(path, meta_path=meta)
        assert result.metas == [MetaReviewForm("P1", "M1", "Accept")]

    def test_json_format(self, tmp_path):
        payload = {
            "reviews": [
                {
                    "paper_id": "P1",
                    "reviewer_id": "R1",
                    "recommendation": "Accept",
                    "c1": "Good",
                    "c2": "Good",
                    "c3": "Good",
                    "c4": "Good",
                    "confidence": "Good",
                    "award": 0,
                    "comments": "",
                }
            ],
            "meta_reviews": [
                {"paper_id": "P1", "metareviewer_id": "M1", "recommendation": "Accept"}
            ],
        }
        path = tmp_path / "export.json"
        path.write_text(json.dumps(payload))
        result = load_reviews(path, format="json")
        assert len(result.reviews) == 1 and len(result.metas) == 1


class TestValidate:
    def test_clean_paper_no_findings(self):
        reviews = [make_review("P1", f"R{i}") for i in range(4)]
        metas = [MetaReviewForm("P1", "M1", "Accept")]
        assert validate(reviews, metas).findings == []

    def test_below_minimum_reviews(self):
        report = validate([make_review("P1", "R1")], [MetaReviewForm("P1", "M1", "Accept")])
        assert ("below minimum reviews", "paper P1 has 1 review(s)") in report.findings

    def test_duplicate_assignment(self):
        reviews = [make_review("P1", "R1"), make_review("P1", "R1"), make_review("P1", "R2")]
        report = validate(reviews, [MetaReviewForm("P1", "M1", "Accept")])
        assert any(kind == "duplicate assignment" for kind, _ in report.findings)

    def test_missing_meta_review(self):
        report = validate([make_review("P1", "R1"), make_review("P1", "R2")], [])
        assert ("missing meta-review", "paper P1") in report.findings

    def test_mean_is_exact_ratio(self):
        reviews = [make_review(f"P{p}", f"R{r}") for p in range(4) for r in range(3)]
        report = validate(reviews)
        assert report.mean_reviews_per_paper == 12 / 4

    def test_counts_order_independent(self, rng):
        reviews = [make_review(f"P{p}", f"R{r}") for p in range(5) for r in range(3)]
        shuffled = list(reviews)
        rng.shuffle(shuffled)
        a, b = validate(reviews), validate(shuffled)
        assert (a.n_papers, a.n_reviews, a.reviews_per_paper) == (
            b.n_papers,
            b.n_reviews,
            b.reviews_per_paper,
        )


class TestRoundTrip:
    def test_csv_round_trip(self, tmp_path):
        reviews = [
            make_review("P1", "R1", rec="Strong Accept", crit="Very good", conf="Excellent", award=1),
            make_review("P2", "R2", rec="Weak Reject", crit="Fair", conf="Poor"),
        ]
        metas = [MetaReviewForm("P1", "M1", "Accept"), MetaReviewForm("P2", "M2", "Reject")]
        rpath = tmp_path / "r.csv"
        mpath = tmp_path / "m.csv"
        rpath.write_text(export_reviews_csv(reviews), encoding="utf-8")
        mpath.write_text(export_metas_csv(metas), encoding="utf-8")
        result = load_reviews(rpath, meta_path=mpath)
        assert result.reviews == reviews
        assert result.metas == metas
        assert rpath.read_text() == export_reviews_csv(result.reviews)

    def test_json_round_trip(self, tmp_path):
        reviews = [make_review("P1", "R1", rec="Accept", crit="Excellent")]
        metas = [MetaReviewForm("P1", "M1", "Borderline")]
        path = tmp_path / "e.json"
        path.write_text(export_json(reviews, metas), encoding="utf-8")
        result = load_reviews(path, format="json")
        assert result.reviews == reviews and result.metas == metas
        assert path.read_text() == export_json(result.reviews, result.metas)


@given(st.sampled_from(["recommendation", "criterion", "confidence"]), st.text(max_size=20))
def test_encode_rejects_arbitrary_text(scale, text):
    labels = {label.lower() for label in likert_labels(scale)}
    if " ".join(text.strip().split()).lower() not in labels:
        with pytest.raises(UnknownLabelError):
            encode_likert(text, scale)


def test_award_flag_domain():
    with pytest.raises(ValueError):
        ReviewForm("P1", "R1", "Accept", ("Good",) * 4, "Good", award=2)
