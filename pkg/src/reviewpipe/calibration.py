"""Reviewer bias calibration with a three-variance Gaussian model.

Each stacked review score decomposes as

    s = q(paper) + b(reviewer) + noise,
    q ~ N(mu_q, sigma_q^2),  b ~ N(0, sigma_b^2),  noise ~ N(0, sigma_e^2)

so the joint score vector is Gaussian with a covariance whose entries
depend only on shared paper / shared reviewer structure.  Dividing through
by sigma_q^2 leaves two ratio parameters explored on a grid while
sigma_q^2 itself has a closed-form maximum-likelihood value per grid
point.  The bias term is then removed by Gaussian conditioning, and a
Monte-Carlo pass over the posterior turns ranked samples into per-paper
acceptance probabilities.

All dense linear algebra goes through symmetric positive-definite
(Cholesky) factorizations; no explicit inverses.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .scoring import DecisionConfig, normalize

__all__ = [
    "CalibrationInputs",
    "GridSpec",
    "Hyperparams",
    "CalibrationFit",
    "AcceptanceEstimate",
    "DegenerateModelError",
    "UnidentifiableModelWarning",
    "build_covariance",
    "nll",
    "fit_sigma_q",
    "fit_hyperparams",
    "posterior",
    "aggregate_calibrated",
    "acceptance_probability",
    "calibrate_meta",
]


class DegenerateModelError(ValueError):
    """The likelihood cannot be evaluated (zero residual or non-PD matrix)."""


class UnidentifiableModelWarning(UserWarning):
    """Bias terms cannot be separated from paper quality on this data."""


@dataclass
class CalibrationInputs:
    """Stacked score vector with paper/reviewer index labels per entry."""

    s: np.ndarray
    paper_idx: np.ndarray
    reviewer_idx: np.ndarray
    paper_ids: list[str]
    reviewer_ids: list[str]
    confidences: np.ndarray | None = None

    def __post_init__(self):
        self.s = np.asarray(self.s, dtype=float)
        self.paper_idx = np.asarray(self.paper_idx, dtype=int)
        self.reviewer_idx = np.asarray(self.reviewer_idx, dtype=int)
        n = len(self.s)
        if len(self.paper_idx) != n or len(self.reviewer_idx) != n:
            raise ValueError("labels must align with the score vector")
        if n < 2:
            raise ValueError("calibration needs at least two stacked scores")
        if self.confidences is None:
            self.confidences = np.ones(n)
        else:
            self.confidences = np.asarray(self.confidences, dtype=float)

    @property
    def n(self) -> int:
        return len(self.s)

    @property
    def n_papers(self) -> int:
        return len(self.paper_ids)


@dataclass(frozen=True)
class GridSpec:
    """Logarithmic grid over the two variance ratios."""

    lo: float = 1e-2
    hi: float = 1e2
    points: int = 13

    def values(self) -> np.ndarray:
        if self.points < 1:
            raise ValueError("grid needs at least one point")
        return np.geomspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class Hyperparams:
    """Fitted model parameters; the ratios are relative to sigma_q^2."""

    sigma_q2: float
    sb2_hat: float
    se2_hat: float
    mu_q: float

    def __post_init__(self):
        if self.sigma_q2 <= 0:
            raise ValueError("sigma_q^2 must be positive")
        if self.se2_hat <= 0:
            raise ValueError("noise ratio must be positive")
        if self.sb2_hat < 0:
            raise ValueError("bias ratio must be nonnegative")

    @property
    def sigma_b2(self) -> float:
        return self.sb2_hat * self.sigma_q2

    @property
    def sigma_e2(self) -> float:
        return self.se2_hat * self.sigma_q2


@dataclass
class CalibrationFit:
    hyperparams: Hyperparams
    mu_y: np.ndarray
    sigma_y: np.ndarray
    calibrated_paper_scores: np.ndarray
    nll: float
    grid_table: list[dict] = field(default_factory=list)

    def to_summary(self) -> dict:
        hp = self.hyperparams
        return {
            "mu_q": hp.mu_q,
            "sigma_q2": hp.sigma_q2,
            "sigma_b2": hp.sigma_b2,
            "sigma_e2": hp.sigma_e2,
            "sb2_hat": hp.sb2_hat,
            "se2_hat": hp.se2_hat,
            "nll": self.nll,
            "grid": self.grid_table,
        }


def build_covariance(paper_idx, reviewer_idx, sb2_hat: float, se2_hat: float) -> np.ndarray:
    """Scaled covariance: 1 per shared paper, the bias ratio per shared
    reviewer, the noise ratio on the diagonal."""
    pi = np.asarray(paper_idx)
    ri = np.asarray(reviewer_idx)
    same_paper = (pi[:, None] == pi[None, :]).astype(float)
    same_reviewer = (ri[:, None] == ri[None, :]).astype(float)
    return same_paper + sb2_hat * same_reviewer + se2_hat * same_paper * same_reviewer


def _chol_quad_logdet(k_hat: np.ndarray, r: np.ndarray) -> tuple[float, float]:
    """(r^T K^-1 r, log|K|) via one Cholesky factorization."""
    try:
        c, low = cho_factor(k_hat, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise DegenerateModelError(f"covariance not positive definite: {exc}") from exc
    alpha = cho_solve((c, low), r, check_finite=False)
    logdet = 2.0 * float(np.sum(np.log(np.diag(c))))
    return float(r @ alpha), logdet


def nll(s, k_hat, sigma_q2: float, mu_q: float) -> float:
    """Negative log-likelihood of the stacked scores under the model."""
    s = np.asarray(s, dtype=float)
    n = len(s)
    if sigma_q2 <= 0:
        raise DegenerateModelError("sigma_q^2 must be positive")
    quad, logdet = _chol_quad_logdet(k_hat, s - mu_q)
    return 0.5 * n * np.log(2.0 * np.pi * sigma_q2) + 0.5 * logdet + quad / (2.0 * sigma_q2)


def fit_sigma_q(s, k_hat, mu_q: float) -> float:
    """Closed-form maximizer of the likelihood in sigma_q^2 given the
    ratio parameters: the K-whitened mean square of the centered scores."""
    s = np.asarray(s, dtype=float)
    quad, _ = _chol_quad_logdet(k_hat, s - mu_q)
    sigma_q2 = quad / len(s)
    if sigma_q2 <= 0:
        raise DegenerateModelError("zero centered score vector: sigma_q^2 degenerate")
    return sigma_q2


def fit_hyperparams(
    inputs: CalibrationInputs,
    grid: GridSpec | None = None,
    collect_grid: bool = False,
) -> Hyperparams | tuple[Hyperparams, list[dict]]:
    """Grid search over the two variance ratios with profiled sigma_q^2.

    mu_q is the sample mean of the stacked scores.  Each grid point gets
    its closed-form sigma_q^2 and profile NLL; the argmin wins.  Ties are
    broken toward the earlier grid point, so duplicate points are
    harmless.
    """
    grid = grid or GridSpec()
    mu_q = float(np.mean(inputs.s))
    values = grid.values()
    best = None
    table: list[dict] = []
    for sb2 in values:
        for se2 in values:
            k_hat = build_covariance(inputs.paper_idx, inputs.reviewer_idx, sb2, se2)
            try:
                sq2 = fit_sigma_q(inputs.s, k_hat, mu_q)
                val = nll(inputs.s, k_hat, sq2, mu_q)
            except DegenerateModelError:
                continue
            if collect_grid:
                table.append(
                    {"sb2_hat": float(sb2), "se2_hat": float(se2), "sigma_q2": sq2, "nll": val}
                )
            if best is None or val < best[0]:
                best = (val, sb2, se2, sq2)
    if best is None:
        raise DegenerateModelError("all grid points degenerate")
    hp = Hyperparams(sigma_q2=best[3], sb2_hat=float(best[1]), se2_hat=float(best[2]), mu_q=mu_q)
    if collect_grid:
        return hp, table
    return hp


def posterior(inputs: CalibrationInputs, hp: Hyperparams) -> tuple[np.ndarray, np.ndarray]:
    """Conditional Gaussian over bias-removed scores y = q + noise.

    Cross-covariance between s and y equals the covariance of y, so

        mu_y    = mu_q + K_y K^-1 (s - mu_q)
        Sigma_y = K_y - K_y K^-1 K_y
    """
    pi, ri = inputs.paper_idx, inputs.reviewer_idx
    same_paper = (pi[:, None] == pi[None, :]).astype(float)
    both = same_paper * (ri[:, None] == ri[None, :]).astype(float)
    k = hp.sigma_q2 * same_paper + hp.sigma_b2 * (ri[:, None] == ri[None, :]) + hp.sigma_e2 * both
    k_y = hp.sigma_q2 * same_paper + hp.sigma_e2 * both
    try:
        c, low = cho_factor(k, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise DegenerateModelError(f"covariance not positive definite: {exc}") from exc
    r = inputs.s - hp.mu_q
    mu_y = hp.mu_q + k_y @ cho_solve((c, low), r, check_finite=False)
    sigma_y = k_y - k_y @ cho_solve((c, low), k_y, check_finite=False)
    sigma_y = 0.5 * (sigma_y + sigma_y.T)  # symmetrize round-off
    return mu_y, sigma_y


def aggregate_calibrated(
    mu_y: np.ndarray,
    paper_idx: np.ndarray,
    confidences: np.ndarray,
    n_papers: int,
) -> np.ndarray:
    """Confidence-weighted per-paper mean of the calibrated scores,
    normalized onto [0, 100]."""
    return normalize(_aggregate_raw(mu_y, paper_idx, confidences, n_papers))


def _aggregate_raw(values, paper_idx, confidences, n_papers) -> np.ndarray:
    num = np.bincount(paper_idx, weights=confidences * values, minlength=n_papers)
    den = np.bincount(paper_idx, weights=confidences, minlength=n_papers)
    if np.any(den == 0):
        raise ValueError("every paper needs at least one review entry")
    return num / den


def _psd_factor(sigma: np.ndarray) -> np.ndarray:
    """Square root of a PSD matrix, tolerating tiny negative eigenvalues.

    Eigenvalues below -1e-8 * lambda_max indicate a real PSD violation and
    raise; small negative round-off is clamped to zero.
    """
    w, v = np.linalg.eigh(sigma)
    lam_max = max(float(w[-1]), 0.0)
    if np.any(w < -1e-8 * max(lam_max, 1.0)):
        raise DegenerateModelError(f"posterior covariance not PSD: min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return v * np.sqrt(w)


@dataclass
class AcceptanceEstimate:
    """Monte-Carlo acceptance probabilities; counts/n_samples per paper."""

    papers: list[str]
    counts: np.ndarray
    n_samples: int
    seed: int
    n_accept: int

    @property
    def probability(self) -> np.ndarray:
        return self.counts / self.n_samples


def acceptance_probability(
    mu_y: np.ndarray,
    sigma_y: np.ndarray,
    inputs: CalibrationInputs,
    cfg: DecisionConfig,
    n_samples: int = 1000,
    seed: int = 0,
) -> AcceptanceEstimate:
    """Sample posterior score vectors, rank each sampled conference, and
    count how often each paper lands in the accepted top slice.

    Each sample accepts exactly floor(a% of P) papers, so the probability
    column sums to that number exactly.  Deterministic for a fixed seed.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if len(mu_y) != inputs.n or sigma_y.shape != (inputs.n, inputs.n):
        raise ValueError("posterior dimensions do not match the inputs")
    factor = _psd_factor(sigma_y)
    rng = np.random.default_rng(seed)
    draws = mu_y[:, None] + factor @ rng.standard_normal((inputs.n, n_samples))

    p = inputs.n_papers
    den = np.bincount(inputs.paper_idx, weights=inputs.confidences, minlength=p)
    weights = inputs.confidences / den[inputs.paper_idx]
    agg = np.zeros((p, n_samples))
    np.add.at(agg, inputs.paper_idx, weights[:, None] * draws)

    k = cfg.n_accept(p)
    counts = np.zeros(p, dtype=int)
    lex = np.argsort(np.argsort(inputs.paper_ids))  # rank of each paper id, lex order
    for j in range(n_samples):
        order = np.lexsort((lex, -agg[:, j]))
        counts[order[:k]] += 1
    return AcceptanceEstimate(
        papers=list(inputs.paper_ids), counts=counts, n_samples=n_samples, seed=seed, n_accept=k
    )


def calibrate_meta(
    xi: np.ndarray,
    paper_idx: np.ndarray,
    metareviewer_idx: np.ndarray,
    paper_ids: list[str],
    metareviewer_ids: list[str],
    grid: GridSpec | None = None,
) -> np.ndarray:
    """Calibrate meta-reviewer scores with the same model, meta-reviewers
    taking the reviewer role; returns normalized per-paper scores.

    When every meta-reviewer covers exactly one paper the bias term is
    unidentifiable: the inputs are passed through (normalized) with a
    warning instead of fitting.
    """
    xi = np.asarray(xi, dtype=float)
    if len(xi) < 2:
        raise ValueError("meta calibration needs at least two entries")
    loads = np.bincount(np.asarray(metareviewer_idx), minlength=len(metareviewer_ids))
    if np.all(loads[np.unique(metareviewer_idx)] <= 1):
        warnings.warn(
            "every meta-reviewer covers a single paper: bias unidentifiable, "
            "returning uncalibrated scores",
            UnidentifiableModelWarning,
            stacklevel=2,
        )
        agg = _aggregate_raw(xi, np.asarray(paper_idx), np.ones(len(xi)), len(paper_ids))
        return normalize(agg)
    inputs = CalibrationInputs(
        s=xi,
        paper_idx=paper_idx,
        reviewer_idx=metareviewer_idx,
        paper_ids=paper_ids,
        reviewer_ids=metareviewer_ids,
    )
    hp = fit_hyperparams(inputs, grid)
    mu_y, _ = posterior(inputs, hp)
    return aggregate_calibrated(mu_y, inputs.paper_idx, inputs.confidences, inputs.n_papers)
