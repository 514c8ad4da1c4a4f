"""Posterior samplers: independent-normal UB draws and the Gibbs chain
for the hierarchical (Fay-Herriot) model with variance prior (Dbar+A)^(-1/2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Dataset, DomainError

UB = "UB"
HB = "HB"


@dataclass(frozen=True)
class HbConfig:
    """Gibbs chain settings for the hierarchical model."""

    samples: int = 50000
    burn_in: int = 2000
    thin: int = 1
    seed: int = 0
    include_intercept: bool = True
    init_a: float | None = None  # defaults to mean(d)
    fix_a: float | None = None  # degenerate test hook: freeze the model variance

    def __post_init__(self):
        if self.samples < 1:
            raise DomainError(f"samples={self.samples} must be >= 1")
        if self.burn_in < 0:
            raise DomainError(f"burn_in={self.burn_in} must be >= 0")
        if self.thin < 1:
            raise DomainError(f"thin={self.thin} must be >= 1")
        if self.init_a is not None and self.init_a <= 0:
            raise DomainError(f"init_a={self.init_a} must be > 0")
        if self.fix_a is not None and self.fix_a <= 0:
            raise DomainError(f"fix_a={self.fix_a} must be > 0")


@dataclass(frozen=True)
class PosteriorDraws:
    """S kept draws of the mean vector, plus (beta, A) chains for HB."""

    theta: np.ndarray  # (S, m)
    model: str  # UB or HB
    seed: int
    beta: np.ndarray | None = None  # (S, q), HB only
    a: np.ndarray | None = None  # (S,), HB only
    burn_in: int = 0
    thin: int = 1

    def __post_init__(self):
        if self.theta.ndim != 2 or self.theta.shape[0] < 1:
            raise DomainError("theta draws must be a non-empty S x m matrix")
        if self.a is not None and np.any(self.a <= 0):
            raise DomainError("model-variance draws must all be > 0")

    @property
    def S(self) -> int:
        return self.theta.shape[0]

    @property
    def m(self) -> int:
        return self.theta.shape[1]


@dataclass(frozen=True)
class PosteriorSummary:
    mean: np.ndarray  # (m,)
    cov: np.ndarray  # (m, m), 1/S normalization
    a_mean: float | None = None
    a_median: float | None = None


def design_matrix(ds: Dataset, include_intercept: bool = True) -> np.ndarray:
    """Covariate matrix for the HB fit; all-ones column when p = 0."""
    if ds.p == 0:
        return np.ones((ds.m, 1))
    if include_intercept:
        return np.column_stack([np.ones(ds.m), ds.x])
    return ds.x


def sample_ub(ds: Dataset, S: int, seed: int) -> PosteriorDraws:
    """Draw S vectors theta with theta_i ~ Normal(y_i, d_i), independent."""
    if S < 1:
        raise DomainError(f"S={S} must be >= 1")
    rng = np.random.default_rng(seed)
    theta = ds.y + np.sqrt(ds.d) * rng.standard_normal((S, ds.m))
    return PosteriorDraws(theta=theta, model=UB, seed=seed)


def cond_theta(y, d, xb, a, rng) -> np.ndarray:
    """One draw of theta | beta, A: shrink each y_i toward its regression fit.

    theta_i ~ Normal((A y_i + d_i xb_i)/(A + d_i), A d_i/(A + d_i)).
    """
    if a <= 0:
        raise DomainError(f"model variance a={a} must be > 0")
    mean = (a * y + d * xb) / (a + d)
    var = a * d / (a + d)
    return mean + np.sqrt(var) * rng.standard_normal(len(y))


def cond_beta(xtx_inv_chol, xtx_inv_xt, theta, a, rng) -> np.ndarray:
    """One draw of beta | theta, A ~ Normal((X'X)^-1 X' theta, A (X'X)^-1).

    Takes the precomputed Cholesky factor of (X'X)^-1 and the projector
    (X'X)^-1 X' so the per-sweep cost is two small matmuls.
    """
    if a <= 0:
        raise DomainError(f"model variance a={a} must be > 0")
    mean = xtx_inv_xt @ theta
    q = len(mean)
    return mean + np.sqrt(a) * (xtx_inv_chol @ rng.standard_normal(q))


def cond_a_rejection(theta, xb, dbar, rng, max_tries: int = 100_000_000) -> float:
    """Rejection draw of the model variance A.

    Target density is proportional to (dbar+A)^(-1/2) A^(-m/2) exp(-SSE/(2A))
    with SSE the residual sum of squares of theta on the regression fit.
    Proposal: A ~ InverseGamma(m/2 - 1, SSE/2); accept w.p. sqrt(dbar/(dbar+A)).

    Proposals are drawn in growing batches: at small m the proposal is
    heavy-tailed, and when SSE wanders far above dbar the acceptance rate
    drops like sqrt(dbar/SSE), so single-draw looping would be too slow.
    """
    theta = np.asarray(theta, dtype=float)
    m = len(theta)
    shape = m / 2.0 - 1.0
    if shape <= 0:
        raise DomainError(f"m={m} too small for a proper inverse-gamma proposal (need m >= 3)")
    if dbar <= 0:
        raise DomainError(f"dbar={dbar} must be > 0")
    sse = float(np.sum((theta - xb) ** 2))
    if sse == 0.0:
        raise DomainError("zero residual sum of squares: degenerate input to variance draw")
    scale = sse / 2.0
    batch, tried = 4, 0
    while tried < max_tries:
        n = min(batch, max_tries - tried)
        a = scale / rng.gamma(shape, size=n)
        hit = np.flatnonzero(rng.random(n) <= np.sqrt(dbar / (dbar + a)))
        if hit.size:
            return float(a[hit[0]])
        tried += n
        batch = min(batch * 4, 1 << 20)
    raise DomainError("rejection sampler failed to accept; input may be degenerate")


def gibbs_hb(ds: Dataset, cfg: HbConfig) -> PosteriorDraws:
    """Gibbs chain for (theta, beta, A) under the hierarchical model.

    Sweeps theta | beta, A -> beta | theta, A -> A | theta, beta, discarding
    `burn_in` initial sweeps and keeping every `thin`-th of the rest.
    """
    X = design_matrix(ds, cfg.include_intercept)
    m, q = X.shape
    if m <= q + 1:
        raise DomainError(
            f"propriety guard: need m > p + 2 (m={m}, design columns={q}); "
            "posterior of the model variance would have a non-integrable tail"
        )
    xtx = X.T @ X
    if np.linalg.matrix_rank(xtx) < q:
        raise DomainError("design matrix is rank deficient")
    xtx_inv = np.linalg.inv(xtx)
    xtx_inv_chol = np.linalg.cholesky(xtx_inv)
    xtx_inv_xt = xtx_inv @ X.T

    y, d = ds.y, ds.d
    dbar = float(np.mean(d))
    rng = np.random.default_rng(cfg.seed)

    # start at the least-squares fit with A at the mean sampling variance
    a = cfg.fix_a if cfg.fix_a is not None else (cfg.init_a if cfg.init_a is not None else dbar)
    theta = y.copy()
    beta = xtx_inv_xt @ y

    S = cfg.samples
    theta_out = np.empty((S, m))
    beta_out = np.empty((S, q))
    a_out = np.empty(S)

    kept = 0
    total = cfg.burn_in + S * cfg.thin
    for sweep in range(total):
        xb = X @ beta
        theta = cond_theta(y, d, xb, a, rng)
        beta = cond_beta(xtx_inv_chol, xtx_inv_xt, theta, a, rng)
        if cfg.fix_a is None:
            a = cond_a_rejection(theta, X @ beta, dbar, rng)
        if sweep >= cfg.burn_in and (sweep - cfg.burn_in) % cfg.thin == 0:
            theta_out[kept] = theta
            beta_out[kept] = beta
            a_out[kept] = a
            kept += 1
    assert kept == S

    return PosteriorDraws(
        theta=theta_out,
        model=HB,
        seed=cfg.seed,
        beta=beta_out,
        a=a_out,
        burn_in=cfg.burn_in,
        thin=cfg.thin,
    )


def summarize(draws: PosteriorDraws) -> PosteriorSummary:
    """Posterior mean and covariance of theta, with 1/S normalization."""
    if draws.S < 2:
        raise DomainError("need at least 2 draws to summarize")
    mean = draws.theta.mean(axis=0)
    centered = draws.theta - mean
    cov = centered.T @ centered / draws.S
    a_mean = a_median = None
    if draws.a is not None:
        a_mean = float(np.mean(draws.a))
        a_median = float(np.median(draws.a))
    return PosteriorSummary(mean=mean, cov=cov, a_mean=a_mean, a_median=a_median)
