"""Size measures of confidence/credible sets and deviation-from-gold metrics."""

from __future__ import annotations

from dataclasses import dataclass
from math import lgamma, log, pi, exp

import numpy as np

from .domain import DomainError


@dataclass(frozen=True)
class SizeReport:
    volume: float
    vol_mth_root: float  # the simulation tables' convention
    avg_length: float
    geometry: str
    per_side_lengths: np.ndarray | None = None


def orthotope_size(bounds: np.ndarray, geometry: str = "cartesian") -> SizeReport:
    """Volume and average side length of a box given (m, 2) [L, U] bounds."""
    bounds = np.asarray(bounds, dtype=float)
    lengths = bounds[:, 1] - bounds[:, 0]
    if np.any(lengths < 0):
        raise DomainError("orthotope bounds need U >= L on every side")
    m = len(lengths)
    with np.errstate(divide="ignore"):
        log_lengths = np.log(lengths)
    if np.any(lengths == 0):
        volume, root = 0.0, 0.0
    else:
        log_vol = float(np.sum(log_lengths))
        volume = exp(log_vol)
        root = exp(log_vol / m)
    return SizeReport(
        volume=volume,
        vol_mth_root=root,
        avg_length=float(np.mean(lengths)),
        geometry=geometry,
        per_side_lengths=lengths,
    )


def _log_det_spd(K: np.ndarray) -> float:
    try:
        chol = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        raise DomainError("K must be symmetric positive definite")
    return 2.0 * float(np.sum(np.log(np.diag(chol))))


def log_ellipse_volume(K: np.ndarray, m: int, c: float) -> float:
    if c <= 0:
        raise DomainError(f"cutoff c={c} must be > 0")
    return (m / 2) * log(pi) - lgamma((m + 2) / 2) + (m / 2) * log(c) - 0.5 * _log_det_spd(K)


def ellipse_volume(K: np.ndarray, m: int, c: float) -> float:
    """Lebesgue volume of {x : x' K x <= c}.

    pi^(m/2) / Gamma((m+2)/2) * c^(m/2) / det(K)^(1/2), accumulated in log
    space so m in the hundreds survives.
    """
    return exp(log_ellipse_volume(np.asarray(K, dtype=float), m, c))


def ellipse_lengths(K: np.ndarray, m: int, c: float):
    """Representative and calibrated side lengths of the ellipse.

    L_R,i = B(1/2, (m+1)/2) sqrt(c / K_ii); the calibrated L_M,i rescale the
    L_R so their product equals the ellipse volume; L_E is their mean.
    Returns (L_R, L_M, L_E).
    """
    K = np.asarray(K, dtype=float)
    log_beta = lgamma(0.5) + lgamma((m + 1) / 2) - lgamma(m / 2 + 1)
    diag = np.diag(K)
    if np.any(diag <= 0):
        raise DomainError("K must have a positive diagonal")
    log_lr = log_beta + 0.5 * (log(c) - np.log(diag))
    log_vol = log_ellipse_volume(K, m, c)
    log_cal = (log_vol - float(np.sum(log_lr))) / m
    l_r = np.exp(log_lr)
    l_m = np.exp(log_cal + log_lr)
    return l_r, l_m, float(np.mean(l_m))


def ellipse_size(K: np.ndarray, m: int, c: float) -> SizeReport:
    """SizeReport for an elliptical set, lengths by the calibrated measure."""
    _, l_m, l_e = ellipse_lengths(K, m, c)
    log_vol = log_ellipse_volume(np.asarray(K, dtype=float), m, c)
    return SizeReport(
        volume=exp(log_vol),
        vol_mth_root=exp(log_vol / m),
        avg_length=l_e,
        geometry="elliptical",
        per_side_lengths=l_m,
    )


def expected_abs_deviation(marginal, xi: float) -> float:
    """E |rank - xi| under a rank marginal on 1..m; xi may be a midrank."""
    marginal = np.asarray(marginal, dtype=float)
    total = marginal.sum()
    if not np.isclose(total, 1.0, atol=1e-6):
        raise DomainError(f"marginal sums to {total}, expected 1")
    ranks = np.arange(1, len(marginal) + 1)
    return float(np.abs(ranks - xi) @ marginal)


def kww_abs_deviation(rank_lo: int, rank_hi: int, xi: float) -> float:
    """Mean |j - xi| over the contiguous rank range j = rank_lo..rank_hi."""
    if rank_lo > rank_hi:
        raise DomainError(f"rank_lo={rank_lo} > rank_hi={rank_hi}")
    j = np.arange(rank_lo, rank_hi + 1)
    return float(np.mean(np.abs(j - xi)))


def tese(estimates, gold) -> float:
    """Total empirical squared error of point estimates against gold values."""
    estimates = np.asarray(estimates, dtype=float)
    gold = np.asarray(gold, dtype=float)
    if estimates.shape != gold.shape:
        raise DomainError(f"length mismatch: {estimates.shape} vs {gold.shape}")
    return float(np.sum((estimates - gold) ** 2))
