"""Frequentist joint rank confidence sets from simultaneous intervals.

Per-entity normal intervals at level 1-gamma are combined (Bonferroni or
independence calibration) and their overlap pattern determines a
contiguous rank range [|Lambda_L|+1, |Lambda_L|+|Lambda_O|+1] per entity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .domain import Dataset, DomainError

BONFERRONI = "bonferroni"
INDEPENDENCE = "independence"


@dataclass(frozen=True)
class KwwRankSet:
    intervals: np.ndarray  # (m, 2) [L_i, U_i]
    gamma: float
    method: str
    lambda_counts: np.ndarray  # (m, 3) |Lambda_L|, |Lambda_R|, |Lambda_O|
    rank_lo: np.ndarray  # (m,) int
    rank_hi: np.ndarray  # (m,) int

    @property
    def m(self) -> int:
        return len(self.rank_lo)

    def expected_rank(self, i: int) -> float:
        """Mean rank under the uniform confidence distribution on the range."""
        return (self.rank_lo[i] + self.rank_hi[i]) / 2.0


def gamma_from_alpha(alpha: float, m: int, method: str = INDEPENDENCE) -> float:
    """Per-interval level gamma achieving joint level 1-alpha."""
    if not 0 < alpha < 1:
        raise DomainError(f"alpha={alpha} must be in (0, 1)")
    if m < 1:
        raise DomainError(f"m={m} must be >= 1")
    if method == BONFERRONI:
        return alpha / m
    if method == INDEPENDENCE:
        return 1 - (1 - alpha) ** (1 / m)
    raise DomainError(f"unknown method {method!r}")


def intervals(ds: Dataset, gamma: float) -> np.ndarray:
    """Per-entity interval y_i -/+ z_{1-gamma/2} sqrt(d_i), as an (m, 2) array."""
    if not 0 < gamma < 1:
        raise DomainError(f"gamma={gamma} must be in (0, 1)")
    z = ndtri(1 - gamma / 2)
    half = z * np.sqrt(ds.d)
    return np.column_stack([ds.y - half, ds.y + half])


def lambda_sets(ivals: np.ndarray) -> np.ndarray:
    """Counts (|Lambda_L|, |Lambda_R|, |Lambda_O|) per entity.

    j is clearly-left of i when U_j <= L_i, clearly-right when U_i <= L_j;
    the remainder overlap.  The three sets partition the other m-1 entities.
    """
    L = ivals[:, 0]
    U = ivals[:, 1]
    m = len(L)
    # pairwise comparisons; the diagonal never satisfies U_i <= L_i for
    # non-degenerate intervals, but mask it anyway
    off = ~np.eye(m, dtype=bool)
    left = (U[None, :] <= L[:, None]) & off  # left[i, j]: j left of i
    right = (U[:, None] <= L[None, :]) & off
    n_left = left.sum(axis=1)
    n_right = right.sum(axis=1)
    n_over = (m - 1) - n_left - n_right
    return np.column_stack([n_left, n_right, n_over])


def rank_confidence_set(ds: Dataset, alpha: float, method: str = INDEPENDENCE) -> KwwRankSet:
    """Joint (at least) 1-alpha confidence set for the rank vector."""
    gamma = gamma_from_alpha(alpha, ds.m, method)
    ivals = intervals(ds, gamma)
    counts = lambda_sets(ivals)
    rank_lo = counts[:, 0] + 1
    rank_hi = counts[:, 0] + counts[:, 2] + 1
    return KwwRankSet(
        intervals=ivals,
        gamma=gamma,
        method=method,
        lambda_counts=counts,
        rank_lo=rank_lo.astype(int),
        rank_hi=rank_hi.astype(int),
    )
