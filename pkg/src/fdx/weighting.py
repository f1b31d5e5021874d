"""P-value weighting: arithmetic and geometric schemes.

A weight vector w (non-negative, at least one positive entry) reshapes
raw p-values before the step-down runs:

* arithmetic (AM):  p_w = min(p * wbar / w, 1)
* geometric (GM):   p_w = 1 - (1 - p)^(wbar / w)

Zero weights pin the weighted p-value to 1 (the hypothesis can never be
rejected); under GM a raw p of exactly 0 stays 0.  The induced null CDFs
of the weighted p-values are the WeightedAM / WeightedGM family models,
which is how the generic heterogeneous machinery consumes weights.

Two weighted procedures admit closed-form critical values, derived here:
wlr-am (linear bound) and wgr-gm (a power transform of the gr values).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distributions import binom_tail_invert
from .stepdown import CriticalValues
from .transforms import AlphaLike, _k_and_n

__all__ = [
    "WeightProfile",
    "weighted_pvalues_am",
    "weighted_pvalues_gm",
    "wlr_am_critical_values",
    "wgr_gm_critical_values",
]


@dataclass(frozen=True, eq=False)
class WeightProfile:
    """Weight vector with its mean and top-j average profile.

    ``top_mean[j-1]`` is the mean of the j largest weights; it is
    non-increasing in j and bounded below by the overall mean.
    """

    weights: np.ndarray
    mean: float
    sorted_desc: np.ndarray
    top_mean: np.ndarray

    @classmethod
    def from_weights(cls, weights) -> "WeightProfile":
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must form a non-empty 1-d array")
        if np.any(w < 0.0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be finite and non-negative")
        if not np.any(w > 0.0):
            raise ValueError("at least one weight must be positive")
        desc = np.sort(w)[::-1]
        top_mean = np.cumsum(desc) / np.arange(1, w.size + 1)
        return cls(
            weights=w,
            mean=float(np.mean(w)),
            sorted_desc=desc,
            top_mean=top_mean,
        )

    @property
    def m(self) -> int:
        return self.weights.size


def _check_raw(pvals) -> np.ndarray:
    p = np.asarray(pvals, dtype=float)
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise ValueError("p-values must lie in [0, 1]")
    return p


def weighted_pvalues_am(pvals, profile: WeightProfile) -> np.ndarray:
    """Arithmetically weighted p-values min(p * wbar / w, 1)."""
    p = _check_raw(pvals)
    if p.size != profile.m:
        raise ValueError("p-value count must match the weight count")
    w = profile.weights
    out = np.ones(p.size)
    pos = w > 0.0
    out[pos] = np.minimum(p[pos] * profile.mean / w[pos], 1.0)
    return out


def weighted_pvalues_gm(pvals, profile: WeightProfile) -> np.ndarray:
    """Geometrically weighted p-values 1 - (1 - p)^(wbar / w)."""
    p = _check_raw(pvals)
    if p.size != profile.m:
        raise ValueError("p-value count must match the weight count")
    w = profile.weights
    out = np.ones(p.size)
    pos = w > 0.0
    with np.errstate(divide="ignore"):
        out[pos] = -np.expm1((profile.mean / w[pos]) * np.log1p(-p[pos]))
    out[p >= 1.0] = 1.0
    out[(p <= 0.0) & pos] = 0.0
    # zero weight: p_w = 1 except that a raw p of exactly 0 stays 0
    out[(~pos) & (p <= 0.0)] = 0.0
    return out


def wlr_am_critical_values(
    m: int, alpha: AlphaLike, zeta: float, profile: WeightProfile
) -> CriticalValues:
    """Closed-form thresholds of the arithmetic weighted linear procedure.

    tau_ell = zeta * (floor(alpha*ell) + 1) * wbar / (m(ell) * wbar_{m(ell)}),
    i.e. the lr thresholds shrunk by the top-m(ell) average weight ratio.
    """
    if profile.m != m:
        raise ValueError("weight count must equal m")
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    k, n = _k_and_n(m, alpha)
    tau = zeta * k * profile.mean / (n * profile.top_mean[n - 1])
    return CriticalValues(np.maximum.accumulate(tau))


def wgr_gm_critical_values(
    m: int, alpha: AlphaLike, zeta: float, profile: WeightProfile
) -> CriticalValues:
    """Closed-form thresholds of the geometric weighted gr procedure.

    tau_ell = 1 - (1 - tau_gr_ell)^(wbar / wbar_{m(ell)}) where tau_gr is
    the plain gr inversion at (m(ell), floor(alpha*ell) + 1).
    """
    if profile.m != m:
        raise ValueError("weight count must equal m")
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    k, n = _k_and_n(m, alpha)
    tau_gr = np.array(
        [binom_tail_invert(int(ni), int(ki), zeta) for ni, ki in zip(n, k)]
    )
    expo = profile.mean / profile.top_mean[n - 1]
    tau = -np.expm1(expo * np.log1p(-tau_gr))
    return CriticalValues(np.maximum.accumulate(tau))
