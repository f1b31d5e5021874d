"""Null distribution models and tail probability kernels.

Everything downstream (transformation functions, critical values, the
simulation harness) is built on four small pieces:

* a family of per-hypothesis null CDF models (uniform, weighted-AM,
  weighted-GM, and finite step functions),
* the binomial upper tail and its inverse in the success probability,
* the Poisson-binomial upper tail (exact dynamic program),
* the geometric-average complement ``tilde_F`` that turns a collection of
  CDF values into a single binomial parameter.

All CDF evaluation is right-continuous and restricted to t in [0, 1].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np
from scipy import special

__all__ = [
    "Uniform",
    "WeightedAM",
    "WeightedGM",
    "StepCdf",
    "NullCdf",
    "CdfFamily",
    "binom_tail",
    "binom_tail_invert",
    "pbin_tail",
    "tilde_F",
    "top_j_sum",
]

#: absolute tolerance of the bisection in `binom_tail_invert`
INVERT_TOL = 1e-12


def _as_unit_interval(ts) -> np.ndarray:
    out = np.asarray(ts, dtype=float)
    if out.size and (np.min(out) < 0.0 or np.max(out) > 1.0 or not np.all(np.isfinite(out))):
        raise ValueError("evaluation points must lie in [0, 1]")
    return out


@dataclass(frozen=True)
class Uniform:
    """Uniform null model on [0, 1]: F(t) = t."""

    def evaluate(self, t: float) -> float:
        return float(_as_unit_interval(t))

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        return _as_unit_interval(ts).copy()


@dataclass(frozen=True)
class WeightedAM:
    """CDF of an arithmetically weighted p-value, F(t) = min(w*t/wbar, 1).

    This is the exact null CDF of ``p * wbar / w`` when the raw p-value is
    uniform.  ``w == 0`` gives the constant-0 function (the weighted
    p-value is pinned to 1 and the hypothesis is never rejectable).
    """

    weight: float
    mean_weight: float

    def __post_init__(self):
        if not (self.weight >= 0.0 and np.isfinite(self.weight)):
            raise ValueError("weight must be a finite non-negative real")
        if not (self.mean_weight > 0.0 and np.isfinite(self.mean_weight)):
            raise ValueError("mean weight must be a finite positive real")

    def evaluate(self, t: float) -> float:
        t = float(_as_unit_interval(t))
        return min(self.weight * t / self.mean_weight, 1.0)

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        ts = _as_unit_interval(ts)
        return np.minimum(self.weight * ts / self.mean_weight, 1.0)


@dataclass(frozen=True)
class WeightedGM:
    """CDF of a geometrically weighted p-value, F(t) = 1 - (1-t)^(w/wbar).

    ``w == 0`` corresponds to a weighted p-value equal to 1 almost surely:
    the CDF is 0 for t < 1 and 1 at t = 1.
    """

    weight: float
    mean_weight: float

    def __post_init__(self):
        if not (self.weight >= 0.0 and np.isfinite(self.weight)):
            raise ValueError("weight must be a finite non-negative real")
        if not (self.mean_weight > 0.0 and np.isfinite(self.mean_weight)):
            raise ValueError("mean weight must be a finite positive real")

    def evaluate(self, t: float) -> float:
        t = float(_as_unit_interval(t))
        if self.weight == 0.0:
            return 1.0 if t >= 1.0 else 0.0
        if t >= 1.0:
            return 1.0
        return -np.expm1((self.weight / self.mean_weight) * np.log1p(-t))

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        ts = _as_unit_interval(ts)
        at_one = ts >= 1.0
        if self.weight == 0.0:
            return at_one.astype(float)
        with np.errstate(divide="ignore"):
            out = -np.expm1((self.weight / self.mean_weight) * np.log1p(-ts))
        out[at_one] = 1.0
        return out


@dataclass(frozen=True, eq=False)
class StepCdf:
    """Finite step CDF given by jump locations and cumulative values.

    Parameters
    ----------
    support : array_like
        Strictly increasing jump locations in [0, 1].
    cum : array_like
        Cumulative probability at (and right of) each jump; non-decreasing,
        all values in [0, 1].

    Evaluation is right-continuous: F(t) is the cumulative value at the
    largest support point <= t, and 0 below the first support point.
    """

    support: np.ndarray
    cum: np.ndarray

    def __post_init__(self):
        sup = np.asarray(self.support, dtype=float)
        cum = np.asarray(self.cum, dtype=float)
        if sup.ndim != 1 or sup.size == 0:
            raise ValueError("support must be a non-empty 1-d sequence")
        if cum.shape != sup.shape:
            raise ValueError("support and cum must have equal length")
        if np.any(np.diff(sup) <= 0.0):
            raise ValueError("support must be strictly increasing")
        if sup[0] < 0.0 or sup[-1] > 1.0:
            raise ValueError("support must lie in [0, 1]")
        if np.any(np.diff(cum) < 0.0) or cum[0] < 0.0 or cum[-1] > 1.0:
            raise ValueError("cum must be non-decreasing with values in [0, 1]")
        sup = sup.copy()
        cum = cum.copy()
        sup.flags.writeable = False
        cum.flags.writeable = False
        object.__setattr__(self, "support", sup)
        object.__setattr__(self, "cum", cum)

    def evaluate(self, t: float) -> float:
        t = float(_as_unit_interval(t))
        idx = int(np.searchsorted(self.support, t, side="right"))
        return float(self.cum[idx - 1]) if idx > 0 else 0.0

    def evaluate_many(self, ts: np.ndarray) -> np.ndarray:
        ts = _as_unit_interval(ts)
        idx = np.searchsorted(self.support, ts, side="right")
        out = np.zeros(ts.shape, dtype=float)
        hit = idx > 0
        out[hit] = self.cum[idx[hit] - 1]
        return out


NullCdf = Union[Uniform, WeightedAM, WeightedGM, StepCdf]


@dataclass(frozen=True, eq=False)
class CdfFamily:
    """An ordered collection of per-hypothesis null CDF models.

    ``pooled_support`` is the sorted union of the members' jump locations
    when every member is a :class:`StepCdf`, and ``None`` (continuum)
    otherwise.  The pooled support is the search domain for critical value
    inversion in the discrete case.
    """

    cdfs: tuple
    pooled_support: np.ndarray | None = field(default=None)

    @classmethod
    def from_cdfs(cls, cdfs: Sequence[NullCdf]) -> "CdfFamily":
        cdfs = tuple(cdfs)
        if not cdfs:
            raise ValueError("a family needs at least one member")
        if all(isinstance(c, StepCdf) for c in cdfs):
            pooled = np.unique(np.concatenate([c.support for c in cdfs]))
        else:
            pooled = None
        return cls(cdfs=cdfs, pooled_support=pooled)

    @classmethod
    def uniform(cls, m: int) -> "CdfFamily":
        return cls.from_cdfs([Uniform()] * m)

    @classmethod
    def weighted_am(cls, weights) -> "CdfFamily":
        w = np.asarray(weights, dtype=float)
        wbar = float(np.mean(w))
        return cls.from_cdfs([WeightedAM(float(wi), wbar) for wi in w])

    @classmethod
    def weighted_gm(cls, weights) -> "CdfFamily":
        w = np.asarray(weights, dtype=float)
        wbar = float(np.mean(w))
        return cls.from_cdfs([WeightedGM(float(wi), wbar) for wi in w])

    @property
    def m(self) -> int:
        return len(self.cdfs)

    def values_at(self, ts: np.ndarray) -> np.ndarray:
        """Evaluate every member at every point: shape (m, len(ts))."""
        ts = np.atleast_1d(np.asarray(ts, dtype=float))
        return np.vstack([c.evaluate_many(ts) for c in self.cdfs])


def binom_tail(n, k, t):
    """Upper tail P(Bin(n, t) >= k) via the regularized incomplete beta.

    Broadcasts over array arguments.  ``k <= 0`` gives 1, ``k == n + 1``
    gives 0; ``k`` outside [0, n+1] is a domain error.
    """
    n_arr, k_arr, t_arr = np.broadcast_arrays(
        np.asarray(n), np.asarray(k), np.asarray(t, dtype=float)
    )
    if np.any(t_arr < 0.0) or np.any(t_arr > 1.0):
        raise ValueError("t must lie in [0, 1]")
    if np.any(k_arr < 0) or np.any(k_arr > n_arr + 1):
        raise ValueError("k must lie in [0, n + 1]")
    a = np.clip(k_arr, 1, None).astype(float)
    b = np.clip(n_arr - k_arr + 1, 1, None).astype(float)
    vals = special.betainc(a, b, t_arr)
    out = np.where(k_arr <= 0, 1.0, np.where(k_arr > n_arr, 0.0, vals))
    if out.ndim == 0:
        return float(out)
    return out


def binom_tail_invert(n: int, k: int, zeta: float) -> float:
    """Largest t with P(Bin(n, t) >= k) <= zeta.

    The tail is continuous and non-decreasing in t, so bisection applies;
    the returned value satisfies the inequality itself (feasible side of
    the final bracket, absolute tolerance ``INVERT_TOL``).
    """
    if not (1 <= k <= n):
        raise ValueError("need 1 <= k <= n")
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    lo, hi = 0.0, 1.0  # tail(0) = 0 <= zeta, tail(1) = 1 > zeta
    while hi - lo > INVERT_TOL:
        mid = 0.5 * (lo + hi)
        if binom_tail(n, k, mid) <= zeta:
            lo = mid
        else:
            hi = mid
    return lo


def pbin_tail(probs, k: int) -> float:
    """Upper tail P(PBin(probs) >= k) of a Poisson-binomial sum.

    Exact O(n * min(n, k)) dynamic program in the probability domain with
    an absorbing ">= k" bucket, so truncation never loses tail mass.
    """
    p = np.asarray(probs, dtype=float).ravel()
    if p.size and (np.min(p) < 0.0 or np.max(p) > 1.0 or not np.all(np.isfinite(p))):
        raise ValueError("success probabilities must lie in [0, 1]")
    if k <= 0:
        return 1.0
    if k > p.size:
        return 0.0
    q = np.zeros(k + 1)
    q[0] = 1.0
    for pi in p[p > 0.0]:  # folding a zero probability is the identity
        up = q[:-1] * pi
        q[:-1] -= up
        q[1:] += up
    return float(q[k])


def tilde_F(sorted_desc_F, j: int) -> float:
    """Geometric-average complement of the j largest CDF values.

    ``1 - (prod_{j' <= j} (1 - F_(j')))**(1/j)`` computed through the mean
    of ``log1p(-F)``; returns exactly 1 when any of the j values equals 1.
    The input must already be sorted in non-increasing order.
    """
    F = np.asarray(sorted_desc_F, dtype=float).ravel()
    if not (1 <= j <= F.size):
        raise ValueError("need 1 <= j <= len(sorted_desc_F)")
    top = F[:j]
    if np.min(top) < 0.0 or np.max(top) > 1.0:
        raise ValueError("CDF values must lie in [0, 1]")
    if top.max() >= 1.0:
        return 1.0
    return float(-np.expm1(np.mean(np.log1p(-top))))


def top_j_sum(values, j: int) -> float:
    """Sum of the j largest entries of ``values``."""
    v = np.asarray(values, dtype=float).ravel()
    if not (1 <= j <= v.size):
        raise ValueError("need 1 <= j <= len(values)")
    if j == v.size:
        return float(v.sum())
    part = np.partition(v, v.size - j)
    return float(part[v.size - j:].sum())
