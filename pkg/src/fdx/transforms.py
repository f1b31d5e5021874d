"""Transformation function families for FDX step-down procedures.

A procedure is specified by a family of maps ``xi_ell : [0, 1] -> [0, inf)``
for ``ell = 1..m`` that are non-decreasing in t and non-increasing in ell.
Critical values arise by inverting each ``xi_ell`` at the exceedance budget
zeta, and adjusted p-values by evaluating ``xi_ell`` along the sorted
p-values.

Implemented kinds
-----------------
lr        linear ratio m(ell) * t / (floor(alpha*ell) + 1)
gr        binomial tail P(Bin(m(ell), t) >= floor(alpha*ell) + 1)
hlr       averaged top-m(ell) CDF values (heterogeneous lr)
pb        Poisson-binomial tail over the top-m(ell) CDF values
hgr       binomial tail at the geometric-average complement (heterogeneous gr)
hgr-na    non-adaptive variant of hgr (all m CDFs, Bin(m, .))
wlr-am    lr with an arithmetic weight correction (uncapped linear bound)
wlr-gm    hlr over the geometric weighted family
wpb-am    pb over the arithmetic weighted family
wpb-gm    pb over the geometric weighted family
wgr-am    hgr over the arithmetic weighted family
wgr-gm    hgr over the geometric weighted family

Here ``m(ell) = m - ell + floor(alpha*ell) + 1`` counts the nulls that can
survive among the m - ell + 1 largest p-values plus the allowed false
rejections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .distributions import CdfFamily, binom_tail

__all__ = [
    "KINDS",
    "ProcedureSpec",
    "TransformFamily",
    "LinearTransform",
    "BinomialTransform",
    "FamilyTransform",
    "floor_alpha_ell",
    "m_of_ell",
    "make_transform",
    "xi_pointwise_dominates",
]

KINDS = (
    "lr",
    "gr",
    "hlr",
    "hgr",
    "hgr-na",
    "pb",
    "wlr-am",
    "wlr-gm",
    "wpb-am",
    "wpb-gm",
    "wgr-am",
    "wgr-gm",
)

_FAMILY_KINDS = ("hlr", "hgr", "hgr-na", "pb")
_WEIGHTED_KINDS = ("wlr-am", "wlr-gm", "wpb-am", "wpb-gm", "wgr-am", "wgr-gm")

#: guard added before flooring alpha*ell so that exact multiples computed in
#: floating point (e.g. 0.05 * 20) do not round down spuriously
FLOOR_GUARD = 1e-9

AlphaLike = Union[float, Fraction]


def floor_alpha_ell(alpha: AlphaLike, ell: int) -> int:
    """floor(alpha * ell), exact for Fraction alpha, guarded for floats."""
    if isinstance(alpha, Fraction):
        return math.floor(alpha * ell)
    return math.floor(alpha * ell + FLOOR_GUARD)


def m_of_ell(ell: int, m: int, alpha: AlphaLike) -> int:
    """Null capacity m(ell) = m - ell + floor(alpha*ell) + 1."""
    if not (1 <= ell <= m):
        raise ValueError("need 1 <= ell <= m")
    return m - ell + floor_alpha_ell(alpha, ell) + 1


def _alpha_value(alpha: AlphaLike) -> float:
    return float(alpha)


@dataclass(frozen=True, eq=False)
class ProcedureSpec:
    """Everything needed to build a transformation family.

    ``m`` may be omitted when it is implied by ``family`` or ``weights``;
    the lr/gr kinds carry neither, so they need ``m`` explicitly.
    """

    kind: str
    alpha: AlphaLike
    zeta: float
    weights: np.ndarray | None = None
    family: CdfFamily | None = None
    m: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown procedure kind {self.kind!r}")
        a = _alpha_value(self.alpha)
        if not (0.0 < a < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        if not (0.0 < self.zeta < 1.0):
            raise ValueError("zeta must lie in (0, 1)")
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if w.ndim != 1 or w.size == 0:
                raise ValueError("weights must be a non-empty 1-d sequence")
            if np.any(w < 0.0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be finite and non-negative")
            if not np.any(w > 0.0):
                raise ValueError("at least one weight must be positive")
            object.__setattr__(self, "weights", w)
        if self.kind in _WEIGHTED_KINDS and self.weights is None:
            raise ValueError(f"kind {self.kind!r} requires weights")
        if self.kind in _FAMILY_KINDS and self.family is None:
            raise ValueError(f"kind {self.kind!r} requires a CDF family")
        # resolve and cross-check the problem size
        sizes = set()
        if self.family is not None:
            sizes.add(self.family.m)
        if self.weights is not None:
            sizes.add(self.weights.size)
        if self.m is not None:
            sizes.add(int(self.m))
        if len(sizes) > 1:
            raise ValueError(f"inconsistent problem sizes: {sorted(sizes)}")
        if not sizes:
            raise ValueError("m is required when neither family nor weights are given")
        object.__setattr__(self, "m", int(sizes.pop()))


class TransformFamily:
    """Evaluator for a family of transformation functions.

    ``support`` is the finite inversion domain (pooled Step support) or
    ``None`` for the continuum [0, 1].  ``values`` evaluates paired
    ``(ell, t)`` arrays; ``grid_values`` evaluates every ell on a common
    grid of points.  Per-pair arithmetic is independent of the batch
    composition, so the scalar and vector paths agree bitwise.
    """

    def __init__(self, kind: str, m: int, alpha: AlphaLike, support: np.ndarray | None):
        self.kind = kind
        self.m = int(m)
        self.alpha = alpha
        self.support = support
        self._k, self._n = _k_and_n(self.m, alpha)  # k_ell and m(ell)

    def _check_ells(self, ells: np.ndarray) -> np.ndarray:
        ells = np.asarray(ells, dtype=np.int64)
        if ells.size and (ells.min() < 1 or ells.max() > self.m):
            raise ValueError("ell indices must lie in [1, m]")
        return ells

    def values(self, ells, ts) -> np.ndarray:
        raise NotImplementedError

    def grid_values(self, ts) -> np.ndarray:
        raise NotImplementedError

    def value(self, ell: int, t: float) -> float:
        return float(self.values(np.array([ell]), np.array([float(t)]))[0])


def _check_unit(ts) -> np.ndarray:
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    if ts.size and (np.min(ts) < 0.0 or np.max(ts) > 1.0):
        raise ValueError("evaluation points must lie in [0, 1]")
    return ts


class LinearTransform(TransformFamily):
    """xi_ell(t) = slope_ell * t (lr and the uncapped wlr-am bound)."""

    def __init__(self, kind, m, alpha, slopes):
        super().__init__(kind, m, alpha, support=None)
        self._slopes = np.asarray(slopes, dtype=float)

    def values(self, ells, ts):
        ells = self._check_ells(ells)
        ts = _check_unit(ts)
        return self._slopes[ells - 1] * ts

    def grid_values(self, ts):
        ts = _check_unit(ts)
        return self._slopes[:, None] * ts[None, :]


class BinomialTransform(TransformFamily):
    """xi_ell(t) = P(Bin(m(ell), t) >= k_ell) (gr)."""

    def values(self, ells, ts):
        ells = self._check_ells(ells)
        ts = _check_unit(ts)
        idx = ells - 1
        return np.asarray(binom_tail(self._n[idx], self._k[idx], ts), dtype=float)

    def grid_values(self, ts):
        ts = _check_unit(ts)
        return np.asarray(
            binom_tail(self._n[:, None], self._k[:, None], ts[None, :]), dtype=float
        )


class FamilyTransform(TransformFamily):
    """Order-statistic transforms over a CDF family (hlr/pb/hgr/hgr-na).

    stat = "avg"      sum of the m(ell) largest F_i(t), divided by k_ell
    stat = "pbin"     Poisson-binomial tail over the m(ell) largest F_i(t)
    stat = "geo"      Bin(m(ell), tilde_F at the m(ell) largest) tail
    stat = "geo-all"  Bin(m, tilde_F over all m CDFs) tail

    The descending order of {F_i(t)} is recomputed at every evaluation
    point.  The Poisson-binomial absorbing bucket sits at k_m (the largest
    threshold of the family) regardless of which ells are requested, so
    results do not depend on batching.
    """

    def __init__(self, kind, m, alpha, family: CdfFamily, stat: str):
        if family.m != m:
            raise ValueError("family size must equal m")
        super().__init__(kind, m, alpha, support=family.pooled_support)
        self.family = family
        self.stat = stat
        self._kmax = int(self._k[-1])
        counts: dict[int, list[int]] = {}
        for ell in range(1, m + 1):
            counts.setdefault(int(self._n[ell - 1]), []).append(ell)
        self._ells_by_count = {c: np.array(v) for c, v in counts.items()}

    # -- shared helpers -------------------------------------------------

    def _sorted_desc(self, ts: np.ndarray) -> np.ndarray:
        F = self.family.values_at(ts)
        return -np.sort(-F, axis=0)

    @staticmethod
    def _fold(q: np.ndarray, pi: np.ndarray) -> None:
        """One Bernoulli fold of the truncated pmf, absorbing at the top."""
        if not pi.any():
            return
        up = q[:-1] * pi
        q[:-1] -= up
        q[1:] += up

    @staticmethod
    def _suffix(q: np.ndarray) -> np.ndarray:
        return np.cumsum(q[::-1], axis=0)[::-1]

    # -- paired evaluation ---------------------------------------------

    def values(self, ells, ts):
        ells = self._check_ells(ells)
        ts = _check_unit(ts)
        idx = ells - 1
        S = self._sorted_desc(ts)
        k = self._k[idx]
        n = self._n[idx]
        cols = np.arange(ts.size)
        if self.stat == "avg":
            cs = np.cumsum(S, axis=0)
            return cs[n - 1, cols] / k
        if self.stat in ("geo", "geo-all"):
            with np.errstate(divide="ignore"):
                cl = np.cumsum(np.log1p(-S), axis=0)
            nn = n if self.stat == "geo" else np.full(n.shape, self.m, dtype=np.int64)
            tilde = -np.expm1(cl[nn - 1, cols] / nn)
            return np.asarray(binom_tail(nn, k, tilde), dtype=float)
        # stat == "pbin"
        rows = np.arange(self.m)[:, None]
        Sm = np.where(rows < n[None, :], S, 0.0)
        q = np.zeros((self._kmax + 1, ts.size))
        q[0] = 1.0
        for j in range(self.m):
            self._fold(q, Sm[j])
        return self._suffix(q)[k, cols]

    # -- common-grid evaluation ----------------------------------------

    def grid_values(self, ts):
        ts = _check_unit(ts)
        S = self._sorted_desc(ts)
        if self.stat == "avg":
            cs = np.cumsum(S, axis=0)
            return cs[self._n - 1, :] / self._k[:, None]
        if self.stat in ("geo", "geo-all"):
            with np.errstate(divide="ignore"):
                cl = np.cumsum(np.log1p(-S), axis=0)
            if self.stat == "geo":
                tilde = -np.expm1(cl[self._n - 1, :] / self._n[:, None])
                return np.asarray(
                    binom_tail(self._n[:, None], self._k[:, None], tilde), dtype=float
                )
            tilde = -np.expm1(cl[self.m - 1, :] / self.m)
            return np.asarray(
                binom_tail(self.m, self._k[:, None], tilde[None, :]), dtype=float
            )
        # stat == "pbin": one prefix sweep serves every ell, snapshotting the
        # tail each time the fold count hits some m(ell)
        out = np.empty((self.m, ts.size))
        q = np.zeros((self._kmax + 1, ts.size))
        q[0] = 1.0
        for count in range(1, self.m + 1):
            self._fold(q, S[count - 1])
            hit = self._ells_by_count.get(count)
            if hit is not None:
                suffix = self._suffix(q)
                out[hit - 1, :] = suffix[self._k[hit - 1], :]
        return out


def _weight_stats(weights: np.ndarray):
    """(wbar, cumulative sums of the weights sorted descending)."""
    w = np.asarray(weights, dtype=float)
    return float(np.mean(w)), np.cumsum(np.sort(w)[::-1])


def _k_and_n(m: int, alpha: AlphaLike):
    ells = np.arange(1, m + 1)
    k = np.array([floor_alpha_ell(alpha, int(l)) + 1 for l in ells], dtype=np.int64)
    return k, m - ells + k


def make_transform(spec: ProcedureSpec) -> TransformFamily:
    """Build the transformation family for a procedure spec."""
    m = spec.m
    kind = spec.kind
    if kind == "lr":
        k, n = _k_and_n(m, spec.alpha)
        return LinearTransform(kind, m, spec.alpha, n / k)
    if kind == "wlr-am":
        wbar, topsums = _weight_stats(spec.weights)
        k, n = _k_and_n(m, spec.alpha)
        slopes = topsums[n - 1] / (wbar * k)
        return LinearTransform(kind, m, spec.alpha, slopes)
    if kind == "gr":
        return BinomialTransform(kind, m, spec.alpha, support=None)
    if kind in _FAMILY_KINDS:
        stat = {"hlr": "avg", "pb": "pbin", "hgr": "geo", "hgr-na": "geo-all"}[kind]
        return FamilyTransform(kind, m, spec.alpha, spec.family, stat)
    # remaining weighted kinds delegate to the generic machinery over the
    # induced weighted CDF family
    builder = CdfFamily.weighted_am if kind.endswith("-am") else CdfFamily.weighted_gm
    family = builder(spec.weights)
    stat = {"wlr-gm": "avg", "wpb-am": "pbin", "wpb-gm": "pbin",
            "wgr-am": "geo", "wgr-gm": "geo"}[kind]
    return FamilyTransform(kind, m, spec.alpha, family, stat)


def xi_pointwise_dominates(a: TransformFamily, b: TransformFamily, grid, tol: float = 0.0) -> bool:
    """True iff a's transforms are pointwise <= b's (+ tol) on the grid."""
    if a.m != b.m:
        raise ValueError("transform families must share m")
    grid = np.asarray(grid, dtype=float)
    return bool(np.all(a.grid_values(grid) <= b.grid_values(grid) + tol))
