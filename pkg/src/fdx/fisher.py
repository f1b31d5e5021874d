"""Fisher's exact test with full support enumeration.

For a 2x2 table with fixed margins (n1 draws in group 1, n2 in group 2,
s total successes) the group-1 success count X is hypergeometric on
``[max(0, s - n2), min(n1, s)]``.  This module computes

* the exact pmf over that support (cached log-factorial tables, exp of
  log differences; no ratio blowups),
* one-sided (upper tail in X) and two-sided p-values, the latter by the
  minimum-likelihood rule: sum the pmf over all outcomes whose pmf is at
  most ``pmf(x) * (1 + 1e-7)``, the relative guard matching R's
  fisher.test convention,
* the attainable p-value distribution as a :class:`StepCdf`, which is the
  per-hypothesis null model the heterogeneous procedures consume.

Everything is enumerated per margin set once and memoized, since margin
sets repeat heavily across hypotheses in typical data.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .distributions import StepCdf

__all__ = [
    "FisherMargins",
    "FisherTable",
    "hypergeom_pmf",
    "fisher_pvalue",
    "fisher_support_cdf",
    "fisher_outcomes",
]

#: relative tie tolerance of the two-sided minimum-likelihood rule
TWO_SIDED_TIE_REL = 1e-7

_lnfact = np.zeros(1)


def _ln_factorials(n: int) -> np.ndarray:
    """Table of ln(k!) for k = 0..n, grown append-only on demand."""
    global _lnfact
    if n >= _lnfact.size:
        start = _lnfact.size
        ext = np.log(np.arange(start, n + 1, dtype=float))
        _lnfact = np.concatenate([_lnfact, _lnfact[-1] + np.cumsum(ext)])
    return _lnfact


@dataclass(frozen=True)
class FisherMargins:
    """Fixed margins of a 2x2 table: group sizes n1, n2 and total successes s."""

    n1: int
    n2: int
    s: int

    def __post_init__(self):
        for name in ("n1", "n2", "s"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer")
            object.__setattr__(self, name, int(v))
        if self.n1 + self.n2 < 1:
            raise ValueError("need at least one observation")
        if self.s > self.n1 + self.n2:
            raise ValueError("successes cannot exceed the table total")

    @property
    def x_min(self) -> int:
        return max(0, self.s - self.n2)

    @property
    def x_max(self) -> int:
        return min(self.n1, self.s)


@dataclass(frozen=True)
class FisherTable:
    """Observed group-1 success count under fixed margins."""

    margins: FisherMargins
    x: int

    def __post_init__(self):
        object.__setattr__(self, "x", int(self.x))
        if not (self.margins.x_min <= self.x <= self.margins.x_max):
            raise ValueError("observed count lies outside the margin support")


def hypergeom_pmf(margins: FisherMargins):
    """Support and exact pmf of the hypergeometric count: (xs, probs)."""
    xs = np.arange(margins.x_min, margins.x_max + 1)
    lf = _ln_factorials(margins.n1 + margins.n2)
    n1, n2, s = margins.n1, margins.n2, margins.s

    def ln_choose(n, k):
        return lf[n] - lf[k] - lf[n - k]

    ln_pmf = ln_choose(n1, xs) + ln_choose(n2, s - xs) - ln_choose(n1 + n2, s)
    return xs, np.exp(ln_pmf)


@dataclass(frozen=True, eq=False)
class _Outcomes:
    margins: FisherMargins
    sided: str
    xs: np.ndarray
    pmf: np.ndarray
    pvalues: np.ndarray
    cdf: StepCdf


@lru_cache(maxsize=None)
def fisher_outcomes(margins: FisherMargins, sided: str = "two") -> _Outcomes:
    """Per-outcome p-values and the attainable p-value CDF for one margin set."""
    if sided not in ("one", "two"):
        raise ValueError("sided must be 'one' or 'two'")
    xs, pmf = hypergeom_pmf(margins)
    if sided == "one":
        pv = np.cumsum(pmf[::-1])[::-1]
    else:
        order = np.argsort(pmf, kind="stable")
        sorted_pmf = pmf[order]
        cums = np.cumsum(sorted_pmf)
        idx = np.searchsorted(sorted_pmf, pmf * (1.0 + TWO_SIDED_TIE_REL), side="right")
        pv = cums[idx - 1]
    pv = np.minimum(pv, 1.0)

    order = np.argsort(pv, kind="stable")
    sp = pv[order]
    cm = np.cumsum(pmf[order])
    uniq = np.unique(sp)
    last = np.searchsorted(sp, uniq, side="right") - 1
    cdf = StepCdf(uniq, np.minimum(cm[last], 1.0))

    for arr in (xs, pmf, pv):
        arr.flags.writeable = False
    return _Outcomes(margins=margins, sided=sided, xs=xs, pmf=pmf, pvalues=pv, cdf=cdf)


def fisher_pvalue(table: FisherTable, sided: str = "two") -> float:
    """Exact Fisher p-value of an observed table (in (0, 1])."""
    out = fisher_outcomes(table.margins, sided)
    return float(out.pvalues[table.x - table.margins.x_min])


def fisher_support_cdf(margins: FisherMargins, sided: str = "two") -> StepCdf:
    """Null CDF of the attainable Fisher p-values for one margin set."""
    return fisher_outcomes(margins, sided).cdf
