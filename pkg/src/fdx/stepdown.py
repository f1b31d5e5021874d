"""Step-down engine: critical values, adjusted p-values, rejection sets.

Two equivalent evaluation routes are provided:

* ``reject`` computes adjusted p-values by a single running maximum of
  ``xi_ell(p_(ell))`` along the sorted p-values and thresholds them at
  zeta.  This is the production path; it never needs critical values.
* ``critical_values`` + ``stepdown_explicit`` invert every transform and
  run the literal step-down scan.  This pair is the slow reference route
  and is kept as an oracle for the shortcut.

Equality of the two rejection sets (for p-values inside the inversion
domain) is what the tests pin down.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .transforms import TransformFamily

__all__ = [
    "CriticalValues",
    "RejectionResult",
    "adjusted_pvalues",
    "reject",
    "critical_values",
    "stepdown_explicit",
]

#: width at which the continuum bisection stops (2**-40 < 1e-12)
_BISECT_ITERS = 40


@dataclass(frozen=True, eq=False)
class CriticalValues:
    """Non-decreasing rejection thresholds tau_1 <= ... <= tau_m."""

    tau: np.ndarray

    def __post_init__(self):
        tau = np.asarray(self.tau, dtype=float)
        if tau.ndim != 1 or tau.size == 0:
            raise ValueError("tau must be a non-empty 1-d array")
        object.__setattr__(self, "tau", tau)

    @property
    def m(self) -> int:
        return self.tau.size


@dataclass(frozen=True, eq=False)
class RejectionResult:
    """Outcome of a step-down run.

    ``adjusted`` holds the adjusted p-values (None when produced by the
    tau-only explicit scan), ``ell_hat`` the number of rejections,
    ``rejected`` the rejected hypothesis indices (0-based, ascending) and
    ``order`` the stable ascending sort permutation of the inputs.
    """

    adjusted: np.ndarray | None
    ell_hat: int
    rejected: np.ndarray
    order: np.ndarray = field(repr=False)


def _check_pvalues(pvals) -> np.ndarray:
    p = np.asarray(pvals, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("p-values must form a non-empty 1-d array")
    if np.any(p < 0.0) or np.any(p > 1.0) or not np.all(np.isfinite(p)):
        raise ValueError("p-values must lie in [0, 1]")
    return p


def _warn_off_support(ps: np.ndarray, support: np.ndarray) -> None:
    idx = np.searchsorted(support, ps)
    idx = np.clip(idx, 0, support.size - 1)
    on = support[idx] == ps
    if not np.all(on):
        warnings.warn(
            f"{int(np.sum(~on))} p-value(s) lie outside the declared finite "
            "support; proceeding via the adjusted p-value path",
            stacklevel=3,
        )


def adjusted_pvalues(pvals, xi: TransformFamily) -> np.ndarray:
    """Adjusted p-values: running maximum of xi_ell at the sorted inputs.

    ``p_tilde_i = max over ell with p_(ell) <= p_i of xi_ell(p_(ell))``,
    computed in one pass.  Ties receive identical values because the
    transforms are non-increasing in ell.  Values may exceed 1 (the
    transform image is unbounded); the rejection rule only compares
    against zeta.
    """
    p = _check_pvalues(pvals)
    if p.size != xi.m:
        raise ValueError("p-value count must equal the transform family size")
    order = np.argsort(p, kind="stable")
    ps = p[order]
    if xi.support is not None:
        _warn_off_support(ps, xi.support)
    vals = xi.values(np.arange(1, xi.m + 1), ps)
    run = np.maximum.accumulate(vals)
    adj = np.empty(xi.m)
    adj[order] = run
    return adj


def reject(pvals, xi: TransformFamily, zeta: float) -> RejectionResult:
    """Step-down rejection set via the adjusted p-value shortcut."""
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    p = _check_pvalues(pvals)
    adj = adjusted_pvalues(p, xi)
    rejected = np.flatnonzero(adj <= zeta)
    return RejectionResult(
        adjusted=adj,
        ell_hat=int(rejected.size),
        rejected=rejected,
        order=np.argsort(p, kind="stable"),
    )


def critical_values(xi: TransformFamily, zeta: float) -> CriticalValues:
    """Invert every transform: tau_ell = max{t in A : xi_ell(t) <= zeta}.

    On the continuum A = [0, 1] the inversion bisects to 1e-12 absolute
    and returns the feasible endpoint of the final bracket; on a finite
    pooled support it binary-searches for the last feasible point.  When
    no point is feasible, tau_ell = 0.  A final running maximum irons out
    sub-tolerance wobble (any smaller ell's threshold stays feasible for
    larger ell because the transforms are non-increasing in ell).
    """
    if not (0.0 < zeta < 1.0):
        raise ValueError("zeta must lie in (0, 1)")
    m = xi.m
    ells = np.arange(1, m + 1)
    if xi.support is None:
        lo = np.zeros(m)
        hi = np.ones(m)
        feas_lo = xi.values(ells, lo) <= zeta
        feas_hi = xi.values(ells, hi) <= zeta
        tau = np.where(feas_hi, 1.0, 0.0)
        active = feas_lo & ~feas_hi
        if np.any(active):
            a_idx = np.flatnonzero(active)
            a_lo = lo[a_idx]
            a_hi = hi[a_idx]
            for _ in range(_BISECT_ITERS):
                mid = 0.5 * (a_lo + a_hi)
                ok = xi.values(ells[a_idx], mid) <= zeta
                a_lo = np.where(ok, mid, a_lo)
                a_hi = np.where(ok, a_hi, mid)
            tau[a_idx] = a_lo
    else:
        A = xi.support
        lo = np.full(m, -1, dtype=np.int64)  # -1: no feasible point found yet
        hi = np.full(m, A.size - 1, dtype=np.int64)
        while True:
            pending = np.flatnonzero(lo < hi)
            if pending.size == 0:
                break
            mid = (lo[pending] + hi[pending] + 1) // 2
            ok = xi.values(ells[pending], A[mid]) <= zeta
            lo[pending] = np.where(ok, mid, lo[pending])
            hi[pending] = np.where(ok, hi[pending], mid - 1)
        tau = np.where(lo >= 0, A[np.clip(lo, 0, None)], 0.0)
    return CriticalValues(np.maximum.accumulate(tau))


def stepdown_explicit(pvals, crit: CriticalValues) -> RejectionResult:
    """Literal step-down scan against explicit critical values.

    ell_hat is the largest ell such that p_(ell') <= tau_ell' for every
    ell' <= ell, and the rejection set is {i : p_i <= tau_ell_hat}.  Kept
    as the reference implementation; ``reject`` is the fast equivalent.
    """
    p = _check_pvalues(pvals)
    tau = crit.tau
    if p.size != tau.size:
        raise ValueError("p-value count must equal the number of critical values")
    if np.any(np.diff(tau) < 0.0):
        raise ValueError("critical values must be non-decreasing")
    order = np.argsort(p, kind="stable")
    ok = p[order] <= tau
    ell_hat = int(p.size if ok.all() else np.argmin(ok))
    if ell_hat == 0:
        rejected = np.array([], dtype=np.int64)
    else:
        rejected = np.flatnonzero(p <= tau[ell_hat - 1])
    return RejectionResult(adjusted=None, ell_hat=ell_hat, rejected=rejected, order=order)
