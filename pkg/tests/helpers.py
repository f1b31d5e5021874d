"""Shared oracles and instance generators for the test suite.

The oracles here are deliberately naive (direct summation, exhaustive
subset enumeration, linear scans) so that the fast implementations in the
package are checked against independent arithmetic.
"""
import math

import numpy as np

import fdx


def binom_tail_sum(n: int, k: int, t: float) -> float:
    """Direct-summation oracle for P(Bin(n, t) >= k)."""
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    terms = [math.comb(n, j) * t**j * (1.0 - t) ** (n - j) for j in range(k, n + 1)]
    return math.fsum(terms)


def pbin_tail_enum(probs, k: int) -> float:
    """Exhaustive 2^n enumeration oracle for the Poisson-binomial tail."""
    p = np.asarray(probs, dtype=float)
    n = p.size
    if k <= 0:
        return 1.0
    if k > n:
        return 0.0
    masks = np.arange(1 << n)[:, None]
    bits = (masks >> np.arange(n)) & 1
    weights = np.where(bits == 1, p, 1.0 - p).prod(axis=1)
    return float(weights[bits.sum(axis=1) >= k].sum())


def random_step_cdf(rng, n_points: int = 6, slack: float = 0.7) -> fdx.StepCdf:
    """A random super-uniform step CDF ending in a (1, 1) jump.

    The cumulative values sit at most ``slack`` times the diagonal, so
    F(t) <= t holds everywhere (the running maximum keeps them monotone
    without ever crossing the diagonal because the support is sorted).
    """
    sup = np.unique(np.round(rng.uniform(0.01, 0.95, size=n_points), 6))
    cum = np.maximum.accumulate(sup * rng.uniform(0.2, slack, size=sup.size))
    return fdx.StepCdf(np.append(sup, 1.0), np.append(cum, 1.0))


def random_step_family(rng, m: int, n_points: int = 6) -> fdx.CdfFamily:
    return fdx.CdfFamily.from_cdfs([random_step_cdf(rng, n_points) for _ in range(m)])


def draw_on_support(rng, family: fdx.CdfFamily) -> np.ndarray:
    """P-values drawn uniformly from the pooled support of a step family."""
    return rng.choice(family.pooled_support, size=family.m, replace=True)


def discrete_cv_oracle(xi, zeta: float) -> np.ndarray:
    """Linear-scan inversion over the finite support, then a running max."""
    taus = np.empty(xi.m)
    for ell in range(1, xi.m + 1):
        feasible = [a for a in xi.support if xi.value(ell, float(a)) <= zeta]
        taus[ell - 1] = max(feasible) if feasible else 0.0
    return np.maximum.accumulate(taus)


def adjusted_oracle(pvals, xi) -> np.ndarray:
    """Per-hypothesis recomputation of the adjusted values with scalar calls."""
    p = np.asarray(pvals, dtype=float)
    order = np.argsort(p, kind="stable")
    adj = np.empty(p.size)
    running = -np.inf
    for pos, idx in enumerate(order):
        running = max(running, xi.value(pos + 1, float(p[idx])))
        adj[idx] = running
    return adj


def build_spec(kind, rng, m=12, alpha=0.1, zeta=0.4, n_points=6):
    """A random but valid ProcedureSpec for any procedure kind."""
    if kind in ("lr", "gr", "wlr-am"):
        weights = rng.uniform(0.1, 3.0, size=m) if kind == "wlr-am" else None
        return fdx.ProcedureSpec(kind=kind, alpha=alpha, zeta=zeta, m=m, weights=weights)
    if kind in ("hlr", "hgr", "hgr-na", "pb"):
        fam = random_step_family(rng, m, n_points)
        return fdx.ProcedureSpec(kind=kind, alpha=alpha, zeta=zeta, family=fam)
    w = rng.uniform(0.1, 3.0, size=m)
    return fdx.ProcedureSpec(kind=kind, alpha=alpha, zeta=zeta, weights=w)


def bh_oracle(pvals, level: float) -> np.ndarray:
    """Textbook BH step-up scan from the largest p-value downward."""
    p = np.asarray(pvals, dtype=float)
    m = p.size
    order = np.argsort(p, kind="stable")
    k_star = 0
    for k in range(m, 0, -1):
        if p[order[k - 1]] <= level * k / m:
            k_star = k
            break
    if k_star == 0:
        return np.array([], dtype=np.int64)
    return np.sort(order[:k_star])
