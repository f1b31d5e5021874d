"""Monte-Carlo harness: two-sample Fisher scenarios and FDX verification.

The scenario design draws, per hypothesis, success counts in two groups of
``n_per_group`` subjects each and tests equality of the two success rates
with Fisher's exact test (two-sided).  True nulls come in a weak-rate
block (rate 0.01 in both groups) and a moderate-rate block (0.10 in
both); false nulls pair 0.10 against ``q3``.  Each replicate yields both
the p-values and the per-hypothesis attainable p-value CDFs, so the
discrete procedures run conditionally on the drawn margins.

Replicates use independently derived RNG streams (SeedSequence spawn), so
serial and parallel execution produce bit-identical summaries.

``mc_fdx_oracle`` is the independent verifier: it draws p-values from an
explicit null model and reports the empirical exceedance frequency
P(FDP > alpha) with its binomial standard error.
"""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .distributions import CdfFamily
from .fisher import FisherMargins, fisher_outcomes
from .stepdown import reject
from .transforms import ProcedureSpec, make_transform

__all__ = [
    "SimConfig",
    "ProcedureTrials",
    "ScenarioResult",
    "SIM_PROCEDURES",
    "run_scenario",
    "benjamini_hochberg",
    "PValueModel",
    "FdxEstimate",
    "mc_fdx_oracle",
    "uniform_null_model",
    "fisher_null_model",
    "gm_weighted_null_model",
    "study_grid",
]

#: procedures the scenario runner understands; the d-prefixed ones are the
#: discrete instantiations (hlr/hgr/pb fed with the per-replicate Fisher CDFs)
SIM_PROCEDURES = ("bh", "lr", "gr", "dlr", "dgr", "dpb")

_RATE_WEAK = 0.01
_RATE_BASE = 0.10


@dataclass(frozen=True)
class SimConfig:
    """Two-group scenario layout.

    ``m1`` weak-rate nulls, ``m2`` moderate-rate nulls, ``m3`` false nulls
    with group rates (0.10, q3); ``m = m1 + m2 + m3``.
    """

    m: int
    m1: int
    m2: int
    m3: int
    q3: float
    replicates: int
    seed: int
    n_per_group: int = 25
    alpha: float = 0.05
    zeta: float = 0.5

    def __post_init__(self):
        if min(self.m1, self.m2, self.m3) < 0 or self.m1 + self.m2 + self.m3 != self.m:
            raise ValueError("need m1 + m2 + m3 == m with non-negative blocks")
        if self.m < 1:
            raise ValueError("m must be positive")
        if not (0.0 <= self.q3 <= 1.0):
            raise ValueError("q3 must lie in [0, 1]")
        if self.replicates < 1:
            raise ValueError("replicates must be positive")
        if self.n_per_group < 1:
            raise ValueError("n_per_group must be positive")
        if not (0.0 < self.alpha < 1.0) or not (0.0 < self.zeta < 1.0):
            raise ValueError("alpha and zeta must lie in (0, 1)")

    def group_rates(self):
        """Per-hypothesis success rates (group 1, group 2)."""
        p1 = np.concatenate(
            [
                np.full(self.m1, _RATE_WEAK),
                np.full(self.m2, _RATE_BASE),
                np.full(self.m3, _RATE_BASE),
            ]
        )
        p2 = np.concatenate(
            [
                np.full(self.m1, _RATE_WEAK),
                np.full(self.m2, _RATE_BASE),
                np.full(self.m3, self.q3),
            ]
        )
        return p1, p2

    @property
    def null_mask(self) -> np.ndarray:
        mask = np.zeros(self.m, dtype=bool)
        mask[: self.m1 + self.m2] = True
        return mask


@dataclass(frozen=True, eq=False)
class ProcedureTrials:
    """Per-replicate records for one procedure in one scenario."""

    name: str
    fdp: np.ndarray
    tdp: np.ndarray
    rejections: np.ndarray

    @property
    def replicates(self) -> int:
        return self.fdp.size

    @property
    def mean_tdp(self) -> float:
        return float(np.mean(self.tdp))

    @property
    def se_tdp(self) -> float:
        if self.replicates < 2:
            return float("nan")
        return float(np.std(self.tdp, ddof=1) / np.sqrt(self.replicates))

    def exceedance(self, alpha: float) -> float:
        return float(np.mean(self.fdp > alpha))

    def exceedance_se(self, alpha: float) -> float:
        phat = self.exceedance(alpha)
        return float(np.sqrt(phat * (1.0 - phat) / self.replicates))


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    config: SimConfig
    procedures: dict

    def summary_rows(self):
        """One flat record per procedure, ready for CSV or plotting."""
        c = self.config
        rows = []
        for name in self.procedures:
            t = self.procedures[name]
            rows.append(
                {
                    "m": c.m,
                    "m1": c.m1,
                    "m2": c.m2,
                    "m3": c.m3,
                    "q3": c.q3,
                    "n_per_group": c.n_per_group,
                    "alpha": c.alpha,
                    "zeta": c.zeta,
                    "replicates": c.replicates,
                    "seed": c.seed,
                    "procedure": name,
                    "mean_tdp": t.mean_tdp,
                    "se_tdp": t.se_tdp,
                    "exceedance": t.exceedance(c.alpha),
                    "se_exceedance": t.exceedance_se(c.alpha),
                    "mean_rejections": float(np.mean(t.rejections)),
                }
            )
        return rows


def benjamini_hochberg(pvals, level: float) -> np.ndarray:
    """Plain BH step-up at the given level; returns rejected indices."""
    p = np.asarray(pvals, dtype=float)
    m = p.size
    order = np.argsort(p, kind="stable")
    thresh = level * np.arange(1, m + 1) / m
    ok = p[order] <= thresh
    if not ok.any():
        return np.array([], dtype=np.int64)
    k = int(np.max(np.flatnonzero(ok))) + 1
    return np.flatnonzero(p <= thresh[k - 1])


def simulate_tables(config: SimConfig, rng: np.random.Generator):
    """Draw one replicate: Fisher p-values and the per-hypothesis CDFs."""
    p1, p2 = config.group_rates()
    n = config.n_per_group
    x1 = rng.binomial(n, p1)
    x2 = rng.binomial(n, p2)
    pvals = np.empty(config.m)
    cdfs = []
    for i in range(config.m):
        out = fisher_outcomes(FisherMargins(n, n, int(x1[i] + x2[i])), "two")
        pvals[i] = out.pvalues[x1[i] - out.margins.x_min]
        cdfs.append(out.cdf)
    return pvals, CdfFamily.from_cdfs(cdfs)


def _apply_procedure(name, pvals, family, config: SimConfig) -> np.ndarray:
    if name == "bh":
        return benjamini_hochberg(pvals, config.alpha)
    kind = {"lr": "lr", "gr": "gr", "dlr": "hlr", "dgr": "hgr", "dpb": "pb"}[name]
    spec = ProcedureSpec(
        kind=kind,
        alpha=config.alpha,
        zeta=config.zeta,
        family=family if kind in ("hlr", "hgr", "pb") else None,
        m=config.m,
    )
    return reject(pvals, make_transform(spec), config.zeta).rejected


def _replicate_worker(args):
    config, child, procedures = args
    rng = np.random.default_rng(child)
    pvals, family = simulate_tables(config, rng)
    null_mask = config.null_mask
    out = {}
    for name in procedures:
        rej = _apply_procedure(name, pvals, family, config)
        n_rej = rej.size
        n_false = int(np.sum(null_mask[rej]))
        fdp = n_false / max(n_rej, 1)
        tdp = (n_rej - n_false) / config.m3 if config.m3 > 0 else 0.0
        out[name] = (fdp, tdp, n_rej)
    return out


def run_scenario(
    config: SimConfig,
    procedures: Sequence[str] = SIM_PROCEDURES,
    threads: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> ScenarioResult:
    """Run every procedure over all replicates of one scenario.

    Results are bit-identical for any ``threads`` value: each replicate
    consumes its own pre-derived RNG stream and summaries aggregate the
    stored per-replicate records in replicate order.
    """
    for name in procedures:
        if name not in SIM_PROCEDURES:
            raise ValueError(f"unknown simulation procedure {name!r}")
    children = np.random.SeedSequence(config.seed).spawn(config.replicates)
    jobs = [(config, children[r], tuple(procedures)) for r in range(config.replicates)]
    records = [None] * config.replicates
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for r, rec in enumerate(pool.map(_replicate_worker, jobs, chunksize=8)):
                records[r] = rec
                if progress is not None:
                    progress(r + 1, config.replicates)
    else:
        for r, job in enumerate(jobs):
            records[r] = _replicate_worker(job)
            if progress is not None:
                progress(r + 1, config.replicates)
    trials = {}
    for name in procedures:
        fdp = np.array([rec[name][0] for rec in records])
        tdp = np.array([rec[name][1] for rec in records])
        nrej = np.array([rec[name][2] for rec in records], dtype=np.int64)
        trials[name] = ProcedureTrials(name=name, fdp=fdp, tdp=tdp, rejections=nrej)
    return ScenarioResult(config=config, procedures=trials)


# ---------------------------------------------------------------------------
# Monte-Carlo FDX verification


@dataclass(frozen=True, eq=False)
class PValueModel:
    """A p-value generator with known truth and declared null marginals.

    ``family`` states the per-hypothesis null CDFs a procedure may assume;
    ``draw`` must produce p-values whose true-null marginals match it.
    """

    family: CdfFamily
    is_null: np.ndarray
    draw_fn: Callable[[np.random.Generator], np.ndarray]

    def draw(self, rng: np.random.Generator) -> np.ndarray:
        return self.draw_fn(rng)


@dataclass(frozen=True)
class FdxEstimate:
    """Empirical P(FDP > alpha) with a binomial standard error."""

    exceedance: float
    se: float
    replicates: int
    exceed_count: int


def mc_fdx_oracle(
    model: PValueModel, spec: ProcedureSpec, replicates: int, seed: int
) -> FdxEstimate:
    """Estimate P(FDP > alpha) of a procedure under an explicit null model."""
    xi = make_transform(spec)
    alpha = float(spec.alpha)
    children = np.random.SeedSequence(seed).spawn(replicates)
    null_mask = np.asarray(model.is_null, dtype=bool)
    count = 0
    for child in children:
        rng = np.random.default_rng(child)
        p = model.draw(rng)
        res = reject(p, xi, spec.zeta)
        if res.ell_hat:
            fdp = np.sum(null_mask[res.rejected]) / res.ell_hat
            if fdp > alpha:
                count += 1
    phat = count / replicates
    se = float(np.sqrt(phat * (1.0 - phat) / replicates))
    return FdxEstimate(exceedance=phat, se=se, replicates=replicates, exceed_count=count)


def uniform_null_model(m: int, m0: int, alt_scale: float = 0.02) -> PValueModel:
    """Uniform true nulls; alternatives uniform on [0, alt_scale]."""
    is_null = np.zeros(m, dtype=bool)
    is_null[:m0] = True

    def draw(rng):
        p = rng.uniform(size=m)
        p[~is_null] *= alt_scale
        return p

    return PValueModel(family=CdfFamily.uniform(m), is_null=is_null, draw_fn=draw)


def fisher_null_model(
    m: int,
    m0: int,
    margins_seed: int,
    n_per_group: int = 25,
    base_rate: float = 0.15,
    sided: str = "two",
) -> PValueModel:
    """Fixed Fisher margins; nulls redrawn hypergeometrically per replicate.

    Margins are drawn once from two-group binomial counts, fixing the
    family across replicates.  Alternatives sit at their table's smallest
    attainable p-value, so they are independent of the nulls.
    """
    rng0 = np.random.default_rng(margins_seed)
    x1 = rng0.binomial(n_per_group, base_rate, size=m)
    x2 = rng0.binomial(n_per_group, base_rate, size=m)
    outs = [
        fisher_outcomes(FisherMargins(n_per_group, n_per_group, int(s)), sided)
        for s in x1 + x2
    ]
    family = CdfFamily.from_cdfs([o.cdf for o in outs])
    is_null = np.zeros(m, dtype=bool)
    is_null[:m0] = True
    s_arr = np.array([o.margins.s for o in outs])
    total = np.array([o.margins.n1 + o.margins.n2 for o in outs])
    n1_arr = np.array([o.margins.n1 for o in outs])
    alt_p = np.array([o.pvalues.min() for o in outs])

    def draw(rng):
        x = rng.hypergeometric(s_arr, total - s_arr, n1_arr)
        p = np.empty(m)
        for i, o in enumerate(outs):
            p[i] = o.pvalues[x[i] - o.margins.x_min]
        p[~is_null] = alt_p[~is_null]
        return p

    return PValueModel(family=family, is_null=is_null, draw_fn=draw)


def gm_weighted_null_model(m: int, m0: int, weights, alt_scale: float = 0.02) -> PValueModel:
    """Null p-values distributed as geometrically weighted uniforms."""
    from .weighting import WeightProfile, weighted_pvalues_gm

    profile = WeightProfile.from_weights(weights)
    if profile.m != m:
        raise ValueError("weight count must equal m")
    is_null = np.zeros(m, dtype=bool)
    is_null[:m0] = True

    def draw(rng):
        u = rng.uniform(size=m)
        u[~is_null] *= alt_scale
        return weighted_pvalues_gm(u, profile)

    return PValueModel(
        family=CdfFamily.weighted_gm(profile.weights), is_null=is_null, draw_fn=draw
    )


def study_grid(
    replicates: int,
    seed: int,
    m_values: Sequence[int] = (800, 2000),
    n_per_group: int = 25,
    alpha: float = 0.05,
    zeta: float = 0.5,
):
    """The full 54-scenario grid of the simulation study.

    ``m3`` takes 10/30/80% of m, ``m1`` takes 20/50/80% of the true
    nulls, and ``q3`` ranges over {0.15, 0.25, 0.4}.  Scenario seeds are
    ``seed + index`` in grid order.
    """
    configs = []
    idx = 0
    for m in m_values:
        for m3_frac in (0.10, 0.30, 0.80):
            m3 = round(m * m3_frac)
            for m1_frac in (0.20, 0.50, 0.80):
                m1 = round((m - m3) * m1_frac)
                for q3 in (0.15, 0.25, 0.40):
                    configs.append(
                        SimConfig(
                            m=m,
                            m1=m1,
                            m2=m - m3 - m1,
                            m3=m3,
                            q3=q3,
                            replicates=replicates,
                            seed=seed + idx,
                            n_per_group=n_per_group,
                            alpha=alpha,
                            zeta=zeta,
                        )
                    )
                    idx += 1
    return configs
