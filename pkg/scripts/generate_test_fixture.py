#!/usr/bin/env python3
"""Regenerate the committed Fisher-count regression fixture.

The fixture is a synthetic two-group count table (tests/data/
fisher_counts_fixture.csv) whose one-sided Fisher tests yield sixty
heterogeneous discrete null distributions with a dense pooled support.
Most pairs share a common event rate between the groups; a dozen carry
an elevated group-1 rate so that the step-down procedures have signal
to find.

The regression tests freeze the rejection counts produced from this
table, so changing SEED or the layout invalidates those constants.  Run
with --report to print the counts the current table produces.
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

SEED = 26
N_PAIRS = 60
N_ALT = 12
DEFAULT_OUT = Path(__file__).resolve().parent.parent / "tests" / "data" / "fisher_counts_fixture.csv"


def sample_counts(seed: int = SEED):
    """Draw group sizes and event counts: (n1, n2, x1, x2)."""
    rng = np.random.default_rng(seed)
    n1 = rng.integers(15, 71, size=N_PAIRS)
    n2 = rng.integers(40, 121, size=N_PAIRS)
    base = rng.uniform(0.04, 0.22, size=N_PAIRS)
    lift = np.zeros(N_PAIRS)
    alt = rng.choice(N_PAIRS, size=N_ALT, replace=False)
    lift[alt] = rng.uniform(0.25, 0.45, size=N_ALT)
    rate1 = np.minimum(base + lift, 0.9)
    x1 = rng.binomial(n1, rate1)
    x2 = rng.binomial(n2, base)
    return n1, n2, x1, x2


def write_fixture(path: Path, seed: int = SEED) -> None:
    n1, n2, x1, x2 = sample_counts(seed)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "x1", "n1", "x2", "n2"])
        for i in range(N_PAIRS):
            writer.writerow([f"pair-{i + 1:02d}", int(x1[i]), int(n1[i]), int(x2[i]), int(n2[i])])


def report(path: Path) -> None:
    """Rejection counts and DPB/DGR threshold ratios for the written table."""
    from fdx import (CdfFamily, FisherMargins, FisherTable, ProcedureSpec,
                     critical_values, fisher_pvalue, fisher_support_cdf,
                     make_transform, reject)
    from fdx.io import read_counts

    ids, x1, n1, x2, n2 = read_counts(path)
    cdfs, pvals = [], []
    for a, b, c, d in zip(x1, n1, x2, n2):
        margins = FisherMargins(int(b), int(d), int(a + c))
        cdfs.append(fisher_support_cdf(margins, sided="one"))
        pvals.append(fisher_pvalue(FisherTable(margins, int(a)), sided="one"))
    pvals = np.array(pvals)
    family = CdfFamily.from_cdfs(cdfs)
    print(f"{len(ids)} pairs, pooled support size {family.pooled_support.size}")
    for zeta in (0.5, 0.05):
        counts = {}
        for label, kind, fam in [("lr", "lr", None), ("dlr", "hlr", family),
                                 ("gr", "gr", None), ("dpb", "pb", family),
                                 ("dgr", "hgr", family)]:
            spec = ProcedureSpec(kind=kind, m=len(ids), alpha=0.05, zeta=zeta, family=fam)
            counts[label] = reject(pvals, make_transform(spec), zeta).ell_hat
        tau_pb = critical_values(make_transform(
            ProcedureSpec(kind="pb", m=len(ids), alpha=0.05, zeta=zeta, family=family)), zeta).tau
        tau_gr = critical_values(make_transform(
            ProcedureSpec(kind="hgr", m=len(ids), alpha=0.05, zeta=zeta, family=family)), zeta).tau
        mask = tau_gr > 0
        ratio = tau_pb[mask] / tau_gr[mask]
        print(f"zeta={zeta}: rejections {counts}  "
              f"dpb/dgr threshold ratio in [{ratio.min():.6f}, {ratio.max():.6f}]")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=DEFAULT_OUT)
    parser.add_argument("--seed", type=int, default=SEED)
    parser.add_argument("--report", action="store_true",
                        help="print rejection counts for the written table")
    args = parser.parse_args()
    write_fixture(args.out, args.seed)
    print(f"wrote {N_PAIRS} rows to {args.out}")
    if args.report:
        report(args.out)


if __name__ == "__main__":
    main()
