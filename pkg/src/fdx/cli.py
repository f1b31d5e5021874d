"""Command line front end.

Subcommands
-----------
adjust       adjusted p-values and the rejection set for one procedure
fisher-cdf   per-hypothesis Fisher exact p-values and attainable-p CDFs
curve        rejection counts over a zeta grid, one pass per procedure
simulate     Monte-Carlo scenario runner (config file or the full study grid)

Exit codes: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import sys
from fractions import Fraction

import click
import numpy as np

from . import io as fio
from .distributions import CdfFamily
from .fisher import FisherMargins, fisher_outcomes
from .simharness import SIM_PROCEDURES, SimConfig, study_grid, run_scenario
from .stepdown import reject
from .transforms import KINDS, ProcedureSpec, make_transform
from .weighting import WeightProfile, weighted_pvalues_am, weighted_pvalues_gm

_FAMILY_KINDS = ("hlr", "hgr", "hgr-na", "pb")
_WEIGHTED_KINDS = ("wlr-am", "wlr-gm", "wpb-am", "wpb-gm", "wgr-am", "wgr-gm")


def _parse_alpha(_ctx, _param, value):
    """Accept a float or an exact rational like 1/20."""
    if value is None:
        return None
    try:
        if "/" in value:
            num, den = value.split("/", 1)
            parsed = Fraction(int(num), int(den))
        else:
            parsed = float(value)
    except (ValueError, ZeroDivisionError):
        raise click.UsageError(f"--alpha {value!r} is not a number or num/den pair")
    if not 0 < parsed < 1:
        raise click.UsageError("--alpha must lie in (0, 1)")
    return parsed


def _parse_zeta_grid(_ctx, _param, value):
    if value is None:
        return None
    parts = value.split(":")
    if len(parts) != 3:
        raise click.UsageError("--zeta-grid must look like start:stop:step")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise click.UsageError("--zeta-grid parts must be numbers")
    if step <= 0:
        raise click.UsageError("--zeta-grid step must be positive")
    if a > b:
        return np.array([])
    n = int(np.floor((b - a) / step + 1e-9)) + 1
    grid = a + step * np.arange(n)
    if grid.size and (grid[0] <= 0.0 or grid[-1] >= 1.0):
        raise click.UsageError("--zeta-grid values must lie strictly inside (0, 1)")
    return grid


def _counts_to_fisher(ids, x1, n1, x2, n2, sided):
    pvals = np.empty(len(ids))
    cdfs = []
    for i in range(len(ids)):
        margins = FisherMargins(int(n1[i]), int(n2[i]), int(x1[i] + x2[i]))
        out = fisher_outcomes(margins, sided)
        pvals[i] = out.pvalues[int(x1[i]) - margins.x_min]
        cdfs.append(out.cdf)
    return pvals, cdfs


def _load_analysis_inputs(procedure, pvalues, counts, cdfs, weights, sided):
    """Resolve ids, raw p-values, the p-values the procedure consumes,
    the CDF family (when required) and the weight vector (when required)."""
    sources = [s for s in (pvalues, counts) if s]
    if len(sources) > 1:
        raise click.UsageError("--pvalues and --counts are mutually exclusive")

    family = None
    if counts:
        ids, x1, n1, x2, n2 = fio.read_counts(counts)
        raw, cdf_list = _counts_to_fisher(ids, x1, n1, x2, n2, sided)
        family = CdfFamily.from_cdfs(cdf_list)
    elif pvalues:
        ids, raw = fio.read_pvalues(pvalues)
        if cdfs:
            cdf_ids, cdf_list, _ = fio.read_cdf_file(cdfs)
            if cdf_ids != ids:
                raise fio.DataFormatError(
                    "cdf file ids do not match the p-value file ids"
                )
            family = CdfFamily.from_cdfs(cdf_list)
    elif cdfs:
        ids, cdf_list, raw = fio.read_cdf_file(cdfs)
        if raw is None:
            raise click.UsageError(
                "a 3-column --cdfs file carries no p-values; add --pvalues"
            )
        family = CdfFamily.from_cdfs(cdf_list)
    else:
        raise click.UsageError("provide p-values via --pvalues, --counts or --cdfs")

    if procedure in _FAMILY_KINDS and family is None:
        raise click.UsageError(
            f"--procedure {procedure} needs per-hypothesis CDFs (--cdfs or --counts)"
        )

    profile = None
    run_p = raw
    if procedure in _WEIGHTED_KINDS:
        if not weights:
            raise click.UsageError(f"--procedure {procedure} requires --weights")
        w_ids, w = fio.read_weights(weights)
        if w_ids != ids:
            raise fio.DataFormatError("weight file ids do not match the input ids")
        profile = WeightProfile.from_weights(w)
        if procedure.endswith("-am"):
            run_p = weighted_pvalues_am(raw, profile)
        else:
            run_p = weighted_pvalues_gm(raw, profile)

    return ids, raw, run_p, family, profile


def _build_spec(procedure, alpha, zeta, family, profile, m):
    return ProcedureSpec(
        kind=procedure,
        alpha=alpha,
        zeta=zeta,
        weights=None if profile is None else profile.weights,
        family=family if procedure in _FAMILY_KINDS else None,
        m=m,
    )


@click.group()
def cli():
    """False discovery exceedance control for heterogeneous nulls."""


@cli.command()
@click.option("--procedure", type=click.Choice(KINDS), required=True)
@click.option("--pvalues", type=click.Path(), help="CSV with id,pvalue")
@click.option("--counts", type=click.Path(), help="CSV with id,x1,n1,x2,n2")
@click.option("--cdfs", type=click.Path(), help="step-CDF file (id,support,cum)")
@click.option("--weights", type=click.Path(), help="CSV with id,weight")
@click.option("--alpha", callback=_parse_alpha, default="0.05", show_default=True,
              help="FDP threshold; accepts a float or an exact num/den pair")
@click.option("--zeta", type=float, default=0.5, show_default=True,
              help="exceedance budget P(FDP > alpha) <= zeta")
@click.option("--sided", type=click.Choice(["one", "two"]), default="two",
              show_default=True, help="Fisher test sidedness (with --counts)")
@click.option("--out", type=click.Path(), required=True,
              help="output CSV (id,pvalue,adjusted_pvalue,rejected)")
def adjust(procedure, pvalues, counts, cdfs, weights, alpha, zeta, sided, out):
    """Adjusted p-values and the step-down rejection set."""
    if not (0.0 < zeta < 1.0):
        raise click.UsageError("--zeta must lie in (0, 1)")
    ids, raw, run_p, family, profile = _load_analysis_inputs(
        procedure, pvalues, counts, cdfs, weights, sided
    )
    spec = _build_spec(procedure, alpha, zeta, family, profile, len(ids))
    res = reject(run_p, make_transform(spec), zeta)
    mask = np.zeros(len(ids), dtype=bool)
    mask[res.rejected] = True
    fio.write_results(out, ids, raw, res.adjusted, mask)
    click.echo(f"rejected {res.ell_hat} of {len(ids)} at alpha={alpha}, zeta={zeta}")


@cli.command("fisher-cdf")
@click.option("--counts", type=click.Path(), required=True,
              help="CSV with id,x1,n1,x2,n2")
@click.option("--sided", type=click.Choice(["one", "two"]), default="two",
              show_default=True)
@click.option("--out", type=click.Path(), required=True,
              help="output CSV (id,pvalue,support,cum)")
def fisher_cdf(counts, sided, out):
    """Exact Fisher p-values and attainable-p step CDFs per hypothesis."""
    ids, x1, n1, x2, n2 = fio.read_counts(counts)
    pvals, cdf_list = _counts_to_fisher(ids, x1, n1, x2, n2, sided)
    fio.write_cdf_file(out, ids, pvals, cdf_list)
    click.echo(f"wrote {len(ids)} Fisher CDFs to {out}")


@cli.command()
@click.option("--procedure", "procedures", type=click.Choice(KINDS), required=True,
              multiple=True, help="repeatable; one curve per procedure")
@click.option("--pvalues", type=click.Path())
@click.option("--counts", type=click.Path())
@click.option("--cdfs", type=click.Path())
@click.option("--weights", type=click.Path())
@click.option("--alpha", callback=_parse_alpha, default="0.05", show_default=True)
@click.option("--zeta-grid", callback=_parse_zeta_grid, required=True,
              help="start:stop:step, all strictly inside (0, 1)")
@click.option("--sided", type=click.Choice(["one", "two"]), default="two",
              show_default=True)
@click.option("--out", type=click.Path(), required=True,
              help="output CSV (procedure,zeta,rejections)")
@click.option("--plot", type=click.Path(), default=None,
              help="also render the rejection curves to this image file")
def curve(procedures, pvalues, counts, cdfs, weights, alpha, zeta_grid, sided, out, plot):
    """Rejection counts over a zeta grid (adjusted p-values computed once)."""
    rows = []
    curves = {}
    for procedure in procedures:
        ids, _raw, run_p, family, profile = _load_analysis_inputs(
            procedure, pvalues, counts, cdfs, weights, sided
        )
        if zeta_grid.size == 0:
            continue
        # any zeta in (0,1) yields the same transform; adjusted p-values do
        # not depend on zeta, so one pass serves the whole grid
        spec = _build_spec(procedure, alpha, float(zeta_grid[0]), family, profile, len(ids))
        adj = reject(run_p, make_transform(spec), float(zeta_grid[0])).adjusted
        counts_on_grid = (adj[None, :] <= zeta_grid[:, None]).sum(axis=1)
        curves[procedure] = (zeta_grid, counts_on_grid)
        rows.extend(
            (procedure, z, c) for z, c in zip(zeta_grid, counts_on_grid)
        )
    fio.write_curve(out, rows)
    if plot is not None and curves:
        from .figures import save_rejection_curves

        save_rejection_curves(curves, plot, alpha=float(alpha))
        click.echo(f"wrote curve figure to {plot}", err=True)


@cli.command()
@click.option("--config", "config_path", type=click.Path(),
              help="key = value scenario file (see docs)")
@click.option("--study-grid", "study_grid_flag", is_flag=True,
              help="run the full 54-scenario study grid instead of --config")
@click.option("--replicates", type=int, default=None, help="override replicate count")
@click.option("--seed", type=int, default=None, help="override the base seed")
@click.option("--procedures", default=None,
              help=f"comma list from {{{','.join(SIM_PROCEDURES)}}}")
@click.option("--threads", type=int, default=1, show_default=True,
              help="worker processes; results are identical for any value")
@click.option("--out", type=click.Path(), required=True,
              help="summary CSV (one row per scenario x procedure)")
@click.option("--plot", type=click.Path(), default=None,
              help="also render a power/exceedance summary figure")
def simulate(config_path, study_grid_flag, replicates, seed, procedures,
             threads, out, plot):
    """Monte-Carlo scenario study with per-procedure power summaries."""
    if study_grid_flag == bool(config_path):
        raise click.UsageError("provide exactly one of --config or --study-grid")
    procs = tuple(SIM_PROCEDURES)
    if procedures:
        procs = tuple(tok.strip() for tok in procedures.split(",") if tok.strip())
        for name in procs:
            if name not in SIM_PROCEDURES:
                raise click.UsageError(
                    f"unknown procedure {name!r}; choose from {', '.join(SIM_PROCEDURES)}"
                )
    if study_grid_flag:
        if replicates is None or seed is None:
            raise click.UsageError("--study-grid needs --replicates and --seed")
        configs = study_grid(replicates=replicates, seed=seed)
    else:
        kwargs, cfg_procs = fio.read_sim_config(config_path)
        if cfg_procs and not procedures:
            procs = cfg_procs
            for name in procs:
                if name not in SIM_PROCEDURES:
                    raise fio.DataFormatError(
                        f"config procedures contain unknown name {name!r}"
                    )
        if replicates is not None:
            kwargs["replicates"] = replicates
        if seed is not None:
            kwargs["seed"] = seed
        try:
            configs = [SimConfig(**kwargs)]
        except ValueError as exc:
            raise fio.DataFormatError(str(exc)) from None
    rows = []
    for i, cfg in enumerate(configs):
        label = f"scenario {i + 1}/{len(configs)}"

        def progress(done, total, label=label):
            if done == total or done % max(1, total // 10) == 0:
                click.echo(f"{label}: replicate {done}/{total}", err=True)

        result = run_scenario(cfg, procedures=procs, threads=threads, progress=progress)
        rows.extend(result.summary_rows())
    fio.write_sim_rows(out, rows)
    if plot is not None and rows:
        from .figures import save_simulation_summary

        save_simulation_summary(rows, plot)
        click.echo(f"wrote summary figure to {plot}", err=True)


def main(argv=None):
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.UsageError as exc:
        exc.show()
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except click.exceptions.Abort:
        sys.exit(1)
    except fio.DataFormatError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    except ValueError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    sys.exit(0)


if __name__ == "__main__":
    main()
