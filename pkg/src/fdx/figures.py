"""Figure rendering for the report commands.

Companions to the delimited outputs: `fdx curve --plot` draws the
rejection-count-versus-zeta staircase per procedure, `fdx simulate
--plot` summarizes power and exceedance per procedure.  Rendering uses
the Agg backend so it works headless; files are written wherever the
caller points (extension picks the format, PNG/PDF/SVG).
"""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["save_rejection_curves", "save_simulation_summary"]


def save_rejection_curves(curves, path, alpha=None, zeta_marks=()):
    """Plot rejections as a function of zeta, one staircase per procedure.

    ``curves`` maps a procedure label to ``(zetas, counts)`` arrays.
    """
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, (zetas, counts) in curves.items():
        ax.step(zetas, counts, where="post", label=label)
    for z in zeta_marks:
        ax.axvline(z, color="0.6", linestyle=":", linewidth=1)
    ax.set_xlabel(r"exceedance budget $\zeta$")
    ax.set_ylabel("rejections")
    title = "Rejections by exceedance budget"
    if alpha is not None:
        title += rf" ($\alpha$={alpha:g})"
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_simulation_summary(rows, path):
    """Bar summary of mean TDP (with SE bars) and exceedance per procedure.

    ``rows`` are scenario summary dicts; multiple scenarios stack side by
    side on the x axis grouped by procedure.
    """
    labels = [f"{r['procedure']}\nm={r['m']},q3={r['q3']:g}" if len(rows) > 8 else r["procedure"]
              for r in rows]
    tdp = [r["mean_tdp"] for r in rows]
    tdp_se = [r["se_tdp"] for r in rows]
    exc = [r["exceedance"] for r in rows]
    zeta = rows[0]["zeta"] if rows else None

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10.0, 4.2))
    xs = range(len(rows))
    ax1.bar(xs, tdp, yerr=tdp_se, capsize=3, color="#4878d0")
    ax1.set_xticks(list(xs))
    ax1.set_xticklabels(labels, fontsize=8)
    ax1.set_ylabel("mean TDP")
    ax1.set_title("Power")
    ax1.grid(True, axis="y", alpha=0.3)

    ax2.bar(xs, exc, color="#d65f5f")
    if zeta is not None:
        ax2.axhline(zeta, color="0.3", linestyle="--", linewidth=1, label=r"$\zeta$")
        ax2.legend(fontsize=9)
    ax2.set_xticks(list(xs))
    ax2.set_xticklabels(labels, fontsize=8)
    ax2.set_ylabel(r"empirical P(FDP > $\alpha$)")
    ax2.set_title("Exceedance")
    ax2.grid(True, axis="y", alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
