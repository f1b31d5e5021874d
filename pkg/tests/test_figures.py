"""Figure rendering smoke tests (headless backend)."""
import os

import numpy as np

import fdx
from fdx.figures import save_rejection_curves, save_simulation_summary


def test_save_rejection_curves(tmp_path):
    zetas = np.linspace(0.05, 0.5, 10)
    curves = {
        "lr": (zetas, np.arange(10)),
        "gr": (zetas, np.arange(10) + 2),
    }
    path = str(tmp_path / "curves.png")
    save_rejection_curves(curves, path, alpha=0.1, zeta_marks=(0.2, 0.4))
    assert os.path.getsize(path) > 0


def test_save_simulation_summary(tmp_path):
    res = fdx.run_scenario(
        fdx.SimConfig(m=15, m1=3, m2=9, m3=3, q3=0.5, replicates=4, seed=2,
                      n_per_group=12, alpha=0.1, zeta=0.3),
        procedures=("bh", "dgr"),
    )
    path = str(tmp_path / "summary.png")
    save_simulation_summary(res.summary_rows(), path)
    assert os.path.getsize(path) > 0
