"""Delimited file formats: readers, writers, config parsing."""
import numpy as np
import pytest

import fdx
from fdx import io as fio


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return str(path)


# ---------------------------------------------------------------------------
# p-value and weight tables


def test_read_pvalues_roundtrip(tmp_path):
    vals = [0.25, 1e-17, 1.0, 0.1 + 0.2]
    lines = ["id,pvalue"] + [f"h{i},{v!r}" for i, v in enumerate(vals)]
    ids, p = fio.read_pvalues(_write(tmp_path / "p.csv", "\n".join(lines) + "\n"))
    assert ids == ["h0", "h1", "h2", "h3"]
    assert np.array_equal(p, np.array(vals))


def test_read_pvalues_errors(tmp_path):
    with pytest.raises(fio.DataFormatError, match="No such file"):
        fio.read_pvalues(str(tmp_path / "missing.csv"))
    bad_header = _write(tmp_path / "a.csv", "name,pvalue\nh0,0.5\n")
    with pytest.raises(fio.DataFormatError, match="header"):
        fio.read_pvalues(bad_header)
    bad_value = _write(tmp_path / "b.csv", "id,pvalue\nh0,oops\n")
    with pytest.raises(fio.DataFormatError, match=r":2"):
        fio.read_pvalues(bad_value)
    out_of_range = _write(tmp_path / "c.csv", "id,pvalue\nh0,1.5\n")
    with pytest.raises(fio.DataFormatError):
        fio.read_pvalues(out_of_range)
    short_row = _write(tmp_path / "d.csv", "id,pvalue\nh0\n")
    with pytest.raises(fio.DataFormatError, match=r":2"):
        fio.read_pvalues(short_row)
    empty = _write(tmp_path / "e.csv", "id,pvalue\n")
    with pytest.raises(fio.DataFormatError, match="no data rows"):
        fio.read_pvalues(empty)


def test_read_pvalues_skips_blank_lines(tmp_path):
    path = _write(tmp_path / "p.csv", "id,pvalue\nh0,0.5\n\nh1,0.25\n")
    ids, p = fio.read_pvalues(path)
    assert ids == ["h0", "h1"]


def test_read_weights(tmp_path):
    path = _write(tmp_path / "w.csv", "id,weight\nh0,2.0\nh1,0.0\n")
    ids, w = fio.read_weights(path)
    assert ids == ["h0", "h1"]
    assert np.array_equal(w, np.array([2.0, 0.0]))
    bad = _write(tmp_path / "wb.csv", "id,weight\nh0,-1.0\n")
    with pytest.raises(fio.DataFormatError):
        fio.read_weights(bad)


def test_read_counts(tmp_path):
    path = _write(tmp_path / "c.csv", "id,x1,n1,x2,n2\ng0,3,25,1,25\ng1,0,10,10,10\n")
    ids, x1, n1, x2, n2 = fio.read_counts(path)
    assert ids == ["g0", "g1"]
    assert np.array_equal(x1, np.array([3, 0]))
    assert np.array_equal(n2, np.array([25, 10]))
    over = _write(tmp_path / "cb.csv", "id,x1,n1,x2,n2\ng0,26,25,1,25\n")
    with pytest.raises(fio.DataFormatError):
        fio.read_counts(over)
    frac = _write(tmp_path / "cf.csv", "id,x1,n1,x2,n2\ng0,2.5,25,1,25\n")
    with pytest.raises(fio.DataFormatError):
        fio.read_counts(frac)


# ---------------------------------------------------------------------------
# step CDF files


def test_cdf_file_roundtrip(tmp_path):
    cdfs = [
        fdx.StepCdf([0.1, 0.6, 1.0], [0.05, 0.4, 1.0]),
        fdx.StepCdf([0.25, 1.0], [0.2, 1.0]),
    ]
    pvals = np.array([0.6, 0.25])
    path = str(tmp_path / "cdfs.csv")
    fio.write_cdf_file(path, ["a", "b"], pvals, cdfs)
    ids, back, p = fio.read_cdf_file(path)
    assert ids == ["a", "b"]
    assert np.array_equal(p, pvals)
    for orig, rd in zip(cdfs, back):
        assert np.array_equal(orig.support, rd.support)
        assert np.array_equal(orig.cum, rd.cum)


def test_cdf_file_three_column_form(tmp_path):
    path = _write(
        tmp_path / "c.csv",
        "id,support,cum\na,0.1;1.0,0.05;1.0\nb,0.5;1.0,0.4;1.0\n",
    )
    ids, cdfs, p = fio.read_cdf_file(path)
    assert p is None
    assert ids == ["a", "b"]
    assert cdfs[1].evaluate(0.5) == 0.4


def test_cdf_file_errors(tmp_path):
    with pytest.raises(fio.DataFormatError):
        fio.read_cdf_file(str(tmp_path / "missing.csv"))
    bad_cum = _write(tmp_path / "c1.csv", "id,support,cum\na,0.1;1.0,0.5;0.4\n")
    with pytest.raises(fio.DataFormatError, match=r":2"):
        fio.read_cdf_file(bad_cum)
    bad_len = _write(tmp_path / "c2.csv", "id,support,cum\na,0.1;1.0,0.5\n")
    with pytest.raises(fio.DataFormatError, match=r":2"):
        fio.read_cdf_file(bad_len)
    bad_tok = _write(tmp_path / "c3.csv", "id,support,cum\na,0.1;x,0.5;1.0\n")
    with pytest.raises(fio.DataFormatError, match=r":2"):
        fio.read_cdf_file(bad_tok)


# ---------------------------------------------------------------------------
# writers


def test_write_results_format(tmp_path):
    path = str(tmp_path / "out.csv")
    fio.write_results(
        path,
        ["a", "b"],
        np.array([0.1, 0.7]),
        np.array([0.3, 1.4]),
        np.array([True, False]),
    )
    lines = open(path).read().splitlines()
    assert lines[0] == "id,pvalue,adjusted_pvalue,rejected"
    assert lines[1] == "a,0.1,0.3,true"
    assert lines[2] == "b,0.7,1.4,false"


def test_write_results_is_bit_exact(tmp_path):
    p = np.array([1 / 3, 0.1 + 0.2, 1e-300])
    path = str(tmp_path / "out.csv")
    fio.write_results(path, ["a", "b", "c"], p, p, np.zeros(3, dtype=bool))
    rows = [line.split(",") for line in open(path).read().splitlines()[1:]]
    assert [float(r[1]) for r in rows] == p.tolist()


def test_write_curve(tmp_path):
    path = str(tmp_path / "curve.csv")
    fio.write_curve(path, [("lr", 0.1, 3), ("lr", 0.2, 5)])
    lines = open(path).read().splitlines()
    assert lines[0] == "procedure,zeta,rejections"
    assert lines[1] == "lr,0.1,3"


def test_write_sim_rows_header(tmp_path):
    row = {f: 0 for f in fio.SIM_FIELDS}
    path = str(tmp_path / "sim.csv")
    fio.write_sim_rows(path, [row])
    lines = open(path).read().splitlines()
    assert lines[0] == ",".join(fio.SIM_FIELDS)
    assert len(lines) == 2


# ---------------------------------------------------------------------------
# scenario config


def test_read_sim_config_full(tmp_path):
    text = """
# comment line
m = 60
m1 = 10
m3 = 6
q3 = 0.4

n_per_group = 25
alpha = 0.1
zeta = 0.2
replicates = 40
seed = 7
procedures = bh, dlr
"""
    kwargs, procs = fio.read_sim_config(_write(tmp_path / "s.cfg", text))
    assert procs == ("bh", "dlr")
    assert kwargs["m2"] == 44  # derived from m - m1 - m3
    cfg = __import__("fdx").SimConfig(**kwargs)
    assert cfg.m == 60 and cfg.replicates == 40


def test_read_sim_config_explicit_m2(tmp_path):
    text = "m = 10\nm1 = 2\nm2 = 5\nm3 = 3\nq3 = 0.3\nreplicates = 5\nseed = 1\n"
    kwargs, procs = fio.read_sim_config(_write(tmp_path / "s.cfg", text))
    assert procs is None
    assert kwargs["m2"] == 5


def test_read_sim_config_errors(tmp_path):
    with pytest.raises(fio.DataFormatError):
        fio.read_sim_config(str(tmp_path / "missing.cfg"))
    dup = "m = 10\nm = 11\nm1 = 2\nm3 = 3\nq3 = 0.3\nreplicates = 5\nseed = 1\n"
    with pytest.raises(fio.DataFormatError, match="duplicate"):
        fio.read_sim_config(_write(tmp_path / "a.cfg", dup))
    unknown = "m = 10\nwat = 3\n"
    with pytest.raises(fio.DataFormatError, match="unknown"):
        fio.read_sim_config(_write(tmp_path / "b.cfg", unknown))
    missing = "m = 10\nm1 = 2\nm3 = 3\n"
    with pytest.raises(fio.DataFormatError, match="missing"):
        fio.read_sim_config(_write(tmp_path / "c.cfg", missing))
    noequals = "m 10\n"
    with pytest.raises(fio.DataFormatError):
        fio.read_sim_config(_write(tmp_path / "d.cfg", noequals))
