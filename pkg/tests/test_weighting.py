"""Weight profiles, weighted p-values, closed-form critical values."""
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import fdx

weight_arrays = st.lists(
    st.floats(min_value=0.05, max_value=8.0), min_size=2, max_size=12
).map(np.asarray)


# ---------------------------------------------------------------------------
# profile


def test_weight_profile_stats():
    prof = fdx.WeightProfile.from_weights([1.0, 3.0, 0.0, 2.0])
    assert prof.m == 4
    assert prof.mean == pytest.approx(1.5)
    assert np.array_equal(prof.sorted_desc, np.array([3.0, 2.0, 1.0, 0.0]))
    assert prof.top_mean == pytest.approx([3.0, 2.5, 2.0, 1.5], abs=1e-15)
    # the top-j mean shrinks toward the overall mean
    assert np.all(np.diff(prof.top_mean) <= 1e-15)
    assert prof.top_mean[-1] == pytest.approx(prof.mean, abs=1e-15)


def test_weight_profile_validation():
    with pytest.raises(ValueError):
        fdx.WeightProfile.from_weights([])
    with pytest.raises(ValueError):
        fdx.WeightProfile.from_weights([1.0, -0.5])
    with pytest.raises(ValueError):
        fdx.WeightProfile.from_weights([0.0, 0.0])
    with pytest.raises(ValueError):
        fdx.WeightProfile.from_weights([[1.0, 2.0]])


# ---------------------------------------------------------------------------
# weighted p-values


def test_weighted_pvalues_am_formula():
    prof = fdx.WeightProfile.from_weights([2.0, 1.0, 0.5, 0.0])
    p = np.array([0.2, 0.2, 0.2, 0.2])
    out = fdx.weighted_pvalues_am(p, prof)
    wbar = 0.875
    assert out[0] == pytest.approx(0.2 * wbar / 2.0, abs=1e-15)
    assert out[1] == pytest.approx(0.2 * wbar / 1.0, abs=1e-15)
    assert out[2] == pytest.approx(0.2 * wbar / 0.5, abs=1e-15)
    assert out[3] == 1.0
    # capping
    assert fdx.weighted_pvalues_am(np.array([0.9, 0.9, 0.9, 0.9]), prof)[2] == 1.0
    # a zero raw p stays zero for positive weights
    assert fdx.weighted_pvalues_am(np.zeros(4), prof)[0] == 0.0


def test_weighted_pvalues_gm_formula():
    prof = fdx.WeightProfile.from_weights([2.0, 1.0, 0.0])
    p = np.array([0.36, 0.36, 0.36])
    out = fdx.weighted_pvalues_gm(p, prof)
    assert out[0] == pytest.approx(1.0 - 0.64 ** (1.0 / 2.0), abs=1e-15)
    assert out[1] == pytest.approx(1.0 - 0.64 ** (1.0 / 1.0), abs=1e-15)
    assert out[2] == 1.0
    ends = fdx.weighted_pvalues_gm(np.array([0.0, 1.0, 0.0]), prof)
    assert ends[0] == 0.0
    assert ends[1] == 1.0
    assert ends[2] == 0.0


def test_weighted_pvalues_validation():
    prof = fdx.WeightProfile.from_weights([1.0, 2.0])
    with pytest.raises(ValueError):
        fdx.weighted_pvalues_am(np.array([0.1]), prof)
    with pytest.raises(ValueError):
        fdx.weighted_pvalues_gm(np.array([0.1, 1.2]), prof)


@given(weights=weight_arrays, t=st.floats(min_value=0.0, max_value=0.99))
def test_weighted_roundtrip_through_null_cdf(weights, t):
    # pushing t through the null CDF of the weighted p-value and then
    # through the weighting map recovers t (on the uncapped branch)
    prof = fdx.WeightProfile.from_weights(weights)
    am_raw = np.array([fdx.WeightedAM(w, prof.mean).evaluate(t) for w in weights])
    uncapped = am_raw < 1.0
    back = fdx.weighted_pvalues_am(am_raw, prof)
    assert back[uncapped] == pytest.approx(np.full(int(uncapped.sum()), t), abs=1e-10)
    gm_raw = np.array([fdx.WeightedGM(w, prof.mean).evaluate(t) for w in weights])
    back = fdx.weighted_pvalues_gm(gm_raw, prof)
    assert back == pytest.approx(np.full(weights.size, t), abs=1e-9)


@given(weights=weight_arrays, c=st.floats(min_value=0.1, max_value=10.0))
def test_weighted_pvalues_scale_invariant(weights, c):
    p = np.linspace(0.05, 0.95, weights.size)
    a = fdx.WeightProfile.from_weights(weights)
    b = fdx.WeightProfile.from_weights(weights * c)
    assert fdx.weighted_pvalues_am(p, a) == pytest.approx(
        fdx.weighted_pvalues_am(p, b), abs=1e-12
    )
    assert fdx.weighted_pvalues_gm(p, a) == pytest.approx(
        fdx.weighted_pvalues_gm(p, b), abs=1e-12
    )


# ---------------------------------------------------------------------------
# closed-form critical values


def test_wlr_am_hand_example():
    prof = fdx.WeightProfile.from_weights([2.0, 0.0])
    cv = fdx.wlr_am_critical_values(2, 0.05, 0.5, prof)
    # ell = 1: k = 1, n = 2, top-2 mean = 1 -> tau = 0.5 * 1 / 2
    # ell = 2: k = 1, n = 1, top-1 mean = 2 -> tau = 0.5 / 2
    assert cv.tau == pytest.approx([0.25, 0.25], abs=1e-15)


def test_wgr_gm_hand_example():
    prof = fdx.WeightProfile.from_weights([3.0, 1.0])
    cv = fdx.wgr_gm_critical_values(2, 0.3, 0.19, prof)
    # ell = 1: exponent 1, plain gr root of 1-(1-t)^2 = 0.19 -> t = 0.1
    # ell = 2: n = 1, gr root is zeta itself, exponent wbar/top1 = 2/3
    assert cv.tau[0] == pytest.approx(0.1, abs=2e-12)
    assert cv.tau[1] == pytest.approx(1.0 - 0.81 ** (2.0 / 3.0), abs=2e-12)


@given(weights=weight_arrays)
def test_closed_forms_match_generic_inversion(weights):
    m = weights.size
    alpha, zeta = 0.15, 0.35
    prof = fdx.WeightProfile.from_weights(weights)
    closed = fdx.wlr_am_critical_values(m, alpha, zeta, prof)
    spec = fdx.ProcedureSpec(kind="wlr-am", alpha=alpha, zeta=zeta, weights=weights)
    generic = fdx.critical_values(fdx.make_transform(spec), zeta)
    assert closed.tau == pytest.approx(generic.tau, abs=5e-12)
    closed = fdx.wgr_gm_critical_values(m, alpha, zeta, prof)
    spec = fdx.ProcedureSpec(kind="wgr-gm", alpha=alpha, zeta=zeta, weights=weights)
    generic = fdx.critical_values(fdx.make_transform(spec), zeta)
    assert closed.tau == pytest.approx(generic.tau, abs=5e-12)


def test_closed_forms_with_zero_weights():
    w = np.array([2.0, 1.0, 0.0, 0.0])
    prof = fdx.WeightProfile.from_weights(w)
    for fn, kind in (
        (fdx.wlr_am_critical_values, "wlr-am"),
        (fdx.wgr_gm_critical_values, "wgr-gm"),
    ):
        closed = fn(4, 0.2, 0.4, prof)
        spec = fdx.ProcedureSpec(kind=kind, alpha=0.2, zeta=0.4, weights=w)
        generic = fdx.critical_values(fdx.make_transform(spec), 0.4)
        assert closed.tau == pytest.approx(generic.tau, abs=5e-12)


def test_unit_weights_reduce_to_unweighted():
    prof = fdx.WeightProfile.from_weights(np.ones(10))
    lr = fdx.critical_values(
        fdx.make_transform(fdx.ProcedureSpec(kind="lr", alpha=0.05, zeta=0.5, m=10)), 0.5
    )
    assert fdx.wlr_am_critical_values(10, 0.05, 0.5, prof).tau == pytest.approx(
        lr.tau, abs=2e-12
    )
    gr = fdx.critical_values(
        fdx.make_transform(fdx.ProcedureSpec(kind="gr", alpha=0.05, zeta=0.5, m=10)), 0.5
    )
    assert fdx.wgr_gm_critical_values(10, 0.05, 0.5, prof).tau == pytest.approx(
        gr.tau, abs=2e-12
    )


def test_closed_form_validation():
    prof = fdx.WeightProfile.from_weights([1.0, 2.0])
    with pytest.raises(ValueError):
        fdx.wlr_am_critical_values(3, 0.05, 0.5, prof)
    with pytest.raises(ValueError):
        fdx.wgr_gm_critical_values(2, 0.05, 1.0, prof)


# ---------------------------------------------------------------------------
# route agreement on rejection sets


@pytest.mark.parametrize("kind", ["wlr-am", "wgr-gm"])
def test_three_routes_same_rejections(kind, rng):
    closed_fn = {
        "wlr-am": fdx.wlr_am_critical_values,
        "wgr-gm": fdx.wgr_gm_critical_values,
    }[kind]
    weigh_fn = {
        "wlr-am": fdx.weighted_pvalues_am,
        "wgr-gm": fdx.weighted_pvalues_gm,
    }[kind]
    for _ in range(10):
        m = int(rng.integers(4, 25))
        w = rng.uniform(0.1, 4.0, size=m)
        w[rng.uniform(size=m) < 0.2] = 0.0
        if not np.any(w > 0):
            w[0] = 1.0
        prof = fdx.WeightProfile.from_weights(w)
        alpha = float(rng.uniform(0.05, 0.3))
        zeta = float(rng.uniform(0.1, 0.7))
        p_w = weigh_fn(rng.uniform(size=m) ** 2, prof)
        spec = fdx.ProcedureSpec(kind=kind, alpha=alpha, zeta=zeta, weights=w)
        xi = fdx.make_transform(spec)
        fast = fdx.reject(p_w, xi, zeta)
        generic = fdx.stepdown_explicit(p_w, fdx.critical_values(xi, zeta))
        closed = fdx.stepdown_explicit(p_w, closed_fn(m, alpha, zeta, prof))
        assert np.array_equal(fast.rejected, generic.rejected)
        assert np.array_equal(generic.rejected, closed.rejected)


def test_zero_weight_hypotheses_never_rejected(rng):
    w = np.array([1.0, 0.0, 2.0, 0.0, 1.5])
    prof = fdx.WeightProfile.from_weights(w)
    for kind, weigh in (
        ("wpb-am", fdx.weighted_pvalues_am),
        ("wgr-gm", fdx.weighted_pvalues_gm),
    ):
        for _ in range(5):
            p_w = weigh(rng.uniform(size=5) * 0.2, prof)
            spec = fdx.ProcedureSpec(kind=kind, alpha=0.2, zeta=0.6, weights=w)
            res = fdx.reject(p_w, fdx.make_transform(spec), 0.6)
            assert not {1, 3} & set(res.rejected.tolist())
