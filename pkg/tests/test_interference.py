import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ctxprob import (
    ModelSpec,
    RangeError,
    ZeroDenominator,
    classical_design,
    gamma_analytic,
    lambda_theta,
    marginal_c,
    perturbation_interval,
    regime_equivalences,
    tpf_eval,
    two_slit_prob,
)
from ctxprob.interference import (
    HYPERBOLIC,
    TRIGONOMETRIC,
    UNDEFINED,
    classical_interval,
    gamma_independent,
    independent_model,
)

from conftest import interior, m0, models, prob


def test_gamma_reference_model():
    g1, g2 = gamma_analytic(m0())
    assert g1 == pytest.approx(0.2, abs=1e-15) and g2 == pytest.approx(-0.2, abs=1e-15)


def test_undisturbed_measurement_is_classical():
    m = ModelSpec.from_probabilities(0.35, 0.9, 0.15, 0.9, 0.15)
    assert gamma_analytic(m) == pytest.approx((0.0, 0.0), abs=1e-15)
    rep = lambda_theta(m)
    assert rep.lam == pytest.approx((0.0, 0.0), abs=1e-14)
    assert rep.theta == pytest.approx((math.pi / 2, math.pi / 2))


@settings(max_examples=500)
@given(models())
def test_gamma_sum_zero_and_bounded(model):
    g1, g2 = gamma_analytic(model)
    assert abs(g1 + g2) <= 1e-12
    assert abs(g1) <= 1.0 and abs(g2) <= 1.0


def test_lambda_theta_reference_model():
    rep = lambda_theta(m0())
    assert rep.lam[0] == pytest.approx(0.5, abs=1e-14)
    assert rep.lam[1] == pytest.approx(-0.5, abs=1e-14)
    assert rep.theta[0] == pytest.approx(math.pi / 3, abs=1e-14)
    assert rep.theta[1] == pytest.approx(2 * math.pi / 3, abs=1e-14)
    assert rep.regime == (TRIGONOMETRIC, TRIGONOMETRIC)
    assert rep.denominators == pytest.approx((0.04, 0.04))


def test_zero_denominator_is_undefined():
    rep = lambda_theta(ModelSpec.from_probabilities(0.5, 0.9, 0.5, 0.0, 0.2))
    assert rep.lam[0] is None and rep.theta[0] is None and rep.regime[0] == UNDEFINED
    assert rep.to_dict()["lambda"][0] is None


def test_hyperbolic_regime():
    # gamma_1 = 0.7 - 0.05 - 0.05 = 0.6 against 2 sqrt(0.05 * 0.05) = 0.1
    rep = lambda_theta(ModelSpec.from_probabilities(0.5, 0.9, 0.5, 0.1, 0.1))
    assert rep.lam[0] == pytest.approx(6.0)
    assert rep.regime[0] == HYPERBOLIC and rep.theta[0] is None


@given(models())
def test_theta_defined_iff_trigonometric(model):
    rep = lambda_theta(model)
    for lam, theta, regime in zip(rep.lam, rep.theta, rep.regime):
        assert (theta is not None) == (regime == TRIGONOMETRIC)
        if lam is not None:
            assert (regime == TRIGONOMETRIC) == (abs(lam) <= 1 + 1e-12)
            if theta is not None:
                assert 0.0 <= theta <= math.pi


# --- classical design -------------------------------------------------------


def test_classical_design_example():
    # p_a1 = 0.3, p_c = 0.5: interval [0, 1], t = 0.4 gives p_bar = 0.4
    p_bar, p_hat = classical_design(0.3, 0.5, 0.4)
    assert p_bar == pytest.approx(0.4, abs=1e-15)
    assert p_hat == pytest.approx(19 / 35, abs=1e-15)
    assert gamma_independent(0.3, 0.5, p_bar, p_hat) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0])
def test_classical_design_zero_marginal(t):
    assert classical_design(0.6, 0.0, t) == (0.0, 0.0)


def test_classical_design_degenerate_interval():
    assert classical_interval(0.5, 1.0) == (1.0, 1.0)
    assert classical_design(0.5, 1.0, 0.3) == (1.0, 1.0)


def test_classical_design_dense_grid():
    worst = 0.0
    for pa in np.linspace(0.01, 0.99, 41):
        for pc in np.linspace(0.0, 1.0, 41):
            for t in np.linspace(0.0, 1.0, 21):
                pb, ph = classical_design(pa, pc, t)
                assert 0.0 <= pb <= 1.0 and 0.0 <= ph <= 1.0
                worst = max(worst, abs(gamma_independent(pa, pc, pb, ph)))
    assert worst <= 1e-12


def test_classical_design_model_has_zero_gamma():
    pb, ph = classical_design(0.3, 0.5, 0.4)
    m = independent_model(0.3, 0.5, pb, ph)
    assert marginal_c(m)[0] == pytest.approx(0.5)
    assert abs(gamma_analytic(m)[0]) <= 1e-12


def test_classical_design_rejects_degenerate_a():
    with pytest.raises(RangeError):
        classical_design(1.0, 0.5, 0.5)


# --- regime equivalences -----------------------------------------------------


def test_regime_equivalences_reference_values():
    r = regime_equivalences(0.5, 0.7, 0.8, 0.2)
    assert r.t1 == pytest.approx(math.sqrt(0.4)) and r.t2 == pytest.approx(math.sqrt(0.1))
    assert r.t1 + r.t2 == pytest.approx(0.9486833, abs=1e-7)
    assert r.sqrt_pc == pytest.approx(0.8366600, abs=1e-7)
    assert r.lam == pytest.approx(0.5)
    assert r.lam_le_1 and r.sum_ge_sqrt_pc and r.passed


def test_regime_equivalences_classical_point():
    pb, ph = classical_design(0.3, 0.5, 0.4)
    r = regime_equivalences(0.3, 0.5, pb, ph)
    assert r.lam == pytest.approx(0.0, abs=1e-12)
    assert r.lam_le_1 and r.sum_ge_sqrt_pc and r.lam_ge_minus_1 and r.absdiff_le_sqrt_pc


def test_regime_equivalences_zero_denominator():
    with pytest.raises(ZeroDenominator):
        regime_equivalences(0.5, 0.5, 0.0, 0.5)


def test_regime_equivalences_grid_against_exact_oracle():
    from oracles import regime_grid

    seen = 0
    for pa, pc, pb, ph, le, sg, ge, dl in regime_grid():
        r = regime_equivalences(float(pa), float(pc), float(pb), float(ph))
        assert (r.lam_le_1, r.sum_ge_sqrt_pc, r.lam_ge_minus_1, r.absdiff_le_sqrt_pc) == (le, sg, ge, dl)
        assert r.passed
        seen += 1
    assert seen == 19 * 21 * 20 * 20


@given(interior, prob(), st.floats(1e-6, 1.0), st.floats(1e-6, 1.0))
def test_regime_equivalences_random(pa, pc, pb, ph):
    assert regime_equivalences(pa, pc, pb, ph).passed


# --- perturbation interval ---------------------------------------------------


def test_perturbation_interval_example():
    iv = perturbation_interval(0.9, 0.5)
    assert iv.lo == pytest.approx(0.3125, abs=1e-15)
    assert iv.raw_hi == pytest.approx(1.25, abs=1e-15)
    assert iv.hi == 1.0 and iv.capped and not iv.unbounded_above


def test_perturbation_interval_half():
    iv = perturbation_interval(0.5, 0.4)
    assert iv.unbounded_above and iv.hi == 1.0 and iv.lo == pytest.approx(0.2)
    assert iv.to_dict()["raw_hi"] is None


def test_perturbation_interval_zero_marginal():
    iv = perturbation_interval(0.7, 0.0)
    assert (iv.lo, iv.hi) == (0.0, 0.0)


def _lam1(pa, pc, x):
    return lambda_theta(independent_model(pa, pc, x, x)).lam[0]


def test_perturbation_interval_agrees_with_lambda():
    iv = perturbation_interval(0.9, 0.5)
    inside = np.linspace(iv.lo, iv.hi, 402)[1:-1]
    outside = np.linspace(0.0, iv.lo, 402)[1:-1]
    assert all(abs(_lam1(0.9, 0.5, x)) <= 1 for x in inside)
    assert all(abs(_lam1(0.9, 0.5, x)) > 1 for x in outside)


@settings(max_examples=200)
@given(st.floats(0.02, 0.98), st.floats(0.05, 1.0), st.floats(0.01, 1.0))
def test_perturbation_interval_membership(pa, pc, x):
    iv = perturbation_interval(pa, pc)
    lam = _lam1(pa, pc, x)
    # skip a thin band around the endpoints where rounding decides
    if min(abs(x - iv.lo), abs(x - iv.raw_hi)) < 1e-9:
        return
    assert (x in iv) == (abs(lam) <= 1)


# --- two-slit and total probability forms ------------------------------------


def test_two_slit_examples():
    assert two_slit_prob(0.5, 0.5, math.pi / 2) == pytest.approx((1.0, True))
    v = two_slit_prob(0.5, 0.5, 2 * math.pi / 3)
    assert v.value == pytest.approx(0.5) and v.valid
    v = two_slit_prob(0.5, 0.5, 0.0)
    assert v.value == pytest.approx(2.0) and not v.valid


def test_tpf_reference_round_trip():
    v = tpf_eval(0.8, 0.2, 0.5, 0.5, math.pi / 3)
    assert v.value == pytest.approx(0.7, abs=1e-15) and v.valid


def test_tpf_classical_and_opposed():
    assert tpf_eval(0.8, 0.2, 0.5, 0.5, math.pi / 2).value == pytest.approx(0.5)
    assert tpf_eval(0.6, 0.6, 0.5, 0.5, math.pi).value == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize(
    "args", [(1.2, 0.5, 0.5, 0.5, 0.0), (0.5, 0.5, 0.6, 0.6, 0.0), (0.5, 0.5, 0.0, 1.0, 0.0)]
)
def test_tpf_rejects_invalid(args):
    with pytest.raises(RangeError):
        tpf_eval(*args)


@settings(max_examples=500)
@given(models())
def test_tpf_round_trip_property(model):
    rep = lambda_theta(model)
    p_c = marginal_c(model)
    for j in (1, 2):
        if rep.regime[j - 1] != TRIGONOMETRIC:
            continue
        v = tpf_eval(model.cbar_given_a1.p(j), model.chat_given_a2.p(j), model.p_a1, model.p_a2, rep.theta[j - 1])
        assert abs(v.value - p_c[j - 1]) <= 1e-12
