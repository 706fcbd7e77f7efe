"""Acceptance criteria 1-10, each at its stated tolerance.

Every test prints a ``criterion N: PASS/FAIL`` line with its evidence (shown
with ``-s``); the session summary repeats one line per criterion.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from ctxprob import (
    ModelSpec,
    SeedSpec,
    accumulate,
    apply_chain,
    classical_design,
    gamma_analytic,
    gen_iid,
    gen_pairwise_xor,
    lambda_theta,
    marginal_c,
    perturbation_interval,
    regime_equivalences,
    tpf_eval,
)
from ctxprob.cli import cmd_simulate
from ctxprob.config import RunConfig
from ctxprob.estimators import cond_rate, gamma_hat
from ctxprob.interference import TRIGONOMETRIC, independent_model
from ctxprob.runner import simulate

from conftest import m0
from oracles import regime_grid

N_BIG = 10**6
SEEDS = list(range(20))
NEED = 19

# absolute tolerances of the convergence criterion
TOLS = {"gamma1": 0.01, "N1_frac": 0.002, "m11_rate": 0.0033, "m12_rate": 0.0033}


def report(k, ok, detail):
    print(f"\ncriterion {k}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def random_models(rng, count):
    p = rng.random((count, 7))
    p[:, 0] = np.clip(p[:, 0], 1e-3, 1 - 1e-3)
    for row in p:
        yield ModelSpec.from_probabilities(*row[:5], cbar_given_a2=row[5], chat_given_a1=row[6])


def convergence_errors(config, targets):
    """Per seed, the absolute errors of the four checked statistics."""
    out = []
    for res in simulate(config):
        c = res.counts
        est = {
            "gamma1": gamma_hat(c)[0],
            "N1_frac": c.N_1 / c.N,
            "m11_rate": cond_rate(c, 1, 1),
            "m12_rate": cond_rate(c, 1, 2),
        }
        out.append({k: abs(est[k] - targets[k]) for k in TOLS})
    return out


def passing(errors, scale=1.0):
    return sum(all(e[k] <= TOLS[k] * scale for k in TOLS) for e in errors)


def worst(errors):
    return ", ".join(f"{k} max err {max(e[k] for e in errors):.5f}" for k in TOLS)


def test_criterion_1_exact_identity():
    rng = np.random.default_rng(20240101)
    t0 = time.perf_counter()
    triples = 0
    bad = 0
    for model in random_models(rng, 1000):
        n = int(rng.integers(1, 10**4 + 1))
        seed = int(rng.integers(0, 2**63))
        measured = apply_chain(gen_iid(model, n, SeedSpec(seed)))
        counts = accumulate(measured)
        # recount straight from the columns
        for j in (1, 2):
            hit = lambda arr: arr == j - 1
            n_r = [int(np.sum((measured.a_outcome == r - 1) & hit(measured.original_c))) for r in (1, 2)]
            m_r = [int(np.sum((measured.a_outcome == r - 1) & hit(measured.final_c))) for r in (1, 2)]
            assert [counts.n(j, 1), counts.n(j, 2)] == n_r and [counts.m(j, 1), counts.m(j, 2)] == m_r
            q = Fraction(sum(n_r), n)
            g = Fraction((n_r[0] - m_r[0]) + (n_r[1] - m_r[1]), n)
            bad += q != Fraction(m_r[0], n) + Fraction(m_r[1], n) + g
            bad += sum(n_r) != m_r[0] + m_r[1] + (n_r[0] - m_r[0]) + (n_r[1] - m_r[1])
        triples += 1
    elapsed = time.perf_counter() - t0
    report(1, bad == 0 and triples >= 1000 and elapsed < 60, f"{triples} triples, {bad} violations, {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_2_convergence():
    t0 = time.perf_counter()
    config = RunConfig(model=m0(), n=N_BIG, seeds=SEEDS, checkpoints=[N_BIG])
    errors = convergence_errors(config, {"gamma1": 0.2, "N1_frac": 0.5, "m11_rate": 0.8, "m12_rate": 0.2})
    elapsed = time.perf_counter() - t0
    k = passing(errors)
    report(2, k >= NEED and elapsed < 120, f"{k}/20 seeds within tolerance; {worst(errors)}; {elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_3_classical_reduction():
    t0 = time.perf_counter()
    rng = np.random.default_rng(7)
    worst_gamma = 0.0
    for _ in range(50):
        pa, pc, t = float(np.clip(rng.random(), 1e-3, 1 - 1e-3)), float(rng.random()), float(rng.random())
        pb, ph = classical_design(pa, pc, t)
        worst_gamma = max(worst_gamma, abs(gamma_analytic(independent_model(pa, pc, pb, ph))[0]))
    pb, ph = classical_design(0.3, 0.5, 0.4)
    model = independent_model(0.3, 0.5, pb, ph)
    config = RunConfig(model=model, n=N_BIG, seeds=SEEDS, checkpoints=[N_BIG])
    errs = [abs(gamma_hat(r.counts)[0]) for r in simulate(config)]
    k = sum(e <= 0.01 for e in errs)
    elapsed = time.perf_counter() - t0
    ok = worst_gamma <= 1e-12 and k >= NEED and elapsed < 120
    report(3, ok, f"max |gamma_1| {worst_gamma:.1e} over 50 designs; {k}/20 seeds |gamma_hat| <= 0.01, max {max(errs):.5f}; {elapsed:.1f}s")


def test_criterion_4_regime_biconditionals():
    t0 = time.perf_counter()
    points = mismatches = 0
    for pa, pc, pb, ph, le, sg, ge, dl in regime_grid():
        r = regime_equivalences(float(pa), float(pc), float(pb), float(ph))
        points += 1
        if (r.lam_le_1, r.sum_ge_sqrt_pc, r.lam_ge_minus_1, r.absdiff_le_sqrt_pc) != (le, sg, ge, dl) or not r.passed:
            mismatches += 1
        # the equivalences themselves, decided exactly
        if le != sg or ge != dl:
            mismatches += 1
    elapsed = time.perf_counter() - t0
    report(4, mismatches == 0 and elapsed < 60, f"{points} grid points, {mismatches} mismatches, {elapsed:.1f}s")


def test_criterion_5_perturbation_interval():
    iv = perturbation_interval(0.9, 0.5)
    ok_iv = iv.lo == pytest.approx(0.3125, abs=1e-12) and iv.hi == 1.0 and iv.raw_hi == pytest.approx(1.25, abs=1e-12)

    def lam(x):
        return lambda_theta(independent_model(0.9, 0.5, x, x)).lam[0]

    inside = np.linspace(iv.lo, iv.hi, 402)[1:-1]
    outside = np.linspace(0.0, iv.lo, 402)[1:-1]
    n_in = sum(abs(lam(x)) <= 1 for x in inside)
    n_out = sum(abs(lam(x)) > 1 for x in outside)
    ok = ok_iv and n_in == 400 and n_out == 400
    report(5, ok, f"interval [{iv.lo}, {iv.hi}] raw upper {iv.raw_hi}; {n_in}/400 interior, {n_out}/400 exterior")


def _random_10k():
    return list(random_models(np.random.default_rng(99), 10**4))


def test_criterion_6_gamma_sum_and_bound():
    worst_sum = worst_abs = 0.0
    for model in _random_10k():
        g1, g2 = gamma_analytic(model)
        worst_sum = max(worst_sum, abs(g1 + g2))
        worst_abs = max(worst_abs, abs(g1), abs(g2))
    ok = worst_sum <= 1e-12 and worst_abs <= 1.0 + 1e-12
    report(6, ok, f"max |gamma_1 + gamma_2| {worst_sum:.1e}, max |gamma_j| {worst_abs:.4f}")


def test_criterion_7_round_trip():
    count = 0
    worst_err = 0.0
    for model in _random_10k():
        rep = lambda_theta(model)
        if rep.regime[0] != TRIGONOMETRIC:
            continue
        v = tpf_eval(model.cbar_given_a1.p(1), model.chat_given_a2.p(1), model.p_a1, model.p_a2, rep.theta[0])
        worst_err = max(worst_err, abs(v.value - marginal_c(model)[0]))
        count += 1
    report(7, count > 0 and worst_err <= 1e-12, f"{count} trigonometric models, max error {worst_err:.1e}")


@pytest.mark.slow
def test_criterion_8_pairwise_xor():
    config = RunConfig(model=ModelSpec.symmetric(), n=N_BIG, seeds=SEEDS, checkpoints=[N_BIG], generator="pairwise_xor")
    errors = convergence_errors(config, {"gamma1": 0.0, "N1_frac": 0.5, "m11_rate": 0.5, "m12_rate": 0.5})
    k = passing(errors)
    witness_fail = 0
    for seed in SEEDS:
        ens = gen_pairwise_xor(N_BIG, SeedSpec(seed))
        full = 3 * (len(ens) // 3)
        for col in (ens.a, ens.c, ens.cbar, ens.chat):
            tiles = col[:full].reshape(-1, 3)
            witness_fail += int(np.count_nonzero(tiles[:, 0] ^ tiles[:, 1] ^ tiles[:, 2]))
    ok = k >= NEED and witness_fail == 0
    report(8, ok, f"{k}/20 seeds within tolerance; {worst(errors)}; {witness_fail} tiles break the XOR witness")


@pytest.mark.slow
def test_criterion_9_fault_robustness():
    config = RunConfig(model=m0(), n=N_BIG, seeds=SEEDS, checkpoints=[N_BIG], fault_schedule="squares")
    errors = convergence_errors(config, {"gamma1": 0.2, "N1_frac": 0.5, "m11_rate": 0.8, "m12_rate": 0.2})
    k = passing(errors, scale=2.0)
    report(9, k >= NEED, f"{k}/20 seeds within 2x tolerance with {math.isqrt(N_BIG)} faults per run; {worst(errors)}")


def test_criterion_10_determinism(tmp_path):
    def run(out):
        config = RunConfig(
            model=m0(), n=200_000, seeds=[0, 1, 2], tilde_n=50_000, out_dir=out, dump_samples=True,
            fault_schedule="squares",
        )
        cmd_simulate(config)
        return {p.name: p.read_bytes() for p in sorted(out.iterdir())}

    first, second = run(tmp_path / "a"), run(tmp_path / "b")
    same = first.keys() == second.keys() and all(first[k] == second[k] for k in first)
    json.loads(first["summary.json"])
    report(10, same, f"{len(first)} files compared, {'identical' if same else 'differ'}")
