"""Seeded simulation runs: generate, measure, accumulate, trace, check."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import IO, Any, Iterator

from .config import RunConfig
from .ensemble import SeedSpec, iter_iid, iter_pairwise_xor
from .estimators import Accumulator, FrequencyCounts, cond_freq, gamma_hat, p_c_hat, trace_row
from .interference import gamma_analytic
from .measurement import FaultSchedule, MeasuredEnsemble, apply_chain, apply_mc_only, write_measured
from .prob_core import ModelSpec, marginal_c

MAIN_STREAM = 0
TILDE_STREAM = 1


def _blocks(model: ModelSpec, generator: str, n: int, seed: SeedSpec):
    if generator == "pairwise_xor":
        return iter_pairwise_xor(n, seed)
    return iter_iid(model, n, seed)


def measured_stream(
    model: ModelSpec, n: int, seed: SeedSpec, generator: str = "iid", faults: FaultSchedule | None = None
) -> Iterator[MeasuredEnsemble]:
    faults = faults or FaultSchedule("none")
    for block in _blocks(model, generator, n, seed):
        yield apply_chain(block, faults)


def gamma_step_variance(model: ModelSpec) -> float:
    """Variance of one summand of gamma_1N, i.e. of
    I(c = c_1) - I(a = a_1, cbar = c_1) - I(a = a_2, chat = c_1),
    with c, cbar, chat conditionally independent given a (as generated)."""
    p_a1 = model.a_law.p_1
    c1, c2 = model.c_given_a1.p_c1_given, model.c_given_a2.p_c1_given
    pb, ph = model.cbar_given_a1.p_c1_given, model.chat_given_a2.p_c1_given
    second_moment = p_a1 * (c1 + pb - 2 * c1 * pb) + (1 - p_a1) * (c2 + ph - 2 * c2 * ph)
    return max(second_moment - gamma_analytic(model)[0] ** 2, 0.0)


def targets_and_sigmas(model: ModelSpec, counts: FrequencyCounts) -> dict[str, tuple[float, float | None]]:
    """Analytic target and one-sigma width for each checked statistic at the counts' sizes."""
    p_a1 = model.a_law.p_1
    p_c1 = marginal_c(model)[0]
    N = counts.N

    def binom(p: float, size: float) -> float | None:
        return math.sqrt(p * (1 - p) / size) if size > 0 else None

    out = {
        "N1_frac": (p_a1, binom(p_a1, N)),
        "q1": (p_c1, binom(p_c1, N)),
        "m11_rate": (model.cbar_given_a1.p_c1_given, binom(model.cbar_given_a1.p_c1_given, N * p_a1)),
        "m12_rate": (model.chat_given_a2.p_c1_given, binom(model.chat_given_a2.p_c1_given, N * (1 - p_a1))),
        "gamma1_hat": (gamma_analytic(model)[0], math.sqrt(gamma_step_variance(model) / N) if N else None),
    }
    if counts.tilde_N:
        out["p1c_hat"] = (p_c1, binom(p_c1, counts.tilde_N))
    return out


def estimates(counts: FrequencyCounts) -> dict[str, float | None]:
    rates = cond_freq(counts)
    out: dict[str, float | None] = {
        "N1_frac": counts.N1_frac if counts.N else None,
        "q1": counts.q(1) if counts.N else None,
        "m11_rate": rates[(1, 1)],
        "m12_rate": rates[(1, 2)],
        "gamma1_hat": gamma_hat(counts)[0] if counts.N else None,
    }
    if counts.tilde_N:
        out["p1c_hat"] = p_c_hat(counts)[0]
    return out


@dataclass
class SeedResult:
    seed: int
    counts: FrequencyCounts
    rows: list[dict[str, Any]]
    checked: bool
    checks: dict[str, dict[str, Any]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks.values())

    def summary(self) -> dict[str, Any]:
        rates = cond_freq(self.counts)
        return {
            "seed": self.seed,
            "counts": self.counts.as_dict(),
            "N1_frac": self.counts.N1_frac if self.counts.N else None,
            "gamma_hat": list(gamma_hat(self.counts)) if self.counts.N else [None, None],
            "p_hat": {f"{j}{r}": rates[(j, r)] for r in (1, 2) for j in (1, 2)},
            "p_c_hat": list(p_c_hat(self.counts)) if self.counts.tilde_N else None,
            "checked": self.checked,
            "checks": self.checks,
            "pass": self.passed,
        }


def check_counts(config: RunConfig, counts: FrequencyCounts) -> tuple[bool, dict[str, dict[str, Any]]]:
    if counts.N < config.min_check_n:
        return False, {}
    est = estimates(counts)
    checks = {}
    for stat, (target, sigma) in targets_and_sigmas(config.model, counts).items():
        if stat in config.tolerance:
            tol = config.tolerance[stat]
        else:
            tol = config.tolerance_sigma * (sigma or 0.0)
        tol = max(tol * config.tolerance_scale, 1e-12)
        value = est.get(stat)
        err = None if value is None else abs(value - target)
        checks[stat] = {
            "estimate": value,
            "target": target,
            "abs_err": err,
            "tolerance": tol,
            "pass": err is not None and err <= tol,
        }
    return True, checks


def simulate_seed(config: RunConfig, seed: int, dump: IO[str] | None = None) -> SeedResult:
    model = config.model
    faults = FaultSchedule(config.fault_schedule)
    checkpoints = config.resolved_checkpoints()
    acc = Accumulator()
    snaps: list[FrequencyCounts] = []
    first = True
    for block in measured_stream(model, config.n, SeedSpec(seed, MAIN_STREAM), config.generator, faults):
        if dump is not None:
            write_measured(dump, block, header=first)
            first = False
        snaps.extend(acc.consume(block, checkpoints))
    if config.tilde_n:
        for block in _blocks(model, config.generator, config.tilde_n, SeedSpec(seed, TILDE_STREAM)):
            acc.add_tilde(apply_mc_only(block))
    final = acc.snapshot()
    rows = [trace_row(s, model) for s in snaps]
    checked, checks = check_counts(config, final)
    return SeedResult(seed, final, rows, checked, checks)


def simulate(config: RunConfig, dumps: dict[int, IO[str]] | None = None) -> list[SeedResult]:
    """Run every seed; results are in seed order whatever ``config.workers`` is."""
    dumps = dumps or {}
    if config.workers > 1 and len(config.seeds) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            return list(pool.map(lambda s: simulate_seed(config, s, dumps.get(s)), config.seeds))
    return [simulate_seed(config, s, dumps.get(s)) for s in config.seeds]
