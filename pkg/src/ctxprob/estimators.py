"""Frequency statistics of the measured ensemble.

Counts are kept as exact integers and turned into rates only on read-out, so
the finite-N decomposition

    q_jN = m_j1/N + m_j2/N + gamma_jN

holds exactly (see :func:`decomposition`).

Indexing follows the usual convention: ``n_jr`` counts original c-values
equal to c_j among non-faulted systems on branch r (r=1: a = a_1, r=2:
a = a_2); ``m_jr`` counts the measured, replaced values the same way.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import EmptyInput, MissingTilde, UndefinedRate
from .interference import gamma_analytic
from .measurement import MeasuredEnsemble
from .prob_core import ModelSpec


@dataclass(frozen=True)
class FrequencyCounts:
    """Immutable snapshot of the counters after the first ``n_seen`` systems."""

    n_seen: int
    N: int
    N_1: int
    N_2: int
    n_11: int
    n_21: int
    n_12: int
    n_22: int
    m_11: int
    m_21: int
    m_12: int
    m_22: int
    tilde_N: int | None = None
    tilde_c1: int | None = None

    def __post_init__(self) -> None:
        if self.N_1 + self.N_2 != self.N:
            raise ValueError("N_1 + N_2 != N")
        for r, N_r in ((1, self.N_1), (2, self.N_2)):
            if self.n(1, r) + self.n(2, r) != N_r or self.m(1, r) + self.m(2, r) != N_r:
                raise ValueError(f"branch {r} counts do not sum to N_{r}")

    def n(self, j: int, r: int) -> int:
        return getattr(self, f"n_{j}{r}")

    def m(self, j: int, r: int) -> int:
        return getattr(self, f"m_{j}{r}")

    def N_r(self, r: int) -> int:
        return self.N_1 if r == 1 else self.N_2

    def q(self, j: int) -> float:
        """q_jN: frequency of c_j among the original (latent) c-values."""
        if self.N == 0:
            raise UndefinedRate("N = 0: every system so far was faulted")
        return (self.n(j, 1) + self.n(j, 2)) / self.N

    @property
    def N1_frac(self) -> float:
        if self.N == 0:
            raise UndefinedRate("N = 0: every system so far was faulted")
        return self.N_1 / self.N

    def as_dict(self) -> dict[str, int | None]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


_COUNT_NAMES = ("N_1", "N_2", "n_11", "n_21", "n_12", "n_22", "m_11", "m_21", "m_12", "m_22")


def _block_counts(block: MeasuredEnsemble) -> np.ndarray:
    """Counter increments for one block, ordered as _COUNT_NAMES."""
    on1 = block.a_outcome == 0
    on2 = block.a_outcome == 1
    c1 = block.source.c == 0
    f1 = block.final_c == 0
    N_1 = int(np.count_nonzero(on1))
    N_2 = int(np.count_nonzero(on2))
    n_11 = int(np.count_nonzero(on1 & c1))
    n_12 = int(np.count_nonzero(on2 & c1))
    m_11 = int(np.count_nonzero(on1 & f1))
    m_12 = int(np.count_nonzero(on2 & f1))
    return np.array(
        [N_1, N_2, n_11, N_1 - n_11, n_12, N_2 - n_12, m_11, N_1 - m_11, m_12, N_2 - m_12], dtype=np.int64
    )


class Accumulator:
    """Single-writer streaming counter over consecutive measured blocks."""

    def __init__(self) -> None:
        self._counts = np.zeros(len(_COUNT_NAMES), dtype=np.int64)
        self._n_seen = 0
        self._tilde_N: int | None = None
        self._tilde_c1: int | None = None

    @property
    def n_seen(self) -> int:
        return self._n_seen

    def update(self, block: MeasuredEnsemble) -> None:
        if block.start != self._n_seen + 1:
            raise ValueError(f"block starts at {block.start}, expected {self._n_seen + 1}")
        self._counts += _block_counts(block)
        self._n_seen = block.stop - 1

    def consume(self, block: MeasuredEnsemble, checkpoints: Sequence[int]) -> list[FrequencyCounts]:
        """Update with ``block``, returning snapshots at checkpoints it covers."""
        out = []
        offset = 0
        for cp in checkpoints:
            if self._n_seen < cp < block.stop:
                cut = cp - block.start + 1
                self.update(block.slice(offset, cut))
                offset = cut
                out.append(self.snapshot())
        if offset < len(block):
            self.update(block.slice(offset, len(block)))
        return out

    def add_tilde(self, outcomes: Iterable[int] | np.ndarray) -> None:
        arr = np.asarray(outcomes if isinstance(outcomes, np.ndarray) else list(outcomes))
        self._tilde_N = (self._tilde_N or 0) + int(arr.size)
        self._tilde_c1 = (self._tilde_c1 or 0) + int(np.count_nonzero(arr == 0))

    def snapshot(self) -> FrequencyCounts:
        counts = dict(zip(_COUNT_NAMES, (int(v) for v in self._counts)))
        return FrequencyCounts(
            n_seen=self._n_seen,
            N=counts["N_1"] + counts["N_2"],
            tilde_N=self._tilde_N,
            tilde_c1=self._tilde_c1,
            **counts,
        )


def _blocks(ensemble: MeasuredEnsemble | Iterable[MeasuredEnsemble]) -> Iterator[MeasuredEnsemble]:
    if isinstance(ensemble, MeasuredEnsemble):
        yield ensemble
    else:
        yield from ensemble


def accumulate(
    ensemble: MeasuredEnsemble | Iterable[MeasuredEnsemble],
    tilde_outcomes: Iterable[int] | np.ndarray | None = None,
) -> FrequencyCounts:
    """Count everything in one pass. ``ensemble`` may be a stream of blocks."""
    acc = Accumulator()
    for block in _blocks(ensemble):
        acc.update(block)
    if acc.n_seen == 0:
        raise EmptyInput("empty measured ensemble")
    if tilde_outcomes is not None:
        acc.add_tilde(tilde_outcomes)
    return acc.snapshot()


def decomposition(counts: FrequencyCounts, j: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Exact (q_jN, m_j1/N, m_j2/N, gamma_jN) as fractions over N."""
    N = counts.N
    if N == 0:
        raise UndefinedRate("N = 0")
    n1, n2, m1, m2 = counts.n(j, 1), counts.n(j, 2), counts.m(j, 1), counts.m(j, 2)
    return (
        Fraction(n1 + n2, N),
        Fraction(m1, N),
        Fraction(m2, N),
        Fraction((n1 - m1) + (n2 - m2), N),
    )


def gamma_hat(counts: FrequencyCounts) -> tuple[float, float]:
    """(gamma_1N, gamma_2N), each a single division of an integer by N."""
    N = counts.N
    if N == 0:
        raise UndefinedRate("N = 0")
    return tuple(
        ((counts.n(j, 1) - counts.m(j, 1)) + (counts.n(j, 2) - counts.m(j, 2))) / N for j in (1, 2)
    )


def cond_rate(counts: FrequencyCounts, j: int, r: int) -> float:
    """m_jr / N_r; raises UndefinedRate on an empty branch."""
    N_r = counts.N_r(r)
    if N_r == 0:
        raise UndefinedRate(f"N_{r} = 0: conditional rate for branch {r} is undefined")
    return counts.m(j, r) / N_r


def cond_freq(counts: FrequencyCounts, r: int | None = None) -> dict[tuple[int, int], float | None]:
    """Conditional relative frequencies m_jr / N_r keyed by (j, r).

    With ``r`` given, only that branch is returned and an empty branch raises
    UndefinedRate. Without it, both branches are returned and an empty branch
    maps to None.
    """
    if r is not None:
        return {(j, r): cond_rate(counts, j, r) for j in (1, 2)}
    out: dict[tuple[int, int], float | None] = {}
    for rr in (1, 2):
        for j in (1, 2):
            out[(j, rr)] = counts.m(j, rr) / counts.N_r(rr) if counts.N_r(rr) else None
    return out


def p_c_hat(counts: FrequencyCounts) -> tuple[float, float]:
    """Estimate of (p_1^c, p_2^c) from the auxiliary M_C-only ensemble."""
    if not counts.tilde_N:
        raise MissingTilde("no auxiliary ensemble was accumulated")
    p1 = counts.tilde_c1 / counts.tilde_N
    return p1, (counts.tilde_N - counts.tilde_c1) / counts.tilde_N


# ---------------------------------------------------------------------------
# convergence traces

TRACE_COLUMNS = (
    "N",
    "N1_frac",
    "q1",
    "q2",
    "m11_rate",
    "m21_rate",
    "m12_rate",
    "m22_rate",
    "gamma1_hat",
    "gamma2_hat",
    "gamma1_true",
    "gamma2_true",
    "abs_err1",
    "abs_err2",
)


def default_checkpoints(n: int) -> list[int]:
    """Powers of ten below n, then n itself."""
    cps = []
    p = 1
    while p < n:
        cps.append(p)
        p *= 10
    return cps + [n]


def trace_row(counts: FrequencyCounts, model: ModelSpec | None = None) -> dict[str, float | int | None]:
    row: dict[str, float | int | None] = dict.fromkeys(TRACE_COLUMNS)
    row["N"] = counts.n_seen
    if counts.N:
        row["N1_frac"] = counts.N1_frac
        row["q1"], row["q2"] = counts.q(1), counts.q(2)
        row["gamma1_hat"], row["gamma2_hat"] = gamma_hat(counts)
    for (j, r), rate in cond_freq(counts).items():
        row[f"m{j}{r}_rate"] = rate
    if model is not None:
        g1, g2 = gamma_analytic(model)
        row["gamma1_true"], row["gamma2_true"] = g1, g2
        if counts.N:
            row["abs_err1"] = abs(row["gamma1_hat"] - g1)
            row["abs_err2"] = abs(row["gamma2_hat"] - g2)
    return row


def snapshots(
    ensemble: MeasuredEnsemble | Iterable[MeasuredEnsemble], checkpoints: Sequence[int]
) -> list[FrequencyCounts]:
    """Prefix snapshots at each checkpoint (1-based system labels)."""
    checkpoints = list(checkpoints)
    if any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("checkpoints must be strictly increasing")
    if checkpoints and checkpoints[0] < 1:
        raise ValueError("checkpoints must be >= 1")
    acc = Accumulator()
    out: list[FrequencyCounts] = []
    for block in _blocks(ensemble):
        out.extend(acc.consume(block, checkpoints))
    if acc.n_seen == 0:
        raise EmptyInput("empty measured ensemble")
    beyond = [cp for cp in checkpoints if cp > acc.n_seen]
    if beyond:
        raise ValueError(f"checkpoints {beyond} exceed ensemble length {acc.n_seen}")
    return out


def trace(
    ensemble: MeasuredEnsemble | Iterable[MeasuredEnsemble],
    checkpoints: Sequence[int],
    model: ModelSpec | None = None,
) -> list[dict[str, float | int | None]]:
    """One row per checkpoint with the columns of TRACE_COLUMNS.

    Undefined entries (empty branch, all-faulted prefix, unknown model) are None.
    """
    return [trace_row(s, model) for s in snapshots(ensemble, checkpoints)]
