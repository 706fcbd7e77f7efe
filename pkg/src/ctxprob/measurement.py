"""The measurement chain: M_A partitions systems by their a-value, the
C-characteristic is replaced (cbar on the a_1 branch, chat on the a_2 branch),
then M_C reads the replaced value. Faulted systems yield no outcome at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable

import numpy as np

from .ensemble import RECORD_COLUMNS, Ensemble, SystemRecord, as_ensemble
from .errors import EmptyInput

NO_OUTCOME = np.uint8(255)

MEASURED_COLUMNS = RECORD_COLUMNS + ("branch", "final_c", "fault")


@dataclass(frozen=True)
class FaultSchedule:
    """Deterministic rule selecting the 1-based indices whose measurement fails.

    Built-in rules: ``none`` and ``squares`` (perfect squares, so the fault
    count through N is isqrt(N) = o(N)).
    """

    rule: str = "none"

    RULES = ("none", "squares")

    def __post_init__(self) -> None:
        if self.rule not in self.RULES:
            raise ValueError(f"unknown fault rule {self.rule!r}; expected one of {self.RULES}")

    def mask(self, start: int, stop: int) -> np.ndarray:
        """Boolean fault flags for indices start .. stop-1."""
        flags = np.zeros(max(stop - start, 0), dtype=bool)
        if self.rule == "squares" and stop > start:
            lo = math.isqrt(start - 1) + 1
            hi = math.isqrt(stop - 1)
            roots = np.arange(lo, hi + 1, dtype=np.int64)
            flags[roots * roots - start] = True
        return flags

    def count(self, n: int) -> int:
        """Number of faulted indices among 1..n."""
        if self.rule == "squares":
            return math.isqrt(n)
        return 0

    def faulted(self, n: int) -> list[int]:
        return (np.flatnonzero(self.mask(1, n + 1)) + 1).tolist()


NO_FAULTS = FaultSchedule("none")


def square_fault_schedule() -> FaultSchedule:
    return FaultSchedule("squares")


def no_fault_schedule() -> FaultSchedule:
    return NO_FAULTS


@dataclass(frozen=True, eq=False)
class MeasuredEnsemble:
    """Outcomes of M_A then M_C over one contiguous block of systems.

    ``original_c`` is latent: it is not observable once M_A has acted, and is
    kept only so the exact finite-N decomposition of q_jN can be checked.
    Outcome arrays hold NO_OUTCOME at faulted indices.
    """

    source: Ensemble
    a_outcome: np.ndarray
    final_c: np.ndarray
    fault: np.ndarray

    def __len__(self) -> int:
        return len(self.source)

    @property
    def start(self) -> int:
        return self.source.start

    @property
    def stop(self) -> int:
        return self.source.stop

    @property
    def original_c(self) -> np.ndarray:
        return np.where(self.fault, NO_OUTCOME, self.source.c)

    @property
    def k_indices(self) -> np.ndarray:
        return np.flatnonzero(self.a_outcome == 0) + self.start

    @property
    def m_indices(self) -> np.ndarray:
        return np.flatnonzero(self.a_outcome == 1) + self.start

    @property
    def N_1(self) -> int:
        return int(np.count_nonzero(self.a_outcome == 0))

    @property
    def N_2(self) -> int:
        return int(np.count_nonzero(self.a_outcome == 1))

    @property
    def fault_count(self) -> int:
        return int(np.count_nonzero(self.fault))

    def slice(self, lo: int, hi: int) -> "MeasuredEnsemble":
        return MeasuredEnsemble(
            self.source.slice(lo, hi), self.a_outcome[lo:hi], self.final_c[lo:hi], self.fault[lo:hi]
        )


def apply_chain(
    records: Ensemble | Iterable[SystemRecord], faults: FaultSchedule = NO_FAULTS
) -> MeasuredEnsemble:
    """Run M_A and M_C over ``records`` with the given fault schedule."""
    ens = as_ensemble(records)
    fault = faults.mask(ens.start, ens.stop)
    final_c = np.where(ens.a == 0, ens.cbar, ens.chat).astype(np.uint8)
    a_out = np.where(fault, NO_OUTCOME, ens.a).astype(np.uint8)
    final_c = np.where(fault, NO_OUTCOME, final_c).astype(np.uint8)
    return MeasuredEnsemble(ens, a_out, final_c, fault)


def apply_mc_only(records: Ensemble | Iterable[SystemRecord]) -> np.ndarray:
    """M_C applied to fresh copies with no prior M_A: reads the original c."""
    ens = as_ensemble(records)
    if len(ens) == 0:
        raise EmptyInput("no records")
    return ens.c.copy()


def write_measured(fh: IO[str], measured: MeasuredEnsemble, header: bool = True, delimiter: str = ",") -> None:
    """Raw dump with the record columns plus branch (k/m), final_c and fault (0/1).

    Faulted rows leave branch and final_c empty.
    """
    if header:
        fh.write(delimiter.join(MEASURED_COLUMNS) + "\n")
    for offset, rec in enumerate(measured.source):
        if measured.fault[offset]:
            tail = ("", "", "1")
        else:
            branch = "k" if measured.a_outcome[offset] == 0 else "m"
            tail = (branch, str(int(measured.final_c[offset])), "0")
        fh.write(delimiter.join([*(str(v) for v in rec), *tail]) + "\n")
