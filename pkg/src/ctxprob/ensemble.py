"""Seeded generators for the latent ensemble (a, c, cbar, chat) per system.

Randomness comes from counter-based Philox streams. A stream is keyed by
(master_seed, stream_id) and cut into fixed-size blocks; block ``b`` has its
own key derived from (master_seed, stream_id, b). Output therefore never
depends on how a caller chunks the sequence, and the first ``n`` records of a
run of length ``n' > n`` are exactly the records of a run of length ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterable, Iterator, NamedTuple

import numpy as np

from .errors import EmptyInput
from .prob_core import ModelSpec, validate

BLOCK = 1 << 16
# pairwise blocks must hold whole tiles of 3
XOR_TILES_PER_BLOCK = BLOCK // 3
XOR_BLOCK = 3 * XOR_TILES_PER_BLOCK

RECORD_COLUMNS = ("index", "a", "c", "cbar", "chat")

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        if self.stream_id < 0:
            raise ValueError("stream_id must be non-negative")

    def block_rng(self, block: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            entropy=int(self.master_seed) & _MASK64,
            spawn_key=(int(self.stream_id), int(block)),
        )
        return np.random.Generator(np.random.Philox(ss))


class SystemRecord(NamedTuple):
    """One system before measurement. Values are 0/1 codes (0 = first label)."""

    index: int
    a_val: int
    c_val: int
    cbar_val: int
    chat_val: int


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Column-oriented block of consecutive SystemRecords.

    ``start`` is the 1-based index of the first record. Arrays hold uint8
    codes and have equal length.
    """

    start: int
    a: np.ndarray
    c: np.ndarray
    cbar: np.ndarray
    chat: np.ndarray
    model: ModelSpec | None = None

    def __len__(self) -> int:
        return int(self.a.shape[0])

    @property
    def stop(self) -> int:
        """1-based index one past the last record."""
        return self.start + len(self)

    @property
    def index(self) -> np.ndarray:
        return np.arange(self.start, self.stop, dtype=np.int64)

    def __iter__(self) -> Iterator[SystemRecord]:
        for offset in range(len(self)):
            yield self.record(offset)

    def record(self, offset: int) -> SystemRecord:
        return SystemRecord(
            self.start + offset,
            int(self.a[offset]),
            int(self.c[offset]),
            int(self.cbar[offset]),
            int(self.chat[offset]),
        )

    def slice(self, lo: int, hi: int) -> "Ensemble":
        """Sub-block by 0-based offsets."""
        return Ensemble(
            self.start + lo, self.a[lo:hi], self.c[lo:hi], self.cbar[lo:hi], self.chat[lo:hi], self.model
        )

    def permuted(self, perm: np.ndarray) -> "Ensemble":
        """Records reordered by ``perm`` and re-indexed from ``start``."""
        return Ensemble(self.start, self.a[perm], self.c[perm], self.cbar[perm], self.chat[perm], self.model)

    @classmethod
    def from_records(cls, records: Iterable[SystemRecord | tuple], model: ModelSpec | None = None) -> "Ensemble":
        rows = [tuple(r) for r in records]
        if not rows:
            raise EmptyInput("no records")
        arr = np.asarray(rows, dtype=np.int64)
        if arr.ndim != 2 or arr.shape[1] != 5:
            raise ValueError("records need 5 fields: index, a, c, cbar, chat")
        idx = arr[:, 0]
        if np.any(np.diff(idx) != 1):
            raise ValueError("record indices must be consecutive")
        codes = arr[:, 1:]
        if np.any((codes != 0) & (codes != 1)):
            raise ValueError("record values must be 0/1 codes")
        codes = codes.astype(np.uint8)
        return cls(int(idx[0]), codes[:, 0], codes[:, 1], codes[:, 2], codes[:, 3], model)

    @classmethod
    def concat(cls, blocks: Iterable["Ensemble"]) -> "Ensemble":
        blocks = list(blocks)
        if not blocks:
            raise EmptyInput("no blocks")
        for prev, nxt in zip(blocks, blocks[1:]):
            if prev.stop != nxt.start:
                raise ValueError("blocks are not contiguous")
        return cls(
            blocks[0].start,
            np.concatenate([b.a for b in blocks]),
            np.concatenate([b.c for b in blocks]),
            np.concatenate([b.cbar for b in blocks]),
            np.concatenate([b.chat for b in blocks]),
            blocks[0].model,
        )


def as_ensemble(records: Ensemble | Iterable[SystemRecord]) -> Ensemble:
    if isinstance(records, Ensemble):
        if len(records) == 0:
            raise EmptyInput("empty ensemble")
        return records
    return Ensemble.from_records(records)


def _iid_block(model: ModelSpec, rng: np.random.Generator, start: int, m: int) -> Ensemble:
    # record-major so a short final block is a prefix of a full one
    u = rng.random((m, 4)).T
    a = (u[0] >= model.a_law.p_1).astype(np.uint8)
    on_a1 = a == 0

    def draw(row: np.ndarray, given_a1: float, given_a2: float) -> np.ndarray:
        p = np.where(on_a1, given_a1, given_a2)
        return (row >= p).astype(np.uint8)

    c = draw(u[1], model.c_given_a1.p_c1_given, model.c_given_a2.p_c1_given)
    cbar = draw(u[2], model.cbar_given_a1.p_c1_given, model.cbar_given_a2.p_c1_given)
    chat = draw(u[3], model.chat_given_a1.p_c1_given, model.chat_given_a2.p_c1_given)
    return Ensemble(start, a, c, cbar, chat, model)


def iter_iid(model: ModelSpec, n: int, seed: SeedSpec) -> Iterator[Ensemble]:
    """Stream ``gen_iid`` output in blocks of at most ``BLOCK`` records."""
    model = validate(model)
    if n < 1:
        raise ValueError("n must be >= 1")
    for block, lo in enumerate(range(0, n, BLOCK)):
        m = min(BLOCK, n - lo)
        yield _iid_block(model, seed.block_rng(block), lo + 1, m)


def gen_iid(model: ModelSpec, n: int, seed: SeedSpec) -> Ensemble:
    """n i.i.d. systems: a from the a-law, then c, cbar, chat given a."""
    return Ensemble.concat(iter_iid(model, n, seed))


def iter_pairwise_xor(n: int, seed: SeedSpec) -> Iterator[Ensemble]:
    if n < 1:
        raise ValueError("n must be >= 1")
    model = ModelSpec.symmetric()
    for block, lo in enumerate(range(0, n, XOR_BLOCK)):
        m = min(XOR_BLOCK, n - lo)
        tiles = -(-m // 3)
        bits = seed.block_rng(block).integers(0, 2, size=(tiles, 4, 2), dtype=np.uint8)
        tile = np.stack([bits[..., 0], bits[..., 1], bits[..., 0] ^ bits[..., 1]], axis=-1)
        cols = tile.transpose(1, 0, 2).reshape(4, 3 * tiles)[:, :m]
        yield Ensemble(lo + 1, cols[0].copy(), cols[1].copy(), cols[2].copy(), cols[3].copy(), model)


def gen_pairwise_xor(n: int, seed: SeedSpec) -> Ensemble:
    """Fair bits that are pairwise but not mutually independent across indices.

    Records come in tiles of three. Per tile and per coordinate two fresh
    fair bits b1, b2 give the three values (b1, b2, b1 ^ b2), so any two
    indices are independent while the XOR over a tile is always 0. A trailing
    partial tile is truncated.
    """
    return Ensemble.concat(iter_pairwise_xor(n, seed))


def write_records(fh: IO[str], ensemble: Ensemble, header: bool = True, delimiter: str = ",") -> None:
    """Raw dump, one record per line: index, a, c, cbar, chat as 0/1 codes."""
    if header:
        fh.write(delimiter.join(RECORD_COLUMNS) + "\n")
    for rec in ensemble:
        fh.write(delimiter.join(str(v) for v in rec) + "\n")
