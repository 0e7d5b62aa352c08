"""Batch-weighted training streams.

Interleaves in-domain and out-of-domain mini-batches in a fixed repeating
cycle of ``n_out`` out-of-domain batches followed by ``n_in`` in-domain
batches, so the out-of-domain fraction of the stream is
``n_out / (n_out + n_in)``.  Each side draws from a seeded shuffle of its
corpus and reshuffles when a pass completes, which lets a small in-domain
corpus be revisited many times while the large out-of-domain corpus is
consumed at full weight.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from adaptmt.corpus import Corpus, DomainTag, Sentence


@dataclass(frozen=True)
class BatchWeightingSchedule:
    """The (n_in, n_out) interleaving policy: counts per cycle plus batch size."""

    n_in: int
    n_out: int
    batch_size: int = 32

    def __post_init__(self):
        if self.n_in < 0 or self.n_out < 0:
            raise ValueError("n_in and n_out must be >= 0")
        if self.n_in + self.n_out < 1:
            raise ValueError("schedule needs at least one batch per cycle")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")

    @property
    def cycle_length(self) -> int:
        return self.n_in + self.n_out


def r_out(schedule: BatchWeightingSchedule) -> float:
    """Out-of-domain batch fraction of the stream."""
    total = schedule.n_out + schedule.n_in
    if total == 0:
        raise ValueError("schedule has no batches per cycle")
    return schedule.n_out / total


@dataclass(frozen=True)
class Batch:
    """One mini-batch: sentences from a single origin corpus.

    ``indices`` are the sentences' positions in the origin corpus, which is
    what stream manifests record for replay.  Every batch holds
    ``batch_size`` sentences except possibly the last batch of a pass.
    """

    sentences: tuple[Sentence, ...]
    origin: DomainTag
    ordinal: int
    indices: tuple[int, ...]


class _SideDraw:
    """Seeded shuffle-and-cycle draw over one corpus. Batches never span passes."""

    def __init__(self, corpus: Corpus, rng: random.Random):
        self.corpus = corpus
        self.rng = rng
        self.order: list[int] = []
        self.pos = 0

    def take(self, batch_size: int) -> tuple[int, ...]:
        if self.pos >= len(self.order):
            self.order = list(range(len(self.corpus)))
            self.rng.shuffle(self.order)
            self.pos = 0
        end = min(self.pos + batch_size, len(self.order))
        indices = tuple(self.order[self.pos : end])
        self.pos = end
        return indices


def build_stream(
    schedule: BatchWeightingSchedule,
    in_corpus: Corpus | None,
    out_corpus: Corpus | None,
    total_batches: int,
    seed: int = 0,
) -> Iterator[Batch]:
    """Generate the deterministic interleaved batch stream.

    A corpus may be omitted (or empty) only for a side whose per-cycle
    count is zero.  The stream is lazy and meant for a single consumer;
    the corpora themselves are shared read-only.
    """
    if total_batches < 0:
        raise ValueError(f"total_batches must be >= 0, got {total_batches}")
    if schedule.n_in > 0 and (in_corpus is None or len(in_corpus) == 0):
        raise ValueError("schedule draws in-domain batches but the in-domain corpus is empty")
    if schedule.n_out > 0 and (out_corpus is None or len(out_corpus) == 0):
        raise ValueError("schedule draws out-of-domain batches but the out-of-domain corpus is empty")

    sides = {}
    if schedule.n_in > 0:
        sides[DomainTag.IN_DOMAIN] = _SideDraw(in_corpus, random.Random(f"{seed}/in"))
    if schedule.n_out > 0:
        sides[DomainTag.OUT_OF_DOMAIN] = _SideDraw(out_corpus, random.Random(f"{seed}/out"))

    pattern = [DomainTag.OUT_OF_DOMAIN] * schedule.n_out + [DomainTag.IN_DOMAIN] * schedule.n_in

    def generate() -> Iterator[Batch]:
        for ordinal in range(total_batches):
            origin = pattern[ordinal % len(pattern)]
            side = sides[origin]
            indices = side.take(schedule.batch_size)
            yield Batch(
                sentences=tuple(side.corpus.sentences[i] for i in indices),
                origin=origin,
                ordinal=ordinal,
                indices=indices,
            )

    return generate()


# ---------------------------------------------------------------------------
# Stream manifests
# ---------------------------------------------------------------------------

_ORIGIN_CODE = {DomainTag.IN_DOMAIN: "in", DomainTag.OUT_OF_DOMAIN: "out"}
_CODE_ORIGIN = {v: k for k, v in _ORIGIN_CODE.items()}


def save_stream_manifest(batches: Sequence[Batch] | Iterator[Batch], path: str | Path) -> list[Batch]:
    """Materialize a stream as ``ordinal<TAB>origin<TAB>indices`` lines.

    Returns the batches so callers can reuse the consumed stream.
    """
    batches = list(batches)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for batch in batches:
            indices = ",".join(str(i) for i in batch.indices)
            handle.write(f"{batch.ordinal}\t{_ORIGIN_CODE[batch.origin]}\t{indices}\n")
    return batches


def load_stream_manifest(path: str | Path) -> list[tuple[int, DomainTag, tuple[int, ...]]]:
    """Read back (ordinal, origin, indices) records for replay."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 3 or parts[1] not in _CODE_ORIGIN:
                raise ValueError(f"{path}: malformed stream record on line {lineno}")
            ordinal, origin, indices = parts
            records.append(
                (
                    int(ordinal),
                    _CODE_ORIGIN[origin],
                    tuple(int(i) for i in indices.split(",") if i),
                )
            )
    return records
