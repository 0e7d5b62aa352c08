"""Cross-entropy-difference ranking and pseudo in-domain selection.

Out-of-domain sentences are scored by the difference between their
cross-entropy under an in-domain and an out-of-domain language model;
the lowest-scoring sentences form the pseudo in-domain corpus.  Also
provides the size-matched random subsampling used to build the
out-of-domain model's training set.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from adaptmt.corpus import Corpus, Sentence
from adaptmt.ngram_lm import NGramLM, cross_entropy

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredSentence:
    """A sentence with its cross-entropy scores and stable corpus index."""

    index: int
    sentence: Sentence
    ce_in: float
    ce_out: float
    ced: float

    @classmethod
    def from_scores(cls, index: int, sentence: Sentence, ce_in: float, ce_out: float):
        return cls(index=index, sentence=sentence, ce_in=ce_in, ce_out=ce_out,
                   ced=ce_in - ce_out)


def ced_score(in_lm: NGramLM, out_lm: NGramLM, corpus: Corpus) -> list[ScoredSentence]:
    """Score every sentence under both models, preserving corpus order."""
    if len(corpus) == 0:
        raise ValueError("cannot score an empty corpus")
    scored = []
    for index, sentence in enumerate(corpus.sentences):
        ce_in = cross_entropy(in_lm, sentence)
        ce_out = cross_entropy(out_lm, sentence)
        scored.append(ScoredSentence.from_scores(index, sentence, ce_in, ce_out))
    return scored


def select_lowest_k(scored: Sequence[ScoredSentence], k: int) -> list[ScoredSentence]:
    """The k lowest-scoring sentences, sorted ascending by (ced, index).

    Ties break to the smaller original index.  Asking for more than is
    available returns everything with a warning.
    """
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k > len(scored):
        log.warning(
            "requested k=%d exceeds %d scored sentences; selecting all", k, len(scored)
        )
    ranked = sorted(scored, key=lambda s: (s.ced, s.index))
    return ranked[:k]


def size_matched_subsample(corpus: Corpus, target_size: int, seed: int) -> Corpus:
    """Uniform sample without replacement, original relative order kept.

    Deterministic for a given seed; a target at or above the corpus size
    returns the corpus unchanged.
    """
    if target_size < 0:
        raise ValueError(f"target_size must be >= 0, got {target_size}")
    n = len(corpus)
    if target_size >= n:
        return corpus
    rng = random.Random(seed)
    keep = sorted(rng.sample(range(n), target_size))
    return Corpus(
        language=corpus.language,
        domain=corpus.domain,
        sentences=tuple(corpus.sentences[i] for i in keep),
        source_path=corpus.source_path,
        blank_lines=corpus.blank_lines,
    )


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def save_scores(scored: Sequence[ScoredSentence], path: str | Path) -> None:
    """Tab-separated lines: index, ced, ce_in, ce_out, raw sentence."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for s in scored:
            handle.write(
                f"{s.index}\t{s.ced!r}\t{s.ce_in!r}\t{s.ce_out!r}\t{s.sentence.raw}\n"
            )


def load_scores(path: str | Path) -> list[ScoredSentence]:
    scored = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.rstrip("\n").split("\t", 4)
            if len(parts) != 5:
                raise ValueError(f"{path}: malformed score line {lineno}")
            index, ced, ce_in, ce_out, raw = parts
            scored.append(
                ScoredSentence(
                    index=int(index),
                    sentence=Sentence.from_raw(raw),
                    ce_in=float(ce_in),
                    ce_out=float(ce_out),
                    ced=float(ced),
                )
            )
    return scored


def save_selection(selected: Sequence[ScoredSentence], corpus_path: str | Path,
                   index_path: str | Path) -> None:
    """Write the selected corpus plus a sidecar file of original indices."""
    with open(corpus_path, "w", encoding="utf-8", newline="\n") as handle:
        for s in selected:
            handle.write(s.sentence.raw + "\n")
    with open(index_path, "w", encoding="utf-8", newline="\n") as handle:
        for s in selected:
            handle.write(f"{s.index}\n")
