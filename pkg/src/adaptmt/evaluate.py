"""Case-sensitive 4-gram corpus BLEU and learning-curve logging.

BLEU follows the classic script behaviour: modified n-gram precisions
with per-sentence clipped counts aggregated corpus-wide, a brevity
penalty capped at 1, and no smoothing, so a zero precision at any order
zeroes the score.  Scores are meant to be computed on whitespace tokens
after BPE de-segmentation.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from adaptmt.corpus import Sentence

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuReport:
    bleu: float
    precisions: tuple[float, float, float, float]
    brevity_penalty: float
    hyp_length: int
    ref_length: int

    def format_line(self) -> str:
        """One summary line in the classic script's shape."""
        precisions = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        ratio = self.hyp_length / self.ref_length if self.ref_length else 0.0
        return (
            f"BLEU = {self.bleu:.2f}, {precisions} "
            f"(BP={self.brevity_penalty:.3f}, ratio={ratio:.3f}, "
            f"hyp_len={self.hyp_length}, ref_len={self.ref_length})"
        )


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def corpus_bleu(hypotheses: Sequence[Sentence], references: Sequence[Sentence]) -> BleuReport:
    """Corpus-level BLEU over aligned hypothesis/reference sentence lists."""
    if len(hypotheses) != len(references):
        raise ValueError(
            f"hypothesis/reference count mismatch: {len(hypotheses)} vs {len(references)}"
        )
    if not hypotheses:
        raise ValueError("cannot compute BLEU over empty lists")

    clipped = [0] * MAX_ORDER
    totals = [0] * MAX_ORDER
    hyp_length = 0
    ref_length = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_length += len(hyp.tokens)
        ref_length += len(ref.tokens)
        for n in range(1, MAX_ORDER + 1):
            hyp_counts = _ngrams(hyp.tokens, n)
            if not hyp_counts:
                continue
            ref_counts = _ngrams(ref.tokens, n)
            totals[n - 1] += sum(hyp_counts.values())
            clipped[n - 1] += sum(
                min(count, ref_counts.get(ngram, 0)) for ngram, count in hyp_counts.items()
            )

    precisions = tuple(
        clipped[n] / totals[n] if totals[n] > 0 else 0.0 for n in range(MAX_ORDER)
    )
    if hyp_length >= ref_length:
        brevity_penalty = 1.0
    else:
        brevity_penalty = math.exp(1.0 - ref_length / hyp_length)

    if min(precisions) > 0.0:
        log_mean = sum(math.log(p) for p in precisions) / MAX_ORDER
        bleu = brevity_penalty * math.exp(log_mean) * 100.0
    else:
        bleu = 0.0
    return BleuReport(
        bleu=bleu,
        precisions=precisions,
        brevity_penalty=brevity_penalty,
        hyp_length=hyp_length,
        ref_length=ref_length,
    )


# ---------------------------------------------------------------------------
# Learning-curve logging
# ---------------------------------------------------------------------------


class CurveLogger:
    """Append-only per-run metric series for learning-curve comparisons.

    Each run gets one tab-separated file (step, metric, value, timestamp)
    under the logger's directory.  Steps must be non-decreasing within a
    run; re-opening a run continues its series.  One writer per run.
    """

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._last_step: dict[str, int] = {}

    def _curve_path(self, run_id: str) -> Path:
        return self.directory / f"{run_id}.curve.tsv"

    def _resume_step(self, run_id: str) -> int | None:
        path = self._curve_path(run_id)
        if not path.exists():
            return None
        last = None
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    last = int(line.split("\t", 1)[0])
        return last

    def log(self, run_id: str, step: int, metric_name: str, value: float) -> None:
        if run_id not in self._last_step:
            resumed = self._resume_step(run_id)
            if resumed is not None:
                self._last_step[run_id] = resumed
        last = self._last_step.get(run_id)
        if last is not None and step < last:
            raise ValueError(
                f"step regression for run {run_id!r}: {step} after {last}"
            )
        timestamp = datetime.now(timezone.utc).isoformat()
        with open(self._curve_path(run_id), "a", encoding="utf-8", newline="\n") as handle:
            handle.write(f"{step}\t{metric_name}\t{value!r}\t{timestamp}\n")
        self._last_step[run_id] = step


def log_curve(directory: str | Path, run_id: str, step: int, metric_name: str,
              value: float) -> None:
    """One-shot append; prefer a CurveLogger when emitting many records."""
    CurveLogger(directory).log(run_id, step, metric_name, value)


def read_curve(path: str | Path) -> list[tuple[int, str, float, str]]:
    """Read back (step, metric, value, timestamp) records in emitted order."""
    records = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}: malformed curve record on line {lineno}")
            records.append((int(parts[0]), parts[1], float(parts[2]), parts[3]))
    return records
