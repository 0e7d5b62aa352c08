"""Interpolated Lidstone n-gram language models over subword tokens.

Per-order conditionals use additive (Lidstone) smoothing and are combined
by fixed-weight linear interpolation, which keeps every probability
strictly positive and the whole model hand-verifiable.  The closed event
space for every conditional is the training vocabulary plus ``<unk>`` and
the sentence terminator ``</s>``; out-of-vocabulary tokens are scored via
``<unk>``.

Counting convention: n-gram events end at real-token positions, with
``<s>`` padding providing left context.  The terminator is part of the
event space (so sentence endings can be scored) but carries smoothing
mass only.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from adaptmt.corpus import Corpus, Sentence

UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"

WEIGHT_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class NGramLM:
    """An order-n model: per-order count tables plus smoothing parameters.

    Immutable after construction; probability lookups are pure, so a model
    can be shared across threads and scoring parallelized per sentence.
    """

    order: int
    lidstone_alpha: float
    interpolation_weights: tuple[float, ...]
    vocab: frozenset[str]
    counts: tuple[dict, ...] = field(repr=False)  # counts[k-1]: ngram tuple -> int
    context_totals: tuple[dict, ...] = field(repr=False)  # per order: context -> int

    @property
    def event_space_size(self) -> int:
        # vocab plus <unk> and </s>; <s> is context-only.
        return len(self.vocab) + 2

    def event_space(self) -> frozenset[str]:
        return self.vocab | {UNK, EOS}

    def _map(self, token: str) -> str:
        return token if token in self.vocab else UNK

    def order_prob(self, k: int, token: str, context: tuple[str, ...]) -> float:
        """Lidstone conditional of order k given the last k-1 context tokens."""
        ctx = context[len(context) - (k - 1):] if k > 1 else ()
        count = self.counts[k - 1].get(ctx + (token,), 0)
        total = self.context_totals[k - 1].get(ctx, 0)
        alpha = self.lidstone_alpha
        return (count + alpha) / (total + alpha * self.event_space_size)

    def prob(self, token: str, context: tuple[str, ...]) -> float:
        """Interpolated conditional p(token | context).

        ``token`` must be in the event space (use ``<unk>`` for OOV);
        ``context`` holds up to order-1 previous tokens, most recent last.
        """
        mapped_ctx = tuple(
            t if (t == BOS or t in self.vocab) else UNK for t in context
        )
        return sum(
            weight * self.order_prob(k, token, mapped_ctx)
            for k, weight in enumerate(self.interpolation_weights, start=1)
        )


def _validate_params(order: int, alpha: float, weights: Sequence[float]) -> tuple[float, ...]:
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if alpha <= 0:
        raise ValueError(f"lidstone_alpha must be > 0, got {alpha}")
    weights = tuple(float(w) for w in weights)
    if len(weights) != order:
        raise ValueError(
            f"interpolation_weights must have length {order}, got {len(weights)}"
        )
    if any(w < 0 for w in weights):
        raise ValueError("interpolation_weights must be non-negative")
    if abs(sum(weights) - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ValueError(f"interpolation_weights must sum to 1, got {sum(weights)!r}")
    return weights


def train_lm(
    corpora: Sequence[Corpus],
    order: int = 4,
    lidstone_alpha: float = 0.1,
    interpolation_weights: Sequence[float] | None = None,
    map_singletons_to_unk: bool = False,
) -> NGramLM:
    """Collect n-gram counts over the concatenated corpora.

    With ``map_singletons_to_unk`` every token type occurring exactly once
    in training is rewritten to ``<unk>`` and excluded from the vocabulary;
    the default keeps the full closed vocabulary for determinism.
    """
    if interpolation_weights is None:
        interpolation_weights = (1.0 / order,) * order
    weights = _validate_params(order, lidstone_alpha, interpolation_weights)

    token_freq: Counter[str] = Counter()
    for corpus in corpora:
        for sentence in corpus.sentences:
            token_freq.update(sentence.tokens)
    if not token_freq:
        raise ValueError("empty training set: no tokens in any corpus")

    if map_singletons_to_unk:
        vocab = frozenset(t for t, c in token_freq.items() if c > 1)
    else:
        vocab = frozenset(token_freq)

    counts: tuple[dict, ...] = tuple({} for _ in range(order))
    totals: tuple[dict, ...] = tuple({} for _ in range(order))
    for corpus in corpora:
        for sentence in corpus.sentences:
            tokens = [t if t in vocab else UNK for t in sentence.tokens]
            for k in range(1, order + 1):
                padded = [BOS] * (k - 1) + tokens
                table = counts[k - 1]
                total = totals[k - 1]
                for i in range(len(tokens)):
                    ngram = tuple(padded[i : i + k])
                    table[ngram] = table.get(ngram, 0) + 1
                    ctx = ngram[:-1]
                    total[ctx] = total.get(ctx, 0) + 1

    return NGramLM(
        order=order,
        lidstone_alpha=float(lidstone_alpha),
        interpolation_weights=weights,
        vocab=vocab,
        counts=counts,
        context_totals=totals,
    )


def cross_entropy(model: NGramLM, sentence: Sentence) -> float:
    """Per-token cross-entropy in nats, terminator included.

    Returns -(1/T) sum of log p over the sentence's tokens plus ``</s>``,
    so T = token count + 1.  Always finite and strictly positive thanks to
    smoothing.
    """
    if not sentence.tokens:
        raise ValueError("cannot score an empty sentence")
    mapped = [model._map(t) for t in sentence.tokens]
    padded = [BOS] * (model.order - 1) + mapped
    targets = mapped + [EOS]
    total = 0.0
    for i, target in enumerate(targets):
        context = tuple(padded[i : i + model.order - 1])
        total -= math.log(model.prob(target, context))
    return total / len(targets)


# ---------------------------------------------------------------------------
# Persistence: ARPA-style sorted count blocks
# ---------------------------------------------------------------------------

_MAGIC = "ngram-counts-v1"


def save_lm(model: NGramLM, path: str | Path) -> None:
    """Write the model as sorted per-order count blocks.

    The layout is byte-identical across runs for the same training input:
    a header with order, alpha and weights, then one ``ngram<TAB>count``
    line per entry, sorted lexicographically within each order block.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{_MAGIC}\n")
        handle.write(f"order\t{model.order}\n")
        handle.write(f"alpha\t{model.lidstone_alpha!r}\n")
        handle.write("weights\t" + " ".join(repr(w) for w in model.interpolation_weights) + "\n")
        for k in range(1, model.order + 1):
            block = model.counts[k - 1]
            handle.write(f"\\{k}-grams:\t{len(block)}\n")
            for ngram in sorted(block):
                handle.write(" ".join(ngram) + f"\t{block[ngram]}\n")
        handle.write("\\end\\\n")


def load_lm(path: str | Path) -> NGramLM:
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        if handle.readline().rstrip("\n") != _MAGIC:
            raise ValueError(f"{path}: not a {_MAGIC} file")
        order = int(_header_value(handle, "order"))
        alpha = float(_header_value(handle, "alpha"))
        weights = tuple(float(w) for w in _header_value(handle, "weights").split(" "))

        counts: tuple[dict, ...] = tuple({} for _ in range(order))
        totals: tuple[dict, ...] = tuple({} for _ in range(order))
        for k in range(1, order + 1):
            marker, _, size = handle.readline().rstrip("\n").partition("\t")
            if marker != f"\\{k}-grams:":
                raise ValueError(f"{path}: expected \\{k}-grams: block, got {marker!r}")
            table = counts[k - 1]
            total = totals[k - 1]
            for _ in range(int(size)):
                tokens, _, count = handle.readline().rstrip("\n").partition("\t")
                ngram = tuple(tokens.split(" "))
                table[ngram] = int(count)
                ctx = ngram[:-1]
                total[ctx] = total.get(ctx, 0) + int(count)
        if handle.readline().rstrip("\n") != "\\end\\":
            raise ValueError(f"{path}: missing \\end\\ terminator")

    vocab = frozenset(ngram[0] for ngram in counts[0]) - {UNK, BOS, EOS}
    return NGramLM(
        order=order,
        lidstone_alpha=alpha,
        interpolation_weights=weights,
        vocab=vocab,
        counts=counts,
        context_totals=totals,
    )


def _header_value(handle, key: str) -> str:
    name, _, value = handle.readline().rstrip("\n").partition("\t")
    if name != key:
        raise ValueError(f"expected header field {key!r}, got {name!r}")
    return value
