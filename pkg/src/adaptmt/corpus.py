"""Monolingual corpus loading, tokenization and shared-vocabulary BPE.

Corpora are plain UTF-8 text files, one sentence per line, LF line
endings.  Tokenization is whitespace splitting only; subword segmentation
is handled by a byte-pair-encoding model trained jointly over all corpora
so that both languages share one vocabulary.
"""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

END_OF_WORD = "</w>"


class LanguageId(Enum):
    L1 = "L1"
    L2 = "L2"


class DomainTag(Enum):
    IN_DOMAIN = "in-domain"
    OUT_OF_DOMAIN = "out-of-domain"


@dataclass(frozen=True)
class Sentence:
    """One corpus line: the original text plus its whitespace tokens."""

    raw: str
    tokens: tuple[str, ...]

    @classmethod
    def from_raw(cls, raw: str) -> "Sentence":
        return cls(raw=raw, tokens=tuple(raw.split()))


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of sentences with language/domain tags.

    Sentence order equals file line order; blank lines are dropped at load
    time and their count kept for reporting.
    """

    language: LanguageId
    domain: DomainTag
    sentences: tuple[Sentence, ...]
    source_path: Path | None = None
    blank_lines: int = 0

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)


def load_corpus(path: str | Path, language: LanguageId, domain: DomainTag) -> Corpus:
    """Read a sentence-per-line UTF-8 file into a Corpus.

    Blank (or whitespace-only) lines are dropped and counted.  Invalid
    UTF-8 raises a ValueError that names the offending line.
    """
    path = Path(path)
    data = path.read_bytes()
    raw_lines = data.split(b"\n")
    if raw_lines and raw_lines[-1] == b"":
        raw_lines.pop()  # trailing newline, not an empty final line

    sentences = []
    blank = 0
    for lineno, raw in enumerate(raw_lines, start=1):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ValueError(f"{path}: invalid UTF-8 on line {lineno}: {exc}") from exc
        sentence = Sentence.from_raw(text)
        if not sentence.tokens:
            blank += 1
            continue
        sentences.append(sentence)

    if blank:
        log.debug("%s: dropped %d blank line(s)", path, blank)
    return Corpus(
        language=language,
        domain=domain,
        sentences=tuple(sentences),
        source_path=path,
        blank_lines=blank,
    )


def save_corpus(corpus: Corpus | Iterable[Sentence], path: str | Path) -> None:
    """Write sentences back out, one raw line per sentence, LF-terminated."""
    sentences = corpus.sentences if isinstance(corpus, Corpus) else tuple(corpus)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for sentence in sentences:
            handle.write(sentence.raw)
            handle.write("\n")


# ---------------------------------------------------------------------------
# Byte-pair encoding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BpeModel:
    """A learned merge list plus the vocabulary it induces.

    ``merges`` is applied in order when segmenting; ``continuation_marker``
    is appended to the final subword of each word so a token stream can be
    de-segmented back into words.  Input text must not itself contain the
    literal marker string.
    """

    merges: tuple[tuple[str, str], ...]
    vocab: frozenset[str]
    merge_count: int
    continuation_marker: str = END_OF_WORD
    _ranks: dict = field(init=False, repr=False, compare=False, hash=False, default=None)
    _cache: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_ranks", {pair: i for i, pair in enumerate(self.merges)})
        object.__setattr__(self, "_cache", {})

    def segment_word(self, word: str) -> tuple[str, ...]:
        """Segment one word into subwords, marker appended to the last one."""
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        symbols = list(word)
        ranks = self._ranks
        while len(symbols) > 1:
            best = None
            for pair in zip(symbols, symbols[1:]):
                rank = ranks.get(pair)
                if rank is not None and (best is None or rank < best):
                    best = rank
            if best is None:
                break
            symbols = _merge_all(symbols, self.merges[best])
        symbols[-1] = symbols[-1] + self.continuation_marker
        result = tuple(symbols)
        self._cache[word] = result
        return result


def _merge_all(symbols: list[str], pair: tuple[str, str]) -> list[str]:
    """Replace every left-to-right occurrence of ``pair`` with its fusion."""
    first, second = pair
    fused = first + second
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if symbols[i] == first and i + 1 < n and symbols[i + 1] == second:
            out.append(fused)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return out


def bpe_train(corpora: Sequence[Corpus], merge_count: int) -> BpeModel:
    """Learn BPE merges over the pooled corpora (shared vocabulary).

    Merges are learned greedily by highest pair frequency; ties break to
    the lexicographically smallest pair, so training is deterministic.
    """
    if merge_count < 0:
        raise ValueError(f"merge_count must be >= 0, got {merge_count}")
    word_freq: Counter[str] = Counter()
    for corpus in corpora:
        for sentence in corpus.sentences:
            word_freq.update(sentence.tokens)
    if not word_freq:
        raise ValueError("no training text: all corpora are empty")

    symbols = {word: tuple(word) for word in word_freq}
    vocab = {char for word in word_freq for char in word}
    vocab.add(END_OF_WORD)

    pair_counts: Counter[tuple[str, str]] = Counter()
    pair_words: dict[tuple[str, str], set[str]] = defaultdict(set)
    for word, syms in symbols.items():
        freq = word_freq[word]
        for pair in zip(syms, syms[1:]):
            pair_counts[pair] += freq
            pair_words[pair].add(word)

    merges: list[tuple[str, str]] = []
    for _ in range(merge_count):
        if not pair_counts:
            break
        best = min(pair_counts, key=lambda p: (-pair_counts[p], p))
        merges.append(best)
        vocab.add(best[0] + best[1])
        # Re-derive pair statistics only for words containing the merged pair.
        for word in sorted(pair_words[best]):
            freq = word_freq[word]
            old = symbols[word]
            for pair in zip(old, old[1:]):
                pair_counts[pair] -= freq
                if pair_counts[pair] <= 0:
                    del pair_counts[pair]
                pair_words[pair].discard(word)
            new = tuple(_merge_all(list(old), best))
            symbols[word] = new
            for pair in zip(new, new[1:]):
                pair_counts[pair] += freq
                pair_words[pair].add(word)

    return BpeModel(
        merges=tuple(merges),
        vocab=frozenset(vocab),
        merge_count=merge_count,
    )


def bpe_apply(model: BpeModel, sentence: Sentence) -> Sentence:
    """Subword-encode a sentence; the raw text is carried through unchanged.

    Characters unseen in training simply pass through as single-character
    subwords, so application never fails.
    """
    tokens: list[str] = []
    for word in sentence.tokens:
        tokens.extend(model.segment_word(word))
    return Sentence(raw=sentence.raw, tokens=tuple(tokens))


def bpe_apply_corpus(model: BpeModel, corpus: Corpus) -> Corpus:
    """Apply the model to every sentence of a corpus, preserving tags."""
    return Corpus(
        language=corpus.language,
        domain=corpus.domain,
        sentences=tuple(bpe_apply(model, s) for s in corpus.sentences),
        source_path=corpus.source_path,
        blank_lines=corpus.blank_lines,
    )


def desegment(tokens: Sequence[str], marker: str = END_OF_WORD) -> tuple[str, ...]:
    """Invert BPE: strip markers and rejoin subwords into whole words."""
    words = []
    current: list[str] = []
    for token in tokens:
        if token.endswith(marker):
            current.append(token[: -len(marker)])
            words.append("".join(current))
            current = []
        else:
            current.append(token)
    if current:
        # No final marker: treat the trailing subwords as one word anyway.
        words.append("".join(current))
    return tuple(words)


def save_bpe_model(model: BpeModel, path: str | Path) -> None:
    """Persist as versioned text: header, then one merge pair per line."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"bpe-v1\t{model.merge_count}\t{model.continuation_marker}\n")
        for first, second in model.merges:
            handle.write(f"{first}\t{second}\n")


def load_bpe_model(path: str | Path) -> BpeModel:
    """Load a persisted model.

    The file stores only merges, so the reconstructed vocabulary covers the
    merge symbols and their characters; segmentation behaviour is identical
    to the trained model's.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as handle:
        header = handle.readline().rstrip("\n").split("\t")
        if len(header) != 3 or header[0] != "bpe-v1":
            raise ValueError(f"{path}: not a bpe-v1 model file")
        merge_count = int(header[1])
        marker = header[2]
        merges = []
        for lineno, line in enumerate(handle, start=2):
            parts = line.rstrip("\n").split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}: malformed merge on line {lineno}")
            merges.append((parts[0], parts[1]))
    vocab = {char for pair in merges for part in pair for char in part}
    vocab.update(first + second for first, second in merges)
    vocab.add(marker)
    return BpeModel(
        merges=tuple(merges),
        vocab=frozenset(vocab),
        merge_count=merge_count,
        continuation_marker=marker,
    )
