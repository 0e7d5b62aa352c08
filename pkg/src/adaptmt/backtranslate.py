"""Pseudo in-domain corpus generation by back-translation.

A pluggable translator turns the in-domain corpus of the resource-rich
language into a pseudo in-domain corpus for the language that has none.
The built-in word-for-word dictionary translator (with identity fallback
for unknown tokens) is the desk-scale stand-in; an external line-aligned
translation command can be plugged in instead.
"""

from __future__ import annotations

import subprocess
import tempfile
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from adaptmt.corpus import Corpus, DomainTag, LanguageId, Sentence, save_corpus


class TranslatorKind(Enum):
    DICTIONARY = "dictionary"
    EXTERNAL = "external"


@dataclass(frozen=True)
class TranslatorSpec:
    """How back-translation is performed.

    Dictionary mode needs ``lexicon_path``; external mode needs
    ``command_template`` with ``{input}`` and ``{output}`` placeholders,
    run through the shell once per corpus file.
    """

    kind: TranslatorKind
    lexicon_path: Path | None = None
    command_template: str | None = None

    def __post_init__(self):
        if self.kind is TranslatorKind.DICTIONARY and self.lexicon_path is None:
            raise ValueError("dictionary translator requires lexicon_path")
        if self.kind is TranslatorKind.EXTERNAL and not self.command_template:
            raise ValueError("external translator requires command_template")


@dataclass(frozen=True)
class BilingualLexicon:
    """Source-to-target token map; lookups outside the map copy the token."""

    entries: dict

    def translate_token(self, token: str) -> str:
        return self.entries.get(token, token)

    def translate(self, sentence: Sentence) -> Sentence:
        tokens = tuple(self.translate_token(t) for t in sentence.tokens)
        return Sentence(raw=" ".join(tokens), tokens=tokens)


def load_lexicon(path: str | Path) -> BilingualLexicon:
    """Parse a ``source<TAB>target`` lexicon file; later entries win."""
    path = Path(path)
    entries: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0]:
                raise ValueError(f"{path}: malformed lexicon entry on line {lineno}")
            entries[parts[0]] = parts[1]
    return BilingualLexicon(entries=entries)


def back_translate(corpus: Corpus, translator: TranslatorSpec) -> Corpus:
    """Translate an (L2, in-domain) corpus into a pseudo (L1, in-domain) one.

    Sentence count and order are preserved for every translator kind; the
    external command must emit exactly one output line per input line.
    """
    if corpus.language is not LanguageId.L2 or corpus.domain is not DomainTag.IN_DOMAIN:
        raise ValueError(
            "back-translation expects the L2 in-domain corpus, got "
            f"({corpus.language.value}, {corpus.domain.value})"
        )
    if translator.kind is TranslatorKind.DICTIONARY:
        lexicon = load_lexicon(translator.lexicon_path)
        sentences = tuple(lexicon.translate(s) for s in corpus.sentences)
    else:
        sentences = _translate_external(corpus, translator.command_template)
    return Corpus(
        language=LanguageId.L1,
        domain=DomainTag.IN_DOMAIN,
        sentences=sentences,
        source_path=None,
        blank_lines=0,
    )


def _translate_external(corpus: Corpus, command_template: str) -> tuple[Sentence, ...]:
    with tempfile.TemporaryDirectory(prefix="adaptmt-bt-") as tmp:
        input_path = Path(tmp) / "input.txt"
        output_path = Path(tmp) / "output.txt"
        save_corpus(corpus, input_path)
        command = command_template.format(input=str(input_path), output=str(output_path))
        result = subprocess.run(command, shell=True, capture_output=True, text=True)
        if result.returncode != 0:
            raise RuntimeError(
                f"external translator failed (exit {result.returncode}): "
                f"{result.stderr.strip() or command}"
            )
        if not output_path.exists():
            raise RuntimeError(f"external translator wrote no output file: {command}")
        lines = output_path.read_text(encoding="utf-8").split("\n")
        if lines and lines[-1] == "":
            lines.pop()
    if len(lines) != len(corpus):
        raise RuntimeError(
            f"external translator emitted {len(lines)} lines for "
            f"{len(corpus)} input sentences"
        )
    return tuple(Sentence.from_raw(line) for line in lines)
