"""Per-language lexicons with term and document frequencies.

A glottoset maps each lowercased word of a language to its term
frequency (total occurrences) and document frequency (paragraphs that
contain it). Merged glottosets additionally track in how many languages
each word appears.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import MalformedInputError
from .ingest import Paragraph, Script


@dataclass(frozen=True)
class Glottoset:
    """Lexicon of one language: word -> (tf, df)."""

    language: str
    script: Script
    entries: dict[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def vocab_size(self) -> int:
        return len(self.entries)

    @property
    def total_tokens(self) -> int:
        """Sum of term frequencies = total word tokens in the source stream."""
        return sum(tf for tf, _ in self.entries.values())

    def term_frequencies(self) -> dict[str, int]:
        return {word: tf for word, (tf, _) in self.entries.items()}

    def vocabulary(self) -> set[str]:
        return set(self.entries)


@dataclass(frozen=True)
class MergedGlottoset:
    """Multi-language lexicon: word -> (tf, df, n_langs), all summed/counted."""

    languages: tuple[str, ...]
    entries: dict[str, tuple[int, int, int]] = field(default_factory=dict)

    @property
    def vocab_size(self) -> int:
        return len(self.entries)

    @property
    def total_tokens(self) -> int:
        return sum(tf for tf, _, _ in self.entries.values())

    def term_frequencies(self) -> dict[str, int]:
        return {word: tf for word, (tf, _, _) in self.entries.items()}

    def vocabulary(self) -> set[str]:
        return set(self.entries)


def build_glottoset(
    paragraphs: Iterable[Paragraph],
    language: str,
    script: Script = Script.OTHER,
) -> Glottoset:
    """Count tf/df over a (pre-filtered) paragraph stream.

    df counts paragraphs containing the word at least once, so a word
    repeated inside one paragraph has tf > df.
    """
    tf: Counter[str] = Counter()
    df: Counter[str] = Counter()
    for para in paragraphs:
        tf.update(para.words)
        df.update(set(para.words))
    entries = {word: (tf[word], df[word]) for word in tf}
    return Glottoset(language=language, script=script, entries=entries)


def merge_glottosets(glottosets: Sequence[Glottoset]) -> MergedGlottoset:
    """Fold glottosets into one lexicon, summing tf/df and counting languages."""
    if not glottosets:
        raise ValueError("need at least one glottoset to merge")
    codes = [g.language for g in glottosets]
    if len(set(codes)) != len(codes):
        dupes = sorted({c for c in codes if codes.count(c) > 1})
        raise ValueError(f"duplicate language codes in merge input: {dupes}")
    entries: dict[str, tuple[int, int, int]] = {}
    for gs in glottosets:
        for word, (tf, df) in gs.entries.items():
            prev = entries.get(word)
            if prev is None:
                entries[word] = (tf, df, 1)
            else:
                entries[word] = (prev[0] + tf, prev[1] + df, prev[2] + 1)
    return MergedGlottoset(languages=tuple(codes), entries=entries)


@dataclass(frozen=True)
class LexicalStats:
    """Summary statistics of one lexicon."""

    vocab_size: int
    lexical_diversity: float
    median_word_length: float
    top_tokens: tuple[str, ...]


def type_token_ratio(vocab_size: int, total_tokens: int) -> float:
    """Lexical diversity: distinct words over total word tokens."""
    if vocab_size <= 0:
        raise ValueError("vocab_size must be positive")
    if total_tokens < vocab_size:
        raise ValueError("total_tokens cannot be smaller than vocab_size")
    return vocab_size / total_tokens


def lexical_stats(
    glottoset: Glottoset | MergedGlottoset,
    total_tokens: int | None = None,
    k: int = 3,
) -> LexicalStats:
    """Vocabulary size, diversity, median word length (over types), top-k tokens.

    `total_tokens` defaults to the glottoset's own tf sum; pass the
    corpus-level count explicitly when the lexicon was truncated.
    """
    if glottoset.vocab_size == 0:
        raise ValueError("cannot compute statistics of an empty glottoset")
    if total_tokens is None:
        total_tokens = glottoset.total_tokens
    tf = glottoset.term_frequencies()
    lengths = sorted(len(word) for word in tf)
    mid = len(lengths) // 2
    if len(lengths) % 2:
        median = float(lengths[mid])
    else:
        median = (lengths[mid - 1] + lengths[mid]) / 2.0
    top = sorted(tf, key=lambda w: (-tf[w], w))[:k]
    return LexicalStats(
        vocab_size=glottoset.vocab_size,
        lexical_diversity=type_token_ratio(glottoset.vocab_size, total_tokens),
        median_word_length=median,
        top_tokens=tuple(top),
    )


_HEADER_PLAIN = "word\ttf\tdf"
_HEADER_MERGED = "word\ttf\tdf\tn_langs"


def _sorted_items(entries: Mapping) -> list:
    return sorted(entries.items(), key=lambda kv: (-kv[1][0], kv[0]))


def write_glottoset_tsv(gs: Glottoset | MergedGlottoset, path: str | Path) -> None:
    """Persist a glottoset: header, then rows sorted by tf desc, word asc."""
    merged = isinstance(gs, MergedGlottoset)
    lines = [_HEADER_MERGED if merged else _HEADER_PLAIN]
    for word, counts in _sorted_items(gs.entries):
        lines.append(word + "\t" + "\t".join(str(c) for c in counts))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_glottoset_tsv(
    path: str | Path,
    language: str | None = None,
    script: Script = Script.OTHER,
) -> Glottoset | MergedGlottoset:
    """Load a glottoset TSV; the header decides plain vs merged.

    `language` defaults to the file stem for plain glottosets.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n")
        if header == _HEADER_PLAIN:
            merged = False
        elif header == _HEADER_MERGED:
            merged = True
        else:
            raise MalformedInputError(str(path), 1, f"unrecognized header {header!r}")
        width = 4 if merged else 3
        entries: dict = {}
        for line_no, line in enumerate(fh, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            fields = line.split("\t")
            if len(fields) != width:
                raise MalformedInputError(
                    str(path), line_no, f"expected {width} tab-separated fields"
                )
            word = fields[0]
            if not word:
                raise MalformedInputError(str(path), line_no, "empty word")
            if word in entries:
                raise MalformedInputError(str(path), line_no, f"duplicate word {word!r}")
            try:
                counts = tuple(int(f) for f in fields[1:])
            except ValueError:
                raise MalformedInputError(
                    str(path), line_no, "frequencies must be base-10 integers"
                ) from None
            if any(c < 1 for c in counts):
                raise MalformedInputError(str(path), line_no, "frequencies must be >= 1")
            if counts[0] < counts[1]:
                raise MalformedInputError(str(path), line_no, "tf must be >= df")
            entries[word] = counts
    if merged:
        return MergedGlottoset(languages=(), entries=entries)
    return Glottoset(language=language or path.stem.split(".")[0], script=script, entries=entries)
