"""Script-aware corpus ingestion.

Turns raw paragraph streams (UTF-8 text, one paragraph per line) into
script-filtered, lowercased word streams, and measures cross-script
contamination in the retained text.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator


class Script(Enum):
    """Coarse writing-system class of a character, word, or paragraph."""

    LATIN = "latin"
    CYRILLIC = "cyrillic"
    OTHER = "other"


# Letter blocks per script; membership is additionally gated on the
# character actually being alphabetic, so symbols inside these ranges
# (multiplication sign etc.) never count.
_LATIN_RANGES = (
    (0x0041, 0x005A),  # Basic Latin A-Z
    (0x0061, 0x007A),  # Basic Latin a-z
    (0x00AA, 0x00FF),  # Latin-1 Supplement letters
    (0x0100, 0x024F),  # Latin Extended-A / Extended-B
    (0x1E00, 0x1EFF),  # Latin Extended Additional
    (0x2C60, 0x2C7F),  # Latin Extended-C
    (0xA720, 0xA7FF),  # Latin Extended-D
    (0xAB30, 0xAB6F),  # Latin Extended-E
)
_CYRILLIC_RANGES = (
    (0x0400, 0x04FF),  # Cyrillic
    (0x0500, 0x052F),  # Cyrillic Supplement
    (0x1C80, 0x1C8F),  # Cyrillic Extended-C
    (0x2DE0, 0x2DFF),  # Cyrillic Extended-A
    (0xA640, 0xA69F),  # Cyrillic Extended-B
)

_script_cache: dict[str, Script | None] = {}


def char_script(ch: str) -> Script | None:
    """Script of a single character, or None if it is not alphabetic."""
    cached = _script_cache.get(ch)
    if cached is not None or ch in _script_cache:
        return cached
    if not ch.isalpha():
        script = None
    else:
        cp = ord(ch)
        script = Script.OTHER
        for lo, hi in _LATIN_RANGES:
            if lo <= cp <= hi:
                script = Script.LATIN
                break
        else:
            for lo, hi in _CYRILLIC_RANGES:
                if lo <= cp <= hi:
                    script = Script.CYRILLIC
                    break
    _script_cache[ch] = script
    return script


def classify_script(text: str) -> dict[Script, int]:
    """Count the alphabetic characters of `text` by script.

    Non-letters (digits, punctuation, combining marks, whitespace) are
    not counted at all.
    """
    counts = {Script.LATIN: 0, Script.CYRILLIC: 0, Script.OTHER: 0}
    cache = _script_cache
    for ch in text:
        script = cache.get(ch)
        if script is None:
            if ch in cache:
                continue
            script = char_script(ch)
            if script is None:
                continue
        counts[script] += 1
    return counts


def dominant_script(counts: dict[Script, int]) -> Script:
    """Script holding a strict plurality of letters; ties and all-zero give OTHER."""
    latin = counts.get(Script.LATIN, 0)
    cyrillic = counts.get(Script.CYRILLIC, 0)
    other = counts.get(Script.OTHER, 0)
    if latin > cyrillic and latin > other:
        return Script.LATIN
    if cyrillic > latin and cyrillic > other:
        return Script.CYRILLIC
    return Script.OTHER


class _WordSplitTable(dict):
    """str.translate table replacing every non-word codepoint with a space.

    Word characters are Unicode letters and combining marks; everything
    else separates words. Entries are memoized lazily per codepoint.
    """

    def __missing__(self, cp: int) -> int:
        cat = unicodedata.category(chr(cp))
        repl = cp if cat[0] in "LM" else 0x20
        self[cp] = repl
        return repl


_SPLIT_TABLE = _WordSplitTable()


def extract_words(paragraph_text: str) -> list[str]:
    """Split a paragraph into lowercased words, order preserved.

    A word is a maximal run of Unicode letters and combining marks;
    apostrophes, hyphens, and digits all split.
    """
    return paragraph_text.translate(_SPLIT_TABLE).lower().split()


def word_script(word: str) -> Script:
    """Script of a word token: strict plurality of its letters, ties OTHER."""
    return dominant_script(classify_script(word))


@dataclass(frozen=True)
class Paragraph:
    """One input paragraph with its extracted words and script class."""

    text: str
    words: tuple[str, ...]
    dominant_script: Script

    @property
    def word_count(self) -> int:
        return len(self.words)

    @classmethod
    def from_text(cls, text: str) -> "Paragraph":
        return cls(
            text=text,
            words=tuple(extract_words(text)),
            dominant_script=dominant_script(classify_script(text)),
        )


def read_paragraphs(path: str | Path) -> Iterator[Paragraph]:
    """Read a one-paragraph-per-line UTF-8 file, NFC-normalizing on the way in.

    Blank lines are skipped; they are not paragraphs.
    """
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            text = unicodedata.normalize("NFC", line.rstrip("\n"))
            if text.strip():
                yield Paragraph.from_text(text)


def filter_paragraphs(
    paragraphs: Iterable[Paragraph],
    target_script: Script,
    min_words: int = 10,
) -> Iterator[Paragraph]:
    """Keep paragraphs with at least `min_words` words and the target script.

    Relative order is preserved. Filtering is idempotent.
    """
    if min_words < 0:
        raise ValueError("min_words must be >= 0")
    for para in paragraphs:
        if para.word_count >= min_words and para.dominant_script == target_script:
            yield para


@dataclass
class ContaminationReport:
    """Per-script word token counts over a retained paragraph stream."""

    native_script: Script
    counts: dict[Script, int] = field(
        default_factory=lambda: {Script.LATIN: 0, Script.CYRILLIC: 0, Script.OTHER: 0}
    )

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def merged_with(self, other: "ContaminationReport") -> "ContaminationReport":
        """Field-wise sum; reports must describe the same native script."""
        if other.native_script != self.native_script:
            raise ValueError("cannot merge reports with different native scripts")
        merged = {s: self.counts[s] + other.counts[s] for s in Script}
        return ContaminationReport(native_script=self.native_script, counts=merged)

    def to_tsv(self) -> str:
        lines = ["script\ttoken_count"]
        lines += [f"{s.value}\t{self.counts[s]}" for s in Script]
        return "\n".join(lines) + "\n"


def contamination_report(
    paragraphs: Iterable[Paragraph], native_script: Script
) -> ContaminationReport:
    """Attribute every word token in the stream to a script and tally."""
    report = ContaminationReport(native_script=native_script)
    counts = report.counts
    for para in paragraphs:
        for word in para.words:
            counts[word_script(word)] += 1
    return report
