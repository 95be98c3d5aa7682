"""Rank-based token vectors across languages and subword language identification.

Every token of a universal (merged-corpus) tokenizer gets a vector of
creation ranks, one entry per language: the position at which the token
entered that language's own vocabulary, or a missing marker when the
language never formed it. Texts are scored against languages either by
fertility (how many subword pieces each word shatters into) or by mean
normalized rank of their universal-tokenizer tokens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .bpe import MergeTable, encode_word
from .ingest import extract_words

MISSING = 0  # rank sentinel inside the matrix; real ranks are >= 1


@dataclass(frozen=True)
class RankMatrix:
    """token x language matrix of creation ranks (0 marks absence)."""

    tokens: tuple[str, ...]
    languages: tuple[str, ...]
    ranks: np.ndarray
    vocab_sizes: np.ndarray

    def rank_of(self, token: str, language: str) -> int | None:
        try:
            ti = self.tokens.index(token)
            li = self.languages.index(language)
        except ValueError:
            return None
        value = int(self.ranks[ti, li])
        return value if value != MISSING else None

    def to_tsv(self) -> str:
        lines = ["token\t" + "\t".join(self.languages)]
        for ti, token in enumerate(self.tokens):
            row = self.ranks[ti]
            cells = [str(int(r)) if r != MISSING else "-" for r in row]
            lines.append(token + "\t" + "\t".join(cells))
        return "\n".join(lines) + "\n"


def _as_pairs(tables) -> list[tuple[str, MergeTable]]:
    if isinstance(tables, Mapping):
        pairs = list(tables.items())
    else:
        pairs = list(tables)
    codes = [code for code, _ in pairs]
    if len(set(codes)) != len(codes):
        dupes = sorted({c for c in codes if codes.count(c) > 1})
        raise ValueError(f"duplicate language codes: {dupes}")
    return pairs


def build_rank_matrix(
    universal: MergeTable,
    per_language: Mapping[str, MergeTable] | Iterable[tuple[str, MergeTable]],
) -> RankMatrix:
    """One row per universal-vocabulary token, one rank column per language."""
    pairs = _as_pairs(per_language)
    if not pairs:
        raise ValueError("need at least one language")
    tokens = universal.vocabulary()
    ranks = np.zeros((len(tokens), len(pairs)), dtype=np.int64)
    sizes = np.zeros(len(pairs), dtype=np.int64)
    for li, (_, table) in enumerate(pairs):
        table_ranks = table._ranks
        sizes[li] = table.vocab_size
        for ti, token in enumerate(tokens):
            ranks[ti, li] = table_ranks.get(token, MISSING)
    return RankMatrix(
        tokens=tuple(tokens),
        languages=tuple(code for code, _ in pairs),
        ranks=ranks,
        vocab_sizes=sizes,
    )


@dataclass(frozen=True)
class LanguageScore:
    """Dissimilarity of a text to one language (lower = more likely)."""

    language: str
    score: float
    method: str


def identify_language_fertility(
    text: str,
    tokenizers: Mapping[str, MergeTable] | Iterable[tuple[str, MergeTable]],
) -> list[LanguageScore]:
    """Rank languages by how few subword tokens they need for the text.

    The integer part of the score is the total token count across all
    words; ties fold the per-word mean token length into the fraction
    (longer pieces rank earlier), then the language code decides.
    """
    pairs = _as_pairs(tokenizers)
    if not pairs:
        raise ValueError("need at least one tokenizer")
    words = extract_words(text)
    if not words:
        raise ValueError("input contains no words")
    scores = []
    for code, table in pairs:
        total_tokens = 0
        mean_lengths = []
        for word in words:
            tokens = encode_word(table, word)
            total_tokens += len(tokens)
            mean_lengths.append(len(word) / len(tokens))
        mean_len = sum(mean_lengths) / len(mean_lengths)
        scores.append(
            LanguageScore(code, total_tokens + 1.0 / (1.0 + mean_len), "fertility")
        )
    scores.sort(key=lambda s: (s.score, s.language))
    return scores


def identify_language_rank(
    text: str,
    universal: MergeTable,
    rank_matrix: RankMatrix,
    missing_penalty: float = 0.5,
) -> list[LanguageScore]:
    """Rank languages by mean normalized creation rank of the text's tokens.

    Tokens are produced by the universal table; a token a language never
    formed contributes 1 + missing_penalty instead of rank/vocab_size.
    """
    words = extract_words(text)
    tokens: list[str] = []
    for word in words:
        tokens.extend(encode_word(universal, word))
    if not tokens:
        raise ValueError("text encodes to zero tokens")
    index = {token: ti for ti, token in enumerate(rank_matrix.tokens)}
    missing_cost = 1.0 + missing_penalty
    n_langs = len(rank_matrix.languages)
    totals = np.zeros(n_langs, dtype=np.float64)
    sizes = rank_matrix.vocab_sizes.astype(np.float64)
    for token in tokens:
        ti = index.get(token)
        if ti is None:
            totals += missing_cost
            continue
        row = rank_matrix.ranks[ti]
        present = row != MISSING
        totals += np.where(present, row / sizes, missing_cost)
    means = totals / len(tokens)
    scores = [
        LanguageScore(code, float(means[li]), "rank")
        for li, code in enumerate(rank_matrix.languages)
    ]
    scores.sort(key=lambda s: (s.score, s.language))
    return scores


def scores_to_distribution(scores: Iterable[LanguageScore]) -> list[tuple[str, float]]:
    """Optional softmax over negated scores, as (language, probability)."""
    scores = list(scores)
    if not scores:
        raise ValueError("no scores to convert")
    peak = min(s.score for s in scores)
    weights = [math.exp(-(s.score - peak)) for s in scores]
    total = sum(weights)
    return [(s.language, w / total) for s, w in zip(scores, weights)]


def write_rank_matrix_tsv(matrix: RankMatrix, path: str | Path) -> None:
    Path(path).write_text(matrix.to_tsv(), encoding="utf-8")
