"""Word-level byte-pair encoding: training, encoding, trees, graphs.

The trainer never crosses word boundaries and knows no whitespace or
end-of-word tokens: words are the units, characters the base symbols.
Two stopping modes exist. Fixed-vocabulary training stops once the
alphabet plus merges reach a target size; ultimate training continues
while any adjacent pair still has weighted frequency greater than one.

Pair frequencies are weighted by word term frequency ("tf") or count
every distinct word once ("types"). Ties between equally frequent pairs
break on the lexicographically smaller left token, then right token,
which makes training fully deterministic.
"""

from __future__ import annotations

import heapq
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import MalformedInputError
from .glottoset import Glottoset, MergedGlottoset

WEIGHTINGS = ("tf", "types")


class MergeTable:
    """A trained tokenizer: base alphabet plus an ordered merge sequence.

    The alphabet lists single characters by descending weighted corpus
    frequency (ties lexicographic). Each merge joins two existing tokens
    into their concatenation. `creation_rank` maps every token to its
    1-based position in the order tokens entered the vocabulary:
    alphabet first, then merge products.
    """

    def __init__(
        self,
        alphabet: Sequence[str],
        merges: Sequence[tuple[str, str]],
        language: str = "und",
        mode: str = "custom",
        weighting: str = "tf",
    ):
        self.alphabet = list(alphabet)
        self.merges = [(left, right) for left, right in merges]
        self.language = language
        self.mode = mode
        self.weighting = weighting

        ranks: dict[str, int] = {}
        for ch in self.alphabet:
            if len(ch) != 1:
                raise ValueError(f"alphabet entries must be single characters, got {ch!r}")
            if ch in ranks:
                raise ValueError(f"duplicate alphabet entry {ch!r}")
            ranks[ch] = len(ranks) + 1
        self._vocab_order = list(self.alphabet)
        self._pair_rank: dict[tuple[str, str], int] = {}
        for idx, (left, right) in enumerate(self.merges):
            if left not in ranks or right not in ranks:
                raise ValueError(
                    f"merge {idx + 1} ({left!r},{right!r}) references a token "
                    "that does not exist yet"
                )
            token = left + right
            if token not in ranks:
                ranks[token] = len(ranks) + 1
                self._vocab_order.append(token)
            self._pair_rank.setdefault((left, right), idx)
        self._ranks = ranks

    @property
    def creation_ranks(self) -> dict[str, int]:
        return dict(self._ranks)

    def creation_rank(self, token: str) -> int | None:
        """1-based creation rank of a token, or None if unknown."""
        return self._ranks.get(token)

    def vocabulary(self) -> list[str]:
        """All tokens in creation order (alphabet, then merge products)."""
        return list(self._vocab_order)

    @property
    def vocab_size(self) -> int:
        return len(self._vocab_order)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MergeTable):
            return NotImplemented
        return self.alphabet == other.alphabet and self.merges == other.merges

    def __repr__(self) -> str:
        return (
            f"MergeTable(language={self.language!r}, alphabet={len(self.alphabet)}, "
            f"merges={len(self.merges)}, mode={self.mode!r})"
        )


def _word_weights(
    lexicon: Glottoset | MergedGlottoset | Mapping[str, int],
    weighting: str,
) -> dict[str, int]:
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}, got {weighting!r}")
    if isinstance(lexicon, (Glottoset, MergedGlottoset)):
        tf = lexicon.term_frequencies()
    else:
        tf = dict(lexicon)
    if weighting == "types":
        return {word: 1 for word in tf}
    return tf


def train_bpe(
    lexicon: Glottoset | MergedGlottoset | Mapping[str, int],
    vocab_size: int | None = None,
    weighting: str = "tf",
    language: str | None = None,
) -> MergeTable:
    """Train a merge table on a lexicon.

    `vocab_size=None` selects ultimate mode: merging continues exactly
    until no adjacent pair has weighted frequency above one. Otherwise
    merging additionally stops once alphabet size plus merge count
    reaches `vocab_size`.

    Pair counting is maintained incrementally but reproduces, step for
    step, what a full recount would select.
    """
    weights = _word_weights(lexicon, weighting)
    if not weights:
        raise ValueError("cannot train on an empty lexicon")
    if language is None:
        language = getattr(lexicon, "language", None) or "multi"

    # Share one string object per distinct character across all words.
    interned: dict[str, str] = {}
    words: list[list[str]] = []
    wts: list[int] = []
    char_freq: Counter[str] = Counter()
    for word, weight in weights.items():
        if not word:
            raise ValueError("lexicon contains an empty word")
        symbols = [interned.setdefault(ch, ch) for ch in word]
        words.append(symbols)
        wts.append(weight)
        for ch in symbols:
            char_freq[ch] += weight

    alphabet = sorted(char_freq, key=lambda ch: (-char_freq[ch], ch))
    vocab_count = len(alphabet)
    if vocab_size is not None and vocab_size < vocab_count:
        raise ValueError(
            f"target vocabulary {vocab_size} is smaller than the alphabet ({vocab_count})"
        )

    pair_counts: dict[tuple[str, str], int] = {}
    occurrences: dict[tuple[str, str], set[int]] = {}
    for wi, symbols in enumerate(words):
        weight = wts[wi]
        for pair in zip(symbols, symbols[1:]):
            pair_counts[pair] = pair_counts.get(pair, 0) + weight
            occ = occurrences.get(pair)
            if occ is None:
                occurrences[pair] = {wi}
            else:
                occ.add(wi)

    # Max-heap over (count, smaller left, smaller right) with lazy
    # invalidation: every count update pushes a fresh entry, so the
    # entry matching the live count is always present.
    heap: list[tuple[int, str, str]] = [
        (-count, left, right)
        for (left, right), count in pair_counts.items()
        if count > 1
    ]
    heapq.heapify(heap)

    merges: list[tuple[str, str]] = []
    while True:
        if vocab_size is not None and vocab_count >= vocab_size:
            break
        best = None
        while heap:
            neg_count, left, right = heap[0]
            live = pair_counts.get((left, right), 0)
            if live == -neg_count and live > 1:
                best = (left, right)
                heapq.heappop(heap)
                break
            heapq.heappop(heap)
        if best is None:
            break

        left, right = best
        new_token = left + right
        merges.append(best)
        vocab_count += 1

        deltas: dict[tuple[str, str], int] = {}
        for wi in occurrences.pop(best, ()):
            symbols = words[wi]
            weight = wts[wi]
            out: list[str] = []
            i = 0
            n = len(symbols)
            while i < n:
                if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
                    out.append(new_token)
                    i += 2
                else:
                    out.append(symbols[i])
                    i += 1
            words[wi] = out
            old_pairs = Counter(zip(symbols, symbols[1:]))
            new_pairs = Counter(zip(out, out[1:]))
            for pair, cnt in old_pairs.items():
                diff = new_pairs.get(pair, 0) - cnt
                if diff:
                    deltas[pair] = deltas.get(pair, 0) + diff * weight
            for pair, cnt in new_pairs.items():
                if pair not in old_pairs:
                    deltas[pair] = deltas.get(pair, 0) + cnt * weight
            for pair in old_pairs:
                if pair not in new_pairs and pair != best:
                    occ = occurrences.get(pair)
                    if occ is not None:
                        occ.discard(wi)
                        if not occ:
                            del occurrences[pair]
            for pair in new_pairs:
                if pair not in old_pairs:
                    occurrences.setdefault(pair, set()).add(wi)

        for pair, delta in deltas.items():
            if delta == 0:
                continue
            count = pair_counts.get(pair, 0) + delta
            if count <= 0:
                pair_counts.pop(pair, None)
            else:
                pair_counts[pair] = count
                if count > 1:
                    heapq.heappush(heap, (-count, pair[0], pair[1]))
        pair_counts.pop(best, None)

    mode = "ultimate" if vocab_size is None else f"fixed:{vocab_size}"
    return MergeTable(alphabet, merges, language=language, mode=mode, weighting=weighting)


def encode_word(table: MergeTable, word: str) -> list[str]:
    """Segment a word by replaying the table's merges in creation order.

    Characters outside the alphabet pass through as singleton tokens;
    they can never participate in a merge.
    """
    if not word:
        raise ValueError("cannot encode an empty word")
    symbols = list(word)
    pair_rank = table._pair_rank
    merges = table.merges
    while len(symbols) > 1:
        best_rank = None
        for i in range(len(symbols) - 1):
            rank = pair_rank.get((symbols[i], symbols[i + 1]))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            break
        left, right = merges[best_rank]
        merged = left + right
        out: list[str] = []
        i = 0
        n = len(symbols)
        while i < n:
            if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
                out.append(merged)
                i += 2
            else:
                out.append(symbols[i])
                i += 1
        symbols = out
    return symbols


@dataclass(frozen=True)
class TokenNode:
    """Node of a tokenization tree; leaves are single characters."""

    token: str
    children: tuple["TokenNode", ...] = ()

    def leaves(self) -> list[str]:
        if not self.children:
            return [self.token]
        out: list[str] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def to_dict(self) -> dict:
        return {"token": self.token, "children": [c.to_dict() for c in self.children]}


def tokenization_tree(table: MergeTable, word: str) -> list[TokenNode]:
    """Forest recording how `word` decomposes under the table's merges.

    Roots equal `encode_word(table, word)`; in-order leaves spell the
    word exactly.
    """
    if not word:
        raise ValueError("cannot build a tree for an empty word")
    nodes = [TokenNode(ch) for ch in word]
    pair_rank = table._pair_rank
    merges = table.merges
    while len(nodes) > 1:
        best_rank = None
        for i in range(len(nodes) - 1):
            rank = pair_rank.get((nodes[i].token, nodes[i + 1].token))
            if rank is not None and (best_rank is None or rank < best_rank):
                best_rank = rank
        if best_rank is None:
            break
        left, right = merges[best_rank]
        out: list[TokenNode] = []
        i = 0
        n = len(nodes)
        while i < n:
            if i + 1 < n and nodes[i].token == left and nodes[i + 1].token == right:
                out.append(TokenNode(left + right, (nodes[i], nodes[i + 1])))
                i += 2
            else:
                out.append(nodes[i])
                i += 1
        nodes = out
    return nodes


def tree_to_json(forest: Sequence[TokenNode]) -> str:
    return json.dumps([node.to_dict() for node in forest], ensure_ascii=False, indent=2)


@dataclass(frozen=True)
class MergeGraph:
    """Directed merge graph: edges run from operands to their product.

    `nodes` pairs each token with its reuse count, the number of merge
    operands (over the full merge list) that consume the token.
    """

    nodes: tuple[tuple[str, int], ...]
    edges: tuple[tuple[str, str], ...]

    def to_dot(self) -> str:
        def quote(token: str) -> str:
            return '"' + token.replace("\\", "\\\\").replace('"', '\\"') + '"'

        lines = ["digraph merges {"]
        for token, reuse in self.nodes:
            lines.append(f"  {quote(token)} [label={quote(f'{token} ({reuse})')}];")
        for src, dst in self.edges:
            lines.append(f"  {quote(src)} -> {quote(dst)};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        payload = {
            "nodes": [{"token": t, "reuse_count": r} for t, r in self.nodes],
            "edges": [{"source": s, "target": d} for s, d in self.edges],
        }
        return json.dumps(payload, ensure_ascii=False, indent=2)


def build_merge_graph(table: MergeTable, top_n: int) -> MergeGraph:
    """Graph of the first `top_n` merges; reuse counts span all merges."""
    if top_n < 1:
        raise ValueError("top_n must be >= 1")
    reuse: Counter[str] = Counter()
    for left, right in table.merges:
        reuse[left] += 1
        reuse[right] += 1
    nodes: list[tuple[str, int]] = [(ch, reuse.get(ch, 0)) for ch in table.alphabet]
    seen = set(table.alphabet)
    edges: list[tuple[str, str]] = []
    for left, right in table.merges[:top_n]:
        token = left + right
        if token not in seen:
            seen.add(token)
            nodes.append((token, reuse.get(token, 0)))
        edges.append((left, token))
        edges.append((right, token))
    return MergeGraph(nodes=tuple(nodes), edges=tuple(edges))


@dataclass(frozen=True)
class MergeDiff:
    """Set and sequence comparison of two merge tables."""

    shared: frozenset[tuple[str, str]]
    only_a: frozenset[tuple[str, str]]
    only_b: frozenset[tuple[str, str]]
    common_prefix: int


def diff_merge_tables(a: MergeTable, b: MergeTable) -> MergeDiff:
    """Compare merge lists as sets of (left, right) pairs plus common prefix."""
    set_a = set(a.merges)
    set_b = set(b.merges)
    prefix = 0
    for ma, mb in zip(a.merges, b.merges):
        if ma != mb:
            break
        prefix += 1
    return MergeDiff(
        shared=frozenset(set_a & set_b),
        only_a=frozenset(set_a - set_b),
        only_b=frozenset(set_b - set_a),
        common_prefix=prefix,
    )


def write_merge_table(table: MergeTable, path: str | Path) -> None:
    """Serialize: header line, alphabet one per line, blank line, merges."""
    lines = [f"lang={table.language}\tmode={table.mode}\tweighting={table.weighting}"]
    lines.extend(table.alphabet)
    lines.append("")
    lines.extend(f"{left}\t{right}" for left, right in table.merges)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_merge_table(path: str | Path) -> MergeTable:
    """Parse a merge-table file written by `write_merge_table`."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise MalformedInputError(str(path), 1, "empty merge-table file")
    header: dict[str, str] = {}
    for part in lines[0].split("\t"):
        key, sep, value = part.partition("=")
        if not sep:
            raise MalformedInputError(str(path), 1, f"bad header field {part!r}")
        header[key] = value
    for key in ("lang", "mode", "weighting"):
        if key not in header:
            raise MalformedInputError(str(path), 1, f"header is missing {key!r}")
    alphabet: list[str] = []
    merges: list[tuple[str, str]] = []
    in_merges = False
    for line_no, line in enumerate(lines[1:], start=2):
        if not in_merges:
            if line == "":
                in_merges = True
                continue
            if len(line) != 1:
                raise MalformedInputError(
                    str(path), line_no, "alphabet entries must be single characters"
                )
            alphabet.append(line)
        else:
            fields = line.split("\t")
            if len(fields) != 2 or not fields[0] or not fields[1]:
                raise MalformedInputError(
                    str(path), line_no, "merge lines must be left<TAB>right"
                )
            merges.append((fields[0], fields[1]))
    if not in_merges:
        raise MalformedInputError(
            str(path), len(lines), "missing blank-line separator before merges"
        )
    try:
        return MergeTable(
            alphabet,
            merges,
            language=header["lang"],
            mode=header["mode"],
            weighting=header["weighting"],
        )
    except ValueError as exc:
        raise MalformedInputError(str(path), 1, str(exc)) from exc
