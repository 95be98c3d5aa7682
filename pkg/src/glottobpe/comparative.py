"""Cross-language statistics over trained tokenizers and lexicons.

Covers Jaccard vocabulary distances, phylogenetic distance encoding,
the Mantel permutation test, family separation ratios, cross-lingual
homograph segmentation divergence, and morpheme-boundary agreement
against gold segmentations with a random baseline.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Set

import numpy as np

from .bpe import MergeTable, encode_word
from .errors import MalformedInputError
from .glottoset import Glottoset


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative language x language distances, zero diagonal."""

    labels: tuple[str, ...]
    values: np.ndarray

    def __post_init__(self):
        n = len(self.labels)
        if self.values.shape != (n, n):
            raise ValueError("matrix shape does not match label count")
        if np.any(np.abs(np.diag(self.values)) > 0):
            raise ValueError("diagonal must be exactly zero")
        if np.max(np.abs(self.values - self.values.T)) > 1e-12:
            raise ValueError("matrix must be symmetric within 1e-12")
        if np.any(self.values < 0):
            raise ValueError("distances must be nonnegative")

    @property
    def size(self) -> int:
        return len(self.labels)

    def upper_triangle(self) -> np.ndarray:
        iu = np.triu_indices(self.size, k=1)
        return self.values[iu]


def jaccard_distance(vocab_a: Set[str], vocab_b: Set[str]) -> float:
    """1 minus Jaccard similarity of two token sets."""
    if not vocab_a or not vocab_b:
        raise ValueError("vocabularies must be nonempty")
    inter = len(vocab_a & vocab_b)
    union = len(vocab_a | vocab_b)
    return 1.0 - inter / union


def build_distance_matrix(vocabs: Mapping[str, Set[str]]) -> DistanceMatrix:
    """Pairwise Jaccard distances; label order follows the input mapping."""
    labels = tuple(vocabs)
    if len(labels) < 2:
        raise ValueError("need at least two languages")
    n = len(labels)
    values = np.zeros((n, n), dtype=np.float64)
    sets = [vocabs[code] for code in labels]
    for i in range(n):
        for j in range(i + 1, n):
            d = jaccard_distance(sets[i], sets[j])
            values[i, j] = d
            values[j, i] = d
    return DistanceMatrix(labels=labels, values=values)


PhyloClassification = Mapping[str, tuple[str, str, str]]


def phylo_distance_matrix(
    classification: PhyloClassification, codes: Sequence[str]
) -> DistanceMatrix:
    """Ordinal divergence depth: 0 same branch, 1 same subfamily,
    2 same family, 3 different family."""
    for code in codes:
        if code not in classification:
            raise ValueError(f"language {code!r} is not classified")
    n = len(codes)
    values = np.zeros((n, n), dtype=np.float64)
    for i in range(n):
        fam_i, sub_i, br_i = classification[codes[i]]
        for j in range(i + 1, n):
            fam_j, sub_j, br_j = classification[codes[j]]
            if fam_i != fam_j:
                d = 3.0
            elif sub_i != sub_j:
                d = 2.0
            elif br_i != br_j:
                d = 1.0
            else:
                d = 0.0
            values[i, j] = d
            values[j, i] = d
    return DistanceMatrix(labels=tuple(codes), values=values)


@dataclass(frozen=True)
class MantelResult:
    r: float
    p: float
    permutations: int
    seed: int


def _pearson(x: np.ndarray, y: np.ndarray) -> float:
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc)))
    if denom == 0.0:
        raise ValueError("zero variance in distance triangle; correlation undefined")
    return float(np.dot(xc, yc)) / denom


def mantel_test(
    a: DistanceMatrix,
    b: DistanceMatrix,
    permutations: int = 999,
    seed: int = 0,
) -> MantelResult:
    """One-sided Mantel test between two distance matrices.

    r is the Pearson correlation over the upper triangles. The null
    distribution jointly permutes rows and columns of `b`, drawing one
    permutation per iteration from numpy's default_rng(seed); p uses
    add-one smoothing: (1 + #{permuted r >= observed r}) / (1 + N).
    """
    if a.labels != b.labels:
        raise ValueError("distance matrices must carry identical labels in order")
    n = a.size
    if n < 3:
        raise ValueError("need at least three languages")
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    iu = np.triu_indices(n, k=1)
    x = a.values[iu]
    y = b.values[iu]
    r_observed = _pearson(x, y)
    rng = np.random.default_rng(seed)
    exceed = 0
    for _ in range(permutations):
        perm = rng.permutation(n)
        y_perm = b.values[np.ix_(perm, perm)][iu]
        if _pearson(x, y_perm) >= r_observed:
            exceed += 1
    p = (1 + exceed) / (1 + permutations)
    return MantelResult(r=r_observed, p=p, permutations=permutations, seed=seed)


@dataclass(frozen=True)
class SeparationResult:
    within_mean: float
    between_mean: float
    ratio: float
    per_family: dict[str, float]


def family_separation(
    d: DistanceMatrix, families: Mapping[str, str]
) -> SeparationResult:
    """Mean within-family vs between-family distance and their ratio."""
    missing = [code for code in d.labels if code not in families]
    if missing:
        raise ValueError(f"no family assignment for: {missing}")
    within: list[float] = []
    between: list[float] = []
    per_family_vals: dict[str, list[float]] = {}
    n = d.size
    for i in range(n):
        for j in range(i + 1, n):
            value = float(d.values[i, j])
            fam_i = families[d.labels[i]]
            fam_j = families[d.labels[j]]
            if fam_i == fam_j:
                within.append(value)
                per_family_vals.setdefault(fam_i, []).append(value)
            else:
                between.append(value)
    if not within:
        raise ValueError("no within-family pairs; need a family with >= 2 members")
    if not between:
        raise ValueError("no between-family pairs; need >= 2 families")
    within_mean = sum(within) / len(within)
    between_mean = sum(between) / len(between)
    per_family = {
        fam: sum(vals) / len(vals) for fam, vals in sorted(per_family_vals.items())
    }
    return SeparationResult(
        within_mean=within_mean,
        between_mean=between_mean,
        ratio=between_mean / within_mean,
        per_family=per_family,
    )


def find_homographs(
    glottosets: Mapping[str, Glottoset], min_tf: int = 100
) -> set[str]:
    """Words reaching tf >= min_tf in at least two languages."""
    return set(homograph_owners(glottosets, min_tf))


def homograph_owners(
    glottosets: Mapping[str, Glottoset], min_tf: int = 100
) -> dict[str, frozenset[str]]:
    """Homograph -> set of languages where it clears the tf threshold."""
    if len(glottosets) < 2:
        raise ValueError("need at least two glottosets")
    owners: dict[str, set[str]] = {}
    for code, gs in glottosets.items():
        for word, (tf, _df) in gs.entries.items():
            if tf >= min_tf:
                owners.setdefault(word, set()).add(code)
    return {
        word: frozenset(codes) for word, codes in owners.items() if len(codes) >= 2
    }


@dataclass(frozen=True)
class HomographReport:
    """Segmentation agreement of shared words across languages."""

    segmentations: dict[str, dict[str, tuple[str, ...]]]
    fraction_different: float
    fraction_identical: float
    pair_fractions: dict[tuple[str, str], float]
    pair_counts: dict[tuple[str, str], int]

    @property
    def homograph_count(self) -> int:
        return len(self.segmentations)


def homograph_report(
    homographs: Iterable[str],
    tokenizers: Mapping[str, MergeTable],
    owners: Mapping[str, frozenset[str]] | None = None,
) -> HomographReport:
    """Segment each homograph with each owning language's tokenizer.

    A homograph counts as "different" when any two owning languages
    disagree on the token sequence. Pair fractions are computed over the
    homographs both members of the pair own. Without `owners`, every
    tokenizer is assumed to own every homograph.
    """
    words = sorted(set(homographs))
    if not words:
        raise ValueError("homograph set is empty")
    codes = sorted(tokenizers)
    segmentations: dict[str, dict[str, tuple[str, ...]]] = {}
    n_different = 0
    pair_total: dict[tuple[str, str], int] = {}
    pair_diff: dict[tuple[str, str], int] = {}
    for word in words:
        possessing = sorted(owners[word]) if owners is not None else codes
        segs = {
            code: tuple(encode_word(tokenizers[code], word)) for code in possessing
        }
        segmentations[word] = segs
        distinct = set(segs.values())
        if len(distinct) > 1:
            n_different += 1
        for i, code_i in enumerate(possessing):
            for code_j in possessing[i + 1 :]:
                pair = (code_i, code_j) if code_i < code_j else (code_j, code_i)
                pair_total[pair] = pair_total.get(pair, 0) + 1
                if segs[code_i] != segs[code_j]:
                    pair_diff[pair] = pair_diff.get(pair, 0) + 1
    fraction_different = n_different / len(words)
    pair_fractions = {
        pair: pair_diff.get(pair, 0) / total
        for pair, total in sorted(pair_total.items())
    }
    return HomographReport(
        segmentations=segmentations,
        fraction_different=fraction_different,
        fraction_identical=1.0 - fraction_different,
        pair_fractions=pair_fractions,
        pair_counts=dict(sorted(pair_total.items())),
    )


@dataclass(frozen=True)
class BoundaryEvalResult:
    """Micro-averaged boundary metrics for BPE and its random baseline."""

    bpe_precision: float
    bpe_recall: float
    bpe_f1: float
    random_precision: float
    random_recall: float
    random_f1: float
    word_count: int


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def _micro(matched: int, predicted: int, gold: int) -> tuple[float, float, float]:
    precision = matched / predicted if predicted else 0.0
    recall = matched / gold if gold else 0.0
    return precision, recall, _f1(precision, recall)


def bpe_boundaries(table: MergeTable, word: str) -> set[int]:
    """Interior split positions implied by the word's token sequence."""
    positions = set()
    offset = 0
    tokens = encode_word(table, word)
    for token in tokens[:-1]:
        offset += len(token)
        positions.add(offset)
    return positions


def boundary_eval(
    gold: Mapping[str, Set[int]],
    table: MergeTable,
    baseline_trials: int = 100,
    seed: int = 0,
) -> BoundaryEvalResult:
    """Score BPE boundaries against gold morpheme boundaries.

    Precision, recall, and F1 are micro-averaged: matched/predicted/gold
    totals are pooled over all words before dividing. The baseline
    places, per word, as many boundaries as BPE predicted, uniformly
    without replacement among interior positions, and its metrics are
    averaged over `baseline_trials` seeded trials.
    """
    if not gold:
        raise ValueError("gold segmentation set is empty")
    if baseline_trials < 1:
        raise ValueError("baseline_trials must be >= 1")
    words = sorted(gold)
    predictions: dict[str, set[int]] = {}
    total_matched = total_predicted = total_gold = 0
    for word in words:
        interior = len(word) - 1
        positions = set(gold[word])
        if any(pos < 1 or pos > interior for pos in positions):
            raise ValueError(
                f"gold boundaries for {word!r} fall outside interior positions"
            )
        predicted = bpe_boundaries(table, word)
        predictions[word] = predicted
        total_matched += len(predicted & positions)
        total_predicted += len(predicted)
        total_gold += len(positions)
    bpe_p, bpe_r, bpe_f1 = _micro(total_matched, total_predicted, total_gold)

    rng = np.random.default_rng(seed)
    trial_metrics = np.zeros((baseline_trials, 3), dtype=np.float64)
    for trial in range(baseline_trials):
        matched = 0
        for word in words:
            k = len(predictions[word])
            if k == 0:
                continue
            interior = len(word) - 1
            draw = rng.choice(interior, size=k, replace=False) + 1
            matched += len(set(int(p) for p in draw) & gold[word])
        trial_metrics[trial] = _micro(matched, total_predicted, total_gold)
    rand_p, rand_r, rand_f1 = trial_metrics.mean(axis=0)
    return BoundaryEvalResult(
        bpe_precision=bpe_p,
        bpe_recall=bpe_r,
        bpe_f1=bpe_f1,
        random_precision=float(rand_p),
        random_recall=float(rand_r),
        random_f1=float(rand_f1),
        word_count=len(words),
    )


def read_classification(path: str | Path) -> dict[str, tuple[str, str, str]]:
    """Read `code<TAB>family<TAB>subfamily<TAB>branch` rows."""
    path = Path(path)
    classification: dict[str, tuple[str, str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 4 or not all(fields):
                raise MalformedInputError(
                    str(path), line_no, "expected code<TAB>family<TAB>subfamily<TAB>branch"
                )
            code = fields[0]
            if code in classification:
                raise MalformedInputError(str(path), line_no, f"duplicate code {code!r}")
            classification[code] = (fields[1], fields[2], fields[3])
    if not classification:
        raise MalformedInputError(str(path), 1, "no classification rows found")
    return classification


def read_gold_segmentations(path: str | Path) -> dict[str, set[int]]:
    """Read `word<TAB>seg` rows where seg marks morph breaks with '|'."""
    path = Path(path)
    gold: dict[str, set[int]] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) != 2:
                raise MalformedInputError(str(path), line_no, "expected word<TAB>seg")
            word, seg = fields
            morphs = seg.split("|")
            if "".join(morphs) != word or any(not m for m in morphs):
                raise MalformedInputError(
                    str(path), line_no, f"segmentation {seg!r} does not spell {word!r}"
                )
            if word in gold:
                raise MalformedInputError(str(path), line_no, f"duplicate word {word!r}")
            positions = set()
            offset = 0
            for morph in morphs[:-1]:
                offset += len(morph)
                positions.add(offset)
            gold[word] = positions
    if not gold:
        raise MalformedInputError(str(path), 1, "no gold rows found")
    return gold


def write_distance_csv(matrix: DistanceMatrix, path: str | Path) -> None:
    """CSV with the label list as both header row and first column."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([""] + list(matrix.labels))
        for i, label in enumerate(matrix.labels):
            writer.writerow([label] + [repr(float(v)) for v in matrix.values[i]])


def read_distance_csv(path: str | Path) -> DistanceMatrix:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) < 3 or rows[0][0] != "":
        raise MalformedInputError(str(path), 1, "expected empty corner cell plus labels")
    labels = tuple(rows[0][1:])
    n = len(labels)
    if len(rows) != n + 1:
        raise MalformedInputError(str(path), len(rows), f"expected {n} data rows")
    values = np.zeros((n, n), dtype=np.float64)
    for i, row in enumerate(rows[1:], start=0):
        line_no = i + 2
        if len(row) != n + 1:
            raise MalformedInputError(str(path), line_no, f"expected {n + 1} cells")
        if row[0] != labels[i]:
            raise MalformedInputError(
                str(path), line_no, f"row label {row[0]!r} does not match header"
            )
        try:
            values[i] = [float(cell) for cell in row[1:]]
        except ValueError:
            raise MalformedInputError(str(path), line_no, "non-numeric distance") from None
    try:
        return DistanceMatrix(labels=labels, values=values)
    except ValueError as exc:
        raise MalformedInputError(str(path), 1, str(exc)) from exc
