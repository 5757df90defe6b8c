"""Word-level error measurement for correction runs.

Errors are counted by Levenshtein alignment over token cores, so
punctuation and whitespace differences are invisible while word identity
is compared case-sensitively.  ``evaluate`` aligns a reference against
both the uncorrected and the corrected text and classifies what the
corrector did to every error position.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from collections.abc import Iterable, Sequence
from typing import Literal

from .tokenizer import tokenize

ErrorCategory = Literal["corrected", "falsely_corrected", "uncorrected", "newly_introduced"]

TRUNCATION_PLACES = 3


def evaluation_words(text: str) -> list[str]:
    """Token cores in order, punctuation-only tokens dropped."""
    return [t.core for t in tokenize(text, block_size=1).tokens() if t.core]


def word_errors(reference: Sequence[str], hypothesis: Sequence[str]) -> tuple[int, list[tuple[str | None, str | None]]]:
    """Minimal word edit distance plus one optimal alignment.

    Alignment rows are (reference word, hypothesis word) pairs where None
    marks the absent side of an insertion or deletion.
    """
    rows, cols = len(reference), len(hypothesis)
    dist = [[0] * (cols + 1) for _ in range(rows + 1)]
    for i in range(rows + 1):
        dist[i][0] = i
    for j in range(cols + 1):
        dist[0][j] = j
    for i in range(1, rows + 1):
        ref_word = reference[i - 1]
        row = dist[i]
        prev = dist[i - 1]
        for j in range(1, cols + 1):
            row[j] = min(
                prev[j] + 1,
                row[j - 1] + 1,
                prev[j - 1] + (ref_word != hypothesis[j - 1]),
            )
    pairs: list[tuple[str | None, str | None]] = []
    i, j = rows, cols
    while i > 0 or j > 0:
        if i > 0 and j > 0 and dist[i][j] == dist[i - 1][j - 1] + (reference[i - 1] != hypothesis[j - 1]):
            pairs.append((reference[i - 1], hypothesis[j - 1]))
            i, j = i - 1, j - 1
        elif i > 0 and dist[i][j] == dist[i - 1][j] + 1:
            pairs.append((reference[i - 1], None))
            i -= 1
        else:
            pairs.append((None, hypothesis[j - 1]))
            j -= 1
    pairs.reverse()
    return dist[rows][cols], pairs


def error_rate(errors: int, total_words: int) -> float:
    """Exact quotient errors / total_words; total must be positive.

    More errors than words is legal (insertions); the rate then exceeds 1
    and is reported as-is.
    """
    if total_words <= 0:
        raise ValueError(f"total_words must be > 0, got {total_words}")
    if errors < 0:
        raise ValueError(f"errors must be >= 0, got {errors}")
    return errors / total_words


def improvement(rate_before: float, rate_after: float) -> float:
    """Ratio of error rates; infinite when everything was fixed, 1.0 when
    there was nothing to fix."""
    if rate_before < 0 or rate_after < 0:
        raise ValueError("error rates cannot be negative")
    if rate_after == 0:
        return 1.0 if rate_before == 0 else math.inf
    return rate_before / rate_after


def truncate_rate(rate: float, places: int = TRUNCATION_PLACES) -> float:
    """Truncate a rate toward zero at ``places`` decimals (display convention)."""
    scale = 10.0 ** places
    return math.floor(rate * scale + 1e-9) / scale


def percent_display(rate: float) -> str:
    """A rate as a truncated one-decimal percentage, e.g. 0.2142 -> '21.4%'."""
    return f"{truncate_rate(rate) * 100:.1f}%"


def display_improvement(rate_before: float, rate_after: float) -> float:
    """Improvement recomputed from the truncated display rates, 2 decimals.

    This is the figure a reader reconstructs from the displayed
    percentages, so reports carry it alongside the exact ratio.
    """
    return round(improvement(truncate_rate(rate_before), truncate_rate(rate_after)), 2)


def mean_improvement(values: Iterable[float]) -> float:
    """Arithmetic mean of per-document improvement ratios."""
    return statistics.fmean(values)


@dataclass(frozen=True, slots=True)
class ErrorDetail:
    """One classified error position: what the reader should have seen,
    what OCR produced, and what survived correction."""

    reference: str | None
    before: str | None
    after: str | None
    category: ErrorCategory


@dataclass(frozen=True)
class EvaluationReport:
    total_words: int
    errors_before: int
    errors_after: int
    error_rate_before: float
    error_rate_after: float
    improvement: float
    corrected: int
    falsely_corrected: int
    uncorrected: int
    newly_introduced: int
    details: tuple[ErrorDetail, ...]

    @property
    def improvement_is_infinite(self) -> bool:
        return math.isinf(self.improvement)


def _alignment_view(
    reference: Sequence[str], pairs: list[tuple[str | None, str | None]]
) -> tuple[list[str | None], dict[int, list[str]]]:
    """Per-reference-position hypothesis words, plus insertions by gap.

    Gap g collects hypothesis words inserted before reference position g.
    """
    aligned: list[str | None] = [None] * len(reference)
    insertions: dict[int, list[str]] = {}
    position = 0
    for ref_word, hyp_word in pairs:
        if ref_word is None:
            assert hyp_word is not None
            insertions.setdefault(position, []).append(hyp_word)
        else:
            aligned[position] = hyp_word
            position += 1
    return aligned, insertions


def evaluate(reference_text: str, ocr_text: str, corrected_text: str) -> EvaluationReport:
    """Measure a correction run against its reference.

    The four classification counts partition the error totals: corrected +
    falsely_corrected + uncorrected == errors_before, and errors_after ==
    falsely_corrected + uncorrected + newly_introduced.
    """
    reference = evaluation_words(reference_text)
    before_words = evaluation_words(ocr_text)
    after_words = evaluation_words(corrected_text)
    if not reference:
        raise ValueError("reference text contains no words")
    errors_before, pairs_before = word_errors(reference, before_words)
    errors_after, pairs_after = word_errors(reference, after_words)
    before_at, before_ins = _alignment_view(reference, pairs_before)
    after_at, after_ins = _alignment_view(reference, pairs_after)

    details: list[ErrorDetail] = []
    counts = {"corrected": 0, "falsely_corrected": 0, "uncorrected": 0, "newly_introduced": 0}

    def record(category: ErrorCategory, ref: str | None, before: str | None, after: str | None) -> None:
        counts[category] += 1
        details.append(ErrorDetail(reference=ref, before=before, after=after, category=category))

    for i, ref_word in enumerate(reference):
        wrong_before = before_at[i] != ref_word
        wrong_after = after_at[i] != ref_word
        if wrong_before and not wrong_after:
            record("corrected", ref_word, before_at[i], after_at[i])
        elif wrong_before and wrong_after:
            category: ErrorCategory = "uncorrected" if before_at[i] == after_at[i] else "falsely_corrected"
            record(category, ref_word, before_at[i], after_at[i])
        elif wrong_after:
            record("newly_introduced", ref_word, before_at[i], after_at[i])

    for gap in sorted(set(before_ins) | set(after_ins)):
        extra_before = list(before_ins.get(gap, []))
        extra_after = list(after_ins.get(gap, []))
        # inserted words present on both sides survived correction unchanged
        for word in list(extra_before):
            if word in extra_after:
                extra_before.remove(word)
                extra_after.remove(word)
                record("uncorrected", None, word, word)
        while extra_before and extra_after:
            record("falsely_corrected", None, extra_before.pop(0), extra_after.pop(0))
        for word in extra_before:
            record("corrected", None, word, None)
        for word in extra_after:
            record("newly_introduced", None, None, word)

    rate_before = error_rate(errors_before, len(reference))
    rate_after = error_rate(errors_after, len(reference))
    return EvaluationReport(
        total_words=len(reference),
        errors_before=errors_before,
        errors_after=errors_after,
        error_rate_before=rate_before,
        error_rate_after=rate_after,
        improvement=improvement(rate_before, rate_after),
        corrected=counts["corrected"],
        falsely_corrected=counts["falsely_corrected"],
        uncorrected=counts["uncorrected"],
        newly_introduced=counts["newly_introduced"],
        details=tuple(details),
    )
