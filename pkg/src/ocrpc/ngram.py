"""Count-based n-gram language model with stupid-backoff scoring.

Counts are collected over case-folded token cores.  N-grams never cross a
paragraph boundary (paragraphs are blank-line delimited).  Training is
deterministic: the same corpus bytes always produce the same model, and
saving is byte-reproducible.
"""

from __future__ import annotations

import io
import math
import re
from dataclasses import dataclass, field
from collections.abc import Sequence

from .tokenizer import split_affixes

DEFAULT_ORDER = 5
DEFAULT_ALPHA = 0.4

_FORMAT_NAME = "ngram-model"
_FORMAT_VERSION = "v1"
_HEADER_RE = re.compile(r"^(\S+) (\S+) order=(\d+) tokens=(\d+)$")
_PARAGRAPH_RE = re.compile(r"\n[^\S\n]*\n")
_WORD_RE = re.compile(r"\S+")


class ModelFormatError(ValueError):
    """A model file does not conform to the text format."""


class UnsupportedModelVersion(ModelFormatError):
    """The model file declares a format version this code does not read."""


@dataclass(frozen=True)
class NGramModel:
    """Immutable n-gram count tables of orders 1..order.

    ``counts[n]`` maps an n-token tuple to its occurrence count.  The
    tables are plain dicts for lookup speed; treat them as read-only.
    """

    order: int
    counts: dict[int, dict[tuple[str, ...], int]]
    total_tokens: int
    vocabulary: frozenset[str] = field(repr=False)

    def __post_init__(self) -> None:
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.total_tokens < 1:
            raise ValueError("model must contain at least one token")

    def count(self, sequence: Sequence[str]) -> int:
        """Occurrences of a 1..order token sequence (case-folded lookup)."""
        n = len(sequence)
        if n < 1:
            raise ValueError("sequence must contain at least one token")
        if n > self.order:
            raise ValueError(f"sequence of {n} tokens exceeds model order {self.order}")
        key = tuple(w.lower() for w in sequence)
        return self.counts.get(n, {}).get(key, 0)


def corpus_words(text: str) -> list[list[str]]:
    """Case-folded token cores per paragraph, empty cores dropped."""
    paragraphs: list[list[str]] = []
    for chunk in _PARAGRAPH_RE.split(text):
        words = []
        for match in _WORD_RE.finditer(chunk):
            core = split_affixes(match.group())[1]
            if core:
                words.append(core.lower())
        if words:
            paragraphs.append(words)
    return paragraphs


def train(corpus: str, order: int = DEFAULT_ORDER, prune_below: int = 1) -> NGramModel:
    """Count all n-grams of orders 1..order over a training text.

    ``prune_below`` drops n-grams occurring fewer than that many times
    (default 1 keeps everything); token totals are recomputed from the
    surviving unigrams.  Raises ``ValueError`` for an invalid order or a
    corpus with no countable tokens.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if prune_below < 1:
        raise ValueError(f"prune_below must be >= 1, got {prune_below}")
    counts: dict[int, dict[tuple[str, ...], int]] = {n: {} for n in range(1, order + 1)}
    for words in corpus_words(corpus):
        for n in range(1, order + 1):
            table = counts[n]
            for i in range(len(words) - n + 1):
                gram = tuple(words[i : i + n])
                table[gram] = table.get(gram, 0) + 1
    if prune_below > 1:
        counts = {
            n: {g: c for g, c in table.items() if c >= prune_below}
            for n, table in counts.items()
        }
    total = sum(counts[1].values())
    if total == 0:
        raise ValueError("corpus contains no countable tokens")
    vocabulary = frozenset(g[0] for g in counts[1])
    return NGramModel(order=order, counts=counts, total_tokens=total, vocabulary=vocabulary)


def logscore_word(model: NGramModel, words: Sequence[str], i: int, alpha: float = DEFAULT_ALPHA) -> float:
    """Log stupid-backoff score of ``words[i]`` given its in-sequence context.

    The context is the longest run of up to order-1 preceding tokens.  An
    unseen continuation backs off to a shorter context with an ``alpha``
    multiplier; the empty context falls back to an add-one unigram ratio,
    so the result is always finite.
    """
    word = words[i]
    context = tuple(words[max(0, i - (model.order - 1)) : i])
    log_alpha = math.log(alpha)
    backoffs = 0
    while context:
        c = model.counts[len(context) + 1].get(context + (word,), 0)
        # denominator can only be absent in a hand-edited model file; back off
        denom = model.counts[len(context)].get(context, 0)
        if c > 0 and denom > 0:
            return backoffs * log_alpha + math.log(c / denom)
        context = context[1:]
        backoffs += 1
    unigram = model.counts[1].get((word,), 0)
    base = (unigram + 1) / (model.total_tokens + len(model.vocabulary))
    return backoffs * log_alpha + math.log(base)


def score(model: NGramModel, sequence: Sequence[str], alpha: float = DEFAULT_ALPHA) -> float:
    """Sum of per-word log backoff scores, case-folded; always finite, <= 0."""
    if not sequence:
        raise ValueError("sequence must contain at least one token")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    words = [w.lower() for w in sequence]
    total = 0.0
    for i in range(len(words)):
        total += logscore_word(model, words, i, alpha)
    return total


def save(model: NGramModel, path: str) -> None:
    """Write the model to a deterministic UTF-8 text file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        dump(model, fh)


def dump(model: NGramModel, fh: io.TextIOBase) -> None:
    fh.write(f"{_FORMAT_NAME} {_FORMAT_VERSION} order={model.order} tokens={model.total_tokens}\n")
    for n in sorted(model.counts):
        for gram in sorted(model.counts[n]):
            fh.write(f"{n}\t{' '.join(gram)}\t{model.counts[n][gram]}\n")


def load(path: str) -> NGramModel:
    """Read a model written by :func:`save`.

    Raises :class:`UnsupportedModelVersion` for a version other than v1 and
    :class:`ModelFormatError` (naming the line number) for a malformed
    header or record.
    """
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh)


def parse(fh: io.TextIOBase) -> NGramModel:
    header = fh.readline()
    match = _HEADER_RE.match(header.rstrip("\n"))
    if not match or match.group(1) != _FORMAT_NAME:
        raise ModelFormatError(f"line 1: malformed model header {header!r}")
    if match.group(2) != _FORMAT_VERSION:
        raise UnsupportedModelVersion(
            f"line 1: unsupported model version {match.group(2)!r}, expected {_FORMAT_VERSION}"
        )
    order = int(match.group(3))
    declared_total = int(match.group(4))
    if order < 1:
        raise ModelFormatError(f"line 1: order must be >= 1, got {order}")
    counts: dict[int, dict[tuple[str, ...], int]] = {n: {} for n in range(1, order + 1)}
    for lineno, line in enumerate(fh, start=2):
        line = line.rstrip("\n")
        if not line:
            raise ModelFormatError(f"line {lineno}: empty record")
        fields = line.split("\t")
        if len(fields) != 3:
            raise ModelFormatError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        n_text, gram_text, count_text = fields
        try:
            n = int(n_text)
        except ValueError:
            raise ModelFormatError(f"line {lineno}: bad n-gram size {n_text!r}") from None
        if not 1 <= n <= order:
            raise ModelFormatError(f"line {lineno}: n-gram size {n} outside 1..{order}")
        gram = tuple(gram_text.split(" "))
        if len(gram) != n or any(not w for w in gram):
            raise ModelFormatError(f"line {lineno}: token list {gram_text!r} does not match size {n}")
        try:
            count = int(count_text)
        except ValueError:
            raise ModelFormatError(f"line {lineno}: corrupted count {count_text!r}") from None
        if count < 1:
            raise ModelFormatError(f"line {lineno}: corrupted count {count}")
        if gram in counts[n]:
            raise ModelFormatError(f"line {lineno}: duplicate record for {gram_text!r}")
        counts[n][gram] = count
    total = sum(counts[1].values())
    if total != declared_total:
        raise ModelFormatError(
            f"unigram counts sum to {total} but header declares tokens={declared_total}"
        )
    if total == 0:
        raise ModelFormatError("model file contains no unigram records")
    vocabulary = frozenset(g[0] for g in counts[1])
    return NGramModel(order=order, counts=counts, total_tokens=total, vocabulary=vocabulary)
