"""Block-by-block document correction against a suggestion provider.

The document is tokenized into fixed-size word blocks; each block's
case-folded cores are joined with single spaces and sent to the provider
exactly once (plus bounded retries on transient transport errors).
Accepted blocks pass through untouched; replacements are re-cased and
spliced back with all punctuation and whitespace preserved, so the output
is byte-identical to the input wherever nothing was replaced.
"""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .providers import Provider, ProviderError
from .textmodel import Block, BlockSequence, CorrectedDocument, CorrectionOutcome
from .tokenizer import DEFAULT_BLOCK_SIZE, block_source_text, reassemble, tokenize

logger = logging.getLogger(__name__)

MAX_TRANSIENT_RETRIES = 2


@dataclass(frozen=True)
class CorrectorConfig:
    block_size: int = DEFAULT_BLOCK_SIZE
    parallelism: int = 1
    fail_open: bool = True

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size}")
        if self.parallelism < 1:
            raise ValueError(f"parallelism must be >= 1, got {self.parallelism}")


@dataclass
class CorrectionStats:
    blocks_total: int = 0
    blocks_replaced: int = 0
    provider_errors: int = 0
    mismatched_suggestions: int = 0
    elapsed_seconds: float = 0.0


class CorrectionError(Exception):
    """Raised in fail-closed mode when the provider definitively failed."""


def block_query(block: Block) -> str:
    """The provider query for a block: case-folded cores, single-spaced.

    Tokens whose core is empty (pure punctuation) contribute nothing to
    the query; replacements leave them untouched.
    """
    return " ".join(t.core.lower() for t in block.tokens if t.core)


def _call_with_retries(provider: Provider, query: str):
    retries = 0
    while True:
        try:
            return provider.suggest(query)
        except ProviderError as exc:
            if exc.transient and retries < MAX_TRANSIENT_RETRIES:
                retries += 1
                logger.warning("transient provider error (retry %d/%d): %s", retries, MAX_TRANSIENT_RETRIES, exc)
                continue
            raise


def _decide_block(
    block: Block, sequence: BlockSequence, provider: Provider, config: CorrectorConfig
) -> tuple[CorrectionOutcome, int, int]:
    """Outcome plus (provider error, discarded mismatch) tallies for one block."""
    original_text = block_source_text(sequence, block)
    accepted = CorrectionOutcome(block_index=block.index, status="accepted", original_text=original_text)
    query = block_query(block)
    try:
        response = _call_with_retries(provider, query)
    except ProviderError as exc:
        if not config.fail_open:
            raise CorrectionError(f"block {block.index}: provider failed: {exc}") from exc
        logger.warning("block %d: provider failed, keeping original: %s", block.index, exc)
        return accepted, 1, 0
    if response.suggestion is None or response.suggestion == query:
        return accepted, 0, 0
    words = response.suggestion.split()
    query_positions = [k for k, token in enumerate(block.tokens) if token.core]
    if len(words) != len(query_positions):
        logger.warning(
            "block %d: discarding suggestion with %d words for a %d-word query",
            block.index, len(words), len(query_positions),
        )
        return accepted, 0, 1
    replacements = [token.core for token in block.tokens]
    for position, word in zip(query_positions, words):
        replacements[position] = word
    outcome = CorrectionOutcome(
        block_index=block.index,
        status="replaced",
        original_text=original_text,
        replacement_cores=tuple(replacements),
    )
    return outcome, 0, 0


def post_correction(
    text: str, provider: Provider, config: CorrectorConfig | None = None
) -> tuple[CorrectedDocument, CorrectionStats]:
    """Correct a document block by block.

    With ``fail_open`` (the default) provider failures keep the affected
    block unchanged and are tallied in the stats; otherwise the first
    definitive failure raises :class:`CorrectionError`.  ``parallelism``
    m > 1 keeps up to m provider calls in flight; the output is identical
    to the sequential run for any deterministic provider.
    """
    if config is None:
        config = CorrectorConfig()
    started = time.perf_counter()
    sequence = tokenize(text, config.block_size)
    stats = CorrectionStats(blocks_total=len(sequence.blocks))
    if config.parallelism == 1 or len(sequence.blocks) <= 1:
        decisions = [_decide_block(b, sequence, provider, config) for b in sequence.blocks]
    else:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            futures = [
                pool.submit(_decide_block, b, sequence, provider, config)
                for b in sequence.blocks
            ]
            # collect in block order, so failures surface deterministically
            decisions = [f.result() for f in futures]
    outcomes = [outcome for outcome, _, _ in decisions]
    document = reassemble(sequence, outcomes)
    stats.blocks_replaced = sum(1 for o in outcomes if o.status == "replaced")
    stats.provider_errors = sum(errors for _, errors, _ in decisions)
    stats.mismatched_suggestions = sum(mismatches for _, _, mismatches in decisions)
    stats.elapsed_seconds = time.perf_counter() - started
    return document, stats
