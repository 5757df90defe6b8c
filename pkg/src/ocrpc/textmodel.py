"""Value types for documents split into fixed-size word blocks.

A document is tokenized into :class:`Token` objects grouped into
:class:`Block` runs of at most ``block_size`` tokens.  Every type here is
immutable; construction validates the structural invariants so downstream
code can rely on them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

OutcomeStatus = Literal["accepted", "replaced"]


@dataclass(frozen=True, slots=True)
class Token:
    """One whitespace-delimited unit of text.

    ``surface`` is the exact source slice; ``core`` is the surface with
    leading/trailing punctuation split off into ``leading``/``trailing``.
    ``span`` is the half-open (start, end) offset range into the source
    text the token was cut from.
    """

    surface: str
    core: str
    leading: str
    trailing: str
    span: tuple[int, int]

    def __post_init__(self) -> None:
        if self.leading + self.core + self.trailing != self.surface:
            raise ValueError(
                f"token parts {self.leading!r}+{self.core!r}+{self.trailing!r} "
                f"do not reassemble surface {self.surface!r}"
            )
        start, end = self.span
        if start < 0 or end - start != len(self.surface):
            raise ValueError(f"span {self.span} inconsistent with surface {self.surface!r}")
        if not self.surface:
            raise ValueError("token surface must be non-empty")


@dataclass(frozen=True, slots=True)
class Block:
    """A contiguous run of tokens, at most the sequence's block size."""

    index: int
    tokens: tuple[Token, ...]

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError("block index must be >= 0")
        if not self.tokens:
            raise ValueError("block must contain at least one token")

    @property
    def cores(self) -> tuple[str, ...]:
        return tuple(t.core for t in self.tokens)


@dataclass(frozen=True)
class BlockSequence:
    """An entire document cut into blocks, keeping the exact source text.

    Token spans index into ``source_text``, so the inter-token whitespace
    is recoverable and reassembly is byte-exact.
    """

    blocks: tuple[Block, ...]
    source_text: str
    block_size: int

    def __post_init__(self) -> None:
        if self.block_size < 1:
            raise ValueError("block_size must be >= 1")
        for i, block in enumerate(self.blocks):
            if block.index != i:
                raise ValueError(f"block {i} carries index {block.index}")
            # only the final block may be short
            if len(block.tokens) != self.block_size and i != len(self.blocks) - 1:
                raise ValueError(f"non-final block {i} has {len(block.tokens)} tokens")
            if len(block.tokens) > self.block_size:
                raise ValueError(f"block {i} exceeds block_size {self.block_size}")
        prev_end = 0
        for token in self.tokens():
            start, end = token.span
            if start < prev_end or end > len(self.source_text):
                raise ValueError(f"token span {token.span} out of order or out of range")
            if self.source_text[start:end] != token.surface:
                raise ValueError(f"span {token.span} does not contain surface {token.surface!r}")
            prev_end = end

    def tokens(self):
        for block in self.blocks:
            yield from block.tokens

    @property
    def token_count(self) -> int:
        return sum(len(b.tokens) for b in self.blocks)


@dataclass(frozen=True, slots=True)
class CorrectionOutcome:
    """Decision for one block: keep it, or rewrite its token cores."""

    block_index: int
    status: OutcomeStatus
    original_text: str
    replacement_cores: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.status not in ("accepted", "replaced"):
            raise ValueError(f"unknown outcome status {self.status!r}")
        if self.status == "replaced" and self.replacement_cores is None:
            raise ValueError("replaced outcome requires replacement_cores")
        if self.status == "accepted" and self.replacement_cores is not None:
            raise ValueError("accepted outcome must not carry replacement_cores")


@dataclass(frozen=True)
class CorrectedDocument:
    """Reassembled document text plus the per-block decisions behind it."""

    text: str
    outcomes: tuple[CorrectionOutcome, ...] = field(default=())

    def __post_init__(self) -> None:
        for i, outcome in enumerate(self.outcomes):
            if outcome.block_index != i:
                raise ValueError(f"outcome {i} carries block_index {outcome.block_index}")
