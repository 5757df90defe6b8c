"""Whitespace tokenization into word blocks, and byte-exact reassembly.

Text is treated as a sequence of Unicode scalar values and normalized to
NFC on ingestion.  Tokens are maximal non-whitespace runs; punctuation and
symbol characters are stripped only at token edges, so inner punctuation
("TWAIN.DLL", "IEEE-1394", "2.0") stays part of the core.  Digits are
ordinary token characters, including Arabic-Indic digits.

Hyphenated line-break rejoining is out of scope here (see README).
"""

from __future__ import annotations

import re
import unicodedata
from collections.abc import Iterable

from .textmodel import Block, BlockSequence, CorrectedDocument, CorrectionOutcome, Token

DEFAULT_BLOCK_SIZE = 5

_TOKEN_RE = re.compile(r"\S+")


def _is_edge_punct(ch: str) -> bool:
    # Unicode punctuation (P*) and symbols (S*) are strippable at edges
    return unicodedata.category(ch)[0] in ("P", "S")


def split_affixes(surface: str) -> tuple[str, str, str]:
    """Split a token surface into (leading punctuation, core, trailing punctuation)."""
    i, j = 0, len(surface)
    while i < j and _is_edge_punct(surface[i]):
        i += 1
    while j > i and _is_edge_punct(surface[j - 1]):
        j -= 1
    return surface[:i], surface[i:j], surface[j:]


def tokenize(text: str, block_size: int = DEFAULT_BLOCK_SIZE) -> BlockSequence:
    """Cut ``text`` into blocks of at most ``block_size`` tokens.

    The returned sequence records the NFC-normalized source text and exact
    token spans, so ``reassemble`` with all-accepted outcomes reproduces it
    byte for byte.  Raises ``ValueError`` for ``block_size < 1``.
    """
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")
    normalized = unicodedata.normalize("NFC", text)
    tokens: list[Token] = []
    for match in _TOKEN_RE.finditer(normalized):
        surface = match.group()
        leading, core, trailing = split_affixes(surface)
        tokens.append(
            Token(
                surface=surface,
                core=core,
                leading=leading,
                trailing=trailing,
                span=(match.start(), match.end()),
            )
        )
    blocks = tuple(
        Block(index=i, tokens=tuple(tokens[pos : pos + block_size]))
        for i, pos in enumerate(range(0, len(tokens), block_size))
    )
    return BlockSequence(blocks=blocks, source_text=normalized, block_size=block_size)


def transfer_case(original: str, replacement: str) -> str:
    """Carry the original core's casing shape onto a replacement core.

    A replacement that differs only by case keeps the original verbatim;
    otherwise all-caps originals (length > 1) uppercase the whole
    replacement, and a capitalized first letter is restored.
    """
    if not original or not replacement:
        return replacement
    if original.lower() == replacement.lower():
        return original
    if len(original) > 1 and original.isupper():
        return replacement.upper()
    if original[0].isupper():
        return replacement[0].upper() + replacement[1:]
    return replacement


def reassemble(sequence: BlockSequence, outcomes: Iterable[CorrectionOutcome]) -> CorrectedDocument:
    """Rebuild document text from per-block outcomes.

    Accepted blocks are emitted from the source slice unchanged.  Replaced
    blocks substitute each token's core with the corresponding replacement
    core (casing transferred via :func:`transfer_case`) while keeping
    leading/trailing punctuation and all inter-token whitespace.

    Raises ``ValueError`` when outcomes do not cover every block exactly
    once in order, or when a replacement core count does not match the
    block's token count.
    """
    outcome_list = tuple(outcomes)
    if len(outcome_list) != len(sequence.blocks):
        raise ValueError(
            f"{len(outcome_list)} outcomes for {len(sequence.blocks)} blocks"
        )
    pieces: list[str] = []
    pos = 0
    for block, outcome in zip(sequence.blocks, outcome_list):
        if outcome.block_index != block.index:
            raise ValueError(
                f"outcome for block {outcome.block_index} paired with block {block.index}"
            )
        replacements: tuple[str, ...] | None = None
        if outcome.status == "replaced":
            replacements = outcome.replacement_cores
            assert replacements is not None
            if len(replacements) != len(block.tokens):
                raise ValueError(
                    f"block {block.index}: {len(replacements)} replacement cores "
                    f"for {len(block.tokens)} tokens"
                )
        for k, token in enumerate(block.tokens):
            start, end = token.span
            pieces.append(sequence.source_text[pos:start])
            if replacements is None:
                pieces.append(token.surface)
            else:
                core = transfer_case(token.core, replacements[k])
                pieces.append(token.leading + core + token.trailing)
            pos = end
    pieces.append(sequence.source_text[pos:])
    return CorrectedDocument(text="".join(pieces), outcomes=outcome_list)


def accept_all(sequence: BlockSequence) -> tuple[CorrectionOutcome, ...]:
    """Outcomes that keep every block unchanged."""
    return tuple(
        CorrectionOutcome(
            block_index=block.index,
            status="accepted",
            original_text=block_source_text(sequence, block),
        )
        for block in sequence.blocks
    )


def block_source_text(sequence: BlockSequence, block: Block) -> str:
    """The exact source slice spanned by a block's tokens."""
    return sequence.source_text[block.tokens[0].span[0] : block.tokens[-1].span[1]]
