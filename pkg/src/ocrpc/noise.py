"""Deterministic word-level corruption for correction benchmarks.

``inject`` corrupts exactly ``round(word_error_rate * token_count)``
distinct tokens, one character-level edit each, and reports every edit in
a log.  The seed-to-output mapping is part of the artifact contract: edits
are drawn from ``random.Random(seed)`` in the documented order (target
sample, then per target in ascending token order: operation choice, edit
position, replacement choice), and golden-file tests pin it.
"""

from __future__ import annotations

import math
import random
import string
from dataclasses import dataclass
from typing import Literal

from .tokenizer import tokenize

OpKind = Literal["deletion", "insertion", "substitution"]

_DEFAULT_CONFUSIONS = (
    ("B", "8"), ("8", "B"), ("S", "5"), ("5", "S"), ("O", "0"), ("0", "O"),
    ("b", "8"), ("8", "b"), ("s", "5"), ("5", "s"), ("o", "0"), ("0", "o"),
)


@dataclass(frozen=True)
class ConfusionTable:
    """Weighted character substitution pairs mimicking shape-alike OCR errors."""

    entries: tuple[tuple[str, str, float], ...]

    def __post_init__(self) -> None:
        seen: set[tuple[str, str]] = set()
        for source, target, weight in self.entries:
            for label, ch in (("source", source), ("target", target)):
                if len(ch) != 1 or ch.isspace():
                    raise ValueError(f"confusion {label} must be a single non-space character, got {ch!r}")
            if source == target:
                raise ValueError(f"confusion pair {source!r} -> {target!r} does not change the text")
            if weight <= 0:
                raise ValueError(f"confusion weight for {source!r} -> {target!r} must be > 0, got {weight}")
            if (source, target) in seen:
                raise ValueError(f"duplicate confusion pair {source!r} -> {target!r}")
            seen.add((source, target))

    @classmethod
    def default(cls) -> ConfusionTable:
        return cls(tuple((s, t, 1.0) for s, t in _DEFAULT_CONFUSIONS))

    @classmethod
    def from_path(cls, path: str) -> ConfusionTable:
        """Parse a TSV file of ``source TAB target TAB weight`` lines.

        Blank lines and lines starting with ``#`` are skipped.
        """
        entries: list[tuple[str, str, float]] = []
        with open(path, "r", encoding="utf-8-sig") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.rstrip("\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                fields = line.split("\t")
                if len(fields) != 3:
                    raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields, got {len(fields)}")
                source, target, weight_text = fields
                try:
                    weight = float(weight_text)
                except ValueError:
                    raise ValueError(f"{path}:{lineno}: bad weight {weight_text!r}") from None
                entries.append((source, target, weight))
        return cls(tuple(entries))

    @property
    def sources(self) -> frozenset[str]:
        return frozenset(e[0] for e in self.entries)

    @property
    def pairs(self) -> frozenset[tuple[str, str]]:
        return frozenset((e[0], e[1]) for e in self.entries)

    def targets_for(self, source: str) -> tuple[tuple[str, float], ...]:
        return tuple((t, w) for s, t, w in self.entries if s == source)


@dataclass(frozen=True)
class NoiseSpec:
    """Corruption parameters: how many tokens, which edits, which seed."""

    word_error_rate: float
    op_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)
    confusion_bias: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.word_error_rate <= 1.0:
            raise ValueError(f"word_error_rate must be in [0, 1], got {self.word_error_rate}")
        if len(self.op_mix) != 3 or any(p < 0 for p in self.op_mix):
            raise ValueError(f"op_mix must be 3 non-negative proportions, got {self.op_mix}")
        if abs(sum(self.op_mix) - 1.0) > 1e-9:
            raise ValueError(f"op_mix must sum to 1, got {self.op_mix}")
        if not 0.0 <= self.confusion_bias <= 1.0:
            raise ValueError(f"confusion_bias must be in [0, 1], got {self.confusion_bias}")


@dataclass(frozen=True, slots=True)
class NoiseEdit:
    """One applied corruption: which token, what kind, before and after."""

    token_index: int
    op: OpKind
    original_core: str
    corrupted_core: str


def _corrupt_core(core: str, op: OpKind, rng: random.Random, spec: NoiseSpec, table: ConfusionTable) -> str:
    if op == "deletion":
        p = rng.randrange(len(core))
        return core[:p] + core[p + 1 :]
    if op == "insertion":
        # duplicate one character, the classic double-strike
        p = rng.randrange(len(core))
        return core[: p + 1] + core[p] + core[p + 1 :]
    source_positions = [i for i, ch in enumerate(core) if ch in table.sources]
    if source_positions and rng.random() < spec.confusion_bias:
        p = rng.choice(source_positions)
        targets = table.targets_for(core[p])
        target = rng.choices([t for t, _ in targets], weights=[w for _, w in targets])[0]
        return core[:p] + target + core[p + 1 :]
    p = rng.randrange(len(core))
    letters = [ch for ch in string.ascii_lowercase if ch != core[p]]
    return core[:p] + rng.choice(letters) + core[p + 1 :]


def inject(text: str, spec: NoiseSpec, table: ConfusionTable | None = None) -> tuple[str, list[NoiseEdit]]:
    """Corrupt a document and return (noisy text, edit log).

    Exactly ``round(word_error_rate * token_count)`` distinct tokens are
    edited (round half up).  Only tokens whose core has length >= 2 are
    eligible, so every operation, deletion included, leaves a visible
    non-empty core; an error is raised when the target count exceeds the
    eligible token count.  Uncorrupted tokens and all whitespace and
    punctuation appear verbatim.  Rate 0 returns the text unchanged with an
    empty log.
    """
    if table is None:
        table = ConfusionTable.default()
    sequence = tokenize(text, block_size=1)
    tokens = [block.tokens[0] for block in sequence.blocks]
    if not tokens:
        raise ValueError("text contains no tokens to corrupt")
    n_targets = math.floor(spec.word_error_rate * len(tokens) + 0.5)
    eligible = [i for i, tok in enumerate(tokens) if len(tok.core) >= 2]
    if n_targets > len(eligible):
        raise ValueError(
            f"cannot corrupt {n_targets} tokens: only {len(eligible)} tokens "
            f"have cores of length >= 2"
        )
    rng = random.Random(spec.seed)
    chosen = sorted(rng.sample(eligible, n_targets))
    ops: tuple[OpKind, ...] = ("deletion", "insertion", "substitution")
    edits: list[NoiseEdit] = []
    corrupted: dict[int, str] = {}
    for idx in chosen:
        core = tokens[idx].core
        op = rng.choices(ops, weights=spec.op_mix)[0]
        new_core = _corrupt_core(core, op, rng, spec, table)
        corrupted[idx] = new_core
        edits.append(NoiseEdit(token_index=idx, op=op, original_core=core, corrupted_core=new_core))
    pieces: list[str] = []
    pos = 0
    for i, token in enumerate(tokens):
        start, end = token.span
        pieces.append(sequence.source_text[pos:start])
        if i in corrupted:
            pieces.append(token.leading + corrupted[i] + token.trailing)
        else:
            pieces.append(token.surface)
        pos = end
    pieces.append(sequence.source_text[pos:])
    return "".join(pieces), edits


def write_edit_log(edits: list[NoiseEdit], path: str) -> None:
    """Write an edit log as ``token_index TAB op TAB original TAB corrupted`` lines."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for edit in edits:
            fh.write(f"{edit.token_index}\t{edit.op}\t{edit.original_core}\t{edit.corrupted_core}\n")
