"""Did-you-mean engine over an n-gram model.

Given the case-folded word cores of one block, the engine either accepts
the block (its exact word sequence is frequent enough in the model) or
searches nearby word sequences for one whose language-model score, less a
per-edit channel penalty, beats the original.  The search is a beam over
token positions; candidate words come from the model vocabulary within a
bounded edit distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections.abc import Sequence

from .editdist import NeighborhoodIndex
from .ngram import DEFAULT_ALPHA, NGramModel, logscore_word
from .noise import ConfusionTable

# words this short only admit a single edit
SHORT_WORD_MAX_LEN = 4


@dataclass(frozen=True)
class SuggestionConfig:
    """Tuning knobs for the suggestion search."""

    min_block_count: int = 1
    max_edit_distance: int = 2
    beam_width: int = 8
    backoff_alpha: float = DEFAULT_ALPHA
    channel_penalty: float = 1.5
    acceptance_margin: float = 0.0
    confusion_table: ConfusionTable | None = None

    def __post_init__(self) -> None:
        if self.min_block_count < 0:
            raise ValueError(f"min_block_count must be >= 0, got {self.min_block_count}")
        if self.max_edit_distance < 1:
            raise ValueError(f"max_edit_distance must be >= 1, got {self.max_edit_distance}")
        if self.beam_width < 1:
            raise ValueError(f"beam_width must be >= 1, got {self.beam_width}")
        if not 0.0 < self.backoff_alpha < 1.0:
            raise ValueError(f"backoff_alpha must be in (0, 1), got {self.backoff_alpha}")
        if self.channel_penalty < 0.0:
            raise ValueError(f"channel_penalty must be >= 0, got {self.channel_penalty}")
        if self.acceptance_margin < 0.0:
            raise ValueError(f"acceptance_margin must be >= 0, got {self.acceptance_margin}")

    def effective_distance(self, word: str) -> int:
        return 1 if len(word) <= SHORT_WORD_MAX_LEN else self.max_edit_distance


def discounted_channel_cost(original: str, candidate: str, penalty: float, pairs: frozenset[tuple[str, str]]) -> float:
    """Minimal channel cost with confusion-pair substitutions at half penalty.

    Insertions and deletions cost one penalty each; substitutions cost one
    penalty, or half when the (original, candidate) character pair is in
    the confusion table.  With an empty pair set this equals penalty times
    the plain edit distance.
    """
    half = penalty / 2.0
    previous = [j * penalty for j in range(len(candidate) + 1)]
    for i, oc in enumerate(original, start=1):
        current = [i * penalty] + [0.0] * len(candidate)
        for j, cc in enumerate(candidate, start=1):
            if oc == cc:
                sub = previous[j - 1]
            else:
                sub = previous[j - 1] + (half if (oc, cc) in pairs else penalty)
            current[j] = min(previous[j] + penalty, current[j - 1] + penalty, sub)
        previous = current
    return previous[-1]


class Suggester:
    """Reusable suggestion engine; builds its candidate index once."""

    def __init__(self, model: NGramModel, config: SuggestionConfig | None = None) -> None:
        self.model = model
        self.config = config or SuggestionConfig()
        self._index = NeighborhoodIndex(model.vocabulary, self.config.max_edit_distance)
        self._candidate_cache: dict[str, tuple[tuple[str, int], ...]] = {}

    def candidates(self, word: str) -> tuple[tuple[str, int], ...]:
        """Vocabulary words within the word's effective edit distance, plus itself."""
        cached = self._candidate_cache.get(word)
        if cached is not None:
            return cached
        k = self.config.effective_distance(word)
        found = dict(self._index.lookup(word, k))
        found[word] = 0  # the original is always reachable, even out of vocabulary
        result = tuple(sorted(found.items(), key=lambda item: (item[1], item[0])))
        self._candidate_cache[word] = result
        return result

    def _channel_cost(self, original: str, candidate: str, dist: int) -> float:
        table = self.config.confusion_table
        if table is None or original == candidate:
            return self.config.channel_penalty * dist
        return discounted_channel_cost(original, candidate, self.config.channel_penalty, table.pairs)

    def _objective(self, query: Sequence[str], sequence: Sequence[str], dists: Sequence[int]) -> float:
        # same accumulation order as the beam, so objectives compare bitwise
        total = 0.0
        for i in range(len(sequence)):
            total += logscore_word(self.model, sequence, i, self.config.backoff_alpha)
            total -= self._channel_cost(query[i], sequence[i], dists[i])
        return total

    def did_you_mean(self, query_cores: Sequence[str]) -> tuple[str, ...] | None:
        """Best correction for one block of word cores, or None to accept.

        Deterministic: tied objectives are resolved by lower total edit
        distance, then lexicographic order of the candidate sequence.
        """
        query = tuple(query_cores)
        if not query:
            raise ValueError("query must contain at least one word")
        if any((not w) or any(ch.isspace() for ch in w) for w in query):
            raise ValueError(f"query words must be non-empty and contain no whitespace: {query!r}")
        cfg = self.config
        if len(query) <= self.model.order and self.model.count(query) >= cfg.min_block_count:
            return None
        # beam state: (words so far, total edit distance, objective)
        beam: list[tuple[tuple[str, ...], int, float]] = [((), 0, 0.0)]
        for i, original in enumerate(query):
            extended: list[tuple[tuple[str, ...], int, float]] = []
            for words, dist_sum, objective in beam:
                for candidate, dist in self.candidates(original):
                    new_words = words + (candidate,)
                    new_objective = (
                        objective
                        + logscore_word(self.model, new_words, i, cfg.backoff_alpha)
                        - self._channel_cost(original, candidate, dist)
                    )
                    extended.append((new_words, dist_sum + dist, new_objective))
            extended.sort(key=lambda state: (-state[2], state[1], state[0]))
            beam = extended[: cfg.beam_width]
        best_words, _, best_objective = beam[0]
        if best_words == query:
            return None
        query_objective = self._objective(query, query, [0] * len(query))
        if best_objective >= query_objective + cfg.acceptance_margin:
            return best_words
        return None


def did_you_mean(
    model: NGramModel, config: SuggestionConfig, query_cores: Sequence[str]
) -> tuple[str, ...] | None:
    """One-shot form of :meth:`Suggester.did_you_mean`."""
    return Suggester(model, config).did_you_mean(query_cores)
