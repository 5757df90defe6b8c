"""Block-based OCR post-correction toolkit.

Pipeline: tokenize a document into fixed-size word blocks, ask a
suggestion provider for a better reading of each block, splice accepted
and corrected blocks back together byte-exactly, and measure the
improvement in word error rate.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .corrector import CorrectionError, CorrectionStats, CorrectorConfig, post_correction
from .editdist import NeighborhoodIndex, distance, within
from .evaluate import (
    EvaluationReport,
    ErrorDetail,
    error_rate,
    evaluate,
    improvement,
    mean_improvement,
    word_errors,
)
from .ngram import ModelFormatError, NGramModel, UnsupportedModelVersion, load, save, score, train
from .noise import ConfusionTable, NoiseEdit, NoiseSpec, inject, write_edit_log
from .providers import (
    FixtureProvider,
    LocalProvider,
    Provider,
    ProviderConnectionError,
    ProviderError,
    ProviderProtocolError,
    ProviderResponse,
    ProviderStatusError,
    ProviderTimeout,
    RemoteProvider,
    serve,
)
from .suggest import Suggester, SuggestionConfig, did_you_mean
from .textmodel import Block, BlockSequence, CorrectedDocument, CorrectionOutcome, Token
from .tokenizer import reassemble, tokenize, transfer_case

__all__ = [
    "__version__",
    "Block",
    "BlockSequence",
    "ConfusionTable",
    "CorrectedDocument",
    "CorrectionError",
    "CorrectionOutcome",
    "CorrectionStats",
    "CorrectorConfig",
    "ErrorDetail",
    "EvaluationReport",
    "FixtureProvider",
    "LocalProvider",
    "ModelFormatError",
    "NGramModel",
    "NeighborhoodIndex",
    "NoiseEdit",
    "NoiseSpec",
    "Provider",
    "ProviderConnectionError",
    "ProviderError",
    "ProviderProtocolError",
    "ProviderResponse",
    "ProviderStatusError",
    "ProviderTimeout",
    "RemoteProvider",
    "Suggester",
    "SuggestionConfig",
    "Token",
    "UnsupportedModelVersion",
    "did_you_mean",
    "distance",
    "error_rate",
    "evaluate",
    "improvement",
    "inject",
    "load",
    "mean_improvement",
    "post_correction",
    "reassemble",
    "save",
    "score",
    "serve",
    "tokenize",
    "train",
    "transfer_case",
    "within",
    "word_errors",
    "write_edit_log",
]
