"""Command line front end: train, correct, serve, noise, evaluate.

Flags can also be supplied through ``OCRPC_``-prefixed environment
variables (the flag wins when both are set).  All file I/O is UTF-8; a
leading BOM on inputs is stripped.  Exit codes: 0 success, 1 runtime
failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from collections.abc import Callable, Sequence
from typing import TypeVar

from . import __version__, corrector, ngram, noise as noise_mod, providers
from .evaluate import display_improvement, evaluate as evaluate_documents, evaluation_words, percent_display
from .suggest import SuggestionConfig

logger = logging.getLogger(__name__)

T = TypeVar("T")

ENV_PREFIX = "OCRPC_"


class UsageError(Exception):
    """Bad invocation detected after argparse (exit code 2)."""


def _read_text(path: str) -> str:
    # utf-8-sig strips a BOM when present and is plain UTF-8 otherwise
    with open(path, "r", encoding="utf-8-sig") as fh:
        return fh.read()


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _from_env(name: str, cast: Callable[[str], T]) -> T | None:
    raw = os.environ.get(ENV_PREFIX + name)
    if raw is None:
        return None
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"environment variable {ENV_PREFIX}{name}={raw!r}: {exc}") from exc


def _resolve(flag_value: T | None, env_name: str, cast: Callable[[str], T], default: T) -> T:
    if flag_value is not None:
        return flag_value
    env_value = _from_env(env_name, cast)
    if env_value is not None:
        return env_value
    return default


def _suggestion_config(args: argparse.Namespace) -> SuggestionConfig:
    table = None
    table_path = _resolve(getattr(args, "confusions", None), "CONFUSIONS", str, "")
    if table_path:
        table = noise_mod.ConfusionTable.from_path(table_path)
    try:
        return SuggestionConfig(
            min_block_count=_resolve(args.min_block_count, "MIN_BLOCK_COUNT", int, 1),
            max_edit_distance=_resolve(args.max_edit_distance, "MAX_EDIT_DISTANCE", int, 2),
            beam_width=_resolve(args.beam_width, "BEAM_WIDTH", int, 8),
            backoff_alpha=_resolve(args.backoff_alpha, "BACKOFF_ALPHA", float, ngram.DEFAULT_ALPHA),
            channel_penalty=_resolve(args.channel_penalty, "CHANNEL_PENALTY", float, 1.5),
            acceptance_margin=_resolve(args.acceptance_margin, "ACCEPTANCE_MARGIN", float, 0.0),
            confusion_table=table,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _add_suggester_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("suggestion engine")
    group.add_argument("--min-block-count", type=int, default=None,
                       help="accept a block outright at this many exact occurrences (default 1)")
    group.add_argument("--max-edit-distance", type=int, default=None,
                       help="candidate search radius per word (default 2; words of <= 4 characters use 1)")
    group.add_argument("--beam-width", type=int, default=None, help="beam width (default 8)")
    group.add_argument("--backoff-alpha", type=float, default=None,
                       help="backoff multiplier for unseen continuations (default 0.4)")
    group.add_argument("--channel-penalty", type=float, default=None,
                       help="log-score cost per character edit (default 1.5)")
    group.add_argument("--acceptance-margin", type=float, default=None,
                       help="how much better a rewrite must score to win (default 0)")
    group.add_argument("--confusions", default=None,
                       help="confusion table TSV whose substitutions are penalized at half cost")


def _make_provider(locator: str, args: argparse.Namespace) -> providers.Provider:
    kind, _, rest = locator.partition(":")
    if not rest:
        raise UsageError(f"provider must look like local:MODEL, remote:URL or fixture:MAP, got {locator!r}")
    if kind == "local":
        model = ngram.load(rest)
        return providers.LocalProvider(model, _suggestion_config(args))
    if kind == "remote":
        try:
            return providers.RemoteProvider(
                rest,
                timeout=_resolve(args.timeout, "TIMEOUT", float, providers.DEFAULT_TIMEOUT),
                cache_capacity=_resolve(args.cache_capacity, "CACHE_CAPACITY", int, providers.DEFAULT_CACHE_CAPACITY),
                rate_limit=_resolve(args.rate_limit, "RATE_LIMIT", float, providers.DEFAULT_RATE_LIMIT),
            )
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if kind == "fixture":
        with open(rest, "r", encoding="utf-8-sig") as fh:
            mapping = json.load(fh)
        if not isinstance(mapping, dict):
            raise UsageError(f"fixture map {rest} must be a JSON object")
        return providers.FixtureProvider(mapping)
    raise UsageError(f"unknown provider kind {kind!r} (expected local, remote or fixture)")


def _parse_bind(text: str) -> tuple[str, int]:
    host, _, port_text = text.rpartition(":")
    if not host or not port_text.isdigit():
        raise UsageError(f"bind address must look like HOST:PORT, got {text!r}")
    return host, int(port_text)


def _parse_mix(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise UsageError(f"--mix needs three comma-separated proportions, got {text!r}")
    try:
        d, i, s = (float(p) for p in parts)
    except ValueError as exc:
        raise UsageError(f"--mix needs numbers: {exc}") from exc
    return d, i, s


def _cmd_train(args: argparse.Namespace) -> int:
    corpus = _read_text(args.corpus)
    order = _resolve(args.order, "ORDER", int, ngram.DEFAULT_ORDER)
    if order < 1:
        raise UsageError(f"--order must be >= 1, got {order}")
    if args.prune_below < 1:
        raise UsageError(f"--prune-below must be >= 1, got {args.prune_below}")
    model = ngram.train(corpus, order=order, prune_below=args.prune_below)
    ngram.save(model, args.output)
    print(
        f"trained order-{model.order} model: {model.total_tokens} tokens, "
        f"{len(model.vocabulary)} distinct words -> {args.output}",
        file=sys.stderr,
    )
    return 0


def _cmd_correct(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    provider = _make_provider(args.provider, args)
    try:
        config = corrector.CorrectorConfig(
            block_size=_resolve(args.block_size, "BLOCK_SIZE", int, corrector.DEFAULT_BLOCK_SIZE),
            parallelism=_resolve(args.parallelism, "PARALLELISM", int, 1),
            fail_open=not args.fail_closed,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    document, stats = corrector.post_correction(text, provider, config)
    _write_text(args.output, document.text)
    print(
        f"blocks: {stats.blocks_total}, replaced: {stats.blocks_replaced}, "
        f"provider errors: {stats.provider_errors}, "
        f"discarded suggestions: {stats.mismatched_suggestions}, "
        f"elapsed: {stats.elapsed_seconds:.3f}s",
        file=sys.stderr,
    )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    model = ngram.load(args.model)
    bind = _parse_bind(_resolve(args.bind, "BIND", str, "127.0.0.1:8420"))
    service = providers.serve(model, _suggestion_config(args), bind)
    host, port = service.address
    print(f"serving order-{model.order} model on http://{host}:{port}", file=sys.stderr)
    try:
        while True:
            time.sleep(3600)
    except KeyboardInterrupt:
        print("shutting down", file=sys.stderr)
        return 0
    finally:
        service.close()


def _cmd_noise(args: argparse.Namespace) -> int:
    text = _read_text(args.input)
    table = noise_mod.ConfusionTable.from_path(args.table) if args.table else None
    try:
        spec = noise_mod.NoiseSpec(
            word_error_rate=_resolve(args.rate, "RATE", float, 0.1),
            op_mix=_parse_mix(args.mix) if args.mix else (1 / 3, 1 / 3, 1 / 3),
            confusion_bias=_resolve(args.bias, "BIAS", float, 0.5),
            seed=_resolve(args.seed, "SEED", int, 0),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    noisy, edits = noise_mod.inject(text, spec, table)
    _write_text(args.output, noisy)
    if args.log:
        noise_mod.write_edit_log(edits, args.log)
    print(f"corrupted {len(edits)} of {len(evaluation_words(text))} words", file=sys.stderr)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    report = evaluate_documents(
        _read_text(args.reference), _read_text(args.ocr), _read_text(args.corrected)
    )
    display = display_improvement(report.error_rate_before, report.error_rate_after)
    print(f"words: {report.total_words}")
    print(f"errors: {report.errors_before} -> {report.errors_after}")
    print(
        f"error rate: {percent_display(report.error_rate_before)} -> "
        f"{percent_display(report.error_rate_after)}"
    )
    improvement_text = "inf" if report.improvement_is_infinite else f"{report.improvement:.4g}"
    print(f"improvement: {improvement_text}x exact, {display}x from displayed rates")
    print(
        f"corrected: {report.corrected}, falsely corrected: {report.falsely_corrected}, "
        f"uncorrected: {report.uncorrected}, newly introduced: {report.newly_introduced}"
    )
    if args.json:
        payload = {
            "total_words": report.total_words,
            "errors_before": report.errors_before,
            "errors_after": report.errors_after,
            "error_rate_before": report.error_rate_before,
            "error_rate_after": report.error_rate_after,
            "error_rate_before_display": percent_display(report.error_rate_before),
            "error_rate_after_display": percent_display(report.error_rate_after),
            "improvement": None if report.improvement_is_infinite else report.improvement,
            "improvement_is_infinite": report.improvement_is_infinite,
            "improvement_display": None if report.improvement_is_infinite else display,
            "corrected": report.corrected,
            "falsely_corrected": report.falsely_corrected,
            "uncorrected": report.uncorrected,
            "newly_introduced": report.newly_introduced,
            "details": [
                {"reference": d.reference, "before": d.before, "after": d.after, "category": d.category}
                for d in report.details
            ],
        }
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ocrpc", description="Block-based OCR post-correction toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log debug detail to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="count n-grams over a corpus and save the model")
    p_train.add_argument("corpus", help="UTF-8 training text")
    p_train.add_argument("-o", "--output", required=True, help="model file to write")
    p_train.add_argument("--order", type=int, default=None, help="maximum n-gram size (default 5)")
    p_train.add_argument("--prune-below", type=int, default=1,
                         help="drop n-grams seen fewer than this many times (default 1, keep all)")
    p_train.set_defaults(func=_cmd_train)

    p_correct = sub.add_parser("correct", help="correct a document block by block")
    p_correct.add_argument("input", help="document to correct")
    p_correct.add_argument("--provider", required=True,
                           help="suggestion source: local:MODEL, remote:URL or fixture:MAP.json")
    p_correct.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p_correct.add_argument("--block-size", type=int, default=None, help="words per block (default 5)")
    p_correct.add_argument("--parallelism", type=int, default=None,
                           help="provider calls in flight at once (default 1)")
    p_correct.add_argument("--fail-closed", action="store_true",
                           help="abort on provider failure instead of keeping the block")
    p_correct.add_argument("--timeout", type=float, default=None, help="remote request timeout seconds (default 5)")
    p_correct.add_argument("--cache-capacity", type=int, default=None,
                           help="remote response cache size (default 10000)")
    p_correct.add_argument("--rate-limit", type=float, default=None,
                           help="remote requests per second (default 10)")
    _add_suggester_flags(p_correct)
    p_correct.set_defaults(func=_cmd_correct)

    p_serve = sub.add_parser("serve", help="serve a model over the JSON suggestion protocol")
    p_serve.add_argument("model", help="model file to serve")
    p_serve.add_argument("--bind", default=None, help="HOST:PORT to listen on (default 127.0.0.1:8420)")
    _add_suggester_flags(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    p_noise = sub.add_parser("noise", help="corrupt a clean document for benchmarking")
    p_noise.add_argument("input", help="document to corrupt")
    p_noise.add_argument("-o", "--output", default=None, help="output path (default stdout)")
    p_noise.add_argument("--rate", type=float, default=None, help="fraction of words to corrupt (default 0.1)")
    p_noise.add_argument("--mix", default=None,
                         help="deletion,insertion,substitution proportions (default equal thirds)")
    p_noise.add_argument("--bias", type=float, default=None,
                         help="probability a substitution uses the confusion table (default 0.5)")
    p_noise.add_argument("--seed", type=int, default=None, help="random seed (default 0)")
    p_noise.add_argument("--table", default=None, help="confusion table TSV (default built-in)")
    p_noise.add_argument("--log", default=None, help="write the edit log TSV here")
    p_noise.set_defaults(func=_cmd_noise)

    p_eval = sub.add_parser("evaluate", help="compare reference, OCR and corrected documents")
    p_eval.add_argument("reference", help="ground-truth document")
    p_eval.add_argument("ocr", help="uncorrected document")
    p_eval.add_argument("corrected", help="corrected document")
    p_eval.add_argument("--json", default=None, help="also write a JSON report here")
    p_eval.set_defaults(func=_cmd_evaluate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, json.JSONDecodeError,
            providers.ProviderError, corrector.CorrectionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
