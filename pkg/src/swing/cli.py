"""Command-line pipeline: align, augment, or score a summary corpus.

Every command streams a JSON Lines corpus, resolves entailment through
the selected backend, and writes one JSON line per processed record in
input order. Exit code 0 means every record processed, 2 means the run
finished but some records were skipped or failed (lenient mode), and 1
means a fatal error stopped the run. A summary of counts goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, TextIO

from .aligner import GroupQueryLog, build_bipartite_graph
from .augmenter import augment_record
from .corpus_io import (
    FORMAT_VERSION,
    SummaryRecord,
    dump_augmented_line,
    load_generated_map,
    read_corpus,
    validate_record,
)
from .errors import (
    BackendUnavailable,
    CacheMiss,
    DimensionMismatch,
    EmptyGens,
    EmptyRefs,
    MalformedResponse,
    ParseError,
    SkippedRecord,
    SwingError,
)
from .nli import NliProvider, make_backend
from .scorer import coverage_report, rouge_l
from .segmenter import split_sentences
from .tokens import lexical_tokens

DEFAULT_TAU = 0.5
ENV_TAU = "SWING_TAU"
ENV_BACKEND = "SWING_BACKEND"

# Data problems end a record, not the run; anything else is fatal.
_RECORD_ERRORS = (
    CacheMiss,
    MalformedResponse,
    DimensionMismatch,
    EmptyRefs,
    EmptyGens,
    ParseError,
)


@dataclass
class RunConfig:
    command: str
    input_path: str
    output_path: str | None
    generated_path: str | None
    tau: float
    backend: str
    strict: bool
    workers: int

    def __post_init__(self):
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be within [0, 1], got {self.tau}")
        if self.workers < 1:
            raise ValueError(f"workers must be at least 1, got {self.workers}")


@dataclass
class _Outcome:
    status: str  # "ok" | "skipped" | "failed"
    line: str | None = None
    detail: str = ""
    metrics: tuple | None = None


class _Fatal(Exception):
    """Internal signal: abort the run with the carried message."""


def resolve_tau(flag_value: float | None, env: dict | None = None) -> float:
    """Explicit flag beats the environment default beats the built-in."""
    if flag_value is not None:
        return flag_value
    env = os.environ if env is None else env
    raw = env.get(ENV_TAU)
    if raw is not None and raw != "":
        try:
            return float(raw)
        except ValueError:
            raise _Fatal(f"{ENV_TAU} must be a number, got {raw!r}") from None
    return DEFAULT_TAU


def _resolve_backend(flag_value: str | None, env: dict | None = None) -> str:
    if flag_value is not None:
        return flag_value
    env = os.environ if env is None else env
    return env.get(ENV_BACKEND) or "mock"


def _segment_record(record: SummaryRecord):
    refs = split_sentences(record.reference_summary)
    if len(refs) == 0:
        raise SkippedRecord("empty reference summary")
    gens = split_sentences(record.generated_summary or "")
    if len(gens) == 0:
        raise SkippedRecord("empty generated summary")
    return refs, gens


def _align_worker(record: SummaryRecord, provider: NliProvider, tau: float) -> _Outcome:
    refs, gens = _segment_record(record)
    alignment = build_bipartite_graph(refs, gens, provider, tau, GroupQueryLog())
    line = json.dumps(
        {
            "id": record.id,
            "phi": alignment.mapping.phi,
            "uncovered_refs": alignment.uncovered_refs,
            "faithful_gens": alignment.faithful_gens,
            "tau": tau,
            "format_version": FORMAT_VERSION,
        },
        ensure_ascii=False,
    )
    return _Outcome("ok", line)


def _augment_worker(record: SummaryRecord, provider: NliProvider, tau: float) -> _Outcome:
    augmented = augment_record(record, provider, tau)
    return _Outcome("ok", dump_augmented_line(augmented))


def _score_worker(record: SummaryRecord, provider: NliProvider, tau: float) -> _Outcome:
    refs, gens = _segment_record(record)
    alignment = build_bipartite_graph(refs, gens, provider, tau, GroupQueryLog())
    report = coverage_report(alignment, refs, gens, provider)
    overlap = rouge_l(
        lexical_tokens(record.generated_summary or ""),
        lexical_tokens(record.reference_summary),
    )
    line = json.dumps(
        {
            "id": record.id,
            "uncovered_ref_indices": report.uncovered_ref_indices,
            "unfaithful_gen_indices": report.unfaithful_gen_indices,
            "coverage_ratio": report.coverage_ratio,
            "faithfulness_ratio": report.faithfulness_ratio,
            "nli_recall_per_ref": report.nli_recall_per_ref,
            "nli_recall_mean": report.nli_recall_mean,
            "rouge_l": {
                "recall": overlap.recall,
                "precision": overlap.precision,
                "f1": overlap.f1,
            },
            "format_version": FORMAT_VERSION,
        },
        ensure_ascii=False,
    )
    metrics = (
        report.coverage_ratio,
        report.faithfulness_ratio,
        report.nli_recall_mean,
        overlap.recall,
        overlap.f1,
    )
    return _Outcome("ok", line, metrics=metrics)


_WORKERS: dict[str, Callable[..., _Outcome]] = {
    "align": _align_worker,
    "augment": _augment_worker,
    "score": _score_worker,
}


def _guarded(worker, record: SummaryRecord, provider: NliProvider, tau: float) -> _Outcome:
    try:
        return worker(record, provider, tau)
    except SkippedRecord as exc:
        return _Outcome("skipped", detail=f"record {record.id!r}: {exc.reason}")
    except _RECORD_ERRORS as exc:
        return _Outcome("failed", detail=f"record {record.id!r}: {exc}")


def _ordered_map(fn, items: Iterable, workers: int) -> Iterator:
    """Apply fn across a thread pool, yielding results in input order.

    In-flight work is capped so the input can stream: nothing forces the
    whole corpus into memory.
    """
    if workers <= 1:
        for item in items:
            yield fn(item)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        pending: deque = deque()
        for item in items:
            pending.append(pool.submit(fn, item))
            if len(pending) >= workers * 4:
                yield pending.popleft().result()
        while pending:
            yield pending.popleft().result()


def _input_records(config: RunConfig, counts: dict, log: TextIO) -> Iterator[SummaryRecord]:
    """Validated record stream; data problems count as skips (lenient)."""
    parse_errors: list[ParseError] = []
    generated_map = None
    if config.generated_path:
        generated_map = load_generated_map(
            config.generated_path, strict=config.strict, errors=parse_errors
        )
    seen_ids: set[str] = set()
    for record in read_corpus(
        config.input_path, strict=config.strict, errors=parse_errors
    ):
        while parse_errors:
            issue = parse_errors.pop(0)
            counts["skipped"] += 1
            print(f"swing: skipped input: {issue}", file=log)
        if generated_map is not None and record.generated_summary is None:
            record = record.with_generated(generated_map.get(record.id))
        violations = validate_record(record, seen_ids)
        if violations:
            detail = f"record {record.id!r}: " + "; ".join(violations)
            if config.strict:
                raise _Fatal(detail)
            counts["skipped"] += 1
            print(f"swing: skipped {detail}", file=log)
            continue
        yield record
    for issue in parse_errors:
        counts["skipped"] += 1
        print(f"swing: skipped input: {issue}", file=log)


def _aggregate_line(collected: list[tuple]) -> str:
    def mean(position: int) -> float:
        return (
            sum(item[position] for item in collected) / len(collected)
            if collected
            else 0.0
        )

    return json.dumps(
        {
            "aggregate": True,
            "records": len(collected),
            "mean_coverage_ratio": mean(0),
            "mean_faithfulness_ratio": mean(1),
            "mean_nli_recall": mean(2),
            "mean_rouge_l_recall": mean(3),
            "mean_rouge_l_f1": mean(4),
            "format_version": FORMAT_VERSION,
        },
        ensure_ascii=False,
    )


def run(config: RunConfig, log: TextIO | None = None) -> int:
    log = log if log is not None else sys.stderr
    counts = {"processed": 0, "skipped": 0, "failed": 0}
    try:
        provider = NliProvider(make_backend(config.backend))
    except (SwingError, ValueError, OSError) as exc:
        print(f"swing: fatal: {exc}", file=log)
        return 1

    worker = _WORKERS[config.command]
    collected: list[tuple] = []

    if config.output_path and config.output_path != "-":
        sink_ctx = open(config.output_path, "w", encoding="utf-8")
    else:
        sink_ctx = nullcontext(sys.stdout)
    try:
        with sink_ctx as sink:
            records = _input_records(config, counts, log)
            task = lambda record: _guarded(worker, record, provider, config.tau)
            for outcome in _ordered_map(task, records, config.workers):
                if outcome.status == "ok":
                    counts["processed"] += 1
                    sink.write(outcome.line + "\n")
                    if outcome.metrics is not None:
                        collected.append(outcome.metrics)
                else:
                    if config.strict:
                        raise _Fatal(outcome.detail)
                    counts[outcome.status] += 1
                    print(f"swing: {outcome.status} {outcome.detail}", file=log)
            if config.command == "score":
                sink.write(_aggregate_line(collected) + "\n")
    except (_Fatal, BackendUnavailable, SwingError, OSError) as exc:
        message = exc.args[0] if isinstance(exc, _Fatal) else exc
        print(f"swing: fatal: {message}", file=log)
        return 1
    print(
        "swing: processed {processed} skipped {skipped} failed {failed}".format(
            **counts
        ),
        file=log,
    )
    return 2 if counts["skipped"] or counts["failed"] else 0


class _Parser(argparse.ArgumentParser):
    # Usage problems are fatal errors (exit 1); 2 is reserved for partial runs.
    def error(self, message):
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="swing",
        description="Link, augment, or score generated dialogue summaries.",
    )
    commands = parser.add_subparsers(dest="command", required=True)
    for name, summary in (
        ("align", "emit one link-matrix object per record"),
        ("augment", "emit full training bundles per record"),
        ("score", "emit per-record metrics plus a final aggregate line"),
    ):
        sub = commands.add_parser(name, help=summary)
        sub.add_argument("--input", required=True, help="JSON Lines corpus to read")
        sub.add_argument(
            "--generated",
            help="parallel JSON Lines file of {id, generated_summary} objects",
        )
        sub.add_argument(
            "--output", default="-", help="output path (default: stdout)"
        )
        sub.add_argument(
            "--tau",
            type=float,
            help=f"link threshold; defaults to ${ENV_TAU} or {DEFAULT_TAU}",
        )
        sub.add_argument(
            "--backend",
            help=f"mock, cache:PATH, or http:URL; defaults to ${ENV_BACKEND} or mock",
        )
        sub.add_argument(
            "--strict",
            action="store_true",
            help="abort on the first malformed or unprocessable record",
        )
        sub.add_argument(
            "--workers", type=int, default=1, help="parallel workers (default 1)"
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = RunConfig(
            command=args.command,
            input_path=args.input,
            output_path=args.output,
            generated_path=args.generated,
            tau=resolve_tau(args.tau),
            backend=_resolve_backend(args.backend),
            strict=args.strict,
            workers=args.workers,
        )
    except (_Fatal, ValueError) as exc:
        print(f"swing: fatal: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    raise SystemExit(main())
