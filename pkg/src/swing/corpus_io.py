"""JSON Lines corpus input and augmented-record output.

Input records follow the dialogue-corpus convention: one JSON object per
line with "id", "dialogue", and "summary" string fields. A generated
summary rides along either inline under "generated_summary" or in a
parallel JSON Lines file of {"id", "generated_summary"} objects joined by
id. Files are streamed line by line; memory stays bounded per record no
matter how large the file is.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Iterator

from .augmenter import AugmentedRecord, MixAndMatchItem, MixAndMatchSummary
from .errors import ParseError

FORMAT_VERSION = "1"

_INPUT_FIELDS = ("id", "dialogue", "summary")


@dataclass(frozen=True)
class SummaryRecord:
    """One corpus record; generated_summary is None until supplied."""

    id: str
    dialogue: str
    reference_summary: str
    generated_summary: str | None = None

    def with_generated(self, generated: str | None) -> "SummaryRecord":
        return replace(self, generated_summary=generated)


def _parse_line(line: str, line_no: int) -> dict:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}", line_no) from exc
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line_no)
    return obj


def _record_from_obj(obj: dict, line_no: int) -> SummaryRecord:
    for field_name in _INPUT_FIELDS:
        if field_name not in obj:
            raise ParseError(f"missing field {field_name!r}", line_no)
        if not isinstance(obj[field_name], str):
            raise ParseError(f"field {field_name!r} must be a string", line_no)
    generated = obj.get("generated_summary")
    if generated is not None and not isinstance(generated, str):
        raise ParseError("field 'generated_summary' must be a string", line_no)
    return SummaryRecord(
        id=obj["id"],
        dialogue=obj["dialogue"],
        reference_summary=obj["summary"],
        generated_summary=generated,
    )


def read_corpus(
    path: str | Path,
    *,
    strict: bool = False,
    errors: list[ParseError] | None = None,
) -> Iterator[SummaryRecord]:
    """Stream records from a JSON Lines corpus file.

    Blank lines are ignored. In lenient mode (the default) a malformed
    line is reported into ``errors`` (when given) and the stream moves on;
    in strict mode it aborts the stream by raising ParseError.
    """
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                yield _record_from_obj(_parse_line(line, line_no), line_no)
            except ParseError as exc:
                if strict:
                    raise
                if errors is not None:
                    errors.append(exc)


def load_generated_map(
    path: str | Path,
    *,
    strict: bool = False,
    errors: list[ParseError] | None = None,
) -> dict[str, str]:
    """Load a parallel generated-summary file keyed by record id.

    Lines hold {"id", "generated_summary"}; later duplicates of an id
    overwrite earlier ones.
    """
    mapping: dict[str, str] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = _parse_line(line, line_no)
                if not isinstance(obj.get("id"), str):
                    raise ParseError("missing string field 'id'", line_no)
                if not isinstance(obj.get("generated_summary"), str):
                    raise ParseError(
                        "missing string field 'generated_summary'", line_no
                    )
            except ParseError as exc:
                if strict:
                    raise
                if errors is not None:
                    errors.append(exc)
                continue
            mapping[obj["id"]] = obj["generated_summary"]
    return mapping


def validate_record(
    record: SummaryRecord, seen_ids: set[str] | None = None
) -> list[str]:
    """Return every invariant the record violates; empty means valid.

    When ``seen_ids`` is given, the record's id is checked against it and
    then added to it, so one set threaded through a stream catches
    duplicates.
    """
    violations = []
    if not record.id:
        violations.append("id empty")
    if not record.dialogue.strip():
        violations.append("dialogue empty")
    if not record.reference_summary.strip():
        violations.append("reference_summary empty")
    if seen_ids is not None:
        if record.id in seen_ids:
            violations.append("duplicate id")
        seen_ids.add(record.id)
    return violations


def augmented_to_json(record: AugmentedRecord) -> dict:
    return {
        "id": record.id,
        "reference_sentences": list(record.reference_sentences),
        "generated_sentences": list(record.generated_sentences),
        "phi": [list(row) for row in record.phi],
        "uncovered_refs": list(record.uncovered_refs),
        "faithful_gens": list(record.faithful_gens),
        "mix_and_match": {
            "sentences": [
                {"origin": item.origin, "index": item.index, "text": item.text}
                for item in record.mix_and_match.sentences
            ],
            "rendered": record.mix_and_match.rendered,
        },
        "positives": list(record.positives),
        "negatives": list(record.negatives),
        "tau": record.tau,
        "query_log_digest": record.query_log_digest,
        "format_version": record.format_version,
    }


def augmented_from_json(obj: dict, line_no: int | None = None) -> AugmentedRecord:
    try:
        mixed = MixAndMatchSummary(
            tuple(
                MixAndMatchItem(item["origin"], item["index"], item["text"])
                for item in obj["mix_and_match"]["sentences"]
            ),
            obj["mix_and_match"]["rendered"],
        )
        return AugmentedRecord(
            id=obj["id"],
            reference_sentences=tuple(obj["reference_sentences"]),
            generated_sentences=tuple(obj["generated_sentences"]),
            phi=tuple(tuple(row) for row in obj["phi"]),
            uncovered_refs=tuple(obj["uncovered_refs"]),
            faithful_gens=tuple(obj["faithful_gens"]),
            mix_and_match=mixed,
            positives=tuple(obj["positives"]),
            negatives=tuple(obj["negatives"]),
            tau=obj["tau"],
            query_log_digest=obj.get("query_log_digest", ""),
            format_version=obj["format_version"],
        )
    except (KeyError, TypeError) as exc:
        raise ParseError(f"missing or malformed field: {exc}", line_no) from exc


def dump_augmented_line(record: AugmentedRecord) -> str:
    """Serialize one record to its canonical single-line JSON form."""
    return json.dumps(augmented_to_json(record), ensure_ascii=False)


def write_augmented(records: Iterable[AugmentedRecord], path: str | Path) -> int:
    """Write records as JSON Lines; returns how many were written."""
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(dump_augmented_line(record) + "\n")
            count += 1
    return count


def read_augmented(path: str | Path) -> Iterator[AugmentedRecord]:
    """Stream augmented records back from a JSON Lines file."""
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            yield augmented_from_json(_parse_line(line, line_no), line_no)
