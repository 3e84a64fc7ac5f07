"""Training-target construction from one linked record.

Two artifacts come out of a linked record: a mixed summary that patches
the generated summary's gaps with the reference sentences it missed, and
index labels splitting the generated sentences into grounded positives
and ungrounded negatives for contrastive training.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .aligner import AlignmentResult, GroupQueryLog, build_bipartite_graph
from .errors import DimensionMismatch, SkippedRecord
from .nli import NliProvider
from .segmenter import SentenceList, split_sentences

if TYPE_CHECKING:
    from .corpus_io import SummaryRecord

ORIGIN_REFERENCE = "reference"
ORIGIN_GENERATED = "generated"


@dataclass(frozen=True)
class MixAndMatchItem:
    """One sentence of the mixed summary, tagged with where it came from."""

    origin: str
    index: int
    text: str


@dataclass(frozen=True)
class MixAndMatchSummary:
    """Mixed summary: faithful generated sentences plus uncovered
    reference sentences, interleaved in narration order."""

    sentences: tuple[MixAndMatchItem, ...]
    rendered: str


@dataclass(frozen=True)
class ContrastiveLabels:
    """Generated-sentence indices split by grounding; both ascending and
    together covering every column exactly once."""

    positives: tuple[int, ...]
    negatives: tuple[int, ...]


@dataclass
class AugmentedRecord:
    """Everything one record contributes to training, ready to serialize."""

    id: str
    reference_sentences: tuple[str, ...]
    generated_sentences: tuple[str, ...]
    phi: tuple[tuple[int, ...], ...]
    uncovered_refs: tuple[int, ...]
    faithful_gens: tuple[int, ...]
    mix_and_match: MixAndMatchSummary
    positives: tuple[int, ...]
    negatives: tuple[int, ...]
    tau: float
    query_log_digest: str = ""
    format_version: str = "1"


def _check_dimensions(alignment: AlignmentResult, refs: SentenceList, gens: SentenceList):
    if alignment.mapping.n != len(refs) or alignment.mapping.m != len(gens):
        raise DimensionMismatch(
            f"alignment is {alignment.mapping.n}x{alignment.mapping.m} but got "
            f"{len(refs)} reference and {len(gens)} generated sentences"
        )


def build_mix_and_match(
    alignment: AlignmentResult,
    refs: SentenceList,
    gens: SentenceList,
) -> MixAndMatchSummary:
    """Interleave uncovered reference sentences among the faithful
    generated ones.

    Faithful generated sentences keep their column order. An uncovered
    reference sentence slots in just before the first generated sentence
    linked to any later reference row, because the summaries narrate in
    the same order: everything that later row covers comes after the gap.
    When no later row links anywhere, the sentence goes after all
    generated ones; trailing sentences keep reference order, as do
    uncovered sentences competing for the same slot.
    """
    _check_dimensions(alignment, refs, gens)
    phi = alignment.mapping.phi
    n, m = alignment.mapping.n, alignment.mapping.m

    # Sort key per item: generated column j sits at j; an uncovered row
    # anchored to column j sits at j - 0.5; unanchored rows sit past the
    # last column. Reference index breaks ties among uncovered rows.
    keyed: list[tuple[float, int, MixAndMatchItem]] = []
    for j in alignment.faithful_gens:
        keyed.append((float(j), -1, MixAndMatchItem(ORIGIN_GENERATED, j, gens.sentences[j])))
    for i in alignment.uncovered_refs:
        linked_later = [
            j for row in range(i + 1, n) for j in range(m) if phi[row][j]
        ]
        key = min(linked_later) - 0.5 if linked_later else float(m)
        keyed.append((key, i, MixAndMatchItem(ORIGIN_REFERENCE, i, refs.sentences[i])))
    keyed.sort(key=lambda entry: (entry[0], entry[1]))
    items = tuple(entry[2] for entry in keyed)
    return MixAndMatchSummary(items, " ".join(item.text for item in items))


def build_contrastive_labels(alignment: AlignmentResult) -> ContrastiveLabels:
    """Positives are the faithful generated columns, negatives the rest."""
    faithful = set(alignment.faithful_gens)
    positives = tuple(sorted(faithful))
    negatives = tuple(j for j in range(alignment.mapping.m) if j not in faithful)
    return ContrastiveLabels(positives, negatives)


def augment_record(
    record: "SummaryRecord",
    provider: NliProvider,
    tau: float,
) -> AugmentedRecord:
    """Segment, link, and label one corpus record.

    Raises SkippedRecord when either summary has no sentences; a record
    without a generated summary cannot be linked.
    """
    refs = split_sentences(record.reference_summary)
    if len(refs) == 0:
        raise SkippedRecord("empty reference summary")
    gens = split_sentences(record.generated_summary or "")
    if len(gens) == 0:
        raise SkippedRecord("empty generated summary")

    log = GroupQueryLog()
    alignment = build_bipartite_graph(refs, gens, provider, tau, log)
    mixed = build_mix_and_match(alignment, refs, gens)
    labels = build_contrastive_labels(alignment)
    return AugmentedRecord(
        id=record.id,
        reference_sentences=refs.sentences,
        generated_sentences=gens.sentences,
        phi=tuple(tuple(row) for row in alignment.mapping.phi),
        uncovered_refs=tuple(alignment.uncovered_refs),
        faithful_gens=tuple(alignment.faithful_gens),
        mix_and_match=mixed,
        positives=labels.positives,
        negatives=labels.negatives,
        tau=tau,
        query_log_digest=log.digest(),
    )
