"""Coverage and overlap metrics for linked records."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .aligner import AlignmentResult
from .errors import DimensionMismatch
from .nli import NliProvider, NliQuery
from .segmenter import SentenceList


@dataclass(frozen=True)
class RougeLScore:
    recall: float
    precision: float
    f1: float


@dataclass
class CoverageReport:
    """Per-record diagnosis of what the generated summary got right.

    nli_recall_per_ref[i] is the best entailment any generated sentence
    earns from reference sentence i: a soft per-sentence coverage signal
    even when no link cleared the threshold. external_scores is reserved
    for values computed by other tools (for example bartscore or factcc);
    nothing in this package fills it.
    """

    uncovered_ref_indices: list[int]
    unfaithful_gen_indices: list[int]
    coverage_ratio: float
    faithfulness_ratio: float
    nli_recall_per_ref: list[float]
    nli_recall_mean: float
    external_scores: dict[str, float] = field(default_factory=dict)


def coverage_report(
    alignment: AlignmentResult,
    refs: SentenceList,
    gens: SentenceList,
    provider: NliProvider,
) -> CoverageReport:
    """Summarize one alignment into ratios and per-sentence recall."""
    n, m = alignment.mapping.n, alignment.mapping.m
    if n != len(refs) or m != len(gens):
        raise DimensionMismatch(
            f"alignment is {n}x{m} but got {len(refs)} reference and "
            f"{len(gens)} generated sentences"
        )
    queries = [
        NliQuery(ref, gen) for ref in refs.sentences for gen in gens.sentences
    ]
    probs = provider.entail_batch(queries)
    recall = [
        max(p.entailment for p in probs[i * m : (i + 1) * m]) for i in range(n)
    ]
    faithful = set(alignment.faithful_gens)
    unfaithful = [j for j in range(m) if j not in faithful]
    return CoverageReport(
        uncovered_ref_indices=list(alignment.uncovered_refs),
        unfaithful_gen_indices=unfaithful,
        coverage_ratio=1.0 - len(alignment.uncovered_refs) / n,
        faithfulness_ratio=len(alignment.faithful_gens) / m,
        nli_recall_per_ref=recall,
        nli_recall_mean=sum(recall) / n,
    )


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for col, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[col - 1] + 1)
            else:
                current.append(max(previous[col], current[col - 1]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Sequence[str], reference: Sequence[str]) -> RougeLScore:
    """Longest-common-subsequence overlap between two token sequences.

    recall = LCS / |reference|, precision = LCS / |candidate|, f1 their
    harmonic mean. An empty side contributes 0 instead of dividing by
    zero, so two empty sequences score (0, 0, 0).
    """
    lcs = _lcs_length(candidate, reference)
    recall = lcs / len(reference) if reference else 0.0
    precision = lcs / len(candidate) if candidate else 0.0
    if precision + recall == 0.0:
        return RougeLScore(recall, precision, 0.0)
    return RougeLScore(recall, precision, 2 * precision * recall / (precision + recall))
