"""Sentence linking between a reference summary and a generated summary.

Links live in an n x m 0/1 matrix ``phi`` (rows = reference sentences,
columns = generated sentences). Three passes fill it, in this order:

1. reference-anchored: each reference sentence gathers the generated
   sentences it entails individually; when the gathered set is a
   consecutive run and its concatenation entails the reference sentence
   back, the whole run links to that reference row.
2. generated-anchored: the mirror image, gathering reference sentences
   for each generated sentence.
3. pairwise: any still-unlinked cell links when entailment clears the
   threshold in both directions.

All comparisons are strict (probability must exceed the threshold).
Candidate sets that are not one consecutive run are discarded whole: the
summaries are assumed to narrate in the same order, so a scattered set is
evidence of coincidental overlap rather than a real split or merge.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .errors import DimensionMismatch, EmptyGens, EmptyRefs
from .nli import NliProvider, NliQuery
from .segmenter import SentenceList

_GROUP_JOINER = " "

PASS_REFERENCE = "reference"
PASS_GENERATED = "generated"


@dataclass
class BipartiteMapping:
    """0/1 link matrix between n reference rows and m generated columns."""

    phi: list[list[int]]
    n: int
    m: int

    def __post_init__(self):
        if len(self.phi) != self.n or any(len(row) != self.m for row in self.phi):
            raise DimensionMismatch(
                f"matrix shape does not match n={self.n}, m={self.m}"
            )
        for row in self.phi:
            for value in row:
                if value not in (0, 1):
                    raise DimensionMismatch(f"matrix entry {value!r} is not 0 or 1")

    @classmethod
    def zeros(cls, n: int, m: int) -> "BipartiteMapping":
        return cls([[0] * m for _ in range(n)], n, m)


@dataclass
class AlignmentResult:
    """Final mapping plus the two partitions downstream consumers need.

    uncovered_refs: reference rows with no link (content the generated
    summary missed). faithful_gens: generated columns with at least one
    link (content grounded in the reference).
    """

    mapping: BipartiteMapping
    uncovered_refs: list[int]
    faithful_gens: list[int]
    tau: float


@dataclass
class GroupQueryLog:
    """Ordered record of every probability the aligner consulted.

    Entries are (premise, hypothesis, entailment, pass_tag) tuples, in
    issue order. Replaying the log into a lookup table and re-running the
    aligner against it reproduces the same AlignmentResult.
    """

    entries: list[tuple[str, str, float, str]] = field(default_factory=list)

    def record(self, premise: str, hypothesis: str, probability: float, tag: str):
        self.entries.append((premise, hypothesis, probability, tag))

    def digest(self) -> str:
        payload = json.dumps(self.entries, ensure_ascii=False).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]


def _sentences(sentence_list: SentenceList) -> tuple[str, ...]:
    return tuple(sentence_list.sentences)


def _is_consecutive(indices: list[int]) -> bool:
    # Built in ascending order; a singleton counts as consecutive.
    return indices[-1] - indices[0] + 1 == len(indices)


def _pair_matrix(
    provider: NliProvider,
    premises: tuple[str, ...],
    hypotheses: tuple[str, ...],
    log: GroupQueryLog | None,
    tag: str,
) -> list[list[float]]:
    """Entailment of every (premise row, hypothesis column) pair, batched."""
    queries = [
        NliQuery(premise, hypothesis)
        for premise in premises
        for hypothesis in hypotheses
    ]
    probs = provider.entail_batch(queries)
    matrix = []
    cursor = 0
    for premise in premises:
        row = []
        for hypothesis in hypotheses:
            value = probs[cursor].entailment
            cursor += 1
            if log is not None:
                log.record(premise, hypothesis, value, tag)
            row.append(value)
        matrix.append(row)
    return matrix


def resolve_group_pass(
    anchor: str,
    refs: SentenceList,
    gens: SentenceList,
    provider: NliProvider,
    tau: float,
    mapping: BipartiteMapping,
    log: GroupQueryLog | None = None,
) -> BipartiteMapping:
    """Run one anchored pass, mutating ``mapping`` in place.

    With ``anchor="reference"`` each reference row gathers generated
    columns whose individual entailment from that reference exceeds tau
    (skipping already-linked cells); with ``anchor="generated"`` the roles
    are mirrored. The gathered run only links when it is consecutive and
    its single-space concatenation entails the anchor sentence above tau.
    Anchors are processed in ascending index order, so later anchors see
    the links earlier ones created.
    """
    ref_texts, gen_texts = _sentences(refs), _sentences(gens)
    phi = mapping.phi
    if anchor == PASS_REFERENCE:
        scan = _pair_matrix(provider, ref_texts, gen_texts, log, "one-to-many")
        for i in range(mapping.n):
            run = [j for j in range(mapping.m) if scan[i][j] > tau and phi[i][j] == 0]
            if not run or not _is_consecutive(run):
                continue
            premise = _GROUP_JOINER.join(gen_texts[j] for j in run)
            group = provider.entailment(premise, ref_texts[i])
            if log is not None:
                log.record(premise, ref_texts[i], group, "one-to-many-group")
            if group > tau:
                for j in run:
                    phi[i][j] = 1
    elif anchor == PASS_GENERATED:
        scan = _pair_matrix(provider, gen_texts, ref_texts, log, "many-to-one")
        for j in range(mapping.m):
            run = [i for i in range(mapping.n) if scan[j][i] > tau and phi[i][j] == 0]
            if not run or not _is_consecutive(run):
                continue
            premise = _GROUP_JOINER.join(ref_texts[i] for i in run)
            group = provider.entailment(premise, gen_texts[j])
            if log is not None:
                log.record(premise, gen_texts[j], group, "many-to-one-group")
            if group > tau:
                for i in run:
                    phi[i][j] = 1
    else:
        raise ValueError(f"unknown anchor {anchor!r}")
    return mapping


def resolve_pairwise_pass(
    refs: SentenceList,
    gens: SentenceList,
    provider: NliProvider,
    tau: float,
    mapping: BipartiteMapping,
    log: GroupQueryLog | None = None,
) -> BipartiteMapping:
    """Link every still-unlinked cell entailed above tau in both directions.

    Cells already set by earlier passes are left untouched; mutates
    ``mapping`` in place.
    """
    ref_texts, gen_texts = _sentences(refs), _sentences(gens)
    phi = mapping.phi
    open_cells = [
        (i, j)
        for i in range(mapping.n)
        for j in range(mapping.m)
        if phi[i][j] == 0
    ]
    if not open_cells:
        return mapping
    queries = []
    for i, j in open_cells:
        queries.append(NliQuery(gen_texts[j], ref_texts[i]))
        queries.append(NliQuery(ref_texts[i], gen_texts[j]))
    probs = provider.entail_batch(queries)
    for position, (i, j) in enumerate(open_cells):
        forward = probs[2 * position].entailment
        backward = probs[2 * position + 1].entailment
        if log is not None:
            log.record(gen_texts[j], ref_texts[i], forward, "one-to-one")
            log.record(ref_texts[i], gen_texts[j], backward, "one-to-one")
        if forward > tau and backward > tau:
            phi[i][j] = 1
    return mapping


def partition_sentences(mapping: BipartiteMapping) -> tuple[list[int], list[int]]:
    """Split the matrix into (uncovered reference rows, faithful generated
    columns), each ascending."""
    uncovered = [i for i in range(mapping.n) if not any(mapping.phi[i])]
    faithful = [
        j for j in range(mapping.m) if any(mapping.phi[i][j] for i in range(mapping.n))
    ]
    return uncovered, faithful


def build_bipartite_graph(
    refs: SentenceList,
    gens: SentenceList,
    provider: NliProvider,
    tau: float,
    log: GroupQueryLog | None = None,
) -> AlignmentResult:
    """Run the three linking passes and partition the result.

    Raises EmptyRefs or EmptyGens when either sentence list is empty and
    ValueError when tau is outside [0, 1].
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be within [0, 1], got {tau}")
    if len(refs) == 0:
        raise EmptyRefs("no reference sentences to link")
    if len(gens) == 0:
        raise EmptyGens("no generated sentences to link")
    mapping = BipartiteMapping.zeros(len(refs), len(gens))
    resolve_group_pass(PASS_REFERENCE, refs, gens, provider, tau, mapping, log)
    resolve_group_pass(PASS_GENERATED, refs, gens, provider, tau, mapping, log)
    resolve_pairwise_pass(refs, gens, provider, tau, mapping, log)
    uncovered, faithful = partition_sentences(mapping)
    return AlignmentResult(mapping, uncovered, faithful, tau)
