"""Shared fixtures and independent oracles for the test suite.

The oracles here deliberately do not reuse package code paths: the
linking oracle is a direct loop transcription working straight off a
probability table, and the LCS oracle enumerates subsequences instead of
running dynamic programming. Tests compare package output against these.
"""

from __future__ import annotations

import itertools
import random

from swing.corpus_io import SummaryRecord
from swing.nli import CacheBackend, EntailmentProbabilities

GROUP_JOIN = " "


def algorithm_transcription(refs, gens, p_ent, tau):
    """Independent three-pass linking oracle.

    ``p_ent`` is a plain callable (premise, hypothesis) -> float. Written
    as literal nested loops; any behavior difference from the package
    aligner is a bug in one of them.
    """
    n, m = len(refs), len(gens)
    phi = [[0] * m for _ in range(n)]
    for i in range(n):
        group = [j for j in range(m) if p_ent(refs[i], gens[j]) > tau and phi[i][j] == 0]
        if group and group[-1] - group[0] + 1 == len(group):
            joined = GROUP_JOIN.join(gens[j] for j in group)
            if p_ent(joined, refs[i]) > tau:
                for j in group:
                    phi[i][j] = 1
    for j in range(m):
        group = [i for i in range(n) if p_ent(gens[j], refs[i]) > tau and phi[i][j] == 0]
        if group and group[-1] - group[0] + 1 == len(group):
            joined = GROUP_JOIN.join(refs[i] for i in group)
            if p_ent(joined, gens[j]) > tau:
                for i in group:
                    phi[i][j] = 1
    for i in range(n):
        for j in range(m):
            if phi[i][j] == 0 and p_ent(gens[j], refs[i]) > tau and p_ent(refs[i], gens[j]) > tau:
                phi[i][j] = 1
    return phi


def is_subsequence(needle, haystack) -> bool:
    pos = 0
    for token in haystack:
        if pos < len(needle) and token == needle[pos]:
            pos += 1
    return pos == len(needle)


def brute_force_lcs(candidate, reference) -> int:
    """Longest common subsequence by enumerating candidate subsequences."""
    for size in range(min(len(candidate), len(reference)), 0, -1):
        for combo in itertools.combinations(candidate, size):
            if is_subsequence(combo, reference):
                return size
    return 0


def table_backend(table: dict[tuple[str, str], float]) -> CacheBackend:
    """Cache backend answering from a plain {(premise, hypothesis): p} table."""
    return CacheBackend(
        {
            pair: EntailmentProbabilities(value, 1.0 - value, 0.0)
            for pair, value in table.items()
        }
    )


# A 2x3 instance used across the suite. The sentences are worded so the
# lexical-overlap mock reproduces REF_TO_GEN exactly: every generated
# sentence normalizes to 10 tokens, and the intersection sizes with the
# two reference sentences are (1, 1), (1, 8), (1, 7).
FIXTURE_REFS = (
    "Budget review happens quarterly, says management.",
    "Alice hired three new engineers for the platform.",
)
FIXTURE_GENS = (
    "Budget meets Bob Monday about Alice vacation plans next week.",
    "Alice hired three new engineers for the platform budget team.",
    "Alice hired three new engineers for the budget office space.",
)

REF_TO_GEN = [
    [0.1, 0.1, 0.1],
    [0.1, 0.8, 0.7],
]
GEN_TO_REF = [
    [0.1, 0.1],
    [0.1, 0.6],
    [0.1, 0.6],
]
GROUP_PROBABILITY = 0.9

FIXTURE_PHI = [[0, 0, 0], [0, 1, 1]]
FIXTURE_UNCOVERED = [0]
FIXTURE_FAITHFUL = [1, 2]


def fixture_table() -> dict[tuple[str, str], float]:
    table = {}
    for i, ref in enumerate(FIXTURE_REFS):
        for j, gen in enumerate(FIXTURE_GENS):
            table[(ref, gen)] = REF_TO_GEN[i][j]
            table[(gen, ref)] = GEN_TO_REF[j][i]
    grouped = GROUP_JOIN.join(FIXTURE_GENS[1:3])
    table[(grouped, FIXTURE_REFS[1])] = GROUP_PROBABILITY
    return table


def fixture_record() -> SummaryRecord:
    return SummaryRecord(
        id="fixture-2x3",
        dialogue="Planner: quarterly budget review is set.\nLead: Alice staffed the platform team.",
        reference_summary=GROUP_JOIN.join(FIXTURE_REFS),
        generated_summary=GROUP_JOIN.join(FIXTURE_GENS),
    )


# A 3x4 instance reproducing the mixed-summary walkthrough: reference
# row 0 stays uncovered, generated column 0 stays unfaithful, row 1 links
# to columns 1-2 as a run, row 2 links to column 3 alone.
WALKTHROUGH_REFS = (
    "Leo booked the venue for Friday.",
    "Maya will send the invitations tonight.",
    "Noah is bringing the projector.",
)
WALKTHROUGH_GENS = (
    "The weather looks rainy this weekend.",
    "Maya plans to send invitations.",
    "She will do it tonight.",
    "Noah brings a projector.",
)

WALKTHROUGH_PHI = [
    [0, 0, 0, 0],
    [0, 1, 1, 0],
    [0, 0, 0, 1],
]


def walkthrough_table() -> dict[tuple[str, str], float]:
    table = {}
    for ref in WALKTHROUGH_REFS:
        for gen in WALKTHROUGH_GENS:
            table[(ref, gen)] = 0.1
            table[(gen, ref)] = 0.1
    table[(WALKTHROUGH_REFS[1], WALKTHROUGH_GENS[1])] = 0.8
    table[(WALKTHROUGH_REFS[1], WALKTHROUGH_GENS[2])] = 0.7
    table[(WALKTHROUGH_REFS[2], WALKTHROUGH_GENS[3])] = 0.9
    table[(WALKTHROUGH_GENS[3], WALKTHROUGH_REFS[2])] = 0.85
    table[(WALKTHROUGH_GENS[1], WALKTHROUGH_REFS[1])] = 0.6
    table[(WALKTHROUGH_GENS[2], WALKTHROUGH_REFS[1])] = 0.6
    table[(GROUP_JOIN.join(WALKTHROUGH_GENS[1:3]), WALKTHROUGH_REFS[1])] = 0.9
    return table


def random_instance(rng: random.Random, uid: int):
    """Random sentence lists plus a full probability table.

    The table covers every ordered pair in both directions and every
    consecutive-run concatenation against each opposing sentence, which
    is exactly the set of questions consecutive-run linking can ask.
    """
    n = rng.randint(1, 6)
    m = rng.randint(1, 6)
    refs = [f"Case {uid} reference {i} holds." for i in range(n)]
    gens = [f"Case {uid} candidate {j} stands." for j in range(m)]
    table = {}
    for ref in refs:
        for gen in gens:
            table[(ref, gen)] = rng.random()
            table[(gen, ref)] = rng.random()
    for start in range(m):
        for stop in range(start + 2, m + 1):
            joined = GROUP_JOIN.join(gens[start:stop])
            for ref in refs:
                table[(joined, ref)] = rng.random()
    for start in range(n):
        for stop in range(start + 2, n + 1):
            joined = GROUP_JOIN.join(refs[start:stop])
            for gen in gens:
                table[(joined, gen)] = rng.random()
    return refs, gens, table


IDENTICAL_SUMMARIES = (
    "Amy will bring the cake.",
    "Ben fixed the sink. He will invoice Rita tomorrow.",
    "The launch moved to Thursday. Marketing was told first.",
    "Carol lost her badge. Security issued a temporary one. She owes a form.",
    "Dinner is at seven.",
    "Tom adopted a beagle. The dog sleeps a lot.",
    "Nina passed the driving test. Her brother lent her a car.",
    "The printer on floor two is broken. Facilities knows already.",
    "Sam canceled the trip. The hotel refunded everything.",
    "Grandma arrives Sunday. Paul picks her up from the station.",
)


def identical_records() -> list[SummaryRecord]:
    """Records whose generated summary is the reference, word for word."""
    return [
        SummaryRecord(
            id=f"same-{idx:03d}",
            dialogue=f"A: update {idx}, please confirm.\nB: confirmed.",
            reference_summary=text,
            generated_summary=text,
        )
        for idx, text in enumerate(IDENTICAL_SUMMARIES)
    ]
