"""Rule-based sentence segmentation with source character offsets.

Splitting is deliberately conservative: a missed split merges two sentences,
which downstream linking tolerates far better than a spurious split that
fragments one. The rules are fixed and deterministic so that repeated runs
over the same corpus produce byte-identical sentence lists.
"""

from __future__ import annotations

from dataclasses import dataclass

_TERMINATORS = frozenset(".!?")
_OPENING_QUOTES = frozenset("\"'“‘«")

# Periods after these tokens never end a sentence. Comparison is
# case-insensitive; the token is taken up to and including the period.
_ABBREVIATIONS = frozenset(
    {
        "mr.",
        "mrs.",
        "ms.",
        "dr.",
        "prof.",
        "st.",
        "vs.",
        "e.g.",
        "i.e.",
        "etc.",
        "a.m.",
        "p.m.",
    }
)


@dataclass(frozen=True)
class SentenceList:
    """Sentences of one text plus their (start, end) spans in the source.

    Spans are strictly increasing, non-overlapping, and cover every
    non-whitespace character of the source; ``sentences[k]`` is exactly
    ``source[source_offsets[k][0]:source_offsets[k][1]]``.
    """

    sentences: tuple[str, ...]
    source_offsets: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.sentences)

    @classmethod
    def from_sentences(cls, sentences) -> "SentenceList":
        """Build a SentenceList for pre-split sentences.

        Offsets are synthesized as if the sentences were joined by single
        spaces; useful when the original source string is not available.
        """
        spans = []
        pos = 0
        for sentence in sentences:
            spans.append((pos, pos + len(sentence)))
            pos += len(sentence) + 1
        return cls(tuple(sentences), tuple(spans))


def _token_before(text: str, period: int) -> str:
    """Whitespace-delimited token ending at ``text[period]``, leading
    punctuation stripped (so "(Dr." matches "dr.")."""
    start = period
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    token = text[start : period + 1]
    while token and not token[0].isalnum():
        token = token[1:]
    return token.lower()


def _suppressed(text: str, period: int) -> bool:
    token = _token_before(text, period)
    if token in _ABBREVIATIONS:
        return True
    # Single-letter initials such as "J." never end a sentence.
    return len(token) == 2 and token[0].isalpha()


def _is_boundary(text: str, idx: int) -> bool:
    """True when the terminator at ``idx`` ends a sentence.

    A terminator ends a sentence when followed by whitespace and then an
    uppercase letter or opening quote, or when only whitespace remains.
    A terminator glued to the next character (decimals, "U.S.A") never
    splits, and neither does one followed by a lowercase continuation.
    """
    after = idx + 1
    cursor = after
    while cursor < len(text) and text[cursor].isspace():
        cursor += 1
    if cursor < len(text):
        if cursor == after:
            return False
        nxt = text[cursor]
        if not (nxt.isupper() or nxt in _OPENING_QUOTES):
            return False
    if text[idx] == "." and _suppressed(text, idx):
        return False
    return True


def split_sentences(text: str) -> SentenceList:
    """Split ``text`` into sentences, keeping source offsets.

    Whitespace between sentences belongs to no sentence; each reported
    span is trimmed to its non-whitespace extent. Empty and
    whitespace-only input yields an empty SentenceList. Text after the
    final boundary (with or without terminal punctuation) becomes the
    last sentence.
    """
    boundaries = [
        idx + 1
        for idx, char in enumerate(text)
        if char in _TERMINATORS and _is_boundary(text, idx)
    ]
    if not boundaries or boundaries[-1] != len(text):
        boundaries.append(len(text))

    sentences: list[str] = []
    offsets: list[tuple[int, int]] = []
    prev = 0
    for boundary in boundaries:
        start, end = prev, boundary
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start < end:
            sentences.append(text[start:end])
            offsets.append((start, end))
        prev = boundary
    return SentenceList(tuple(sentences), tuple(offsets))
