"""Lexical token normalization shared by the mock scorer and the metrics."""

from __future__ import annotations

import re

_NON_WORD = re.compile(r"\W+")


def lexical_tokens(text: str) -> list[str]:
    """Lowercase whitespace tokens with punctuation stripped.

    Punctuation is replaced by whitespace before splitting, so "car." and
    "car" normalize to the same token. Order and duplicates are preserved.
    """
    return _NON_WORD.sub(" ", text.lower()).split()
