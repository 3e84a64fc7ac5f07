"""Entailment probability backends and the caching provider in front of them.

Only the entailment component drives downstream linking decisions; the
neutral and contradiction components travel along so that responses can be
validated and cached losslessly.

Backends share one duty: given ordered (premise, hypothesis) pairs, return
one probability triple per pair, in order. The provider adds an in-memory
query cache keyed on the exact ordered pair, deduplicates batches before
dispatch, and never caches partial results from a failed dispatch.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, MutableMapping

import requests

from .errors import BackendUnavailable, CacheMiss, MalformedResponse, ParseError
from .tokens import lexical_tokens

logger = logging.getLogger(__name__)

ENV_REMOTE_URL = "SWING_NLI_URL"
_REMOTE_PATH = "/v1/nli"
_SUM_TOLERANCE = 1e-6

Pair = tuple[str, str]


@dataclass(frozen=True)
class EntailmentProbabilities:
    """Probability triple for one ordered (premise, hypothesis) pair."""

    entailment: float
    neutral: float
    contradiction: float


@dataclass(frozen=True)
class NliQuery:
    """One ordered premise/hypothesis pair to score."""

    premise: str
    hypothesis: str


@dataclass(frozen=True)
class CacheEntry:
    """A cached probability triple tagged with the backend that produced it."""

    premise: str
    hypothesis: str
    probabilities: EntailmentProbabilities
    backend_id: str


def _bound_violations(probs: EntailmentProbabilities) -> list[str]:
    issues = []
    for field in ("entailment", "neutral", "contradiction"):
        value = getattr(probs, field)
        if not isinstance(value, (int, float)) or not 0.0 <= value <= 1.0:
            issues.append(f"{field} {value!r} outside [0, 1]")
    return issues


class MockBackend:
    """Deterministic lexical-overlap scorer used for tests and dry runs.

    entailment = |tokens(hypothesis) & tokens(premise)| / |tokens(hypothesis)|
    with lowercase, punctuation-stripped token sets. A hypothesis with no
    tokens scores 0.0. neutral is 1 - entailment and contradiction is 0, so
    the triple always sums to 1. Stateless apart from a dispatch counter,
    so one instance can be shared freely across threads.
    """

    backend_id = "mock"

    def __init__(self):
        self.dispatch_count = 0
        self._lock = threading.Lock()

    def score_pairs(self, pairs: list[Pair]) -> list[EntailmentProbabilities]:
        with self._lock:
            self.dispatch_count += len(pairs)
        results = []
        for premise, hypothesis in pairs:
            hyp_tokens = set(lexical_tokens(hypothesis))
            if not hyp_tokens:
                entailment = 0.0
            else:
                overlap = len(hyp_tokens & set(lexical_tokens(premise)))
                entailment = overlap / len(hyp_tokens)
            results.append(EntailmentProbabilities(entailment, 1.0 - entailment, 0.0))
        return results


class CacheBackend:
    """Lookup-only backend over a preloaded pair table.

    Missing pairs raise CacheMiss rather than inventing a score; a cache
    file is expected to hold every pair the caller will ask about.
    """

    backend_id = "cache"

    def __init__(self, table: MutableMapping[Pair, EntailmentProbabilities] | None = None):
        self.table: dict[Pair, EntailmentProbabilities] = dict(table or {})
        self.dispatch_count = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str | Path) -> "CacheBackend":
        table, _ = load_matrix_cache(path)
        return cls(table)

    def score_pairs(self, pairs: list[Pair]) -> list[EntailmentProbabilities]:
        with self._lock:
            self.dispatch_count += len(pairs)
        results = []
        for pair in pairs:
            try:
                results.append(self.table[pair])
            except KeyError:
                raise CacheMiss(
                    f"no cached probabilities for premise {pair[0]!r} / "
                    f"hypothesis {pair[1]!r}"
                ) from None
        return results


class HttpBackend:
    """Remote scorer speaking the batched POST protocol.

    Requests go to ``<base_url>/v1/nli`` with body
    ``{"pairs": [{"premise": ..., "hypothesis": ...}, ...]}`` and the reply
    must carry ``{"results": [...]}`` with one probability object per pair,
    in request order. Transport failures and non-200 statuses are retried
    with exponential backoff; a well-formed HTTP reply whose body violates
    the protocol is not retried.
    """

    backend_id = "http"

    def __init__(
        self,
        url: str | None = None,
        *,
        max_attempts: int = 3,
        backoff: float = 0.25,
        timeout: float = 30.0,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        base = url or os.environ.get(ENV_REMOTE_URL)
        if not base:
            raise ValueError(
                f"no remote endpoint: pass a URL or set {ENV_REMOTE_URL}"
            )
        base = base.rstrip("/")
        self.endpoint = base if base.endswith(_REMOTE_PATH) else base + _REMOTE_PATH
        self.max_attempts = max_attempts
        self.backoff = backoff
        self.timeout = timeout
        self._session = session or requests.Session()
        self._sleep = sleep
        self.dispatch_count = 0
        self._lock = threading.Lock()

    def score_pairs(self, pairs: list[Pair]) -> list[EntailmentProbabilities]:
        with self._lock:
            self.dispatch_count += len(pairs)
        body = {
            "pairs": [{"premise": p, "hypothesis": h} for p, h in pairs]
        }
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                delay = self.backoff * (2 ** (attempt - 1))
                logger.debug("retrying %s in %.3fs", self.endpoint, delay)
                self._sleep(delay)
            try:
                response = self._session.post(
                    self.endpoint, json=body, timeout=self.timeout
                )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if response.status_code != 200:
                last_error = BackendUnavailable(
                    f"{self.endpoint} returned status {response.status_code}"
                )
                continue
            return self._parse(response, expected=len(pairs))
        raise BackendUnavailable(
            f"{self.endpoint} unreachable after {self.max_attempts} attempts: "
            f"{last_error}"
        )

    def _parse(self, response, expected: int) -> list[EntailmentProbabilities]:
        try:
            payload = response.json()
        except ValueError as exc:
            raise MalformedResponse(f"response body is not JSON: {exc}") from exc
        results = payload.get("results") if isinstance(payload, dict) else None
        if not isinstance(results, list) or len(results) != expected:
            raise MalformedResponse(
                f"expected {expected} results, got "
                f"{len(results) if isinstance(results, list) else 'none'}"
            )
        parsed = []
        for position, item in enumerate(results):
            if not isinstance(item, dict):
                raise MalformedResponse(f"result {position} is not an object")
            try:
                probs = EntailmentProbabilities(
                    float(item["entailment"]),
                    float(item["neutral"]),
                    float(item["contradiction"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise MalformedResponse(
                    f"result {position} missing or non-numeric field: {exc}"
                ) from exc
            issues = _bound_violations(probs)
            total = probs.entailment + probs.neutral + probs.contradiction
            if abs(total - 1.0) > _SUM_TOLERANCE:
                issues.append(f"components sum to {total}, expected 1")
            if issues:
                raise MalformedResponse(f"result {position}: " + "; ".join(issues))
            parsed.append(probs)
        return parsed


# Empty-hypothesis queries are answered locally with this triple and never
# reach a backend.
_EMPTY_HYPOTHESIS = EntailmentProbabilities(0.0, 1.0, 0.0)


class NliProvider:
    """Caching, deduplicating front over a single backend.

    The cache is keyed on the exact ordered (premise, hypothesis) strings;
    the two directions of a pair are distinct entries. Writes are
    last-writer-wins and guarded by a lock so worker threads can share one
    provider. A failed dispatch caches nothing.
    """

    def __init__(self, backend):
        self.backend = backend
        self._cache: dict[Pair, EntailmentProbabilities] = {}
        self._lock = threading.Lock()

    def entail_prob(self, query: NliQuery) -> EntailmentProbabilities:
        return self.entail_batch([query])[0]

    def entail_batch(self, queries: list[NliQuery]) -> list[EntailmentProbabilities]:
        """Score many queries at once; equivalent to mapping entail_prob.

        Duplicate queries are dispatched once. Results come back in query
        order. On backend failure nothing is cached.
        """
        if not queries:
            return []
        keys = [(q.premise, q.hypothesis) for q in queries]
        with self._lock:
            resolved = {k: self._cache[k] for k in keys if k in self._cache}
        missing: list[Pair] = []
        for key in keys:
            if key in resolved or key in missing:
                continue
            if not key[1].strip():
                resolved[key] = _EMPTY_HYPOTHESIS
                continue
            missing.append(key)
        if missing:
            scored = self.backend.score_pairs(missing)
            resolved.update(zip(missing, scored))
        with self._lock:
            for key in keys:
                self._cache[key] = resolved[key]
        return [resolved[k] for k in keys]

    def entailment(self, premise: str, hypothesis: str) -> float:
        """Entailment component only; the shape downstream code consumes."""
        return self.entail_prob(NliQuery(premise, hypothesis)).entailment

    def cache_snapshot(self) -> dict[Pair, EntailmentProbabilities]:
        with self._lock:
            return dict(self._cache)

    def clear_cache(self) -> None:
        with self._lock:
            self._cache.clear()


def load_matrix_cache(
    path: str | Path,
    into: MutableMapping[Pair, EntailmentProbabilities] | None = None,
) -> tuple[MutableMapping[Pair, EntailmentProbabilities], int]:
    """Load a JSON Lines probability cache.

    Each line holds {"premise", "hypothesis", "entailment", "neutral",
    "contradiction"}. Later duplicates of a pair overwrite earlier ones.
    Returns the populated mapping and the number of lines loaded. Bound
    violations and malformed lines raise ParseError with the line number.
    """
    table = into if into is not None else {}
    count = 0
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", line_no) from exc
            if not isinstance(obj, dict):
                raise ParseError("expected a JSON object", line_no)
            try:
                premise = obj["premise"]
                hypothesis = obj["hypothesis"]
                probs = EntailmentProbabilities(
                    float(obj["entailment"]),
                    float(obj["neutral"]),
                    float(obj["contradiction"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"missing or non-numeric field: {exc}", line_no) from exc
            if not isinstance(premise, str) or not isinstance(hypothesis, str):
                raise ParseError("premise and hypothesis must be strings", line_no)
            issues = _bound_violations(probs)
            if issues:
                raise ParseError("; ".join(issues), line_no)
            table[(premise, hypothesis)] = probs
            count += 1
    return table, count


def save_matrix_cache(
    table: MutableMapping[Pair, EntailmentProbabilities] | Iterable[CacheEntry],
    path: str | Path,
) -> int:
    """Write a pair table to the JSON Lines cache format; returns line count.

    Pairs are written in sorted order so identical tables serialize to
    identical bytes.
    """
    if isinstance(table, MutableMapping):
        items = sorted(table.items())
    else:
        items = sorted(
            ((entry.premise, entry.hypothesis), entry.probabilities)
            for entry in table
        )
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for (premise, hypothesis), probs in items:
            handle.write(
                json.dumps(
                    {
                        "premise": premise,
                        "hypothesis": hypothesis,
                        "entailment": probs.entailment,
                        "neutral": probs.neutral,
                        "contradiction": probs.contradiction,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )
            count += 1
    return count


def make_backend(selector: str):
    """Build a backend from a selector: "mock", "cache:PATH", "http[:URL]"."""
    if selector == "mock":
        return MockBackend()
    if selector.startswith("cache:"):
        path = selector[len("cache:") :]
        if not path:
            raise ValueError("cache backend needs a path: cache:PATH")
        return CacheBackend.from_file(path)
    if selector == "http":
        return HttpBackend()
    if selector.startswith("http:"):
        url = selector[len("http:") :]
        # "http://host/..." keeps its scheme; "http:host" is shorthand.
        if url.startswith("//"):
            url = "http:" + url
        return HttpBackend(url)
    raise ValueError(f"unknown backend selector {selector!r}")
