"""Entailment-guided linking, augmentation, and scoring for dialogue
summaries."""

from .aligner import (
    AlignmentResult,
    BipartiteMapping,
    GroupQueryLog,
    build_bipartite_graph,
    partition_sentences,
    resolve_group_pass,
    resolve_pairwise_pass,
)
from .augmenter import (
    AugmentedRecord,
    ContrastiveLabels,
    MixAndMatchItem,
    MixAndMatchSummary,
    augment_record,
    build_contrastive_labels,
    build_mix_and_match,
)
from .corpus_io import (
    SummaryRecord,
    read_augmented,
    read_corpus,
    validate_record,
    write_augmented,
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
from .nli import (
    CacheBackend,
    CacheEntry,
    EntailmentProbabilities,
    HttpBackend,
    MockBackend,
    NliProvider,
    NliQuery,
    load_matrix_cache,
    make_backend,
    save_matrix_cache,
)
from .scorer import CoverageReport, RougeLScore, coverage_report, rouge_l
from .segmenter import SentenceList, split_sentences

__version__ = "0.1.0"

__all__ = [
    "AlignmentResult",
    "AugmentedRecord",
    "BackendUnavailable",
    "BipartiteMapping",
    "CacheBackend",
    "CacheEntry",
    "CacheMiss",
    "ContrastiveLabels",
    "CoverageReport",
    "DimensionMismatch",
    "EmptyGens",
    "EmptyRefs",
    "EntailmentProbabilities",
    "GroupQueryLog",
    "HttpBackend",
    "MalformedResponse",
    "MixAndMatchItem",
    "MixAndMatchSummary",
    "MockBackend",
    "NliProvider",
    "NliQuery",
    "ParseError",
    "RougeLScore",
    "SentenceList",
    "SkippedRecord",
    "SummaryRecord",
    "SwingError",
    "augment_record",
    "build_bipartite_graph",
    "build_contrastive_labels",
    "build_mix_and_match",
    "coverage_report",
    "load_matrix_cache",
    "make_backend",
    "partition_sentences",
    "read_augmented",
    "read_corpus",
    "resolve_group_pass",
    "resolve_pairwise_pass",
    "rouge_l",
    "save_matrix_cache",
    "split_sentences",
    "validate_record",
    "write_augmented",
]
