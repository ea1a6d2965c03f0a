"""Translation lexicon induction from bitexts with iterative cleaning."""

from .assoc import (
    CoocTable,
    Lexicon,
    LexiconEntry,
    build_initial_lexicon,
    count_cooccurrences,
    g2_score,
    read_lexicon,
    write_lexicon,
)
from .corpus import Corpus, PreprocessOptions, SegmentPair, StemmerSpec, load_corpus, stem
from .errors import (
    ConfigError,
    CorpusParseError,
    CountingError,
    EmptyCorpusError,
    EstimationError,
    IncompleteAdjudicationError,
    LexcleanError,
    NotRegradedError,
    PipelineError,
    ResourceLimitError,
)
from .estimators import BinomialLinkMixture, GreedyLexiconBaseline, LexiconCleaner
from .eval import GeneratorConfig, GroundTruth, generate_bitext, measure_recall
from .linker import LinkTally, link_corpus, link_segment
from .mixture import (
    MixtureParams,
    binomial_log_pmf,
    estimate_params,
    likelihood_ratio_log,
    mixture_log_likelihood,
)
from .pipeline import CleanConfig, CutoffSpec, apply_cutoff, clean, greedy_baseline

__version__ = "0.1.0"

__all__ = [
    "CoocTable",
    "Lexicon",
    "LexiconEntry",
    "build_initial_lexicon",
    "count_cooccurrences",
    "g2_score",
    "read_lexicon",
    "write_lexicon",
    "Corpus",
    "PreprocessOptions",
    "SegmentPair",
    "StemmerSpec",
    "load_corpus",
    "stem",
    "ConfigError",
    "CorpusParseError",
    "CountingError",
    "EmptyCorpusError",
    "EstimationError",
    "IncompleteAdjudicationError",
    "LexcleanError",
    "NotRegradedError",
    "PipelineError",
    "ResourceLimitError",
    "BinomialLinkMixture",
    "GreedyLexiconBaseline",
    "LexiconCleaner",
    "GeneratorConfig",
    "GroundTruth",
    "generate_bitext",
    "measure_recall",
    "LinkTally",
    "link_corpus",
    "link_segment",
    "MixtureParams",
    "binomial_log_pmf",
    "estimate_params",
    "likelihood_ratio_log",
    "mixture_log_likelihood",
    "CleanConfig",
    "CutoffSpec",
    "apply_cutoff",
    "clean",
    "greedy_baseline",
]
