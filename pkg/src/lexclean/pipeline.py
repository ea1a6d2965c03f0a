"""Iterative lexicon cleaning, plateau cutoffs and the greedy baseline."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .assoc import CoocTable, Lexicon, build_initial_lexicon, count_cooccurrences, write_lexicon
from .corpus import Corpus
from .errors import ConfigError, EstimationError, NotRegradedError, PipelineError
from .linker import align_lexicon, link_corpus, write_link_dump
from .mixture import MixtureParams, estimate_params, likelihood_ratio_log, write_params

log = logging.getLogger(__name__)

PRESETS = {"1/1": (1, 1), "2/2": (2, 2), "3/3": (3, 3)}
REPORT_COLUMNS = (
    "iteration", "lambda_right", "lambda_wrong", "entries_in_lexicon",
    "log_data_prob", "mean_entry_log_likelihood",
)


@dataclass(frozen=True)
class IterationReport:
    iteration: int
    lambda_right: float
    lambda_wrong: float
    entries_in_lexicon: int
    log_data_prob: float
    mean_entry_log_likelihood: float


@dataclass
class CleanConfig:
    max_iterations: int = 10
    param_tolerance: float = 1e-6
    entry_set_stability: bool = True
    cutoff: str | None = None

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ConfigError("max_iterations must be >= 1")
        if self.cutoff is not None and self.cutoff not in PRESETS:
            raise ConfigError(f"unknown cutoff preset {self.cutoff!r}")


class CleaningHistory(list):
    """List of :class:`IterationReport`; ``converged`` tells whether the loop
    stopped at a fixed point rather than at ``max_iterations``."""

    converged: bool = False


@dataclass(frozen=True)
class CutoffSpec:
    plateau: tuple[int, int] | None = None
    min_log_score: float | None = None

    def __post_init__(self):
        if (self.plateau is None) == (self.min_log_score is None):
            raise ConfigError("a cutoff is either a plateau or a minimum log score")
        if self.plateau is not None:
            k, n = self.plateau
            if not 0 <= k <= n or n < 1:
                raise ConfigError(f"bad plateau class {k}/{n}")

    @classmethod
    def parse(cls, text: str) -> "CutoffSpec":
        """``"2/2"`` gives a plateau cutoff; a number gives a score cutoff."""
        if "/" in text:
            k, _, n = text.partition("/")
            return cls(plateau=(int(k), int(n)))
        return cls(min_log_score=float(text))

    def threshold(self, params: MixtureParams | None) -> float:
        if self.min_log_score is not None:
            return self.min_log_score
        if params is None:
            raise NotRegradedError("lexicon not regraded: plateau cutoffs need mixture parameters")
        return likelihood_ratio_log(self.plateau[0], self.plateau[1], params)

    def __str__(self) -> str:
        if self.plateau is not None:
            return f"{self.plateau[0]}/{self.plateau[1]}"
        return repr(self.min_log_score)


def _report(iteration: int, lexicon: Lexicon, params: MixtureParams) -> IterationReport:
    size = len(lexicon)
    return IterationReport(
        iteration,
        params.lambda_right,
        params.lambda_wrong,
        size,
        params.log_data_prob,
        params.log_data_prob / size,
    )


def write_report(reports, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(REPORT_COLUMNS) + "\n")
        for r in reports:
            fh.write("\t".join(repr(getattr(r, c)) for c in REPORT_COLUMNS) + "\n")


def read_report(path) -> list[IterationReport]:
    types = {f.name: f.type for f in fields(IterationReport)}
    out = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != REPORT_COLUMNS:
            raise ValueError(f"{path}: unexpected report header")
        for line in fh:
            if line.strip():
                vals = line.rstrip("\n").split("\t")
                out.append(IterationReport(**{
                    c: int(v) if types[c] == "int" else float(v) for c, v in zip(header, vals)
                }))
    return out


def _write_snapshot(run_dir: Path, iteration: int, lexicon: Lexicon, params, assignments, corpus) -> None:
    d = run_dir / f"iter_{iteration}"
    d.mkdir(parents=True, exist_ok=True)
    write_lexicon(lexicon, d / "lexicon.tsv")
    if params is not None:
        write_params(params, d / "params.txt")
    if assignments is not None:
        write_link_dump(corpus, assignments, d / "links.tsv")


def clean(
    corpus: Corpus,
    initial: Lexicon,
    config: CleanConfig | None = None,
    *,
    table: CoocTable | None = None,
    workers: int = 1,
    run_dir=None,
    dump_links: bool = False,
) -> tuple[Lexicon, CleaningHistory]:
    """Link, discard never-linked entries, re-estimate, regrade; repeat.

    Iterations after the first link with the regraded log-likelihood-ratio
    scores. The loop stops when the entry set is unchanged and both link
    probabilities moved by less than ``param_tolerance``, or after
    ``max_iterations``. Returns the final lexicon and one report per
    iteration.
    """
    config = config or CleanConfig()
    run_dir = Path(run_dir) if run_dir is not None else None
    lexicon = align_lexicon(initial, corpus)
    if run_dir is not None:
        _write_snapshot(run_dir, 0, lexicon, None, None, corpus)

    history = CleaningHistory()
    prev_codes = np.sort(lexicon.codes)
    prev_params: MixtureParams | None = None
    for it in range(1, config.max_iterations + 1):
        if not len(lexicon):
            raise PipelineError(f"iteration {it}: no entry ever linked (lexicon is empty)")
        tally = link_corpus(corpus, lexicon, table, workers=workers, keep_links=dump_links)
        linked = tally.k > 0
        if not linked.any():
            raise PipelineError(f"iteration {it}: no entry ever linked")
        survivors = lexicon.subset(linked).replace(k=tally.k[linked], n=tally.n[linked])
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                params = estimate_params(survivors)
        except EstimationError as exc:
            raise EstimationError(f"iteration {it}: {exc}") from exc
        if params.saturated:
            log.warning("iteration %d: every co-occurrence linked; parameters pinned", it)
        lexicon = survivors.replace(
            score=likelihood_ratio_log(survivors.k, survivors.n, params), generation=it, params=params
        )
        report = _report(it, lexicon, params)
        history.append(report)
        log.info(
            "iteration %d: lambda_right=%.6g lambda_wrong=%.6g entries=%d log_prob=%.6g",
            it, params.lambda_right, params.lambda_wrong, len(lexicon), params.log_data_prob,
        )
        if run_dir is not None:
            _write_snapshot(run_dir, it, lexicon, params, tally.assignments, corpus)

        codes = np.sort(lexicon.codes)
        same_set = len(codes) == len(prev_codes) and bool(np.all(codes == prev_codes))
        if prev_params is not None and (same_set or not config.entry_set_stability):
            if (abs(params.lambda_right - prev_params.lambda_right) < config.param_tolerance
                    and abs(params.lambda_wrong - prev_params.lambda_wrong) < config.param_tolerance):
                history.converged = True
                break
        prev_codes, prev_params = codes, params

    if run_dir is not None:
        write_report(history, run_dir / "report.tsv")
        write_lexicon(lexicon, run_dir / "lexicon.tsv")
        write_params(lexicon.params, run_dir / "params.txt")
    return lexicon, history


def apply_cutoff(lexicon: Lexicon, cutoff: CutoffSpec) -> Lexicon:
    """Keep entries scoring at least the cutoff; the input is not modified."""
    if lexicon.params is None:
        raise NotRegradedError("lexicon not regraded: run the cleaning loop first")
    threshold = cutoff.threshold(lexicon.params)
    if cutoff.plateau is not None and threshold <= 0:
        warnings.warn(
            f"plateau {cutoff} scores {threshold:.6g} <= 0 under the current parameters; "
            "the cutoff keeps entries more likely wrong than right",
            RuntimeWarning,
            stacklevel=2,
        )
    if math.isinf(threshold) and threshold < 0:
        return lexicon.subset(np.arange(len(lexicon)))
    return lexicon.subset(lexicon.score >= threshold)


def greedy_baseline(corpus: Corpus, threshold: float, table: CoocTable | None = None) -> Lexicon:
    """Score all co-occurring pairs with G-squared and keep those above ``threshold``."""
    if table is None:
        table = count_cooccurrences(corpus)
    lexicon = build_initial_lexicon(table, min_score=-math.inf)
    return lexicon.subset(lexicon.score > threshold)


def regrade(lexicon: Lexicon, params: MixtureParams) -> Lexicon:
    """Recompute every score from its (k, n) tally under ``params``."""
    return lexicon.replace(score=likelihood_ratio_log(lexicon.k, lexicon.n, params), params=params)


def config_dict(config: CleanConfig) -> dict:
    return asdict(config)
