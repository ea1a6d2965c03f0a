"""Recall and precision measurement, concordances and synthetic bitext.

Recall counts word types: the share of each side's vocabulary that appears
in at least one lexicon entry. Precision is estimated from seeded samples
drawn with replacement; entries found in a gold lexicon count as correct and
the rest wait for a human verdict, supported by concordance excerpts.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .assoc import Lexicon
from .corpus import IDENTITY, Corpus, StemmerSpec, stem
from .errors import ConfigError, IncompleteAdjudicationError

GOLD_MATCH = "gold-match"
HUMAN_PENDING = "human-pending"
HUMAN_CORRECT = "human-correct"
HUMAN_INCORRECT = "human-incorrect"
VERDICTS = (GOLD_MATCH, HUMAN_PENDING, HUMAN_CORRECT, HUMAN_INCORRECT)
INCOMPLETE = "incomplete adjudication"


# -- recall -----------------------------------------------------------------

@dataclass(frozen=True)
class Coverage:
    represented: int
    total: int

    @property
    def percent(self) -> float:
        return 100.0 * self.represented / self.total if self.total else 0.0


@dataclass(frozen=True)
class RecallReport:
    source: Coverage
    target: Coverage

    @property
    def combined(self) -> Coverage:
        return Coverage(self.source.represented + self.target.represented,
                        self.source.total + self.target.total)

    def rows(self):
        for name, cov in (("source", self.source), ("target", self.target), ("combined", self.combined)):
            yield name, cov.represented, cov.total, cov.percent


def measure_recall(lexicon: Lexicon, corpus: Corpus) -> RecallReport:
    """Word-type recall of ``lexicon`` against the words occurring in ``corpus``."""
    sv, tv = corpus.source_vocab, corpus.target_vocab
    src_words = {w for w, c in zip(sv.words, sv.counts) if c > 0}
    tgt_words = {w for w, c in zip(tv.words, tv.counts) if c > 0}
    lex_src = {lexicon.source_vocab.word(i) for i in np.unique(lexicon.v)}
    lex_tgt = {lexicon.target_vocab.word(i) for i in np.unique(lexicon.w)}
    return RecallReport(
        Coverage(len(lex_src & src_words), len(src_words)),
        Coverage(len(lex_tgt & tgt_words), len(tgt_words)),
    )


def write_recall(report: RecallReport, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("side\trepresented\ttotal\tpercent\n")
        for name, rep, total, pct in report.rows():
            fh.write(f"{name}\t{rep}\t{total}\t{pct:.4f}\n")


# -- gold lexicons ----------------------------------------------------------

def read_gold(path, stemmer: StemmerSpec = IDENTITY, lowercase: bool = False) -> set[tuple[str, str]]:
    """Gold TSV of source TAB target; ``#`` comments allowed. Words are
    normalized with the run's stemmer so they match corpus forms."""
    gold = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected source<TAB>target")
            s, t = parts[0].strip(), parts[1].strip()
            if lowercase:
                s, t = s.lower(), t.lower()
            gold.add((stem(s, stemmer), stem(t, stemmer)))
    return gold


def write_gold(pairs: Iterable[tuple[str, str]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s, t in sorted(pairs):
            fh.write(f"{s}\t{t}\n")


def exact_precision(lexicon: Lexicon, gold: set[tuple[str, str]]) -> float:
    """Share of all entries found in ``gold`` (closed-loop use only)."""
    if not len(lexicon):
        return float("nan")
    pairs = lexicon.string_pairs()
    return len(pairs & gold) / len(pairs)


def precision_at_recall(lexicon: Lexicon, gold, corpus: Corpus, target_percent: float):
    """Precision of the shortest score-ranked prefix reaching a combined recall.

    Ties in score are never split. Returns ``(precision, recall_percent,
    entries)``; if the whole lexicon falls short, the full lexicon is used.
    """
    sv, tv = corpus.source_vocab, corpus.target_vocab
    total = int((sv.counts > 0).sum() + (tv.counts > 0).sum())
    order = lexicon.order()
    scores = lexicon.score[order]
    sw, tw = lexicon.source_vocab.words, lexicon.target_vocab.words
    seen_s: set = set()
    seen_t: set = set()
    correct = 0
    needed = target_percent * total / 100.0
    i = 0
    while i < len(order):
        j = i
        while j < len(order) and scores[j] == scores[i]:
            e = order[j]
            s, t = sw[lexicon.v[e]], tw[lexicon.w[e]]
            if s in sv:
                seen_s.add(s)
            if t in tv:
                seen_t.add(t)
            correct += (s, t) in gold
            j += 1
        i = j
        if len(seen_s) + len(seen_t) >= needed - 1e-9:
            break
    taken = i
    precision = correct / taken if taken else float("nan")
    return precision, 100.0 * (len(seen_s) + len(seen_t)) / total, taken


# -- precision sampling -----------------------------------------------------

@dataclass
class PrecisionSample:
    sample_id: int
    seed: int
    entries: list[tuple[str, str]]
    verdicts: list[str]

    def count(self, verdict: str) -> int:
        return sum(v == verdict for v in self.verdicts)

    @property
    def pending(self) -> int:
        return self.count(HUMAN_PENDING)

    @property
    def precision(self) -> float | None:
        """Correct share, or None while any verdict is pending."""
        if self.pending:
            return None
        return (self.count(GOLD_MATCH) + self.count(HUMAN_CORRECT)) / len(self.entries)


@dataclass
class PrecisionSummary:
    samples: list[PrecisionSample]
    status: str
    mean: float | None = None
    std: float | None = None


def sample_for_precision(
    lexicon: Lexicon,
    gold: set[tuple[str, str]],
    n_samples: int = 5,
    size: int = 100,
    seed: int = 0,
) -> list[PrecisionSample]:
    """Draw ``n_samples`` seeded samples of ``size`` entries with replacement."""
    if not len(lexicon):
        raise ValueError("cannot sample from an empty lexicon")
    entries = [(e.source, e.target) for e in lexicon.sorted_entries()]
    rng = np.random.default_rng(seed)
    samples = []
    for sid in range(n_samples):
        draws = rng.integers(0, len(entries), size=size)
        picked = [entries[i] for i in draws]
        verdicts = [GOLD_MATCH if p in gold else HUMAN_PENDING for p in picked]
        samples.append(PrecisionSample(sid, seed, picked, verdicts))
    return samples


def apply_adjudication(samples: list[PrecisionSample], verdicts: dict[tuple[str, str], str]) -> None:
    """Fill pending verdicts from a ``{(source, target): verdict}`` map."""
    for s in samples:
        for i, (pair, v) in enumerate(zip(s.entries, s.verdicts)):
            if v == HUMAN_PENDING and pair in verdicts:
                s.verdicts[i] = verdicts[pair]


def summarize_precision(samples: list[PrecisionSample], strict: bool = False) -> PrecisionSummary:
    """Mean and sample standard deviation of per-sample precision.

    With pending verdicts the status is ``incomplete adjudication`` and no
    number is produced; ``strict`` raises instead.
    """
    if any(s.pending for s in samples):
        if strict:
            raise IncompleteAdjudicationError(INCOMPLETE)
        return PrecisionSummary(samples, INCOMPLETE)
    vals = np.array([s.precision for s in samples], dtype=np.float64)
    std = float(vals.std(ddof=1)) if len(vals) > 1 else 0.0
    return PrecisionSummary(samples, "complete", float(vals.mean()), std)


def write_precision_report(summary: PrecisionSummary, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("sample_id\tgold_matches\thuman_correct\thuman_incorrect\tpending\tprecision\n")
        for s in summary.samples:
            p = "NA" if s.precision is None else f"{s.precision:.4f}"
            fh.write(f"{s.sample_id}\t{s.count(GOLD_MATCH)}\t{s.count(HUMAN_CORRECT)}\t"
                     f"{s.count(HUMAN_INCORRECT)}\t{s.pending}\t{p}\n")
        if summary.mean is None:
            fh.write(f"# status: {summary.status}\n")
        else:
            fh.write(f"# status: {summary.status}\n# mean: {summary.mean:.4f}\n# std: {summary.std:.4f}\n")


def write_adjudication(samples: list[PrecisionSample], path) -> int:
    """Write pending entries for a human to fill the verdict column.

    Verdict values read back: ``correct`` / ``incorrect`` (or the full
    ``human-correct`` / ``human-incorrect``). Returns the number of rows.
    """
    pending = sorted({p for s in samples for p, v in zip(s.entries, s.verdicts) if v == HUMAN_PENDING})
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("source_word\ttarget_word\tverdict\n")
        for s, t in pending:
            fh.write(f"{s}\t{t}\t\n")
    return len(pending)


def read_adjudication(path) -> dict[tuple[str, str], str]:
    mapping = {"correct": HUMAN_CORRECT, "incorrect": HUMAN_INCORRECT,
               HUMAN_CORRECT: HUMAN_CORRECT, HUMAN_INCORRECT: HUMAN_INCORRECT}
    out = {}
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for lineno, line in enumerate(fh, 2):
            parts = line.rstrip("\r\n").split("\t")
            if len(parts) < 3 or not parts[2].strip():
                continue
            verdict = parts[2].strip().lower()
            if verdict not in mapping:
                raise ValueError(f"{path}:{lineno}: unknown verdict {parts[2]!r}")
            out[(parts[0], parts[1])] = mapping[verdict]
    return out


# -- concordance ------------------------------------------------------------

@dataclass(frozen=True)
class ConcordanceLine:
    segment: int
    source: tuple[str, ...]
    target: tuple[str, ...]
    source_marks: tuple[int, ...]
    target_marks: tuple[int, ...]

    def format(self) -> str:
        def mark(tokens, marks):
            marks = set(marks)
            return " ".join(f"[[{t}]]" if i in marks else t for i, t in enumerate(tokens))

        return f"{self.segment}\tS\t{mark(self.source, self.source_marks)}\n" \
               f"{self.segment}\tT\t{mark(self.target, self.target_marks)}"


def concordance(entry: tuple[str, str], corpus: Corpus, max_lines: int = 20) -> list[ConcordanceLine]:
    """Segment pairs where the source word and the target word both occur."""
    v = corpus.source_vocab.id_of(entry[0])
    w = corpus.target_vocab.id_of(entry[1])
    if v is None or w is None:
        return []
    out = []
    for seg in corpus.segments:
        if len(out) >= max_lines:
            break
        if v in seg.source and w in seg.target:
            out.append(ConcordanceLine(
                seg.index,
                tuple(corpus.source_words(seg)),
                tuple(corpus.target_words(seg)),
                tuple(i for i, x in enumerate(seg.source) if x == v),
                tuple(j for j, x in enumerate(seg.target) if x == w),
            ))
    return out


def format_concordance(entry: tuple[str, str], lines: Sequence[ConcordanceLine]) -> str:
    head = f"# {entry[0]}\t{entry[1]}\t{len(lines)} excerpt(s)"
    return "\n".join([head] + [line.format() for line in lines]) + "\n"


# -- synthetic bitext -------------------------------------------------------

@dataclass(frozen=True)
class GeneratorConfig:
    """Seeded parallel-corpus generator.

    Every source word has a collocate that follows it with ``p_collocate``.
    Each source token is translated with ``p_trans``, dropped with
    ``p_drop``, or with ``p_indirect`` replaced by the translation of its
    collocate, a word that tends to stand next to it; the leftover mass emits
    a random target word.
    """

    n_segments: int = 50_000
    n_pairs: int = 1000
    zipf_exponent: float = 1.5
    min_length: int = 3
    max_length: int = 10
    p_trans: float = 0.9
    p_drop: float = 0.05
    p_indirect: float = 0.05
    p_collocate: float = 0.3
    seed: int = 42

    def __post_init__(self):
        for name in ("p_trans", "p_drop", "p_indirect", "p_collocate"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ConfigError(f"{name}={val} is not in [0, 1]")
        if self.p_trans + self.p_drop + self.p_indirect > 1.0 + 1e-12:
            raise ConfigError("p_trans + p_drop + p_indirect exceeds 1")
        if self.n_pairs < 1 or self.n_segments < 1:
            raise ConfigError("vocabulary size and segment count must be >= 1")
        if not 1 <= self.min_length <= self.max_length:
            raise ConfigError("need 1 <= min_length <= max_length")


@dataclass
class GroundTruth:
    pairs: set[tuple[str, str]]
    config: GeneratorConfig
    collocates: dict[str, str] = field(default_factory=dict, repr=False)

    def config_dict(self) -> dict:
        return asdict(self.config)


def _zipf_probs(n: int, s: float) -> np.ndarray:
    ranks = np.arange(1, n + 1, dtype=np.float64)
    p = ranks ** -s
    return p / p.sum()


def generate_pairs(config: GeneratorConfig) -> tuple[list[tuple[list[str], list[str]]], GroundTruth]:
    """Token-level bitext plus its true lexicon, deterministic per seed."""
    rng = np.random.default_rng(config.seed)
    m = config.n_pairs
    width = max(4, len(str(m - 1)))
    src_words = [f"s{i:0{width}d}" for i in range(m)]
    tgt_words = [f"t{i:0{width}d}" for i in range(m)]
    translation = rng.permutation(m)
    by_rank = rng.permutation(m)
    freq = np.empty(m)
    freq[by_rank] = _zipf_probs(m, config.zipf_exponent)
    # words of neighbouring frequency rank are each other's collocates
    collocate = np.arange(m)
    for r in range(0, m - 1, 2):
        a, b = by_rank[r], by_rank[r + 1]
        collocate[a], collocate[b] = b, a
    if m % 2 and m > 1:
        collocate[by_rank[-1]] = by_rank[-2]
    cdf = np.cumsum(freq)
    cdf[-1] = 1.0

    lengths = rng.integers(config.min_length, config.max_length + 1, size=config.n_segments)
    total = int(lengths.sum())
    fresh = np.minimum(np.searchsorted(cdf, rng.random(total), side="right"), m - 1)
    use_colloc = rng.random(total) < config.p_collocate
    channel = rng.random(total)
    noise = np.minimum(np.searchsorted(cdf, rng.random(total), side="right"), m - 1)
    shuffle_keys = rng.random(total)

    t_cut = config.p_trans
    d_cut = t_cut + config.p_drop
    i_cut = d_cut + config.p_indirect
    pairs = []
    pos = 0
    for length in lengths.tolist():
        src: list[int] = []
        for i in range(length):
            if i and use_colloc[pos + i]:
                src.append(int(collocate[src[-1]]))
            else:
                src.append(int(fresh[pos + i]))
        tgt: list[int] = []
        keys: list[float] = []
        for i, v in enumerate(src):
            u = channel[pos + i]
            if u < t_cut:
                tgt.append(int(translation[v]))
            elif u < d_cut:
                continue
            elif u < i_cut:
                tgt.append(int(translation[collocate[v]]))
            else:
                tgt.append(int(noise[pos + i]))
            keys.append(shuffle_keys[pos + i])
        order = np.argsort(keys, kind="stable") if keys else []
        pairs.append(([src_words[v] for v in src], [tgt_words[tgt[j]] for j in order]))
        pos += length

    truth = GroundTruth(
        {(src_words[i], tgt_words[translation[i]]) for i in range(m)},
        config,
        {src_words[i]: src_words[collocate[i]] for i in range(m)},
    )
    return pairs, truth


def generate_bitext(config: GeneratorConfig = GeneratorConfig()) -> tuple[Corpus, GroundTruth]:
    pairs, truth = generate_pairs(config)
    corpus = Corpus.from_pairs(pairs)
    corpus.preprocessing["generator_seed"] = config.seed
    return corpus, truth
