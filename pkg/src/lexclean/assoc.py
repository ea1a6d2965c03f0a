"""Co-occurrence counting, G-squared association scores and the lexicon type."""

from __future__ import annotations

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, NamedTuple

import numpy as np
from scipy.special import xlogy

from .corpus import SOURCE, TARGET, Corpus, Vocabulary
from .errors import CountingError, ResourceLimitError

SCORE_DECIMALS = 6
LEXICON_HEADER = ("source_word", "target_word", "score", "k", "n")


@dataclass
class CoocTable:
    """Sparse co-occurrence statistics for every pair seen in some segment pair.

    ``n`` follows the min rule (sum over segments of min(count_v, count_w));
    ``joint`` counts the segment pairs containing both words, which is the
    ``a`` cell of the 2x2 contingency table used by G-squared.
    """

    source: np.ndarray
    target: np.ndarray
    n: np.ndarray
    joint: np.ndarray
    source_occ: np.ndarray
    target_occ: np.ndarray
    n_segments: int
    source_vocab: Vocabulary
    target_vocab: Vocabulary

    def __len__(self) -> int:
        return len(self.n)

    @property
    def N(self) -> int:
        return int(self.n.sum())

    def g2(self) -> np.ndarray:
        return g2_scores(self.joint, self.source_occ[self.source], self.target_occ[self.target], self.n_segments)


def _count_chunk(segments, n_target: int):
    codes: list[int] = []
    mins: list[int] = []
    for seg in segments:
        if not seg.source or not seg.target:
            continue
        sc = Counter(seg.source)
        tc = Counter(seg.target)
        for v, cv in sc.items():
            base = v * n_target
            for w, cw in tc.items():
                codes.append(base + w)
                mins.append(cv if cv < cw else cw)
    if not codes:
        return {}
    codes_a = np.asarray(codes, dtype=np.int64)
    mins_a = np.asarray(mins, dtype=np.int64)
    uniq, inv = np.unique(codes_a, return_inverse=True)
    n = np.bincount(inv, weights=mins_a).astype(np.int64)
    joint = np.bincount(inv).astype(np.int64)
    return uniq, n, joint


def _merge_counts(parts):
    parts = [p for p in parts if len(p)]
    if not parts:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    codes = np.concatenate([p[0] for p in parts])
    n = np.concatenate([p[1] for p in parts])
    joint = np.concatenate([p[2] for p in parts])
    uniq, inv = np.unique(codes, return_inverse=True)
    return (
        uniq,
        np.bincount(inv, weights=n, minlength=len(uniq)).astype(np.int64),
        np.bincount(inv, weights=joint, minlength=len(uniq)).astype(np.int64),
    )


def chunk_segments(segments, workers: int, min_chunk: int = 2000):
    """Split into at most ``workers`` contiguous chunks."""
    n = len(segments)
    n_chunks = max(1, min(workers, -(-n // min_chunk) if min_chunk else workers))
    size = -(-n // n_chunks) if n else 0
    return [segments[i : i + size] for i in range(0, n, size)] if n else [segments]


def count_cooccurrences(
    corpus: Corpus, max_pairs: int | None = None, workers: int = 1, min_chunk: int = 2000
) -> CoocTable:
    """Count co-occurrences of every (source, target) word pair.

    Counting is partitioned over contiguous chunks of segment pairs when
    ``workers > 1``; the merged integer counts do not depend on the split.
    """
    n_target = max(len(corpus.target_vocab), 1)
    chunks = chunk_segments(corpus.segments, workers, min_chunk)
    if len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=len(chunks)) as ex:
            parts = list(ex.map(_count_chunk, chunks, [n_target] * len(chunks)))
    else:
        parts = [_count_chunk(chunks[0], n_target)]
    codes, n, joint = _merge_counts(parts)
    if max_pairs is not None and len(codes) > max_pairs:
        raise ResourceLimitError(
            f"{len(codes)} candidate pairs exceed the configured max_pairs bound of {max_pairs}"
        )

    source_occ = np.zeros(len(corpus.source_vocab), dtype=np.int64)
    target_occ = np.zeros(len(corpus.target_vocab), dtype=np.int64)
    for seg in corpus.segments:
        for v in set(seg.source):
            source_occ[v] += 1
        for w in set(seg.target):
            target_occ[w] += 1

    return CoocTable(
        source=codes // n_target,
        target=codes % n_target,
        n=n,
        joint=joint,
        source_occ=source_occ,
        target_occ=target_occ,
        n_segments=len(corpus),
        source_vocab=corpus.source_vocab,
        target_vocab=corpus.target_vocab,
    )


def _contingency(a, occ_v, occ_w, P):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(occ_v, dtype=np.float64) - a
    c = np.asarray(occ_w, dtype=np.float64) - a
    d = P - a - b - c
    return a, b, c, d


def g2_scores(a, occ_v, occ_w, P) -> np.ndarray:
    """Vectorized G-squared over 2x2 tables built from presence counts."""
    a, b, c, d = _contingency(a, occ_v, occ_w, P)
    if np.any(b < 0) or np.any(c < 0) or np.any(d < 0) or np.any(a < 0):
        raise CountingError("negative contingency cell; co-occurrence counts are inconsistent")
    row1, row2 = a + b, c + d
    col1, col2 = a + c, b + d
    total = float(P)
    g = np.zeros_like(a)
    for obs, r, col in ((a, row1, col1), (b, row1, col2), (c, row2, col1), (d, row2, col2)):
        with np.errstate(divide="ignore", invalid="ignore"):
            expected = r * col / total
            g += xlogy(obs, np.where(obs > 0, obs / expected, 1.0))
    return np.maximum(2.0 * g, 0.0)


def g2_score(n_vw: int, occ_v: int, occ_w: int, P: int) -> float:
    """G-squared log-likelihood ratio statistic for one word pair.

    ``n_vw`` is the number of segment pairs containing both words, ``occ_v``
    and ``occ_w`` the numbers containing each, ``P`` the number of segment
    pairs. Symmetric in the two words and never negative.
    """
    return float(g2_scores(np.array([n_vw]), np.array([occ_v]), np.array([occ_w]), P)[0])


class LexiconEntry(NamedTuple):
    source: str
    target: str
    score: float
    k: int
    n: int


class Lexicon:
    """A graded translation lexicon stored column-wise.

    ``v`` and ``w`` are word ids into ``source_vocab`` and ``target_vocab``.
    ``params`` is the mixture estimate that produced the current scores, or
    None while the scores are still initial association scores.
    """

    def __init__(
        self,
        source_vocab: Vocabulary,
        target_vocab: Vocabulary,
        v,
        w,
        score,
        k=None,
        n=None,
        generation: int = 0,
        params=None,
    ):
        self.source_vocab = source_vocab
        self.target_vocab = target_vocab
        self.v = np.asarray(v, dtype=np.int64)
        self.w = np.asarray(w, dtype=np.int64)
        self.score = np.asarray(score, dtype=np.float64)
        size = len(self.v)
        self.k = np.zeros(size, dtype=np.int64) if k is None else np.asarray(k, dtype=np.int64)
        self.n = np.zeros(size, dtype=np.int64) if n is None else np.asarray(n, dtype=np.int64)
        if not (len(self.w) == len(self.score) == len(self.k) == len(self.n) == size):
            raise ValueError("lexicon columns differ in length")
        self.generation = generation
        self.params = params
        self._index = None
        self._order = None
        self._priority = None

    def __len__(self) -> int:
        return len(self.v)

    def __iter__(self) -> Iterator[LexiconEntry]:
        sw, tw = self.source_vocab.words, self.target_vocab.words
        for i in range(len(self)):
            yield LexiconEntry(sw[self.v[i]], tw[self.w[i]], float(self.score[i]), int(self.k[i]), int(self.n[i]))

    def __repr__(self) -> str:
        return f"Lexicon(entries={len(self)}, generation={self.generation})"

    @property
    def codes(self) -> np.ndarray:
        return self.v * max(len(self.target_vocab), 1) + self.w

    @property
    def index(self) -> dict[tuple[int, int], int]:
        """Map (v, w) to entry position."""
        if self._index is None:
            self._index = {(int(a), int(b)): i for i, (a, b) in enumerate(zip(self.v, self.w))}
        return self._index

    def order(self) -> np.ndarray:
        """Entry positions by descending score, ties by (source, target) string."""
        if self._order is None:
            self._order = np.lexsort(
                (self.target_vocab.rank[self.w], self.source_vocab.rank[self.v], -self.score)
            )
        return self._order

    def priority(self) -> list[int]:
        """Rank of each entry in :meth:`order`; lower wins competitions."""
        if self._priority is None:
            order = self.order()
            rank = np.empty(len(order), dtype=np.int64)
            rank[order] = np.arange(len(order))
            self._priority = rank.tolist()
        return self._priority

    def string_pairs(self) -> set[tuple[str, str]]:
        sw, tw = self.source_vocab.words, self.target_vocab.words
        return {(sw[a], tw[b]) for a, b in zip(self.v, self.w)}

    def get(self, source: str, target: str) -> LexiconEntry | None:
        v, w = self.source_vocab.id_of(source), self.target_vocab.id_of(target)
        i = self.index.get((v, w)) if v is not None and w is not None else None
        if i is None:
            return None
        return LexiconEntry(source, target, float(self.score[i]), int(self.k[i]), int(self.n[i]))

    def subset(self, mask) -> "Lexicon":
        """Filtered copy; ``mask`` is a boolean array or index array."""
        return Lexicon(
            self.source_vocab,
            self.target_vocab,
            self.v[mask],
            self.w[mask],
            self.score[mask],
            self.k[mask],
            self.n[mask],
            generation=self.generation,
            params=self.params,
        )

    def replace(self, **changes) -> "Lexicon":
        fields = dict(
            v=self.v, w=self.w, score=self.score, k=self.k, n=self.n,
            generation=self.generation, params=self.params,
        )
        fields.update(changes)
        return Lexicon(self.source_vocab, self.target_vocab, **fields)

    def transpose(self) -> "Lexicon":
        return Lexicon(
            self.target_vocab, self.source_vocab, self.w, self.v, self.score, self.k, self.n,
            generation=self.generation, params=self.params,
        )

    def sorted_entries(self) -> list[LexiconEntry]:
        """Entries in file order: descending printed score, then strings."""
        entries = list(self)
        entries.sort(key=lambda e: (-round(e.score, SCORE_DECIMALS), e.source, e.target))
        return entries

    @classmethod
    def from_entries(cls, entries, generation: int = 0, params=None) -> "Lexicon":
        src, tgt = Vocabulary(SOURCE), Vocabulary(TARGET)
        v, w, score, k, n = [], [], [], [], []
        for e in entries:
            e = LexiconEntry(*e)
            v.append(src.intern(e.source))
            w.append(tgt.intern(e.target))
            score.append(e.score)
            k.append(e.k)
            n.append(e.n)
        return cls(src, tgt, v, w, score, k, n, generation=generation, params=params)


def build_initial_lexicon(
    table: CoocTable, min_score: float = 0.0, max_candidates_per_word: int | None = None
) -> Lexicon:
    """Score every co-occurring pair with G-squared and threshold it.

    With ``max_candidates_per_word`` set, an entry survives only if it is
    among the top candidates of both its source word and its target word.
    """
    scores = table.g2()
    keep = (table.n >= 1) & (scores >= min_score)
    idx = np.flatnonzero(keep)
    if max_candidates_per_word is not None and len(idx):
        m = int(max_candidates_per_word)
        src_rank = table.source_vocab.rank
        tgt_rank = table.target_vocab.rank
        order = idx[np.lexsort((tgt_rank[table.target[idx]], src_rank[table.source[idx]], -scores[idx]))]
        seen_src: Counter = Counter()
        seen_tgt: Counter = Counter()
        top_src = set()
        top_tgt = set()
        for i in order:
            v, w = table.source[i], table.target[i]
            if seen_src[v] < m:
                top_src.add(i)
            if seen_tgt[w] < m:
                top_tgt.add(i)
            seen_src[v] += 1
            seen_tgt[w] += 1
        idx = np.array(sorted(top_src & top_tgt), dtype=np.int64)
    return Lexicon(
        table.source_vocab,
        table.target_vocab,
        table.source[idx],
        table.target[idx],
        scores[idx],
        np.zeros(len(idx), dtype=np.int64),
        table.n[idx],
        generation=0,
    )


def format_score(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = f"{x:.{SCORE_DECIMALS}f}"
    return "0.000000" if s == "-0.000000" else s


def write_lexicon(lexicon: Lexicon, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\t".join(LEXICON_HEADER) + "\n")
        for e in lexicon.sorted_entries():
            fh.write(f"{e.source}\t{e.target}\t{format_score(e.score)}\t{e.k}\t{e.n}\n")


def read_lexicon(path, params=None, generation: int = 0) -> Lexicon:
    entries = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().rstrip("\n").split("\t")
        if tuple(header) != LEXICON_HEADER:
            raise ValueError(f"{path}: not a lexicon file (header {header!r})")
        for lineno, line in enumerate(fh, 2):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 5:
                raise ValueError(f"{path}:{lineno}: expected 5 columns")
            entries.append(LexiconEntry(parts[0], parts[1], float(parts[2]), int(parts[3]), int(parts[4])))
    return Lexicon.from_entries(entries, generation=generation, params=params)
