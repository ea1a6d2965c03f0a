"""Competitive linking within aligned segment pairs.

Within a segment pair, the applicable lexicon entry with the best score is
linked, one token of each of its words is consumed, and the process repeats
until no lexicon entry has both words left. Equal scores are resolved by the
(source word, target word) string order; repeated words consume their
leftmost free position first.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .assoc import CoocTable, Lexicon, chunk_segments
from .corpus import Corpus, SegmentPair


class Link(NamedTuple):
    """Source position, target position, source id, target id."""

    i: int
    j: int
    v: int
    w: int


@dataclass(frozen=True)
class LinkAssignment:
    segment: int
    links: tuple[Link, ...] = ()

    def __len__(self) -> int:
        return len(self.links)

    def pairs(self) -> Counter:
        return Counter((l.v, l.w) for l in self.links)


@dataclass
class LinkTally:
    """Per-entry link counts ``k`` and co-occurrence counts ``n``.

    Both arrays are aligned with the entries of ``lexicon``. ``N_all`` is the
    co-occurrence total over every word pair of the corpus, lexicon or not,
    when a co-occurrence table was supplied.
    """

    lexicon: Lexicon
    k: np.ndarray
    n: np.ndarray
    N_all: int | None = None
    assignments: list[LinkAssignment] | None = field(default=None, repr=False)

    @property
    def K(self) -> int:
        return int(self.k.sum())

    @property
    def N(self) -> int:
        return int(self.n.sum())


def _candidates(pair: SegmentPair, index: dict, priority) -> list[tuple[int, int, int, int]]:
    cands = []
    tgt = set(pair.target)
    for v in set(pair.source):
        for w in tgt:
            e = index.get((v, w))
            if e is not None:
                cands.append((priority[e], e, v, w))
    cands.sort()
    return cands


def link_segment(pair: SegmentPair, lexicon: Lexicon) -> LinkAssignment:
    """Competitively link the tokens of one segment pair."""
    if not pair.source or not pair.target or not len(lexicon):
        return LinkAssignment(pair.index)
    priority = lexicon.priority()
    src_free: dict[int, list[int]] = {}
    for i, v in enumerate(pair.source):
        src_free.setdefault(v, []).append(i)
    tgt_free: dict[int, list[int]] = {}
    for j, w in enumerate(pair.target):
        tgt_free.setdefault(w, []).append(j)
    for lst in src_free.values():
        lst.reverse()
    for lst in tgt_free.values():
        lst.reverse()

    links = []
    # scores do not change inside a segment, so the best applicable entry is
    # always the first remaining candidate whose words both have free tokens
    for _, _, v, w in _candidates(pair, lexicon.index, priority):
        si, tj = src_free[v], tgt_free[w]
        while si and tj:
            links.append(Link(si.pop(), tj.pop(), v, w))
    links.sort()
    return LinkAssignment(pair.index, tuple(links))


def _tally_chunk(segments, lexicon: Lexicon, keep_links: bool):
    index = lexicon.index
    priority = lexicon.priority()
    k = np.zeros(len(lexicon), dtype=np.int64)
    n = np.zeros(len(lexicon), dtype=np.int64)
    assignments = [] if keep_links else None
    for seg in segments:
        if keep_links:
            assignments.append(link_segment(seg, lexicon))
        if not seg.source or not seg.target:
            continue
        sc = Counter(seg.source)
        tc = Counter(seg.target)
        cands = []
        for v, cv in sc.items():
            for w, cw in tc.items():
                e = index.get((v, w))
                if e is not None:
                    n[e] += cv if cv < cw else cw
                    cands.append((priority[e], e, v, w))
        cands.sort()
        for _, e, v, w in cands:
            m = sc[v] if sc[v] < tc[w] else tc[w]
            if m:
                k[e] += m
                sc[v] -= m
                tc[w] -= m
    return k, n, assignments


def link_corpus(
    corpus: Corpus,
    lexicon: Lexicon,
    table: CoocTable | None = None,
    workers: int = 1,
    keep_links: bool = False,
    min_chunk: int = 2000,
) -> LinkTally:
    """Link every segment pair and tally links and co-occurrences per entry.

    ``lexicon`` must use the corpus vocabularies (see :func:`align_lexicon`).
    """
    if len(lexicon):
        lexicon.index  # build caches once before any fan-out
        lexicon.priority()
    chunks = chunk_segments(corpus.segments, workers, min_chunk)
    if len(chunks) > 1:
        with ProcessPoolExecutor(max_workers=len(chunks)) as ex:
            parts = list(ex.map(_tally_chunk, chunks, [lexicon] * len(chunks), [keep_links] * len(chunks)))
    else:
        parts = [_tally_chunk(chunks[0], lexicon, keep_links)]
    k = np.zeros(len(lexicon), dtype=np.int64)
    n = np.zeros(len(lexicon), dtype=np.int64)
    assignments = [] if keep_links else None
    for pk, pn, pa in parts:
        k += pk
        n += pn
        if keep_links:
            assignments.extend(pa)
    N_all = table.N if table is not None else None
    return LinkTally(lexicon, k, n, N_all, assignments)


def align_lexicon(lexicon: Lexicon, corpus: Corpus) -> Lexicon:
    """Re-express a lexicon in the corpus' word ids.

    Entries whose words never occur in the corpus are dropped.
    """
    if lexicon.source_vocab is corpus.source_vocab and lexicon.target_vocab is corpus.target_vocab:
        return lexicon
    sv, tv = corpus.source_vocab, corpus.target_vocab
    v = np.array([sv.id_of(s) if s in sv else -1 for s in (lexicon.source_vocab.word(i) for i in lexicon.v)],
                 dtype=np.int64)
    w = np.array([tv.id_of(t) if t in tv else -1 for t in (lexicon.target_vocab.word(i) for i in lexicon.w)],
                 dtype=np.int64)
    keep = (v >= 0) & (w >= 0)
    return Lexicon(sv, tv, v[keep], w[keep], lexicon.score[keep], lexicon.k[keep], lexicon.n[keep],
                   generation=lexicon.generation, params=lexicon.params)


def write_link_dump(corpus: Corpus, assignments, path) -> None:
    """TSV of segment_index, source_word, target_word; one row per link."""
    sw, tw = corpus.source_vocab.words, corpus.target_vocab.words
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("segment_index\tsource_word\ttarget_word\n")
        for a in sorted(assignments, key=lambda a: a.segment):
            for link in sorted(a.links):
                fh.write(f"{a.segment}\t{sw[link.v]}\t{tw[link.w]}\n")
