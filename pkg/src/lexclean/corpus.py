"""Bitext ingestion: stop-list deletion, stemming and word interning.

Input is pre-tokenized text, one aligned segment pair per line, with the
source and target sides separated by a single TAB and tokens separated by
spaces.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, CorpusParseError, EmptyCorpusError

SOURCE = "source"
TARGET = "target"


@dataclass(frozen=True)
class StemmerSpec:
    """Suffix-stripping stemmer; an empty suffix list is the identity.

    Suffixes are stripped repeatedly, shortest match first, until no suffix
    applies or the stem would drop below ``min_stem_len`` characters.
    """

    suffixes: tuple[str, ...] = ()
    min_stem_len: int = 3

    @property
    def is_identity(self) -> bool:
        return not self.suffixes

    @classmethod
    def parse(cls, text: str | None) -> "StemmerSpec":
        """Parse ``identity`` or ``suffixes=s,es,ing;min_stem_len=3``."""
        if text is None or text.strip() in ("", "identity"):
            return cls()
        suffixes: tuple[str, ...] = ()
        min_len = 3
        for part in text.split(";"):
            if not part.strip():
                continue
            key, sep, value = part.partition("=")
            key = key.strip()
            if not sep:
                raise ConfigError(f"bad stemmer spec component {part!r}")
            if key == "suffixes":
                value = value.strip().strip("[]")
                suffixes = tuple(s.strip().strip("'\"") for s in value.split(",") if s.strip())
            elif key == "min_stem_len":
                min_len = int(value)
            else:
                raise ConfigError(f"unknown stemmer option {key!r}")
        if min_len < 1:
            raise ConfigError("min_stem_len must be >= 1")
        # sort by length so the shortest applicable suffix is tried first
        return cls(tuple(sorted(set(suffixes), key=lambda s: (len(s), s))), min_len)

    def __str__(self) -> str:
        if self.is_identity:
            return "identity"
        return f"suffixes={','.join(self.suffixes)};min_stem_len={self.min_stem_len}"


IDENTITY = StemmerSpec()


def stem(word: str, stemmer: StemmerSpec = IDENTITY) -> str:
    """Reduce ``word`` to its canonical form. Deterministic and idempotent."""
    if stemmer.is_identity:
        return word
    suffixes = sorted(stemmer.suffixes, key=lambda s: (len(s), s))
    changed = True
    while changed:
        changed = False
        for suffix in suffixes:
            if word.endswith(suffix) and len(word) - len(suffix) >= stemmer.min_stem_len:
                word = word[: -len(suffix)]
                changed = True
                break
    return word


def read_stoplist(path) -> frozenset[str]:
    """One word per line; blank lines and ``#`` comments are ignored."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                words.add(line)
    return frozenset(words)


def _checksum(words: Iterable[str]) -> str:
    h = hashlib.sha256()
    for w in sorted(words):
        h.update(w.encode("utf-8"))
        h.update(b"\n")
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class PreprocessOptions:
    stoplist_src: str | None = None
    stoplist_tgt: str | None = None
    stemmer: StemmerSpec = IDENTITY
    lowercase: bool = False


class Vocabulary:
    """Bijection between word strings and dense integer ids for one side."""

    def __init__(self, side: str, words: Sequence[str] = ()):
        self.side = side
        self._words: list[str] = []
        self._index: dict[str, int] = {}
        self._counts: list[int] = []
        self._rank = None
        for w in words:
            self.intern(w)

    def intern(self, word: str) -> int:
        idx = self._index.get(word)
        if idx is None:
            idx = len(self._words)
            self._index[word] = idx
            self._words.append(word)
            self._counts.append(0)
            self._rank = None
        return idx

    def _add_count(self, idx: int, amount: int = 1) -> None:
        self._counts[idx] += amount

    def id_of(self, word: str) -> int | None:
        return self._index.get(word)

    def word(self, idx: int) -> str:
        return self._words[idx]

    @property
    def words(self) -> list[str]:
        return self._words

    @property
    def counts(self) -> np.ndarray:
        """Token occurrence count per word id."""
        return np.asarray(self._counts, dtype=np.int64)

    def count(self, word: str) -> int:
        idx = self._index.get(word)
        return 0 if idx is None else self._counts[idx]

    @property
    def rank(self) -> np.ndarray:
        """Position of each id in lexicographic string order (for tie-breaks)."""
        if self._rank is None or len(self._rank) != len(self._words):
            order = sorted(range(len(self._words)), key=self._words.__getitem__)
            rank = np.empty(len(order), dtype=np.int64)
            rank[order] = np.arange(len(order))
            self._rank = rank
        return self._rank

    def __len__(self) -> int:
        return len(self._words)

    def __contains__(self, word) -> bool:
        return word in self._index

    def __iter__(self) -> Iterator[str]:
        return iter(self._words)

    def __repr__(self) -> str:
        return f"Vocabulary({self.side!r}, size={len(self)})"


@dataclass(frozen=True)
class SegmentPair:
    index: int
    source: tuple[int, ...]
    target: tuple[int, ...]


@dataclass
class Corpus:
    segments: tuple[SegmentPair, ...]
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    preprocessing: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self) -> Iterator[SegmentPair]:
        return iter(self.segments)

    def __getitem__(self, i) -> SegmentPair:
        return self.segments[i]

    def source_words(self, seg: SegmentPair) -> list[str]:
        return [self.source_vocab.word(i) for i in seg.source]

    def target_words(self, seg: SegmentPair) -> list[str]:
        return [self.target_vocab.word(i) for i in seg.target]

    def iter_token_pairs(self) -> Iterator[tuple[list[str], list[str]]]:
        for seg in self.segments:
            yield self.source_words(seg), self.target_words(seg)

    def transpose(self) -> "Corpus":
        """Swap the roles of the two sides."""
        segments = tuple(SegmentPair(s.index, s.target, s.source) for s in self.segments)
        return Corpus(segments, self.target_vocab, self.source_vocab, dict(self.preprocessing))

    @classmethod
    def from_pairs(
        cls,
        pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
        stop_src: frozenset[str] = frozenset(),
        stop_tgt: frozenset[str] = frozenset(),
        stemmer: StemmerSpec = IDENTITY,
        lowercase: bool = False,
    ) -> "Corpus":
        """Build a corpus from already-tokenized (source, target) pairs."""
        src_vocab = Vocabulary(SOURCE)
        tgt_vocab = Vocabulary(TARGET)
        cache: dict[str, str] = {}

        def normalize(tokens, stoplist, vocab):
            ids = []
            for tok in tokens:
                if lowercase:
                    tok = tok.lower()
                if tok in stoplist:
                    continue
                s = cache.get(tok)
                if s is None:
                    s = cache[tok] = stem(tok, stemmer)
                if s in stoplist:
                    continue
                idx = vocab.intern(s)
                vocab._add_count(idx)
                ids.append(idx)
            return tuple(ids)

        segments = []
        for i, (src, tgt) in enumerate(pairs):
            segments.append(
                SegmentPair(i, normalize(src, stop_src, src_vocab), normalize(tgt, stop_tgt, tgt_vocab))
            )
        if not segments:
            raise EmptyCorpusError("empty corpus: no segment pairs")
        record = {
            "stoplist_src": _checksum(stop_src),
            "stoplist_tgt": _checksum(stop_tgt),
            "stemmer": str(stemmer),
            "lowercase": lowercase,
        }
        return cls(tuple(segments), src_vocab, tgt_vocab, record)


def parse_bitext_line(line: str, path="<input>", lineno: int = 0) -> tuple[list[str], list[str]]:
    parts = line.split("\t")
    if len(parts) != 2:
        what = "missing TAB separator" if len(parts) == 1 else "more than one TAB separator"
        raise CorpusParseError(path, lineno, what)
    return parts[0].split(), parts[1].split()


def read_bitext(path) -> list[tuple[list[str], list[str]]]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip():
                continue
            pairs.append(parse_bitext_line(line, path, lineno))
    return pairs


def write_bitext(pairs: Iterable[tuple[Sequence[str], Sequence[str]]], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for src, tgt in pairs:
            fh.write(" ".join(src) + "\t" + " ".join(tgt) + "\n")


def load_corpus(path, options: PreprocessOptions = PreprocessOptions()) -> Corpus:
    """Read a bitext file and preprocess it into an interned :class:`Corpus`."""
    path = Path(path)
    stop_src = read_stoplist(options.stoplist_src) if options.stoplist_src else frozenset()
    stop_tgt = read_stoplist(options.stoplist_tgt) if options.stoplist_tgt else frozenset()
    pairs = read_bitext(path)
    if not pairs:
        raise EmptyCorpusError(f"empty corpus: {path}")
    corpus = Corpus.from_pairs(pairs, stop_src, stop_tgt, options.stemmer, options.lowercase)
    corpus.preprocessing["path"] = str(path)
    return corpus
