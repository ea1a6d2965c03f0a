"""Input checks shared by the estimators."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .corpus import Corpus, PreprocessOptions, read_stoplist
from .errors import EmptyCorpusError


def _tokens(side, what: str) -> list[str]:
    if isinstance(side, str):
        return side.split()
    try:
        toks = list(side)
    except TypeError:
        raise ValueError(f"{what} side must be a string or a sequence of tokens") from None
    if not all(isinstance(t, str) for t in toks):
        raise ValueError(f"{what} tokens must be strings")
    return toks


def check_bitext(X, options: PreprocessOptions | None = None) -> Corpus:
    """Coerce ``X`` into a :class:`Corpus`.

    ``X`` is a Corpus (returned unchanged) or an iterable of (source, target)
    pairs where each side is a whitespace-tokenized string or a token list.
    """
    if isinstance(X, Corpus):
        return X
    if isinstance(X, (str, bytes)):
        raise ValueError("expected a sequence of (source, target) pairs, got a string")
    pairs = []
    for i, item in enumerate(X):
        try:
            src, tgt = item
        except (TypeError, ValueError):
            raise ValueError(f"item {i} is not a (source, target) pair") from None
        pairs.append((_tokens(src, "source"), _tokens(tgt, "target")))
    if not pairs:
        raise EmptyCorpusError("empty corpus: no segment pairs")
    options = options or PreprocessOptions()
    stop_src = read_stoplist(options.stoplist_src) if options.stoplist_src else frozenset()
    stop_tgt = read_stoplist(options.stoplist_tgt) if options.stoplist_tgt else frozenset()
    return Corpus.from_pairs(pairs, stop_src, stop_tgt, options.stemmer, options.lowercase)


def check_tallies(X) -> np.ndarray:
    """Validate an (m, 2) integer array of (k, n) rows with 0 <= k <= n."""
    X = check_array(X, dtype=np.int64, ensure_min_samples=1)
    if X.shape[1] != 2:
        raise ValueError(f"tallies need 2 columns (k, n), got {X.shape[1]}")
    if np.any(X[:, 0] < 0) or np.any(X[:, 0] > X[:, 1]):
        raise ValueError("tallies need 0 <= k <= n in every row")
    return X
