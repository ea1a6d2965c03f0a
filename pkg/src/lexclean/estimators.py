"""scikit-learn style front ends.

``LexiconCleaner`` fits a cleaned lexicon to a bitext and transforms segment
pairs into competitive links. ``GreedyLexiconBaseline`` is the one-shot
thresholded lexicon. ``BinomialLinkMixture`` fits the link-probability
mixture to raw (k, n) tallies.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_bitext, check_tallies
from .assoc import build_initial_lexicon, count_cooccurrences
from .linker import align_lexicon, link_segment
from .mixture import _Tallies, estimate_params, likelihood_ratio_log
from .pipeline import CleanConfig, CutoffSpec, apply_cutoff, clean, greedy_baseline


class LexiconCleaner(TransformerMixin, BaseEstimator):
    """Induce a translation lexicon from a bitext and clean it iteratively.

    Parameters
    ----------
    min_score : float
        G-squared floor for the initial lexicon.
    max_candidates : int or None
        Keep only each word's best initial candidates.
    max_iter : int
        Upper bound on cleaning iterations.
    param_tol : float
        Fixed-point tolerance on both link probabilities.
    cutoff : str, float or None
        Plateau (``"1/1"``) or minimum log-likelihood ratio applied to the
        fitted lexicon.
    workers : int
        Processes used for counting and linking.

    Attributes
    ----------
    lexicon_ : Lexicon
    params_ : MixtureParams
    history_ : list of IterationReport
    n_iter_ : int
    converged_ : bool
    """

    def __init__(self, min_score=0.0, max_candidates=None, max_iter=10, param_tol=1e-6,
                 cutoff=None, workers=1):
        self.min_score = min_score
        self.max_candidates = max_candidates
        self.max_iter = max_iter
        self.param_tol = param_tol
        self.cutoff = cutoff
        self.workers = workers

    def fit(self, X, y=None):
        corpus = check_bitext(X)
        table = count_cooccurrences(corpus, workers=self.workers)
        initial = build_initial_lexicon(table, self.min_score, self.max_candidates)
        config = CleanConfig(max_iterations=self.max_iter, param_tolerance=self.param_tol)
        lexicon, history = clean(corpus, initial, config, table=table, workers=self.workers)
        self.full_lexicon_ = lexicon
        if self.cutoff is not None:
            spec = self.cutoff if isinstance(self.cutoff, CutoffSpec) else CutoffSpec.parse(str(self.cutoff))
            lexicon = apply_cutoff(lexicon, spec)
        self.lexicon_ = lexicon
        self.params_ = lexicon.params
        self.history_ = list(history)
        self.n_iter_ = len(history)
        self.converged_ = history.converged
        return self

    def transform(self, X):
        """Competitive links per segment pair as (i, j, source, target) tuples."""
        check_is_fitted(self, "lexicon_")
        corpus = check_bitext(X)
        lexicon = align_lexicon(self.lexicon_, corpus)
        sw, tw = corpus.source_vocab.words, corpus.target_vocab.words
        return [
            [(l.i, l.j, sw[l.v], tw[l.w]) for l in link_segment(seg, lexicon).links]
            for seg in corpus.segments
        ]

    def get_lexicon(self):
        """The fitted lexicon as a list of (source, target, score, k, n)."""
        check_is_fitted(self, "lexicon_")
        return self.lexicon_.sorted_entries()


class GreedyLexiconBaseline(BaseEstimator):
    """Keep every co-occurring pair whose G-squared exceeds ``threshold``."""

    def __init__(self, threshold=0.0):
        self.threshold = threshold

    def fit(self, X, y=None):
        corpus = check_bitext(X)
        self.lexicon_ = greedy_baseline(corpus, self.threshold)
        return self

    def get_lexicon(self):
        check_is_fitted(self, "lexicon_")
        return self.lexicon_.sorted_entries()


class BinomialLinkMixture(BaseEstimator):
    """Two-binomial mixture over (k, n) link tallies.

    ``score_samples`` returns the natural-log likelihood ratio of the
    "right" component over the "wrong" one for each row.
    """

    def __init__(self, ftol=1e-9, max_iter=500):
        self.ftol = ftol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_tallies(X)
        self.params_ = estimate_params(X, ftol=self.ftol, max_iter=self.max_iter)
        self.lambda_right_ = self.params_.lambda_right
        self.lambda_wrong_ = self.params_.lambda_wrong
        self.tau_ = self.params_.tau
        self.n_iter_ = self.params_.iterations
        return self

    def score_samples(self, X):
        check_is_fitted(self, "params_")
        X = check_tallies(X)
        return np.asarray(likelihood_ratio_log(X[:, 0], X[:, 1], self.params_), dtype=np.float64)

    def predict(self, X):
        """True where an entry is more likely a mutual translation than not."""
        return self.score_samples(X) > 0

    def score(self, X, y=None):
        """Mean log-likelihood per row under the fitted mixture."""
        check_is_fitted(self, "params_")
        X = check_tallies(X)
        t = _Tallies(X[:, 0], X[:, 1])
        # the mixing weight comes from the training data's link rate
        tau = min(max(self.params_.tau, 0.0), 1.0)
        per = np.logaddexp(
            np.log(tau) + t.log_b(self.lambda_right_) if tau > 0 else -np.inf,
            np.log1p(-tau) + t.log_b(self.lambda_wrong_) if tau < 1 else -np.inf,
        )
        return float(np.dot(t.mult, per) / len(X))
