import numpy as np
import pytest
from sklearn.base import clone

from lexclean.errors import EmptyCorpusError
from lexclean.estimators import BinomialLinkMixture, GreedyLexiconBaseline, LexiconCleaner
from lexclean.eval import GeneratorConfig, generate_pairs

PAIRS = [("a b", "x y"), ("a", "x"), ("b", "y"), ("a c", "x z"), ("c", "z"), ("b c", "y z")] * 5


def test_get_params_and_clone():
    est = LexiconCleaner(max_iter=4, cutoff="2/2")
    assert est.get_params()["cutoff"] == "2/2"
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    twin.set_params(max_iter=7)
    assert est.max_iter == 4


def test_fit_transform():
    est = LexiconCleaner().fit(PAIRS)
    assert est.converged_ and est.n_iter_ >= 1
    assert {(e.source, e.target) for e in est.get_lexicon()} == {("a", "x"), ("b", "y"), ("c", "z")}
    links = est.transform([("b a", "x y"), ("q", "x")])
    assert links == [[(0, 1, "b", "y"), (1, 0, "a", "x")], []]


def test_token_lists_accepted():
    est = LexiconCleaner().fit([(s.split(), t.split()) for s, t in PAIRS])
    assert len(est.lexicon_) == 3


def test_bad_input():
    with pytest.raises(EmptyCorpusError):
        LexiconCleaner().fit([])
    with pytest.raises(ValueError):
        LexiconCleaner().fit("a\tx")
    with pytest.raises(ValueError):
        LexiconCleaner().fit([("a", "x", "extra")])


def test_baseline_estimator():
    est = GreedyLexiconBaseline(threshold=1.0).fit(PAIRS)
    assert all(e.score > 1.0 for e in est.get_lexicon())


def test_mixture_estimator():
    rng = np.random.default_rng(0)
    right = rng.random(3000) < 0.3
    X = np.column_stack([rng.binomial(20, np.where(right, 0.95, 0.02)), np.full(3000, 20)])
    mix = BinomialLinkMixture().fit(X)
    assert abs(mix.lambda_right_ - 0.95) < 0.02 and abs(mix.lambda_wrong_ - 0.02) < 0.01
    pred = mix.predict(X)
    assert (pred == right).mean() > 0.99
    assert np.isfinite(mix.score(X))
    with pytest.raises(ValueError):
        mix.fit([[3, 2]])


def test_cleaner_on_generated_pairs():
    pairs, truth = generate_pairs(GeneratorConfig(n_segments=3000, n_pairs=100, seed=2))
    est = LexiconCleaner(cutoff="1/1").fit(pairs)
    got = {(e.source, e.target) for e in est.get_lexicon()}
    assert len(got & set(truth.pairs)) / len(got) > 0.9
