"""Two-binomial mixture over link tallies and the likelihood-ratio regrader.

An entry that co-occurs ``n`` times is linked ``k`` times. Mutual
translations are linked with probability ``lambda_right`` and other pairs
with ``lambda_wrong``. The mixing weight is not a free parameter: it is pinned
by the observed link rate K/N, so only the two link probabilities are fit.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.special import expit, gammaln, logit, xlog1py, xlogy

from .errors import EstimationError
from .optimize import nelder_mead

EPS = 1e-9
START_OFFSET = 1e-6
FTOL = 1e-9
MAX_ITER = 500


@dataclass(frozen=True)
class MixtureParams:
    lambda_right: float
    lambda_wrong: float
    tau: float
    lam: float
    K: int
    N: int
    log_data_prob: float
    converged: bool = True
    iterations: int = 0
    saturated: bool = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["lambda"] = d.pop("lam")
        order = ["lambda_right", "lambda_wrong", "tau", "lambda", "K", "N",
                 "log_data_prob", "converged", "iterations", "saturated"]
        return {key: d[key] for key in order}

    @classmethod
    def from_dict(cls, d: dict) -> "MixtureParams":
        d = dict(d)
        d["lam"] = d.pop("lambda")
        return cls(**d)


def write_params(params: MixtureParams, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(params.to_dict(), fh, indent=1)
        fh.write("\n")


def read_params(path) -> MixtureParams:
    with open(path, encoding="utf-8") as fh:
        return MixtureParams.from_dict(json.load(fh))


def binomial_log_pmf(k: int, n: int, p: float) -> float:
    """Log of the binomial probability of ``k`` successes in ``n`` trials."""
    if k < 0 or n < 0 or k > n:
        raise ValueError(f"binomial_log_pmf needs 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} is not a probability")
    if p == 0.0:
        return 0.0 if k == 0 else -math.inf
    if p == 1.0:
        return 0.0 if k == n else -math.inf
    coef = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return coef + k * math.log(p) + (n - k) * math.log1p(-p)


def _log_coef(k, n):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


class _Tallies:
    """(k, n) data collapsed to distinct combinations with multiplicities."""

    def __init__(self, k, n):
        k = np.asarray(k, dtype=np.int64).ravel()
        n = np.asarray(n, dtype=np.int64).ravel()
        if k.shape != n.shape:
            raise ValueError("k and n differ in length")
        if np.any(k < 0) or np.any(k > n):
            raise ValueError("tallies need 0 <= k <= n")
        self.K = int(k.sum())
        self.N = int(n.sum())
        self.size = len(k)
        pairs = np.stack([k, n], axis=1) if len(k) else np.zeros((0, 2), dtype=np.int64)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        self.k = uniq[:, 0].astype(np.float64)
        self.n = uniq[:, 1].astype(np.float64)
        self.mult = counts.astype(np.float64)
        self.coef = _log_coef(self.k, self.n)

    def log_b(self, p: float) -> np.ndarray:
        return self.coef + xlogy(self.k, p) + xlog1py(self.n - self.k, -p)

    def loglik(self, lambda_right: float, lambda_wrong: float) -> float:
        lam = self.K / self.N
        # tau = 1 (lambda_right == K/N) is the closed end of the feasible range
        if not lambda_wrong < lam <= lambda_right:
            return -math.inf
        tau = (lam - lambda_wrong) / (lambda_right - lambda_wrong)
        log_wrong = math.log1p(-tau) if tau < 1.0 else -math.inf
        per = np.logaddexp(math.log(tau) + self.log_b(lambda_right),
                           log_wrong + self.log_b(lambda_wrong))
        return float(np.dot(self.mult, per))


def _as_tallies(tallies) -> _Tallies:
    if isinstance(tallies, _Tallies):
        return tallies
    if hasattr(tallies, "k") and hasattr(tallies, "n"):
        return _Tallies(tallies.k, tallies.n)
    arr = np.asarray(tallies, dtype=np.int64)
    if arr.size == 0:
        return _Tallies([], [])
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("tallies must be an (m, 2) array of (k, n) rows")
    return _Tallies(arr[:, 0], arr[:, 1])


def mixture_log_likelihood(tallies, lambda_right: float, lambda_wrong: float) -> float:
    """log Pr(data | model) for the two-binomial mixture.

    ``tallies`` is a :class:`~lexclean.linker.LinkTally`, anything with
    ``k`` and ``n`` arrays, or an (m, 2) array of (k, n) rows. Points that
    violate lambda_wrong < K/N <= lambda_right score ``-inf``.
    """
    t = _as_tallies(tallies)
    if t.N == 0:
        return -math.inf
    return t.loglik(lambda_right, lambda_wrong)


def _to_prob(z: float) -> float:
    return min(max(float(expit(z)), EPS), 1.0 - EPS)


def _params(t: _Tallies, lr: float, lw: float, **extra) -> MixtureParams:
    lam = t.K / t.N
    tau = (lam - lw) / (lr - lw)
    return MixtureParams(lr, lw, tau, lam, t.K, t.N, t.loglik(lr, lw), **extra)


def estimate_params(tallies, ftol: float = FTOL, max_iter: int = MAX_ITER) -> MixtureParams:
    """Maximum-likelihood link probabilities by downhill simplex.

    The search runs over logit-transformed probabilities clamped to
    [EPS, 1 - EPS], starting next to (1, 0).
    """
    t = _as_tallies(tallies)
    if t.K == 0:
        raise EstimationError("no links; lexicon empty after discard")
    lam = t.K / t.N
    lr0 = min(max(1.0 - START_OFFSET, (1.0 + lam) / 2), 1.0 - EPS)
    lw0 = max(min(START_OFFSET, lam / 2), EPS)
    if t.K == t.N or lr0 <= lam:
        warnings.warn("every co-occurrence is linked; link probabilities pinned at the clamps",
                      RuntimeWarning, stacklevel=2)
        lr, lw = 1.0 - EPS, EPS
        tau = (lam - lw) / (lr - lw)
        ll = float(np.dot(t.mult, t.log_b(lr)))
        return MixtureParams(lr, lw, tau, lam, t.K, t.N, ll, True, 0, True)

    def objective(z):
        return -t.loglik(_to_prob(z[0]), _to_prob(z[1]))

    res = nelder_mead(objective, [logit(lr0), logit(lw0)], step=[-1.0, 1.0], ftol=ftol, max_iter=max_iter)
    lr, lw = _to_prob(res.x[0]), _to_prob(res.x[1])
    if not res.converged:
        warnings.warn(f"simplex stopped after {res.iterations} iterations without converging",
                      RuntimeWarning, stacklevel=2)
    return _params(t, lr, lw, converged=res.converged, iterations=res.iterations)


def likelihood_ratio_log(k, n, params: MixtureParams):
    """Natural log of B(k, n, lambda_right) / B(k, n, lambda_wrong).

    The binomial coefficients cancel, leaving a linear function of k and n.
    Accepts scalars or arrays.
    """
    hit = math.log(params.lambda_right / params.lambda_wrong)
    miss = math.log1p(-params.lambda_right) - math.log1p(-params.lambda_wrong)
    k = np.asarray(k, dtype=np.float64)
    n = np.asarray(n, dtype=np.float64)
    out = k * hit + (n - k) * miss
    return float(out) if out.ndim == 0 else out
