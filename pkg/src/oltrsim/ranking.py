"""Linear ranking models, deterministic ranking and Plackett-Luce sampling.

All randomized operations take an explicit ``numpy.random.Generator`` so
that every caller controls its own stream; the functions themselves hold
no state and are safe to use from multiple threads as long as each thread
owns its generator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class LinearRanker:
    """Linear scoring model: ``score(d) = weights @ d``."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 1:
            raise ValueError("weights must be a 1-D vector")
        if not np.all(np.isfinite(self.weights)):
            raise ValueError("weights must be finite")

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def score_all(self, features: np.ndarray) -> np.ndarray:
        """Score every row of an ``(n_docs, dim)`` feature matrix."""
        features = np.asarray(features, dtype=np.float64)
        if features.shape[-1] != self.dim:
            raise ValueError(
                f"feature dimension {features.shape[-1]} does not match "
                f"ranker dimension {self.dim}"
            )
        return features @ self.weights


def zero_ranker(dim: int) -> LinearRanker:
    """Zero-initialized model, the standard starting point for online runs."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    return LinearRanker(np.zeros(dim))


def score(ranker: LinearRanker, doc: np.ndarray) -> float:
    """Dot-product score of a single document."""
    doc = np.asarray(doc, dtype=np.float64)
    if doc.shape != (ranker.dim,):
        raise ValueError(f"document shape {doc.shape} does not match ranker dimension {ranker.dim}")
    return float(doc @ ranker.weights)


def _check_candidates(candidates: np.ndarray) -> np.ndarray:
    candidates = np.asarray(candidates, dtype=np.float64)
    if candidates.ndim != 2 or candidates.shape[0] == 0:
        raise ValueError("candidates must be a non-empty (n_docs, dim) matrix")
    return candidates


def check_ranking(ranking: np.ndarray, n_docs: int) -> np.ndarray:
    """Validate a ranking: distinct integer indices into a candidate set."""
    ranking = np.asarray(ranking)
    if ranking.ndim != 1 or ranking.size == 0:
        raise ValueError("ranking must be a non-empty 1-D index array")
    if not np.issubdtype(ranking.dtype, np.integer):
        raise ValueError("ranking indices must be integers")
    if ranking.min() < 0 or ranking.max() >= n_docs:
        raise ValueError("ranking index out of range")
    if np.unique(ranking).size != ranking.size:
        raise ValueError("ranking contains duplicate indices")
    return ranking


def rank_deterministic(
    ranker: LinearRanker,
    candidates: np.ndarray,
    k: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Top-``min(k, n)`` documents by descending score, random tie-breaking.

    Ties are broken by shuffling the candidates uniformly before a stable
    sort, so equal-scored documents appear in uniformly random relative
    order.  Zero-initialized models therefore produce uniformly random
    rankings instead of a frozen one.
    """
    candidates = _check_candidates(candidates)
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = ranker.score_all(candidates)
    n = scores.shape[0]
    perm = rng.permutation(n)
    order = perm[np.argsort(-scores[perm], kind="stable")]
    return order[: min(k, n)]


def sample_ranking(
    ranker: LinearRanker,
    candidates: np.ndarray,
    k: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Sample a top-``min(k, n)`` ranking from the model's Plackett-Luce distribution.

    Sequentially draws documents without replacement, each with probability
    ``exp(score) / sum(exp(score) over remaining documents)``.  Implemented
    with the Gumbel-max trick (argsort of score + Gumbel noise), which
    realizes exactly that sequential distribution in one vectorized pass
    and is stable for unbounded scores.
    """
    candidates = _check_candidates(candidates)
    if k < 1:
        raise ValueError("k must be >= 1")
    scores = ranker.score_all(candidates)
    n = scores.shape[0]
    noisy = scores + rng.gumbel(size=n)
    order = np.argsort(-noisy)
    return order[: min(k, n)]


def log_ranking_probability(
    ranker: LinearRanker,
    ranking: np.ndarray,
    candidates: np.ndarray,
) -> float:
    """Log Plackett-Luce probability of a (possibly truncated) ranking.

    The denominator at each position is a log-sum-exp over the documents
    not yet placed, with max-subtraction, so arbitrarily large scores do
    not overflow.  ``exp`` of the result lies in ``(0, 1]``.
    """
    candidates = _check_candidates(candidates)
    n = candidates.shape[0]
    ranking = check_ranking(ranking, n)
    scores = ranker.score_all(candidates)
    shifted = scores - scores.max()
    remaining = np.ones(n, dtype=bool)
    total = 0.0
    for doc in ranking:
        lse = _logsumexp(shifted[remaining])
        total += shifted[doc] - lse
        remaining[doc] = False
    return total


def _logsumexp(values: np.ndarray) -> float:
    m = values.max()
    return float(m + np.log(np.sum(np.exp(values - m))))


def sigmoid(x):
    """Numerically stable logistic function, elementwise."""
    arr = np.atleast_1d(np.asarray(x, dtype=np.float64))
    out = np.empty_like(arr)
    pos = arr >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-arr[pos]))
    ex = np.exp(arr[~pos])
    out[~pos] = ex / (1.0 + ex)
    return float(out[0]) if np.ndim(x) == 0 else out


def pair_preference_probability(
    ranker: LinearRanker,
    d_i: np.ndarray,
    d_j: np.ndarray,
) -> float:
    """Probability the model places ``d_i`` before ``d_j``.

    Equals ``exp(s_i) / (exp(s_i) + exp(s_j))``, evaluated as a stable
    sigmoid of the score difference so large score gaps cannot overflow.
    """
    s_i = score(ranker, d_i)
    s_j = score(ranker, d_j)
    return float(sigmoid(s_i - s_j))


def sample_unit_sphere(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random direction on the unit sphere in ``dim`` dimensions."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    while True:
        v = rng.normal(size=dim)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v / norm
