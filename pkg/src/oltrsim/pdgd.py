"""Pairwise differentiable gradient descent over sampled rankings.

Each impression displays a ranking sampled from the model's Plackett-Luce
distribution.  Clicks are turned into pairwise preferences between clicked
and observed-but-unclicked documents, each weighted to cancel the bias the
displayed ordering introduces, and the model takes one gradient step along
the weighted sum of feature differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clicks import Interaction
from .datasets import Query
from .ranking import LinearRanker, check_ranking, sigmoid


@dataclass
class PdgdState:
    """Model weights plus the gradient step size."""

    ranker: LinearRanker
    learning_rate: float = 0.1

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass(frozen=True)
class PreferencePair:
    """Positions, within the displayed list, of a clicked doc preferred over an unclicked one."""

    clicked_idx: int
    unclicked_idx: int

    def __post_init__(self):
        if self.clicked_idx == self.unclicked_idx:
            raise ValueError("a preference pair needs two distinct positions")
        if self.clicked_idx < 0 or self.unclicked_idx < 0:
            raise ValueError("positions must be non-negative")


def infer_pairwise_preferences(interaction: Interaction) -> list[PreferencePair]:
    """Pairs of (clicked, observed-and-unclicked) display positions.

    A document counts as observed if it precedes a clicked document or
    immediately follows the last click.  No clicks means no pairs.
    """
    clicks = np.asarray(interaction.clicks, dtype=bool)
    clicked = np.flatnonzero(clicks)
    if clicked.size == 0:
        return []
    observed_end = min(int(clicked[-1]) + 2, clicks.size)
    unclicked = [o for o in range(observed_end) if not clicks[o]]
    return [PreferencePair(int(c), int(o)) for c in clicked for o in unclicked]


def _undisplayed_total(exp_scores: np.ndarray, displayed: np.ndarray) -> float:
    mask = np.ones(exp_scores.size, dtype=bool)
    mask[displayed] = False
    return float(exp_scores[mask].sum())


def _pair_flip_log_odds(
    scores: np.ndarray,
    displayed: np.ndarray,
    pos_hi: np.ndarray,
    pos_lo: np.ndarray,
) -> np.ndarray:
    """log P(swapped ranking) - log P(displayed ranking), batched over pairs.

    Swapping two display positions keeps the displayed document set and its
    numerator product, so only the sequential denominators strictly between
    the earlier slot (exclusive) and the later slot (inclusive) differ.
    Denominators are suffix sums of positive masses (never differences), so
    widely spread scores cannot cancel them into zero or negative values.
    """
    m = displayed.size
    exp_scores = np.exp(scores - scores.max())
    placed = exp_scores[displayed]
    tail = _undisplayed_total(exp_scores, displayed)
    denoms = tail + np.cumsum(placed[::-1])[::-1]

    a = np.minimum(pos_hi, pos_lo)
    b = np.maximum(pos_hi, pos_lo)
    rows = np.arange(a.size)
    placed_star = np.tile(placed, (a.size, 1))
    placed_star[rows, a] = placed[b]
    placed_star[rows, b] = placed[a]
    denoms_star = tail + np.cumsum(placed_star[:, ::-1], axis=1)[:, ::-1]

    positions = np.arange(m)
    in_span = (positions[None, :] > a[:, None]) & (positions[None, :] <= b[:, None])
    with np.errstate(divide="ignore"):
        log_ratio = np.where(in_span, np.log(denoms)[None, :] - np.log(denoms_star), 0.0)
    return log_ratio.sum(axis=1)


def _pair_weights(
    scores: np.ndarray,
    displayed: np.ndarray,
    clicked_pos: np.ndarray,
    unclicked_pos: np.ndarray,
) -> np.ndarray:
    """Debiasing weight per pair: P(R*) / (P(R) + P(R*)), R* = positions swapped."""
    log_odds = _pair_flip_log_odds(scores, displayed, clicked_pos, unclicked_pos)
    return sigmoid(log_odds)


def pair_weight_rho(
    ranker: LinearRanker,
    displayed: np.ndarray,
    candidates: np.ndarray,
    pair: PreferencePair,
) -> float:
    """Debiasing weight of one preference pair in a displayed ranking.

    The weight compares the Plackett-Luce probability of the displayed
    list against the same list with the pair's two documents swapped;
    both probabilities condition on the full candidate set.
    """
    candidates = np.asarray(candidates, dtype=np.float64)
    displayed = check_ranking(displayed, candidates.shape[0])
    m = displayed.size
    if not (0 <= pair.clicked_idx < m and 0 <= pair.unclicked_idx < m):
        raise ValueError("pair positions outside the displayed list")
    scores = ranker.score_all(candidates)
    weights = _pair_weights(
        scores,
        displayed,
        np.array([pair.clicked_idx]),
        np.array([pair.unclicked_idx]),
    )
    return float(weights[0])


def pdgd_update(state: PdgdState, query: Query, interaction: Interaction) -> PdgdState:
    """One gradient step from the preferences inferred in an interaction.

    Each pair contributes ``rho * P(i>j) * P(j>i) * (d_i - d_j)``; with no
    clicks the state is returned unchanged.
    """
    pairs = infer_pairwise_preferences(interaction)
    if not pairs:
        return state

    displayed = check_ranking(interaction.ranking, query.n_docs)
    scores = state.ranker.score_all(query.features)
    clicked_pos = np.array([p.clicked_idx for p in pairs])
    unclicked_pos = np.array([p.unclicked_idx for p in pairs])

    rho = _pair_weights(scores, displayed, clicked_pos, unclicked_pos)
    docs_i = displayed[clicked_pos]
    docs_j = displayed[unclicked_pos]
    margin = scores[docs_i] - scores[docs_j]
    p_ij = sigmoid(margin)
    pair_scale = rho * p_ij * (1.0 - p_ij)

    diffs = query.features[docs_i] - query.features[docs_j]
    gradient = pair_scale @ diffs
    new_weights = state.ranker.weights + state.learning_rate * gradient
    return PdgdState(ranker=LinearRanker(new_weights), learning_rate=state.learning_rate)
