"""Independent reference implementations used to cross-check the package.

Everything here is deliberately written from first principles (plain
Python / small numpy, direct products, brute-force enumeration) and must
not import from oltrsim, so tests compare two genuinely different routes
to the same quantity.
"""

import itertools
import math
from fractions import Fraction

import numpy as np


def pl_ranking_probability(scores, ranking):
    """Plackett-Luce probability of a (possibly truncated) ranking.

    Direct sequential product: at each position, exp(score) over the sum
    of exp(score) across not-yet-placed documents.
    """
    weights = [math.exp(s) for s in scores]
    remaining = list(range(len(weights)))
    prob = 1.0
    for doc in ranking:
        total = sum(weights[d] for d in remaining)
        prob *= weights[doc] / total
        remaining.remove(doc)
    return prob


def pl_all_full_rankings(scores):
    """All n! full rankings with their Plackett-Luce probabilities."""
    n = len(scores)
    return {
        perm: pl_ranking_probability(scores, perm)
        for perm in itertools.permutations(range(n))
    }


def softened_mass(ranking, tau=3.0):
    """Per-document mass 1 / rank**tau for a full ranking (rank is 1-based)."""
    n = len(ranking)
    mass = [0.0] * n
    for position, doc in enumerate(ranking):
        mass[doc] = 1.0 / (position + 1) ** tau
    return mass


def enumerate_interleave_credit(displayed, clicks, r_a, r_b, tau=3):
    """Expected credit difference, brute-forced over all 2^m assignments.

    Each assignment sequence is weighted by the probability that its coin
    flips produced the displayed list from the two softened distributions;
    credit difference per sequence is (#clicked positions assigned to a)
    minus (#assigned to b).  Computed in exact rational arithmetic so the
    sign (win / loss / tie) carries no floating-point ambiguity; requires
    an integer tau.
    """
    if int(tau) != tau:
        raise ValueError("exact enumeration needs an integer tau")
    n = len(r_a)
    mass = [[Fraction(0)] * n, [Fraction(0)] * n]
    for side, ranking in enumerate((r_a, r_b)):
        for position, doc in enumerate(ranking):
            mass[side][doc] = Fraction(1, (position + 1) ** int(tau))
    m = len(displayed)
    total_weight = Fraction(0)
    total_diff = Fraction(0)
    for assignment in itertools.product((0, 1), repeat=m):
        weight = Fraction(1)
        pool = list(range(n))
        for position, doc in enumerate(displayed):
            side = assignment[position]
            denom = sum(mass[side][d] for d in pool)
            weight *= mass[side][doc] / denom
            pool.remove(doc)
        diff = sum(
            (1 if assignment[p] == 0 else -1)
            for p in range(m)
            if clicks[p]
        )
        total_weight += weight
        total_diff += weight * diff
    return total_diff / total_weight


def cascade_click_position_probs(grades, click_probs, stop_prob):
    """Exact per-position click probabilities for the cascading scan.

    Enumerated recursively over click/stop outcomes: position p is
    observed only if no earlier click triggered a stop.
    """
    probs = []
    observe = 1.0
    for grade in grades:
        p_click = click_probs[grade]
        probs.append(observe * p_click)
        observe = observe * (1.0 - p_click * stop_prob)
    return probs


def noncascading_click_position_probs(grades, click_probs):
    """Exact per-position click probabilities under 1/rank observation."""
    return [click_probs[g] / (r + 1.0) for r, g in enumerate(grades)]


def _betacf(a, b, x, max_iter=300, eps=3e-14):
    """Continued fraction for the regularized incomplete beta function."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < 1e-300:
        d = 1e-300
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < 1e-300:
            d = 1e-300
        c = 1.0 + aa / c
        if abs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < 1e-300:
            d = 1e-300
        c = 1.0 + aa / c
        if abs(c) < 1e-300:
            c = 1e-300
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise RuntimeError("incomplete beta continued fraction did not converge")


def incomplete_beta(a, b, x):
    """Regularized incomplete beta I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def student_t_two_sided_p(t, dof):
    """Two-sided p-value of Student's t via the incomplete beta function."""
    x = dof / (dof + t * t)
    return incomplete_beta(dof / 2.0, 0.5, x)


def ndcg_direct(ranking, grades, k=10):
    """Plain NDCG@k: gains 2^grade - 1, discounts log2(position + 1)."""
    gains = [2.0 ** g - 1.0 for g in grades]
    top = list(ranking)[:k]
    dcg = sum(gains[d] / math.log2(r + 2.0) for r, d in enumerate(top))
    ideal = sorted(gains, reverse=True)[:k]
    idcg = sum(g / math.log2(r + 2.0) for r, g in enumerate(ideal))
    if idcg == 0.0:
        return 0.0
    return dcg / idcg


def central_difference_gradient(f, x, h=1e-6):
    """Central finite-difference gradient of a scalar function."""
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for i in range(x.size):
        step = np.zeros_like(x)
        step[i] = h
        grad[i] = (f(x + step) - f(x - step)) / (2.0 * h)
    return grad
