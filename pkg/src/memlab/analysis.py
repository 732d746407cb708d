"""Probabilistic verification suite.

Covers the completed-pairs statistic of sampling without replacement from n
face-down pairs (exact law, expectation, tail bound, Monte Carlo), the
relative-entropy Chernoff bound for binomial tails, the Las-Vegas-to-
Monte-Carlo truncation of a randomized player, and the unique-pairs
expectation over uniform inputs.

Exact small-instance distributions use rational arithmetic; floats appear
only in bounds and Monte Carlo estimates.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .game_core import CapExceeded, Deck
from .strategies import DeckHost, FlipBudgetExceeded, SpaceBudget, Transcript


@dataclass(frozen=True)
class YExperiment:
    """One Monte Carlo cell: draw r of 2n half-cards, count completed pairs."""

    n: int
    r: int
    t: int = 1
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"need n >= 1, got {self.n}")
        if not 0 <= self.r <= 2 * self.n:
            raise ValueError(f"need 0 <= r <= 2n, got r={self.r}, n={self.n}")
        if self.t < 1:
            raise ValueError(f"need t >= 1, got {self.t}")
        if self.trials < 1:
            raise ValueError(f"need trials >= 1, got {self.trials}")


def y_sample(exp: YExperiment, rng: random.Random | None = None) -> int:
    """One draw of the completed-pairs count."""
    if rng is None:
        rng = random.Random(exp.seed)
    drawn = rng.sample(range(2 * exp.n), exp.r)
    pairs = Counter(idx >> 1 for idx in drawn)
    return sum(1 for c in pairs.values() if c == 2)


def y_sample_many(n: int, r: int, trials: int, seed: int) -> np.ndarray:
    """Vectorized draws: argpartition of uniform noise picks r of 2n without replacement."""
    if not 0 <= r <= 2 * n:
        raise ValueError(f"need 0 <= r <= 2n, got r={r}, n={n}")
    rng = np.random.default_rng(seed)
    out = np.empty(trials, dtype=np.int64)
    chunk = max(1, min(trials, 4_000_000 // max(1, 2 * n)))
    done = 0
    while done < trials:
        m = min(chunk, trials - done)
        noise = rng.random((m, 2 * n))
        if r == 0:
            out[done:done + m] = 0
        else:
            picks = np.argpartition(noise, min(r, 2 * n - 1), axis=1)[:, :r] >> 1
            picks.sort(axis=1)
            out[done:done + m] = (picks[:, 1:] == picks[:, :-1]).sum(axis=1)
        done += m
    return out


@dataclass(frozen=True)
class TailEstimate:
    estimate: float
    sigma: float
    bound: float
    ok: bool


def y_tail_estimate(exp: YExperiment) -> TailEstimate:
    """Monte Carlo Pr[Y >= t] against the e^-t target with 3-sigma slack."""
    ys = y_sample_many(exp.n, exp.r, exp.trials, exp.seed)
    est = float(np.count_nonzero(ys >= exp.t)) / exp.trials
    bound = math.exp(-exp.t)
    sigma = math.sqrt(bound * (1.0 - bound) / exp.trials)
    return TailEstimate(est, sigma, bound, est <= bound + 3.0 * sigma)


def y_exact_distribution(n: int, r: int) -> list[Fraction]:
    """Exact law of the completed-pairs count over u = 0..floor(r/2).

    Pr[Y=u] = C(n,u) * C(n-u, r-2u) * 2^(r-2u) / C(2n, r): choose the u
    completed pairs, the r-2u half-open pairs, and a side for each half.
    """
    if not 0 <= r <= 2 * n:
        raise ValueError(f"need 0 <= r <= 2n, got r={r}, n={n}")
    denom = math.comb(2 * n, r)
    probs = []
    for u in range(r // 2 + 1):
        num = math.comb(n, u) * math.comb(n - u, r - 2 * u) * 2 ** (r - 2 * u)
        probs.append(Fraction(num, denom))
    return probs


def y_expectation(n: int, r: int) -> Fraction:
    """Exact mean n * (r/2n) * ((r-1)/(2n-1)); at most r^2/(4n)."""
    if r < 0:
        raise ValueError(f"need r >= 0, got {r}")
    if r < 2:
        return Fraction(0)
    return Fraction(n) * Fraction(r, 2 * n) * Fraction(r - 1, 2 * n - 1)


def y_tail_exact(n: int, r: int, t: int) -> Fraction:
    """Exact Pr[Y >= t] summed from the exact law."""
    return sum(y_exact_distribution(n, r)[t:], Fraction(0))


def y_tail_bound(n: int, r: int, t: int) -> float:
    """Closed-form tail bound exp(-t ln(4nt / (e r^2))) = (e r^2 / 4nt)^t."""
    if t < 1:
        raise ValueError(f"need t >= 1, got {t}")
    if r < 1:
        raise ValueError(f"need r >= 1, got {r}")
    return math.exp(-t * math.log(4.0 * n * t / (math.e * r * r)))


def y_sample_size(n: int, t: int) -> int:
    """Largest r = floor((2/e) sqrt(nt)) for which the tail bound is e^-t or better."""
    return int(2.0 / math.e * math.sqrt(n * t))


# ---------------------------------------------------------------------------
# Relative entropy / Chernoff

@dataclass(frozen=True)
class BoundParams:
    """Inputs of the binomial tail bound Pr[Bin(n, p) >= a n] <= e^(-n D(a||p)).

    `for_sample` plugs in a = t/n and p = r^2/(4n^2), the rate that dominates
    each completed-pairs indicator, which is how the sampling tail reduces to
    a binomial one.
    """

    a: float
    p: float
    n: int

    def __post_init__(self) -> None:
        if not 0.0 < self.a < 1.0 or not 0.0 < self.p < 1.0:
            raise ValueError(f"need a, p in (0,1), got a={self.a}, p={self.p}")
        if self.p > self.a:
            raise ValueError(f"bound needs p <= a, got p={self.p} > a={self.a}")

    @classmethod
    def for_sample(cls, n: int, r: int, t: int) -> "BoundParams":
        return cls(a=t / n, p=r * r / (4.0 * n * n), n=n)

    def tail(self) -> float:
        return chernoff_tail(self.n, self.a, self.p)


def relent(a: float, p: float) -> float:
    """Bernoulli relative entropy a ln(a/p) + (1-a) ln((1-a)/(1-p))."""
    if not 0.0 < a < 1.0 or not 0.0 < p < 1.0:
        raise ValueError(f"need a, p in (0,1), got a={a}, p={p}")
    return a * math.log(a / p) + (1.0 - a) * math.log((1.0 - a) / (1.0 - p))


def chernoff_tail(n: int, a: float, p: float) -> float:
    """Upper bound exp(-n D(a||p)) on Pr[Bin(n,p) >= an]; needs p <= a."""
    if p > a:
        raise ValueError(f"bound needs p <= a, got p={p} > a={a}")
    return math.exp(-n * relent(a, p))


def binomial_tail_exact(n: int, p: Fraction, threshold: Fraction) -> Fraction:
    """Exact Pr[Bin(n,p) >= threshold] by term summation in integer arithmetic."""
    p = Fraction(p)
    k0 = max(0, math.ceil(threshold))
    if k0 > n:
        return Fraction(0)
    if p == 1 or p == 0:
        return Fraction(1) if (p == 1 or k0 <= 0) else Fraction(0)
    pn, pd = p.numerator, p.denominator
    qn = pd - pn
    coeff = math.comb(n, k0)
    pw_p = pn**k0
    pw_q = qn ** (n - k0)
    total = 0
    for k in range(k0, n + 1):
        total += coeff * pw_p * pw_q
        if k < n:
            coeff = coeff * (n - k) // (k + 1)
            pw_p *= pn
            pw_q //= qn
    return Fraction(total, pd**n)


# ---------------------------------------------------------------------------
# Las Vegas -> Monte Carlo truncation

@dataclass
class CappedRun:
    transcript: Transcript
    errored: bool


def play_with_flip_cap(strategy, x: Deck, budget: SpaceBudget, cap: int,
                       lean: bool = True) -> CappedRun:
    """Run a player but halt it after `cap` flips; errored when incomplete."""
    host = DeckHost(x, budget.slots, Transcript(lean=lean), flip_cap=cap)
    try:
        strategy.play(host)
    except FlipBudgetExceeded:
        return CappedRun(host.transcript, True)
    return CappedRun(host.transcript, not host.done())


class MonteCarloWrapped:
    """A player truncated at 10x its expected flip count, reporting an error
    when the game is unfinished at the cutoff.  When expected_T upper-bounds
    the true mean, the error probability is at most 1/10."""

    def __init__(self, strategy, expected_T: float):
        if expected_T <= 0:
            raise ValueError(f"need expected_T > 0, got {expected_T}")
        self.strategy = strategy
        self.cap = int(10 * expected_T)

    def play(self, x: Deck, budget: SpaceBudget, lean: bool = True) -> CappedRun:
        return play_with_flip_cap(self.strategy, x, budget, self.cap, lean=lean)


def monte_carlo_wrap(strategy, expected_T: float) -> MonteCarloWrapped:
    return MonteCarloWrapped(strategy, expected_T)


# ---------------------------------------------------------------------------
# Unique pairs

def unique_pairs(xs) -> list[tuple[int, int]]:
    """All (i, j), i < j, with x_i = x_j and that value appearing nowhere else.

    Input is a sequence of 2n integers in 1..n (not necessarily a valid deck).
    """
    xs = tuple(xs)
    if len(xs) % 2 != 0:
        raise ValueError(f"need an even number of entries, got {len(xs)}")
    n = len(xs) // 2
    if any(v < 1 or v > n for v in xs):
        raise ValueError(f"entries must lie in 1..{n}")
    counts = Counter(xs)
    out = []
    for i in range(len(xs)):
        if counts[xs[i]] != 2:
            continue
        for j in range(i + 1, len(xs)):
            if xs[j] == xs[i]:
                out.append((i + 1, j + 1))
    return out


@dataclass(frozen=True)
class UniquePairsExpectation:
    """Both closed-form candidates for E[#outputs] plus the lower threshold.

    from_n_pairs uses C(n,2) position pairs; from_all_pairs uses C(2n,2),
    counting every position pair of the length-2n input.  Both exceed
    (n-1)/(2e^2).
    """

    n: int
    from_n_pairs: float
    from_all_pairs: float
    threshold: float


def unique_pairs_expected(n: int) -> UniquePairsExpectation:
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    per_pair = (1.0 / n) * (1.0 - 1.0 / n) ** (2 * n - 2)
    return UniquePairsExpectation(
        n=n,
        from_n_pairs=math.comb(n, 2) * per_pair,
        from_all_pairs=math.comb(2 * n, 2) * per_pair,
        threshold=(n - 1) / (2.0 * math.e**2),
    )


def unique_pairs_expected_enumerated(n: int, cap: int = 10_000_000) -> Fraction:
    """Exact E[#outputs] over all n^(2n) inputs by full enumeration."""
    import itertools

    total_inputs = n ** (2 * n)
    if total_inputs > cap:
        raise CapExceeded(f"{total_inputs} inputs for n={n} exceeds cap {cap}")
    total = 0
    for xs in itertools.product(range(1, n + 1), repeat=2 * n):
        total += len(unique_pairs(xs))
    return Fraction(total, total_inputs)


def unique_pairs_mc(n: int, trials: int, seed: int) -> tuple[float, float]:
    """Monte Carlo (mean, standard error) of the output count over uniform inputs."""
    rng = np.random.default_rng(seed)
    draws = rng.integers(1, n + 1, size=(trials, 2 * n))
    counts = np.empty(trials, dtype=np.int64)
    for k in range(trials):
        row = draws[k]
        occ = np.bincount(row, minlength=n + 1)
        counts[k] = sum(1 for v in range(1, n + 1) if occ[v] == 2)
    mean = float(counts.mean())
    sigma = float(counts.std(ddof=1) / math.sqrt(trials)) if trials > 1 else float("inf")
    return mean, sigma
