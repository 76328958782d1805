"""Exact window samplers for jump laws.

All samplers are pure functions of the generator passed in; none keep
mutable state, so replications can share them freely.
"""

from __future__ import annotations

import math
from typing import Protocol

import numpy as np

from .errors import ConfigError, NumericError


class WindowSampler(Protocol):
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray: ...


class AliasSampler:
    """Walker alias table over a finite discrete law; O(1) per draw."""

    def __init__(self, weights: np.ndarray):
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or w.sum() <= 0:
            raise ConfigError("alias table needs a nonempty nonnegative weight vector")
        k = w.size
        prob = w * (k / w.sum())
        alias = np.zeros(k, dtype=np.intp)
        small = [i for i, p in enumerate(prob) if p < 1.0]
        large = [i for i, p in enumerate(prob) if p >= 1.0]
        prob = prob.copy()
        while small and large:
            s = small.pop()
            l = large.pop()
            alias[s] = l
            prob[l] = prob[l] - (1.0 - prob[s])
            (small if prob[l] < 1.0 else large).append(l)
        for i in large + small:
            prob[i] = 1.0
        self._prob = prob
        self._alias = alias

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        idx = rng.integers(0, self._prob.size, size=size)
        take_alias = rng.random(size) >= self._prob[idx]
        idx[take_alias] = self._alias[idx[take_alias]]
        return idx


class ParetoWindowSampler:
    """Inverse-CDF draws from density ``~ u^(-1-alpha)`` on ``(lo, hi]``."""

    def __init__(self, alpha: float, lo: float, hi: float):
        if lo <= 0 or hi <= lo:
            raise ConfigError("pareto window needs 0 < lo < hi")
        self._alpha = alpha
        self._lo = lo
        self._lo_pow = lo**-alpha
        self._hi_pow = 0.0 if math.isinf(hi) else hi**-alpha

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        return (self._lo_pow - u * (self._lo_pow - self._hi_pow)) ** (-1.0 / self._alpha)


class TemperedWindowSampler:
    """Acceptance-rejection for ``~ u^(-1-alpha) e^(-lam u)`` on ``(lo, hi]``.

    Proposes from the untempered window law and accepts with probability
    ``exp(-lam (u - lo))``, which is exact.
    """

    _MAX_ROUNDS = 1000

    def __init__(self, alpha: float, lam: float, lo: float, hi: float):
        self._proposal = ParetoWindowSampler(alpha, lo, hi)
        self._lam = lam
        self._lo = lo

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size)
        filled = 0
        for _ in range(self._MAX_ROUNDS):
            if filled >= size:
                return out
            need = size - filled
            cand = self._proposal.sample(rng, need)
            accept = rng.random(need) < np.exp(-self._lam * (cand - self._lo))
            kept = cand[accept]
            out[filled : filled + kept.size] = kept
            filled += kept.size
        raise NumericError("tempered-window rejection sampler failed to fill a batch")


class SignedMixtureSampler:
    """Two-sided jump draws: choose the side, then its magnitude, then sign it."""

    def __init__(
        self,
        weight_plus: float,
        weight_minus: float,
        plus: WindowSampler | None,
        minus: WindowSampler | None,
    ):
        total = weight_plus + weight_minus
        if total <= 0:
            raise ConfigError("two-sided sampler needs positive total rate")
        if weight_plus > 0 and plus is None or weight_minus > 0 and minus is None:
            raise ConfigError("missing side sampler for a side with positive rate")
        self._p_plus = weight_plus / total
        self._plus = plus
        self._minus = minus

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        out = np.empty(size)
        go_plus = rng.random(size) < self._p_plus
        n_plus = int(go_plus.sum())
        if n_plus:
            out[go_plus] = self._plus.sample(rng, n_plus)
        if size - n_plus:
            out[~go_plus] = -self._minus.sample(rng, size - n_plus)
        return out
