"""Cutoff decomposition of a jump process into big jumps plus a bounded remainder.

Fixing an interval ``[-eta_minus, eta_plus]`` around zero splits the process
into a compound-Poisson walk of the jumps landing outside the interval
(rate ``delta``, normalized jump law :class:`BigJumpLaw`) and the remainder
process with all those jumps removed. The remainder keeps the Brownian part,
the jumps inside the interval, and the compensator bookkeeping; because its
jumps are bounded it has finite exponential moments and a finite mean drift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, ZeroBigJumpRate
from .measures import FirstMoment, LevyTriplet, Measure
from .sampling import SignedMixtureSampler, WindowSampler

__all__ = ["BigJumpLaw", "Cutoff", "Decomposition", "decompose", "drift_of_small", "step_mean"]


@dataclass(frozen=True)
class Cutoff:
    """Interval ``[-eta_minus, eta_plus]`` separating small from big jumps."""

    eta_minus: float
    eta_plus: float

    def __post_init__(self):
        if self.eta_minus <= 0 or self.eta_plus <= 0:
            raise ConfigError("cutoff half-widths must be positive")

    @classmethod
    def symmetric(cls, eta: float) -> "Cutoff":
        return cls(eta_minus=eta, eta_plus=eta)

    @property
    def min_eta(self) -> float:
        return min(self.eta_minus, self.eta_plus)

    def to_dict(self) -> dict:
        return {"eta_minus": self.eta_minus, "eta_plus": self.eta_plus}


@dataclass(frozen=True)
class BigJumpLaw:
    """Normalized law of one jump landing outside the cutoff interval."""

    measure: Measure
    cutoff: Cutoff
    delta: float

    @property
    def rate_plus(self) -> float:
        return self.measure.tail_plus(self.cutoff.eta_plus)

    @property
    def rate_minus(self) -> float:
        return self.measure.tail_minus(self.cutoff.eta_minus)

    @cached_property
    def _sampler(self) -> SignedMixtureSampler:
        rp, rm = self.rate_plus, self.rate_minus
        plus = self.measure.sampler_plus(self.cutoff.eta_plus, math.inf) if rp > 0 else None
        minus = self.measure.sampler_minus(self.cutoff.eta_minus, math.inf) if rm > 0 else None
        return SignedMixtureSampler(rp, rm, plus, minus)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if size == 0:
            return np.empty(0)
        return self._sampler.sample(rng, size)

    def cdf(self, y: float) -> float:
        """P(jump <= y), jump-discontinuity aware."""
        if y < -self.cutoff.eta_minus:
            return (self.measure.tail_minus(-y) + self.measure.point_mass(y)) / self.delta
        if y < self.cutoff.eta_plus:
            return self.rate_minus / self.delta
        return 1.0 - self.measure.tail_plus(y) / self.delta

    def upper_tail(self, z: float) -> float:
        """P(jump > z) for any real z."""
        if z >= self.cutoff.eta_plus:
            return self.measure.tail_plus(z) / self.delta
        if z >= -self.cutoff.eta_minus:
            return self.rate_plus / self.delta
        return 1.0 - (self.measure.tail_minus(-z) + self.measure.point_mass(z)) / self.delta

    def point_mass(self, y: float) -> float:
        if -self.cutoff.eta_minus <= y <= self.cutoff.eta_plus:
            return 0.0
        return self.measure.point_mass(y) / self.delta

    def mean(self) -> FirstMoment:
        plus = self.measure.mom_plus(1, self.cutoff.eta_plus, math.inf)
        minus = self.measure.mom_minus(1, self.cutoff.eta_minus, math.inf)
        pf, mf = math.isfinite(plus), math.isfinite(minus)
        if pf and mf:
            value = (plus - minus) / self.delta
        elif pf:
            value = -math.inf
        elif mf:
            value = math.inf
        else:
            value = math.nan
        return FirstMoment(value=value, plus_finite=pf, minus_finite=mf)

    def breakpoints(self) -> tuple[float, ...]:
        """Signed abscissae where the jump CDF kinks or jumps."""
        pts = {-self.cutoff.eta_minus, self.cutoff.eta_plus}
        pts.update(p for p in self.measure.breakpoints_plus() if p >= self.cutoff.eta_plus)
        pts.update(-p for p in self.measure.breakpoints_minus() if p >= self.cutoff.eta_minus)
        return tuple(sorted(pts))


@dataclass(frozen=True)
class Decomposition:
    """A triplet split at a cutoff: big-jump walk data plus remainder characteristics."""

    triplet: LevyTriplet
    cutoff: Cutoff
    delta: float
    big_jump_law: BigJumpLaw
    small_sigma2: float
    small_drift: float

    # -- remainder measure, i.e. the jump measure restricted to the cutoff interval
    def small_mom_plus(self, k: int, a: float, b: float) -> float:
        return self.triplet.measure.mom_plus(k, a, min(b, self.cutoff.eta_plus))

    def small_mom_minus(self, k: int, a: float, b: float) -> float:
        return self.triplet.measure.mom_minus(k, a, min(b, self.cutoff.eta_minus))

    def small_mass_above(self, eps: float) -> float:
        """Rate of remainder jumps with magnitude in ``(eps, eta]``; may be inf."""
        return self.small_mom_plus(0, eps, math.inf) + self.small_mom_minus(0, eps, math.inf)

    def small_mean_above(self, eps: float) -> float:
        """Signed mean rate of remainder jumps with magnitude above eps."""
        return self.small_mom_plus(1, eps, math.inf) - self.small_mom_minus(1, eps, math.inf)

    def small_variance_below(self, eps: float) -> float:
        """Second moment rate of remainder jumps with magnitude at most eps."""
        if eps <= 0:
            return 0.0
        return self.small_mom_plus(2, 0.0, eps) + self.small_mom_minus(2, 0.0, eps)

    def small_sampler(self, eps: float) -> WindowSampler:
        m = self.triplet.measure
        rp = self.small_mom_plus(0, eps, math.inf)
        rm = self.small_mom_minus(0, eps, math.inf)
        plus = m.sampler_plus(eps, self.cutoff.eta_plus) if rp > 0 else None
        minus = m.sampler_minus(eps, self.cutoff.eta_minus) if rm > 0 else None
        return SignedMixtureSampler(rp, rm, plus, minus)

    @property
    def small_is_brownian_only(self) -> bool:
        """True when the remainder is pure drifted Brownian motion (no jumps)."""
        return self.small_mass_above(0.0) == 0.0 and self.small_sigma2 > 0


def drift_of_small(triplet: LevyTriplet, cutoff: Cutoff) -> float:
    """Mean per unit time of the remainder process.

    Removing the big jumps leaves their sub-unit compensator behind and keeps
    any super-unit jumps inside the interval raw, so the remainder mean is
    the linear coefficient minus the compensator of removed sub-unit jumps
    plus the mean of retained super-unit jumps. Both corrections integrate
    over bounded windows and are always finite. With both half-widths equal
    to 1 the corrections vanish and the drift is exactly ``gamma``.
    """
    m = triplet.measure
    corr = 0.0
    if cutoff.eta_plus < 1.0:
        corr -= m.mom_plus(1, cutoff.eta_plus, 1.0)
    elif cutoff.eta_plus > 1.0:
        corr += m.mom_plus(1, 1.0, cutoff.eta_plus)
    if cutoff.eta_minus < 1.0:
        corr += m.mom_minus(1, cutoff.eta_minus, 1.0)
    elif cutoff.eta_minus > 1.0:
        corr -= m.mom_minus(1, 1.0, cutoff.eta_minus)
    return triplet.gamma + corr


def decompose(triplet: LevyTriplet, cutoff: Cutoff) -> Decomposition:
    """Split a triplet at a cutoff interval.

    Raises :class:`ZeroBigJumpRate` when the interval swallows every jump.
    """
    delta = triplet.measure.tail_plus(cutoff.eta_plus) + triplet.measure.tail_minus(
        cutoff.eta_minus
    )
    if not delta > 0:
        raise ZeroBigJumpRate(
            f"no jump mass outside [-{cutoff.eta_minus:g}, {cutoff.eta_plus:g}]"
        )
    if math.isinf(delta):
        raise ConfigError("cutoff interval leaves infinite big-jump rate")
    return Decomposition(
        triplet=triplet,
        cutoff=cutoff,
        delta=delta,
        big_jump_law=BigJumpLaw(measure=triplet.measure, cutoff=cutoff, delta=delta),
        small_sigma2=triplet.sigma2,
        small_drift=drift_of_small(triplet, cutoff),
    )


def step_mean(dec: Decomposition) -> FirstMoment:
    """Mean of one embedded-walk step: big-jump mean plus remainder drift times
    the mean inter-jump gap ``1/delta``. Divergent big-jump means propagate."""
    big = dec.big_jump_law.mean()
    if not big.finite:
        return big
    return FirstMoment(
        value=big.value + dec.small_drift / dec.delta,
        plus_finite=True,
        minus_finite=True,
    )
