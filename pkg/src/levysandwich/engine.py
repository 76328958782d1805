"""Monte Carlo engine: embedded-walk skeletons, interval extremes, fine paths,
coupled multilevel envelopes, and two-sided exit times.

A skeleton realization observes the process at its big-jump epochs. Each
inter-jump interval carries the remainder-process increment together with the
running supremum/infimum offsets over the interval, so the interval extremes
of the full path are reconstructed exactly from simulated quantities:
``upper = walk + sup offset``, ``lower = walk + inf offset``.

Interval extremes include the post-jump start value and exclude the value at
the next jump epoch (the path is right-continuous); the remainder's own value
at the interval end enters the supremum as the left limit there.

Grid-based suprema understate the true ones by O(sqrt(grid_step)); the step
is exposed in :class:`SimConfig` so tests can budget for the bias, and
:func:`exact_brownian_sup_sampler` provides the bias-free alternative when
the remainder is pure drifted Brownian motion.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .decomposition import Cutoff, Decomposition, decompose
from .errors import ConfigError, HorizonExceeded
from .measures import LevyTriplet
from .sampling import SignedMixtureSampler, WindowSampler

__all__ = [
    "ExitResult",
    "FineIncrementSampler",
    "LevelEnvelope",
    "MultilevelEnvelopes",
    "SimConfig",
    "SkeletonPath",
    "SmallProcessSimulator",
    "exact_brownian_sup_sampler",
    "exit_time",
    "multilevel_envelopes",
    "sample_exponential_gaps",
    "sample_skeleton",
]

logger = logging.getLogger(__name__)

# Gaussian surrogate for sub-threshold jumps is valid only when their
# variance dominates the truncation scale.
SURROGATE_VARIANCE_FACTOR = 10.0


@dataclass(frozen=True)
class SimConfig:
    """Simulation controls shared by every Monte Carlo operation.

    ``inner_cutoff`` is the magnitude below which remainder jumps are either
    replaced by a Gaussian surrogate (when their variance is large against
    the cutoff scale) or dropped with drift preserved. ``horizon_steps`` and
    ``horizon_time`` choose the horizon for step-indexed and time-indexed
    operations respectively.
    """

    seed: int = 0
    grid_step: float = 1e-3
    inner_cutoff: float = 0.0
    horizon_steps: int | None = None
    horizon_time: float | None = None
    replications: int = 1000
    workers: int = 1
    record_path: bool = False

    def __post_init__(self):
        if self.grid_step <= 0:
            raise ConfigError("sim.grid_step must be positive")
        if self.inner_cutoff < 0:
            raise ConfigError("sim.inner_cutoff must be >= 0")
        if self.horizon_steps is not None and self.horizon_steps < 0:
            raise ConfigError("sim.horizon_steps must be >= 0")
        if self.horizon_time is not None and self.horizon_time <= 0:
            raise ConfigError("sim.horizon_time must be positive")
        if self.replications < 1:
            raise ConfigError("sim.replications must be >= 1")
        if self.workers < 1:
            raise ConfigError("sim.workers must be >= 1")


def sample_exponential_gaps(rng: np.random.Generator, delta: float, n: int) -> np.ndarray:
    """n i.i.d. exponential inter-jump gaps of rate delta; cumulative sums are the epochs."""
    if delta <= 0:
        raise ConfigError("gap rate delta must be positive")
    return rng.exponential(1.0 / delta, n)


def exact_brownian_sup_sampler(
    rng: np.random.Generator,
    mu: float,
    sigma2: float,
    delta: float,
    size: int | None = None,
) -> tuple[np.ndarray | float, np.ndarray | float]:
    """(increment, supremum) of drifted Brownian motion at an independent
    exponential time, sampled exactly.

    The supremum is exponential with rate ``(sqrt(mu^2 + 2 sigma2 delta) - mu)/sigma2``
    and is independent of (increment - supremum), which is the negative of an
    exponential with the mirrored rate.
    """
    if sigma2 <= 0:
        raise ConfigError("exact supremum sampler needs sigma2 > 0")
    if delta <= 0:
        raise ConfigError("exact supremum sampler needs delta > 0")
    root = math.sqrt(mu * mu + 2.0 * sigma2 * delta)
    theta_plus = (root - mu) / sigma2
    theta_minus = (root + mu) / sigma2
    sup = rng.exponential(1.0 / theta_plus, size)
    gap = rng.exponential(1.0 / theta_minus, size)
    return sup - gap, sup


def brownian_sup_rates(mu: float, sigma2: float, delta: float) -> tuple[float, float]:
    """Exponential rates of the supremum and of minus-the-infimum at an
    independent exponential time of a drifted Brownian motion."""
    root = math.sqrt(mu * mu + 2.0 * sigma2 * delta)
    return (root - mu) / sigma2, (root + mu) / sigma2


# ---------------------------------------------------------------------------
# Core segment simulator
# ---------------------------------------------------------------------------


@dataclass
class Segment:
    """One simulated stretch of a jump-diffusion started at 0."""

    increment: float
    sup: float
    inf: float
    times: np.ndarray | None = None  # includes the 0 start and the end epoch
    values: np.ndarray | None = None
    jump_times: np.ndarray | None = None
    jump_sizes: np.ndarray | None = None


def _simulate_segment(
    rng: np.random.Generator,
    duration: float,
    drift: float,
    gauss_var: float,
    jump_rate: float,
    sampler: WindowSampler | None,
    grid_step: float,
    record: bool = False,
    keep_jumps: bool = False,
) -> Segment:
    """Drift + Gaussian-on-grid + compound-Poisson jumps over [0, duration].

    Extremes run over the start value 0, every grid and post-jump value, and
    the end value (the left limit at the segment end). Draw order is fixed:
    jump count, jump times, jump sizes, then Gaussian increments.
    """
    if duration <= 0:
        z = np.zeros(1)
        return Segment(0.0, 0.0, 0.0, z, z.copy(), np.empty(0), np.empty(0))

    n_jumps = int(rng.poisson(jump_rate * duration)) if jump_rate > 0 else 0
    if n_jumps:
        jt = np.sort(rng.random(n_jumps)) * duration
        js = sampler.sample(rng, n_jumps)
    else:
        jt = np.empty(0)
        js = np.empty(0)

    if gauss_var > 0 or drift != 0.0:
        n_cells = max(1, math.ceil(duration / grid_step))
        grid = grid_step * np.arange(1.0, n_cells)
        grid = np.append(grid, duration)
    else:
        # constant between jumps: interior grid points duplicate the
        # post-jump values, so only jump epochs and the end matter
        grid = np.asarray([duration])

    times = np.concatenate([grid, jt])
    jump_amount = np.concatenate([np.zeros(grid.size), js])
    order = np.argsort(times, kind="stable")
    times = times[order]
    jump_amount = jump_amount[order]

    dts = np.diff(times, prepend=0.0)
    incs = drift * dts
    if gauss_var > 0:
        incs = incs + np.sqrt(gauss_var * dts) * rng.standard_normal(times.size)
    incs += jump_amount
    values = np.cumsum(incs)

    increment = float(values[-1])
    sup = float(max(0.0, values.max()))
    inf = float(min(0.0, values.min()))
    out_times = np.concatenate([[0.0], times]) if record else None
    out_values = np.concatenate([[0.0], values]) if record else None
    return Segment(
        increment,
        sup,
        inf,
        out_times,
        out_values,
        jt if keep_jumps else None,
        js if keep_jumps else None,
    )


class SmallProcessSimulator:
    """Simulates the bounded-jump remainder process over inter-jump intervals.

    Splits the remainder at the inner cutoff: jumps above it are explicit
    compound Poisson, jumps below are folded into the Gaussian term when
    their variance rate exceeds ``SURROGATE_VARIANCE_FACTOR * eps^2`` and are
    otherwise dropped; the drift is adjusted so the mean rate is exact either
    way. The root-mean-square pathwise error of dropping is
    ``sqrt(dropped_variance_rate * duration)``.
    """

    def __init__(self, dec: Decomposition, config: SimConfig):
        eps = config.inner_cutoff
        if eps >= dec.cutoff.min_eta:
            raise ConfigError("sim.inner_cutoff must be below both cutoff half-widths")
        rate = dec.small_mass_above(eps)
        if math.isinf(rate):
            raise ConfigError(
                "sim.inner_cutoff = 0 with an infinite-activity measure; raise it"
            )
        v_below = dec.small_variance_below(eps)
        surrogate = v_below > SURROGATE_VARIANCE_FACTOR * eps * eps
        self.surrogate_active = bool(surrogate and v_below > 0)
        self.dropped_variance_rate = 0.0 if self.surrogate_active else v_below
        self.gauss_var = dec.small_sigma2 + (v_below if self.surrogate_active else 0.0)
        self.jump_rate = rate
        self.drift = dec.small_drift - dec.small_mean_above(eps)
        self.sampler = dec.small_sampler(eps) if rate > 0 else None
        self.grid_step = config.grid_step
        if self.dropped_variance_rate > 0:
            logger.debug(
                "dropping sub-cutoff jumps: variance rate %.3g below eps=%.3g "
                "(surrogate validity heuristic not met)",
                self.dropped_variance_rate,
                eps,
            )

    def interval(self, rng: np.random.Generator, duration: float, record: bool = False) -> Segment:
        return _simulate_segment(
            rng,
            duration,
            self.drift,
            self.gauss_var,
            self.jump_rate,
            self.sampler,
            self.grid_step,
            record=record,
        )


@lru_cache(maxsize=128)
def _small_simulator(dec: Decomposition, config: SimConfig) -> SmallProcessSimulator:
    return SmallProcessSimulator(dec, config)


# ---------------------------------------------------------------------------
# Skeleton paths
# ---------------------------------------------------------------------------


@dataclass
class SkeletonPath:
    """One realization of the big-jump skeleton with interval extremes.

    Arrays are indexed by interval ``k = 0..n`` spanning ``[taus[k], taus[k] + gaps[k])``:
    ``small_increments[k]`` is the remainder increment across interval k,
    ``m_tilde[k] >= 0`` and ``i_tilde[k] <= 0`` its running sup/inf offsets,
    and ``upper[k] = s_hat[k] + m_tilde[k]``, ``lower[k] = s_hat[k] + i_tilde[k]``
    the interval extremes of the full path. ``jumps[k-1]`` lands at ``taus[k]``
    and the walk satisfies ``s_hat[k] = s_hat[k-1] + small_increments[k-1] + jumps[k-1]``.
    """

    taus: np.ndarray
    gaps: np.ndarray
    jumps: np.ndarray
    small_increments: np.ndarray
    s_hat: np.ndarray
    m_tilde: np.ndarray
    i_tilde: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    fine_times: np.ndarray | None = None
    fine_values: np.ndarray | None = None
    exact_mode: bool = False

    @property
    def n_steps(self) -> int:
        return self.jumps.size

    def interval_of(self, t: float) -> int:
        """Index of the inter-jump interval containing time t."""
        return int(np.searchsorted(self.taus, t, side="right") - 1)


def sample_skeleton(
    rng: np.random.Generator,
    dec: Decomposition,
    n: int,
    config: SimConfig,
    method: str = "auto",
) -> SkeletonPath:
    """Simulate n skeleton steps plus the trailing interval.

    ``method="grid"`` walks the remainder on the time grid (bias O(sqrt(h))
    in the extremes); ``method="exact"`` draws interval increments and
    extremes from the exponential-time fluctuation identities, which is
    only valid (and is enforced) when the remainder is pure drifted Brownian
    motion. ``"auto"`` picks the exact sampler whenever it is valid.

    In exact mode the supremum offset is exact jointly with the increment,
    and the infimum offset is drawn as ``increment - sup``; each pair
    (increment, sup) and (increment, inf) then carries the correct joint
    law, which is what the walk constructions consume.
    """
    if n < 0:
        raise ConfigError("skeleton length must be >= 0")
    if method == "auto":
        method = "exact" if dec.small_is_brownian_only else "grid"

    gaps = sample_exponential_gaps(rng, dec.delta, n + 1)
    taus = np.concatenate([[0.0], np.cumsum(gaps[:n])])
    jumps = dec.big_jump_law.sample(rng, n)

    if method == "exact":
        if not dec.small_is_brownian_only:
            raise ConfigError("exact skeleton sampling needs a jump-free Brownian remainder")
        theta_plus, theta_minus = brownian_sup_rates(
            dec.small_drift, dec.small_sigma2, dec.delta
        )
        m_tilde = rng.exponential(1.0 / theta_plus, n + 1)
        gap_down = rng.exponential(1.0 / theta_minus, n + 1)
        small_incs = m_tilde - gap_down
        i_tilde = -gap_down
        fine_times = fine_values = None
    elif method == "grid":
        sim = _small_simulator(dec, config)
        small_incs = np.empty(n + 1)
        m_tilde = np.empty(n + 1)
        i_tilde = np.empty(n + 1)
        traces: list[Segment] | None = [] if config.record_path else None
        for k in range(n + 1):
            seg = sim.interval(rng, gaps[k], record=config.record_path)
            small_incs[k] = seg.increment
            m_tilde[k] = seg.sup
            i_tilde[k] = seg.inf
            if traces is not None:
                traces.append(seg)
        fine_times = fine_values = None
    else:
        raise ConfigError(f"unknown skeleton method {method!r}")

    s_hat = np.concatenate([[0.0], np.cumsum(small_incs[:n] + jumps)])
    path = SkeletonPath(
        taus=taus,
        gaps=gaps,
        jumps=jumps,
        small_increments=small_incs,
        s_hat=s_hat,
        m_tilde=m_tilde,
        i_tilde=i_tilde,
        upper=s_hat + m_tilde,
        lower=s_hat + i_tilde,
        exact_mode=(method == "exact"),
    )
    if method == "grid" and config.record_path:
        times_parts = []
        values_parts = []
        for k, seg in enumerate(traces):
            # drop each interval's end epoch: it coincides with the next
            # interval's start; keep it on the trailing interval
            stop = None if k == n else -1
            times_parts.append(taus[k] + seg.times[:stop])
            values_parts.append(s_hat[k] + seg.values[:stop])
        path.fine_times = np.concatenate(times_parts)
        path.fine_values = np.concatenate(values_parts)
    return path


# ---------------------------------------------------------------------------
# Direct fine-path simulation of the full process
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _FineModel:
    """Parameters for simulating the full process with every jump above the
    inner cutoff explicit and the rest surrogated/dropped."""

    drift: float
    gauss_var: float
    jump_rate: float
    dec: Decomposition | None  # decomposition at the explicit cutoff, if any
    triplet: LevyTriplet
    eps: float
    surrogate_active: bool
    dropped_variance_rate: float


@lru_cache(maxsize=128)
def _fine_model(triplet: LevyTriplet, eps: float) -> _FineModel:
    m = triplet.measure
    rate = m.mom_plus(0, eps, math.inf) + m.mom_minus(0, eps, math.inf)
    if math.isinf(rate):
        raise ConfigError("sim.inner_cutoff = 0 with an infinite-activity measure; raise it")
    # compensator bookkeeping: explicit sub-unit jumps stop being compensated,
    # super-unit jumps below the cutoff (eps > 1) keep their raw mean
    drift = triplet.gamma
    if eps < 1.0:
        drift -= m.mom_plus(1, eps, 1.0) - m.mom_minus(1, eps, 1.0)
    elif eps > 1.0:
        drift += m.mom_plus(1, 1.0, eps) - m.mom_minus(1, 1.0, eps)
    v_below = (m.mom_plus(2, 0.0, eps) + m.mom_minus(2, 0.0, eps)) if eps > 0 else 0.0
    surrogate = v_below > SURROGATE_VARIANCE_FACTOR * eps * eps and v_below > 0
    return _FineModel(
        drift=drift,
        gauss_var=triplet.sigma2 + (v_below if surrogate else 0.0),
        jump_rate=rate,
        dec=None,
        triplet=triplet,
        eps=eps,
        surrogate_active=surrogate,
        dropped_variance_rate=0.0 if surrogate else v_below,
    )


def _fine_sampler(model: _FineModel) -> SignedMixtureSampler | None:
    if model.jump_rate <= 0:
        return None
    m = model.triplet.measure
    rp = m.mom_plus(0, model.eps, math.inf)
    rm = m.mom_minus(0, model.eps, math.inf)
    plus = m.sampler_plus(model.eps, math.inf) if rp > 0 else None
    minus = m.sampler_minus(model.eps, math.inf) if rm > 0 else None
    return SignedMixtureSampler(rp, rm, plus, minus)


class FineIncrementSampler:
    """Exact-in-law draws of the process value at a fixed time.

    Composes the deterministic drift, one Gaussian for the Brownian plus
    surrogate part, and the explicit compound-Poisson sum; no grid is
    involved, so there is no discretization bias in the value's law.
    """

    def __init__(self, triplet: LevyTriplet, config: SimConfig):
        self._model = _fine_model(triplet, config.inner_cutoff)
        self._sampler = _fine_sampler(self._model)

    @property
    def jump_rate(self) -> float:
        return self._model.jump_rate

    def sample(self, rng: np.random.Generator, t: float, size: int) -> np.ndarray:
        if t <= 0:
            raise ConfigError("time must be positive")
        model = self._model
        values = np.full(size, model.drift * t)
        if model.jump_rate > 0:
            counts = rng.poisson(model.jump_rate * t, size)
            total = int(counts.sum())
            if total:
                flat = self._sampler.sample(rng, total)
                owners = np.repeat(np.arange(size), counts)
                values += np.bincount(owners, weights=flat, minlength=size)
        if model.gauss_var > 0:
            values += math.sqrt(model.gauss_var * t) * rng.standard_normal(size)
        return values


class FinePathSimulator:
    """Grid-plus-jump-epoch simulation of the full process, chunked in time."""

    def __init__(self, triplet: LevyTriplet, config: SimConfig):
        self._model = _fine_model(triplet, config.inner_cutoff)
        self._sampler = _fine_sampler(self._model)
        self._h = config.grid_step

    @property
    def model(self) -> _FineModel:
        return self._model

    def segment(self, rng: np.random.Generator, duration: float, record: bool) -> Segment:
        return _simulate_segment(
            rng,
            duration,
            self._model.drift,
            self._model.gauss_var,
            self._model.jump_rate,
            self._sampler,
            self._h,
            record=record,
            keep_jumps=True,
        )

    def chunk_length(self, cap: float) -> float:
        """Segment length keeping jump counts and grid sizes moderate."""
        length = cap
        if self._model.jump_rate > 0:
            length = min(length, 256.0 / self._model.jump_rate)
        if self._model.gauss_var > 0:
            length = min(length, 65536.0 * self._h)
        return max(length, self._h)


# ---------------------------------------------------------------------------
# Coupled multilevel envelopes
# ---------------------------------------------------------------------------


@dataclass
class LevelEnvelope:
    """Step-function bounds at one cutoff level, constant on partition cells."""

    eta: float
    boundaries: np.ndarray  # cell edges including 0 and the horizon
    upper: np.ndarray
    lower: np.ndarray

    def cell_of(self, t: float) -> int:
        idx = int(np.searchsorted(self.boundaries, t, side="right") - 1)
        return min(max(idx, 0), self.upper.size - 1)

    def upper_at(self, t: float) -> float:
        return float(self.upper[self.cell_of(t)])

    def lower_at(self, t: float) -> float:
        return float(self.lower[self.cell_of(t)])


@dataclass
class MultilevelEnvelopes:
    """One fine path with nested step-function bounds at decreasing cutoffs."""

    horizon: float
    fine_times: np.ndarray
    fine_values: np.ndarray
    jump_times: np.ndarray
    jump_sizes: np.ndarray
    levels: list[LevelEnvelope]


def multilevel_envelopes(
    rng: np.random.Generator,
    triplet: LevyTriplet,
    etas: tuple[float, ...] | list[float],
    config: SimConfig,
) -> MultilevelEnvelopes:
    """Simulate one fine path and bound it at every cutoff level.

    The path is simulated once with every jump above the inner cutoff
    explicit; each level's partition is the jump epochs with magnitude above
    that level's cutoff, and its bounds are extremes of the same path over
    the partition cells. Nesting ``upper_(k+1) <= upper_k`` and
    ``lower_(k+1) >= lower_k`` holds by construction since finer partitions
    take extremes over subintervals.
    """
    etas = tuple(float(e) for e in etas)
    if not etas or any(e <= 0 for e in etas):
        raise ConfigError("cutoff levels must be positive")
    if any(b >= a for a, b in zip(etas, etas[1:])):
        raise ConfigError("cutoff levels must be strictly decreasing")
    if config.horizon_time is None:
        raise ConfigError("sim.horizon_time is required for multilevel envelopes")
    if config.inner_cutoff >= etas[-1]:
        raise ConfigError("sim.inner_cutoff must lie below the finest level")

    horizon = config.horizon_time
    fine = FinePathSimulator(triplet, config)
    seg = fine.segment(rng, horizon, record=True)
    times, values = seg.times, seg.values
    jt, js = seg.jump_times, seg.jump_sizes

    levels = []
    for eta in etas:
        keep = np.abs(js) > eta
        bounds = np.concatenate([[0.0], np.sort(jt[keep]), [horizon]])
        starts = np.searchsorted(times, bounds[:-1], side="left")
        upper = np.maximum.reduceat(values, starts)
        lower = np.minimum.reduceat(values, starts)
        levels.append(LevelEnvelope(eta=eta, boundaries=bounds, upper=upper, lower=lower))
    return MultilevelEnvelopes(
        horizon=horizon,
        fine_times=times,
        fine_values=values,
        jump_times=jt,
        jump_sizes=js,
        levels=levels,
    )


# ---------------------------------------------------------------------------
# Two-sided exit
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExitResult:
    """First fine-path epoch outside ``(-r, r)``.

    ``time`` carries the O(sqrt(grid_step)) diffusion-crossing bias of
    discrete monitoring.
    """

    time: float
    upper_exit: bool
    overshoot: float


def exit_time(
    rng: np.random.Generator, triplet: LevyTriplet, r: float, config: SimConfig
) -> ExitResult:
    """Simulate until the path leaves ``(-r, r)`` or the time cap is reached.

    Raises :class:`HorizonExceeded` at the cap; that signals the cap, not
    absence of an exit.
    """
    if r <= 0:
        raise ConfigError("exit barrier r must be positive")
    if config.horizon_time is None:
        raise ConfigError("sim.horizon_time (the time cap) is required for exit sampling")
    cap = config.horizon_time
    fine = FinePathSimulator(triplet, config)
    chunk = fine.chunk_length(cap)

    t0 = 0.0
    x0 = 0.0
    while t0 < cap:
        duration = min(chunk, cap - t0)
        seg = fine.segment(rng, duration, record=True)
        vals = x0 + seg.values[1:]  # skip the duplicated start epoch
        hits = np.nonzero(np.abs(vals) > r)[0]
        if hits.size:
            i = int(hits[0])
            v = float(vals[i])
            return ExitResult(time=t0 + float(seg.times[1:][i]), upper_exit=v > 0, overshoot=abs(v) - r)
        t0 += duration
        x0 += seg.increment
    raise HorizonExceeded(cap)


def skeleton_containment_violations(path: SkeletonPath, tol: float = 1e-12) -> int:
    """Count fine-grid values outside their interval's [lower, upper] band."""
    if path.fine_times is None:
        raise ConfigError("path was simulated without record_path")
    idx = np.searchsorted(path.taus, path.fine_times, side="right") - 1
    idx = np.clip(idx, 0, path.upper.size - 1)
    above = path.fine_values > path.upper[idx] + tol
    below = path.fine_values < path.lower[idx] - tol
    return int(np.count_nonzero(above | below))


def default_cutoff_for(triplet: LevyTriplet) -> Cutoff:
    """Symmetric unit cutoff, the conventional default."""
    return Cutoff.symmetric(1.0)


def decomposition_for(triplet: LevyTriplet, cutoff: Cutoff | None) -> Decomposition:
    return decompose(triplet, cutoff if cutoff is not None else default_cutoff_for(triplet))
