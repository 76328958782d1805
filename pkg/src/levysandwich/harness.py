"""Reusable statistical verification primitives.

Every check returns a :class:`TestReport`; a report is *vacuous* when the
data cannot support the test (constant margins, undersized samples), in
which case ``passed`` is set but asserts nothing. Critical values are
asymptotic, adequate at the sample sizes used here (>= 1e3).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import ConfigError

__all__ = [
    "TestReport",
    "correlation_bound",
    "ks_critical_value",
    "ks_one_sample",
    "ks_two_sample",
    "ks_two_sample_2d",
    "proportion_ci",
]

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TestReport:
    """Outcome of one statistical check."""

    name: str
    statistic: float
    threshold: float
    n_samples: int
    passed: bool
    vacuous: bool = False
    notes: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "n_samples": self.n_samples,
            "passed": self.passed,
            "vacuous": self.vacuous,
            "notes": self.notes,
        }

    @staticmethod
    def vacuous_report(name: str, n_samples: int, notes: str) -> "TestReport":
        return TestReport(
            name=name,
            statistic=0.0,
            threshold=math.inf,
            n_samples=n_samples,
            passed=True,
            vacuous=True,
            notes=notes,
        )


def ks_coefficient(level: float) -> float:
    """Asymptotic Kolmogorov-Smirnov coefficient c(level); c(0.01) ~ 1.628."""
    if not 0 < level < 1:
        raise ConfigError("significance level must be in (0, 1)")
    return math.sqrt(-0.5 * math.log(level / 2.0))


def ks_critical_value(level: float, n: int, m: int | None = None) -> float:
    """Asymptotic critical distance for one- or two-sample KS tests."""
    c = ks_coefficient(level)
    if m is None:
        return c / math.sqrt(n)
    return c * math.sqrt((n + m) / (n * m))


def ks_two_sample(
    a: np.ndarray,
    b: np.ndarray,
    level: float = 0.01,
    threshold_pad: float = 0.0,
    name: str = "ks-two-sample",
) -> TestReport:
    """Sup-distance of empirical CDFs against the asymptotic critical value."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.size == 0 or b.size == 0:
        raise ConfigError("KS test needs nonempty samples")
    a_sorted = np.sort(a)
    b_sorted = np.sort(b)
    grid = np.concatenate([a_sorted, b_sorted])
    cdf_a = np.searchsorted(a_sorted, grid, side="right") / a.size
    cdf_b = np.searchsorted(b_sorted, grid, side="right") / b.size
    d = float(np.max(np.abs(cdf_a - cdf_b)))
    threshold = ks_critical_value(level, a.size, b.size) + threshold_pad
    return TestReport(
        name=name,
        statistic=d,
        threshold=threshold,
        n_samples=min(a.size, b.size),
        passed=d <= threshold,
    )


def ks_one_sample(
    samples: np.ndarray,
    cdf,
    level: float = 0.01,
    threshold_pad: float = 0.0,
    point_mass=None,
    name: str = "ks-one-sample",
) -> TestReport:
    """Sup-distance of the empirical CDF from an analytic CDF.

    ``point_mass(x)`` supplies atoms of the reference law so the lower
    one-sided gap uses the left limit of the CDF; for discrete laws the
    usual critical value is conservative.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise ConfigError("KS test needs a nonempty sample")
    f = np.asarray([cdf(x) for x in xs], dtype=float)
    f_left = f - np.asarray([point_mass(x) for x in xs]) if point_mass else f
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    d = float(max(np.max(hi - f), np.max(f_left - lo)))
    threshold = ks_critical_value(level, n) + threshold_pad
    return TestReport(
        name=name, statistic=d, threshold=threshold, n_samples=n, passed=d <= threshold
    )


def correlation_bound(
    x: np.ndarray,
    y: np.ndarray,
    multiplier: float = 3.0,
    name: str = "correlation-bound",
) -> TestReport:
    """Pearson and Spearman coefficients against ``multiplier / sqrt(n)``.

    Vacuous when either margin is constant (the coefficients are undefined).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if n < 100 or y.size != n:
        raise ConfigError("correlation bound needs paired samples with n >= 100")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        return TestReport.vacuous_report(name, n, "constant margin; correlation undefined")
    pearson = float(np.corrcoef(x, y)[0, 1])
    spearman = float(stats.spearmanr(x, y).statistic)
    statistic = max(abs(pearson), abs(spearman))
    threshold = multiplier / math.sqrt(n)
    return TestReport(
        name=name,
        statistic=statistic,
        threshold=threshold,
        n_samples=n,
        passed=statistic <= threshold,
        notes=f"pearson={pearson:.5f} spearman={spearman:.5f}",
    )


def proportion_ci(successes: int, n: int, z: float = 3.0) -> tuple[float, float]:
    """Normal-approximation proportion estimate and half-width ``z sqrt(p(1-p)/n)``."""
    if n < 1:
        raise ConfigError("proportion needs n >= 1")
    p = successes / n
    if successes == 0 or successes == n:
        logger.warning(
            "proportion at the boundary (%d/%d): normal half-width is 0, "
            "the interval understates uncertainty",
            successes,
            n,
        )
    return p, z * math.sqrt(p * (1.0 - p) / n)


# ---------------------------------------------------------------------------
# Two-dimensional two-sample KS (Fasano-Franceschini style)
# ---------------------------------------------------------------------------


def _quadrant_statistic(points: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    """Max over points and quadrant orientations of |P_a - P_b| of a quadrant."""
    d = 0.0
    chunk = 512
    for start in range(0, points.shape[0], chunk):
        px = points[start : start + chunk, 0][:, None]
        py = points[start : start + chunk, 1][:, None]
        gx_a = a[None, :, 0] > px
        gy_a = a[None, :, 1] > py
        gx_b = b[None, :, 0] > px
        gy_b = b[None, :, 1] > py
        for fx, fy in ((1, 1), (1, 0), (0, 1), (0, 0)):
            qa = np.mean((gx_a == bool(fx)) & (gy_a == bool(fy)), axis=1)
            qb = np.mean((gx_b == bool(fx)) & (gy_b == bool(fy)), axis=1)
            d = max(d, float(np.max(np.abs(qa - qb))))
    return d


def _ks_tail_probability(lam: float) -> float:
    if lam <= 0:
        return 1.0
    total = 0.0
    for j in range(1, 101):
        term = 2.0 * (-1.0) ** (j - 1) * math.exp(-2.0 * j * j * lam * lam)
        total += term
        if abs(term) < 1e-12:
            break
    return min(max(total, 0.0), 1.0)


def ks_two_sample_2d(
    a: np.ndarray,
    b: np.ndarray,
    level: float = 0.01,
    name: str = "ks-two-sample-2d",
) -> TestReport:
    """Two-sample quadrant KS test for paired data.

    Statistic per Fasano & Franceschini (max quadrant discrepancy over both
    samples' points); significance via the correlation-adjusted effective-lambda
    approximation, accurate enough at the >= 1e3 sample sizes used here.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != 2 or b.shape[1] != 2:
        raise ConfigError("2-D KS needs (n, 2) arrays")
    n, m = a.shape[0], b.shape[0]
    d = max(_quadrant_statistic(a, a, b), _quadrant_statistic(b, a, b))
    n_eff = n * m / (n + m)
    r2 = 0.0
    for sample in (a, b):
        if np.ptp(sample[:, 0]) > 0 and np.ptp(sample[:, 1]) > 0:
            r2 += float(np.corrcoef(sample[:, 0], sample[:, 1])[0, 1]) ** 2 / 2.0
    adjust = 1.0 + math.sqrt(max(1.0 - r2, 0.0)) * (0.25 - 0.75 / math.sqrt(n_eff))
    lam = math.sqrt(n_eff) * d / adjust
    p_value = _ks_tail_probability(lam)
    # invert the approximation for a reportable critical distance
    lo, hi = 0.0, 10.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _ks_tail_probability(mid) > level:
            lo = mid
        else:
            hi = mid
    threshold = hi * adjust / math.sqrt(n_eff)
    return TestReport(
        name=name,
        statistic=d,
        threshold=threshold,
        n_samples=min(n, m),
        passed=d <= threshold,
        notes=f"p~{p_value:.4f}",
    )
