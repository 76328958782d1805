"""Jump-measure specifications and the tail/moment functionals built on them.

A jump measure is declared, never handed over as an opaque density callback,
so that tails, windowed moments and conditional samplers can be validated,
serialized, and cross-checked against quadrature. Three kinds are supported:

* :class:`Atoms` -- finitely many weighted atoms,
* :class:`PowerLaw` -- per-side power densities ``c |x|^(-1-alpha) e^(-lam|x|)``
  above a support floor,
* :class:`DensityTable` -- per-side piecewise-constant densities with compact
  support.

On top of the measure primitives this module provides the upper/lower tail
functions, their sum and difference, the truncated first and second moments,
the overall mean (as an explicit tri-state, never an exception), and the
drift criterion ratio. Windowed moments use half-open windows ``(a, b]`` in
``|x|``; tails are open, ``tail_plus(x) = mass of (x, inf)``.

Everything here is immutable after construction and safe to evaluate from
many threads concurrently.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Literal

import numpy as np
from scipy import integrate

from .errors import ConfigError, NumericError
from .sampling import AliasSampler, ParetoWindowSampler, TemperedWindowSampler, WindowSampler

__all__ = [
    "Atoms",
    "DensityTable",
    "FirstMoment",
    "LevyTriplet",
    "Measure",
    "PowerSideParams",
    "PowerLaw",
    "SideTable",
    "TailReport",
    "TAIL_CSV_HEADER",
    "criterion_ratio",
    "first_moment",
    "geometric_grid",
    "measure_from_dict",
    "scale_triplet",
    "tail_minus",
    "tail_plus",
    "tail_report",
    "tail_sum_diff",
    "truncated_mean",
    "truncated_second_moment",
    "window_moment",
]

QUAD_EPSABS = 1e-10
QUAD_EPSREL = 1e-8

Side = Literal["plus", "minus"]


def _quad(fn: Callable[[float], float], a: float, b: float, breakpoints=()) -> float:
    """Adaptive Gauss-Kronrod integral with panel splits at known kinks.

    Raises :class:`NumericError` naming the offending interval when the
    estimated error is out of tolerance.
    """
    if b <= a:
        return 0.0
    pts = sorted(p for p in set(breakpoints) if a < p < b)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if math.isinf(b):
                total = 0.0
                lo = a
                for p in pts:
                    total += _quad(fn, lo, p)
                    lo = p
                val, err = integrate.quad(
                    fn, lo, np.inf, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200
                )
                _check_quad(val, err, lo, b)
                return total + val
            val, err = integrate.quad(
                fn, a, b, points=pts or None, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200
            )
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"quadrature did not converge on [{a:g}, {b:g}]: {exc}") from exc
    _check_quad(val, err, a, b)
    return val


def _check_quad(val: float, err: float, a: float, b: float) -> None:
    if err > 100.0 * max(QUAD_EPSABS, abs(val) * QUAD_EPSREL):
        raise NumericError(
            f"quadrature error {err:.3g} out of tolerance on [{a:g}, {b:g}] (value {val:.6g})"
        )


# ---------------------------------------------------------------------------
# Per-side building blocks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerSideParams:
    """One-sided power intensity ``c u^(-1-alpha) e^(-lam u)`` for ``u > x_min``.

    ``u`` is the jump magnitude on that side. ``alpha < 2`` is required only
    when the support floor is 0, where square-integrability near the origin
    forces it; with a positive floor any ``alpha > 0`` is admissible.
    """

    c: float = 0.0
    alpha: float = 1.0
    lam: float = 0.0
    x_min: float = 0.0

    def __post_init__(self):
        if self.c < 0:
            raise ConfigError("power-law intensity c must be >= 0")
        if self.c > 0:
            if self.alpha <= 0:
                raise ConfigError("power-law index alpha must be > 0")
            if self.x_min == 0 and self.alpha >= 2:
                raise ConfigError(
                    "power-law index alpha must be < 2 when x_min = 0 "
                    "(square-integrability of x^2 near the origin)"
                )
            if self.lam < 0:
                raise ConfigError("tempering lam must be >= 0")
            if self.x_min < 0:
                raise ConfigError("support floor x_min must be >= 0")

    def density(self, u: float) -> float:
        if self.c == 0 or u <= self.x_min or u <= 0:
            return 0.0
        return self.c * u ** (-1.0 - self.alpha) * math.exp(-self.lam * u)

    def mom(self, k: int, a: float, b: float) -> float:
        """``integral of u^k`` over the window ``(a, b]`` of this side; may be inf."""
        if self.c == 0:
            return 0.0
        lo = max(a, self.x_min)
        if b <= lo:
            return 0.0
        if self.lam == 0.0:
            return self._mom_pure(k, lo, b)
        if lo == 0.0:
            # integrand ~ u^(k-1-alpha) at 0; tempering does not help there
            if k <= self.alpha:
                return math.inf
            split = min(1.0, b)
            head, err = integrate.quad(
                lambda u: self.c * math.exp(-self.lam * u),
                0.0,
                split,
                weight="alg",
                wvar=(k - 1.0 - self.alpha, 0.0),
                epsabs=QUAD_EPSABS,
                epsrel=QUAD_EPSREL,
            )
            _check_quad(head, err, 0.0, split)
            return head + _quad(lambda u: u**k * self.density(u), split, b)
        return _quad(lambda u: u**k * self.density(u), lo, b)

    def _mom_pure(self, k: int, lo: float, b: float) -> float:
        # untempered: c * integral of u^(k-1-alpha) over [lo, b]
        p = k - self.alpha
        if lo == 0.0:
            if p <= 0:
                return math.inf
            lo_term = 0.0
        else:
            lo_term = math.log(lo) if p == 0 else lo**p / p
        if math.isinf(b):
            if p >= 0:
                return math.inf
            return -self.c * lo_term
        hi_term = math.log(b) if p == 0 else b**p / p
        return self.c * (hi_term - lo_term)

    def sampler(self, a: float, b: float) -> WindowSampler:
        lo = max(a, self.x_min)
        if lo <= 0:
            raise ConfigError("cannot sample a power-law side down to magnitude 0")
        if self.lam == 0.0:
            return ParetoWindowSampler(self.alpha, lo, b)
        return TemperedWindowSampler(self.alpha, self.lam, lo, b)

    def kinks(self) -> tuple[float, ...]:
        return (self.x_min,) if self.c > 0 and self.x_min > 0 else ()

    def support_sup(self) -> float:
        return math.inf if self.c > 0 else 0.0

    def scaled(self, k: float) -> "PowerSideParams":
        """Side parameters of the image measure under magnitudes ``u -> k u``."""
        if self.c == 0:
            return self
        return PowerSideParams(
            c=self.c * k**self.alpha, alpha=self.alpha, lam=self.lam / k, x_min=self.x_min * k
        )

    def to_dict(self) -> dict:
        return {"c": self.c, "alpha": self.alpha, "lam": self.lam, "x_min": self.x_min}


@dataclass(frozen=True)
class SideTable:
    """Piecewise-constant one-sided density: ``densities[i]`` on ``(edges[i], edges[i+1]]``."""

    edges: tuple[float, ...]
    densities: tuple[float, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.densities) + 1 or len(self.densities) == 0:
            raise ConfigError("table side needs len(edges) == len(densities) + 1 >= 2")
        e = np.asarray(self.edges, dtype=float)
        if e[0] < 0 or np.any(np.diff(e) <= 0):
            raise ConfigError("table abscissae must be nonnegative and strictly increasing")
        if any(d < 0 or not math.isfinite(d) for d in self.densities):
            raise ConfigError("table density values must be finite and nonnegative")

    @cached_property
    def _edges(self) -> np.ndarray:
        return np.asarray(self.edges, dtype=float)

    @cached_property
    def _dens(self) -> np.ndarray:
        return np.asarray(self.densities, dtype=float)

    def density(self, u: float) -> float:
        e = self._edges
        if u <= e[0] or u > e[-1]:
            return 0.0
        return float(self._dens[np.searchsorted(e, u, side="left") - 1])

    def mom(self, k: int, a: float, b: float) -> float:
        e, d = self._edges, self._dens
        lo = np.maximum(e[:-1], a)
        hi = np.minimum(e[1:], min(b, e[-1]) if math.isfinite(b) else e[-1])
        width_ok = hi > lo
        if not np.any(width_ok):
            return 0.0
        p = k + 1
        return float(np.sum(d[width_ok] * (hi[width_ok] ** p - lo[width_ok] ** p) / p))

    def sampler(self, a: float, b: float) -> WindowSampler:
        e, d = self._edges, self._dens
        lo = np.maximum(e[:-1], a)
        hi = np.minimum(e[1:], min(b, e[-1]) if math.isfinite(b) else e[-1])
        keep = (hi > lo) & (d > 0)
        if not np.any(keep):
            raise ConfigError("table window has no mass to sample")
        return _TableWindowSampler(lo[keep], hi[keep], d[keep])

    def kinks(self) -> tuple[float, ...]:
        return self.edges

    def support_sup(self) -> float:
        pos = self._dens > 0
        return float(self._edges[1:][pos].max()) if np.any(pos) else 0.0

    def scaled(self, k: float) -> "SideTable":
        return SideTable(
            edges=tuple(k * x for x in self.edges),
            densities=tuple(d / k for d in self.densities),
        )

    def to_dict(self) -> dict:
        return {"edges": list(self.edges), "densities": list(self.densities)}


class _TableWindowSampler:
    """Cell via an alias table, then uniform within the clipped cell."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, dens: np.ndarray):
        self._lo, self._hi = lo, hi
        self._alias = AliasSampler(dens * (hi - lo))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        cell = self._alias.sample(rng, size)
        u = rng.random(size)
        return self._lo[cell] + u * (self._hi[cell] - self._lo[cell])


# ---------------------------------------------------------------------------
# Measure kinds
# ---------------------------------------------------------------------------


class Measure:
    """Common interface of the three jump-measure kinds.

    Subclasses implement the per-side primitives ``mom_plus`` / ``mom_minus``
    (windowed absolute moments over ``(a, b]``), point masses, breakpoints,
    side samplers, and the optional per-side density used for quadrature
    cross-checks. Everything else in this module derives from those.
    """

    kind: str = ""

    # -- per-side primitives -------------------------------------------------
    def mom_plus(self, k: int, a: float, b: float) -> float:
        raise NotImplementedError

    def mom_minus(self, k: int, a: float, b: float) -> float:
        raise NotImplementedError

    def point_mass(self, x: float) -> float:
        return 0.0

    def breakpoints_plus(self) -> tuple[float, ...]:
        return ()

    def breakpoints_minus(self) -> tuple[float, ...]:
        return ()

    def sampler_plus(self, a: float, b: float) -> WindowSampler:
        raise NotImplementedError

    def sampler_minus(self, a: float, b: float) -> WindowSampler:
        raise NotImplementedError

    def density_plus(self, u: float) -> float | None:
        return None

    def density_minus(self, u: float) -> float | None:
        return None

    def support_sup_plus(self) -> float:
        raise NotImplementedError

    def support_sup_minus(self) -> float:
        raise NotImplementedError

    # -- derived -------------------------------------------------------------
    def tail_plus(self, x: float) -> float:
        """Mass of ``(x, inf)``; ``x = 0`` gives the (possibly infinite) side mass."""
        return self.mom_plus(0, x, math.inf)

    def tail_minus(self, x: float) -> float:
        """Mass of ``(-inf, -x)``."""
        return self.mom_minus(0, x, math.inf)

    def total_mass(self) -> float:
        return self.tail_plus(0.0) + self.tail_minus(0.0)

    def _validate_common(self) -> None:
        if self.total_mass() <= 0:
            raise ConfigError("jump measure must have positive total mass")
        if not math.isfinite(self.mom_plus(2, 0.0, 1.0) + self.mom_minus(2, 0.0, 1.0)):
            raise ConfigError("x^2 must be integrable near the origin")

    def to_dict(self) -> dict:
        raise NotImplementedError

    def scaled(self, k: float) -> "Measure":
        """Image measure under ``x -> k x`` (k > 0)."""
        raise NotImplementedError


@dataclass(frozen=True)
class Atoms(Measure):
    """Finitely many atoms ``(position != 0, rate > 0)``."""

    atoms: tuple[tuple[float, float], ...]
    kind = "atoms"

    def __post_init__(self):
        if not self.atoms:
            raise ConfigError("atoms measure needs at least one atom")
        for pos, rate in self.atoms:
            if pos == 0 or not math.isfinite(pos):
                raise ConfigError("atom positions must be finite and nonzero")
            if rate <= 0 or not math.isfinite(rate):
                raise ConfigError("atom rates must be finite and positive")
        self._validate_common()

    @cached_property
    def _pos(self) -> np.ndarray:
        return np.asarray([p for p, _ in self.atoms], dtype=float)

    @cached_property
    def _rate(self) -> np.ndarray:
        return np.asarray([r for _, r in self.atoms], dtype=float)

    def _side_mom(self, sign: int, k: int, a: float, b: float) -> float:
        u = sign * self._pos
        keep = (u > a) & (u <= b) if math.isfinite(b) else (u > a)
        keep &= u > 0
        return float(np.sum(self._rate[keep] * u[keep] ** k))

    def mom_plus(self, k, a, b):
        return self._side_mom(1, k, a, b)

    def mom_minus(self, k, a, b):
        return self._side_mom(-1, k, a, b)

    def point_mass(self, x: float) -> float:
        return float(self._rate[self._pos == x].sum())

    def breakpoints_plus(self):
        return tuple(sorted(p for p, _ in self.atoms if p > 0))

    def breakpoints_minus(self):
        return tuple(sorted(-p for p, _ in self.atoms if p < 0))

    def _side_sampler(self, sign: int, a: float, b: float) -> WindowSampler:
        u = sign * self._pos
        keep = (u > a) & (u <= b) & (u > 0)
        if not np.any(keep):
            raise ConfigError("no atoms in the requested window")
        return _AtomWindowSampler(u[keep], self._rate[keep])

    def sampler_plus(self, a, b):
        return self._side_sampler(1, a, b)

    def sampler_minus(self, a, b):
        return self._side_sampler(-1, a, b)

    def support_sup_plus(self):
        up = self._pos[self._pos > 0]
        return float(up.max()) if up.size else 0.0

    def support_sup_minus(self):
        dn = -self._pos[self._pos < 0]
        return float(dn.max()) if dn.size else 0.0

    def scaled(self, k: float) -> "Atoms":
        return Atoms(tuple((k * p, r) for p, r in self.atoms))

    def to_dict(self) -> dict:
        return {
            "kind": "atoms",
            "atoms": [{"position": p, "rate": r} for p, r in self.atoms],
        }


class _AtomWindowSampler:
    def __init__(self, values: np.ndarray, rates: np.ndarray):
        self._values = values
        self._alias = AliasSampler(rates)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return self._values[self._alias.sample(rng, size)]


@dataclass(frozen=True)
class PowerLaw(Measure):
    """Per-side power densities; either side may be switched off with c = 0."""

    plus: PowerSideParams = PowerSideParams()
    minus: PowerSideParams = PowerSideParams()
    kind = "power"

    def __post_init__(self):
        if self.plus.c == 0 and self.minus.c == 0:
            raise ConfigError("power measure needs positive intensity on at least one side")
        self._validate_common()

    def mom_plus(self, k, a, b):
        return self.plus.mom(k, a, b)

    def mom_minus(self, k, a, b):
        return self.minus.mom(k, a, b)

    def breakpoints_plus(self):
        return self.plus.kinks()

    def breakpoints_minus(self):
        return self.minus.kinks()

    def sampler_plus(self, a, b):
        return self.plus.sampler(a, b)

    def sampler_minus(self, a, b):
        return self.minus.sampler(a, b)

    def density_plus(self, u):
        return self.plus.density(u)

    def density_minus(self, u):
        return self.minus.density(u)

    def support_sup_plus(self):
        return self.plus.support_sup()

    def support_sup_minus(self):
        return self.minus.support_sup()

    def scaled(self, k: float) -> "PowerLaw":
        return PowerLaw(plus=self.plus.scaled(k), minus=self.minus.scaled(k))

    def to_dict(self) -> dict:
        return {"kind": "power", "plus": self.plus.to_dict(), "minus": self.minus.to_dict()}


@dataclass(frozen=True)
class DensityTable(Measure):
    """Per-side piecewise-constant densities with compact support."""

    plus: SideTable | None = None
    minus: SideTable | None = None
    kind = "table"

    def __post_init__(self):
        if self.plus is None and self.minus is None:
            raise ConfigError("table measure needs at least one side")
        self._validate_common()

    def mom_plus(self, k, a, b):
        return self.plus.mom(k, a, b) if self.plus else 0.0

    def mom_minus(self, k, a, b):
        return self.minus.mom(k, a, b) if self.minus else 0.0

    def breakpoints_plus(self):
        return self.plus.kinks() if self.plus else ()

    def breakpoints_minus(self):
        return self.minus.kinks() if self.minus else ()

    def sampler_plus(self, a, b):
        if self.plus is None:
            raise ConfigError("no positive side in this table measure")
        return self.plus.sampler(a, b)

    def sampler_minus(self, a, b):
        if self.minus is None:
            raise ConfigError("no negative side in this table measure")
        return self.minus.sampler(a, b)

    def density_plus(self, u):
        return self.plus.density(u) if self.plus else 0.0

    def density_minus(self, u):
        return self.minus.density(u) if self.minus else 0.0

    def support_sup_plus(self):
        return self.plus.support_sup() if self.plus else 0.0

    def support_sup_minus(self):
        return self.minus.support_sup() if self.minus else 0.0

    def scaled(self, k: float) -> "DensityTable":
        return DensityTable(
            plus=self.plus.scaled(k) if self.plus else None,
            minus=self.minus.scaled(k) if self.minus else None,
        )

    def to_dict(self) -> dict:
        out: dict = {"kind": "table"}
        if self.plus:
            out["plus"] = self.plus.to_dict()
        if self.minus:
            out["minus"] = self.minus.to_dict()
        return out


def measure_from_dict(d: dict, path: str = "measure") -> Measure:
    """Build a measure from its canonical dict form; errors name the key path."""
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError(f"{path}.kind: missing measure kind")
    kind = d["kind"]
    try:
        if kind == "atoms":
            entries = d.get("atoms")
            if not isinstance(entries, list) or not entries:
                raise ConfigError(f"{path}.atoms: need a nonempty list")
            atoms = []
            for i, e in enumerate(entries):
                if not isinstance(e, dict) or "position" not in e or "rate" not in e:
                    raise ConfigError(f"{path}.atoms[{i}]: need position and rate")
                atoms.append((float(e["position"]), float(e["rate"])))
            return Atoms(tuple(atoms))
        if kind == "power":
            def side(key: str) -> PowerSideParams:
                s = d.get(key)
                if s is None:
                    return PowerSideParams(c=0.0)
                return PowerSideParams(
                    c=float(s.get("c", 0.0)),
                    alpha=float(s.get("alpha", 1.0)),
                    lam=float(s.get("lam", 0.0)),
                    x_min=float(s.get("x_min", 0.0)),
                )
            return PowerLaw(plus=side("plus"), minus=side("minus"))
        if kind == "table":
            def tside(key: str) -> SideTable | None:
                s = d.get(key)
                if s is None:
                    return None
                if "edges" not in s or "densities" not in s:
                    raise ConfigError(f"{path}.{key}: need edges and densities")
                return SideTable(
                    edges=tuple(float(v) for v in s["edges"]),
                    densities=tuple(float(v) for v in s["densities"]),
                )
            return DensityTable(plus=tside("plus"), minus=tside("minus"))
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    raise ConfigError(f"{path}.kind: unknown measure kind {kind!r}")


# ---------------------------------------------------------------------------
# Triplet and derived functionals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevyTriplet:
    """Process characteristics: linear coefficient, Brownian variance, jump measure.

    The linear coefficient uses the convention in which jumps of magnitude
    at most 1 are compensated and larger ones enter raw.
    """

    gamma: float
    sigma2: float
    measure: Measure

    def __post_init__(self):
        if self.sigma2 < 0 or not math.isfinite(self.sigma2):
            raise ConfigError("sigma2 must be finite and >= 0")
        if not math.isfinite(self.gamma):
            raise ConfigError("gamma must be finite")

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "sigma2": self.sigma2, "measure": self.measure.to_dict()}

    @classmethod
    def from_dict(cls, d: dict, path: str = "triplet") -> "LevyTriplet":
        for key in ("gamma", "sigma2", "measure"):
            if key not in d:
                raise ConfigError(f"{path}.{key}: missing")
        return cls(
            gamma=float(d["gamma"]),
            sigma2=float(d["sigma2"]),
            measure=measure_from_dict(d["measure"], f"{path}.measure"),
        )


@dataclass(frozen=True)
class FirstMoment:
    """Tri-state overall mean: finite value, one-sided divergence, or undefined.

    ``value`` is the mean when both one-sided integrals are finite, ``+inf``
    or ``-inf`` when exactly one diverges, and ``nan`` when both do.
    Undefinedness is a value here, never an exception.
    """

    value: float
    plus_finite: bool
    minus_finite: bool

    @property
    def finite(self) -> bool:
        return self.plus_finite and self.minus_finite

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "plus_finite": self.plus_finite,
            "minus_finite": self.minus_finite,
        }


def tail_plus(measure: Measure, x: float) -> float:
    """Upper tail: mass of ``(x, inf)``, x > 0."""
    _require_positive(x)
    return measure.tail_plus(x)


def tail_minus(measure: Measure, x: float) -> float:
    """Lower tail: mass of ``(-inf, -x)``, x > 0."""
    _require_positive(x)
    return measure.tail_minus(x)


def tail_sum_diff(measure: Measure, x: float) -> tuple[float, float]:
    """Tail sum and difference ``(plus + minus, plus - minus)`` at x > 0."""
    _require_positive(x)
    n = measure.tail_plus(x)
    m = measure.tail_minus(x)
    return n + m, n - m


def window_moment(measure: Measure, k: int, a: float, b: float) -> float:
    """Signed ``integral of x^k`` over ``a < |x| <= b``; may be +-inf."""
    pos = measure.mom_plus(k, a, b)
    neg = measure.mom_minus(k, a, b)
    return pos + neg if k % 2 == 0 else pos - neg


def _tail_integral(measure: Measure, side: Side, a: float, b: float) -> float:
    """``integral of tail(y) dy`` over [a, b], 0 < a <= b, via windowed moments.

    Uses the layer-cake identity: the integral equals
    ``mom(1, a, b) - a mom(0, a, b) + (b - a) tail(b)``.
    """
    mom = measure.mom_plus if side == "plus" else measure.mom_minus
    return mom(1, a, b) - a * mom(0, a, b) + (b - a) * mom(0, b, math.inf)


def truncated_mean(triplet: LevyTriplet, x: float) -> float:
    """Truncated first moment: ``gamma + D(1) + integral of D over [1, x]``.

    Inputs ``x < 1`` are allowed via the signed-integral convention
    (the integral runs backwards).
    """
    _require_positive(x)
    m = triplet.measure
    d1 = m.tail_plus(1.0) - m.tail_minus(1.0)
    lo, hi, sign = (1.0, x, 1.0) if x >= 1.0 else (x, 1.0, -1.0)
    body = _tail_integral(m, "plus", lo, hi) - _tail_integral(m, "minus", lo, hi)
    return triplet.gamma + d1 + sign * body


def truncated_second_moment(triplet: LevyTriplet, x: float) -> float:
    """Truncated second moment: ``sigma2 + 2 integral of y (N + M)(y) dy`` over [0, x]."""
    _require_positive(x)
    m = triplet.measure
    inner = m.mom_plus(2, 0.0, x) + m.mom_minus(2, 0.0, x)
    tail = m.mom_plus(0, x, math.inf) + m.mom_minus(0, x, math.inf)
    return triplet.sigma2 + inner + x * x * tail


def first_moment(triplet: LevyTriplet) -> FirstMoment:
    """Overall mean ``gamma + integral of x over |x| > 1`` as a tri-state."""
    plus = triplet.measure.mom_plus(1, 1.0, math.inf)
    minus = triplet.measure.mom_minus(1, 1.0, math.inf)
    pf, mf = math.isfinite(plus), math.isfinite(minus)
    if pf and mf:
        value = triplet.gamma + plus - minus
    elif pf:
        value = -math.inf
    elif mf:
        value = math.inf
    else:
        value = math.nan
    return FirstMoment(value=value, plus_finite=pf, minus_finite=mf)


def criterion_ratio(a: float, u: float, m: float) -> float:
    """Drift criterion ``A / sqrt(U M)`` with explicit division-by-zero markers.

    ``m = 0`` with ``a != 0`` yields a signed infinity; 0/0 yields nan.
    """
    denom = u * m
    if denom > 0:
        return a / math.sqrt(denom)
    if a == 0:
        return math.nan
    return math.copysign(math.inf, a)


TAIL_CSV_HEADER = "x,N,M,T,D,A,U,criterion"


@dataclass(frozen=True)
class TailReport:
    """Tails, truncated moments and the criterion ratio at one abscissa."""

    x: float
    n_plus: float
    m_minus: float
    t_sum: float
    d_diff: float
    a_trunc: float
    u_trunc: float
    criterion: float

    def csv_row(self) -> str:
        return ",".join(
            repr(float(v))
            for v in (
                self.x,
                self.n_plus,
                self.m_minus,
                self.t_sum,
                self.d_diff,
                self.a_trunc,
                self.u_trunc,
                self.criterion,
            )
        )

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "N": self.n_plus,
            "M": self.m_minus,
            "T": self.t_sum,
            "D": self.d_diff,
            "A": self.a_trunc,
            "U": self.u_trunc,
            "criterion": self.criterion,
        }


def tail_report(triplet: LevyTriplet, x: float) -> TailReport:
    """Evaluate every tail/moment functional at one abscissa."""
    _require_positive(x)
    n = triplet.measure.tail_plus(x)
    m = triplet.measure.tail_minus(x)
    a = truncated_mean(triplet, x)
    u = truncated_second_moment(triplet, x)
    return TailReport(
        x=x,
        n_plus=n,
        m_minus=m,
        t_sum=n + m,
        d_diff=n - m,
        a_trunc=a,
        u_trunc=u,
        criterion=criterion_ratio(a, u, m),
    )


def scale_triplet(triplet: LevyTriplet, k: float) -> LevyTriplet:
    """Characteristics of the spatially scaled process ``x -> k x`` (k > 0).

    The linear coefficient picks up the compensation window moved between
    magnitude 1 and magnitude k by the scaling.
    """
    if k <= 0:
        raise ConfigError("scale factor must be positive")
    scaled = triplet.measure.scaled(k)
    if k > 1:
        corr = -window_moment(scaled, 1, 1.0, k)
    elif k < 1:
        corr = window_moment(scaled, 1, k, 1.0)
    else:
        corr = 0.0
    return LevyTriplet(gamma=k * triplet.gamma + corr, sigma2=k * k * triplet.sigma2, measure=scaled)


def geometric_grid(start: float, stop: float, points: int) -> np.ndarray:
    """Geometric grid of evaluation abscissae."""
    if start <= 0 or stop <= start:
        raise ConfigError("grid needs 0 < start < stop")
    if points < 2:
        raise ConfigError("grid needs at least 2 points")
    return np.geomspace(start, stop, points)


def _require_positive(x: float) -> None:
    if not (x > 0) or not math.isfinite(x):
        raise ConfigError(f"abscissa must be positive and finite, got {x!r}")
