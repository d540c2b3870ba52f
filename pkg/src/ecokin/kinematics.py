"""Coordinates and transformations in the (quantity, quality) state plane.

Conventions used throughout:

* ``tau`` is the quantity coordinate (log2 of transaction volume), ``l`` the
  quality coordinate, both in the same logarithmic units with c = 1.
* Radar (null) coordinates are ``tau_min = tau - l`` and ``tau_max = tau + l``:
  the ideal-purchase and ideal-sale results.
* ``boost_event(e, v)`` maps coordinates measured by a frame moving at ``v``
  into the reference coordinates. A frame moving at ``v`` therefore sees a
  reference event at ``boost_event(e, -v)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ecokin._backend import kernels

QUANTITY_LIKE = "quantity-like"
QUALITY_LIKE = "quality-like"
NULL = "null"

NULL_TOL = 1e-12


def _check_velocity(v: float) -> float:
    v = float(v)
    if not math.isfinite(v) or abs(v) >= 1.0:
        raise ValueError(f"velocity must satisfy |v| < 1, got {v!r}")
    return v


@dataclass(frozen=True)
class Event:
    tau: float
    l: float

    def __post_init__(self):
        if not (math.isfinite(self.tau) and math.isfinite(self.l)):
            raise ValueError(f"event coordinates must be finite, got ({self.tau}, {self.l})")

    def __iter__(self):
        yield self.tau
        yield self.l

    def shifted(self, dtau: float = 0.0, dl: float = 0.0) -> "Event":
        return Event(self.tau + dtau, self.l + dl)


@dataclass(frozen=True)
class RadarPair:
    """Ideal-purchase / ideal-sale coordinates of an event.

    ``tau_max >= tau_min`` holds for events with non-negative quality; the
    pair is kept as plain null coordinates otherwise so that boosts stay linear.
    """

    tau_min: float
    tau_max: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.tau_min + self.tau_max)

    @property
    def half_width(self) -> float:
        return 0.5 * (self.tau_max - self.tau_min)


@dataclass(frozen=True)
class ConsumerFrame:
    """A set of consumer preferences: an inertial frame in the state plane."""

    v: float = 0.0
    origin: Event = field(default_factory=lambda: Event(0.0, 0.0))
    label: str = ""

    def __post_init__(self):
        _check_velocity(self.v)
        if not isinstance(self.origin, Event):
            object.__setattr__(self, "origin", Event(*self.origin))

    def coordinates(self, e: Event) -> Event:
        """Coordinates this frame assigns to a reference-frame event."""
        return boost_event(Event(e.tau - self.origin.tau, e.l - self.origin.l), -self.v)

    def valuation(self, e: Event) -> float:
        return self.coordinates(e).tau


@dataclass(frozen=True)
class Worldline:
    """Piecewise-inertial worldline.

    ``segments`` holds ``(v, dtau)`` pairs, ``dtau`` being the extent along
    the reference quantity axis. Outside the recorded range the line is
    continued inertially with the first / last segment velocity (v = 0 if
    there are no segments).
    """

    base: Event = field(default_factory=lambda: Event(0.0, 0.0))
    segments: tuple = ()

    def __post_init__(self):
        if not isinstance(self.base, Event):
            object.__setattr__(self, "base", Event(*self.base))
        segs = []
        for v, dtau in self.segments:
            v = _check_velocity(v)
            dtau = float(dtau)
            if not dtau > 0 or not math.isfinite(dtau):
                raise ValueError(f"segment extent must be positive and finite, got {dtau!r}")
            segs.append((v, dtau))
        object.__setattr__(self, "segments", tuple(segs))

    @property
    def end(self) -> Event:
        tau, l = self.base.tau, self.base.l
        for v, dtau in self.segments:
            tau += dtau
            l += v * dtau
        return Event(tau, l)

    def vertices(self) -> list:
        pts = [self.base]
        tau, l = self.base.tau, self.base.l
        for v, dtau in self.segments:
            tau += dtau
            l += v * dtau
            pts.append(Event(tau, l))
        return pts

    def at_proper(self, s: float) -> Event:
        """Event reached after proper quantity ``s`` from the base event.

        Negative ``s`` walks backwards along the first segment direction.
        """
        tau, l = self.base.tau, self.base.l
        if s < 0:
            v = self.segments[0][0] if self.segments else 0.0
            dtau = s / math.sqrt(1.0 - v * v)
            return Event(tau + dtau, l + v * dtau)
        remaining = s
        v = 0.0
        for v, dtau in self.segments:
            ds = dtau * math.sqrt(1.0 - v * v)
            if remaining <= ds:
                step = remaining / math.sqrt(1.0 - v * v)
                return Event(tau + step, l + v * step)
            remaining -= ds
            tau += dtau
            l += v * dtau
        step = remaining / math.sqrt(1.0 - v * v)
        return Event(tau + step, l + v * step)

    def concat(self, other: "Worldline") -> "Worldline":
        return Worldline(self.base, self.segments + tuple(other.segments))


@dataclass(frozen=True)
class IntervalResult:
    squared: float
    magnitude: float
    classification: str


def classify(squared: float, scale: float = 1.0) -> str:
    if abs(squared) <= NULL_TOL * max(1.0, scale):
        return NULL
    return QUANTITY_LIKE if squared > 0 else QUALITY_LIKE


def _result(squared: float, scale: float) -> IntervalResult:
    return IntervalResult(squared, math.sqrt(abs(squared)), classify(squared, scale))


# -- transformations ---------------------------------------------------------


def boost_event(e: Event, v: float) -> Event:
    """Lorentz boost: coordinates of a frame moving at ``v`` to reference ones."""
    v = _check_velocity(v)
    g = 1.0 / math.sqrt(1.0 - v * v)
    return Event((e.tau + v * e.l) * g, (e.l + v * e.tau) * g)


def boost_events(tau, l, v):
    """Vectorised ``boost_event`` over coordinate arrays."""
    v = _check_velocity(v)
    tau = np.ascontiguousarray(tau, dtype=float)
    l = np.ascontiguousarray(l, dtype=float)
    out_tau = np.empty_like(tau)
    out_l = np.empty_like(l)
    kernels.boost_many(tau, l, v, out_tau, out_l)
    return out_tau, out_l


def bondi_factor(v: float) -> float:
    """Textbook Bondi factor sqrt((1+v)/(1-v)), the radar scale factor."""
    v = _check_velocity(v)
    return math.sqrt((1.0 + v) / (1.0 - v))


def boost_radar(r: RadarPair, v: float) -> RadarPair:
    f = bondi_factor(v)
    return RadarPair(r.tau_min / f, r.tau_max * f)


def radar_map(e: Event) -> RadarPair:
    return RadarPair(e.tau - e.l, e.tau + e.l)


def from_radar(r: RadarPair, *, signed: bool = False) -> Event:
    """Inverse of ``radar_map``.

    Pairs with ``tau_max < tau_min`` belong to events with negative quality
    and are rejected unless ``signed=True``.
    """
    if r.tau_max < r.tau_min and not signed:
        raise ValueError(f"tau_max ({r.tau_max}) < tau_min ({r.tau_min})")
    return Event(0.5 * (r.tau_min + r.tau_max), 0.5 * (r.tau_max - r.tau_min))


def galilean_boost(e: Event, v: float) -> Event:
    """Classical limit: quantity is absolute, quality shears by ``v * tau``."""
    return Event(e.tau, e.l + float(v) * e.tau)


# -- velocities --------------------------------------------------------------


def k_factor(v: float) -> float:
    """Price-spread factor k = dtau_max/dtau_min = (1+v)/(1-v).

    This is the square of ``bondi_factor``.
    """
    v = _check_velocity(v)
    return (1.0 + v) / (1.0 - v)


def velocity_from_k(k: float) -> float:
    k = float(k)
    if not k > 0 or not math.isfinite(k):
        raise ValueError(f"k must be positive and finite, got {k!r}")
    return (k - 1.0) / (k + 1.0)


def compose_velocities(u: float, v: float) -> float:
    """Relativistic velocity addition through k-multiplicativity."""
    w = velocity_from_k(k_factor(u) * k_factor(v))
    # k products overflow to inf only for |u|, |v| within ~1e-308 of 1
    return max(-math.nextafter(1.0, 0.0), min(math.nextafter(1.0, 0.0), w))


# -- intervals ---------------------------------------------------------------


def interval_radar(a: RadarPair, b: RadarPair) -> float:
    """Squared interval from the product of radar differences."""
    return (a.tau_min - b.tau_min) * (a.tau_max - b.tau_max)


def interval(a: Event, b: Event) -> IntervalResult:
    dtau = a.tau - b.tau
    dl = a.l - b.l
    squared = dtau * dtau - dl * dl
    via_radar = interval_radar(radar_map(a), radar_map(b))
    scale = dtau * dtau + dl * dl
    if abs(squared - via_radar) > 1e-9 * max(1.0, scale):
        raise ArithmeticError(f"interval mismatch: {squared!r} vs {via_radar!r}")
    return _result(squared, scale)


def intervals(tau_a, l_a, tau_b, l_b):
    """Vectorised squared intervals."""
    arrs = [np.ascontiguousarray(x, dtype=float) for x in (tau_a, l_a, tau_b, l_b)]
    out = np.empty_like(arrs[0])
    kernels.interval_many(*arrs, out)
    return out


_LOGS = {2: math.log2, "2": math.log2, "e": math.log, math.e: math.log}


def log_fn(base):
    try:
        return _LOGS[base]
    except (KeyError, TypeError):
        pass
    b = float(base)
    if not b > 0 or b == 1.0:
        raise ValueError(f"invalid log base {base!r}")
    return lambda x: math.log(x) / math.log(b)


def interval_from_prices(c_a_min: float, c_a_max: float, c_b_min: float, c_b_max: float,
                         base=2) -> IntervalResult:
    """Economic interval from the extreme prices of two objects.

    The squared interval is log(C_Amin/C_Bmin) * log(C_Amax/C_Bmax) in the
    selected base (2 by default, ``"e"`` for natural logs).
    """
    prices = (c_a_min, c_a_max, c_b_min, c_b_max)
    for p in prices:
        if not (isinstance(p, (int, float, Fraction)) and math.isfinite(p) and p > 0):
            raise ValueError(f"prices must be positive, got {p!r}")
    log = log_fn(base)
    x = log(c_a_min / c_b_min)
    y = log(c_a_max / c_b_max)
    return _result(x * y, x * x + y * y)


# -- measurements ------------------------------------------------------------


def ideal_measure(obj_event: Event, frame: ConsumerFrame) -> RadarPair:
    """Ideal-purchase and ideal-sale results for an event seen by ``frame``."""
    return radar_map(frame.coordinates(obj_event))


def proper_quantity(w) -> float:
    """Proper quantity along a worldline (or a sequence of ``(v, dtau)``)."""
    segments = w.segments if isinstance(w, Worldline) else tuple(w)
    if not segments:
        return 0.0
    vs = np.array([_check_velocity(v) for v, _ in segments], dtype=float)
    dts = np.array([float(d) for _, d in segments], dtype=float)
    return float(kernels.proper_quantity(vs, dts))


def exchange_chain(ratios: Iterable) -> Fraction:
    """Compose exchange proportions along a chain of objects.

    Ratios are multiplied exactly; logs of the result add. An empty chain
    returns 1.
    """
    result = Fraction(1)
    for r in ratios:
        r = Fraction(r)
        if r <= 0:
            raise ValueError(f"exchange ratios must be positive, got {r}")
        result *= r
    return result


def segment_between(a: Event, b: Event) -> Worldline:
    """Single inertial segment joining ``a`` to a later event ``b``."""
    dtau = b.tau - a.tau
    if not dtau > 0:
        raise ValueError("segment needs tau_b > tau_a")
    return Worldline(a, (((b.l - a.l) / dtau, dtau),))


def polyline(points: Sequence[Event]) -> Worldline:
    segs = []
    for p, q in zip(points, points[1:]):
        dtau = q.tau - p.tau
        if not dtau > 0:
            raise ValueError("polyline vertices must increase in tau")
        segs.append(((q.l - p.l) / dtau, dtau))
    return Worldline(points[0], tuple(segs))
