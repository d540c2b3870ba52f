"""Executable models: transportation, twin itineraries, Doppler ratio,
maximum-benefit paths and the technology-matrix economy."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from ecokin._backend import kernels
from ecokin.kinematics import (
    QUANTITY_LIKE,
    Event,
    Worldline,
    bondi_factor,
    interval,
    proper_quantity,
    segment_between,
)


class InfeasibleError(ValueError):
    """A scenario's economic constraints cannot be met."""


# -- transportation ----------------------------------------------------------


@dataclass(frozen=True)
class TransportParams:
    S0: float
    k_t: float
    l_AB: float
    n_A: float = 1.0
    step: float | None = None

    def __post_init__(self):
        for name in ("S0", "k_t", "n_A"):
            x = getattr(self, name)
            if not (math.isfinite(x) and x > 0):
                raise ValueError(f"{name} must be positive, got {x!r}")
        if not (math.isfinite(self.l_AB) and self.l_AB >= 0):
            raise ValueError(f"l_AB must be non-negative, got {self.l_AB!r}")
        if self.step is not None:
            if not (math.isfinite(self.step) and self.step > 0):
                raise ValueError(f"step must be positive, got {self.step!r}")
            if self.l_AB > 0 and self.step > self.l_AB:
                raise ValueError(f"step {self.step} exceeds route length {self.l_AB}")

    @property
    def rate(self) -> float:
        return self.k_t / self.S0


@dataclass(frozen=True)
class TransportReport:
    n_B: float
    A_min: float
    A_max: float
    A0: float
    econ_distance: float
    c_econ: float
    n_B_closed_form: float
    profile_x: np.ndarray = field(repr=False, compare=False, default=None)
    profile_n: np.ndarray = field(repr=False, compare=False, default=None)

    @property
    def rel_error(self) -> float:
        return abs(self.n_B - self.n_B_closed_form) / self.n_B_closed_form


def simulate_transport(p: TransportParams) -> TransportReport:
    """Integrate d(ln n)/dx = k_t/S0 along the route with fixed-step RK4.

    The quantity equivalent to the reference item at the co-located exchange
    is ``n_A``. When the buyer pays for transport the price in bread is the
    integrated ratio times ``n_A`` (``A_max``); when the seller pays it is
    divided by it (``A_min``); the compromise is their geometric mean.
    """
    rate = p.rate
    if p.l_AB == 0:
        xs = np.zeros(1)
        ns = np.array([p.n_A])
        n_B = p.n_A
    else:
        step = p.step if p.step is not None else p.l_AB / 1000.0
        nsteps = max(1, math.ceil(p.l_AB / step - 1e-9))
        h = p.l_AB / nsteps
        ns = np.empty(nsteps + 1)
        n_B = float(kernels.rk4_growth(p.n_A, rate, h, nsteps, ns))
        xs = np.linspace(0.0, p.l_AB, nsteps + 1)
    ratio = n_B / p.n_A
    a_max = p.n_A * ratio
    a_min = p.n_A / ratio
    return TransportReport(
        n_B=n_B,
        A_min=a_min,
        A_max=a_max,
        A0=math.sqrt(a_min * a_max),
        econ_distance=0.5 * (math.log(a_max) - math.log(a_min)),
        c_econ=p.S0 / p.k_t,
        n_B_closed_form=p.n_A * math.exp(rate * p.l_AB),
        profile_x=xs,
        profile_n=ns,
    )


def speed_limit_check(quality_per_logquantity: float, c_econ: float) -> bool:
    """True if quality can change this fast per unit log-volume.

    The limit itself is infeasible: transport would consume the whole cargo.
    """
    if not c_econ > 0:
        raise ValueError(f"c_econ must be positive, got {c_econ!r}")
    return abs(quality_per_logquantity) < c_econ


# -- twin itineraries --------------------------------------------------------


@dataclass(frozen=True)
class TwinItinerary:
    legs: tuple

    def __post_init__(self):
        legs = tuple((float(v), float(d)) for v, d in self.legs)
        if not legs:
            raise ValueError("itinerary needs at least one leg")
        for v, d in legs:
            if not abs(v) < 1:
                raise ValueError(f"leg velocity must satisfy |v| < 1, got {v}")
            if not d > 0:
                raise ValueError(f"leg duration must be positive, got {d}")
        object.__setattr__(self, "legs", legs)

    def worldline(self, base: Event = Event(0.0, 0.0)) -> Worldline:
        return Worldline(base, self.legs)


@dataclass(frozen=True)
class TwinReport:
    home: float
    traveler: float
    lag: float
    separation: float
    max_separation: float


def simulate_twin(it: TwinItinerary, closure_tol: float = 1e-9) -> TwinReport:
    home = math.fsum(d for _, d in it.legs)
    sep = math.fsum(v * d for v, d in it.legs)
    scale = math.fsum(abs(v) * d for v, d in it.legs)
    if abs(sep) > closure_tol * max(1.0, scale):
        raise InfeasibleError(f"itinerary does not return: net quality separation {sep!r}")
    traveler = proper_quantity(it.legs)
    widest = 0.0
    acc = 0.0
    for v, d in it.legs:
        acc += v * d
        widest = max(widest, abs(acc))
    return TwinReport(home, traveler, traveler / home, sep, widest)


def doppler_ratio(v: float) -> float:
    """One-way scale ratio sqrt((1+v)/(1-v)) between two relatively moving objects."""
    return bondi_factor(v)


# -- maximum benefit ---------------------------------------------------------


def max_benefit_path(a: Event, b: Event) -> Worldline:
    """Worldline from ``a`` to ``b`` with the largest proper quantity: a straight segment."""
    res = interval(b, a)
    if res.classification != QUANTITY_LIKE or not b.tau > a.tau:
        raise InfeasibleError(f"no quantity-like path from {a} to {b} ({res.classification})")
    return segment_between(a, b)


# -- technology-matrix economy -----------------------------------------------


def _as_matrix(K) -> np.ndarray:
    K = np.array(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1] or K.shape[0] < 2:
        raise ValueError(f"technology matrix must be square with m >= 2, got shape {K.shape}")
    if not np.all(np.isfinite(K)) or np.any(K < 0):
        raise ValueError("technology matrix entries must be finite and non-negative")
    return K


def is_irreducible(K) -> bool:
    K = _as_matrix(K)
    ncomp, _ = connected_components(K != 0, directed=True, connection="strong")
    return ncomp == 1


def balanced_state(K, tol: float = 1e-12, maxiter: int = 100_000):
    """Dominant eigenvalue and unit-sum Perron vector of ``K``."""
    K = _as_matrix(K)
    if not is_irreducible(K):
        raise ValueError("technology matrix is reducible (or zero); no unique balanced state")
    x = np.full(K.shape[0], 1.0 / K.shape[0])
    lam, _, res = kernels.power_iteration(np.ascontiguousarray(K), x, tol, maxiter)
    if res > tol:
        raise ArithmeticError(f"power iteration stalled at residual {res:.3e}")
    return float(lam), x


@dataclass
class EconomyState:
    cycle: int
    outputs: np.ndarray
    shipments: np.ndarray
    proportions: dict
    volume: float
    econ_time: float
    collapsed: bool = False


@dataclass
class EconomyTrajectory:
    states: list
    collapsed: bool
    collapse_cycle: int | None = None

    def volumes(self) -> np.ndarray:
        return np.array([s.volume for s in self.states])


def _exchange(K: np.ndarray, x: np.ndarray):
    """Clear one cycle's exchange.

    Company i receives ``K[i, j] * x[j]`` of product j for its next cycle and
    keeps ``K[i, i] * x[i]`` of its own. The bilateral proportion for a pair
    (i, j) is units of j received per unit of i delivered.
    """
    ship = K * x[np.newaxis, :]
    m = len(x)
    props = {}
    for i in range(m):
        for j in range(i + 1, m):
            if ship[i, j] > 0 and ship[j, i] > 0:
                props[(i, j)] = ship[i, j] / ship[j, i]
    volume = float(ship.sum() - np.trace(ship))
    return ship, props, volume


def simulate_economy(K, init, cycles: int) -> EconomyTrajectory:
    """Run the production/exchange cycle ``cycles`` times.

    Each cycle the shipments of the current outputs clear between companies
    and production yields ``K @ x``. A non-positive stock marks collapse and
    ends the trajectory.
    """
    K = _as_matrix(K)
    x = np.array(init, dtype=float)
    if x.shape != (K.shape[0],):
        raise ValueError(f"initial outputs must have length {K.shape[0]}")
    if not np.all(np.isfinite(x)) or np.any(x < 0) or not np.any(x > 0):
        raise ValueError("initial outputs must be finite, non-negative and not all zero")
    if int(cycles) < 1:
        raise ValueError("cycles must be >= 1")
    states = []
    for c in range(int(cycles) + 1):
        if np.any(x <= 0):
            states.append(EconomyState(c, x.copy(), np.zeros_like(K), {}, 0.0, -math.inf, True))
            return EconomyTrajectory(states, True, c)
        ship, props, volume = _exchange(K, x)
        t = math.log2(volume) if volume > 0 else -math.inf
        states.append(EconomyState(c, x.copy(), ship, props, volume, t))
        if c < cycles:
            x = K @ x
    return EconomyTrajectory(states, False)


def direction(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x / x.sum()
