"""Relativistic kinematics of pricing: consent algebra, consumer frames,
invariant economic intervals and scenario models."""
from ecokin._backend import BACKEND
from ecokin.algebra import (
    EconomicObject,
    Leaf,
    One,
    Product,
    Sum,
    Transaction,
    Verdict,
    Zero,
    canonicalize,
    consent,
    eval_expression,
    indistinguishable,
    leaf,
    partition_equivalents,
)
from ecokin.kinematics import (
    ConsumerFrame,
    Event,
    IntervalResult,
    RadarPair,
    Worldline,
    bondi_factor,
    boost_event,
    boost_radar,
    compose_velocities,
    exchange_chain,
    from_radar,
    galilean_boost,
    ideal_measure,
    interval,
    interval_from_prices,
    k_factor,
    proper_quantity,
    radar_map,
    velocity_from_k,
)
from ecokin.scenarios import (
    InfeasibleError,
    TransportParams,
    TwinItinerary,
    balanced_state,
    doppler_ratio,
    max_benefit_path,
    simulate_economy,
    simulate_transport,
    simulate_twin,
    speed_limit_check,
)

__version__ = "0.1.0"
