import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecokin.kinematics import (
    NULL,
    QUALITY_LIKE,
    QUANTITY_LIKE,
    ConsumerFrame,
    Event,
    RadarPair,
    Worldline,
    bondi_factor,
    boost_event,
    boost_events,
    boost_radar,
    compose_velocities,
    exchange_chain,
    from_radar,
    galilean_boost,
    ideal_measure,
    interval,
    interval_from_prices,
    interval_radar,
    intervals,
    k_factor,
    polyline,
    proper_quantity,
    radar_map,
    velocity_from_k,
)

velocities = st.floats(-0.99, 0.99)
coords = st.floats(-50, 50)
events = st.builds(Event, coords, coords)


def radar_path_boost(e, v):
    # oracle: null coordinates scale by the Bondi factor and its inverse
    f = math.sqrt((1 + v) / (1 - v))
    u, w = e.tau - e.l, e.tau + e.l
    u, w = u / f, w * f
    return Event((u + w) / 2, (w - u) / 2)


# -- boost_event ---------------------------------------------------------------


def test_identity_boost():
    assert boost_event(Event(1, 0), 0.0) == Event(1.0, 0.0)


def test_boost_example_matches_radar_oracle():
    e = boost_event(Event(1, 0), 0.6)
    o = radar_path_boost(Event(1, 0), 0.6)
    assert (e.tau, e.l) == pytest.approx((1.25, 0.75), abs=1e-15)
    assert (o.tau, o.l) == pytest.approx((1.25, 0.75), abs=1e-15)


def test_boost_preserves_unit_interval():
    a, b = boost_event(Event(0, 0), 0.6), boost_event(Event(1, 0), 0.6)
    assert interval(a, b).squared == pytest.approx(1.25**2 - 0.75**2, abs=1e-15)
    assert interval(a, b).squared == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("v", [1.0, -1.0, 1.5, math.nan])
def test_boost_rejects_superluminal(v):
    with pytest.raises(ValueError):
        boost_event(Event(0, 0), v)
    with pytest.raises(ValueError):
        boost_radar(RadarPair(1, 1), v)


@given(events, velocities)
def test_boost_inverse(e, v):
    back = boost_event(boost_event(e, v), -v)
    scale = 1 + abs(e.tau) + abs(e.l)
    assert back.tau == pytest.approx(e.tau, abs=1e-10 * scale)
    assert back.l == pytest.approx(e.l, abs=1e-10 * scale)


def test_vectorised_boost_matches_scalar(rng):
    tau, l = rng.normal(size=(2, 50))
    bt, bl = boost_events(tau, l, -0.3)
    for i in range(50):
        e = boost_event(Event(tau[i], l[i]), -0.3)
        assert (bt[i], bl[i]) == pytest.approx((e.tau, e.l), rel=1e-14, abs=1e-14)


# -- boost_radar / radar_map -----------------------------------------------------


def test_boost_radar_examples():
    assert boost_radar(RadarPair(1, 1), 0.0) == RadarPair(1.0, 1.0)
    r = boost_radar(RadarPair(1, 1), 0.6)
    assert (r.tau_min, r.tau_max) == pytest.approx((0.5, 2.0), abs=1e-15)


@given(st.floats(-10, 10), st.floats(-10, 10), velocities)
def test_boost_radar_roundtrip(u, w, v):
    r = boost_radar(boost_radar(RadarPair(u, w), v), -v)
    assert r.tau_min == pytest.approx(u, abs=1e-12 * (1 + abs(u)))
    assert r.tau_max == pytest.approx(w, abs=1e-12 * (1 + abs(w)))


def test_velocity_sign_swaps_roles():
    f = bondi_factor(0.6)
    r = boost_radar(RadarPair(1, 1), -0.6)
    assert (r.tau_min, r.tau_max) == pytest.approx((f, 1 / f))


def test_radar_map_examples():
    assert radar_map(Event(1, 0)) == RadarPair(1, 1)
    assert radar_map(Event(3, 1)) == RadarPair(2, 4)
    assert from_radar(radar_map(Event(3, 1))) == Event(3, 1)


def test_from_radar_rejects_inverted_pair():
    with pytest.raises(ValueError):
        from_radar(RadarPair(2, 1))
    assert from_radar(RadarPair(2, 1), signed=True) == Event(1.5, -0.5)


@given(events, velocities)
def test_radar_boost_commutes(e, v):
    lhs = radar_map(boost_event(e, v))
    rhs = boost_radar(radar_map(e), v)
    scale = (1 + abs(e.tau) + abs(e.l)) * bondi_factor(abs(v))
    assert lhs.tau_min == pytest.approx(rhs.tau_min, abs=1e-12 * scale)
    assert lhs.tau_max == pytest.approx(rhs.tau_max, abs=1e-12 * scale)


# -- k factor / velocities ----------------------------------------------------------


def test_k_factor_examples():
    assert k_factor(0.0) == 1.0
    assert k_factor(0.6) == pytest.approx(4.0, rel=1e-15)
    # a twofold spread over a thousandfold volume: k = 1.2222...
    assert velocity_from_k(Fraction(11, 9)) == pytest.approx(0.1, abs=1e-15)


def test_k_is_square_of_bondi_factor():
    for v in (-0.7, 0.0, 0.25, 0.9):
        assert k_factor(v) == pytest.approx(bondi_factor(v) ** 2, rel=1e-14)


@pytest.mark.parametrize("k", [0.0, -1.0, math.inf])
def test_velocity_from_k_rejects(k):
    with pytest.raises(ValueError):
        velocity_from_k(k)


@given(velocities)
def test_k_roundtrip(v):
    assert velocity_from_k(k_factor(v)) == pytest.approx(v, abs=1e-14)


def test_compose_examples():
    assert compose_velocities(0.0, 0.4) == pytest.approx(0.4, abs=1e-16)
    assert compose_velocities(0.6, 0.6) == pytest.approx(15 / 17, abs=1e-15)
    assert compose_velocities(0.3, -0.3) == pytest.approx(0.0, abs=1e-16)


@given(velocities, velocities)
def test_compose_matches_addition_formula(u, v):
    w = compose_velocities(u, v)
    assert -1 < w < 1
    assert w == pytest.approx((u + v) / (1 + u * v), abs=1e-12)
    assert k_factor(w) == pytest.approx(k_factor(u) * k_factor(v), rel=1e-10)


def test_compose_stays_inside_unit_interval():
    w = compose_velocities(1 - 1e-12, 1 - 1e-12)
    assert w < 1


# -- interval -----------------------------------------------------------------------


def test_interval_examples():
    r = interval(Event(1, 2), Event(1, 2))
    assert (r.squared, r.classification) == (0.0, NULL)
    r = interval(Event(0, 0), Event(1, 0))
    assert (r.squared, r.magnitude, r.classification) == (1.0, 1.0, QUANTITY_LIKE)
    r = interval(Event(0, 0), Event(0, 1))
    assert (r.squared, r.classification) == (-1.0, QUALITY_LIKE)


@given(events, events)
def test_interval_forms_agree(a, b):
    direct = interval(a, b).squared
    via = interval_radar(radar_map(a), radar_map(b))
    scale = (a.tau - b.tau) ** 2 + (a.l - b.l) ** 2
    assert direct == pytest.approx(via, abs=1e-12 * max(1.0, scale))


@settings(max_examples=300)
@given(events, events, velocities)
def test_interval_invariant_under_boost(a, b, v):
    s0 = interval(a, b).squared
    s1 = interval(boost_event(a, v), boost_event(b, v)).squared
    scale = ((a.tau - b.tau) ** 2 + (a.l - b.l) ** 2) * k_factor(abs(v))
    assert s1 == pytest.approx(s0, abs=1e-11 * max(1.0, scale))


def test_vectorised_intervals(rng):
    a, b, c, d = rng.normal(size=(4, 20))
    out = intervals(a, b, c, d)
    for i in range(20):
        assert out[i] == pytest.approx(interval(Event(a[i], b[i]), Event(c[i], d[i])).squared, abs=1e-14)


# -- interval_from_prices -------------------------------------------------------------


def test_currency_sides():
    side1 = interval_from_prices(0.702, 0.710, 0.705, 0.705, base="e")
    side2 = interval_from_prices(0.996, 1.007, 1.001, 1.001, base="e")
    # direct evaluation oracle
    o1 = math.log(0.710 / 0.705) * math.log(0.702 / 0.705)
    o2 = math.log(1.007 / 1.001) * math.log(0.996 / 1.001)
    assert side1.squared == pytest.approx(o1, rel=1e-12)
    assert side2.squared == pytest.approx(o2, rel=1e-12)
    assert side1.squared == pytest.approx(-3.0137e-5, rel=1e-4)
    assert side2.squared == pytest.approx(-2.9926e-5, rel=1e-4)
    assert abs(side1.squared - side2.squared) / abs(side2.squared) < 0.02
    assert side1.classification == side2.classification == QUALITY_LIKE


def test_prices_trivial_cases():
    r = interval_from_prices(3, 3, 3, 3)
    assert (r.squared, r.classification) == (0.0, NULL)
    r = interval_from_prices(2, 2, 1, 1)
    assert (r.squared, r.classification) == (1.0, QUANTITY_LIKE)


@pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
def test_prices_reject_non_positive(bad):
    with pytest.raises(ValueError):
        interval_from_prices(bad, 1, 1, 1)


@given(*(st.floats(0.01, 100) for _ in range(4)))
def test_base_change_scales_squared(a, b, c, d):
    r2 = interval_from_prices(a, b, c, d, base=2)
    re = interval_from_prices(a, b, c, d, base="e")
    assert re.squared == pytest.approx(r2.squared * math.log(2) ** 2, rel=1e-9, abs=1e-300)
    if abs(r2.squared) > 1e-9:
        assert r2.classification == re.classification


# -- ideal_measure ----------------------------------------------------------------------


def test_ideal_measure_examples():
    assert ideal_measure(Event(2, 1), ConsumerFrame()) == RadarPair(1, 3)
    r = ideal_measure(Event(1, 0), ConsumerFrame(0.6))
    o = boost_radar(RadarPair(1, 1), -0.6)
    assert (r.tau_min, r.tau_max) == pytest.approx((o.tau_min, o.tau_max), abs=1e-15)
    assert (r.tau_min, r.tau_max) == pytest.approx((2.0, 0.5), abs=1e-15)


def test_ideal_measure_midpoint_is_frame_quantity(rng):
    for _ in range(1000):
        f = ConsumerFrame(rng.uniform(-0.95, 0.95), Event(*rng.normal(size=2)))
        e = Event(*rng.normal(scale=5, size=2))
        assert ideal_measure(e, f).midpoint == pytest.approx(f.valuation(e), abs=1e-12)


@given(events, velocities, st.floats(-20, 20))
def test_width_invariant_along_frame_quantity_axis(e, v, shift):
    # moving along a frame's own quantity axis keeps the ideal-measure width
    f = ConsumerFrame(v)
    g = 1 / math.sqrt(1 - v * v)
    moved = Event(e.tau + shift * g, e.l + shift * g * v)
    w0 = ideal_measure(e, f).half_width
    w1 = ideal_measure(moved, f).half_width
    assert w1 == pytest.approx(w0, abs=1e-9 * (1 + abs(shift) + abs(e.tau) + abs(e.l)) * g)


def test_frame_rejects_bad_velocity():
    with pytest.raises(ValueError):
        ConsumerFrame(1.0)


# -- proper quantity / worldlines --------------------------------------------------------


def test_proper_quantity_examples():
    assert proper_quantity(Worldline(Event(0, 0), ((0.0, 2.0),))) == 2.0
    assert proper_quantity(Worldline(Event(0, 0), ((0.6, 1.0),))) == pytest.approx(0.8, abs=1e-15)
    out_back = Worldline(Event(0, 0), ((0.6, 1.0), (-0.6, 1.0)))
    assert proper_quantity(out_back) == pytest.approx(1.6, abs=1e-15)


def test_proper_quantity_additive():
    a = Worldline(Event(0, 0), ((0.3, 1.0), (0.1, 2.0)))
    b = Worldline(a.end, ((-0.5, 0.7),))
    assert proper_quantity(a.concat(b)) == pytest.approx(proper_quantity(a) + proper_quantity(b), abs=1e-15)


def test_proper_quantity_rejects_fast_segment():
    with pytest.raises(ValueError):
        proper_quantity([(1.0, 1.0)])


@given(st.floats(0.1, 10), st.floats(-0.9, 0.9), st.floats(0.05, 0.95), st.floats(-5, 5))
def test_straight_line_maximises_proper_quantity(T, v, frac, kink):
    a, b = Event(0, 0), Event(T, v * T)
    mid = Event(frac * T, v * frac * T + kink)
    try:
        bent = polyline([a, mid, b])
    except ValueError:
        return  # kink leaves the quantity-like region
    assert proper_quantity(bent) <= proper_quantity(polyline([a, b])) + 1e-12


def test_worldline_sampling():
    w = Worldline(Event(1, 0), ((0.6, 1.0), (0.0, 1.0)))
    assert w.at_proper(0) == Event(1, 0)
    e = w.at_proper(0.8)
    assert (e.tau, e.l) == pytest.approx((2.0, 0.6))
    e = w.at_proper(1.8)  # 1.0 into the stationary segment
    assert (e.tau, e.l) == pytest.approx((3.0, 0.6))
    e = w.at_proper(5.8)  # extrapolated inertially
    assert (e.tau, e.l) == pytest.approx((7.0, 0.6))
    e = w.at_proper(-0.8)  # backwards along the first segment
    assert (e.tau, e.l) == pytest.approx((0.0, -0.6))


# -- galilean ------------------------------------------------------------------------------


def test_galilean_examples():
    assert galilean_boost(Event(1, 0), 0.6) == Event(1, 0.6)
    assert galilean_boost(Event(3, -2), 0.0) == Event(3, -2)


def test_galilean_differs_at_second_order():
    for v in (0.01, 0.005):
        diff = boost_event(Event(1, 0), v).tau - galilean_boost(Event(1, 0), v).tau
        # series: 1/sqrt(1-v^2) - 1 = v^2/2 + O(v^4)
        assert diff == pytest.approx(v * v / 2, rel=1e-3)


# -- exchange chain ---------------------------------------------------------------------------


def test_exchange_chain_examples():
    assert exchange_chain([Fraction(7, 6), Fraction(3, 2)]) == Fraction(7, 4)
    assert exchange_chain([Fraction(5, 3)]) == Fraction(5, 3)
    assert exchange_chain([2, Fraction(1, 2)]) == 1
    assert exchange_chain([]) == 1


def test_exchange_chain_logs_add():
    rs = [Fraction(7, 6), Fraction(3, 2), Fraction(2, 9)]
    total = exchange_chain(rs)
    assert math.log(total) == pytest.approx(sum(math.log(r) for r in rs), abs=1e-15)


def test_exchange_chain_rejects_non_positive():
    with pytest.raises(ValueError):
        exchange_chain([1, 0])
