import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ecokin.kinematics import Event, compose_velocities, polyline, proper_quantity
from ecokin.scenarios import (
    InfeasibleError,
    TransportParams,
    TwinItinerary,
    balanced_state,
    direction,
    doppler_ratio,
    is_irreducible,
    max_benefit_path,
    simulate_economy,
    simulate_transport,
    simulate_twin,
    speed_limit_check,
)

K_FIX = [[0.5, 0.2], [0.3, 0.6]]


def quadratic_roots(K):
    a, b, c, d = K[0][0], K[0][1], K[1][0], K[1][1]
    tr, det = a + d, a * d - b * c
    disc = math.sqrt(tr * tr - 4 * det)
    return (tr - disc) / 2, (tr + disc) / 2


# -- transport ---------------------------------------------------------------------


def test_transport_without_distance():
    r = simulate_transport(TransportParams(S0=2.0, k_t=0.3, l_AB=0.0, n_A=5.0))
    assert r.n_B == 5.0
    assert r.A_min == r.A_max == r.A0 == 5.0
    assert r.econ_distance == 0.0


def test_transport_unit_exponent():
    r = simulate_transport(TransportParams(S0=1.0, k_t=0.1, l_AB=10.0))
    assert r.n_B == pytest.approx(math.e, rel=1e-12)
    assert r.c_econ == pytest.approx(10.0)
    assert r.profile_n[0] == 1.0 and r.profile_n[-1] == r.n_B
    assert len(r.profile_x) == 1001


def test_transport_identities(rng):
    for _ in range(100):
        S0 = rng.uniform(0.5, 10)
        k = rng.uniform(0.01, 1)
        l = rng.uniform(0.01, 2) * S0 / k
        n_A = rng.uniform(0.1, 100)
        r = simulate_transport(TransportParams(S0, k, l, n_A))
        assert r.rel_error < 1e-9
        assert r.A_min <= r.A0 <= r.A_max
        assert r.A0 ** 2 == pytest.approx(r.A_min * r.A_max, rel=1e-12)
        assert math.log(r.A_max / r.A_min) == pytest.approx(2 * k / S0 * l, rel=1e-12)
        r2 = simulate_transport(TransportParams(S0, k, 2 * l, n_A))
        assert r2.econ_distance == pytest.approx(2 * r.econ_distance, rel=1e-9)


def test_transport_custom_step():
    r = simulate_transport(TransportParams(1.0, 0.5, 3.0, step=0.01))
    assert len(r.profile_x) == 301
    assert r.rel_error < 1e-9


@pytest.mark.parametrize("kw", [
    dict(S0=0.0, k_t=1.0, l_AB=1.0),
    dict(S0=1.0, k_t=-1.0, l_AB=1.0),
    dict(S0=1.0, k_t=1.0, l_AB=-1.0),
    dict(S0=1.0, k_t=1.0, l_AB=1.0, n_A=0.0),
    dict(S0=1.0, k_t=1.0, l_AB=1.0, step=0.0),
    dict(S0=1.0, k_t=1.0, l_AB=1.0, step=2.0),
    dict(S0=math.nan, k_t=1.0, l_AB=1.0),
])
def test_transport_invalid(kw):
    with pytest.raises(ValueError):
        TransportParams(**kw)


def test_speed_limit():
    assert speed_limit_check(0.5 * 3.0, 3.0)
    assert not speed_limit_check(2 * 3.0, 3.0)
    assert not speed_limit_check(3.0, 3.0)
    assert not speed_limit_check(-3.0, 3.0)
    with pytest.raises(ValueError):
        speed_limit_check(0.1, 0.0)


# -- twin ------------------------------------------------------------------------------


def test_twin_stationary():
    r = simulate_twin(TwinItinerary([(0.0, 1.5), (0.0, 2.5)]))
    assert r.home == r.traveler == 4.0
    assert r.lag == 1.0


def test_twin_fixture():
    r = simulate_twin(TwinItinerary([(0.6, 1.0), (-0.6, 1.0)]))
    assert (r.home, r.traveler) == (2.0, pytest.approx(1.6, abs=1e-15))
    assert r.lag == pytest.approx(0.8, abs=1e-15)
    assert r.separation == 0.0
    assert r.max_separation == pytest.approx(0.6)


def test_twin_lag_closed_form(rng):
    for v in rng.uniform(-0.999, 0.999, size=100):
        d = rng.uniform(0.1, 10)
        r = simulate_twin(TwinItinerary([(v, d), (-v, d)]))
        assert r.lag == pytest.approx(math.sqrt(1 - v * v), abs=1e-9)
        assert r.traveler <= r.home


def test_twin_returns_to_start():
    it = TwinItinerary([(0.5, 2.0), (-0.25, 2.0), (-0.5, 1.0)])
    r = simulate_twin(it)
    end = it.worldline().end
    assert end.l == pytest.approx(0.0, abs=1e-12)
    assert end.tau == pytest.approx(r.home)
    assert r.lag < 1


def test_twin_errors():
    with pytest.raises(InfeasibleError):
        simulate_twin(TwinItinerary([(0.6, 1.0), (-0.6, 0.5)]))
    with pytest.raises(ValueError):
        TwinItinerary([(1.0, 1.0)])
    with pytest.raises(ValueError):
        TwinItinerary([(0.1, 0.0)])
    with pytest.raises(ValueError):
        TwinItinerary([])


# -- doppler ------------------------------------------------------------------------------


def test_doppler_examples():
    assert doppler_ratio(0.0) == 1.0
    assert doppler_ratio(0.6) == pytest.approx(2.0, rel=1e-15)
    with pytest.raises(ValueError):
        doppler_ratio(1.0)


@given(st.floats(-0.99, 0.99), st.floats(-0.99, 0.99))
def test_doppler_group_property(u, v):
    assert doppler_ratio(u) * doppler_ratio(-u) == pytest.approx(1.0, rel=1e-14)
    w = compose_velocities(u, v)
    assert doppler_ratio(w) == pytest.approx(doppler_ratio(u) * doppler_ratio(v), rel=1e-12)


# -- maximum benefit -------------------------------------------------------------------------


def test_max_benefit_examples():
    w = max_benefit_path(Event(0, 0), Event(2, 0))
    assert proper_quantity(w) == pytest.approx(2.0)
    w = max_benefit_path(Event(0, 0), Event(2, 1.2))
    assert w.segments[0][0] == pytest.approx(0.6)
    assert proper_quantity(w) == pytest.approx(1.6, abs=1e-15)
    assert w.end.l == pytest.approx(1.2)


@pytest.mark.parametrize("b", [Event(0, 1), Event(1, 1), Event(-2, 0), Event(1, -3)])
def test_max_benefit_errors(b):
    with pytest.raises(InfeasibleError):
        max_benefit_path(Event(0, 0), b)


def test_straight_segment_beats_kinks(rng):
    a, b = Event(0.0, 0.0), Event(3.0, 0.9)
    best = proper_quantity(max_benefit_path(a, b))
    for _ in range(1000):
        # a waypoint strictly inside the causal diamond, off the segment
        t = rng.uniform(0.01, 2.99)
        lo = max(a.l - (t - a.tau), b.l - (b.tau - t))
        hi = min(a.l + (t - a.tau), b.l + (b.tau - t))
        l = rng.uniform(lo, hi) * (1 - 1e-9)
        if abs(l - (a.l + (b.l - a.l) * t / 3.0)) < 1e-9:
            continue
        assert proper_quantity(polyline([a, Event(t, l), b])) < best


# -- economy ---------------------------------------------------------------------------------


def test_balanced_state_fixture():
    lam, x = balanced_state(K_FIX)
    assert lam == pytest.approx(quadratic_roots(K_FIX)[1], abs=1e-9)
    assert lam == pytest.approx(0.8, abs=1e-9)
    assert x[1] / x[0] == pytest.approx(1.5, rel=1e-10)
    assert x.sum() == pytest.approx(1.0)


def test_balanced_state_rejects_reducible():
    assert not is_irreducible(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError, match="reducible"):
        balanced_state(np.diag([0.7, 0.7]))
    with pytest.raises(ValueError):
        balanced_state(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        balanced_state([[0.5, -0.1], [0.3, 0.6]])
    with pytest.raises(ValueError):
        balanced_state([[1.0]])


def test_balanced_state_positive(rng):
    for m in (2, 3, 5):
        for _ in range(20):
            K = rng.uniform(0.01, 1.0, size=(m, m))
            lam, x = balanced_state(K)
            assert np.all(x > 0)
            np.testing.assert_allclose(K @ x, lam * x, rtol=1e-9, atol=1e-12)
            assert lam == pytest.approx(max(abs(np.linalg.eigvals(K))), rel=1e-9)


def test_balanced_run_keeps_proportions():
    lam, x = balanced_state(K_FIX)
    traj = simulate_economy(K_FIX, x * 10, cycles=50)
    assert not traj.collapsed
    assert len(traj.states) == 51
    vols = traj.volumes()
    np.testing.assert_allclose(vols[1:] / vols[:-1], lam, atol=1e-9)
    p0 = traj.states[0].proportions[(0, 1)]
    for s in traj.states:
        assert s.proportions[(0, 1)] == pytest.approx(p0, rel=1e-9)
    # economic time advances by log2(lam) per cycle
    times = np.array([s.econ_time for s in traj.states])
    np.testing.assert_allclose(np.diff(times), math.log2(lam), atol=1e-9)


def test_zero_component_collapses():
    traj = simulate_economy(K_FIX, [1.0, 0.0], cycles=5)
    assert traj.collapsed and traj.collapse_cycle == 0
    assert traj.states[-1].collapsed
    assert len(traj.states) == 1


def test_collapse_mid_run():
    # product 1 is only made from product 0, which nobody replenishes
    K = [[0.0, 0.0], [1.0, 0.0]]
    traj = simulate_economy(K, [1.0, 1.0], cycles=5)
    assert traj.collapsed and traj.collapse_cycle == 1


def test_generic_init_converges_to_perron_direction():
    _, x = balanced_state(K_FIX)
    traj = simulate_economy(K_FIX, [0.9, 0.1], cycles=200)
    assert not traj.collapsed
    np.testing.assert_allclose(direction(traj.states[-1].outputs), x, atol=1e-9)
    assert all(np.isfinite(s.outputs).all() for s in traj.states)


@pytest.mark.parametrize("init,cycles", [([-1.0, 1.0], 3), ([0.0, 0.0], 3), ([1.0], 3), ([1.0, 1.0], 0)])
def test_economy_invalid(init, cycles):
    with pytest.raises(ValueError):
        simulate_economy(K_FIX, init, cycles)
