import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mesl.errors import ConvergenceError
from mesl.mtj import (
    MtjModel,
    ReadCircuit,
    check_disturb,
    divider_residual,
    inverter_out,
    mtj_resistance,
    read_circuit,
    series,
    solve_divider,
)
from oracles import divider_grid

MODEL = MtjModel()

bias = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
angle = st.floats(min_value=0.0, max_value=math.pi, allow_nan=False)


def test_endpoints():
    assert mtj_resistance(MODEL, 0.0, 0.7) == pytest.approx(5e3)
    assert mtj_resistance(MODEL, math.pi, 0.0) == pytest.approx(10e3)
    g_p, g_ap = 1 / 5e3, 1 / 10e3
    assert mtj_resistance(MODEL, math.pi / 2, 0.0) == pytest.approx(2 / (g_p + g_ap))


def test_model_validation():
    for kw in ({"r_p0": 0}, {"tmr0": -1}, {"v_h": 0}):
        with pytest.raises(ValueError):
            MtjModel(**kw)
    with pytest.raises(ValueError):
        mtj_resistance(MODEL, 0.0, math.inf)


@given(bias, angle, angle)
@settings(max_examples=300, deadline=None)
def test_resistance_monotone_in_angle(v, t1, t2):
    lo, hi = sorted((t1, t2))
    assert mtj_resistance(MODEL, lo, v) <= mtj_resistance(MODEL, hi, v) * (1 + 1e-12)


@given(bias, bias)
@settings(max_examples=300, deadline=None)
def test_tmr_rolloff(v1, v2):
    a, b = sorted((abs(v1), abs(v2)))
    assert MODEL.tmr(a) >= MODEL.tmr(b)
    assert MODEL.r_ap(v1) >= MODEL.r_p(v1)
    assert MODEL.tmr(0.0) == MODEL.tmr0


def test_divider_trivial_cases():
    assert solve_divider(1e3, 1e3, 0.8) == pytest.approx(0.4, abs=1e-9)
    assert solve_divider(1e3, math.inf, 0.8) == pytest.approx(0.8, abs=1e-9)


def test_divider_matches_grid_oracle_ap_stack():
    ref = math.sqrt(5e3 * 10e3)

    def ap(v):
        return MODEL.resistance(math.pi, v)

    v = solve_divider(ref, ap, 0.85)
    assert v == pytest.approx(divider_grid(lambda x: ref, ap, 0.85), abs=1e-9)
    assert divider_residual(ref, ap, 0.85, v) < 1e-9
    assert 0 < v < 0.85


@given(st.floats(0.05, 2.0), st.floats(0.0, math.pi), st.floats(0.0, math.pi))
@settings(max_examples=100, deadline=None)
def test_divider_balance_bias_dependent_both_sides(v_read, t1, t2):
    def top(v):
        return MODEL.resistance(t1, v)

    def bot(v):
        return MODEL.resistance(t2, v)

    v = solve_divider(top, bot, v_read)
    assert 0 < v < v_read
    assert divider_residual(top, bot, v_read, v) < 1e-8


def test_series_composition_closed_form():
    stack = series(3e3, 4e3)
    assert solve_divider(2e3, stack, 0.9) == pytest.approx(0.9 * 7 / 9, abs=1e-9)


def test_series_bias_split_consistency():
    def ap(v):
        return MODEL.resistance(math.pi, v)

    stack = series(ap, ap)
    # two identical elements share the voltage evenly
    assert stack(0.8) == pytest.approx(2 * ap(0.4), rel=1e-10)
    mixed = series(ap, 5e3)
    r = mixed(0.8)
    i = 0.8 / r
    assert ap(0.8 - i * 5e3) + 5e3 == pytest.approx(r, rel=1e-9)


def test_divider_nonconvergence_reports():
    with pytest.raises(ConvergenceError) as info:
        solve_divider(1e3, lambda v: 1e3 * (1 + 5 * v * v), 1.0, max_iter=3, tol=1e-15)
    assert info.value.iterations == 3
    assert info.value.residual > 0
    with pytest.raises(ConvergenceError):
        solve_divider(1e3, lambda v: -1.0, 1.0)


def test_inverter_conventions():
    c = ReadCircuit(v_read=1.0, inverter_trip=0.5, v_out_high=1.0)
    assert inverter_out(0.0, c) == c.v_out_high
    assert inverter_out(1.0, c) == c.v_out_low
    assert inverter_out(0.5, c) == c.v_out_low


def test_disturb_guard():
    c = ReadCircuit()
    assert check_disturb(0.0, c)
    assert not check_disturb(c.v_switch_min, c)
    assert not check_disturb(-c.v_switch_min, c)


def test_read_circuit_defaults_and_validation():
    c = read_circuit(MODEL)
    assert c.r_ref == pytest.approx(math.sqrt(5e3 * 10e3))
    assert c.inverter_trip == pytest.approx(0.425)
    with pytest.raises(ValueError):
        ReadCircuit(inverter_trip=0.9, v_out_high=0.8)
    with pytest.raises(ValueError):
        ReadCircuit(v_read=0.0)


def test_xnor_divider_separates_states():
    c = read_circuit(MODEL)
    v_p = solve_divider(c.r_ref, MODEL.r_p0, c.v_read)
    v_ap = solve_divider(c.r_ref, lambda v: MODEL.resistance(math.pi, v), c.v_read)
    assert v_p < c.inverter_trip < v_ap
    assert np.all(np.abs([v_p, v_ap]) < c.v_switch_min)
