"""Storage, harvester, and budget arithmetic tests.

The numeric anchors here come from the bundled case-study scenario:
a 10 mAh store at 3.7 V nominal (133.2 J), a 452 nA always-on budget
on a 2.2 V rail (994.4 nW), and a three-step wake burst totalling
1.5462 mJ over 3.535 s.
"""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dpmsim.energy import (
    AlwaysOnBudget,
    HarvesterModel,
    LoadStep,
    Rail,
    StorageElement,
    always_on_power,
    apply_net_power,
    cycle_energy,
    cycle_net_gain,
    energy_at_voltage,
    harvest_power,
    harvest_voltage,
    ocv,
    soc_at_voltage,
    script_duration,
    storage_voltage,
    validate_script,
)
from dpmsim.quantities import (
    Current,
    Duration,
    Energy,
    Illuminance,
    Power,
    Voltage,
    energy_of,
)

CURVE = (
    (0.0, Voltage.from_volts(3.0)),
    (0.1, Voltage.from_volts(3.6)),
    (1.0, Voltage.from_volts(4.2)),
)


def _store(soc: float = 0.5) -> StorageElement:
    return StorageElement.create(10.0, Voltage.from_volts(3.7), CURVE, soc)


# -- storage element ------------------------------------------------------


def test_capacity_from_charge_and_nominal_voltage():
    store = _store()
    assert store.e_capacity.joules == pytest.approx(133.2, rel=1e-12)
    assert store.e_store.nj == pytest.approx(0.5 * store.e_capacity.nj, rel=1e-12)
    assert store.soc == pytest.approx(0.5, rel=1e-12)
    assert store.v_empty == Voltage.from_volts(3.0)
    assert store.v_full == Voltage.from_volts(4.2)


def test_storage_validation_errors():
    with pytest.raises(ValueError):
        StorageElement.create(0.0, Voltage.from_volts(3.7), CURVE, 0.5)
    with pytest.raises(ValueError):
        StorageElement.create(10.0, Voltage.from_volts(3.7), CURVE, 1.5)
    with pytest.raises(ValueError):
        StorageElement.create(10.0, Voltage.from_volts(3.7), CURVE[:-1], 0.5)
    decreasing_soc = (CURVE[0], (0.1, Voltage.from_volts(3.6)), (0.1, Voltage.from_volts(4.2)))
    with pytest.raises(ValueError):
        StorageElement.create(10.0, Voltage.from_volts(3.7), decreasing_soc, 0.5)
    sagging = (CURVE[0], (0.1, Voltage.from_volts(2.9)), (1.0, Voltage.from_volts(4.2)))
    with pytest.raises(ValueError):
        StorageElement.create(10.0, Voltage.from_volts(3.7), sagging, 0.5)


def test_ocv_at_curve_knots_and_between():
    store = _store()
    assert ocv(store, 0.0) == Voltage.from_volts(3.0)
    assert ocv(store, 0.1) == Voltage.from_volts(3.6)
    assert ocv(store, 1.0) == Voltage.from_volts(4.2)
    # Midpoint of the upper segment rounds onto the 1 uV grid.
    assert ocv(store, 0.5) == Voltage(3_866_667)
    with pytest.raises(ValueError):
        ocv(store, 1.1)
    with pytest.raises(ValueError):
        ocv(store, -0.1)


def test_soc_at_voltage_inverts_the_curve():
    store = _store()
    assert soc_at_voltage(store, Voltage.from_volts(3.3)) == pytest.approx(0.05)
    assert soc_at_voltage(store, Voltage.from_volts(4.0)) == pytest.approx(0.7)
    with pytest.raises(ValueError):
        soc_at_voltage(store, Voltage.from_volts(2.9))
    with pytest.raises(ValueError):
        soc_at_voltage(store, Voltage.from_volts(4.3))


@given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
def test_ocv_round_trip(soc: float):
    store = _store()
    back = soc_at_voltage(store, ocv(store, soc))
    # The 1 uV reading grid costs at most half a microvolt of soc.
    assert back == pytest.approx(soc, abs=2e-6)


def test_energy_at_voltage_accepts_fractional_microvolts():
    store = _store()
    at_threshold = energy_at_voltage(store, 4_000_000.0)
    just_below = energy_at_voltage(store, 4_000_000.0 - 0.5)
    assert at_threshold.nj == pytest.approx(0.7 * store.e_capacity.nj, rel=1e-12)
    assert just_below.nj < at_threshold.nj
    assert at_threshold.nj - just_below.nj == pytest.approx(0.5 * 199_800, rel=1e-9)
    with pytest.raises(ValueError):
        energy_at_voltage(store, 4_200_000.5)


def test_storage_voltage_clamps_out_of_range_energy():
    store = _store()
    assert storage_voltage(store.with_energy(Energy(0.7 * store.e_capacity.nj))) == Voltage(4_000_000)
    overfull = store.with_energy(Energy(1.2 * store.e_capacity.nj))
    assert storage_voltage(overfull) == Voltage.from_volts(4.2)
    assert storage_voltage(store.with_energy(Energy(-5.0))) == Voltage.from_volts(3.0)


# -- net-power integration ------------------------------------------------


def test_apply_net_power_plain_interval():
    store = _store()
    out = apply_net_power(store, Power.from_microwatts(10.0), Duration.from_seconds(2))
    assert out.clipped_high == Energy(0.0)
    assert out.clipped_low == Energy(0.0)
    assert out.storage.e_store.nj == store.e_store.nj + 20_000.0


def test_apply_net_power_clamps_at_full():
    store = _store(0.999999)
    out = apply_net_power(store, Power.from_milliwatts(100.0), Duration.from_seconds(10))
    assert out.storage.e_store == store.e_capacity
    pushed = store.e_store.nj + 1e9 - store.e_capacity.nj
    assert out.clipped_high.nj == pytest.approx(pushed, rel=1e-9)
    assert out.clipped_low == Energy(0.0)


def test_apply_net_power_clamps_at_empty():
    store = _store(0.0).with_energy(Energy(100.0))
    out = apply_net_power(store, Power(-1000.0), Duration.from_seconds(1))
    assert out.storage.e_store == Energy(0.0)
    assert out.clipped_low.nj == pytest.approx(900.0, rel=1e-12)
    assert out.clipped_high == Energy(0.0)


def test_apply_net_power_rejects_negative_dt():
    with pytest.raises(ValueError):
        apply_net_power(_store(), Power(0.0), Duration(-1))


@given(
    soc=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    p_nw=st.floats(min_value=-1e9, max_value=1e9, allow_nan=False),
    dt_us=st.integers(min_value=0, max_value=10**10),
)
def test_apply_net_power_accounts_for_every_nanojoule(soc, p_nw, dt_us):
    store = _store(soc)
    p, dt = Power(p_nw), Duration(dt_us)
    out = apply_net_power(store, p, dt)
    e_unclamped = store.e_store.nj + energy_of(p, dt).nj
    if out.clipped_high.nj > 0:
        assert out.storage.e_store == store.e_capacity
        assert out.clipped_high.nj == e_unclamped - store.e_capacity.nj
    elif out.clipped_low.nj > 0:
        assert out.storage.e_store == Energy(0.0)
        assert out.clipped_low.nj == -e_unclamped
    else:
        assert out.storage.e_store.nj == e_unclamped
    assert 0.0 <= out.storage.e_store.nj <= store.e_capacity.nj


# -- harvester -------------------------------------------------------------


CAL = (
    (Illuminance(200.0), Power(43_145.799332267394)),
    (Illuminance(300.0), Power(63_293.7609252156)),
    (Illuminance(500.0), Power(119_993.0410001077)),
)
HARVESTER = HarvesterModel(calibration=CAL)


def test_harvest_power_hits_calibration_knots():
    assert harvest_power(HARVESTER, Illuminance(200.0)) == Power(43_145.799332267394)
    assert harvest_power(HARVESTER, Illuminance(300.0)) == Power(63_293.7609252156)
    assert harvest_power(HARVESTER, Illuminance(500.0)) == Power(119_993.0410001077)


def test_harvest_power_implicit_origin():
    assert harvest_power(HARVESTER, Illuminance(0.0)) == Power(0.0)
    half = harvest_power(HARVESTER, Illuminance(100.0))
    assert half.nw == pytest.approx(43_145.799332267394 / 2, rel=1e-12)


def test_harvest_power_interpolates_and_extrapolates():
    mid = harvest_power(HARVESTER, Illuminance(250.0))
    assert mid.nw == pytest.approx((43_145.799332267394 + 63_293.7609252156) / 2, rel=1e-12)
    beyond = harvest_power(HARVESTER, Illuminance(600.0))
    slope = (119_993.0410001077 - 63_293.7609252156) / 200.0
    assert beyond.nw == pytest.approx(119_993.0410001077 + slope * 100.0, rel=1e-12)
    with pytest.raises(ValueError):
        harvest_power(HARVESTER, Illuminance(-1.0))


def test_harvest_voltage_tracks_light_presence():
    assert harvest_voltage(HARVESTER, Illuminance(0.0)) == Voltage(0)
    assert harvest_voltage(HARVESTER, Illuminance(0.5)) == Voltage.from_volts(1.2)
    assert harvest_voltage(HARVESTER, Illuminance(10_000.0)) == Voltage.from_volts(1.2)


def test_harvester_validation_errors():
    with pytest.raises(ValueError):
        HarvesterModel(calibration=()).validate()
    with pytest.raises(ValueError):
        HarvesterModel(calibration=((Illuminance(0.0), Power(1.0)),)).validate()
    bad_order = (CAL[1], CAL[0])
    with pytest.raises(ValueError):
        HarvesterModel(calibration=bad_order).validate()
    sagging = ((Illuminance(100.0), Power(50.0)), (Illuminance(200.0), Power(40.0)))
    with pytest.raises(ValueError):
        HarvesterModel(calibration=sagging).validate()
    HARVESTER.validate()


# -- always-on budget and cycle arithmetic ---------------------------------


def test_always_on_budget_totals():
    budget = AlwaysOnBudget()
    assert budget.total_current == Current(452)
    assert always_on_power(budget).nw == 994.4
    bare = AlwaysOnBudget(i_extra_leakage=Current(0))
    assert bare.total_current == Current(310)
    assert always_on_power(bare).nw == 682.0


def test_load_step_power():
    step = LoadStep("sample", Duration.from_millis(1500), Energy.from_millijoules(1.1), Rail.HV)
    assert step.power.nw == pytest.approx(1_100_000 / 1.5, rel=1e-12)
    assert LoadStep("noop", Duration(0), Energy(0.0)).power == Power(0.0)


def test_load_step_validation():
    with pytest.raises(ValueError):
        LoadStep("bad", Duration(-1), Energy(0.0)).validate()
    with pytest.raises(ValueError):
        LoadStep("bad", Duration(10), Energy(-1.0)).validate()
    with pytest.raises(ValueError):
        LoadStep("bad", Duration(0), Energy(1.0)).validate()


def test_script_rejects_duplicate_names():
    step = LoadStep("sample", Duration(10), Energy(1.0))
    with pytest.raises(ValueError):
        validate_script((step, step))
    validate_script((step, LoadStep("other", Duration(10), Energy(1.0))))


def test_cycle_energy_matches_case_study(case_study):
    s = case_study
    assert script_duration(s.load_script) == Duration.from_millis(3535)
    e = cycle_energy(s.load_script, s.always_on, Duration.from_seconds(600))
    assert e.nj == pytest.approx(2_146_355.204, abs=1e-6)


def test_cycle_energy_with_measured_always_on_term(case_study):
    s = case_study
    e = cycle_energy(
        s.load_script, s.always_on, Duration.from_seconds(600), Energy.from_millijoules(0.6)
    )
    assert e.nj == pytest.approx(2_146_200.0, abs=1e-9)
    # A budget-level override behaves identically ...
    fixed = AlwaysOnBudget(fixed_cycle_energy=Energy.from_millijoules(0.6))
    assert cycle_energy(s.load_script, fixed, Duration.from_seconds(600)).nj == pytest.approx(
        2_146_200.0, abs=1e-9
    )
    # ... and the explicit argument wins over it.
    e2 = cycle_energy(s.load_script, fixed, Duration.from_seconds(600), Energy(0.0))
    assert e2.nj == pytest.approx(1_546_200.0, abs=1e-9)


def test_cycle_net_gain_matches_case_study(case_study):
    s = case_study
    gain = cycle_net_gain(
        harvest_power(s.harvester, Illuminance(200.0)),
        s.load_script,
        s.always_on,
        Duration.from_seconds(600),
    )
    assert gain.nj == pytest.approx(23_893_644.796, abs=0.5)


def test_budget_validation():
    with pytest.raises(ValueError):
        AlwaysOnBudget(i_pmic=Current(-1)).validate()
    with pytest.raises(ValueError):
        AlwaysOnBudget(rail_voltage=Voltage(0)).validate()
    with pytest.raises(ValueError):
        AlwaysOnBudget(fixed_cycle_energy=Energy(-1.0)).validate()
    AlwaysOnBudget().validate()
