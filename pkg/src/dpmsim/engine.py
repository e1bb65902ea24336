"""Deterministic discrete-event simulation engine.

Between events every power flow is constant, so stored energy is a
straight line and the engine integrates it in closed form; threshold
crossings are solved analytically and queued as events instead of being
hunted with fixed time steps. Replaying a scenario therefore produces
byte-identical traces and reports.

Event ordering is total: (time, kind priority, insertion sequence).
Kind priority follows the declaration order of EventKind below, so
simultaneous triggers resolve the same way on every run (an RTC alarm
processed before a touch press at the same microsecond leaves the touch
as the winning wake source, matching latest-trigger-wins).

Exactly one threshold-crossing event is outstanding at any moment; it
is recomputed from scratch after every dispatch because any dispatch
may change the net power. A generation counter invalidates superseded
crossings still sitting in the heap.
"""

from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass

from .energy import (
    HarvesterModel,
    LoadStep,
    StorageElement,
    _ocv_uv,
    always_on_power,
    apply_net_power,
    energy_at_voltage,
    harvest_power,
    harvest_voltage,
    power_of,
)
from .pmic import Mode, PmicInputs, PmicMode, Stage, operating_stage, rails_for, step_mode
from .quantities import Duration, Energy, Illuminance, Power, TimePoint, Voltage
from .scenario import Scenario, VariantKind
from .wake import ClearCommand, ClearVia, LatchState, on_rtc_alarm, on_touch, mcu_clear

ALWAYS_ON_COMPONENT = "always_on"

# Safety valve; a healthy run dispatches a handful of events per wake cycle.
_MAX_EVENTS = 10_000_000


class SimulationError(RuntimeError):
    """The engine reached a state that violates its own contracts."""


class EventKind(enum.IntEnum):
    RTC_ALARM = 0
    TOUCH_PRESS = 1
    LOAD_STEP_COMPLETE = 2
    THRESHOLD_CROSS = 3
    SHUTDOWN_GRACE_EXPIRE = 4
    LIGHT_CHANGE = 5
    MCU_CLEAR_LATCH = 6
    SIM_END = 7


class CrossKind(enum.Enum):
    CHRDY_UP = "chrdy_up"
    CHRDY_DOWN = "chrdy_down"
    OVCH_UP = "ovch_up"
    OVCH_DOWN = "ovch_down"
    COLD_START = "cold_start"
    DEPLETED = "depleted"


_KIND_LABEL = {
    EventKind.RTC_ALARM: "rtc_alarm",
    EventKind.TOUCH_PRESS: "touch_press",
    EventKind.LOAD_STEP_COMPLETE: "load_step_complete",
    EventKind.THRESHOLD_CROSS: "threshold_cross",
    EventKind.SHUTDOWN_GRACE_EXPIRE: "shutdown_grace_expire",
    EventKind.LIGHT_CHANGE: "light_change",
    EventKind.MCU_CLEAR_LATCH: "mcu_clear_latch",
    EventKind.SIM_END: "sim_end",
}


@dataclass(frozen=True)
class Event:
    time_us: int
    kind: EventKind
    cross: CrossKind | None = None
    v_target_uv: int | None = None
    lux: Illuminance | None = None
    deadline_us: int | None = None
    gen: int = 0

    def label(self) -> str:
        if self.kind is EventKind.THRESHOLD_CROSS:
            return f"threshold_cross:{self.cross.value}"
        return _KIND_LABEL[self.kind]


@dataclass(frozen=True)
class TraceRecord:
    time_us: int
    kind: str
    mode: str
    latch_set: bool
    v_store_uv: int
    e_store_nj: float
    note: str = ""

    def line(self) -> str:
        base = (
            f"{self.time_us} {self.kind} {self.mode} {int(self.latch_set)} "
            f"{self.v_store_uv} {self.e_store_nj!r}"
        )
        return f"{base} # {self.note}" if self.note else base


@dataclass(frozen=True)
class Anomaly:
    time_us: int
    code: str
    detail: str


@dataclass(frozen=True)
class CycleRow:
    index: int
    start_us: int
    consumed_nj: float
    harvested_nj: float
    net_nj: float
    end_soc: float


@dataclass(frozen=True)
class Report:
    """Everything a finished run exposes to reporting and analysis."""

    scenario: Scenario
    duration_us: int
    e_harvested: Energy
    e_consumed: tuple[tuple[str, Energy], ...]
    e_overcharge_discarded: Energy
    e_store_initial: Energy
    e_store_final: Energy
    final_soc: float
    final_voltage: Voltage
    final_mode: str
    mode_residency: tuple[tuple[str, Duration], ...]
    cycles: tuple[CycleRow, ...]
    cycles_completed: int
    anomalies: tuple[Anomaly, ...]
    trace: tuple[TraceRecord, ...]

    @property
    def e_consumed_total(self) -> Energy:
        total = 0.0
        for _, e in self.e_consumed:
            total += e.nj
        return Energy(total)

    @property
    def net_gain(self) -> Energy:
        return Energy(self.e_harvested.nj - self.e_consumed_total.nj)


def idle_power(scenario: Scenario) -> Power:
    """Drain on the always-on rail while no load step runs.

    The software-sleep variant keeps the MCU in its sleep state instead
    of gating it, so its measured sleep current replaces the whole
    always-on budget.
    """
    if scenario.dpm_variant.kind is VariantKind.SOFTWARE_SLEEP:
        return power_of(scenario.always_on.rail_voltage, scenario.dpm_variant.i_sleep)
    return always_on_power(scenario.always_on)


@dataclass
class _ActiveStep:
    index: int
    step: LoadStep
    end_us: int
    gen: int


class _State:
    """Mutable state of one run; engine-internal."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        self.now = 0
        self.mode = PmicMode.deep_sleep()
        self.latch = LatchState.cleared()
        self.storage: StorageElement = scenario.storage
        self.lux = Illuminance(0.0)
        self.p_harvest_nw = 0.0
        self.v_harvest = Voltage(0)
        self.idle_nw = idle_power(scenario).nw
        self.active_step: _ActiveStep | None = None
        self.next_step_index = 0
        self.step_gen = 0
        self.threshold_gen = 0
        self.alarm_gen = 0
        # A depleted store under light too weak to carry the always-on
        # rail would re-boot and brown out forever within one instant;
        # hold cold start off until the light actually changes.
        self.cold_start_held = False
        self.queue: list[tuple[int, int, int, Event]] = []
        self.seq = 0
        self.events_dispatched = 0
        # Ledger.
        self.e_harvested_nj = 0.0
        self.consumed_nj: dict[str, float] = {ALWAYS_ON_COMPONENT: 0.0}
        for step in scenario.load_script:
            self.consumed_nj[step.name] = 0.0
        self.e_discarded_nj = 0.0
        self.time_in_mode = {mode: 0 for mode in Mode}
        self.cycles_completed = 0
        self.anomalies: list[Anomaly] = []
        self.trace: list[TraceRecord] = []
        # Per-cycle accumulation.
        self.cycles: list[CycleRow] = []
        self.cycle_start_us = 0
        self.cycle_harvested_nj = 0.0
        self.cycle_consumed_nj = 0.0

    # -- queue ------------------------------------------------------

    def push(self, ev: Event) -> None:
        self.seq += 1
        heapq.heappush(self.queue, (ev.time_us, int(ev.kind), self.seq, ev))

    def pop(self) -> Event:
        return heapq.heappop(self.queue)[3]

    def next_time(self) -> int | None:
        return self.queue[0][0] if self.queue else None

    # -- instantaneous views -----------------------------------------

    def v_store_float(self, e_nj: float | None = None) -> float:
        e = self.storage.e_store.nj if e_nj is None else e_nj
        soc = e / self.storage.e_capacity.nj
        soc = min(1.0, max(0.0, soc))
        return _ocv_uv(self.storage.ocv_curve, soc)

    def v_store(self) -> Voltage:
        return Voltage(round(self.v_store_float()))

    def stage(self) -> Stage:
        return operating_stage(self.mode, self.latch.set)

    def inputs(self) -> PmicInputs:
        return PmicInputs(
            v_store=self.v_store(),
            v_harvester=self.v_harvest,
            p_harvester=Power(self.p_harvest_nw),
            latch_set=self.latch.set,
            now=TimePoint(self.now),
        )

    def power_split(self) -> tuple[float, float, float, float]:
        """(harvest, drain, into-store, discarded) rates in nW for the current state."""
        if self.mode.mode is Mode.DEEP_SLEEP:
            return 0.0, 0.0, 0.0, 0.0
        drain = self.idle_nw
        if self.active_step is not None:
            drain += self.active_step.step.power.nw
        h = self.p_harvest_nw
        if self.mode.mode is Mode.OVERCHARGE:
            # Charging is held off: harvest feeds the load first and the
            # surplus is rejected; the store only discharges.
            surplus = h - drain
            return h, drain, min(0.0, surplus), max(0.0, surplus)
        return h, drain, h - drain, 0.0

    def record_anomaly(self, code: str, detail: str) -> None:
        self.anomalies.append(Anomaly(self.now, code, detail))


# -- integration -----------------------------------------------------


def _advance_to(state: _State, t_us: int) -> None:
    """Integrate all constant power flows from state.now to t_us."""
    if t_us < state.now:
        raise SimulationError(f"time must not run backwards ({state.now} -> {t_us})")
    dt_us = t_us - state.now
    if dt_us == 0:
        return
    harvest_nw, _, to_store_nw, discard_nw = state.power_split()
    dt = Duration(dt_us)

    if state.mode.mode is not Mode.DEEP_SLEEP:
        harvest_e = harvest_nw * dt_us / 1e6
        state.e_harvested_nj += harvest_e
        state.cycle_harvested_nj += harvest_e
        idle_e = state.idle_nw * dt_us / 1e6
        state.consumed_nj[ALWAYS_ON_COMPONENT] += idle_e
        state.cycle_consumed_nj += idle_e
        if state.active_step is not None:
            step_e = state.active_step.step.power.nw * dt_us / 1e6
            state.consumed_nj[state.active_step.step.name] += step_e
            state.cycle_consumed_nj += step_e
        state.e_discarded_nj += discard_nw * dt_us / 1e6

    clamp = apply_net_power(state.storage, Power(to_store_nw), dt)
    state.storage = clamp.storage
    if clamp.clipped_high.nj > 0.0:
        # Physical ceiling; rejected exactly like an overcharge clamp.
        state.e_discarded_nj += clamp.clipped_high.nj
    if clamp.clipped_low.nj > 0.0:
        # Only float dust can land here (the depletion crossing fires at
        # zero); undo the overstated drain so the ledger stays balanced.
        state.consumed_nj[ALWAYS_ON_COMPONENT] -= clamp.clipped_low.nj
        state.cycle_consumed_nj -= clamp.clipped_low.nj

    state.time_in_mode[state.mode.mode] += dt_us
    state.now = t_us


# -- threshold crossing prediction ------------------------------------


def _predicate(state: _State, e_nj: float, cross: CrossKind, target_uv: int) -> bool:
    """Would the guard for this crossing hold at stored energy e_nj?"""
    if cross is CrossKind.DEPLETED:
        return e_nj <= 0.0
    v = round(state.v_store_float(e_nj))
    if cross in (CrossKind.CHRDY_UP, CrossKind.OVCH_UP):
        return v >= target_uv
    if cross is CrossKind.CHRDY_DOWN:
        return v < target_uv
    if cross is CrossKind.OVCH_DOWN:
        return v <= target_uv
    raise SimulationError(f"no predicate for {cross}")


def find_threshold_crossing(state: _State, cross: CrossKind, target_uv: int) -> int | None:
    """Earliest microsecond at which the crossing guard becomes true.

    Returns None when the net power points away from the target. The
    result aims at most half a microvolt past the threshold so the
    integer-grid comparison at dispatch lands on the right side; the
    dispatched event therefore always sees v_store within 1 uV of its
    target.
    """
    if cross is not CrossKind.DEPLETED and not (
        state.storage.v_empty.uv <= target_uv <= state.storage.v_full.uv
    ):
        raise ValueError(
            f"crossing target {target_uv} uV is outside the storage voltage range"
        )
    _, _, p_nw, _ = state.power_split()
    e0 = state.storage.e_store.nj

    if _predicate(state, e0, cross, target_uv):
        return state.now

    if cross is CrossKind.DEPLETED:
        if p_nw >= 0.0:
            return None
        e_aim = 0.0
    else:
        rising = cross in (CrossKind.CHRDY_UP, CrossKind.OVCH_UP)
        if rising and p_nw <= 0.0:
            return None
        if not rising and p_nw >= 0.0:
            return None
        if cross is CrossKind.CHRDY_DOWN:
            # The guard is a strict comparison on the 1 uV grid.
            v_aim = target_uv - 0.5 - 1e-6
        elif cross is CrossKind.OVCH_DOWN:
            v_aim = target_uv - 1e-6
        else:
            v_aim = float(target_uv)
        lo = float(state.storage.v_empty.uv)
        hi = float(state.storage.v_full.uv)
        e_aim = energy_at_voltage(state.storage, min(hi, max(lo, v_aim))).nj

    t = state.now + math.ceil((e_aim - e0) / p_nw * 1e6)
    if t <= state.now:
        t = state.now + 1
    # Float dust can leave the aim point a hair short of the guard; walk
    # forward microsecond by microsecond (strictly bounded in practice).
    for _ in range(1000):
        e_t = e0 + p_nw * (t - state.now) / 1e6
        if _predicate(state, e_t, cross, target_uv):
            return t
        t += 1
    # Power so small the guard is still dust-distance away; dispatching
    # early is harmless because the dispatch re-solves from fresh state.
    return t


def _candidate_crossing(state: _State) -> tuple[CrossKind, int] | None:
    """The one crossing that can end the current mode, given p_net's sign."""
    cfg = state.scenario.pmic
    _, _, p_nw, _ = state.power_split()
    mode = state.mode.mode
    if mode is Mode.DEEP_SLEEP:
        return None
    if mode is Mode.WAKE_UP:
        if p_nw > 0.0:
            return CrossKind.CHRDY_UP, cfg.v_chrdy.uv
        if p_nw < 0.0:
            return CrossKind.DEPLETED, 0
        return None
    if mode is Mode.NORMAL:
        if p_nw > 0.0:
            return CrossKind.OVCH_UP, cfg.v_ovch.uv
        if p_nw < 0.0:
            return CrossKind.CHRDY_DOWN, cfg.v_chrdy.uv
        return None
    if mode is Mode.OVERCHARGE:
        if p_nw < 0.0:
            return CrossKind.OVCH_DOWN, (cfg.v_ovch - cfg.v_ovch_hysteresis).uv
        return None
    if mode is Mode.SHUTDOWN:
        if p_nw > 0.0:
            return CrossKind.CHRDY_UP, cfg.v_chrdy.uv
        if p_nw < 0.0:
            return CrossKind.DEPLETED, 0
        return None
    raise SimulationError(f"unhandled mode {mode}")


def _reschedule_threshold(state: _State) -> None:
    """Keep exactly one live threshold-crossing event outstanding."""
    state.threshold_gen += 1
    if state.mode.mode is Mode.DEEP_SLEEP:
        # Cold start is driven by the harvester, not the store; it can
        # only become true at a dispatch, so test it right here.
        cold = (
            not state.cold_start_held
            and state.v_harvest >= state.scenario.pmic.v_cold_start
            and state.p_harvest_nw >= state.scenario.pmic.p_cold_start.nw
        )
        if cold:
            state.push(
                Event(state.now, EventKind.THRESHOLD_CROSS, cross=CrossKind.COLD_START,
                      v_target_uv=0, gen=state.threshold_gen)
            )
        return
    candidate = _candidate_crossing(state)
    if candidate is None:
        return
    cross, target_uv = candidate
    t = find_threshold_crossing(state, cross, target_uv)
    if t is None:
        return
    horizon = state.next_time()
    if horizon is not None and t > horizon:
        # p_net cannot change before the next event; recompute then.
        return
    state.push(Event(t, EventKind.THRESHOLD_CROSS, cross=cross, v_target_uv=target_uv,
                     gen=state.threshold_gen))


# -- dispatch ----------------------------------------------------------


def _start_script(state: _State) -> None:
    state.next_step_index = 0
    _start_next_step(state)


def _start_next_step(state: _State) -> None:
    script = state.scenario.load_script
    if state.next_step_index >= len(script):
        # Work complete: firmware clears the latch to drop back to Stage1.
        state.cycles_completed += 1
        state.push(Event(state.now, EventKind.MCU_CLEAR_LATCH))
        return
    step = script[state.next_step_index]
    state.step_gen += 1
    state.active_step = _ActiveStep(state.next_step_index, step, state.now + step.duration.us, state.step_gen)
    state.next_step_index += 1
    state.push(Event(state.active_step.end_us, EventKind.LOAD_STEP_COMPLETE, gen=state.step_gen))


def _abort_step(state: _State, why: str) -> None:
    if state.active_step is None:
        return
    step = state.active_step.step
    state.record_anomaly(
        "load_step_aborted",
        f"{step.name} lost power {why}; pro-rata energy already charged",
    )
    state.active_step = None
    state.step_gen += 1


def _flush_cycle(state: _State) -> None:
    if state.now == state.cycle_start_us and state.cycle_harvested_nj == 0.0 and state.cycle_consumed_nj == 0.0:
        return
    state.cycles.append(
        CycleRow(
            index=len(state.cycles),
            start_us=state.cycle_start_us,
            consumed_nj=state.cycle_consumed_nj,
            harvested_nj=state.cycle_harvested_nj,
            net_nj=state.cycle_harvested_nj - state.cycle_consumed_nj,
            end_soc=state.storage.soc,
        )
    )
    state.cycle_start_us = state.now
    state.cycle_harvested_nj = 0.0
    state.cycle_consumed_nj = 0.0


def _set_lux(state: _State, lux: Illuminance) -> None:
    state.lux = lux
    state.p_harvest_nw = harvest_power(state.scenario.harvester, lux).nw
    state.v_harvest = harvest_voltage(state.scenario.harvester, lux)


def _check_invariants(state: _State) -> None:
    rails = rails_for(state.mode, state.latch.set)  # raises if lv without ao
    if state.stage() is Stage.STAGE2 and not (
        state.mode.mode in (Mode.NORMAL, Mode.OVERCHARGE) and state.latch.set
    ):
        raise SimulationError("Stage2 active without a charged store and a set latch")
    if rails.ao_out and state.mode.mode is Mode.DEEP_SLEEP:
        raise SimulationError("always-on rail up in DeepSleep")
    e = state.storage.e_store.nj
    if not 0.0 <= e <= state.storage.e_capacity.nj:
        raise SimulationError(f"stored energy {e} nJ outside [0, capacity]")
    if not state.latch.set and state.latch.wake_source.value != "none":
        raise SimulationError("cleared latch carries a wake source")


def _dispatch(state: _State, ev: Event) -> bool:
    """Apply one event. Returns False when the event is stale."""
    note_parts: list[str] = []
    kind = ev.kind

    if kind is EventKind.THRESHOLD_CROSS:
        if ev.gen != state.threshold_gen:
            return False
        if ev.cross not in (CrossKind.COLD_START, CrossKind.DEPLETED):
            # Freshness contract: a live crossing lands on its target.
            v = state.v_store().uv
            if abs(v - ev.v_target_uv) > 1:
                raise SimulationError(
                    f"threshold crossing dispatched {abs(v - ev.v_target_uv)} uV off target"
                )
    elif kind is EventKind.LOAD_STEP_COMPLETE:
        if state.active_step is None or ev.gen != state.active_step.gen:
            return False
    elif kind is EventKind.SHUTDOWN_GRACE_EXPIRE:
        if state.mode.mode is not Mode.SHUTDOWN or state.mode.grace_deadline.us != ev.time_us:
            return False

    powered = state.mode.mode is not Mode.DEEP_SLEEP
    stage2_before = state.stage() is Stage.STAGE2

    if kind is EventKind.RTC_ALARM:
        if ev.gen != state.alarm_gen:
            return False
        _flush_cycle(state)
        if powered:
            state.latch, next_alarm = on_rtc_alarm(state.latch, TimePoint(ev.time_us), state.scenario.rtc)
            note_parts.append("latch_set=rtc")
            if state.mode.mode is Mode.SHUTDOWN:
                note_parts.append("compute_rail_unpowered_until_recovery")
            elif state.mode.mode is Mode.WAKE_UP:
                note_parts.append("compute_rail_unpowered_until_charged")
        else:
            next_alarm = TimePoint(ev.time_us) + state.scenario.rtc.alarm_period
            note_parts.append("ignored_unpowered")
        state.push(Event(next_alarm.us, EventKind.RTC_ALARM, gen=state.alarm_gen))

    elif kind is EventKind.TOUCH_PRESS:
        if powered:
            state.latch = on_touch(state.latch, TimePoint(ev.time_us))
            note_parts.append("latch_set=touch")
        else:
            note_parts.append("ignored_unpowered")

    elif kind is EventKind.LOAD_STEP_COMPLETE:
        note_parts.append(f"step_done={state.active_step.step.name}")
        state.active_step = None
        _start_next_step(state)

    elif kind is EventKind.SHUTDOWN_GRACE_EXPIRE:
        pass  # resolved by the mode step below

    elif kind is EventKind.LIGHT_CHANGE:
        _set_lux(state, ev.lux)
        state.cold_start_held = False
        note_parts.append(f"lux={ev.lux.lux!r}")

    elif kind is EventKind.MCU_CLEAR_LATCH:
        if not stage2_before:
            # The compute domain lost power in the same microsecond the
            # clear was issued; the latch keeps its state.
            state.record_anomaly("clear_skipped_unpowered", "latch clear arrived without Stage2 power")
            note_parts.append("clear_skipped_unpowered")
        else:
            if not state.latch.set:
                state.record_anomaly("clear_while_clear", "latch clear issued while already clear")
                note_parts.append("anomalous_noop_clear")
            state.latch = mcu_clear(state.latch, ClearCommand(ClearVia.I2C_COMMAND, TimePoint(ev.time_us)))
            note_parts.append("latch_cleared")
            if state.scenario.rtc.rearm_on_clear:
                state.alarm_gen += 1
                state.push(
                    Event(ev.time_us + state.scenario.rtc.alarm_period.us, EventKind.RTC_ALARM,
                          gen=state.alarm_gen)
                )
                note_parts.append("alarm_rearmed")

    elif kind is EventKind.SIM_END:
        _flush_cycle(state)

    # One mode-machine step per dispatch; cascades arrive as immediate
    # threshold-crossing events scheduled by the recompute below.
    if ev.kind is EventKind.THRESHOLD_CROSS and ev.cross is CrossKind.DEPLETED:
        if state.mode.mode is not Mode.DEEP_SLEEP:
            state.record_anomaly("storage_depleted", f"store empty in {state.mode.mode.value}; forced deep sleep")
            state.mode = PmicMode.deep_sleep()
            state.cold_start_held = True
            note_parts.append("forced_deep_sleep;cold_start_held_until_light_change")
    elif state.mode.mode is Mode.DEEP_SLEEP and state.cold_start_held:
        # Deep sleep's only exit is cold start; while that is held off the
        # step is an identity, and taking it would re-boot into the same
        # brown-out the hold exists to break.
        pass
    else:
        new_mode = step_mode(state.mode, state.scenario.pmic, state.inputs())
        if new_mode != state.mode:
            note_parts.append(f"mode={new_mode.mode.value}")
            if new_mode.mode is Mode.SHUTDOWN:
                state.push(Event(new_mode.grace_deadline.us, EventKind.SHUTDOWN_GRACE_EXPIRE))
            state.mode = new_mode

    # Power loss wipes the latch: the latch logic lives on the rail that
    # just went down.
    if state.mode.mode is Mode.DEEP_SLEEP and state.latch.set:
        state.latch = LatchState.cleared(TimePoint(state.now))
        note_parts.append("latch_lost_power")

    stage2_after = state.stage() is Stage.STAGE2
    if stage2_after and not stage2_before:
        _start_script(state)
        note_parts.append("stage2_entered")
    elif stage2_before and not stage2_after:
        _abort_step(state, f"(mode {state.mode.mode.value})" if state.latch.set else "(latch cleared)")
        note_parts.append("stage2_exited")

    _reschedule_threshold(state)
    _check_invariants(state)

    state.trace.append(
        TraceRecord(
            time_us=ev.time_us,
            kind=ev.label(),
            mode=state.mode.mode.value,
            latch_set=state.latch.set,
            v_store_uv=state.v_store().uv,
            e_store_nj=state.storage.e_store.nj,
            note=";".join(note_parts),
        )
    )
    return True


# -- top level ---------------------------------------------------------


def _settle_initial_mode(state: _State) -> None:
    """Derive the mode the node is actually in at t=0.

    The run opens on a node that has been sitting under the first light
    sample with its opening store charge, so the supervisor is already
    past its transients: a store at or above the charge-ready threshold
    means the system booted long ago (cold start is only the from-empty
    path), a lit harvester with an empty store means it is mid cold
    start, and otherwise it is dark and dead. Deriving this up front
    also keeps a wake trigger scheduled exactly at t=0 from outranking
    the t=0 light sample and landing unpowered.
    """
    cfg = state.scenario.pmic
    v = state.v_store()
    if v >= cfg.v_ovch:
        state.mode = PmicMode.overcharge()
    elif v >= cfg.v_chrdy:
        state.mode = PmicMode.normal()
    elif state.v_harvest >= cfg.v_cold_start and state.p_harvest_nw >= cfg.p_cold_start.nw:
        state.mode = PmicMode.wake_up()
    else:
        state.mode = PmicMode.deep_sleep()


def run(scenario: Scenario) -> Report:
    """Simulate a scenario to completion and return its report."""
    state = _State(scenario)
    _set_lux(state, scenario.light_timeline[0][1])
    _settle_initial_mode(state)
    state.trace.append(
        TraceRecord(
            time_us=0,
            kind="init",
            mode=state.mode.mode.value,
            latch_set=state.latch.set,
            v_store_uv=state.v_store().uv,
            e_store_nj=state.storage.e_store.nj,
            note="settled_from_initial_conditions",
        )
    )
    # The first timeline entry is already in force before settling; only
    # actual changes become events.
    for t, lux in scenario.light_timeline[1:]:
        state.push(Event(t.us, EventKind.LIGHT_CHANGE, lux=lux))
    for t in scenario.touch.press_times:
        state.push(Event(t.us, EventKind.TOUCH_PRESS))
    state.push(Event(scenario.rtc.first_alarm.us, EventKind.RTC_ALARM, gen=state.alarm_gen))
    state.push(Event(scenario.duration.us, EventKind.SIM_END))
    # The opening mode needs its exit crossing on the queue; dispatches
    # keep it current from here on.
    _reschedule_threshold(state)

    while True:
        ev = state.pop()
        if ev.time_us > scenario.duration.us:
            raise SimulationError("event queue ran past the end of the run")
        _advance_to(state, ev.time_us)
        state.events_dispatched += 1
        if state.events_dispatched > _MAX_EVENTS:
            raise SimulationError("event budget exhausted; scenario is livelocked")
        _dispatch(state, ev)
        if ev.kind is EventKind.SIM_END:
            break

    return _finalize(state)


def _finalize(state: _State) -> Report:
    scenario = state.scenario
    residency_us = sum(state.time_in_mode.values())
    if residency_us != state.now:
        raise SimulationError(f"mode residency {residency_us} us does not cover the run ({state.now} us)")

    e_initial = scenario.storage.e_store.nj
    e_final = state.storage.e_store.nj
    for name, nj in state.consumed_nj.items():
        if nj < -1e-6:
            raise SimulationError(f"component {name!r} accrued negative energy ({nj} nJ)")
    consumed_total = sum(state.consumed_nj.values())
    balance = state.e_harvested_nj - consumed_total - state.e_discarded_nj - (e_final - e_initial)
    scale = max(1.0, abs(state.e_harvested_nj), abs(consumed_total), abs(e_final - e_initial))
    if abs(balance) > 1e-6 * scale:
        raise SimulationError(f"energy ledger out of balance by {balance} nJ")

    consumed = tuple((name, Energy(nj)) for name, nj in state.consumed_nj.items())
    return Report(
        scenario=scenario,
        duration_us=state.now,
        e_harvested=Energy(state.e_harvested_nj),
        e_consumed=consumed,
        e_overcharge_discarded=Energy(state.e_discarded_nj),
        e_store_initial=Energy(e_initial),
        e_store_final=Energy(e_final),
        final_soc=state.storage.soc,
        final_voltage=state.v_store(),
        final_mode=state.mode.mode.value,
        mode_residency=tuple((mode.value, Duration(us)) for mode, us in state.time_in_mode.items()),
        cycles=tuple(state.cycles),
        cycles_completed=state.cycles_completed,
        anomalies=tuple(state.anomalies),
        trace=tuple(state.trace),
    )


def format_trace(report: Report) -> str:
    """The run's event trace in its stable line-per-event form."""
    return "\n".join(rec.line() for rec in report.trace) + "\n"
