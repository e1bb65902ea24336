"""Fixed-timestep reference integrator.

A deliberately plain cross-check for the event-driven engine: march the
whole scenario forward on a uniform grid (1 ms by default), re-deriving
every rule on raw floats and ints without the event queue, the analytic
crossing solver, or the shared interpolation helpers. Agreement between
the two routes is what the validation suite asserts; for that reason
this module must not import from the engine's numerical helpers, and
duplicating small pieces of arithmetic here is intentional.

Grid restriction: every externally scheduled time in the scenario
(alarms, touches, light changes, step durations, the grace window, the
run length) must sit on the timestep grid, otherwise the two routes
would disagree for boring reasons.
"""

from __future__ import annotations

from dataclasses import dataclass

from .quantities import Duration, Energy
from .scenario import Scenario, VariantKind

_DEEP_SLEEP, _WAKE_UP, _NORMAL, _OVERCHARGE, _SHUTDOWN = range(5)
_MODE_NAMES = ("deep_sleep", "wake_up", "normal", "overcharge", "shutdown")
_FAR = 1 << 62


class OracleError(ValueError):
    """The scenario cannot be integrated faithfully on this grid."""


@dataclass(frozen=True)
class OracleResult:
    timestep_us: int
    ticks: int
    final_e_store: Energy
    final_mode: str
    transitions: tuple[tuple[int, str], ...]
    e_harvested: Energy
    e_consumed: Energy
    e_consumed_by_component: tuple[tuple[str, Energy], ...]
    e_discarded: Energy
    cycles_completed: int

    @property
    def mode_sequence(self) -> tuple[str, ...]:
        return tuple(name for _, name in self.transitions)


def _require_grid(us: int, dt: int, what: str) -> None:
    if us % dt != 0:
        raise OracleError(f"{what} ({us} us) is off the {dt} us integration grid")


class _Oracle:
    """One integration run; hot state lives in run()'s locals."""

    def __init__(self, scenario: Scenario, dt: int):
        self.scenario = scenario
        self.dt = dt
        s = scenario

        _require_grid(s.duration.us, dt, "sim.duration")
        _require_grid(s.rtc.first_alarm.us, dt, "rtc.first_alarm")
        _require_grid(s.rtc.alarm_period.us, dt, "rtc.alarm_period")
        _require_grid(s.pmic.grace_window.us, dt, "pmic.grace_window")
        for t in s.touch.press_times:
            _require_grid(t.us, dt, "touch press")
        for t, _ in s.light_timeline:
            _require_grid(t.us, dt, "light change")
        for step in s.load_script:
            _require_grid(step.duration.us, dt, f"load step {step.name}")

        # Storage curve as parallel float arrays; energy is soc * capacity.
        self.cap = s.storage.e_capacity.nj
        self.curve_soc = [p[0] for p in s.storage.ocv_curve]
        self.curve_uv = [float(p[1].uv) for p in s.storage.ocv_curve]
        # Threshold comparisons happen on the supervisor's 1 uV reading
        # grid: a voltage within half a microvolt of a threshold already
        # reads as having reached it.
        self.e_chrdy = self._e_at_uv(float(s.pmic.v_chrdy.uv) - 0.5)
        self.e_ovch = self._e_at_uv(float(s.pmic.v_ovch.uv) - 0.5)
        self.e_ovch_exit = self._e_at_uv(
            float((s.pmic.v_ovch - s.pmic.v_ovch_hysteresis).uv) + 0.5)
        self.cold_v_uv = float(s.pmic.v_cold_start.uv)
        self.cold_p_nw = s.pmic.p_cold_start.nw
        self.grace_us = s.pmic.grace_window.us

        self.calib_lux = [p[0].lux for p in s.harvester.calibration]
        self.calib_nw = [p[1].nw for p in s.harvester.calibration]
        self.v_oc_uv = float(s.harvester.v_open_circuit.uv)

        rail_uv = s.always_on.rail_voltage.uv
        if s.dpm_variant.kind is VariantKind.SOFTWARE_SLEEP:
            self.idle_nw = (rail_uv * s.dpm_variant.i_sleep.na) / 1e6
        else:
            self.idle_nw = (rail_uv * s.always_on.total_current.na) / 1e6

        self.step_durations = [step.duration.us for step in s.load_script]
        self.step_powers = [step.power.nw for step in s.load_script]
        self.step_names = [step.name for step in s.load_script]
        self.n_steps = len(s.load_script)

        self.touches = [t.us for t in s.touch.press_times]
        self.lights = [(t.us, lux.lux) for t, lux in s.light_timeline]
        self.period_us = s.rtc.alarm_period.us
        self.rearm = s.rtc.rearm_on_clear

        # Mutable run state (cold side).
        self.e = s.storage.e_store.nj
        self.mode = _DEEP_SLEEP
        self.deadline = _FAR
        self.latch = False
        self.active = False
        self.step_power = 0.0
        self.step_end = _FAR
        self.next_idx = 0
        self.clear_due = False
        self.next_alarm = s.rtc.first_alarm.us
        self.ti = 0
        self.li = 0
        self.lux = 0.0
        self.h_nw = 0.0
        self.v_harv_uv = 0.0
        self.cycles = 0
        self.harvested = 0.0
        self.consumed = 0.0
        self.discarded = 0.0
        self.cold_held = False
        self.step_consumed = [0.0] * self.n_steps
        self.cur_idx = -1
        self.step_started = 0
        self.transitions: list[tuple[int, str]] = []
        # Per-tick increments, refreshed whenever the power split changes.
        self.p_net_tick = 0.0
        self.h_tick = 0.0
        self.c_tick = 0.0
        self.disc_tick = 0.0
        self.next_event_t = 0

    # -- independent lookup arithmetic --------------------------------

    def _e_at_uv(self, uv: float) -> float:
        soc_pts, uv_pts = self.curve_soc, self.curve_uv
        if uv <= uv_pts[0]:
            return soc_pts[0] * self.cap
        for i in range(1, len(uv_pts)):
            if uv <= uv_pts[i]:
                lo_v, hi_v = uv_pts[i - 1], uv_pts[i]
                lo_s, hi_s = soc_pts[i - 1], soc_pts[i]
                if hi_v == lo_v:
                    return lo_s * self.cap
                frac = (uv - lo_v) / (hi_v - lo_v)
                return (lo_s + frac * (hi_s - lo_s)) * self.cap
        return soc_pts[-1] * self.cap

    def _harvest_nw(self, lux: float) -> float:
        xs, ys = self.calib_lux, self.calib_nw
        if lux <= 0.0:
            return 0.0
        prev_x, prev_y = 0.0, 0.0
        for x, y in zip(xs, ys):
            if lux <= x:
                if x == prev_x:
                    return y
                return prev_y + (lux - prev_x) / (x - prev_x) * (y - prev_y)
            prev_x, prev_y = x, y
        # Beyond calibration: extend the last segment's slope.
        if len(xs) >= 2:
            slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
        else:
            slope = ys[-1] / xs[-1] if xs[-1] > 0.0 else 0.0
        return max(0.0, ys[-1] + (lux - xs[-1]) * slope)

    # -- slow paths ----------------------------------------------------

    def _set_mode(self, t: int, mode: int) -> None:
        self.mode = mode
        self.transitions.append((t, _MODE_NAMES[mode]))
        if mode == _DEEP_SLEEP:
            self.latch = False

    def _drain_nw(self) -> float:
        return self.idle_nw + (self.step_power if self.active else 0.0)

    def _settle(self, t: int) -> None:
        """Chase mode transitions to a fixed point at instant t."""
        for _ in range(8):
            m, e = self.mode, self.e
            if m == _DEEP_SLEEP:
                if (not self.cold_held
                        and self.v_harv_uv >= self.cold_v_uv
                        and self.h_nw >= self.cold_p_nw):
                    self._set_mode(t, _WAKE_UP)
                    continue
                return
            if m == _WAKE_UP and e >= self.e_chrdy:
                self._set_mode(t, _NORMAL)
                continue
            if m == _NORMAL:
                if e >= self.e_ovch:
                    self._set_mode(t, _OVERCHARGE)
                    continue
                if e < self.e_chrdy:
                    self.deadline = t + self.grace_us
                    self._set_mode(t, _SHUTDOWN)
                    continue
            if m == _OVERCHARGE and e < self.e_ovch_exit:
                self._set_mode(t, _NORMAL)
                continue
            if m == _SHUTDOWN:
                if e >= self.e_chrdy:
                    self._set_mode(t, _NORMAL)
                    continue
                if t >= self.deadline:
                    self._set_mode(t, _DEEP_SLEEP)
                    continue
            if e <= 0.0 and self.h_nw < self._drain_nw():
                # Too dim to carry the rails yet bright enough for cold
                # start would otherwise re-boot in place forever.
                self.cold_held = True
                self._set_mode(t, _DEEP_SLEEP)
                continue
            return
        raise OracleError("mode settling did not converge")

    def _start_step(self, t: int) -> None:
        if self.next_idx < self.n_steps:
            self.cur_idx = self.next_idx
            self.step_started = t
            self.step_power = self.step_powers[self.next_idx]
            self.step_end = t + self.step_durations[self.next_idx]
            self.active = True
            self.next_idx += 1
        else:
            self.cycles += 1
            self.clear_due = True

    def _charge_step(self, t: int) -> None:
        self.step_consumed[self.cur_idx] += self.step_power * (t - self.step_started) / 1e6

    def _sync_stage2(self, t: int, was_stage2: bool) -> bool:
        now_stage2 = self.latch and self.mode in (_NORMAL, _OVERCHARGE)
        if now_stage2 and not was_stage2:
            self.next_idx = 0
            self._start_step(t)
        elif was_stage2 and not now_stage2 and self.active:
            self._charge_step(t)
            self.active = False
            self.step_end = _FAR
        return now_stage2

    def _resettle(self, t: int) -> None:
        was_stage2 = self.latch and self.mode in (_NORMAL, _OVERCHARGE)
        self._settle(t)
        self._sync_stage2(t, was_stage2)
        self._refresh_ticks()

    def _refresh_ticks(self) -> None:
        dt = self.dt
        if self.mode == _DEEP_SLEEP:
            self.p_net_tick = self.h_tick = self.c_tick = self.disc_tick = 0.0
        else:
            d = self._drain_nw()
            h = self.h_nw
            if self.mode == _OVERCHARGE:
                surplus = h - d
                to_store, disc = min(0.0, surplus), max(0.0, surplus)
            else:
                to_store, disc = h - d, 0.0
            self.p_net_tick = to_store * dt / 1e6
            self.h_tick = h * dt / 1e6
            self.c_tick = d * dt / 1e6
            self.disc_tick = disc * dt / 1e6
        pend = self.next_alarm
        if self.ti < len(self.touches) and self.touches[self.ti] < pend:
            pend = self.touches[self.ti]
        if self.li < len(self.lights) and self.lights[self.li][0] < pend:
            pend = self.lights[self.li][0]
        if self.active and self.step_end < pend:
            pend = self.step_end
        self.next_event_t = pend

    def _slow(self, t: int) -> None:
        """Process everything due at instant t, in trigger-priority order."""
        stage2 = self.latch and self.mode in (_NORMAL, _OVERCHARGE)
        powered = self.mode != _DEEP_SLEEP

        if t == self.next_alarm:
            if powered:
                self.latch = True
            self.next_alarm = t + self.period_us
        while self.ti < len(self.touches) and self.touches[self.ti] == t:
            if powered:
                self.latch = True
            self.ti += 1
        while self.active and self.step_end == t:
            self._charge_step(t)
            self.active = False
            self.step_end = _FAR
            self._start_step(t)
        while self.li < len(self.lights) and self.lights[self.li][0] == t:
            self.lux = self.lights[self.li][1]
            self.li += 1
            self.cold_held = False
            self.h_nw = self._harvest_nw(self.lux)
            self.v_harv_uv = self.v_oc_uv if self.lux > 0.0 else 0.0
        self._settle(t)
        stage2 = self._sync_stage2(t, stage2)
        if self.clear_due:
            self.clear_due = False
            if stage2:
                self.latch = False
                if self.rearm:
                    self.next_alarm = t + self.period_us
                self._sync_stage2(t, stage2)
        self._refresh_ticks()


def run_oracle(scenario: Scenario, timestep: Duration = Duration(1000)) -> OracleResult:
    if timestep.us <= 0:
        raise OracleError("timestep must be positive")
    o = _Oracle(scenario, timestep.us)

    # The opening mode follows straight from the initial conditions,
    # mirroring the engine: a store that is already charged boots the
    # node regardless of light.
    o.lux = o.lights[0][1]
    o.li = 1
    o.h_nw = o._harvest_nw(o.lux)
    o.v_harv_uv = o.v_oc_uv if o.lux > 0.0 else 0.0
    if o.e >= o.e_ovch:
        o.mode = _OVERCHARGE
    elif o.e >= o.e_chrdy:
        o.mode = _NORMAL
    elif o.v_harv_uv >= o.cold_v_uv and o.h_nw >= o.cold_p_nw:
        o.mode = _WAKE_UP
    else:
        o.mode = _DEEP_SLEEP
    o.transitions = [(0, _MODE_NAMES[o.mode])]
    o._refresh_ticks()

    dt = o.dt
    duration = o.scenario.duration.us
    t = 0
    e = o.e
    mode = o.mode
    cap = o.cap
    e_chrdy, e_ovch, e_exit = o.e_chrdy, o.e_ovch, o.e_ovch_exit
    deadline = o.deadline
    p_net, h_tick, c_tick, disc_tick = o.p_net_tick, o.h_tick, o.c_tick, o.disc_tick
    next_event = o.next_event_t
    harvested = consumed = discarded = 0.0
    ticks = 0
    powered_ticks = 0

    while t < duration:
        hit = False
        if t == next_event:
            hit = True
        elif e <= 0.0 and p_net < 0.0:
            hit = True
        elif mode == _NORMAL:
            hit = e >= e_ovch or e < e_chrdy
        elif mode == _WAKE_UP:
            hit = e >= e_chrdy
        elif mode == _OVERCHARGE:
            hit = e < e_exit
        elif mode == _SHUTDOWN:
            hit = e >= e_chrdy or t >= deadline
        if hit:
            o.e = e
            o.harvested = harvested
            o.consumed = consumed
            o.discarded = discarded
            o._slow(t)
            e, mode, deadline = o.e, o.mode, o.deadline
            p_net, h_tick, c_tick, disc_tick = o.p_net_tick, o.h_tick, o.c_tick, o.disc_tick
            next_event = o.next_event_t
            harvested, consumed, discarded = o.harvested, o.consumed, o.discarded

        if mode:
            powered_ticks += 1
            e += p_net
            harvested += h_tick
            consumed += c_tick
            discarded += disc_tick
            if e >= cap:
                discarded += e - cap
                e = cap
            elif e <= 0.0:
                consumed += e  # undo the part the store could not supply
                e = 0.0
                if p_net < 0.0:
                    o.e = e
                    o.harvested = harvested
                    o.consumed = consumed
                    o.discarded = discarded
                    o._resettle(t + dt)
                    mode, deadline = o.mode, o.deadline
                    p_net, h_tick, c_tick, disc_tick = (
                        o.p_net_tick, o.h_tick, o.c_tick, o.disc_tick)
                    next_event = o.next_event_t
        t += dt
        ticks += 1

    # Triggers scheduled exactly at the end still fire before the report.
    o.e = e
    o.harvested = harvested
    o.consumed = consumed
    o.discarded = discarded
    o._slow(duration)
    if o.active:
        o._charge_step(duration)

    components: dict[str, float] = {"always_on": o.idle_nw * powered_ticks * dt / 1e6}
    for name, nj in zip(o.step_names, o.step_consumed):
        components[name] = components.get(name, 0.0) + nj

    return OracleResult(
        timestep_us=dt,
        ticks=ticks,
        final_e_store=Energy(o.e),
        final_mode=_MODE_NAMES[o.mode],
        transitions=tuple(o.transitions),
        e_harvested=Energy(o.harvested),
        e_consumed=Energy(o.consumed),
        e_consumed_by_component=tuple(
            (name, Energy(nj)) for name, nj in components.items()),
        e_discarded=Energy(o.discarded),
        cycles_completed=o.cycles,
    )


# -- comparison glue ---------------------------------------------------


def engine_mode_sequence(report) -> tuple[str, ...]:
    """Mode names in order of change, as the engine trace recorded them."""
    seq: list[str] = []
    for rec in report.trace:
        if not seq or rec.mode != seq[-1]:
            seq.append(rec.mode)
    return tuple(seq)


@dataclass(frozen=True)
class Agreement:
    sequences_match: bool
    engine_sequence: tuple[str, ...]
    oracle_sequence: tuple[str, ...]
    e_store_rel_error: float
    components_rel_error: float
    cycles_match: bool

    @property
    def ok(self) -> bool:
        return (self.sequences_match
                and self.cycles_match
                and self.e_store_rel_error <= 1e-3
                and self.components_rel_error <= 1e-3)


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def compare_with_engine(report, result: OracleResult) -> Agreement:
    eng_seq = engine_mode_sequence(report)
    orc_seq = result.mode_sequence
    eng_comp = {name: e.nj for name, e in report.e_consumed}
    orc_comp = {name: e.nj for name, e in result.e_consumed_by_component}
    worst = 0.0
    for name in eng_comp.keys() | orc_comp.keys():
        worst = max(worst, _rel(eng_comp.get(name, 0.0), orc_comp.get(name, 0.0)))
    return Agreement(
        sequences_match=eng_seq == orc_seq,
        engine_sequence=eng_seq,
        oracle_sequence=orc_seq,
        e_store_rel_error=_rel(report.e_store_final.nj, result.final_e_store.nj),
        components_rel_error=worst,
        cycles_match=report.cycles_completed == result.cycles_completed,
    )
