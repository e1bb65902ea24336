"""Power-management IC mode machine and rail gating.

The PMIC moves between five modes based on the storage-element voltage,
the harvester state, and a grace timer. Mode plus the hardware wake
latch determine which output rails are energised, which in turn defines
the node's operating stage:

  Stage1: only the always-on rail (wake sources and latch logic) is up.
  Stage2: the switched compute rail is additionally up, which requires
          a charged store (Normal or Overcharge) and a set latch.

Threshold comparisons treat boundary equality as belonging to the
higher-energy mode, so a store sitting exactly on a threshold never
oscillates.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .quantities import Current, Duration, Power, TimePoint, Voltage


class Mode(enum.Enum):
    DEEP_SLEEP = "deep_sleep"
    WAKE_UP = "wake_up"
    NORMAL = "normal"
    OVERCHARGE = "overcharge"
    SHUTDOWN = "shutdown"


@dataclass(frozen=True)
class PmicMode:
    """Current mode; Shutdown always carries its grace deadline."""

    mode: Mode
    grace_deadline: TimePoint | None = None

    def __post_init__(self) -> None:
        if (self.mode is Mode.SHUTDOWN) != (self.grace_deadline is not None):
            raise ValueError("grace_deadline is carried by Shutdown and only Shutdown")

    @classmethod
    def deep_sleep(cls) -> "PmicMode":
        return cls(Mode.DEEP_SLEEP)

    @classmethod
    def wake_up(cls) -> "PmicMode":
        return cls(Mode.WAKE_UP)

    @classmethod
    def normal(cls) -> "PmicMode":
        return cls(Mode.NORMAL)

    @classmethod
    def overcharge(cls) -> "PmicMode":
        return cls(Mode.OVERCHARGE)

    @classmethod
    def shutdown(cls, deadline: TimePoint) -> "PmicMode":
        return cls(Mode.SHUTDOWN, deadline)


@dataclass(frozen=True)
class PmicConfig:
    """Threshold and timing parameters of the mode machine.

    The charge-ready and overcharge thresholds are scenario inputs; the
    values below are documented defaults only and the scenario parser
    warns when a file relies on them.
    """

    v_cold_start: Voltage = Voltage.from_millivolts(300)
    p_cold_start: Power = Power.from_microwatts(2.0)
    v_chrdy: Voltage = Voltage.from_volts(3.0)
    v_ovch: Voltage = Voltage.from_volts(3.6)
    v_ovch_hysteresis: Voltage = Voltage.from_millivolts(50)
    grace_window: Duration = Duration.from_millis(600)
    i_quiescent: Current = Current(200)

    def validate(self) -> None:
        if self.v_chrdy >= self.v_ovch:
            raise ValueError(
                f"v_chrdy ({self.v_chrdy.uv} uV) must be below v_ovch ({self.v_ovch.uv} uV)"
            )
        if self.v_ovch_hysteresis.uv <= 0:
            raise ValueError("v_ovch_hysteresis must be positive")
        if (self.v_ovch - self.v_ovch_hysteresis).uv < self.v_chrdy.uv:
            raise ValueError("hysteresis exit voltage falls below v_chrdy")
        if self.grace_window.us <= 0:
            raise ValueError("grace_window must be positive")
        if self.i_quiescent.na < 0:
            raise ValueError("i_quiescent must be non-negative")


@dataclass(frozen=True)
class PmicInputs:
    """Everything a single mode-machine step may look at."""

    v_store: Voltage
    v_harvester: Voltage
    p_harvester: Power
    latch_set: bool
    now: TimePoint


@dataclass(frozen=True)
class RailStates:
    """Which outputs are energised, and at what potential."""

    ao_out: bool
    lv_out: bool
    hv_out_available: bool
    rail_voltage_ao: Voltage = Voltage.from_volts(2.2)
    rail_voltage_lv: Voltage = Voltage.from_volts(2.2)
    rail_voltage_hv: Voltage = Voltage.from_volts(3.3)

    def __post_init__(self) -> None:
        if self.lv_out and not self.ao_out:
            raise ValueError("lv_out cannot be up while ao_out is down")


class Stage(enum.Enum):
    NOT_OPERATING = "not_operating"
    STAGE1 = "stage1"
    STAGE2 = "stage2"


def step_mode(current: PmicMode, cfg: PmicConfig, inputs: PmicInputs) -> PmicMode:
    """Apply at most one mode transition and return the new mode.

    The guards out of any one mode are mutually exclusive; callers that
    need multi-step settling (e.g. WakeUp immediately followed by
    Normal when the store is already charged) re-invoke this per step.
    """
    fired = fired_transitions(current, cfg, inputs)
    if len(fired) > 1:
        raise RuntimeError(f"guard exclusivity violated from {current.mode}: {fired}")
    if not fired:
        return current
    return _apply(fired[0], cfg, inputs)


def fired_transitions(current: PmicMode, cfg: PmicConfig, inputs: PmicInputs) -> list[str]:
    """Names of all transition guards satisfied right now (normally <= 1)."""
    v = inputs.v_store
    fired: list[str] = []
    if current.mode is Mode.DEEP_SLEEP:
        if inputs.v_harvester >= cfg.v_cold_start and inputs.p_harvester >= cfg.p_cold_start:
            fired.append("cold_start")
    elif current.mode is Mode.WAKE_UP:
        if v >= cfg.v_chrdy:
            fired.append("charge_ready")
    elif current.mode is Mode.NORMAL:
        if v >= cfg.v_ovch:
            fired.append("overcharge_enter")
        if v < cfg.v_chrdy:
            fired.append("shutdown_enter")
    elif current.mode is Mode.OVERCHARGE:
        if v <= cfg.v_ovch - cfg.v_ovch_hysteresis:
            fired.append("overcharge_exit")
    elif current.mode is Mode.SHUTDOWN:
        # Recovery wins at the boundary instant; the engine never
        # evaluates a Shutdown mode after its grace deadline has been
        # dispatched, so the two guards stay exclusive via v_store.
        if v >= cfg.v_chrdy:
            fired.append("shutdown_recover")
        elif inputs.now >= current.grace_deadline:
            fired.append("grace_expired")
    return fired


def _apply(guard: str, cfg: PmicConfig, inputs: PmicInputs) -> PmicMode:
    if guard == "cold_start":
        return PmicMode.wake_up()
    if guard in ("charge_ready", "shutdown_recover", "overcharge_exit"):
        return PmicMode.normal()
    if guard == "overcharge_enter":
        return PmicMode.overcharge()
    if guard == "shutdown_enter":
        return PmicMode.shutdown(inputs.now + cfg.grace_window)
    if guard == "grace_expired":
        return PmicMode.deep_sleep()
    raise RuntimeError(f"unknown guard {guard!r}")


def rails_for(mode: PmicMode, latch_set: bool) -> RailStates:
    """Rail gating for a mode/latch pair.

    The always-on rail is cut only in DeepSleep (the store is considered
    depleted there); the switched compute rail needs both a charged
    store and a set wake latch; the boost rail is merely available in
    the charged modes and its loads are accounted per load step.
    """
    powered = mode.mode is not Mode.DEEP_SLEEP
    charged = mode.mode in (Mode.NORMAL, Mode.OVERCHARGE)
    return RailStates(
        ao_out=powered,
        lv_out=charged and latch_set,
        hv_out_available=charged,
    )


def operating_stage(mode: PmicMode, latch_set: bool) -> Stage:
    rails = rails_for(mode, latch_set)
    if rails.lv_out:
        return Stage.STAGE2
    if mode.mode in (Mode.NORMAL, Mode.OVERCHARGE):
        return Stage.STAGE1
    return Stage.NOT_OPERATING
