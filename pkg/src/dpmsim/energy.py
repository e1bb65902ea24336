"""Storage element, harvester calibration, and energy budgeting.

State of charge is tracked in energy terms (nJ). The open-circuit
voltage curve maps state of charge to the voltage the mode machine
compares against its thresholds; because the curve is monotone, every
threshold voltage corresponds to a single stored-energy level, which is
what makes exact crossing prediction possible in the event engine.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .quantities import Current, Duration, Energy, Illuminance, Power, Voltage, energy_of, power_of

# 1 mAh moves 3.6 coulombs; times nominal volts gives the energy equivalent.
_JOULES_PER_MAH_VOLT = 3.6


@dataclass(frozen=True)
class StorageElement:
    """A rechargeable store with a piecewise-linear OCV curve."""

    capacity_mah: float
    nominal_voltage: Voltage
    initial_soc: float
    ocv_curve: tuple[tuple[float, Voltage], ...]
    e_capacity: Energy
    e_store: Energy

    @classmethod
    def create(
        cls,
        capacity_mah: float,
        nominal_voltage: Voltage,
        ocv_curve: tuple[tuple[float, Voltage], ...],
        initial_soc: float,
    ) -> "StorageElement":
        e_capacity = Energy.from_joules(capacity_mah * _JOULES_PER_MAH_VOLT * nominal_voltage.volts)
        store = cls(
            capacity_mah=capacity_mah,
            nominal_voltage=nominal_voltage,
            initial_soc=initial_soc,
            ocv_curve=tuple((float(s), v) for s, v in ocv_curve),
            e_capacity=e_capacity,
            e_store=Energy(initial_soc * e_capacity.nj),
        )
        store.validate()
        return store

    def validate(self) -> None:
        if self.capacity_mah <= 0:
            raise ValueError("storage capacity must be positive")
        if not 0.0 <= self.initial_soc <= 1.0:
            raise ValueError(f"initial_soc must lie in [0, 1], got {self.initial_soc}")
        curve = self.ocv_curve
        if len(curve) < 2 or curve[0][0] != 0.0 or curve[-1][0] != 1.0:
            raise ValueError("ocv_curve must span soc 0 through soc 1")
        for (s0, v0), (s1, v1) in zip(curve, curve[1:]):
            if s1 <= s0:
                raise ValueError(f"ocv_curve soc values must be strictly increasing ({s0} -> {s1})")
            if v1.uv < v0.uv:
                raise ValueError(f"ocv_curve voltages must be non-decreasing ({v0.uv} -> {v1.uv})")

    def with_energy(self, e: Energy) -> "StorageElement":
        return replace(self, e_store=e)

    @property
    def soc(self) -> float:
        return self.e_store.nj / self.e_capacity.nj

    @property
    def v_empty(self) -> Voltage:
        return self.ocv_curve[0][1]

    @property
    def v_full(self) -> Voltage:
        return self.ocv_curve[-1][1]


def _ocv_uv(curve: tuple[tuple[float, Voltage], ...], soc: float) -> float:
    for (s0, v0), (s1, v1) in zip(curve, curve[1:]):
        if soc <= s1:
            return v0.uv + (v1.uv - v0.uv) * (soc - s0) / (s1 - s0)
    return float(curve[-1][1].uv)


def _soc_at_uv(curve: tuple[tuple[float, Voltage], ...], uv: float) -> float:
    # First matching segment wins; a flat segment maps to its left knee.
    for (s0, v0), (s1, v1) in zip(curve, curve[1:]):
        if uv <= v1.uv:
            if v1.uv == v0.uv:
                return s0
            return s0 + (s1 - s0) * (uv - v0.uv) / (v1.uv - v0.uv)
    return curve[-1][0]


def ocv(storage: StorageElement, soc: float) -> Voltage:
    """Open-circuit voltage at a state of charge, on the 1 uV grid."""
    if not 0.0 <= soc <= 1.0:
        raise ValueError(f"soc must lie in [0, 1], got {soc}")
    return Voltage(round(_ocv_uv(storage.ocv_curve, soc)))

def soc_at_voltage(storage: StorageElement, v: Voltage) -> float:
    """Inverse of the OCV curve; errors outside the curve's range."""
    if not storage.v_empty.uv <= v.uv <= storage.v_full.uv:
        raise ValueError(
            f"voltage {v.uv} uV outside OCV range [{storage.v_empty.uv}, {storage.v_full.uv}] uV"
        )
    return _soc_at_uv(storage.ocv_curve, v.uv)


def energy_at_voltage(storage: StorageElement, uv: float) -> Energy:
    """Stored energy at which the terminal voltage reaches ``uv``.

    Accepts a fractional microvolt target so crossing prediction can aim
    half a grid step past a threshold and land on the right side of the
    integer-voltage comparison.
    """
    if not storage.v_empty.uv <= uv <= storage.v_full.uv:
        raise ValueError(
            f"voltage {uv} uV outside OCV range [{storage.v_empty.uv}, {storage.v_full.uv}] uV"
        )
    return Energy(_soc_at_uv(storage.ocv_curve, uv) * storage.e_capacity.nj)


def storage_voltage(storage: StorageElement) -> Voltage:
    """Terminal voltage for the current stored energy."""
    soc = min(1.0, max(0.0, storage.soc))
    return Voltage(round(_ocv_uv(storage.ocv_curve, soc)))


@dataclass(frozen=True)
class ClampResult:
    """Outcome of one integration interval against the storage limits."""

    storage: StorageElement
    clipped_high: Energy
    clipped_low: Energy


def apply_net_power(storage: StorageElement, p_net: Power, dt: Duration) -> ClampResult:
    """Integrate a constant net power over dt, clamping at both ends.

    Energy pushed past full capacity or drawn past empty is reported to
    the caller rather than silently lost, so the engine can keep its
    conservation ledger exact.
    """
    if dt.us < 0:
        raise ValueError(f"apply_net_power requires a non-negative dt, got {dt.us} us")
    e_new = storage.e_store.nj + energy_of(p_net, dt).nj
    clipped_high = 0.0
    clipped_low = 0.0
    if e_new > storage.e_capacity.nj:
        clipped_high = e_new - storage.e_capacity.nj
        e_new = storage.e_capacity.nj
    elif e_new < 0.0:
        clipped_low = -e_new
        e_new = 0.0
    return ClampResult(storage.with_energy(Energy(e_new)), Energy(clipped_high), Energy(clipped_low))


@dataclass(frozen=True)
class HarvesterModel:
    """Piecewise-linear lux-to-power calibration with an implicit origin.

    Below the first calibration point the curve runs linearly from
    (0 lux, 0 W); above the last point the final segment extrapolates.
    The open-circuit voltage stands in for the transducer potential the
    cold-start comparator sees; it is a constant whenever light is
    present because the cell voltage saturates far above the cold-start
    minimum at any usable illuminance.
    """

    calibration: tuple[tuple[Illuminance, Power], ...]
    v_open_circuit: Voltage = Voltage.from_volts(1.2)

    def validate(self) -> None:
        if not self.calibration:
            raise ValueError("harvester calibration needs at least one point")
        prev_lux = 0.0
        prev_nw = 0.0
        for lux, p in self.calibration:
            if lux.lux <= prev_lux:
                raise ValueError(f"calibration lux values must be strictly increasing ({prev_lux} -> {lux.lux})")
            if p.nw < prev_nw:
                raise ValueError(f"calibration power must be non-decreasing ({prev_nw} -> {p.nw} nW)")
            prev_lux, prev_nw = lux.lux, p.nw


def harvest_power(model: HarvesterModel, lux: Illuminance) -> Power:
    """Harvested power at an illuminance level."""
    x = lux.lux
    if x < 0:
        raise ValueError(f"illuminance cannot be negative, got {x}")
    points = [(0.0, 0.0)] + [(l.lux, p.nw) for l, p in model.calibration]
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        if x <= x1:
            return Power(y0 + (y1 - y0) * (x - x0) / (x1 - x0))
    x0, y0 = points[-2]
    x1, y1 = points[-1]
    return Power(y1 + (y1 - y0) * (x - x1) / (x1 - x0))


def harvest_voltage(model: HarvesterModel, lux: Illuminance) -> Voltage:
    return model.v_open_circuit if lux.lux > 0 else Voltage(0)


@dataclass(frozen=True)
class AlwaysOnBudget:
    """Current budget of everything on the always-on rail.

    fixed_cycle_energy, when set, replaces the computed always-on term
    in cycle summaries with a pre-measured per-cycle figure; the event
    engine itself always integrates from the currents.
    """

    i_pmic: Current = Current(200)
    i_rtc: Current = Current(45)
    i_touch: Current = Current(65)
    i_extra_leakage: Current = Current(142)
    rail_voltage: Voltage = Voltage.from_volts(2.2)
    fixed_cycle_energy: Energy | None = None

    @property
    def total_current(self) -> Current:
        return self.i_pmic + self.i_rtc + self.i_touch + self.i_extra_leakage

    def validate(self) -> None:
        for name in ("i_pmic", "i_rtc", "i_touch", "i_extra_leakage"):
            if getattr(self, name).na < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.rail_voltage.uv <= 0:
            raise ValueError("rail_voltage must be positive")
        if self.fixed_cycle_energy is not None and self.fixed_cycle_energy.nj < 0:
            raise ValueError("fixed_cycle_energy must be non-negative")


def always_on_power(budget: AlwaysOnBudget) -> Power:
    return power_of(budget.rail_voltage, budget.total_current)


class Rail(enum.Enum):
    LV = "lv"
    HV = "hv"


@dataclass(frozen=True)
class LoadStep:
    """One scripted wake activity drawing a fixed energy over a fixed time."""

    name: str
    duration: Duration
    energy: Energy
    rail: Rail = Rail.LV

    @property
    def power(self) -> Power:
        if self.duration.us == 0:
            return Power(0.0)
        return Power(self.energy.nj / self.duration.us * 1e6)

    def validate(self) -> None:
        if self.duration.us < 0:
            raise ValueError(f"load step {self.name!r} has a negative duration")
        if self.energy.nj < 0:
            raise ValueError(f"load step {self.name!r} has negative energy")
        if self.duration.us == 0 and self.energy.nj > 0:
            raise ValueError(f"load step {self.name!r} draws energy over zero time")


def validate_script(script: tuple[LoadStep, ...]) -> None:
    seen: set[str] = set()
    for step in script:
        step.validate()
        if step.name in seen:
            raise ValueError(f"duplicate load step name {step.name!r}")
        seen.add(step.name)


def script_duration(script: tuple[LoadStep, ...]) -> Duration:
    total = Duration(0)
    for step in script:
        total = total + step.duration
    return total


def cycle_energy(
    script: tuple[LoadStep, ...],
    budget: AlwaysOnBudget,
    sleep: Duration,
    always_on_energy: Energy | None = None,
) -> Energy:
    """Energy drawn over one wake burst plus the following sleep phase.

    The always-on rail drains for the whole cycle (sleep plus the burst
    itself); that term is computed from the budget unless a pre-measured
    per-cycle figure overrides it.
    """
    if sleep.us < 0:
        raise ValueError("sleep duration cannot be negative")
    total = Energy(0.0)
    for step in script:
        total = total + step.energy
    if always_on_energy is None:
        always_on_energy = budget.fixed_cycle_energy
    if always_on_energy is None:
        always_on_energy = energy_of(always_on_power(budget), sleep + script_duration(script))
    return total + always_on_energy


def cycle_net_gain(
    harvest: Power,
    script: tuple[LoadStep, ...],
    budget: AlwaysOnBudget,
    sleep: Duration,
    always_on_energy: Energy | None = None,
) -> Energy:
    """Harvested minus consumed energy over one full cycle."""
    cycle = sleep + script_duration(script)
    return energy_of(harvest, cycle) - cycle_energy(script, budget, sleep, always_on_energy)
