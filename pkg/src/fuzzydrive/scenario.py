"""Scenario files: driving experiments as piecewise-linear pedal profiles.

A scenario is one YAML document.  Every plant parameter has a default, so a
bare file with just a name, a duration and pedal knots reproduces the stock
drivetrain setup.  ``save_scenario`` writes the fully default-filled form,
and loading that file back yields an equal spec.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass, fields, replace
from pathlib import Path

import yaml

from .errors import ScenarioParseError, ScenarioValidationError
from .gear_train import DEFAULT_TRAIN, GearTrainSpec
from .motor import DC_MOTOR, ENGINE_MOTOR, MotorParams, RegulatorState
from .sim import ControllerConfig, PedalState

SHIPPED_SCENARIOS = (
    "idle",
    "accelerate",
    "cruise",
    "decelerate",
    "stop",
    "reverse",
)

Knots = tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ScenarioSpec:
    """A validated driving experiment plus its plant configuration."""

    name: str
    duration: float
    dt: float = 1e-3
    system_on: float = 0.0
    accel: Knots = ((0.0, 0.0),)
    brake: Knots = ((0.0, 0.0),)
    reverse: tuple[tuple[float, bool], ...] = ()
    gear_train: GearTrainSpec = DEFAULT_TRAIN
    engine_motor: MotorParams = ENGINE_MOTOR
    dc_motor: MotorParams = DC_MOTOR
    regulator: RegulatorState = RegulatorState()
    controller: ControllerConfig = ControllerConfig()

    def validate(self) -> None:
        if self.duration < 0:
            raise ScenarioValidationError(f"duration must be >= 0, got {self.duration}")
        if self.dt <= 0:
            raise ScenarioValidationError(f"dt must be > 0, got {self.dt}")
        if self.system_on < 0:
            raise ScenarioValidationError(
                f"system_on must be >= 0, got {self.system_on}"
            )
        for field_name in ("accel", "brake"):
            knots = getattr(self, field_name)
            if not knots:
                raise ScenarioValidationError(f"{field_name}: profile needs a knot")
            times = [t for t, _ in knots]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ScenarioValidationError(
                    f"{field_name}: knot times must be strictly increasing"
                )
            for t, value in knots:
                if not 0.0 <= value <= 1.0:
                    raise ScenarioValidationError(
                        f"{field_name}: value {value} at t={t} is outside [0, 1]"
                    )
        times = [t for t, _ in self.reverse]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ScenarioValidationError(
                "reverse: switch times must be strictly increasing"
            )
        self.gear_train.validate()
        self.engine_motor.validate()
        self.dc_motor.validate()
        self.regulator.validate()
        self.controller.validate()

    def pedals_at(self, t: float) -> PedalState:
        return PedalState(
            accel=_interpolate(self.accel, t),
            brake=_interpolate(self.brake, t),
            reverse=self.reverse_at(t),
        )

    def reverse_at(self, t: float) -> bool:
        state = False
        for switch_time, value in self.reverse:
            if switch_time > t:
                break
            state = bool(value)
        return state


def _interpolate(knots: Knots, t: float) -> float:
    times = [k[0] for k in knots]
    if t <= times[0]:
        return knots[0][1]
    if t >= times[-1]:
        return knots[-1][1]
    right = bisect_right(times, t)
    t0, v0 = knots[right - 1]
    t1, v1 = knots[right]
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0)


# --------------------------------------------------------------------------
# YAML (de)serialization


def scenario_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "name": spec.name,
        "duration": spec.duration,
        "dt": spec.dt,
        "system_on": spec.system_on,
        "accel": [[t, v] for t, v in spec.accel],
        "brake": [[t, v] for t, v in spec.brake],
        "reverse": [[t, bool(v)] for t, v in spec.reverse],
        "gear_train": _dataclass_dict(spec.gear_train),
        "engine_motor": _dataclass_dict(spec.engine_motor),
        "dc_motor": _dataclass_dict(spec.dc_motor),
        "regulator": _dataclass_dict(spec.regulator, skip=("integral",)),
        "controller": _dataclass_dict(spec.controller),
    }


def _dataclass_dict(obj, skip=()) -> dict:
    return {
        f.name: getattr(obj, f.name) for f in fields(obj) if f.name not in skip
    }


def _build_section(cls, mapping, section, default):
    if mapping is None:
        return default
    if not isinstance(mapping, dict):
        raise ScenarioValidationError(f"{section}: expected a mapping")
    known = {f.name for f in fields(cls)}
    unknown = set(mapping) - known
    if unknown:
        raise ScenarioValidationError(
            f"{section}: unknown field(s) {sorted(unknown)}"
        )
    return replace(default, **mapping)


def _knots(raw, field_name) -> Knots:
    if raw is None:
        return ((0.0, 0.0),)
    try:
        return tuple((float(t), float(v)) for t, v in raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioValidationError(
            f"{field_name}: expected [time, value] pairs ({exc})"
        ) from None


def scenario_from_dict(data: dict) -> ScenarioSpec:
    if not isinstance(data, dict):
        raise ScenarioValidationError("scenario document must be a mapping")
    known = {
        "name",
        "duration",
        "dt",
        "system_on",
        "accel",
        "brake",
        "reverse",
        "gear_train",
        "engine_motor",
        "dc_motor",
        "regulator",
        "controller",
    }
    unknown = set(data) - known
    if unknown:
        raise ScenarioValidationError(f"unknown top-level field(s) {sorted(unknown)}")
    if "name" not in data:
        raise ScenarioValidationError("missing required field 'name'")
    if "duration" not in data:
        raise ScenarioValidationError("missing required field 'duration'")

    reverse_raw = data.get("reverse") or ()
    try:
        reverse = tuple((float(t), bool(v)) for t, v in reverse_raw)
    except (TypeError, ValueError) as exc:
        raise ScenarioValidationError(
            f"reverse: expected [time, on/off] pairs ({exc})"
        ) from None

    defaults = ScenarioSpec(name="", duration=0.0)
    spec = ScenarioSpec(
        name=str(data["name"]),
        duration=float(data["duration"]),
        dt=float(data.get("dt", defaults.dt)),
        system_on=float(data.get("system_on", defaults.system_on)),
        accel=_knots(data.get("accel"), "accel"),
        brake=_knots(data.get("brake"), "brake"),
        reverse=reverse,
        gear_train=_build_section(
            GearTrainSpec, data.get("gear_train"), "gear_train", DEFAULT_TRAIN
        ),
        engine_motor=_build_section(
            MotorParams, data.get("engine_motor"), "engine_motor", ENGINE_MOTOR
        ),
        dc_motor=_build_section(
            MotorParams, data.get("dc_motor"), "dc_motor", DC_MOTOR
        ),
        regulator=_build_section(
            RegulatorState, data.get("regulator"), "regulator", RegulatorState()
        ),
        controller=_build_section(
            ControllerConfig, data.get("controller"), "controller", ControllerConfig()
        ),
    )
    spec.validate()
    return spec


def load_scenario(path) -> ScenarioSpec:
    """Load and validate one scenario YAML file."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        where = ""
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            where = f" (line {mark.line + 1}, column {mark.column + 1})"
        raise ScenarioParseError(f"{path}: {exc}{where}") from exc
    try:
        return scenario_from_dict(data)
    except ScenarioValidationError as exc:
        raise ScenarioValidationError(f"{path}: {exc}") from None


def save_scenario(spec: ScenarioSpec, path) -> None:
    """Write the fully default-filled YAML form of a scenario."""
    with open(path, "w", encoding="utf-8") as handle:
        yaml.safe_dump(scenario_to_dict(spec), handle, sort_keys=False)


def shipped_scenario_path(name: str) -> Path:
    """Filesystem path of one of the six shipped scenario files."""
    if name not in SHIPPED_SCENARIOS:
        raise ScenarioValidationError(
            f"unknown shipped scenario {name!r}; choose from {SHIPPED_SCENARIOS}"
        )
    from importlib import resources

    return Path(str(resources.files("fuzzydrive.data").joinpath(f"{name}.yaml")))
