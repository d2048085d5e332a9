"""Whole-plant simulation: two regulated motors, the fuzzy controller and
the gear train advanced together on a fixed tick.

Signal flow per tick: pedal rates are estimated by a smoothed backward
difference, the fuzzy controller turns pedal state and motor feedback into
two voltage commands, the commands become speed setpoints (scaled linearly;
in balance mode the motor setpoint is instead slaved to the engine speed so
the wheels hold still, and in reverse it is pushed below that balance), the
PI regulators produce armature voltages, both motors integrate one step and
the wheel speed is recomputed from the gear-train mix.

There is no brake torque anywhere in the plant: braking and stopping happen
purely through the speed mixing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import flc, motor
from .errors import ConfigurationError, DivergenceError, StepSizeError
from .gear_train import GearTrainSpec, coefficients, wheel_speed
from .motor import MotorParams, MotorState, RegulatorState, regulator_step


@dataclass(frozen=True)
class PedalState:
    """Driver inputs: pedal fractions and the reverse switch."""

    accel: float = 0.0
    brake: float = 0.0
    reverse: bool = False

    def __post_init__(self):
        if not 0.0 <= self.accel <= 1.0:
            raise ConfigurationError(f"accel must be in [0, 1], got {self.accel}")
        if not 0.0 <= self.brake <= 1.0:
            raise ConfigurationError(f"brake must be in [0, 1], got {self.brake}")


@dataclass(frozen=True)
class ControllerConfig:
    """Scaling and filtering around the fuzzy controller.

    ``volts_to_speed`` maps command volts to rad/s of speed setpoint;
    ``rated_speed`` normalizes the motor feedback.  With the shipped rule
    base (commands spanning 0..8 V) keeping rated_speed == 8 * volts_to_speed
    makes the hold rules reproduce the measured speed exactly.
    """

    volts_to_speed: float = 12.5
    rated_speed: float = 100.0
    idle_speed: float = 25.0  # engine setpoint pinned in reverse mode
    rate_filter_tau: float = 0.05
    grid_points: int = flc.DEFAULT_GRID_POINTS
    rule_base: str | None = None  # path; None loads the shipped controller

    def validate(self) -> None:
        if self.volts_to_speed <= 0:
            raise ConfigurationError("volts_to_speed must be > 0")
        if self.rated_speed <= 0:
            raise ConfigurationError("rated_speed must be > 0")
        if self.rate_filter_tau < 0:
            raise ConfigurationError("rate_filter_tau must be >= 0")
        if self.grid_points < 2:
            raise ConfigurationError("grid_points must be >= 2")


class Plant:
    """Resolved, immutable runtime assembly of the whole drivetrain."""

    def __init__(
        self,
        gear: GearTrainSpec,
        engine_params: MotorParams,
        dc_motor_params: MotorParams,
        regulator: RegulatorState,
        controller: ControllerConfig,
    ):
        gear.validate()
        engine_params.validate()
        dc_motor_params.validate()
        regulator.validate()
        controller.validate()
        self.gear = gear
        self.mix = coefficients(gear)
        # Exact idle/stop coupling: the motor speed that cancels the engine
        # contribution so the arm stands still.
        self.balance_ratio = -gear.n_sun / gear.n_ring
        self.engine_params = engine_params
        self.dc_motor_params = dc_motor_params
        self.regulator_template = replace(regulator, integral=0.0)
        self.controller = controller
        if controller.rule_base is None:
            self.rule_base = flc.pedal_controller(controller.grid_points)
        else:
            self.rule_base = flc.load_rule_base(
                controller.rule_base, grid_points=controller.grid_points
            )

    def initial_state(self) -> "VehicleState":
        return VehicleState(
            time=0.0,
            engine=MotorState(),
            dc_motor=MotorState(),
            omega_arm=0.0,
            engine_reg=self.regulator_template,
            motor_reg=self.regulator_template,
            last_pedals=PedalState(),
        )

    def tick(
        self,
        state: "VehicleState",
        pedals: PedalState,
        dt: float,
        powered: bool = True,
    ) -> tuple["VehicleState", "TraceSample"]:
        """Advance the whole plant by one step of dt seconds.

        With ``powered`` false the controller and regulators are bypassed and
        both armatures see zero volts (the pre-ignition segment of a run).
        """
        if dt <= 0:
            raise StepSizeError(f"dt must be > 0, got {dt}")
        time_next = state.time + dt

        # Pedal press rates: backward difference, first-order smoothing.
        raw_accel = (pedals.accel - state.last_pedals.accel) / dt
        raw_brake = (pedals.brake - state.last_pedals.brake) / dt
        tau = self.controller.rate_filter_tau
        blend = min(dt / tau, 1.0) if tau > 0 else 1.0
        accel_rate = state.accel_rate + blend * (raw_accel - state.accel_rate)
        brake_rate = state.brake_rate + blend * (raw_brake - state.brake_rate)

        if powered:
            feedback = state.dc_motor.speed / self.controller.rated_speed
            command = flc.controller_step(
                self.rule_base, pedals, (accel_rate, brake_rate), feedback
            )
            scale = self.controller.volts_to_speed
            if command.mode is flc.Mode.BALANCE:
                engine_setpoint = scale * command.engine_v
                motor_setpoint = self.balance_ratio * state.engine.speed
            elif command.mode is flc.Mode.REVERSE:
                engine_setpoint = self.controller.idle_speed
                motor_setpoint = (
                    self.balance_ratio * state.engine.speed - scale * command.motor_v
                )
            else:
                engine_setpoint = scale * command.engine_v
                motor_setpoint = scale * command.motor_v
            v_engine, engine_reg = regulator_step(
                state.engine_reg, engine_setpoint, state.engine.speed, dt
            )
            v_motor, motor_reg = regulator_step(
                state.motor_reg, motor_setpoint, state.dc_motor.speed, dt
            )
            mode_label = command.mode.value
            flc_engine_v, flc_motor_v = command.engine_v, command.motor_v
            no_fire = command.no_fire
        else:
            v_engine = v_motor = 0.0
            engine_reg, motor_reg = state.engine_reg, state.motor_reg
            mode_label = "off"
            flc_engine_v = flc_motor_v = 0.0
            no_fire = False

        try:
            engine = motor.step(self.engine_params, state.engine, v_engine, dt)
            dc = motor.step(self.dc_motor_params, state.dc_motor, v_motor, dt)
        except DivergenceError as exc:
            raise DivergenceError(f"t={time_next:.6f} s: {exc}") from exc
        omega_arm = wheel_speed(self.gear, engine.speed, dc.speed)
        if not math.isfinite(omega_arm):
            raise DivergenceError(f"t={time_next:.6f} s: omega_arm is not finite")

        new_state = VehicleState(
            time=time_next,
            engine=engine,
            dc_motor=dc,
            omega_arm=omega_arm,
            engine_reg=engine_reg,
            motor_reg=motor_reg,
            last_pedals=pedals,
            accel_rate=accel_rate,
            brake_rate=brake_rate,
        )
        sample = TraceSample(
            time=time_next,
            accel=pedals.accel,
            brake=pedals.brake,
            reverse=pedals.reverse,
            v_engine=v_engine,
            v_motor=v_motor,
            omega_engine=engine.speed,
            omega_motor=dc.speed,
            omega_arm=omega_arm,
            flc_engine_v=flc_engine_v,
            flc_motor_v=flc_motor_v,
            mode=mode_label,
            no_fire=no_fire,
        )
        return new_state, sample


@dataclass(frozen=True)
class VehicleState:
    """Full dynamic state of the drivetrain between ticks."""

    time: float
    engine: MotorState
    dc_motor: MotorState
    omega_arm: float
    engine_reg: RegulatorState
    motor_reg: RegulatorState
    last_pedals: PedalState
    accel_rate: float = 0.0  # filtered press rates, 1/s
    brake_rate: float = 0.0


@dataclass(frozen=True)
class TraceSample:
    """All recorded signals at the end of one tick."""

    time: float
    accel: float
    brake: float
    reverse: bool
    v_engine: float
    v_motor: float
    omega_engine: float
    omega_motor: float
    omega_arm: float
    flc_engine_v: float
    flc_motor_v: float
    mode: str
    no_fire: bool


def run(scenario) -> Trace:
    """Run a whole scenario and return its trace.

    Ticks from t=0 to the scenario duration at fixed dt, sampling the pedal
    profiles piecewise-linearly at each tick start.  Before ``system_on`` the
    plant is unpowered, which is the flat pre-ignition segment of the traces.
    Bit-deterministic for identical inputs.
    """
    scenario.validate()
    plant = Plant(
        gear=scenario.gear_train,
        engine_params=scenario.engine_motor,
        dc_motor_params=scenario.dc_motor,
        regulator=scenario.regulator,
        controller=scenario.controller,
    )
    ticks = int(round(scenario.duration / scenario.dt))
    state = plant.initial_state()
    samples = []
    for k in range(ticks):
        t = k * scenario.dt
        pedals = scenario.pedals_at(t)
        state, sample = plant.tick(
            state, pedals, scenario.dt, powered=t >= scenario.system_on
        )
        samples.append(sample)
    return Trace.from_samples(samples)


FLOAT_COLUMNS = (
    "time",
    "accel",
    "brake",
    "v_engine",
    "v_motor",
    "omega_engine",
    "omega_motor",
    "omega_arm",
    "flc_engine_v",
    "flc_motor_v",
)


@dataclass(frozen=True)
class Trace:
    """Column-oriented recording of a whole run."""

    time: np.ndarray = field(default_factory=lambda: np.empty(0))
    accel: np.ndarray = field(default_factory=lambda: np.empty(0))
    brake: np.ndarray = field(default_factory=lambda: np.empty(0))
    reverse: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))
    v_engine: np.ndarray = field(default_factory=lambda: np.empty(0))
    v_motor: np.ndarray = field(default_factory=lambda: np.empty(0))
    omega_engine: np.ndarray = field(default_factory=lambda: np.empty(0))
    omega_motor: np.ndarray = field(default_factory=lambda: np.empty(0))
    omega_arm: np.ndarray = field(default_factory=lambda: np.empty(0))
    flc_engine_v: np.ndarray = field(default_factory=lambda: np.empty(0))
    flc_motor_v: np.ndarray = field(default_factory=lambda: np.empty(0))
    mode: np.ndarray = field(default_factory=lambda: np.empty(0, dtype="U8"))
    no_fire: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=bool))

    def __len__(self) -> int:
        return self.time.size

    @classmethod
    def from_samples(cls, samples: list[TraceSample]) -> "Trace":
        if not samples:
            return cls()
        columns = {}
        for name in FLOAT_COLUMNS:
            columns[name] = np.array([getattr(s, name) for s in samples], dtype=float)
        columns["reverse"] = np.array([s.reverse for s in samples], dtype=bool)
        columns["no_fire"] = np.array([s.no_fire for s in samples], dtype=bool)
        columns["mode"] = np.array([s.mode for s in samples], dtype="U8")
        return cls(**columns)
