"""Armature-controlled DC motor dynamics and the per-motor speed regulator.

Both power sources of the drivetrain (the engine stand-in and the battery
motor) share this model: a second-order electro-mechanical state (armature
current, shaft speed) driven by armature voltage.  The load torque opposes
the current direction of motion and vanishes at rest, so forward and
reverse operation are symmetric.

The regulator is a PI speed loop with output clamping and a frozen-integral
anti-windup, stepped at the simulation tick.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import ConfigurationError, DivergenceError, StepSizeError


@dataclass(frozen=True)
class MotorParams:
    """Electromechanical constants.

    ``motor_constant`` serves as both torque constant (N*m/A) and back-EMF
    constant (V*s/rad); the two are numerically equal in SI units.
    """

    inertia: float  # J, N*m*s^2/rad
    damping: float  # b, N*m*s/rad
    motor_constant: float  # k, N*m/A
    resistance: float  # R, ohm
    inductance: float  # L, H
    load_torque: float = 0.0  # T, N*m, applied against the motion direction

    def validate(self) -> None:
        if self.inertia <= 0:
            raise ConfigurationError(f"inertia must be > 0, got {self.inertia}")
        if self.inductance <= 0:
            raise ConfigurationError(f"inductance must be > 0, got {self.inductance}")
        if self.resistance <= 0:
            raise ConfigurationError(f"resistance must be > 0, got {self.resistance}")
        if self.motor_constant <= 0:
            raise ConfigurationError(
                f"motor_constant must be > 0, got {self.motor_constant}"
            )
        if self.damping < 0:
            raise ConfigurationError(f"damping must be >= 0, got {self.damping}")
        if self.load_torque < 0:
            raise ConfigurationError(
                f"load_torque must be >= 0, got {self.load_torque}"
            )


@dataclass(frozen=True)
class MotorState:
    """Armature current (A) and shaft speed (rad/s)."""

    current: float = 0.0
    speed: float = 0.0


# Drivetrain parameter sets: the engine is emulated by a second armature
# controlled DC motor with a higher motor constant.
ENGINE_MOTOR = MotorParams(
    inertia=0.01,
    damping=0.1,
    motor_constant=10.0,
    resistance=1.0,
    inductance=0.5,
    load_torque=0.001,
)
DC_MOTOR = replace(ENGINE_MOTOR, motor_constant=8.0)


def _derivs(
    params: MotorParams, current: float, speed: float, voltage: float
) -> tuple[float, float]:
    load = math.copysign(params.load_torque, speed) if speed else 0.0
    di = (
        voltage - params.resistance * current - params.motor_constant * speed
    ) / params.inductance
    dw = (
        params.motor_constant * current - params.damping * speed - load
    ) / params.inertia
    return di, dw


def derivatives(
    params: MotorParams, state: MotorState, voltage: float
) -> tuple[float, float]:
    """State derivatives (dI/dt, domega/dt) at constant applied voltage."""
    return _derivs(params, state.current, state.speed, voltage)


def step(params: MotorParams, state: MotorState, voltage: float, dt: float) -> MotorState:
    """One classical 4th-order fixed step with the voltage held constant."""
    if dt <= 0:
        raise StepSizeError(f"dt must be > 0, got {dt}")
    i, w = state.current, state.speed
    k1i, k1w = _derivs(params, i, w, voltage)
    k2i, k2w = _derivs(params, i + 0.5 * dt * k1i, w + 0.5 * dt * k1w, voltage)
    k3i, k3w = _derivs(params, i + 0.5 * dt * k2i, w + 0.5 * dt * k2w, voltage)
    k4i, k4w = _derivs(params, i + dt * k3i, w + dt * k3w, voltage)
    new = MotorState(
        current=i + dt / 6.0 * (k1i + 2 * k2i + 2 * k3i + k4i),
        speed=w + dt / 6.0 * (k1w + 2 * k2w + 2 * k3w + k4w),
    )
    if not (math.isfinite(new.current) and math.isfinite(new.speed)):
        raise DivergenceError(
            f"motor state diverged during step (dt={dt}, voltage={voltage})"
        )
    return new


def simulate(
    params: MotorParams,
    state: MotorState,
    voltage: float,
    duration: float,
    dt: float = 1e-3,
) -> MotorState:
    """Integrate at fixed voltage for ``duration`` seconds."""
    for _ in range(int(round(duration / dt))):
        state = step(params, state, voltage, dt)
    return state


def steady_state_speed(params: MotorParams, voltage: float) -> float:
    """Equilibrium speed for a constant voltage (positive-speed branch).

    Closed form (k*V - R*T) / (k^2 + R*b), used as the analytic oracle for
    the integrator.
    """
    params.validate()
    k = params.motor_constant
    return (k * voltage - params.resistance * params.load_torque) / (
        k * k + params.resistance * params.damping
    )


@dataclass(frozen=True)
class RegulatorState:
    """PI speed regulator: gains, accumulated error and output bounds."""

    kp: float = 5.0  # V*s/rad
    ki: float = 40.0  # V/rad
    integral: float = 0.0  # accumulated speed error, rad
    v_min: float = -1200.0
    v_max: float = 1200.0

    def validate(self) -> None:
        if not self.v_min < self.v_max:
            raise ConfigurationError(
                f"regulator bounds must satisfy v_min < v_max, got "
                f"[{self.v_min}, {self.v_max}]"
            )
        if not math.isfinite(self.integral):
            raise ConfigurationError("regulator integral is not finite")


def regulator_step(
    reg: RegulatorState, speed_setpoint: float, speed_measured: float, dt: float
) -> tuple[float, RegulatorState]:
    """One PI update; returns the clamped voltage and the updated state.

    The integral is frozen while the output saturates, so the regulator
    recovers immediately when the error changes sign.
    """
    if dt <= 0:
        raise StepSizeError(f"dt must be > 0, got {dt}")
    error = speed_setpoint - speed_measured
    candidate = reg.integral + error * dt
    voltage = reg.kp * error + reg.ki * candidate
    if voltage > reg.v_max:
        return reg.v_max, reg
    if voltage < reg.v_min:
        return reg.v_min, reg
    return voltage, replace(reg, integral=candidate)
