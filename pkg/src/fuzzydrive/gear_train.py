"""Kinematics of the two-input epicyclic gear train.

The train couples the engine-motor shaft (sun, ``n_sun`` teeth), the
battery-driven DC motor shaft (ring, ``n_ring`` teeth) and the wheel shaft
(planet carrier / arm).  With both gears driven the arm speed is a fixed
convex combination of the two input speeds; the weights depend only on the
tooth counts.  Everything here is pure arithmetic on immutable values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, DegenerateRatioError, NumericInputError

MIN_TEETH = 4


@dataclass(frozen=True)
class GearTrainSpec:
    """Tooth counts of the epicyclic train.

    ``check_mesh`` may be disabled to evaluate the speed-mix formula for
    tooth counts that could not physically mesh (unit tests only); the mix
    itself involves only the sun and the ring.
    """

    n_sun: int
    n_planet: int
    n_ring: int
    check_mesh: bool = True

    def validate(self) -> None:
        for name in ("n_sun", "n_planet", "n_ring"):
            count = getattr(self, name)
            if not isinstance(count, int) or isinstance(count, bool):
                raise ConfigurationError(f"{name} must be an integer, got {count!r}")
            if count < MIN_TEETH:
                raise ConfigurationError(
                    f"{name}={count} violates the minimum tooth count {MIN_TEETH}"
                )
        if self.check_mesh and self.n_ring != self.n_sun + 2 * self.n_planet:
            raise ConfigurationError(
                f"meshing condition n_ring = n_sun + 2*n_planet violated: "
                f"{self.n_ring} != {self.n_sun} + 2*{self.n_planet}"
            )


@dataclass(frozen=True)
class MixCoefficients:
    """Weights of the arm-speed mix: engine weight + motor weight = 1."""

    c_engine: float
    c_motor: float


def coefficients(spec: GearTrainSpec) -> MixCoefficients:
    """Speed-mix weights from the tooth counts.

    c_engine = n_sun / (n_sun + n_ring), c_motor = n_ring / (n_sun + n_ring).
    Both come from the same integer denominator, so the weights partition
    unity exactly in floating point.
    """
    spec.validate()
    total = spec.n_sun + spec.n_ring
    return MixCoefficients(c_engine=spec.n_sun / total, c_motor=spec.n_ring / total)


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise NumericInputError(f"{name} is not finite: {value!r}")


def wheel_speed(spec: GearTrainSpec, omega_engine: float, omega_motor: float) -> float:
    """Arm (wheel) speed for the given input shaft speeds, rad/s."""
    _require_finite(omega_engine=omega_engine, omega_motor=omega_motor)
    mix = coefficients(spec)
    return mix.c_motor * omega_motor + mix.c_engine * omega_engine


def motor_speed_for(
    spec: GearTrainSpec, omega_arm_target: float, omega_engine: float
) -> float:
    """DC-motor speed that yields ``omega_arm_target`` at the given engine speed.

    Algebraic inverse of :func:`wheel_speed` in its motor argument.
    """
    _require_finite(omega_arm_target=omega_arm_target, omega_engine=omega_engine)
    mix = coefficients(spec)
    return (omega_arm_target - mix.c_engine * omega_engine) / mix.c_motor


def train_residual(
    spec: GearTrainSpec, omega_engine: float, omega_motor: float, omega_arm: float
) -> float:
    """Defect of the fundamental speed relation for an arbitrary speed triple.

    Returns (omega_motor - omega_arm)/(omega_engine - omega_arm) + n_sun/n_ring,
    which is zero exactly when the triple is kinematically consistent.
    """
    _require_finite(
        omega_engine=omega_engine, omega_motor=omega_motor, omega_arm=omega_arm
    )
    spec.validate()
    denominator = omega_engine - omega_arm
    if denominator == 0.0:
        raise DegenerateRatioError(
            "omega_engine equals omega_arm: the train speed ratio is undefined"
        )
    return (omega_motor - omega_arm) / denominator + spec.n_sun / spec.n_ring


DEFAULT_TRAIN = GearTrainSpec(n_sun=39, n_planet=16, n_ring=71)
