"""Hybrid drivetrain simulator.

Two power sources, an engine stand-in and a battery DC motor, drive the
wheels through a two-degree-of-freedom epicyclic gear train.  A Mamdani
fuzzy controller mixes the two input speeds from the pedal signals alone,
realizing idle, acceleration, cruise, deceleration, stop and reverse with
no physical brake in the plant.
"""

from .errors import (
    ConfigurationError,
    DefuzzificationError,
    DegenerateRatioError,
    DivergenceError,
    FuzzyDriveError,
    InferenceError,
    NumericInputError,
    RuleParseError,
    ScenarioParseError,
    ScenarioValidationError,
    StepSizeError,
)
from .export import export_csv, export_plot, trace_to_csv
from .flc import (
    ControlCommand,
    FuzzyVariable,
    Mode,
    Rule,
    RuleBase,
    TriangularMF,
    controller_step,
    defuzzify,
    fuzzify,
    infer,
    load_rule_base,
    membership,
    parse_rule_base,
    pedal_controller,
    uniform_terms,
)
from .gear_train import (
    DEFAULT_TRAIN,
    GearTrainSpec,
    MixCoefficients,
    coefficients,
    motor_speed_for,
    train_residual,
    wheel_speed,
)
from .motor import (
    DC_MOTOR,
    ENGINE_MOTOR,
    MotorParams,
    MotorState,
    RegulatorState,
    derivatives,
    regulator_step,
    simulate,
    steady_state_speed,
    step,
)
from .scenario import (
    SHIPPED_SCENARIOS,
    ScenarioSpec,
    load_scenario,
    save_scenario,
    shipped_scenario_path,
)
from .sim import (
    ControllerConfig,
    PedalState,
    Plant,
    Trace,
    TraceSample,
    VehicleState,
    run,
)

__version__ = "0.1.0"
