"""Motor dynamics against analytic and dense first-order oracles."""

import numpy as np
import pytest

from fuzzydrive.errors import ConfigurationError, DivergenceError, StepSizeError
from fuzzydrive.motor import (
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


def euler_reference(params, voltage, t_end, dt):
    """Dense explicit first-order integration from rest.

    Returns the final state and each variable's trajectory scale (max |value|)
    for relative comparisons.
    """
    R, k, L = params.resistance, params.motor_constant, params.inductance
    b, J, T = params.damping, params.inertia, params.load_torque
    i = w = 0.0
    scale_i = scale_w = 0.0
    for _ in range(int(round(t_end / dt))):
        load = T if w > 0 else (-T if w < 0 else 0.0)
        di = (voltage - R * i - k * w) / L
        dw = (k * i - b * w - load) / J
        i += dt * di
        w += dt * dw
        if abs(i) > scale_i:
            scale_i = abs(i)
        if abs(w) > scale_w:
            scale_w = abs(w)
    return i, w, scale_i, scale_w


class TestDerivatives:
    def test_rest_is_equilibrium(self):
        assert derivatives(ENGINE_MOTOR, MotorState(0.0, 0.0), 0.0) == (0.0, 0.0)

    def test_current_decay_and_spinup(self):
        # dI/dt = (0 - 1*1 - 10*0)/0.5; domega/dt = (10*1 - 0.1*0 - 0)/0.01,
        # the load torque vanishes at zero speed
        di, dw = derivatives(ENGINE_MOTOR, MotorState(1.0, 0.0), 0.0)
        assert di == pytest.approx(-2.0)
        assert dw == pytest.approx(1000.0)

    def test_back_emf_cancels_voltage(self):
        k = ENGINE_MOTOR.motor_constant
        for w in (3.0, -7.5):
            di, _ = derivatives(ENGINE_MOTOR, MotorState(0.0, w), k * w)
            assert di == 0.0

    def test_load_opposes_motion(self):
        _, dw_fwd = derivatives(ENGINE_MOTOR, MotorState(0.0, 1.0), 0.0)
        _, dw_rev = derivatives(ENGINE_MOTOR, MotorState(0.0, -1.0), 0.0)
        assert dw_fwd == -dw_rev  # symmetric coulomb-style load


class TestStep:
    def test_bad_dt(self):
        with pytest.raises(StepSizeError):
            step(ENGINE_MOTOR, MotorState(), 1.0, 0.0)

    def test_divergence_reported(self):
        bad = MotorParams(
            inertia=1e-12,
            damping=0.0,
            motor_constant=10.0,
            resistance=1.0,
            inductance=1e-12,
            load_torque=0.0,
        )
        state = MotorState(1.0, 1.0)
        with pytest.raises(DivergenceError):
            for _ in range(100):
                state = step(bad, state, 1e9, 10.0)

    def test_fourth_order_convergence(self):
        # halving dt must shrink the one-step-vs-two-half-steps gap ~16x
        state = MotorState(0.5, 2.0)
        voltage = 4.0

        def gap(dt):
            full = step(ENGINE_MOTOR, state, voltage, dt)
            half = step(
                ENGINE_MOTOR, step(ENGINE_MOTOR, state, voltage, dt / 2), voltage, dt / 2
            )
            return abs(full.speed - half.speed) + abs(full.current - half.current)

        g1, g2 = gap(2e-3), gap(1e-3)
        assert g2 < g1 / 12.0  # ~16 expected for a 4th-order scheme

    def test_long_run_reaches_analytic_steady_state_engine(self):
        final = simulate(ENGINE_MOTOR, MotorState(), 10.0, 10.0)
        expected = (10.0 * 10.0 - 1.0 * 0.001) / (100.0 + 0.1)
        assert expected == pytest.approx(0.9989910089910090, rel=1e-12)
        assert final.speed == pytest.approx(expected, rel=1e-3)

    def test_long_run_reaches_analytic_steady_state_dc(self):
        final = simulate(DC_MOTOR, MotorState(), 10.0, 10.0)
        expected = (8.0 * 10.0 - 1.0 * 0.001) / (64.0 + 0.1)
        assert expected == pytest.approx(1.2480343213728548, rel=1e-12)
        assert final.speed == pytest.approx(expected, rel=1e-3)


class TestSteadyStateSpeed:
    def test_engine_at_ten_volts(self):
        assert steady_state_speed(ENGINE_MOTOR, 10.0) == pytest.approx(
            0.9989910089910090, rel=1e-12
        )

    def test_ideal_motor(self):
        ideal = MotorParams(
            inertia=0.01,
            damping=0.0,
            motor_constant=1.0,
            resistance=1.0,
            inductance=0.5,
            load_torque=0.0,
        )
        assert steady_state_speed(ideal, 5.0) == 5.0

    def test_zero_input(self):
        params = MotorParams(
            inertia=0.01,
            damping=0.1,
            motor_constant=10.0,
            resistance=1.0,
            inductance=0.5,
            load_torque=0.0,
        )
        assert steady_state_speed(params, 0.0) == 0.0

    def test_consistency_across_voltages(self):
        for params in (ENGINE_MOTOR, DC_MOTOR):
            for voltage in (1.0, 5.0, 10.0):
                final = simulate(params, MotorState(), voltage, 10.0)
                expected = steady_state_speed(params, voltage)
                assert abs(final.speed - expected) / abs(expected) < 1e-3


class TestIntegratorOracle:
    def test_rk4_matches_dense_euler(self):
        # draws span the armature regime around the stock constants, where
        # the transient is resolved and mostly decayed within the horizon
        rng = np.random.default_rng(20240817)
        for _ in range(10):
            params = MotorParams(
                inertia=float(rng.uniform(0.008, 0.015)),
                damping=float(rng.uniform(0.08, 0.2)),
                motor_constant=float(rng.uniform(5.0, 12.0)),
                resistance=float(rng.uniform(0.8, 1.5)),
                inductance=float(rng.uniform(0.3, 0.6)),
                load_torque=float(rng.uniform(0.0, 0.002)),
            )
            voltage = float(rng.choice([-1.0, 1.0]) * rng.uniform(2.0, 12.0))
            state = MotorState()
            for _ in range(1000):
                state = step(params, state, voltage, 1e-3)
            ref_i, ref_w, scale_i, scale_w = euler_reference(
                params, voltage, 1.0, 1e-6
            )
            assert abs(state.current - ref_i) / scale_i < 1e-4
            assert abs(state.speed - ref_w) / scale_w < 1e-4


class TestPassivity:
    def test_energy_decays_without_input(self):
        unloaded = MotorParams(
            inertia=0.01,
            damping=0.1,
            motor_constant=10.0,
            resistance=1.0,
            inductance=0.5,
            load_torque=0.0,
        )
        rng = np.random.default_rng(7)
        for _ in range(5):
            state = MotorState(float(rng.uniform(-5, 5)), float(rng.uniform(-50, 50)))
            energy = 0.5 * (
                unloaded.inertia * state.speed**2
                + unloaded.inductance * state.current**2
            )
            for _ in range(2000):
                state = step(unloaded, state, 0.0, 1e-3)
                new_energy = 0.5 * (
                    unloaded.inertia * state.speed**2
                    + unloaded.inductance * state.current**2
                )
                assert new_energy <= energy * (1 + 1e-12) + 1e-15
                energy = new_energy
            assert energy < 1e-6


def closed_loop(params, setpoint, duration, dt=1e-3, reg=None):
    reg = reg or RegulatorState()
    state = MotorState()
    for _ in range(int(round(duration / dt))):
        voltage, reg = regulator_step(reg, setpoint, state.speed, dt)
        state = step(params, state, voltage, dt)
    return state


class TestRegulator:
    def test_zero_error_zero_output(self):
        voltage, _ = regulator_step(RegulatorState(), 10.0, 10.0, 1e-3)
        assert voltage == pytest.approx(0.0, abs=1e-9)

    def test_proportional_only(self):
        reg = RegulatorState(kp=2.0, ki=0.0)
        voltage, _ = regulator_step(reg, 3.0, 0.0, 1e-3)
        assert voltage == pytest.approx(6.0)

    def test_output_clamped_and_integral_frozen(self):
        reg = RegulatorState(kp=100.0, ki=10.0, v_min=-5.0, v_max=5.0)
        voltage, after = regulator_step(reg, 100.0, 0.0, 1e-3)
        assert voltage == 5.0
        assert after.integral == reg.integral  # frozen while saturated

    def test_bad_dt(self):
        with pytest.raises(StepSizeError):
            regulator_step(RegulatorState(), 1.0, 0.0, -1e-3)

    def test_bad_bounds(self):
        with pytest.raises(ConfigurationError):
            RegulatorState(v_min=1.0, v_max=-1.0).validate()

    def test_tracks_fifty_rad_s(self):
        final = closed_loop(ENGINE_MOTOR, 50.0, 10.0)
        assert abs(final.speed - 50.0) < 0.5

    @pytest.mark.parametrize("setpoint", [-100.0, -40.0, 10.0, 60.0, 100.0])
    @pytest.mark.parametrize("params", [ENGINE_MOTOR, DC_MOTOR], ids=["engine", "dc"])
    def test_tracking_error_under_one_percent_after_five_seconds(
        self, params, setpoint
    ):
        final = closed_loop(params, setpoint, 5.0)
        assert abs(final.speed - setpoint) / abs(setpoint) < 0.01
