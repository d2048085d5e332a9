"""Whole-plant behavior: tick semantics, mode transitions, determinism."""

import numpy as np
import pytest

from fuzzydrive.errors import DivergenceError, StepSizeError
from fuzzydrive.gear_train import wheel_speed
from fuzzydrive.scenario import ScenarioSpec
from fuzzydrive.sim import ControllerConfig, PedalState, Plant, Trace, run

from conftest import window_means


def stock_plant():
    spec = ScenarioSpec(name="probe", duration=0.0)
    return Plant(
        gear=spec.gear_train,
        engine_params=spec.engine_motor,
        dc_motor_params=spec.dc_motor,
        regulator=spec.regulator,
        controller=spec.controller,
    )


class TestTick:
    def test_first_tick_from_rest(self):
        plant = stock_plant()
        state, sample = plant.tick(plant.initial_state(), PedalState(), 1e-3)
        # engine begins spinning up toward idle, wheels essentially still
        assert state.engine.speed > 0.0
        assert abs(sample.omega_arm) < 0.1
        assert sample.mode == "balance"

    def test_unpowered_tick_is_inert(self):
        plant = stock_plant()
        state, sample = plant.tick(
            plant.initial_state(), PedalState(), 1e-3, powered=False
        )
        assert state.engine.speed == 0.0
        assert state.dc_motor.speed == 0.0
        assert sample.v_engine == 0.0 and sample.v_motor == 0.0
        assert sample.mode == "off"

    def test_bad_dt(self):
        plant = stock_plant()
        with pytest.raises(StepSizeError):
            plant.tick(plant.initial_state(), PedalState(), 0.0)

    def test_pedal_bounds_enforced(self):
        with pytest.raises(Exception, match="accel"):
            PedalState(accel=1.5)

    def test_converged_idle_balance(self, shipped_traces):
        trace = shipped_traces["idle"]
        tail = trace.time > trace.time[-1] - 2.0
        ratio = trace.omega_motor[tail] / trace.omega_engine[tail]
        assert np.all(np.abs(ratio + 0.549) < 0.01)
        assert np.max(np.abs(trace.omega_arm[tail])) < 0.5

    def test_reverse_from_idle_descends(self):
        plant = stock_plant()
        state = plant.initial_state()
        for _ in range(6000):  # converge to idle
            state, _ = plant.tick(state, PedalState(), 1e-3)
        arms = []
        for _ in range(1500):
            state, sample = plant.tick(state, PedalState(reverse=True), 1e-3)
            arms.append(sample.omega_arm)
        arms = np.array(arms)
        assert arms[-1] < -1.0
        # descending through negative values; block means iron out the
        # lightly damped electromechanical ripple
        blocks = arms[: 1500 // 250 * 250].reshape(-1, 250).mean(axis=1)
        assert np.all(np.diff(blocks) < 1e-6)

    def test_divergence_carries_time(self):
        # a grossly oversized step makes the fixed-step integrator unstable
        plant = stock_plant()
        state = plant.initial_state()
        with pytest.raises(DivergenceError, match="t="):
            for _ in range(20000):
                state, _ = plant.tick(state, PedalState(), 0.1)

    def test_rate_estimation_filtered(self):
        plant = stock_plant()
        state = plant.initial_state()
        state, _ = plant.tick(state, PedalState(accel=0.001), 1e-3)
        # raw backward difference is 1.0/s; the filter only admits dt/tau of it
        expected = min(1e-3 / plant.controller.rate_filter_tau, 1.0) * 1.0
        assert state.accel_rate == pytest.approx(expected, rel=1e-9)


class TestRun:
    def test_zero_duration_empty_trace(self):
        spec = ScenarioSpec(name="empty", duration=0.0)
        trace = run(spec)
        assert len(trace) == 0

    def test_kinematic_consistency(self, shipped_specs, shipped_traces):
        for name, trace in shipped_traces.items():
            gear = shipped_specs[name].gear_train
            for k in range(0, len(trace), 997):
                expected = wheel_speed(
                    gear, float(trace.omega_engine[k]), float(trace.omega_motor[k])
                )
                assert abs(trace.omega_arm[k] - expected) < 1e-9

    def test_time_axis(self, shipped_specs, shipped_traces):
        for name, trace in shipped_traces.items():
            dt = shipped_specs[name].dt
            deltas = np.diff(trace.time)
            assert np.all(deltas > 0)
            assert np.allclose(deltas, dt, rtol=0, atol=1e-9)

    def test_determinism_bit_identical(self, shipped_specs):
        spec = shipped_specs["idle"]
        first, second = run(spec), run(spec)
        for column in (
            "time",
            "omega_engine",
            "omega_motor",
            "omega_arm",
            "v_engine",
            "v_motor",
        ):
            assert np.array_equal(getattr(first, column), getattr(second, column))

    def test_idle_zones(self, shipped_specs, shipped_traces):
        spec = shipped_specs["idle"]
        trace = shipped_traces["idle"]
        off = trace.time < spec.system_on
        assert np.all(trace.omega_engine[off] == 0.0)
        assert np.all(trace.omega_motor[off] == 0.0)
        # spin-up: window means climb (the raw signal carries plant ripple)
        ramp_means = [
            trace.omega_engine[
                (trace.time > spec.system_on + a) & (trace.time <= spec.system_on + b)
            ].mean()
            for a, b in ((0.0, 0.5), (0.5, 1.0), (1.0, 1.5), (1.5, 2.0))
        ]
        assert np.all(np.diff(ramp_means) > 0)
        ramp = (trace.time > spec.system_on) & (trace.time < spec.system_on + 2.0)
        assert trace.omega_motor[ramp].min() < -5.0  # motor swings negative

    def test_acceleration_monotone(self, shipped_traces):
        trace = shipped_traces["accelerate"]
        means = window_means(trace, 4.0, 9.0)
        assert np.min(np.diff(means)) > -0.1

    def test_deceleration_returns_to_stop_without_brake_torque(self, shipped_traces):
        trace = shipped_traces["decelerate"]
        tail = trace.time > trace.time[-1] - 2.0
        assert np.max(np.abs(trace.omega_arm[tail])) < 0.5
        assert np.max(np.abs(trace.omega_engine[tail] - 25.0)) / 25.0 < 0.02

    def test_no_fire_never_raised_in_shipped_runs(self, shipped_traces):
        for name, trace in shipped_traces.items():
            powered = trace.mode != "off"
            assert not trace.no_fire[powered].any(), name

    def test_trace_from_no_samples(self):
        trace = Trace.from_samples([])
        assert len(trace) == 0


class TestControllerConfig:
    def test_validation(self):
        with pytest.raises(Exception, match="volts_to_speed"):
            ControllerConfig(volts_to_speed=0.0).validate()
        with pytest.raises(Exception, match="grid_points"):
            ControllerConfig(grid_points=1).validate()
