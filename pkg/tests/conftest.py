"""Shared fixtures: the six shipped scenarios are simulated once per session."""

import numpy as np
import pytest

from fuzzydrive.scenario import SHIPPED_SCENARIOS, load_scenario, shipped_scenario_path
from fuzzydrive.sim import run


@pytest.fixture(scope="session")
def shipped_specs():
    return {
        name: load_scenario(shipped_scenario_path(name)) for name in SHIPPED_SCENARIOS
    }


@pytest.fixture(scope="session")
def shipped_traces(shipped_specs):
    return {name: run(spec) for name, spec in shipped_specs.items()}


def window_means(trace, start, stop, width=0.1):
    """Means of omega_arm over consecutive windows of the given width."""
    means = []
    t = start
    while t + width <= stop + 1e-9:
        mask = (trace.time > t) & (trace.time <= t + width)
        means.append(float(trace.omega_arm[mask].mean()))
        t += width
    return np.array(means)
