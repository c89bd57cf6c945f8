import numpy as np
import pytest

from youngflow import run_scenario


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


_RUN_CACHE = {}


@pytest.fixture(scope="session")
def scenario_run():
    """Memoised scenario solves shared across test modules."""

    def get(name, seed=None):
        key = (name, seed)
        if key not in _RUN_CACHE:
            _RUN_CACHE[key] = run_scenario(name, seed=seed)
        return _RUN_CACHE[key]

    return get


def random_path(rng, n, dim=1, scale=1.0):
    from youngflow import SampledPath

    times = np.sort(rng.uniform(0.0, 1.0, n))
    times += np.arange(n) * 1e-6  # enforce strict increase
    values = scale * np.cumsum(rng.standard_normal((n, dim)), axis=0)
    return SampledPath(times, values)
