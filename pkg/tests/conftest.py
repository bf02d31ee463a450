import numpy as np
import pytest

from dcesim import (
    ModelParams,
    TimeGrid,
    build_operator,
    evolve_schrodinger,
    ground_state,
    make_space,
    observables_series,
)


@pytest.fixture(scope="session")
def space7():
    return make_space(7)


@pytest.fixture(scope="session")
def resonant_params():
    return ModelParams(Omega=1.0, omega_d=1.0, g0=0.1)


@pytest.fixture(scope="session")
def dce_run_200(resonant_params, space7):
    """Resonant DCE run (g0=0.1) over the full figure window."""
    import warnings

    grid = TimeGrid(t_max=200.0, dt=1e-3, sample_every=100)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return evolve_schrodinger(
            resonant_params, space7, ground_state(space7), grid
        )


@pytest.fixture(scope="session")
def jc_run_200(space7):
    """Static-coupling (driving frequency zero) run: JC regime."""
    params = ModelParams(Omega=1.0, omega_d=0.0, g0=0.1)
    grid = TimeGrid(t_max=200.0, dt=1e-3, sample_every=100)
    return evolve_schrodinger(params, space7, ground_state(space7), grid)


def number_series(series):
    return observables_series(
        series, [build_operator(series.space, "number")]
    ).values[:, 0]


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260810)
