import numpy as np
import pytest

from hyperprofile import (
    ExponentialModel,
    GeneratorConfig,
    Hyperprofile,
    PowerLawModel,
    PredictionModel,
    ReciprocalModel,
    fit_multistep,
    gen_traces,
)

# The generator's ground-truth parameters, usable directly as a fitted model.
REFERENCE_ENERGY_COEF = 0.015
REFERENCE_ENERGY_EXP = -1.13
REFERENCE_TIME_NUMERATOR = 8.04e6
REFERENCE_INTERCEPT_AMPLITUDE = 222_873.0
REFERENCE_INTERCEPT_RATE = 0.0004


@pytest.fixture(scope="session")
def reference_model() -> PredictionModel:
    return PredictionModel(
        energy_slope=PowerLawModel(
            coefficient=REFERENCE_ENERGY_COEF, exponent=REFERENCE_ENERGY_EXP, r_squared=1.0
        ),
        time_slope=ReciprocalModel(numerator=REFERENCE_TIME_NUMERATOR, r_squared=1.0),
        time_intercept=ExponentialModel(
            amplitude=REFERENCE_INTERCEPT_AMPLITUDE, rate=REFERENCE_INTERCEPT_RATE, r_squared=1.0
        ),
        cv_energy=1.0,
        cv_time=1.0,
    )


@pytest.fixture(scope="session")
def noiseless_traces():
    return gen_traces(GeneratorConfig())


@pytest.fixture(scope="session")
def fitted_model(noiseless_traces) -> PredictionModel:
    return fit_multistep(noiseless_traces)


@pytest.fixture()
def two_point_profile() -> Hyperprofile:
    """The two-server scenario where the metrics pick different winners."""
    return Hyperprofile(
        dimensions=("x", "y"),
        node_ids=("p1", "p2"),
        coords=np.array([[0.219, 0.371], [0.233, 0.361]]),
        kind="base",
    )
