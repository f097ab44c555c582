from __future__ import annotations

from fractions import Fraction

import pytest

from coverlab.config import build_configuration, default_config
from coverlab.tower import run_pipeline


@pytest.fixture(scope="session")
def default_run():
    return run_pipeline(default_config())


@pytest.fixture(scope="session")
def alternate_run():
    return run_pipeline(default_config().with_options(pencil_parameter=Fraction(3)))


@pytest.fixture(scope="session")
def configuration():
    return build_configuration(default_config())


@pytest.fixture(scope="session")
def building_data(configuration):
    return configuration.building_data
