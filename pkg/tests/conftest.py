import pathlib

import pytest

from trapcoherence.basis import BasisSpec, trap_spectrum

DATA_DIR = pathlib.Path(__file__).parent / "data"
CONFIG_DIR = pathlib.Path(__file__).parent.parent / "configs"


@pytest.fixture(scope="session")
def harmonic_spectrum():
    return trap_spectrum(1, BasisSpec(60, 8))


@pytest.fixture(scope="session")
def quartic_spectrum():
    return trap_spectrum(2, BasisSpec(80, 8))


@pytest.fixture(scope="session")
def data_dir():
    return DATA_DIR


@pytest.fixture(scope="session")
def config_dir():
    return CONFIG_DIR
