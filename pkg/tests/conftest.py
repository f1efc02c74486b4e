# -*- coding: utf-8 -*-
import os

import numpy as np
import pytest

from config import Config
from spectral.model import SpectralModel, ObservationScheme

CONFIG_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'configs')

REFERENCE_R = [0.3, 0.5, 0.7, 0.5, 0.5, 0.5, 0.5, 0.5]
REFERENCE_THETA = [-1, -1, -2, -2, -3, -5, -7, -10]


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='ejecuta las pruebas lentas')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='necesita --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture(autouse=True)
def no_log_file(monkeypatch):
    monkeypatch.setattr(Config, 'LOG_FILE', '')
    monkeypatch.setattr(Config, 'THREADS', None)


@pytest.fixture
def reference_model():
    return SpectralModel.from_arrays(13, REFERENCE_R, REFERENCE_THETA)


@pytest.fixture
def reference_scheme(reference_model):
    return ObservationScheme(tau=reference_model.tau, n=15000)


@pytest.fixture
def reference_path():
    return os.path.join(CONFIG_DIR, 'reference_model.json')


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
