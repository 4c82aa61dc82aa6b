import json
from pathlib import Path

import numpy as np
import pytest

from smc_stability.common.config import parse_config
from smc_stability.oracle.fixtures import (finite_tempered_model, hand_two_state_model,
                                           two_state_drift, two_state_family, two_state_minorizer)

TWO_STATE_MODEL = {
    'target': {'name': 'finite', 'log_unnorm': [0.0, float(np.log(0.5))]},
    'schedule': {'name': 'linear', 'gamma_floor': 0.5},
    'flip': 0.2,
}
TWO_STATE_DRIFT = {'v': [1.0, 2.0], 'lam': 0.5, 'b': 1.5, 'small_set': [0, 1],
                   'epsilon': 0.28, 'nu': [2.0 / 3.0, 1.0 / 3.0]}


@pytest.fixture
def hand_model():
    return hand_two_state_model(n=3)


@pytest.fixture
def two_state():
    return two_state_family()


@pytest.fixture
def tempered_model(two_state):
    return finite_tempered_model(two_state, 10)


@pytest.fixture
def drift():
    return two_state_drift()


@pytest.fixture
def minorizer():
    return two_state_minorizer()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def make_raw(experiment: str, **sections) -> dict:
    raw = {'experiment': experiment, 'seed': 7}
    raw.update(sections)
    return raw


@pytest.fixture
def config_from():
    """ Разобрать конфигурацию из словаря. """
    def build(raw: dict):
        return parse_config(json.dumps(raw))
    return build


@pytest.fixture
def config_file(tmp_path):
    """ Записать словарь конфигурации в файл и вернуть путь. """
    def write(raw: dict, name: str = 'config.json') -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(raw), encoding='utf-8')
        return path
    return write
