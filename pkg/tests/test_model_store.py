import json

import numpy as np
import pytest

import lstm
from forecast import LstmModel, ScalerParams
from model_store import load_model, save_model
from rng import stream


@pytest.fixture
def model():
    return LstmModel(network=lstm.init_network(6, 24, stream(3, 5)), scaler=ScalerParams(min=40.0, max=62.5))


def test_save_and_load_restore_exact_weights(model, tmp_path):
    path = str(tmp_path / 'model.json')
    save_model(model, path)
    restored = load_model(path)
    assert restored.scaler == model.scaler
    for name in lstm.PARAM_NAMES:
        np.testing.assert_array_equal(getattr(restored.network, name), getattr(model.network, name))


def test_save_is_byte_stable(model, tmp_path):
    save_model(model, str(tmp_path / 'a.json'))
    save_model(model, str(tmp_path / 'b.json'))
    assert (tmp_path / 'a.json').read_bytes() == (tmp_path / 'b.json').read_bytes()


def test_unknown_format_rejected(model, tmp_path):
    path = tmp_path / 'model.json'
    save_model(model, str(path))
    data = json.loads(path.read_text())
    data['format'] = 'other/2'
    path.write_text(json.dumps(data))
    with pytest.raises(ValueError, match='unsupported model format'):
        load_model(str(path))


def test_missing_model_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_model(str(tmp_path / 'missing.json'))
