"""JSON persistence for trained forecast models."""
import json
import logging
import os
import tempfile

import numpy as np

import lstm
from config import Config
from forecast import LstmModel, ScalerParams

logger = logging.getLogger(__name__)


def model_to_dict(model: LstmModel) -> dict:
    net = model.network
    return {
        'format': Config.MODEL_FORMAT,
        'hidden_size': net.hidden_size,
        'input_size': net.input_size,
        'output_size': net.output_size,
        'scaler': {'min': model.scaler.min, 'max': model.scaler.max},
        # arrays serialized as nested lists; json writes floats with round-trip precision
        'parameters': {name: getattr(net, name).tolist() for name in lstm.PARAM_NAMES},
    }


def model_from_dict(data: dict) -> LstmModel:
    """
    Rebuild a model from its JSON form.

    Args:
        data: Parsed model document

    Returns:
        LstmModel with validated parameter shapes
    """
    if not isinstance(data, dict) or data.get('format') != Config.MODEL_FORMAT:
        found = data.get('format') if isinstance(data, dict) else None
        raise ValueError(f"unsupported model format {found!r}, expected {Config.MODEL_FORMAT!r}")
    try:
        params = {name: np.asarray(data['parameters'][name], dtype=np.float64) for name in lstm.PARAM_NAMES}
        scaler = ScalerParams(min=float(data['scaler']['min']), max=float(data['scaler']['max']))
    except KeyError as e:
        raise ValueError(f"model file is missing {e.args[0]!r}")
    try:
        network = lstm.LstmNetwork(**params)
    except IndexError:
        raise ValueError("model parameters have the wrong number of dimensions")
    if network.hidden_size != data.get('hidden_size'):
        raise ValueError(f"model hidden_size {data.get('hidden_size')} does not match "
                         f"parameter shapes ({network.hidden_size})")
    return LstmModel(network=network, scaler=scaler)


def save_model(model: LstmModel, path: str):
    """
    Write a model to JSON, replacing any existing file atomically.

    Args:
        model: Trained model
        path: Output path
    """
    text = json.dumps(model_to_dict(model), indent=1)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix='.model-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w') as f:
            f.write(text + '\n')
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info(f"Saved model (hidden={model.hidden_size}) to {path}")


def load_model(path: str) -> LstmModel:
    """Load a model written by save_model."""
    if not os.path.exists(path):
        raise FileNotFoundError(f"model file not found: {path}")
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}")
    return model_from_dict(data)
