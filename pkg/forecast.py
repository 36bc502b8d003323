"""Arrival forecasting: min-max scaling, 24->24 windowing, LSTM training and inference."""
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from sklearn.preprocessing import MinMaxScaler

import lstm
from config import Config
from rng import Stream, stream

logger = logging.getLogger(__name__)

PAIR_SPAN = Config.WINDOW + Config.HORIZON


class TrainingDivergedError(RuntimeError):
    """Raised when a training loss stops being finite."""

    def __init__(self, epoch: int, loss: float):
        super().__init__(f"training diverged at epoch {epoch}: loss={loss}")
        self.epoch = epoch
        self.loss = loss


@dataclass(frozen=True, eq=False)
class ArrivalSeries:
    """Hourly patient-arrival counts; hour 0 is the first observation."""
    values: np.ndarray
    start_hour: int = 0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise ValueError("arrival values must be finite")
        if np.any(values < 0):
            first = int(np.argmax(values < 0))
            raise ValueError(f"arrival values must be non-negative (hour {self.start_hour + first} is {values[first]})")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    def __len__(self) -> int:
        return len(self.values)

    def window(self, start: int, length: int) -> np.ndarray:
        """Slice ``length`` values starting at position ``start``."""
        if start < 0 or start + length > len(self.values):
            raise ValueError(
                f"arrival data covers {len(self.values)} hours, need hours {start}..{start + length - 1}")
        return self.values[start:start + length]


@dataclass(frozen=True)
class ScalerParams:
    """Min-max scaler parameters in arrival units."""
    min: float
    max: float

    def __post_init__(self):
        if not (np.isfinite(self.min) and np.isfinite(self.max)):
            raise ValueError("scaler bounds must be finite")
        if self.max < self.min:
            raise ValueError(f"scaler max ({self.max}) is below min ({self.min})")


@dataclass(frozen=True, eq=False)
class WindowPair:
    """24 normalized inputs and the 24 normalized values that follow them."""
    input: np.ndarray
    target: np.ndarray


@dataclass
class LstmModel:
    """Trained network plus the scaler needed to map raw arrivals in and out."""
    network: lstm.LstmNetwork
    scaler: ScalerParams

    @property
    def hidden_size(self) -> int:
        return self.network.hidden_size


@dataclass(frozen=True)
class TrainConfig:
    """Training hyperparameters."""
    epochs: int = Config.EPOCHS
    learning_rate: float = Config.LEARNING_RATE
    batch_size: int = Config.BATCH_SIZE
    train_fraction: float = Config.TRAIN_FRACTION
    seed: int = Config.SEED
    grad_clip_norm: float = Config.GRAD_CLIP_NORM
    hidden_size: int = Config.HIDDEN_SIZE

    def __post_init__(self):
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.hidden_size < 1:
            raise ValueError(f"hidden_size must be >= 1, got {self.hidden_size}")


@dataclass
class TrainReport:
    """Per-epoch mean squared errors in normalized units."""
    train_loss: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return len(self.train_loss)


@dataclass(frozen=True)
class ForecastAccuracy:
    """Forecast error in raw patients/hour."""
    mae: float
    rmse: float
    mape: float
    accuracy: float


SeriesLike = Union[ArrivalSeries, Sequence[float], np.ndarray]


def _values(series: SeriesLike) -> np.ndarray:
    if isinstance(series, ArrivalSeries):
        return series.values
    return np.asarray(series, dtype=np.float64).reshape(-1)


def fit_scaler(series: SeriesLike) -> ScalerParams:
    """
    Fit min-max bounds over every value of a series.

    Args:
        series: Arrival series or raw values

    Returns:
        ScalerParams with the observed minimum and maximum
    """
    values = _values(series)
    if values.size == 0:
        raise ValueError("empty input")
    scaler = MinMaxScaler().fit(values.reshape(-1, 1))
    return ScalerParams(min=float(scaler.data_min_[0]), max=float(scaler.data_max_[0]))


def transform(params: ScalerParams, x):
    """Map raw values to [0, 1]; a degenerate scaler maps everything to 0."""
    span = params.max - params.min
    if np.isscalar(x):
        return 0.0 if span == 0 else (float(x) - params.min) / span
    arr = np.asarray(x, dtype=np.float64)
    if span == 0:
        return np.zeros_like(arr)
    return (arr - params.min) / span


def inverse_transform(params: ScalerParams, y):
    """Map normalized values back to arrival units."""
    span = params.max - params.min
    if np.isscalar(y):
        return float(y) * span + params.min
    return np.asarray(y, dtype=np.float64) * span + params.min


def _raw_window_arrays(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if values.size < PAIR_SPAN:
        raise ValueError(f"insufficient history: need at least {PAIR_SPAN} hourly values, got {values.size}")
    pairs = sliding_window_view(values, PAIR_SPAN)
    return pairs[:, :Config.WINDOW], pairs[:, Config.WINDOW:]


def make_windows(series: SeriesLike, params: ScalerParams) -> List[WindowPair]:
    """
    Build every stride-1 input/target pair, normalized with params.

    Args:
        series: Arrival series of length N >= 48
        params: Scaler used to normalize values

    Returns:
        N - 47 window pairs in source order
    """
    inputs, targets = _raw_window_arrays(_values(series))
    norm_inputs = transform(params, inputs)
    norm_targets = transform(params, targets)
    return [WindowPair(input=x.copy(), target=y.copy()) for x, y in zip(norm_inputs, norm_targets)]


def lstm_forward(model: LstmModel, inputs: Sequence[float]) -> np.ndarray:
    """
    Predict normalized outputs for one normalized input sequence.

    Args:
        model: Forecast model
        inputs: Normalized values, one per time step

    Returns:
        Normalized outputs of the dense head
    """
    x = np.asarray(inputs, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    outputs, _ = lstm.forward(model.network, x)
    return outputs[0]


def _split_indices(n_pairs: int, train_fraction: float, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    order = rng.permutation(n_pairs)
    n_train = int(np.floor(n_pairs * train_fraction))
    n_train = min(max(n_train, 1), max(n_pairs - 1, 1))
    return order[:n_train], order[n_train:]


def _training_scaler(values: np.ndarray, train_idx: np.ndarray) -> ScalerParams:
    covered = np.zeros(values.size, dtype=bool)
    for start in train_idx:
        covered[start:start + PAIR_SPAN] = True
    return fit_scaler(values[covered])


def train(series: SeriesLike, config: TrainConfig = None) -> Tuple[LstmModel, TrainReport]:
    """
    Train the forecaster with mini-batch Adam on MSE.

    Window pairs are shuffled with a seeded permutation and split into
    training and validation sets; the scaler is fitted only on the values the
    training windows cover.

    Args:
        series: Hourly arrival series (length >= 48)
        config: Training hyperparameters

    Returns:
        (trained model, per-epoch loss report)
    """
    config = config or TrainConfig()
    values = _values(series)
    raw_inputs, raw_targets = _raw_window_arrays(values)
    n_pairs = raw_inputs.shape[0]

    shuffle_rng = stream(config.seed, Stream.TRAINING_SHUFFLE)
    train_idx, val_idx = _split_indices(n_pairs, config.train_fraction, shuffle_rng)
    scaler = _training_scaler(values, train_idx)

    x_train = transform(scaler, raw_inputs[train_idx])
    y_train = transform(scaler, raw_targets[train_idx])
    if val_idx.size:
        x_val = transform(scaler, raw_inputs[val_idx])
        y_val = transform(scaler, raw_targets[val_idx])
    else:
        logger.warning("Only one window pair available; validation loss is measured on the training pair")
        x_val, y_val = x_train, y_train

    network = lstm.init_network(config.hidden_size, Config.HORIZON, stream(config.seed, Stream.WEIGHT_INIT))
    optimizer = lstm.Adam(network, learning_rate=config.learning_rate)
    report = TrainReport()
    logger.info(f"Training on {len(train_idx)} windows, validating on {len(val_idx)} "
                f"(hidden={config.hidden_size}, epochs={config.epochs}, batch={config.batch_size})")

    n_train = len(train_idx)
    for epoch in range(1, config.epochs + 1):
        order = shuffle_rng.permutation(n_train)
        weighted_loss = 0.0
        for start in range(0, n_train, config.batch_size):
            batch = order[start:start + config.batch_size]
            loss, grads = lstm.loss_and_gradients(network, x_train[batch], y_train[batch])
            if not np.isfinite(loss):
                raise TrainingDivergedError(epoch, loss)
            grads, _ = lstm.clip_by_global_norm(grads, config.grad_clip_norm)
            optimizer.step(grads)
            weighted_loss += loss * len(batch)

        train_loss = weighted_loss / n_train
        val_outputs, _ = lstm.forward(network, x_val)
        val_loss, _ = lstm.mse_loss(val_outputs, y_val)
        if not (np.isfinite(train_loss) and np.isfinite(val_loss)) or not network.is_finite():
            raise TrainingDivergedError(epoch, train_loss if not np.isfinite(train_loss) else val_loss)

        report.train_loss.append(float(train_loss))
        report.val_loss.append(float(val_loss))
        if epoch == 1 or epoch % 10 == 0 or epoch == config.epochs:
            logger.info(f"Epoch {epoch}/{config.epochs} - loss: {train_loss:.4f} - val_loss: {val_loss:.4f}")

    return LstmModel(network=network, scaler=scaler), report


def predict_next_24(model: LstmModel, recent: Sequence[float]) -> np.ndarray:
    """
    Forecast the next 24 hourly arrivals from the last 24 observed ones.

    Args:
        model: Trained forecast model
        recent: Exactly 24 raw arrival values, oldest first

    Returns:
        24 raw arrival forecasts, floored at zero
    """
    recent = np.asarray(recent, dtype=np.float64).reshape(-1)
    if recent.size != Config.WINDOW:
        raise ValueError(f"expected {Config.WINDOW} recent values, got {recent.size}")
    normalized = lstm_forward(model, transform(model.scaler, recent))
    return np.maximum(inverse_transform(model.scaler, normalized), 0.0)


def evaluate_forecast(actual: Sequence[float], predicted: Sequence[float]) -> ForecastAccuracy:
    """
    Compare a forecast against observed arrivals.

    Args:
        actual: Observed arrivals
        predicted: Forecast arrivals, same length

    Returns:
        MAE, RMSE and MAPE in patients/hour, and accuracy = 100 - MAPE
    """
    actual = np.asarray(actual, dtype=np.float64).reshape(-1)
    predicted = np.asarray(predicted, dtype=np.float64).reshape(-1)
    if actual.size == 0 or actual.size != predicted.size:
        raise ValueError(f"actual and predicted must be non-empty and equal length "
                         f"(got {actual.size} and {predicted.size})")
    err = predicted - actual
    nonzero = actual != 0
    mape = float(np.mean(np.abs(err[nonzero] / actual[nonzero])) * 100.0) if nonzero.any() else 0.0
    return ForecastAccuracy(
        mae=float(np.mean(np.abs(err))),
        rmse=float(np.sqrt(np.mean(err * err))),
        mape=mape,
        accuracy=100.0 - mape,
    )
