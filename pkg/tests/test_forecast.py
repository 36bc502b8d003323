import numpy as np
import pytest

import lstm
from forecast import (ArrivalSeries, LstmModel, ScalerParams, TrainConfig, TrainingDivergedError, evaluate_forecast,
                      fit_scaler, inverse_transform, lstm_forward, make_windows, predict_next_24, train,
                      transform)
from synthetic import SyntheticSpec, generate_synthetic


def test_arrival_series_rejects_negative_values():
    with pytest.raises(ValueError, match='hour 2'):
        ArrivalSeries([1.0, 2.0, -3.0])


def test_arrival_series_is_read_only():
    series = ArrivalSeries([1.0, 2.0])
    with pytest.raises(ValueError):
        series.values[0] = 5.0


def test_fit_scaler_bounds():
    params = fit_scaler([50.0, 55.0, 60.0])
    assert params == ScalerParams(min=50.0, max=60.0)


def test_fit_scaler_empty_input():
    with pytest.raises(ValueError, match='empty input'):
        fit_scaler([])


@pytest.mark.parametrize('raw, expected', [(50.0, 0.0), (60.0, 1.0), (55.0, 0.5)])
def test_transform_examples(raw, expected):
    params = ScalerParams(min=50.0, max=60.0)
    assert transform(params, raw) == pytest.approx(expected)
    assert inverse_transform(params, expected) == pytest.approx(raw)


def test_transform_degenerate_scaler_maps_to_zero():
    params = ScalerParams(min=7.0, max=7.0)
    assert transform(params, 7.0) == 0.0
    np.testing.assert_array_equal(transform(params, np.array([7.0, 7.0])), [0.0, 0.0])
    assert inverse_transform(params, 0.0) == 7.0


def test_scaler_rejects_inverted_bounds():
    with pytest.raises(ValueError):
        ScalerParams(min=2.0, max=1.0)


def test_make_windows_count_and_alignment():
    values = np.arange(744, dtype=float)
    params = fit_scaler(values)
    pairs = make_windows(values, params)
    assert len(pairs) == 697
    np.testing.assert_allclose(pairs[0].input, transform(params, values[:24]))
    np.testing.assert_allclose(pairs[0].target, transform(params, values[24:48]))
    np.testing.assert_allclose(pairs[-1].target, transform(params, values[-24:]))


def test_make_windows_exactly_48_values_gives_one_pair():
    values = np.arange(48, dtype=float)
    assert len(make_windows(values, fit_scaler(values))) == 1


def test_make_windows_insufficient_history():
    values = np.arange(40, dtype=float)
    with pytest.raises(ValueError, match='insufficient history'):
        make_windows(values, fit_scaler(values))


@pytest.fixture(scope='module')
def small_model():
    series = generate_synthetic(SyntheticSpec(days=5))
    return train(series, TrainConfig(epochs=3, hidden_size=8, batch_size=8))


def test_train_report_has_one_entry_per_epoch(small_model):
    model, report = small_model
    assert report.epochs == 3
    assert len(report.val_loss) == 3
    assert all(np.isfinite(report.train_loss)) and all(np.isfinite(report.val_loss))
    assert model.hidden_size == 8


def test_train_scaler_stays_within_observed_range(small_model):
    model, _ = small_model
    series = generate_synthetic(SyntheticSpec(days=5))
    assert series.values.min() <= model.scaler.min <= model.scaler.max <= series.values.max()


def test_train_is_deterministic():
    series = generate_synthetic(SyntheticSpec(days=3))
    config = TrainConfig(epochs=2, hidden_size=4)
    model_a, report_a = train(series, config)
    model_b, report_b = train(series, config)
    assert report_a.train_loss == report_b.train_loss
    for name in lstm.PARAM_NAMES:
        np.testing.assert_array_equal(getattr(model_a.network, name), getattr(model_b.network, name))


def test_train_with_single_pair_validates_on_training_pair():
    series = ArrivalSeries(np.linspace(10, 20, 48))
    _, report = train(series, TrainConfig(epochs=1, hidden_size=4))
    assert report.epochs == 1


def test_train_rejects_short_series():
    with pytest.raises(ValueError, match='insufficient history'):
        train(np.arange(40, dtype=float), TrainConfig(epochs=1, hidden_size=4))


@pytest.mark.parametrize('kwargs', [{'epochs': 0}, {'batch_size': 0}, {'train_fraction': 1.0},
                                    {'learning_rate': 0.0}, {'hidden_size': 0}])
def test_train_config_validation(kwargs):
    with pytest.raises(ValueError):
        TrainConfig(**kwargs)


def test_lstm_forward_rejects_non_finite_input(small_model):
    model, _ = small_model
    inputs = np.zeros(24)
    inputs[3] = np.nan
    with pytest.raises(ValueError, match='non-finite input'):
        lstm_forward(model, inputs)


def test_predict_next_24_shape_and_floor(small_model):
    model, _ = small_model
    prediction = predict_next_24(model, np.full(24, 55.0))
    assert prediction.shape == (24,)
    assert np.all(prediction >= 0)


def _zero_head_model(scaler):
    net = lstm.init_network(4, 24, np.random.default_rng(3))
    net = lstm.LstmNetwork(input_weights=net.input_weights, recurrent_weights=net.recurrent_weights,
                           gate_biases=net.gate_biases, dense_weights=np.zeros((4, 24)), dense_bias=np.zeros(24))
    return LstmModel(network=net, scaler=scaler)


def test_zero_dense_head_outputs_zeros():
    model = _zero_head_model(ScalerParams(min=50.0, max=60.0))
    outputs = lstm_forward(model, np.linspace(0.0, 1.0, 24))
    assert outputs.shape == (24,)
    assert np.all(outputs == 0.0)


def test_zero_dense_head_predicts_scaler_minimum():
    model = _zero_head_model(ScalerParams(min=50.0, max=60.0))
    prediction = predict_next_24(model, np.full(24, 55.0))
    np.testing.assert_allclose(prediction, np.full(24, 50.0))


def test_predict_next_24_requires_24_values(small_model):
    model, _ = small_model
    with pytest.raises(ValueError):
        predict_next_24(model, np.full(23, 55.0))


def test_diverged_error_names_epoch():
    err = TrainingDivergedError(7, float('nan'))
    assert err.epoch == 7
    assert 'epoch 7' in str(err)
    assert isinstance(err, RuntimeError)


def test_evaluate_forecast_metrics():
    accuracy = evaluate_forecast([50.0, 60.0], [55.0, 54.0])
    assert accuracy.mae == pytest.approx(5.5)
    assert accuracy.rmse == pytest.approx(np.sqrt((25 + 36) / 2))
    assert accuracy.mape == pytest.approx((10.0 + 10.0) / 2)
    assert accuracy.accuracy == pytest.approx(90.0)


def test_evaluate_forecast_length_mismatch():
    with pytest.raises(ValueError):
        evaluate_forecast([1.0, 2.0], [1.0])


@pytest.mark.slow
def test_training_reduces_loss_on_default_synthetic_series(synthetic_month):
    _, report = train(synthetic_month, TrainConfig())
    assert report.epochs == 100
    assert report.train_loss[-1] <= 0.5 * report.train_loss[0]
    assert np.isfinite(report.val_loss[-1])
    assert report.val_loss[-1] <= 3.0 * report.train_loss[-1]


@pytest.mark.slow
def test_learns_a_daily_sinusoid():
    amplitude = 5.0
    hours = np.arange(744 + 24)
    wave = 50.0 + amplitude * np.sin(2 * np.pi * hours / 24)
    model, _ = train(ArrivalSeries(wave[:744]), TrainConfig())
    prediction = predict_next_24(model, wave[720:744])
    mae = np.mean(np.abs(prediction - wave[744:]))
    assert mae < 0.15 * amplitude
