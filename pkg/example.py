"""Example usage of the surge forecasting and relocation toolkit."""
from config import Config
from exporters import export_metrics
from forecast import ArrivalSeries, TrainConfig, evaluate_forecast, predict_next_24, train
from queueing import QueueParams, expected_wait, service_rate_from_minutes
from scenario import reference_scenario, scenario_hash
from simulation import run, summarize
from synthetic import SyntheticSpec, generate_synthetic


def example_forecast():
    """Example: Train a small forecaster on synthetic data."""
    print("=== Forecasting ===")

    series = generate_synthetic(SyntheticSpec(days=7))
    model, report = train(series, TrainConfig(epochs=10, hidden_size=16))
    print(f"✓ Loss {report.train_loss[0]:.4f} -> {report.train_loss[-1]:.4f} over {report.epochs} epochs")

    values = series.values
    held_out = predict_next_24(model, values[-48:-24])
    accuracy = evaluate_forecast(values[-24:], held_out)
    print(f"✓ Last-day MAE {accuracy.mae:.2f} patients/hour")
    return predict_next_24(model, values[-24:])


def example_queue():
    """Example: M/M/1 expected wait at the front line."""
    print("\n=== Queueing ===")

    mu = service_rate_from_minutes(Config.SERVICE_MEAN_MIN)
    for lam in (3.0, 5.0, 5.5):
        wq = expected_wait(QueueParams(lam=lam, mu=mu))
        print(f"  lambda={lam:g}/h mu={mu:g}/h -> Wq={wq * 60:.1f} min")


def example_simulate(forecast_rates):
    """Example: Simulate the reference network on forecast arrivals."""
    print("\n=== Simulation ===")

    config = reference_scenario()
    metrics = run(config, ArrivalSeries(forecast_rates))
    summary = summarize(metrics, config.hospitals)
    for hospital, served in summary.distribution:
        print(f"  {hospital}: {served} served")
    print(f"✓ Total cost {summary.total_cost:g}, overflow {summary.overflow}")

    manifest = export_metrics(metrics, 'example_output', scenario_hash(config))
    print(f"✓ Exported {len(manifest['files'])} files to example_output/")


if __name__ == "__main__":
    print("Surge Relocation Toolkit - Examples")
    print("=" * 50)

    rates = example_forecast()
    example_queue()
    example_simulate(rates)

    print("\n" + "=" * 50)
    print("Done! Check the results.")
