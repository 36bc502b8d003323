"""Main entry point for surge forecasting and patient relocation simulation."""
import argparse
import logging
import os
import sys

import pandas as pd

from charts import render_charts
from config import Config, __version__
from exporters import (export_metrics, read_manifest, read_metrics, write_forecast, write_history,
                       write_manifest, write_series, write_sweep)
from forecast import TrainConfig, evaluate_forecast, predict_next_24, train
from input_handlers import load_arrivals, load_forecast, load_series
from model_store import save_model
from queueing import service_rate_from_minutes, wq_table
from scenario import ArrivalSource, load_scenario, scenario_hash
from simulation import InvariantViolation, audit_relocations, run, run_sweep, summarize
from synthetic import SyntheticSpec, generate_synthetic

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 1, 2


class CliParser(argparse.ArgumentParser):
    """Argument parser that reports usage errors with the validation exit code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_VALIDATION, f"{self.prog}: error: {message}\n")


def forecast(args):
    """Train the forecaster and persist model, history and optional forecast."""
    series = load_series(args.input)
    print(f"Training forecaster on {len(series)} hours from {args.input}...")
    config = TrainConfig(epochs=args.epochs, seed=args.seed, hidden_size=args.hidden_size,
                         batch_size=args.batch_size, learning_rate=args.learning_rate)
    model, report = train(series, config)

    save_model(model, args.model_out)
    write_history(report, args.history_out)
    print(f"✓ Trained {report.epochs} epochs: loss {report.train_loss[-1]:.4f}, "
          f"val_loss {report.val_loss[-1]:.4f}")
    print(f"✓ Model saved to {args.model_out}")
    print(f"✓ Loss history saved to {args.history_out}")

    # the final day, predicted from the day before it
    values = series.values
    held_out = predict_next_24(model, values[-2 * Config.WINDOW:-Config.WINDOW])
    accuracy = evaluate_forecast(values[-Config.WINDOW:], held_out)
    print(f"✓ Last-day check: MAE {accuracy.mae:.2f} patients/hour, accuracy {accuracy.accuracy:.1f}%")

    if args.predict:
        write_forecast(predict_next_24(model, values[-Config.WINDOW:]), args.forecast_out)
        print(f"✓ Next-24h forecast saved to {args.forecast_out}")
    if args.charts:
        written, _ = render_charts(report, args.charts)
        for path in written:
            print(f"✓ Chart: {path}")


def _scenario_and_arrivals(args):
    config = load_scenario(args.scenario)
    if args.seed is not None:
        config = config.with_overrides(seed=args.seed)
    if args.arrivals:
        config = config.with_overrides(arrival_source=ArrivalSource(kind='csv', path=os.path.abspath(args.arrivals)))
        return config, load_series(args.arrivals)
    if args.forecast:
        config = config.with_overrides(arrival_source=ArrivalSource(kind='forecast',
                                                                    path=os.path.abspath(args.forecast)))
        return config, load_forecast(args.forecast)
    return config, load_arrivals(config.arrival_source, config.seed)


def simulate(args):
    """Run a scenario (or a seed sweep) and export its metrics."""
    config, arrivals = _scenario_and_arrivals(args)
    print(f"Simulating {config.horizon_hours}h scenario {args.scenario} (seed {config.seed})...")

    if args.sweep:
        seeds = [config.seed + k for k in range(args.sweep)]
        results = run_sweep(config, arrivals, seeds, jobs=args.jobs)
        for row, metrics in results:
            seed_config = config.with_overrides(seed=row.seed)
            export_metrics(metrics, os.path.join(args.out, f"seed_{row.seed}"), scenario_hash(seed_config))
        write_sweep([row for row, _ in results], os.path.join(args.out, 'sweep.csv'))
        print(f"✓ Ran {len(results)} seeds with {args.jobs} job(s)")
        print(f"✓ Sweep summary saved to {os.path.join(args.out, 'sweep.csv')}")
        return

    metrics = run(config, arrivals)
    problems = audit_relocations(metrics.events, config.w_max_hours)
    if problems:
        raise InvariantViolation(f"{len(problems)} relocations failed the audit, first: {problems[0]}")

    warnings = []
    if metrics.overflow_count:
        warnings.append(f"{metrics.overflow_count} patients could not be placed (overflow)")
    manifest = export_metrics(metrics, args.out, scenario_hash(config), warnings, event_log=args.event_log)
    print(f"✓ {metrics.arrivals_total} arrivals, {metrics.total_relocated} relocated, "
          f"{metrics.overflow_count} overflow, total cost {metrics.total_cost:g}")
    print(f"✓ Wrote {len(manifest['files'])} files to {args.out}")


def _print_wq_table(args):
    mu = args.mu if args.mu is not None else service_rate_from_minutes(Config.SERVICE_MEAN_MIN)
    lambdas = [float(x) for x in args.lambdas.split(',')] if args.lambdas else [mu * r / 10 for r in range(1, 10)]
    rows = wq_table(mu, lambdas)
    print(pd.DataFrame(rows, columns=['lambda', 'mu', 'wq_hours']).to_csv(index=False, lineterminator='\n'), end='')


def report(args):
    """Print the summary of an exported run and optionally render its charts."""
    if args.wq_table:
        _print_wq_table(args)
        if not args.metrics:
            return
    if not args.metrics:
        raise ValueError("--metrics is required unless --wq-table is given")

    manifest = read_manifest(args.metrics)
    metrics = read_metrics(args.metrics)
    summary = summarize(metrics)

    table = pd.DataFrame(summary.distribution, columns=['hospital', 'served'])
    table['capacity'] = [metrics.capacities.get(hid, 0) for hid in table['hospital']]
    table['utilization'] = [served / cap if cap else 0.0 for served, cap in zip(table['served'], table['capacity'])]
    print(table.to_string(index=False))
    print(f"Total cost: {summary.total_cost}")
    print(f"Relocated: {summary.total_relocated}")
    print(f"Overflow: {summary.overflow}")
    print(f"Utilization spread: {summary.utilization_spread:.4f}")

    if args.charts:
        out_dir = args.charts_dir or args.metrics
        written, warnings = render_charts(metrics, out_dir)
        if warnings:
            manifest['warnings'] = list(manifest.get('warnings', [])) + warnings
            write_manifest(args.metrics, manifest)
        for path in written:
            print(f"✓ Chart: {path}")


def synth(args):
    """Generate a synthetic arrival series CSV."""
    spec = SyntheticSpec(days=args.days, seed=args.seed, noise_sd=args.noise_sd,
                         weekend_scale=args.weekend_scale)
    series = generate_synthetic(spec)
    write_series(series, args.out)
    print(f"✓ Wrote {len(series)} hourly arrivals to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog='surgeflow', description='Surge forecasting and patient relocation simulator')
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    subparsers = parser.add_subparsers(dest='command', parser_class=CliParser, help='Command to run')

    # Forecast command
    parser_forecast = subparsers.add_parser('forecast', help='Train the arrival forecaster')
    parser_forecast.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser_forecast.add_argument('--input', required=True, help='Arrival series CSV (hour,arrivals)')
    parser_forecast.add_argument('--model-out', default='model.json', help='Output model JSON')
    parser_forecast.add_argument('--history-out', default='history.csv', help='Output loss history CSV')
    parser_forecast.add_argument('--epochs', type=int, default=Config.EPOCHS, help='Training epochs')
    parser_forecast.add_argument('--seed', type=int, default=Config.SEED, help='Random seed')
    parser_forecast.add_argument('--hidden-size', type=int, default=Config.HIDDEN_SIZE, help='LSTM units')
    parser_forecast.add_argument('--batch-size', type=int, default=Config.BATCH_SIZE, help='Mini-batch size')
    parser_forecast.add_argument('--learning-rate', type=float, default=Config.LEARNING_RATE, help='Adam step size')
    parser_forecast.add_argument('--predict', action='store_true', help='Also forecast the next 24 hours')
    parser_forecast.add_argument('--forecast-out', default='forecast.csv', help='Output forecast CSV')
    parser_forecast.add_argument('--charts', help='Directory for the loss chart')

    # Simulate command
    parser_sim = subparsers.add_parser('simulate', help='Run a relocation scenario')
    parser_sim.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser_sim.add_argument('--scenario', required=True, help='Scenario JSON file')
    source = parser_sim.add_mutually_exclusive_group()
    source.add_argument('--arrivals', help='Historical arrival CSV overriding the scenario source')
    source.add_argument('--forecast', help='Forecast CSV overriding the scenario source')
    parser_sim.add_argument('--out', required=True, help='Output directory')
    parser_sim.add_argument('--event-log', action='store_true', help='Also write events.csv and assignments.csv')
    parser_sim.add_argument('--seed', type=int, help='Override the scenario seed')
    parser_sim.add_argument('--sweep', type=int, default=0, help='Run K seeds starting at the scenario seed')
    parser_sim.add_argument('--jobs', type=int, default=1, help='Parallel processes for --sweep')

    # Report command
    parser_report = subparsers.add_parser('report', help='Summarize exported metrics')
    parser_report.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser_report.add_argument('--metrics', help='Directory written by simulate')
    parser_report.add_argument('--charts', action='store_true', help='Render SVG charts')
    parser_report.add_argument('--charts-dir', help='Chart directory (default: the metrics directory)')
    parser_report.add_argument('--wq-table', action='store_true', help='Print the M/M/1 expected-wait table')
    parser_report.add_argument('--mu', type=float, help='Service rate per hour for --wq-table')
    parser_report.add_argument('--lambdas', help='Comma-separated arrival rates for --wq-table')

    # Synth command
    parser_synth = subparsers.add_parser('synth', help='Generate a synthetic arrival series')
    parser_synth.add_argument('--version', action='version', version=f'%(prog)s {__version__}')
    parser_synth.add_argument('--days', type=int, default=Config.SYNTH_DAYS, help='Days of hourly data')
    parser_synth.add_argument('--seed', type=int, default=Config.SEED, help='Noise seed')
    parser_synth.add_argument('--noise-sd', type=float, default=Config.SYNTH_NOISE_SD, help='Gaussian noise sd')
    parser_synth.add_argument('--weekend-scale', type=float, default=Config.SYNTH_WEEKEND_SCALE,
                              help='Weekend volume multiplier')
    parser_synth.add_argument('--out', required=True, help='Output CSV')
    return parser


COMMANDS = {'forecast': forecast, 'simulate': simulate, 'report': report, 'synth': synth}


def main(argv=None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not args.command:
        parser.print_help()
        return EXIT_VALIDATION
    if getattr(args, 'jobs', 1) < 1:
        parser.error("--jobs must be >= 1")
    if getattr(args, 'sweep', 0) < 0:
        parser.error("--sweep must be >= 0")

    try:
        COMMANDS[args.command](args)
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except (RuntimeError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
