"""Static SVG charts for simulation metrics and training losses (no plotting dependency)."""
import logging
import os
from typing import List, Sequence, Tuple, Union
from xml.sax.saxutils import escape

from forecast import TrainReport
from simulation import SimulationMetrics

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 900, 480
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 90, 40, 70, 90
PLOT_W = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
PLOT_H = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
SERIES_COLORS = ('#3A86FF', '#FF006E', '#8338EC', '#FB5607')

METRIC_CHARTS = ('relocations.svg', 'distribution.svg', 'cost.svg', 'acuity.svg')
LOSS_CHART = 'loss.svg'


def _frame(title: str, x_label: str, y_label: str, y_max: float, body: List[str]) -> str:
    ticks = []
    for i in range(5):
        value = y_max * i / 4
        y = MARGIN_TOP + PLOT_H - PLOT_H * i / 4
        ticks.append(f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" font-size="10" text-anchor="end">{value:.4g}</text>')
    return f'''<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">
  <rect width="100%" height="100%" fill="#F8F9FB" />
  <text x="{WIDTH / 2}" y="30" font-size="20" text-anchor="middle" fill="#111">{escape(title)}</text>
  <line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" y2="{MARGIN_TOP + PLOT_H}" stroke="#111" stroke-width="2" />
  <line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP + PLOT_H}" x2="{MARGIN_LEFT + PLOT_W}" y2="{MARGIN_TOP + PLOT_H}" stroke="#111" stroke-width="2" />
  <text x="{MARGIN_LEFT + PLOT_W / 2}" y="{HEIGHT - 20}" font-size="14" text-anchor="middle">{escape(x_label)}</text>
  <text transform="translate(22,{MARGIN_TOP + PLOT_H / 2}) rotate(-90)" font-size="14" text-anchor="middle">{escape(y_label)}</text>
  {''.join(ticks)}
  {''.join(body)}
</svg>
'''


def bar_svg(title: str, x_label: str, y_label: str, data: Sequence[Tuple[str, float]]) -> str:
    """
    Render a bar chart.

    Args:
        title: Chart title
        x_label: Category axis label
        y_label: Value axis label
        data: (label, value) pairs; negative values are drawn as zero

    Returns:
        SVG document text
    """
    values = [max(0.0, float(v)) for _, v in data]
    max_v = max(values) if values else 1.0
    if max_v == 0:
        max_v = 1.0

    n = len(data)
    bar_w = PLOT_W / max(1, n * 1.5)
    gap = bar_w / 2
    x = MARGIN_LEFT + gap
    body = []
    for (label, _), val in zip(data, values):
        h = val / max_v * PLOT_H
        y = MARGIN_TOP + (PLOT_H - h)
        label = escape(str(label))
        body.append(f'<rect class="bar" data-label="{label}" data-value="{val:g}" x="{x:.2f}" y="{y:.2f}" '
                    f'width="{bar_w:.2f}" height="{h:.2f}" fill="{SERIES_COLORS[0]}" />')
        body.append(f'<text x="{x + bar_w / 2:.2f}" y="{MARGIN_TOP + PLOT_H + 20:.2f}" '
                    f'font-size="11" text-anchor="middle">{label}</text>')
        body.append(f'<text x="{x + bar_w / 2:.2f}" y="{max(MARGIN_TOP + 12, y - 4):.2f}" '
                    f'font-size="10" text-anchor="middle">{val:g}</text>')
        x += bar_w + gap
    return _frame(title, x_label, y_label, max_v, body)


def line_svg(title: str, x_label: str, y_label: str, series: Sequence[Tuple[str, Sequence[float]]]) -> str:
    """
    Render one polyline per named series over a shared x index.

    Args:
        title: Chart title
        x_label: X axis label
        y_label: Y axis label
        series: (name, values) pairs; x runs 0..len-1 for each

    Returns:
        SVG document text
    """
    all_values = [float(v) for _, values in series for v in values]
    max_v = max(all_values) if all_values else 1.0
    if max_v <= 0:
        max_v = 1.0
    longest = max((len(values) for _, values in series), default=1)
    step = PLOT_W / max(1, longest - 1)

    body = []
    for idx, (name, values) in enumerate(series):
        color = SERIES_COLORS[idx % len(SERIES_COLORS)]
        points = ' '.join(
            f'{MARGIN_LEFT + i * step:.2f},{MARGIN_TOP + PLOT_H - max(0.0, float(v)) / max_v * PLOT_H:.2f}'
            for i, v in enumerate(values))
        body.append(f'<polyline class="series" data-series="{escape(name)}" fill="none" stroke="{color}" '
                    f'stroke-width="2" points="{points}" />')
        body.append(f'<text x="{MARGIN_LEFT + PLOT_W - 10}" y="{MARGIN_TOP + 16 * (idx + 1)}" font-size="12" '
                    f'text-anchor="end" fill="{color}">{escape(name)}</text>')
    return _frame(title, x_label, y_label, max_v, body)


def _write(out_dir: str, name: str, svg: str) -> str:
    path = os.path.join(out_dir, name)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(svg)
    return path


def _metric_charts(metrics: SimulationMetrics) -> List[Tuple[str, str, bool]]:
    hours = [str(h) for h in range(metrics.horizon_hours)]
    served = [(hid, metrics.served_per_hospital.get(hid, 0)) for hid in metrics.hospital_ids]
    acuity = list(metrics.acuity_counts_relocated.items())
    return [
        ('relocations.svg',
         bar_svg('Relocations per hour', 'Hour', 'Patients relocated',
                 list(zip(hours, metrics.relocations_per_hour))),
         bool(hours)),
        ('distribution.svg',
         bar_svg('Patients served per hospital', 'Hospital', 'Patients served', served),
         bool(served)),
        ('cost.svg',
         line_svg('Cumulative transfer cost', 'Hour', 'Cost',
                  [('cumulative_cost', metrics.cumulative_cost_series)]),
         bool(metrics.cumulative_cost_series)),
        ('acuity.svg',
         bar_svg('Relocated patients by acuity', 'Acuity', 'Patients', acuity),
         bool(acuity)),
    ]


def render_charts(data: Union[SimulationMetrics, TrainReport], out_dir: str) -> Tuple[List[str], List[str]]:
    """
    Render the chart set for simulation metrics or a training report.

    Metrics give relocations, distribution, cost and acuity charts; a
    TrainReport gives one loss-vs-epoch chart with train and validation
    lines. Charts with no data are skipped and a warning is returned.

    Args:
        data: SimulationMetrics or TrainReport
        out_dir: Output directory (created if missing)

    Returns:
        (written file paths, warnings)
    """
    os.makedirs(out_dir, exist_ok=True)
    if isinstance(data, TrainReport):
        charts = [(LOSS_CHART,
                   line_svg('Model loss vs epochs', 'Epoch', 'MSE (normalized)',
                            [('train_loss', data.train_loss), ('val_loss', data.val_loss)]),
                   data.epochs > 0)]
    elif isinstance(data, SimulationMetrics):
        charts = _metric_charts(data)
    else:
        raise TypeError(f"cannot chart {type(data).__name__}")

    written, warnings = [], []
    for name, svg, has_data in charts:
        if not has_data:
            message = f"{name} skipped: no data"
            logger.warning(message)
            warnings.append(message)
            continue
        written.append(_write(out_dir, name, svg))
    logger.info(f"Rendered {len(written)} charts to {out_dir}")
    return written, warnings
