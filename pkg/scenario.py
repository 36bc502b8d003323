"""Scenario configuration for the hospital-network simulation."""
import hashlib
import json
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from allocation import ACUITY_LEVELS, Acuity, Hospital
from config import Config

ARRIVAL_KINDS = ('csv', 'forecast', 'synthetic', 'profile')
ARRIVAL_MODES = ('poisson', 'deterministic')


class ScenarioValidationError(ValueError):
    """A scenario field is missing or out of range; ``field`` holds its dotted path."""

    def __init__(self, field_path: str, message: str):
        super().__init__(f"{field_path}: {message}")
        self.field = field_path


@dataclass(frozen=True)
class HospitalSpec:
    """Static description of a hospital; fresh Hospital objects are built per run."""
    id: str
    capacity: int
    transfer_cost: float
    acuity_capabilities: Tuple[str, ...] = tuple(a.value for a in ACUITY_LEVELS)
    initial_occupancy: int = 0

    def build(self, front_line: bool) -> Hospital:
        return Hospital(id=self.id, capacity=self.capacity, transfer_cost=self.transfer_cost,
                        acuity_capabilities=frozenset(self.acuity_capabilities),
                        occupancy=self.initial_occupancy, front_line=front_line)


@dataclass(frozen=True)
class ArrivalSource:
    """Where hourly arrival rates come from."""
    kind: str = 'synthetic'
    path: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one simulation run needs besides the arrival data itself."""
    hospitals: Tuple[HospitalSpec, ...]
    horizon_hours: int = Config.SIM_HORIZON_HOURS
    w_max_hours: float = Config.W_MAX_HOURS
    service_mean_min: float = Config.SERVICE_MEAN_MIN
    service_sd_min: float = Config.SERVICE_SD_MIN
    discharge_rate: float = Config.DISCHARGE_RATE
    acuity_mix: Tuple[float, float, float] = Config.ACUITY_MIX
    arrival_source: ArrivalSource = ArrivalSource()
    seed: int = Config.SEED
    front_line_id: str = Config.FRONT_LINE_ID
    triage_servers: int = 1
    arrival_mode: str = 'poisson'
    start_hour: int = 0

    def __post_init__(self):
        validate(self)

    def build_hospitals(self) -> List[Hospital]:
        return [spec.build(front_line=spec.id == self.front_line_id) for spec in self.hospitals]

    def with_overrides(self, **changes) -> 'ScenarioConfig':
        data = asdict(self)
        data.update(changes)
        data['hospitals'] = tuple(HospitalSpec(**h) if isinstance(h, dict) else h for h in data['hospitals'])
        src = data['arrival_source']
        data['arrival_source'] = ArrivalSource(**src) if isinstance(src, dict) else src
        return ScenarioConfig(**data)


def validate(config: ScenarioConfig):
    """Raise ScenarioValidationError naming the first offending field."""
    if not isinstance(config.horizon_hours, int) or config.horizon_hours < 1:
        raise ScenarioValidationError('horizon_hours', f"must be an integer >= 1, got {config.horizon_hours!r}")
    if not config.w_max_hours > 0:
        raise ScenarioValidationError('w_max_hours', f"must be > 0, got {config.w_max_hours}")
    if not config.service_mean_min > 0:
        raise ScenarioValidationError('service_mean_min', f"must be > 0, got {config.service_mean_min}")
    if not config.service_sd_min >= 0:
        raise ScenarioValidationError('service_sd_min', f"must be >= 0, got {config.service_sd_min}")
    if not 0.0 <= config.discharge_rate <= 1.0:
        raise ScenarioValidationError('discharge_rate', f"must be in [0, 1], got {config.discharge_rate}")
    if len(config.acuity_mix) != len(ACUITY_LEVELS):
        raise ScenarioValidationError('acuity_mix', f"needs {len(ACUITY_LEVELS)} probabilities (Low, Medium, High)")
    if any(p < 0 for p in config.acuity_mix) or abs(sum(config.acuity_mix) - 1.0) > 1e-9:
        raise ScenarioValidationError('acuity_mix', f"must be non-negative and sum to 1, got {list(config.acuity_mix)}")
    if not isinstance(config.seed, int) or config.seed < 0:
        raise ScenarioValidationError('seed', f"must be a non-negative integer, got {config.seed!r}")
    if not isinstance(config.triage_servers, int) or config.triage_servers < 1:
        raise ScenarioValidationError('triage_servers', f"must be an integer >= 1, got {config.triage_servers!r}")
    if config.arrival_mode not in ARRIVAL_MODES:
        raise ScenarioValidationError('arrival_mode', f"must be one of {ARRIVAL_MODES}, got {config.arrival_mode!r}")
    if not isinstance(config.start_hour, int) or config.start_hour < 0:
        raise ScenarioValidationError('start_hour', f"must be an integer >= 0, got {config.start_hour!r}")
    if config.arrival_source.kind not in ARRIVAL_KINDS:
        raise ScenarioValidationError('arrival_source.kind',
                                      f"must be one of {ARRIVAL_KINDS}, got {config.arrival_source.kind!r}")
    if config.arrival_source.kind in ('csv', 'forecast') and not config.arrival_source.path:
        raise ScenarioValidationError('arrival_source.path', f"required for kind {config.arrival_source.kind!r}")
    if config.arrival_source.kind == 'profile' and not config.arrival_source.params.get('rates'):
        raise ScenarioValidationError('arrival_source.params.rates', "required for kind 'profile'")

    if not config.hospitals:
        raise ScenarioValidationError('hospitals', "must list at least one hospital")
    seen = set()
    for idx, spec in enumerate(config.hospitals):
        path = f"hospitals[{idx}]"
        if not spec.id:
            raise ScenarioValidationError(f"{path}.id", "must be a non-empty string")
        if spec.id in seen:
            raise ScenarioValidationError(f"{path}.id", f"duplicate hospital id {spec.id!r}")
        seen.add(spec.id)
        if not isinstance(spec.capacity, int) or spec.capacity < 1:
            raise ScenarioValidationError(f"{path}.capacity", f"must be an integer >= 1, got {spec.capacity!r}")
        if not spec.transfer_cost >= 0:
            raise ScenarioValidationError(f"{path}.transfer_cost", f"must be >= 0, got {spec.transfer_cost}")
        if not spec.acuity_capabilities:
            raise ScenarioValidationError(f"{path}.acuity_capabilities", "must not be empty")
        for level in spec.acuity_capabilities:
            if level not in {a.value for a in Acuity}:
                raise ScenarioValidationError(f"{path}.acuity_capabilities", f"unknown acuity level {level!r}")
        if not isinstance(spec.initial_occupancy, int) or not 0 <= spec.initial_occupancy <= spec.capacity:
            raise ScenarioValidationError(f"{path}.initial_occupancy",
                                          f"must be an integer in [0, {spec.capacity}], got {spec.initial_occupancy!r}")
    if config.front_line_id not in seen:
        raise ScenarioValidationError('front_line_id', f"{config.front_line_id!r} is not one of the hospitals")


def _number(data: dict, key: str, default, kind=float):
    value = data.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioValidationError(key, f"must be a number, got {value!r}")
    if kind is int:
        if float(value) != int(value):
            raise ScenarioValidationError(key, f"must be an integer, got {value!r}")
        return int(value)
    return float(value)


def _acuity_mix(value) -> Tuple[float, float, float]:
    if isinstance(value, dict):
        try:
            value = [value[a.value] for a in ACUITY_LEVELS]
        except KeyError as e:
            raise ScenarioValidationError('acuity_mix', f"missing level {e.args[0]!r}")
    if not isinstance(value, (list, tuple)):
        raise ScenarioValidationError('acuity_mix', f"must be a list or mapping, got {value!r}")
    try:
        return tuple(float(p) for p in value)
    except (TypeError, ValueError):
        raise ScenarioValidationError('acuity_mix', f"probabilities must be numbers, got {value!r}")


def scenario_from_dict(data: dict, base_dir: str = '.') -> ScenarioConfig:
    """
    Build a ScenarioConfig from parsed scenario JSON.

    Args:
        data: Parsed JSON object
        base_dir: Directory relative arrival paths are resolved against

    Returns:
        Validated scenario
    """
    if not isinstance(data, dict):
        raise ScenarioValidationError('<root>', "scenario must be a JSON object")
    raw_hospitals = data.get('hospitals')
    if not isinstance(raw_hospitals, list) or not raw_hospitals:
        raise ScenarioValidationError('hospitals', "must be a non-empty list")

    hospitals = []
    for idx, h in enumerate(raw_hospitals):
        path = f"hospitals[{idx}]"
        if not isinstance(h, dict):
            raise ScenarioValidationError(path, "must be an object")
        for key in ('id', 'capacity', 'transfer_cost'):
            if key not in h:
                raise ScenarioValidationError(f"{path}.{key}", "is required")
        try:
            capacity = _number(h, 'capacity', None, int)
            cost = _number(h, 'transfer_cost', None)
            occupancy = _number(h, 'initial_occupancy', 0, int)
        except ScenarioValidationError as e:
            raise ScenarioValidationError(f"{path}.{e.field}", str(e).split(': ', 1)[1])
        capabilities = h.get('acuity_capabilities', [a.value for a in ACUITY_LEVELS])
        if not isinstance(capabilities, list):
            raise ScenarioValidationError(f"{path}.acuity_capabilities", "must be a list")
        hospitals.append(HospitalSpec(id=str(h['id']), capacity=capacity, transfer_cost=cost,
                                      acuity_capabilities=tuple(capabilities), initial_occupancy=occupancy))

    src = data.get('arrival_source', {'kind': 'synthetic'})
    if not isinstance(src, dict):
        raise ScenarioValidationError('arrival_source', "must be an object")
    src_path = src.get('path')
    if src_path and not os.path.isabs(src_path):
        src_path = os.path.normpath(os.path.join(base_dir, src_path))
    params = src.get('params') or {}
    if not isinstance(params, dict):
        raise ScenarioValidationError('arrival_source.params', "must be an object")
    source = ArrivalSource(kind=src.get('kind', 'synthetic'), path=src_path, params=params)

    return ScenarioConfig(
        hospitals=tuple(hospitals),
        horizon_hours=_number(data, 'horizon_hours', Config.SIM_HORIZON_HOURS, int),
        w_max_hours=_number(data, 'w_max_hours', Config.W_MAX_HOURS),
        service_mean_min=_number(data, 'service_mean_min', Config.SERVICE_MEAN_MIN),
        service_sd_min=_number(data, 'service_sd_min', Config.SERVICE_SD_MIN),
        discharge_rate=_number(data, 'discharge_rate', Config.DISCHARGE_RATE),
        acuity_mix=_acuity_mix(data.get('acuity_mix', list(Config.ACUITY_MIX))),
        arrival_source=source,
        seed=_number(data, 'seed', Config.SEED, int),
        front_line_id=str(data.get('front_line_id', Config.FRONT_LINE_ID)),
        triage_servers=_number(data, 'triage_servers', 1, int),
        arrival_mode=str(data.get('arrival_mode', 'poisson')),
        start_hour=_number(data, 'start_hour', 0, int),
    )


def load_scenario(path: str) -> ScenarioConfig:
    """
    Load and validate a scenario JSON file.

    Args:
        path: Scenario file path

    Returns:
        Validated scenario
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"scenario file not found: {path}")
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ScenarioValidationError('<root>', f"invalid JSON in {path} at line {e.lineno}: {e.msg}")
    return scenario_from_dict(data, base_dir=os.path.dirname(os.path.abspath(path)))


def scenario_to_dict(config: ScenarioConfig) -> dict:
    data = asdict(config)
    data['acuity_mix'] = list(config.acuity_mix)
    data['hospitals'] = [dict(h, acuity_capabilities=list(h['acuity_capabilities'])) for h in data['hospitals']]
    return data


def scenario_hash(config: ScenarioConfig) -> str:
    """SHA-256 of the canonical JSON form of a scenario."""
    canonical = json.dumps(scenario_to_dict(config), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def reference_scenario(**overrides) -> ScenarioConfig:
    """The bundled five-hospital reference network with default settings."""
    hospitals = tuple(HospitalSpec(id=hid, capacity=beds, transfer_cost=cost)
                      for hid, beds, cost in Config.REFERENCE_HOSPITALS)
    return ScenarioConfig(hospitals=hospitals, **overrides)
