"""
Flat key = value experiment files.

    # comment
    experiment = spd_diagonal
    n_max = 5000
    epsilon = 0.05
    estimators = inductive,hansen,resampled

Keys mirror ExperimentConfig; `seed` is accepted as an alias of
`base_seed`. Values written by ExperimentConfig.to_text() parse back to the
same config.
"""

import logging
from typing import Any, Callable, Dict, Optional

from models.experiment import ExperimentConfig
from services.errors import DomainError

logger = logging.getLogger(__name__)

ALLOWED_KEYS = (
    'experiment', 'n_max', 'epsilon', 'noise', 'seed', 'estimators',
    'lp_budget_exponent', 'replications', 'base_seed', 'trace_stride',
)


def parse_text(text: str) -> Dict[str, str]:
    """
    Parse key = value lines into raw strings.

    Raises:
        DomainError: On a line without '=', an unknown key or a repeated key
    """
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise DomainError(f"Line {lineno} is not 'key = value': {raw!r}", field=f"line {lineno}")
        key, value = (part.strip() for part in line.split('=', 1))
        if key not in ALLOWED_KEYS:
            raise DomainError(f"Unknown config key '{key}' on line {lineno}", field=key)
        if key == 'seed':
            key = 'base_seed'
        if key in values:
            raise DomainError(f"Config key '{key}' given twice", field=key)
        values[key] = value
    return values


def _convert(key: str, value: Any, cast: Callable[[str], Any]) -> Any:
    try:
        return cast(value)
    except (TypeError, ValueError):
        raise DomainError(f"Malformed value {value!r}", field=key)


def _noise(value: str):
    return [float(v) for v in value.replace(',', ' ').split()]


def config_from_values(values: Dict[str, Any]) -> ExperimentConfig:
    """
    Build an ExperimentConfig from raw values; missing keys take Config defaults.

    Raises:
        DomainError: Missing experiment or malformed values, naming the key
    """
    if 'experiment' not in values or values['experiment'] in (None, ''):
        raise DomainError("Config does not name an experiment", field="experiment")

    kwargs: Dict[str, Any] = {'experiment': str(values['experiment']).strip().replace('-', '_')}
    casts = {
        'n_max': int,
        'epsilon': float,
        'lp_budget_exponent': float,
        'replications': int,
        'base_seed': int,
        'trace_stride': int,
        'noise': _noise,
        'estimators': lambda v: v,
    }
    for key, cast in casts.items():
        if values.get(key) is not None:
            kwargs[key] = _convert(key, values[key], cast)

    if 'noise' in kwargs and kwargs['experiment'] == 'spd_diagonal':
        entries = kwargs['noise']
        if len(entries) != 4:
            raise DomainError(f"Noise matrix needs 4 entries, got {len(entries)}", field="noise")
        kwargs['noise'] = [entries[0:2], entries[2:4]]

    return ExperimentConfig.create(**kwargs)


def parse_config(text: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """Parse an experiment file body, then apply overrides (None values are ignored)."""
    values: Dict[str, Any] = parse_text(text)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value
    return config_from_values(values)


def load_config(path: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    Read an experiment file.

    Raises:
        DomainError: If the file cannot be read or has invalid content
    """
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as e:
        raise DomainError(f"Cannot read config file {path}: {e}", field="config")
    logger.debug(f"Loaded experiment config from {path}")
    return parse_config(text, overrides)
