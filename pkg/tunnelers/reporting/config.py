import dataclasses
import logging
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple, Union

import numpy as np

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.core.exceptions import ConfigurationError
from tunnelers.packets.probabilities import METHODS, default_times

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    """
    Every knob of a reproduction run. The defaults are the reference configuration
    (m = 1, k_av = 9.9, delta = sqrt(2), x0 = -15, d = 2, v0 = 50).
    `epsilon` > 0 fixes the dwell gate, 0 makes it `epsilon_relative` times the dwell time.
    """
    v0: float = 50.
    d: float = 2.
    m: float = 1.
    k_av: float = 9.9
    delta: float = float(np.sqrt(2.))
    x0: float = -15.
    n_k: int = 8192
    n_k_snapshot: int = 4096
    n_sigma: float = 8.
    rule: str = 'simpson'
    t_max: float = 100.
    dt_fine: float = 0.01
    t_switch: float = 10.
    dt_coarse: float = 0.25
    trace_method: str = 'spatial'
    epsilon: float = 0.
    epsilon_relative: float = 0.01
    fit_lo: float = 30.
    fit_hi: float = 100.
    snapshot_times: Tuple[float, ...] = (0., 0.9, 1.9, 2.7)
    x_lo: float = -40.
    x_hi: float = 20.
    dx: float = 0.01
    out_dir: str = 'results'

    def __post_init__(self):
        # the component types validate their own fields
        self.barrier()
        self.packet()
        self.quadrature()
        self.quadrature(snapshot=True)
        checks = [
            (self.epsilon >= 0, 'epsilon', 'epsilon >= 0', self.epsilon),
            (0 < self.epsilon_relative < 1, 'epsilon_relative', '0 < epsilon_relative < 1', self.epsilon_relative),
            (self.t_max > 0, 't_max', 't_max > 0', self.t_max),
            (self.dt_fine > 0 and self.dt_coarse > 0, 'dt_fine/dt_coarse', 'both > 0', (self.dt_fine, self.dt_coarse)),
            (0 <= self.fit_lo < self.fit_hi, 'fit_lo/fit_hi', '0 <= fit_lo < fit_hi', (self.fit_lo, self.fit_hi)),
            (self.fit_lo < self.t_max, 'fit_lo', 'fit_lo < t_max', self.fit_lo),
            (self.trace_method in METHODS, 'trace_method', f'one of {METHODS}', self.trace_method),
            (all(t >= 0 for t in self.snapshot_times), 'snapshot_times', 'all >= 0', self.snapshot_times),
            (self.x_lo < self.x_hi, 'x_lo/x_hi', 'x_lo < x_hi', (self.x_lo, self.x_hi)),
            (self.dx > 0, 'dx', 'dx > 0', self.dx),
        ]
        for condition, field, constraint, value in checks:
            if not condition:
                raise ConfigurationError(f'{field} must satisfy {constraint} (got {value!r})')

    def barrier(self) -> BarrierConfig:
        return BarrierConfig(v0=self.v0, d=self.d, m=self.m)

    def packet(self) -> PacketConfig:
        return PacketConfig(k_av=self.k_av, delta=self.delta, x0=self.x0)

    def quadrature(self, snapshot: bool = False) -> QuadratureSpec:
        n_k = self.n_k_snapshot if snapshot else self.n_k
        return QuadratureSpec.for_packet(self.packet(), n_k=n_k, n_sigma=self.n_sigma, rule=self.rule)

    def times(self) -> np.ndarray:
        return default_times(self.t_max, self.dt_fine, self.t_switch, self.dt_coarse)

    @property
    def absolute_epsilon(self) -> Optional[float]:
        """
        The absolute gate, or None when the gate is epsilon_relative times the dwell time
        """
        return self.epsilon if self.epsilon > 0 else None

    @property
    def fit_window(self) -> Tuple[float, float]:
        return self.fit_lo, min(self.fit_hi, self.t_max)

    @property
    def x_grid(self) -> np.ndarray:
        n = int(round((self.x_hi - self.x_lo) / self.dx))
        return np.linspace(self.x_lo, self.x_hi, n + 1)

    @property
    def output_path(self) -> Path:
        return Path(self.out_dir)

    def is_reference_physics(self) -> bool:
        """
        Whether the physical parameters are the reference ones, to which the published values apply
        """
        names = ('v0', 'd', 'm', 'k_av', 'delta', 'x0')
        defaults = {f.name: f.default for f in fields(RunConfig)}
        return all(np.isclose(getattr(self, name), defaults[name], rtol=1e-12, atol=0) for name in names)

    def as_dict(self) -> Dict:
        return dataclasses.asdict(self)


def _convert(name: str, raw: Union[str, float, int, tuple]):
    field_types = {f.name: f.type for f in fields(RunConfig)}
    if name not in field_types:
        known = ', '.join(sorted(field_types))
        raise ConfigurationError(f'unknown configuration key {name!r} (known keys: {known})')
    if not isinstance(raw, str):
        return tuple(float(v) for v in raw) if name == 'snapshot_times' else raw
    target = field_types[name]
    try:
        if name == 'snapshot_times':
            return tuple(float(v) for v in raw.split(',') if v.strip())
        if target in (int, 'int'):
            return int(raw)
        if target in (float, 'float'):
            return float(raw)
    except ValueError:
        raise ConfigurationError(f'{name} must be a {getattr(target, "__name__", target)} (got {raw!r})') from None
    return raw.strip()


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Reads `key = value` lines. Blank lines and text after `#` are ignored; hyphens in keys count as underscores.

    :param path: the configuration file
    :return: the raw entries
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f'configuration file {path} does not exist')
    entries = {}
    for number, line in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        line = line.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigurationError(f'{path}:{number}: expected key = value, got {line!r}')
        key, value = (part.strip() for part in line.split('=', 1))
        entries[key.replace('-', '_')] = value
    return entries


def parse_config(path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping] = None) -> RunConfig:
    """
    Builds a validated RunConfig from an optional key=value file and optional overrides (flags win).

    :param path: the configuration file, if any
    :param overrides: values taking precedence over the file, e.g. parsed command line flags
    :return: a RunConfig with defaults filled in
    """
    raw = dict(read_config_file(path)) if path is not None else {}
    raw.update({key.replace('-', '_'): value for key, value in (overrides or {}).items() if value is not None})
    values = {name: _convert(name, value) for name, value in raw.items()}
    config = RunConfig(**values)
    logger.debug('configuration: %s', config)
    return config
