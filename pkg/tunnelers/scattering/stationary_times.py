"""
Stationary characteristic times of the barrier: the phase (group delay) time and the Larmor-clock
times obtained from the sensitivity of the transmission and reflection amplitudes to the barrier height.
"""
import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from tunnelers.core.config import BarrierConfig
from tunnelers.core.decorators import momentum_API
from tunnelers.core.exceptions import ConfigurationError, PhaseUnwrapError, StepAdaptationError
from tunnelers.core.utils import even_sqrt, interval_exponential_integral
from tunnelers.scattering.barrier import reflection_amplitude, scattering_set, transmission_amplitude

logger = logging.getLogger(__name__)

PHASE_STEP = 1e-5
HEIGHT_STEP = 1e-5
STEP_AGREEMENT = 1e-6
MAX_HALVINGS = 40

# below this |kappa| d the interior is integrated with the barrier-top polynomial
_TOP_THRESHOLD = 1e-7


@dataclass(frozen=True)
class StationaryTimes:
    """
    Stationary times at momentum `k` (hbar = 1).

    - `tau_phase`: energy derivative of the transmission phase
    - `tau_b_dwell`: stationary dwell time (m/k) * integral of |psi_k|^2 over the barrier
    - `tau_b_trans`, `tau_b_refl`: moduli of d ln t / dV0 and d ln r / dV0
    - `tau_precession_t`, `tau_precession_r`: -Im d ln t / dV0 and -Im d ln r / dV0
    """
    k: float
    tau_phase: float
    tau_b_dwell: float
    tau_b_trans: float
    tau_b_refl: float
    tau_precession_t: float
    tau_precession_r: float


def _phase_slope(cfg: BarrierConfig, k, h):
    ratio = transmission_amplitude(cfg, k + h) / transmission_amplitude(cfg, k - h)
    jump = np.angle(ratio)
    if np.any(np.abs(jump) >= np.pi / 2):
        raise PhaseUnwrapError(
            f'transmission phase jumps by {np.max(np.abs(jump)):.3g} rad across the stencil (step {np.max(h):.3g})'
        )
    return jump / (2. * h)


@momentum_API
def phase_time(cfg: BarrierConfig, k):
    """
    Phase time (m/k) d/dk arg[D(k) exp(2ikd)], by central differences with one Richardson step.

    :param cfg: the barrier
    :param k: momentum, k > 0 (scalar or array)
    :return: the phase time
    """
    if np.any(k <= 0):
        raise ConfigurationError('momentum k must be > 0')
    k = np.asarray(k, dtype=float)
    h = PHASE_STEP * k
    coarse = _phase_slope(cfg, k, h)
    fine = _phase_slope(cfg, k, h / 2.)
    slope = (4. * fine - coarse) / 3.
    return cfg.m / k * slope


def _log_derivative(amplitude: Callable, cfg: BarrierConfig, k: float) -> complex:
    """
    d ln amplitude / dV0, halving the step until the forward and backward estimates agree.
    """
    if cfg.v0 <= 0:
        raise ConfigurationError('height derivatives need v0 > 0')
    v0 = cfg.v0
    centre = amplitude(cfg, k)
    h = HEIGHT_STEP * v0
    for _ in range(MAX_HALVINGS):
        up = amplitude(replace(cfg, v0=v0 + h), k)
        down = amplitude(replace(cfg, v0=v0 - h), k)
        forward = np.log(up / centre) / h
        backward = np.log(centre / down) / h
        central = np.log(up / down) / (2. * h)
        if abs(forward - backward) <= STEP_AGREEMENT * abs(central):
            up_half = amplitude(replace(cfg, v0=v0 + h / 2.), k)
            down_half = amplitude(replace(cfg, v0=v0 - h / 2.), k)
            central_half = np.log(up_half / down_half) / h
            return complex((4. * central_half - central) / 3.)
        h /= 2.
    raise StepAdaptationError(
        f'one-sided height derivatives at k={k} never agreed to {STEP_AGREEMENT} (last step {h:.3g})'
    )


def stationary_dwell(cfg: BarrierConfig, k: float) -> float:
    """
    (m/k) times the integral of |B exp(kappa x) + C exp(-kappa x)|^2 over |x| < d, in closed form.

    :param cfg: the barrier
    :param k: momentum, k > 0
    :return: the stationary dwell time
    """
    amplitudes = scattering_set(cfg, k)
    kappa = complex(even_sqrt(cfg.k0_squared - k ** 2))
    if abs(kappa) * cfg.d < _TOP_THRESHOLD:
        # psi = D exp(ikd) (1 + ik y) with y = x - d
        width = 2. * cfg.d
        weight = abs(amplitudes.d_trans) ** 2 * (width + k ** 2 * width ** 3 / 3.)
        return float(cfg.m / k * weight)
    b, c = amplitudes.b_grow, amplitudes.c_decay
    real_part = kappa + np.conj(kappa)
    imag_part = kappa - np.conj(kappa)
    weight = (abs(b) ** 2 * interval_exponential_integral(real_part, cfg.d)
              + abs(c) ** 2 * interval_exponential_integral(-real_part, cfg.d)
              + 2. * np.real(b * np.conj(c) * interval_exponential_integral(imag_part, cfg.d)))
    return float(cfg.m / k * np.real(weight))


def buttiker_times(cfg: BarrierConfig, k: float) -> StationaryTimes:
    """
    Computes the phase time and the Larmor-clock times at momentum k.

    :param cfg: the barrier, v0 > 0
    :param k: momentum, k > 0
    :return: a StationaryTimes
    """
    if k <= 0:
        raise ConfigurationError(f'momentum k must be > 0 (got {k!r})')
    k = float(k)
    g_t = _log_derivative(transmission_amplitude, cfg, k)
    g_r = _log_derivative(reflection_amplitude, cfg, k)
    times = StationaryTimes(
        k=k,
        tau_phase=float(phase_time(cfg, k)),
        tau_b_dwell=stationary_dwell(cfg, k),
        tau_b_trans=abs(g_t),
        tau_b_refl=abs(g_r),
        tau_precession_t=-g_t.imag,
        tau_precession_r=-g_r.imag,
    )
    logger.debug('stationary times at k=%s: %s', k, times)
    return times


def larmor_dwell(times: StationaryTimes, cfg: BarrierConfig) -> float:
    """
    Dwell time from the height derivatives, |D|^2 tau_precession_t + |A|^2 tau_precession_r
    """
    amplitudes = scattering_set(cfg, times.k)
    return float(amplitudes.transmission_probability * times.tau_precession_t
                 + amplitudes.reflection_probability * times.tau_precession_r)


def stationary_table(cfg: BarrierConfig, momenta: Union[Mapping[str, float], Sequence[float]]) -> pd.DataFrame:
    """
    Stationary times at a few momenta, one row per momentum.

    :param cfg: the barrier
    :param momenta: momenta, either labelled (e.g. {'k_av': 9.9, 'k_R': 9.696}) or plain
    :return: a DataFrame indexed by label with columns k and the StationaryTimes fields
    """
    if not isinstance(momenta, Mapping):
        momenta = {f'k={k:g}': k for k in momenta}
    rows: Dict[str, dict] = {}
    for label, k in momenta.items():
        times = buttiker_times(cfg, k)
        rows[label] = {field: getattr(times, field) for field in times.__dataclass_fields__}
    table = pd.DataFrame.from_dict(rows, orient='index')
    table.index.name = 'label'
    return table
