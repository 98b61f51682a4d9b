"""
Probabilities of finding the packet left of the barrier (P1), inside it (P2) and right of it (P3).

The barrier interior is integrated on a fine direct grid. Outside the barrier the packet is a sum of plane
waves on the uniform momentum grid, which is evaluated on a matching uniform position grid with a
zero-padded FFT:

    sum_n g_n exp(i k_n (d + j dx)) = exp(i k_lo j dx) * M * ifft(g exp(i k d))[j],    dx = 2 pi / (M dk)
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from scipy.fft import fft, ifft

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.core.exceptions import ConfigurationError, NonConservationError
from tunnelers.core.utils import (composite_weights, even_sqrt, interval_exponential_integral, map_blocks,
                                  next_power_of_two)
from tunnelers.packets.evolution import X_BLOCK, amplitude_a, packet_width, time_coefficients
from tunnelers.scattering.barrier import scattering_set, stationary_state
from tunnelers.scattering.stationary_times import stationary_dwell

logger = logging.getLogger(__name__)

METHODS = ('spatial', 'spectral')
CONSERVATION_TOLERANCE = 1e-5
BOUNDS_TOLERANCE = 1e-6

INTERIOR_DX = 2e-3
OUTER_DX = 2e-2
# number of packet widths kept beyond the fastest classical front
DOMAIN_WIDTHS = 10.
TIME_CHUNK = 8
KERNEL_BLOCK = 128

# interior amplitudes are evaluated with |kappa| at least this large
_KAPPA_FLOOR = 1e-8


@dataclass(frozen=True)
class ProbabilityTrace:
    """
    Region probabilities sampled at `times`, with the momentum grid they were computed on.
    """
    times: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    p3: np.ndarray
    method: str = 'spatial'
    k_lo: float = np.nan
    k_hi: float = np.nan
    n_k: int = 0
    rule: str = 'simpson'

    def __post_init__(self):
        n = len(self.times)
        if not (len(self.p1) == len(self.p2) == len(self.p3) == n):
            raise ConfigurationError('probability arrays must be aligned with times')
        if n > 1 and np.any(np.diff(self.times) <= 0):
            raise ConfigurationError('times must be strictly increasing')
        if self.method not in METHODS:
            raise ConfigurationError(f'method must be one of {METHODS} (got {self.method!r})')

    @property
    def total(self) -> np.ndarray:
        return self.p1 + self.p2 + self.p3

    def conservation_error(self) -> float:
        """
        Largest deviation of P1 + P2 + P3 from 1 over the samples
        """
        return float(np.max(np.abs(self.total - 1.)))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'t': self.times, 'P1': self.p1, 'P2': self.p2, 'P3': self.p3})

    def check(self, tolerance: float = CONSERVATION_TOLERANCE) -> None:
        """
        Raises NonConservationError if the probabilities leave [0, 1] or do not add up to 1
        """
        error = self.conservation_error()
        if error > tolerance:
            worst = int(np.argmax(np.abs(self.total - 1.)))
            raise NonConservationError(
                f'P1 + P2 + P3 deviates from 1 by {error:.3g} at t={self.times[worst]} '
                f'(budget {tolerance}); grow the momentum grid or the integration domain'
            )
        for name in ('p1', 'p2', 'p3'):
            values = getattr(self, name)
            if np.any(values < -BOUNDS_TOLERANCE) or np.any(values > 1. + BOUNDS_TOLERANCE):
                raise NonConservationError(f'{name.upper()} leaves [0, 1] beyond {BOUNDS_TOLERANCE}')


@dataclass(frozen=True)
class Asymptotics:
    """
    Reflection and transmission probabilities and the mean momenta of the two outgoing packets.
    `k_r` (`k_t`) is None when R (T) vanishes.
    """
    r_prob: float
    t_prob: float
    k_r: Optional[float] = field(default=None)
    k_t: Optional[float] = field(default=None)


def default_times(t_max: float = 100., dt_fine: float = 0.01, t_switch: float = 10.,
                  dt_coarse: float = 0.25) -> np.ndarray:
    """
    Trace sampling: dt_fine on [0, t_switch] and dt_coarse on (t_switch, t_max]

    :return: sorted sample times
    """
    if t_max <= 0 or dt_fine <= 0 or dt_coarse <= 0:
        raise ConfigurationError('t_max, dt_fine and dt_coarse must be > 0')
    head_end = min(t_max, t_switch)
    fine = np.linspace(0., head_end, int(round(head_end / dt_fine)) + 1)
    if t_max <= t_switch:
        return fine
    n_coarse = int(round((t_max - t_switch) / dt_coarse))
    coarse = t_switch + dt_coarse * np.arange(1, n_coarse + 1)
    return np.concatenate([fine, coarse])


def _interior_grid(cfg: BarrierConfig) -> Tuple[np.ndarray, np.ndarray]:
    n = int(np.ceil(2. * cfg.d / INTERIOR_DX))
    n += n % 2
    x = np.linspace(-cfg.d, cfg.d, n + 1)
    return x, composite_weights(n, 2. * cfg.d / n)


def _outer_grid(q: QuadratureSpec) -> Tuple[int, float]:
    """
    FFT length M (a power of two) and the matching spacing 2 pi / (M dk) <= OUTER_DX
    """
    size = next_power_of_two(max(q.n_k + 1, int(np.ceil(2. * np.pi / (q.dk * OUTER_DX)))))
    return size, 2. * np.pi / (size * q.dk)


def _interval_counts(lengths: np.ndarray, dx: float, size: int) -> np.ndarray:
    counts = np.ceil(lengths / dx).astype(int)
    counts += counts % 2
    cap = size // 2
    if np.any(counts > cap):
        logger.warning('outer domain capped at half the period of the momentum grid (%.1f); '
                       'refine the momentum grid for times this long', cap * dx)
    return np.clip(counts, 2, cap)


def _interior_probability(cfg: BarrierConfig, q: QuadratureSpec, coefficients: np.ndarray) -> np.ndarray:
    x, weights = _interior_grid(cfg)
    k = q.nodes

    def block(start: int) -> np.ndarray:
        rows = slice(start, start + X_BLOCK)
        values = stationary_state(cfg, k, x[rows]) @ coefficients
        return weights[rows] @ np.abs(values) ** 2

    parts = map_blocks(block, range(0, x.size, X_BLOCK))
    return np.sum(parts, axis=0)


def _outer_probabilities(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec, times: np.ndarray,
                         coefficients: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    k = q.nodes
    amplitudes = scattering_set(cfg, k)
    size, dx = _outer_grid(q)
    spread = q.k_hi * times / cfg.m + DOMAIN_WIDTHS * packet_width(pk, times, cfg.m)
    n_left = _interval_counts(-cfg.d - pk.x0 + spread, dx, size)
    n_right = _interval_counts(spread, dx, size)
    j_max = int(max(n_left.max(), n_right.max()))

    incident = np.exp(-1j * k * cfg.d)
    reflected = amplitudes.a_refl * np.exp(1j * k * cfg.d)
    transmitted = amplitudes.d_trans * np.exp(1j * k * cfg.d)
    # relative phase exp(2 i k_lo j dx) between the reflected and incident sums on the left grid
    turn = np.exp(2j * q.k_lo * dx * np.arange(j_max + 1))

    def chunk(start: int) -> Tuple[np.ndarray, np.ndarray]:
        columns = slice(start, start + TIME_CHUNK)
        block = coefficients[:, columns].T
        left = (fft(block * incident, n=size, axis=-1)[:, :j_max + 1]
                + turn * size * ifft(block * reflected, n=size, axis=-1)[:, :j_max + 1])
        right = size * ifft(block * transmitted, n=size, axis=-1)[:, :j_max + 1]
        p1 = np.empty(block.shape[0])
        p3 = np.empty(block.shape[0])
        for row, i in enumerate(range(start, start + block.shape[0])):
            p1[row] = composite_weights(n_left[i], dx) @ np.abs(left[row, :n_left[i] + 1]) ** 2
            p3[row] = composite_weights(n_right[i], dx) @ np.abs(right[row, :n_right[i] + 1]) ** 2
        return p1, p3

    parts = map_blocks(chunk, range(0, times.size, TIME_CHUNK))
    return np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])


def _spatial(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec, times: np.ndarray):
    coefficients = time_coefficients(pk, q, times, cfg.m)
    p2 = _interior_probability(cfg, q, coefficients)
    p1, p3 = _outer_probabilities(cfg, pk, q, times, coefficients)
    return p1, p2, p3


def _check_times(times) -> np.ndarray:
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times < 0):
        raise ConfigurationError('times must be >= 0')
    return times


def region_probabilities(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec,
                         t: float) -> Tuple[float, float, float]:
    """
    Computes P1, P2, P3 at time t by spatial quadrature of |psi|^2 over
    (x_left(t), -d), (-d, d) and (d, x_right(t)), with
    x_left(t) = x0 - k_hi t / m - 10 w(t) and x_right(t) = d + k_hi t / m + 10 w(t).

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid
    :param t: time, t >= 0
    :return: (P1, P2, P3)
    """
    times = _check_times(t)
    p1, p2, p3 = _spatial(cfg, pk, q, times)
    trace = ProbabilityTrace(times, p1, p2, p3, 'spatial', q.k_lo, q.k_hi, q.n_k, q.rule)
    trace.check()
    return float(p1[0]), float(p2[0]), float(p3[0])


def _interior_components(cfg: BarrierConfig, q: QuadratureSpec):
    """
    kappa and the coefficients of exp(kappa x), exp(-kappa x) inside the barrier,
    derived from D so that kappa = 0 only needs a floor on |kappa|
    """
    k = q.nodes
    amplitudes = scattering_set(cfg, k)
    kappa = even_sqrt(cfg.k0_squared - k ** 2)
    kappa = np.where(np.abs(kappa) < _KAPPA_FLOOR, _KAPPA_FLOOR, kappa)
    front = 0.5 * amplitudes.d_trans * np.exp(1j * k * cfg.d)
    grow = front * np.exp(-kappa * cfg.d) * (1. + 1j * k / kappa)
    decay = front * np.exp(kappa * cfg.d) * (1. - 1j * k / kappa)
    return kappa, grow, decay


def p2_spectral(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec, t):
    """
    P2 from the double momentum integral

        P2(t) = sum over p, k of conj(c_p(t)) K(p, k) c_k(t),    K(p, k) = integral over |x| < d of conj(psi_p) psi_k

    with K in closed form. The kernel is built in blocks of rows and shared by all times.

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid
    :param t: time or times, >= 0
    :return: P2 with the shape of t
    """
    scalar = np.ndim(t) == 0
    times = _check_times(t)
    coefficients = time_coefficients(pk, q, times, cfg.m)
    kappa, grow, decay = _interior_components(cfg, q)
    kappa_bar, grow_bar, decay_bar = np.conj(kappa), np.conj(grow), np.conj(decay)

    def block(start: int) -> np.ndarray:
        rows = slice(start, start + KERNEL_BLOCK)
        kb, gb, db = kappa_bar[rows, None], grow_bar[rows, None], decay_bar[rows, None]
        kernel = (gb * grow * interval_exponential_integral(kb + kappa, cfg.d)
                  + gb * decay * interval_exponential_integral(kb - kappa, cfg.d)
                  + db * grow * interval_exponential_integral(kappa - kb, cfg.d)
                  + db * decay * interval_exponential_integral(-kb - kappa, cfg.d))
        return np.real(np.sum(np.conj(coefficients[rows]) * (kernel @ coefficients), axis=0))

    p2 = np.sum(map_blocks(block, range(0, kappa.size, KERNEL_BLOCK)), axis=0)
    return float(p2[0]) if scalar else p2


def probability_trace(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec, times=None,
                      method: str = 'spatial', check: bool = True) -> ProbabilityTrace:
    """
    Region probabilities over a time grid.

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid
    :param times: sample times (defaults to default_times())
    :param method: 'spatial', or 'spectral' to take P2 from the double momentum integral
    :param check: whether to enforce conservation at every sample
    :return: a ProbabilityTrace
    """
    if method not in METHODS:
        raise ConfigurationError(f'method must be one of {METHODS} (got {method!r})')
    times = _check_times(default_times() if times is None else times)
    logger.info('building %s trace on %d times with n_k=%d', method, times.size, q.n_k)
    p1, p2, p3 = _spatial(cfg, pk, q, times)
    if method == 'spectral':
        p2 = p2_spectral(cfg, pk, q, times)
    trace = ProbabilityTrace(times, p1, p2, p3, method, q.k_lo, q.k_hi, q.n_k, q.rule)
    logger.info('trace conservation error %.3g', trace.conservation_error())
    if check:
        trace.check()
    return trace


def asymptotics(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec) -> Asymptotics:
    """
    R = 2 pi integral |a|^2 |A|^2 dk and T = 2 pi integral |a|^2 |D|^2 dk, with k_R and k_T
    the mean momenta under the same two measures.

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid
    :return: an Asymptotics
    """
    q.check_covers(pk)
    k = q.nodes
    amplitudes = scattering_set(cfg, k)
    density = 2. * np.pi * composite_weights(q.n_k, q.dk, q.rule) * np.abs(amplitude_a(pk, k)) ** 2
    reflected = density * amplitudes.reflection_probability
    transmitted = density * amplitudes.transmission_probability
    r_prob, t_prob = float(reflected.sum()), float(transmitted.sum())
    k_r = float(reflected @ k / r_prob) if r_prob > 0 else None
    k_t = float(transmitted @ k / t_prob) if t_prob > 0 else None
    return Asymptotics(r_prob=r_prob, t_prob=t_prob, k_r=k_r, k_t=k_t)


def weighted_stationary_dwell(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec) -> float:
    """
    2 pi integral |a|^2 tau_dwell(k) dk, the stationary dwell time averaged over the packet. Integrating
    P2 over all times gives the same value, so it bounds the packet dwell time from t = 0.

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid, fine enough to resolve the resonances inside the window
    :return: the averaged dwell time
    """
    q.check_covers(pk)
    k = q.nodes
    dwell = np.fromiter((stationary_dwell(cfg, value) for value in k), dtype=float, count=k.size)
    density = 2. * np.pi * composite_weights(q.n_k, q.dk, q.rule) * np.abs(amplitude_a(pk, k)) ** 2
    return float(density @ dwell)
