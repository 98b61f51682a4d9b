import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List

import numpy as np
from scipy.integrate import trapezoid

from tunnelers.core.exceptions import ConfigurationError

WORKERS_ENV = 'TUNNELERS_WORKERS'

# below this |z| the truncated series is used instead of the closed forms
_SERIES_THRESHOLD = 1e-3


def composite_weights(n_intervals: int, h: float, rule: str = 'simpson') -> np.ndarray:
    """
    Weights of a composite quadrature rule on n_intervals + 1 equally spaced nodes.

    :param n_intervals: the number of intervals (even for simpson)
    :param h: the node spacing
    :param rule: 'simpson' or 'trapezoid'
    :return: an array of shape (n_intervals + 1,)
    """
    w = np.ones(n_intervals + 1)
    if rule == 'simpson':
        if n_intervals % 2:
            raise ConfigurationError(f'simpson rule needs an even number of intervals (got {n_intervals})')
        w[1:-1:2] = 4.
        w[2:-1:2] = 2.
        return w * h / 3.
    if rule == 'trapezoid':
        w[0] = w[-1] = 0.5
        return w * h
    raise ConfigurationError(f'unknown quadrature rule {rule!r}')


def sinh_over(s, y):
    """
    sinh(s y) / s, an even function of s that stays finite as s -> 0.

    :param s: complex array
    :param y: real or complex array broadcastable with s
    :return: sinh(s y) / s
    """
    s = np.asarray(s, dtype=complex)
    y = np.asarray(y)
    sy = s * y
    small = np.abs(sy) < _SERIES_THRESHOLD
    safe_s = np.where(small, 1., s)
    series = y * (1. + sy ** 2 / 6. + sy ** 4 / 120.)
    return np.where(small, series, np.sinh(sy) / safe_s)


def interval_exponential_integral(s, d: float):
    """
    Integral of exp(s x) over [-d, d], i.e. 2 sinh(s d) / s (equal to 2d for s = 0).
    """
    return 2. * sinh_over(s, d)


def even_sqrt(z):
    """
    Principal square root of a complex array (Re >= 0, and Im >= 0 on the negative real axis)
    """
    return np.sqrt(np.asarray(z, dtype=complex))


def next_power_of_two(n: int) -> int:
    return 1 << (int(np.ceil(n)) - 1).bit_length()


def trapezoid_from(t: np.ndarray, y: np.ndarray, t_lo: float) -> float:
    """
    Trapezoidal integral of sampled y(t) from t_lo (not necessarily a node) to t[-1].
    The value at t_lo is linearly interpolated.

    :param t: sorted sample times
    :param y: samples
    :param t_lo: the lower limit, t[0] <= t_lo <= t[-1]
    :return: the integral
    """
    if not t[0] <= t_lo <= t[-1]:
        raise ValueError(f'lower limit {t_lo} outside the sampled range [{t[0]}, {t[-1]}]')
    i = int(np.searchsorted(t, t_lo, side='right'))
    if i >= len(t):
        return 0.
    y_lo = np.interp(t_lo, t, y)
    head = 0.5 * (y_lo + y[i]) * (t[i] - t_lo)
    return float(head + trapezoid(y[i:], t[i:]))


def worker_count() -> int:
    """
    Number of workers read from the TUNNELERS_WORKERS environment variable (default 1)
    """
    raw = os.environ.get(WORKERS_ENV, '1')
    try:
        n = int(raw)
    except ValueError:
        raise ConfigurationError(f'{WORKERS_ENV} must be a positive integer (got {raw!r})') from None
    if n < 1:
        raise ConfigurationError(f'{WORKERS_ENV} must be a positive integer (got {raw!r})')
    return n


def map_blocks(func: Callable, blocks: Iterable) -> List:
    """
    Applies func to every block, on a thread pool of worker_count() threads.
    Results come back in block order, so the outcome does not depend on the number of workers.

    :param func: a pure function of one block
    :param blocks: the blocks
    :return: the list of results
    """
    blocks = list(blocks)
    n_workers = min(worker_count(), max(len(blocks), 1))
    if n_workers == 1:
        return [func(block) for block in blocks]
    with ThreadPoolExecutor(max_workers=n_workers) as executor:
        return list(executor.map(func, blocks))
