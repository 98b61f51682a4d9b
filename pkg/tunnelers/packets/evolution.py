"""
Gaussian packet built as a superposition of stationary states,

    psi(x, t) = integral over k of a(k) psi_k(x) exp(-i k^2 t / 2m)

evaluated by composite quadrature on a uniform momentum grid.
"""
import logging

import numpy as np

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.core.decorators import momentum_API
from tunnelers.core.exceptions import ConfigurationError
from tunnelers.core.utils import composite_weights, map_blocks
from tunnelers.scattering.barrier import stationary_state

logger = logging.getLogger(__name__)

# positions evaluated together against the whole momentum grid
X_BLOCK = 256


@momentum_API
def amplitude_a(pk: PacketConfig, k):
    """
    Momentum amplitude (2 delta^2 / 4 pi^3)^(1/4) exp(-delta^2 (k - k_av)^2) exp(-i k x0),
    normalised so that 2 pi * integral of |a|^2 dk = 1.

    :param pk: the packet
    :param k: momentum (scalar or array)
    :return: a(k)
    """
    norm = (2. * pk.delta ** 2 / (4. * np.pi ** 3)) ** 0.25
    k = np.asarray(k, dtype=float)
    return norm * np.exp(-pk.delta ** 2 * (k - pk.k_av) ** 2) * np.exp(-1j * k * pk.x0)


def momentum_weights(pk: PacketConfig, q: QuadratureSpec) -> np.ndarray:
    """
    Quadrature weights times the amplitude at the nodes of q, w_n a(k_n)

    :param pk: the packet
    :param q: the momentum grid, covering k_av +/- 8 sigma_a
    :return: an array of shape (q.n_k + 1,)
    """
    q.check_covers(pk)
    return composite_weights(q.n_k, q.dk, q.rule) * amplitude_a(pk, q.nodes)


def packet_width(pk: PacketConfig, t, m: float = 1.):
    """
    Standard deviation of |psi(x, t)|^2 for the freely moving packet
    """
    return pk.delta * np.sqrt(1. + (np.asarray(t) / (2. * m * pk.delta ** 2)) ** 2)


def free_packet(k_av: float, delta: float, x0: float, m: float, x, t: float) -> np.ndarray:
    """
    Closed form of the freely spreading packet: the Gaussian integral of a(k) exp(ikx - ik^2 t/2m).

    Unlike PacketConfig, any sign of k_av is accepted.

    :param k_av: mean momentum
    :param delta: width parameter
    :param x0: initial peak position
    :param m: mass
    :param x: positions
    :param t: time
    :return: psi(x, t)
    """
    x = np.asarray(x, dtype=float)
    norm = (2. * delta ** 2 / (4. * np.pi ** 3)) ** 0.25
    alpha = delta ** 2 + 0.5j * t / m
    beta = 2. * delta ** 2 * k_av + 1j * (x - x0)
    return norm * np.sqrt(np.pi / alpha) * np.exp(beta ** 2 / (4. * alpha) - delta ** 2 * k_av ** 2)


def time_coefficients(pk: PacketConfig, q: QuadratureSpec, t, m: float = 1.) -> np.ndarray:
    """
    w_n a(k_n) exp(-i k_n^2 t / 2m) for every time

    :return: an array of shape (q.n_k + 1, n_t)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    k = q.nodes
    return momentum_weights(pk, q)[:, None] * np.exp(-0.5j * np.outer(k ** 2, t) / m)


def _evaluate(cfg: BarrierConfig, q: QuadratureSpec, x: np.ndarray, coefficients: np.ndarray) -> np.ndarray:
    blocks = [x[i:i + X_BLOCK] for i in range(0, x.size, X_BLOCK)]
    k = q.nodes
    parts = map_blocks(lambda block: stationary_state(cfg, k, block) @ coefficients, blocks)
    return np.concatenate(parts, axis=0) if parts else np.empty((0,) + coefficients.shape[1:], dtype=complex)


def psi(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec, x, t: float):
    """
    Evaluates the packet at positions x and time t

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid
    :param x: position (scalar or array)
    :param t: time, t >= 0
    :return: psi(x, t), with the shape of x
    """
    if t < 0:
        raise ConfigurationError(f't must be >= 0 (got {t!r})')
    shape = np.shape(x)
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    values = _evaluate(cfg, q, x, time_coefficients(pk, q, t, cfg.m))[:, 0]
    return values.reshape(shape) if shape else values[0]


def snapshot(cfg: BarrierConfig, pk: PacketConfig, q: QuadratureSpec, x_grid, t: float) -> np.ndarray:
    """
    Packet on a strictly increasing grid at time t, evaluated in blocks of positions

    :param cfg: the barrier
    :param pk: the packet
    :param q: the momentum grid
    :param x_grid: strictly increasing positions
    :param t: time, t >= 0
    :return: psi on the grid
    """
    x_grid = np.asarray(x_grid, dtype=float)
    if x_grid.ndim != 1 or np.any(np.diff(x_grid) <= 0):
        raise ConfigurationError('x_grid must be a strictly increasing 1d grid')
    logger.info('snapshot at t=%s on %d points', t, x_grid.size)
    return psi(cfg, pk, q, x_grid, t)
