"""
Stationary scattering states of the rectangular barrier V(x) = v0 for |x| < d, 0 elsewhere (hbar = 1).

For x < -d:   psi_k(x) = exp(ikx) + A exp(-ikx)
For |x| < d:  psi_k(x) = B exp(kappa x) + C exp(-kappa x)
For x > d:    psi_k(x) = D exp(ikx)

with kappa^2 = k0^2 - k^2. Every branch-free quantity is written through the entire functions of kappa^2

    S(kappa^2) = sinh(2 kappa d) / kappa        C(kappa^2) = cosh(2 kappa d)

so that nothing depends on the sign chosen for kappa and nothing is singular at the barrier top (kappa = 0).
The denominator of the amplitudes is u = kappa * u_red with the reduced denominator

    u_red(k) = (kappa^2 - k^2) S - 2 i k C

which is entire in k. Its zeros are the zeros of u except for the removable point kappa = 0.
"""
from dataclasses import dataclass

import numpy as np

from tunnelers.core.config import BarrierConfig
from tunnelers.core.decorators import momentum_API
from tunnelers.core.exceptions import ConfigurationError
from tunnelers.core.utils import even_sqrt, sinh_over

# |(2d)^2 kappa^2| below which dS/dkappa^2 uses its Taylor series
_DERIVATIVE_SERIES_THRESHOLD = 1e-3


@dataclass(frozen=True)
class ScatteringSet:
    """
    Amplitudes of the stationary state of momentum k.

    `b_grow` and `c_decay` depend on the branch of kappa (stored for Re kappa >= 0 below the barrier top,
    Im kappa >= 0 above it); only their combination in psi_k is branch free. They are undefined (nan)
    exactly at kappa = 0. `u_val` is the reduced denominator u/kappa.
    """
    k: np.ndarray
    a_refl: np.ndarray
    b_grow: np.ndarray
    c_decay: np.ndarray
    d_trans: np.ndarray
    u_val: np.ndarray

    @property
    def reflection_probability(self):
        return np.abs(self.a_refl) ** 2

    @property
    def transmission_probability(self):
        return np.abs(self.d_trans) ** 2


def _check_positive(k) -> None:
    if np.any(np.real(k) <= 0) or np.any(np.imag(k) != 0):
        raise ConfigurationError('momentum k must be real and > 0')


def _even_parts(cfg: BarrierConfig, kappa_sq):
    """
    S = sinh(2 kappa d)/kappa and C = cosh(2 kappa d), both entire in kappa^2
    """
    kappa = even_sqrt(kappa_sq)
    s_even = sinh_over(kappa, 2. * cfg.d)
    c_even = np.cosh(2. * cfg.d * kappa)
    return s_even, c_even


@momentum_API
def kappa_squared(cfg: BarrierConfig, k):
    """
    kappa^2 = k0^2 - k^2, valid for complex momenta

    :param cfg: the barrier
    :param k: momentum (real or complex, scalar or array)
    :return: kappa^2 as complex
    """
    return cfg.k0_squared - np.asarray(k, dtype=complex) ** 2


def _reduced_denominator(cfg: BarrierConfig, k):
    k = np.asarray(k, dtype=complex)
    kappa_sq = cfg.k0_squared - k ** 2
    s_even, c_even = _even_parts(cfg, kappa_sq)
    return (kappa_sq - k ** 2) * s_even - 2j * k * c_even


@momentum_API
def scattering_set(cfg: BarrierConfig, k) -> ScatteringSet:
    """
    Computes the amplitudes A, B, C, D of the stationary state of momentum k.

    A and D are evaluated in branch-free form:
        A = -(kappa^2 + k^2) S exp(-2ikd) / u_red
        D = -2 i k exp(-2ikd) / u_red

    :param cfg: the barrier
    :param k: momentum, k > 0 (scalar or array)
    :return: a ScatteringSet
    """
    _check_positive(k)
    k = np.asarray(k, dtype=float)
    kc = k.astype(complex)
    kappa_sq = cfg.k0_squared - kc ** 2
    s_even, c_even = _even_parts(cfg, kappa_sq)
    u_red = (kappa_sq - kc ** 2) * s_even - 2j * kc * c_even
    phase = np.exp(-2j * kc * cfg.d)
    a_refl = -(kappa_sq + kc ** 2) * s_even * phase / u_red
    d_trans = -2j * kc * phase / u_red

    kappa = even_sqrt(kappa_sq)
    u_full = kappa * u_red
    with np.errstate(divide='ignore', invalid='ignore'):
        half = np.exp(-1j * kc * cfg.d)
        b_grow = np.where(u_full != 0, -1j * kc * (kappa + 1j * kc) * half * np.exp(-kappa * cfg.d) / u_full, np.nan)
        c_decay = np.where(u_full != 0, -1j * kc * (kappa - 1j * kc) * half * np.exp(kappa * cfg.d) / u_full, np.nan)
    return ScatteringSet(k=k, a_refl=a_refl, b_grow=b_grow, c_decay=c_decay, d_trans=d_trans, u_val=u_red)


def u_of_z(cfg: BarrierConfig, z):
    """
    Analytic continuation of the reduced denominator to complex momentum k = k0 z.

    :param cfg: the barrier
    :param z: reduced momentum (complex, scalar or array)
    :return: u_red(k0 z)
    """
    result = _reduced_denominator(cfg, cfg.k0 * np.asarray(z, dtype=complex))
    return result.item() if np.ndim(result) == 0 else result


def u_prime_of_z(cfg: BarrierConfig, z):
    """
    Analytic derivative d u_red(k0 z) / dz.

    With S' = dS/dkappa^2 = (2d C - S) / (2 kappa^2) and dC/dkappa^2 = d S:
        du_red/dk = -4k S - 2k (kappa^2 - k^2) S' - 2i C + 4 i d k^2 S
    """
    k = cfg.k0 * np.asarray(z, dtype=complex)
    kappa_sq = cfg.k0_squared - k ** 2
    s_even, c_even = _even_parts(cfg, kappa_sq)
    two_d = 2. * cfg.d
    x = two_d ** 2 * kappa_sq
    small = np.abs(x) < _DERIVATIVE_SERIES_THRESHOLD
    safe = np.where(small, 1., kappa_sq)
    s_prime = np.where(
        small,
        two_d ** 3 * (1. / 6. + x / 60. + x ** 2 / 1680.),
        (two_d * c_even - s_even) / (2. * safe),
    )
    du_dk = (-4. * k * s_even - 2. * k * (kappa_sq - k ** 2) * s_prime
             - 2j * c_even + 4j * cfg.d * k ** 2 * s_even)
    result = cfg.k0 * du_dk
    return result.item() if np.ndim(result) == 0 else result


def opaque_condition_residual(cfg: BarrierConfig, z):
    """
    Relative residual of [sin(2 i k0 d sqrt(1 - z^2)) / sqrt(1 - z^2)]^2 = 4 z^2,
    which every zero of u satisfies. In kappa^2-even form the left side is -k0^2 S^2.
    """
    z = np.asarray(z, dtype=complex)
    k = cfg.k0 * z
    s_even, _ = _even_parts(cfg, cfg.k0_squared - k ** 2)
    lhs = -cfg.k0_squared * s_even ** 2
    rhs = 4. * z ** 2
    result = np.abs(lhs - rhs) / np.abs(rhs)
    return result.item() if np.ndim(result) == 0 else result


@momentum_API
def transmission_amplitude(cfg: BarrierConfig, k):
    """
    t(k) = D(k) exp(2ikd), the transmitted amplitude relative to free propagation across the barrier
    """
    return scattering_set(cfg, k).d_trans * np.exp(2j * k * cfg.d)


@momentum_API
def reflection_amplitude(cfg: BarrierConfig, k):
    """
    r(k) = A(k) exp(2ikd)
    """
    return scattering_set(cfg, k).a_refl * np.exp(2j * k * cfg.d)


@momentum_API
def hartman_time(cfg: BarrierConfig, k):
    """
    Opaque-barrier limit of the phase time, 2m / (k kappa), for k below the barrier top
    """
    kappa = np.sqrt(cfg.k0_squared - np.asarray(k, dtype=float) ** 2)
    return 2. * cfg.m / (k * kappa)


def stationary_state(cfg: BarrierConfig, k, x) -> np.ndarray:
    """
    Evaluates psi_k(x) for every pair of positions and momenta.

    Inside the barrier the branch-free form D exp(ikd) [cosh(kappa (x-d)) + i k sinh(kappa (x-d)) / kappa]
    is used.

    :param cfg: the barrier
    :param k: momenta, k > 0, shape (n_k,)
    :param x: positions, shape (n_x,)
    :return: an array of shape (n_x, n_k)
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    amplitudes = scattering_set(cfg, k)
    kc = k.astype(complex)[None, :]
    xc = x[:, None]
    kappa = even_sqrt(cfg.k0_squared - kc ** 2)

    psi = np.empty((x.size, k.size), dtype=complex)
    left = x < -cfg.d
    right = x > cfg.d
    inside = ~(left | right)
    if left.any():
        xl = xc[left]
        psi[left] = np.exp(1j * kc * xl) + amplitudes.a_refl[None, :] * np.exp(-1j * kc * xl)
    if right.any():
        psi[right] = amplitudes.d_trans[None, :] * np.exp(1j * kc * xc[right])
    if inside.any():
        y = xc[inside] - cfg.d
        psi[inside] = (amplitudes.d_trans * np.exp(1j * k * cfg.d))[None, :] * (
            np.cosh(kappa * y) + 1j * kc * sinh_over(kappa, y)
        )
    return psi
