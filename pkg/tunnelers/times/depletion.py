"""
Long-time decay of the region probabilities and its prediction from the complex zeros of u.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import newton
from sklearn.linear_model import LinearRegression

from tunnelers.core.config import BarrierConfig
from tunnelers.core.exceptions import ConfigurationError, ContourError, FitError, ZeroSearchError
from tunnelers.core.utils import even_sqrt, map_blocks, sinh_over
from tunnelers.scattering.barrier import opaque_condition_residual, u_of_z, u_prime_of_z

logger = logging.getLogger(__name__)

DEFAULT_WINDOW = (30., 100.)
MIN_SAMPLES = 10
ACCEPTED_CORRELATION = -0.999

NEWTON_TOL = 1e-13
NEWTON_MAXITER = 100
DEDUPLICATION_DISTANCE = 1e-8
RESIDUAL_TOLERANCE = 1e-10
OPAQUE_TOLERANCE = 1e-8
CONTOUR_TOLERANCE = 1e-2


@dataclass(frozen=True)
class FitResult:
    """
    Exponential tail amplitude * exp(-t / tau_dep) fitted on `window`.
    `correlation` is the Pearson coefficient of (t, ln value).
    """
    amplitude: float
    tau_dep: float
    correlation: float
    window: Tuple[float, float]
    n_samples: int = 0

    @property
    def accepted(self) -> bool:
        return -1. <= self.correlation <= ACCEPTED_CORRELATION

    def __call__(self, t):
        return self.amplitude * np.exp(-np.asarray(t) / self.tau_dep)

    def remainder(self, t_max: float) -> float:
        """
        Integral of the fitted tail from t_max to infinity
        """
        return float(self.amplitude * self.tau_dep * np.exp(-t_max / self.tau_dep))


@dataclass(frozen=True)
class ComplexRegion:
    """
    Rectangle [x_lo, x_hi] x [y_lo, y_hi] in the reduced momentum z = k / k0
    """
    x_lo: float = 0.95
    x_hi: float = 1.05
    y_lo: float = -0.02
    y_hi: float = 0.02

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ConfigurationError(f'empty region {self}')

    @classmethod
    def around(cls, k: complex, half_width: float, cfg: BarrierConfig) -> 'ComplexRegion':
        """
        Square of half side `half_width` (in z) centred on the momentum k
        """
        z = k / cfg.k0
        return cls(z.real - half_width, z.real + half_width, z.imag - half_width, z.imag + half_width)

    def contains(self, z: complex) -> bool:
        return self.x_lo <= z.real <= self.x_hi and self.y_lo <= z.imag <= self.y_hi

    @property
    def corners(self) -> List[complex]:
        """
        Corners in counterclockwise order, starting bottom left
        """
        return [complex(self.x_lo, self.y_lo), complex(self.x_hi, self.y_lo),
                complex(self.x_hi, self.y_hi), complex(self.x_lo, self.y_hi)]


@dataclass(frozen=True)
class PoleResult:
    """
    The zero k = x + iy of u (in momentum units) governing the decay, and tau = m / (2 |x y|)
    """
    zero: complex
    tau_from_pole: float
    zero_count: Optional[int] = None
    region: Optional[ComplexRegion] = None


def fit_exponential_tail(times, values, window: Tuple[float, float] = DEFAULT_WINDOW) -> FitResult:
    """
    Ordinary least squares of ln(value) against t over the window.

    :param times: sample times
    :param values: samples, strictly positive in the window
    :param window: (t_lo, t_hi), both included
    :return: a FitResult
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    mask = (times >= window[0]) & (times <= window[1])
    n = int(mask.sum())
    if n < MIN_SAMPLES:
        raise FitError(f'window {window} holds {n} samples, at least {MIN_SAMPLES} are needed')
    t, v = times[mask], values[mask]
    if np.any(v <= 0):
        raise FitError(f'values must be > 0 in the window {window}')
    log_v = np.log(v)
    regression = LinearRegression().fit(t.reshape(-1, 1), log_v)
    slope = float(regression.coef_[0])
    if slope >= 0:
        raise FitError(f'the tail does not decay on {window} (slope {slope:.3g})')
    correlation = float(np.corrcoef(t, log_v)[0, 1])
    fit = FitResult(amplitude=float(np.exp(regression.intercept_)), tau_dep=-1. / slope,
                    correlation=correlation, window=(float(window[0]), float(window[1])), n_samples=n)
    if not fit.accepted:
        logger.warning('poor exponential fit on %s: correlation %.6f', window, correlation)
    return fit


def default_seeds(region: ComplexRegion = ComplexRegion(), nx: int = 21, ny: int = 11) -> np.ndarray:
    """
    nx x ny grid of starting points covering the region
    """
    x, y = np.meshgrid(np.linspace(region.x_lo, region.x_hi, nx), np.linspace(region.y_lo, region.y_hi, ny))
    return (x + 1j * y).ravel()


def _residual_scale(cfg: BarrierConfig, z: complex) -> float:
    """
    Size of the two terms of u_red at z, against which |u_red| is judged
    """
    k = cfg.k0 * z
    kappa_sq = cfg.k0_squared - k ** 2
    kappa = even_sqrt(kappa_sq)
    s_even = sinh_over(kappa, 2. * cfg.d)
    c_even = np.cosh(2. * cfg.d * kappa)
    return float(abs((kappa_sq - k ** 2) * s_even) + abs(2. * k * c_even))


def verify_zero(cfg: BarrierConfig, z: complex) -> bool:
    """
    Whether z is a zero of u_red, judged by the residual and by the opaque-barrier condition
    """
    residual = abs(u_of_z(cfg, z))
    if residual > RESIDUAL_TOLERANCE * _residual_scale(cfg, z):
        return False
    return opaque_condition_residual(cfg, z) < OPAQUE_TOLERANCE


def _newton(cfg: BarrierConfig, seed: complex) -> Optional[complex]:
    root, info = newton(lambda z: u_of_z(cfg, z), seed, fprime=lambda z: u_prime_of_z(cfg, z),
                        tol=NEWTON_TOL, maxiter=NEWTON_MAXITER, full_output=True, disp=False)
    if not info.converged:
        return None
    return complex(root)


def find_zeros(cfg: BarrierConfig, region: ComplexRegion = ComplexRegion(),
               seeds: Optional[Sequence[complex]] = None) -> List[complex]:
    """
    Zeros of u in the region by Newton iteration from every seed, with the analytic derivative.

    :param cfg: the barrier, v0 > 0
    :param region: the search rectangle in z = k / k0
    :param seeds: starting points in z (defaults to default_seeds(region))
    :return: the distinct zeros as complex momenta k, sorted by real part
    """
    if cfg.v0 <= 0:
        raise ConfigurationError('zero search needs v0 > 0')
    seeds = default_seeds(region) if seeds is None else np.asarray(seeds, dtype=complex)
    roots = map_blocks(lambda seed: _newton(cfg, seed), seeds)
    dropped = sum(root is None for root in roots)
    if dropped:
        logger.info('%d of %d seeds did not converge', dropped, len(seeds))

    zeros: List[complex] = []
    for z in roots:
        if z is None or not region.contains(z):
            continue
        if any(abs(z - other) < DEDUPLICATION_DISTANCE for other in zeros):
            continue
        if not verify_zero(cfg, z):
            logger.warning('discarding Newton point %s failing verification', z)
            continue
        zeros.append(z)
    if not zeros:
        raise ZeroSearchError(f'no zero of u found in {region}')
    zeros.sort(key=lambda z: (z.real, z.imag))
    logger.info('found %d zeros in %s', len(zeros), region)
    return [cfg.k0 * z for z in zeros]


def count_zeros(cfg: BarrierConfig, region: ComplexRegion) -> int:
    """
    Number of zeros of u in the region: (1 / 2 pi i) times the contour integral of u'/u
    along the boundary, each edge by adaptive quadrature.

    :param cfg: the barrier, v0 > 0
    :param region: the rectangle in z = k / k0
    :return: the zero count
    """
    corners = region.corners
    total = 0j
    for start, end in zip(corners, corners[1:] + corners[:1]):
        edge = end - start

        def integrand(s, start=start, edge=edge):
            z = start + s * edge
            return u_prime_of_z(cfg, z) / u_of_z(cfg, z) * edge

        value, _ = quad(integrand, 0., 1., complex_func=True, limit=200)
        total += value
    winding = total / (2j * np.pi)
    count = int(round(winding.real))
    residual = abs(winding - count)
    if residual >= CONTOUR_TOLERANCE:
        raise ContourError(f'argument principle gives {winding:.4f} in {region}; the contour passes near a zero')
    return count


def depletion_from_poles(zeros: Sequence[complex], m: float = 1., zero_count: Optional[int] = None,
                         region: Optional[ComplexRegion] = None) -> PoleResult:
    """
    Picks the zero x + iy with x y < 0 and the smallest |x y|, and returns m / (2 |x y|).

    :param zeros: complex momenta
    :param m: the mass
    :param zero_count: the argument-principle count to record, if any
    :param region: the region to record, if any
    :return: a PoleResult
    """
    candidates = [k for k in zeros if k.real * k.imag < 0]
    if not candidates:
        raise ZeroSearchError('no zero with x * y < 0')
    pole = min(candidates, key=lambda k: abs(k.real * k.imag))
    return PoleResult(zero=pole, tau_from_pole=m / (2. * abs(pole.real * pole.imag)),
                      zero_count=zero_count, region=region)
