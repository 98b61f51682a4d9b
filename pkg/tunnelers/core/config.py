from dataclasses import dataclass

import numpy as np

from tunnelers.core.exceptions import ConfigurationError

RULES = ('simpson', 'trapezoid')


def _require(condition: bool, field: str, constraint: str, value) -> None:
    if not condition:
        raise ConfigurationError(f'{field} must satisfy {constraint} (got {value!r})')


@dataclass(frozen=True)
class BarrierConfig:
    """
    Rectangular barrier of height `v0` occupying |x| < d, in units where hbar = 1.

    `v0 = 0` is accepted and describes the free particle used as a reference.
    """
    v0: float = 50.
    d: float = 2.
    m: float = 1.

    def __post_init__(self):
        _require(np.isfinite(self.v0) and self.v0 >= 0, 'v0', 'v0 >= 0', self.v0)
        _require(np.isfinite(self.d) and self.d > 0, 'd', 'd > 0', self.d)
        _require(np.isfinite(self.m) and self.m > 0, 'm', 'm > 0', self.m)

    @property
    def k0_squared(self) -> float:
        return 2. * self.m * self.v0

    @property
    def k0(self) -> float:
        """
        Momentum matching the barrier top, k0 = sqrt(2 m v0)
        """
        return float(np.sqrt(self.k0_squared))


@dataclass(frozen=True)
class PacketConfig:
    """
    Gaussian packet with mean momentum `k_av`, width parameter `delta` and initial peak at `x0`.
    """
    k_av: float = 9.9
    delta: float = float(np.sqrt(2.))
    x0: float = -15.

    def __post_init__(self):
        _require(np.isfinite(self.delta) and self.delta > 0, 'delta', 'delta > 0', self.delta)
        _require(np.isfinite(self.x0), 'x0', 'a finite value', self.x0)
        _require(np.isfinite(self.k_av) and self.k_av - 6. * self.sigma_a > 0,
                 'k_av', 'k_av - 6/(delta*sqrt(2)) > 0 (negligible negative-momentum content)', self.k_av)

    @property
    def sigma_a(self) -> float:
        """
        Standard deviation of the amplitude Gaussian |a(k)|, 1/(delta sqrt(2))
        """
        return 1. / (self.delta * np.sqrt(2.))


@dataclass(frozen=True)
class QuadratureSpec:
    """
    Uniform momentum grid on [k_lo, k_hi] with `n_k` intervals (n_k + 1 nodes) and a composite rule.
    """
    k_lo: float
    k_hi: float
    n_k: int = 8192
    rule: str = 'simpson'

    def __post_init__(self):
        _require(self.k_lo > 0, 'k_lo', 'k_lo > 0', self.k_lo)
        _require(self.k_hi > self.k_lo, 'k_hi', 'k_hi > k_lo', self.k_hi)
        _require(self.rule in RULES, 'rule', f'one of {RULES}', self.rule)
        _require(int(self.n_k) == self.n_k and self.n_k >= 2, 'n_k', 'an integer >= 2', self.n_k)
        if self.rule == 'simpson':
            _require(self.n_k % 2 == 0, 'n_k', 'an even number of intervals for the simpson rule', self.n_k)

    @classmethod
    def for_packet(cls, packet: PacketConfig, n_k: int = 8192, n_sigma: float = 8.,
                   rule: str = 'simpson') -> 'QuadratureSpec':
        """
        Builds the window k_av +/- n_sigma * sigma_a around the packet

        :param packet: the packet to be represented
        :param n_k: the number of intervals
        :param n_sigma: the half width of the window in units of sigma_a
        :param rule: the composite rule ('simpson' or 'trapezoid')
        :return: a QuadratureSpec
        """
        half = n_sigma * packet.sigma_a
        return cls(k_lo=packet.k_av - half, k_hi=packet.k_av + half, n_k=n_k, rule=rule)

    @property
    def dk(self) -> float:
        return (self.k_hi - self.k_lo) / self.n_k

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.k_lo, self.k_hi, self.n_k + 1)

    def covers(self, packet: PacketConfig, n_sigma: float = 8.) -> bool:
        """
        Whether the window contains k_av +/- n_sigma * sigma_a
        """
        half = n_sigma * packet.sigma_a
        tol = 1e-12 * packet.k_av
        return self.k_lo <= packet.k_av - half + tol and self.k_hi >= packet.k_av + half - tol

    def check_covers(self, packet: PacketConfig) -> None:
        if not self.covers(packet):
            raise ConfigurationError(
                f'quadrature window [{self.k_lo}, {self.k_hi}] must contain k_av +/- 8 sigma_a '
                f'= [{packet.k_av - 8 * packet.sigma_a}, {packet.k_av + 8 * packet.sigma_a}]'
            )
