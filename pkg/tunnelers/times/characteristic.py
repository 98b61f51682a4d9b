"""
Dwell, transmission and reflection times of the packet, computed from the region probabilities.

The transmission and reflection integrals start at the gate time t_eps, when the packet has spent a
duration eps inside the barrier.
"""
import logging
from dataclasses import dataclass, replace
from typing import Dict, Optional

import numpy as np
from scipy.integrate import cumulative_trapezoid

from tunnelers.core.exceptions import ConfigurationError, GateError, TailTruncationError
from tunnelers.core.utils import trapezoid_from
from tunnelers.packets.probabilities import Asymptotics, ProbabilityTrace
from tunnelers.times.depletion import FitResult

logger = logging.getLogger(__name__)

DEFAULT_EPSILON = 0.01
# gate as a fraction of tau_d when no absolute gate is given
RELATIVE_EPSILON = 1e-2
# channels with a smaller asymptotic probability get no time
NEGLIGIBLE_PROBABILITY = 1e-12
# largest accepted ratio between the analytic tail and the sampled part of an integral
TAIL_FRACTION = 0.01


@dataclass(frozen=True)
class TimesReport:
    """
    Packet times and the residual tau_d - (T tau_t + R tau_r) of the conditional-probability relation.
    `shared_limit` marks the variant where all three integrals start at t_epsilon.
    """
    tau_d: float
    tau_t: float
    tau_r: float
    epsilon: float
    t_epsilon: float
    r_prob: float
    t_prob: float
    residual: float
    shared_limit: bool = False

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}


def _with_tail(finite: float, tail: Optional[FitResult], t_max: float, label: str, strict: bool) -> float:
    if tail is None:
        return finite
    remainder = tail.remainder(t_max)
    if abs(remainder) > TAIL_FRACTION * abs(finite):
        message = (f'{label}: tail beyond t={t_max} contributes {remainder:.3g}, more than '
                   f'{TAIL_FRACTION:.0%} of the sampled part {finite:.3g}; extend the trace')
        if strict:
            raise TailTruncationError(message)
        logger.warning(message)
    return finite + remainder


def dwell_time(trace: ProbabilityTrace, tail: Optional[FitResult] = None, t_2: float = 0.) -> float:
    """
    Integral of P2 from t_2 to the end of the trace plus the fitted exponential remainder.

    :param trace: the probability trace
    :param tail: the exponential fit of P2, or None to skip the remainder
    :param t_2: the lower limit, any time before the packet reaches the barrier
    :return: the dwell time
    """
    t_max = float(trace.times[-1])
    if tail is not None and t_max < tail.window[0]:
        raise ConfigurationError(f'trace ends at {t_max}, before the fit window {tail.window}')
    finite = trapezoid_from(trace.times, trace.p2, t_2)
    return _with_tail(finite, tail, t_max, 'dwell time', strict=True)


def t_epsilon(trace: ProbabilityTrace, eps: float = DEFAULT_EPSILON, tau_d: Optional[float] = None) -> float:
    """
    Time at which the integral of P2 from 0 reaches eps, by bisection on the cumulative integral
    and linear interpolation inside the bracketing interval.

    :param trace: the probability trace
    :param eps: the gate, 0 < eps < tau_d
    :param tau_d: the dwell time bounding eps (defaults to the sampled integral of P2)
    :return: t_epsilon
    """
    cumulative = cumulative_trapezoid(trace.p2, trace.times, initial=0.)
    upper = cumulative[-1] if tau_d is None else tau_d
    if not 0. < eps < upper:
        raise GateError(f'eps must lie in (0, {upper:.4g}) (got {eps!r})')
    if eps > cumulative[-1]:
        raise GateError(f'the trace accumulates only {cumulative[-1]:.4g} of dwell, less than eps={eps}')
    # tiny negative P2 samples must not break the bisection
    cumulative = np.maximum.accumulate(cumulative)
    i = int(np.searchsorted(cumulative, eps, side='left'))
    lo, hi = cumulative[i - 1], cumulative[i]
    fraction = (eps - lo) / (hi - lo)
    return float(trace.times[i - 1] + fraction * (trace.times[i] - trace.times[i - 1]))


def transmission_time(trace: ProbabilityTrace, asym: Asymptotics, eps: float = DEFAULT_EPSILON,
                      tail: Optional[FitResult] = None, tau_d: Optional[float] = None) -> float:
    """
    Integral of 1 - P3(t) / T from t_epsilon, plus the fitted remainder of that integrand.

    :param trace: the probability trace
    :param asym: the asymptotic probabilities, T > 0
    :param eps: the gate
    :param tail: the exponential fit of 1 - P3 / T, or None
    :param tau_d: the dwell time bounding eps
    :return: the transmission time
    """
    if asym.t_prob <= 0:
        raise ConfigurationError('transmission time needs T > 0')
    start = t_epsilon(trace, eps, tau_d)
    finite = trapezoid_from(trace.times, 1. - trace.p3 / asym.t_prob, start)
    return _with_tail(finite, tail, float(trace.times[-1]), 'transmission time', strict=False)


def reflection_time(trace: ProbabilityTrace, asym: Asymptotics, eps: float = DEFAULT_EPSILON,
                    tail: Optional[FitResult] = None, tau_d: Optional[float] = None) -> float:
    """
    Integral of 1 - P1(t) / R from t_epsilon, plus the fitted remainder. Stretches where the integrand
    is negative are integrated as they are.
    """
    if asym.r_prob <= 0:
        raise ConfigurationError('reflection time needs R > 0')
    start = t_epsilon(trace, eps, tau_d)
    finite = trapezoid_from(trace.times, 1. - trace.p1 / asym.r_prob, start)
    return _with_tail(finite, tail, float(trace.times[-1]), 'reflection time', strict=False)


def conditional_check(report: TimesReport) -> float:
    """
    tau_d - (T tau_t + R tau_r), a channel without a time contributing nothing
    """
    transmitted = report.t_prob * report.tau_t if np.isfinite(report.tau_t) else 0.
    reflected = report.r_prob * report.tau_r if np.isfinite(report.tau_r) else 0.
    return report.tau_d - (transmitted + reflected)


def times_report(trace: ProbabilityTrace, asym: Asymptotics, eps: Optional[float] = None,
                 dwell_tail: Optional[FitResult] = None, transmission_tail: Optional[FitResult] = None,
                 reflection_tail: Optional[FitResult] = None,
                 relative_epsilon: float = RELATIVE_EPSILON) -> TimesReport:
    """
    Computes the three packet times and their conditional-probability residual. A channel whose
    asymptotic probability is below NEGLIGIBLE_PROBABILITY gets nan.

    :param trace: the probability trace
    :param asym: the asymptotic probabilities
    :param eps: absolute gate, or None for relative_epsilon * tau_d
    :param dwell_tail: the exponential fit of P2, or None
    :param transmission_tail: the exponential fit of 1 - P3 / T, or None
    :param reflection_tail: the exponential fit of 1 - P1 / R, or None
    :param relative_epsilon: the gate as a fraction of tau_d, 0 < relative_epsilon < 1
    :return: a TimesReport
    """
    tau_d = dwell_time(trace, dwell_tail)
    if eps is None:
        if not 0. < relative_epsilon < 1.:
            raise GateError(f'relative_epsilon must lie in (0, 1) (got {relative_epsilon!r})')
        eps = relative_epsilon * tau_d
    start = t_epsilon(trace, eps, tau_d)
    transmitted = asym.t_prob >= NEGLIGIBLE_PROBABILITY
    reflected = asym.r_prob >= NEGLIGIBLE_PROBABILITY
    if not transmitted:
        logger.info('T=%.3g is negligible, no transmission time', asym.t_prob)
    report = TimesReport(
        tau_d=tau_d,
        tau_t=transmission_time(trace, asym, eps, transmission_tail, tau_d) if transmitted else np.nan,
        tau_r=reflection_time(trace, asym, eps, reflection_tail, tau_d) if reflected else np.nan,
        epsilon=eps,
        t_epsilon=start,
        r_prob=asym.r_prob,
        t_prob=asym.t_prob,
        residual=np.nan,
    )
    report = replace(report, residual=conditional_check(report))
    logger.info('packet times: %s', report)
    return report


def shared_limit_times(trace: ProbabilityTrace, asym: Asymptotics, eps: float = DEFAULT_EPSILON,
                       tail: Optional[FitResult] = None) -> TimesReport:
    """
    Variant where the dwell integral also starts at t_epsilon and every remainder beyond the trace
    uses the decay constant of P2 with the amplitude read at the last sample. The samples are divided
    by P1 + P2 + P3 and R, T by R + T, so the residual vanishes up to rounding.

    :param trace: the probability trace
    :param asym: the asymptotic probabilities, R > 0 and T > 0
    :param eps: the gate
    :param tail: the exponential fit of P2 providing the decay constant, or None for no remainders
    :return: a TimesReport with shared_limit set
    """
    if asym.r_prob <= 0 or asym.t_prob <= 0:
        raise ConfigurationError('the shared-limit variant needs R > 0 and T > 0')
    start = t_epsilon(trace, eps)
    tau_dep = 0. if tail is None else tail.tau_dep
    total = trace.total
    p1, p2, p3 = trace.p1 / total, trace.p2 / total, trace.p3 / total
    r_prob, t_prob = (value / (asym.r_prob + asym.t_prob) for value in (asym.r_prob, asym.t_prob))

    def integral(values: np.ndarray) -> float:
        return trapezoid_from(trace.times, values, start) + values[-1] * tau_dep

    report = TimesReport(
        tau_d=integral(p2),
        tau_t=integral(1. - p3 / t_prob),
        tau_r=integral(1. - p1 / r_prob),
        epsilon=eps,
        t_epsilon=start,
        r_prob=r_prob,
        t_prob=t_prob,
        residual=np.nan,
        shared_limit=True,
    )
    return replace(report, residual=conditional_check(report))


def inspection_times(t_in: float = 0.9, t_fin_r: float = 1.9, t_fin_t: float = 2.7) -> Dict[str, float]:
    """
    Rough reflection and transmission times t_fin - t_in read off the snapshots

    :return: {'tau_r': t_fin_r - t_in, 'tau_t': t_fin_t - t_in}
    """
    if t_fin_r < t_in or t_fin_t < t_in:
        raise ConfigurationError('the final times must not precede t_in')
    return {'tau_r': t_fin_r - t_in, 'tau_t': t_fin_t - t_in}
