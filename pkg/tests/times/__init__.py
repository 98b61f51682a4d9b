from functools import lru_cache

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.packets.probabilities import asymptotics, default_times, probability_trace
from tunnelers.times.depletion import fit_exponential_tail


@lru_cache(maxsize=None)
def reference_run():
    """
    Trace, asymptotics and tail fits of the reference configuration, shared by the tests of this package
    """
    barrier, packet = BarrierConfig(), PacketConfig()
    q = QuadratureSpec.for_packet(packet, n_k=8192)
    trace = probability_trace(barrier, packet, q, default_times())
    asym = asymptotics(barrier, packet, q)
    fits = {
        'P2': fit_exponential_tail(trace.times, trace.p2),
        'R-P1': fit_exponential_tail(trace.times, asym.r_prob - trace.p1),
        'T-P3': fit_exponential_tail(trace.times, asym.t_prob - trace.p3),
        'reflection_integrand': fit_exponential_tail(trace.times, 1. - trace.p1 / asym.r_prob),
        'transmission_integrand': fit_exponential_tail(trace.times, 1. - trace.p3 / asym.t_prob),
    }
    return trace, asym, fits
