import unittest
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.core.exceptions import ConfigurationError, NonConservationError
from tunnelers.packets.probabilities import (ProbabilityTrace, asymptotics, default_times, p2_spectral,
                                             probability_trace, region_probabilities, weighted_stationary_dwell)


class TestRegionProbabilities(TestCase):

    def setUp(self) -> None:
        self.barrier = BarrierConfig()
        self.packet = PacketConfig()
        # the resonance at k = 10.03 - 0.003i needs dk well below 0.003
        self.q = QuadratureSpec.for_packet(self.packet, n_k=4096)

    def test_initial_probabilities(self):
        p1, p2, p3 = region_probabilities(self.barrier, self.packet, self.q, 0.)
        self.assertAlmostEqual(p1, 1., delta=1e-6)
        self.assertAlmostEqual(p2, 0., delta=1e-6)
        self.assertAlmostEqual(p3, 0., delta=1e-6)

    def test_norm_is_conserved(self):
        for t in [5., 10., 50.]:
            with self.subTest(t=t):
                self.assertAlmostEqual(sum(region_probabilities(self.barrier, self.packet, self.q, t)), 1.,
                                       delta=1e-6)

    def test_conservation(self):
        times = np.array([0., 1., 1.3, 1.6, 2., 5., 10., 20.])
        trace = probability_trace(self.barrier, self.packet, self.q, times)
        self.assertLessEqual(trace.conservation_error(), 1e-5)
        for values in [trace.p1, trace.p2, trace.p3]:
            self.assertTrue(np.all(values >= -1e-6))
            self.assertTrue(np.all(values <= 1. + 1e-6))
        # at t = 20 the barrier is almost empty
        self.assertLess(trace.p2[-1], trace.p2[3])
        asym = asymptotics(self.barrier, self.packet, self.q)
        self.assertAlmostEqual(trace.p3[-1], asym.t_prob, delta=0.01)

    def test_grid_refinement(self):
        times = np.array([1., 1.5, 3., 20.])
        coarse = probability_trace(self.barrier, self.packet, self.q, times)
        fine = probability_trace(self.barrier, self.packet, QuadratureSpec.for_packet(self.packet, n_k=8192), times)
        for name in ['p1', 'p2', 'p3']:
            with self.subTest(region=name):
                assert_allclose(getattr(coarse, name), getattr(fine, name), atol=1e-5)

    def test_spectral_matches_spatial(self):
        times = np.linspace(0., 50., 20)
        spatial = probability_trace(self.barrier, self.packet, self.q, times)
        spectral = p2_spectral(self.barrier, self.packet, self.q, times)
        assert_allclose(spectral, spatial.p2, atol=1e-5)
        self.assertIsInstance(p2_spectral(self.barrier, self.packet, self.q, 1.5), float)
        trace = probability_trace(self.barrier, self.packet, self.q, times, method='spectral')
        self.assertEqual(trace.method, 'spectral')
        assert_allclose(trace.p2, spectral)

    def test_free_particle(self):
        cfg = BarrierConfig(v0=0.)
        asym = asymptotics(cfg, self.packet, self.q)
        self.assertEqual(asym.r_prob, 0.)
        self.assertIsNone(asym.k_r)
        self.assertAlmostEqual(asym.t_prob, 1., places=10)
        self.assertAlmostEqual(asym.k_t, 9.9, places=8)
        trace = probability_trace(cfg, self.packet, self.q, np.array([0., 1.5, 5.]))
        self.assertAlmostEqual(trace.p3[-1], 1., delta=1e-6)
        self.assertGreater(trace.p2[1], 0.1)

    def test_negative_time(self):
        with self.assertRaises(ConfigurationError):
            region_probabilities(self.barrier, self.packet, self.q, -1.)
        with self.assertRaises(ConfigurationError):
            probability_trace(self.barrier, self.packet, self.q, [0., 1.], method='exact')


class TestAsymptotics(TestCase):

    def setUp(self) -> None:
        self.barrier = BarrierConfig()
        self.packet = PacketConfig()
        self.q = QuadratureSpec.for_packet(self.packet, n_k=8192)

    def test_reference(self):
        asym = asymptotics(self.barrier, self.packet, self.q)
        self.assertAlmostEqual(asym.t_prob, 0.146, delta=0.005)
        self.assertAlmostEqual(asym.r_prob + asym.t_prob, 1., delta=1e-10)
        # mean momenta of the reflected and transmitted measures
        self.assertAlmostEqual(asym.k_r, 9.828, delta=0.005)
        self.assertAlmostEqual(asym.k_t, 10.322, delta=0.005)
        # the barrier accelerates the transmitted packet
        self.assertLess(asym.k_r, self.packet.k_av)
        self.assertLess(self.packet.k_av, asym.k_t)

    def test_grid_refinement(self):
        fine = asymptotics(self.barrier, self.packet, self.q)
        coarse = asymptotics(self.barrier, self.packet, QuadratureSpec.for_packet(self.packet, n_k=4096))
        self.assertAlmostEqual(coarse.t_prob, fine.t_prob, delta=1e-4)
        self.assertAlmostEqual(coarse.k_r, fine.k_r, delta=1e-4)
        self.assertAlmostEqual(coarse.k_t, fine.k_t, delta=1e-3)

    def test_weighted_stationary_dwell(self):
        averaged = weighted_stationary_dwell(self.barrier, self.packet, self.q)
        self.assertAlmostEqual(averaged, 0.9935, delta=0.005)
        # without a barrier every momentum crosses 2d in 2d m / k
        coarse = QuadratureSpec.for_packet(self.packet, n_k=512)
        free = weighted_stationary_dwell(BarrierConfig(v0=0.), self.packet, coarse)
        self.assertAlmostEqual(free, 4. / 9.9, delta=1e-3)


class TestProbabilityTrace(TestCase):

    def test_default_times(self):
        times = default_times()
        self.assertEqual(times.size, 1361)
        self.assertEqual(times[0], 0.)
        self.assertAlmostEqual(times[-1], 100.)
        self.assertTrue(np.all(np.diff(times) > 0))
        self.assertEqual(default_times(t_max=5.).size, 501)

    def test_validation(self):
        t = np.array([0., 1., 2.])
        ones = np.ones(3)
        with self.assertRaises(ConfigurationError):
            ProbabilityTrace(t, ones, ones, ones[:2])
        with self.assertRaises(ConfigurationError):
            ProbabilityTrace(t[::-1], ones, ones, ones)
        with self.assertRaises(ConfigurationError):
            ProbabilityTrace(t, ones, ones, ones, method='exact')

    def test_check(self):
        t = np.array([0., 1., 2.])
        trace = ProbabilityTrace(t, np.array([1., 0.5, 0.2]), np.array([0., 0.3, 0.1]), np.array([0., 0.2, 0.7]))
        trace.check()
        frame = trace.to_frame()
        self.assertEqual(list(frame.columns), ['t', 'P1', 'P2', 'P3'])
        broken = ProbabilityTrace(t, trace.p1, trace.p2 + 1e-3, trace.p3)
        self.assertAlmostEqual(broken.conservation_error(), 1e-3)
        with self.assertRaises(NonConservationError):
            broken.check()


if __name__ == '__main__':
    unittest.main()
