import unittest
from unittest import TestCase

import numpy as np

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.core.exceptions import ConfigurationError


class TestConfig(TestCase):

    def test_barrier(self):
        barrier = BarrierConfig()
        self.assertAlmostEqual(barrier.k0_squared, 100.)
        self.assertAlmostEqual(barrier.k0, 10.)
        self.assertEqual(BarrierConfig(v0=0.).k0, 0.)

    def test_barrier_constraints(self):
        for kwargs in [{'v0': -1.}, {'d': 0.}, {'m': -2.}, {'v0': np.nan}]:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigurationError):
                    BarrierConfig(**kwargs)

    def test_packet(self):
        packet = PacketConfig()
        self.assertAlmostEqual(packet.sigma_a, 0.5)
        for kwargs in [{'delta': 0.}, {'k_av': 2.}, {'x0': np.inf}]:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigurationError):
                    PacketConfig(**kwargs)

    def test_quadrature_for_packet(self):
        packet = PacketConfig()
        q = QuadratureSpec.for_packet(packet, n_k=1024)
        self.assertAlmostEqual(q.k_lo, 5.9)
        self.assertAlmostEqual(q.k_hi, 13.9)
        self.assertEqual(q.nodes.shape, (1025,))
        self.assertAlmostEqual(q.dk, 8. / 1024)
        self.assertTrue(q.covers(packet))
        q.check_covers(packet)

    def test_quadrature_constraints(self):
        with self.assertRaises(ConfigurationError):
            QuadratureSpec(1., 2., n_k=101)
        with self.assertRaises(ConfigurationError):
            QuadratureSpec(2., 1.)
        with self.assertRaises(ConfigurationError):
            QuadratureSpec(1., 2., rule='gauss')
        QuadratureSpec(1., 2., n_k=101, rule='trapezoid')
        with self.assertRaises(ConfigurationError):
            QuadratureSpec(8., 12.).check_covers(PacketConfig())


if __name__ == '__main__':
    unittest.main()
