import unittest
from unittest import TestCase

import numpy as np
from numpy.testing import assert_allclose
from scipy.integrate import simpson

from tunnelers.core.config import BarrierConfig, PacketConfig, QuadratureSpec
from tunnelers.core.exceptions import ConfigurationError
from tunnelers.packets.evolution import amplitude_a, free_packet, momentum_weights, packet_width, psi, snapshot


class TestEvolution(TestCase):

    def setUp(self) -> None:
        self.barrier = BarrierConfig()
        self.packet = PacketConfig()
        self.q = QuadratureSpec.for_packet(self.packet, n_k=4096)

    def test_amplitude_normalisation(self):
        k = np.linspace(0., 20., 20001)
        self.assertAlmostEqual(2. * np.pi * simpson(np.abs(amplitude_a(self.packet, k)) ** 2, x=k), 1., places=10)
        self.assertIsInstance(amplitude_a(self.packet, 9.9), complex)

    def test_initial_packet(self):
        x = np.linspace(-40., 20., 12001)
        values = snapshot(self.barrier, self.packet, self.q, x, 0.)
        density = np.abs(values) ** 2
        self.assertAlmostEqual(simpson(density, x=x), 1., delta=1e-6)
        self.assertAlmostEqual(x[np.argmax(density)], -15., delta=0.01)
        # the barrier does not act before the packet reaches it
        assert_allclose(values, free_packet(9.9, np.sqrt(2.), -15., 1., x, 0.), atol=1e-6)

    def test_norm_after_collision(self):
        x = np.linspace(-30., 30., 12001)
        density = np.abs(snapshot(self.barrier, self.packet, self.q, x, 2.)) ** 2
        self.assertAlmostEqual(simpson(density, x=x), 1., delta=1e-5)

    def test_free_particle(self):
        cfg = BarrierConfig(v0=0.)
        x = np.linspace(-20., 20., 801)
        for t in [0.5, 2.]:
            with self.subTest(t=t):
                expected = free_packet(9.9, np.sqrt(2.), -15., 1., x, t)
                assert_allclose(np.abs(psi(cfg, self.packet, self.q, x, t)) ** 2, np.abs(expected) ** 2, atol=1e-6)
                density = np.abs(expected) ** 2
                self.assertAlmostEqual(x[np.argmax(density)], -15. + 9.9 * t, delta=0.05)

    def test_packet_width(self):
        x = np.linspace(-60., 60., 24001)
        t = 3.
        density = np.abs(free_packet(9.9, np.sqrt(2.), -15., 1., x, t)) ** 2
        mean = simpson(x * density, x=x)
        variance = simpson((x - mean) ** 2 * density, x=x)
        self.assertAlmostEqual(np.sqrt(variance), packet_width(self.packet, t), places=6)
        self.assertAlmostEqual(packet_width(self.packet, 0.), np.sqrt(2.))

    def test_free_packet_momentum_sign(self):
        # at t = 0 the mean momentum only sets the phase
        x = np.linspace(-30., 30., 601)
        forward = free_packet(9.9, np.sqrt(2.), -15., 1., x, 0.)
        backward = free_packet(-9.9, np.sqrt(2.), -15., 1., x, 0.)
        assert_allclose(np.abs(forward), np.abs(backward), atol=1e-14)

    def test_scalar_position(self):
        value = psi(self.barrier, self.packet, self.q, -15., 0.)
        self.assertIsInstance(value, complex)

    def test_errors(self):
        with self.assertRaises(ConfigurationError):
            psi(self.barrier, self.packet, self.q, 0., -1.)
        with self.assertRaises(ConfigurationError):
            snapshot(self.barrier, self.packet, self.q, np.array([0., 0., 1.]), 1.)
        with self.assertRaises(ConfigurationError):
            momentum_weights(self.packet, QuadratureSpec(9., 11.))


if __name__ == '__main__':
    unittest.main()
