import unittest
from unittest import TestCase

import numpy as np
from numpy.random import default_rng
from numpy.testing import assert_allclose

from tunnelers.core.config import BarrierConfig
from tunnelers.core.exceptions import ConfigurationError
from tunnelers.scattering.barrier import (hartman_time, kappa_squared, opaque_condition_residual, scattering_set,
                                          stationary_state, transmission_amplitude, u_of_z, u_prime_of_z)


class TestScatteringSet(TestCase):

    def setUp(self) -> None:
        self.rng = default_rng(0)
        self.cfg = BarrierConfig(v0=50., d=2., m=1.)

    def test_unitarity(self):
        k0 = self.cfg.k0
        k = np.concatenate([self.rng.uniform(0.1, 2. * k0, 990), k0 + self.rng.uniform(-1e-6, 1e-6, 10), [k0]])
        amplitudes = scattering_set(self.cfg, k)
        total = amplitudes.reflection_probability + amplitudes.transmission_probability
        self.assertLess(np.max(np.abs(total - 1.)), 1e-12)

    def test_transmission_probability_closed_form(self):
        k = 9.9
        kappa = np.sqrt(self.cfg.k0_squared - k ** 2)
        expected = 4 * k ** 2 * kappa ** 2 / (4 * k ** 2 * kappa ** 2
                                              + self.cfg.k0_squared ** 2 * np.sinh(2 * kappa * self.cfg.d) ** 2)
        amplitudes = scattering_set(self.cfg, k)
        self.assertAlmostEqual(amplitudes.transmission_probability / expected, 1., places=12)

    def test_scalar_input(self):
        amplitudes = scattering_set(self.cfg, 9.9)
        self.assertEqual(np.ndim(amplitudes.d_trans), 0)
        self.assertIsInstance(kappa_squared(self.cfg, 9.9), complex)

    def test_free_particle(self):
        k = np.linspace(1., 20., 50)
        amplitudes = scattering_set(BarrierConfig(v0=0.), k)
        assert_allclose(amplitudes.a_refl, 0., atol=1e-14)
        assert_allclose(amplitudes.d_trans, 1., rtol=1e-12)

    def test_matching_at_edges(self):
        d = self.cfg.d
        k = np.array([3., 7., 9.9, 10.327, 12., 17.])
        amplitudes = scattering_set(self.cfg, k)
        kappa = np.sqrt((self.cfg.k0_squared - k ** 2).astype(complex))
        a, b, c, dd = amplitudes.a_refl, amplitudes.b_grow, amplitudes.c_decay, amplitudes.d_trans
        # x = -d
        assert_allclose(np.exp(-1j * k * d) + a * np.exp(1j * k * d),
                        b * np.exp(-kappa * d) + c * np.exp(kappa * d), atol=1e-10)
        assert_allclose(1j * k * (np.exp(-1j * k * d) - a * np.exp(1j * k * d)),
                        kappa * (b * np.exp(-kappa * d) - c * np.exp(kappa * d)), atol=1e-10)
        # x = +d
        assert_allclose(dd * np.exp(1j * k * d), b * np.exp(kappa * d) + c * np.exp(-kappa * d), atol=1e-10)
        assert_allclose(1j * k * dd * np.exp(1j * k * d),
                        kappa * (b * np.exp(kappa * d) - c * np.exp(-kappa * d)), atol=1e-10)

    def test_barrier_top(self):
        amplitudes = scattering_set(self.cfg, self.cfg.k0)
        self.assertTrue(np.isnan(amplitudes.b_grow))
        self.assertTrue(np.isnan(amplitudes.c_decay))
        self.assertTrue(np.isfinite(amplitudes.d_trans))
        self.assertTrue(np.isfinite(amplitudes.a_refl))
        # exactly at the top, A and D vary continuously
        for k in [self.cfg.k0 * (1. + 1e-9), self.cfg.k0 * (1. - 1e-9)]:
            with self.subTest(k=k):
                nearby = scattering_set(self.cfg, k)
                self.assertAlmostEqual(abs(amplitudes.d_trans - nearby.d_trans), 0., places=6)
                self.assertAlmostEqual(abs(amplitudes.a_refl - nearby.a_refl), 0., places=6)

    def test_both_branches_of_kappa(self):
        d = self.cfg.d
        x = np.linspace(-d, d, 9)
        for k in [9.5, 9.9, 10.327, 14.]:
            root = np.sqrt(complex(self.cfg.k0_squared - k ** 2))
            amplitudes = scattering_set(self.cfg, k)
            interior = stationary_state(self.cfg, k, x)[:, 0]
            for kappa in [root, -root]:
                with self.subTest(k=k, kappa=kappa):
                    matching = np.array([
                        [np.exp(1j * k * d), -np.exp(-kappa * d), -np.exp(kappa * d), 0.],
                        [-1j * k * np.exp(1j * k * d), -kappa * np.exp(-kappa * d), kappa * np.exp(kappa * d), 0.],
                        [0., np.exp(kappa * d), np.exp(-kappa * d), -np.exp(1j * k * d)],
                        [0., kappa * np.exp(kappa * d), -kappa * np.exp(-kappa * d), -1j * k * np.exp(1j * k * d)],
                    ])
                    incoming = np.array([-np.exp(-1j * k * d), -1j * k * np.exp(-1j * k * d), 0., 0.])
                    a, b, c, dd = np.linalg.solve(matching, incoming)
                    self.assertAlmostEqual(abs(a - amplitudes.a_refl), 0., places=9)
                    self.assertAlmostEqual(abs(dd - amplitudes.d_trans), 0., places=9)
                    assert_allclose(b * np.exp(kappa * x) + c * np.exp(-kappa * x), interior, atol=1e-9)

    def test_invalid_momentum(self):
        for k in [0., -1., np.array([1., -2.])]:
            with self.subTest(k=k):
                with self.assertRaises(ConfigurationError):
                    scattering_set(self.cfg, k)


class TestStationaryState(TestCase):

    def setUp(self) -> None:
        self.cfg = BarrierConfig()

    def test_edges(self):
        d = self.cfg.d
        k = np.array([8., 9.9, 10., 10.327])
        psi = stationary_state(self.cfg, k, np.array([-d, d]))
        amplitudes = scattering_set(self.cfg, k)
        assert_allclose(psi[0], np.exp(-1j * k * d) + amplitudes.a_refl * np.exp(1j * k * d), rtol=1e-9, atol=1e-12)
        assert_allclose(psi[1], amplitudes.d_trans * np.exp(1j * k * d), rtol=1e-9, atol=1e-12)

    def test_continuity(self):
        d = self.cfg.d
        k = np.array([9.9, 10.327])
        eps = 1e-9
        x = np.array([-d - eps, -d + eps, d - eps, d + eps])
        psi = stationary_state(self.cfg, k, x)
        assert_allclose(psi[0], psi[1], atol=1e-6)
        assert_allclose(psi[2], psi[3], atol=1e-6)

    def test_shape(self):
        psi = stationary_state(self.cfg, np.linspace(9., 11., 7), np.linspace(-5., 5., 11))
        self.assertEqual(psi.shape, (11, 7))


class TestComplexDenominator(TestCase):

    def setUp(self) -> None:
        self.cfg = BarrierConfig()

    def test_u_of_z_matches_real_axis(self):
        k = np.array([9.696, 9.9, 10.327])
        assert_allclose(u_of_z(self.cfg, k / self.cfg.k0), scattering_set(self.cfg, k).u_val, rtol=1e-12)
        self.assertIsInstance(u_of_z(self.cfg, 0.99 - 0.001j), complex)

    def test_u_prime_of_z(self):
        h = 1e-6
        for z in [0.99 - 3e-4j, 1.0 + 1e-7, 1.05 - 0.01j, 0.5 + 0.2j]:
            with self.subTest(z=z):
                numeric = (u_of_z(self.cfg, z + h) - u_of_z(self.cfg, z - h)) / (2. * h)
                analytic = u_prime_of_z(self.cfg, z)
                self.assertLess(abs(analytic - numeric), 1e-5 * abs(analytic))

    def test_conjugate_symmetry(self):
        # zeros come in pairs z, -conj(z)
        z = 1.003 - 3e-4j
        self.assertAlmostEqual(abs(u_of_z(self.cfg, -np.conj(z)) - np.conj(u_of_z(self.cfg, z))), 0., places=6)

    def test_opaque_residual_is_positive_off_zeros(self):
        self.assertGreater(opaque_condition_residual(self.cfg, 0.9), 1e-3)


class TestTransmissionAmplitude(TestCase):

    def test_free_particle_phase(self):
        cfg = BarrierConfig(v0=0.)
        k = np.array([2., 9.9])
        assert_allclose(transmission_amplitude(cfg, k), np.exp(2j * k * cfg.d), rtol=1e-12)

    def test_hartman_time(self):
        self.assertAlmostEqual(hartman_time(BarrierConfig(), 8.), 2. / (8. * 6.))


if __name__ == '__main__':
    unittest.main()
