import tempfile
import unittest
from pathlib import Path
from unittest import TestCase

import numpy as np

from tunnelers.core.exceptions import ConfigurationError
from tunnelers.reporting.config import RunConfig, parse_config, read_config_file


class TestRunConfig(TestCase):

    def setUp(self) -> None:
        self.directory = tempfile.TemporaryDirectory()
        self.path = Path(self.directory.name) / 'run.cfg'

    def tearDown(self) -> None:
        self.directory.cleanup()

    def test_defaults(self):
        config = RunConfig()
        self.assertTrue(config.is_reference_physics())
        self.assertEqual(config.x_grid.size, 6001)
        self.assertEqual(config.fit_window, (30., 100.))
        self.assertEqual(config.times().size, 1361)
        self.assertEqual(config.quadrature().n_k, 8192)
        self.assertEqual(config.quadrature(snapshot=True).n_k, 4096)
        self.assertAlmostEqual(config.barrier().k0, 10.)

    def test_fit_window_follows_t_max(self):
        config = RunConfig(t_max=60.)
        self.assertEqual(config.fit_window, (30., 60.))
        self.assertFalse(RunConfig(v0=40.).is_reference_physics())

    def test_invalid_values(self):
        for kwargs in [{'epsilon': -0.01}, {'epsilon_relative': 0.}, {'epsilon_relative': 1.5}, {'v0': -1.},
                       {'fit_lo': 200.}, {'trace_method': 'exact'}, {'x_lo': 5., 'x_hi': 0.}, {'n_k': 1001}]:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ConfigurationError):
                    RunConfig(**kwargs)

    def test_file_and_overrides(self):
        self.path.write_text('# reference run with a lower barrier\n'
                             'v0 = 40\n'
                             'k-av = 9.5   # slower packet\n'
                             '\n'
                             'snapshot_times = 0, 1.5\n'
                             'n_k = 4096\n', encoding='utf-8')
        self.assertEqual(read_config_file(self.path)['k_av'], '9.5')
        config = parse_config(self.path, {'v0': 45., 'epsilon': None})
        self.assertEqual(config.v0, 45.)
        self.assertEqual(config.k_av, 9.5)
        self.assertEqual(config.n_k, 4096)
        self.assertEqual(config.snapshot_times, (0., 1.5))
        self.assertEqual(config.epsilon, 0.)
        self.assertIsNone(config.absolute_epsilon)
        self.assertEqual(config.epsilon_relative, 0.01)
        self.assertEqual(parse_config().as_dict(), RunConfig().as_dict())

    def test_file_errors(self):
        with self.assertRaises(ConfigurationError):
            read_config_file(Path(self.directory.name) / 'missing.cfg')
        self.path.write_text('v0 50\n', encoding='utf-8')
        with self.assertRaisesRegex(ConfigurationError, ':1:'):
            read_config_file(self.path)
        self.path.write_text('height = 50\n', encoding='utf-8')
        with self.assertRaisesRegex(ConfigurationError, 'known keys'):
            parse_config(self.path)
        self.path.write_text('v0 = high\n', encoding='utf-8')
        with self.assertRaises(ConfigurationError):
            parse_config(self.path)

    def test_absolute_epsilon(self):
        self.assertEqual(RunConfig(epsilon=0.02).absolute_epsilon, 0.02)
        self.assertEqual(parse_config(overrides={'epsilon_relative': '0.05'}).epsilon_relative, 0.05)

    def test_as_dict(self):
        values = RunConfig().as_dict()
        self.assertEqual(values['out_dir'], 'results')
        self.assertTrue(np.isclose(values['delta'], np.sqrt(2.)))


if __name__ == '__main__':
    unittest.main()
