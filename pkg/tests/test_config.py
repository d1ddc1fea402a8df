import unittest
from hyperbolic_modsym import config
from hyperbolic_modsym.config import strtobool, capped_workers, TOLERANCES


class TestConfig(unittest.TestCase):

    def test_strtobool(self):
        for value in ('1', 'yes', 'True', ' on '):
            self.assertTrue(strtobool(value))
        for value in ('0', 'no', 'FALSE', 'off', ''):
            self.assertFalse(strtobool(value))
        with self.assertRaises(ValueError):
            strtobool('maybe')

    def test_capped_workers(self):
        original = config.MAX_WORKERS
        try:
            config.MAX_WORKERS = 0
            self.assertEqual(8, capped_workers(8))
            config.MAX_WORKERS = 2
            self.assertEqual(2, capped_workers(8))
            self.assertEqual(1, capped_workers(1))
        finally:
            config.MAX_WORKERS = original
        with self.assertRaises(ValueError):
            capped_workers(0)

    def test_tolerances(self):
        self.assertEqual(1e-9, TOLERANCES.geometric)
        self.assertEqual(1e-6, TOLERANCES.determinant)
        self.assertLess(TOLERANCES.geometric, TOLERANCES.determinant)
