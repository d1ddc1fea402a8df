import unittest
from hyperbolic_modsym import gaussian_moment, normal_cdf


class TestGaussian(unittest.TestCase):

    def test_moments(self):
        self.assertEqual([1.0, 0.0, 1.0, 0.0, 3.0, 0.0, 15.0, 0.0, 105.0],
                         [gaussian_moment(n) for n in range(9)])
        with self.assertRaises(ValueError):
            gaussian_moment(-1)

    def test_cdf(self):
        self.assertEqual(0.5, normal_cdf(0.0))
        self.assertAlmostEqual(0.15865525393145707, normal_cdf(-1.0), places=12)
        self.assertAlmostEqual(1.0, normal_cdf(-3.0) + normal_cdf(3.0), places=12)
