import math
import unittest
import numpy as np
from hyperbolic_modsym import (
    point, apply, cosh_dist, build_octagon_group, reduce, inverse_word,
    enumerate_ball, brute_force_ball, audit_stopping, count, word_set, ball_arrays, max_displacement,
    BudgetExceededError, StoppingAuditError,
)

MARGIN = 4.5


class TestOrbit(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.group = build_octagon_group(2)
        cls.i = point(0.0, 1.0)

    def ball(self, x, z=None, w=None, **kwargs):
        kwargs.setdefault('margin', MARGIN)
        return enumerate_ball(self.group, z or self.i, w or self.i, x, **kwargs)

    def test_max_displacement(self):
        self.assertAlmostEqual(2.0 * math.acosh(1.0 + math.sqrt(2.0)), max_displacement(self.group, self.i))

    def test_zero_radius(self):
        ball = self.ball(0.0)
        self.assertEqual(1, count(ball))
        self.assertEqual(frozenset([()]), word_set(ball))
        self.assertEqual(0.0, ball.records[0].distance)

    def test_counts(self):
        self.assertEqual(1, count(self.ball(3.0)))
        self.assertEqual(9, count(self.ball(3.5)))
        self.assertEqual(25, count(self.ball(4.5)))
        self.assertEqual(49, count(self.ball(4.95)))

    def test_brute_force(self):
        ball = self.ball(4.95)
        brute = brute_force_ball(self.group, self.i, self.i, 4.95, 5)
        self.assertEqual(word_set(brute), word_set(ball))
        self.assertIsNone(brute.stopping_margin)
        self.assertGreater(brute.shell_stats[-1].min_distance, 4.95)

    def test_symmetry(self):
        rng = np.random.default_rng(11)
        for _ in range(3):
            z = point(rng.uniform(-0.1, 0.1), rng.uniform(0.9, 1.1))
            w = point(rng.uniform(-0.1, 0.1), rng.uniform(0.9, 1.1))
            forward, backward = self.ball(5.0, z, w), self.ball(5.0, w, z)
            self.assertEqual(count(forward), count(backward))
            self.assertEqual(
                word_set(backward),
                frozenset(reduce(self.group, inverse_word(word)) for word in word_set(forward)))

    def test_nesting(self):
        inner, outer = self.ball(4.5), self.ball(4.95)
        self.assertTrue(word_set(inner) <= word_set(outer))

    def test_determinism(self):
        single, pooled = self.ball(4.0, workers=1), self.ball(4.0, workers=2)
        self.assertEqual(single.records, pooled.records)
        self.assertEqual(single.shell_stats, pooled.shell_stats)

    def test_records(self):
        ball = self.ball(4.95)
        keys = [record.distance for record in ball.records]
        self.assertEqual(sorted(keys), keys)
        for record in ball.records:
            image = apply(record.element.matrix, self.i)
            self.assertAlmostEqual(cosh_dist(image, self.i), record.cosh_distance, delta=1e-9 * record.cosh_distance)
            self.assertAlmostEqual(image.re, record.orbit_point.re, delta=1e-9)
            self.assertAlmostEqual(image.im, record.orbit_point.im, delta=1e-9)
            self.assertEqual(reduce(self.group, record.element.word), record.element.word)
            self.assertLessEqual(record.distance, 4.95)
        self.assertEqual(ball.shell_stats[0].length, 0)
        self.assertEqual(count(ball), sum(stat.admitted for stat in ball.shell_stats))

    def test_audit(self):
        ball = self.ball(3.5)
        audit_stopping(ball)
        last = ball.shell_stats[-1]
        cut = ball._replace(shell_stats=ball.shell_stats[:-1] + (last._replace(min_distance=1.0),))
        with self.assertRaises(StoppingAuditError):
            audit_stopping(cut)
        with self.assertRaises(StoppingAuditError):
            audit_stopping(ball._replace(records=ball.records + ball.records[-1:]))
        with self.assertRaises(StoppingAuditError):
            audit_stopping(ball._replace(radius=3.0))
        with self.assertRaises(StoppingAuditError):
            audit_stopping(ball._replace(records=ball.records[1:]))

    def test_budget(self):
        with self.assertRaises(BudgetExceededError):
            self.ball(4.0, element_cap=10)
        with self.assertRaises(BudgetExceededError):
            self.ball(3.0, element_cap=30)

    def test_invalid(self):
        with self.assertRaises(ValueError):
            self.ball(-1.0)
        with self.assertRaises(ValueError):
            self.ball(1.0, workers=0)

    def test_distinct_basepoints(self):
        w = point(0.0, 2.0)
        self.assertEqual(0, count(self.ball(0.5, w=w)))
        ball = self.ball(1.0, w=w)
        self.assertEqual(1, count(ball))
        self.assertAlmostEqual(math.log(2.0), ball.records[0].distance)

    def test_paranoid(self):
        ball = self.ball(1.0, margin=3.5, paranoid=True)
        self.assertEqual(1, count(ball))

    def test_ball_arrays(self):
        arrays = ball_arrays(self.ball(3.5))
        self.assertEqual((9,), arrays['distance'].shape)
        self.assertEqual((9, 4), arrays['abelianization'].shape)
        self.assertEqual([0] + [1] * 8, arrays['word_length'].tolist())
        np.testing.assert_allclose(np.cosh(arrays['distance']), arrays['cosh_distance'], rtol=1e-12)
        empty = ball_arrays(self.ball(0.5, w=point(0.0, 2.0)))
        self.assertEqual((0, 0), empty['abelianization'].shape)
