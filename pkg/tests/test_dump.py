import math
import os
import tempfile
import unittest
from hyperbolic_modsym import (
    point, build_octagon_group, enumerate_ball, count, word_set, format_float, header_lines, read_header,
    write_orbit_csv, read_orbit_csv, write_json, read_json, write_reports_csv, moment_report, random_periods,
    evaluate, series_row, write_series_csv, SERIES_COLUMNS,
)


class TestDump(unittest.TestCase):

    @classmethod
    def setUpClass(cls):
        cls.group = build_octagon_group(2)
        cls.i = point(0.0, 1.0)

    def test_format_float(self):
        self.assertEqual('0.10000000000000001', format_float(0.1))
        self.assertEqual(0.1, float(format_float(0.1)))
        self.assertEqual('# a=1\n# b=x\n', header_lines({'b': 'x', 'a': 1}))

    def test_orbit_csv(self):
        ball = enumerate_ball(self.group, self.i, point(0.2, 1.3), 4.5, margin=4.5)
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'orbit.csv')
            write_orbit_csv(path, ball, {'version': 'test'})
            header = read_header(path)
            self.assertEqual('test', header['version'])
            self.assertEqual('heuristic', header['stopping_rule'])
            self.assertEqual('4.5', header['radius'])
            restored, restored_header = read_orbit_csv(path, self.group)
        self.assertEqual(header, restored_header)
        self.assertEqual(count(ball), count(restored))
        self.assertEqual(word_set(ball), word_set(restored))
        self.assertEqual(ball.shell_stats, restored.shell_stats)
        self.assertEqual(ball.stopping_margin, restored.stopping_margin)
        self.assertEqual(ball.base_w, restored.base_w)
        for original, record in zip(ball.records, restored.records):
            self.assertEqual(original.element.word, record.element.word)
            self.assertEqual(original.element.abelianization, record.element.abelianization)
            self.assertEqual(original.distance, record.distance)
            for u, v in zip(original.element.matrix, record.element.matrix):
                self.assertAlmostEqual(u, v, delta=1e-9 * max(1.0, abs(u)))

    def test_identity_dump(self):
        ball = enumerate_ball(self.group, self.i, self.i, 0.0, margin=4.5)
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'orbit.csv')
            write_orbit_csv(path, ball, {})
            with open(path) as reader:
                rows = [line for line in reader if not line.startswith('#')]
            self.assertEqual(['word,word_length,distance,cosh_distance,abelianization\n', 'e,0,0,1,0;0;0;0\n'], rows)

    def test_tampered_dump(self):
        ball = enumerate_ball(self.group, self.i, self.i, 3.5, margin=4.5)
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'orbit.csv')
            write_orbit_csv(path, ball, {})
            with open(path) as reader:
                text = reader.read()
            with open(path, 'w') as writer:
                writer.write(text.replace(',1;0;0;0\n', ',2;0;0;0\n', 1))
            with self.assertRaises(ValueError):
                read_orbit_csv(path, self.group)

    def test_json(self):
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'out.json')
            write_json(path, {'values': [1.0, float('nan'), {'inf': math.inf}]}, {'version': 'test'})
            document = read_json(path)
            with open(path) as reader:
                self.assertTrue(reader.read().startswith('{\n  "header"'))
        self.assertEqual({'version': 'test'}, document['header'])
        self.assertEqual([1.0, None, {'inf': None}], document['values'])

    def test_tables(self):
        ball = enumerate_ball(self.group, self.i, self.i, 6.5, margin=4.5)
        form = random_periods(2, seed=1)
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'report.csv')
            write_reports_csv(path, [moment_report(ball, form, self.group.volume, 4)], {'version': 'test'})
            with open(path) as reader:
                lines = reader.read().splitlines()
            self.assertEqual('x,count,huber_ratio,norm_sq_estimate,ks,S0,S1,S2,S3,S4,M0,M1,M2,M3,M4', lines[1])
            self.assertTrue(lines[2].startswith('6.5,%d,' % count(ball)))
            path = os.path.join(root, 'series.csv')
            value = evaluate(ball, form, 2, 1.5)
            write_series_csv(path, [series_row(value, True)], {})
            with open(path) as reader:
                lines = reader.read().splitlines()
            self.assertEqual(','.join(SERIES_COLUMNS), lines[0])
            fields = lines[1].split(',')
            self.assertEqual(['2', '1.5', '0', '0'], fields[:4])
            self.assertEqual(value.value.real, float(fields[5]))
            self.assertEqual('1', fields[-1])
