import io
import json
import os
import tempfile
import unittest
from hyperbolic_modsym import point, read_header, read_json
from hyperbolic_modsym.cli import build_config, config_digest, main, DEFAULT_CONFIG


class TestConfig(unittest.TestCase):

    def test_defaults(self):
        config = build_config()
        self.assertEqual(2, config.genus)
        self.assertEqual(point(0.0, 1.0), config.z)
        self.assertEqual((8.0,), config.radii)
        self.assertIsNone(config.periods)
        self.assertEqual((0, 2, 4), config.n_list)

    def test_overrides(self):
        config = build_config(overrides={
            'radii': ['4,5', '6'], 'z': '0.1,1.2', 'periods': '1,0,0,2', 'workers': 3, 'genus': None,
        })
        self.assertEqual((4.0, 5.0, 6.0), config.radii)
        self.assertEqual(point(0.1, 1.2), config.z)
        self.assertEqual((1.0, 0.0, 0.0, 2.0), config.periods)
        self.assertEqual(2, config.genus)
        self.assertEqual(config_digest(build_config(overrides={'radii': [4, 5, 6], 'z': [0.1, 1.2],
                                                               'periods': [1, 0, 0, 2]})),
                         config_digest(config))
        self.assertNotEqual(config_digest(build_config()), config_digest(config))

    def test_file(self):
        with tempfile.TemporaryDirectory() as root:
            path = os.path.join(root, 'run.json')
            with io.open(path, 'w') as writer:
                json.dump({'genus': 3, 'radii': [5.0, 6.0]}, writer)
            config = build_config(path, {'radii': ['7']})
            self.assertEqual(3, config.genus)
            self.assertEqual((7.0,), config.radii)
            with io.open(path, 'w') as writer:
                json.dump({'radius': 5.0}, writer)
            with self.assertRaises(ValueError):
                build_config(path)

    def test_invalid(self):
        for overrides in ({'genus': 1}, {'radii': [5.0, 4.0]}, {'radii': [-1.0]}, {'n_max': 1}, {'workers': 0},
                          {'periods': [1.0, 0.0]}, {'formats': ['xml']}, {'min_records': 0}):
            with self.assertRaises(ValueError):
                build_config(overrides=overrides)
        self.assertIn('huber_tolerance', DEFAULT_CONFIG)


class TestCommands(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = self.directory.name

    def tearDown(self):
        self.directory.cleanup()

    def out(self, *parts):
        return os.path.join(self.root, *parts)

    def test_enumerate_identity(self):
        self.assertEqual(0, main(['enumerate', '--x', '0', '--out', self.out(), '--quiet']))
        with open(self.out('orbit_x0.csv')) as reader:
            rows = [line for line in reader if not line.startswith('#')]
        self.assertEqual(2, len(rows))
        self.assertTrue(rows[1].startswith('e,0,'))

    def test_export_group(self):
        self.assertEqual(0, main(['export-group', '--genus', '3', '--out', self.out(), '--quiet']))
        document = read_json(self.out('group.json'))
        self.assertEqual(3, document['group']['genus'])
        self.assertEqual(12, len(document['group']['letters']))
        self.assertEqual(document['header']['group_sha256'], document['group_sha256'])

    def test_worker_independence(self):
        for workers in ('1', '2'):
            self.assertEqual(0, main(['enumerate', '--x', '3.5', '--workers', workers,
                                      '--out', self.out(workers), '--quiet']))
        with open(self.out('1', 'orbit_x3.5.csv'), 'rb') as single, open(self.out('2', 'orbit_x3.5.csv'), 'rb') as pool:
            self.assertEqual(single.read(), pool.read())
        self.assertEqual('heuristic', read_header(self.out('1', 'orbit_x3.5.csv'))['stopping_rule'])

    def test_exit_codes(self):
        self.assertEqual(4, main(['report', '--x', '0.5', '--out', self.out(), '--quiet']))
        self.assertEqual(2, main(['enumerate', '--x', '30', '--element-cap', '1000', '--out', self.out(), '--quiet']))
        self.assertEqual(6, main(['enumerate', '--genus', '1', '--x', '1', '--out', self.out(), '--quiet']))
        self.assertEqual(6, main(['enumerate', '--w', '0,-1', '--x', '1', '--out', self.out(), '--quiet']))

    def test_dirichlet(self):
        argv = ['dirichlet', '--x', '4,5,6', '--margin-factor', '1.5', '--norm-sq', '1', '--s', '1.5,2',
                '--out', self.out(), '--quiet']
        self.assertIn(main(argv), (0, 1))
        for name in ('orbit_x4.csv', 'orbit_x5.csv', 'orbit_x6.csv', 'series.csv', 'probes.json'):
            self.assertTrue(os.path.exists(self.out(name)), name)
        probes = read_json(self.out('probes.json'))['probes']
        self.assertEqual([0, 2, 4], [probe['n'] for probe in probes])
        self.assertAlmostEqual(0.5, probes[0]['target'])
        with open(self.out('series.csv')) as reader:
            first = reader.read()
        self.assertEqual(1 + 3 * 3 * 2, len([line for line in first.splitlines() if not line.startswith('#')]))
        self.assertIn(main(argv), (0, 1))
        with open(self.out('series.csv')) as reader:
            self.assertEqual(first, reader.read())

    def test_report_skips_small_radius(self):
        argv = ['report', '--x', '3.5,4.5,5', '--min-records', '20', '--margin-factor', '1.5', '--norm-sq', '1',
                '--out', self.out(), '--quiet']
        self.assertEqual(0, main(argv))
        document = read_json(self.out('report.json'))
        self.assertEqual([3.5], document['skipped_radii'])
        self.assertEqual([4.5, 5.0], [report['x'] for report in document['reports']])
        self.assertEqual([0.0, 0.0], document['first_moment_decay'])
        self.assertEqual(2, len(document['normalized_moments']))
        self.assertEqual(2, len(document['main_term_ratios']))
        for ratios in document['main_term_ratios']:
            self.assertEqual(['2', '4', '6'], sorted(ratios))
            self.assertTrue(all(value > 0.0 for value in ratios.values()))

    def test_verify(self):
        self.assertEqual(1, main(['verify', '--x', '3.5', '--margin-factor', '1.5', '--out', self.out(), '--quiet']))
        checks = read_json(self.out('verify.json'))['checks']
        for name in ('group', 'brute_force', 'determinism', 'symmetry', 'nesting', 'first_moment', 'series_oracle',
                     'shifted_equation', 'stencil_calibration'):
            self.assertTrue(checks[name]['passed'], name)
        self.assertEqual(4, len(checks['symmetry']['detail']['counts']))
        self.assertEqual([3.5], checks['moments']['detail']['skipped'])
        self.assertFalse(checks['moments']['passed'])

    def test_verify_skips_small_radius(self):
        main(['verify', '--x', '3.5,4.5', '--min-records', '20', '--margin-factor', '1.5', '--out', self.out(),
              '--quiet'])
        checks = read_json(self.out('verify.json'))['checks']
        self.assertTrue(checks['moments']['passed'])
        self.assertEqual([3.5], checks['moments']['detail']['skipped'])
        self.assertEqual([4.5], checks['moments']['detail']['reported'])
        self.assertTrue(checks['first_moment']['passed'])
        self.assertEqual(2, len(checks['first_moment']['detail']['decay']))
        self.assertEqual(['configured', 'dense'], sorted(checks['eichler']['detail']['ratios']))
