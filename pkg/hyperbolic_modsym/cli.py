"""Command line surface: enumerate, report, dirichlet, verify and export-group."""
import argparse
import hashlib
import io
import json
import logging
import os
import sys
import tempfile
from collections import namedtuple

import numpy as np

from . import __version__
from .config import PARANOID, TOLERANCES
from .halfplane import IDENTITY, point, dist
from .surface_group import build_octagon_group, group_record, group_digest, word_matrix
from .orbit import (
    DEFAULT_ELEMENT_CAP, BudgetExceededError, StoppingAuditError,
    max_displacement, enumerate_ball, brute_force_ball, count, word_set,
)
from .modsym import period_form, default_periods, dense_periods, symbols, eichler_ratio
from .stats import (
    MIN_RECORDS, InsufficientDataError, moment_report, huber_ratio, raw_moment_sums, estimate_norm_sq,
    normalized_moments, ks_against_gaussian, first_moment_decay, summatory_main_term, gaussian_targets,
)
from .dirichlet import (
    ExtrapolationError, evaluate, series_agreement, huber_residue_probe, even_leading_coefficient_probe,
    odd_order_probe, stencil_laplacian, shifted_equation_check,
)
from .dump import (
    format_float, read_header, write_orbit_csv, read_orbit_csv, report_record, write_reports_csv, write_json,
    series_row, write_series_csv, probe_record,
)


__all__ = [
    'RunConfig', 'DEFAULT_CONFIG', 'build_config', 'config_digest',
    'cmd_enumerate', 'cmd_report', 'cmd_dirichlet', 'cmd_verify', 'cmd_export_group', 'main',
]

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_BUDGET = 2
EXIT_AUDIT = 3
EXIT_STATISTICS = 4
EXIT_EXTRAPOLATION = 5
EXIT_INVALID = 6

RunConfig = namedtuple('RunConfig', [
    'genus', 'z', 'w', 'periods', 'norm_sq', 'radii', 'n_max', 'margin_factor', 'element_cap', 'workers',
    'output_dir', 'formats', 's_grid', 'n_list', 'paranoid', 'huber_tolerance', 'even_tolerance',
    'min_records',
])

DEFAULT_CONFIG = {
    'genus': 2,
    'z': [0.0, 1.0],
    'w': [0.0, 1.0],
    'periods': None,
    'norm_sq': None,
    'radii': [8.0],
    'n_max': 6,
    'margin_factor': 2.0,
    'element_cap': DEFAULT_ELEMENT_CAP,
    'workers': 1,
    'output_dir': 'out',
    'formats': ['csv', 'json'],
    's_grid': [1.2, 1.5, 2.0],
    'n_list': [0, 2, 4],
    'paranoid': PARANOID,
    'huber_tolerance': 0.15,
    'even_tolerance': 0.35,
    'min_records': MIN_RECORDS,
}

# Fields that do not change any result and stay out of the config hash.
_UNHASHED = ('workers', 'output_dir', 'formats', 'paranoid')


def _floats(value):
    if value is None:
        return None
    if isinstance(value, str):
        value = [value]
    result = []
    for item in value:
        if isinstance(item, str):
            result += [float(part) for part in item.split(',') if part.strip()]
        else:
            result.append(float(item))
    return result


def _point(value):
    re, im = _floats(value)
    return point(re, im)


def build_config(path=None, overrides=None):
    """Load a run configuration from a JSON file and apply overrides.

    :param path: Optional JSON file with any of the `DEFAULT_CONFIG` keys.
    :param overrides: Values that win over the file, None entries are ignored.
    :return: The validated `RunConfig`.
    """
    values = dict(DEFAULT_CONFIG)
    if path is not None:
        with io.open(path, 'r', encoding='utf-8') as reader:
            loaded = json.load(reader)
        unknown = sorted(set(loaded) - set(values))
        if unknown:
            raise ValueError('Unknown configuration keys: %s' % ', '.join(unknown))
        values.update(loaded)
    for key, value in (overrides or {}).items():
        if value is not None:
            values[key] = value

    genus = int(values['genus'])
    radii = _floats(values['radii'])
    periods = _floats(values['periods'])
    config = RunConfig(
        genus=genus,
        z=_point(values['z']),
        w=_point(values['w']),
        periods=tuple(periods) if periods else None,
        norm_sq=None if values['norm_sq'] is None else float(values['norm_sq']),
        radii=tuple(radii),
        n_max=int(values['n_max']),
        margin_factor=float(values['margin_factor']),
        element_cap=int(values['element_cap']),
        workers=int(values['workers']),
        output_dir=str(values['output_dir']),
        formats=tuple(values['formats']),
        s_grid=tuple(_floats(values['s_grid'])),
        n_list=tuple(int(n) for n in _floats(values['n_list'])),
        paranoid=bool(values['paranoid']),
        huber_tolerance=float(values['huber_tolerance']),
        even_tolerance=float(values['even_tolerance']),
        min_records=int(values['min_records']),
    )
    if config.genus < 2:
        raise ValueError('Genus must be at least 2, got %d' % config.genus)
    if not config.radii or any(b <= a for a, b in zip(config.radii, config.radii[1:])):
        raise ValueError('Radii %s must be non-empty and strictly increasing' % list(config.radii))
    if config.radii[0] < 0.0:
        raise ValueError('Radii must be non-negative')
    if config.n_max < 2:
        raise ValueError('n_max must be at least 2, got %d' % config.n_max)
    if config.workers < 1:
        raise ValueError('workers must be at least 1, got %d' % config.workers)
    if config.min_records < 1:
        raise ValueError('min_records must be at least 1, got %d' % config.min_records)
    if config.periods is not None and len(config.periods) != 2 * config.genus:
        raise ValueError('Expected %d periods, got %d' % (2 * config.genus, len(config.periods)))
    if not set(config.formats) <= {'csv', 'json'}:
        raise ValueError('Unknown formats %s' % sorted(set(config.formats) - {'csv', 'json'}))
    return config


def config_digest(config):
    fields = {key: value for key, value in config._asdict().items() if key not in _UNHASHED}
    text = json.dumps(fields, sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def _header(config, group):
    return {
        'version': __version__,
        'config_sha256': config_digest(config),
        'group_sha256': group_digest(group),
    }


def _form(config):
    if config.periods is None:
        form = default_periods(config.genus)
        return period_form(form.periods, config.norm_sq)
    return period_form(config.periods, config.norm_sq)


def _output(config, name):
    if not os.path.isdir(config.output_dir):
        os.makedirs(config.output_dir)
    return os.path.join(config.output_dir, name)


def _orbit_path(config, radius):
    return _output(config, 'orbit_x%s.csv' % ('%g' % radius))


def _enumerate(config, group, radius):
    return enumerate_ball(
        group, config.z, config.w, radius,
        margin=config.margin_factor * max_displacement(group, config.z),
        element_cap=config.element_cap,
        workers=config.workers,
        paranoid=config.paranoid,
    )


def _balls(config, group):
    """Balls for all radii, read from matching dumps or enumerated and dumped."""
    header = _header(config, group)
    margin = format_float(config.margin_factor * max_displacement(group, config.z))
    balls = []
    for radius in config.radii:
        path = _orbit_path(config, radius)
        if os.path.exists(path):
            found = read_header(path)
            expected = {
                'group_sha256': header['group_sha256'],
                'radius': format_float(radius),
                'stopping_margin': margin,
                'z': '%s,%s' % (format_float(config.z.re), format_float(config.z.im)),
                'w': '%s,%s' % (format_float(config.w.re), format_float(config.w.im)),
            }
            if all(found.get(key) == value for key, value in expected.items()):
                logger.info('Reading orbit dump %s', path)
                balls.append(read_orbit_csv(path, group)[0])
                continue
        ball = _enumerate(config, group, radius)
        if 'csv' in config.formats:
            write_orbit_csv(path, ball, header)
        balls.append(ball)
    return balls


def cmd_enumerate(config):
    group = build_octagon_group(config.genus)
    header = _header(config, group)
    for radius in config.radii:
        ball = _enumerate(config, group, radius)
        write_orbit_csv(_orbit_path(config, radius), ball, header)
        last = ball.shell_stats[-1]
        print('x=%g count=%d shells=%d last_shell_min=%.6f stop_threshold=%.6f (heuristic margin %.6f)' % (
            radius, count(ball), len(ball.shell_stats), last.min_distance,
            radius + ball.stopping_margin, ball.stopping_margin))
    return EXIT_OK


def _reports(config, group, balls, form):
    """Moment reports of the balls with enough records.

    :return: The reports and the radii that were skipped.
    """
    reports, skipped = [], []
    for ball in balls:
        try:
            reports.append(moment_report(ball, form, group.volume, config.n_max, partitions=config.workers,
                                         min_records=config.min_records))
        except InsufficientDataError as e:
            logger.warning('Skipping radius %g: %s', ball.radius, e)
            skipped.append(ball.radius)
    return reports, skipped


def _main_term_ratios(report, norm_sq, vol):
    """S_n / main term for the even orders of a report."""
    return {
        n: float(report.raw_sums[n] / summatory_main_term(n, report.x, norm_sq, vol))
        for n in range(2, len(report.raw_sums), 2)
    }


def cmd_report(config):
    group = build_octagon_group(config.genus)
    header = _header(config, group)
    form = _form(config)
    balls = _balls(config, group)
    reports, skipped = _reports(config, group, balls, form)
    if not reports:
        raise InsufficientDataError('No radius among %s has %d positive-distance records' % (
            list(config.radii), config.min_records))
    norm_fit = estimate_norm_sq(reports, group.volume) if len(reports) >= 2 else None
    payload = {
        'reports': [report_record(report) for report in reports],
        'skipped_radii': skipped,
        'gaussian_targets': gaussian_targets(config.n_max).tolist(),
        'norm_sq_fit': norm_fit,
    }
    if dist(config.z, config.w) <= TOLERANCES.geometric:
        payload['first_moment_decay'] = first_moment_decay(reports).tolist()
    norm_sq = form.norm_sq if form.norm_sq is not None else norm_fit
    if norm_sq is not None:
        payload['main_term_ratios'] = [_main_term_ratios(report, norm_sq, group.volume) for report in reports]
    if form.norm_sq is not None:
        reported = {report.x for report in reports}
        payload['normalized_moments'] = [
            normalized_moments(ball, form, group.volume, config.n_max, config.min_records).tolist()
            for ball in balls if ball.radius in reported]
    if 'json' in config.formats:
        write_json(_output(config, 'report.json'), payload, header)
    if 'csv' in config.formats:
        write_reports_csv(_output(config, 'report.csv'), reports, header)
    for report in reports:
        print('x=%g N=%d huber=%.6f S2/(N x)=%.6g M3=%.4f M4=%.4f ks=%.4f' % (
            report.x, report.count, report.huber_ratio, report.raw_sums[2] / (report.count * report.x),
            report.studentized[3], report.studentized[4] if config.n_max >= 4 else float('nan'), report.ks))
    return EXIT_OK


def _probes(config, group, balls, form):
    """Run the residue probes that apply to the configured orders.

    :return: List of (probe, tolerance) pairs, tolerance None for untargeted probes.
    """
    if len(balls) < 3:
        logger.warning('Probes need at least 3 radii, %d given', len(balls))
        return []
    probes = [(huber_residue_probe(balls, group.volume), config.huber_tolerance)]
    norm_sq = form.norm_sq
    for n in config.n_list:
        if n > 0 and n % 2 == 0 and n // 2 in (1, 2):
            if norm_sq is None:
                norm_sq = estimate_norm_sq(_reports(config, group, balls, form)[0], group.volume)
                logger.info('Estimated norm_sq %.6g for the even probes', norm_sq)
            probes.append((even_leading_coefficient_probe(balls, form, group.volume, n // 2, norm_sq),
                           config.even_tolerance))
        elif n % 2:
            probes.append((odd_order_probe(balls, form, n), None))
    return probes


def cmd_dirichlet(config):
    group = build_octagon_group(config.genus)
    header = _header(config, group)
    form = _form(config)
    balls = _balls(config, group)
    rows, agreed = [], True
    for ball in balls:
        for n in config.n_list:
            for s in config.s_grid:
                value = evaluate(ball, form, n, s, vol=group.volume)
                agreement = series_agreement(ball, form, n, s)[2]
                agreed = agreed and agreement
                rows.append(series_row(value, agreement))
    if 'csv' in config.formats:
        write_series_csv(_output(config, 'series.csv'), rows, header)
    probes = _probes(config, group, balls, form)
    if 'json' in config.formats:
        write_json(_output(config, 'probes.json'), {'probes': [probe_record(p) for p, _ in probes]}, header)
    passed = agreed
    for probe, tolerance in probes:
        met = tolerance is None or (probe.relative_error is not None and probe.relative_error <= tolerance)
        passed = passed and met
        print('n=%d order=%d estimate=%.6g target=%s relative_error=%s status=%s%s' % (
            probe.n, probe.pole_order_tested, probe.leading_coefficient_estimate,
            'none' if probe.target is None else '%.6g' % probe.target,
            'none' if probe.relative_error is None else '%.4f' % probe.relative_error,
            probe.status, '' if met else ' MISSED'))
    if not agreed:
        logger.warning('Direct and resummed series disagree on some rows')
    return EXIT_OK if passed else EXIT_TOLERANCE


def _check(results, name, passed, **detail):
    results[name] = {'passed': bool(passed), 'detail': detail}
    logger.info('%s: %s', name, 'passed' if passed else 'FAILED')


SYMMETRY_PAIRS = 3
SYMMETRY_SEED = 1729


def _basepoint_pairs(size, seed):
    """Random basepoint pairs near i."""
    rng = np.random.default_rng(seed)
    return [tuple(point(rng.uniform(-0.3, 0.3), rng.uniform(0.8, 1.25)) for _ in range(2)) for _ in range(size)]


def _largest_within(balls, x):
    """The largest ball of radius at most x, the smallest ball when there is none."""
    within = [ball for ball in balls if ball.radius <= x]
    return within[-1] if within else balls[0]


def _dump_bytes(config, group, ball, workers, directory):
    """Enumerate a ball again with a number of workers and return its orbit dump."""
    again = enumerate_ball(group, ball.base_z, ball.base_w, ball.radius, margin=ball.stopping_margin,
                           element_cap=config.element_cap, workers=workers)
    path = os.path.join(directory, 'orbit_%d.csv' % workers)
    write_orbit_csv(path, again, _header(config, group))
    with io.open(path, 'rb') as reader:
        return reader.read()


def _enumeration_checks(config, group, balls, results):
    smallest = balls[0]
    if smallest.radius <= 6.0:
        depth = max(len(record.element.word) for record in smallest.records) if smallest.records else 0
        oracle = brute_force_ball(group, config.z, config.w, smallest.radius, depth + 2)
        _check(results, 'brute_force', word_set(oracle) == word_set(smallest),
               radius=smallest.radius, depth=depth + 2, count=count(smallest), oracle=count(oracle))

    target = _largest_within(balls, 10.0)
    pooled = max(2, config.workers)
    with tempfile.TemporaryDirectory() as scratch:
        dumps = [_dump_bytes(config, group, target, workers, scratch) for workers in (1, pooled)]
    _check(results, 'determinism', dumps[0] == dumps[1], radius=target.radius, workers=[1, pooled])

    radius = _largest_within(balls, 8.0).radius
    counts = []
    for z, w in [(config.z, config.w)] + _basepoint_pairs(SYMMETRY_PAIRS, SYMMETRY_SEED):
        margin = config.margin_factor * max(max_displacement(group, z), max_displacement(group, w))
        forward = enumerate_ball(group, z, w, radius, margin=margin, element_cap=config.element_cap)
        backward = enumerate_ball(group, w, z, radius, margin=margin, element_cap=config.element_cap)
        counts.append([count(forward), count(backward)])
    _check(results, 'symmetry', all(a == b for a, b in counts), radius=radius, counts=counts)

    nested = all(word_set(a) <= word_set(b) for a, b in zip(balls, balls[1:]))
    _check(results, 'nesting', nested, counts=[count(ball) for ball in balls])


def _counting_checks(config, group, balls, form, dense, results):
    if len(balls) >= 2:
        ratios = {'configured': [eichler_ratio(ball, form) for ball in balls],
                  'dense': [eichler_ratio(ball, dense) for ball in balls]}
        _check(results, 'eichler', all(r[-1] <= 1.5 * r[0] for r in ratios.values()), ratios=ratios)

    if dist(config.z, config.w) <= TOLERANCES.geometric:
        decay, bounds = [], []
        for ball in balls:
            decay.append(abs(raw_moment_sums(ball, form, 2)[1]) / count(ball))
            bounds.append(1e-9 * float(np.mean(np.abs(symbols(ball, form)))))
        _check(results, 'first_moment', all(d <= b for d, b in zip(decay, bounds)), decay=decay, bounds=bounds)

    ratios = {ball.radius: huber_ratio(ball, group.volume) for ball in balls if ball.radius >= 1.0}
    large = [x for x in ratios if x >= 12.0]
    if large:
        _check(results, 'huber_ratio', all(0.7 <= ratios[x] <= 1.3 for x in large),
               ratios=[[x, ratios[x]] for x in large])
    near = [x for x in ratios if x <= 8.0]
    if near and large:
        before, after = max(near), min(large)
        _check(results, 'huber_trend', abs(ratios[after] - 1.0) <= abs(ratios[before] - 1.0),
               near=[before, ratios[before]], far=[after, ratios[after]])


def _moment_checks(config, group, balls, form, dense, results):
    reports, skipped = _reports(config, group, balls, form)
    consistent = all(r.raw_sums[0] == r.count and r.studentized[2] == 1.0 for r in reports)
    _check(results, 'moments', reports and consistent,
           reported=[r.x for r in reports], skipped=skipped)

    upper = [r for r in reports if r.x >= 10.0]
    if len(upper) >= 3:
        growth = [r.raw_sums[2] / (r.count * r.x) for r in upper[:3]]
        spread = (max(growth) - min(growth)) / float(np.mean(growth))
        detail = {'ratios': growth, 'spread': spread}
        passed = spread <= 0.2
        if len(upper) >= 4:
            try:
                fits = [estimate_norm_sq(upper[:3], group.volume), estimate_norm_sq(upper[1:4], group.volume)]
                detail['norm_sq_fits'] = fits
                passed = passed and abs(fits[1] - fits[0]) <= 0.25 * fits[0]
            except InsufficientDataError as e:
                detail['error'] = str(e)
                passed = False
        _check(results, 'second_moment', passed, **detail)

    deep = [r for r in reports if r.x >= 13.0 and len(r.studentized) > 5]
    if deep:
        targets = gaussian_targets(5)
        moments = all(
            abs(r.studentized[4] - targets[4]) <= 0.8 and abs(r.studentized[3]) <= 0.5 and abs(r.studentized[5]) <= 2.5
            for r in deep
        )
        _check(results, 'gaussian_moments', moments, studentized=[r.studentized[:6].tolist() for r in deep])

    # KS runs on the dense form, the integer form has an atom at zero.
    trend = [ball for ball in balls if ball.radius >= 11.0 and ball.radius in {r.x for r in reports}]
    if any(ball.radius >= 13.0 for ball in trend):
        ks = [ks_against_gaussian(ball, dense, config.min_records) for ball in trend]
        bounded = all(d <= 0.08 for d, ball in zip(ks, trend) if ball.radius >= 13.0)
        settling = all(b <= a + 0.01 for a, b in zip(ks, ks[1:]))
        _check(results, 'ks_distance', bounded and settling, radii=[ball.radius for ball in trend], ks=ks)
    return reports


def _series_checks(config, group, balls, form, reports, results):
    agreement = all(series_agreement(balls[-1], form, n, s)[2] for n in (0, 2, 4) for s in (1.2, 1.5, 2.0))
    _check(results, 'series_oracle', agreement)

    if len(balls) >= 3:
        try:
            probe = huber_residue_probe(balls[-3:], group.volume)
            _check(results, 'huber_residue', probe.relative_error <= config.huber_tolerance,
                   estimate=probe.leading_coefficient_estimate, target=probe.target)
        except ExtrapolationError as e:
            _check(results, 'huber_residue', False, error=str(e))
        try:
            norm_sq = form.norm_sq
            if norm_sq is None:
                norm_sq = estimate_norm_sq(reports[-3:], group.volume)
            probe = even_leading_coefficient_probe(balls[-3:], form, group.volume, 1, norm_sq)
            _check(results, 'even_leading_coefficient',
                   probe.relative_error is not None and probe.relative_error <= config.even_tolerance,
                   estimate=probe.leading_coefficient_estimate, target=probe.target, status=probe.status,
                   norm_sq=norm_sq)
        except (InsufficientDataError, ExtrapolationError) as e:
            _check(results, 'even_leading_coefficient', False, error=str(e))

    defect = shifted_equation_check(group, config.z, config.w, None, 2.5, balls[-1].radius, ball=balls[-1])
    _check(results, 'shifted_equation', defect <= 1e-2, defect=defect, radius=balls[-1].radius)

    z = config.z
    calibration = stencil_laplacian(lambda p: p.im ** 2, z)
    _check(results, 'stencil_calibration', abs(calibration - 2.0 * z.im ** 2) <= 1e-6 * z.im ** 2,
           value=calibration)


def cmd_verify(config):
    """Run the acceptance checks that apply to the configured radii and write verify.json.

    Radii with too few records for moment statistics are skipped by those checks only.
    """
    group = build_octagon_group(config.genus)
    header = _header(config, group)
    form = _form(config)
    dense = dense_periods(config.genus)
    results = {}

    relator_defect = max(abs(u - v) for u, v in zip(word_matrix(group, group.relator), IDENTITY))
    _check(results, 'group', relator_defect <= 1e-8, relator_defect=relator_defect,
           traces=[abs(m.a + m.d) for m in group.generators])

    balls = _balls(config, group)
    _enumeration_checks(config, group, balls, results)
    _counting_checks(config, group, balls, form, dense, results)
    reports = _moment_checks(config, group, balls, form, dense, results)
    _series_checks(config, group, balls, form, reports, results)

    if 'json' in config.formats:
        write_json(_output(config, 'verify.json'), {'checks': results}, header)
    failed = sorted(name for name, result in results.items() if not result['passed'])
    print('%d checks, %d failed%s' % (len(results), len(failed), (': ' + ', '.join(failed)) if failed else ''))
    return EXIT_TOLERANCE if failed else EXIT_OK


def cmd_export_group(config):
    group = build_octagon_group(config.genus)
    header = _header(config, group)
    path = _output(config, 'group.json')
    write_json(path, {'group': group_record(group), 'group_sha256': group_digest(group)}, header)
    print('genus=%d group_sha256=%s -> %s' % (group.genus, group_digest(group), path))
    return EXIT_OK


COMMANDS = {
    'enumerate': cmd_enumerate,
    'report': cmd_report,
    'dirichlet': cmd_dirichlet,
    'verify': cmd_verify,
    'export-group': cmd_export_group,
}


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='JSON run configuration')
    common.add_argument('--genus', type=int, default=None)
    common.add_argument('--x', action='append', default=None, help='radius, repeatable or comma separated')
    common.add_argument('--z', default=None, help='moved basepoint as re,im')
    common.add_argument('--w', default=None, help='fixed basepoint as re,im')
    common.add_argument('--periods', default=None, help='comma separated period vector')
    common.add_argument('--norm-sq', type=float, default=None)
    common.add_argument('--n-max', type=int, default=None)
    common.add_argument('--margin-factor', type=float, default=None)
    common.add_argument('--element-cap', type=int, default=None)
    common.add_argument('--workers', type=int, default=None)
    common.add_argument('--min-records', type=int, default=None,
                        help='positive-distance records a radius needs for moment statistics')
    common.add_argument('--out', default=None, help='output directory')
    common.add_argument('--paranoid', action='store_true', default=None,
                        help='re-run every enumeration with the margin doubled')
    common.add_argument('--verbose', action='store_true')
    common.add_argument('--quiet', action='store_true')

    parser = argparse.ArgumentParser(prog='hyperbolic-modsym', description=__doc__)
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    commands = parser.add_subparsers(dest='command')
    commands.required = True
    for name in ('enumerate', 'report', 'verify', 'export-group'):
        commands.add_parser(name, parents=[common])
    dirichlet = commands.add_parser('dirichlet', parents=[common])
    dirichlet.add_argument('--s', action='append', default=None, help='real arguments, repeatable or comma separated')
    dirichlet.add_argument('--n', action='append', default=None, help='derivative orders')
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    level = logging.INFO
    if args.verbose:
        level = logging.DEBUG
    elif args.quiet:
        level = logging.WARNING
    logging.basicConfig(level=level, format='%(asctime)s - %(levelname)s - %(message)s')
    overrides = {
        'genus': args.genus,
        'radii': args.x,
        'z': args.z,
        'w': args.w,
        'periods': args.periods,
        'norm_sq': args.norm_sq,
        'n_max': args.n_max,
        'margin_factor': args.margin_factor,
        'element_cap': args.element_cap,
        'workers': args.workers,
        'min_records': args.min_records,
        'output_dir': args.out,
        'paranoid': args.paranoid,
        's_grid': getattr(args, 's', None),
        'n_list': getattr(args, 'n', None),
    }
    try:
        config = build_config(args.config, overrides)
        return COMMANDS[args.command](config)
    except BudgetExceededError as e:
        logger.error('Element budget exceeded: %s', e)
        return EXIT_BUDGET
    except StoppingAuditError as e:
        logger.error('Stopping audit failed: %s', e)
        return EXIT_AUDIT
    except InsufficientDataError as e:
        logger.error('Statistics preconditions not met: %s', e)
        return EXIT_STATISTICS
    except ExtrapolationError as e:
        logger.error('Extrapolation failed: %s', e)
        return EXIT_EXTRAPOLATION
    except ValueError as e:
        logger.error('Invalid input: %s', e)
        return EXIT_INVALID


if __name__ == '__main__':
    sys.exit(main())
