"""Plain-text interchange files: orbit dumps, moment reports, series scans and probe results.

Every CSV file starts with ``# key=value`` header lines. JSON files carry the same data under a
leading ``header`` key. Floats are written with 17 significant digits.
"""
import csv
import io
import json
import math

from .halfplane import Point, apply
from .orbit import OrbitBall, OrbitRecord, ShellStat
from .surface_group import GroupElement, abelianize, format_word, parse_word, word_matrix


__all__ = [
    'format_float', 'header_lines', 'read_header',
    'write_orbit_csv', 'read_orbit_csv',
    'report_record', 'write_reports_csv', 'write_json', 'read_json',
    'SERIES_COLUMNS', 'series_row', 'write_series_csv', 'probe_record',
]

ORBIT_COLUMNS = ['word', 'word_length', 'distance', 'cosh_distance', 'abelianization']
SERIES_COLUMNS = [
    'n', 're_s', 'im_s', 'epsilon', 'truncation_radius', 're_value', 'im_value', 'tail_bound', 'agreement',
]


def format_float(value):
    return '%.17g' % value


def header_lines(header):
    return ''.join('# %s=%s\n' % (key, header[key]) for key in sorted(header))


def read_header(path):
    header = {}
    with io.open(path, 'r', encoding='utf-8') as reader:
        for line in reader:
            if not line.startswith('#'):
                break
            key, _, value = line[1:].strip().partition('=')
            header[key] = value
    return header


def _write_csv(path, header, columns, rows):
    with io.open(path, 'w', encoding='utf-8', newline='') as writer:
        writer.write(header_lines(header))
        table = csv.writer(writer, lineterminator='\n')
        table.writerow(columns)
        table.writerows(rows)


def _shells_text(ball):
    return json.dumps([list(stat) for stat in ball.shell_stats], separators=(',', ':'))


def write_orbit_csv(path, ball, header):
    """One row per record in ball order, sorted by (distance, word)."""
    header = dict(header)
    header.update({
        'z': '%s,%s' % (format_float(ball.base_z.re), format_float(ball.base_z.im)),
        'w': '%s,%s' % (format_float(ball.base_w.re), format_float(ball.base_w.im)),
        'radius': format_float(ball.radius),
        'stopping_margin': format_float(ball.stopping_margin),
        'stopping_rule': 'heuristic',
        'shells': _shells_text(ball),
    })
    rows = [
        [
            format_word(record.element.word),
            len(record.element.word),
            format_float(record.distance),
            format_float(record.cosh_distance),
            ';'.join(str(v) for v in record.element.abelianization),
        ]
        for record in ball.records
    ]
    _write_csv(path, header, ORBIT_COLUMNS, rows)


def _point(text):
    re, im = text.split(',')
    return Point(float(re), float(im))


def read_orbit_csv(path, group):
    """Rebuild a ball from its dump, recomputing matrices and orbit points from the words.

    :return: The ball and the header.
    """
    header = read_header(path)
    z, w = _point(header['z']), _point(header['w'])
    records = []
    with io.open(path, 'r', encoding='utf-8', newline='') as reader:
        rows = csv.DictReader(line for line in reader if not line.startswith('#'))
        for row in rows:
            word = parse_word(row['word'])
            abelianization = tuple(int(v) for v in row['abelianization'].split(';'))
            if abelianization != abelianize(group, word):
                raise ValueError('Abelianization of %s does not match its word' % row['word'])
            matrix = word_matrix(group, word)
            records.append(OrbitRecord(
                element=GroupElement(word, matrix, abelianization),
                distance=float(row['distance']),
                cosh_distance=float(row['cosh_distance']),
                orbit_point=apply(matrix, z),
            ))
    shells = tuple(ShellStat(*stat) for stat in json.loads(header['shells']))
    ball = OrbitBall(z, w, float(header['radius']), tuple(records), shells, float(header['stopping_margin']))
    return ball, header


def _plain(value):
    if hasattr(value, 'tolist'):
        return value.tolist()
    return value


def report_record(report):
    return {
        'x': report.x,
        'count': report.count,
        'raw_sums': _plain(report.raw_sums),
        'studentized': _plain(report.studentized),
        'huber_ratio': report.huber_ratio,
        'norm_sq_estimate': report.norm_sq_estimate,
        'ks': report.ks,
    }


def write_reports_csv(path, reports, header):
    n_max = len(reports[0].raw_sums) - 1 if reports else 0
    columns = ['x', 'count', 'huber_ratio', 'norm_sq_estimate', 'ks']
    columns += ['S%d' % n for n in range(n_max + 1)] + ['M%d' % n for n in range(n_max + 1)]
    rows = [
        [format_float(report.x), report.count, format_float(report.huber_ratio),
         format_float(report.norm_sq_estimate), format_float(report.ks)]
        + [format_float(v) for v in report.raw_sums] + [format_float(v) for v in report.studentized]
        for report in reports
    ]
    _write_csv(path, header, columns, rows)


def _finite(value):
    # JSON has no NaN or infinity.
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {key: _finite(v) for key, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_finite(v) for v in value]
    return value


def write_json(path, payload, header):
    document = {'header': dict(header)}
    document.update(payload)
    with io.open(path, 'w', encoding='utf-8') as writer:
        json.dump(_finite(document), writer, indent=2, sort_keys=False)
        writer.write('\n')


def read_json(path):
    with io.open(path, 'r', encoding='utf-8') as reader:
        return json.load(reader)


def series_row(value, agreement):
    return [
        value.n,
        format_float(value.s.real),
        format_float(value.s.imag),
        format_float(value.epsilon),
        format_float(value.truncation_radius),
        format_float(value.value.real),
        format_float(value.value.imag),
        format_float(value.tail_bound),
        int(bool(agreement)),
    ]


def write_series_csv(path, rows, header):
    _write_csv(path, header, SERIES_COLUMNS, rows)


def probe_record(probe):
    return {
        'n': probe.n,
        'pole_order_tested': probe.pole_order_tested,
        'leading_coefficient_estimate': probe.leading_coefficient_estimate,
        'target': probe.target,
        'relative_error': probe.relative_error,
        'status': probe.status,
        'diagnostics': {key: _plain(value) for key, value in probe.diagnostics.items()},
    }
