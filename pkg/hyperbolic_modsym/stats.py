"""Counting and moment statistics of orbit balls."""
import math
from collections import namedtuple

import mpmath
import numpy as np
from scipy import stats as sp_stats

from .halfplane import dist
from .modsym import symbols, signed_power, positive_mask, normalized_symbols
from .orbit import count, ball_arrays
from .config import TOLERANCES
from .gaussian import gaussian_moment, normal_cdf


__all__ = [
    'MomentReport', 'InsufficientDataError', 'MIN_RECORDS',
    'compensated_sum', 'huber_ratio', 'raw_moment_sums', 'estimate_norm_sq', 'studentized_sample',
    'studentized_moments', 'normalized_moments', 'ks_distance', 'ks_against_gaussian', 'first_moment_decay',
    'summatory_main_term', 'gaussian_targets', 'moment_report',
]

MIN_RECORDS = 100

# Enough bits to add doubles of any exponent without rounding.
_EXACT_BITS = 2200

MomentReport = namedtuple('MomentReport', [
    'x', 'count', 'raw_sums', 'studentized', 'huber_ratio', 'norm_sq_estimate', 'ks', 'z', 'w',
])


class InsufficientDataError(ValueError):
    pass


def compensated_sum(values, partitions=1):
    """Correctly rounded sum of floats.

    Each partition is accumulated exactly with `mpmath.fsum` and the partial sums are combined
    exactly as well, so the result does not depend on the partitioning.

    :param values: The summands.
    :param partitions: Number of contiguous partitions.
    :return: The sum as a float.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if partitions < 1:
        raise ValueError('Partition count must be positive, got %d' % partitions)
    with mpmath.workprec(_EXACT_BITS):
        partials = [mpmath.fsum(part.tolist()) for part in np.array_split(values, partitions)]
        return float(mpmath.fsum(partials))


def huber_ratio(ball, vol):
    """N(z, w, x) vol / (pi e^x), tending to 1."""
    if ball.radius < 1.0:
        raise ValueError('Huber ratio needs a radius of at least 1, got %r' % ball.radius)
    return count(ball) * vol / (math.pi * math.exp(ball.radius))


def raw_moment_sums(ball, form, n_max, partitions=1):
    """S_n = sum of symbol^n over the ball for n = 0, ..., n_max."""
    if n_max < 2:
        raise ValueError('n_max must be at least 2, got %d' % n_max)
    values = symbols(ball, form)
    sums = [float(count(ball))]
    for n in range(1, n_max + 1):
        sums.append(compensated_sum(signed_power(values, n), partitions))
    return np.array(sums)


def estimate_norm_sq(reports, vol):
    """Least-squares fit of S_2(x) against (2 |a|^2 / vol^2) pi e^x x.

    :param reports: Moment reports at strictly increasing radii.
    :param vol: Volume of the surface.
    :return: The implied squared norm.
    """
    if len(reports) < 2:
        raise InsufficientDataError('Norm estimation needs at least 2 reports, got %d' % len(reports))
    radii = np.array([report.x for report in reports], dtype=np.float64)
    if np.any(np.diff(radii) <= 0.0):
        raise InsufficientDataError('Report radii %s are not strictly increasing' % radii.tolist())
    model = math.pi * np.exp(radii) * radii
    second = np.array([report.raw_sums[2] for report in reports], dtype=np.float64)
    slope = float(np.dot(model, second) / np.dot(model, model))
    estimate = slope * vol ** 2 / 2.0
    if not estimate > 0.0:
        raise InsufficientDataError('Non-positive norm estimate %r, the radii are too small' % estimate)
    return estimate


def studentized_sample(ball, form, min_records=MIN_RECORDS):
    """Y = symbol / sqrt(r) over positive-distance records."""
    mask = positive_mask(ball)
    if int(mask.sum()) < min_records:
        raise InsufficientDataError('Need %d positive-distance records, got %d' % (min_records, int(mask.sum())))
    return symbols(ball, form)[mask] / np.sqrt(ball_arrays(ball)['distance'][mask])


def _moments(sample, n_max):
    return np.array([compensated_sum(signed_power(sample, n)) / len(sample) for n in range(n_max + 1)])


def studentized_moments(ball, form, n_max, min_records=MIN_RECORDS):
    """E[Y^n] / E[Y^2]^(n/2), free of the norm of the form and of the volume."""
    if n_max < 2:
        raise ValueError('n_max must be at least 2, got %d' % n_max)
    moments = _moments(studentized_sample(ball, form, min_records), n_max)
    if not moments[2] > 0.0:
        raise InsufficientDataError('All symbols vanish on the ball')
    result = moments / moments[2] ** (np.arange(n_max + 1) / 2.0)
    result[0], result[2] = 1.0, 1.0
    return result


def normalized_moments(ball, form, vol, n_max, min_records=MIN_RECORDS):
    """Moments of the normalised symbols, available when the form carries its norm."""
    sample = normalized_symbols(ball, form, vol)
    if len(sample) < min_records:
        raise InsufficientDataError('Need %d positive-distance records, got %d' % (min_records, len(sample)))
    return _moments(sample, n_max)


def ks_distance(sample):
    """Kolmogorov-Smirnov distance to the standard normal after scaling by the root mean square."""
    sample = np.asarray(sample, dtype=np.float64)
    scale = math.sqrt(compensated_sum(sample ** 2) / len(sample)) if len(sample) else 0.0
    if not scale > 0.0:
        raise InsufficientDataError('Sample has no spread')
    return float(sp_stats.kstest(sample / scale, normal_cdf).statistic)


def ks_against_gaussian(ball, form, min_records=MIN_RECORDS):
    return ks_distance(studentized_sample(ball, form, min_records))


def first_moment_decay(reports):
    """|S_1(x)| / N(x) per report, all at z = w."""
    values = []
    for report in reports:
        if dist(report.z, report.w) > TOLERANCES.geometric:
            raise ValueError('First moment decay is only defined for z = w')
        values.append(abs(report.raw_sums[1]) / report.count)
    return np.array(values)


def summatory_main_term(n, x, norm_sq, vol):
    """Leading growth of S_n(x): pi (2m)! |a|^2m / (m! vol^(m+1)) e^x x^m for n = 2m, zero for odd n."""
    if n % 2:
        return 0.0
    m = n // 2
    return (math.pi * math.factorial(2 * m) * norm_sq ** m / (math.factorial(m) * vol ** (m + 1))
            * math.exp(x) * x ** m)


def gaussian_targets(n_max):
    """Moments 1, 0, 1, 0, 3, 0, 15, ... the studentized moments converge to."""
    return np.array([gaussian_moment(n) for n in range(n_max + 1)])


def moment_report(ball, form, vol, n_max, partitions=1, min_records=MIN_RECORDS):
    """Bundle the statistics of one ball.

    :param ball: The orbit ball.
    :param form: The period form.
    :param vol: Volume of the surface.
    :param n_max: Highest moment order.
    :param partitions: Partitions of the compensated sums.
    :param min_records: Minimum number of positive-distance records.
    :return: The report.
    """
    raw_sums = raw_moment_sums(ball, form, n_max, partitions)
    if ball.radius < 1.0:
        raise InsufficientDataError('Radius %r is below 1' % ball.radius)
    return MomentReport(
        x=ball.radius,
        count=count(ball),
        raw_sums=raw_sums,
        studentized=studentized_moments(ball, form, n_max, min_records),
        huber_ratio=huber_ratio(ball, vol),
        norm_sq_estimate=float(raw_sums[2] * vol / (2.0 * count(ball) * ball.radius)),
        ks=ks_against_gaussian(ball, form, min_records),
        z=ball.base_z,
        w=ball.base_w,
    )
