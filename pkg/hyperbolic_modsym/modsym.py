import math
from collections import namedtuple

import numpy as np

from .config import TOLERANCES
from .orbit import ball_arrays


__all__ = [
    'PeriodForm', 'DENSE_SEED', 'period_form', 'default_periods', 'random_periods', 'dense_periods',
    'symbol', 'symbols', 'signed_power', 'positive_mask', 'normalized_symbol', 'normalized_symbols', 'eichler_ratio',
]

PeriodForm = namedtuple('PeriodForm', ['periods', 'norm_sq', 'sup_norm'])

DENSE_SEED = 20231


def period_form(periods, norm_sq=None, sup_norm=None):
    """Build a cohomology class from its periods over a1, b1, ..., ag, bg.

    :param periods: The 2g periods, not all zero.
    :param norm_sq: Optional squared L2 norm of the harmonic representative.
    :param sup_norm: Optional sup norm of the harmonic representative.
    :return: The form.
    """
    periods = tuple(float(v) for v in periods)
    if not periods or len(periods) % 2:
        raise ValueError('Expected an even, positive number of periods, got %d' % len(periods))
    if not any(periods):
        raise ValueError('The period vector must be non-zero')
    if not all(math.isfinite(v) for v in periods):
        raise ValueError('Periods must be finite')
    if norm_sq is not None:
        norm_sq = float(norm_sq)
        if not norm_sq > 0.0:
            raise ValueError('norm_sq must be positive, got %r' % norm_sq)
    if sup_norm is not None:
        sup_norm = float(sup_norm)
        if not sup_norm > 0.0:
            raise ValueError('sup_norm must be positive, got %r' % sup_norm)
    return PeriodForm(periods, norm_sq, sup_norm)


def default_periods(genus):
    """The form dual to a1."""
    return period_form([1.0] + [0.0] * (2 * genus - 1))


def random_periods(genus, seed=None):
    return period_form(np.random.default_rng(seed).standard_normal(2 * genus))


def dense_periods(genus):
    """A fixed generic form. Unlike the integer forms its symbols have no atom at zero."""
    return random_periods(genus, seed=DENSE_SEED)


def symbol(element, form):
    """Pairing of the homology class of an element with the form."""
    if len(element.abelianization) != len(form.periods):
        raise ValueError('Abelianization of length %d does not match %d periods' % (
            len(element.abelianization), len(form.periods)))
    total = 0.0
    for count, period in zip(element.abelianization, form.periods):
        total += count * period
    return total


def symbols(ball, form):
    """Symbols of all records, accumulated in the same order as `symbol`."""
    abelianization = ball_arrays(ball)['abelianization']
    totals = np.zeros(len(ball.records), dtype=np.float64)
    if not ball.records:
        return totals
    if abelianization.shape[1] != len(form.periods):
        raise ValueError('Abelianization of length %d does not match %d periods' % (
            abelianization.shape[1], len(form.periods)))
    for k, period in enumerate(form.periods):
        totals += abelianization[:, k] * period
    return totals


def signed_power(values, n):
    """values^n with (-v)^n = -(v^n) exactly for odd n, so sums over inverse pairs cancel."""
    values = np.asarray(values, dtype=np.float64)
    if n % 2:
        return np.sign(values) * np.abs(values) ** n
    return np.abs(values) ** n


def positive_mask(ball):
    """Records at positive distance, the ones entering normalised statistics."""
    return ball_arrays(ball)['distance'] > TOLERANCES.geometric


def _scale(form, vol):
    if form.norm_sq is None:
        raise ValueError('The normalisation needs norm_sq')
    if not vol > 0.0:
        raise ValueError('Volume must be positive, got %r' % vol)
    return vol / (2.0 * form.norm_sq)


def normalized_symbol(element, form, r, vol):
    if not r > 0.0:
        raise ValueError('Distance must be positive, got %r' % r)
    return math.sqrt(_scale(form, vol) / r) * symbol(element, form)


def normalized_symbols(ball, form, vol):
    """Normalised symbols of the positive-distance records."""
    scale = _scale(form, vol)
    mask = positive_mask(ball)
    return np.sqrt(scale / ball_arrays(ball)['distance'][mask]) * symbols(ball, form)[mask]


def eichler_ratio(ball, form):
    """Largest |symbol| / (1 + r) over positive-distance records, 0 when there are none."""
    mask = positive_mask(ball)
    if not mask.any():
        return 0.0
    ratios = np.abs(symbols(ball, form)[mask]) / (1.0 + ball_arrays(ball)['distance'][mask])
    return float(ratios.max())
