"""Truncated twisted Huber series and probes of their poles at s = 1."""
import logging
import math
from collections import namedtuple

import numpy as np
from scipy.integrate import quad
from scipy.special import gamma, gammaincc

from .halfplane import Point, as_array, apply_array, cosh_dist_array
from .modsym import symbols, signed_power, eichler_ratio
from .orbit import count, ball_arrays, enumerate_ball
from .stats import compensated_sum


__all__ = [
    'SeriesValue', 'ResidueProbe', 'ExtrapolationError',
    'MIN_REAL_S', 'DEFAULT_NODES', 'DEFAULT_MESH', 'TAIL_SAFETY',
    'evaluate', 'stieltjes_evaluate', 'series_agreement', 'tail_integral', 'leading_coefficient_target',
    'huber_residue_probe', 'even_leading_coefficient_probe', 'odd_order_probe',
    'stencil_laplacian', 'shifted_equation_check',
]

logger = logging.getLogger(__name__)

MIN_REAL_S = 1.05
DEFAULT_NODES = (1.4, 1.2, 1.1)
DEFAULT_MESH = 1e-3
TAIL_SAFETY = 2.0

SeriesValue = namedtuple('SeriesValue', ['n', 's', 'epsilon', 'truncation_radius', 'value', 'tail_bound'])
ResidueProbe = namedtuple('ResidueProbe', [
    'n', 'pole_order_tested', 'leading_coefficient_estimate', 'target', 'relative_error', 'status', 'diagnostics',
])


class ExtrapolationError(RuntimeError):
    pass


def _volume(form, vol):
    if vol is not None:
        return vol
    if form is None:
        raise ValueError('Volume is needed when no period form is given')
    return 4.0 * math.pi * (len(form.periods) // 2 - 1)


def _quarter_turn(value, n):
    # Multiply by (-i)^n by swapping components.
    re, im = value.real, value.imag
    turn = n % 4
    if turn == 1:
        re, im = im, -re
    elif turn == 2:
        re, im = -re, -im
    elif turn == 3:
        re, im = -im, re
    return complex(re, im)


def _symbol_powers(ball, form, n):
    if form is None:
        if n:
            raise ValueError('Derivative series need a period form')
        return np.ones(count(ball)), np.zeros(count(ball))
    values = symbols(ball, form)
    return signed_power(values, n), values


def _check_arguments(n, s):
    s = complex(s)
    if n < 0:
        raise ValueError('Derivative order must be non-negative, got %d' % n)
    if s.real < MIN_REAL_S:
        raise ValueError('Re(s) = %r is below %r, outside the region of absolute convergence' % (s.real, MIN_REAL_S))
    return s


def _tail_bound(ball, form, n, sigma, vol):
    beta = sigma - 1.0
    x = ball.radius
    density = max(1.0, count(ball) * vol / (math.pi * math.exp(x)))
    envelope = eichler_ratio(ball, form) ** n if n else 1.0
    incomplete = gammaincc(n + 1, beta * (1.0 + x)) * gamma(n + 1)
    return float(TAIL_SAFETY * density * math.pi / vol * 2.0 ** sigma * envelope
                 * math.exp(beta) * incomplete / beta ** (n + 1))


def evaluate(ball, form, n, s, epsilon=0.0, vol=None):
    """Truncated G^(n)(z, w, s, epsilon) over the ball.

    The sum of symbol^n exp(-i epsilon symbol) cosh(r)^-s is accumulated with compensated sums and
    the factor (-i)^n is applied exactly afterwards. The tail bound integrates the counting
    asymptotics against the linear envelope of the symbols beyond the radius.

    :param ball: The orbit ball, its radius is the truncation radius.
    :param form: Period form, may be None for n = 0 and epsilon = 0.
    :param n: Derivative order.
    :param s: Complex argument with Re(s) >= 1.05.
    :param epsilon: Twist parameter.
    :param vol: Volume, derived from the genus of the form by default.
    :return: The series value.
    """
    s = _check_arguments(n, s)
    vol = _volume(form, vol)
    powers, values = _symbol_powers(ball, form, n)
    log_cosh = np.log(ball_arrays(ball)['cosh_distance'])
    magnitude = powers * np.exp(-s.real * log_cosh)
    phase = -(s.imag * log_cosh + epsilon * values)
    value = complex(compensated_sum(magnitude * np.cos(phase)), compensated_sum(magnitude * np.sin(phase)))
    return SeriesValue(
        n=n,
        s=s,
        epsilon=float(epsilon),
        truncation_radius=ball.radius,
        value=_quarter_turn(value, n),
        tail_bound=_tail_bound(ball, form, n, s.real, vol),
    )


def stieltjes_evaluate(ball, form, n, s, epsilon=0.0):
    """The same truncated sum by parts over the sorted distance list."""
    s = _check_arguments(n, s)
    if not ball.records:
        return 0j
    powers, values = _symbol_powers(ball, form, n)
    partial = np.cumsum(powers * np.exp(-1j * epsilon * values))
    kernel = np.exp(-s * np.log(ball_arrays(ball)['cosh_distance']))
    value = partial[-1] * kernel[-1] - np.sum(partial[:-1] * np.diff(kernel))
    return _quarter_turn(complex(value), n)


def series_agreement(ball, form, n, s, epsilon=0.0, rtol=1e-9):
    """Compare the direct and the summation-by-parts evaluations.

    The tolerance is relative to the sum of absolute values of the terms, so sums that cancel to
    zero are compared on their natural scale.

    :return: Direct value, resummed value and whether they agree.
    """
    direct = evaluate(ball, form, n, s, epsilon).value
    resummed = stieltjes_evaluate(ball, form, n, s, epsilon)
    powers = np.abs(_symbol_powers(ball, form, n)[0])
    scale = compensated_sum(powers * ball_arrays(ball)['cosh_distance'] ** -complex(s).real)
    return direct, resummed, abs(direct - resummed) <= rtol * scale


def tail_integral(s, x, powers):
    """Integral of cosh(t)^-s P(t) e^t over t > x for a polynomial P.

    :param s: Real argument above 1.
    :param x: Lower limit.
    :param powers: Coefficients of P, index k multiplies t^k.
    :return: The integral.
    """
    delta = s - 1.0
    if not delta > 0.0:
        raise ValueError('Tail integral diverges for s = %r' % s)
    main = 0.0
    for k, coefficient in enumerate(powers):
        if coefficient:
            main += coefficient * gammaincc(k + 1, delta * x) * gamma(k + 1) / delta ** (k + 1)

    def correction(t):
        polynomial = sum(coefficient * t ** k for k, coefficient in enumerate(powers))
        return polynomial * math.exp(-delta * t) * ((1.0 + math.exp(-2.0 * t)) ** -s - 1.0)

    rest, _ = quad(correction, x, np.inf)
    return 2.0 ** s * (main + rest)


def leading_coefficient_target(m, norm_sq, vol):
    """Leading Laurent coefficient of the sign-stripped G^(2m) at s = 1, 2 pi / vol for m = 0."""
    if m == 0:
        return 2.0 * math.pi / vol
    return 2.0 * math.pi * math.factorial(2 * m) * norm_sq ** m / vol ** (m + 1)


def _extrapolate(nodes, values):
    offsets = np.asarray(nodes, dtype=np.float64) - 1.0
    coefficients = np.polyfit(offsets, np.asarray(values, dtype=np.float64), len(nodes) - 1)
    return float(np.polyval(coefficients, 0.0))


def _ball_estimate(ball, form, n, order, nodes, with_tail):
    distances = ball_arrays(ball)['distance']
    cosh_distance = ball_arrays(ball)['cosh_distance']
    weights = _symbol_powers(ball, form, n)[0] if n else np.ones(count(ball))
    m = n // 2
    x = ball.radius
    amplitude = 0.0
    if with_tail:
        if x < 1.0:
            raise ValueError('Tail calibration needs a radius of at least 1, got %r' % x)
        shell = compensated_sum(weights) - compensated_sum(weights[distances <= x - 1.0])
        amplitude = shell / (math.exp(x) * x ** m - math.exp(x - 1.0) * (x - 1.0) ** m)
    density = [0.0] * (m + 1)
    density[m] += 1.0
    if m:
        density[m - 1] += float(m)
    values = []
    for s in nodes:
        truncated = compensated_sum(weights * cosh_distance ** -s)
        tail = amplitude * tail_integral(s, x, density) if with_tail else 0.0
        values.append((s - 1.0) ** order * (truncated + tail))
    return _extrapolate(nodes, values), values, amplitude


def _probe(balls, form, n, target, nodes, with_tail):
    if len(balls) < 3:
        raise ValueError('Probes need at least 3 balls, got %d' % len(balls))
    balls = sorted(balls, key=lambda ball: ball.radius)
    radii = [ball.radius for ball in balls]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError('Ball radii %s are not strictly increasing' % radii)
    order = n // 2 + 1
    if n and not np.any(symbols(balls[-1], form)):
        return ResidueProbe(n, order, 0.0, target, None, 'degenerate', {'radii': radii})

    per_radius = []
    for ball in balls:
        estimate, values, amplitude = _ball_estimate(ball, form, n, order, nodes, with_tail)
        per_radius.append(estimate)
        logger.debug('n=%d radius %.3f: amplitude %.6g, values %s, extrapolated %.6g',
                     n, ball.radius, amplitude, values, estimate)
    estimate = per_radius[-1]
    diagnostics = {
        'radii': radii,
        'nodes': list(nodes),
        'values': values,
        'amplitude': amplitude,
        'per_radius': per_radius,
    }
    if not all(math.isfinite(v) for v in per_radius):
        logger.warning('Extrapolation of order %d failed: %s', n, diagnostics)
        raise ExtrapolationError('Non-finite extrapolated estimates %s' % per_radius)
    status = 'ok'
    if per_radius[-2] and abs(per_radius[-1] - per_radius[-2]) > 0.5 * abs(per_radius[-2]):
        logger.warning('Extrapolated estimates of order %d do not settle: %s', n, per_radius)
        status = 'unstable'
    relative_error = None
    if target:
        relative_error = abs(estimate - target) / abs(target)
    return ResidueProbe(n, order, estimate, target, relative_error, status, diagnostics)


def huber_residue_probe(balls, vol, nodes=DEFAULT_NODES):
    """Estimate lim (s - 1) G(z, w, s) at s = 1 and compare with 2 pi / vol.

    The tail beyond the largest radius is modelled as A e^t dt with the density A measured on the
    outermost unit shell, then the values at the nodes are extrapolated to s = 1.
    """
    return _probe(balls, None, 0, leading_coefficient_target(0, None, vol), nodes, with_tail=True)


def even_leading_coefficient_probe(balls, form, vol, m, norm_sq=None, nodes=DEFAULT_NODES):
    """Estimate lim (s - 1)^(m+1) sum symbol^2m cosh(r)^-s and compare with the leading coefficient.

    :param balls: At least 3 balls at increasing radii.
    :param form: The period form.
    :param vol: Volume of the surface.
    :param m: Half the derivative order, 1 or 2.
    :param norm_sq: Squared norm of the form, taken from the form by default.
    :param nodes: Real arguments used for the extrapolation.
    :return: The probe.
    """
    if m not in (1, 2):
        raise ValueError('Even probes support m = 1 or 2, got %d' % m)
    if norm_sq is None:
        norm_sq = form.norm_sq
    if norm_sq is None or not norm_sq > 0.0:
        raise ValueError('Even probes need a positive norm_sq, got %r' % norm_sq)
    return _probe(balls, form, 2 * m, leading_coefficient_target(m, norm_sq, vol), nodes, with_tail=True)


def odd_order_probe(balls, form, n, nodes=DEFAULT_NODES):
    """Extrapolated (s - 1)^(n//2 + 1) times the truncated odd sum, reported without a target."""
    if n < 1 or not n % 2:
        raise ValueError('Odd probes need an odd positive order, got %d' % n)
    return _probe(balls, form, n, None, nodes, with_tail=False)


def stencil_laplacian(func, z, h=DEFAULT_MESH):
    """Hyperbolic Laplacian y^2 (f_xx + f_yy) by the five-point stencil."""
    if not z.im - h > 0.0:
        raise ValueError('Stencil of mesh %r around %r leaves the upper half-plane' % (h, z))
    centre = func(z)
    neighbours = (
        func(Point(z.re + h, z.im)) + func(Point(z.re - h, z.im))
        + func(Point(z.re, z.im + h)) + func(Point(z.re, z.im - h))
    )
    return z.im ** 2 * (neighbours - 4.0 * centre) / h ** 2


def shifted_equation_check(group, z, w, form, s, x, h=DEFAULT_MESH, epsilon=0.0, ball=None, margin=None):
    """Relative defect of Delta G + s(1 - s) G = -s(s + 1) G(s + 2) on a fixed element set.

    :param group: The surface group.
    :param z: Centre of the stencil.
    :param w: Fixed point.
    :param form: Period form for the twist, may be None when epsilon is 0.
    :param s: Complex argument with Re(s) >= 2.
    :param x: Radius of the element set.
    :param h: Mesh of the stencil.
    :param epsilon: Twist parameter.
    :param ball: Ball around z to reuse, enumerated when missing.
    :param margin: Pruning margin of the enumeration.
    :return: |defect| / |s(s + 1) G(s + 2)|.
    """
    s = complex(s)
    if s.real < 2.0:
        raise ValueError('Shifted equation check needs Re(s) >= 2, got %r' % s)
    if not z.im - h > 0.0:
        raise ValueError('Stencil of mesh %r around %r leaves the upper half-plane' % (h, z))
    if ball is None:
        ball = enumerate_ball(group, z, w, x, margin=margin)
    mats = as_array([record.element.matrix for record in ball.records])
    twist = np.ones(count(ball), dtype=np.complex128)
    if epsilon:
        twist = np.exp(-1j * epsilon * symbols(ball, form))

    def series(exponent):
        def at(point):
            terms = twist * cosh_dist_array(apply_array(mats, point), w) ** -exponent
            return complex(compensated_sum(terms.real), compensated_sum(terms.imag))
        return at

    value = series(s)(z)
    shifted = s * (s + 1.0) * series(s + 2.0)(z)
    defect = stencil_laplacian(series(s), z, h) + s * (1.0 - s) * value + shifted
    return abs(defect) / abs(shifted)
