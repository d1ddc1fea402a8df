"""Exact-formula geometry of the upper half-plane."""
import math
from collections import namedtuple

import numpy as np

from .config import TOLERANCES


__all__ = [
    'Point', 'MoebiusMap', 'IDENTITY', 'MatrixDecayError',
    'point', 'to_complex', 'moebius', 'canonicalize', 'compose', 'inverse', 'trace',
    'apply', 'cosh_dist', 'dist', 'disk_to_halfplane', 'isometry_from_segments',
    'as_array', 'canonicalize_array', 'apply_array', 'cosh_dist_array',
]

Point = namedtuple('Point', ['re', 'im'])
MoebiusMap = namedtuple('MoebiusMap', ['a', 'b', 'c', 'd'])

IDENTITY = MoebiusMap(1.0, 0.0, 0.0, 1.0)

_EPS = np.finfo(np.float64).eps


class MatrixDecayError(ValueError):
    """The determinant of a product drifted away from 1."""


def point(re, im=None):
    """Build a point of the upper half-plane.

    :param re: Real part, or a complex number when `im` is omitted.
    :param im: Imaginary part, must be positive.
    :return: The point.
    """
    if im is None:
        re, im = complex(re).real, complex(re).imag
    re, im = float(re), float(im)
    if not im > 0.0:
        raise ValueError('Point %r + %ri is not in the upper half-plane' % (re, im))
    return Point(re, im)


def to_complex(z):
    return complex(z.re, z.im)


def moebius(a, b, c, d):
    """Canonical PSL2 map from four real entries."""
    return canonicalize(MoebiusMap(float(a), float(b), float(c), float(d)))


def _rounding(ad, bc):
    # Error of the computed determinant of a unimodular float matrix.
    return 4.0 * _EPS * (abs(ad) + abs(bc))


def canonicalize(m):
    """Renormalise the determinant to 1 and fix the PSL2 sign.

    The first entry of (a, b, c, d) with magnitude above the sign tolerance is made positive.
    A matrix already unimodular up to rounding is not rescaled, so the operation is idempotent.

    :param m: The map.
    :return: The canonical representative.
    """
    a, b, c, d = (float(v) for v in m)
    ad, bc = a * d, b * c
    det = ad - bc
    rounding = _rounding(ad, bc)
    if not det > 0.0 or abs(det - 1.0) > TOLERANCES.determinant + rounding:
        raise MatrixDecayError('Determinant %.17g is too far from 1' % det)
    if abs(det - 1.0) > rounding:
        scale = 1.0 / math.sqrt(det)
        a, b, c, d = a * scale, b * scale, c * scale, d * scale
    for value in (a, b, c, d):
        if abs(value) > TOLERANCES.sign:
            if value < 0.0:
                a, b, c, d = -a, -b, -c, -d
            break
    return MoebiusMap(a, b, c, d)


def compose(m1, m2):
    """Matrix product m1 * m2, canonicalised (apply m2 first)."""
    return canonicalize(MoebiusMap(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    ))


def inverse(m):
    return canonicalize(MoebiusMap(m.d, -m.b, -m.c, m.a))


def trace(m):
    return m.a + m.d


def apply(m, z):
    """Fractional-linear action (az + b) / (cz + d)."""
    zc = to_complex(z)
    denominator = m.c * zc + m.d
    image = (m.a * zc + m.b) / denominator
    # Im((az + b) / (cz + d)) = det y / |cz + d|^2 for any real entries.
    return Point(image.real, (m.a * m.d - m.b * m.c) * z.im / abs(denominator) ** 2)


def cosh_dist(z, w):
    """Cosine hyperbolicus of the hyperbolic distance between two points."""
    return 1.0 + ((z.re - w.re) ** 2 + (z.im - w.im) ** 2) / (2.0 * z.im * w.im)


def dist(z, w):
    return math.acosh(max(1.0, cosh_dist(z, w)))


def disk_to_halfplane(u):
    """Map a point of the unit disk to the upper half-plane, sending 0 to i."""
    zc = 1j * (1.0 + u) / (1.0 - u)
    return point(zc.real, zc.imag)


def _frame(p, q):
    # Isometry sending p to i and q onto the imaginary axis above i.
    root = math.sqrt(p.im)
    to_i = MoebiusMap(1.0 / root, -p.re / root, 0.0, root)
    u = to_complex(apply(to_i, q))
    theta = -np.angle((u - 1j) / (u + 1j)) / 2.0
    rotation = MoebiusMap(math.cos(theta), math.sin(theta), -math.sin(theta), math.cos(theta))
    return compose(rotation, to_i)


def isometry_from_segments(p, q, p_image, q_image):
    """Orientation preserving isometry with p -> p_image and q -> q_image.

    :param p: Start of the source segment.
    :param q: End of the source segment.
    :param p_image: Start of the target segment.
    :param q_image: End of the target segment, at the same distance from `p_image` as `q` from `p`.
    :return: The map.
    """
    if abs(dist(p, q) - dist(p_image, q_image)) > 1e3 * TOLERANCES.geometric * (1.0 + dist(p, q)):
        raise ValueError('Segments of different lengths %.17g and %.17g' % (dist(p, q), dist(p_image, q_image)))
    return compose(inverse(_frame(p_image, q_image)), _frame(p, q))


def as_array(maps):
    """Stack maps into an array of shape (n, 2, 2)."""
    return np.array([[[m.a, m.b], [m.c, m.d]] for m in maps], dtype=np.float64).reshape(-1, 2, 2)


def canonicalize_array(mats):
    """Vectorised `canonicalize` over an array of shape (..., 2, 2)."""
    mats = np.asarray(mats, dtype=np.float64)
    ad = mats[..., 0, 0] * mats[..., 1, 1]
    bc = mats[..., 0, 1] * mats[..., 1, 0]
    det = ad - bc
    rounding = 4.0 * _EPS * (np.abs(ad) + np.abs(bc))
    drift = np.abs(det - 1.0)
    if np.any(~(det > 0.0)) or np.any(drift > TOLERANCES.determinant + rounding):
        raise MatrixDecayError('Determinant drifted to %.17g' % det.flat[np.argmax(drift)])
    scale = np.where(drift > rounding, 1.0 / np.sqrt(det), 1.0)
    mats = mats * scale[..., None, None]
    flat = mats.reshape(mats.shape[:-2] + (4,))
    first = np.argmax(np.abs(flat) > TOLERANCES.sign, axis=-1)
    leading = np.take_along_axis(flat, first[..., None], axis=-1)[..., 0]
    return mats * np.where(leading < 0.0, -1.0, 1.0)[..., None, None]


def apply_array(mats, z):
    """Images of one point under an array of maps, as complex numbers."""
    zc = to_complex(z)
    denominator = mats[..., 1, 0] * zc + mats[..., 1, 1]
    image = (mats[..., 0, 0] * zc + mats[..., 0, 1]) / denominator
    det = mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
    return image.real + 1j * (det * z.im / np.abs(denominator) ** 2)


def cosh_dist_array(images, w):
    """Vectorised `cosh_dist` between complex points and a fixed point."""
    return 1.0 + ((images.real - w.re) ** 2 + (images.imag - w.im) ** 2) / (2.0 * images.imag * w.im)
