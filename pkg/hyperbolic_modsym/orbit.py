"""Enumeration of the orbit ball {g : r(gz, w) <= x} by breadth-first search over canonical words."""
import logging
import math
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .config import PARANOID, capped_workers
from .halfplane import (
    IDENTITY, MoebiusMap, Point, apply, cosh_dist, dist, as_array, canonicalize_array, apply_array, cosh_dist_array,
)
from .surface_group import GroupElement, letters, abelianize, reduce, shortlex_key, enumerate_words, word_matrix


__all__ = [
    'OrbitRecord', 'OrbitBall', 'ShellStat', 'BudgetExceededError', 'StoppingAuditError',
    'DEFAULT_ELEMENT_CAP', 'DEFAULT_MARGIN_FACTOR',
    'max_displacement', 'default_margin', 'enumerate_ball', 'audit_stopping', 'brute_force_ball',
    'count', 'word_set', 'ball_arrays',
]

logger = logging.getLogger(__name__)

DEFAULT_ELEMENT_CAP = 5 * 10 ** 7
DEFAULT_MARGIN_FACTOR = 2.0

OrbitRecord = namedtuple('OrbitRecord', ['element', 'distance', 'cosh_distance', 'orbit_point'])
OrbitBall = namedtuple('OrbitBall', ['base_z', 'base_w', 'radius', 'records', 'shell_stats', 'stopping_margin'])
ShellStat = namedtuple('ShellStat', ['length', 'candidates', 'canonical', 'admitted', 'min_distance'])


class BudgetExceededError(RuntimeError):
    pass


class StoppingAuditError(RuntimeError):
    pass


def max_displacement(group, z):
    """Largest distance a generator moves the point."""
    return max(dist(z, apply(generator, z)) for generator in group.generators)


def default_margin(group, z, factor=DEFAULT_MARGIN_FACTOR):
    return factor * max_displacement(group, z)


def _multiply(left, right):
    # Explicit 2x2 products keep the float operations identical for any chunking.
    return np.stack([
        np.stack([
            left[..., 0, 0] * right[..., 0, 0] + left[..., 0, 1] * right[..., 1, 0],
            left[..., 0, 0] * right[..., 0, 1] + left[..., 0, 1] * right[..., 1, 1],
        ], axis=-1),
        np.stack([
            left[..., 1, 0] * right[..., 0, 0] + left[..., 1, 1] * right[..., 1, 0],
            left[..., 1, 0] * right[..., 0, 1] + left[..., 1, 1] * right[..., 1, 1],
        ], axis=-1),
    ], axis=-2)


def _expand(group, z, w, cosh_limit, words, mats):
    """Canonical children of a chunk of parents.

    :return: Children inside the limit as (words, matrices, cosh distances, images), the number of
             freely reduced candidates, and the smallest cosh distance of a canonical child beyond the limit.
    """
    alphabet = letters(group.genus)
    products = canonicalize_array(_multiply(
        mats[:, None], as_array([group.letter_matrices[letter] for letter in alphabet])[None]))
    images = apply_array(products, z)
    coshes = cosh_dist_array(images, w)
    last = np.array([word[-1] if word else 0 for word in words], dtype=np.int64)
    allowed = last[:, None] != -np.array(alphabet, dtype=np.int64)[None, :]
    inside = allowed & (coshes <= cosh_limit)

    rows, cols, children = [], [], []
    for i, k in zip(*np.nonzero(inside)):
        child = words[i] + (alphabet[k],)
        if reduce(group, child) == child:
            rows.append(i)
            cols.append(k)
            children.append(child)

    beyond_min = math.inf
    outer_rows, outer_cols = np.nonzero(allowed & ~(coshes <= cosh_limit))
    for index in np.argsort(coshes[outer_rows, outer_cols], kind='stable'):
        i, k = outer_rows[index], outer_cols[index]
        child = words[i] + (alphabet[k],)
        if reduce(group, child) == child:
            beyond_min = float(coshes[i, k])
            break

    rows, cols = np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64)
    return children, products[rows, cols], coshes[rows, cols], images[rows, cols], int(allowed.sum()), beyond_min


_WORKER_STATE = {}


def _init_worker(group, z, w):
    _WORKER_STATE.update(group=group, z=z, w=w)


def _expand_chunk(payload):
    cosh_limit, words, mats = payload
    return _expand(_WORKER_STATE['group'], _WORKER_STATE['z'], _WORKER_STATE['w'], cosh_limit, words, mats)


def _record(group, word, mat, cosh_value, image):
    cosh_value = max(1.0, float(cosh_value))
    return OrbitRecord(
        element=GroupElement(
            word=word,
            matrix=MoebiusMap(*(float(v) for v in np.ravel(mat))),
            abelianization=abelianize(group, word),
        ),
        distance=math.acosh(cosh_value),
        cosh_distance=cosh_value,
        orbit_point=Point(float(image.real), float(image.imag)),
    )


def _sort_records(records):
    return tuple(sorted(records, key=lambda record: (record.distance, shortlex_key(record.element.word))))


def enumerate_ball(group, z, w, x, margin=None, element_cap=DEFAULT_ELEMENT_CAP, workers=1, paranoid=None):
    """Every group element g with r(gz, w) <= x, exactly once.

    Word-length shells are explored breadth first. Only parents within x + margin are extended and
    the search stops after the first shell whose closest canonical word lies beyond x + margin.

    :param group: The surface group.
    :param z: Point moved by the group.
    :param w: Fixed point.
    :param x: Radius.
    :param margin: Pruning margin, twice the largest generator displacement of z by default.
    :param element_cap: Largest number of elements the search may hold.
    :param workers: Number of processes expanding a shell.
    :param paranoid: Re-run with the margin doubled and compare, `config.PARANOID` by default.
    :return: The ball.
    """
    if x < 0:
        raise ValueError('Radius must be non-negative, got %r' % x)
    minimum_margin = default_margin(group, z)
    if margin is None:
        margin = minimum_margin
    elif margin < minimum_margin:
        logger.warning('Margin %.4f is below the default %.4f, the stopping rule may cut the ball',
                       margin, minimum_margin)
    if paranoid is None:
        paranoid = PARANOID
    projected = math.pi * math.exp(x) / group.volume
    if projected > element_cap:
        raise BudgetExceededError('Projected ball size %.3g exceeds the element cap %d' % (projected, element_cap))

    limit = x + margin
    cosh_limit = math.cosh(limit)
    workers = capped_workers(workers)
    identity_cosh = cosh_dist(z, w)
    identity_distance = math.acosh(identity_cosh)
    records = []
    if identity_distance <= x:
        records.append(_record(group, (), np.array(IDENTITY), identity_cosh, 1j * z.im + z.re))
    shell_stats = [ShellStat(0, 1, 1, len(records), identity_distance)]
    if identity_distance <= limit:
        words, mats = [()], np.eye(2)[None]
    else:
        words, mats = [], np.zeros((0, 2, 2))

    pool = None
    if workers > 1:
        pool = ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(group, z, w))
    try:
        length = 0
        while words:
            length += 1
            if pool is None:
                results = [_expand(group, z, w, cosh_limit, words, mats)]
            else:
                bounds = np.array_split(np.arange(len(words)), 4 * workers)
                payloads = [
                    (cosh_limit, words[part[0]:part[-1] + 1], mats[part[0]:part[-1] + 1])
                    for part in bounds if len(part)
                ]
                results = list(pool.map(_expand_chunk, payloads))
            words = [child for result in results for child in result[0]]
            mats = np.concatenate([result[1] for result in results]).reshape(-1, 2, 2)
            coshes = np.concatenate([result[2] for result in results])
            images = np.concatenate([result[3] for result in results])
            candidates = sum(result[4] for result in results)
            min_cosh = min([result[5] for result in results] + [float(coshes.min()) if len(coshes) else math.inf])

            admitted = 0
            for i in np.nonzero(coshes <= math.cosh(x) * (1.0 + 1e-12))[0]:
                record = _record(group, words[i], mats[i], coshes[i], images[i])
                if record.distance <= x:
                    records.append(record)
                    admitted += 1
            stat = ShellStat(length, candidates, len(words), admitted, math.acosh(max(1.0, min_cosh)))
            shell_stats.append(stat)
            logger.info('Shell %d: %d candidates, %d canonical, %d admitted, min distance %.4f',
                        stat.length, stat.candidates, stat.canonical, stat.admitted, stat.min_distance)
            if len(words) + len(records) > element_cap:
                raise BudgetExceededError('Search holds %d elements, above the cap %d' % (
                    len(words) + len(records), element_cap))
    finally:
        if pool is not None:
            pool.shutdown()

    ball = OrbitBall(
        base_z=z,
        base_w=w,
        radius=float(x),
        records=_sort_records(records),
        shell_stats=tuple(shell_stats),
        stopping_margin=float(margin),
    )
    audit_stopping(ball)
    if paranoid:
        check = enumerate_ball(group, z, w, x, margin=2.0 * margin, element_cap=element_cap,
                               workers=workers, paranoid=False)
        if word_set(check) != word_set(ball):
            raise StoppingAuditError('Doubling the margin changed the ball from %d to %d elements' % (
                count(ball), count(check)))
    return ball


def audit_stopping(ball):
    """Check the invariants of an enumerated ball.

    :raise StoppingAuditError: The last shell is within radius plus margin, or the records are inconsistent.
    """
    last = ball.shell_stats[-1]
    if not last.min_distance > ball.radius + ball.stopping_margin:
        raise StoppingAuditError('Last shell %d has minimum distance %.6f within %.6f' % (
            last.length, last.min_distance, ball.radius + ball.stopping_margin))
    if len(word_set(ball)) != count(ball):
        raise StoppingAuditError('Duplicate canonical words in the ball')
    if any(record.distance > ball.radius for record in ball.records):
        raise StoppingAuditError('Record beyond the radius %.6f' % ball.radius)
    has_identity = any(not record.element.word for record in ball.records)
    if has_identity != (dist(ball.base_z, ball.base_w) <= ball.radius):
        raise StoppingAuditError('Identity membership disagrees with the basepoint distance')


def brute_force_ball(group, z, w, x, max_length):
    """Ball from all canonical words up to a length, without any distance pruning."""
    records, minima = [], {}
    for word in enumerate_words(group, max_length):
        matrix = word_matrix(group, word)
        image = apply(matrix, z)
        cosh_value = cosh_dist(image, w)
        minima[len(word)] = min(minima.get(len(word), math.inf), cosh_value)
        record = _record(group, word, np.array(matrix), cosh_value, complex(image.re, image.im))
        if record.distance <= x:
            records.append(record)
    shell_stats = tuple(
        ShellStat(length, None, None, sum(1 for r in records if len(r.element.word) == length),
                  math.acosh(max(1.0, minima[length])))
        for length in sorted(minima)
    )
    return OrbitBall(z, w, float(x), _sort_records(records), shell_stats, None)


def count(ball):
    return len(ball.records)


def word_set(ball):
    return frozenset(record.element.word for record in ball.records)


def ball_arrays(ball):
    """Column arrays of a ball in record order."""
    if ball.records:
        abelianization = np.array([record.element.abelianization for record in ball.records], dtype=np.int64)
    else:
        abelianization = np.zeros((0, 0), dtype=np.int64)
    return {
        'distance': np.array([record.distance for record in ball.records], dtype=np.float64),
        'cosh_distance': np.array([record.cosh_distance for record in ball.records], dtype=np.float64),
        'word_length': np.array([len(record.element.word) for record in ball.records], dtype=np.int64),
        'abelianization': abelianization,
    }
