import os
from collections import namedtuple

__all__ = [
    'Tolerances', 'TOLERANCES', 'MAX_WORKERS', 'PARANOID', 'strtobool', 'capped_workers',
]


def strtobool(value):
    """Convert a truth-ish string from the environment to a bool.

    :param value: String such as '1', 'yes', 'off'.
    :return: The boolean value.
    """
    value = value.strip().lower()
    if value in ('y', 'yes', 't', 'true', 'on', '1'):
        return True
    if value in ('', 'n', 'no', 'f', 'false', 'off', '0'):
        return False
    raise ValueError('Invalid truth value "%s"' % value)


Tolerances = namedtuple('Tolerances', [
    'geometric',         # equality of points and distances
    'determinant',       # |det - 1| beyond this signals numeric decay
    'sign',              # first entry above this magnitude fixes the PSL2 sign
    'relator',           # entrywise, product along the relator vs identity
    'hyperbolic_trace',  # |trace| > 2 + this for every generator
])

TOLERANCES = Tolerances(
    geometric=1e-9,
    determinant=1e-6,
    sign=1e-9,
    relator=1e-8,
    hyperbolic_trace=1e-6,
)

MAX_WORKERS = int(os.environ.get('HYPERBOLIC_MODSYM_MAX_WORKERS', '0') or 0)
PARANOID = strtobool(os.environ.get('HYPERBOLIC_MODSYM_PARANOID', '0'))


def capped_workers(workers):
    """Apply the environment cap to a requested worker count.

    :param workers: Requested number of workers.
    :return: Number of workers actually used, at least 1.
    """
    if workers < 1:
        raise ValueError('Worker count must be positive, got %d' % workers)
    if MAX_WORKERS > 0:
        return min(workers, MAX_WORKERS)
    return workers
