from scipy.special import factorial2, ndtr

__all__ = ['gaussian_moment', 'normal_cdf']


def gaussian_moment(n):
    """Moment E[Y^n] of the standard normal distribution.

    Zero for odd orders, (n - 1)!! = (2m)! / (m! 2^m) for n = 2m.
    """
    if n < 0:
        raise ValueError('Moment order must be non-negative, got %d' % n)
    if n % 2:
        return 0.0
    if n == 0:
        return 1.0
    return float(factorial2(n - 1, exact=True))


def normal_cdf(x):
    return ndtr(x)
