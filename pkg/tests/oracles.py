"""Independent reference computations, deliberately sharing no code with psi_point.

Everything is univariate ``fractions.Fraction`` arithmetic on coefficient lists.
"""
from fractions import Fraction
from itertools import permutations
from math import factorial


def mul(p, q, order):
    out = [Fraction(0)] * (order + 1)
    for i, a in enumerate(p[: order + 1]):
        if a:
            for j, b in enumerate(q[: order + 1 - i]):
                out[i + j] += a * b
    return out


def inverse(p, order):
    assert p[0] == 1
    out = [Fraction(1)] + [Fraction(0)] * order
    for d in range(1, order + 1):
        out[d] = -sum(p[k] * out[d - k] for k in range(1, min(d, len(p) - 1) + 1))
    return out


def zeta(c, order):
    """Coefficients of ``zeta(c t) = e^{ct/2} - e^{-ct/2}`` in ``t``."""
    out = [Fraction(0)] * (order + 1)
    for k in range(1, order + 1, 2):
        out[k] = Fraction(c) ** k / (Fraction(2) ** (k - 1) * factorial(k))
    return out


def S(c, order):
    """Coefficients of ``S(c t) = zeta(c t) / (c t)``."""
    out = [Fraction(0)] * (order + 1)
    for k in range(0, order + 1, 2):
        out[k] = Fraction(c) ** k / (Fraction(2) ** k * factorial(k + 1))
    return out


def exp_poly(coeffs, order):
    """``exp(f)`` for ``f`` without constant term."""
    out = [Fraction(1)] + [Fraction(0)] * order
    power = list(out)
    for k in range(1, order + 1):
        power = mul(power, coeffs, order)
        out = [o + p / factorial(k) for o, p in zip(out, power)]
    return out


def kernel_along_ray(a, y, order):
    """``P_n(a; t*y)`` as a power series in ``t``, straight from the permutation sum.

    For a generic direction ``y`` no determinant vanishes, so every summand is
    an honest power series in ``t`` and the sum needs no cancellation tricks.
    """
    n = len(a)
    a = [Fraction(v) for v in a]
    y = [Fraction(v) for v in y]
    total = [Fraction(0)] * (order + 1)
    for tail in permutations(range(1, n)):
        s = (0,) + tail
        ap = [a[i] for i in s]
        yp = [y[i] for i in s]
        const = Fraction(1)
        for j in range(1, n - 1):
            const *= yp[j]
        for k in range(n - 1):
            det = ap[k] * yp[k + 1] - ap[k + 1] * yp[k]
            assert det != 0, "choose a generic direction"
            const /= det
        # prod of n-1 zeta factors (each O(t)) divided by t^(n-1) from the denominators,
        # times t^(n-2) from the x' prefactor: net shift of -1
        series = [Fraction(1)] + [Fraction(0)] * (order + 1)
        for k in range(n - 1):
            A = sum(ap[: k + 1])
            Y = sum(yp[: k + 1])
            c = A * yp[k + 1] - ap[k + 1] * Y
            series = mul(series, zeta(c, order + 1), order + 1)
        for d in range(order + 1):
            total[d] += const * series[d + 1]
    return total


def intersection_one_point(order):
    """Coefficients of ``(exp(x^3/24) - 1)/x^2``."""
    e = exp_poly([Fraction(0)] * 3 + [Fraction(1, 24)] + [Fraction(0)] * (order + 2), order + 2)
    e[0] -= 1
    return e[2:]
