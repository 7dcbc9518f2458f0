"""psi-integrals over double ramification cycles.

For balanced integer weights ``a`` (``sum a = 0``) the series

    P_n(a; x) / zeta(X) - delta_{n,2} / (x_1 + x_2),   X = x_1 + ... + x_n

has ``int_{DR_g(a)} psi^d`` as its coefficient of ``x^d``.  The forgotten-points
variant sums the kernel over all ways of attaching the forgotten weights
``b_j`` to a kept point (or to none of them).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .algebra import (
    LinearForm,
    Rational,
    TruncatedSeries,
    monomials,
    s_of_form,
    series_div_linear,
    series_invert_unit,
)
from .errors import InvariantError, SingularGrid
from .kernel import GRID_RETRIES, APolynomial, pn_series, solve_exact

__all__ = [
    "ForgottenSpec",
    "dr_series",
    "dr_integral",
    "dr_genus",
    "dr_integral_poly",
    "forgotten_series",
    "forgotten_integral_direct",
]

_ZERO = mpq(0)


def _as_ints(values: Sequence[int], what: str) -> tuple[int, ...]:
    out = []
    for v in values:
        if int(v) != v:
            raise ValueError(f"{what} must be integers, got {v!r}")
        out.append(int(v))
    return tuple(out)


def dr_genus(n_points: int, degree: int) -> int | None:
    """Genus with ``degree = 2g - 3 + n_points`` in the stable range, if any."""
    twice = degree - n_points + 3
    if twice < 0 or twice % 2:
        return None
    g = twice // 2
    return g if 2 * g - 2 + n_points > 0 else None


def dr_series(a: Sequence[int], order: int) -> TruncatedSeries:
    """Generating series of ``int_{DR_g(a)} psi^d`` over all genera."""
    a = _as_ints(a, "DR weights")
    if len(a) < 2:
        raise ValueError("need at least two points")
    if sum(a) != 0:
        raise ValueError(f"DR weights must sum to zero, got {a}")
    return _dr_series(a, order)


@lru_cache(maxsize=1024)
def _dr_series(a: tuple, order: int) -> TruncatedSeries:
    n = len(a)
    X = LinearForm.total(n)
    kernel = pn_series(a, order + 1)
    if n == 2:
        kernel = kernel - s_of_form(X, order + 1)
    quotient = series_div_linear(kernel, X)
    return quotient * series_invert_unit(s_of_form(X, order))


def dr_integral(a: Sequence[int], d: Sequence[int]) -> Rational:
    """``int_{DR_g(a)} psi_1^d1 ... psi_n^dn`` with ``g`` fixed by ``sum d``."""
    a = _as_ints(a, "DR weights")
    d = _as_ints(d, "psi exponents")
    if len(a) != len(d):
        raise ValueError("a and d must have the same length")
    if min(d) < 0:
        raise ValueError("psi exponents must be non-negative")
    value = dr_series(a, sum(d)).coefficient(d)
    if dr_genus(len(d), sum(d)) is None and value:
        raise InvariantError(f"DR coefficient {value} at x^{d} has no admissible genus")
    return value


def _held_out(k: int, count: int = 3) -> list[tuple[int, ...]]:
    # first entry negative: never on the (positive) interpolation grid
    return [tuple([-(j + 2)] + [(-1) ** i * (i + 2 * j + 3) for i in range(1, k)]) for j in range(count)]


def dr_integral_poly(n: int, d: Sequence[int]) -> APolynomial:
    """``a -> int_{DR_g(a)} psi^d`` as a polynomial in ``a_1..a_{n-1}``.

    ``a_n = -(a_1 + ... + a_{n-1})`` is eliminated.  The polynomial has
    degree at most ``2g``; it is interpolated on a lattice of that degree and
    then checked at three points off the lattice.
    """
    d = _as_ints(d, "psi exponents")
    if len(d) != n or n < 2:
        raise ValueError("need n >= 2 exponents")
    g = dr_genus(n, sum(d))
    if g is None:
        raise ValueError(f"sum(d) = {sum(d)} is not 2g - 3 + {n} for a stable genus")
    k = n - 1
    top = 2 * g
    basis = [e for deg in range(top + 1) for e in monomials(k, deg)]

    def full(point):
        return tuple(point) + (-sum(point),)

    def value_at(basis_e, point):
        out = mpq(1)
        for v, p in zip(point, basis_e):
            out *= mpq(v) ** p
        return out

    for attempt in range(GRID_RETRIES):
        s = 1 + attempt
        nodes = [tuple(s + s * v for v in e) for e in basis]
        matrix = [[value_at(b, pt) for b in basis] for pt in nodes]
        rhs = [[dr_integral(full(pt), d)] for pt in nodes]
        sol = solve_exact(matrix, rhs)
        if sol is not None:
            break
    else:
        raise SingularGrid(f"no nonsingular grid for DR polynomial n={n}, d={d}")
    poly = APolynomial(k, {b: row[0] for b, row in zip(basis, sol)})
    for pt in _held_out(k):
        want = dr_integral(full(pt), d)
        if poly.evaluate(pt) != want:
            raise InvariantError(f"DR polynomial for d={d} fails at a={full(pt)}: {poly.evaluate(pt)} != {want}")
    return poly


@dataclass(frozen=True)
class ForgottenSpec:
    """Kept weights ``a`` (``n >= 3``) and forgotten weights ``b`` with total 0."""

    a: tuple
    b: tuple = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "a", _as_ints(self.a, "kept weights"))
        object.__setattr__(self, "b", _as_ints(self.b, "forgotten weights"))
        if len(self.a) < 3:
            raise ValueError("need at least three kept points")
        if sum(self.a) + sum(self.b) != 0:
            raise ValueError(f"weights must balance: sum(a) + sum(b) = {sum(self.a) + sum(self.b)}")

    @property
    def n(self) -> int:
        return len(self.a)

    @property
    def m(self) -> int:
        return len(self.b)

    def assignments(self):
        """Each forgotten point goes to block 0 (free) or to kept point 1..n."""
        return itertools.product(range(self.n + 1), repeat=self.m)

    def shifted(self, assignment: Sequence[int]) -> tuple[int, ...]:
        out = list(self.a)
        for j, block in enumerate(assignment):
            if block:
                out[block - 1] += self.b[j]
        return tuple(out)


def forgotten_series(spec: ForgottenSpec, order: int) -> TruncatedSeries:
    """Generating series of psi-integrals over the push-forward of ``DR_g(a, b)``
    along the map forgetting the ``b`` points, summed over all genera."""
    n, top = spec.n, order + 1
    X = LinearForm.total(n)
    x_sum = X.to_series(top)
    acc = TruncatedSeries.zero(n, top)
    for assignment in spec.assignments():
        free = [j for j, block in enumerate(assignment) if block == 0]
        mono = [0] * n
        for block in assignment:
            if block:
                mono[block - 1] += 1
        sign = (-1) ** (spec.m - len(free))
        if sum(mono) > top:
            continue
        term = TruncatedSeries(n, top, {tuple(mono): sign})
        for _ in free:
            term = term * x_sum
        for j in free:
            term = term * s_of_form(X.scale(spec.b[j]), top)
        acc = acc + term * pn_series(spec.shifted(assignment), top)
    quotient = series_div_linear(acc, X)
    return quotient * series_invert_unit(s_of_form(X, order))


def forgotten_integral_direct(spec: ForgottenSpec, d: Sequence[int]) -> Rational:
    """The same integrals as a signed sum of ordinary DR integrals."""
    d = _as_ints(d, "psi exponents")
    if len(d) != spec.n:
        raise ValueError(f"need {spec.n} exponents")
    twice = sum(d) - spec.n - spec.m + 3
    if twice < 0 or twice % 2:
        raise ValueError(f"sum(d) = {sum(d)} is not 2g - 3 + n + m for an integer g >= 0")
    total = _ZERO
    for assignment in spec.assignments():
        counts = [0] * spec.n
        for block in assignment:
            if block:
                counts[block - 1] += 1
        if any(c > k for c, k in zip(counts, d)):
            continue
        free = [spec.b[j] for j, block in enumerate(assignment) if block == 0]
        weights = spec.shifted(assignment) + tuple(free)
        degrees = tuple(k - c for k, c in zip(d, counts)) + (0,) * len(free)
        value = dr_integral(weights, degrees)
        total += value if (spec.m - len(free)) % 2 == 0 else -value
    return total
