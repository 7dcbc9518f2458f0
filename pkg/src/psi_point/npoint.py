"""The n-point function of psi-class intersection numbers.

``F(x_1..x_n) = sum_g sum_d <tau_d1 ... tau_dn>_g x^d`` is obtained from the
kernel ``P_n`` by a Gaussian moment substitution in ``a``, multiplication by
``exp(X^3/24)`` and one exact division by ``X = x_1 + ... + x_n``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from gmpy2 import mpq

from .algebra import (
    LinearForm,
    Rational,
    TruncatedSeries,
    double_factorial,
    exp_cube,
    series_div_linear,
    series_exp,
)
from .errors import InvariantError
from .kernel import PnSymbolic, pn_symbolic

__all__ = [
    "source_order",
    "gaussian_transform",
    "npoint_series",
    "intersection_number",
    "intersection_table",
    "IntersectionTable",
    "one_point_closed",
    "two_point_closed",
    "cn_identity_check",
    "CnReport",
    "npoint_via_dr",
    "genus_of",
]

_ZERO = mpq(0)


def genus_of(d: Sequence[int]) -> int | None:
    """Genus forced by the dimension constraint ``sum d = 3g - 3 + n``, if any."""
    n = len(d)
    total = sum(d) - n + 3
    if total < 0 or total % 3:
        return None
    g = total // 3
    if 2 * g - 2 + n <= 0:
        return None
    return g


def source_order(n: int, order: int) -> int:
    """Largest kernel x-degree that can reach transformed degree ``order``."""
    return (2 * order + n - 2) // 3


def gaussian_transform(p: PnSymbolic, order: int | None = None) -> TruncatedSeries:
    """Replace ``a^k`` by ``(-1)^{|k|/2} prod (k_i - 1)!! x_i^{k_i/2}`` (even ``k``), else 0.

    A source term of x-degree ``D`` and a-degree ``h`` lands in degree
    ``D + h/2``; the result is truncated at ``order``, which may not exceed
    what ``p.order`` supports.
    """
    n = p.n_x
    # exact below the lowest degree the first missing layer (D = order + 1) can reach
    missing_h = p.order + 3 - p.n
    supported = p.order + (missing_h + 1) // 2 if missing_h >= 0 else p.order
    if order is None:
        order = supported
    if order > supported:
        raise ValueError(f"kernel of order {p.order} supports the transform only through {supported}")
    terms: dict = {}
    for e, poly in p.coeffs.items():
        for k, c in poly.terms.items():
            if any(v % 2 for v in k):
                continue
            h = sum(k)
            if sum(e) + h // 2 > order:
                continue
            w = c if (h // 2) % 2 == 0 else -c
            for v in k:
                w *= double_factorial(v - 1)
            f = tuple(ei + ki // 2 for ei, ki in zip(e, k))
            terms[f] = terms.get(f, _ZERO) + w
    return TruncatedSeries._raw(n, order, terms)


@lru_cache(maxsize=None)
def npoint_series(n: int, order: int) -> TruncatedSeries:
    """``F(x_1..x_n)`` truncated at total degree ``order``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if order < 0:
        raise ValueError("order must be non-negative")
    if n == 1:
        return one_point_closed(order)
    top = order + 1
    kernel = pn_symbolic(n, source_order(n, top), parity="even")
    numerator = exp_cube(n, top) * gaussian_transform(kernel, top)
    if n == 2:
        numerator = numerator - 1
    return series_div_linear(numerator, LinearForm.total(n))


def intersection_number(g: int, d: Sequence[int]) -> Rational:
    """``<tau_d1 ... tau_dn>_g`` read off the n-point function."""
    d = tuple(int(k) for k in d)
    n = len(d)
    if n == 0 or g < 0 or min(d) < 0:
        raise ValueError(f"invalid bracket g={g}, d={d}")
    if 2 * g - 2 + n <= 0 or sum(d) != 3 * g - 3 + n:
        return _ZERO
    return npoint_series(n, sum(d)).coefficient(d)


@dataclass
class IntersectionTable:
    """``(g, sorted d) -> value`` with a provenance tag per entry."""

    entries: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def add(self, g: int, d: Sequence[int], value: Rational, tag: str) -> None:
        key = (g, tuple(sorted(d)))
        if sum(d) != 3 * g - 3 + len(d):
            raise ValueError(f"({g}, {tuple(d)}) violates the dimension constraint")
        old = self.entries.get(key)
        if old is not None and old != value:
            raise InvariantError(f"conflicting values for {key}: {old} ({self.provenance[key]}) vs {value} ({tag})")
        self.entries[key] = value
        self.provenance.setdefault(key, tag)

    def __getitem__(self, key):
        g, d = key
        return self.entries[(g, tuple(sorted(d)))]

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return sorted(self.entries.items())


def intersection_table(n: int, order: int) -> IntersectionTable:
    """Every nonzero coefficient of ``F`` through ``order`` (kernel route)."""
    table = IntersectionTable()
    for e, c in npoint_series(n, order):
        g = genus_of(e)
        if g is None:
            raise InvariantError(f"coefficient of x^{e} is {c} but violates the dimension constraint")
        table.add(g, e, c, "theorem-route")
    return table


# --- closed forms -----------------------------------------------------------


def one_point_closed(order: int) -> TruncatedSeries:
    """``(exp(x^3/24) - 1) / x^2``."""
    x = LinearForm.of(1)
    numerator = exp_cube(1, order + 2) - 1
    return series_div_linear(series_div_linear(numerator, x), x)


def two_point_closed(order: int) -> TruncatedSeries:
    """``exp((x1^3 + x2^3)/24) / (x1+x2) * sum_k k!/(2k+1)! (x1 x2 (x1+x2)/2)^k - 1/(x1+x2)``."""
    top = order + 1
    cubes = TruncatedSeries(2, top, {(3, 0): mpq(1, 24), (0, 3): mpq(1, 24)})
    base = TruncatedSeries(2, top, {(2, 1): mpq(1, 2), (1, 2): mpq(1, 2)})
    total = TruncatedSeries.one(2, top)
    power = TruncatedSeries.one(2, top)
    for k in range(1, top // 3 + 1):
        power = power * base
        total = total + power * mpq(math.factorial(k), math.factorial(2 * k + 1))
    numerator = series_exp(cubes) * total - 1
    return series_div_linear(numerator, LinearForm.total(2))


@dataclass
class CnReport:
    checked: list
    failures: list

    @property
    def ok(self) -> bool:
        return not self.failures


def cn_identity_check(K: int) -> CnReport:
    """Check ``sum_{m1+m2=k} (-1)^m2 / (m1! m2! (2 m2 + 1)) = 2^k / (2k+1)!!`` for ``k <= K``."""
    if K < 1:
        raise ValueError("K must be at least 1")
    checked, failures = [], []
    for k in range(K + 1):
        lhs = sum(
            (mpq((-1) ** m2, math.factorial(k - m2) * math.factorial(m2) * (2 * m2 + 1)) for m2 in range(k + 1)),
            _ZERO,
        )
        rhs = mpq(2 ** k, double_factorial(2 * k + 1))
        checked.append((k, lhs, rhs))
        if lhs != rhs:
            failures.append((k, lhs, rhs))
    return CnReport(checked, failures)


# --- the double-ramification route -------------------------------------------


def npoint_via_dr(g: int, n: int, a: Sequence[int], b: Sequence[int]) -> TruncatedSeries:
    """Homogeneous part of ``F_g(x_1..x_n)`` of degree ``3g - 3 + n``, via DR cycles.

    Uses the push-forward of ``DR_g(a_1..a_n, -A-B, b_1..b_g)`` along the map
    forgetting the ``b`` points: its lowest-degree part (degree
    ``3g - 2 + n``) equals ``g! prod b_j^2 X F_g``.
    """
    from .dr import ForgottenSpec, forgotten_series

    if n < 3:
        raise ValueError("the push-forward identity needs n >= 3")
    a = [int(v) for v in a]
    b = [int(v) for v in b]
    if len(a) != n or len(b) != g:
        raise ValueError(f"need {n} kept weights and {g} forgotten weights")
    if any(v == 0 for v in b):
        raise ValueError("forgotten weights must be nonzero")
    A, B = sum(a), sum(b)
    low = 3 * g - 2 + n
    spec = ForgottenSpec(tuple(a) + (-A - B,), tuple(b))
    series = forgotten_series(spec, low).restrict(n)
    for e, c in series:
        if sum(e) < low:
            raise InvariantError(f"push-forward series has coefficient {c} at x^{e}, below degree {low}")
    norm = math.factorial(g)
    for v in b:
        norm *= v * v
    top = series.homogeneous_part(low) * mpq(1, norm)
    quotient = series_div_linear(top, LinearForm.total(n))
    return quotient.homogeneous_part(low - 1).truncate(low - 1)
