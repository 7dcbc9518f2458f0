"""Exact truncated multivariate power series over the rationals.

A :class:`TruncatedSeries` in ``x_1..x_n`` stores its nonzero coefficients in
a dict keyed by exponent tuples, and remembers the total degree ``order``
through which it is known.  Products, quotients and inverses never claim
more precision than their inputs carry.

Scalars are ``gmpy2.mpq``; :func:`rational` converts ints, strings,
``fractions.Fraction`` and ``mpq`` alike.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from operator import add
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence, Tuple, Union

from gmpy2 import mpq

from .errors import NonExactDivision

__all__ = [
    "Rational",
    "rational",
    "ExponentVector",
    "LinearForm",
    "TruncatedSeries",
    "series_mul",
    "series_div_linear",
    "series_invert_unit",
    "series_mul_linear",
    "series_exp",
    "s_of_form",
    "s_coefficient",
    "exp_cube",
    "coefficient",
    "monomials",
    "double_factorial",
]

Rational = type(mpq(0))
ExponentVector = Tuple[int, ...]
Number = Union[int, Fraction, str, "mpq"]

_ZERO = mpq(0)
_ONE = mpq(1)


def rational(value: Number) -> Rational:
    """Convert ``value`` to an exact rational; floats are rejected."""
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use an int, str or Fraction")
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    return mpq(value)


def double_factorial(k: int) -> int:
    """``k!!`` with the convention ``(-1)!! = 0!! = 1``."""
    if k < -1:
        raise ValueError(f"double factorial undefined for {k}")
    out = 1
    while k > 1:
        out *= k
        k -= 2
    return out


def monomials(n_vars: int, degree: int) -> Iterator[ExponentVector]:
    """All exponent vectors of length ``n_vars`` with total degree ``degree``."""
    if n_vars == 1:
        yield (degree,)
        return
    for first in range(degree, -1, -1):
        for rest in monomials(n_vars - 1, degree - first):
            yield (first,) + rest


@dataclass(frozen=True)
class LinearForm:
    """The form ``sum_i c_i x_i``."""

    coefficients: Tuple[Rational, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(rational(c) for c in self.coefficients))

    @classmethod
    def of(cls, *coefficients: Number) -> "LinearForm":
        return cls(tuple(coefficients))

    @classmethod
    def total(cls, n_vars: int) -> "LinearForm":
        """``X = x_1 + ... + x_n``."""
        return cls((1,) * n_vars)

    @property
    def n_vars(self) -> int:
        return len(self.coefficients)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def pivot(self) -> int:
        """Lowest index with a nonzero coefficient."""
        for i, c in enumerate(self.coefficients):
            if c:
                return i
        raise ZeroDivisionError("zero linear form has no pivot")

    def support(self) -> list[tuple[int, Rational]]:
        return [(i, c) for i, c in enumerate(self.coefficients) if c]

    def __neg__(self) -> "LinearForm":
        return LinearForm(tuple(-c for c in self.coefficients))

    def __add__(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(tuple(map(add, self.coefficients, other.coefficients)))

    def __sub__(self, other: "LinearForm") -> "LinearForm":
        return self + (-other)

    def scale(self, c: Number) -> "LinearForm":
        c = rational(c)
        return LinearForm(tuple(c * v for v in self.coefficients))

    def to_series(self, order: int) -> "TruncatedSeries":
        n = self.n_vars
        terms = {}
        if order >= 1:
            for i, c in self.support():
                e = [0] * n
                e[i] = 1
                terms[tuple(e)] = c
        return TruncatedSeries._raw(n, order, terms)


# --- homogeneous polynomial kernels (dicts exponent -> mpq) -----------------


def _mul_linear(poly: Mapping[ExponentVector, Rational], form: Sequence[tuple[int, Rational]]) -> dict:
    """``poly * form`` where ``form`` is the support list of a linear form."""
    out: dict = {}
    get = out.get
    for e, c in poly.items():
        for i, li in form:
            f = list(e)
            f[i] += 1
            f = tuple(f)
            out[f] = get(f, _ZERO) + li * c
    return {k: v for k, v in out.items() if v}


def _linear_powers(form: LinearForm, top: int) -> list[dict]:
    """``[L^0, L^1, ..., L^top]`` as homogeneous dicts."""
    n = form.n_vars
    support = form.support()
    powers = [{(0,) * n: _ONE}]
    for _ in range(top):
        powers.append(_mul_linear(powers[-1], support) if support else {})
    return powers


def _mul_dicts(p1: Mapping, p2: Mapping, max_degree: int | None = None) -> dict:
    out: dict = {}
    get = out.get
    for e1, c1 in p1.items():
        for e2, c2 in p2.items():
            f = tuple(map(add, e1, e2))
            if max_degree is not None and sum(f) > max_degree:
                continue
            out[f] = get(f, _ZERO) + c1 * c2
    return out


class TruncatedSeries:
    """Polynomial in ``x_1..x_n`` known through total degree ``order``.

    Instances are immutable; every arithmetic operation returns a new series
    truncated at the smaller of the operand orders.
    """

    __slots__ = ("_n", "_order", "_terms", "_graded")

    def __init__(self, n_vars: int, order: int, terms: Mapping[Iterable[int], Number] | None = None):
        if n_vars < 1:
            raise ValueError("n_vars must be positive")
        if order < 0:
            raise ValueError("truncation order must be non-negative")
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(k) for k in e)
            if len(e) != n_vars or min(e) < 0:
                raise ValueError(f"bad exponent vector {e} for {n_vars} variables")
            c = rational(c)
            if c and sum(e) <= order:
                clean[e] = clean.get(e, _ZERO) + c
        self._n = n_vars
        self._order = order
        self._terms = {e: c for e, c in clean.items() if c}
        self._graded = None

    @classmethod
    def _raw(cls, n_vars: int, order: int, terms: dict) -> "TruncatedSeries":
        # caller guarantees: tuple keys of the right length, mpq values
        s = cls.__new__(cls)
        s._n = n_vars
        s._order = order
        s._terms = {e: c for e, c in terms.items() if c and sum(e) <= order}
        s._graded = None
        return s

    @classmethod
    def constant(cls, n_vars: int, order: int, value: Number = 1) -> "TruncatedSeries":
        return cls(n_vars, order, {(0,) * n_vars: value})

    @classmethod
    def one(cls, n_vars: int, order: int) -> "TruncatedSeries":
        return cls.constant(n_vars, order, 1)

    @classmethod
    def zero(cls, n_vars: int, order: int) -> "TruncatedSeries":
        return cls(n_vars, order)

    @classmethod
    def variable(cls, n_vars: int, index: int, order: int) -> "TruncatedSeries":
        e = [0] * n_vars
        e[index] = 1
        return cls(n_vars, order, {tuple(e): 1})

    # -- accessors ---------------------------------------------------------

    @property
    def n_vars(self) -> int:
        return self._n

    @property
    def order(self) -> int:
        return self._order

    @property
    def terms(self) -> Mapping[ExponentVector, Rational]:
        return MappingProxyType(self._terms)

    def graded(self) -> dict[int, dict[ExponentVector, Rational]]:
        """Terms bucketed by total degree."""
        if self._graded is None:
            g: dict = {}
            for e, c in self._terms.items():
                g.setdefault(sum(e), {})[e] = c
            self._graded = g
        return self._graded

    def coefficient(self, e: Sequence[int]) -> Rational:
        e = tuple(e)
        if len(e) != self._n:
            raise ValueError(f"exponent vector {e} has wrong length for {self._n} variables")
        if sum(e) > self._order:
            raise ValueError(f"degree {sum(e)} exceeds truncation order {self._order}")
        return self._terms.get(e, _ZERO)

    def homogeneous_part(self, degree: int) -> "TruncatedSeries":
        return TruncatedSeries._raw(self._n, self._order, dict(self.graded().get(degree, {})))

    def lowest_degree(self) -> int | None:
        g = self.graded()
        return min(g) if g else None

    def is_zero(self) -> bool:
        return not self._terms

    def __iter__(self) -> Iterator[tuple[ExponentVector, Rational]]:
        """Terms in graded order: by total degree, then reverse lexicographic."""
        for e in sorted(self._terms, key=lambda e: (sum(e), tuple(-k for k in e))):
            yield e, self._terms[e]

    def __len__(self) -> int:
        return len(self._terms)

    # -- structural operations --------------------------------------------

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self._order:
            raise ValueError(f"cannot raise truncation order {self._order} to {order}")
        return TruncatedSeries._raw(self._n, order, self._terms)

    def restrict(self, index: int) -> "TruncatedSeries":
        """Set ``x_index = 0`` and drop that variable (0-based index)."""
        if not 0 <= index < self._n:
            raise IndexError(index)
        if self._n == 1:
            raise ValueError("cannot drop the only variable")
        terms = {e[:index] + e[index + 1:]: c for e, c in self._terms.items() if e[index] == 0}
        return TruncatedSeries._raw(self._n - 1, self._order, terms)

    def permute(self, rho: Sequence[int]) -> "TruncatedSeries":
        """Rename variable ``x_i`` to ``x_{rho[i]}`` (0-based)."""
        if sorted(rho) != list(range(self._n)):
            raise ValueError(f"{rho} is not a permutation of range({self._n})")
        terms = {}
        for e, c in self._terms.items():
            f = [0] * self._n
            for i, k in enumerate(e):
                f[rho[i]] = k
            terms[tuple(f)] = c
        return TruncatedSeries._raw(self._n, self._order, terms)

    def scale_variables(self, factor: Number) -> "TruncatedSeries":
        """Substitute ``x -> factor * x``."""
        factor = rational(factor)
        return TruncatedSeries._raw(
            self._n, self._order, {e: c * factor ** sum(e) for e, c in self._terms.items()}
        )

    def map_coefficients(self, fn) -> "TruncatedSeries":
        return TruncatedSeries._raw(self._n, self._order, {e: rational(fn(c)) for e, c in self._terms.items()})

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other._n != self._n:
                raise ValueError(f"variable count mismatch: {self._n} vs {other._n}")
            return other
        return TruncatedSeries.constant(self._n, self._order, other)

    def __add__(self, other) -> "TruncatedSeries":
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, _ZERO) + c
        return TruncatedSeries._raw(self._n, min(self._order, other._order), out)

    __radd__ = __add__

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries._raw(self._n, self._order, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other) -> "TruncatedSeries":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "TruncatedSeries":
        return (-self) + other

    def __mul__(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        c = rational(other)
        return TruncatedSeries._raw(self._n, self._order, {e: c * v for e, v in self._terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "TruncatedSeries":
        if isinstance(other, LinearForm):
            return series_div_linear(self, other)
        return self * (_ONE / rational(other))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._n == other._n and self._order == other._order and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self._n, self._order, frozenset(self._terms.items())))

    def agrees_with(self, other: "TruncatedSeries", order: int | None = None) -> bool:
        """Coefficientwise equality through ``order`` (default: common order)."""
        if order is None:
            order = min(self._order, other._order)
        return self.truncate(order) == other.truncate(order)

    # -- display ------------------------------------------------------------

    def __repr__(self) -> str:
        return f"TruncatedSeries(n_vars={self._n}, order={self._order}, {self})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for e, c in self:
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def coefficient(s: TruncatedSeries, e: Sequence[int]) -> Rational:
    return s.coefficient(e)


def series_mul(s1: TruncatedSeries, s2: TruncatedSeries) -> TruncatedSeries:
    if s1.n_vars != s2.n_vars:
        raise ValueError(f"variable count mismatch: {s1.n_vars} vs {s2.n_vars}")
    order = min(s1.order, s2.order)
    g2 = s2.graded()
    out: dict = {}
    get = out.get
    for d1, block1 in s1.graded().items():
        if d1 > order:
            continue
        for d2, block2 in g2.items():
            if d1 + d2 > order:
                continue
            for e1, c1 in block1.items():
                for e2, c2 in block2.items():
                    f = tuple(map(add, e1, e2))
                    out[f] = get(f, _ZERO) + c1 * c2
    return TruncatedSeries._raw(s1.n_vars, order, out)


def series_div_linear(s: TruncatedSeries, form: LinearForm) -> TruncatedSeries:
    """Exact quotient ``s / form`` at order ``s.order - 1``.

    Synthetic division along the lowest-index variable with a nonzero
    coefficient; raises :class:`NonExactDivision` unless the remainder is 0.
    """
    if form.n_vars != s.n_vars:
        raise ValueError(f"variable count mismatch: {s.n_vars} vs {form.n_vars}")
    if form.is_zero():
        raise ZeroDivisionError("division by the zero linear form")
    if s.order < 1:
        raise ValueError("series of order 0 carries no information about a quotient")
    v = form.pivot()
    inv = _ONE / form.coefficients[v]
    others = [(u, c) for u, c in form.support() if u != v]
    quotient: dict = {}
    remainder: dict = {}
    for degree, block in sorted(s.graded().items()):
        if degree == 0:
            remainder.update(block)
            continue
        work = dict(block)
        buckets: dict[int, set] = {}
        for e in work:
            buckets.setdefault(e[v], set()).add(e)
        top = max(buckets)
        for k in range(top, 0, -1):
            for f in buckets.get(k, ()):
                val = work.pop(f)
                if not val:
                    continue
                e = list(f)
                e[v] -= 1
                q = val * inv
                quotient[tuple(e)] = q
                for u, lu in others:
                    e[u] += 1
                    g = tuple(e)
                    e[u] -= 1
                    if g in work:
                        work[g] -= lu * q
                    else:
                        work[g] = -lu * q
                        buckets.setdefault(k - 1, set()).add(g)
        remainder.update({e: c for e, c in work.items() if c})
    remainder = {e: c for e, c in remainder.items() if c}
    if remainder:
        sample = sorted(remainder.items())[:3]
        raise NonExactDivision(f"nonzero remainder dividing by {form}: {sample}")
    return TruncatedSeries._raw(s.n_vars, s.order - 1, quotient)


def series_mul_linear(s: TruncatedSeries, form: LinearForm) -> TruncatedSeries:
    """``form * s``, known one degree further than ``s``."""
    if form.n_vars != s.n_vars:
        raise ValueError(f"variable count mismatch: {s.n_vars} vs {form.n_vars}")
    return TruncatedSeries._raw(s.n_vars, s.order + 1, _mul_linear(s.terms, form.support()))


def series_invert_unit(s: TruncatedSeries) -> TruncatedSeries:
    """``1/s`` for a series with constant term 1, solved degree by degree."""
    n, order = s.n_vars, s.order
    if s.coefficient((0,) * n) != 1:
        raise ValueError("series_invert_unit needs constant term 1")
    sg = s.graded()
    inv: dict[int, dict] = {0: {(0,) * n: _ONE}}
    for d in range(1, order + 1):
        acc: dict = {}
        for k in range(1, d + 1):
            if k in sg and (d - k) in inv:
                for f, c in _mul_dicts(sg[k], inv[d - k]).items():
                    acc[f] = acc.get(f, _ZERO) - c
        inv[d] = {e: c for e, c in acc.items() if c}
    terms = {e: c for block in inv.values() for e, c in block.items()}
    return TruncatedSeries._raw(n, order, terms)


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    """``exp(s)`` for a series without constant term."""
    n, order = s.n_vars, s.order
    if s.coefficient((0,) * n):
        raise ValueError("series_exp needs zero constant term")
    low = s.lowest_degree()
    result = TruncatedSeries.one(n, order)
    if low is None:
        return result
    power = TruncatedSeries.one(n, order)
    k = 1
    while k * low <= order:
        power = series_mul(power, s) * mpq(1, k)
        result = result + power
        k += 1
    return result


def s_coefficient(i: int) -> Rational:
    """Coefficient of ``z^(2i)`` in ``S(z) = (e^(z/2) - e^(-z/2))/z``."""
    return mpq(1, 4 ** i * math.factorial(2 * i + 1))


def s_of_form(form: LinearForm, order: int) -> TruncatedSeries:
    """``S(L) = 1 + L^2/24 + L^4/1920 + ...`` truncated at ``order``."""
    n = form.n_vars
    powers = _linear_powers(form, order)
    terms: dict = {}
    for i in range(order // 2 + 1):
        c = s_coefficient(i)
        for e, v in powers[2 * i].items():
            terms[e] = terms.get(e, _ZERO) + c * v
    return TruncatedSeries._raw(n, order, terms)


def exp_cube(n_vars: int, order: int) -> TruncatedSeries:
    """``exp((x_1 + ... + x_n)^3 / 24)`` truncated at ``order``."""
    cube = {}
    for e, c in _linear_powers(LinearForm.total(n_vars), 3)[3].items():
        cube[e] = c / 24
    return series_exp(TruncatedSeries._raw(n_vars, order, cube))
