"""The permutation-sum kernel ``P_n(a; x)``.

For ``n >= 2``::

    P_n(a; x) = sum over sigma in S_n with sigma(1) = 1 of
        x'_2 ... x'_{n-1} * prod_k zeta(C_k) / prod_k D_k

with ``a'_i = a_sigma(i)``, ``x'_i = x_sigma(i)``, ``zeta(z) = e^(z/2) - e^(-z/2)``,
adjacent determinants ``D_k = a'_k x'_{k+1} - a'_{k+1} x'_k`` and cumulative
determinants ``C_k = (a'_1+..+a'_k) x'_{k+1} - a'_{k+1} (x'_1+..+x'_k)``.

Individual summands have poles along ``a_p x_q = a_q x_p``; only the sum is a
power series.  :func:`pn_eval` therefore puts every summand over the common
denominator ``prod_{p<q} (a_p x_q - a_q x_p)``, adds the numerators and divides
exactly.  The dependence on ``a`` is recovered by :func:`pn_symbolic`, which
interpolates each homogeneous layer from numeric evaluations.
"""
from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from gmpy2 import mpq

from .algebra import (
    ExponentVector,
    LinearForm,
    Number,
    Rational,
    TruncatedSeries,
    _linear_powers,
    _mul_linear,
    monomials,
    rational,
    series_div_linear,
)
from .errors import DegenerateA, InvariantError, SingularGrid

__all__ = [
    "APolynomial",
    "PermTerm",
    "PnSymbolic",
    "pair_form",
    "permutation_terms",
    "pn_eval",
    "pn_symbolic",
    "pn_restrict",
    "pn_series",
    "is_degenerate",
    "solve_exact",
    "set_parallelism",
    "GRID_RETRIES",
]

GRID_RETRIES = 8
_ZERO = mpq(0)
_ONE = mpq(1)
_workers = 1


def set_parallelism(workers: int) -> None:
    """Number of processes used for interpolation grids (0 means one per CPU)."""
    global _workers
    if workers < 0:
        raise ValueError("parallelism must be non-negative")
    _workers = workers or (os.cpu_count() or 1)


def get_parallelism() -> int:
    return _workers


# --- exact polynomials in a -------------------------------------------------


@dataclass(frozen=True)
class APolynomial:
    """Polynomial in ``a_1..a_n`` with exact coefficients."""

    n_vars: int
    terms: Mapping[ExponentVector, Rational] = field(default_factory=dict)

    def __post_init__(self) -> None:
        clean = {}
        for e, c in self.terms.items():
            e = tuple(e)
            if len(e) != self.n_vars:
                raise ValueError(f"exponent {e} does not have {self.n_vars} entries")
            c = rational(c)
            if c:
                clean[e] = c
        object.__setattr__(self, "terms", clean)

    @property
    def degree(self) -> int | None:
        return max((sum(e) for e in self.terms), default=None)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degrees = {sum(e) for e in self.terms}
        if degree is None:
            return len(degrees) <= 1
        return degrees <= {degree}

    def __call__(self, a: Sequence[Number]) -> Rational:
        return self.evaluate(a)

    def evaluate(self, a: Sequence[Number]) -> Rational:
        a = [rational(v) for v in a]
        total = _ZERO
        for e, c in self.terms.items():
            term = c
            for v, k in zip(a, e):
                if k:
                    term *= v ** k
            total += term
        return total

    def __eq__(self, other) -> bool:
        if not isinstance(other, APolynomial):
            return NotImplemented
        return self.n_vars == other.n_vars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n_vars, frozenset(self.terms.items())))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-k for k in e))):
            c = self.terms[e]
            mono = "*".join(f"a{i + 1}" if k == 1 else f"a{i + 1}^{k}" for i, k in enumerate(e) if k)
            parts.append(str(c) if not mono else (mono if c == 1 else f"{c}*{mono}"))
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class PnSymbolic:
    """Coefficients of ``P_n`` as polynomials in ``a``.

    ``coeffs`` maps an x-exponent vector of degree ``D`` to a homogeneous
    polynomial of degree ``D - n + 2``.  With ``parity="even"`` only the layers
    of even a-degree were computed, and :meth:`evaluate` refuses to run.
    ``n_x`` differs from ``n`` after x-variables have been restricted away.
    """

    n: int
    order: int
    coeffs: Mapping[ExponentVector, APolynomial]
    parity: str | None = None
    n_x: int | None = None

    def __post_init__(self) -> None:
        if self.n_x is None:
            object.__setattr__(self, "n_x", self.n)

    def coefficient(self, e: Sequence[int]) -> APolynomial:
        e = tuple(e)
        if sum(e) > self.order:
            raise ValueError(f"degree {sum(e)} exceeds order {self.order}")
        return self.coeffs.get(e, APolynomial(self.n))

    def layer(self, degree: int) -> dict[ExponentVector, APolynomial]:
        return {e: p for e, p in self.coeffs.items() if sum(e) == degree}

    def evaluate(self, a: Sequence[Number]) -> TruncatedSeries:
        if self.parity is not None:
            raise ValueError("only a subset of the layers was computed; cannot evaluate")
        if len(a) != self.n:
            raise ValueError(f"expected {self.n} values of a, got {len(a)}")
        a = [rational(v) for v in a]
        terms = {e: p.evaluate(a) for e, p in self.coeffs.items()}
        return TruncatedSeries._raw(self.n_x, self.order, terms)

    def truncate(self, order: int) -> "PnSymbolic":
        if order > self.order:
            raise ValueError("cannot raise the order")
        kept = {e: p for e, p in self.coeffs.items() if sum(e) <= order}
        return PnSymbolic(self.n, order, kept, self.parity, self.n_x)

    def check_homogeneity(self) -> None:
        for e, p in self.coeffs.items():
            h = sum(e) - self.n + 2
            if h < 0 or not p.is_homogeneous(h):
                raise InvariantError(f"coefficient of x^{e} is not homogeneous of a-degree {h}: {p}")


# --- the permutation sum -------------------------------------------------------


def is_degenerate(a: Sequence[Number]) -> bool:
    """True when two entries of ``a`` are both zero."""
    return sum(1 for v in a if rational(v) == 0) >= 2


def pair_form(a: Sequence[Rational], p: int, q: int) -> LinearForm:
    """``a_p x_q - a_q x_p`` (0-based indices)."""
    c = [_ZERO] * len(a)
    c[q] += a[p]
    c[p] -= a[q]
    return LinearForm(tuple(c))


@dataclass(frozen=True)
class PermTerm:
    """One summand of the permutation sum, normalized to canonical pairs."""

    sigma: tuple[int, ...]
    sign: int
    adjacent: tuple[LinearForm, ...]
    cumulative: tuple[LinearForm, ...]
    unused: tuple[tuple[int, int], ...]


def permutation_terms(a: Sequence[Number]) -> list[PermTerm]:
    a = [rational(v) for v in a]
    n = len(a)
    pairs = list(itertools.combinations(range(n), 2))
    out = []
    for tail in itertools.permutations(range(1, n)):
        sigma = (0,) + tail
        sign = 1
        used = set()
        adjacent = []
        cumulative = []
        acc_a = _ZERO
        for k in range(n - 1):
            p, q = sigma[k], sigma[k + 1]
            adjacent.append(pair_form(a, p, q))
            if p > q:
                sign = -sign
            used.add((min(p, q), max(p, q)))
            acc_a += a[p]
            c = [_ZERO] * n
            for j in sigma[: k + 1]:
                c[j] = -a[q]
            c[q] = acc_a
            cumulative.append(LinearForm(tuple(c)))
        assert len(used) == n - 1
        unused = tuple(pq for pq in pairs if pq not in used)
        out.append(PermTerm(sigma, sign, tuple(adjacent), tuple(cumulative), unused))
    return out


def _zeta_product(cumulative: Sequence[LinearForm], low: int, high: int) -> dict:
    """Terms of ``prod_k zeta(C_k)`` with total degree in ``[low, high]``.

    Expands ``prod_k (e^{C_k/2} - e^{-C_k/2})`` as a signed sum of
    ``exp(sum_k eps_k C_k / 2)``; the pair ``eps, -eps`` contributes equally
    in the surviving parity, so only ``eps_1 = +1`` is enumerated.
    """
    n_forms = len(cumulative)
    parity = n_forms % 2
    out: dict = {}
    if high < low:
        return out
    fact = [math.factorial(m) for m in range(high + 1)]
    for tail in itertools.product((1, -1), repeat=n_forms - 1):
        eps = (1,) + tail
        sgn = 1
        for s in eps:
            sgn *= s
        ell = cumulative[0].scale(mpq(1, 2))
        for s, form in zip(eps[1:], cumulative[1:]):
            ell = ell + form.scale(mpq(s, 2))
        powers = _linear_powers(ell, high)
        for m in range(low, high + 1):
            if m % 2 != parity:
                continue
            w = mpq(2 * sgn, fact[m])
            for e, c in powers[m].items():
                out[e] = out.get(e, _ZERO) + w * c
    return out


def pn_eval(a: Sequence[Number], order: int) -> TruncatedSeries:
    """``P_n(a; x)`` for numeric ``a``, truncated at total x-degree ``order``."""
    a = tuple(rational(v) for v in a)
    return _pn_eval_cached(a, order)


@lru_cache(maxsize=4096)
def _pn_eval_cached(a: tuple, order: int) -> TruncatedSeries:
    n = len(a)
    if n < 2:
        raise ValueError("P_1 = 1/x_1 is not a power series; n must be at least 2")
    if order < 0:
        raise ValueError("order must be non-negative")
    if is_degenerate(a):
        raise DegenerateA(f"a = {[str(v) for v in a]} has a pair of zero entries")
    n_pairs = n * (n - 1) // 2
    work = order + n_pairs
    # numerator = sum_sigma sign * x'_2..x'_{n-1} * prod(unused pair forms) * prod zeta(C_k)
    numerator: dict = {}
    for term in permutation_terms(a):
        prefix_degree = (n - 2) + len(term.unused)
        body = _zeta_product(term.cumulative, n - 1, work - prefix_degree)
        if not body:
            continue
        shifted = {}
        for e, c in body.items():
            f = list(e)
            for j in term.sigma[1 : n - 1]:
                f[j] += 1
            shifted[tuple(f)] = c if term.sign > 0 else -c
        for p, q in term.unused:
            shifted = _mul_linear(shifted, pair_form(a, p, q).support())
        for e, c in shifted.items():
            numerator[e] = numerator.get(e, _ZERO) + c
    series = TruncatedSeries._raw(n, work, numerator)
    for p, q in itertools.combinations(range(n), 2):
        series = series_div_linear(series, pair_form(a, p, q))
    return series


def pn_series(a: Sequence[Number], order: int) -> TruncatedSeries:
    """``P_n(a; x)`` for any ``a``, falling back to the symbolic form when degenerate."""
    a = [rational(v) for v in a]
    if is_degenerate(a):
        return pn_symbolic(len(a), order).evaluate(a)
    return pn_eval(a, order)


# --- interpolation -------------------------------------------------------------


def solve_exact(matrix: Sequence[Sequence[Rational]], rhs: Sequence[Sequence[Rational]]) -> list[list[Rational]] | None:
    """Solve ``matrix @ X = rhs`` by Gauss-Jordan elimination.

    ``rhs`` is a list of rows (one row per equation, one column per right-hand
    side).  Returns the rows of ``X``, or ``None`` when ``matrix`` is singular.
    """
    size = len(matrix)
    width = len(rhs[0]) if rhs else 0
    rows = [list(map(rational, matrix[i])) + list(map(rational, rhs[i])) for i in range(size)]
    for col in range(size):
        pivot = next((r for r in range(col, size) if rows[r][col]), None)
        if pivot is None:
            return None
        rows[col], rows[pivot] = rows[pivot], rows[col]
        inv = _ONE / rows[col][col]
        prow = [v * inv for v in rows[col]]
        rows[col] = prow
        for r in range(size):
            if r != col and rows[r][col]:
                f = rows[r][col]
                row = rows[r]
                rows[r] = [x - f * y if y else x for x, y in zip(row, prow)]
    return [row[size : size + width] for row in rows]


def _grid(n: int, h: int, attempt: int) -> list[tuple[ExponentVector, tuple]]:
    """Interpolation nodes for homogeneous degree-``h`` polynomials in ``n`` variables.

    Nodes ``(s, s + t*e_2, ..., s + t*e_n)`` with ``e`` running over the
    exponent vectors of total degree ``<= h`` in ``n-1`` variables; this set
    is unisolvent after dehomogenizing at ``a_1 = s``.
    """
    s = 1 + attempt
    t = 1 + attempt
    nodes = []
    for d in range(h + 1):
        for e in monomials(n - 1, d) if n > 1 else [()]:
            nodes.append((e, (mpq(s),) + tuple(mpq(s + t * k) for k in e)))
    return nodes


def _evaluate_all(points: list[tuple], order: int) -> list[TruncatedSeries]:
    workers = _workers
    if workers > 1 and len(points) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(points))) as pool:
            return list(pool.map(pn_eval, points, itertools.repeat(order)))
    return [pn_eval(p, order) for p in points]


_symbolic_cache: dict[tuple[int, str | None], PnSymbolic] = {}


def pn_symbolic(n: int, order: int, parity: str | None = None) -> PnSymbolic:
    """Recover every coefficient of ``P_n`` through ``order`` as a polynomial in ``a``.

    ``parity="even"`` restricts the work to layers of even a-degree, which are
    the only ones the Gaussian transform can see.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if parity not in (None, "even"):
        raise ValueError(f"unknown parity {parity!r}")
    for key in ((n, parity), (n, None)):
        cached = _symbolic_cache.get(key)
        if cached is not None and cached.order >= order:
            out = cached.truncate(order)
            if parity != out.parity:
                out = PnSymbolic(n, order, {e: p for e, p in out.coeffs.items()
                                            if (sum(e) - n) % 2 == 0}, parity)
            return out
    result = _pn_symbolic(n, order, parity)
    _symbolic_cache[(n, parity)] = result
    return result


def _pn_symbolic(n: int, order: int, parity: str | None) -> PnSymbolic:
    heights = [D - n + 2 for D in range(max(n - 2, 0), order + 1)]
    if parity == "even":
        heights = [h for h in heights if h % 2 == 0]
    coeffs: dict[ExponentVector, APolynomial] = {}
    if not heights:
        return PnSymbolic(n, order, coeffs, parity)
    h_max = max(heights)
    for attempt in range(GRID_RETRIES):
        nodes = _grid(n, h_max, attempt)
        values = _evaluate_all([pt for _, pt in nodes], h_max + n - 2)
        solved = {}
        for h in heights:
            D = h + n - 2
            m = math.comb(h + n - 1, n - 1)
            layer_nodes = [(pt, val) for (e, pt), val in zip(nodes, values) if sum(e) <= h]
            assert len(layer_nodes) == m
            a_monos = list(monomials(n, h))
            x_monos = list(monomials(n, D))
            matrix = [[_monomial_value(pt, k) for k in a_monos] for pt, _ in layer_nodes]
            rhs = [[val.coefficient(e) for e in x_monos] for _, val in layer_nodes]
            sol = solve_exact(matrix, rhs)
            if sol is None:
                break
            for j, e in enumerate(x_monos):
                poly = APolynomial(n, {k: sol[i][j] for i, k in enumerate(a_monos)})
                if poly.terms:
                    solved[e] = poly
        else:
            coeffs.update(solved)
            return PnSymbolic(n, order, coeffs, parity)
    raise SingularGrid(f"no nonsingular interpolation grid for n={n}, order={order} after {GRID_RETRIES} attempts")


def _monomial_value(point: Sequence[Rational], k: ExponentVector) -> Rational:
    out = _ONE
    for v, j in zip(point, k):
        if j:
            out *= v ** j
    return out


def pn_restrict(p, index: int):
    """Set ``x_index = 0`` (0-based) in a kernel series or symbolic kernel."""
    if isinstance(p, TruncatedSeries):
        if p.n_vars == 1:
            return TruncatedSeries._raw(1, p.order, {e: c for e, c in p.terms.items() if e[0] == 0})
        return p.restrict(index)
    if isinstance(p, PnSymbolic):
        kept = {e[:index] + e[index + 1:]: poly for e, poly in p.coeffs.items() if e[index] == 0}
        return PnSymbolic(p.n, p.order, kept, p.parity, p.n_x - 1)
    raise TypeError(f"cannot restrict {type(p).__name__}")


def grid_points(n: int, h: int) -> Iterable[tuple]:
    """The nodes used for a layer of a-degree ``h`` (first attempt)."""
    return [pt for _, pt in _grid(n, h, 0)]
