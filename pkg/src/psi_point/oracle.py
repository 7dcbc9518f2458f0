"""Independent intersection numbers from the DVV (Virasoro) recursion.

The recursion is not derived here, so it is quarantined: :func:`dvv_number`
refuses to answer until :func:`oracle_selfcheck` has compared it with the
closed one- and two-point functions and with the string and dilaton
equations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .algebra import Rational, double_factorial
from .errors import OracleNotValidated

__all__ = ["OracleTable", "dvv_number", "oracle_selfcheck", "SelfCheckReport", "default_oracle"]

_ZERO = mpq(0)


def _stable(g: int, d: Sequence[int]) -> bool:
    n = len(d)
    return g >= 0 and 2 * g - 2 + n > 0 and min(d, default=0) >= 0 and sum(d) == 3 * g - 3 + n


@dataclass
class OracleTable:
    memo: dict = field(default_factory=dict)
    validated: bool = False

    def clear(self) -> None:
        self.memo.clear()

    def number(self, g: int, d: Sequence[int]) -> Rational:
        if not self.validated:
            raise OracleNotValidated("run oracle_selfcheck() before using dvv_number")
        return self.raw(g, d)

    def raw(self, g: int, d: Sequence[int]) -> Rational:
        """The recursion without the validation guard."""
        d = tuple(sorted(int(k) for k in d))
        if not _stable(g, d):
            return _ZERO
        key = (g, d)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._compute(g, d)
            self.memo[key] = hit
        return hit

    def _compute(self, g: int, d: tuple) -> Rational:
        if g == 0 and d == (0, 0, 0):
            return mpq(1)
        if g == 1 and d == (1,):
            return mpq(1, 24)
        # recurse on the largest insertion tau_{k+1}
        k = d[-1] - 1
        rest = d[:-1]
        total = _ZERO
        for j, dj in enumerate(rest):
            if dj + k < 0:
                continue
            coeff = mpq(double_factorial(2 * k + 2 * dj + 1), double_factorial(2 * dj - 1))
            others = rest[:j] + rest[j + 1:]
            total += coeff * self.raw(g, others + (dj + k,))
        half = _ZERO
        for p in range(k):
            q = k - 1 - p
            w = double_factorial(2 * p + 1) * double_factorial(2 * q + 1)
            inner = self.raw(g - 1, rest + (p, q))
            idx = range(len(rest))
            for size in range(len(rest) + 1):
                for left in itertools.combinations(idx, size):
                    right = [i for i in idx if i not in left]
                    dl = tuple(rest[i] for i in left) + (p,)
                    dr = tuple(rest[i] for i in right) + (q,)
                    for g1 in range(g + 1):
                        v1 = self.raw(g1, dl)
                        if v1:
                            inner += v1 * self.raw(g - g1, dr)
            half += w * inner
        total += half / 2
        return total / double_factorial(2 * k + 3)


default_oracle = OracleTable()


def dvv_number(g: int, d: Sequence[int], table: OracleTable | None = None) -> Rational:
    """``<tau_d1 ... tau_dn>_g`` from the recursion (0 outside the stable range)."""
    return (table or default_oracle).number(g, d)


@dataclass
class SelfCheckReport:
    checked: int = 0
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _string_dilaton_instances() -> list[tuple[int, tuple]]:
    cases = []
    for g in range(3):
        for n in range(1, 5):
            total = 3 * g - 3 + n
            if total < 0 or 2 * g - 2 + n <= 0:
                continue
            for d in itertools.combinations_with_replacement(range(total + 1), n):
                if sum(d) == total:
                    cases.append((g, d))
    return cases[:20]


def oracle_selfcheck(table: OracleTable | None = None) -> SelfCheckReport:
    """Validate the recursion and mark ``table`` usable on success.

    Compares against every coefficient of the closed one-point function
    through ``x^13`` and the closed two-point function through total degree
    12, then checks the string and dilaton equations on 20 deterministic
    brackets (each of which gains a ``tau_0`` or ``tau_1``).
    """
    from .npoint import genus_of, one_point_closed, two_point_closed

    table = table or default_oracle
    report = SelfCheckReport()

    def check(label, got, want):
        report.checked += 1
        if got != want:
            report.mismatches.append((label, got, want))

    for series in (one_point_closed(13), two_point_closed(12)):
        for degree in range(series.order + 1):
            for e in itertools.product(range(degree + 1), repeat=series.n_vars):
                if sum(e) != degree:
                    continue
                g = genus_of(e)
                want = series.coefficient(e)
                got = table.raw(g, e) if g is not None else _ZERO
                check(("closed-form", e), got, want)

    for g, d in _string_dilaton_instances():
        n = len(d)
        string_rhs = sum(
            (table.raw(g, d[:j] + (d[j] - 1,) + d[j + 1:]) for j in range(n) if d[j] > 0), _ZERO
        )
        check(("string", g, d), table.raw(g, (0,) + d), string_rhs)
        check(("dilaton", g, d), table.raw(g, (1,) + d), (2 * g - 2 + n) * table.raw(g, d))

    table.validated = report.ok
    return report
