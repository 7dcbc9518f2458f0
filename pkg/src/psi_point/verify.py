"""Cross-checks between the independent routes.

Each ``check_*`` function returns a :class:`CheckResult`; :func:`run_suite`
bundles them into the ``quick`` and ``full`` levels used by ``selftest``.
"""
from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from gmpy2 import mpq

from .algebra import LinearForm, TruncatedSeries, s_of_form, series_div_linear, series_mul_linear
from .dr import ForgottenSpec, dr_genus, dr_integral_poly, forgotten_integral_direct, forgotten_series
from .errors import PsiPointError
from .kernel import pn_eval, pn_symbolic
from .npoint import (
    cn_identity_check,
    genus_of,
    intersection_number,
    npoint_series,
    npoint_via_dr,
    one_point_closed,
    two_point_closed,
)
from .oracle import dvv_number, oracle_selfcheck

__all__ = [
    "CheckResult",
    "check_one_point",
    "check_two_point",
    "check_oracle_agreement",
    "check_string_equation",
    "check_kernel_invariants",
    "check_dr_route",
    "check_forgotten_equivalence",
    "check_dr_polynomiality",
    "check_cn",
    "random_a_vectors",
    "forgotten_specs",
    "run_suite",
]


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0
    failures: list = field(default_factory=list)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name} ({self.seconds:.2f}s) {self.detail}".rstrip()


def _timed(name: str, body: Callable[[list], str]) -> CheckResult:
    failures: list = []
    start = time.perf_counter()
    try:
        detail = body(failures)
    except PsiPointError as exc:
        failures.append(f"{type(exc).__name__}: {exc}")
        detail = "raised"
    return CheckResult(name, not failures, detail, time.perf_counter() - start, failures)


def check_one_point(order: int = 13) -> CheckResult:
    def body(failures):
        got, want = npoint_series(1, order), one_point_closed(order)
        if got != want:
            failures.append((str(got), str(want)))
        for e, v in (((1,), mpq(1, 24)), ((4,), mpq(1, 1152)), ((7,), mpq(1, 82944))):
            if got.coefficient(e) != v:
                failures.append((e, got.coefficient(e), v))
        return f"through x^{order}"

    return _timed("one-point function", body)


def check_two_point(order: int = 12) -> CheckResult:
    def body(failures):
        got, want = npoint_series(2, order), two_point_closed(order)
        if got != want:
            failures.append("series differ")
        for e in ((2, 0), (1, 1), (0, 2)):
            if got.coefficient(e) != mpq(1, 24):
                failures.append((e, got.coefficient(e)))
        return f"through total degree {order}"

    return _timed("two-point function", body)


def check_oracle_agreement(n: int, g_max: int) -> CheckResult:
    def body(failures):
        report = oracle_selfcheck()
        if not report.ok:
            failures.extend(report.mismatches)
            return "oracle self-check failed"
        count = 0
        for g in range(g_max + 1):
            total = 3 * g - 3 + n
            if total < 0 or 2 * g - 2 + n <= 0:
                continue
            for d in itertools.product(range(total + 1), repeat=n):
                if sum(d) != total:
                    continue
                count += 1
                got, want = intersection_number(g, d), dvv_number(g, d)
                if got != want:
                    failures.append((g, d, got, want))
        return f"{count} brackets"

    return _timed(f"oracle agreement n={n} g<={g_max}", body)


def check_string_equation(n: int, order: int) -> CheckResult:
    """``F(x_1..x_n)|_{x_n=0} = (x_1 + .. + x_{n-1}) F(x_1..x_{n-1}) + delta_{n,3}``."""

    def body(failures):
        lhs = npoint_series(n, order).restrict(n - 1)
        rhs = series_mul_linear(npoint_series(n - 1, order - 1), LinearForm.total(n - 1))
        if n == 3:
            rhs = rhs + 1
        if lhs != rhs:
            diff = lhs - rhs
            failures.append(str(diff)[:200])
        return f"through order {order}"

    return _timed(f"string equation n={n}", body)


def random_a_vectors(n: int, count: int, seed: int = 0, bound: int = 9, balanced: bool = False) -> list[tuple[int, ...]]:
    """Deterministic random integer vectors; ``balanced`` forces ``sum(a) = 0``."""
    rng = random.Random(seed * 1000 + n + (500 if balanced else 0))
    choices = [v for v in range(-bound, bound + 1) if v]
    out = []
    while len(out) < count:
        a = [rng.choice(choices) for _ in range(n)]
        if balanced:
            a[-1] = -sum(a[:-1])
        a = tuple(a)
        if a not in out:
            out.append(a)
    return out


def check_kernel_invariants(n: int, vectors: Sequence[Sequence[int]], order: int) -> CheckResult:
    """Symmetry, divisibility by X, restriction to ``x_n = 0`` and homogeneity of ``P_n``.

    Divisibility by ``X`` is only checked for balanced vectors (``sum(a) = 0``);
    it fails otherwise, e.g. for ``a = (1, 1, 1)``.
    """

    def body(failures):
        X = LinearForm.total(n)
        for a in vectors:
            p = pn_eval(a, order)
            for rho in itertools.permutations(range(n)):
                moved = tuple(a[rho[i]] for i in range(n))
                if pn_eval(moved, order).permute(rho) != p:
                    failures.append(("symmetry", a, rho))
            try:
                if sum(a) != 0:
                    pass
                elif n >= 3:
                    series_div_linear(p, X)
                else:
                    series_div_linear(p - s_of_form(X, order), X)
            except PsiPointError as exc:
                failures.append(("divisibility", a, str(exc)))
            last = mpq(a[-1])
            Y = LinearForm.total(n - 1)
            factor = series_mul_linear(s_of_form(Y.scale(last), order), Y)
            if n == 2:
                want = s_of_form(Y.scale(last), order)
            else:
                want = (factor * pn_eval(a[:-1], order)).truncate(order)
            if p.restrict(n - 1) != want:
                failures.append(("restriction", a))
            halved = pn_eval([mpq(v, 2) for v in a], order).scale_variables(2)
            if halved != p * 2 ** (n - 2):
                failures.append(("homogeneity", a))
        symbolic = pn_symbolic(n, order)
        try:
            symbolic.check_homogeneity()
        except PsiPointError as exc:
            failures.append(("a-degree", str(exc)))
        return f"{len(vectors)} vectors through order {order}"

    return _timed(f"kernel invariants n={n}", body)


def check_dr_route(g: int, n: int) -> CheckResult:
    """Two (a, b) draws give the same ``F_g`` part, equal to the kernel route."""

    def body(failures):
        first = npoint_via_dr(g, n, list(range(1, n + 1)), list(range(1, g + 1)))
        second = npoint_via_dr(g, n, list(range(2, n + 2)), list(range(g, 0, -1)))
        degree = 3 * g - 3 + n
        direct = npoint_series(n, degree).homogeneous_part(degree)
        if first != second:
            failures.append("draws differ")
        if first != direct:
            failures.append("differs from kernel route")
        return f"degree {degree}"

    return _timed(f"DR route g={g} n={n}", body)


def forgotten_specs() -> list[ForgottenSpec]:
    """Deterministic specs with one or two forgotten points (one degenerate)."""
    return [
        ForgottenSpec((1, 1, -2), (0,)),
        ForgottenSpec((1, 2, -4), (1,)),
        ForgottenSpec((2, -1, -3), (2,)),
        ForgottenSpec((3, 1, 1), (-5,)),
        ForgottenSpec((-2, 5, 1), (-4,)),
        ForgottenSpec((1, 1, 1, -5), (2,)),
        ForgottenSpec((1, 2, -4), (-1, 2)),
        ForgottenSpec((2, 2, -1), (-2, -1)),
        ForgottenSpec((-1, -1, 0), (1, 1)),
        ForgottenSpec((3, -1, 1), (-1, -2)),
        ForgottenSpec((1, 1, 1), (-1, -2)),
    ]


def check_forgotten_equivalence(specs: Sequence[ForgottenSpec], max_degree: int = 6) -> CheckResult:
    def body(failures):
        count = nonzero = 0
        for spec in specs:
            series = forgotten_series(spec, max_degree)
            for degree in range(max_degree + 1):
                for d in itertools.product(range(degree + 1), repeat=spec.n):
                    if sum(d) != degree:
                        continue
                    got = series.coefficient(d)
                    if (degree - spec.n - spec.m + 3) % 2 or degree - spec.n - spec.m + 3 < 0:
                        if got:
                            failures.append((spec, d, "nonzero off-parity", got))
                        continue
                    want = forgotten_integral_direct(spec, d)
                    count += 1
                    nonzero += bool(want)
                    if got != want:
                        failures.append((spec, d, got, want))
        return f"{len(specs)} specs, {count} coefficients ({nonzero} nonzero)"

    return _timed("forgotten-points equivalence", body)


def check_dr_polynomiality(n_max: int = 3, degree_max: int = 5) -> CheckResult:
    def body(failures):
        count = 0
        for n in range(2, n_max + 1):
            for degree in range(degree_max + 1):
                for d in itertools.product(range(degree + 1), repeat=n):
                    if sum(d) != degree or dr_genus(n, degree) is None:
                        continue
                    dr_integral_poly(n, d)  # raises on a held-out mismatch
                    count += 1
        expected = dr_integral_poly(2, (1, 0))
        if str(expected) != "1/24*a1^2 - 1/24":
            failures.append(("n=2 d=(1,0)", str(expected)))
        return f"{count} exponent vectors"

    return _timed(f"DR polynomiality n<={n_max} sum(d)<={degree_max}", body)


def check_cn(K: int = 20) -> CheckResult:
    def body(failures):
        report = cn_identity_check(K)
        failures.extend(report.failures)
        return f"k <= {K}"

    return _timed("C_k identity", body)


def run_suite(level: str = "quick") -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"unknown level {level!r}")
    results = [check_cn(20), check_one_point(13), check_two_point(12 if level == "full" else 8)]
    if level == "quick":
        results += [
            check_oracle_agreement(3, 2),
            check_string_equation(3, 6),
            check_kernel_invariants(3, random_a_vectors(3, 2) + random_a_vectors(3, 2, balanced=True), 4),
            check_dr_route(1, 3),
            check_forgotten_equivalence(forgotten_specs()[:4], 5),
            check_dr_polynomiality(2, 5),
        ]
    else:
        results += [
            check_oracle_agreement(3, 3),
            check_oracle_agreement(4, 2),
        ]
        results += [check_string_equation(n, 9) for n in (2, 3, 4)]
        results += [check_kernel_invariants(n, random_a_vectors(n, 3) + random_a_vectors(n, 3, balanced=True), 6) for n in (2, 3, 4)]
        results += [check_dr_route(g, n) for g, n in ((0, 3), (1, 3), (2, 3), (1, 4))]
        results += [check_forgotten_equivalence(forgotten_specs(), 6), check_dr_polynomiality(3, 5)]
    return results
