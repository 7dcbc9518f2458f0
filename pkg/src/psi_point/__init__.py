"""Exact psi-class intersection numbers from double ramification kernels."""
from .algebra import (
    LinearForm,
    Rational,
    TruncatedSeries,
    coefficient,
    exp_cube,
    rational,
    s_of_form,
    series_div_linear,
    series_exp,
    series_invert_unit,
    series_mul,
    series_mul_linear,
)
from .dr import ForgottenSpec, dr_integral, dr_integral_poly, dr_series, forgotten_integral_direct, forgotten_series
from .errors import (
    DegenerateA,
    InvariantError,
    NonExactDivision,
    OracleNotValidated,
    PsiPointError,
    SingularGrid,
)
from .kernel import APolynomial, PnSymbolic, pn_eval, pn_restrict, pn_series, pn_symbolic, set_parallelism
from .npoint import (
    cn_identity_check,
    gaussian_transform,
    intersection_number,
    intersection_table,
    npoint_series,
    npoint_via_dr,
    one_point_closed,
    two_point_closed,
)
from .oracle import dvv_number, oracle_selfcheck

__version__ = "0.1.0"


def clear_caches() -> None:
    """Drop every memoized kernel, series and oracle value."""
    from . import dr, kernel, npoint, oracle

    kernel._pn_eval_cached.cache_clear()
    kernel._symbolic_cache.clear()
    npoint.npoint_series.cache_clear()
    dr._dr_series.cache_clear()
    oracle.default_oracle.clear()
