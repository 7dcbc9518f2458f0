"""Exception hierarchy.

Every failure that signals a broken mathematical invariant derives from
:class:`InvariantError`; the CLI maps those to exit code 2.
"""


class PsiPointError(Exception):
    pass


class InvariantError(PsiPointError):
    """An identity that must hold exactly did not."""


class NonExactDivision(InvariantError):
    pass


class DegenerateA(PsiPointError, ValueError):
    """Some pair (a_p, a_q) is (0, 0), so a determinant form vanishes."""


class SingularGrid(InvariantError):
    pass


class OracleNotValidated(PsiPointError, RuntimeError):
    pass
