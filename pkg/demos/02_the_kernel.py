"""Look inside the permutation-sum kernel P_n(a; x).

For numeric weights the kernel is an honest power series in x; its
coefficients are polynomials in the weights, recovered by exact
interpolation.  Setting the last x to zero peels off a factor, which is the
engine behind the string equation.
"""
from gmpy2 import mpq

from psi_point import pn_eval, pn_symbolic
from psi_point.algebra import LinearForm, s_of_form, series_mul_linear

print("P_2 at a = (2, 1), low orders:")
print("  ", pn_eval([2, 1], 4))

print("\nP_3 as polynomials in a (first few x-monomials):")
sym = pn_symbolic(3, 3)
for e, poly in sorted(sym.coeffs.items(), key=lambda t: (sum(t[0]), t[0]))[:8]:
    print(f"  x^{e}: {poly}")

a = [3, -1, 4]
p = pn_eval(a, 4)
Y = LinearForm.total(2)
peeled = series_mul_linear(s_of_form(Y.scale(a[-1]), 4), Y) * pn_eval(a[:-1], 4)
print("\nP_3(a; x1, x2, 0) == Y S(a3 Y) P_2(a1, a2; x1, x2):", p.restrict(2) == peeled.truncate(4))

halved = pn_eval([mpq(v, 2) for v in a], 4).scale_variables(2)
print("Scaling a by 1/2 and x by 2 multiplies P_3 by 2:", halved == p * 2)
