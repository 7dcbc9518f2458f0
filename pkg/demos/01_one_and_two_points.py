"""Read classical intersection numbers off the kernel formula.

The one-point function is the closed series (exp(x^3/24) - 1)/x^2.  For two
points the same machinery produces a series we compare with the known closed
two-point function, term by term.
"""
from psi_point import intersection_number, npoint_series, two_point_closed

print("One-point function, genus by genus:")
for (d,), value in npoint_series(1, 13):
    print(f"  <tau_{d}>_{(d + 2) // 3} = {value}")

two = npoint_series(2, 9)
print("\nTwo-point function through degree 9 agrees with the closed form:", two == two_point_closed(9))
for g, d in [(1, (2, 0)), (1, (1, 1)), (2, (3, 2)), (2, (4, 1)), (3, (4, 4))]:
    print(f"  <tau_{d[0]} tau_{d[1]}>_{g} = {intersection_number(g, d)}")
