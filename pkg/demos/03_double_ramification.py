"""DR-cycle integrals, polynomial in the weights, and a second route to F_g.

psi-integrals over DR_g(a) are polynomials in a.  Pushing DR cycles forward
along the map that forgets extra points gives an independent way to compute
the genus-g part of the n-point function; it must not depend on the weights
chosen.
"""
from psi_point import dr_integral, dr_integral_poly, npoint_series, npoint_via_dr

print("int_{DR_1(a,-a)} psi_1 for a = 1..4:", [str(dr_integral([k, -k], [1, 0])) for k in range(1, 5)])
print("as a polynomial:", dr_integral_poly(2, (1, 0)))
print("n = 3, d = (2, 1, 1):", dr_integral_poly(3, (2, 1, 1)))

g, n = 1, 3
first = npoint_via_dr(g, n, [1, 2, 3], [1])
second = npoint_via_dr(g, n, [2, 3, 4], [5])
kernel_route = npoint_series(n, 3).homogeneous_part(3)
print(f"\nF_{g} in {n} variables via DR cycles:", first)
print("independent of the weights:", first == second, "| equals the kernel route:", first == kernel_route)
