"""Compare with the DVV recursion, after validating the recursion itself.

The recursion is external to the kernel formula, so it first has to
reproduce the closed one- and two-point functions and the string and
dilaton equations before it is allowed to judge anything.
"""
import itertools

from psi_point import dvv_number, intersection_number, oracle_selfcheck

report = oracle_selfcheck()
print(f"oracle self-check: {report.checked} comparisons, ok = {report.ok}")

n = 4
for g in range(3):
    total = 3 * g - 3 + n
    if total < 0:
        continue
    seen = set()
    for d in itertools.product(range(total + 1), repeat=n):
        if sum(d) != total or tuple(sorted(d)) in seen:
            continue
        seen.add(tuple(sorted(d)))
        ours, theirs = intersection_number(g, d), dvv_number(g, d)
        flag = "ok" if ours == theirs else "MISMATCH"
        print(f"  <{' '.join(f'tau_{k}' for k in d)}>_{g} = {ours}  [{flag}]")
