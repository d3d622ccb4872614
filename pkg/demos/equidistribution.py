"""
Smooth numbers across residue classes
=====================================

How evenly do the y-smooth integers up to x spread over the reduced classes
mod q?  We sieve once, then watch the discrepancy shrink as x grows, for a
smooth modulus (3^5) and a prime of similar size.
"""

import math

from smoothprog.harness import trend
from smoothprog.saddle import solve_alpha
from smoothprog.sieve import build_table

# one table of largest prime factors serves every count below
x_max = 10**7
table = build_table(x_max)
xs = [10**k for k in range(4, 8)]
y = 1000

for q in (4, 3**5, 241):
    tr = trend(table, xs, y, q)
    print(f"q = {q}")
    for rep in tr.reports:
        print(f"  x = {rep.x:>10.0f}   u = {rep.u:5.2f}   v = {rep.v:5.2f}   "
              f"delta = {rep.delta:.3e}   worst class {rep.argmax}")
    print(f"  Kendall tau of delta against log x: {tr.tau:+.2f}")

# the saddle point behind the count: alpha(x, y) and the main-term scale
for x in xs:
    r = solve_alpha(x, y)
    print(f"alpha({x:.0e}, {y}) = {r.alpha:.6f}   log E = {r.log_E:.3f}   "
          f"1 - log(u log u)/log y = {1 - math.log(r.u * math.log(r.u)) / math.log(y):.6f}")
