"""
A smoothed count as a contour integral
======================================

The smoothed twisted count sum_n chi(n) Phi(n/x) over y-smooth n equals an
integral of L(s, chi; y) x^s Phi^(s) along Re s = alpha.  We evaluate both
sides and compare.
"""

import numpy as np

from smoothprog.characters import character_group
from smoothprog.mellin import contour_psi, l_ratio_profile, make_cutoff, mellin, psi_smoothed
from smoothprog.sieve import build_table

cutoff = make_cutoff()
table = build_table(2 * 10**5)

# the cutoff's transform decays like |s|^-10 or faster
t = np.array([1.0, 10.0, 100.0, 1000.0])
print("|Phi^(0.7 + it)|:", np.abs(mellin(cutoff, 0.7 + 1j * t)))

for q, idx, x, y in ((1, 0, 10**4, 100), (5, 1, 10**5, 1000), (12, 3, 2000, 30)):
    chi = character_group(q).characters()[idx]
    rep = contour_psi(chi, x, y)
    direct = psi_smoothed(table, chi, x, y)
    print(f"{chi.label:6s} x = {x:>6} y = {y:>4}  alpha = {rep.alpha:.4f}  "
          f"contour = {rep.total:.10f}  direct = {direct:.10f}  "
          f"rel. err = {abs(rep.total - direct) / abs(direct):.1e}")

# |L(alpha + it, chi; y)| / L(alpha, chi0; y): how much a nonprincipal twist loses
chi = character_group(7).characters()[2]
grid = np.linspace(0, 20, 5)
print("ratio profile:", l_ratio_profile(chi, 1000, 0.8, grid))
