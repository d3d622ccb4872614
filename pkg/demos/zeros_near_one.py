"""
Zeros of L(s, chi) near the line Re s = 1
=========================================

Locate zeros with the argument principle, then sort the characters mod q by
how far a zero-free strip reaches to the left of 1.
"""

import math

from smoothprog.characters import character_group
from smoothprog.lfunction import Rect, classify, scan_zeros, zero_free_region_check, zeros_csv

# the first zero of zeta and of the character mod 4
for q, idx, height in ((1, 0, 20.0), (4, 1, 7.0)):
    chi = character_group(q).characters()[idx]
    res = scan_zeros(chi, Rect(0.0, 1.0, 0.0, height))
    z = res.zeros[0]
    print(f"{chi.label:6s} first zero {z.beta:.12f} + {z.gamma:.12f} i   (covered: {res.covered})")

# every zero of every character mod 13 in a box of the critical strip
q = 13
rect = Rect(0.25, 1.5, -15.0, 15.0)
records = [z for chi in character_group(q).characters() for z in scan_zeros(chi, rect).zeros]
print(zeros_csv(records))

# Xi-indices: the largest k with no zero right of 1 - k / log q (|t| <= T_max)
T_max = 30.0
cls = classify(q, T_max=T_max)
print(f"q = {q}: k0 = {cls.k0}, cap = {cls.cap}, index counts {cls.xi_counts()}")
print(f"  characters with a zero in their problem range: {cls.A_set}")

# a checker with a sane constant passes, an absurd one fails
for c1 in (0.1, 10.0):
    rep = zero_free_region_check(q, c1=c1, T_max=T_max)
    print(f"zero-free region c1 = {c1}: {rep.verdict} ({len(rep.zeros)} zeros inside, "
          f"scanned from sigma = {rep.details['sigma_left']:.3f}, unclamped edge {1 - c1 / math.log(3 * q):.3f})")
