"""
Short character sums against their bounds
=========================================

Interval sums of a primitive character, the worst interval against
sqrt(q) log q, and the threshold q_flat that gates the stronger bound.
"""

import math

import numpy as np

from smoothprog.characters import CharacterGroup, DirichletCharacter, character_group
from smoothprog.charsum import (b_profile, chang_ratio, compute_thresholds, max_interval_sum,
                                polya_vinogradov_bound, ratio_csv)

# worst interval sum over all primitive characters of a few moduli
for q in (101, 256, 997):
    worst = max(max_interval_sum(chi) for chi in character_group(q).characters()
                if chi.is_primitive() and not chi.is_principal)
    print(f"q = {q:4d}: max interval sum {worst:7.3f}, sqrt(q) log q = {polya_vinogradov_bound(q):7.3f}")

# a large prime power: only one character is built, never the whole group
q = 3**20
chi = DirichletCharacter(CharacterGroup(q), (1,))
for e0 in (3, 1000):
    p = compute_thresholds(q, nu=1.0, tau=1.0, c3=1.0, e0=e0)
    print(f"e0 = {e0}: log q_flat = {p.log_qflat:.4f}, eta = {p.eta:.4f}, vacuous = {p.vacuous}")
p = compute_thresholds(q, nu=1.0, tau=1.0, c3=1.0, e0=3)
print(ratio_csv([chang_ratio(chi, N, p) for N in (100, 1000, 10**4)]))

# b(N) = 4 N^eta exp(-xi sqrt(log N)) decreases up to log N = xi^2 / (4 eta^2)
prof = b_profile(np.exp(np.linspace(1, 40, 200)), eta=0.05, xi=0.3)
print(f"stationary point log N* = {prof.log_N_star:.3f}; bracket {prof.sign_change}; "
      f"closed form / computed = {prof.discrepancy_factor:.1f}; decreasing below: {prof.decreasing_below_star}")
print(f"check: xi^2/(4 eta^2) = {0.3**2 / (4 * 0.05**2):.3f}, log of bracket = "
      f"{tuple(round(math.log(v), 3) for v in prof.sign_change)}")
