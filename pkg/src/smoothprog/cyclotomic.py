"""Exact arithmetic in Z[zeta_m] via reduction modulo the cyclotomic polynomial.

An element is an integer vector ``V`` of length ``m`` standing for
``sum_j V[j] zeta_m^j``.  Two such vectors are equal in Z[zeta_m] exactly when
their reductions to the power basis ``1, zeta, ..., zeta^(phi(m)-1)`` agree.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .primes import euler_phi


def _polydiv_exact(num: list[int], den: list[int]) -> list[int]:
    """Quotient of integer polynomials (low-to-high coefficients), ``den`` monic."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    for i in range(len(num) - 1, dn - 1, -1):
        c = num[i]
        out[i - dn] = c
        if c:
            for j in range(dn + 1):
                num[i - dn + j] -= c * den[j]
    if any(num[:dn]):
        raise ArithmeticError("non-exact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_poly(m: int) -> tuple[int, ...]:
    """Coefficients of Phi_m, lowest degree first."""
    if m < 1:
        raise ValueError("m must be positive")
    poly = [-1] + [0] * (m - 1) + [1]          # x^m - 1
    for d in range(1, m):
        if m % d == 0:
            poly = _polydiv_exact(poly, list(cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=None)
def reduction_matrix(m: int) -> np.ndarray:
    """Row ``j`` holds the power-basis coordinates of ``zeta_m^j``."""
    phi = euler_phi(m)
    cyc = cyclotomic_poly(m)
    rows = []
    cur = [0] * phi
    cur[0] = 1
    for _ in range(m):
        rows.append(list(cur))
        # multiply by x, then reduce x^phi = -sum_{k<phi} cyc[k] x^k
        top = cur[-1]
        cur = [0] + cur[:-1]
        if top:
            cur = [c - top * cyc[k] for k, c in enumerate(cur)]
    mat = np.array(rows, dtype=object)
    if max(abs(int(v)) for v in mat.ravel()) >= 2**31:
        raise OverflowError("reduction matrix entries too large for int64 arithmetic")
    mat = mat.astype(np.int64)
    mat.setflags(write=False)
    return mat


def reduce_power_basis(vec: np.ndarray, m: int) -> np.ndarray:
    """Power-basis coordinates of ``sum_j vec[j] zeta_m^j`` (exact, int64)."""
    vec = np.asarray(vec, dtype=np.int64)
    if vec.shape[-1] != m:
        raise ValueError("vector length must equal m")
    return vec @ reduction_matrix(m)


def to_complex(vec: np.ndarray, m: int) -> complex:
    j = np.arange(m)
    return complex(np.dot(np.asarray(vec, dtype=np.float64), np.exp(2j * np.pi * j / m)))
