"""Dirichlet L-values through the Hurwitz decomposition and Euler-Maclaurin.

``L(s, chi) = q^-s sum_{a=1}^{q} chi(a) zeta(s, a/q)``.  Each Hurwitz zeta is
split at ``N``: the first ``N`` terms of every class together form the plain
Dirichlet sum over ``m <= Nq``; the remainder is the Euler-Maclaurin tail

    M^{1-s} / (q (s-1)) + M^{-s} / 2 + sum_k B_2k/(2k)! (s)_{2k-1} M^{-s} (N + a/q)^{1-2k},

with ``M = Nq + a``.  For nonprincipal characters the pole terms cancel in the
class sum, and they are rewritten with ``expm1`` so ``s = 1`` is harmless.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli

from ..errors import DomainError, NumericalError

BERNOULLI_TERMS = 8
_B = bernoulli(2 * BERNOULLI_TERMS + 2)
_COEF = np.array([_B[2 * k] / math.factorial(2 * k) for k in range(1, BERNOULLI_TERMS + 2)])
_CELLS = 2_000_000          # matrix entries per evaluation block
_TOL = 1e-12


def _terms(N: int, s_abs: float) -> int:
    return max(N, 20, int(math.ceil(s_abs)) + 10)


def _em_block(vals: np.ndarray, q: int, principal: bool, s: np.ndarray, N: int,
              remove_pole: bool):
    """Value and error estimate for a block of ``s`` with a fixed split ``N``."""
    m = np.arange(1, N * q + 1)
    cm = vals[m % q]
    keep = cm != 0
    logm = np.log(m[keep].astype(np.float64))
    cm = cm[keep]

    a = np.arange(1, q + 1)
    ca = vals[a % q]
    ka = ca != 0
    a, ca = a[ka], ca[ka]
    M = (N * q + a).astype(np.float64)
    logM = np.log(M)
    inv = 1.0 / (N + a / q)

    direct = np.exp(-np.outer(s, logm)) @ cm
    Ms = np.exp(-np.outer(s, logM))                 # M^{-s}, shape (len s, classes)
    half = 0.5 * (Ms @ ca)

    tail = np.zeros_like(s)
    poch = s.copy()                                  # (s)_1
    last = None
    for k in range(1, BERNOULLI_TERMS + 2):
        term = _COEF[k - 1] * poch * (Ms @ (ca * inv ** (2 * k - 1)))
        if k <= BERNOULLI_TERMS:
            tail += term
            poch = poch * (s + 2 * k - 1) * (s + 2 * k)
        else:
            last = term
    err = np.abs(last)

    z = 1.0 - s
    if principal:
        pole = (Ms * M[None, :]) @ ca / q           # sum chi(a) M^{1-s} / q
        if remove_pole:
            return -z * (direct + half + tail) + pole, err * np.abs(z)
        return direct + half + tail - pole / z, err
    # nonprincipal: subtract (Nq)^{1-s} sum chi(a) = 0 from the pole terms
    c = np.log1p(a / (N * q))
    zc = np.outer(z, c)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(np.abs(z)[:, None] > 0, np.expm1(zc) / z[:, None], c[None, :])
    base = np.exp(z * math.log(N * q)) / q
    pole = -base * (ratio @ ca)
    return direct + half + tail + pole, err


def _evaluate(chi, s, remove_pole: bool = False):
    s_arr = np.atleast_1d(np.asarray(s, dtype=np.complex128)).ravel()
    q = chi.modulus
    vals = np.asarray(chi.residue_values())
    principal = chi.is_principal
    if principal and not remove_pole and np.any(s_arr == 1):
        raise DomainError("L(s, chi_0) has a pole at s = 1")
    out = np.empty_like(s_arr)
    N0 = _terms(20, float(np.max(np.abs(s_arr))) if s_arr.size else 0.0)
    width = max(1, _CELLS // max(1, N0 * q))
    for i in range(0, s_arr.size, width):
        blk = s_arr[i : i + width]
        N = _terms(20, float(np.max(np.abs(blk))))
        for _ in range(6):
            val, err = _em_block(vals, q, principal, blk, N, remove_pole)
            if np.all(err <= _TOL * np.maximum(1.0, np.abs(val))):
                break
            N *= 2
        else:
            raise NumericalError("Euler-Maclaurin error estimate above budget",
                                 chi=chi.label, N=N, worst=float(np.max(err)))
        out[i : i + width] = val
    return out.reshape(np.shape(s)) if np.ndim(s) else complex(out[0])


def l_value(chi, s):
    """``L(s, chi)`` for any character ``chi`` (scalar or array ``s``)."""
    return _evaluate(chi, s)


def l_value_regular(chi, s):
    """``L(s, chi)``, or ``(s - 1) L(s, chi)`` for principal ``chi``: entire in ``s``."""
    return _evaluate(chi, s, remove_pole=chi.is_principal)


def dirichlet_partial_sum(chi, s, n_max: int) -> complex:
    """``sum_{n <= n_max} chi(n) n^-s`` (reference for convergent half-planes)."""
    n = np.arange(1, int(n_max) + 1)
    c = chi.values(n)
    keep = c != 0
    terms = c[keep] * np.exp(-complex(s) * np.log(n[keep].astype(np.float64)))
    return complex(math.fsum(terms.real), math.fsum(terms.imag))
