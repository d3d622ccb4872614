"""Small prime utilities: sieving, factorisation, totients and primitive roots."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np


def primes_upto(n: int) -> np.ndarray:
    """All primes ``p <= n`` as an int64 array (Eratosthenes on odd numbers)."""
    n = int(n)
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    if n < 3:
        return np.array([2], dtype=np.int64)
    # index i stands for 2*i + 1
    size = (n - 1) // 2 + 1
    odd = np.ones(size, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(n) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    out = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate(([2], out))


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorisation of ``n >= 1`` as ``((p, e), ...)`` with ``p`` increasing."""
    n = int(n)
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    f = 5
    while f * f <= n:
        for p in (f, f + 2):
            if n % p == 0:
                e = 0
                while n % p == 0:
                    n //= p
                    e += 1
                out.append((p, e))
        f += 6
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def largest_prime_factor(n: int) -> int:
    """P(n), with P(1) = 1."""
    fac = factorize(n)
    return fac[-1][0] if fac else 1


def is_prime(n: int) -> bool:
    n = int(n)
    return n >= 2 and factorize(n) == ((n, 1),)


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def radical(n: int) -> int:
    out = 1
    for p, _ in factorize(n):
        out *= p
    return out


def multiplicative_order(g: int, n: int) -> int:
    """Order of ``g`` in ``(Z/nZ)*``; ``g`` must be a unit."""
    if math.gcd(g, n) != 1:
        raise ValueError(f"{g} is not a unit modulo {n}")
    order = euler_phi(n)
    for p, _ in factorize(order):
        while order % p == 0 and pow(g, order // p, n) == 1:
            order //= p
    return order


@lru_cache(maxsize=None)
def smallest_primitive_root(pe: int) -> int:
    """Smallest positive primitive root modulo an odd prime power (or 2, 4)."""
    if pe in (2, 4):
        return pe - 1
    fac = factorize(pe)
    if len(fac) != 1 or fac[0][0] == 2:
        raise ValueError(f"{pe} has no primitive root handled here")
    phi = euler_phi(pe)
    divisors = [phi // r for r, _ in factorize(phi)]
    g = 2
    while True:
        if math.gcd(g, pe) == 1 and all(pow(g, d, pe) != 1 for d in divisors):
            return g
        g += 1
