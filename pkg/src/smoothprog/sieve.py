"""Largest-prime-factor tables and exact counts of smooth numbers.

The table ``lpf`` has length ``x_max + 1`` and ``lpf[n] = P(n)`` for
``1 <= n <= x_max`` (``lpf[1] = 1``; ``lpf[0]`` is an unused 0).  Every count
below is a single vectorised scan of a slice of that table.
"""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CapacityError, RangeError
from .primes import primes_upto

MAGIC = b"SMTB1"
DEFAULT_SEGMENT = 1 << 22

# 4 bytes per entry below 2**32: the default budget admits x_max = 1.1e9 (~4.4 GB).
DEFAULT_MEMORY_BUDGET = int(os.environ.get("SMOOTHPROG_MEMORY_BUDGET", 4_400_000_000))


@dataclass(frozen=True, eq=False)
class SmoothTable:
    x_max: int
    lpf: np.ndarray

    def __post_init__(self):
        self.lpf.setflags(write=False)

    def __len__(self):
        return self.x_max

    def check_x(self, x) -> int:
        """Return ``floor(x)`` after checking it is covered by the table."""
        if x < 1:
            return 0
        xi = int(math.floor(x))
        if xi > self.x_max:
            raise RangeError(f"x = {x} exceeds table bound x_max = {self.x_max}")
        return xi

    def smooth_mask(self, lo: int, hi: int, y) -> np.ndarray:
        """Boolean mask of ``P(n) <= y`` for ``lo <= n < hi``."""
        return self.lpf[lo:hi] <= _ycap(y, self.lpf.dtype)

    def save(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<Q", self.x_max))
            fh.write(self.lpf[1:].astype(self.lpf.dtype.newbyteorder("<"), copy=False).tobytes())

    @classmethod
    def load(cls, path) -> "SmoothTable":
        path = Path(path)
        with open(path, "rb") as fh:
            if fh.read(len(MAGIC)) != MAGIC:
                raise ValueError(f"{path} is not a smooth table dump")
            (x_max,) = struct.unpack("<Q", fh.read(8))
            dtype = _table_dtype(x_max).newbyteorder("<")
            body = np.fromfile(fh, dtype=dtype, count=x_max)
        if body.size != x_max:
            raise ValueError(f"{path} is truncated")
        lpf = np.empty(x_max + 1, dtype=_table_dtype(x_max))
        lpf[0] = 0
        lpf[1:] = body
        return cls(x_max, lpf)


def _table_dtype(x_max: int) -> np.dtype:
    return np.dtype(np.uint32) if x_max < 2**32 else np.dtype(np.uint64)


def _ycap(y, dtype) -> int:
    if y < 1:
        return 0
    return int(min(math.floor(y), np.iinfo(dtype).max))


def build_table(x_max: int, segment: int = DEFAULT_SEGMENT,
                memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SmoothTable:
    """Sieve the largest prime factor of every ``n <= x_max``.

    Works segment by segment: within ``[lo, hi)`` each small prime ``p`` stamps
    its multiples (ascending ``p``, so the last stamp is the largest small
    factor) and divides the cofactor ``rem`` by every power of ``p``.  A
    cofactor left above 1 is the unique prime factor exceeding ``sqrt(n)``.
    """
    x_max = int(x_max)
    if x_max < 1:
        raise ValueError("x_max must be at least 1")
    dtype = _table_dtype(x_max)
    need = (x_max + 1) * dtype.itemsize
    if need > memory_budget:
        raise CapacityError(
            f"table for x_max={x_max} needs {need} bytes, budget is {memory_budget}")
    lpf = np.empty(x_max + 1, dtype=dtype)
    lpf[0] = 0
    base = primes_upto(math.isqrt(x_max))
    segment = max(int(segment), 1024)
    for lo in range(1, x_max + 1, segment):
        hi = min(lo + segment, x_max + 1)
        lpf[lo:hi] = _sieve_segment(lo, hi, base, dtype)
    return SmoothTable(x_max, lpf)


def _sieve_segment(lo: int, hi: int, base: np.ndarray, dtype) -> np.ndarray:
    rem = np.arange(lo, hi, dtype=dtype)
    out = np.ones(hi - lo, dtype=dtype)
    top = hi - 1
    for p in base.tolist():
        if p * p > top:
            break
        start = (-lo) % p
        if start >= hi - lo:
            continue
        out[start::p] = p
        pk = p
        while pk <= top:
            s = (-lo) % pk
            if s < hi - lo:
                rem[s::pk] //= p
            pk *= p
    big = rem > 1
    out[big] = rem[big]
    return out


def psi(table: SmoothTable, x, y) -> int:
    """Number of ``n <= x`` with ``P(n) <= y``."""
    xi = table.check_x(x)
    if xi == 0:
        return 0
    return int(np.count_nonzero(table.smooth_mask(1, xi + 1, y)))


def psi_progression(table: SmoothTable, x, y, q: int, a: int) -> int:
    """Number of y-smooth ``n <= x`` with ``n = a (mod q)``, for ``1 <= a <= q``."""
    q, a = int(q), int(a)
    if q < 1 or not 1 <= a <= q:
        raise ValueError("need q >= 1 and 1 <= a <= q")
    xi = table.check_x(x)
    if xi < a:
        return 0
    return int(np.count_nonzero(table.lpf[a : xi + 1 : q] <= _ycap(y, table.lpf.dtype)))


def class_counts(table: SmoothTable, x, y, q: int) -> np.ndarray:
    """``counts[r]`` = number of y-smooth ``n <= x`` with ``n = r (mod q)``."""
    q = int(q)
    xi = table.check_x(x)
    ycap = _ycap(y, table.lpf.dtype)
    counts = np.zeros(q, dtype=np.int64)
    if xi == 0:
        return counts
    if q <= 4096:
        for r in range(q):
            start = r if r else q
            if start <= xi:
                counts[r] = np.count_nonzero(table.lpf[start : xi + 1 : q] <= ycap)
        return counts
    chunk = 1 << 22
    for lo in range(1, xi + 1, chunk):
        hi = min(lo + chunk, xi + 1)
        idx = np.flatnonzero(table.lpf[lo:hi] <= ycap) + lo
        counts += np.bincount(idx % q, minlength=q)
    return counts


def psi_coprime(table: SmoothTable, x, y, q: int) -> int:
    """Number of y-smooth ``n <= x`` coprime to ``q``."""
    q = int(q)
    if q < 1:
        raise ValueError("q must be >= 1")
    counts = class_counts(table, x, y, q)
    units = np.array([math.gcd(r, q) == 1 for r in range(q)])
    return int(counts[units].sum())


def psi_twisted(table: SmoothTable, chi, x, y) -> complex:
    """``sum_{n <= x, P(n) <= y} chi(n)`` in complex double precision."""
    counts = class_counts(table, x, y, chi.modulus)
    vals = chi.residue_values()
    return complex(np.dot(counts.astype(np.float64), vals))


def psi_twisted_exact(table: SmoothTable, chi, x, y) -> np.ndarray:
    """Exact twisted count as an integer vector ``V`` with value ``sum_j V[j] zeta_m^j``.

    ``m`` is the exponent of the character group of ``chi`` (``chi.group.exponent``).
    """
    counts = class_counts(table, x, y, chi.modulus)
    ex = chi.residue_exponents()
    units = ex >= 0
    return _weighted_histogram(ex[units], counts[units], chi.group.exponent)


def _weighted_histogram(idx: np.ndarray, weights: np.ndarray, m: int) -> np.ndarray:
    out = np.zeros(m, dtype=np.int64)
    np.add.at(out, idx, weights.astype(np.int64))
    return out


def reconstruct_progression_exact(table: SmoothTable, x, y, q: int, a: int, group=None) -> int:
    """Recover ``Psi(x, y; q, a)`` from the twisted counts by orthogonality.

    Evaluates ``(1/phi(q)) sum_chi conj(chi(a)) Psi(x, y; chi)`` exactly in
    ``Z[zeta_m]`` and returns the (integer) result.  Raises if the cyclotomic
    element is not a rational integer divisible by ``phi(q)``, which would mean
    orthogonality failed.
    """
    from .characters import CharacterGroup
    from .cyclotomic import reduce_power_basis

    group = group or CharacterGroup(q)
    if math.gcd(a, q) != 1:
        raise ValueError("a must be coprime to q")
    counts = class_counts(table, x, y, q)
    E = group.exponent_matrix()            # (phi(q), q), -1 on non-units
    units = E[0] >= 0
    m = group.exponent
    shifted = (E[:, units] - E[:, [a % q]]) % m
    weights = np.broadcast_to(counts[units], shifted.shape)
    hist = _weighted_histogram(shifted.ravel(), weights.ravel(), m)
    coords = reduce_power_basis(hist, m)
    phi = group.order
    if np.any(coords[1:] != 0) or coords[0] % phi:
        raise ArithmeticError("orthogonality reconstruction is not an integer multiple of phi(q)")
    return int(coords[0] // phi)


def reconstruct_all_progressions_exact(table: SmoothTable, x, y, q: int, group=None) -> dict:
    """``{a: Psi(x, y; q, a)}`` for every unit ``a``, each recovered exactly as in
    :func:`reconstruct_progression_exact` but sharing one set of class counts."""
    from .characters import CharacterGroup
    from .cyclotomic import reduction_matrix

    group = group or CharacterGroup(q)
    counts = class_counts(table, x, y, q)
    E = group.exponent_matrix()
    units = np.flatnonzero(E[0] >= 0)
    m = group.exponent
    R = reduction_matrix(m)
    Eu = E[:, units]
    w = counts[units].astype(np.int64)
    phi = group.order
    out = {}
    for j, a in enumerate(units):
        shifted = (Eu - Eu[:, [j]]) % m
        hist = np.zeros(m, dtype=np.int64)
        np.add.at(hist, shifted.ravel(), np.broadcast_to(w, shifted.shape).ravel())
        coords = hist @ R
        if np.any(coords[1:] != 0) or coords[0] % phi:
            raise ArithmeticError(f"orthogonality reconstruction failed for a = {a}")
        out[int(a)] = int(coords[0] // phi)
    return out
