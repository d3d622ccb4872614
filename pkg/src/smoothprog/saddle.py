"""Saddle point alpha(x, y), truncated Euler products at real points, Dickman rho,
and the main-term scale ``E_q(x, y)``.

``alpha`` solves ``sum_{p <= y} log p / (p^alpha - 1) = log x``.  The left side
is smooth, convex and strictly decreasing in ``alpha``, so a doubling/halving
bracket followed by safeguarded Newton always terminates.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NumericalError
from .primes import factorize, primes_upto


@lru_cache(maxsize=32)
def _log_primes(y_floor: int) -> np.ndarray:
    lp = np.log(primes_upto(y_floor).astype(np.float64))
    lp.setflags(write=False)
    return lp


def _saddle_terms(alpha: float, logp: np.ndarray):
    em1 = np.expm1(alpha * logp)                      # p^alpha - 1
    f = float(np.sum(logp / em1))
    df = -float(np.sum(logp * logp * (em1 + 1.0) / (em1 * em1)))
    return f, df


def log_euler_product(alpha: float, y, exclude: int = 1) -> float:
    """``log prod_{p <= y, p | exclude -> skipped} (1 - p^-alpha)^-1``."""
    logp = _log_primes(int(math.floor(y)))
    terms = -np.log1p(-np.exp(-alpha * logp))
    if exclude > 1:
        bad = [math.log(p) for p, _ in factorize(exclude)]
        keep = ~np.isin(logp, bad)
        terms = terms[keep]
    return float(np.sum(terms))


@dataclass(frozen=True)
class SaddleResult:
    alpha: float
    x: float
    y: float
    q: int
    log_x: float
    residual: float
    iterations: int
    log_L_alpha: float        # all p <= y
    log_L_alpha_q: float      # p <= y, p not dividing q
    log_E: float

    @property
    def u(self) -> float:
        return self.log_x / math.log(self.y)

    @property
    def v(self) -> float:
        return self.log_x / math.log(self.q) if self.q > 1 else math.inf

    @property
    def L_alpha(self) -> float:
        return math.exp(self.log_L_alpha)

    @property
    def L_alpha_q(self) -> float:
        return math.exp(self.log_L_alpha_q)

    @property
    def E(self) -> float:
        return math.exp(self.log_E) if self.log_E < 709.0 else math.inf


def solve_alpha(x, y, q: int = 1, *, log_x: float | None = None,
                tol: float = 1e-13, max_iter: int = 200) -> SaddleResult:
    """Saddle point ``alpha(x, y)`` with the Euler products and ``E_q(x, y)`` attached.

    ``log_x`` may be given instead of ``x`` when ``x`` exceeds float range.
    """
    if log_x is None:
        if x < 2:
            raise DomainError("solve_alpha needs x >= 2")
        log_x = math.log(x)
    if y < 2:
        raise DomainError("solve_alpha needs y >= 2")
    logp = _log_primes(int(math.floor(y)))

    def g(a):
        f, df = _saddle_terms(a, logp)
        return f - log_x, df

    lo, hi = 0.5, 1.0
    glo, _ = g(lo)
    while glo < 0:
        hi, lo = lo, lo / 2
        glo, _ = g(lo)
        if lo < 1e-300:
            raise NumericalError("no lower bracket for alpha", x=x, y=y)
    ghi, _ = g(hi)
    while ghi > 0:
        lo, hi = hi, hi * 2
        ghi, _ = g(hi)
        if hi > 1e6:
            raise NumericalError("no upper bracket for alpha", x=x, y=y)

    a = 0.5 * (lo + hi)
    it = 0
    for it in range(1, max_iter + 1):
        val, d = g(a)
        if val > 0:
            lo = a
        else:
            hi = a
        step = val / d
        cand = a - step
        if not lo < cand < hi:
            cand = 0.5 * (lo + hi)
        if abs(cand - a) <= tol * max(1.0, a) or hi - lo <= tol * a:
            a = cand
            break
        a = cand
    else:
        raise NumericalError("alpha iteration did not converge", x=x, y=y, bracket=(lo, hi))
    residual = abs(g(a)[0])
    if residual > 1e-9 * log_x:
        raise NumericalError("alpha residual above budget", residual=residual, alpha=a)

    log_L = log_euler_product(a, y)
    log_Lq = log_euler_product(a, y, exclude=int(q))
    log_E = _log_E(a, log_x, float(y), log_Lq)
    return SaddleResult(a, float(math.exp(log_x)) if log_x < 709 else math.inf, float(y), int(q),
                        log_x, residual, it, log_L, log_Lq, log_E)


def _log_E(alpha, log_x, y, log_L):
    return (alpha * log_x + log_L - math.log(alpha)
            - 0.5 * math.log((1.0 + log_x / y) * log_x * math.log(y)))


def estimate_E(x, y, q: int = 1) -> float:
    """``x^alpha L(alpha, chi_0; y) / (alpha sqrt((1 + log x / y) log x log y))``, via logs."""
    return solve_alpha(x, y, q).E


def estimate_log_E(x=None, y=None, q: int = 1, *, log_x=None) -> float:
    return solve_alpha(x, y, q, log_x=log_x).log_E


def bisect_alpha(x, y, tol: float = 1e-14) -> float:
    """Plain bisection for alpha; slow but free of derivative information."""
    log_x = math.log(x)
    logp = _log_primes(int(math.floor(y)))
    lo, hi = 1e-12, 1.0
    while np.sum(logp / np.expm1(hi * logp)) > log_x:
        hi *= 2
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if np.sum(logp / np.expm1(mid * logp)) > log_x:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- Dickman rho ---------------------------------------------------------------

class RhoGrid:
    """Dickman rho on ``[0, u_max]`` with nodes every ``h``.

    Each grid solves ``u rho(u) = int_{u-1}^{u} rho`` (equivalent to
    ``u rho'(u) = -rho(u - 1)`` with ``rho = 1`` on ``[0, 1]``) by the trapezoid
    rule, which involves only positive terms and keeps relative accuracy where
    rho is tiny.  Values on the ``h`` grid are Richardson-extrapolated with a
    companion ``h/2`` grid; between nodes ``log rho`` is interpolated linearly.
    """

    def __init__(self, u_max: float = 12.0, steps_per_unit: int = 1024, extrapolate: bool = True):
        self.n = int(steps_per_unit)
        self.h = 1.0 / self.n
        self.u_max = int(math.ceil(u_max))
        self.extrapolate = extrapolate
        coarse = self._solve(self.n, self.u_max)
        if extrapolate:
            fine = self._solve(2 * self.n, self.u_max)[::2]
            vals = (4.0 * fine - coarse) / 3.0
        else:
            vals = coarse
        self.values = vals
        self.log_values = np.log(vals)

    @staticmethod
    def _solve(n: int, u_max: int) -> np.ndarray:
        h = 1.0 / n
        v = np.ones(n * u_max + 1)
        for i in range(n + 1, v.size):
            s = v[i - n + 1 : i].sum()
            v[i] = h * (0.5 * v[i - n] + s) / ((i - 0.5) * h)
        return v

    def __call__(self, u):
        u = np.asarray(u, dtype=np.float64)
        if np.any(u < 0):
            raise DomainError("rho is defined for u >= 0")
        if np.any(u > self.u_max):
            raise ValueError("u beyond grid")
        pos = u * self.n
        i = np.minimum(np.floor(pos).astype(np.int64), self.values.size - 2)
        frac = pos - i
        lv = (1 - frac) * self.log_values[i] + frac * self.log_values[i + 1]
        out = np.where(u <= 1.0, 1.0, np.exp(lv))
        return out if out.ndim else float(out)


_RHO_LOCK = threading.Lock()
_RHO_GRID: RhoGrid | None = None


def rho(u):
    """Dickman's function; the shared grid grows on demand."""
    global _RHO_GRID
    umax = float(np.max(u)) if np.ndim(u) else float(u)
    with _RHO_LOCK:
        if _RHO_GRID is None or umax > _RHO_GRID.u_max:
            target = 12.0 if _RHO_GRID is None else _RHO_GRID.u_max
            while target < umax:
                target *= 2
            _RHO_GRID = RhoGrid(target)
        grid = _RHO_GRID
    return grid(u)


# -- coprime proportionality -----------------------------------------------------

@dataclass(frozen=True)
class ProportionalityReport:
    x: float
    y: float
    q: int
    alpha: float
    psi_coprime: int
    psi_all: int
    local_factor: float
    ratio: float
    flagged: bool


def check_coprime_proportionality(table, x, y, q: int) -> ProportionalityReport:
    """Compare ``Psi_q(x, y)`` with ``Psi(x, y) prod_{p | q} (1 - p^-alpha)``."""
    from .sieve import psi, psi_coprime

    res = solve_alpha(x, y, q)
    factor = 1.0
    for p, _ in factorize(int(q)) if q > 1 else ():
        factor *= 1.0 - p ** (-res.alpha)
    pc = psi_coprime(table, x, y, q)
    pa = psi(table, x, y)
    ratio = pc / (pa * factor)
    return ProportionalityReport(float(x), float(y), int(q), res.alpha, pc, pa, factor, ratio,
                                 not 0.2 <= ratio <= 5.0)
