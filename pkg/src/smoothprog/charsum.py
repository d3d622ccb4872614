"""Twisted character sums over intervals and their comparison with sum and L-value bounds."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import DomainError
from .primes import largest_prime_factor

BLOCK = 1 << 20


@dataclass(frozen=True)
class SumQuery:
    chi: object
    N: int
    M: int
    t: float = 0.0
    sigma: float = 0.0

    def __post_init__(self):
        if not self.N < self.M:
            raise DomainError("need N < M")


def _values(chi, n: np.ndarray) -> np.ndarray:
    return chi.values(n)


def char_sum(query: SumQuery) -> complex:
    """``sum_{N < n <= M} chi(n) n^{-sigma - it}``.

    Untwisted sums drop whole periods (each contributes ``0``, or ``phi(q)`` for the
    principal character, exactly); everything else is summed with ``math.fsum``.
    """
    chi, N, M = query.chi, int(query.N), int(query.M)
    s = complex(query.sigma, query.t)
    q = chi.modulus
    base = 0j
    if s == 0 and M - N >= q:
        periods = (M - N) // q
        if chi.is_principal:
            base = complex(periods * chi.group.order)
        N += periods * q
    re, im = [base.real], [base.imag]
    for lo in range(N + 1, M + 1, BLOCK):
        n = np.arange(lo, min(lo + BLOCK, M + 1), dtype=np.int64)
        v = _values(chi, n)
        keep = v != 0
        v = v[keep]
        if s != 0:
            v = v * np.exp(-s * np.log(n[keep].astype(np.float64)))
        re.append(math.fsum(v.real))
        im.append(math.fsum(v.imag))
    return complex(math.fsum(re), math.fsum(im))


# -- thresholds -----------------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdParams:
    q: int
    nu: float
    tau: float
    c3: float
    e0: float
    t: float
    log_qflat: float
    ell: float
    eta: float
    vacuous: bool

    @property
    def qflat(self) -> float:
        return math.exp(self.log_qflat) if self.log_qflat < 709 else math.inf

    @property
    def xi(self) -> float:
        return min(1.0, 1.0 / (3.0 * self.nu))


def ell_value(q: int, t: float = 0.0) -> float:
    return math.log(q * (abs(t) + 3.0))


def eta_value(ell: float) -> float:
    """``ell^{-1/2} (log 2 ell)^{-3/4}``."""
    return ell ** -0.5 * math.log(2 * ell) ** -0.75


def compute_thresholds(q: int, nu: float, tau: float, c3: float, e0: float = 1000.0,
                       t: float = 0.0) -> ThresholdParams:
    """``q_flat = P(q)^e0 + exp(c3 log q / log log q)``, kept in log space."""
    if q < 16:
        raise DomainError("thresholds need q >= 16 so that log log q > 1")
    logq = math.log(q)
    a = e0 * math.log(largest_prime_factor(q))
    b = c3 * logq / math.log(logq)
    log_qflat = float(np.logaddexp(a, b))
    ell = ell_value(q, t)
    return ThresholdParams(q, nu, tau, c3, e0, t, log_qflat, ell, eta_value(ell),
                           log_qflat >= nu * logq)


# -- ratio against N exp(-xi sqrt(log N)) -----------------------------------------------

@dataclass(frozen=True)
class RatioReport:
    q: int
    char_label: str
    N: int
    M: int
    t: float
    sigma: float
    abs_sum: float
    bound: float
    ratio: float
    in_scope: bool

    def row(self):
        return [self.q, self.char_label, self.N, self.M, _g(self.t), _g(self.sigma), _g(self.abs_sum),
                _g(self.bound), _g(self.ratio), int(self.in_scope)]


RATIO_COLUMNS = ("q", "char_label", "N", "M", "t", "sigma", "abs_sum", "bound", "ratio", "in_scope")


def _g(v: float) -> str:
    return f"{v:.17g}"


def chang_ratio(chi, N: int, params: ThresholdParams, M: int | None = None, t: float = 0.0,
                sigma: float = 0.0) -> RatioReport:
    """``|sum_{N < n <= M} chi(n) n^{-sigma-it}| / (N exp(-xi sqrt(log N)))``, ``M = 2N`` by default."""
    M = 2 * N if M is None else M
    val = char_sum(SumQuery(chi, N, M, t, sigma))
    bound = N * math.exp(-params.xi * math.sqrt(math.log(N)))
    in_scope = params.log_qflat < math.log(N) <= params.nu * math.log(chi.modulus)
    return RatioReport(chi.modulus, chi.label, N, M, t, sigma, abs(val), bound, abs(val) / bound, in_scope)


def ratio_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RATIO_COLUMNS)
    for r in reports:
        w.writerow(r.row())
    return buf.getvalue()


# -- Polya-Vinogradov ------------------------------------------------------------------------

def max_interval_sum(chi) -> float:
    """``max |sum_{M < n <= M + N} chi(n)|`` over all ``M, N`` (nonprincipal ``chi``).

    Partial sums over one period are periodic, so the maximum is the diameter of
    the set of partial sums ``S(0), ..., S(q - 1)``.
    """
    vals = np.asarray(chi.residue_values())
    q = chi.modulus
    pts = np.concatenate([[0j], np.cumsum(vals[np.r_[1:q, 0]])])[:q]
    xy = np.column_stack([pts.real, pts.imag])
    try:
        hull = xy[ConvexHull(xy).vertices]
    except (QhullError, ValueError):
        hull = xy
    d = hull[:, None, :] - hull[None, :, :]
    return float(np.sqrt(np.max(np.sum(d * d, axis=-1))))


def polya_vinogradov_bound(q: int) -> float:
    return math.sqrt(q) * math.log(q)


# -- L-value bound ------------------------------------------------------------------------

@dataclass(frozen=True)
class LBoundReport:
    label: str
    s: np.ndarray
    abs_L: np.ndarray
    bound: np.ndarray
    in_scope: np.ndarray
    passed: np.ndarray
    max_ratio: float
    vacuous: bool


def l_bound_compare(chi, s_grid, params: ThresholdParams) -> LBoundReport:
    """``|L(s, chi)|`` against ``eta^{-1} q_flat^eta`` with ``eta`` taken at each point's height."""
    from .lfunction.values import l_value

    s = np.asarray(s_grid, dtype=np.complex128).ravel()
    vals = np.abs(l_value(chi, s))
    q = chi.modulus
    eta = np.array([eta_value(ell_value(q, t)) for t in s.imag])
    log_bound = eta * params.log_qflat - np.log(eta)
    with np.errstate(over="ignore"):
        bound = np.exp(log_bound)
    in_scope = (s.real > 1 - eta) & (np.abs(s.imag) <= 3 * q ** params.tau)
    ratio = vals / bound
    return LBoundReport(chi.label, s, vals, bound, in_scope, vals <= bound, float(np.max(ratio)),
                        bool(np.any(log_bound > 700)))


# -- b(N) = 4 N^eta exp(-xi sqrt(log N)) --------------------------------------------------------

@dataclass(frozen=True)
class BProfile:
    N: np.ndarray
    b: np.ndarray
    eta: float
    xi: float
    log_N_star: float                 # stationary point, xi^2 / (4 eta^2)
    decreasing_below_star: bool
    sign_change: tuple | None         # grid cell bracketing the stationary point
    log_omega_closed_form: float      # 2 xi^2 / eta^2
    discrepancy_factor: float         # log_omega_closed_form / log_N_star


def b_profile(N_grid, eta: float, xi: float) -> BProfile:
    if eta <= 0 or xi <= 0:
        raise DomainError("eta and xi must be positive")
    N = np.asarray(N_grid, dtype=np.float64)
    L = np.log(N)
    b = 4.0 * np.exp(eta * L - xi * np.sqrt(L))
    log_star = xi * xi / (4.0 * eta * eta)
    below = N < math.exp(min(log_star, 700.0))
    db = np.diff(b)
    dec = bool(np.all(db[below[1:]] < 0)) if below[1:].any() else True
    # centred finite differences of log b in log N, one value per node
    if N.size >= 2:
        sgn = np.sign(np.gradient(np.log(b), L))
        idx = np.flatnonzero((sgn[:-1] < 0) & (sgn[1:] > 0))
    else:
        idx = np.zeros(0, dtype=np.int64)
    bracket = (float(N[idx[0]]), float(N[idx[0] + 1])) if idx.size else None
    omega = 2.0 * xi * xi / (eta * eta)
    return BProfile(N, b, eta, xi, log_star, dec, bracket, omega, omega / log_star)
