"""Smooth cutoff, its Mellin transform, smoothed sums and their contour integral.

The cutoff is ``1`` on ``[0, 1/2]``, ``0`` on ``[2, inf)`` and on the ramp equals
``S((2 - t) / (3/2))`` with ``S(w) = I_w(11, 11)`` (regularised incomplete beta),
the degree-21 smoothstep whose derivatives of orders 1..10 vanish at both ends.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import betainc

from .errors import DomainError, NumericalError, RangeError
from .primes import primes_upto
from .saddle import log_euler_product, solve_alpha

_SMOOTH_DEG = 10                     # derivatives 1..10 vanish at the knots
_K = math.factorial(21) // (math.factorial(10) ** 2)    # S'(w) = _K w^10 (1-w)^10
_RAMP = 1.5
_BY_PARTS_FROM = 40.0          # |s| above which the integrated-by-parts form is used


@lru_cache(maxsize=64)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _falling(n: int, k: int) -> float:
    return math.factorial(n) / math.factorial(n - k) if k <= n else 0.0


def _smoothstep_deriv(w: np.ndarray, j: int) -> np.ndarray:
    """``S^{(j)}(w)`` for ``j >= 1`` via Leibniz on ``_K w^10 (1-w)^10``."""
    out = np.zeros_like(w)
    m = j - 1
    for i in range(m + 1):
        k = m - i
        if i > 10 or k > 10:
            continue
        a = _falling(10, i) * w ** (10 - i)
        b = (-1) ** k * _falling(10, k) * (1.0 - w) ** (10 - k)
        out += math.comb(m, i) * a * b
    return _K * out


@dataclass(frozen=True)
class Cutoff:
    """The smooth cutoff and its derivatives; immutable and cheap to share."""

    plateau: float = 0.5
    support: float = 2.0

    def __call__(self, t):
        return self.deriv(t, 0)

    def deriv(self, t, j: int = 0):
        """``Phi^{(j)}(t)`` for ``0 <= j <= 21``."""
        t = np.asarray(t, dtype=np.float64)
        ramp = (t > self.plateau) & (t < self.support)
        w = np.clip((self.support - t) / _RAMP, 0.0, 1.0)
        if j == 0:
            out = np.where(t <= self.plateau, 1.0, np.where(ramp, betainc(11, 11, w), 0.0))
        else:
            if j > 21:
                return np.zeros_like(t) if t.ndim else 0.0
            val = (-1.0 / _RAMP) ** j * _smoothstep_deriv(w, j)
            out = np.where(ramp, val, 0.0)
        return out if out.ndim else float(out)

    def to_dict(self):
        return {"kind": "smoothstep-beta-11-11", "plateau": self.plateau, "support": self.support}


def make_cutoff() -> Cutoff:
    return Cutoff()


def mellin_quadrature(f, s, a: float, b: float, n: int = 64) -> complex:
    """``int_a^b f(t) t^{s-1} dt`` by ``n``-point Gauss-Legendre."""
    x, w = gauss_legendre(n)
    t = 0.5 * (b - a) * x + 0.5 * (b + a)
    return complex(0.5 * (b - a) * np.sum(w * f(t) * t ** (s - 1)))


def _nodes_for(tau: float) -> int:
    n = 48 + int(math.ceil(0.8 * tau))
    return 16 * ((n + 15) // 16)


def mellin(cutoff: Cutoff, s):
    """``Phi^(s) = int_0^inf Phi(t) t^{s-1} dt`` for ``Re s > 0``.

    Small ``|s|``: ``(1/2)^s / s`` plus quadrature over the ramp.  Larger
    ``|s|``: ten integrations by parts (all boundary terms vanish),
    ``Phi^(s) = (s)_10^{-1} int Phi^{(10)}(t) t^{s+9} dt``, which keeps
    relative accuracy while ``|Phi^(s)|`` decays like ``|s|^-10``.
    """
    s_arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s_arr.real <= 0):
        raise DomainError("mellin transform needs Re(s) > 0")
    out = np.empty_like(s_arr)
    order = np.argsort(np.abs(s_arr.imag))
    lo_t, hi_t = cutoff.plateau, cutoff.support
    start = 0
    while start < order.size:
        n = _nodes_for(abs(s_arr.imag[order[start]]))
        stop = start
        while stop < order.size and _nodes_for(abs(s_arr.imag[order[stop]])) == n:
            stop += 1
        idx = order[start:stop]
        start = stop
        x, w = gauss_legendre(n)
        t = 0.5 * (hi_t - lo_t) * x + 0.5 * (hi_t + lo_t)
        logt = np.log(t)
        half = 0.5 * (hi_t - lo_t)
        for chunk in np.array_split(idx, max(1, idx.size * n // 2_000_000 + 1)):
            ss = s_arr[chunk]
            big = np.abs(ss) > _BY_PARTS_FROM
            res = np.empty(ss.shape, dtype=np.complex128)
            if np.any(~big):
                sm = ss[~big]
                kern = np.exp(np.outer(sm - 1.0, logt))
                ramp = half * (kern * cutoff.deriv(t, 0)) @ w
                res[~big] = np.exp(-sm * math.log(2.0)) / sm + ramp
            if np.any(big):
                sb = ss[big]
                j = _SMOOTH_DEG
                kern = np.exp(np.outer(sb + (j - 1), logt))
                integral = half * (kern * cutoff.deriv(t, j)) @ w
                poch = np.ones_like(sb)
                for k in range(j):
                    poch = poch * (sb + k)
                res[big] = (-1) ** j * integral / poch
            out[chunk] = res
    return out if np.ndim(s) else complex(out[0])


@lru_cache(maxsize=64)
def _deriv_abs_moment(alpha: float, j: int = _SMOOTH_DEG) -> float:
    """``int |Phi^{(j)}(t)| t^{alpha + j - 1} dt`` (controls the decay of Phi^)."""
    c = Cutoff()
    x, w = gauss_legendre(400)
    t = 0.75 * x + 1.25
    return float(0.75 * np.sum(w * np.abs(c.deriv(t, j)) * t ** (alpha + j - 1)))


def mellin_decay_bound(alpha: float, t) -> np.ndarray:
    """Upper bound ``|Phi^(alpha + it)| <= M / |t|^10`` (from ten integrations by parts)."""
    return _deriv_abs_moment(round(alpha, 12)) / np.abs(np.asarray(t, dtype=np.float64)) ** _SMOOTH_DEG


# -- smoothed sums and truncated L ------------------------------------------------

def psi_smoothed(table, chi, x, y, cutoff: Cutoff | None = None) -> complex:
    """``sum_{n in S(y)} chi(n) Phi(n / x)``, an exact finite sum over ``n < 2x``."""
    cutoff = cutoff or Cutoff()
    top = int(math.ceil(cutoff.support * x)) - 1
    if top > table.x_max:
        raise RangeError(f"smoothed sum needs the table up to {top}, have {table.x_max}")
    n = np.arange(1, top + 1)
    mask = table.smooth_mask(1, top + 1, y)
    n = n[mask]
    vals = chi.values(n) * cutoff(n / x)
    vals = vals[vals != 0]
    return complex(math.fsum(vals.real), math.fsum(vals.imag))


def _chi_at_primes(chi, y):
    p = primes_upto(int(math.floor(y)))
    return p, chi.values(p)


def truncated_L(chi, s, y):
    """``prod_{p <= y} (1 - chi(p) p^-s)^-1`` (empty product = 1)."""
    s_arr = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    if np.any(s_arr.real <= 0):
        raise DomainError("truncated L needs Re(s) > 0")
    p, cv = _chi_at_primes(chi, y)
    keep = cv != 0
    logp, cv = np.log(p[keep].astype(np.float64)), cv[keep]
    out = np.empty_like(s_arr)
    step = max(1, 4_000_000 // max(1, logp.size))
    for i in range(0, s_arr.size, step):
        ss = s_arr[i : i + step]
        z = cv[None, :] * np.exp(-np.outer(ss, logp))
        out[i : i + step] = np.exp(-np.sum(np.log1p(-z), axis=1))
    return out if np.ndim(s) else complex(out[0])


def l_ratio_profile(chi, y, alpha: float, t_grid) -> np.ndarray:
    """``|L(alpha + it, chi; y)| / L(alpha, chi_0; y)`` with ``chi_0`` principal mod q."""
    t = np.asarray(t_grid, dtype=np.float64)
    num = np.abs(truncated_L(chi, alpha + 1j * t, y))
    den = math.exp(log_euler_product(alpha, y, exclude=chi.modulus))
    return num / den


# -- contour integral ------------------------------------------------------------------

@dataclass
class IntegralReport:
    label: str
    x: float
    y: float
    q: int
    alpha: float
    split_height: float
    T_num: float
    central: complex
    tail_plus: complex
    tail_minus: complex
    quad_error: float
    remainder_bound: float
    scale: float
    panels: int
    extra: dict = field(default_factory=dict)

    @property
    def total(self) -> complex:
        return self.central + self.tail_plus + self.tail_minus

    @property
    def tail_constant(self) -> float:
        """``C`` in ``|I+| + |I-| = C x^alpha L(alpha, chi_0; y) / (yq)^2``."""
        return (abs(self.tail_plus) + abs(self.tail_minus)) * (self.y * self.q) ** 2 / self.scale

    def to_json(self) -> str:
        d = asdict(self)
        for k in ("central", "tail_plus", "tail_minus"):
            d[k] = [d[k].real, d[k].imag]
        tot = self.total
        d["total"] = [tot.real, tot.imag]
        d["tail_constant"] = self.tail_constant
        return json.dumps(d, sort_keys=True)


def _integrand(chi, x, y, alpha, cutoff, t):
    s = alpha + 1j * t
    # Phi^(conj s) = conj Phi^(s): evaluate only for t >= 0
    at = np.abs(t)
    mel = mellin(cutoff, alpha + 1j * at)
    mel = np.where(t < 0, np.conj(mel), mel)
    return truncated_L(chi, s, y) * np.exp(s * math.log(x)) * mel / (2 * math.pi)


def _integrate(f, a, b, width, tol_density, max_depth=12):
    """Adaptive panels: 8-point against 16-point Gauss-Legendre; fixed panel order."""
    if b <= a:
        return 0j, 0.0, 0
    n0 = max(1, int(math.ceil((b - a) / width)))
    edges = np.linspace(a, b, n0 + 1)
    panels = list(zip(edges[:-1], edges[1:]))
    x8, w8 = gauss_legendre(8)
    x16, w16 = gauss_legendre(16)
    accepted: list[tuple[float, complex, float]] = []
    for depth in range(max_depth + 1):
        if not panels:
            break
        P = np.array(panels)
        mid = 0.5 * (P[:, 0] + P[:, 1])
        half = 0.5 * (P[:, 1] - P[:, 0])
        t8 = mid[:, None] + half[:, None] * x8[None, :]
        t16 = mid[:, None] + half[:, None] * x16[None, :]
        v = f(np.concatenate([t8.ravel(), t16.ravel()]))
        v8 = v[: t8.size].reshape(t8.shape)
        v16 = v[t8.size :].reshape(t16.shape)
        i8 = half * (v8 @ w8)
        i16 = half * (v16 @ w16)
        err = np.abs(i16 - i8)
        ok = err <= tol_density * 2 * half
        if depth == max_depth:
            ok[:] = True
        nxt = []
        for k in range(len(panels)):
            if ok[k]:
                accepted.append((panels[k][0], complex(i16[k]), float(err[k])))
            else:
                lo, hi = panels[k]
                m = 0.5 * (lo + hi)
                nxt.extend([(lo, m), (m, hi)])
        panels = nxt
    accepted.sort(key=lambda r: r[0])
    vals = np.array([r[1] for r in accepted])
    total = complex(math.fsum(vals.real), math.fsum(vals.imag))
    return total, float(sum(r[2] for r in accepted)), len(accepted)


def contour_psi(chi, x, y, cutoff: Cutoff | None = None, T_num: float | None = None,
                alpha: float | None = None, rel_tol: float = 1e-9) -> IntegralReport:
    """``(1/2pi) int_{-T}^{T} L(alpha+it, chi; y) x^{alpha+it} Phi^(alpha+it) dt``.

    Split into the central piece ``|t| <= (yq)^{1/4}`` and the two tails; the
    omitted ``|t| > T`` part is bounded by ``remainder_bound``.
    """
    cutoff = cutoff or Cutoff()
    q = chi.modulus
    if alpha is None:
        alpha = solve_alpha(x, y, q).alpha
    H = (y * q) ** 0.25
    if T_num is None:
        T_num = max(500.0, 4.0 * H)
    H = min(H, T_num)
    log_scale = alpha * math.log(x) + log_euler_product(alpha, y)
    scale = math.exp(log_scale)
    width = math.pi / (2.0 * max(math.log(x), 1.0))
    tol_density = rel_tol * scale / (2 * T_num)

    def f(t):
        return _integrand(chi, x, y, alpha, cutoff, t)

    c, ec, nc = _integrate(f, -H, H, width, tol_density)
    tp, ep, npl = _integrate(f, H, T_num, width, tol_density)
    tm, em, nm = _integrate(f, -T_num, -H, width, tol_density)
    errs = ec + ep + em
    if not math.isfinite(errs):
        raise NumericalError("contour quadrature produced non-finite values", chi=chi.label)
    remainder = (math.exp(log_scale - log_euler_product(alpha, y) + log_euler_product(alpha, y, q))
                 * 2 * float(mellin_decay_bound(alpha, T_num)) * T_num / 9.0 / (2 * math.pi))
    return IntegralReport(chi.label, float(x), float(y), q, alpha, H, T_num, c, tp, tm,
                          errs, remainder, scale, nc + npl + nm)
