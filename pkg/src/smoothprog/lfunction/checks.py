"""Classification of characters by zeros near ``Re s = 1`` and empirical zero-region checkers.

Every checker returns a :class:`CheckReport` whose verdict is ``PASS``,
``FAIL`` or ``UNKNOWN`` (plus ``SAMPLED`` for conditions only probed on a
grid).  Windings are certified up to floating point only; reports say so.

Rectangles are clamped on the left at ``SIGMA_FLOOR``.  For existence
questions this loses nothing: nontrivial zeros are symmetric about
``Re s = 1/2`` (``rho`` a zero of ``L(s, chi)`` implies ``1 - conj(rho)`` is one),
and it keeps trivial zeros and the ``Re s = 0`` Euler-factor zeros of
imprimitive characters out of every window.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..characters import character_group
from ..errors import DomainError
from .values import l_value, l_value_regular
from .zeros import (DEFAULT_RESOLUTION, RIGHT_EDGE, SIGMA_FLOOR, BoundaryHit, Rect, ZeroRecord,
                    has_zero, scan_target, scan_zeros, winding_number, zero_function)

CERTIFICATION_NOTE = "winding numbers certified up to floating-point error only"

DEFAULTS = {"c1": 0.1, "c2": 0.05, "D": 10.0, "C1": 1e3, "C2": 2.0, "tau_A": 2.0, "T_max": 100.0}


# -- constants ---------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremConstants:
    A: float
    D: float
    k0: int
    Q_A: int


def k0_value(A: float, D: float) -> int:
    if A <= 0 or D < 0:
        raise DomainError("need A > 0 and D >= 0")
    return int(math.ceil(4 * A * math.log(A) + D))


def theorem1_constants(A: float, D: float) -> TheoremConstants:
    """``k0 = ceil(4 A log A + D)`` and the explicit ``Q_A = 500000 k0``."""
    k0 = k0_value(A, D)
    return TheoremConstants(float(A), float(D), k0, 500_000 * k0)


def xi_cap(q: int) -> int:
    return int(math.ceil(0.5 * math.log(q))) if q > 1 else 0


# -- problem range --------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemRange:
    label: str
    sigma_left: float          # 1 - k0 / log q, unclamped
    height: float              # min(T_max, q, conductor^tau_A)
    conductor: int
    excluded: bool             # principal characters never enter the problem set

    def rect(self, floor: float = SIGMA_FLOOR) -> Rect:
        return Rect(max(self.sigma_left, floor), RIGHT_EDGE, -self.height, self.height)


def problem_range_rectangle(chi, k0: int, tau_A: float, T_max: float) -> ProblemRange:
    q = chi.modulus
    cond = chi.conductor().conductor
    height = min(float(T_max), float(q), float(cond) ** tau_A)
    left = 1.0 - k0 / math.log(q) if q > 1 else -math.inf
    return ProblemRange(chi.label, left, height, cond, chi.is_principal)


# -- classification -----------------------------------------------------------------

def xi_index(chi, T_max: float):
    """Largest ``k`` in ``[0, ceil(log(q)/2)]`` with no zero in ``Re s > 1 - k/log q``, ``|t| <= T_max``.

    ``None`` if an existence test is indeterminate.
    """
    q = chi.modulus
    cap = xi_cap(q)
    logq = math.log(q)
    for k in range(cap, 0, -1):
        found = has_zero(chi, max(1.0 - k / logq, SIGMA_FLOOR), T_max)
        if found is None:
            return None
        if not found:
            return k
    return 0


@dataclass
class Classification:
    q: int
    T_max: float
    A: float
    D: float
    tau_A: float
    k0: int
    cap: int
    xi_index: dict                     # label -> k (None when indeterminate)
    A_set: list
    exceptional: ZeroRecord | None = None
    indeterminate: list = field(default_factory=list)

    def xi_counts(self) -> dict:
        out = {k: 0 for k in range(self.cap + 1)}
        for k in self.xi_index.values():
            if k is not None:
                out[k] += 1
        return out

    def partition_ok(self) -> bool:
        """Each nonprincipal character carries exactly one index in ``[0, cap]``."""
        return (all(k is not None and 0 <= k <= self.cap for k in self.xi_index.values())
                and sum(self.xi_counts().values()) == len(self.xi_index))

    def to_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "exceptional"}
        d["xi_counts"] = {str(k): v for k, v in self.xi_counts().items()}
        d["exceptional"] = None if self.exceptional is None else _zero_dict(self.exceptional)
        d["indeterminate"] = list(self.indeterminate)
        return d


def _real_zero(chi, lo: float, resolution: float = DEFAULT_RESOLUTION):
    """Largest real zero of ``L(s, chi)`` in ``(lo, 1)`` for real ``chi`` (sign changes plus bisection)."""
    prim = scan_target(chi)
    grid = np.linspace(lo, 1.0, 401)
    v = np.real(l_value_regular(prim, grid.astype(np.complex128)))
    idx = np.flatnonzero(np.sign(v[1:]) != np.sign(v[:-1]))
    if idx.size == 0:
        return None
    a, b = grid[idx[-1]], grid[idx[-1] + 1]
    fa = v[idx[-1]]
    while b - a > 1e-14:
        m = 0.5 * (a + b)
        fm = float(np.real(l_value_regular(prim, complex(m))))
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
    beta = 0.5 * (a + b)
    r = 0.999 * resolution / (2 * math.sqrt(2))   # margin keeps the rounded diameter under resolution
    box = Rect(beta - r, beta + r, -r, r)
    return ZeroRecord(chi.label, beta, 0.0, box, winding_number(zero_function(chi), box), True)


def classify(q: int, A: float = 4 * math.sqrt(math.e), D: float = DEFAULTS["D"],
             T_max: float = DEFAULTS["T_max"], tau_A: float = DEFAULTS["tau_A"]) -> Classification:
    """Xi-indices of all nonprincipal characters mod ``q`` and the problem set.

    The problem set holds the nonprincipal characters with a zero in their
    problem-range rectangle (left edge clamped at ``SIGMA_FLOOR``).
    """
    k0 = k0_value(A, D)
    cap = xi_cap(q)
    xi: dict = {}
    A_set: list = []
    bad: list = []
    exceptional = None
    for chi in character_group(q).characters():
        if chi.is_principal:
            continue
        k = xi_index(chi, T_max)
        xi[chi.label] = k
        if k is None:
            bad.append(chi.label)
        pr = problem_range_rectangle(chi, k0, tau_A, T_max)
        rect = pr.rect()
        found = has_zero(chi, rect.sigma0, pr.height)
        if found is None:
            bad.append(chi.label)
        elif found:
            A_set.append(chi.label)
            if chi.is_real:
                z = _real_zero(chi, rect.sigma0)
                if z is not None and (exceptional is None or z.beta > exceptional.beta):
                    exceptional = z
    return Classification(q, float(T_max), float(A), float(D), float(tau_A), k0, cap, xi,
                          A_set, exceptional, sorted(set(bad)))


# -- reports --------------------------------------------------------------------------

def _zero_dict(z: ZeroRecord) -> dict:
    return {"label": z.label, "beta": z.beta, "gamma": z.gamma, "box_radius": z.box_radius,
            "winding": z.winding, "is_real": z.is_real}


@dataclass
class CheckReport:
    check: str
    verdict: str
    params: dict
    details: dict = field(default_factory=dict)
    zeros: list = field(default_factory=list)
    note: str = CERTIFICATION_NOTE

    def to_json(self) -> str:
        d = asdict(self)
        d["zeros"] = [_zero_dict(z) for z in self.zeros]
        return json.dumps(d, sort_keys=True, default=_jsonable)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    raise TypeError(type(v))


def _scan_all(chars, rect: Rect):
    """Scan each character on ``rect``; returns (zeros, all_covered)."""
    zeros, ok = [], True
    for chi in chars:
        try:
            res = scan_zeros(chi, rect)
        except BoundaryHit:
            ok = False
            continue
        ok = ok and res.covered and not res.indeterminate
        zeros.extend(res.zeros)
    return zeros, ok


def zero_free_region_check(q: int, c1: float = DEFAULTS["c1"], T_max: float = 50.0) -> CheckReport:
    """Zeros of ``prod_chi L(s, chi)`` with ``beta > 1 - c1/l``, ``l = log q(|gamma| + 3)``, ``|gamma| <= T_max``.

    PASS iff there is at most one, and it is a real zero of a real nonprincipal character.
    """
    chars = character_group(q).characters()
    sigma_left = max(1.0 - c1 / math.log(3 * q), SIGMA_FLOOR)
    zeros, ok = _scan_all(chars, Rect(sigma_left, RIGHT_EDGE, -T_max, T_max))
    by_label = {c.label: c for c in chars}
    inside = [z for z in zeros if z.beta > 1.0 - c1 / math.log(q * (abs(z.gamma) + 3))]
    if not ok:
        verdict = "UNKNOWN"
    elif not inside:
        verdict = "PASS"
    elif (len(inside) == 1 and inside[0].winding == 1 and inside[0].is_real
          and by_label[inside[0].label].is_real and not by_label[inside[0].label].is_principal):
        verdict = "PASS"
    else:
        verdict = "FAIL"
    return CheckReport("zero_free_region", verdict, {"q": q, "c1": c1, "T_max": T_max},
                       {"sigma_left": sigma_left, "characters": len(chars),
                        "exceptional_zeros": len(inside)}, inside)


def deuring_heilbronn_check(q: int, eps: float, c2: float = DEFAULTS["c2"], T_max: float = 50.0,
                            beta1: float | None = None) -> CheckReport:
    """Given an exceptional zero ``beta1 = 1 - eps/log q``, no other zero may have
    ``beta > 1 - c2 log(1/eps) / l``.  Reports the largest ``beta`` among the other zeros seen."""
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    if beta1 is None:
        beta1 = 1.0 - eps / math.log(q) if q > 1 else 1.0 - eps
    chars = character_group(q).characters()
    width = c2 * math.log(1.0 / eps)
    sigma_left = max(1.0 - width / math.log(3 * q), SIGMA_FLOOR)
    zeros, ok = _scan_all(chars, Rect(sigma_left, RIGHT_EDGE, -T_max, T_max))
    others = [z for z in zeros if not (z.is_real and abs(z.beta - beta1) <= 1e-6)]
    inside = [z for z in others if z.beta > 1.0 - width / math.log(q * (abs(z.gamma) + 3))]
    margin = max((z.beta for z in others), default=sigma_left)
    verdict = "UNKNOWN" if not ok else ("PASS" if not inside else "FAIL")
    return CheckReport("deuring_heilbronn", verdict,
                       {"q": q, "eps": eps, "c2": c2, "T_max": T_max, "beta1": beta1},
                       {"sigma_left": sigma_left, "repulsion_margin": margin,
                        "violations": len(inside)}, inside)


def eta_condition(q: int, eta: float, Theta: float) -> bool:
    """``8 log(5 log 3q) + 24 eta^-1 log(160 Theta) <= (8/3) Theta``."""
    lhs = 8 * math.log(5 * math.log(3 * q)) + 24.0 / eta * math.log(160 * Theta)
    return lhs <= 8.0 * Theta / 3.0


def iwaniec_condition_check(chi, M: float, eta: float, T: float, n_sigma: int = 8,
                            t_step: float = 0.1, resolution: float = DEFAULT_RESOLUTION) -> CheckReport:
    """Evaluate the two conditions that at most one primitive character can meet at once.

    Condition (i) (``|L| <= M`` on ``sigma > 1 - eta``, ``|t| <= 3T``) is only
    sampled on a grid; condition (ii) (a zero with ``beta > 1 - theta``,
    ``|gamma| <= T``, ``theta = 1/(400 Theta)``, ``Theta = log(M)/eta``) is scanned.
    """
    if not 0 < eta < 1 / 3:
        raise DomainError("eta must lie in (0, 1/3)")
    if M < math.e:
        raise DomainError("M must be at least e")
    q = chi.modulus
    Theta = math.log(M) / eta
    theta = 1.0 / (400.0 * Theta)
    cond_eta = eta_condition(q, eta, Theta)

    sig = 1.0 - eta + eta * (np.arange(n_sigma) + 0.5) * (2.0 / n_sigma)
    sig = sig[sig != 1.0]
    n_t = max(2, int(math.ceil(6 * T / t_step)) + 1)
    ts = np.linspace(-3 * T, 3 * T, n_t)
    grid = (sig[:, None] + 1j * ts[None, :]).ravel()
    peak = float(np.max(np.abs(l_value(chi, grid))))
    cond_i = "SAMPLED" if peak <= M else "FAIL"

    zeros = []
    if theta < resolution:
        cond_ii = "UNKNOWN"
    else:
        found = has_zero(chi, 1.0 - theta, T)
        if found is None:
            cond_ii = "UNKNOWN"
        elif found:
            cond_ii = "HOLDS"
            zeros = scan_zeros(chi, Rect(1.0 - theta, RIGHT_EDGE, -T, T)).zeros
        else:
            cond_ii = "FAILS"
    if cond_ii == "UNKNOWN":
        verdict = "UNKNOWN"
    elif cond_ii == "HOLDS" and cond_i == "SAMPLED":
        # the conclusion: such a zero is unique, simple and real
        verdict = "PASS" if len(zeros) == 1 and zeros[0].winding == 1 and zeros[0].is_real else "FAIL"
    else:
        verdict = "PASS"
    return CheckReport("iwaniec_condition", verdict,
                       {"chi": chi.label, "M": M, "eta": eta, "T": T, "n_sigma": n_sigma, "t_step": t_step},
                       {"Theta": Theta, "theta": theta, "eta_condition": cond_eta,
                        "condition_i": cond_i, "max_abs_L": peak, "condition_ii": cond_ii}, zeros)


def gulp_region_check(chi, scale: float = 40000.0, T_max: float = 50.0) -> CheckReport:
    """No nonreal zero with ``beta > 1 - 1/(scale (log q + (l log 2l)^{3/4}))``, ``l = log q(|gamma|+3)``."""
    q = chi.modulus
    params = {"chi": chi.label, "scale": scale, "T_max": T_max}
    if q == 1:
        return CheckReport("gulp_region", "PASS", params, {"vacuous": True})
    if not chi.is_primitive():
        raise DomainError("gulp_region_check needs a primitive character")

    def edge(gamma):
        ell = math.log(q * (abs(gamma) + 3))
        return 1.0 - 1.0 / (scale * (math.log(q) + (ell * math.log(2 * ell)) ** 0.75))

    sigma_left = max(edge(0.0), SIGMA_FLOOR)
    zeros, ok = _scan_all([chi], Rect(sigma_left, RIGHT_EDGE, -T_max, T_max))
    inside = [z for z in zeros if not z.is_real and z.gamma != 0 and z.beta > edge(z.gamma)]
    verdict = "UNKNOWN" if not ok else ("PASS" if not inside else "FAIL")
    return CheckReport("gulp_region", verdict, params, {"sigma_left": sigma_left, "vacuous": False}, inside)


def density_count_check(q: int, T_max: float = DEFAULTS["T_max"], C1: float = DEFAULTS["C1"],
                        C2: float = DEFAULTS["C2"], classification: Classification | None = None) -> CheckReport:
    """``|Xi_q(k)|`` against ``C1 exp(C2 k)`` for each ``k``."""
    cls = classification or classify(q, T_max=T_max)
    counts = cls.xi_counts()
    per_k = {str(k): {"count": n, "bound": C1 * math.exp(C2 * k), "ok": n <= C1 * math.exp(C2 * k)}
             for k, n in counts.items()}
    total = sum(counts.values())
    phi = character_group(q).order
    if cls.indeterminate:
        verdict = "UNKNOWN"
    else:
        verdict = "PASS" if all(v["ok"] for v in per_k.values()) else "FAIL"
    return CheckReport("density_count", verdict, {"q": q, "T_max": cls.T_max, "C1": C1, "C2": C2},
                       {"per_k": per_k, "total": total, "phi": phi, "total_within_phi": total <= phi})
