"""Zeros of Dirichlet L-functions in rectangles by the argument principle.

Every scan runs on the primitive character inducing ``chi``: its nontrivial
zeros coincide with those of ``L(s, chi)`` in ``Re s > 0`` (the extra Euler
factors only vanish on ``Re s = 0``).  For the principal character the entire
function ``(s - 1) zeta(s)`` is scanned instead.

Winding numbers are certified only up to floating point: along the boundary
consecutive samples are refined until ``|f(s2)/f(s1) - 1| < 1/2``.
"""

from __future__ import annotations

import csv
import io
import math
import threading
from dataclasses import dataclass, field

import numpy as np

from ..errors import NumericalError
from .values import l_value_regular

RIGHT_EDGE = 1.5          # L(s, chi) has no zeros in Re s >= 1
SIGMA_FLOOR = 0.25        # left edge used for existence questions (see has_zero)
DEFAULT_RESOLUTION = 1e-6
_SPLITS = (0.5031, 0.4917, 0.5173, 0.4789)


class BoundaryHit(Exception):
    """The contour passes (numerically) through a zero."""


@dataclass(frozen=True)
class Rect:
    sigma0: float
    sigma1: float
    t0: float
    t1: float

    @property
    def width(self) -> float:
        return self.sigma1 - self.sigma0

    @property
    def height(self) -> float:
        return self.t1 - self.t0

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.sigma0 + self.sigma1), 0.5 * (self.t0 + self.t1))

    def contains(self, s: complex) -> bool:
        return self.sigma0 <= s.real <= self.sigma1 and self.t0 <= s.imag <= self.t1

    def split(self, frac: float) -> list["Rect"]:
        sm = self.sigma0 + frac * self.width
        tm = self.t0 + frac * self.height
        if self.height > 2 * self.width:
            return [Rect(self.sigma0, self.sigma1, self.t0, tm), Rect(self.sigma0, self.sigma1, tm, self.t1)]
        if self.width > 2 * self.height:
            return [Rect(self.sigma0, sm, self.t0, self.t1), Rect(sm, self.sigma1, self.t0, self.t1)]
        return [Rect(self.sigma0, sm, self.t0, tm), Rect(sm, self.sigma1, self.t0, tm),
                Rect(self.sigma0, sm, tm, self.t1), Rect(sm, self.sigma1, tm, self.t1)]

    def as_tuple(self):
        return (self.sigma0, self.sigma1, self.t0, self.t1)


@dataclass(frozen=True)
class ZeroRecord:
    label: str
    beta: float
    gamma: float
    box: Rect
    winding: int
    is_real: bool

    @property
    def box_radius(self) -> float:
        return 0.5 * self.box.diameter

    @property
    def rho(self) -> complex:
        return complex(self.beta, self.gamma)


@dataclass
class ScanResult:
    label: str
    rect: Rect
    total_winding: int
    zeros: list = field(default_factory=list)
    indeterminate: list = field(default_factory=list)     # (Rect, winding) pairs
    consistent: bool = True

    @property
    def covered(self) -> bool:
        """Coverage certificate: leaf windings add up to the winding of the rectangle."""
        got = sum(z.winding for z in self.zeros) + sum(w for _, w in self.indeterminate)
        return got == self.total_winding and self.consistent

    def relabel(self, label: str) -> "ScanResult":
        zs = [ZeroRecord(label, z.beta, z.gamma, z.box, z.winding, z.is_real) for z in self.zeros]
        return ScanResult(label, self.rect, self.total_winding, zs, list(self.indeterminate), self.consistent)


# -- evaluation target ------------------------------------------------------------

def scan_target(chi):
    """The primitive character whose (regularised) L-function is scanned for ``chi``."""
    return chi.conductor().induced


def zero_function(chi):
    prim = scan_target(chi)
    return lambda s: l_value_regular(prim, s)


# -- argument principle ---------------------------------------------------------

def _edge_params(rect: Rect, h0: float):
    corners = [complex(rect.sigma0, rect.t0), complex(rect.sigma1, rect.t0),
               complex(rect.sigma1, rect.t1), complex(rect.sigma0, rect.t1)]
    lengths = [rect.width, rect.height, rect.width, rect.height]
    starts = np.concatenate([[0.0], np.cumsum(lengths)])
    us = []
    for k, L in enumerate(lengths):
        n = max(4, int(math.ceil(L / h0)))
        us.append(starts[k] + L * np.arange(n) / n)
    us.append([starts[-1]])
    return np.concatenate(us), corners, lengths, starts


def _points(u, corners, lengths, starts):
    k = np.clip(np.searchsorted(starts, u, side="right") - 1, 0, 3)
    frac = (u - starts[k]) / np.asarray(lengths)[k]
    c0 = np.asarray(corners)[k]
    c1 = np.asarray(corners[1:] + corners[:1])[k]
    return c0 + (c1 - c0) * frac


def winding_number(f, rect: Rect, h0: float | None = None, max_points: int = 400_000) -> int:
    """Number of zeros of ``f`` inside ``rect`` (with multiplicity)."""
    per = 2 * (rect.width + rect.height)
    if h0 is None:
        h0 = min(0.2, per / 32)
    u, corners, lengths, starts = _edge_params(rect, h0)
    vals = f(_points(u, corners, lengths, starts))
    scale = float(np.median(np.abs(vals)))
    min_gap = 1e-13 * max(1.0, per)
    while True:
        if np.any(np.abs(vals) <= 1e-13 * scale) or not np.all(np.isfinite(vals)):
            raise BoundaryHit(rect)
        r = vals[1:] / vals[:-1]
        bad = np.abs(r - 1.0) >= 0.5
        if not bad.any():
            break
        gaps = np.diff(u)
        if np.min(gaps[bad]) < min_gap:
            raise BoundaryHit(rect)
        if u.size > max_points:
            raise NumericalError("argument tracking exceeded point budget", rect=rect.as_tuple())
        idx = np.flatnonzero(bad)
        mids = 0.5 * (u[idx] + u[idx + 1])
        new = f(_points(mids, corners, lengths, starts))
        u = np.insert(u, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new)
    total = float(np.sum(np.angle(r))) / (2 * math.pi)
    k = round(total)
    if abs(total - k) > 1e-6:
        raise NumericalError("non-integral winding number", rect=rect.as_tuple(), value=total)
    return int(k)


def _newton(f, s0: complex, max_iter: int = 60):
    s = complex(s0)
    h = 1e-5
    for _ in range(max_iter):
        v = f(np.array([s, s + h, s - h]))
        d = (v[1] - v[2]) / (2 * h)
        if d == 0 or not np.isfinite(d):
            return None
        step = v[0] / d
        s -= step
        if abs(step) < 1e-13 * max(1.0, abs(s)):
            return s
        if abs(s - s0) > 2.0:
            return None
    return s


def _certify(f, root: complex, n: int, resolution: float):
    r = 0.999 * resolution / (2 * math.sqrt(2))   # margin keeps the rounded diameter under resolution
    b, g = float(root.real), float(root.imag)
    box = Rect(b - r, b + r, g - r, g + r)
    try:
        w = winding_number(f, box)
    except BoundaryHit:
        return None
    return box if w == n else None


def _scan(f, rect: Rect, label: str, resolution: float, real_char: bool) -> ScanResult:
    total = winding_number(f, rect)
    res = ScanResult(label, rect, total)
    stack = [(rect, total)]
    while stack:
        box, n = stack.pop()
        if n == 0:
            continue
        if (n == 1 and box.diameter <= 0.5) or box.diameter < 1e-4:
            root = _newton(f, box.center)
            if root is not None and (box.contains(root) or box.diameter < 1e-4):
                cert = _certify(f, root, n, resolution)
                if cert is not None:
                    beta, gamma = float(root.real), float(root.imag)
                    is_real = bool(real_char and abs(gamma) <= 0.5 * cert.height)
                    res.zeros.append(ZeroRecord(label, beta, 0.0 if is_real else gamma, cert, n, is_real))
                    continue
            if box.diameter < 1e-4:
                res.indeterminate.append((box, n))
                continue
        for frac in _SPLITS:
            kids = box.split(frac)
            try:
                ws = [winding_number(f, k) for k in kids]
            except BoundaryHit:
                continue
            if sum(ws) == n:
                stack.extend((k, w) for k, w in zip(kids, ws) if w)
                break
        else:
            res.consistent = False
            res.indeterminate.append((box, n))
    res.zeros.sort(key=lambda z: (z.gamma, z.beta))
    return res


_CACHE_LOCK = threading.Lock()
_SCAN_CACHE: dict = {}
_WIND_CACHE: dict = {}


def scan_zeros(chi, rect: Rect, resolution: float = DEFAULT_RESOLUTION) -> ScanResult:
    """All zeros of ``L(s, chi)`` inside ``rect`` (``Re s > 0``), each in a certified box.

    Raises ``BoundaryHit`` if the outer boundary itself runs through a zero.
    """
    prim = scan_target(chi)
    key = (prim.label, rect.as_tuple(), resolution)
    with _CACHE_LOCK:
        hit = _SCAN_CACHE.get(key)
    if hit is None:
        hit = _scan(zero_function(chi), rect, prim.label, resolution, prim.is_real)
        with _CACHE_LOCK:
            _SCAN_CACHE[key] = hit
    return hit.relabel(chi.label)


def rect_winding(chi, rect: Rect) -> int:
    prim = scan_target(chi)
    key = (prim.label, rect.as_tuple())
    with _CACHE_LOCK:
        w = _WIND_CACHE.get(key)
    if w is None:
        w = winding_number(zero_function(chi), rect)
        with _CACHE_LOCK:
            _WIND_CACHE[key] = w
    return w


def _strip_edges(T: float, first: float, offset: float) -> list[float]:
    edges = [first + offset]
    while edges[-1] < T:
        edges.append(2 * edges[-1])
    edges[-1] = T
    return [e for e in edges if e <= T]


def has_zero(chi, sigma0: float, T: float, sigma1: float = RIGHT_EDGE,
             first: float = 5.0) -> bool | None:
    """Whether ``L(s, chi)`` vanishes in ``sigma0 < Re s < sigma1``, ``|Im s| < T``.

    Checks growing strips in ``t`` and stops at the first nonzero winding.
    Returns ``None`` when the contour cannot be placed off the zeros.
    """
    if sigma0 >= 1.0 or T <= 0:
        return False
    for attempt in range(4):
        offset = 0.0137 * attempt
        edges = _strip_edges(T, min(first, T), offset) if T > first else [T]
        try:
            lo = edges[0]
            if rect_winding(chi, Rect(sigma0, sigma1, -lo, lo)):
                return True
            for a, b in zip(edges[:-1], edges[1:]):
                if rect_winding(chi, Rect(sigma0, sigma1, a, b)):
                    return True
                if rect_winding(chi, Rect(sigma0, sigma1, -b, -a)):
                    return True
            return False
        except BoundaryHit:
            continue
    return None


def clear_caches() -> None:
    with _CACHE_LOCK:
        _SCAN_CACHE.clear()
        _WIND_CACHE.clear()


# -- invariants and output ----------------------------------------------------------

def conjugate_pairs_ok(records_by_label: dict, group_labels, conj_label, tol: float = 1e-6) -> bool:
    """Zeros of ``L(s, chi)`` at ``beta + i gamma`` match zeros of ``L(s, conj chi)`` at ``beta - i gamma``."""
    for lab in group_labels:
        mine = records_by_label.get(lab, [])
        other = records_by_label.get(conj_label(lab), [])
        for z in mine:
            if z.is_real:
                continue
            if not any(abs(o.beta - z.beta) <= tol and abs(o.gamma + z.gamma) <= tol for o in other):
                return False
    return True


ZERO_COLUMNS = ("character_label", "beta", "gamma", "box_radius", "winding")


def zeros_csv(records) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ZERO_COLUMNS)
    for z in sorted(records, key=lambda r: (r.label, r.gamma, r.beta)):
        w.writerow([z.label, f"{z.beta:.17g}", f"{z.gamma:.17g}", f"{z.box_radius:.17g}", z.winding])
    return buf.getvalue()
