"""Dirichlet characters modulo composite q.

A character is an exponent vector against fixed generators of the CRT factors
of ``(Z/qZ)*``: one generator (the smallest primitive root) per odd prime
power, ``-1`` for ``4``, and ``-1`` and ``5`` for ``2^e`` with ``e >= 3``.
Values are carried as integers ``k`` meaning ``exp(2 pi i k / m)``, where ``m``
is the exponent of the group; ``-1`` marks ``chi(n) = 0``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .cyclotomic import reduction_matrix
from .primes import euler_phi, factorize, smallest_primitive_root

TABLE_LIMIT = 1 << 22


@dataclass(frozen=True)
class Component:
    p: int
    pe: int          # full prime power of q this generator lives in
    gen: int
    order: int
    kind: str        # "cyclic", "minus_one" or "five"


def _bsgs(h: int, g: int, n: int, mod: int) -> int:
    """Solve ``g^x = h`` with ``0 <= x < n`` by baby-step giant-step."""
    m = math.isqrt(n) + 1
    table = {}
    cur = 1
    for j in range(m):
        table.setdefault(cur, j)
        cur = cur * g % mod
    step = pow(g, -m, mod)
    cur = h % mod
    for i in range(m + 1):
        j = table.get(cur)
        if j is not None:
            return (i * m + j) % n
        cur = cur * step % mod
    raise ArithmeticError("discrete log does not exist")


def _dlog(h: int, g: int, order: int, mod: int) -> int:
    """Discrete log of ``h`` to base ``g`` (of the given order) by Pohlig-Hellman."""
    residues, moduli = [], []
    for r, k in factorize(order) if order > 1 else ():
        rk = r**k
        gr = pow(g, order // rk, mod)        # order r^k
        hr = pow(h, order // rk, mod)
        gamma = pow(gr, rk // r, mod)        # order r
        x = 0
        for i in range(k):
            hk = pow(pow(gr, -x, mod) * hr % mod, rk // r ** (i + 1), mod)
            d = _bsgs(hk, gamma, r, mod) if r > 64 else next(
                dd for dd in range(r) if pow(gamma, dd, mod) == hk)
            x += d * r**i
        residues.append(x)
        moduli.append(rk)
    x, m = 0, 1
    for a, n in zip(residues, moduli):
        # incremental CRT
        t = (a - x) * pow(m, -1, n) % n
        x += m * t
        m *= n
    return x % order if order > 1 else 0


class CharacterGroup:
    """The group of Dirichlet characters modulo ``q``."""

    def __init__(self, q: int):
        q = int(q)
        if q < 1:
            raise ValueError("modulus must be >= 1")
        self.q = q
        self.factors = factorize(q)
        comps = []
        for p, e in self.factors:
            pe = p**e
            if p == 2:
                if e == 2:
                    comps.append(Component(2, 4, 3, 2, "minus_one"))
                elif e >= 3:
                    comps.append(Component(2, pe, pe - 1, 2, "minus_one"))
                    comps.append(Component(2, pe, 5, pe // 4, "five"))
            else:
                comps.append(Component(p, pe, smallest_primitive_root(pe), pe // p * (p - 1), "cyclic"))
        self.components = tuple(comps)
        self.orders = tuple(c.order for c in comps)
        self.exponent = math.lcm(*self.orders) if comps else 1
        self.order = euler_phi(q)
        self._scale = np.array([self.exponent // o for o in self.orders], dtype=np.int64)
        self._tables: dict[int, np.ndarray] = {}

    def __repr__(self):
        return f"CharacterGroup({self.q})"

    # -- discrete logarithms -------------------------------------------------

    def _cyclic_table(self, c: Component) -> np.ndarray:
        key = (c.pe, c.gen)
        tab = self._tables.get(key)
        if tab is None:
            tab = np.full(c.pe, -1, dtype=np.int64)
            cur = 1
            for k in range(c.order):
                tab[cur] = k
                cur = cur * c.gen % c.pe
            self._tables[key] = tab
        return tab

    def component_log(self, i: int, n: int) -> int:
        """Log of unit ``n`` against generator ``i``; ``-1`` if ``n`` is not a unit mod q."""
        c = self.components[i]
        r = n % c.pe
        if r % c.p == 0:
            return -1
        if c.kind == "minus_one":
            return 0 if r % 4 == 1 else 1
        if c.kind == "five":
            r = r if r % 4 == 1 else (-r) % c.pe
        if c.pe <= TABLE_LIMIT:
            return int(self._cyclic_table(c)[r])
        return _dlog(r, c.gen, c.order, c.pe)

    def logs(self, n: int) -> np.ndarray:
        """Vector of component logs, or all ``-1`` if ``gcd(n, q) > 1``."""
        if math.gcd(int(n), self.q) != 1:
            return np.full(len(self.components), -1, dtype=np.int64)
        return np.array([self.component_log(i, int(n)) for i in range(len(self.components))],
                        dtype=np.int64)

    @cached_property
    def residue_logs(self) -> np.ndarray:
        """Component logs of every residue ``0..q-1``, shape ``(k, q)``; ``-1`` on non-units."""
        if self.q > TABLE_LIMIT:
            raise MemoryError(f"residue tables are limited to q <= {TABLE_LIMIT}")
        r = np.arange(self.q)
        unit = np.ones(self.q, dtype=bool)
        for p, _ in self.factors:
            unit &= r % p != 0
        out = np.full((len(self.components), self.q), -1, dtype=np.int64)
        for i, c in enumerate(self.components):
            rr = r % c.pe
            if c.kind == "minus_one":
                lg = np.where(rr % 4 == 1, 0, 1)
            else:
                if c.kind == "five":
                    rr = np.where(rr % 4 == 1, rr, (-rr) % c.pe)
                lg = self._cyclic_table(c)[rr]
            out[i] = np.where(unit, lg, -1)
        out.setflags(write=False)
        return out

    @cached_property
    def unit_mask(self) -> np.ndarray:
        r = np.arange(self.q)
        return np.array([math.gcd(int(v), self.q) == 1 for v in r]) if self.q > 1 else np.ones(1, bool)

    # -- characters ------------------------------------------------------------

    def exponent_tuples(self):
        return itertools.product(*(range(o) for o in self.orders))

    def characters(self) -> list["DirichletCharacter"]:
        return [DirichletCharacter(self, tuple(e)) for e in self.exponent_tuples()]

    def principal(self) -> "DirichletCharacter":
        return DirichletCharacter(self, (0,) * len(self.components))

    def exponent_matrix(self) -> np.ndarray:
        """Exponents of every character (rows, enumeration order) at every residue."""
        exps = np.array(list(self.exponent_tuples()), dtype=np.int64).reshape(self.order, -1)
        L = self.residue_logs
        if L.shape[0] == 0:
            return np.where(_unit_mask(self.q), 0, -1).reshape(1, self.q).astype(np.int64)
        E = ((exps * self._scale) @ L) % self.exponent
        E[:, L[0] < 0] = -1
        return E

    def from_label(self, label: str) -> "DirichletCharacter":
        q, _, rest = label.partition(":")
        if int(q) != self.q:
            raise ValueError(f"label {label!r} is not for modulus {self.q}")
        exps = tuple(int(v) for v in rest.split(",")) if rest else ()
        return DirichletCharacter(self, exps)


@lru_cache(maxsize=2048)
def character_group(q: int) -> CharacterGroup:
    return CharacterGroup(q)


def character_from_label(label: str) -> "DirichletCharacter":
    return character_group(int(label.partition(":")[0])).from_label(label)


def _root_of_unity(k: int, m: int) -> complex:
    if k < 0:
        return 0j
    k %= m
    if (4 * k) % m == 0:
        return (1 + 0j, 1j, -1 + 0j, -1j)[4 * k // m]
    return complex(np.exp(2j * np.pi * k / m))


@dataclass(frozen=True)
class PrimitiveData:
    conductor: int
    induced: "DirichletCharacter"


@dataclass(frozen=True, eq=False)
class DirichletCharacter:
    group: CharacterGroup
    exps: tuple

    def __post_init__(self):
        if len(self.exps) != len(self.group.orders):
            raise ValueError("exponent vector has the wrong length")
        object.__setattr__(self, "exps", tuple(int(e) % o for e, o in zip(self.exps, self.group.orders)))

    def __eq__(self, other):
        return (isinstance(other, DirichletCharacter)
                and self.group.q == other.group.q and self.exps == other.exps)

    def __hash__(self):
        return hash((self.group.q, self.exps))

    def __repr__(self):
        return f"DirichletCharacter({self.label!r})"

    @property
    def modulus(self) -> int:
        return self.group.q

    @property
    def label(self) -> str:
        return f"{self.group.q}:" + ",".join(str(e) for e in self.exps)

    @cached_property
    def order(self) -> int:
        return math.lcm(1, *(o // math.gcd(e, o) for e, o in zip(self.exps, self.group.orders)))

    @property
    def is_principal(self) -> bool:
        return not any(self.exps)

    @property
    def is_real(self) -> bool:
        return self.order <= 2

    # -- evaluation ----------------------------------------------------------

    def exponent(self, n: int) -> int:
        """``k`` with ``chi(n) = exp(2 pi i k / m)``, ``m = group.exponent``; ``-1`` when ``chi(n) = 0``."""
        g = self.group
        if g.q <= TABLE_LIMIT:
            return int(self.residue_exponents()[int(n) % g.q])
        lg = g.logs(n)
        if lg.size and lg[0] < 0:
            return -1
        return int(np.dot(np.array(self.exps) * g._scale, lg) % g.exponent)

    def exponents(self, ns) -> np.ndarray:
        ns = np.asarray(ns, dtype=np.int64)
        if self.group.q <= TABLE_LIMIT:
            return self.residue_exponents()[ns % self.group.q]
        return np.array([self.exponent(int(n)) for n in ns.ravel()], dtype=np.int64).reshape(ns.shape)

    def value(self, n: int) -> complex:
        return _root_of_unity(self.exponent(n), self.group.exponent)

    __call__ = value

    def values(self, ns) -> np.ndarray:
        ex = self.exponents(ns)
        return _exps_to_complex(ex, self.group.exponent)

    @cached_property
    def _residue_exponents(self) -> np.ndarray:
        g = self.group
        L = g.residue_logs
        if L.shape[0] == 0:
            ex = np.where(_unit_mask(g.q), 0, -1).astype(np.int64)
        else:
            ex = (np.array(self.exps, dtype=np.int64) * g._scale) @ L % g.exponent
            ex[L[0] < 0] = -1
        ex.setflags(write=False)
        return ex

    def residue_exponents(self) -> np.ndarray:
        """Exponents at residues ``0..q-1``."""
        return self._residue_exponents

    @cached_property
    def _residue_values(self) -> np.ndarray:
        v = _exps_to_complex(self._residue_exponents, self.group.exponent)
        v.setflags(write=False)
        return v

    def residue_values(self) -> np.ndarray:
        return self._residue_values

    # -- group operations ------------------------------------------------------

    def conj(self) -> "DirichletCharacter":
        return DirichletCharacter(self.group, tuple(-e for e in self.exps))

    def __mul__(self, other: "DirichletCharacter") -> "DirichletCharacter":
        if other.group.q != self.group.q:
            raise ValueError("characters have different moduli")
        return DirichletCharacter(self.group, tuple(a + b for a, b in zip(self.exps, other.exps)))

    def __pow__(self, k: int) -> "DirichletCharacter":
        return DirichletCharacter(self.group, tuple(k * e for e in self.exps))

    # -- conductor -----------------------------------------------------------

    @cached_property
    def _primitive(self) -> PrimitiveData:
        g = self.group
        cond = 1
        two_a = 0
        for c, e in zip(g.components, self.exps):
            if c.kind == "cyclic":
                d = c.order // math.gcd(e, c.order)
                if d > 1:
                    j = 0
                    while d % c.p == 0:
                        d //= c.p
                        j += 1
                    cond *= c.p ** (j + 1)
            elif c.kind == "minus_one":
                two_a = e
                if c.pe == 4 and e:
                    cond *= 4
            else:  # five
                d = c.order // math.gcd(e, c.order)
                if d > 1:
                    cond *= 2 ** ((d.bit_length() - 1) + 2)
                elif two_a:
                    cond *= 4
        if cond == g.q:
            return PrimitiveData(cond, self)
        h = character_group(cond)
        exps = []
        for c in h.components:
            full = next(p**e for p, e in g.factors if p == c.p)
            rest = g.q // full
            lift = _crt(c.gen % full, full, 1, rest)
            k = self.exponent(lift)
            exps.append((k * c.order // g.exponent) % c.order)
        return PrimitiveData(cond, DirichletCharacter(h, tuple(exps)))

    def conductor(self) -> PrimitiveData:
        return self._primitive

    def is_primitive(self) -> bool:
        return self._primitive.conductor == self.group.q


def _unit_mask(q: int) -> np.ndarray:
    return np.gcd(np.arange(q), q) == 1


def _crt(a: int, m: int, b: int, n: int) -> int:
    if n == 1:
        return a % m
    t = (b - a) * pow(m, -1, n) % n
    return (a + m * t) % (m * n)


def _exps_to_complex(ex: np.ndarray, m: int) -> np.ndarray:
    ex = np.asarray(ex)
    if m > 4096:
        # large exponent: no table; quarter turns are still exact
        r = ex % m
        out = np.exp(2j * np.pi * r / m)
        for k, v in enumerate((1, 1j, -1, -1j)):
            out[4 * r == k * m] = v
        out[ex < 0] = 0
        return out
    return _unit_table(m)[np.where(ex < 0, m, ex)]


@lru_cache(maxsize=256)
def _unit_table(m: int) -> np.ndarray:
    table = np.array([_root_of_unity(k, m) for k in range(m)] + [0j], dtype=np.complex128)
    table.setflags(write=False)
    return table


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All ``phi(q)`` characters mod ``q``, principal first, lexicographic in exponents."""
    return character_group(q).characters()


def conductor(chi: DirichletCharacter) -> PrimitiveData:
    return chi.conductor()


def orthogonality_check(q: int) -> bool:
    """Exact check of ``sum_chi chi(a) conj(chi(b)) = phi(q) [a = b, (a, q) = 1]`` for all ``a, b < q``."""
    g = character_group(q)
    E = g.exponent_matrix()
    m = g.exponent
    units = np.flatnonzero(E[0] >= 0)
    if units.size == 0:
        return True
    R = reduction_matrix(m)
    D = (E[:, units, None] - E[:, None, units]) % m        # (chars, a, b)
    nu = units.size
    pair = np.broadcast_to(np.arange(nu * nu).reshape(1, nu, nu), D.shape)
    hist = np.bincount((pair * m + D).ravel(), minlength=nu * nu * m).reshape(nu * nu, m)
    coords = hist.astype(np.int64) @ R
    expected = np.zeros_like(coords)
    expected[np.arange(nu) * (nu + 1), 0] = g.order
    # pairs with a non-unit entry vanish identically since chi(n) = 0 there
    return bool(np.array_equal(coords, expected))
