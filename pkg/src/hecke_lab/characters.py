"""Characters of (Z/p^n)^x and Dirichlet characters mod N.

Characters are stored by exponents on a fixed generating set of the unit
group, with values realized as exact roots of unity (CycNum).  The ambient
cyclotomic order for a modulus is the exponent of its unit group, so every
character of that modulus shares one field.  Conrey's labeling of characters
(as used by public modular-forms datasets) is supported at the interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from .cyclotomic import CycNum, CyclotomicField, euler_phi, get_field


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def _order_mod(a: int, mod: int) -> int:
    t = a % mod
    k = 1
    while t != 1:
        t = t * a % mod
        k += 1
        if k > mod:
            raise ArithmeticError("not a unit")
    return k


@lru_cache(maxsize=None)
def unit_generators(p: int, n: int) -> tuple[int, ...]:
    """Generators of (Z/p^n)^x.

    For odd p: one generator, the least primitive root mod p that stays
    primitive mod p^2 (hence mod every power).  For p = 2: empty for n = 1,
    (-1,) for n = 2, and (-1 mod 2^n, 5) for n >= 3.
    """
    if not _is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    if n < 1:
        raise ValueError("need n >= 1")
    pn = p**n
    if p == 2:
        if n == 1:
            return ()
        if n == 2:
            return (3,)
        return (pn - 1, 5)
    g = _least_stable_primitive_root(p)
    return (g % pn,)


@lru_cache(maxsize=None)
def _least_stable_primitive_root(p: int) -> int:
    phi = p - 1
    for g in range(2, p**2):
        if math.gcd(g, p) != 1:
            continue
        if _order_mod(g, p) == phi and _order_mod(g, p * p) == phi * p:
            return g
    raise ArithmeticError("no primitive root found")  # unreachable for prime p


@lru_cache(maxsize=None)
def unit_group_structure(p: int, n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(generators, their orders) for (Z/p^n)^x."""
    gens = unit_generators(p, n)
    pn = p**n
    if p == 2:
        if n == 1:
            return (), ()
        if n == 2:
            return gens, (2,)
        return gens, (2, pn // 4)
    return gens, (euler_phi(pn),)


@lru_cache(maxsize=None)
def _dlog_tables(p: int, n: int) -> tuple[np.ndarray, ...]:
    """Per-generator discrete-log tables indexed by residue mod p^n (-1 at non-units)."""
    pn = p**n
    gens, orders = unit_group_structure(p, n)
    tables = tuple(np.full(pn, -1, dtype=np.int64) for _ in gens)
    if not gens:
        return tables
    if p == 2 and n >= 3:
        neg, five = gens
        t_eps, t_x = tables
        for eps in range(2):
            base = pow(neg, eps, pn)
            val = base
            for x in range(orders[1]):
                t_eps[val] = eps
                t_x[val] = x
                val = val * five % pn
        return tables
    g = gens[0]
    t = tables[0]
    val = 1
    for k in range(orders[0]):
        t[val] = k
        val = val * g % pn
    return tables


def group_exponent(p: int, n: int) -> int:
    _, orders = unit_group_structure(p, n)
    return math.lcm(*orders) if orders else 1


class PChar:
    """Character of (Z/p^n)^x, to be extended to upper-triangular-mod-p^n
    matrices through the lower-right entry.

    `exps[i]` is a_i with chi(g_i) = e(a_i / ord(g_i)) on the canonical
    generators.  Values are returned in the shared field Q(zeta_m) with m the
    exponent of the unit group (or a larger multiple passed explicitly).
    """

    def __init__(self, p: int, n: int, exps, field_order: Optional[int] = None):
        self.p = p
        self.n = n
        self.modulus = p**n
        gens, orders = unit_group_structure(p, n)
        exps = tuple(int(e) % d for e, d in zip(exps, orders))
        if len(exps) != len(gens):
            raise ValueError("exponent vector does not match generator count")
        self.exps = exps
        self.order = 1
        for a, d in zip(exps, orders):
            self.order = math.lcm(self.order, d // math.gcd(a, d))
        m = field_order if field_order is not None else group_exponent(p, n)
        if m % self.order != 0:
            raise ValueError("field order must be a multiple of the character order")
        self.field = get_field(m)
        self._vexp = self._build_value_table(m)
        self.conductor_exponent = self._min_conductor_exponent()

    def _build_value_table(self, m: int) -> np.ndarray:
        pn = self.modulus
        gens, orders = unit_group_structure(self.p, self.n)
        vexp = np.full(pn, -1, dtype=np.int64)
        if not gens:
            units = np.arange(pn) % 2 == 1 if self.p == 2 else np.ones(pn, bool)
            vexp[units] = 0
            return vexp
        tables = _dlog_tables(self.p, self.n)
        units = tables[0] >= 0
        acc = np.zeros(pn, dtype=np.int64)
        for a, d, tab in zip(self.exps, orders, tables):
            acc[units] += (a * tab[units]) * (m // d)
        vexp[units] = acc[units] % m
        return vexp

    def _min_conductor_exponent(self) -> int:
        # smallest r with chi trivial on every unit congruent to 1 mod p^r,
        # checked exhaustively mod p^n
        pn = self.modulus
        for r in range(self.n + 1):
            pr = self.p**r
            ok = all(
                self._vexp[u] == 0
                for u in range(1, pn)
                if u % pr == 1 % pr and self._vexp[u] >= 0
            )
            if ok:
                return r
        raise AssertionError("unreachable: r = n always works")

    # -- constructors ------------------------------------------------------

    @classmethod
    def trivial(cls, p: int, n: int, field_order: Optional[int] = None) -> "PChar":
        gens, _ = unit_group_structure(p, n)
        return cls(p, n, (0,) * len(gens), field_order)

    @classmethod
    def from_conrey(cls, p: int, n: int, index: int, field_order: Optional[int] = None) -> "PChar":
        pn = p**n
        index %= pn
        if math.gcd(index, pn) != 1:
            raise ValueError("Conrey index must be a unit")
        tables = _dlog_tables(p, n)
        exps = tuple(int(t[index]) for t in tables)
        return cls(p, n, exps, field_order)

    @classmethod
    def all_characters(cls, p: int, n: int, field_order: Optional[int] = None) -> Iterator["PChar"]:
        gens, orders = unit_group_structure(p, n)
        if not gens:
            yield cls(p, n, (), field_order)
            return
        idx = [0] * len(orders)
        while True:
            yield cls(p, n, tuple(idx), field_order)
            i = 0
            while i < len(orders):
                idx[i] += 1
                if idx[i] < orders[i]:
                    break
                idx[i] = 0
                i += 1
            else:
                return

    # -- evaluation --------------------------------------------------------

    def exponent(self, u: int) -> int:
        """chi(u) = zeta_m^exponent(u); error on non-units."""
        e = int(self._vexp[u % self.modulus])
        if e < 0:
            raise ValueError(f"{u} is not a unit mod {self.modulus}")
        return e

    def __call__(self, u: int) -> CycNum:
        return self.field.zeta(self.exponent(u))

    def value_on_matrix(self, g) -> CycNum:
        """Extension to matrices with lower-left entry divisible by p^n, via the
        lower-right entry."""
        if int(g.c) % self.modulus != 0:
            raise ValueError("matrix is not upper triangular mod p^n")
        return self(int(g.d))

    def conrey_index(self) -> int:
        pn = self.modulus
        gens, orders = unit_group_structure(self.p, self.n)
        if not gens:
            return 1 % pn if pn > 1 else 1
        j = 1
        for g, a in zip(gens, self.exps):
            j = j * pow(g, a, pn) % pn
        return j

    def is_trivial(self) -> bool:
        return all(a == 0 for a in self.exps)

    def exponent_table(self) -> np.ndarray:
        return self._vexp

    def __repr__(self):
        return f"PChar(p={self.p}, n={self.n}, exps={self.exps}, r={self.conductor_exponent})"

    def __eq__(self, other):
        return (
            isinstance(other, PChar)
            and (self.p, self.n, self.exps) == (other.p, other.n, other.exps)
        )

    def __hash__(self):
        return hash((self.p, self.n, self.exps))


def conductor(chi) -> int:
    """Conductor exponent r of a character of (Z/p^n)^x.

    Accepts a PChar or a full value table {u: CycNum-or-exponent}; a value
    table is first validated to be multiplicative on units.
    """
    if isinstance(chi, PChar):
        return chi.conductor_exponent
    raise TypeError("conductor expects a PChar; build one with PChar/pchar_from_values")


def pchar_from_values(p: int, n: int, values: dict) -> PChar:
    """Build a PChar from an explicit value table {unit -> CycNum}, rejecting
    non-multiplicative tables."""
    pn = p**n
    units = [u for u in range(pn) if math.gcd(u, p) == 1]
    if set(values.keys()) != set(units):
        raise ValueError("value table must cover exactly the units")
    for u in units[: min(len(units), 64)]:
        for v in units[: min(len(units), 64)]:
            if values[u * v % pn] != values[u] * values[v]:
                raise ValueError("value table is not multiplicative")
    gens, orders = unit_group_structure(p, n)
    m = group_exponent(p, n)
    field = get_field(m)
    exps = []
    for g, d in zip(gens, orders):
        val = values[g % pn]
        a = next((e for e in range(d) if field.zeta(e * (m // d)) == val), None)
        if a is None:
            raise ValueError("generator value is not a root of unity of the right order")
        exps.append(a)
    cand = PChar(p, n, tuple(exps))
    for u in units:
        if cand(u) != values[u]:
            raise ValueError("value table is not a character")
    return cand


# ---------------------------------------------------------------------------
# Dirichlet characters mod N
# ---------------------------------------------------------------------------


def _factorize(N: int) -> list[tuple[int, int]]:
    out = []
    m = N
    d = 2
    while d * d <= m:
        if m % d == 0:
            a = 0
            while m % d == 0:
                m //= d
                a += 1
            out.append((d, a))
        d += 1
    if m > 1:
        out.append((m, 1))
    return out


class DirChar:
    """Dirichlet character mod N as a CRT product of prime-power components.

    Values are exact roots of unity in Q(zeta_m) with m the lcm of the
    component field orders; chi(u) = 0 for non-units (classical convention).
    """

    def __init__(self, modulus: int, components: dict[int, PChar]):
        self.modulus = modulus
        fact = dict(_factorize(modulus))
        if set(components) != set(fact):
            raise ValueError("components must be indexed by the primes dividing N")
        for p, chi_p in components.items():
            if chi_p.p != p or chi_p.n != fact[p]:
                raise ValueError("component modulus mismatch")
        self.components = dict(sorted(components.items()))
        m = 1
        for chi_p in self.components.values():
            m = math.lcm(m, chi_p.field.order)
        if modulus == 1:
            m = 1
        self.field = get_field(m)
        self.order = 1
        for chi_p in self.components.values():
            self.order = math.lcm(self.order, chi_p.order)
        self.conductor = 1
        for p, chi_p in self.components.items():
            self.conductor *= p**chi_p.conductor_exponent

    @classmethod
    def trivial(cls, modulus: int) -> "DirChar":
        comps = {p: PChar.trivial(p, a) for p, a in _factorize(modulus)}
        return cls(modulus, comps)

    @classmethod
    def from_conrey(cls, modulus: int, index: int) -> "DirChar":
        if modulus == 1:
            return cls(1, {})
        if math.gcd(index, modulus) != 1:
            raise ValueError("Conrey index must be coprime to the modulus")
        comps = {p: PChar.from_conrey(p, a, index % p**a) for p, a in _factorize(modulus)}
        return cls(modulus, comps)

    @classmethod
    def from_spec(cls, spec: dict) -> "DirChar":
        """Character from the interchange form {"modulus": N, "conrey": j} or
        {"modulus": N, "exponents": {"p": [a, ...], ...}}."""
        N = int(spec["modulus"])
        if "conrey" in spec:
            return cls.from_conrey(N, int(spec["conrey"]))
        if "exponents" in spec:
            fact = _factorize(N)
            comps = {}
            for p, a in fact:
                exps = spec["exponents"].get(str(p), None)
                if exps is None:
                    comps[p] = PChar.trivial(p, a)
                else:
                    comps[p] = PChar(p, a, tuple(int(e) for e in exps))
            return cls(N, comps)
        raise ValueError("character spec needs 'conrey' or 'exponents'")

    def to_spec(self) -> dict:
        return {"modulus": self.modulus, "conrey": self.conrey_index()}

    def conrey_index(self) -> int:
        if self.modulus == 1:
            return 1
        rem, mod = 0, 1
        for p, chi_p in self.components.items():
            pa = p**chi_p.n
            j = chi_p.conrey_index()
            # CRT combine rem mod mod with j mod pa
            g, inv = math.gcd(mod, pa), pow(mod, -1, pa)
            assert g == 1
            t = (j - rem) * inv % pa
            rem, mod = rem + mod * t, mod * pa
        return rem % self.modulus

    def exponent(self, u: int) -> Optional[int]:
        """chi(u) = zeta_m^e, or None for non-units."""
        if self.modulus == 1:
            return 0
        if math.gcd(u, self.modulus) != 1:
            return None
        m = self.field.order
        e = 0
        for chi_p in self.components.values():
            mp = chi_p.field.order
            e = (e + chi_p.exponent(u % chi_p.modulus) * (m // mp)) % m
        return e

    def __call__(self, u: int) -> CycNum:
        e = self.exponent(u)
        if e is None:
            return self.field.zero
        return self.field.zeta(e)

    def value_complex(self, u: int) -> complex:
        e = self.exponent(u)
        if e is None:
            return 0j
        return complex(np.exp(2j * np.pi * e / self.field.order))

    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        v = self(-1 % self.modulus if self.modulus > 1 else 1)
        q = v.as_rational()
        return int(q)

    def is_trivial(self) -> bool:
        return all(c.is_trivial() for c in self.components.values())

    def bar(self) -> "DirChar":
        """Complex-conjugate character."""
        comps = {}
        for p, chi_p in self.components.items():
            _, orders = unit_group_structure(p, chi_p.n)
            comps[p] = PChar(p, chi_p.n, tuple((-a) % d for a, d in zip(chi_p.exps, orders)))
        return DirChar(self.modulus, comps)

    def at_modulus(self, M: int) -> "DirChar":
        """The character mod M attached to the same primitive character.
        Requires conductor | M and compatible prime support."""
        if M % self.conductor != 0:
            raise ValueError("target modulus must be divisible by the conductor")
        comps = {}
        for p, a in _factorize(M):
            if p in self.components:
                src = self.components[p]
                if a == src.n:
                    comps[p] = src
                else:
                    comps[p] = _pchar_change_level(src, a)
            else:
                comps[p] = PChar.trivial(p, a)
        return DirChar(M, comps)

    def flip_at(self, p: int) -> "DirChar":
        """Replace the p-component by its conjugate: conj(chi^(p^a)) * chi^(M)."""
        comps = dict(self.components)
        src = comps[p]
        _, orders = unit_group_structure(p, src.n)
        comps[p] = PChar(p, src.n, tuple((-a) % d for a, d in zip(src.exps, orders)))
        return DirChar(self.modulus, comps)

    def __repr__(self):
        return f"DirChar(mod {self.modulus}, conrey {self.conrey_index()}, cond {self.conductor})"

    def __eq__(self, other):
        return (
            isinstance(other, DirChar)
            and self.modulus == other.modulus
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.modulus, tuple(sorted((p, c.exps) for p, c in self.components.items()))))


def _pchar_change_level(chi: PChar, new_n: int) -> PChar:
    """Same primitive character, viewed mod p^new_n (new_n >= conductor exponent)."""
    p = chi.p
    if new_n < chi.conductor_exponent:
        raise ValueError("target level below conductor")
    gens_new, orders_new = unit_group_structure(p, new_n)
    m_new = group_exponent(p, new_n)
    field = get_field(m_new)
    exps = []
    for g, d in zip(gens_new, orders_new):
        val = chi(g % chi.modulus) if chi.modulus > 1 else chi.field.one
        target = next(
            (a for a in range(d) if _same_root(val, a, d)),
            None,
        )
        if target is None:
            raise AssertionError("generator value not representable at new level")
        exps.append(target)
    return PChar(p, new_n, tuple(exps))


def _same_root(val: CycNum, a: int, d: int) -> bool:
    """Does val equal e(a/d)?  Compared inside a common field."""
    m = math.lcm(val.field.order, d)
    f = get_field(m)
    lhs = _lift(val, f)
    return lhs == f.zeta(a * (m // d))


def _lift(val: CycNum, f: CyclotomicField) -> CycNum:
    src = val.field
    if src.order == f.order:
        return val
    scale = f.order // src.order
    out = f.zero
    for e, c in enumerate(val.coeffs):
        if c:
            out = out + f.zeta(e * scale) * c
    return out


def crt_decompose(chi: DirChar) -> list[DirChar]:
    """CRT components of chi, each lifted to a Dirichlet character of its own
    prime-power modulus.  Their pointwise product (lifted back mod N) is chi."""
    return [DirChar(p**c.n, {p: c}) for p, c in chi.components.items()]


def char_eval(chi, u: int) -> CycNum:
    """Evaluate a DirChar (0 on non-units) or PChar (error on non-units)."""
    if isinstance(chi, DirChar):
        return chi(u)
    if isinstance(chi, PChar):
        return chi(u)
    raise TypeError(f"cannot evaluate {type(chi)!r}")
