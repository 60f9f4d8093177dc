"""Finite model of GL2(Z_p) mod p^n: matrices, the upper-triangular-mod-p^n
subgroup K0(p^n), and its single/double coset geometry.

Right cosets K0 g are classified by the bottom row of g up to unit scaling,
i.e. by points of P^1(Z/p^n) in the canonical form (1 : d) (unit lower-left)
or (c : 1) with c in pZ/p^n.  Double cosets are classified by the p-adic
valuation of the canonical c: valuation 0 -> the w class, valuation j in
[1, n-1] -> the y(p^j) class, valuation n -> the identity class y(p^n) = K0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

import numpy as np


def _vp(x: int, p: int, n: int) -> int:
    """p-adic valuation of x mod p^n, capped at n (v(0) = n)."""
    x %= p**n
    if x == 0:
        return n
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class MatPn:
    """2x2 matrix over Z/p^n with unit determinant."""

    p: int
    n: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        pn = self.p**self.n
        object.__setattr__(self, "a", self.a % pn)
        object.__setattr__(self, "b", self.b % pn)
        object.__setattr__(self, "c", self.c % pn)
        object.__setattr__(self, "d", self.d % pn)
        if math.gcd(self.det(), self.p) != 1:
            raise ValueError(f"determinant {self.det()} is not a unit mod {self.p}^{self.n}")

    @property
    def pn(self) -> int:
        return self.p**self.n

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.pn

    def __matmul__(self, other: "MatPn") -> "MatPn":
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError("mixed moduli")
        return MatPn(
            self.p,
            self.n,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inv(self) -> "MatPn":
        di = pow(self.det(), -1, self.pn)
        return MatPn(self.p, self.n, di * self.d, -di * self.b, -di * self.c, di * self.a)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] mod {self.p}^{self.n}"


def identity(p: int, n: int) -> MatPn:
    return MatPn(p, n, 1, 0, 0, 1)


def w1(p: int, n: int) -> MatPn:
    return MatPn(p, n, 0, -1, 1, 0)


def xmat(p: int, n: int, t: int) -> MatPn:
    return MatPn(p, n, 1, t, 0, 1)


def ymat(p: int, n: int, s: int) -> MatPn:
    return MatPn(p, n, 1, 0, s, 1)


def dmat(p: int, n: int, s: int) -> MatPn:
    return MatPn(p, n, s, 0, 0, 1)


def zmat(p: int, n: int, s: int) -> MatPn:
    return MatPn(p, n, s, 0, 0, s)


def in_K0(g: MatPn) -> bool:
    """Membership in K0(p^n): lower-left entry divisible by p^n."""
    return g.c % g.pn == 0


def in_K0m(g: MatPn, m: int) -> bool:
    """Membership in the coarser K0(p^m), 0 <= m <= n."""
    return g.c % g.p**m == 0


@dataclass(frozen=True)
class CosetIndex:
    """Canonical point of P^1(Z/p^n): ("1d", d) for (1 : d) or ("c1", c) for
    (c : 1) with c in pZ/p^n."""

    kind: str
    value: int

    def __post_init__(self):
        if self.kind not in ("1d", "c1"):
            raise ValueError("kind must be '1d' or 'c1'")


class CosetTable:
    """Coset bookkeeping for one (p, n): representatives, index lookup,
    decomposition, and double-coset labels."""

    def __init__(self, p: int, n: int):
        self.p = p
        self.n = n
        self.pn = p**n
        pn = self.pn
        idx: list[CosetIndex] = []
        # (1 : d)-classes first, then (c : 1) by increasing valuation of c
        for d in range(pn):
            idx.append(CosetIndex("1d", d))
        cs = sorted((c for c in range(pn) if c % p == 0), key=lambda c: (_vp(c, p, n), c))
        for c in cs:
            idx.append(CosetIndex("c1", c))
        self.indices = idx
        self.position = {ix: k for k, ix in enumerate(idx)}
        self.reps = [self.rep_of(ix) for ix in idx]
        self.labels = [self.label_of_index(ix) for ix in idx]
        self.dim = len(idx)
        assert self.dim == pn + pn // p

    def rep_of(self, ix: CosetIndex) -> MatPn:
        if ix.kind == "1d":
            # w(1) x(d): bottom row (1, d)
            return MatPn(self.p, self.n, 0, -1, 1, ix.value)
        return ymat(self.p, self.n, ix.value)

    def canonical_index(self, g: MatPn) -> CosetIndex:
        c, d = g.c, g.d
        if c % self.p != 0:
            ci = pow(c, -1, self.pn)
            return CosetIndex("1d", ci * d % self.pn)
        # determinant a unit forces d to be a unit here
        di = pow(d, -1, self.pn)
        return CosetIndex("c1", di * c % self.pn)

    def decompose(self, g: MatPn) -> tuple[CosetIndex, MatPn]:
        ix = self.canonical_index(g)
        rep = self.reps[self.position[ix]]
        k0 = g @ rep.inv()
        assert in_K0(k0)
        return ix, k0

    def label_of_index(self, ix: CosetIndex) -> str:
        if ix.kind == "1d":
            return "w"
        return f"y{_vp(ix.value, self.p, self.n)}"

    def label(self, g: MatPn) -> str:
        return self.label_of_index(self.canonical_index(g))

    def positions_with_label(self, lab: str) -> list[int]:
        return [k for k, L in enumerate(self.labels) if L == lab]


@lru_cache(maxsize=None)
def coset_table(p: int, n: int) -> CosetTable:
    return CosetTable(p, n)


def right_coset_reps(p: int, n: int) -> list[MatPn]:
    """One representative per right coset K0(p^n) g; length p^{n-1}(p+1)."""
    return list(coset_table(p, n).reps)


def coset_decompose(g: MatPn) -> tuple[CosetIndex, MatPn]:
    """g = k0 * rep(index) with k0 in K0(p^n); deterministic."""
    return coset_table(g.p, g.n).decompose(g)


def double_coset_label(g: MatPn) -> str:
    """Label in {"w"} | {"y1", ..., "yn"}; "yn" is the K0(p^n) class itself."""
    return coset_table(g.p, g.n).label(g)


def label_rep(p: int, n: int, lab: str) -> MatPn:
    """The standard double-coset representative for a label."""
    if lab == "w":
        return w1(p, n)
    if lab.startswith("y"):
        j = int(lab[1:])
        if not 1 <= j <= n:
            raise ValueError(f"label {lab} out of range")
        return ymat(p, n, p**j)
    raise ValueError(f"unknown label {lab}")


def all_labels(p: int, n: int) -> list[str]:
    return ["w"] + [f"y{j}" for j in range(1, n + 1)]


def unit_lifts(p: int, modulus_exp: int, ambient_exp: int) -> list[int]:
    """Smallest positive lifts of (Z/p^modulus_exp)^x into Z/p^ambient_exp.
    For modulus_exp = 0 the group is trivial: [1]."""
    if modulus_exp == 0:
        return [1]
    pm = p**modulus_exp
    return [s for s in range(1, pm + 1) if s % p != 0]


def class_right_reps(p: int, n: int, lab: str) -> list[MatPn]:
    """Representatives a_i with the double coset of `lab` equal to the disjoint
    union of the right cosets a_i K0(p^n).

    y(p^j) class: d(s) y(p^j) over unit classes s mod p^{n-j};
    w class: x(t) w over t mod p^n; identity class: [I].
    """
    if lab == f"y{n}":
        return [identity(p, n)]
    if lab == "w":
        return [xmat(p, n, t) @ w1(p, n) for t in range(p**n)]
    j = int(lab[1:])
    return [dmat(p, n, s) @ ymat(p, n, p**j) for s in unit_lifts(p, n - j, n)]


def class_left_reps(p: int, n: int, lab: str) -> list[MatPn]:
    """Mirrored decomposition into left cosets K0(p^n) b_i.

    y(p^j) class: y(p^j) d(s); w class: w x(t); identity: [I].
    """
    if lab == f"y{n}":
        return [identity(p, n)]
    if lab == "w":
        return [w1(p, n) @ xmat(p, n, t) for t in range(p**n)]
    j = int(lab[1:])
    return [ymat(p, n, p**j) @ dmat(p, n, s) for s in unit_lifts(p, n - j, n)]


def single_cosets_of_double(p: int, n: int, j: int) -> list[MatPn]:
    """The d(s) y(p^j) representatives decomposing the y(p^j) double coset into
    right cosets, for 1 <= j <= n-1; count p^{n-j-1}(p-1)."""
    if not 1 <= j <= n - 1:
        raise ValueError(f"j = {j} out of range [1, {n - 1}]")
    return class_right_reps(p, n, f"y{j}")


# ---------------------------------------------------------------------------
# K0 enumeration and the K_g subgroup
# ---------------------------------------------------------------------------

K0_MATERIALIZE_LIMIT = 128


def enumerate_K0(p: int, n: int, m: Optional[int] = None) -> list[MatPn]:
    """All elements of K0(p^m) inside GL2(Z/p^n), for 1 <= m <= n.

    With the lower-left entry divisible by p (m >= 1), the determinant is a
    unit exactly when both diagonal entries are units, so no filtering is
    needed.  Size-guarded; meant for small p^n only.
    """
    if m is None:
        m = n
    if m < 1:
        raise ValueError("enumerate_K0 needs m >= 1 (m = 0 is the full group)")
    pn = p**n
    if pn > K0_MATERIALIZE_LIMIT:
        raise ValueError(f"refusing to materialize K0 for p^n = {pn} > {K0_MATERIALIZE_LIMIT}")
    units = [u for u in range(pn) if u % p != 0]
    count = len(units) ** 2 * pn * (pn // p**m)
    if count > 600_000:
        raise ValueError(f"K0(p^{m}) mod p^{n} has {count} elements; too many to materialize")
    out = []
    step = p**m
    for a in units:
        for d in units:
            for b in range(pn):
                for c0 in range(0, pn, step):
                    out.append(MatPn(p, n, a, b, c0, d))
    return out


def enumerate_Kg(g: MatPn) -> list[MatPn]:
    """K_g = g^{-1} K0(p^n) g  intersect  K0(p^n), by direct enumeration when
    p^n <= 128, else by the closed-form parametrization (cross-checked by
    random sampling)."""
    p, n = g.p, g.n
    pn = p**n
    gi = g.inv()
    if pn <= K0_MATERIALIZE_LIMIT:
        return [k for k in enumerate_K0(p, n) if in_K0(g @ k @ gi)]
    return _Kg_closed_form(g)


def _Kg_closed_form(g: MatPn) -> list[MatPn]:
    """Closed form for the standard representatives.

    For g = y(p^m) with m < n, conjugating k = (a, b; c, d) gives lower-left
    c + p^m (a - d - p^m b), so k is in K_g iff a - d - p^m b = 0 mod p^{n-m}.
    For g = w(1) the condition is b = 0 mod p^n; the identity gives all of K0.
    """
    p, n = g.p, g.n
    pn = p**n
    lab = double_coset_label(g)
    units = [u for u in range(pn) if u % p != 0]
    out = []
    if lab == f"y{n}":
        raise ValueError("K_g for the identity class is all of K0; enumerate_K0 covers it")
    if lab == "w":
        for a in units:
            for d in units:
                out.append(MatPn(p, n, a, 0, 0, d))
        return out
    m = int(lab[1:])
    q = p ** (n - m)
    for a in units:
        for d in units:
            for b in range(pn):
                if (a - d - p**m * b) % q == 0:
                    out.append(MatPn(p, n, a, b, 0, d))
    return out


def Kg_condition_closed_form(g: MatPn, k: MatPn) -> bool:
    """Membership test for K_g without enumeration (g a standard rep)."""
    p, n = g.p, g.n
    lab = double_coset_label(g)
    if not in_K0(k):
        return False
    if lab == f"y{n}":
        return True
    if lab == "w":
        return k.b % k.pn == 0
    m = int(lab[1:])
    return (k.a - k.d - p**m * k.b) % p ** (n - m) == 0
