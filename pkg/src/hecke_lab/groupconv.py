"""Brute-force convolution oracle over the full finite group.

For small moduli (p^n <= 27) the whole of GL2(Z/p^n) fits comfortably in
memory, so convolution can be computed from its definition,

    (f1 * f2)(h) = (1/|K0|) * sum over g in G of f1(g) f2(g^{-1} h),

with no coset theory at all.  Values are tracked as root-of-unity exponents
and accumulated with a histogram, which keeps everything exact.  This module
deliberately shares no logic with the coset-sum route it checks.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .characters import PChar
from .cosets import MatPn, all_labels, label_rep
from .cyclotomic import CycNum
from .report import Report, check, timed

BRUTE_LIMIT = 27


class GroupTable:
    """Flat enumeration of GL2(Z/q) with packed-code index lookup."""

    def __init__(self, p: int, n: int):
        q = p**n
        if q > BRUTE_LIMIT:
            raise ValueError(f"brute-force table capped at modulus {BRUTE_LIMIT}")
        self.p, self.n, self.q = p, n, q
        rng = np.arange(q, dtype=np.int64)
        a, b, c, d = np.meshgrid(rng, rng, rng, rng, indexing="ij")
        a, b, c, d = (x.ravel() for x in (a, b, c, d))
        det = (a * d - b * c) % q
        keep = det % p != 0
        self.a, self.b, self.c, self.d = a[keep], b[keep], c[keep], d[keep]
        self.size = int(self.a.shape[0])
        self.codes = self.a + q * (self.b + q * (self.c + q * self.d))
        self.code_to_idx = np.full(q**4, -1, dtype=np.int64)
        self.code_to_idx[self.codes] = np.arange(self.size)

        unit_inv = np.zeros(q, dtype=np.int64)
        for u in range(q):
            if u % p != 0:
                unit_inv[u] = pow(u, -1, q)
        det = (self.a * self.d - self.b * self.c) % q
        dinv = unit_inv[det]
        # adjugate times inverse determinant
        self.ia = (self.d * dinv) % q
        self.ib = (-self.b * dinv) % q
        self.ic = (-self.c * dinv) % q
        self.id = (self.a * dinv) % q

        vpc = np.zeros(q, dtype=np.int64)
        for x in range(q):
            if x == 0:
                vpc[x] = n
            else:
                v = 0
                y = x
                while y % p == 0:
                    y //= p
                    v += 1
                vpc[x] = min(v, n)
        self.vpc = vpc[self.c]
        self.K0_size = q * (q - q // p) ** 2  # b free, a and d units, c = 0

        self._target_cache: dict[str, np.ndarray] = {}

    def label_array(self) -> np.ndarray:
        """Double-coset label per element, as vpc with 0 meaning the w class."""
        return self.vpc

    def index_of(self, g: MatPn) -> int:
        q = self.q
        code = g.a + q * (g.b + q * (g.c + q * g.d))
        idx = int(self.code_to_idx[code])
        if idx < 0:
            raise ValueError("matrix not invertible mod q")
        return idx

    def inv_times(self, h: MatPn) -> np.ndarray:
        """Index array of g^{-1} h over all g, cached per target."""
        key = f"{h.a},{h.b},{h.c},{h.d}"
        hit = self._target_cache.get(key)
        if hit is not None:
            return hit
        q = self.q
        pa = (self.ia * h.a + self.ib * h.c) % q
        pb = (self.ia * h.b + self.ib * h.d) % q
        pc = (self.ic * h.a + self.id * h.c) % q
        pd = (self.ic * h.b + self.id * h.d) % q
        idx = self.code_to_idx[pa + q * (pb + q * (pc + q * pd))]
        self._target_cache[key] = idx
        return idx


@lru_cache(maxsize=None)
def group_table(p: int, n: int) -> GroupTable:
    return GroupTable(p, n)


def double_coset_census(p: int, n: int) -> dict[str, int]:
    """Element count of each double coset, straight off the enumeration."""
    t = group_table(p, n)
    counts = np.bincount(t.vpc, minlength=n + 1)
    out = {"w": int(counts[0])}
    for j in range(1, n + 1):
        out[f"y{j}"] = int(counts[j])
    return out


def _value_exponents(t: GroupTable, chi: PChar, lab: str):
    """(mask, exponent) arrays for a twisted double-coset indicator."""
    vexp = chi.exponent_table()
    if lab == "w":
        mask = t.vpc == 0
        expo = np.where(mask, vexp[t.c], 0)
    else:
        j = int(lab[1:])
        mask = t.vpc == j
        expo = np.where(mask, vexp[t.d], 0)
    if np.any(expo[mask] < 0):
        raise AssertionError("twist evaluated at a non-unit entry")
    return mask, expo


def brute_convolve_labels(p: int, n: int, chi: PChar, lab1: str, lab2: str) -> dict[str, CycNum]:
    """Structure constants of one basis product from the whole-group sum."""
    t = group_table(p, n)
    m = chi.field.order
    mask1, e1 = _value_exponents(t, chi, lab1)
    mask2, e2 = _value_exponents(t, chi, lab2)
    out: dict[str, CycNum] = {}
    for lab_h in all_labels(p, n):
        h = label_rep(p, n, lab_h)
        idx = t.inv_times(h)
        both = mask1 & mask2[idx]
        if not np.any(both):
            continue
        te = (e1[both] + e2[idx][both]) % m
        counts = np.bincount(te, minlength=m)
        val = chi.field.from_exponent_counts(counts) * Fraction(1, t.K0_size)
        if not val.is_zero():
            out[lab_h] = val
    return out


def cross_check_structure(rep: Report, p: int, n: int, chi: PChar, tag: str) -> None:
    """Compare every basis product against the coset-sum route."""
    from .hecke import _basis_product_cached, supported_basis

    basis = supported_basis(p, n, chi)
    for l1 in basis:
        for l2 in basis:
            with timed() as t:
                want = dict(_basis_product_cached(p, n, chi, l1, l2))
                got = brute_convolve_labels(p, n, chi, l1, l2)
            same = set(want) == set(got) and all(want[k] == got[k] for k in want)
            check(
                rep,
                f"{tag}.bruteforce.{l1}x{l2}",
                True,
                same,
                "oracle",
                t.elapsed,
                detail="" if same else f"coset {want} vs group {got}",
            )
