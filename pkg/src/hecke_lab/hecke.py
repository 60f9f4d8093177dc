"""The twisted double-coset convolution algebra on K0(p^n)\\GL2(Z/p^n)/K0(p^n).

Basis functions are chi-twisted indicators of supported double cosets: V_j on
the y(p^j) class (j = r, ..., n where r is the conductor exponent of chi) and,
for trivial chi only, U0 on the w class.  V_n is the indicator of K0(p^n)
itself and is the identity of the algebra.  Convolution is the finite coset
sum with K0(p^n) normalized to mass 1, so all structure constants are exact
cyclotomic integers (plain integers on this basis).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .characters import PChar
from .cosets import (
    MatPn,
    all_labels,
    class_left_reps,
    class_right_reps,
    coset_table,
    double_coset_label,
    enumerate_Kg,
    identity as mat_identity,
    label_rep,
)
from .cyclotomic import CycNum
from .report import Assertion, Report, check, check_bool, timed


class AlgebraError(ValueError):
    pass


EXHAUSTIVE_SUPPORT_LIMIT = 27


def is_supported(g: MatPn, chi: PChar) -> bool:
    """Does the chi-twisted indicator extend to the double coset of g?

    The criterion: chi(g k g^{-1}) = chi(k) for every k in
    K_g = g^{-1} K0 g  intersect  K0.  Checked by direct enumeration of K_g at
    small size and through the closed-form parametrization of K_g otherwise
    (the lower-right entry of g k g^{-1} is d + p^m b for g = y(p^m)).
    """
    p, n = g.p, g.n
    pn = p**n
    lab = double_coset_label(g)
    if lab == f"y{n}":
        return True
    if pn <= EXHAUSTIVE_SUPPORT_LIMIT:
        gi = g.inv()
        for k in enumerate_Kg(g):
            if chi.value_on_matrix(g @ k @ gi) != chi.value_on_matrix(k):
                return False
        return True
    vexp = chi.exponent_table()
    units = np.arange(pn)[np.arange(pn) % p != 0]
    if lab == "w":
        return bool(np.all(vexp[units] == 0))
    m = int(lab[1:])
    b = np.arange(pn)
    shifted = (units[:, None] + p**m * b[None, :]) % pn
    return bool(np.all(vexp[shifted] == vexp[units][:, None]))


def supported_basis(p: int, n: int, chi: PChar) -> list[str]:
    """Labels of supported double cosets, in canonical order."""
    r = chi.conductor_exponent
    if r == 0:
        return ["w"] + [f"y{j}" for j in range(1, n + 1)]
    return [f"y{j}" for j in range(r, n + 1)]


def basis_value(chi: PChar, lab: str, g: MatPn) -> CycNum:
    """Closed-form value of the basis function for `lab` at g.

    Writing g = k0 * rep(coset of g) puts the lower-right (for y classes) or
    lower-left (for the w class) entry of g into the chi slot; elements off
    the double coset give 0.
    """
    if double_coset_label(g) != lab:
        return chi.field.zero
    if lab == "w":
        return chi(g.c)
    return chi(g.d)


class HeckeElem:
    """Element of the algebra: exact coefficients over supported labels."""

    __slots__ = ("p", "n", "chi", "coeffs")

    def __init__(self, p: int, n: int, chi: PChar, coeffs: dict[str, CycNum]):
        self.p = p
        self.n = n
        self.chi = chi
        allowed = set(supported_basis(p, n, chi))
        clean = {}
        for lab, c in coeffs.items():
            if lab not in allowed:
                raise AlgebraError(f"label {lab} is not supported for this character")
            if isinstance(c, (int, Fraction)):
                c = chi.field.from_rational(c)
            if not c.is_zero():
                clean[lab] = c
        self.coeffs = clean

    # -- construction ------------------------------------------------------

    @classmethod
    def basis(cls, p: int, n: int, chi: PChar, lab: str) -> "HeckeElem":
        return cls(p, n, chi, {lab: chi.field.one})

    @classmethod
    def zero(cls, p: int, n: int, chi: PChar) -> "HeckeElem":
        return cls(p, n, chi, {})

    @classmethod
    def identity(cls, p: int, n: int, chi: PChar) -> "HeckeElem":
        return cls.basis(p, n, chi, f"y{n}")

    # -- arithmetic --------------------------------------------------------

    def _require_same(self, other: "HeckeElem"):
        if (self.p, self.n) != (other.p, other.n) or self.chi != other.chi:
            raise AlgebraError("mismatched algebra parameters")

    def __add__(self, other: "HeckeElem") -> "HeckeElem":
        self._require_same(other)
        out = dict(self.coeffs)
        for lab, c in other.coeffs.items():
            out[lab] = out[lab] + c if lab in out else c
        return HeckeElem(self.p, self.n, self.chi, out)

    def __sub__(self, other: "HeckeElem") -> "HeckeElem":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "HeckeElem":
        if isinstance(scalar, (int, Fraction, CycNum)):
            return HeckeElem(
                self.p, self.n, self.chi, {lab: c * scalar for lab, c in self.coeffs.items()}
            )
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, HeckeElem):
            return convolve(self, other)
        return self.__rmul__(other)

    def __eq__(self, other):
        if not isinstance(other, HeckeElem):
            return NotImplemented
        return (self.p, self.n) == (other.p, other.n) and self.chi == other.chi and \
            self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.n, self.chi, tuple(sorted(self.coeffs.items(), key=lambda t: t[0]))))

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, lab: str) -> CycNum:
        return self.coeffs.get(lab, self.chi.field.zero)

    def __repr__(self):
        if not self.coeffs:
            return "HeckeElem(0)"
        parts = [f"{c!r}*{lab}" for lab, c in sorted(self.coeffs.items())]
        return "HeckeElem(" + " + ".join(parts) + ")"

    def pretty(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for lab in sorted(self.coeffs):
            c = self.coeffs[lab]
            cs = str(c.as_rational()) if c.is_rational() else repr(c)
            parts.append(f"({cs})*{lab}")
        return " + ".join(parts)


def y_element(p: int, n: int, chi: PChar, ell: int) -> HeckeElem:
    """Y_ell = sum of V_i over ell <= i <= n; requires max(r, 1) <= ell <= n
    (the v_p(c) = 0 stratum is the w class, never part of a Y)."""
    r = max(chi.conductor_exponent, 1)
    if not r <= ell <= n:
        raise AlgebraError(f"Y_{ell} undefined: need {r} <= ell <= {n}")
    one = chi.field.one
    return HeckeElem(p, n, chi, {f"y{i}": one for i in range(ell, n + 1)})


@lru_cache(maxsize=None)
def _basis_product_cached(p: int, n: int, chi: PChar, lab1: str, lab2: str) -> tuple:
    prod = _basis_product(p, n, chi, lab1, lab2)
    return tuple(sorted(prod.items()))


def _basis_product(p: int, n: int, chi: PChar, lab1: str, lab2: str) -> dict[str, CycNum]:
    """Convolution of two basis functions, evaluated at every double-coset
    representative via the right-coset sum; off-support values must vanish.

    Each nonzero term is a root of unity, so the sum is accumulated as an
    exponent histogram and collapsed to a field element once per target.
    """
    reps1 = class_right_reps(p, n, lab1)
    vexp = chi.exponent_table()
    m = chi.field.order
    out: dict[str, CycNum] = {}
    supported = set(supported_basis(p, n, chi))
    for lab_h in all_labels(p, n):
        h = label_rep(p, n, lab_h)
        hist = np.zeros(m, dtype=np.int64)
        for a in reps1:
            e1 = int(vexp[a.c if lab1 == "w" else a.d])
            x = a.inv() @ h
            if double_coset_label(x) != lab2:
                continue
            e2 = int(vexp[x.c if lab2 == "w" else x.d])
            if e1 < 0 or e2 < 0:
                raise AssertionError("twist evaluated at a non-unit entry")
            hist[(e1 + e2) % m] += 1
        if not hist.any():
            continue
        total = chi.field.from_exponent_counts(hist)
        if total.is_zero():
            continue
        if lab_h not in supported:
            raise AlgebraError(
                f"convolution {lab1}*{lab2} leaks onto unsupported class {lab_h}: {total!r}"
            )
        out[lab_h] = total
    return out


def convolve(f1: HeckeElem, f2: HeckeElem) -> HeckeElem:
    """Exact convolution via cached basis products; bilinear."""
    f1._require_same(f2)
    acc: dict[str, CycNum] = {}
    for l1, c1 in f1.coeffs.items():
        for l2, c2 in f2.coeffs.items():
            c12 = c1 * c2
            for lab, c in _basis_product_cached(f1.p, f1.n, f1.chi, l1, l2):
                acc[lab] = acc[lab] + c12 * c if lab in acc else c12 * c
    return HeckeElem(f1.p, f1.n, f1.chi, acc)


def convolve_mirrored(f1: HeckeElem, f2: HeckeElem) -> HeckeElem:
    """Same convolution through the mirrored sum over left-coset
    representatives of the support of f2; used as a consistency check."""
    f1._require_same(f2)
    p, n, chi = f1.p, f1.n, f1.chi
    out: dict[str, CycNum] = {}
    supported = set(supported_basis(p, n, chi))
    for lab_h in all_labels(p, n):
        h = label_rep(p, n, lab_h)
        total = chi.field.zero
        for l2, c2 in f2.coeffs.items():
            for b in class_left_reps(p, n, l2):
                v2 = basis_value(chi, l2, b)
                if v2.is_zero():
                    continue
                x = h @ b.inv()
                lab_x = double_coset_label(x)
                c1 = f1.coeffs.get(lab_x)
                if c1 is None:
                    continue
                v1 = basis_value(chi, lab_x, x)
                total = total + c1 * v1 * c2 * v2
        if total.is_zero():
            continue
        if lab_h not in supported:
            raise AlgebraError(f"mirrored convolution leaks onto {lab_h}")
        out[lab_h] = total
    return HeckeElem(p, n, chi, out)


# ---------------------------------------------------------------------------
# Structure table
# ---------------------------------------------------------------------------


@dataclass
class StructTable:
    p: int
    n: int
    char_spec: dict
    labels: list[str]
    constants: dict  # (lab_i, lab_j) -> {lab_k: CycNum}

    def product(self, li: str, lj: str) -> dict:
        return self.constants[(li, lj)]

    def is_commutative(self) -> bool:
        for li in self.labels:
            for lj in self.labels:
                if self.constants[(li, lj)] != self.constants[(lj, li)]:
                    return False
        return True

    def to_jsonable(self) -> dict:
        def enc(c: CycNum):
            return {"order": c.field.order, "coords": [str(q) for q in c.coeffs]}

        return {
            "format_version": 1,
            "p": self.p,
            "n": self.n,
            "character": self.char_spec,
            "labels": self.labels,
            "constants": [
                {"i": li, "j": lj, "result": {lk: enc(c) for lk, c in prod.items()}}
                for (li, lj), prod in sorted(self.constants.items())
            ],
        }

    @classmethod
    def from_jsonable(cls, doc: dict, field) -> "StructTable":
        def dec(obj) -> CycNum:
            if obj["order"] != field.order:
                raise ValueError("cyclotomic order mismatch in stored table")
            return CycNum(field, tuple(Fraction(s) for s in obj["coords"]))

        constants = {}
        for item in doc["constants"]:
            constants[(item["i"], item["j"])] = {k: dec(v) for k, v in item["result"].items()}
        return cls(
            p=doc["p"],
            n=doc["n"],
            char_spec=doc["character"],
            labels=list(doc["labels"]),
            constants=constants,
        )


def structure_table(p: int, n: int, chi: PChar, cache=None) -> StructTable:
    """Structure constants over the supported basis.  If a cache is supplied,
    a stored table is reused (and verification always recomputes instead)."""
    char_spec = {"modulus": p**n, "conrey": chi.conrey_index()}
    key = f"struct_p{p}_n{n}_conrey{char_spec['conrey']}"
    if cache is not None:
        doc = cache.get(key)
        if doc is not None:
            try:
                return StructTable.from_jsonable(doc, chi.field)
            except (KeyError, ValueError):
                pass  # fall through to recompute
    labels = supported_basis(p, n, chi)
    constants = {
        (li, lj): dict(_basis_product_cached(p, n, chi, li, lj)) for li in labels for lj in labels
    }
    table = StructTable(p=p, n=n, char_spec=char_spec, labels=labels, constants=constants)
    if cache is not None:
        cache.put(key, table.to_jsonable())
    return table


# ---------------------------------------------------------------------------
# Relation audit
# ---------------------------------------------------------------------------


def verify_relations(p: int, n: int, chi: PChar, cross_check: Optional[bool] = None) -> Report:
    """Audit every algebra identity by exact convolution.

    cross_check: also compare against the brute-force whole-group convolution
    oracle (defaults to on when p^n <= 27).
    """
    rep = Report(meta={"p": p, "n": n, "conrey": chi.conrey_index(), "r": chi.conductor_exponent})
    r = chi.conductor_exponent
    field = chi.field
    basis = supported_basis(p, n, chi)
    tag = f"p{p}.n{n}.chi{chi.conrey_index()}"

    def B(lab):
        return HeckeElem.basis(p, n, chi, lab)

    def Y(ell):
        return y_element(p, n, chi, ell)

    e = HeckeElem.identity(p, n, chi)

    with timed() as t:
        expected_dim = (n - r + 1) if r > 0 else n + 1
    check(rep, f"{tag}.dimension", expected_dim, len(basis), "formula", t.elapsed)

    with timed() as t:
        ok = all(convolve(e, B(l)) == B(l) and convolve(B(l), e) == B(l) for l in basis)
    check_bool(rep, f"{tag}.identity", ok, "definition", t.elapsed)

    with timed() as t:
        sym = all(
            convolve(B(a), B(b)) == convolve(B(b), B(a)) for a in basis for b in basis
        )
    check_bool(rep, f"{tag}.commutative", sym, "formula", t.elapsed)

    with timed() as t:
        ok = True
        detail = ""
        for a in basis:
            for b in basis:
                lhs = convolve(B(a), B(b))
                rhs = convolve_mirrored(B(a), B(b))
                if lhs != rhs:
                    ok = False
                    detail = f"mirror mismatch at {a}*{b}"
    check_bool(rep, f"{tag}.mirrored-convolution", ok, "oracle", t.elapsed, detail=detail)

    lo = max(r, 1)
    # V_l * V_l and the quadratic consequence
    for ell in range(lo, n):
        c = p ** (n - ell - 1)
        with timed() as t:
            got = convolve(B(f"y{ell}"), B(f"y{ell}"))
            want = HeckeElem(
                p, n, chi,
                {f"y{i}": field.from_rational(c * (p - 1)) for i in range(ell + 1, n + 1)}
                | {f"y{ell}": field.from_rational(c * (p - 2))},
            )
        check(
            rep, f"{tag}.Vsquare.l{ell}", want.pretty(), got.pretty(), "formula", t.elapsed
        )
        with timed() as t:
            lhs = convolve(
                B(f"y{ell}") - c * (p - 1) * e, B(f"y{ell}") + Y(ell + 1)
            )
        check_bool(
            rep, f"{tag}.Vquadratic.l{ell}", lhs.is_zero(), "formula", t.elapsed,
            expected="0", computed=lhs.pretty(),
        )

    # V_l * V_j = p^{n-j-1}(p-1) V_l for l < j < n, both orders
    for ell in range(lo, n):
        for j in range(ell + 1, n):
            cj = p ** (n - j - 1) * (p - 1)
            with timed() as t:
                got1 = convolve(B(f"y{ell}"), B(f"y{j}"))
                got2 = convolve(B(f"y{j}"), B(f"y{ell}"))
                want = cj * B(f"y{ell}")
            check_bool(
                rep, f"{tag}.Vmixed.l{ell}.j{j}", got1 == want and got2 == want,
                "formula", t.elapsed, expected=want.pretty(),
                computed=f"{got1.pretty()} / {got2.pretty()}",
            )

    # Y_j * Y_l = p^{n-j} Y_l for max(r,1) <= l <= j <= n, both orders
    for ell in range(lo, n + 1):
        for j in range(ell, n + 1):
            with timed() as t:
                want = p ** (n - j) * Y(ell)
                ok = convolve(Y(j), Y(ell)) == want and convolve(Y(ell), Y(j)) == want
            check_bool(rep, f"{tag}.Yproduct.j{j}.l{ell}", ok, "formula", t.elapsed,
                       expected=want.pretty())

    # idempotents
    for ell in range(lo, n + 1):
        with timed() as t:
            el = Fraction(1, p ** (n - ell)) * Y(ell)
            ok = convolve(el, el) == el
        check_bool(rep, f"{tag}.idempotent.l{ell}", ok, "formula", t.elapsed)

    if r == 0:
        U = B("w")
        with timed() as t:
            want = p ** (n - 1) * (p - 1) * U + p**n * Y(1)
            got = convolve(U, U)
        check(rep, f"{tag}.Usquare", want.pretty(), got.pretty(), "formula", t.elapsed)
        for ell in range(1, n + 1):
            with timed() as t:
                want = p ** (n - ell) * U
                ok = convolve(U, Y(ell)) == want and convolve(Y(ell), U) == want
            check_bool(rep, f"{tag}.UY.l{ell}", ok, "formula", t.elapsed, expected=want.pretty())
        with timed() as t:
            cubic = convolve(convolve(U, U - p**n * e), U + p ** (n - 1) * e)
        check_bool(rep, f"{tag}.Ucubic", cubic.is_zero(), "formula", t.elapsed,
                   expected="0", computed=cubic.pretty())
        if n == 1:
            with timed() as t:
                quad = convolve(U + e, U - p * e)
            check_bool(rep, f"{tag}.Uquadratic.n1", quad.is_zero(), "formula", t.elapsed,
                       expected="0", computed=quad.pretty())

    if cross_check is None:
        cross_check = p**n <= 27
    if cross_check:
        from .groupconv import cross_check_structure

        cross_check_structure(rep, p, n, chi, tag)

    return rep
