"""Operator matrices on cusp-form spaces.

Operators act through the weight-k slash action.  A matrix is recovered by
evaluating the basis at well-conditioned sample points in the upper half
plane and solving a least-squares system; columns are coordinates of the
transformed basis vectors.  Every matrix carries its solve residual and
conditioning so downstream checks can refuse unreliable data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from .qexp import QExpansion, evaluate_many, op_Up, op_Utilde
from .spaces import CuspSpace

CONDITION_LIMIT = 1e8
RESIDUAL_TOL = 1e-6
IMAG_FLOOR = 0.02
SAMPLE_BAND = (0.08, 0.6)


class SamplingError(RuntimeError):
    """No sample set satisfying the half-plane constraints was found."""


@dataclass
class OpMatrix:
    matrix: np.ndarray
    residual: float
    conditioning: float
    poisoned: bool
    label: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _combine(matrix: np.ndarray, parts: list[OpMatrix], label: str) -> OpMatrix:
    res = sum(p.residual for p in parts)
    cond = max((p.conditioning for p in parts), default=1.0)
    poisoned = any(p.poisoned for p in parts)
    return OpMatrix(matrix, res, cond, poisoned, label)


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def atkin_lehner_matrix(p: int, n: int, N: int) -> np.ndarray:
    """Integer matrix (p^n b, 1; N c, p^n) of determinant p^n normalizing
    Gamma_0(N), with |b| minimal."""
    q = p**n
    if n < 1 or N % q != 0 or (N // q) % p == 0:
        raise ValueError(f"p^n = {p}^{n} does not exactly divide N = {N}")
    M = N // q
    if M == 1:
        beta = 0
    else:
        beta = pow(q % M, -1, M)
        if beta > M // 2:
            beta -= M
    gamma = (q * q * beta - q) // N
    return np.array([[q * beta, 1], [N * gamma, q]], dtype=np.int64)


def slash_evaluate(f: QExpansion, A, points: np.ndarray) -> np.ndarray:
    """Values of f|_k A at the given points (det A > 0)."""
    (a, b), (c, d) = np.asarray(A)
    det = int(a) * int(d) - int(b) * int(c)
    if det <= 0:
        raise ValueError("slash requires positive determinant")
    z = np.asarray(points, dtype=np.complex128)
    den = c * z + d
    w = (a * z + b) / den
    vals = evaluate_many([f], w)[:, 0]
    return det ** (f.weight / 2) * den ** (-f.weight) * vals


def _feasible(z: np.ndarray, mats: list[np.ndarray], t: float) -> np.ndarray:
    ok = np.ones(len(z), dtype=bool)
    for A in mats:
        (a, b), (c, d) = A
        det = int(a) * int(d) - int(b) * int(c)
        ok &= det * z.imag / np.abs(c * z + d) ** 2 >= t
    return ok


def sample_points(
    mats: list[np.ndarray],
    count: int,
    t_img: float = IMAG_FLOOR,
    band: tuple[float, float] = SAMPLE_BAND,
    skip: int = 0,
) -> np.ndarray:
    """Deterministic low-discrepancy points z with Im(Az) >= t_img for every
    matrix A.  Starts from the standard band; if the constraints leave no
    room there, the floor is relaxed toward t_img and finally the search is
    recentred on the tightest feasibility disk."""
    y_floor = t_img
    for A in mats:
        (a, b), (c, d) = A
        if c == 0:
            det = int(a) * int(d)
            y_floor = max(y_floor, t_img * int(d) ** 2 / det)
    boxes = [
        (-0.5, 0.5, max(band[0], y_floor), band[1]),
        (-0.5, 0.5, y_floor, band[1]),
    ]
    tight = None
    for A in mats:
        (a, b), (c, d) = A
        if c != 0:
            det = int(a) * int(d) - int(b) * int(c)
            R = det / (2 * t_img * int(c) ** 2)
            if tight is None or R < tight[1]:
                tight = (-d / c, R)
    if tight is not None:
        x0, R = tight
        boxes.append((x0 - R, x0 + R, max(y_floor, 0.02 * R), 2 * R))

    for x_lo, x_hi, y_lo, y_hi in boxes:
        if y_lo >= y_hi or x_lo >= x_hi:
            continue
        engine = qmc.Halton(d=2, scramble=False)
        if skip:
            engine.fast_forward(skip * 65537)
        found: list[np.ndarray] = []
        total = 0
        while total < 40960:
            raw = engine.random(512)
            total += 512
            pts = qmc.scale(raw, [x_lo, y_lo], [x_hi, y_hi])
            z = pts[:, 0] + 1j * pts[:, 1]
            z = z[_feasible(z, mats, t_img)]
            if len(z):
                found.append(z)
            if sum(len(c) for c in found) >= count:
                return np.concatenate(found)[:count]
    raise SamplingError(f"no feasible sample region for {len(mats)} constraints")


def op_matrix(
    space: CuspSpace,
    terms: list[tuple[complex, np.ndarray]],
    label: str = "",
    codomain: CuspSpace | None = None,
    t_img: float = IMAG_FLOOR,
    count: int | None = None,
    max_attempts: int = 5,
) -> OpMatrix:
    """Matrix of sum(coef * |_k A) as a map from space to codomain
    (default: space itself).  Columns are codomain coordinates of the
    transformed domain basis."""
    target = codomain if codomain is not None else space
    if space.dim == 0 or target.dim == 0:
        return OpMatrix(
            np.zeros((target.dim, space.dim), dtype=np.complex128),
            0.0, 1.0, False, label,
        )
    k = space.weight
    if count is None:
        count = max(2 * target.dim, target.dim + 3)
    mats = [np.asarray(A) for _, A in terms]

    best = None
    for attempt in range(max_attempts):
        pts = sample_points(mats, count, t_img=t_img, skip=attempt)
        V = evaluate_many(target.basis, pts)
        condV = float(np.linalg.cond(V))
        if best is None or condV < best[2]:
            best = (pts, V, condV)
        if condV < CONDITION_LIMIT:
            break
    pts, V, condV = best

    W = np.zeros((len(pts), space.dim), dtype=np.complex128)
    for coef, A in terms:
        (a, b), (c, d) = np.asarray(A)
        det = int(a) * int(d) - int(b) * int(c)
        if det <= 0:
            raise ValueError("operator term has nonpositive determinant")
        den = c * pts + d
        w = (a * pts + b) / den
        jac = det ** (k / 2) * den ** (-k)
        W += coef * (evaluate_many(space.basis, w) * jac[:, None])

    X, *_ = np.linalg.lstsq(V, W, rcond=None)
    scale = max(np.linalg.norm(W), np.linalg.norm(V), 1e-30)
    res = float(np.linalg.norm(V @ X - W) / scale)
    poisoned = condV >= CONDITION_LIMIT or res > RESIDUAL_TOL
    return OpMatrix(X, res, condV, poisoned, label, {"points": pts})


def op_W(space: CuspSpace, p: int, codomain: CuspSpace | None = None) -> OpMatrix:
    """Atkin-Lehner involution at the full p-power part of the level."""
    n = _vp(space.level, p)
    A = atkin_lehner_matrix(p, n, space.level)
    return op_matrix(space, [(1.0, A)], label=f"W[{p**n}]", codomain=codomain)


def _crt_lift(r1: int, m1: int, r2: int, m2: int) -> int:
    """Unit u with u = r1 (mod m1) and u = r2 (mod m2), coprime moduli."""
    if m1 == 1:
        return r2 % m2 if m2 > 1 else 1
    if m2 == 1:
        return r1 % m1
    u = r1 + m1 * (((r2 - r1) * pow(m1, -1, m2)) % m2)
    return u % (m1 * m2)


def local_value(chi, q: int, x: int) -> complex:
    """Value at x of the modulus-q local factor of chi."""
    M = chi.modulus // q
    if math.gcd(q, M) != 1:
        raise ValueError(f"{q} is not an exact modulus factor of {chi.modulus}")
    return complex(chi.value_complex(_crt_lift(x % q, q, 1, M)))


def complement_value(chi, q: int, x: int) -> complex:
    """Value at x of the away-from-q factor of chi (modulus N/q)."""
    M = chi.modulus // q
    if math.gcd(q, M) != 1:
        raise ValueError(f"{q} is not an exact modulus factor of {chi.modulus}")
    return complex(chi.value_complex(_crt_lift(1, q, x % M, M)))


def w_square_scalar(space: CuspSpace, p: int) -> complex:
    """Scalar by which W_{p^n} applied twice acts: chi_p(-1) chi_M(p^n)."""
    q = p ** _vp(space.level, p)
    chi = space.char
    return local_value(chi, q, -1) * complement_value(chi, q, q)


def op_U(space: CuspSpace, p: int, normalized: bool = True, route: str = "coeff") -> OpMatrix:
    """Matrix of the p-th coefficient-shift operator.  normalized=True gives
    the variant with b_n = p^(1-k/2) a_{pn}, else b_n = p^(k/2) a_{pn}.
    route='coeff' solves against stored coefficients; route='sampled' uses
    the slash decomposition sum_s f|(1, s; 0, p)."""
    k = space.weight
    if route == "sampled":
        coef = 1.0 if normalized else float(p) ** (k - 1)
        terms = [
            (coef, np.array([[1, s], [0, p]], dtype=np.int64)) for s in range(p)
        ]
        return op_matrix(space, terms, label=f"U[{p}]{'~' if normalized else ''}")
    if route != "coeff":
        raise ValueError(f"unknown route {route!r}")
    if space.dim == 0:
        return OpMatrix(np.zeros((0, 0), dtype=np.complex128), 0.0, 1.0, False, f"U[{p}]")
    cols = []
    worst = 0.0
    for f in space.basis:
        g = op_Utilde(f, p) if normalized else op_Up(f, p)
        x, mis = space.coordinates(g.coeffs)
        cols.append(x)
        worst = max(worst, mis / max(float(np.linalg.norm(g.coeffs)), 1.0))
    A = space.coeff_matrix()[:, : space.prec // p].T
    condA = float(np.linalg.cond(A))
    mat = np.stack(cols, axis=1)
    return OpMatrix(
        mat, worst, condA, condA >= CONDITION_LIMIT or worst > RESIDUAL_TOL,
        f"U[{p}]{'~' if normalized else ''}",
    )


def op_Q(space: CuspSpace, p: int) -> OpMatrix:
    """Involution-normalized operator at an exact prime divisor p of the
    level whose local character factor is trivial: the normalized shift
    composed with the Atkin-Lehner map, scaled by the conjugate away-part
    value at p."""
    N = space.level
    if _vp(N, p) != 1:
        raise ValueError(f"p = {p} must exactly divide the level {N}")
    if _local_conductor_exponent(space.char, p) != 0:
        raise ValueError(f"character has a nontrivial factor at {p}")
    scalar = np.conj(complement_value(space.char, p, p))
    Wop = op_W(space, p)
    Ut = op_U(space, p, normalized=True, route="coeff")
    return _combine(scalar * (Ut.matrix @ Wop.matrix), [Ut, Wop], f"Q[{p}]")


def op_Qprime(space: CuspSpace, p: int) -> OpMatrix:
    """Conjugate of op_Q by the Atkin-Lehner involution."""
    Q = op_Q(space, p)
    Wop = op_W(space, p)
    w_inv = np.conj(w_square_scalar(space, p)) * Wop.matrix
    return _combine(Wop.matrix @ Q.matrix @ w_inv, [Q, Wop], f"Q'[{p}]")


def _unit_lifts(m: int, p: int) -> list[int]:
    """Smallest positive lifts of the units modulo m = p^t."""
    return [s for s in range(1, m) if s % p != 0]


def op_S(space: CuspSpace, p: int, r: int | None = None) -> OpMatrix:
    """Level-raising survey operator at p^n || level: identity plus the
    chi-twisted slash sum over lower-triangular-modulo-p^j matrices with
    left column divisible by p^j M, for j from r to n-1."""
    N = space.level
    n = _vp(N, p)
    if n < 1:
        raise ValueError(f"p = {p} does not divide the level {N}")
    if r is None:
        r = n - 1
    q = p**n
    M = N // q
    c_exp = _local_conductor_exponent(space.char, p)
    if not c_exp <= r <= n - 1:
        raise ValueError(f"need conductor exponent {c_exp} <= r <= {n - 1}, got r = {r}")
    terms: list[tuple[complex, np.ndarray]] = [
        (1.0, np.array([[1, 0], [0, 1]], dtype=np.int64))
    ]
    chi = space.char
    for j in range(r, n):
        c = p**j * M
        for s in _unit_lifts(p ** (n - j), p):
            d = p ** (n - j) - s * M
            a = pow(d % c, -1, c) if c > 1 else 0
            b = (a * d - 1) // c
            if a * d - b * c != 1:
                raise AssertionError("determinant normalization failed")
            scalar = np.conj(complex(chi.value_complex(d % N)))
            terms.append((scalar, np.array([[a, b], [c, d]], dtype=np.int64)))
    return op_matrix(space, terms, label=f"S[{q},{r}]")


def _local_conductor_exponent(chi, p: int) -> int:
    cond = chi.conductor
    e = 0
    while cond % p == 0:
        cond //= p
        e += 1
    return e


def op_Sprime(
    space: CuspSpace, p: int, r: int | None = None,
    flipped_space: CuspSpace | None = None,
) -> OpMatrix:
    """Conjugate of op_S by the Atkin-Lehner involution.  When the character
    has a non-real factor at p the conjugation passes through the space with
    that factor inverted; it must then be supplied as flipped_space."""
    chi = space.char
    flip = chi.flip_at(p)
    if flip == chi:
        inner = space
    else:
        if flipped_space is None:
            raise ValueError("character flips at p: flipped_space is required")
        if (flipped_space.level, flipped_space.weight) != (space.level, space.weight):
            raise ValueError("flipped_space has mismatched level or weight")
        if flipped_space.char != flip:
            raise ValueError("flipped_space carries the wrong character")
        inner = flipped_space
    W_in = op_W(space, p, codomain=inner)
    S_in = op_S(inner, p, r)
    W_out = op_W(inner, p, codomain=space)
    w_inv = np.conj(w_square_scalar(space, p)) * W_in.matrix
    mat = W_out.matrix @ S_in.matrix @ w_inv
    n = _vp(space.level, p)
    if r is None:
        r = n - 1
    return _combine(mat, [W_in, S_in, W_out], f"S'[{p**n},{r}]")


@dataclass
class Eigenspace:
    basis: np.ndarray
    gap: float
    sigmas: np.ndarray
    eigenvalue: complex


def nullspace(A: np.ndarray, rtol: float = 1e-7) -> tuple[np.ndarray, float, np.ndarray]:
    """Orthonormal numerical null space of a (possibly stacked) matrix.
    Returns (basis, gap, singular values); gap is the ratio between the
    smallest retained and largest discarded singular values, with safe
    conventions when either side is empty."""
    A = np.asarray(A)
    d = A.shape[1]
    if d == 0:
        return np.zeros((0, 0), dtype=np.complex128), math.inf, np.zeros(0)
    _, s, Vh = np.linalg.svd(A)
    scale = max(float(s[0]), 1.0) if len(s) else 1.0
    t = int(np.sum(s <= rtol * scale)) + max(0, d - len(s))
    asc = np.sort(s)
    num = float(asc[t]) if t < len(asc) else max(scale, 1.0)
    den = float(asc[min(t, len(asc)) - 1]) if t > 0 else rtol * scale
    basis = Vh[d - t :].conj().T if t else np.zeros((d, 0), dtype=np.complex128)
    return basis, num / max(den, 1e-300), s


def eigenspace(op, lam: complex, rtol: float = 1e-7) -> Eigenspace:
    """Orthonormal numerical eigenspace of an operator matrix, via the SVD
    null space of (A - lam I).  gap is the separation ratio between the
    smallest retained and largest discarded singular values."""
    A = op.matrix if isinstance(op, OpMatrix) else np.asarray(op)
    d = A.shape[0]
    if d == 0:
        return Eigenspace(np.zeros((0, 0), dtype=np.complex128), math.inf, np.zeros(0), lam)
    basis, gap, s = nullspace(A - lam * np.eye(d), rtol)
    return Eigenspace(basis, gap, s, lam)


def quad_ratio(op, root_a: complex, root_b: complex) -> float:
    """Relative size of (A - a)(A - b), normalized by max(1, |A|)^2 so the
    measure stays finite when A itself vanishes."""
    A = op.matrix if isinstance(op, OpMatrix) else np.asarray(op)
    if A.shape[0] == 0:
        return 0.0
    eye = np.eye(A.shape[0])
    prod = (A - root_a * eye) @ (A - root_b * eye)
    return float(np.linalg.norm(prod, 2) / max(1.0, np.linalg.norm(A, 2)) ** 2)
