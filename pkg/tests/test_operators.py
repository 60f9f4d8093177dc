import numpy as np
import pytest

from hecke_lab.operators import (
    SamplingError,
    atkin_lehner_matrix,
    eigenspace,
    nullspace,
    op_matrix,
    op_Q,
    op_Qprime,
    op_S,
    op_Sprime,
    op_U,
    op_W,
    quad_ratio,
    sample_points,
    slash_evaluate,
    w_square_scalar,
)
from hecke_lab.spaces import fixture_dir, load_space


@pytest.fixture(scope="module")
def sp11():
    return load_space(fixture_dir() / "N11k2c1.json")


@pytest.fixture(scope="module")
def sp21():
    return load_space(fixture_dir() / "N21k3c13.json")


@pytest.fixture(scope="module")
def sp16():
    return load_space(fixture_dir() / "N16k3c7.json")


def test_atkin_lehner_determinants():
    for p, n, N in [(11, 1, 11), (2, 1, 22), (11, 1, 22), (3, 2, 36), (2, 4, 16)]:
        A = atkin_lehner_matrix(p, n, N)
        q = p**n
        assert A[0, 0] % q == 0
        assert A[0, 1] == 1
        assert A[1, 0] % N == 0
        assert A[1, 1] == q
        det = int(A[0, 0]) * int(A[1, 1]) - int(A[0, 1]) * int(A[1, 0])
        assert det == q


def test_atkin_lehner_prime_level_identity():
    # at N = p the defining relation reads p^2 b - p c = p
    A = atkin_lehner_matrix(11, 1, 11)
    beta = int(A[0, 0]) // 11
    gamma = int(A[1, 0]) // 11
    assert 121 * beta - 11 * gamma == 11


def test_atkin_lehner_rejects_inexact():
    with pytest.raises(ValueError):
        atkin_lehner_matrix(2, 1, 12)  # 2^1 does not exactly divide 12
    with pytest.raises(ValueError):
        atkin_lehner_matrix(5, 1, 22)


def test_sample_points_deterministic_and_feasible():
    mats = [atkin_lehner_matrix(11, 1, 22)]
    pts1 = sample_points(mats, 8)
    pts2 = sample_points(mats, 8)
    assert np.array_equal(pts1, pts2)
    for A in mats:
        (a, b), (c, d) = A
        det = int(a) * int(d) - int(b) * int(c)
        im = det * pts1.imag / np.abs(c * pts1 + d) ** 2
        assert np.all(im >= 0.02)


def test_sample_points_infeasible():
    # contradictory translation constraints: c = 0 matrices forcing y above
    # the ceiling
    huge = np.array([[1, 0], [0, 10**6]])
    with pytest.raises(SamplingError):
        sample_points([huge], 4)


def test_slash_identity(sp11):
    z = np.array([0.1 + 0.35j, 0.4j])
    f = sp11.basis[0]
    ident = np.eye(2, dtype=np.int64)
    assert np.allclose(slash_evaluate(f, ident, z), slash_evaluate(f, 5 * ident, z))


def test_gamma0_automorphy(sp21):
    # f |_k gamma = chi(d) f for gamma in Gamma_0(N); chi(5) = -1 here
    from hecke_lab.qexp import evaluate

    f = sp21.basis[2]
    gamma = np.array([[17, 4], [21, 5]])
    assert gamma[0, 0] * gamma[1, 1] - gamma[0, 1] * gamma[1, 0] == 1
    z = np.array([-0.23 + 0.4j, -0.2 + 0.5j])
    lhs = slash_evaluate(f, gamma, z)
    chi_d = complex(sp21.char.value_complex(5))
    assert abs(chi_d + 1) < 1e-12
    assert np.allclose(lhs, chi_d * evaluate(f, z), atol=1e-9)


def test_w_square_is_scalar(sp21):
    W = op_W(sp21, 3)
    s = w_square_scalar(sp21, 3)
    dev = np.linalg.norm(W.matrix @ W.matrix - s * np.eye(sp21.dim))
    assert dev < 1e-9
    assert abs(abs(s) - 1) < 1e-12


def test_dual_route_shift(sp21):
    Us = op_U(sp21, 3, normalized=True, route="sampled")
    Uc = op_U(sp21, 3, normalized=True, route="coeff")
    assert np.linalg.norm(Us.matrix - Uc.matrix) < 1e-8
    assert not Us.poisoned and not Uc.poisoned


def test_involution_quadratic(sp11):
    Q = op_Q(sp11, 11)
    assert quad_ratio(Q, -1, 11) < 1e-6
    assert np.allclose(Q.matrix, [[-1.0]], atol=1e-9)


def test_conjugated_involution(sp21):
    Q = op_Q(sp21, 3)
    Qp = op_Qprime(sp21, 3)
    assert quad_ratio(Qp, -1, 3) < 1e-6
    # conjugate operators share their spectrum
    ev = sorted(np.linalg.eigvals(Q.matrix).real)
    evp = sorted(np.linalg.eigvals(Qp.matrix).real)
    assert np.allclose(ev, evp, atol=1e-8)


def test_survey_operator(sp16):
    S = op_S(sp16, 2)
    Sp = op_Sprime(sp16, 2)
    assert quad_ratio(S, 0, 2) < 1e-6
    assert quad_ratio(Sp, 0, 2) < 1e-6
    assert S.label == "S[16,3]"


def test_survey_rejects_bad_r(sp16):
    with pytest.raises(ValueError):
        op_S(sp16, 2, r=1)  # below the conductor exponent of the 2-part
    with pytest.raises(ValueError):
        op_S(sp16, 2, r=4)  # at or above n


def test_op_Q_requires_exact_divisor(sp16):
    with pytest.raises(ValueError):
        op_Q(sp16, 2)


def test_eigenspace_and_gap():
    A = np.diag([3.0, 3.0, -1.0])
    E = eigenspace(A, 3.0)
    assert E.basis.shape == (3, 2)
    assert E.gap > 1e6
    E = eigenspace(A, 2.0)
    assert E.basis.shape == (3, 0)


def test_nullspace_stacked():
    A = np.vstack([np.diag([1.0, 0.0]), np.diag([0.0, 0.0])])
    basis, gap, _ = nullspace(A)
    assert basis.shape == (2, 1)
    assert abs(abs(basis[1, 0]) - 1) < 1e-12
    assert gap > 1e6


def test_empty_space_matrix():
    sp = load_space(fixture_dir() / "N12k2c1.json")
    assert sp.dim == 0
    S = op_S(sp, 2, r=1)
    assert S.matrix.shape == (0, 0)
    assert quad_ratio(S, 0, 2) == 0.0


def test_op_matrix_residual_tracking(sp11):
    terms = [(1.0, np.eye(2, dtype=np.int64))]
    op = op_matrix(sp11, terms, label="id")
    assert np.allclose(op.matrix, np.eye(1))
    assert op.residual < 1e-10
    assert not op.poisoned
