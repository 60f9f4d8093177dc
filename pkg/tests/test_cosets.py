import pytest

from hecke_lab.cosets import (
    MatPn,
    all_labels,
    class_right_reps,
    coset_decompose,
    coset_table,
    double_coset_label,
    enumerate_K0,
    enumerate_Kg,
    identity,
    in_K0,
    label_rep,
    right_coset_reps,
    single_cosets_of_double,
    w1,
    xmat,
    ymat,
)

CELLS = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)]


@pytest.mark.parametrize("p,n", CELLS)
def test_right_coset_count(p, n):
    assert len(right_coset_reps(p, n)) == p ** (n - 1) * (p + 1)


@pytest.mark.parametrize("p,n", CELLS)
def test_labels(p, n):
    assert all_labels(p, n) == ["w"] + [f"y{j}" for j in range(1, n + 1)]
    assert double_coset_label(w1(p, n)) == "w"
    assert double_coset_label(identity(p, n)) == f"y{n}"
    assert double_coset_label(xmat(p, n, 1)) == f"y{n}"
    for j in range(1, n):
        assert double_coset_label(ymat(p, n, p**j)) == f"y{j}"


@pytest.mark.parametrize("p,n", CELLS)
def test_class_sizes(p, n):
    # single-coset counts per double coset: w class p^n, y(p^j) class
    # p^(n-j-1)(p-1), identity class 1; they partition all right cosets
    sizes = {lab: len(class_right_reps(p, n, lab)) for lab in all_labels(p, n)}
    assert sizes["w"] == p**n
    assert sizes[f"y{n}"] == 1
    for j in range(1, n):
        assert sizes[f"y{j}"] == p ** (n - j - 1) * (p - 1)
    assert sum(sizes.values()) == p ** (n - 1) * (p + 1)


def test_single_cosets_of_double_matches_class():
    for p, n in [(2, 2), (2, 3), (3, 2)]:
        for j in range(1, n):
            assert len(single_cosets_of_double(p, n, j)) == p ** (n - j - 1) * (p - 1)


@pytest.mark.parametrize("p,n", [(2, 2), (3, 1), (3, 2)])
def test_decompose_reconstructs(p, n):
    table = coset_table(p, n)
    samples = [w1(p, n), xmat(p, n, 1), ymat(p, n, p), identity(p, n),
               w1(p, n) @ xmat(p, n, 1), ymat(p, n, 1) @ w1(p, n)]
    for g in samples:
        idx, k0 = coset_decompose(g)
        assert in_K0(k0)
        assert k0 @ table.rep_of(idx) == g


def test_decompose_partition():
    # every element of K0(p) at level p^2 falls in exactly one right coset
    p, n = 3, 2
    table = coset_table(p, n)
    for g in enumerate_K0(p, n, 1):
        idx, k0 = table.decompose(g)
        assert in_K0(k0)
        assert k0 @ table.rep_of(idx) == g


@pytest.mark.parametrize("p,n", [(2, 2), (3, 1), (3, 2)])
def test_Kg_index(p, n):
    # |K_g| * [number of single cosets in the class] = |K0|
    k0_size = len(enumerate_K0(p, n, n))
    for lab in all_labels(p, n):
        g = label_rep(p, n, lab)
        assert len(enumerate_Kg(g)) * len(class_right_reps(p, n, lab)) == k0_size


def test_matrix_arithmetic():
    g = MatPn(5, 1, 2, 1, 0, 3)
    h = g.inv()
    assert g @ h == identity(5, 1)
    assert not in_K0(ymat(5, 1, 1))
    assert in_K0(ymat(5, 1, 5))
