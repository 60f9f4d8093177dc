import pytest

from hecke_lab.characters import PChar
from hecke_lab.cosets import label_rep, w1, ymat
from hecke_lab.hecke import (
    convolve,
    is_supported,
    structure_table,
    supported_basis,
    verify_relations,
    y_element,
)

SMALL_CELLS = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)]


@pytest.mark.parametrize("p,n", SMALL_CELLS)
def test_support_law(p, n):
    # supported labels: y(p^j) for j >= conductor exponent, w exactly when
    # the character is trivial on the units
    for chi in PChar.all_characters(p, n):
        r = chi.conductor_exponent
        labels = supported_basis(p, n, chi)
        expected = (["w"] if r == 0 else []) + [f"y{j}" for j in range(max(r, 1), n + 1)]
        assert labels == expected, (p, n, chi.conrey_index())
        assert len(labels) == n - r + 1
        assert is_supported(w1(p, n), chi) == (r == 0)
        for j in range(1, n + 1):
            g = ymat(p, n, p**j % p**n) if j < n else label_rep(p, n, f"y{n}")
            assert is_supported(g, chi) == (j >= r)


def test_convolution_bilinear():
    p, n = 3, 1
    chi = PChar.trivial(p, n)
    f = y_element(p, n, chi, 1)
    two = chi.field.from_rational(2)
    assert convolve(two * f, f) == two * convolve(f, f)
    assert convolve(f, f + f) == convolve(f, f) + convolve(f, f)


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2)])
def test_verify_relations_green(p, n):
    for chi in PChar.all_characters(p, n):
        rep = verify_relations(p, n, chi)
        assert rep.ok, [a.id for a in rep.failures()]


@pytest.mark.parametrize("p,n", SMALL_CELLS)
def test_structure_table_commutative(p, n):
    for chi in PChar.all_characters(p, n):
        assert structure_table(p, n, chi).is_commutative()


def test_structure_table_roundtrip():
    chi = PChar.from_conrey(3, 2, 8)
    table = structure_table(3, 2, chi)
    doc = table.to_jsonable()
    from hecke_lab.hecke import StructTable

    back = StructTable.from_jsonable(doc, chi.field)
    assert back.labels == table.labels
    assert back.constants == table.constants
