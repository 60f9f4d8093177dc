import pytest

from hecke_lab.characters import PChar
from hecke_lab.induced import build_In, fixed_subspace, verify_induced


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2)])
def test_dimension_formula(p, n):
    rep = build_In(p, n, PChar.trivial(p, n))
    assert rep.dim == p ** (n - 1) * (p + 1)


def test_fixed_chain_trivial_character():
    rep = build_In(3, 2, PChar.trivial(3, 2))
    dims = [fixed_subspace(rep, m).dim for m in range(3)]
    assert dims == [1, 2, 3]  # one new dimension per level, starting at m = 0


def test_fixed_chain_primitive_character():
    chi = PChar.from_conrey(3, 2, 2)  # conductor 9, r = 2
    rep = build_In(3, 2, chi)
    dims = [fixed_subspace(rep, m).dim for m in range(3)]
    assert dims == [0, 0, 1]


@pytest.mark.parametrize("p,n", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_spectral_audit(p, n):
    for chi in PChar.all_characters(p, n):
        sp = verify_induced(p, n, chi)
        assert sp.report.ok, [a.id for a in sp.report.failures()]
        assert sp.tables["entrywise_ok"]
        assert sp.component_dims["agree"]
        for m, d in sp.fixed_dims.items():
            assert d == (m - sp.r + 1 if m >= sp.r else 0)


def test_iwahori_components():
    # level-one induction from the trivial character splits 4 = 1 + 3
    sp = verify_induced(3, 1, PChar.trivial(3, 1))
    assert sp.tables["Y"][(1, 1)] == 1
    assert sp.dim == 4
    assert sp.component_dims["by_formula"] == {"w+": 1, "w-": 3}
