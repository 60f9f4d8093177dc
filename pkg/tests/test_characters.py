import pytest

from hecke_lab.characters import (
    DirChar,
    PChar,
    char_eval,
    conductor,
    crt_decompose,
    unit_generators,
)

# quadratic character values on the units, frozen by hand from the
# Kronecker symbols of the corresponding fundamental discriminants
KRONECKER_TABLES = {
    # chi_{-7} lifted to modulus 21 (Conrey 13)
    (21, 13): {1: 1, 2: 1, 4: 1, 5: -1, 8: 1, 10: -1, 11: 1,
               13: -1, 16: 1, 17: -1, 19: -1, 20: -1},
    # chi_{-4} at its own modulus (Conrey 3)
    (4, 3): {1: 1, 3: -1},
    # chi_{-8} at modulus 8 (Conrey 3)
    (8, 3): {1: 1, 3: 1, 5: -1, 7: -1},
    # chi_5 lifted to modulus 15 (Conrey 4)
    (15, 4): {1: 1, 2: -1, 4: 1, 7: -1, 8: -1, 11: 1, 13: -1, 14: 1},
}


def test_unit_generators_generate():
    for p, n in [(2, 1), (2, 2), (2, 3), (3, 2), (5, 1), (7, 1)]:
        m = p**n
        gens = unit_generators(p, n)
        seen = {1}
        frontier = [1]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = x * g % m
                if y not in seen:
                    seen.add(y)
                    frontier.append(y)
        units = {u for u in range(1, m) if u % p != 0} or {1}
        assert seen == units, (p, n)


def test_character_count():
    assert len(list(PChar.all_characters(3, 2))) == 6
    assert len(list(PChar.all_characters(2, 3))) == 4
    assert len(list(PChar.all_characters(5, 1))) == 4


@pytest.mark.parametrize("modulus,conrey", sorted(KRONECKER_TABLES))
def test_quadratic_character_values(modulus, conrey):
    chi = DirChar.from_conrey(modulus, conrey)
    for u, want in KRONECKER_TABLES[(modulus, conrey)].items():
        got = chi.value_complex(u)
        assert abs(got - want) < 1e-12, (u, got, want)


def test_nonunit_vanishes():
    chi = DirChar.from_conrey(21, 13)
    assert char_eval(chi, 7).is_zero()
    assert char_eval(chi, 3).is_zero()
    assert chi.value_complex(14) == 0


def test_conductors():
    assert DirChar.from_conrey(21, 13).conductor == 7
    assert DirChar.from_conrey(16, 7).conductor == 8
    assert DirChar.from_conrey(16, 15).conductor == 4
    assert DirChar.trivial(12).conductor == 1
    # exponent form for local characters: the mod-9 Conrey-2 character is primitive
    assert conductor(PChar.from_conrey(3, 2, 2)) == 2
    assert conductor(PChar.from_conrey(3, 2, 1)) == 0


def test_conrey_round_trip():
    for modulus, conrey in [(21, 13), (16, 7), (16, 15), (15, 4), (8, 3), (36, 1)]:
        assert DirChar.from_conrey(modulus, conrey).conrey_index() == conrey


def test_parity():
    assert DirChar.from_conrey(21, 13).parity() == -1  # odd, pairs with weight 3
    assert DirChar.from_conrey(15, 4).parity() == 1
    assert DirChar.trivial(30).parity() == 1


def test_at_modulus_restriction():
    chi21 = DirChar.from_conrey(21, 13)
    chi14 = chi21.at_modulus(14)
    assert chi14.modulus == 14
    assert chi14.conrey_index() == 13
    assert chi14.conductor == 7


def test_bar_involution():
    chi = DirChar.from_conrey(21, 13)
    assert chi.bar() == chi  # real character
    psi = DirChar.from_conrey(9, 2)  # order 6, not real
    assert psi.bar() != psi
    assert psi.bar().bar() == psi


def test_crt_decompose_product():
    chi = DirChar.from_conrey(36, 1)
    parts = crt_decompose(chi)
    assert sorted(part.modulus for part in parts) == [4, 9]
    chi2 = DirChar.from_conrey(15, 4)
    parts = crt_decompose(chi2)
    for u in (1, 2, 4, 7, 8, 11, 13, 14):
        prod = 1.0 + 0j
        for part in parts:
            prod *= part.value_complex(u % part.modulus)
        assert abs(prod - chi2.value_complex(u)) < 1e-12


def test_flip_at():
    chi = DirChar.from_conrey(21, 13)
    assert chi.flip_at(3) == chi  # the 3-part is trivial, flipping is a no-op
    psi = DirChar.from_conrey(9, 2)
    assert psi.flip_at(3) == psi.bar()
