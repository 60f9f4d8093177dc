from fractions import Fraction

from hecke_lab.cyclotomic import euler_phi, get_field


def test_euler_phi():
    assert [euler_phi(m) for m in (1, 2, 3, 4, 8, 9, 12, 100)] == [1, 1, 2, 2, 4, 6, 4, 40]


def test_fourth_root():
    f = get_field(4)
    z = f.zeta()
    assert z * z == f.from_rational(Fraction(-1))
    assert z * z * z * z == f.one


def test_third_root_minimal_polynomial():
    f = get_field(3)
    z = f.zeta()
    assert z * z + z + f.one == f.zero


def test_rational_detection():
    f = get_field(8)
    z = f.zeta()
    w = z * z  # a fourth root of unity, not rational
    assert not w.is_rational()
    assert (w * w).is_rational()
    assert (w * w).as_rational() == Fraction(-1)


def test_inverse_and_conj():
    f = get_field(5)
    z = f.zeta()
    a = f.one + z
    assert a * a.inverse() == f.one
    assert a.conj().conj() == a
    # conjugation is complex conjugation under the standard embedding
    assert abs(a.conj().to_complex() - a.to_complex().conjugate()) < 1e-12


def test_complex_embedding():
    import cmath

    f = get_field(12)
    z = f.zeta()
    assert abs(z.to_complex() - cmath.exp(2j * cmath.pi / 12)) < 1e-12


def test_zeta_power_reduction():
    f = get_field(12)
    z6 = f.zeta(6)  # power of the primitive root landing at -1
    assert z6 == f.from_rational(Fraction(-1))
