import numpy as np
import pytest

from hecke_lab.characters import DirChar
from hecke_lab.newspace import characterize, placement_checks, qualifying_primes
from hecke_lab.spaces import fixture_dir, load_space


def test_qualifying_primes_squarefree():
    chi = DirChar.trivial(30)
    quals = qualifying_primes(30, chi)
    assert [(q["p"], q["kind"]) for q in quals] == [(2, "Q"), (3, "Q"), (5, "Q")]


def test_qualifying_primes_character_blocks():
    # primitive local factor at 7 disqualifies that prime
    chi = DirChar.from_conrey(21, 13)
    assert [(q["p"], q["kind"]) for q in qualifying_primes(21, chi)] == [(3, "Q")]
    # conductor 8 inside modulus 16: imprimitive, survey operator applies
    chi16 = DirChar.from_conrey(16, 7)
    assert [(q["p"], q["n"], q["kind"]) for q in qualifying_primes(16, chi16)] == [
        (2, 4, "S")
    ]
    # primitive at full level: nothing qualifies
    chi7 = DirChar.from_conrey(7, 6)
    assert qualifying_primes(7, chi7) == []


def test_characterize_oldspace_only():
    sp = load_space(fixture_dir() / "N22k2c1.json")
    res = characterize(sp)
    assert (res.dim, res.new_dim, res.expected_new) == (2, 0, 0)
    assert res.ok
    assert res.gap >= 1e3
    assert res.basis.shape == (2, 0)


def test_characterize_mixed_space():
    sp = load_space(fixture_dir() / "N21k3c13.json")
    res = characterize(sp)
    assert (res.dim, res.new_dim, res.expected_new) == (4, 2, 2)
    assert res.gap >= 1e3
    # the joint eigenspace is honest: each operator fixes it with eigenvalue -1
    for rep in res.ops:
        assert rep.quad <= 1e-6
        assert rep.eig_dist <= 1e-6


def test_characterize_no_qualifying_primes():
    sp = load_space(fixture_dir() / "N7k3c6.json")
    res = characterize(sp)
    assert res.new_dim == res.dim == res.expected_new == 1
    assert res.ops == []


def test_placement_requires_matching_level():
    sp = load_space(fixture_dir() / "N22k2c1.json")
    lower = load_space(fixture_dir() / "N7k3c6.json")
    with pytest.raises(ValueError):
        placement_checks(sp, 2, "Q", lower)


def test_placement_dilation_images():
    sp = load_space(fixture_dir() / "N16k3c7.json")
    lower = load_space(fixture_dir() / "N8k3c3.json")
    checks = placement_checks(sp, 2, "S", lower)
    assert len(checks) == 6
    assert all(c.ok for c in checks), [(c.name, c.residual) for c in checks]


def test_placement_survey_images_vanish_into_lower():
    # all-new space: survey images must be (numerically) zero, which lies in
    # any span including the zero-dimensional one
    sp = load_space(fixture_dir() / "N27k2c1.json")
    lower = load_space(fixture_dir() / "N9k2c1.json")
    assert lower.dim == 0
    checks = placement_checks(sp, 3, "S", lower)
    assert all(c.ok for c in checks)
