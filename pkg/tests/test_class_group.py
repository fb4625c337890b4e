import random

import pytest

from plusspace.base_field import make_field
from plusspace.class_group import character_value, class_of, compute_class_group
from plusspace.cyclotomic import CycRat
from plusspace.eisenstein import cyclotomic_rank
from plusspace.ideal_arith import FactoredIdeal, enumerate_ideals, factor_principal, factor_rational_prime


def _equivalent_by_search(F, A, B, box=60):
    # A ~ B iff A * conj(B) = (x) for some x of norm +-N(A)N(B)
    C = (A * B.conj()).ideal()
    target = A.norm * B.norm
    for a in range(-box, box + 1):
        for b in range(0, box + 1):
            x = F.elt(a, b)
            if abs(x.norm()) == target and C.contains(x):
                return True
    return False


def test_class_numbers(F10):
    assert compute_class_group(F10).h == 2
    assert compute_class_group(make_field(0)).h == 1
    assert compute_class_group(make_field(79)).h == 3


def test_p2_not_principal_by_residues(F10):
    # x^2 - 10 y^2 = +-2 has no solution mod 5 since +-2 are non-squares mod 5
    assert not any((x * x) % 5 in (2, 3) for x in range(5))
    G = compute_class_group(F10)
    (P2,) = factor_rational_prime(F10, 2)
    assert G.class_of(FactoredIdeal.prime(P2)) != 0


def test_class_of_examples(F10):
    G = compute_class_group(F10)
    assert class_of(G, factor_principal(F10, F10.from_sqrt(4, 1))) == 0
    (P2,) = factor_rational_prime(F10, 2)
    P3 = factor_rational_prime(F10, 3)[0]
    assert class_of(G, FactoredIdeal(F10, [(P2, 1), (P3, 1)])) == 0
    assert class_of(G, FactoredIdeal.one(F10)) == 0


@pytest.mark.parametrize("d", [2, 5, 10])
def test_classes_match_brute_force(d):
    F = make_field(d)
    G = compute_class_group(F)
    ideals = enumerate_ideals(F, 50)
    reps = []
    for A in ideals:
        hits = [i for i, B in enumerate(reps) if _equivalent_by_search(F, A, B)]
        assert len(hits) <= 1
        if not hits:
            reps.append(A)
        for i, B in enumerate(reps):
            assert (G.class_of(A) == G.class_of(B)) == (hits == [i] or A is B)
    assert len(reps) == G.h


@pytest.mark.parametrize("d", [10, 79])
def test_character_orthogonality(d):
    F = make_field(d)
    G = compute_class_group(F)
    chars = G.characters()
    assert len(chars) == G.h and chars[0].is_trivial
    for i, a in enumerate(chars):
        for j, b in enumerate(chars):
            s = sum((a.value_on_class(c) * b.value_on_class(c).conj() for c in range(G.h)),
                    CycRat.rational(0))
            assert s == CycRat.rational(G.h if i == j else 0)
    table = [[ch.value_on_class(c) for c in range(G.h)] for ch in chars]
    assert cyclotomic_rank(table) == G.h


@pytest.mark.parametrize("d", [10, 79])
def test_character_multiplicative(d):
    F = make_field(d)
    G = compute_class_group(F)
    ideals = enumerate_ideals(F, 80)
    rng = random.Random(d)
    for _ in range(100):
        A, B = rng.choice(ideals), rng.choice(ideals)
        assert G.class_of(A * B) == G.index_of_coords(
            tuple((x + y) % n for x, y, n in zip(G.log(A), G.log(B), G.cycle_structure)))
        for chi in G.characters():
            assert character_value(chi, A * B) == character_value(chi, A) * character_value(chi, B)
            assert character_value(chi, A) ** G.exponent == CycRat.rational(1)


def test_character_values_sqrt10(F10):
    G = compute_class_group(F10)
    (P2,) = factor_rational_prime(F10, 2)
    chi = G.character(1)
    assert character_value(chi, FactoredIdeal.prime(P2)) == CycRat.rational(-1)
    assert character_value(G.character(0), FactoredIdeal.prime(P2)) == CycRat.rational(1)
    s = sum((chi.value_on_class(c) ** 2 for c in range(2)), CycRat.rational(0))
    assert s == CycRat.rational(2)


def test_principal_ideals_in_class_zero(F10):
    G = compute_class_group(F10)
    rng = random.Random(3)
    for _ in range(50):
        x = F10.elt(rng.randint(-40, 40), rng.randint(1, 15))
        assert G.class_of(factor_principal(F10, x)) == 0
