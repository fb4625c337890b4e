import random
from math import prod

import pytest
from sympy import factorint

from plusspace.base_field import enumerate_totally_positive, make_field
from plusspace.ideal_arith import FactoredIdeal, Ideal, factor_principal, factor_rational_prime
from plusspace.quad_invariants import (chi_xi_at_prime, chi_xi_on_ideal, is_square_mod,
                                       is_square_mod4, local_invariants, min_local_f,
                                       places_over, relative_discriminant)


def _core(n):
    return (-1 if n < 0 else 1) * prod(p for p, e in factorint(abs(n)).items() if e % 2)


def _fund_disc(n):
    m = _core(n)
    if m == 1:
        return 1
    return m if m % 4 == 1 else 4 * m


@pytest.mark.parametrize("p,xi,f,chi", [(2, 12, 0, 0), (2, 4, 1, 1), (2, 5, 0, -1),
                                        (3, 18, 1, -1), (2, 17, 0, 1), (3, 7, 0, 1)])
def test_local_invariants_over_Q(Q, p, xi, f, chi):
    inv = local_invariants(Q, places_over(Q, p)[0], Q.elt(xi))
    assert (inv.f, inv.chi) == (f, chi)


def test_zero_is_flagged(Q):
    inv = local_invariants(Q, places_over(Q, 2)[0], Q.zero)
    assert inv.f == float("inf") and inv.flagged


@pytest.mark.parametrize("xi,D,Fc", [(12, 12, 1), (9, 1, 3), (40, 40, 1), (-4, 4, 1), (8, 8, 1)])
def test_relative_discriminant_over_Q(Q, xi, D, Fc):
    Dc, Fr = relative_discriminant(Q, Q.elt(xi))
    assert Dc.norm == D and Fr.norm == Fc


def test_relative_discriminant_matches_fundamental_discriminant(Q):
    for n in range(-60, 61):
        if n == 0:
            continue
        rd = relative_discriminant(Q, Q.elt(n))
        assert rd.D.norm == abs(_fund_disc(n))
        assert rd.integral == (n % 4 in (0, 1))
        if rd.integral:
            assert rd.Fc.norm ** 2 * rd.D.norm == abs(n)


@pytest.mark.parametrize("d", [2, 5, 10, 13])
def test_biquadratic_discriminants(d):
    # disc Q(sqrt D, sqrt n) = d(D) d(n) d(Dn) and it equals disc(F)^2 N(D_n)
    F = make_field(d)
    for n in range(-25, 26):
        if n == 0 or _core(n) in (1, _core(d)):
            continue
        Dc, _ = relative_discriminant(F, F.elt(n))
        total = abs(_fund_disc(d) * _fund_disc(n) * _fund_disc(d * n))
        assert total == F.disc ** 2 * Dc.norm


@pytest.mark.parametrize("d", [2, 5, 10, 13])
def test_conductor_discriminant_factorization(d):
    F = make_field(d)
    rng = random.Random(d)
    for _ in range(50):
        x = F.elt(rng.randint(-40, 40), rng.randint(-15, 15))
        if x.is_zero():
            continue
        rd = relative_discriminant(F, x)
        if not rd.integral:
            continue
        Dc, Fc = rd
        assert (Fc * Fc * Dc).ideal() == Ideal.principal(F, x)
        for P, _ in factor_principal(F, F.elt(2) * x).factors:
            assert (chi_xi_at_prime(x, P) == 0) == (Dc.exponent(P) > 0)


def test_square_mod4_examples(F10, Q):
    assert is_square_mod4(Q, Q.elt(5))
    assert not is_square_mod4(Q, Q.elt(2)) and not is_square_mod4(Q, Q.elt(3))
    assert is_square_mod4(F10, F10.elt(2))
    assert not is_square_mod4(F10, F10.elt(3))


def test_square_mod4_over_Q_by_residues(Q):
    for n in range(-50, 51):
        assert is_square_mod4(Q, Q.elt(n)) == (n % 4 in (0, 1))


@pytest.mark.parametrize("d", [0, 2, 5, 10, 13])
def test_square_mod4_equivalent_to_local_conductors(d):
    F = make_field(d)
    for xi in enumerate_totally_positive(F, 12)[1:]:
        assert is_square_mod4(F, xi) == (min_local_f(F, xi) >= 0)


def test_chi_on_ideals(F10, Q):
    ideals = [FactoredIdeal.prime(P) for p in (2, 3, 5, 7, 11) for P in factor_rational_prime(F10, p)]
    for A in ideals:
        assert chi_xi_on_ideal(F10, F10.elt(4), A) == 1
    two = factor_principal(Q, Q.elt(2))
    assert chi_xi_on_ideal(Q, Q.elt(5), two) == -1
    assert chi_xi_on_ideal(Q, Q.elt(12), two) == 0


@pytest.mark.parametrize("d", [2, 5, 10, 13])
def test_scaling_by_squares(d):
    F = make_field(d)
    rng = random.Random(10 + d)
    for _ in range(30):
        x = F.elt(rng.randint(-30, 30), rng.randint(-10, 10))
        c = F.elt(rng.randint(-6, 6), rng.randint(-3, 3))
        if x.is_zero() or c.is_zero():
            continue
        for p in (2, 3, 5):
            for v in places_over(F, p):
                a = local_invariants(F, v, x)
                b = local_invariants(F, v, c * c * x)
                assert b.f == a.f + v.prime.valuation(c)
                assert b.chi == a.chi


@pytest.mark.parametrize("d", [2, 3, 6, 10])
def test_even_place_filtration(d):
    # squares mod p^(2r) and mod p^(2r+1) agree on units for r < e
    F = make_field(d)
    v = places_over(F, 2)[0]
    units = [u for u in v.prime.power(2 * v.e + 1).residues() if not v.prime.ideal.contains(u)]
    for r in range(v.e):
        for u in units:
            assert is_square_mod(v, u, 2 * r) == is_square_mod(v, u, 2 * r + 1)
