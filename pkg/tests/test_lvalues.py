from fractions import Fraction

import mpmath
import pytest
from sympy import kronecker_symbol

from plusspace.base_field import enumerate_totally_positive, make_field
from plusspace.class_group import compute_class_group
from plusspace.cyclotomic import CycRat
from plusspace.lvalues import (CharacterSpec, PoleError, bernoulli_L_rational,
                               fundamental_discriminant, hecke_L_exact, hecke_L_numeric,
                               zeta_partial_class)


def _mp_L(r, d):
    # independent oracle: Hurwitz-zeta evaluation of the Dirichlet L-function at 1 - r
    f = abs(d)
    chi = [int(kronecker_symbol(d, a)) for a in range(f)] if f > 1 else [1]
    return mpmath.dirichlet(1 - r, chi)


def test_bernoulli_examples():
    assert bernoulli_L_rational(2, 1) == Fraction(-1, 12)
    assert bernoulli_L_rational(4, 1) == Fraction(1, 120)
    assert bernoulli_L_rational(2, 5) == Fraction(-2, 5)
    with pytest.raises(PoleError):
        bernoulli_L_rational(1, 1)


@pytest.mark.parametrize("d", [1, -3, -4, 5, -7, 8, -8, 12, 13, -20, 24, 40])
def test_bernoulli_against_hurwitz(d):
    for r in range(1 if d != 1 else 2, 7):
        val = bernoulli_L_rational(r, d)
        assert abs(float(val) - float(_mp_L(r, d))) <= 1e-9 * max(1, abs(float(val)))


def test_fundamental_discriminant():
    assert [fundamental_discriminant(n) for n in (2, 3, 5, 12, 40, -1, -3, 9)] == \
        [8, 12, 5, 12, 40, -4, -3, 1]


def test_sqrt10_zeta_values(F10):
    triv = CharacterSpec(F10, None, None)
    assert hecke_L_exact(F10, 2, triv) == CycRat.rational(Fraction(7, 6))
    assert hecke_L_exact(F10, 4, triv) == CycRat.rational(Fraction(1577, 60))


def test_rational_backend_consistency(Q):
    assert hecke_L_exact(Q, 2, CharacterSpec(Q, None, None)) == CycRat.rational(Fraction(-1, 12))
    assert hecke_L_exact(Q, 2, CharacterSpec(Q, Q.elt(5), None)) == CycRat.rational(Fraction(-2, 5))


def test_pole_rejected(F10):
    with pytest.raises(PoleError):
        hecke_L_exact(F10, 1, CharacterSpec(F10, None, None))


@pytest.mark.parametrize("D", [2, 3, 5, 6, 7, 10, 13, 15])
def test_dedekind_zeta_factorization(D):
    # zeta_F = zeta * L(chi_disc)
    F = make_field(D)
    for k in (2, 4):
        want = bernoulli_L_rational(k, 1) * bernoulli_L_rational(k, F.disc)
        assert hecke_L_exact(F, k, CharacterSpec(F, None, None)) == CycRat.rational(want)


@pytest.mark.parametrize("D", [2, 3, 5, 7, 10])
def test_biquadratic_twists(D):
    # L_F(s, chi_n) = L(s, chi_d(n)) L(s, chi_d(nD)) since F(sqrt n) is biquadratic
    F = make_field(D)
    for n in (-7, -3, -2, -1, 2, 3, 6, 7, 11):
        if fundamental_discriminant(n) in (1, F.disc):
            continue
        chi = CharacterSpec(F, F.elt(n), None)
        for k in (1, 2, 3, 4):
            if k == 1 and n > 0:
                continue
            want = (bernoulli_L_rational(k, fundamental_discriminant(n))
                    * bernoulli_L_rational(k, fundamental_discriminant(n * D)))
            assert hecke_L_exact(F, k, chi) == CycRat.rational(want), (n, k)


def test_genus_class_character(F10):
    # the nontrivial class character of Q(sqrt 10) cuts out Q(sqrt 2, sqrt 5)
    chi = compute_class_group(F10).character(1)
    for k in (2, 4):
        want = bernoulli_L_rational(k, 8) * bernoulli_L_rational(k, 5)
        assert hecke_L_exact(F10, k, CharacterSpec(F10, None, chi)) == CycRat.rational(want)


def test_partial_zeta_additivity(F10):
    for k in (1, 2, 4):
        parts = [zeta_partial_class(F10, i, k) for i in range(2)]
        if k > 1:
            assert sum(parts) == hecke_L_exact(F10, k, CharacterSpec(F10, None, None)).to_rational()
    assert sum(zeta_partial_class(F10, i, 2) for i in range(2)) == Fraction(7, 6)
    assert sum(zeta_partial_class(F10, i, 4) for i in range(2)) == Fraction(1577, 60)


@pytest.mark.parametrize("D", [10, 79])
def test_class_fourier_inversion(D):
    F = make_field(D)
    G = compute_class_group(F)
    k = 2
    vals = {j: hecke_L_exact(F, k, CharacterSpec(F, None, G.character(j))) for j in range(G.h)}
    for c in range(G.h):
        s = CycRat.rational(0)
        for j in range(G.h):
            s = s + vals[j] * G.character(j).value_on_class(c).conj()
        assert s == CycRat.rational(G.h * zeta_partial_class(F, c, k))


def test_partial_zeta_numeric(F10):
    chi = compute_class_group(F10).character(1)
    total = hecke_L_numeric(F10, 2, CharacterSpec(F10, None, None)).value
    twisted = hecke_L_numeric(F10, 2, CharacterSpec(F10, None, chi)).value
    for i, sign in ((0, 1), (1, -1)):
        approx = (total + sign * twisted) / 2
        assert abs(approx - float(zeta_partial_class(F10, i, 2))) < 1e-4


def test_numeric_examples(F10, Q):
    r = hecke_L_numeric(F10, 2, CharacterSpec(F10, None, None), B=10 ** 6)
    assert abs(r.value - 7 / 6) < 1e-4
    r = hecke_L_numeric(Q, 4, CharacterSpec(Q, None, None))
    assert abs(r.value - 1 / 120) < 1e-9
    with pytest.raises(ValueError):
        hecke_L_numeric(F10, 1, CharacterSpec(F10, F10.elt(-1), None))


def test_backends_agree_on_coefficient_characters(F10):
    G = compute_class_group(F10)
    seen = set()
    for kappa in (2, 3):
        eta = (-1) ** kappa
        for xi in enumerate_totally_positive(F10, 10)[1:]:
            for j in range(G.h):
                chi = CharacterSpec(F10, eta * xi, G.character(j), True)
                key = (kappa,) + chi.cache_key()
                if key in seen:
                    continue
                seen.add(key)
                exact = hecke_L_exact(F10, kappa, chi)
                assert exact.is_rational()
                num = hecke_L_numeric(F10, kappa, chi, B=100_000)
                tol = max(1e-4 * max(1.0, abs(float(exact.to_rational()))), num.error_bound)
                assert abs(num.value - exact.to_complex()) <= tol, (kappa, xi, j)
    assert len(seen) >= 8
