import json
import random
from fractions import Fraction

import pytest

from plusspace.base_field import enumerate_totally_positive, format_element, make_field
from plusspace.class_group import compute_class_group
from plusspace.cyclotomic import CycRat
from plusspace.eisenstein import (EisensteinError, NotPlusSpaceIndex, QExpansion,
                                  classical_series, cohen_coefficient, cohen_series,
                                  cyclotomic_rank, eisenstein_coefficient, eisenstein_qexpansion,
                                  frak_C, frak_C_product, hecke_T_plus, hecke_eigenvalue,
                                  is_plus_space_index, make_spec, psi_value, qexp_combine,
                                  twisted_sigma)
from plusspace.ideal_arith import FactoredIdeal, enumerate_ideals, factor_principal, factor_rational_prime
from plusspace.lvalues import CharacterSpec, bernoulli_L_rational, hecke_L_exact
from plusspace.quad_invariants import is_square_mod4

R = CycRat.rational

# printed tables of 60 G_{5/2}(z, chi') over Q(sqrt 10)
TABLE = {
    0: {"0": 1577, "1": 70, "2": 264, "7+2√10": 744, "7-2√10": 744, "4": 3850, "5": 3144,
        "6": 8640},
    1: {"0": 1577, "1": 24, "2": 490, "7+2√10": 1750, "7-2√10": 1750, "4": 2184, "5": 8470,
        "6": 8160},
}


@pytest.fixture(scope="module")
def G10(F10):
    return {j: eisenstein_qexpansion(make_spec(F10, 2, j), 14) for j in (0, 1)}


def test_spec_construction(F10, Q):
    assert make_spec(F10, 2).eta == 1 and make_spec(F10, 1).eta == -1
    assert make_spec(F10, 3).eta == -1
    with pytest.raises(EisensteinError):
        make_spec(Q, 1)
    with pytest.raises(EisensteinError):
        make_spec(F10, 0)


def test_psi_value():
    assert psi_value(0, 1, 3, 0.3) == 1 and psi_value(0, -1, 3, 0.3) == 1
    assert psi_value(-1, 1, 3, 0.3) == 0
    assert abs(psi_value(1, 1, 2, 2 ** -1.5) * 2 ** 1.5 - 7) < 1e-12


def test_psi_is_palindromic():
    rng = random.Random(0)
    for _ in range(50):
        f, chi, q = rng.randint(0, 5), rng.choice((-1, 0, 1)), rng.choice((2, 3, 5, 9))
        y = complex(rng.uniform(0.2, 2), rng.uniform(-1, 1))
        assert abs(psi_value(f, chi, q, y) - psi_value(f, chi, q, 1 / y)) < 1e-9 * abs(y) ** -f * 10


def test_twisted_sigma(F10, Q):
    assert twisted_sigma(3, None, factor_principal(Q, Q.elt(2))) == R(9)
    assert twisted_sigma(3, None, FactoredIdeal.one(F10)) == R(1)
    assert twisted_sigma(3, None, factor_principal(F10, F10.elt(2))) == R(73)
    chi = compute_class_group(F10).character(1)
    # the argument is the twisting character itself (chi'^2 at the call site)
    assert twisted_sigma(3, chi, factor_principal(F10, F10.elt(2))) == R(1 - 8 + 64)
    assert twisted_sigma(3, chi * chi, factor_principal(F10, F10.elt(2))) == R(73)


def test_frak_C(F10, Q):
    assert frak_C(make_spec(Q, 2), Q.elt(4)) == R(7)
    assert frak_C(make_spec(F10, 2), F10.elt(4)) == R(55)
    assert frak_C(make_spec(F10, 2), F10.elt(1)) == R(1)
    with pytest.raises(NotPlusSpaceIndex):
        frak_C(make_spec(F10, 2), F10.elt(3))


@pytest.mark.parametrize("inverse", [False, True])
def test_dual_formula(F10, inverse):
    # both readings of the local parameter agree since Psi(y) = Psi(1/y)
    for kappa in (2, 3):
        for chi in (0, 1):
            spec = make_spec(F10, kappa, chi)
            for xi in enumerate_totally_positive(F10, 10)[1:]:
                x = spec.eta * xi
                if is_square_mod4(F10, x):
                    got = frak_C_product(spec, x, inverse=inverse)
                    assert abs(frak_C(spec, x).to_complex() - got) < 1e-9


def test_coefficient_examples(F10):
    s0, s1 = make_spec(F10, 2, 0), make_spec(F10, 2, 1)
    assert eisenstein_coefficient(s0, F10.zero) == R(Fraction(1577, 60))
    assert eisenstein_coefficient(s0, F10.elt(1)) == R(Fraction(7, 6))
    assert eisenstein_coefficient(s0, F10.elt(3)) == R(0)
    assert eisenstein_coefficient(s1, F10.elt(1)) == R(Fraction(2, 5))


@pytest.mark.parametrize("chi", [0, 1])
def test_printed_tables(F10, G10, chi):
    G = G10[chi]
    got = {format_element(x): v * 60 for x, v in G.items()}
    assert got == {k: R(v) for k, v in TABLE[chi].items()}


def test_plus_space_support(F10, G10):
    spec = make_spec(F10, 2)
    for xi in enumerate_totally_positive(F10, 14)[1:]:
        if not is_square_mod4(F10, xi):
            assert not is_plus_space_index(spec, xi)
            assert G10[0].coefficient(xi) == R(0) and G10[1].coefficient(xi) == R(0)


def test_constant_term_is_L_value(F10):
    for kappa in (1, 2, 3):
        for j in (0, 1):
            spec = make_spec(F10, kappa, j)
            c = spec.chi_prime
            want = hecke_L_exact(F10, 2 * kappa, CharacterSpec(F10, None, c * c, True))
            assert eisenstein_coefficient(spec, F10.zero) == want


def test_cohen_examples():
    assert [cohen_coefficient(2, n) for n in range(6)] == \
        [Fraction(1, 120), Fraction(-1, 12), 0, 0, Fraction(-7, 12), Fraction(-2, 5)]
    with pytest.raises(ValueError):
        cohen_series(1, 5)


def test_cohen_against_eisenstein(Q):
    for r in (2, 3, 4):
        E = eisenstein_qexpansion(make_spec(Q, r), 60)
        C = cohen_series(r, 60)
        for n in range(61):
            assert E.coefficient(Q.elt(n)) == C.coefficient(Q.elt(n))


def test_cohen_weight_5_2_generalized_bernoulli(Q):
    # H(2, N) = L(-1, chi_D) * sum over f | f_N of mu(f) chi_D(f) f sigma_3(f_N / f)
    assert cohen_coefficient(2, 8) == bernoulli_L_rational(2, 8)
    assert cohen_coefficient(2, 12) == bernoulli_L_rational(2, 12)
    assert cohen_coefficient(2, 9) == bernoulli_L_rational(2, 1) * (1 + 27 - 3)


def _square_root_count(F, x, box=30):
    return sum(F.elt(a, b) * F.elt(a, b) == x for a in range(-box, box + 1)
               for b in range(-box, box + 1))


def test_theta(F10, Q):
    t = classical_series(Q, "theta1", 10)
    assert [t.coefficient(Q.elt(n)) for n in (0, 1, 4, 2)] == [R(1), R(2), R(2), R(0)]
    t = classical_series(F10, "theta1", 40)
    assert t.coefficient(F10.from_sqrt(19, 6)) == R(2)
    for x in enumerate_totally_positive(F10, 40):
        assert t.coefficient(x) == R(_square_root_count(F10, x, box=12))


def test_theta2(F10):
    t = classical_series(F10, "theta2", 20)
    (P5,) = factor_rational_prime(F10, 5)
    for x in enumerate_totally_positive(F10, 20):
        count = sum(1 for a in range(-12, 13) for b in range(-12, 13)
                    if P5.ideal.contains(F10.elt(a, b))
                    and F10.elt(a, b) * F10.elt(a, b) == F10.elt(5) * x)
        assert t.coefficient(x) == R(count)
    with pytest.raises(EisensteinError):
        classical_series(make_field(2), "theta2", 10)


def test_E2(F10):
    G = compute_class_group(F10)
    ideals = enumerate_ideals(F10, 400)
    for i in (0, 1):
        E = classical_series(F10, "E2", 14, cls=i)
        for x in enumerate_totally_positive(F10, 14)[1:]:
            want = sum(A.norm for A in ideals
                       if A.ideal().contains(x) and G.class_of(A) == i)
            assert E.coefficient(x) == R(want)
    assert classical_series(F10, "E2", 4, cls=0).coefficient(F10.elt(1)) == R(1)
    assert classical_series(F10, "E2", 4, cls=1).coefficient(F10.elt(1)) == R(0)


def test_combine(F10, Q, G10):
    t = classical_series(Q, "theta1", 10)
    assert qexp_combine("multiply", t, t).coefficient(Q.elt(1)) == R(4)
    E = classical_series(F10, "E2", 20, cls=0)
    D = qexp_combine("dilate", E, k=4)
    assert D.coefficient(F10.zero) == E.coefficient(F10.zero)
    for x in enumerate_totally_positive(F10, 5)[1:]:
        assert D.coefficient(F10.elt(4) * x) == E.coefficient(x)
    assert D.coefficient(F10.elt(2)) == R(0)
    S = qexp_combine("add", G10[0], G10[1])
    assert S.coefficient(F10.elt(1)) == R(Fraction(70 + 24, 60))
    S2 = qexp_combine("scale", G10[0], scalar=R(60))
    assert S2.coefficient(F10.zero) == R(1577)
    with pytest.raises(ValueError):
        qexp_combine("add", G10[0], t)


def test_multiplication_ring_laws(F10):
    a = classical_series(F10, "theta1", 12)
    b = classical_series(F10, "theta2", 12)
    c = qexp_combine("dilate", classical_series(F10, "E2", 12, cls=1), k=4)
    ab, ba = qexp_combine("multiply", a, b), qexp_combine("multiply", b, a)
    left = qexp_combine("multiply", ab, c)
    right = qexp_combine("multiply", a, qexp_combine("multiply", b, c))
    for x in enumerate_totally_positive(F10, 12):
        assert ab.coefficient(x) == ba.coefficient(x)
        assert left.coefficient(x) == right.coefficient(x)


def test_hecke_eigenvalues(F10, G10):
    a1, a2 = F10.from_sqrt(3, -2), F10.from_sqrt(9, -1)
    spec = make_spec(F10, 2)
    assert hecke_eigenvalue(spec, a1) == 29792
    assert hecke_eigenvalue(spec, a2) == 357912
    for j in (0, 1):
        H = hecke_T_plus(make_spec(F10, 2, j), a1, G10[j])
        for x in G10[j].indices():
            assert H.coefficient(x) == G10[j].coefficient(x) * 29792


def test_hecke_split_and_inert_primes(F10):
    # 7 is inert; 13 + 3 sqrt 10 generates a split prime of norm 79
    for j in (0, 1):
        spec = make_spec(F10, 2, j)
        G = eisenstein_qexpansion(spec, 2)
        for alpha, lam in ((F10.elt(7), 1 + 49 ** 3), (F10.from_sqrt(13, 3), 1 + 79 ** 3)):
            assert hecke_eigenvalue(spec, alpha) == lam
            H = hecke_T_plus(spec, alpha, G, T=2)
            for x in enumerate_totally_positive(F10, 2):
                assert H.coefficient(x) == G.coefficient(x) * lam


def test_hecke_over_Q(Q):
    spec = make_spec(Q, 2)
    H2 = eisenstein_qexpansion(spec, 40)
    T = hecke_T_plus(spec, Q.elt(3), H2, T=40)
    for n in range(41):
        assert T.coefficient(Q.elt(n)) == H2.coefficient(Q.elt(n)) * 28


def test_hecke_rejects(F10, G10):
    spec = make_spec(F10, 2)
    for bad in (F10.elt(2), F10.elt(3), F10.elt(15)):
        with pytest.raises(EisensteinError):
            hecke_T_plus(spec, bad, G10[0])


def test_hecke_shrinks_bound_for_finite_input(F10):
    spec = make_spec(F10, 2)
    a1 = F10.from_sqrt(3, -2)
    t = QExpansion(F10, "t", {F10.elt(1): R(1)}, 400)
    H = hecke_T_plus(spec, a1, t)
    assert 1 <= H.trace_bound < 400
    for x in H.indices():
        assert (x * a1 * a1).trace() <= 400
    H = hecke_T_plus(spec, a1, t.restrict(14))
    assert H.trace_bound == 0 and H.indices() == [F10.zero]


def test_rank(F10, G10):
    spec = make_spec(F10, 2)
    idx = [x for x in G10[0].indices() if is_plus_space_index(spec, x)]
    rows = [[G10[j].coefficient(x) for x in idx] for j in (0, 1)]
    assert cyclotomic_rank(rows) == 2
    assert cyclotomic_rank([rows[0], rows[0]]) == 1


def test_weight_three_halves(F10):
    for j in (0, 1):
        spec = make_spec(F10, 1, j)
        G = eisenstein_qexpansion(spec, 10)
        assert G.keys()
        for x in G.keys():
            if not x.is_zero():
                assert is_square_mod4(F10, -x)
        H = hecke_T_plus(spec, F10.from_sqrt(3, -2), G)
        lam = hecke_eigenvalue(spec, F10.from_sqrt(3, -2))
        assert lam == 32
        for x in G.indices():
            assert H.coefficient(x) == G.coefficient(x) * lam


def test_json_round_trip(F10, G10):
    for G in G10.values():
        doc = G.to_json()
        text = json.dumps(doc, ensure_ascii=False)
        back = QExpansion.from_json(json.loads(text))
        assert back == G
        assert json.dumps(back.to_json(), ensure_ascii=False) == text
    doc = G10[0].to_json(60)
    assert doc["field"] == {"kind": "real_quadratic", "D": 10}
    assert doc["coefficients"][0] == {"xi": [0, 0], "trace": 0, "norm": 0, "value": "1577"}
