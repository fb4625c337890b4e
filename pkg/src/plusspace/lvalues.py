"""Exact and numeric values of L_F(1 - k, chi) for chi = chi_xi * (class character).

Exact route over a real quadratic field: for each wide class C choose an
integral ideal b in the inverse class, coprime to the modulus m.  Ideals of C
are (nu) b^-1 with nu in b totally positive, taken modulo the totally positive
units.  A fundamental domain is the cone mu * {x + y eps_plus : x > 0, y >= 0}
for any totally positive mu in m*b, and the lattice b meets it in finitely many
translates rho + N*mu + N*mu*eps_plus.  The character weight only depends on
rho mod m*b.  Shintani's formula then gives each translate's contribution at
s = 1 - k as a finite sum of products of Bernoulli polynomials.

Over Q the generalized Bernoulli numbers are used directly.

The numeric route sums the Dirichlet series at s = k and applies the
functional equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import mpmath
import numpy as np
import sympy
from sympy.functions.combinatorial.numbers import kronecker_symbol

from .base_field import BaseField, FieldElement
from .class_group import ClassCharacter, compute_class_group
from .cyclotomic import CycRat
from .ideal_arith import (FactoredIdeal, Ideal, _factor_rational_prime, enumerate_ideals,
                          factor_principal, lattice_hnf)
from .quad_invariants import chi_xi_at_prime, chi_xi_on_ideal, relative_discriminant

MAX_KAPPA = 6


class PoleError(ValueError):
    pass


# characters


@dataclass(frozen=True, eq=False)
class CharacterSpec:
    """chi(A) = chi_xi(A) * psi(A), psi a class character or its conjugate."""

    field: BaseField
    twist_xi: Optional[FieldElement]
    class_char: Optional[ClassCharacter]
    conjugate_class_char: bool = False
    modulus: FactoredIdeal = None

    def __post_init__(self):
        F = self.field
        if self.class_char is None:
            object.__setattr__(self, "class_char", compute_class_group(F).character(0))
        if self.twist_xi is not None and self._xi_is_square():
            object.__setattr__(self, "twist_xi", None)
        if self.modulus is None:
            if self.twist_xi is None:
                mod = FactoredIdeal.one(F)
            else:
                mod = relative_discriminant(F, self.twist_xi).D
            object.__setattr__(self, "modulus", mod)

    def _xi_is_square(self) -> bool:
        return is_square(self.twist_xi)

    @property
    def psi(self) -> ClassCharacter:
        return self.class_char.conj() if self.conjugate_class_char else self.class_char

    def is_trivial(self) -> bool:
        return self.twist_xi is None and self.psi.is_trivial()

    def is_real(self) -> bool:
        return self.psi.order() <= 2

    def chi_xi(self, A: FactoredIdeal) -> int:
        if self.twist_xi is None:
            return 1
        return chi_xi_on_ideal(self.field, self.twist_xi, A)

    def __call__(self, A: FactoredIdeal) -> CycRat:
        if not A.coprime_to(self.modulus):
            return CycRat.rational(0)
        return self.psi(A) * self.chi_xi(A)

    def parity(self) -> int:
        """0 when the character is even at every real place, 1 when odd at every one."""
        if self.twist_xi is None:
            return 0
        s = self.twist_xi.signs()
        if s == (1, 1):
            return 0
        if s == (-1, -1):
            return 1
        return -1

    def cache_key(self):
        return (self.field.key, _square_class_key(self.twist_xi), self.psi.exponent_vector)


def is_square(x: FieldElement) -> bool:
    """Is x a square in F?"""
    if x.is_zero():
        return True
    N = x.norm()
    if x.D == 0:
        return N > 0 and _is_rational_square(N)
    if not _is_rational_square(N) or not x.is_totally_positive():
        return False
    u, v = x.sqrt_coords()
    s = _rational_sqrt(N)
    # (a + b sqrt D)^2 = u + v sqrt D gives a^2 = (u +- s)/2
    for t in (u + s, u - s):
        a2 = t / 2
        if a2 >= 0 and _is_rational_square(a2):
            a = _rational_sqrt(a2)
            if a == 0:
                if v == 0 and _is_rational_square(u / x.F.D):
                    return True
                continue
            b = v / (2 * a)
            if a * a + x.F.D * b * b == u:
                return True
    return False


def _is_rational_square(q: Fraction) -> bool:
    q = Fraction(q)
    if q < 0:
        return False
    return (math.isqrt(q.numerator) ** 2 == q.numerator
            and math.isqrt(q.denominator) ** 2 == q.denominator)


def _rational_sqrt(q: Fraction) -> Fraction:
    q = Fraction(q)
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


def _square_class_key(xi: Optional[FieldElement]):
    """Hashable key identifying xi modulo squares (None for the trivial class)."""
    if xi is None:
        return None
    F = xi.F
    rd = relative_discriminant(F, xi)
    # the relative discriminant and the local symbols at a few auxiliary primes
    # are only a bucket; exact identification is done by is_square(xi * rep)
    return (tuple((P.sort_key(), e) for P, e in rd.D.factors), xi.signs())


# Bernoulli helpers


@lru_cache(maxsize=None)
def _bernoulli_poly_coeffs(l: int, reflected: bool) -> tuple[Fraction, ...]:
    """Coefficients (lowest first) of B_l(1 - x) if reflected, else B_l(x)."""
    x = sympy.Symbol("x")
    arg = 1 - x if reflected else x
    poly = sympy.Poly(sympy.expand(sympy.bernoulli(l, arg)), x)
    coeffs = [Fraction(int(sympy.fraction(c)[0]), int(sympy.fraction(c)[1]))
              for c in reversed(poly.all_coeffs())]
    return tuple(coeffs)


def _bernoulli_poly_value(l: int, x: Fraction) -> Fraction:
    out = Fraction(0)
    for c in reversed(_bernoulli_poly_coeffs(l, False)):
        out = out * x + c
    return out


def fundamental_discriminant(n: int) -> int:
    """Discriminant of Q(sqrt n) for a nonsquare integer n."""
    if n == 0:
        raise ValueError("n must be nonzero")
    sign = -1 if n < 0 else 1
    core = 1
    for p, e in sympy.factorint(abs(n)).items():
        if e % 2:
            core *= p
    core *= sign
    if core == 1:
        return 1
    return core if core % 4 == 1 else 4 * core


def bernoulli_L_rational(r: int, chi) -> Fraction:
    """L(1 - r, chi) over Q, chi given by a fundamental discriminant d (1 = trivial)
    or by a CharacterSpec over Q."""
    if isinstance(chi, CharacterSpec):
        if chi.field.degree != 1:
            raise ValueError("bernoulli_L_rational needs a character over Q")
        d = 1 if chi.twist_xi is None else fundamental_discriminant(int(chi.twist_xi.a))
    else:
        d = int(chi)
    if r < 1:
        raise ValueError("r must be at least 1")
    if d == 1:
        if r == 1:
            raise PoleError("r = 1 with the trivial character is rejected")
        return -_bernoulli_number(r) / r
    f = abs(d)
    # B_{r,chi} = f^(r-1) * sum_{a=1}^{f} chi(a) B_r(a/f)
    total = Fraction(0)
    for a in range(1, f + 1):
        c = int(kronecker_symbol(d, a))
        if c:
            total += c * _bernoulli_poly_value(r, Fraction(a, f))
    B = Fraction(f) ** (r - 1) * total
    return -B / r


@lru_cache(maxsize=None)
def _bernoulli_number(r: int) -> Fraction:
    b = sympy.bernoulli(r)
    return Fraction(int(b.p), int(b.q))


# Shintani cone engine


def _series_power(a: FieldElement, b: FieldElement, n: int, k: int) -> list[FieldElement]:
    """Coefficients of (a + b u)^n up to u^(k-1), n >= -1."""
    F = a.F
    out = []
    if n >= 0:
        for m in range(k):
            if m > n:
                out.append(F.zero)
            else:
                out.append(a ** (n - m) * b ** m * math.comb(n, m))
        return out
    if n != -1:
        raise ValueError("exponent must be at least -1")
    ainv = a.inverse()
    r = -b * ainv
    cur = ainv
    for _ in range(k):
        out.append(cur)
        cur = cur * r
    return out


@lru_cache(maxsize=4096)
def _cone_coefficients(mu: FieldElement, eps: FieldElement, k: int) -> dict:
    """c(l1, l2) = trace of [u^(k-1)] (v1 + v1' u)^(l1-1) (v2 + v2' u)^(l2-1)."""
    v1, v2 = mu, mu * eps
    out = {}
    for l1 in range(2 * k + 1):
        l2 = 2 * k - l1
        s1 = _series_power(v1, v1.conj(), l1 - 1, k)
        s2 = _series_power(v2, v2.conj(), l2 - 1, k)
        c = v1.F.zero
        for i in range(k):
            c = c + s1[i] * s2[k - 1 - i]
        out[(l1, l2)] = c.trace()
    return out


def _lattice_points(A: Ideal, mu: FieldElement, eps: FieldElement):
    """(d, [(X1, X2, rho)]) for rho in A with rho = (X1 mu + X2 mu eps)/d,
    0 < X1 <= d, 0 <= X2 < d."""
    e0, e1 = eps.sqrt_coords()

    def coords(z: FieldElement) -> tuple[Fraction, Fraction]:
        r0, r1 = (z / mu).sqrt_coords()
        x2 = r1 / e1
        return r0 - e0 * x2, x2

    gens = [coords(g) for g in A.gens()]
    d = 1
    for x, y in gens:
        d = math.lcm(d, x.denominator, y.denominator)
    vecs = [(int(x * d), int(y * d)) for x, y in gens] + [(d, 0), (0, d)]
    # lattice_hnf pivots on the second coordinate: Z(a, 0) + Z(b, c)
    a, b, c = lattice_hnf(vecs)
    pts = []
    eps_mu = mu * eps
    for j in range(d // c):
        for i in range(d // a):
            X1 = (i * a + j * b) % d
            X2 = (j * c) % d
            if X1 == 0:
                X1 = d
            rho = (mu * X1 + eps_mu * X2) * Fraction(1, d)
            pts.append((X1, X2, rho))
    return d, pts


def _small_tp_element(M: Ideal) -> FieldElement:
    """A totally positive element of M with small norm relative to N(M)."""
    F = M.F
    g1, g2 = M.gens()
    best = None
    R = 2
    while best is None or R <= 8:
        for x in range(-R * 4, R * 4 + 1):
            for y in range(-R, R + 1):
                v = g1 * x + g2 * y
                if v.is_zero() or not v.is_totally_positive():
                    continue
                key = (v.norm(), v.trace())
                if best is None or key < best[0]:
                    best = (key, v)
        R *= 2
    # move toward balanced embeddings with the unit, without changing the norm
    v = best[1]
    eps = F.tp_unit
    for _ in range(64):
        w = v * eps.inverse()
        if w.trace() < v.trace():
            v = w
            continue
        w = v * eps
        if w.trace() < v.trace():
            v = w
            continue
        break
    return v


def _cone_sum(F: BaseField, A: Ideal, k: int, weight) -> Fraction:
    """sum over totally positive nu in A mod eps_plus of weight(nu) N(nu)^(k-1),
    regularized at s = 1 - k.  ``weight`` is (M, fn) with fn periodic mod M."""
    M, fn = weight
    mu = _small_tp_element(M)
    eps = F.tp_unit
    d, pts = _lattice_points(A, mu, eps)
    coeffs = _cone_coefficients(mu, eps, k)
    # moments m[a][b] = sum_w w * X1^a X2^b with a + b <= 2k
    top = 2 * k
    mom = [[0] * (top + 1) for _ in range(top + 1)]
    cache: dict = {}
    for X1, X2, rho in pts:
        key = M.reduce(rho)
        w = cache.get(key)
        if w is None:
            w = fn(rho)
            cache[key] = w
        if not w:
            continue
        p1 = [1] * (top + 1)
        p2 = [1] * (top + 1)
        for t in range(1, top + 1):
            p1[t] = p1[t - 1] * X1
            p2[t] = p2[t - 1] * X2
        for a_ in range(top + 1):
            row = mom[a_]
            wa = w * p1[a_]
            for b_ in range(top + 1 - a_):
                row[b_] += wa * p2[b_]
    total = Fraction(0)
    for (l1, l2), c in coeffs.items():
        if not c:
            continue
        B1 = _bernoulli_poly_coeffs(l1, True)
        B2 = _bernoulli_poly_coeffs(l2, True)
        S = Fraction(0)
        for a_, ca in enumerate(B1):
            if not ca:
                continue
            for b_, cb in enumerate(B2):
                if cb and mom[a_][b_]:
                    S += ca * cb * Fraction(mom[a_][b_], d ** (a_ + b_))
        total += c * S / (math.factorial(l1) * math.factorial(l2))
    return total * math.factorial(k - 1) ** 2 / 2


def _ideal_in_class(F: BaseField, cls_coords, avoid: FactoredIdeal) -> FactoredIdeal:
    G = compute_class_group(F)
    B = 16
    while True:
        for A in enumerate_ideals(F, B):
            if A.coprime_to(avoid) and G.log(A) == tuple(cls_coords):
                return A
        B *= 4
        if B > 10 ** 6:
            raise RuntimeError("no small ideal found in the requested class")


def _mixed_sign_element(F: BaseField, avoid: FactoredIdeal) -> FieldElement:
    """delta with signs (+, -) and coprime to ``avoid``."""
    primes = avoid.primes()
    for s in range(1, 400):
        for a in range(-s, s + 1):
            for b in (-s + abs(a), s - abs(a)):
                x = F.elt(a, b)
                if x.is_zero() or x.signs() != (1, -1):
                    continue
                if any(P.ideal.contains(x) for P in primes):
                    continue
                return x
    raise RuntimeError("no element of mixed sign found")


def _class_sum(F: BaseField, k: int, xi: Optional[FieldElement], modulus: FactoredIdeal,
               cls_coords) -> Fraction:
    """sum over integral A in the given wide class, coprime to modulus, of
    chi_xi(A) N(A)^(k-1), regularized at s = 1 - k."""
    G = compute_class_group(F)
    inv = tuple((-c) % d for c, d in zip(cls_coords, G.cycle_structure))
    b = _ideal_in_class(F, inv, modulus)
    lattices = [b]
    if F.fund_unit.norm() == 1:
        delta = _mixed_sign_element(F, modulus)
        lattices.append(b * factor_principal(F, delta))
    mod_ideal = modulus.ideal()
    out = Fraction(0)
    for Bf in lattices:
        Bi = Bf.ideal()
        M = mod_ideal * Bi
        primes = modulus.primes()

        def weight(rho: FieldElement, Bf=Bf) -> int:
            if any(P.ideal.contains(rho) for P in primes):
                return 0
            if xi is None:
                return 1
            A = factor_principal(F, rho).quotient(Bf)
            return chi_xi_on_ideal(F, xi, A)

        out += Fraction(Bf.norm) ** (1 - k) * _cone_sum(F, Bi, k, (M, weight))
    return out


_L_CACHE: dict = {}


def hecke_L_exact(F: BaseField, kappa: int, chi: CharacterSpec) -> CycRat:
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    if F.degree == 2 and kappa > MAX_KAPPA:
        raise ValueError(f"kappa > {MAX_KAPPA} is not supported over a quadratic field")
    if chi.field != F:
        raise ValueError("character belongs to a different field")
    if F.degree == 1:
        return CycRat.rational(bernoulli_L_rational(kappa, chi))
    if kappa == 1 and chi.is_trivial():
        raise PoleError("kappa = 1 with the trivial character is rejected")
    a = chi.parity()
    if a == -1:
        raise ValueError("characters of mixed signature are not supported")
    if (kappa + a) % 2:
        # trivial zero forced by the gamma factors
        return CycRat.rational(0)
    key = (kappa,) + chi.cache_key()
    bucket = _L_CACHE.setdefault(key, [])
    for rep, val in bucket:
        if (rep is None and chi.twist_xi is None) or (
                rep is not None and chi.twist_xi is not None and is_square(rep * chi.twist_xi)):
            return val
    G = compute_class_group(F)
    psi = chi.psi
    total = CycRat.rational(0)
    for i in range(G.h):
        coords = G.coords_of_index(i)
        s = _class_sum(F, kappa, chi.twist_xi, chi.modulus, coords)
        if s:
            total = total + psi.value_on_coords(coords) * s
    bucket.append((chi.twist_xi, total))
    return total


def zeta_partial_class(F: BaseField, i: int, kappa: int) -> Fraction:
    if F.degree != 2:
        raise ValueError("partial zeta values need a real quadratic field")
    if kappa < 1:
        raise ValueError("kappa must be at least 1")
    G = compute_class_group(F)
    if not 0 <= i < G.h:
        raise IndexError(f"class index {i} out of range")
    return _class_sum(F, kappa, None, FactoredIdeal.one(F), G.coords_of_index(i))


# numeric backend


DEFAULT_TERMS = 200_000


def _prime_character_values(F: BaseField, chi: CharacterSpec, B: int):
    """(p, [(f, value)]) for rational primes p <= B: residue degrees and chi(P)."""
    out = []
    xi = chi.twist_xi
    psi = chi.psi
    G = compute_class_group(F)
    mod_primes = set(chi.modulus.primes())
    for p in sympy.primerange(2, B + 1):
        vals = []
        for P in _factor_rational_prime(F, p):
            if P.norm > B:
                continue
            if P in mod_primes:
                vals.append((P.residue_deg, 0j))
                continue
            c = 1 if xi is None else chi_xi_at_prime(xi, P)
            if psi.is_trivial() or P.residue_deg == 2:
                z = complex(c)
            else:
                z = c * psi.value_on_coords(G.prime_log(P)).to_complex()
            vals.append((P.residue_deg, z))
        out.append((p, vals))
    return out


def _dirichlet_sum(F: BaseField, chi: CharacterSpec, s: int, B: int) -> complex:
    a = np.ones(B + 1, dtype=complex)
    a[0] = 0
    for p, vals in _prime_character_values(F, chi, B):
        # local coefficients of prod 1/(1 - z T^f)
        J = int(math.log(B) / math.log(p)) + 1
        while p ** J > B:
            J -= 1
        loc = np.zeros(J + 1, dtype=complex)
        loc[0] = 1
        for f, z in vals:
            new = loc.copy()
            for j in range(f, J + 1):
                new[j] += z * new[j - f]
            loc = new
        if J == 0:
            continue
        idx = np.arange(p, B + 1, p)
        mult = np.full(len(idx), loc[1], dtype=complex)
        for j in range(2, J + 1):
            step = p ** (j - 1)
            mult[step - 1::step] = loc[j]
        a[idx] *= mult
        # primes above the truncation can still appear inside products: none do,
        # since every n <= B has all its prime factors <= B
    n = np.arange(1, B + 1, dtype=float)
    return complex(np.sum(a[1:] * n ** (-float(s))))


@dataclass
class NumericLValue:
    value: complex
    error_bound: float
    terms: int


def hecke_L_numeric(F: BaseField, kappa: int, chi: CharacterSpec,
                    B: int = DEFAULT_TERMS) -> NumericLValue:
    """L_F(1 - kappa, chi) from the Dirichlet series of the conjugate character at
    s = kappa and the functional equation."""
    if kappa < 2:
        raise ValueError("the numeric backend needs kappa >= 2")
    a = chi.parity()
    if a == -1:
        raise ValueError("characters of mixed signature are not supported")
    conj = CharacterSpec(F, chi.twist_xi, chi.class_char, not chi.conjugate_class_char,
                         chi.modulus)
    Ls = _dirichlet_sum(F, conj, kappa, B)
    n = F.degree
    k = mpmath.mpf(kappa)
    cond = abs(F.disc) * chi.modulus.norm
    # Lambda(s) = (|D| N(f))^(s/2) Gamma_R(s + a)^n L(s); W = psi-bar(D_xi * d)
    if (kappa + a) % 2:
        return NumericLValue(0j, 0.0, B)
    if a == 0:
        gam = mpmath.pi ** (k - mpmath.mpf(1) / 2) * mpmath.gamma((1 - k) / 2) / mpmath.gamma(k / 2)
    else:
        # limit of Gamma(1-k)/Gamma((1-k)/2) at odd k, as in the printed odd branch
        m = (kappa - 1) // 2
        ratio = mpmath.mpf((-1) ** m * math.factorial(m)) / (2 * math.factorial(kappa - 1))
        gam = (4 * mpmath.pi) ** (k - mpmath.mpf(1) / 2) * ratio * mpmath.gamma(k / 2) / mpmath.gamma(k)
    factor = mpmath.mpf(cond) ** (mpmath.mpf(1) / 2 - k) * gam ** n
    W = complex(1)
    if F.degree == 2:
        psi_bar = conj.psi
        D_ideal = chi.modulus * _different(F)
        W = psi_bar(D_ideal).to_complex()
    value = Ls / (complex(factor) * W)
    # tail of sum_{N(A) > B} N(A)^(-kappa) for a field of degree n
    tail = 4.0 * B ** (1 - kappa) / (kappa - 1) * (1 + math.log(B)) ** (n - 1)
    return NumericLValue(value, tail / abs(complex(factor)), B)


@lru_cache(maxsize=None)
def _different(F: BaseField) -> FactoredIdeal:
    return factor_principal(F, F.different_gen)


def L_value_for_coefficient(F: BaseField, kappa: int, xi: Optional[FieldElement],
                            chi_prime: ClassCharacter) -> CycRat:
    """L_F(1 - kappa, chi_xi * conj(chi'))."""
    return hecke_L_exact(F, kappa, CharacterSpec(F, xi, chi_prime, True))
