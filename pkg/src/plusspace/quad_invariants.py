"""Local square-class invariants f_xi and chi_xi and their global assembly.

At a place v with e = ord_v(2), write xi = pi^(2m) u.  The unit u lies in the
filtration U_r = (squares) * (1 + p^(2r)) for 0 <= r <= e, and membership is
decided as "u is a square modulo p^(2r)".  Then f = m - e + r, and an odd
valuation 2m + 1 gives f = m - e.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional

import sympy

from .base_field import BaseField, FieldElement
from .ideal_arith import (FactoredIdeal, Ideal, PrimeIdeal, _factor_rational_prime,
                          _prime_power)

INF = math.inf


@dataclass(frozen=True)
class LocalPlaceData:
    prime: PrimeIdeal
    q: int
    e: int
    c: int
    precision: int
    uniformizer: FieldElement

    @property
    def p(self) -> int:
        return self.prime.p

    @property
    def precision_modulus(self) -> Ideal:
        return _prime_power(self.prime, self.precision)


@dataclass(frozen=True)
class LocalInvariant:
    f: float | int
    chi: int
    flagged: bool = False


def _find_uniformizer(P: PrimeIdeal) -> FieldElement:
    F = P.ideal.F
    p = P.p
    if F.degree == 1 or P.residue_deg == 2:
        return F.elt(p)
    # an element of P whose norm has p-adic valuation exactly one lies in P
    # but not in P^2, and for split p not in the conjugate prime
    for k in range(0, 4):
        cand = F.omega - P.root + k * p
        N = int(cand.norm())
        if N % p == 0 and N % (p * p) != 0:
            return cand
    raise RuntimeError(f"no uniformizer found for {P}")


@lru_cache(maxsize=None)
def place_data(P: PrimeIdeal) -> LocalPlaceData:
    F = P.ideal.F
    e = P.valuation(F.elt(2)) if P.p == 2 else 0
    c = P.valuation(F.different_gen) if F.degree == 2 else 0
    return LocalPlaceData(P, P.norm, e, c, 2 * e + 3, _find_uniformizer(P))


def places_over(F: BaseField, p: int) -> list[LocalPlaceData]:
    return [place_data(P) for P in _factor_rational_prime(F, p)]


def _divide_by_uniformizer(v: LocalPlaceData, x: FieldElement, K: int) -> FieldElement:
    """x / pi modulo p^K O, for x in P."""
    F = x.F
    p = v.p
    pi = v.uniformizer
    if F.degree == 1 or v.prime.residue_deg == 2:
        y = x * Fraction(1, p)
        if not y.is_integral():
            raise ValueError("element is not divisible by the uniformizer")
        return y
    y = x * pi.conj()
    N = int(pi.norm())
    m = N // p
    if y.a.denominator != 1 or int(y.a) % p or int(y.b) % p:
        raise ValueError("element is not divisible by the uniformizer")
    y = F.elt(int(y.a) // p, int(y.b) // p)
    minv = pow(m, -1, p ** K)
    mod = p ** K
    return F.elt((int(y.a) * minv) % mod, (int(y.b) * minv) % mod)


def unit_part(v: LocalPlaceData, xi: FieldElement, K: int) -> tuple[int, FieldElement]:
    """(ord_v(xi), u) with u = xi / pi^ord modulo p^K."""
    k = v.prime.valuation(xi)
    x = xi
    mod = v.p ** (K + k + 1)
    x = xi.F.elt(int(x.a) % mod, int(x.b) % mod) if xi.F.degree == 2 else x
    for i in range(k):
        x = _divide_by_uniformizer(v, x, K + k - i)
    return k, x


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def residue_symbol(v: LocalPlaceData, u: FieldElement) -> int:
    """Quadratic character of the residue class of u (odd p)."""
    P = v.prime
    if u.F.degree == 1:
        return _legendre(int(u.a), P.p)
    if P.residue_deg == 2:
        return _legendre(int(u.norm()), P.p)
    return _legendre(int(u.a) + int(u.b) * P.root, P.p)


@lru_cache(maxsize=None)
def _unit_squares(P: PrimeIdeal, n: int) -> frozenset:
    I = _prime_power(P, n)
    out = set()
    for x in I.residues():
        if P.ideal.contains(x):
            continue
        out.add(I.reduce(x * x))
    return frozenset(out)


def is_square_mod(v: LocalPlaceData, u: FieldElement, n: int) -> bool:
    """Is the unit u congruent to a square modulo p^n?"""
    if n <= 0:
        return True
    if v.p != 2 and n == 1:
        return residue_symbol(v, u) == 1
    I = _prime_power(v.prime, n)
    return I.reduce(u) in _unit_squares(v.prime, n)


def is_local_square_unit(v: LocalPlaceData, u: FieldElement) -> bool:
    if v.e == 0:
        return residue_symbol(v, u) == 1
    N = v.precision
    a = is_square_mod(v, u, N)
    b = is_square_mod(v, u, N + 2)
    c = is_square_mod(v, u, 2 * v.e + 1)
    if not (a == b == c):
        raise RuntimeError(f"square test did not stabilize at {v.prime}")
    return a


def filtration_level(v: LocalPlaceData, u: FieldElement) -> int:
    """Largest r in [0, e] with u in U_r."""
    r = 0
    for s in range(1, v.e + 1):
        if is_square_mod(v, u, 2 * s):
            r = s
        else:
            break
    return r


def local_invariants(F: BaseField, v: LocalPlaceData, xi: FieldElement) -> LocalInvariant:
    if xi.is_zero():
        return LocalInvariant(INF, 1, True)
    if not xi.is_integral():
        raise ValueError("xi must be integral")
    return _local_invariants(v, xi)


@lru_cache(maxsize=200_000)
def _local_invariants(v: LocalPlaceData, xi: FieldElement) -> LocalInvariant:
    K = 2 * v.e + 8
    k, u = unit_part(v, xi, K)
    m = k // 2
    if k % 2:
        return LocalInvariant(m - v.e, 0)
    if v.e == 0:
        return LocalInvariant(m, residue_symbol(v, u))
    r = filtration_level(v, u)
    f = m - v.e + r
    if r < v.e:
        return LocalInvariant(f, 0)
    return LocalInvariant(f, 1 if is_local_square_unit(v, u) else -1)


def relevant_places(F: BaseField, xi: FieldElement) -> list[LocalPlaceData]:
    ps = set(sympy.factorint(abs(int(xi.norm()))).keys()) | {2}
    out = []
    for p in sorted(ps):
        out.extend(places_over(F, p))
    return out


class RelativeDiscriminant:
    """(xi) = Fc^2 * Dc, with per-place exponents; unpacks as (Dc, Fc)."""

    def __init__(self, F, Dc: FactoredIdeal, Fc: Optional[FactoredIdeal], f_local: dict):
        self.F = F
        self.D = Dc
        self.Fc = Fc
        self.f_local = f_local

    @property
    def integral(self) -> bool:
        return all(f >= 0 for f in self.f_local.values())

    def __iter__(self) -> Iterator:
        yield self.D
        yield self.Fc

    def __repr__(self):
        return f"RelativeDiscriminant(D={self.D!r}, F={self.Fc!r}, integral={self.integral})"


@lru_cache(maxsize=50_000)
def _relative_discriminant(xi: FieldElement) -> RelativeDiscriminant:
    F = xi.F
    dfac, ffac, flocal = [], [], {}
    for v in relevant_places(F, xi):
        inv = _local_invariants(v, xi)
        k = v.prime.valuation(xi)
        d = k - 2 * inv.f
        flocal[v.prime] = inv.f
        if inv.f > 0:
            ffac.append((v.prime, inv.f))
        if d:
            dfac.append((v.prime, d))
    Dc = FactoredIdeal(F, dfac)
    Fc = FactoredIdeal(F, ffac)
    return RelativeDiscriminant(F, Dc, Fc, flocal)


def relative_discriminant(F: BaseField, xi: FieldElement) -> RelativeDiscriminant:
    if xi.is_zero():
        raise ValueError("xi must be nonzero")
    return _relative_discriminant(xi)


def is_square_mod4(F: BaseField, xi: FieldElement) -> bool:
    if not xi.is_integral():
        raise ValueError("xi must be integral")
    reps = [(0, 0), (1, 0)] if F.degree == 1 else [(0, 0), (1, 0), (0, 1), (1, 1)]
    for a, b in reps:
        y = F.elt(a, b)
        d = xi - y * y
        if int(d.a) % 4 == 0 and int(d.b) % 4 == 0:
            return True
    return False


def chi_xi_at_prime(xi: FieldElement, P: PrimeIdeal) -> int:
    if P.p != 2:
        N = int(xi.norm())
        if N % P.p:
            # unramified and xi a unit at P
            return residue_symbol(place_data(P), xi)
    return _local_invariants(place_data(P), xi).chi


def chi_xi_on_ideal(F: BaseField, xi: FieldElement, A: FactoredIdeal) -> int:
    if xi.is_zero():
        raise ValueError("xi must be nonzero")
    out = 1
    for P, e in A.factors:
        c = chi_xi_at_prime(xi, P)
        if c == 0:
            return 0
        if e % 2:
            out *= c
    return out


def min_local_f(F: BaseField, xi: FieldElement) -> int:
    return min(_local_invariants(v, xi).f for v in relevant_places(F, xi))
