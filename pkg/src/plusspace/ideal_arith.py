"""Integral ideals of the ring of integers.

An ideal is kept as a lattice in Hermite normal form: Z*a + Z*(b + c*w) with
0 <= b < a.  Equality and divisibility reduce to integer linear algebra.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Optional

import sympy
from sympy.ntheory import sqrt_mod

from .base_field import BaseField, FieldElement


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def lattice_hnf(vectors: Iterable[tuple[int, int]]) -> tuple[int, int, int]:
    """HNF (a, b, c) of the rank-2 lattice spanned by integer vectors."""
    vecs = [(int(x), int(y)) for x, y in vectors]
    # pivot on the second coordinate
    px, py = 0, 0
    for x, y in vecs:
        g, s, t = _xgcd(py, y)
        if g == 0:
            continue
        # new pivot s*(px,py) + t*(x,y) has second coordinate g
        px, py = s * px + t * x, g
    if py < 0:
        px, py = -px, -py
    if py == 0:
        raise ValueError("vectors do not span a rank-2 lattice")
    a = 0
    for x, y in vecs:
        k = y // py
        a = math.gcd(a, x - k * px)
    if a == 0:
        raise ValueError("vectors do not span a rank-2 lattice")
    return a, px % a, py


class Ideal:
    """Nonzero integral ideal of O_F."""

    __slots__ = ("F", "a", "b", "c", "_hash")

    def __init__(self, F: BaseField, a: int, b: int = 0, c: int = 1):
        self.F = F
        self.a, self.b, self.c = int(a), int(b), int(c)
        if F.degree == 1:
            self.a, self.b, self.c = abs(self.a), 0, 1
        self._hash = hash((F.key, self.a, self.b, self.c))

    @classmethod
    def from_gens(cls, F: BaseField, gens: Iterable[FieldElement]) -> "Ideal":
        gens = [g for g in gens if not g.is_zero()]
        if not gens:
            raise ValueError("zero ideal")
        for g in gens:
            if not g.is_integral():
                raise ValueError(f"{g} is not integral")
        if F.degree == 1:
            n = 0
            for g in gens:
                n = math.gcd(n, int(g.a))
            return cls(F, n)
        w = F.omega
        vecs = []
        for g in gens:
            for h in (g, g * w):
                vecs.append((int(h.a), int(h.b)))
        return cls(F, *lattice_hnf(vecs))

    @classmethod
    def unit(cls, F: BaseField) -> "Ideal":
        return cls(F, 1, 0, 1)

    @classmethod
    def principal(cls, F: BaseField, x: FieldElement) -> "Ideal":
        return cls.from_gens(F, [x])

    def gens(self) -> list[FieldElement]:
        if self.F.degree == 1:
            return [self.F.elt(self.a)]
        return [self.F.elt(self.a), self.F.elt(self.b, self.c)]

    @property
    def norm(self) -> int:
        return self.a * self.c

    @property
    def basis(self) -> list[list[int]]:
        if self.F.degree == 1:
            return [[self.a, 0]]
        return [[self.a, 0], [self.b, self.c]]

    def min_integer(self) -> int:
        return self.a

    def __mul__(self, other: "Ideal") -> "Ideal":
        if self.F.degree == 1:
            return Ideal(self.F, self.a * other.a)
        return Ideal.from_gens(self.F, [g * h for g in self.gens() for h in other.gens()])

    def __pow__(self, k: int) -> "Ideal":
        out = Ideal.unit(self.F)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "Ideal":
        if self.F.degree == 1:
            return self
        return Ideal.from_gens(self.F, [g.conj() for g in self.gens()])

    def contains(self, x: FieldElement) -> bool:
        if not x.is_integral():
            return False
        xa, xb = int(x.a), int(x.b)
        if xb % self.c:
            return False
        k = xb // self.c
        return (xa - k * self.b) % self.a == 0

    def contains_ideal(self, other: "Ideal") -> bool:
        return all(self.contains(g) for g in other.gens())

    def divides(self, other: "Ideal") -> bool:
        return self.contains_ideal(other)

    def reduce(self, x: FieldElement) -> tuple[int, int]:
        """Canonical representative of x mod self as integer coordinates."""
        xa, xb = int(x.a), int(x.b)
        k = xb // self.c
        xb -= k * self.c
        xa -= k * self.b
        return xa % self.a, xb

    def residues(self) -> Iterator[FieldElement]:
        """Representatives of O/self."""
        for y in range(self.c):
            for x in range(self.a):
                yield self.F.elt(x, y)

    def coprime_to(self, other: "Ideal") -> bool:
        return (self + other).norm == 1

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal.from_gens(self.F, self.gens() + other.gens())

    def __eq__(self, other):
        return (isinstance(other, Ideal) and self.F == other.F
                and (self.a, self.b, self.c) == (other.a, other.b, other.c))

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Ideal(norm={self.norm}, basis={self.basis})"

    def to_json(self) -> dict:
        return {"norm": self.norm, "basis": self.basis}


@dataclass(frozen=True)
class PrimeIdeal:
    p: int
    residue_deg: int
    ram_index: int
    ideal: Ideal
    root: Optional[int] = None  # w = root mod p for degree-one primes

    @property
    def norm(self) -> int:
        return self.p ** self.residue_deg

    @property
    def basis(self) -> list[FieldElement]:
        F = self.ideal.F
        if self.residue_deg == 2 or F.degree == 1:
            return [F.elt(self.p)]
        return [F.elt(self.p), F.omega - self.root]

    def sort_key(self):
        return (self.p, self.residue_deg, -1 if self.root is None else self.root)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        if self.residue_deg == 2 or self.ideal.F.degree == 1:
            return f"P({self.p})"
        return f"P({self.p}, w-{self.root})"

    def power(self, k: int) -> Ideal:
        return _prime_power(self, k)

    def valuation(self, x: FieldElement) -> int:
        """ord_P(x) for integral nonzero x."""
        if x.is_zero():
            raise ValueError("valuation of zero")
        k = 0
        while _prime_power(self, k + 1).contains(x):
            k += 1
        return k

    def ideal_valuation(self, A: Ideal) -> int:
        k = 0
        while _prime_power(self, k + 1).contains_ideal(A):
            k += 1
        return k


@lru_cache(maxsize=4096)
def _prime_power(P: PrimeIdeal, k: int) -> Ideal:
    if k == 0:
        return Ideal.unit(P.ideal.F)
    if k == 1:
        return P.ideal
    return _prime_power(P, k - 1) * P.ideal


def _roots_mod_p(F: BaseField, p: int) -> list[int]:
    # roots of x^2 - t x + n mod p
    if p < 50:
        return [r for r in range(p) if (r * r - F.t * r + F.n) % p == 0]
    if F.t == 0:
        roots = sqrt_mod(-F.n % p, p, all_roots=True)
    else:
        disc = (F.t * F.t - 4 * F.n) % p
        inv2 = pow(2, -1, p)
        roots = [((F.t + s) * inv2) % p for s in sqrt_mod(disc, p, all_roots=True)]
    return sorted(set(int(r) for r in roots))


@lru_cache(maxsize=None)
def _factor_rational_prime(F: BaseField, p: int) -> tuple[PrimeIdeal, ...]:
    if F.degree == 1:
        return (PrimeIdeal(p, 1, 1, Ideal(F, p), None),)
    roots = _roots_mod_p(F, p)
    if not roots:
        return (PrimeIdeal(p, 2, 1, Ideal(F, p, 0, p), None),)
    # (p, w - r) = Z p + Z (w - r) already in normal form
    if F.disc % p == 0:
        r = roots[0]
        return (PrimeIdeal(p, 1, 2, Ideal(F, p, (-r) % p, 1), r),)
    return tuple(PrimeIdeal(p, 1, 1, Ideal(F, p, (-r) % p, 1), r) for r in roots)


def factor_rational_prime(F: BaseField, p: int) -> list[PrimeIdeal]:
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    return list(_factor_rational_prime(F, p))


class FactoredIdeal:
    """Product of prime powers, kept sorted."""

    __slots__ = ("factors", "F", "_ideal")

    def __init__(self, F: BaseField, factors: Iterable[tuple[PrimeIdeal, int]] = ()):
        merged: dict[PrimeIdeal, int] = {}
        for P, e in factors:
            if e < 0:
                raise ValueError("negative exponent in an integral ideal")
            if e:
                merged[P] = merged.get(P, 0) + e
        self.F = F
        self.factors = tuple(sorted(merged.items(), key=lambda pe: pe[0].sort_key()))
        self._ideal = None

    @classmethod
    def one(cls, F: BaseField) -> "FactoredIdeal":
        return cls(F, ())

    @classmethod
    def prime(cls, P: PrimeIdeal, e: int = 1) -> "FactoredIdeal":
        return cls(P.ideal.F, [(P, e)])

    @property
    def norm(self) -> int:
        out = 1
        for P, e in self.factors:
            out *= P.norm ** e
        return out

    def ideal(self) -> Ideal:
        if self._ideal is None:
            out = Ideal.unit(self.F)
            for P, e in self.factors:
                out = out * P.power(e)
            self._ideal = out
        return self._ideal

    def exponent(self, P: PrimeIdeal) -> int:
        for Q, e in self.factors:
            if Q == P:
                return e
        return 0

    def primes(self) -> list[PrimeIdeal]:
        return [P for P, _ in self.factors]

    def __mul__(self, other: "FactoredIdeal") -> "FactoredIdeal":
        return FactoredIdeal(self.F, list(self.factors) + list(other.factors))

    def __pow__(self, k: int) -> "FactoredIdeal":
        return FactoredIdeal(self.F, [(P, e * k) for P, e in self.factors])

    def divides(self, other: "FactoredIdeal") -> bool:
        return all(other.exponent(P) >= e for P, e in self.factors)

    def quotient(self, other: "FactoredIdeal") -> "FactoredIdeal":
        """self / other, which must be integral."""
        if not other.divides(self):
            raise ValueError("quotient is not integral")
        return FactoredIdeal(self.F, [(P, e - other.exponent(P)) for P, e in self.factors])

    def conj(self) -> "FactoredIdeal":
        out = []
        for P, e in self.factors:
            out.append((conjugate_prime(P), e))
        return FactoredIdeal(self.F, out)

    def is_one(self) -> bool:
        return not self.factors

    def coprime_to(self, other: "FactoredIdeal") -> bool:
        mine = set(self.primes())
        return not any(P in mine for P in other.primes())

    def __eq__(self, other):
        return isinstance(other, FactoredIdeal) and self.factors == other.factors

    def __hash__(self):
        return hash(self.factors)

    def __repr__(self):
        if not self.factors:
            return "(1)"
        return "*".join(f"{P!r}^{e}" if e > 1 else repr(P) for P, e in self.factors)

    def to_json(self) -> dict:
        out = self.ideal().to_json()
        out["factors"] = [{"p": P.p, "residue_deg": P.residue_deg, "root": P.root, "exp": e}
                          for P, e in self.factors]
        return out


def conjugate_prime(P: PrimeIdeal) -> PrimeIdeal:
    F = P.ideal.F
    if F.degree == 1 or P.residue_deg == 2 or P.ram_index == 2:
        return P
    target = P.ideal.conj()
    for Q in _factor_rational_prime(F, P.p):
        if Q.ideal == target:
            return Q
    raise RuntimeError("conjugate prime not found")


def factor_ideal(A: Ideal) -> FactoredIdeal:
    F = A.F
    out = []
    for p, _ in sympy.factorint(A.norm).items():
        for P in _factor_rational_prime(F, p):
            k = P.ideal_valuation(A)
            if k:
                out.append((P, k))
    fac = FactoredIdeal(F, out)
    if fac.norm != A.norm:
        raise RuntimeError("factorization does not recover the norm")
    return fac


def factor_principal(F: BaseField, xi: FieldElement) -> FactoredIdeal:
    if xi.is_zero():
        raise ValueError("the zero ideal has no factorization")
    if not xi.is_integral():
        raise ValueError(f"{xi} is not integral")
    N = abs(int(xi.norm()))
    out = []
    for p, k in sympy.factorint(N).items():
        primes = _factor_rational_prime(F, p)
        for P in primes:
            v = P.valuation(xi)
            if v:
                out.append((P, v))
    fac = FactoredIdeal(F, out)
    if fac.norm != N:
        raise RuntimeError("factorization does not recover |N(xi)|")
    return fac


def divisors(A: FactoredIdeal) -> list[FactoredIdeal]:
    ranges = [range(e + 1) for _, e in A.factors]
    out = []
    for exps in product(*ranges):
        out.append(FactoredIdeal(A.F, [(P, k) for (P, _), k in zip(A.factors, exps)]))
    out.sort(key=lambda B: (B.norm, [(P.sort_key(), e) for P, e in B.factors]))
    return out


def moebius(A: FactoredIdeal) -> int:
    if any(e > 1 for _, e in A.factors):
        return 0
    return -1 if len(A.factors) % 2 else 1


def primes_up_to_norm(F: BaseField, B: int) -> list[PrimeIdeal]:
    out = []
    for p in sympy.primerange(2, B + 1):
        for P in _factor_rational_prime(F, p):
            if P.norm <= B:
                out.append(P)
    return out


def enumerate_ideals(F: BaseField, B: int) -> list[FactoredIdeal]:
    """All integral ideals of norm <= B, each once."""
    if B < 1:
        raise ValueError("B must be positive")
    primes = sorted(primes_up_to_norm(F, B), key=lambda P: (P.norm, P.sort_key()))
    out: list[FactoredIdeal] = []

    def rec(start: int, norm: int, acc: list):
        out.append(FactoredIdeal(F, acc))
        # primes are sorted by norm, so once one overflows all later ones do
        for j in range(start, len(primes)):
            P = primes[j]
            n = norm * P.norm
            if n > B:
                break
            k = 1
            while n <= B:
                rec(j + 1, n, acc + [(P, k)])
                k += 1
                n *= P.norm

    rec(0, 1, [])
    out.sort(key=lambda A: (A.norm, [(P.sort_key(), e) for P, e in A.factors]))
    return out
