"""Wide ideal class group, its characters, and exact character values.

Classes are found from the primes below the Minkowski bound.  Two ideals
A, B are equivalent when A * conj(B) is principal, and principality is
decided by an exhaustive search over a box that provably contains a
generator when one exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Optional

import sympy
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from .base_field import BaseField, FieldElement
from .cyclotomic import CycRat
from .ideal_arith import (FactoredIdeal, Ideal, PrimeIdeal, _factor_rational_prime,
                          factor_principal, primes_up_to_norm)

__all__ = ["CycRat", "ClassGroup", "ClassCharacter", "PrincipalityUndecided",
           "principal_generator", "compute_class_group", "class_of", "character_value",
           "characters"]

# hard cap on lattice points visited in one principality search
MAX_SEARCH_POINTS = 2_000_000


class PrincipalityUndecided(RuntimeError):
    pass


def principal_generator(A: Ideal, max_points: int = MAX_SEARCH_POINTS) -> Optional[FieldElement]:
    """A generator of A, or None when A is not principal.

    If A = (v) the generator can be moved by a unit so that 1 <= |v/v'| < eps^2,
    which puts v in the box |v| < sqrt(N) eps, |v'| <= sqrt(N).  Every point of
    A in that box is tested.
    """
    F = A.F
    if F.degree == 1:
        return F.elt(A.a)
    N = A.norm
    eps = max(abs(x) for x in F.fund_unit.embeddings())
    R1 = math.sqrt(N) * eps * (1 + 1e-9) + 1e-9
    R2 = math.sqrt(N) * (1 + 1e-9) + 1e-9
    sD = math.sqrt(F.D)
    g2 = F.elt(A.b, A.c)
    e1, e2 = g2.embeddings()
    # v - v' = y * c * (w - w') = y * c * sqrt D
    ymax = int((R1 + R2) / (A.c * sD)) + 1
    visited = 0
    for y in range(-ymax, ymax + 1):
        lo = max(-R1 - y * e1, -R2 - y * e2) / A.a
        hi = min(R1 - y * e1, R2 - y * e2) / A.a
        for x in range(math.floor(lo) - 1, math.ceil(hi) + 2):
            visited += 1
            v = F.elt(x * A.a + y * A.b, y * A.c)
            if abs(v.norm()) == N and not v.is_zero():
                return v
        if visited > max_points:
            raise PrincipalityUndecided(f"search budget exhausted for {A}")
    return None


def is_principal(A: Ideal) -> bool:
    return principal_generator(A) is not None


def equivalent(A: Ideal, B: Ideal) -> bool:
    return is_principal(A * B.conj())


def _short_vector(P: Ideal) -> FieldElement:
    """A short nonzero element of P for the Minkowski quadratic form."""
    F = P.F
    u, v = P.gens()

    def q(x: FieldElement) -> float:
        a, b = x.embeddings()
        return a * a + b * b

    def dot(x, y):
        a1, b1 = x.embeddings()
        a2, b2 = y.embeddings()
        return a1 * a2 + b1 * b2

    # Lagrange-Gauss reduction; exactness of the result does not depend on it
    if q(u) < q(v):
        u, v = v, u
    for _ in range(200):
        k = round(dot(u, v) / q(v))
        u = u - F.elt(k) * v
        if q(u) >= q(v):
            break
        u, v = v, u
    return v if q(v) <= q(u) else u


@dataclass
class ClassGroup:
    F: BaseField
    h: int
    cycle_structure: list[int]
    reps: list[FactoredIdeal]
    discrete_log: dict = field(repr=False)
    _coords: list = field(default_factory=list, repr=False)

    @property
    def exponent(self) -> int:
        m = 1
        for d in self.cycle_structure:
            m = math.lcm(m, d)
        return m

    def coords_of_index(self, i: int) -> tuple[int, ...]:
        return self._coords[i]

    def index_of_coords(self, c) -> int:
        c = tuple(x % d for x, d in zip(c, self.cycle_structure))
        return self._coords.index(c)

    def prime_log(self, P: PrimeIdeal) -> tuple[int, ...]:
        if P in self.discrete_log:
            return self.discrete_log[P]
        k = len(self.cycle_structure)
        if self.h == 1 or P.residue_deg == 2:
            out = (0,) * k
        elif (fast := self._reduce_split_prime(P)) is not None:
            out = fast
        else:
            # (v) = P * Q with N(Q) small; class(P) = -class(Q)
            v = _short_vector(P.ideal)
            fac = factor_principal(self.F, v)
            Q = fac.quotient(FactoredIdeal.prime(P))
            if Q.norm >= P.norm:
                raise PrincipalityUndecided(f"reduction did not shrink {P}")
            cq = self.log(Q)
            out = tuple((-x) % d for x, d in zip(cq, self.cycle_structure))
        self.discrete_log[P] = out
        return out

    def _reduce_split_prime(self, P: PrimeIdeal) -> Optional[tuple[int, ...]]:
        """Integer-only version of the reduction step for a degree-one prime.

        Returns None when the cofactor is not a product of distinct small
        degree-one primes, leaving the general path to handle it.
        """
        F = self.F
        p, r = P.p, P.root
        w1 = (F.t + math.sqrt(F.disc)) / 2
        w2 = (F.t - math.sqrt(F.disc)) / 2

        def emb(v):
            return v[0] + v[1] * w1, v[0] + v[1] * w2

        def q(v):
            a, b = emb(v)
            return a * a + b * b

        def dot(u, v):
            a1, b1 = emb(u)
            a2, b2 = emb(v)
            return a1 * a2 + b1 * b2

        u, v = (p, 0), (-r, 1)
        if q(u) < q(v):
            u, v = v, u
        for _ in range(200):
            k = round(dot(u, v) / q(v))
            u = (u[0] - k * v[0], u[1] - k * v[1])
            if q(u) >= q(v):
                break
            u, v = v, u
        if q(u) < q(v):
            v = u
        A, B = v
        N = abs(A * A + F.t * A * B + F.n * B * B)
        if N % p or N // p >= p:
            return None
        m = N // p
        acc = [0] * len(self.cycle_structure)
        for ell, e in sympy.factorint(m).items():
            # a rational factor of v generates a principal ideal; strip it
            while e >= 2 and A % ell == 0 and B % ell == 0:
                A, B, e = A // ell, B // ell, e - 2
            if e == 0:
                continue
            if A % ell == 0 and B % ell == 0:
                return None
            hit = None
            for Q in _factor_rational_prime(F, ell):
                if Q.residue_deg == 2:
                    return None
                if (A + B * Q.root) % ell == 0:
                    hit = Q
                    break
            if hit is None:
                return None
            # v lies in exactly one prime over ell, so that prime carries all of ell^e
            if hit.ram_index == 2:
                if e % 2 == 0:
                    continue
                e = 1
            c = self.prime_log(hit)
            for i in range(len(acc)):
                acc[i] += e * c[i]
        return tuple((-x) % d for x, d in zip(acc, self.cycle_structure))

    def log(self, A: FactoredIdeal) -> tuple[int, ...]:
        acc = [0] * len(self.cycle_structure)
        for P, e in A.factors:
            c = self.prime_log(P)
            for i in range(len(acc)):
                acc[i] += e * c[i]
        return tuple(x % d for x, d in zip(acc, self.cycle_structure))

    def class_of(self, A: FactoredIdeal) -> int:
        return self.index_of_coords(self.log(A))

    def characters(self) -> list["ClassCharacter"]:
        out = []
        for j, b in enumerate(product(*[range(d) for d in self.cycle_structure])):
            out.append(ClassCharacter(self, tuple(b), j))
        return out

    def character(self, j: int) -> "ClassCharacter":
        chars = self.characters()
        if not 0 <= j < len(chars):
            raise IndexError(f"character index {j} out of range 0..{len(chars) - 1}")
        return chars[j]


@dataclass(frozen=True, eq=False)
class ClassCharacter:
    group: ClassGroup
    exponent_vector: tuple[int, ...]
    index: int

    def _normalized(self, vec) -> "ClassCharacter":
        vec = tuple(x % d for x, d in zip(vec, self.group.cycle_structure))
        for ch in self.group.characters():
            if ch.exponent_vector == vec:
                return ch
        raise RuntimeError("character not found")

    def conj(self) -> "ClassCharacter":
        return self._normalized([-x for x in self.exponent_vector])

    def __mul__(self, other: "ClassCharacter") -> "ClassCharacter":
        return self._normalized([x + y for x, y in zip(self.exponent_vector, other.exponent_vector)])

    def __pow__(self, k: int) -> "ClassCharacter":
        return self._normalized([k * x for x in self.exponent_vector])

    def is_trivial(self) -> bool:
        return not any(self.exponent_vector)

    def order(self) -> int:
        m = 1
        for x, d in zip(self.exponent_vector, self.group.cycle_structure):
            m = math.lcm(m, d // math.gcd(x, d))
        return m

    def value_on_coords(self, coords) -> CycRat:
        m = self.group.exponent
        k = 0
        for a, b, d in zip(coords, self.exponent_vector, self.group.cycle_structure):
            k += a * b * (m // d)
        return CycRat.root_of_unity(m, k)

    def value_on_class(self, i: int) -> CycRat:
        return self.value_on_coords(self.group.coords_of_index(i))

    def __call__(self, A: FactoredIdeal) -> CycRat:
        return self.value_on_coords(self.group.log(A))

    def __eq__(self, other):
        return (isinstance(other, ClassCharacter) and self.group.F == other.group.F
                and self.exponent_vector == other.exponent_vector)

    def __hash__(self):
        return hash((self.group.F.key, self.exponent_vector))

    def __repr__(self):
        return f"ClassCharacter(index={self.index}, exponents={self.exponent_vector})"


@lru_cache(maxsize=None)
def compute_class_group(F: BaseField) -> ClassGroup:
    if F.degree == 1:
        one = FactoredIdeal.one(F)
        return ClassGroup(F, 1, [], [one], {}, [()])
    bound = math.isqrt(F.disc // 4) + 1  # Minkowski bound sqrt(disc)/2, rounded up
    gens = [P for P in primes_up_to_norm(F, bound) if P.residue_deg == 1]
    # breadth-first closure of the class set under multiplication by gens
    reps: list[FactoredIdeal] = [FactoredIdeal.one(F)]
    words: list[tuple[int, ...]] = [(0,) * len(gens)]
    table: list[list[int]] = []
    i = 0
    while i < len(reps):
        row = []
        for g, P in enumerate(gens):
            cand = reps[i] * FactoredIdeal.prime(P)
            hit = None
            for j, R in enumerate(reps):
                if equivalent(cand.ideal(), R.ideal()):
                    hit = j
                    break
            if hit is None:
                reps.append(cand)
                w = list(words[i])
                w[g] += 1
                words.append(tuple(w))
                hit = len(reps) - 1
            row.append(hit)
        table.append(row)
        i += 1
    h = len(reps)
    k = len(gens)
    if h == 1 or k == 0:
        return ClassGroup(F, 1, [], [reps[0]], {P: () for P in gens}, [()])
    # relations: word(c) + e_g - word(c * P_g)
    rels = []
    for c in range(h):
        for g in range(k):
            r = [words[c][t] - words[table[c][g]][t] for t in range(k)]
            r[g] += 1
            if any(r):
                rels.append(r)
    S, U, V = smith_normal_decomp(Matrix(rels), domain=ZZ)
    diag = [int(S[t, t]) if t < S.rows else 0 for t in range(k)]
    keep = [t for t in range(k) if diag[t] != 1]
    cycles = [diag[t] for t in keep]
    if any(d == 0 for d in cycles):
        raise RuntimeError("relation lattice is not of full rank")

    def to_coords(vec) -> tuple[int, ...]:
        img = [sum(vec[s] * int(V[s, t]) for s in range(k)) for t in range(k)]
        return tuple(img[t] % diag[t] for t in keep)

    dlog = {P: to_coords([1 if s == g else 0 for s in range(k)]) for g, P in enumerate(gens)}
    coords_list = list(product(*[range(d) for d in cycles]))
    ordered: list[Optional[FactoredIdeal]] = [None] * len(coords_list)
    for c in range(h):
        idx = coords_list.index(to_coords(words[c]))
        cur = ordered[idx]
        if cur is None or reps[c].norm < cur.norm:
            ordered[idx] = reps[c]
    if any(r is None for r in ordered) or math.prod(cycles) != h:
        raise RuntimeError("inconsistent class group structure")
    return ClassGroup(F, h, cycles, ordered, dlog, coords_list)


def class_of(G: ClassGroup, A: FactoredIdeal) -> int:
    return G.class_of(A)


def character_value(chi: ClassCharacter, A: FactoredIdeal) -> CycRat:
    return chi(A)


def characters(G: ClassGroup) -> list[ClassCharacter]:
    return G.characters()
