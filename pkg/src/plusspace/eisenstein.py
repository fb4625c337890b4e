"""Fourier coefficients of the plus-space Eisenstein series G_{k+1/2}(z, chi').

For xi totally positive with eta*xi = square mod 4 (eta = (-1)^k) the
coefficient is

    chi'(D_{eta xi}) * L_F(1 - k, chi_{eta xi} * conj(chi')) * C_k(eta xi)

and the constant term is L_F(1 - 2k, conj(chi')^2).  C_k is evaluated by its
divisor-sum form; the product of local Psi polynomials is kept as a floating
cross-check.

Series can carry a lazy coefficient source so that Hecke operators can reach
indices far beyond the stored trace bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Optional

from .base_field import (BaseField, FieldElement, element_from_json, enumerate_totally_positive,
                         make_field)
from .class_group import ClassCharacter, compute_class_group
from .cyclotomic import CycRat
from .ideal_arith import (FactoredIdeal, PrimeIdeal, _factor_rational_prime, divisors,
                          factor_principal, moebius)
from .lvalues import (CharacterSpec, bernoulli_L_rational, fundamental_discriminant,
                      hecke_L_exact, zeta_partial_class)
from .quad_invariants import (chi_xi_on_ideal, is_square_mod4, relative_discriminant,
                              residue_symbol, place_data)


class EisensteinError(ValueError):
    """Raised for requests the construction does not cover."""


class NotPlusSpaceIndex(EisensteinError):
    pass


ZERO = CycRat.rational(0)
ONE = CycRat.rational(1)


@dataclass(frozen=True, eq=False)
class EisensteinSpec:
    field: BaseField
    kappa: int
    chi_prime: ClassCharacter

    def __post_init__(self):
        if self.kappa < 1:
            raise EisensteinError("kappa must be a positive integer")
        if self.kappa == 1 and self.field.degree == 1:
            raise EisensteinError(
                "kappa = 1 over Q is not covered: the constant term calculation "
                "does not work there (only a non-analytic form exists)")
        if self.chi_prime.group.F != self.field:
            raise EisensteinError("class character belongs to another field")

    @property
    def eta(self) -> int:
        return -1 if self.kappa % 2 else 1

    def local_y(self, P: PrimeIdeal, inverse: bool = False) -> complex:
        """q^(1/2 - k) times the character value at P (or its inverse)."""
        val = self.chi_prime(FactoredIdeal.prime(P)).to_complex()
        if inverse:
            val = 1 / val
        return P.norm ** (0.5 - self.kappa) * val

    def label(self) -> str:
        return (f"G_{{{2 * self.kappa + 1}/2}}(z, chi_{self.chi_prime.index}) over "
                f"{self.field.label()}")


def make_spec(F: BaseField, kappa: int, chi_index: int = 0) -> EisensteinSpec:
    G = compute_class_group(F)
    return EisensteinSpec(F, kappa, G.character(chi_index))


# local polynomial


def psi_value(f, chi_loc: int, q: int, y):
    """Psi = sum_{j=0}^{f} y^(f-2j) - chi q^(-1/2) sum_{j=0}^{f-1} y^(f-1-2j); 0 if f < 0."""
    if f < 0:
        return 0
    first = sum(y ** (f - 2 * j) for j in range(f + 1))
    second = sum(y ** (f - 1 - 2 * j) for j in range(f))
    return first - chi_loc * q ** -0.5 * second


# divisor sums


def twisted_sigma(k: int, chi: Optional[ClassCharacter], A: FactoredIdeal) -> CycRat:
    """sum over b | A of N(b)^k chi(b)."""
    out = ZERO
    for B in divisors(A):
        term = CycRat.rational(Fraction(B.norm) ** k)
        if chi is not None and not chi.is_trivial():
            term = term * chi(B)
        out = out + term
    return out


def _conductor(F: BaseField, xi: FieldElement) -> FactoredIdeal:
    rd = relative_discriminant(F, xi)
    if not rd.integral:
        raise NotPlusSpaceIndex(f"{xi} is not a plus-space index (some local f < 0)")
    return rd.Fc


def frak_C(spec: EisensteinSpec, xi: FieldElement) -> CycRat:
    F = spec.field
    if xi.is_zero():
        raise NotPlusSpaceIndex("xi must be nonzero")
    Fc = _conductor(F, xi)
    k = spec.kappa
    chi = spec.chi_prime
    chi2 = chi * chi
    out = ZERO
    for A in divisors(Fc):
        mu = moebius(A)
        if not mu:
            continue
        cx = chi_xi_on_ideal(F, xi, A)
        if not cx:
            continue
        term = CycRat.rational(mu * cx * Fraction(A.norm) ** (k - 1)) * chi(A)
        term = term * twisted_sigma(2 * k - 1, chi2, Fc.quotient(A))
        out = out + term
    return out


def frak_C_product(spec: EisensteinSpec, xi: FieldElement, inverse: bool = False) -> complex:
    """N(F)^(k - 1/2) chi'(F) prod_v Psi, evaluated in floating point."""
    from .quad_invariants import _local_invariants, relevant_places

    F = spec.field
    Fc = _conductor(F, xi)
    out = complex(Fc.norm ** (spec.kappa - 0.5)) * spec.chi_prime(Fc).to_complex()
    for v in relevant_places(F, xi):
        inv = _local_invariants(v, xi)
        y = spec.local_y(v.prime, inverse)
        out *= psi_value(int(inv.f), inv.chi, v.q, y)
    return out


# coefficients


def _eta_xi(spec: EisensteinSpec, xi: FieldElement) -> FieldElement:
    return xi if spec.eta == 1 else -xi


def is_plus_space_index(spec: EisensteinSpec, xi: FieldElement) -> bool:
    if xi.is_zero():
        return True
    return xi.is_totally_positive() and is_square_mod4(spec.field, _eta_xi(spec, xi))


_COEFF_CACHE: dict = {}


def eisenstein_coefficient(spec: EisensteinSpec, xi: FieldElement) -> CycRat:
    F = spec.field
    key = (F.key, spec.kappa, spec.chi_prime.exponent_vector, xi)
    hit = _COEFF_CACHE.get(key)
    if hit is not None:
        return hit
    val = _coefficient(spec, xi)
    _COEFF_CACHE[key] = val
    return val


def _coefficient(spec: EisensteinSpec, xi: FieldElement) -> CycRat:
    F = spec.field
    k = spec.kappa
    chi = spec.chi_prime
    if not xi.is_integral():
        return ZERO
    if xi.is_zero():
        return hecke_L_exact(F, 2 * k, CharacterSpec(F, None, chi * chi, True))
    if not is_plus_space_index(spec, xi):
        return ZERO
    exi = _eta_xi(spec, xi)
    rd = relative_discriminant(F, exi)
    L = hecke_L_exact(F, k, CharacterSpec(F, exi, chi, True, rd.D))
    if L.is_zero():
        return ZERO
    return chi(rd.D) * L * frak_C(spec, exi)


# q-expansions


class QExpansion:
    """Sparse exact q-expansion indexed by totally positive elements and 0."""

    def __init__(self, F: BaseField, label: str, coefficients: dict, trace_bound: int,
                 exponent_denominator: int = 1, source: Optional[Callable] = None,
                 support: Optional[Callable] = None):
        self.field = F
        self.label = label
        self.trace_bound = trace_bound
        self.exponent_denominator = exponent_denominator
        self.coefficients = {k: CycRat.coerce(v) for k, v in coefficients.items()
                             if not CycRat.coerce(v).is_zero()}
        # source(xi) computes any coefficient; support(xi) yields the nonzero
        # (eta, c(eta)) with xi - eta totally positive or zero
        self.source = source
        self.support = support

    def in_range(self, xi: FieldElement) -> bool:
        return xi.trace() <= self.trace_bound

    def coefficient(self, xi: FieldElement) -> CycRat:
        if not xi.is_integral():
            return ZERO
        if not xi.is_zero() and not xi.is_totally_positive():
            return ZERO
        if self.in_range(xi):
            return self.coefficients.get(xi, ZERO)
        if self.source is None:
            raise KeyError(f"coefficient at {xi} is outside the certified range")
        return self.source(xi)

    def __getitem__(self, xi):
        if isinstance(xi, int):
            xi = self.field.elt(xi)
        return self.coefficient(xi)

    def can_evaluate(self, xi: FieldElement) -> bool:
        return self.in_range(xi) or self.source is not None

    def keys(self) -> list[FieldElement]:
        return sorted(self.coefficients, key=lambda z: z.sort_key())

    def items(self):
        for k in self.keys():
            yield k, self.coefficients[k]

    def indices(self) -> list[FieldElement]:
        return enumerate_totally_positive(self.field, self.trace_bound) if self.trace_bound >= 1 \
            else [self.field.zero]

    def restrict(self, T: int) -> "QExpansion":
        coeffs = {k: v for k, v in self.coefficients.items() if k.trace() <= T}
        return QExpansion(self.field, self.label, coeffs, min(T, self.trace_bound),
                          self.exponent_denominator, self.source, self.support)

    def __eq__(self, other):
        if not isinstance(other, QExpansion):
            return NotImplemented
        return (self.field == other.field and self.trace_bound == other.trace_bound
                and self.coefficients == other.coefficients)

    def __repr__(self):
        return f"QExpansion({self.label!r}, T={self.trace_bound}, {len(self.coefficients)} terms)"

    def to_json(self, scale: int = 1) -> dict:
        F = self.field
        rows = []
        for xi, c in self.items():
            rows.append({"xi": xi.to_json(), "trace": _num_json(xi.trace()),
                         "norm": _num_json(xi.norm()), "value": (c * scale).to_json()})
        return {"field": {"kind": F.kind, "D": F.D if F.degree == 2 else None},
                "label": self.label, "trace_bound": self.trace_bound,
                "exponent_denominator": self.exponent_denominator, "coefficients": rows}

    @classmethod
    def from_json(cls, obj: dict) -> "QExpansion":
        D = obj["field"]["D"]
        F = make_field(0 if D is None else int(D))
        coeffs = {}
        for row in obj["coefficients"]:
            coeffs[element_from_json(F, row["xi"])] = CycRat.from_json(row["value"])
        return cls(F, obj["label"], coeffs, int(obj["trace_bound"]),
                   int(obj.get("exponent_denominator", 1)))


def _num_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def eisenstein_qexpansion(spec: EisensteinSpec, T: int) -> QExpansion:
    if T < 1:
        raise ValueError("trace bound must be positive")
    coeffs = {}
    for xi in enumerate_totally_positive(spec.field, T):
        c = eisenstein_coefficient(spec, xi)
        if not c.is_zero():
            coeffs[xi] = c
    return QExpansion(spec.field, spec.label(), coeffs, T,
                      source=lambda x, s=spec: eisenstein_coefficient(s, x))


# Cohen's series over Q, computed with integers only


def cohen_coefficient(r: int, N: int) -> Fraction:
    if r < 2:
        raise EisensteinError("Cohen's series needs r >= 2")
    if N == 0:
        return bernoulli_L_rational(2 * r, 1)
    n = (-1) ** r * N
    if n % 4 not in (0, 1):
        return Fraction(0)
    D = fundamental_discriminant(n)
    f = math.isqrt(n // D)
    L = bernoulli_L_rational(r, D) if not (D == 1 and r == 1) else None
    from sympy import divisors as int_divisors, mobius
    from sympy.functions.combinatorial.numbers import kronecker_symbol
    total = 0
    for d in int_divisors(f):
        mu = int(mobius(d))
        if not mu:
            continue
        chi = int(kronecker_symbol(D, d)) if D != 1 else 1
        total += mu * chi * d ** (r - 1) * _sigma_int(2 * r - 1, f // d)
    return L * total


def _sigma_int(k: int, n: int) -> int:
    from sympy import divisors as int_divisors
    return sum(d ** k for d in int_divisors(n))


def cohen_series(r: int, N: int) -> QExpansion:
    if r < 2:
        raise EisensteinError("Cohen's series needs r >= 2")
    Q = make_field(0)
    coeffs = {Q.elt(n): CycRat.rational(cohen_coefficient(r, n)) for n in range(N + 1)}
    return QExpansion(Q, f"H_{r}", coeffs, N,
                      source=lambda x: CycRat.rational(cohen_coefficient(r, int(x.a))))


# classical series


def _square_roots_below(F: BaseField, bound: FieldElement, lattice_gens=None,
                        divide: int = 1) -> Iterator[FieldElement]:
    """y in the lattice (default O) with bound - y^2/divide totally positive or zero."""
    b1, b2 = bound.embeddings()
    if b1 < 0 or b2 < 0:
        return
    r1 = math.sqrt(b1 * divide) + 1e-9
    r2 = math.sqrt(b2 * divide) + 1e-9
    if F.degree == 1:
        g = 1 if lattice_gens is None else int(lattice_gens[0].a)
        m = int(r1 // g) + 1
        for x in range(-m, m + 1):
            y = F.elt(x * g)
            if _le(F, y * y * Fraction(1, divide), bound):
                yield y
        return
    g1, g2 = lattice_gens if lattice_gens is not None else (F.one, F.omega)
    e11, e12 = g1.embeddings()
    e21, e22 = g2.embeddings()
    # solve x*g1 + y*g2 inside the box |emb_i| <= r_i
    det = e11 * e22 - e12 * e21
    corners = [(s1 * r1, s2 * r2) for s1 in (-1, 1) for s2 in (-1, 1)]
    xs = [(c1 * e22 - c2 * e21) / det for c1, c2 in corners]
    ys = [(e11 * c2 - e12 * c1) / det for c1, c2 in corners]
    for x in range(math.floor(min(xs)) - 1, math.ceil(max(xs)) + 2):
        for yv in range(math.floor(min(ys)) - 1, math.ceil(max(ys)) + 2):
            y = g1 * x + g2 * yv
            a1, a2 = y.embeddings()
            if abs(a1) > r1 or abs(a2) > r2:
                continue
            if _le(F, y * y * Fraction(1, divide), bound):
                yield y


def _le(F: BaseField, a: FieldElement, b: FieldElement) -> bool:
    d = b - a
    return d.is_zero() or d.is_totally_positive() or (F.degree == 2 and min(d.signs()) >= 0)


def _theta_support(F: BaseField, gens, divide: int):
    def support(xi: FieldElement):
        counts: dict = {}
        for y in _square_roots_below(F, xi, gens, divide):
            e = y * y * Fraction(1, divide)
            counts[e] = counts.get(e, 0) + 1
        for e, c in counts.items():
            yield e, CycRat.rational(c)
    return support


def _ramified_prime_above(F: BaseField, p: int) -> PrimeIdeal:
    if F.degree != 2 or F.disc % p:
        raise EisensteinError(f"theta2 needs a ramified prime above {p}")
    return _factor_rational_prime(F, p)[0]


def _sigma_class(F: BaseField, xi: FieldElement, k: int = 1) -> list[Fraction]:
    """[sigma_{k,i}(xi) for each class i]."""
    return list(_sigma_class_cached(xi, k))


@lru_cache(maxsize=500_000)
def _sigma_class_cached(xi: FieldElement, k: int) -> tuple:
    F = xi.F
    G = compute_class_group(F)
    out = [0] * G.h
    for C in divisors(factor_principal(F, xi)):
        out[G.class_of(C)] += C.norm ** k
    return tuple(out)


def classical_series(F: BaseField, which: str, T: int, cls: int = 0) -> QExpansion:
    """theta1, theta2, or the weight-2 series E2 of class ``cls`` (0 = principal)."""
    if which == "theta1":
        gens = None if F.degree == 2 else [F.one]
        sup = _theta_support(F, gens, 1)
        src = lambda x: _support_value(sup, x)
        coeffs = _collect(F, T, src)
        return QExpansion(F, "theta1", coeffs, T, source=src, support=sup)
    if which == "theta2":
        P = _ramified_prime_above(F, 5)
        gens = P.ideal.gens()
        sup = _theta_support(F, gens, 5)
        src = lambda x: _support_value(sup, x)
        coeffs = _collect(F, T, src)
        return QExpansion(F, "theta2", coeffs, T, source=src, support=sup)
    if which == "E2":
        if F.degree != 2:
            raise EisensteinError("E2 series need a real quadratic field")
        G = compute_class_group(F)
        if not 0 <= cls < G.h:
            raise EisensteinError(f"class index {cls} out of range")
        const = CycRat.rational(zeta_partial_class(F, cls, 2) / 4)

        def src(x, const=const):
            if x.is_zero():
                return const
            if not x.is_integral() or not x.is_totally_positive():
                return ZERO
            return CycRat.rational(_sigma_class(F, x)[cls])

        coeffs = _collect(F, T, src)
        return QExpansion(F, f"E2_{cls}", coeffs, T, source=src)
    raise EisensteinError(f"unknown series {which!r}")


def _support_value(support, xi: FieldElement) -> CycRat:
    for e, c in support(xi):
        if e == xi:
            return c
    return ZERO


def _collect(F: BaseField, T: int, src) -> dict:
    out = {}
    for xi in enumerate_totally_positive(F, T):
        c = src(xi)
        if not c.is_zero():
            out[xi] = c
    return out


# algebra


def qexp_combine(op: str, *inputs, scalar=None, k: int = 1) -> QExpansion:
    if not inputs:
        raise ValueError("no inputs")
    F = inputs[0].field
    for f in inputs:
        if f.field != F:
            raise ValueError("field mismatch")
    if op == "add":
        T = min(f.trace_bound for f in inputs)
        coeffs: dict = {}
        for f in inputs:
            for xi, c in f.items():
                if xi.trace() <= T:
                    coeffs[xi] = coeffs.get(xi, ZERO) + c
        srcs = [f for f in inputs]
        lazy = all(f.source is not None for f in srcs)
        src = (lambda x: _sum_values(f.coefficient(x) for f in srcs)) if lazy else None
        return QExpansion(F, " + ".join(f.label for f in inputs), coeffs, T, source=src)
    if op == "scale":
        (f,) = inputs
        s = CycRat.coerce(scalar)
        coeffs = {xi: c * s for xi, c in f.items()}
        src = (lambda x: f.coefficient(x) * s) if f.source is not None else None
        return QExpansion(F, f"({s})*{f.label}", coeffs, f.trace_bound, source=src)
    if op == "dilate":
        (f,) = inputs
        coeffs = {xi * k: c for xi, c in f.items()}

        def src(x, f=f, k=k):
            y = x * Fraction(1, k)
            if not y.is_integral():
                return ZERO
            return f.coefficient(y)

        lazy = src if f.source is not None else None
        return QExpansion(F, f"{f.label}({k}z)", coeffs, f.trace_bound * k, source=lazy)
    if op == "multiply":
        a, b = inputs
        T = min(a.trace_bound, b.trace_bound)
        if b.support is not None and a.support is None:
            a, b = b, a

        def src(x, a=a, b=b):
            if a.support is not None:
                return _sum_values(c * b.coefficient(x - e) for e, c in a.support(x))
            return _sum_values(a.coefficient(e) * b.coefficient(x - e)
                               for e in _elements_below(F, x))

        coeffs = {}
        for xi in enumerate_totally_positive(F, T):
            c = src(xi) if (a.support is not None) else _product_in_range(a, b, xi)
            if not c.is_zero():
                coeffs[xi] = c
        lazy = src if (a.source is not None and b.source is not None) else None
        return QExpansion(F, f"{a.label}*{b.label}", coeffs, T, source=lazy)
    raise ValueError(f"unknown operation {op!r}")


def _sum_values(vals: Iterable[CycRat]) -> CycRat:
    out = ZERO
    for v in vals:
        out = out + v
    return out


def _product_in_range(a: QExpansion, b: QExpansion, xi: FieldElement) -> CycRat:
    out = ZERO
    for e, c in a.coefficients.items():
        if _le(a.field, e, xi):
            out = out + c * b.coefficient(xi - e)
    return out


def _elements_below(F: BaseField, xi: FieldElement) -> Iterator[FieldElement]:
    """All eta in O with eta and xi - eta totally positive or zero."""
    yield F.zero
    for e in enumerate_totally_positive(F, int(xi.trace()))[1:]:
        if _le(F, e, xi):
            yield e


# Hecke operator


def _prime_of(F: BaseField, alpha: FieldElement) -> PrimeIdeal:
    if alpha.is_zero() or not alpha.is_integral():
        raise EisensteinError("alpha must be a nonzero integral element")
    fac = factor_principal(F, alpha)
    if len(fac.factors) != 1 or fac.factors[0][1] != 1:
        raise EisensteinError(f"({alpha}) is not a prime ideal")
    P = fac.factors[0][0]
    if P.p == 2:
        raise EisensteinError("alpha must generate an odd prime")
    return P


def hecke_symbol(P: PrimeIdeal, x: FieldElement) -> int:
    """Quadratic residue symbol (x / P), 0 when P divides x."""
    if P.ideal.contains(x):
        return 0
    return residue_symbol(place_data(P), x)


def hecke_T_plus(spec: EisensteinSpec, alpha: FieldElement, f: QExpansion,
                 T: Optional[int] = None) -> QExpansion:
    F = spec.field
    P = _prime_of(F, alpha)
    N = P.norm
    k = spec.kappa
    a2 = alpha * alpha
    a2inv = a2.inverse()
    if f.source is None:
        # largest output bound keeping every xi * alpha^2 inside the input range
        m = max(a2.embeddings())
        bound = int(f.trace_bound / (m * (1 + 1e-12)))
        T = bound if T is None else min(T, bound)
    elif T is None:
        T = f.trace_bound

    def coeff(xi: FieldElement) -> CycRat:
        if xi.is_zero():
            # the formula at xi = 0: the symbol vanishes and 0 / alpha^2 = 0
            return f.coefficient(xi) * (1 + N ** (2 * k - 1))
        if not is_plus_space_index(spec, xi):
            return ZERO
        out = f.coefficient(xi * a2)
        s = hecke_symbol(P, _eta_xi(spec, xi))
        if s:
            out = out + f.coefficient(xi) * (s * N ** (k - 1))
        y = xi * a2inv
        if y.is_integral():
            out = out + f.coefficient(y) * (N ** (2 * k - 1))
        return out

    coeffs = {}
    for xi in (enumerate_totally_positive(F, T) if T >= 1 else [F.zero]):
        c = coeff(xi)
        if not c.is_zero():
            coeffs[xi] = c
    src = coeff if f.source is not None else None
    return QExpansion(F, f"T+(({alpha})^2) {f.label}", coeffs, T, source=src)


def hecke_eigenvalue(spec: EisensteinSpec, alpha: FieldElement) -> int:
    P = _prime_of(spec.field, alpha)
    return 1 + P.norm ** (2 * spec.kappa - 1)


# exact rank over a cyclotomic field


def cyclotomic_rank(rows: list[list[CycRat]]) -> int:
    M = [[CycRat.coerce(x) for x in row] for row in rows]
    rank = 0
    ncols = len(M[0]) if M else 0
    for col in range(ncols):
        piv = None
        for r in range(rank, len(M)):
            if not M[r][col].is_zero():
                piv = r
                break
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = M[rank][col].inverse()
        for r in range(len(M)):
            if r != rank and not M[r][col].is_zero():
                factor = M[r][col] * inv
                M[r] = [x - factor * y for x, y in zip(M[r], M[rank])]
        rank += 1
    return rank
