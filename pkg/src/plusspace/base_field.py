"""The base field F: either Q or a real quadratic field Q(sqrt D).

Elements are stored in the integral basis (1, w) with w = sqrt D when
D = 2, 3 mod 4 and w = (1 + sqrt D)/2 when D = 1 mod 4.  All predicates are
exact; floats only show up in the advisory embeddings.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import sympy

Rat = Union[int, Fraction]


def squarefree_core(d: int) -> int:
    core = 1
    for p, e in sympy.factorint(d).items():
        if e % 2:
            core *= p
    return core


@dataclass(frozen=True, eq=False)
class BaseField:
    kind: str
    D: Optional[int]
    disc: int
    omega_desc: str
    degree: int
    # minimal polynomial of w is x^2 - t x + n
    t: int = 0
    n: int = 0
    fund_unit: "FieldElement" = field(default=None, repr=False)
    tp_unit: "FieldElement" = field(default=None, repr=False)
    different_gen: "FieldElement" = field(default=None, repr=False)

    @property
    def key(self) -> int:
        return self.D or 0

    def __eq__(self, other):
        return isinstance(other, BaseField) and self.key == other.key

    def __hash__(self):
        return hash(("BaseField", self.key))

    def __repr__(self):
        if self.degree == 1:
            return "BaseField(Q)"
        return f"BaseField(Q(sqrt {self.D}))"

    def elt(self, a: Rat, b: Rat = 0) -> "FieldElement":
        return FieldElement(Fraction(a), Fraction(b), self.key)

    def from_sqrt(self, u: Rat, v: Rat) -> "FieldElement":
        """Element u + v sqrt D."""
        u, v = Fraction(u), Fraction(v)
        if self.degree == 1:
            if v:
                raise ValueError("Q has no sqrt D part")
            return self.elt(u)
        if self.D % 4 == 1:
            # w = (1 + sqrt D)/2, so sqrt D = 2w - 1
            return self.elt(u - v, 2 * v)
        return self.elt(u, v)

    @property
    def zero(self) -> "FieldElement":
        return self.elt(0)

    @property
    def one(self) -> "FieldElement":
        return self.elt(1)

    @property
    def sqrtD(self) -> "FieldElement":
        return self.from_sqrt(0, 1)

    @property
    def omega(self) -> "FieldElement":
        return self.elt(0, 1)

    def label(self) -> str:
        return "Q" if self.degree == 1 else f"Q(sqrt {self.D})"


_FIELDS: dict[int, BaseField] = {}


@dataclass(frozen=True)
class FieldElement:
    """a + b*w with rational a, b; ``D`` is 0 for Q."""

    a: Fraction
    b: Fraction
    D: int = 0

    @property
    def F(self) -> BaseField:
        return _FIELDS[self.D]

    def _wrap(self, a, b) -> "FieldElement":
        return FieldElement(Fraction(a), Fraction(b), self.D)

    def _other(self, o) -> "FieldElement":
        if isinstance(o, FieldElement):
            if o.D != self.D:
                raise ValueError("elements of different fields")
            return o
        if isinstance(o, (int, Fraction)):
            return self._wrap(o, 0)
        raise TypeError

    def __add__(self, o):
        try:
            o = self._other(o)
        except TypeError:
            return NotImplemented
        return self._wrap(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return self._wrap(-self.a, -self.b)

    def __sub__(self, o):
        try:
            o = self._other(o)
        except TypeError:
            return NotImplemented
        return self._wrap(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return self._other(o) - self

    def __mul__(self, o):
        try:
            o = self._other(o)
        except TypeError:
            return NotImplemented
        F = self.F
        bd = self.b * o.b
        return self._wrap(self.a * o.a - F.n * bd, self.a * o.b + self.b * o.a + F.t * bd)

    __rmul__ = __mul__

    def conj(self) -> "FieldElement":
        return self._wrap(self.a + self.F.t * self.b, -self.b)

    def trace(self) -> Fraction:
        if self.D == 0:
            return self.a
        return 2 * self.a + self.F.t * self.b

    def norm(self) -> Fraction:
        if self.D == 0:
            return self.a
        F = self.F
        return self.a * self.a + F.t * self.a * self.b + F.n * self.b * self.b

    def inverse(self) -> "FieldElement":
        N = self.norm()
        if N == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.D == 0:
            return self._wrap(1 / self.a, 0)
        c = self.conj()
        return self._wrap(c.a / N, c.b / N)

    def __truediv__(self, o):
        o = self._other(o)
        return self * o.inverse()

    def __rtruediv__(self, o):
        return self._other(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = self._wrap(1, 0)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_integral(self) -> bool:
        return self.a.denominator == 1 and self.b.denominator == 1

    def sqrt_coords(self) -> tuple[Fraction, Fraction]:
        """(u, v) with self = u + v sqrt D."""
        if self.D == 0:
            return self.a, Fraction(0)
        if self.D % 4 == 1:
            return self.a + self.b / 2, self.b / 2
        return self.a, self.b

    def signs(self) -> tuple[int, int]:
        """Exact signs under the two real embeddings (sqrt D > 0 first)."""
        u, v = self.sqrt_coords()
        if self.D == 0:
            s = (u > 0) - (u < 0)
            return s, s
        return _sign_surd(u, v, self.D), _sign_surd(u, -v, self.D)

    def is_totally_positive(self) -> bool:
        s1, s2 = self.signs()
        return s1 > 0 and s2 > 0

    def embeddings(self) -> tuple[float, float]:
        u, v = self.sqrt_coords()
        r = math.sqrt(self.D) if self.D else 0.0
        return float(u) + float(v) * r, float(u) - float(v) * r

    def coords(self) -> tuple[Fraction, Fraction]:
        return self.a, self.b

    def sort_key(self):
        return (self.trace(), self.norm(), self.a, self.b)

    def to_json(self):
        return [_rat_json(self.a), _rat_json(self.b)]

    def __repr__(self):
        return f"FieldElement({self})"

    def __str__(self):
        return format_element(self)


def _rat_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _sign_surd(u: Fraction, v: Fraction, D: int) -> int:
    # sign of u + v sqrt D by comparing u^2 with D v^2
    if v == 0:
        return (u > 0) - (u < 0)
    if u == 0:
        return 1 if v > 0 else -1
    if (u > 0) == (v > 0):
        return 1 if u > 0 else -1
    big = u * u - D * v * v
    if big > 0:
        return 1 if u > 0 else -1
    return 1 if v > 0 else -1


def format_element(x: FieldElement) -> str:
    u, v = x.sqrt_coords()
    if x.D == 0 or v == 0:
        return str(u)
    sv = "" if abs(v) == 1 else str(abs(v))
    root = f"{sv}√{x.D}"
    if u == 0:
        return root if v > 0 else "-" + root
    return f"{u}{'+' if v > 0 else '-'}{root}"


def element_from_json(F: BaseField, obj) -> FieldElement:
    return F.elt(Fraction(obj[0]), Fraction(obj[1]))


def _fundamental_unit(F: BaseField) -> FieldElement:
    """Smallest unit > 1, from the continued fraction of w."""
    D, t = F.D, F.t
    r = math.isqrt(D)
    # w = (P + sqrt D)/Q with Q | D - P^2
    if D % 4 == 1:
        P, Q = 1, 2
    else:
        P, Q = 0, 1
    p_prev, p = 1, (P + r) // Q
    q_prev, q = 0, 1
    a = p
    for _ in range(10000):
        # candidate unit from the convergent p/q of w: p - q*conj(w)
        cand = F.elt(p - q * t, q)
        if abs(cand.norm()) == 1:
            return cand if cand.signs()[0] > 0 else -cand
        P = a * Q - P
        Q = (D - P * P) // Q
        a = (P + r) // Q
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    raise RuntimeError("continued fraction did not produce a unit")


def make_field(d: int) -> BaseField:
    """Build Q (d = 0) or Q(sqrt d) with d replaced by its squarefree core."""
    if not isinstance(d, int) or isinstance(d, bool):
        raise TypeError("d must be an integer")
    if d < 0:
        raise ValueError("F must be totally real: d < 0 rejected")
    if d == 1:
        raise ValueError("d = 1 does not define a quadratic field")
    if d == 0:
        key = 0
    else:
        key = squarefree_core(d)
        if key == 1:
            raise ValueError(f"{d} is a perfect square; use d = 0 for Q")
    if key in _FIELDS:
        return _FIELDS[key]
    if key == 0:
        F = BaseField(kind="rational", D=None, disc=1, omega_desc="1", degree=1)
        _FIELDS[0] = F
        object.__setattr__(F, "fund_unit", F.elt(-1))
        object.__setattr__(F, "tp_unit", F.elt(1))
        object.__setattr__(F, "different_gen", F.elt(1))
        return F
    D = key
    if D % 4 == 1:
        F = BaseField(kind="real_quadratic", D=D, disc=D, omega_desc="(1+sqrtD)/2",
                      degree=2, t=1, n=(1 - D) // 4)
    else:
        F = BaseField(kind="real_quadratic", D=D, disc=4 * D, omega_desc="sqrtD",
                      degree=2, t=0, n=-D)
    _FIELDS[D] = F
    eps = _fundamental_unit(F)
    eps_plus = eps if eps.is_totally_positive() else eps * eps
    object.__setattr__(F, "fund_unit", eps)
    object.__setattr__(F, "tp_unit", eps_plus)
    object.__setattr__(F, "different_gen", F.from_sqrt(0, 1) * (1 if D % 4 == 1 else 2))
    return F


def element_invariants(F: BaseField, xi: FieldElement) -> dict:
    return {
        "trace": xi.trace(),
        "norm": xi.norm(),
        "totally_positive": xi.is_totally_positive(),
        "embeddings": xi.embeddings(),
    }


def enumerate_totally_positive(F: BaseField, T: int) -> list[FieldElement]:
    """0 together with all totally positive integral xi with trace <= T."""
    if T < 1:
        raise ValueError("T must be positive")
    out = [F.zero]
    if F.degree == 1:
        out += [F.elt(k) for k in range(1, T + 1)]
        return out
    D, t = F.D, F.t
    for tr in range(1, T + 1):
        # xi = (tr + v' sqrt D)/2 in sqrt-coordinates: need v'^2 D < tr^2
        vmax = math.isqrt((tr * tr) // D + 1) + 1
        for b in range(-2 * vmax, 2 * vmax + 1):
            # trace = 2a + t b
            twice_a = tr - t * b
            if twice_a % 2:
                continue
            x = F.elt(twice_a // 2, b)
            if x.is_totally_positive():
                out.append(x)
    out.sort(key=lambda z: z.sort_key())
    return out
