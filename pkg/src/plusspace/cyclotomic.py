"""Exact elements of cyclotomic fields with rational coordinates.

A value of order ``m`` lives in Q(zeta_m) and is stored by its coordinates in
the power basis 1, zeta, ..., zeta^(phi(m)-1).  Orders 1 and 2 collapse to a
plain rational.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

import sympy

Number = Union[int, Fraction]


@lru_cache(maxsize=None)
def _phi_poly(m: int) -> tuple[int, ...]:
    # coefficients of Phi_m, lowest degree first
    x = sympy.Symbol("x")
    coeffs = sympy.Poly(sympy.cyclotomic_poly(m, x), x).all_coeffs()
    return tuple(int(c) for c in reversed(coeffs))


@lru_cache(maxsize=None)
def _power_table(m: int) -> tuple[tuple[int, ...], ...]:
    """Coordinates of zeta_m^k for k = 0..m-1 in the power basis."""
    phi = _phi_poly(m)
    d = len(phi) - 1
    rows = []
    cur = [0] * d
    cur[0] = 1
    for _ in range(m):
        rows.append(tuple(cur))
        # multiply by zeta and reduce with the monic relation
        top = cur[-1]
        nxt = [0] + cur[:-1]
        if top:
            for i in range(d):
                nxt[i] -= top * phi[i]
        cur = nxt
    return tuple(rows)


def _reduce(m: int, full: list) -> tuple[Fraction, ...]:
    table = _power_table(m)
    d = len(table[0])
    out = [Fraction(0)] * d
    for k, c in enumerate(full):
        if c:
            row = table[k]
            for i in range(d):
                if row[i]:
                    out[i] += c * row[i]
    return tuple(out)


class CycRat:
    """Exact element of Q(zeta_m)."""

    __slots__ = ("order", "coeffs")

    def __init__(self, order: int, coeffs: Iterable[Number]):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if order < 1:
            raise ValueError("order must be positive")
        if order == 2:
            order = 1
            coeffs = coeffs[:1]
        d = len(_phi_poly(order)) - 1
        if len(coeffs) != d:
            raise ValueError(f"expected {d} coordinates for order {order}")
        if order > 1 and not any(coeffs[1:]):
            order, coeffs = 1, coeffs[:1]
        self.order = order
        self.coeffs = coeffs

    # constructors

    @classmethod
    def rational(cls, q: Number) -> "CycRat":
        return cls(1, [q])

    @classmethod
    def root_of_unity(cls, m: int, k: int = 1) -> "CycRat":
        k %= m
        if m <= 2:
            return cls.rational(1 if k == 0 else -1)
        return cls(m, _power_table(m)[k])

    @classmethod
    def coerce(cls, x) -> "CycRat":
        if isinstance(x, CycRat):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.rational(x)
        raise TypeError(f"cannot coerce {type(x).__name__} to CycRat")

    # structure

    def lift(self, M: int) -> tuple[Fraction, ...]:
        """Coordinates of self inside Q(zeta_M), where order divides M."""
        if M % self.order:
            raise ValueError("order does not divide target")
        if M <= 2:
            return self.coeffs[:1]
        step = M // self.order
        full = [Fraction(0)] * M
        for i, c in enumerate(self.coeffs):
            full[(i * step) % M] += c
        return _reduce(M, full)

    def is_rational(self) -> bool:
        return self.order == 1

    def to_rational(self) -> Fraction:
        if self.order != 1:
            raise ValueError("value is not rational")
        return self.coeffs[0]

    def to_complex(self) -> complex:
        z = cmath.exp(2j * math.pi / self.order)
        return sum(float(c) * z**i for i, c in enumerate(self.coeffs))

    def _common(self, other: "CycRat"):
        M = math.lcm(self.order, other.order)
        return M, self.lift(M), other.lift(M)

    # arithmetic

    def __add__(self, other):
        try:
            other = CycRat.coerce(other)
        except TypeError:
            return NotImplemented
        M, a, b = self._common(other)
        return CycRat(M, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return CycRat(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        try:
            other = CycRat.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return CycRat.coerce(other) - self

    def __mul__(self, other):
        try:
            other = CycRat.coerce(other)
        except TypeError:
            return NotImplemented
        if other.order == 1:
            s = other.coeffs[0]
            return CycRat(self.order, [c * s for c in self.coeffs])
        if self.order == 1:
            return other * self
        M, a, b = self._common(other)
        full = [Fraction(0)] * M
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        full[(i + j) % M] += x * y
        return CycRat(M, _reduce(M, full))

    __rmul__ = __mul__

    def conj(self) -> "CycRat":
        if self.order == 1:
            return self
        m = self.order
        full = [Fraction(0)] * m
        for i, c in enumerate(self.coeffs):
            full[(-i) % m] += c
        return CycRat(m, _reduce(m, full))

    def galois(self, k: int) -> "CycRat":
        """Image under zeta -> zeta^k, gcd(k, m) = 1."""
        m = self.order
        if m == 1:
            return self
        if math.gcd(k, m) != 1:
            raise ValueError("k must be a unit mod the order")
        full = [Fraction(0)] * m
        for i, c in enumerate(self.coeffs):
            full[(i * k) % m] += c
        return CycRat(m, _reduce(m, full))

    def inverse(self) -> "CycRat":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.order == 1:
            return CycRat.rational(1 / self.coeffs[0])
        m = self.order
        others = CycRat.rational(1)
        for k in range(2, m):
            if math.gcd(k, m) == 1:
                others = others * self.galois(k)
        norm = (self * others).to_rational()
        return others * (1 / norm)

    def __truediv__(self, other):
        other = CycRat.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return CycRat.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CycRat.rational(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        try:
            other = CycRat.coerce(other)
        except TypeError:
            return NotImplemented
        M, a, b = self._common(other)
        return a == b

    def __hash__(self):
        if self.order == 1:
            return hash(self.coeffs[0])
        z = self.to_complex()
        return hash((round(z.real, 9), round(z.imag, 9)))

    def __repr__(self):
        if self.order == 1:
            return f"CycRat({self.coeffs[0]})"
        return f"CycRat({self.order}, {[str(c) for c in self.coeffs]})"

    def __str__(self):
        if self.order == 1:
            return str(self.coeffs[0])
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"({c})*z{self.order}^{i}" if i else f"({c})")
        return " + ".join(terms) or "0"

    # serialization

    def to_json(self):
        if self.order == 1:
            return str(self.coeffs[0])
        return {"order": self.order, "coeffs": [str(c) for c in self.coeffs]}

    @classmethod
    def from_json(cls, obj) -> "CycRat":
        if isinstance(obj, str):
            return cls.rational(Fraction(obj))
        if isinstance(obj, (int,)):
            return cls.rational(obj)
        return cls(int(obj["order"]), [Fraction(c) for c in obj["coeffs"]])


def sqrt_rational(q: Number) -> CycRat:
    """Exact positive square root of a positive rational inside a cyclotomic field."""
    q = Fraction(q)
    if q <= 0:
        raise ValueError("need a positive rational")
    out = CycRat.rational(1)
    for n, sign in ((q.numerator, 1), (q.denominator, -1)):
        for p, e in sympy.factorint(n).items():
            out = out * CycRat.rational(Fraction(p) ** (sign * (e // 2)))
            if e % 2:
                r = _sqrt_prime(p)
                out = out * (r if sign > 0 else r * Fraction(1, p))
    return out


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycRat:
    if p == 2:
        z8 = CycRat.root_of_unity(8)
        return z8 + z8.conj()
    # quadratic Gauss sum g satisfies g^2 = (-1)^((p-1)/2) p
    g = CycRat.rational(0)
    for x in range(p):
        g = g + CycRat.root_of_unity(p, x * x)
    if p % 4 == 1:
        return g
    return g * CycRat.root_of_unity(4, -1)
