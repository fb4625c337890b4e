"""Finite-sum oracle for the local theory over Q_p.

The additive character is psi(x) = e(-{x}_p), of order zero, so delta = 1 and
Lambda = SL_2(Z_p), Gamma = {c in 4 Z_p}.  Every integral below has a locally
constant integrand and is evaluated as an exact average over a residue ring,
then recomputed one level higher to confirm it has stabilized.

Scalars are exact CycRat values by default.  With ``exact=False`` they are
complex floats, which is what the convolution and the s-dependent integrals
use.
"""

from __future__ import annotations

import cmath
import itertools
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .base_field import make_field
from .cyclotomic import CycRat, sqrt_rational
from .eisenstein import psi_value
from .quad_invariants import local_invariants, places_over


class StabilizationError(RuntimeError):
    pass


def _ord(p: int, x) -> int:
    x = Fraction(x)
    if x == 0:
        return 10 ** 9
    k = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        k += 1
    while d % p == 0:
        d //= p
        k -= 1
    return k


def _unit_mod(p: int, x: Fraction, k: int) -> int:
    """(x / p^ord(x)) mod p^k."""
    x = Fraction(x)
    v = _ord(p, x)
    u = x / Fraction(p) ** v
    mod = p ** k
    return u.numerator * pow(u.denominator, -1, mod) % mod


def _frac_part(p: int, x: Fraction) -> Fraction:
    """The p-adic fractional part {x}_p in [0, 1)."""
    x = Fraction(x)
    d = x.denominator
    k = 0
    while d % p == 0:
        d //= p
        k += 1
    if k == 0:
        return Fraction(0)
    mod = p ** k
    r = x.numerator * pow(d, -1, mod) % mod
    return Fraction(r, mod)


def _is_integral(p: int, x) -> bool:
    return Fraction(x) == 0 or _ord(p, x) >= 0


# Hilbert symbol


def hilbert_symbol(p: int, a, b) -> int:
    a, b = Fraction(a), Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    al, be = _ord(p, a), _ord(p, b)
    if p != 2:
        u = _unit_mod(p, a, 1)
        v = _unit_mod(p, b, 1)
        eps = (p - 1) // 2
        sign = (-1) ** (al * be * eps)
        return sign * _legendre(u, p) ** be * _legendre(v, p) ** al
    u = _unit_mod(2, a, 3)
    v = _unit_mod(2, b, 3)
    e_u, e_v = (u - 1) // 2 % 2, (v - 1) // 2 % 2
    w_u, w_v = (u * u - 1) // 8 % 2, (v * v - 1) // 8 % 2
    return (-1) ** ((e_u * e_v + al * w_v + be * w_u) % 2)


def _legendre(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


# context


def _conj(z):
    return z.conj() if isinstance(z, CycRat) else complex(z).conjugate()


@dataclass
class PadicContext:
    p: int
    level: int = 3
    exact: bool = True
    c: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.c != 0:
            raise ValueError("only the unramified base Q_p (c = 0) is covered")

    @property
    def e(self) -> int:
        return 1 if self.p == 2 else 0

    @property
    def q(self) -> int:
        return self.p

    @property
    def delta(self) -> int:
        return 1

    # scalars

    def one(self):
        return CycRat.rational(1) if self.exact else 1 + 0j

    def zero(self):
        return CycRat.rational(0) if self.exact else 0j

    def rat(self, x):
        return CycRat.rational(Fraction(x)) if self.exact else complex(float(Fraction(x)))

    def sqrt_p_power(self, k: int):
        """p^(k/2)."""
        if self.exact:
            if k % 2 == 0:
                return CycRat.rational(Fraction(self.p) ** (k // 2))
            return sqrt_rational(Fraction(self.p) ** k)
        return complex(self.p ** (k / 2))

    def psi(self, x):
        fp = _frac_part(self.p, Fraction(x))
        if fp == 0:
            return self.one()
        if self.exact:
            return CycRat.root_of_unity(fp.denominator, -fp.numerator)
        return cmath.exp(-2j * math.pi * float(fp))

    def close(self, a, b, tol: float = 1e-9) -> bool:
        if self.exact and isinstance(a, CycRat) and isinstance(b, CycRat):
            return a == b
        return abs(_to_complex(a) - _to_complex(b)) <= tol

    # Gauss sums and the Weil constant

    def gauss(self, beta) -> object:
        """Integral over Z_p of psi(beta t^2) dt."""
        beta = Fraction(beta)
        key = ("g", beta)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if beta == 0 or _ord(self.p, beta) >= 0:
            val = self.one()
        elif -_ord(self.p, beta) >= (4 if self.p == 2 else 2):
            # the unit part vanishes; only t in pZ_p contributes
            val = self.gauss(beta * self.p * self.p) * self.rat(Fraction(1, self.p))
        else:
            # (t + p^L s)^2 beta - t^2 beta must be integral
            v = -_ord(self.p, beta)
            L = max(0, v - self.e, (v + 1) // 2)
            val = self._average(lambda t: self.psi(beta * t * t), L)
        self._cache[key] = val
        return val

    def _average(self, fn, L: int):
        n = self.p ** L
        tot = self.zero()
        for t in range(n):
            tot = tot + fn(t)
        return tot * self.rat(Fraction(1, n))

    def weil_direct(self, a) -> object:
        """Weil constant from the Gauss-sum formula, for integral a."""
        a = Fraction(a)
        if a == 0 or _ord(self.p, a) < 0:
            raise ValueError("direct formula needs a nonzero integral argument")
        key = ("a", a)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        k = _ord(self.p, 2 * a)
        val = self.sqrt_p_power(k) * self.gauss(1 / (4 * a))
        self._cache[key] = val
        return val

    def weil(self, a) -> object:
        a = Fraction(a)
        if a == 0:
            raise ValueError("Weil constant needs a nonzero argument")
        v = _ord(self.p, a)
        if v < 0:
            shift = (-v + 1) // 2
            a = a * Fraction(self.p) ** (2 * shift)
        elif v > 1:
            # alpha(b^2 a) = alpha(a): strip even powers so the sum stays small
            a = a / Fraction(self.p) ** (2 * (v // 2))
        return self.weil_direct(a)


def _to_complex(z) -> complex:
    return z.to_complex() if isinstance(z, CycRat) else complex(z)


def weil_constant(ctx: PadicContext, a) -> object:
    val = ctx.weil(a)
    if ctx.exact:
        if val ** 8 != CycRat.rational(1):
            raise RuntimeError(f"Weil constant at {a} is not an eighth root of unity")
    elif abs(val ** 8 - 1) > 1e-9:
        raise RuntimeError(f"Weil constant at {a} is not an eighth root of unity")
    return val


# the metaplectic group on [g, 1] sections

Mat = tuple  # (a, b, c, d) with Fraction entries


def mat(a, b, c, d) -> Mat:
    return (Fraction(a), Fraction(b), Fraction(c), Fraction(d))


def mat_mul(g: Mat, h: Mat) -> Mat:
    a, b, c, d = g
    A, B, C, D = h
    return (a * A + b * C, a * B + b * D, c * A + d * C, c * B + d * D)


def mat_inv(g: Mat) -> Mat:
    a, b, c, d = g
    return (d, -b, -c, a)


def u_sharp(x) -> Mat:
    return mat(1, x, 0, 1)


def u_flat(x) -> Mat:
    return mat(1, 0, x, 1)


def m_elt(a) -> Mat:
    a = Fraction(a)
    return (a, Fraction(0), Fraction(0), 1 / a)


def w_elt(a) -> Mat:
    a = Fraction(a)
    return (Fraction(0), -1 / a, a, Fraction(0))


def _tau(g: Mat) -> Fraction:
    return g[2] if g[2] != 0 else g[3]


def kubota(p: int, g1: Mat, g2: Mat) -> int:
    t12 = _tau(mat_mul(g1, g2))
    return hilbert_symbol(p, _tau(g1) / t12, _tau(g2) / t12)


def meta_mul(p: int, x: tuple, y: tuple) -> tuple:
    """[g1, z1][g2, z2] = [g1 g2, z1 z2 c(g1, g2)]."""
    (g1, z1), (g2, z2) = x, y
    return (mat_mul(g1, g2), z1 * z2 * kubota(p, g1, g2))


def meta_inv(p: int, x: tuple) -> tuple:
    g, z = x
    gi = mat_inv(g)
    return (gi, z * kubota(p, g, gi))


def _sign_of_factorization(p: int, parts: list[Mat]) -> int:
    """z with [g, 1] = [A][B]... [g', z] where g = A B ..."""
    acc = (parts[0], 1)
    for P in parts[1:]:
        acc = meta_mul(p, acc, (P, 1))
    return acc[1]


def in_Lambda(p: int, g: Mat) -> bool:
    return all(_is_integral(p, x) for x in g)


def in_Gamma(p: int, g: Mat) -> bool:
    return in_Lambda(p, g) and (g[2] == 0 or _ord(p, g[2]) >= _ord(p, 4))


def eK_value(ctx: PadicContext, g: Mat, zeta: int = 1):
    """e^K([g, zeta]) = q^e (phi_0, omega(g) phi_0) on Lambda, 0 elsewhere."""
    p = ctx.p
    if not in_Lambda(p, g):
        return ctx.zero()
    a, b, c, d = g
    qe = ctx.rat(ctx.q ** ctx.e)
    if c != 0 and _ord(p, c) == 0:
        parts = [u_sharp((a - 1) / c), u_flat(c), u_sharp((d - 1) / c)]
        inner = _flat_pairing(ctx, c)
    else:
        # d is a unit here
        gamma = c / d
        parts = [u_sharp(b / d), m_elt(1 / d), u_flat(gamma)]
        inner = ctx.weil(d) * _conj(ctx.weil(1))
        if gamma != 0:
            inner = inner * _flat_pairing(ctx, gamma)
    sign = zeta * _sign_of_factorization(p, parts)
    return inner * qe * sign


def _flat_pairing(ctx: PadicContext, x: Fraction):
    """(phi_0, omega(u_flat(x)) phi_0) for nonzero integral x."""
    k = _ord(ctx.p, x) - _ord(ctx.p, 2)
    return ctx.weil(x) * ctx.sqrt_p_power(k) * _conj(ctx.gauss(1 / x))


def epsilon(ctx: PadicContext, g: Mat, zeta: int = 1):
    """The genuine character of Gamma (even residue characteristic)."""
    if ctx.p != 2:
        raise ValueError("closed form of epsilon is for q even")
    a, b, c, d = g
    if c == 0:
        return ctx.weil(d) * _conj(ctx.weil(1)) * zeta
    return ctx.weil(1) * _conj(ctx.weil(d)) * (zeta * hilbert_symbol(2, c, d))


# local integrals


def unit_integrals(ctx: PadicContext):
    """(integral over units of alpha(t), integral over units of alpha(p t))."""
    L = 3 if ctx.p == 2 else 1

    def run(L):
        n = ctx.p ** L
        s1, s2 = ctx.zero(), ctx.zero()
        for t in range(n):
            if t % ctx.p == 0:
                continue
            s1 = s1 + ctx.weil(t)
            s2 = s2 + ctx.weil(ctx.p * t)
        w = ctx.rat(Fraction(1, n))
        return s1 * w, s2 * w

    first = run(L)
    second = run(L + 1)
    if not (ctx.close(first[0], second[0]) and ctx.close(first[1], second[1])):
        raise StabilizationError("unit integrals changed under refinement")
    return first


# f_r, f^+_K and the integrals against psi


def _stratum(ctx: PadicContext, k: Mat) -> Optional[int]:
    """r with k in X_r, or None."""
    c = k[2]
    e = ctx.e
    oc = 10 ** 9 if c == 0 else _ord(ctx.p, c)
    if oc >= 2 * e:
        return e
    if oc % 2 == 0:
        return oc // 2
    return None


def f_r_on_Lambda(ctx: PadicContext, r: int, k: Mat, zeta: int, s: complex) -> complex:
    if _stratum(ctx, k) != r:
        return 0j
    val = _to_complex(ctx.weil(1)) * _to_complex(eK_value(ctx, k, zeta)).conjugate()
    return ctx.q ** (-ctx.e / 2) * val


def f_plus_on_Lambda(ctx: PadicContext, k: Mat, zeta: int, s: complex,
                     only: Optional[int] = None) -> complex:
    out = 0j
    for r in range(ctx.e + 1):
        if only is not None and r != only:
            continue
        coef = ctx.q ** (2 * s * r - ctx.e + r) if only is None else 1
        out += coef * f_r_on_Lambda(ctx, r, k, zeta, s)
    return out


def f_plus_w1_usharp(ctx: PadicContext, x: Fraction, s: complex,
                     only: Optional[int] = None) -> complex:
    """f^+_K(w_1 u_sharp(x)) (or a single f_r when ``only`` is set)."""
    p = ctx.p
    x = Fraction(x)
    g, z = meta_mul(p, (w_elt(1), 1), (u_sharp(x), 1))
    if in_Lambda(p, g):
        return f_plus_on_Lambda(ctx, g, z, s, only)
    # g = u_sharp(-1/x) m(1/x) u_flat(1/x)
    parts = [u_sharp(-1 / x), m_elt(1 / x), u_flat(1 / x)]
    z2 = _sign_of_factorization(p, parts)
    a = 1 / x
    lead = _to_complex(ctx.weil(1)) / _to_complex(ctx.weil(a))
    absval = float(p) ** (-_ord(p, a))
    return z * z2 * lead * absval ** (s + 1) * f_plus_on_Lambda(ctx, u_flat(a), 1, s, only)


def _shell(ctx: PadicContext, n: int, xi: Fraction, s: complex, only=None, extra: int = 0) -> complex:
    """Integral over ord(x) = -n of f^+(w_1 u(x)) conj(psi(xi x)) dx, n >= 1."""
    p = ctx.p
    oxi = _ord(p, xi) if xi != 0 else 0
    # psi(xi x) needs u mod p^(n - ord xi); the rest needs u mod 8 or mod p
    base = 3 if p == 2 else 1
    L = (max(n - oxi, base) if xi != 0 else base) + extra
    N = p ** L
    tot = 0j
    scale = Fraction(1, p ** n)
    for u in range(1, N):
        if u % p == 0:
            continue
        x = u * scale
        val = f_plus_w1_usharp(ctx, x, s, only)
        if val == 0:
            continue
        if xi != 0:
            val *= _to_complex(ctx.psi(xi * x)).conjugate()
        tot += val
    return tot * p ** n / N


def _ball(ctx: PadicContext, xi: Fraction, s: complex, only=None) -> complex:
    """Integral over Z_p."""
    p = ctx.p
    L = 1 if xi == 0 else max(1, -_ord(p, xi) + 1)
    N = p ** L
    tot = 0j
    for u in range(N):
        val = f_plus_w1_usharp(ctx, Fraction(u), s, only)
        if xi != 0:
            val *= _to_complex(ctx.psi(xi * u)).conjugate()
        tot += val
    return tot / N


def whittaker_integral(ctx: PadicContext, xi, s: complex) -> complex:
    """Integral over F of f^+_K(w_1 u(x)) conj(psi(xi x)) dx for xi != 0."""
    xi = Fraction(xi)
    if xi == 0:
        raise ValueError("xi must be nonzero")
    p = ctx.p
    top = max(_ord(p, xi), 0) + 2 * ctx.e + 2
    total = _ball(ctx, xi, s)
    for n in range(1, top + 1):
        total += _shell(ctx, n, xi, s)
    if abs(_shell(ctx, 1, xi, s) - _shell(ctx, 1, xi, s, extra=1)) > 1e-9:
        raise StabilizationError("Whittaker shell changed under refinement")
    # the shells past the window must vanish
    for n in (top + 1, top + 2):
        if abs(_shell(ctx, n, xi, s)) > 1e-9:
            raise StabilizationError(f"Whittaker shell {n} does not vanish")
    return total


def constant_integral(ctx: PadicContext, s: complex, only: Optional[int] = None) -> complex:
    """Integral over F of f^+_K(w_1 u(t)) dt (or of a single f_r)."""
    p = ctx.p
    M = 2 * ctx.e + 4
    shells = [_shell(ctx, n, Fraction(0), s, only) for n in range(1, M + 3)]
    for n in (1, M):
        if abs(shells[n - 1] - _shell(ctx, n, Fraction(0), s, only, extra=1)) > 1e-9:
            raise StabilizationError("constant-term shell changed under refinement")
    q2s = p ** (-2 * s)
    for n in (M - 1, M):
        if abs(shells[n + 1] - q2s * shells[n - 1]) > 1e-9 * max(1.0, abs(shells[n - 1])):
            raise StabilizationError("constant-term shells are not geometric")
    total = _ball(ctx, Fraction(0), s, only) + sum(shells[:M])
    total += (shells[M - 2] + shells[M - 1]) * q2s / (1 - q2s)
    return total


def whittaker_vs_psi(ctx: PadicContext, xi, s: complex) -> tuple[complex, complex]:
    """(normalized Whittaker value W^+_xi(1)/|xi|^(1/2), Psi(xi, q^-s))."""
    xi = Fraction(xi)
    Q = make_field(0)
    if xi.denominator != 1:
        raise ValueError("xi must be an integer")
    inv = local_invariants(Q, places_over(Q, ctx.p)[0], Q.elt(int(xi)))
    q = ctx.q
    y = q ** (-s)
    f = int(inv.f)
    gam = (1 - y * y / q) / (1 - inv.chi * y / math.sqrt(q))
    W = whittaker_integral(ctx, xi, s) * q ** (f * s) / gam
    return W, psi_value(f, inv.chi, q, y)


# convolution


def lambda_representatives(p: int, N: int) -> list[Mat]:
    """Exact lifts in SL_2(Z_(p)) of SL_2(Z/p^N)."""
    mod = p ** N
    out = []
    for a, b, c, d in itertools.product(range(mod), repeat=4):
        if (a * d - b * c - 1) % mod:
            continue
        if d % p:
            out.append(mat(Fraction(1 + b * c, d), b, c, d))
        else:
            out.append(mat(a, Fraction(a * d - 1, c), c, d))
    return out


@dataclass
class IdempotenceReport:
    p: int
    levels: list
    max_deviation: dict
    stable: bool
    samples: int

    @property
    def ok(self) -> bool:
        return self.stable and all(v < 1e-9 for v in self.max_deviation.values())


def convolve(ctx: PadicContext, g: Mat, reps: list[Mat]) -> complex:
    p = ctx.p
    tot = 0j
    for h in reps:
        eh = _to_complex(eK_value(ctx, h))
        if eh == 0:
            continue
        hinv = meta_inv(p, (h, 1))
        gh, z = meta_mul(p, (g, 1), hinv)
        tot += _to_complex(eK_value(ctx, gh, z)) * eh
    return tot / len(reps)


def random_Lambda_elements(p: int, count: int, level: int = 8, seed: int = 0) -> list[Mat]:
    rng = random.Random(seed)
    mod = p ** level
    out = []
    while len(out) < count:
        a, b, c, d = (rng.randrange(mod) for _ in range(4))
        if d % p:
            out.append(mat(Fraction(1 + b * c, d), b, c, d))
        elif c % p:
            out.append(mat(a, Fraction(a * d - 1, c), c, d))
    return out


def convolve_idempotent_check(ctx: PadicContext, levels: list[int], samples: int = 20,
                              seed: int = 0) -> IdempotenceReport:
    fctx = PadicContext(ctx.p, exact=False)
    gs = [mat(1, 0, 0, 1)] + random_Lambda_elements(ctx.p, samples - 1, seed=seed)
    dev = {}
    values = {}
    for N in levels:
        reps = lambda_representatives(ctx.p, N)
        vals = [convolve(fctx, g, reps) for g in gs]
        values[N] = vals
        dev[N] = max(abs(v - _to_complex(eK_value(fctx, g))) for v, g in zip(vals, gs))
    base = values[levels[0]]
    stable = all(max(abs(a - b) for a, b in zip(base, values[N])) < 1e-9 for N in levels[1:])
    return IdempotenceReport(ctx.p, list(levels), dev, stable, len(gs))


@dataclass(frozen=True)
class GenuineFunction:
    """A genuine function, stored through its values on [g, 1]."""

    name: str
    section: object  # callable (ctx, g) -> scalar

    def __call__(self, ctx: PadicContext, g: Mat, zeta: int = 1):
        return self.section(ctx, g) * zeta


def EK_value(ctx: PadicContext, g: Mat, zeta: int = 1):
    """E^K(g) = e^K(w^-1 g w) with w = w_{2 delta}."""
    p = ctx.p
    w = (w_elt(2 * ctx.delta), 1)
    x = meta_mul(p, meta_mul(p, meta_inv(p, w), (g, zeta)), w)
    return eK_value(ctx, *x)


eK = GenuineFunction("e^K", lambda ctx, g: eK_value(ctx, g))
EK = GenuineFunction("E^K", lambda ctx, g: EK_value(ctx, g))
