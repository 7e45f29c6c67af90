"""Exact rational functions in Q = q^-1 and T = q^-s.

Every zeta value handled by the package has the shape

    num(Q, T) / prod (1 - Q^alpha T^beta)

so denominators are stored as a multiset of exponent pairs instead of as
polynomials. No bivariate gcd is needed: cancellation only ever removes a
single factor ``1 - Q^alpha T^beta`` that divides the numerator exactly.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple

from .errors import DivergentFactor, NonPositiveGrowth

Rat = Fraction
INF = math.inf


def as_rat(value) -> Fraction:
    """Coerce ints, Fractions and ``"a/b"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def rat_str(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


class PolyQT:
    """Polynomial in Q and T with rational coefficients (immutable)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], Fraction] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError(f"negative exponent ({i}, {j})")
            c = as_rat(c)
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("PolyQT is immutable")

    @classmethod
    def const(cls, c) -> "PolyQT":
        return cls({(0, 0): as_rat(c)})

    @classmethod
    def mono(cls, i: int, j: int, c=1) -> "PolyQT":
        return cls({(i, j): as_rat(c)})

    @classmethod
    def one_minus(cls, alpha: int, beta: int) -> "PolyQT":
        return cls({(0, 0): Fraction(1)}) - cls.mono(alpha, beta)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = PolyQT.const(other)
        return isinstance(other, PolyQT) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "PolyQT") -> "PolyQT":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return PolyQT(out)

    def __neg__(self) -> "PolyQT":
        return PolyQT({k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "PolyQT") -> "PolyQT":
        return self + (-other)

    def __mul__(self, other) -> "PolyQT":
        if isinstance(other, (int, Fraction)):
            return PolyQT({k: c * other for k, c in self.terms.items()})
        out: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                out[(i1 + i2, j1 + j2)] += c1 * c2
        return PolyQT(out)

    __rmul__ = __mul__

    def shift(self, i: int, j: int) -> "PolyQT":
        return PolyQT({(a + i, b + j): c for (a, b), c in self.terms.items()})

    def div_one_minus(self, alpha: int, beta: int) -> "PolyQT | None":
        """Exact quotient by ``1 - Q^alpha T^beta``, or None if it does not divide.

        Monomials are grouped into chains ``base + k*(alpha, beta)``; along a
        chain the quotient coefficients are running sums of the numerator
        coefficients, and divisibility means every chain sums to zero.
        """
        if not self.terms:
            return self
        chains: dict[tuple[int, int], dict[int, Fraction]] = defaultdict(dict)
        for (i, j), c in self.terms.items():
            k = min(i // alpha if alpha else INF, j // beta if beta else INF)
            k = int(k)
            chains[(i - k * alpha, j - k * beta)][k] = c
        out = {}
        for (bi, bj), chain in chains.items():
            acc = Fraction(0)
            ks = sorted(chain)
            for k in range(ks[0], ks[-1]):
                acc += chain.get(k, 0)
                if acc:
                    out[(bi + k * alpha, bj + k * beta)] = acc
            acc += chain[ks[-1]]
            if acc:
                return None
        return PolyQT(out)

    def specialize(self, q) -> dict[int, Fraction]:
        """Coefficients of T^j after substituting Q = 1/q."""
        q = as_rat(q)
        out: dict[int, Fraction] = defaultdict(Fraction)
        for (i, j), c in self.terms.items():
            out[j] += c / q**i
        return dict(out)

    def __repr__(self):
        return f"PolyQT({format_poly(self)})"


def format_poly(p: PolyQT) -> str:
    if not p.terms:
        return "0"
    parts = []
    for (i, j), c in sorted(p.terms.items()):
        mono = "*".join(s for s in (
            ("Q" if i == 1 else f"Q^{i}") if i else "",
            ("T" if j == 1 else f"T^{j}") if j else "",
        ) if s)
        if not mono:
            parts.append(rat_str(c))
        elif c == 1:
            parts.append(mono)
        elif c == -1:
            parts.append("-" + mono)
        else:
            parts.append(f"{rat_str(c)}*{mono}")
    return " + ".join(parts).replace("+ -", "- ")


class DenFactor(NamedTuple):
    alpha: int
    beta: int

    def poly(self) -> PolyQT:
        return PolyQT.one_minus(self.alpha, self.beta)


def _den_tuple(factors: Iterable) -> tuple[DenFactor, ...]:
    out = []
    for f in factors:
        f = DenFactor(int(f[0]), int(f[1]))
        if f.alpha < 0 or f.beta < 0:
            raise ValueError(f"bad denominator factor {tuple(f)}")
        if f.alpha == 0 and f.beta == 0:
            raise DivergentFactor("factor 1 - Q^0 T^0 vanishes")
        out.append(f)
    return tuple(sorted(out))


def _den_product(factors: Iterable[DenFactor]) -> PolyQT:
    acc = PolyQT.const(1)
    for f in factors:
        acc = acc * f.poly()
    return acc


class ZetaRat:
    """``num / prod(1 - Q^alpha T^beta)`` with the product kept factored."""

    __slots__ = ("num", "den")

    def __init__(self, num: PolyQT | None = None, den: Iterable = ()):
        object.__setattr__(self, "num", num if num is not None else PolyQT())
        object.__setattr__(self, "den", _den_tuple(den))

    def __setattr__(self, name, value):
        raise AttributeError("ZetaRat is immutable")

    @classmethod
    def const(cls, c) -> "ZetaRat":
        return cls(PolyQT.const(c))

    @classmethod
    def mono(cls, i: int, j: int, c=1) -> "ZetaRat":
        return cls(PolyQT.mono(i, j, c))

    @classmethod
    def geometric(cls, alpha: int, beta: int, start: int = 1) -> "ZetaRat":
        """sum_{k >= start} (Q^alpha T^beta)^k"""
        return geometric_sum(start, INF, (alpha, beta))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __add__(self, other):
        return zr_add(self, _coerce(other))

    __radd__ = __add__

    def __neg__(self):
        return ZetaRat(-self.num, self.den)

    def __sub__(self, other):
        return zr_add(self, -_coerce(other))

    def __rsub__(self, other):
        return zr_add(_coerce(other), -self)

    def __mul__(self, other):
        return zr_mul(self, _coerce(other))

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, PolyQT)):
            other = _coerce(other)
        if not isinstance(other, ZetaRat):
            return NotImplemented
        return same_value(self, other)

    __hash__ = None

    def den_counter(self) -> Counter:
        return Counter(self.den)

    def __repr__(self):
        den = " ".join(f"(1-Q^{a}T^{b})" for a, b in self.den)
        return f"ZetaRat[{format_poly(self.num)}" + (f" / {den}]" if den else "]")


def _coerce(x) -> ZetaRat:
    if isinstance(x, ZetaRat):
        return x
    if isinstance(x, PolyQT):
        return ZetaRat(x)
    return ZetaRat.const(x)


def same_value(a: ZetaRat, b: ZetaRat) -> bool:
    """Cross-multiplied identity a.num * prod(b.den) == b.num * prod(a.den)."""
    ca, cb = a.den_counter(), b.den_counter()
    common = ca & cb
    left = a.num * _den_product((cb - common).elements())
    right = b.num * _den_product((ca - common).elements())
    return left == right


def zr_add(a: ZetaRat, b: ZetaRat) -> ZetaRat:
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    ca, cb = a.den_counter(), b.den_counter()
    den = ca | cb
    num = a.num * _den_product((den - ca).elements()) + b.num * _den_product((den - cb).elements())
    if num.is_zero():
        return ZetaRat()
    return ZetaRat(num, den.elements())


def zr_mul(a: ZetaRat, b: ZetaRat) -> ZetaRat:
    num = a.num * b.num
    if num.is_zero():
        return ZetaRat()
    return ZetaRat(num, a.den + b.den)


def _lower(num: PolyQT, f: DenFactor) -> tuple[PolyQT, DenFactor]:
    """Replace 1 - z^n by 1 - z^(n/k) when num is divisible by
    1 + z^(n/k) + ... + z^(n - n/k), trying the largest k first."""
    g = math.gcd(f.alpha, f.beta)
    for k in sorted((k for k in range(2, g + 1) if g % k == 0), reverse=True):
        small = DenFactor(f.alpha // k, f.beta // k)
        q = (num * small.poly()).div_one_minus(f.alpha, f.beta)
        if q is not None:
            return q, small
    return num, f


def zr_reduce(a: ZetaRat) -> ZetaRat:
    """Cancel denominator factors against the numerator.

    A factor dividing the numerator exactly is removed; a factor 1 - z^n whose
    cyclotomic cofactor divides the numerator is lowered to 1 - z^(n/k).
    """
    if a.num.is_zero():
        return ZetaRat()
    num = a.num
    pending = list(a.den)
    kept = []
    while pending:
        f = pending.pop()
        q = num.div_one_minus(f.alpha, f.beta)
        if q is not None:
            num = q
            continue
        num2, f2 = _lower(num, f)
        if f2 != f:
            num = num2
            pending.append(f2)
        else:
            kept.append(f)
    return ZetaRat(num, kept)


@dataclass(frozen=True)
class SeriesT:
    q_value: Fraction
    coeffs: tuple[Fraction, ...]
    order: int

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coefficient count must be order + 1")

    def __add__(self, other: "SeriesT") -> "SeriesT":
        n = min(self.order, other.order)
        return SeriesT(self.q_value, tuple(a + b for a, b in zip(self.coeffs[: n + 1], other.coeffs)), n)

    def __mul__(self, other: "SeriesT") -> "SeriesT":
        n = min(self.order, other.order)
        out = [Fraction(0)] * (n + 1)
        for i in range(n + 1):
            if self.coeffs[i]:
                for j in range(n + 1 - i):
                    out[i + j] += self.coeffs[i] * other.coeffs[j]
        return SeriesT(self.q_value, tuple(out), n)


def zr_series(a: ZetaRat, q_value, order: int) -> SeriesT:
    """Taylor coefficients in T up to ``order`` with Q = 1/q_value."""
    q = as_rat(q_value)
    if q < 2:
        raise ValueError("q_value must be at least 2")
    scalar = Fraction(1)
    coeffs = [Fraction(0)] * (order + 1)
    for j, c in a.num.specialize(q).items():
        if j <= order:
            coeffs[j] += c
    for f in a.den:
        if f.beta == 0:
            if f.alpha == 0:
                raise DivergentFactor("factor 1 - Q^0 T^0")
            scalar /= 1 - 1 / q**f.alpha
            continue
        # multiply by 1/(1 - z) with z = q^-alpha T^beta, in place
        ratio = 1 / q**f.alpha
        for j in range(f.beta, order + 1):
            coeffs[j] += ratio * coeffs[j - f.beta]
    return SeriesT(q, tuple(c * scalar for c in coeffs), order)


def geometric_sum(A: int, B, factor: tuple[int, int]) -> ZetaRat:
    """sum_{k=A}^{B} (Q^cQ T^cT)^k; ``B`` may be ``math.inf``."""
    cq, ct = factor
    if B != INF and B < A:
        raise ValueError("need A <= B")
    if A * cq < 0 or A * ct < 0:
        raise ValueError("negative starting exponent")
    if B == INF:
        if cq == 0 and ct == 0:
            raise DivergentFactor("infinite sum of a constant")
        if cq < 0 or ct < 0:
            raise NonPositiveGrowth("geometric ratio has a negative exponent")
        return ZetaRat(PolyQT.mono(A * cq, A * ct), [(cq, ct)])
    terms: dict[tuple[int, int], Fraction] = defaultdict(Fraction)
    for k in range(A, int(B) + 1):
        terms[(k * cq, k * ct)] += 1
    return ZetaRat(PolyQT(terms))


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def floor_sum(m0: int, tau, lin: tuple[int, int, int, int], shift=0,
              modulus: int = 1, residue: int = 0) -> ZetaRat:
    """sum over m >= m0 (m = residue mod modulus) of

        Q^(c1*m + c2*floor(m*tau + shift)) * T^(c3*m + c4*floor(m*tau + shift)).

    Splitting m by its class modulo lcm(modulus, den(tau)) makes the floor
    affine on each class, after which every class is one geometric series.
    """
    tau, shift = as_rat(tau), as_rat(shift)
    c1, c2, c3, c4 = lin
    period = math.lcm(modulus, tau.denominator)
    step_t = tau * period
    assert step_t.denominator == 1
    step_t = step_t.numerator
    grow_q = c1 * period + c2 * step_t
    grow_t = c3 * period + c4 * step_t
    if grow_q <= 0 or grow_t < 0:
        raise NonPositiveGrowth(f"exponent growth ({grow_q}, {grow_t}) per period")
    out = ZetaRat()
    for r in range(period):
        if (r - residue) % modulus:
            continue
        t0 = max(0, -((r - m0) // period))  # smallest t with period*t + r >= m0
        m_first = period * t0 + r
        fl = _floor(m_first * tau + shift)
        eq = c1 * m_first + c2 * fl
        et = c3 * m_first + c4 * fl
        if eq < 0 or et < 0:
            raise NonPositiveGrowth(f"negative exponent at m={m_first}")
        out = out + ZetaRat(PolyQT.mono(eq, et), [(grow_q, grow_t)])
    return out


def real_pole_parts(a: ZetaRat) -> set[Fraction]:
    return {Fraction(-f.alpha, f.beta) for f in a.den if f.beta}


# -- serialization ---------------------------------------------------------

def zr_to_json(a: ZetaRat) -> dict:
    den = sorted(a.den_counter().items())
    return {
        "num": [[i, j, rat_str(c)] for (i, j), c in sorted(a.num.terms.items())],
        "den": [[f.alpha, f.beta, n] for f, n in den],
    }


def zr_from_json(doc: Mapping) -> ZetaRat:
    num = PolyQT({(int(i), int(j)): as_rat(c) for i, j, c in doc.get("num", [])})
    den = []
    for alpha, beta, mult in doc.get("den", []):
        den.extend([(alpha, beta)] * int(mult))
    return ZetaRat(num, den)


def _latex_qpow(i: int, j: int) -> str:
    if i == 0 and j == 0:
        return ""
    if j == 0:
        return f"q^{{-{i}}}"
    s = "s" if j == 1 else f"{j}s"
    return f"q^{{-{s}}}" if i == 0 else f"q^{{-{i}-{s}}}"


def poly_latex(p: PolyQT) -> str:
    if p.is_zero():
        return "0"
    out = []
    for (i, j), c in sorted(p.terms.items()):
        mono = _latex_qpow(i, j)
        mag = abs(c)
        if not mono:
            body = rat_str(mag) if mag.denominator == 1 else f"\\frac{{{mag.numerator}}}{{{mag.denominator}}}"
        elif mag == 1:
            body = mono
        elif mag.denominator == 1:
            body = f"{mag.numerator}{mono}"
        else:
            body = f"\\frac{{{mag.numerator}}}{{{mag.denominator}}}{mono}"
        out.append(("-" if c < 0 else "+") + " " + body)
    text = " ".join(out)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def zr_latex(a: ZetaRat) -> str:
    num = poly_latex(a.num)
    if not a.den:
        return num
    parts = []
    for f, n in sorted(a.den_counter().items()):
        factor = f"(1 - {_latex_qpow(f.alpha, f.beta)})"
        parts.append(factor if n == 1 else f"{factor}^{{{n}}}")
    return f"\\frac{{{num}}}{{{''.join(parts)}}}"


def vp(x, p: int) -> float | int:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    x = as_rat(x)
    if x == 0:
        return INF
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def unit_part(x, p: int) -> Fraction:
    """x / p^v(x)."""
    x = as_rat(x)
    v = vp(x, p)
    return x / Fraction(p) ** v


def residue(x, p: int, k: int = 1) -> int:
    """Image of a p-integral rational in Z/p^k."""
    x = as_rat(x)
    mod = p**k
    if x.denominator % p == 0:
        raise ValueError(f"{x} is not {p}-integral")
    return x.numerator * pow(x.denominator, -1, mod) % mod
