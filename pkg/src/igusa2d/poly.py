"""Bivariate polynomials over Q, their semi-quasihomogeneous form, and
reductions modulo a prime."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import as_rat, rat_str, residue
from .errors import (
    EmptyInput,
    InputSyntaxError,
    IrrationalRoot,
    NonCoprimeWeight,
    NonUnitDenominator,
    SchemaError,
)


class Poly2:
    """Polynomial in x, y with rational coefficients; keys are (i, j)."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        clean = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent")
            c = as_rat(c)
            if c:
                clean[(int(i), int(j))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Poly2 is immutable")

    @classmethod
    def mono(cls, i: int, j: int, c=1) -> "Poly2":
        return cls({(i, j): c})

    def support(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, Poly2) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "Poly2") -> "Poly2":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return Poly2(out)

    def __neg__(self):
        return Poly2({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other) -> "Poly2":
        if isinstance(other, (int, Fraction)):
            return Poly2({k: c * other for k, c in self.terms.items()})
        out = defaultdict(Fraction)
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                out[(i1 + i2, j1 + j2)] += c1 * c2
        return Poly2(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly2":
        acc = Poly2({(0, 0): 1})
        for _ in range(n):
            acc = acc * self
        return acc

    def restrict(self, points: Iterable[tuple[int, int]]) -> "Poly2":
        pts = set(points)
        return Poly2({k: c for k, c in self.terms.items() if k in pts})

    def evaluate(self, x, y):
        return sum(c * x**i * y**j for (i, j), c in self.terms.items())

    def dx(self) -> "Poly2":
        return Poly2({(i - 1, j): c * i for (i, j), c in self.terms.items() if i})

    def dy(self) -> "Poly2":
        return Poly2({(i, j - 1): c * j for (i, j), c in self.terms.items() if j})

    def __repr__(self):
        return f"Poly2({format_poly2(self)})"


def format_poly2(f: Poly2) -> str:
    if not f.terms:
        return "0"
    out = []
    for (i, j), c in sorted(f.terms.items(), key=lambda t: (t[0][0] + t[0][1], t[0])):
        mono = "*".join(s for s in (
            ("x" if i == 1 else f"x^{i}") if i else "",
            ("y" if j == 1 else f"y^{j}") if j else "",
        ) if s)
        if not mono:
            out.append(rat_str(c))
        elif c == 1:
            out.append(mono)
        elif c == -1:
            out.append("-" + mono)
        else:
            out.append(f"{rat_str(c)}*{mono}")
    return " + ".join(out).replace("+ -", "- ")


@dataclass(frozen=True)
class SQHPart:
    """c * x^u * y^v * prod (y^a - alpha x^b)^e for the owning weight (a, b)."""

    c: Fraction
    u: int
    v: int
    factors: tuple[tuple[Fraction, int], ...]
    d: int

    def multiplicity(self, alpha: Fraction) -> int:
        for al, e in self.factors:
            if al == alpha:
                return e
        return 0

    def expand(self, weight: tuple[int, int]) -> Poly2:
        a, b = weight
        acc = Poly2({(self.u, self.v): self.c})
        for alpha, e in self.factors:
            acc = acc * (Poly2({(0, a): 1, (b, 0): -alpha}) ** e)
        return acc


def make_part(weight: tuple[int, int], c, u: int, v: int, factors) -> SQHPart:
    a, b = weight
    fs = tuple(sorted((as_rat(al), int(e)) for al, e in factors))
    alphas = [al for al, _ in fs]
    if len(set(alphas)) != len(alphas):
        raise SchemaError("repeated alpha inside one part")
    if any(e <= 0 for _, e in fs):
        raise SchemaError("factor multiplicities must be positive")
    if any(al == 0 for al in alphas):
        raise SchemaError("alpha = 0 belongs in the monomial prefactor")
    c = as_rat(c)
    if c == 0:
        raise SchemaError("part coefficient must be nonzero")
    d = a * b * sum(e for _, e in fs) + a * u + b * v
    return SQHPart(c, int(u), int(v), fs, d)


@dataclass(frozen=True)
class SQHDecomposition:
    weight: tuple[int, int]
    parts: tuple[SQHPart, ...]

    def __post_init__(self):
        a, b = self.weight
        if a <= 0 or b <= 0:
            raise SchemaError("weights must be positive")
        if math.gcd(a, b) != 1:
            raise NonCoprimeWeight(f"weight ({a},{b}) is not coprime")
        if not self.parts:
            raise EmptyInput("no quasihomogeneous parts")
        ds = [pt.d for pt in self.parts]
        if any(x >= y for x, y in zip(ds, ds[1:])):
            raise SchemaError("weighted degrees must increase strictly")

    @property
    def d0(self) -> int:
        return self.parts[0].d

    def expand(self) -> Poly2:
        acc = Poly2()
        for pt in self.parts:
            acc = acc + pt.expand(self.weight)
        return acc


def expand_sqh(d: SQHDecomposition) -> Poly2:
    return d.expand()


# -- rational roots ----------------------------------------------------------

def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    k = 1
    while k * k <= n:
        if n % k == 0:
            small.append(k)
            if k * k != n:
                large.append(n // k)
        k += 1
    return small + large[::-1]


def _synthetic_div(coeffs: list[Fraction], r: Fraction) -> tuple[list[Fraction], Fraction]:
    """Divide sum coeffs[k] z^k (highest degree last) by (z - r)."""
    n = len(coeffs) - 1
    out = [Fraction(0)] * n
    acc = Fraction(0)
    for k in range(n, 0, -1):
        acc = acc * r + coeffs[k]
        out[k - 1] = acc
    rem = acc * r + coeffs[0]
    return out, rem


def rational_roots(coeffs: list[Fraction]) -> tuple[list[tuple[Fraction, int]], list[Fraction]]:
    """Rational roots with multiplicity of a univariate polynomial.

    ``coeffs[k]`` is the coefficient of z^k. Returns the roots and the
    leftover cofactor (constant when the polynomial splits over Q).
    """
    coeffs = [as_rat(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    roots: list[tuple[Fraction, int]] = []
    zeros = 0
    while len(coeffs) > 1 and coeffs[0] == 0:
        coeffs.pop(0)
        zeros += 1
    if zeros:
        roots.append((Fraction(0), zeros))
    if len(coeffs) <= 1:
        return roots, coeffs
    lcm = math.lcm(*(c.denominator for c in coeffs))
    ints = [int(c * lcm) for c in coeffs]
    candidates = sorted({
        Fraction(s * pn, qd)
        for pn in _divisors(ints[0])
        for qd in _divisors(ints[-1])
        for s in (1, -1)
    })
    for r in candidates:
        mult = 0
        while len(coeffs) > 1:
            quo, rem = _synthetic_div(coeffs, r)
            if rem:
                break
            coeffs = quo
            mult += 1
        if mult:
            roots.append((r, mult))
    return roots, coeffs


def sqh_decompose(f: Poly2, weight: tuple[int, int]) -> SQHDecomposition:
    """Group by weighted degree and factor each group over Q."""
    a, b = weight
    if math.gcd(a, b) != 1:
        raise NonCoprimeWeight(f"weight ({a},{b}) is not coprime")
    if f.is_zero():
        raise EmptyInput("zero polynomial")
    groups: dict[int, dict] = defaultdict(dict)
    for (i, j), c in f.terms.items():
        groups[a * i + b * j][(i, j)] = c
    parts = []
    for deg in sorted(groups):
        g = groups[deg]
        u = min(i for i, _ in g)
        v = min(j for _, j in g)
        top = max(j for _, j in g) - v
        # along the weighted line, j - v is a multiple of a
        n = top // a
        s = [Fraction(0)] * (n + 1)
        for (i, j), c in g.items():
            s[(j - v) // a] = c
        roots, rest = rational_roots(s)
        if len(rest) > 1:
            raise IrrationalRoot(
                f"weighted-degree {deg} part does not split over Q"
            )
        factors = roots
        part = make_part(weight, rest[0], u, v, factors)
        if part.d != deg:
            raise AssertionError("weighted degree bookkeeping")
        parts.append(part)
    return SQHDecomposition((a, b), tuple(parts))


# -- reduction mod p -----------------------------------------------------------

@dataclass(frozen=True)
class ModPoly2:
    p: int
    terms: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "terms", {k: c % self.p for k, c in self.terms.items() if c % self.p}
        )

    def evaluate(self, x: int, y: int, mod: int | None = None) -> int:
        mod = mod or self.p
        return sum(c * pow(x, i, mod) * pow(y, j, mod) for (i, j), c in self.terms.items()) % mod

    def dx(self) -> "ModPoly2":
        return ModPoly2(self.p, {(i - 1, j): c * i for (i, j), c in self.terms.items() if i})

    def dy(self) -> "ModPoly2":
        return ModPoly2(self.p, {(i, j - 1): c * j for (i, j), c in self.terms.items() if j})

    def is_zero(self) -> bool:
        return not self.terms


def reduce_mod(f: Poly2, p: int) -> ModPoly2:
    terms = {}
    for k, c in f.terms.items():
        if c.denominator % p == 0:
            raise NonUnitDenominator(f"coefficient {rat_str(c)} is not {p}-integral")
        terms[k] = residue(c, p)
    return ModPoly2(p, terms)


def torus_zeros(g: ModPoly2) -> list[tuple[int, int]]:
    p = g.p
    return [(x, y) for x in range(1, p) for y in range(1, p) if g.evaluate(x, y) == 0]


def singular_torus_points(g: ModPoly2) -> set[tuple[int, int]]:
    gx, gy = g.dx(), g.dy()
    return {
        pt for pt in torus_zeros(g)
        if gx.evaluate(*pt) == 0 and gy.evaluate(*pt) == 0
    }


def origin_is_singular(f: Poly2) -> bool:
    """f(0,0) = 0 and both partials vanish there, over Q."""
    return all(i + j >= 2 for i, j in f.terms)


# -- input documents -----------------------------------------------------------

@dataclass(frozen=True)
class Problem:
    p: int | None
    poly: Poly2
    sqh: SQHDecomposition | None = None


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def _read_rat(x, what: str) -> Fraction:
    try:
        return as_rat(x)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise SchemaError(f"{what}: {x!r} is not a rational") from exc


def _read_int(x, what: str, minimum: int = 0) -> int:
    if isinstance(x, bool) or not isinstance(x, int) or x < minimum:
        raise SchemaError(f"{what}: expected an integer >= {minimum}, got {x!r}")
    return x


def parse_polynomial(doc) -> tuple[Poly2, SQHDecomposition | None]:
    if not isinstance(doc, Mapping) or len(doc) != 1:
        raise SchemaError("polynomial must have exactly one of 'expanded' or 'sqh'")
    if "expanded" in doc:
        rows = doc["expanded"]
        if not isinstance(rows, list) or not rows:
            raise EmptyInput("'expanded' must be a nonempty list")
        terms: dict = defaultdict(Fraction)
        for row in rows:
            if not isinstance(row, list) or len(row) not in (3, 4):
                raise SchemaError(f"term {row!r} must be [coeff, i, j] or [num, den, i, j]")
            if len(row) == 3:
                c = _read_rat(row[0], "coefficient")
            else:
                num = _read_rat(row[0], "coefficient numerator")
                den = _read_rat(row[1], "coefficient denominator")
                if den == 0:
                    raise SchemaError("zero denominator")
                c = num / den
            i = _read_int(row[-2], "x exponent")
            j = _read_int(row[-1], "y exponent")
            terms[(i, j)] += c
        poly = Poly2(terms)
        if poly.is_zero():
            raise EmptyInput("polynomial is zero")
        return poly, None
    if "sqh" in doc:
        body = doc["sqh"]
        if not isinstance(body, Mapping):
            raise SchemaError("'sqh' must be an object")
        w = body.get("weight")
        if not isinstance(w, list) or len(w) != 2:
            raise SchemaError("weight must be [a, b]")
        weight = (_read_int(w[0], "weight a", 1), _read_int(w[1], "weight b", 1))
        if math.gcd(*weight) != 1:
            raise NonCoprimeWeight(f"weight ({weight[0]},{weight[1]}) is not coprime")
        raw_parts = body.get("parts")
        if not isinstance(raw_parts, list) or not raw_parts:
            raise EmptyInput("'parts' must be a nonempty list")
        parts = []
        for rp in raw_parts:
            if not isinstance(rp, Mapping):
                raise SchemaError("each part must be an object")
            factors = []
            for fc in rp.get("factors", []):
                if not isinstance(fc, Mapping):
                    raise SchemaError("each factor must be an object")
                factors.append((_read_rat(fc.get("alpha"), "alpha"), _read_int(fc.get("e"), "e", 1)))
            parts.append(make_part(
                weight,
                _read_rat(rp.get("c", 1), "c"),
                _read_int(rp.get("u", 0), "u"),
                _read_int(rp.get("v", 0), "v"),
                factors,
            ))
        parts.sort(key=lambda pt: pt.d)
        dec = SQHDecomposition(weight, tuple(parts))
        poly = dec.expand()
        if poly.is_zero():
            raise EmptyInput("polynomial is zero")
        return poly, dec
    raise SchemaError("polynomial must have 'expanded' or 'sqh'")


def parse_input(document) -> Problem:
    """Validate an input document (a JSON string or an already-loaded mapping)."""
    import json

    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise InputSyntaxError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from exc
    if not isinstance(document, Mapping):
        raise SchemaError("document must be a JSON object")
    if "polynomial" not in document:
        raise SchemaError("missing 'polynomial'")
    p = document.get("p")
    if p is not None:
        p = _read_int(p, "p", 2)
        if not is_prime(p):
            raise SchemaError(f"p = {p} is not prime")
    poly, dec = parse_polynomial(document["polynomial"])
    return Problem(p, poly, dec)
