"""Assembly of Z(s, f) over Z_p^2 from cone contributions.

Notation: Q = p^-1, T = p^-s. The integral splits over the unit torus and over
the cones of a subdivision of the first quadrant; a cone collects the points
whose valuation vector (v(x), v(y)) lies in it.

Cones whose face function reduces to something smooth on the torus are summed
in closed form. A ray through the normal (a, b) of a compact facet whose face
function has a repeated factor goes through ``degenerate_ray_contribution``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce as _fold

from .algebra import (
    INF,
    PolyQT,
    ZetaRat,
    floor_sum,
    geometric_sum,
    rat_str,
    real_pole_parts,
    residue,
    unit_part,
    vp,
    zr_reduce,
)
from .arith import ArithNewtonData, arith_newton_data, arith_nondegeneracy_check
from .errors import (
    ArithmeticallyDegenerate,
    DegenerateFace,
    NonMonomialFace,
    SingularReduction,
    UnsupportedClass,
)
from .geom import (
    Cone,
    ConeSubdiv,
    GeomPolygon,
    conical_subdivision,
    face_data,
    face_function,
    geom_candidate_poles,
    geom_polygon,
    parallelepiped_points,
)
from .poly import (
    ModPoly2,
    Poly2,
    SQHDecomposition,
    reduce_mod,
    singular_torus_points,
    torus_zeros,
)

ONE_MINUS_Q = PolyQT.one_minus(1, 0)


# -- unit torus ----------------------------------------------------------------

@dataclass(frozen=True)
class UnitIntegralResult:
    value: ZetaRat
    torus_count: int
    smooth: bool


def spf_value(N: int) -> ZetaRat:
    """Integral of |g|^s over the unit torus when the reduction of g has N
    torus zeros, all of them smooth:

        (1-Q)^2 - N Q^2 + N Q^2 (1-Q) T / (1 - QT).
    """
    base = ZetaRat(ONE_MINUS_Q * ONE_MINUS_Q - PolyQT.mono(2, 0, N))
    if N == 0:
        return base
    smooth = ZetaRat(PolyQT.mono(2, 1, N) * ONE_MINUS_Q, [(1, 1)])
    return base + smooth


def _torus_integral_mod(g: ModPoly2) -> UnitIntegralResult:
    zeros = torus_zeros(g)
    sing = singular_torus_points(g)
    return UnitIntegralResult(spf_value(len(zeros)), len(zeros), not sing)


def unit_torus_integral(f: Poly2, p: int) -> UnitIntegralResult:
    res = _torus_integral_mod(reduce_mod(f, p))
    if not res.smooth:
        raise SingularReduction("reduction has a singular point on the torus")
    return res


# -- cones with smooth face functions ------------------------------------------

def cone_contribution_2d(cone: Cone, P: GeomPolygon) -> ZetaRat:
    if cone.dim != 2:
        raise ValueError("expected a two-dimensional cone")
    if cone.face.kind != "vertex":
        raise NonMonomialFace("two-dimensional cone attached to a facet")
    (v,) = cone.face.points
    u, w = cone.generators
    pts = parallelepiped_points(u, w)
    # the parallelepiped points are distinct monomials only after summing
    num: dict = {}
    for k in pts:
        key = (k[0] + k[1], k[0] * v[0] + k[1] * v[1])
        num[key] = num.get(key, 0) + 1
    lattice = ZetaRat(PolyQT(num), [(g[0] + g[1], g[0] * v[0] + g[1] * v[1]) for g in (u, w)])
    return zr_reduce(ZetaRat(ONE_MINUS_Q * ONE_MINUS_Q) * lattice)


def _check_vertex_units(f: Poly2, P: GeomPolygon, p: int) -> None:
    """Monomial faces must survive reduction mod p."""
    for v in P.vertices:
        if vp(f.terms[v], p) != 0:
            raise UnsupportedClass(f"coefficient at vertex {v} is not a {p}-adic unit")


def cone_contribution_ray_nondeg(cone: Cone, f: Poly2, p: int) -> ZetaRat:
    if cone.dim != 1:
        raise ValueError("expected a ray")
    g = face_function(f, cone.face)
    res = _torus_integral_mod(reduce_mod(g, p))
    if not res.smooth:
        raise DegenerateFace(f"face function along {cone.generators[0]} is singular mod {p}")
    sigma, m = cone.m_values[0]
    return zr_reduce(res.value * geometric_sum(1, INF, (sigma, m)))


# -- monomial change of variables ------------------------------------------------

@dataclass(frozen=True)
class TransformedPart:
    c: Fraction
    d: int
    B: int  # exponent of W
    factors: tuple[tuple[Fraction, int], ...]
    gap: int  # d_j - d_0


@dataclass(frozen=True)
class TransformedFamily:
    weight: tuple[int, int]
    companion: tuple[int, int]  # (c, dd) with a*dd - b*c = 1
    parts: tuple[TransformedPart, ...]

    @property
    def d0(self) -> int:
        return self.parts[0].d


def companion_pair(a: int, b: int) -> tuple[int, int]:
    """Non-negative (c, dd) with a*dd - b*c = 1."""
    if b == 1:
        return a - 1, 1
    dd = pow(a, -1, b)
    c = (a * dd - 1) // b
    return c, dd


def phi_transform(dec: SQHDecomposition) -> TransformedFamily:
    """x = U^a W^c, y = U^b W^dd turns each part into

        c_j U^{d_j} W^{B_j} prod (W - alpha)^e,   B_j = c (u_j + b E_j) + dd v_j,

    with E_j the total multiplicity of the part. The substitution is a
    measure-preserving automorphism of the unit torus.
    """
    a, b = dec.weight
    c, dd = companion_pair(a, b)
    d0 = dec.d0
    parts = []
    for pt in dec.parts:
        E = sum(e for _, e in pt.factors)
        B = c * (pt.u + b * E) + dd * pt.v
        parts.append(TransformedPart(pt.c, pt.d, B, pt.factors, pt.d - d0))
    return TransformedFamily((a, b), (c, dd), tuple(parts))


# -- the theta expansion ---------------------------------------------------------

@dataclass(frozen=True)
class ThetaLine:
    part: int
    gap: int  # m-coefficient
    const: int  # Const(j, theta)
    slope: int  # e_{j, theta}
    unit: int  # residue of the unit cofactor times theta^B_j

    def at(self, m, k):
        return self.gap * m + self.const + self.slope * k


@dataclass(frozen=True)
class ThetaExpansion:
    theta: Fraction
    e0: int
    level: int  # W = theta + p^k z with k >= level
    l0: int
    lines: tuple[ThetaLine, ...]
    M0: int


def theta_expansion(tf: TransformedFamily, theta: Fraction, p: int, level: int | None = None) -> ThetaExpansion:
    roots0 = [al for al, _ in tf.parts[0].factors if vp(al, p) >= 0]
    diffs = [vp(x - y, p) for i, x in enumerate(roots0) for y in roots0[i + 1:]]
    l0 = max(diffs, default=0)
    if level is None:
        others = {al for pt in tf.parts for al, _ in pt.factors if al != theta}
        level = 1 + max([l0] + [vp(theta - al, p) for al in others if vp(al, p) >= 0])
    lines = []
    for j, pt in enumerate(tf.parts):
        const = vp(pt.c, p)
        cof = unit_part(pt.c, p)
        slope = 0
        for al, e in pt.factors:
            if al == theta:
                slope = e
                continue
            const += e * vp(theta - al, p)
            cof *= unit_part(theta - al, p) ** e
        cof *= theta ** pt.B
        lines.append(ThetaLine(j, pt.gap, const, slope, residue(cof, p)))
    M0 = max(lines[0].const + 1 - ln.const for ln in lines)
    e0 = dict(tf.parts[0].factors).get(theta, 0)
    return ThetaExpansion(theta, e0, level, l0, tuple(lines), max(M0, 1))


# -- envelopes over k, for one m or for all large m ------------------------------

class Lin:
    """alpha*m + beta, ordered as m -> infinity."""

    __slots__ = ("a", "b")

    def __init__(self, a, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @staticmethod
    def _c(o):
        return o if isinstance(o, Lin) else Lin(0, o)

    def __add__(self, o):
        o = Lin._c(o)
        return Lin(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, o):
        o = Lin._c(o)
        return Lin(self.a - o.a, self.b - o.b)

    def __rsub__(self, o):
        return Lin._c(o) - self

    def __mul__(self, k):
        return Lin(self.a * k, self.b * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return Lin(self.a / k, self.b / k)

    def _key(self):
        return (self.a, self.b)

    def __eq__(self, o):
        return self._key() == Lin._c(o)._key()

    def __lt__(self, o):
        return self._key() < Lin._c(o)._key()

    def __le__(self, o):
        return self._key() <= Lin._c(o)._key()

    def __gt__(self, o):
        return self._key() > Lin._c(o)._key()

    def __ge__(self, o):
        return self._key() >= Lin._c(o)._key()

    def __hash__(self):
        return hash(self._key())

    def root(self):
        """The m where alpha*m + beta changes sign, if any."""
        return -self.b / self.a if self.a else None

    def __repr__(self):
        return f"Lin({self.a}*m + {self.b})"


@dataclass
class Event:
    kind: str  # "point" or "interval"
    lo: object
    hi: object  # None for an unbounded interval
    members: frozenset[int]


def envelope_events(lines: tuple[ThetaLine, ...], k0: int, m) -> list[Event]:
    """Walk the lower envelope of k -> L_j(m, k) from k = k0 to infinity."""
    def val(j, z):
        return lines[j].at(m, z)

    z = k0 if not isinstance(m, Lin) else Lin(0, k0)
    vals = [val(j, z) for j in range(len(lines))]
    low = min(vals)
    at = frozenset(j for j, v in enumerate(vals) if v == low)
    events = [Event("point", z, z, at)]
    while True:
        smin = min(lines[j].slope for j in at)
        cont = frozenset(j for j in at if lines[j].slope == smin)
        ref = next(iter(cont))
        best = None
        for j, ln in enumerate(lines):
            if ln.slope >= smin:
                continue
            zc = z + (val(j, z) - val(ref, z)) / (smin - ln.slope)
            if best is None or zc < best:
                best = zc
        if best is None:
            events.append(Event("interval", z, None, cont))
            return events
        events.append(Event("interval", z, best, cont))
        z = best
        vals = [val(j, z) for j in range(len(lines))]
        low = min(vals)
        at = frozenset(j for j, v in enumerate(vals) if v == low)
        events.append(Event("point", z, z, at))


def critical_m(lines: tuple[ThetaLine, ...], k0: int) -> int:
    """Smallest M such that every comparison made by ``envelope_events`` has
    the same outcome for all m >= M as for m -> infinity."""
    m = Lin(1, 0)
    n = len(lines)
    quantities: list[Lin] = []
    crossings = [Lin(0, k0)]
    for i in range(n):
        for j in range(i + 1, n):
            quantities.append(lines[i].at(m, k0) - lines[j].at(m, k0))
            if lines[i].slope != lines[j].slope:
                crossings.append(
                    (lines[j].at(m, 0) - lines[i].at(m, 0)) / (lines[i].slope - lines[j].slope)
                )
    for i, c in enumerate(crossings):
        for c2 in crossings[i + 1:]:
            quantities.append(c - c2)
        for x in range(n):
            for y in range(x + 1, n):
                quantities.append(lines[x].at(m, c) - lines[y].at(m, c))
    roots = [q.root() for q in quantities if q.a]
    top = max([Fraction(0)] + roots)
    return max(1, math.floor(top) + 1)


class _Spf:
    """Cache of unit-torus integrals of the reduced tie polynomials."""

    def __init__(self, lines, p):
        self.lines, self.p, self.cache = lines, p, {}

    def __call__(self, members: frozenset[int]) -> ZetaRat:
        if members not in self.cache:
            if len(members) == 1:
                self.cache[members] = ZetaRat(ONE_MINUS_Q * ONE_MINUS_Q)
            else:
                terms = {(self.lines[j].gap, self.lines[j].slope): self.lines[j].unit for j in members}
                g = ModPoly2(self.p, terms)
                res = _torus_integral_mod(g)
                if not res.smooth:
                    raise ArithmeticallyDegenerate(
                        f"tie of parts {sorted(members)} is singular mod {self.p}"
                    )
                self.cache[members] = res.value
        return self.cache[members]


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -_floor(-x)


def theta_term_numeric(exp: ThetaExpansion, m: int, spf: _Spf) -> ZetaRat:
    """I_theta(m) = sum over k >= level of Q^k T^{min_j L_j} F_S."""
    acc = ZetaRat()
    lines = exp.lines
    for ev in envelope_events(lines, exp.level, Fraction(m)):
        j = min(ev.members)
        ln = lines[j]
        F = spf(ev.members)
        if ev.kind == "point":
            z = ev.lo
            if z.denominator == 1:
                k = int(z)
                acc = acc + F * ZetaRat.mono(k, ln.at(m, k))
            continue
        lo = _floor(ev.lo) + 1
        hi = INF if ev.hi is None else _ceil(ev.hi) - 1
        if hi != INF and lo > hi:
            continue
        pref = ZetaRat.mono(0, ln.gap * m + ln.const)
        acc = acc + zr_reduce(F * pref * geometric_sum(lo, hi, (1, ln.slope)))
    return acc


def theta_term_tail(exp: ThetaExpansion, Mstar: int, weight_sum: int, d0: int,
                    spf: _Spf) -> tuple[list[ZetaRat], int]:
    """sum_{m >= Mstar} X^m I_theta(m) with X = Q^{a+b} T^{d0}.

    The envelope is computed once with symbolic m; each breakpoint is affine in
    m, so splitting m by residue modulo the common denominator of the slopes
    makes every floor affine and each event becomes a floor_sum.
    """
    lines = exp.lines
    events = envelope_events(lines, exp.level, Lin(1, 0))
    zs = [ev.lo for ev in events] + [ev.hi for ev in events if ev.hi is not None]
    Dm = _fold(math.lcm, (z.a.denominator for z in zs), 1)
    pieces = []
    for ev in events:
        j = min(ev.members)
        ln = lines[j]
        F = spf(ev.members)
        lin = (weight_sum, 1, d0 + ln.gap, ln.slope)
        if ev.kind == "point":
            acc = ZetaRat()
            z = ev.lo
            for r in range(Dm):
                if (z.a * r + z.b).denominator != 1:
                    continue
                acc = acc + floor_sum(Mstar, z.a, lin, z.b, Dm, r)
            pieces.append(zr_reduce(F * ZetaRat.mono(0, ln.const) * acc))
            continue
        # sum_{k=lo}^{hi} Y^k = (Y^lo - Y^(hi+1)) / (1 - Y), one piece per bound
        scale = F * ZetaRat(PolyQT.const(1), [(1, ln.slope)])
        low = ZetaRat()
        for r in range(Dm):
            low = low + floor_sum(Mstar, ev.lo.a, lin, ev.lo.b, Dm, r)
        pieces.append(zr_reduce(scale * ZetaRat.mono(1, ln.const + ln.slope) * low))
        if ev.hi is None:
            continue
        z = ev.hi
        high = ZetaRat()
        for r in range(Dm):
            delta = 0 if (z.a * r + z.b).denominator == 1 else 1
            high = high + ZetaRat.mono(delta, delta * ln.slope) * floor_sum(Mstar, z.a, lin, z.b, Dm, r)
        pieces.append(zr_reduce(-(scale * ZetaRat.mono(0, ln.const) * high)))
    pieces = [x for x in pieces if not x.is_zero()]
    return pieces, Dm


# -- residue classes of W away from the leading roots ----------------------------

@dataclass
class _BallScan:
    tf: TransformedFamily
    p: int
    generic: ZetaRat = field(default_factory=ZetaRat)
    roots: list = field(default_factory=list)  # (theta, level)

    def part_val(self, j: int, vfun) -> int:
        pt = self.tf.parts[j]
        return vp(pt.c, self.p) + sum(e * vfun(al) for al, e in pt.factors)

    def settle(self, measure: PolyQT, vfun, exact: bool = True) -> None:
        """Add measure * (1-Q) * T^{v(f_0)} after checking that the other parts
        stay strictly larger for every m >= 1."""
        const = self.part_val(0, vfun)
        if const < 0:
            raise UnsupportedClass("leading part has negative valuation on a residue class")
        for j in range(1, len(self.tf.parts)):
            if self.tf.parts[j].gap + self.part_val(j, vfun) <= const:
                raise UnsupportedClass(
                    f"part {j} competes with the leading part away from its roots"
                )
        if not measure.is_zero():
            self.generic = self.generic + ZetaRat(measure * ONE_MINUS_Q * PolyQT.mono(0, const))

    def scan(self, w0, k: int, R: list[Fraction]) -> None:
        p = self.p
        groups: dict[int, list[Fraction]] = {}
        for al in R:
            groups.setdefault(residue(al, p, k + 1), []).append(al)
        n = len(groups)
        if k == 0:
            measure = ONE_MINUS_Q - PolyQT.mono(1, 0, n)

            def vfun(al):
                return min(vp(al, p), 0)
        else:
            measure = PolyQT.mono(k, 0) - PolyQT.mono(k + 1, 0, n)

            def vfun(al):
                return k if al in R else vp(w0 - al, p)
        self.settle(measure, vfun)
        lead = {al for al, _ in self.tf.parts[0].factors}
        for g in groups.values():
            if len(g) > 1:
                self.scan(g[0], k + 1, g)
            elif g[0] in lead:
                self.roots.append((g[0], k + 1))
            else:
                self.lone_root(g[0], k + 1)

    def lone_root(self, al: Fraction, k: int, depth: int = 0) -> None:
        """Ball of radius p^-k around a root of the higher parts only."""
        p = self.p
        if depth > 64:
            raise UnsupportedClass("higher part root needs too deep a refinement")

        def vball(beta):
            return k if beta == al else vp(al - beta, p)

        const = self.part_val(0, vball)
        if all(
            self.tf.parts[j].gap + self.part_val(j, vball) > const
            for j in range(1, len(self.tf.parts))
        ):
            self.settle(PolyQT.mono(k, 0), vball)
            return
        self.settle(PolyQT.mono(k, 0) - PolyQT.mono(k + 1, 0), vball)
        self.lone_root(al, k + 1, depth + 1)


@dataclass
class DegenerateRayResult:
    value: ZetaRat
    pieces: list[ZetaRat]  # each reduced on its own; they sum to value
    decisions: dict


def degenerate_ray_contribution(cone: Cone, dec: SQHDecomposition, p: int) -> DegenerateRayResult:
    """sum_{m >= 1} Q^{(a+b)m} T^{d0 m} I(s, f^{(m)}) for the ray through (a, b)."""
    a, b = dec.weight
    if cone.dim != 1 or cone.generators[0] != (a, b):
        raise ValueError("cone does not match the decomposition weight")
    tf = phi_transform(dec)
    d0 = tf.d0
    X = (a + b, d0)
    unit_roots = sorted({al for pt in tf.parts for al, _ in pt.factors if vp(al, p) == 0})
    scan = _BallScan(tf, p)
    scan.scan(Fraction(0), 0, unit_roots)
    pieces = [zr_reduce(scan.generic * geometric_sum(1, INF, X))]
    thetas = []
    for theta, level in sorted(scan.roots):
        exp = theta_expansion(tf, theta, p, level)
        spf = _Spf(exp.lines, p)
        Mstar = critical_m(exp.lines, exp.level)
        for m in range(1, Mstar):
            term = theta_term_numeric(exp, m, spf)
            pieces.append(zr_reduce(ZetaRat.mono(X[0] * m, X[1] * m) * term))
        tail, Dm = theta_term_tail(exp, Mstar, a + b, d0, spf)
        pieces.extend(tail)
        thetas.append({
            "theta": rat_str(theta),
            "level": exp.level,
            "l0": exp.l0,
            "M0": exp.M0,
            "Mstar": Mstar,
            "period": Dm,
            "lines": [[ln.gap, ln.const, ln.slope] for ln in exp.lines],
        })
    pieces = [x for x in pieces if not x.is_zero()]
    total = ZetaRat()
    for x in pieces:
        total = total + x
    decisions = {"weight": [a, b], "d0": d0, "companion": list(tf.companion), "thetas": thetas}
    return DegenerateRayResult(zr_reduce(total), pieces, decisions)


# -- assembly ------------------------------------------------------------------------

@dataclass
class ConeTerm:
    cone: Cone
    kind: str  # "lattice", "ray", "degenerate"
    value: ZetaRat
    pieces: list[ZetaRat] = field(default_factory=list)


@dataclass
class ZetaResult:
    p: int
    mode: str
    total: ZetaRat
    unit_part: ZetaRat
    per_cone: list[ConeTerm]
    candidate_set: set[Fraction]
    strict_set: set[Fraction]
    actual_pole_parts: set[Fraction]
    decisions: dict


def _degenerate_facets(f: Poly2, P: GeomPolygon, p: int) -> set[tuple[int, int]]:
    out = set()
    for fc in P.compact_facets:
        _, F = face_data(P, fc.normal)
        g = face_function(f, F)
        if singular_torus_points(reduce_mod(g, p)):
            out.add(fc.normal)
    return out


def assemble_zeta(f: Poly2, p: int, mode: str = "simple",
                  given: SQHDecomposition | None = None) -> ZetaResult:
    if (0, 0) in f.terms:
        raise UnsupportedClass("f(0,0) must vanish")
    if f.is_zero():
        raise UnsupportedClass("f is zero")
    P = geom_polygon(f.support())
    S: ConeSubdiv = conical_subdivision(P, mode)
    _check_vertex_units(f, P, p)
    unit = unit_torus_integral(f, p)
    degenerate = _degenerate_facets(f, P, p)
    data: ArithNewtonData = arith_newton_data(f, p, given)
    if degenerate:
        report = arith_nondegeneracy_check(
            ArithNewtonData(tuple(fa for fa in data.facets if fa.facet.normal in degenerate)), f, p
        )
        if not report["non_degenerate"]:
            raise ArithmeticallyDegenerate(report["reason"])
    decs = {fa.facet.normal: fa.decomposition for fa in data.facets}
    terms: list[ConeTerm] = []
    facet_decisions = []
    for cone in S.cones:
        if cone.dim == 2:
            terms.append(ConeTerm(cone, "lattice", cone_contribution_2d(cone, P)))
            continue
        a = cone.generators[0]
        if a in degenerate:
            res = degenerate_ray_contribution(cone, decs[a], p)
            terms.append(ConeTerm(cone, "degenerate", res.value, res.pieces))
            facet_decisions.append(res.decisions)
            continue
        try:
            terms.append(ConeTerm(cone, "ray", cone_contribution_ray_nondeg(cone, f, p)))
        except DegenerateFace as exc:
            raise UnsupportedClass(f"degenerate non-compact face along {a}") from exc
    total = unit.value
    for t in terms:
        total = total + t.value
    total = zr_reduce(total)
    geom_c = geom_candidate_poles(P)
    arith_c = data.candidate_poles()
    strict = {Fraction(-1)} | geom_c | arith_c
    rays = {
        Fraction(-sig, m) for c in S.cones if c.dim == 1 for sig, m in c.m_values if m
    }
    decisions = {
        "mode": mode,
        "torus_count": unit.torus_count,
        "degenerate_facets": [list(n) for n in sorted(degenerate)],
        "facets": facet_decisions,
    }
    return ZetaResult(
        p, mode, total, unit.value, terms, strict | rays, strict,
        real_pole_parts(total), decisions,
    )


def theorem_containment(r: ZetaResult) -> dict:
    extra = r.actual_pole_parts - r.candidate_set
    extra_strict = r.actual_pole_parts - r.strict_set
    return {
        "contained": not extra,
        "offending": sorted(extra),
        "contained_strict": not extra_strict,
        "offending_strict": sorted(extra_strict),
    }
