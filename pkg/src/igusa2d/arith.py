"""Arithmetic Newton polygons of semi-quasihomogeneous polynomials.

For a root theta of the leading part f_0 and each part f_j the line

    w_j(z) = (d_j - d_0) + e_{j,theta} * z

is formed, with e_{j,theta} the multiplicity of (y^a - theta x^b) in f_j. The
polygon is the region below the lower envelope of these lines on z >= 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .algebra import rat_str, vp
from .geom import Facet, geom_polygon
from .poly import (
    Poly2,
    SQHDecomposition,
    origin_is_singular,
    reduce_mod,
    singular_torus_points,
    sqh_decompose,
)


@dataclass(frozen=True)
class ThetaRoot:
    theta: Fraction
    e0: int
    excluded: bool = False  # negative p-adic valuation


@dataclass(frozen=True)
class EnvelopeLine:
    intercept: int
    slope: int
    part_index: int

    def at(self, z) -> Fraction:
        return self.intercept + self.slope * Fraction(z)


@dataclass(frozen=True)
class ArithPolygon:
    theta: ThetaRoot
    lines: tuple[EnvelopeLine, ...]
    segments: tuple[tuple[int, int], ...]  # (D_k, E_k), k = 1..r+1
    taus: tuple[Fraction, ...]  # tau_1 < ... < tau_r
    vertex_parts: tuple[frozenset[int], ...]  # parts attaining the envelope at tau_k
    d0: int

    @property
    def r(self) -> int:
        return len(self.taus)

    def envelope(self, z) -> Fraction:
        return min(ln.at(z) for ln in self.lines)

    def vertices(self) -> list[tuple[Fraction, Fraction]]:
        return [(t, self.envelope(t)) for t in self.taus]


def theta_roots(d: SQHDecomposition, p: int | None = None) -> list[ThetaRoot]:
    out = []
    for alpha, e in d.parts[0].factors:
        excluded = p is not None and vp(alpha, p) < 0
        out.append(ThetaRoot(alpha, e, excluded))
    return out


def arith_polygon(d: SQHDecomposition, theta: ThetaRoot) -> ArithPolygon:
    d0 = d.d0
    lines = tuple(
        EnvelopeLine(pt.d - d0, pt.multiplicity(theta.theta), j)
        for j, pt in enumerate(d.parts)
    )
    cur = lines[0]
    z = Fraction(0)
    segments = [(d0 + cur.intercept, cur.slope)]
    taus: list[Fraction] = []
    while True:
        best = None
        for ln in lines:
            if ln.slope >= cur.slope:
                continue
            zc = Fraction(ln.intercept - cur.intercept, cur.slope - ln.slope)
            if zc < z:
                continue
            key = (zc, ln.slope)
            if best is None or key < best[0]:
                best = (key, ln)
        if best is None:
            break
        (zc, _), ln = best
        taus.append(zc)
        segments.append((d0 + ln.intercept, ln.slope))
        cur, z = ln, zc
    vparts = []
    for t in taus:
        val = min(ln.at(t) for ln in lines)
        vparts.append(frozenset(ln.part_index for ln in lines if ln.at(t) == val))
    return ArithPolygon(theta, lines, tuple(segments), tuple(taus), tuple(vparts), d0)


def vertex_face_function(d: SQHDecomposition, poly: ArithPolygon, k: int) -> Poly2:
    if not 1 <= k <= poly.r:
        raise ValueError(f"vertex index {k} outside 1..{poly.r}")
    acc = Poly2()
    for j in sorted(poly.vertex_parts[k - 1]):
        acc = acc + d.parts[j].expand(d.weight)
    return acc


def arith_candidate_poles(poly: ArithPolygon, weight: tuple[int, int]) -> set[Fraction]:
    a, b = weight
    out: set[Fraction] = set()
    for i, tau in enumerate(poly.taus):
        D, E = poly.segments[i]
        if E:
            out.add(Fraction(-1, E))
        out.add(-(a + b + tau) / (D + E * tau))
    E_last = poly.segments[-1][1]
    if E_last:
        out.add(Fraction(-1, E_last))
    return out


@dataclass(frozen=True)
class FacetArith:
    facet: Facet
    decomposition: SQHDecomposition
    degenerate: bool  # a repeated factor in the leading part
    polygons: tuple[ArithPolygon, ...]


@dataclass(frozen=True)
class ArithNewtonData:
    facets: tuple[FacetArith, ...]

    def candidate_poles(self) -> set[Fraction]:
        out: set[Fraction] = set()
        for fa in self.facets:
            if fa.degenerate:
                for poly in fa.polygons:
                    out |= arith_candidate_poles(poly, fa.decomposition.weight)
        return out


def facet_decomposition(f: Poly2, facet: Facet, given: SQHDecomposition | None = None) -> SQHDecomposition:
    if given is not None and given.weight == facet.normal:
        return given
    return sqh_decompose(f, facet.normal)


def arith_newton_data(f: Poly2, p: int | None = None,
                      given: SQHDecomposition | None = None) -> ArithNewtonData:
    P = geom_polygon(f.support())
    out = []
    for fc in P.compact_facets:
        dec = facet_decomposition(f, fc, given)
        roots = theta_roots(dec, p)
        polys = tuple(arith_polygon(dec, th) for th in roots if not th.excluded)
        degenerate = any(e > 1 for _, e in dec.parts[0].factors)
        out.append(FacetArith(fc, dec, degenerate, polys))
    return ArithNewtonData(tuple(out))


def _fmt_point(z: Fraction, w: Fraction) -> str:
    return f"({rat_str(z)},{rat_str(w)})"


def arith_nondegeneracy_check(data: ArithNewtonData, f: Poly2, p: int) -> dict:
    """Singularity checks at the residue-field level.

    The verdict covers the reduced polynomial and every vertex face function
    of every arithmetic polygon; whether the origin is singular is reported
    separately as class membership.
    """
    whole = sorted(singular_torus_points(reduce_mod(f, p)))
    facets = []
    reason = None
    if whole:
        reason = f"reduction has singular torus point {tuple(whole[0])}"
    for fa in data.facets:
        per_theta = []
        for poly in fa.polygons:
            verts = []
            for k in range(1, poly.r + 1):
                g = vertex_face_function(fa.decomposition, poly, k)
                sing = sorted(singular_torus_points(reduce_mod(g, p)))
                z, w = poly.vertices()[k - 1]
                verts.append({
                    "vertex": [rat_str(z), rat_str(w)],
                    "parts": sorted(poly.vertex_parts[k - 1]),
                    "singular_points": [list(s) for s in sing],
                })
                if sing and reason is None:
                    reason = f"arithmetically degenerate at vertex {_fmt_point(z, w)}"
            per_theta.append({"theta": rat_str(poly.theta.theta), "vertices": verts})
        facets.append({
            "normal": list(fa.facet.normal),
            "degenerate_leading_part": fa.degenerate,
            "thetas": per_theta,
        })
    return {
        "origin_singular": origin_is_singular(f),
        "reduction_singular_points": [list(s) for s in whole],
        "torus_condition": "checked at reduction level",
        "facets": facets,
        "non_degenerate": reason is None,
        "reason": reason,
    }


def arith_polygon_to_json(poly: ArithPolygon, weight: tuple[int, int]) -> dict:
    return {
        "theta": rat_str(poly.theta.theta),
        "e0": poly.theta.e0,
        "lines": [
            {"part": ln.part_index, "intercept": ln.intercept, "slope": ln.slope}
            for ln in poly.lines
        ],
        "segments": [{"D": D, "E": E} for D, E in poly.segments],
        "taus": [rat_str(t) for t in poly.taus],
        "vertices": [[rat_str(z), rat_str(w)] for z, w in poly.vertices()],
        "vertex_parts": [sorted(s) for s in poly.vertex_parts],
        "candidate_poles": sorted(rat_str(x) for x in arith_candidate_poles(poly, weight)),
    }


def envelope_plot_data(poly: ArithPolygon, tail: Fraction = Fraction(2)) -> list[list[str]]:
    zs = [Fraction(0), *poly.taus, (poly.taus[-1] if poly.taus else Fraction(0)) + tail]
    return [[rat_str(z), rat_str(poly.envelope(z))] for z in zs]
