"""Newton polygons in the plane and conical subdivisions of the first quadrant."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .poly import Poly2, reduce_mod, singular_torus_points

Point = tuple[int, int]


def det(u: Point, w: Point) -> int:
    return u[0] * w[1] - u[1] * w[0]


def dot(a: Point, x: Point) -> int:
    return a[0] * x[0] + a[1] * x[1]


def primitive(v: Point) -> Point:
    g = math.gcd(*v)
    return (v[0] // g, v[1] // g)


@dataclass(frozen=True)
class Facet:
    normal: Point
    d: int
    endpoints: tuple[Point, ...]  # one endpoint for the unbounded axis facets
    compact: bool


@dataclass(frozen=True)
class Face:
    kind: str  # "vertex" or "facet"
    points: frozenset[Point]
    normal: Point | None = None


@dataclass(frozen=True)
class GeomPolygon:
    support: frozenset[Point]
    vertices: tuple[Point, ...]  # from the steep end (min i) to min j
    facets: tuple[Facet, ...]  # ordered by a1/a2 ascending: (0,1) first, (1,0) last

    @property
    def compact_facets(self) -> tuple[Facet, ...]:
        return tuple(f for f in self.facets if f.compact)


def _cross(o: Point, a: Point, b: Point) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def geom_polygon(support: Iterable[Point]) -> GeomPolygon:
    pts = sorted(set(map(tuple, support)))
    if not pts:
        raise ValueError("empty support")
    if (0, 0) in pts:
        raise ValueError("support contains the origin")
    jmin = min(j for _, j in pts)
    end = min(p for p in pts if p[1] == jmin)
    chain: list[Point] = []
    for p in pts:
        if p[0] > end[0]:
            break
        if chain and p[1] >= chain[-1][1]:
            continue  # inside chain[-1] + first quadrant
        # keep only strictly convex lower-left turns
        while len(chain) >= 2 and _cross(chain[-2], chain[-1], p) <= 0:
            chain.pop()
        chain.append(p)
    vertices = tuple(chain)
    facets = [Facet((0, 1), vertices[-1][1], (vertices[-1],), False)]
    for v1, v2 in reversed(list(zip(vertices, vertices[1:]))):
        n = primitive((v1[1] - v2[1], v2[0] - v1[0]))
        facets.append(Facet(n, dot(n, v1), (v1, v2), True))
    facets.append(Facet((1, 0), vertices[0][0], (vertices[0],), False))
    return GeomPolygon(frozenset(pts), vertices, tuple(facets))


def face_data(P: GeomPolygon, a: Point) -> tuple[int, Face]:
    if a[0] < 0 or a[1] < 0 or a == (0, 0):
        raise ValueError("weight vector must be nonzero with non-negative entries")
    m = min(dot(a, x) for x in P.support)
    on = frozenset(x for x in P.support if dot(a, x) == m)
    if len(on) == 1:
        return m, Face("vertex", on)
    return m, Face("facet", on, primitive(a))


def face_function(f: Poly2, F: Face) -> Poly2:
    return f.restrict(F.points)


@dataclass(frozen=True)
class Cone:
    generators: tuple[Point, ...]
    face: Face
    m_values: tuple[tuple[int, int], ...]  # (sigma, m) per generator

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def det(self) -> int:
        if self.dim == 1:
            return 1
        return det(*self.generators)


@dataclass(frozen=True)
class ConeSubdiv:
    mode: str
    cones: tuple[Cone, ...]

    @property
    def rays(self) -> tuple[Point, ...]:
        return tuple(c.generators[0] for c in self.cones if c.dim == 1)


def _hj_insert(u: Point, w: Point) -> list[Point]:
    """Primitive vectors strictly between u and w making every step unimodular.

    Requires det(u, w) > 0. Each new vector v satisfies det(u, v) = 1 and is
    the closest such vector to u that stays inside the cone.
    """
    out = []
    while det(u, w) > 1:
        n = det(u, w)
        # solve det(u, v0) = 1 with the extended Euclidean algorithm
        g, s, t = _ext_gcd(u[0], u[1])
        assert g == 1
        v0 = (-t, s)  # u0*s + u1*t = 1  =>  det(u, (-t, s)) = 1
        # shift by multiples of u until det(v, w) >= 0 with the least shift
        k = math.ceil(Fraction(-det(v0, w), n))
        v = (v0[0] + k * u[0], v0[1] + k * u[1])
        out.append(v)
        u = v
    return out


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


def _cone(P: GeomPolygon, gens: tuple[Point, ...]) -> Cone:
    inner = (sum(g[0] for g in gens), sum(g[1] for g in gens))
    _, F = face_data(P, inner)
    mv = tuple((g[0] + g[1], face_data(P, g)[0]) for g in gens)
    return Cone(gens, F, mv)


def conical_subdivision(P: GeomPolygon, mode: str = "minimal") -> ConeSubdiv:
    if mode not in ("minimal", "simple"):
        raise ValueError(f"unknown mode {mode!r}")
    normals = [f.normal for f in P.facets]
    rays: list[Point] = [normals[0]]
    for u, w in zip(normals, normals[1:]):
        if mode == "simple":
            # walk from w towards u so that det > 0 in the helper
            rays.extend(reversed(_hj_insert(w, u)))
        rays.append(w)
    cones = []
    for i, r in enumerate(rays):
        cones.append(_cone(P, (r,)))
        if i + 1 < len(rays):
            cones.append(_cone(P, (r, rays[i + 1])))
    return ConeSubdiv(mode, tuple(cones))


def parallelepiped_points(u: Point, w: Point) -> list[Point]:
    """Lattice points l1*u + l2*w with l1, l2 in (0, 1]."""
    n = abs(det(u, w))
    xs = [0, u[0], w[0], u[0] + w[0]]
    ys = [0, u[1], w[1], u[1] + w[1]]
    out = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            # Cramer's rule: (x, y) = l1 u + l2 w
            l1 = Fraction(det((x, y), w), det(u, w))
            l2 = Fraction(det(u, (x, y)), det(u, w))
            if 0 < l1 <= 1 and 0 < l2 <= 1:
                out.append((x, y))
    assert len(out) == n
    return sorted(out)


def in_cone(k: Point, cone: Cone) -> bool:
    if cone.dim == 1:
        g = cone.generators[0]
        return det(g, k) == 0 and dot(g, k) > 0
    u, w = cone.generators
    l1 = Fraction(det(k, w), det(u, w))
    l2 = Fraction(det(u, k), det(u, w))
    return l1 > 0 and l2 > 0


def kouch_check(f: Poly2, p: int) -> dict:
    """Singular torus points of every reduced face function, plus f itself."""
    P = geom_polygon(f.support())
    faces = []
    for v in P.vertices:
        faces.append(("vertex", list(v), Face("vertex", frozenset([v]))))
    for fc in P.facets:
        _, F = face_data(P, fc.normal)
        faces.append(("facet", list(fc.normal), F))
    report = []
    ok = True
    for kind, label, F in faces:
        g = reduce_mod(face_function(f, F), p)
        sing = sorted(singular_torus_points(g))
        ok &= not sing
        report.append({"kind": kind, "label": label, "singular_points": [list(s) for s in sing]})
    whole = sorted(singular_torus_points(reduce_mod(f, p)))
    ok &= not whole
    report.append({"kind": "polynomial", "label": None, "singular_points": [list(s) for s in whole]})
    return {"non_degenerate": ok, "faces": report}


def geom_candidate_poles(P: GeomPolygon) -> set[Fraction]:
    return {
        Fraction(-(f.normal[0] + f.normal[1]), f.d)
        for f in P.compact_facets if f.d != 0
    }


def polygon_to_json(P: GeomPolygon) -> dict:
    return {
        "vertices": [list(v) for v in P.vertices],
        "facets": [
            {"normal": list(f.normal), "d": f.d, "compact": f.compact,
             "endpoints": [list(e) for e in f.endpoints]}
            for f in P.facets
        ],
    }


def subdivision_to_json(S: ConeSubdiv) -> dict:
    return {
        "mode": S.mode,
        "cones": [
            {"generators": [list(g) for g in c.generators], "det": c.det,
             "face": {"kind": c.face.kind, "points": sorted(list(x) for x in c.face.points)},
             "m_values": [list(m) for m in c.m_values]}
            for c in S.cones
        ],
    }


def polygon_plot_data(P: GeomPolygon, margin: int = 2) -> list[list[list[int]]]:
    """Boundary segments; the two unbounded edges are clipped at ``margin``
    beyond the extreme vertices."""
    first, last = P.vertices[0], P.vertices[-1]
    top = max(first[1], last[1]) + margin
    right = max(first[0], last[0]) + margin
    segs = [[list(first), [first[0], top]]]
    segs += [[list(a), list(b)] for a, b in zip(P.vertices, P.vertices[1:])]
    segs.append([list(last), [right, last[1]]])
    return segs
