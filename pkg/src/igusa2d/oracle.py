"""Ground truth by counting solutions of f = 0 modulo p^m.

The counts N_m determine the Poincare series P(t) = sum N_m (p^-2 t)^m, and
P(t) = (1 - t Z(t)) / (1 - t) ties them to the zeta function with t = p^-s.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction

from .algebra import ZetaRat, zr_series
from .errors import NonIntegralPrediction, NonUnitDenominator
from .poly import Poly2


@dataclass(frozen=True)
class CountTable:
    p: int
    counts: tuple[int, ...]  # N_0 .. N_M, with N_0 = 1

    @property
    def M(self) -> int:
        return len(self.counts) - 1


def _int_terms(f: Poly2, p: int, m: int) -> list[tuple[int, int, int]]:
    mod = p**m
    out = []
    for (i, j), c in f.terms.items():
        if c.denominator % p == 0:
            raise NonUnitDenominator(f"coefficient {c} is not {p}-integral")
        out.append((i, j, c.numerator * pow(c.denominator, -1, mod) % mod))
    return out


def _ev(terms, x: int, y: int, mod: int) -> int:
    return sum(c * pow(x, i, mod) * pow(y, j, mod) for i, j, c in terms) % mod


def count_solutions(f: Poly2, p: int, m: int, naive: bool = False) -> int:
    """Number of (x, y) in (Z/p^m)^2 with f(x, y) = 0 mod p^m.

    The default walks the tree of residues: a solution mod p^k whose gradient
    is nonzero mod p has exactly p^(m-k) lifts that solve mod p^m, so only
    singular branches are refined level by level.
    """
    if m < 1:
        raise ValueError("m must be positive")
    mod = p**m
    terms = _int_terms(f, p, m)
    if naive:
        return sum(1 for x in range(mod) for y in range(mod) if _ev(terms, x, y, mod) == 0)
    gx = [(i - 1, j, c * i % mod) for i, j, c in terms if i]
    gy = [(i, j - 1, c * j % mod) for i, j, c in terms if j]
    total = 0
    level = [(x, y) for x in range(p) for y in range(p) if _ev(terms, x, y, p) == 0]
    k = 1
    while level:
        nxt = []
        for x, y in level:
            if k == m:
                total += 1
            elif _ev(gx, x, y, p) or _ev(gy, x, y, p):
                total += p ** (m - k)
            else:
                step = p**k
                mk = step * p
                for s in range(p):
                    for t in range(p):
                        X, Y = x + s * step, y + t * step
                        if _ev(terms, X, Y, mk) == 0:
                            nxt.append((X, Y))
        level = nxt
        k += 1
    return total


def count_table(f: Poly2, p: int, M: int, naive: bool = False) -> CountTable:
    return CountTable(p, (1,) + tuple(count_solutions(f, p, m, naive) for m in range(1, M + 1)))


def predicted_counts(z: ZetaRat, p: int, M: int) -> CountTable:
    """N_m = p^(2m) * [T^m] (1 - T z) / (1 - T)."""
    s = zr_series(z, p, M)
    out = [1]
    partial = Fraction(0)
    for m in range(1, M + 1):
        partial += s.coeffs[m - 1]
        val = (1 - partial) * p ** (2 * m)
        if val.denominator != 1:
            raise NonIntegralPrediction(f"predicted N_{m} = {val} is not an integer")
        out.append(int(val))
    return CountTable(p, tuple(out))


def verify(f: Poly2, p: int, M: int, z: ZetaRat) -> dict:
    """Predicted against counted N_m for m = 1..M."""
    rows = []
    first = None
    try:
        pred = predicted_counts(z, p, M).counts
        pred_error = None
    except NonIntegralPrediction as exc:
        pred, pred_error = None, str(exc)
    for m in range(1, M + 1):
        counted = count_solutions(f, p, m)
        predicted = pred[m] if pred else None
        ok = predicted == counted
        if not ok and first is None:
            first = m
        rows.append({"m": m, "predicted": predicted, "counted": counted, "match": ok})
    return {
        "p": p,
        "max_level": M,
        "rows": rows,
        "all_match": first is None,
        "first_mismatch": first,
        "prediction_error": pred_error,
    }


def table_to_json(t: CountTable) -> dict:
    return {"p": t.p, "counts": list(t.counts)}


def report_to_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "predicted", "counted", "match"])
    for r in report["rows"]:
        w.writerow([r["m"], r["predicted"], r["counted"], int(r["match"])])
    return buf.getvalue()
