"""Command dispatch shared by the CLI and the HTTP service.

Every command turns an input document into an output document plus an exit
status. Output documents carry the canonical hash of the input and the
engine's decisions so a run can be reproduced from its output alone.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .algebra import format_poly, rat_str, zr_latex, zr_to_json
from .arith import arith_newton_data, arith_nondegeneracy_check, arith_polygon_to_json, envelope_plot_data
from .engine import ZetaResult, assemble_zeta, theorem_containment
from .errors import ClassError, IgusaError, InputError, SchemaError
from .geom import (
    conical_subdivision,
    geom_candidate_poles,
    geom_polygon,
    kouch_check,
    polygon_plot_data,
    polygon_to_json,
    subdivision_to_json,
)
from .oracle import report_to_csv, verify
from .poly import Problem, SQHDecomposition, is_prime, parse_input

COMMANDS = ("geom", "arith", "check", "zeta", "poles", "verify")
MODES = ("minimal", "simple")
FORMATS = ("plain", "json", "latex")
MAX_LEVEL_ENV = "IGUSA2D_MAX_LEVEL"
DEFAULT_MAX_LEVEL_BOUND = 8

EXIT_OK, EXIT_INPUT, EXIT_CLASS, EXIT_MISMATCH = 0, 1, 2, 3


def max_level_bound() -> int:
    raw = os.environ.get(MAX_LEVEL_ENV)
    if raw is None:
        return DEFAULT_MAX_LEVEL_BOUND
    try:
        val = int(raw)
    except ValueError:
        raise SchemaError(f"{MAX_LEVEL_ENV}={raw!r} is not an integer") from None
    if val < 1:
        raise SchemaError(f"{MAX_LEVEL_ENV} must be positive")
    return val


@dataclass(frozen=True)
class RunConfig:
    command: str
    input_path: str | None = None
    prime: int | None = None
    mode: str = "simple"
    max_level: int = 4
    format: str = "plain"

    def validate(self) -> None:
        if self.command not in COMMANDS:
            raise SchemaError(f"unknown command {self.command!r}")
        if self.mode not in MODES:
            raise SchemaError(f"unknown mode {self.mode!r}")
        if self.format not in FORMATS:
            raise SchemaError(f"unknown format {self.format!r}")
        if self.prime is not None and not is_prime(self.prime):
            raise SchemaError(f"p = {self.prime} is not prime")
        bound = max_level_bound()
        if not 1 <= self.max_level <= bound:
            raise SchemaError(f"max_level must lie in 1..{bound}, got {self.max_level}")


@dataclass
class Outcome:
    status: int
    document: dict
    reason: str | None = None
    extras: dict = field(default_factory=dict)  # non-JSON renderings, e.g. csv


def canonical_hash(doc) -> str:
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=True)
    return "sha256:" + hashlib.sha256(blob.encode()).hexdigest()


def _rats(xs) -> list[str]:
    return [rat_str(x) for x in sorted(xs)]


def _sqh_json(d: SQHDecomposition) -> dict:
    return {
        "weight": list(d.weight),
        "parts": [
            {"c": rat_str(pt.c), "u": pt.u, "v": pt.v, "d": pt.d,
             "factors": [{"alpha": rat_str(al), "e": e} for al, e in pt.factors]}
            for pt in d.parts
        ],
    }


def _theta_list(data) -> list[dict]:
    return [
        {"normal": list(fa.facet.normal), "thetas": [rat_str(pl.theta.theta) for pl in fa.polygons]}
        for fa in data.facets
    ]


# -- command bodies --------------------------------------------------------------

def _geom(pr: Problem, p: int | None, cfg: RunConfig) -> Outcome:
    P = geom_polygon(pr.poly.support())
    S = conical_subdivision(P, cfg.mode)
    doc = {
        "polygon": polygon_to_json(P),
        "subdivision": subdivision_to_json(S),
        "candidate_poles": _rats(geom_candidate_poles(P)),
        "plot": polygon_plot_data(P),
    }
    return Outcome(EXIT_OK, doc)


def _arith(pr: Problem, p: int | None, cfg: RunConfig) -> Outcome:
    data = arith_newton_data(pr.poly, p, pr.sqh)
    facets = []
    for fa in data.facets:
        w = fa.decomposition.weight
        facets.append({
            "normal": list(fa.facet.normal),
            "decomposition": _sqh_json(fa.decomposition),
            "degenerate_leading_part": fa.degenerate,
            "polygons": [
                {**arith_polygon_to_json(pl, w), "plot": envelope_plot_data(pl)}
                for pl in fa.polygons
            ],
        })
    doc = {"facets": facets, "candidate_poles": _rats(data.candidate_poles())}
    return Outcome(EXIT_OK, doc)


def _need_prime(p: int | None) -> int:
    if p is None:
        raise SchemaError("a prime is required (input 'p' or --prime)")
    return p


def _check(pr: Problem, p: int | None, cfg: RunConfig) -> Outcome:
    p = _need_prime(p)
    data = arith_newton_data(pr.poly, p, pr.sqh)
    arith = arith_nondegeneracy_check(data, pr.poly, p)
    doc = {"kouchnirenko": kouch_check(pr.poly, p), "arithmetic": arith}
    if not arith["non_degenerate"]:
        return Outcome(EXIT_CLASS, doc, arith["reason"])
    return Outcome(EXIT_OK, doc)


def _zeta_doc(r: ZetaResult) -> dict:
    cones = []
    for t in r.per_cone:
        cones.append({
            "generators": [list(g) for g in t.cone.generators],
            "kind": t.kind,
            "value": zr_to_json(t.value),
            "pieces": [zr_to_json(x) for x in t.pieces],
        })
    return {
        "total": zr_to_json(r.total),
        "unit_part": zr_to_json(r.unit_part),
        "cones": cones,
        "poles": _poles_doc(r),
    }


def _poles_doc(r: ZetaResult) -> dict:
    return {
        "candidate": _rats(r.candidate_set),
        "strict_candidate": _rats(r.strict_set),
        "actual": _rats(r.actual_pole_parts),
        "containment": {
            k: (_rats(v) if isinstance(v, list) else v)
            for k, v in theorem_containment(r).items()
        },
    }


def _zeta(pr: Problem, p: int | None, cfg: RunConfig) -> tuple[Outcome, ZetaResult]:
    r = assemble_zeta(pr.poly, _need_prime(p), cfg.mode, pr.sqh)
    return Outcome(EXIT_OK, _zeta_doc(r)), r


def _verify(pr: Problem, p: int | None, cfg: RunConfig) -> tuple[Outcome, ZetaResult]:
    r = assemble_zeta(pr.poly, _need_prime(p), cfg.mode, pr.sqh)
    rep = verify(pr.poly, r.p, cfg.max_level, r.total)
    out = Outcome(EXIT_OK, {"report": rep}, extras={"csv": report_to_csv(rep)})
    if not rep["all_match"]:
        out.status = EXIT_MISMATCH
        if rep["prediction_error"]:
            out.reason = rep["prediction_error"]
        else:
            out.reason = f"count mismatch at m={rep['first_mismatch']}"
    return out, r


def run_problem(command: str, pr: Problem, cfg: RunConfig, raw_doc) -> Outcome:
    """Run one command on a parsed problem; class and input errors become outcomes."""
    p = cfg.prime if cfg.prime is not None else pr.p
    head = {"command": command, "input_hash": canonical_hash(raw_doc), "p": p}
    decisions: dict = {"mode": cfg.mode}
    try:
        if command == "geom":
            out = _geom(pr, p, cfg)
        elif command == "arith":
            out = _arith(pr, p, cfg)
            decisions["thetas"] = _theta_list(arith_newton_data(pr.poly, p, pr.sqh))
        elif command == "check":
            out = _check(pr, p, cfg)
        else:
            if command == "zeta":
                out, r = _zeta(pr, p, cfg)
            elif command == "verify":
                out, r = _verify(pr, p, cfg)
            else:
                r = assemble_zeta(pr.poly, _need_prime(p), cfg.mode, pr.sqh)
                out = Outcome(EXIT_OK, _poles_doc(r))
            decisions.update(r.decisions)
    except InputError as exc:
        out = Outcome(EXIT_INPUT, {"error": type(exc).__name__}, str(exc))
    except (ClassError, IgusaError) as exc:
        out = Outcome(EXIT_CLASS, {"error": type(exc).__name__}, str(exc))
    out.document = {**head, "decisions": decisions, "status": out.status,
                    "reason": out.reason, "result": out.document}
    return out


def run_document(command: str, raw_doc, cfg: RunConfig) -> Outcome:
    try:
        cfg.validate()
        pr = parse_input(raw_doc)
    except InputError as exc:
        doc = {"command": command, "status": EXIT_INPUT, "reason": str(exc),
               "result": {"error": type(exc).__name__}}
        return Outcome(EXIT_INPUT, doc, str(exc))
    return run_problem(command, pr, cfg, raw_doc)


def load_input(path: str | None) -> object:
    if path is None:
        raise SchemaError("--input is required")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc.strerror}") from None
    from .errors import InputSyntaxError

    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputSyntaxError(f"invalid JSON: {exc.msg} at line {exc.lineno}") from None


def run(cfg: RunConfig) -> Outcome:
    try:
        raw = load_input(cfg.input_path)
    except InputError as exc:
        doc = {"command": cfg.command, "status": EXIT_INPUT, "reason": str(exc),
               "result": {"error": type(exc).__name__}}
        return Outcome(EXIT_INPUT, doc, str(exc))
    return run_document(cfg.command, raw, cfg)


# -- rendering -------------------------------------------------------------------

def render(out: Outcome, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(out.document, sort_keys=True, indent=2) + "\n"
    if fmt == "latex":
        return _render_latex(out.document)
    return _render_plain(out)


def _zr_plain(doc: dict) -> str:
    from .algebra import zr_from_json

    z = zr_from_json(doc)
    num = format_poly(z.num)
    if not z.den:
        return num
    den = "".join(f"(1-Q^{a}T^{b})" for a, b in sorted(z.den))
    return f"({num}) / {den}"


def _render_plain(out: Outcome) -> str:
    d = out.document
    res = d.get("result", {})
    lines = [f"command: {d.get('command')}", f"input: {d.get('input_hash', '-')}"]
    if d.get("p") is not None:
        lines.append(f"p: {d['p']}")
    if out.reason:
        lines.append(f"reason: {out.reason}")
    cmd = d.get("command")
    if "error" in res:
        lines.append(f"error: {res['error']}")
    elif cmd == "geom":
        lines.append("vertices: " + " ".join(f"({i},{j})" for i, j in res["polygon"]["vertices"]))
        for fc in res["polygon"]["facets"]:
            lines.append(f"facet normal ({fc['normal'][0]},{fc['normal'][1]}) d={fc['d']}")
        for c in res["subdivision"]["cones"]:
            gens = " ".join(f"({a},{b})" for a, b in c["generators"])
            lines.append(f"cone {gens} det={c['det']} face={c['face']['kind']}")
        lines.append("P(geom): " + ", ".join(res["candidate_poles"]))
    elif cmd == "arith":
        for fc in res["facets"]:
            lines.append(f"facet ({fc['normal'][0]},{fc['normal'][1]})")
            for pl in fc["polygons"]:
                segs = " ".join(f"({s['D']},{s['E']})" for s in pl["segments"])
                lines.append(f"  theta={pl['theta']} segments {segs} taus {', '.join(pl['taus']) or '-'}")
        lines.append("P(arith): " + ", ".join(res["candidate_poles"]))
    elif cmd == "check":
        lines.append(f"kouchnirenko non-degenerate: {res['kouchnirenko']['non_degenerate']}")
        lines.append(f"arithmetically non-degenerate: {res['arithmetic']['non_degenerate']}")
        lines.append(f"origin singular: {res['arithmetic']['origin_singular']}")
    elif cmd == "zeta":
        lines.append("Z = " + _zr_plain(res["total"]))
        for c in res["cones"]:
            gens = " ".join(f"({a},{b})" for a, b in c["generators"])
            lines.append(f"  [{c['kind']}] {gens}: {_zr_plain(c['value'])}")
        lines += _poles_plain(res["poles"])
    elif cmd == "poles":
        lines += _poles_plain(res)
    elif cmd == "verify":
        lines.append(out.extras.get("csv", "").rstrip())
        lines.append("all match" if res["report"]["all_match"] else
                     f"first mismatch at m={res['report']['first_mismatch']}")
    return "\n".join(lines) + "\n"


def _poles_plain(doc: dict) -> list[str]:
    return [
        "candidate poles: " + ", ".join(doc["candidate"]),
        "actual poles: " + ", ".join(doc["actual"]),
        f"contained: {doc['containment']['contained']}",
    ]


def _latex_rat(s: str) -> str:
    x = Fraction(s)
    if x.denominator == 1:
        return str(x.numerator)
    sign = "-" if x < 0 else ""
    return f"{sign}\\frac{{{abs(x.numerator)}}}{{{x.denominator}}}"


def _latex_set(xs: list[str]) -> str:
    return "\\{" + ", ".join(_latex_rat(x) for x in xs) + "\\}"


def _render_latex(d: dict) -> str:
    from .algebra import zr_from_json

    res = d.get("result", {})
    cmd = d.get("command")
    lines = [f"% {cmd} {d.get('input_hash', '')}"]
    if "error" in res:
        lines.append(f"% error {res['error']}: {d.get('reason')}")
        return "\n".join(lines) + "\n"
    if cmd == "zeta":
        terms = []
        for c in res["cones"]:
            for piece in (c["pieces"] or [c["value"]]):
                z = zr_from_json(piece)
                if not z.is_zero():
                    terms.append(zr_latex(z))
        lines.append("Z(s,f) = " + zr_latex(zr_from_json(res["unit_part"])) + "".join(
            f"\n  + {t}" for t in terms))
        lines.append("Z(s,f) = " + zr_latex(zr_from_json(res["total"])))
        lines.append("\\mathrm{poles} = " + _latex_set(res["poles"]["candidate"]))
        lines.append("\\mathrm{actual} = " + _latex_set(res["poles"]["actual"]))
    elif cmd == "poles":
        lines.append("\\mathrm{poles} = " + _latex_set(res["candidate"]))
        lines.append("\\mathrm{actual} = " + _latex_set(res["actual"]))
    elif cmd in ("geom", "arith"):
        lines.append("P = " + _latex_set(res["candidate_poles"]))
    elif cmd == "check":
        lines.append(f"% non-degenerate: {res['arithmetic']['non_degenerate']}")
    elif cmd == "verify":
        lines.append("\\begin{tabular}{rrrc}")
        lines.append("m & predicted & counted & match \\\\")
        for row in res["report"]["rows"]:
            lines.append(f"{row['m']} & {row['predicted']} & {row['counted']} & {int(row['match'])} \\\\")
        lines.append("\\end{tabular}")
    return "\n".join(lines) + "\n"
