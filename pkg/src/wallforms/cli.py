"""Batch front end: parse form files, dispatch computations, emit reports.

Every command reads one JSON input document, runs exactly, and prints a
deterministic report (seeded randomness only).  Exit status is 0 on
success, 1 on validation or parse failure, 2 when a search budget was
exhausted before the result was exact.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import schema
from .complexes import build_complex, connectivity_report, enumerate_vertices, homology, lcm_report
from .errors import AxiomViolation, ParseError, PreservationViolation, WallFormError
from .forms import (
    RankBudget,
    perp_sum_with_inclusions,
    rank_certificate,
    sample_axioms,
    stable_rank_certificate,
    standard_form,
    sub_wall_form,
    orthogonal_complement,
)
from .intlinalg import FgAbGroup
from .lemmas import cancel_standard, kernel_rank_witness, transitivity_witness

COMMANDS = (
    "validate", "rank", "stable-rank", "complement", "complex", "homology",
    "lcm", "connectivity", "transitivity", "kernel-witness", "cancel",
    "standard-form",
)


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: tuple
    bound: int = 1
    j_max: int = 2
    max_degree: int = 2
    budget: int = 200_000
    format: str = "json"
    seed: int = 0
    emit: str | None = None
    threads: int = 1

    def __post_init__(self):
        if self.budget <= 0:
            raise ParseError("budget must be positive")
        if self.format not in ("json", "table"):
            raise ParseError("format must be json or table")


def _load_document(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise ParseError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", f"{path}:{exc.lineno}")


def _load_form(path):
    doc = _load_document(path)
    return doc, schema.form_from_json(doc)


def _budget(cfg):
    return RankBudget(coeff_bound=cfg.bound, max_nodes=cfg.budget)


def _witness_doc(m):
    return schema.morphism_to_json(m)


def _cmd_validate(cfg):
    try:
        _, form = _load_form(cfg.input[0])
    except AxiomViolation as exc:
        return 1, {"command": "validate", "status": "fail",
                   "violation": {"axiom": exc.axiom, "witness": str(exc.witness)}}
    failures = sample_axioms(form, samples=200, seed=cfg.seed)
    if failures:
        return 1, {"command": "validate", "status": "fail",
                   "sampled_failures": failures[:5]}
    return 0, {"command": "validate", "status": "pass",
               "axioms": "i-vi pass", "sampled_checks": 200, "seed": cfg.seed,
               "minus": list(form.pair.minus.factors),
               "plus": list(form.pair.plus.factors)}


def _cmd_rank(cfg):
    _, form = _load_form(cfg.input[0])
    cert = rank_certificate(form, _budget(cfg))
    report = {"command": "rank", "k": cert.k, "upper": cert.upper,
              "status": "EXACT" if cert.exact else "LOWER-BOUND",
              "exhausted": cert.exhausted, "nodes": cert.nodes_used,
              "witness": _witness_doc(cert.witness)}
    return (2 if cert.exhausted and not cert.exact else 0), report


def _cmd_stable_rank(cfg):
    _, form = _load_form(cfg.input[0])
    cert = stable_rank_certificate(form, j_max=cfg.j_max, budget=_budget(cfg))
    report = {"command": "stable-rank", "k": cert.k, "j_used": cert.j_used,
              "j_max": cfg.j_max, "exhausted": cert.exhausted,
              "witness": _witness_doc(cert.witness)}
    return (2 if cert.exhausted else 0), report


def _cmd_complement(cfg):
    doc, form = _load_form(cfg.input[0])
    if "subform" in doc:
        sdoc = doc["subform"]
        minus = [form.pair.minus.element(c) for c in sdoc.get("minus_gens", [])]
        plus = [form.pair.plus.element(c) for c in sdoc.get("plus_gens", [])]
        sub = sub_wall_form(form, minus, plus)
    elif "morphism" in doc:
        mor = schema.standard_morphism_from_json(doc["morphism"], form)
        sub = mor.image_subform()
    else:
        raise ParseError("complement needs a 'subform' or 'morphism' section")
    comp = orthogonal_complement(form, sub)
    return 0, {"command": "complement",
               "minus_gens": [list(g.coords) for g in comp.minus_gens],
               "plus_gens": [list(g.coords) for g in comp.plus_gens]}


def _build(cfg, form):
    verts = enumerate_vertices(form, cfg.bound)
    return build_complex(verts, form, max_dim=cfg.max_degree + 1,
                         threads=cfg.threads)


def _cmd_complex(cfg):
    _, form = _load_form(cfg.input[0])
    x = _build(cfg, form)
    return 0, {"command": "complex", "bound": cfg.bound,
               "vertex_count": x.n, "edge_count": x.edge_count(),
               "complex": schema.complex_to_json(x),
               "edges_text": schema.edge_list_text(x)}


def _cmd_homology(cfg):
    _, form = _load_form(cfg.input[0])
    x = _build(cfg, form)
    if x.n == 0:
        return 0, {"command": "homology", "bound": cfg.bound, "vertex_count": 0,
                   "betti": [], "torsion": []}
    rep = homology(x, cfg.max_degree)
    return 0, {"command": "homology", "bound": cfg.bound,
               "vertex_count": x.n, "edge_count": x.edge_count(),
               "betti": list(rep.betti),
               "torsion": [list(t) for t in rep.torsion],
               "simplex_counts": list(rep.simplex_counts)}


def _cmd_lcm(cfg):
    _, form = _load_form(cfg.input[0])
    x = _build(cfg, form)
    rep = lcm_report(x, cfg.max_degree)
    entries = [{"level": e.level,
                "simplex": list(e.simplex) if e.simplex is not None else None,
                "required": e.required,
                "betti": list(e.betti) if e.betti is not None else None,
                "pass": e.passed, "note": e.note}
               for e in rep.entries]
    return 0, {"command": "lcm", "n": rep.n, "label": rep.label,
               "bound": cfg.bound,
               "weakly_cm_pass": rep.weakly_cm_pass,
               "locally_cm_pass": rep.locally_cm_pass,
               "auto_passed_levels": list(rep.auto_passed_levels),
               "entries": entries}


def _cmd_connectivity(cfg):
    _, form = _load_form(cfg.input[0])
    cert = rank_certificate(form, _budget(cfg))
    d = len(form.pair.H.factors)
    rep = connectivity_report(form, cert.k, d, bound=cfg.bound,
                              max_degree=cfg.max_degree)
    return 0, {"command": "connectivity", "label": rep.label,
               "bound": rep.bound, "g": rep.g, "d": rep.d,
               "rank_status": "EXACT" if cert.exact else "LOWER-BOUND",
               "vertex_count": rep.vertex_count, "edge_count": rep.edge_count,
               "nonempty": rep.nonempty,
               "nonempty_threshold": rep.nonempty_threshold,
               "connected_threshold": rep.connected_threshold,
               "target_degree": rep.target_degree,
               "betti": list(rep.betti) if rep.betti is not None else None,
               "torsion": [list(t) for t in rep.torsion] if rep.torsion else None}


def _cmd_transitivity(cfg):
    doc, form = _load_form(cfg.input[0])
    if "f1" not in doc or "f2" not in doc:
        raise ParseError("transitivity needs 'f1' and 'f2' morphism sections")
    f1 = schema.standard_morphism_from_json(doc["f1"], form, path="f1", rank=1)
    f2 = schema.standard_morphism_from_json(doc["f2"], form, path="f2", rank=1)
    phi = transitivity_witness(f1, f2)
    return 0, {"command": "transitivity", "witness": _witness_doc(phi),
               "bijective": phi.is_bijective(),
               "identity_checked": True}


def _cmd_kernel_witness(cfg):
    doc, form = _load_form(cfg.input[0])
    if "hom" not in doc:
        raise ParseError("kernel-witness needs a 'hom' section")
    phi = schema.hmap_to_probe_from_json(doc["hom"], form)
    cert = rank_certificate(form, _budget(cfg))
    wit = kernel_rank_witness(cert.witness, phi)
    code = 2 if cert.exhausted and not cert.exact else 0
    return code, {"command": "kernel-witness", "nu": doc["hom"]["nu"],
                  "rank_used": cert.k,
                  "witness_rank": wit.source.layout.g,
                  "witness": _witness_doc(wit)}


def _cmd_cancel(cfg):
    doc, form = _load_form(cfg.input[0])
    if "left" not in doc or "iso" not in doc:
        raise ParseError("cancel needs 'left' (form) and 'iso' (morphism) sections")
    left = schema.form_from_json(doc["left"], path="left")
    ps = perp_sum_with_inclusions(left, standard_form(1, left.param))
    iso = schema.morphism_from_json(doc["iso"], ps.form, form, path="iso")
    out = cancel_standard(iso, left)
    return 0, {"command": "cancel", "result": _witness_doc(out),
               "target_rank": out.target.layout.g}


def _parse_h_spec(spec):
    if not spec:
        return FgAbGroup(())
    try:
        return FgAbGroup(tuple(int(x) for x in spec.split(",")))
    except Exception:
        raise ParseError(f"bad invariant factor list {spec!r}", "parameter")


def _cmd_standard_form(cfg):
    if len(cfg.input) != 2:
        raise ParseError("usage: standard-form <rank> <param:NAME | form-file>")
    try:
        g = int(cfg.input[0])
    except ValueError:
        raise ParseError("rank must be an integer")
    spec = cfg.input[1]
    if spec.startswith("param:"):
        name = spec
        h_spec = ""
        if "@" in spec:
            name, h_spec = spec.split("@", 1)
        H = FgAbGroup((2,)) if name == "param:z2" else _parse_h_spec(h_spec)
        param = schema.builtin_parameter(name, H)
    else:
        _, other = _load_form(spec)
        param = other.param
    form = standard_form(g, param)
    return 0, {"command": "standard-form", "rank": g,
               "document": schema.form_to_json(form)}


_DISPATCH = {
    "validate": _cmd_validate,
    "rank": _cmd_rank,
    "stable-rank": _cmd_stable_rank,
    "complement": _cmd_complement,
    "complex": _cmd_complex,
    "homology": _cmd_homology,
    "lcm": _cmd_lcm,
    "connectivity": _cmd_connectivity,
    "transitivity": _cmd_transitivity,
    "kernel-witness": _cmd_kernel_witness,
    "cancel": _cmd_cancel,
    "standard-form": _cmd_standard_form,
}

# which report key --emit should write on its own (default: the whole report)
_ARTIFACT_KEY = {"standard-form": "document", "complex": "complex"}


def run(config):
    """Execute one command; returns (exit_code, report dict)."""
    handler = _DISPATCH.get(config.command)
    if handler is None:
        return 1, {"error": {"type": "UnsupportedCommand",
                             "message": f"unknown command {config.command!r}"}}
    try:
        return handler(config)
    except ParseError as exc:
        return 1, {"error": {"type": "ParseError", "message": str(exc)}}
    except (AxiomViolation, PreservationViolation) as exc:
        detail = {"type": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, AxiomViolation):
            detail["axiom"] = exc.axiom
        return 1, {"error": detail}
    except WallFormError as exc:
        return 1, {"error": {"type": type(exc).__name__, "message": str(exc)}}


def render_report(report, fmt):
    if fmt == "json":
        return json.dumps(report, sort_keys=True, indent=2) + "\n"
    return _render_table(report) + "\n"


def _render_table(doc, indent=0):
    pad = "  " * indent
    lines = []
    if isinstance(doc, dict):
        width = max((len(str(k)) for k in doc), default=0)
        for k in sorted(doc, key=str):
            v = doc[k]
            if isinstance(v, (dict, list)) and v and not _is_scalar_list(v):
                lines.append(f"{pad}{k}:")
                lines.append(_render_table(v, indent + 1))
            else:
                lines.append(f"{pad}{str(k).ljust(width)}  {_scalar(v)}")
    elif isinstance(doc, list):
        for i, v in enumerate(doc):
            if isinstance(v, (dict, list)) and v and not _is_scalar_list(v):
                lines.append(f"{pad}- [{i}]")
                lines.append(_render_table(v, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(v)}")
    else:
        lines.append(f"{pad}{_scalar(doc)}")
    return "\n".join(lines)


def _is_scalar_list(v):
    return isinstance(v, list) and all(not isinstance(x, (dict, list)) for x in v)


def _scalar(v):
    if isinstance(v, list):
        return "[" + ", ".join(str(x) for x in v) + "]"
    return str(v)


def build_config(argv):
    parser = argparse.ArgumentParser(
        prog="wallform",
        description="Exact computations with Wall forms and their orthogonality complexes.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("input", nargs="+",
                        help="input file (or rank + parameter for standard-form)")
    parser.add_argument("--bound", type=int, default=1,
                        help="coefficient box half-width (default 1)")
    parser.add_argument("--jmax", type=int, default=2,
                        help="stabilization padding limit (default 2)")
    parser.add_argument("--max-degree", type=int, default=2,
                        help="top homology degree / connectivity parameter (default 2)")
    parser.add_argument("--budget", type=int, default=200_000,
                        help="search node cap (default 200000)")
    parser.add_argument("--format", choices=("json", "table"), default="json")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for sampled property checks")
    parser.add_argument("--emit", default=None,
                        help="write the primary artifact to this path")
    ns = parser.parse_args(argv)
    threads = 1
    env = os.environ.get("WALLFORM_THREADS")
    if env:
        try:
            threads = max(1, int(env))
        except ValueError:
            threads = 1
    return RunConfig(command=ns.command, input=tuple(ns.input), bound=ns.bound,
                     j_max=ns.jmax, max_degree=ns.max_degree, budget=ns.budget,
                     format=ns.format, seed=ns.seed, emit=ns.emit,
                     threads=threads)


def main(argv=None):
    try:
        cfg = build_config(sys.argv[1:] if argv is None else argv)
    except ParseError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    code, report = run(cfg)
    if cfg.emit and "error" not in report:
        key = _ARTIFACT_KEY.get(cfg.command)
        artifact = report.get(key, report) if key else report
        with open(cfg.emit, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(artifact, sort_keys=True, indent=2) + "\n")
    sys.stdout.write(render_report(report, cfg.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
