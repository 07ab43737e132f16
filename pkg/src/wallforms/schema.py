"""JSON encoding and decoding for every value the CLI exchanges.

Groups serialize as ``{"invariant_factors": [...]}``, elements as integer
arrays, homomorphisms as row-major matrices with their endpoint groups.
A form file is ``{"parameter": ..., "form": ...}`` where the parameter is
either an inline object or one of the built-in names ``param:trivial`` /
``param:z2``.
"""

from __future__ import annotations

from .errors import ParseError
from .forms import (
    FormParameter,
    WallForm,
    WallMorphism,
    make_morphism,
    make_wall_form,
    standard_form,
    trivial_parameter,
    z2_parameter,
)
from .hpairs import HMap, HPair, make_hpair, probe
from .intlinalg import FgAbGroup, GroupHom, IntMatrix

__all__ = [
    "group_to_json", "group_from_json",
    "matrix_to_json", "matrix_from_json",
    "hom_to_json", "hom_from_json",
    "hpair_to_json", "hpair_from_json",
    "param_to_json", "param_from_json",
    "form_to_json", "form_from_json",
    "morphism_to_json", "standard_morphism_from_json",
    "hmap_to_probe_from_json",
    "complex_to_json", "edge_list_text",
    "builtin_parameter",
]


def _need(doc, key, path):
    if not isinstance(doc, dict) or key not in doc:
        raise ParseError(f"missing key {key!r}", path)
    return doc[key]


def _int_list(v, path):
    if not isinstance(v, list) or not all(isinstance(x, int) for x in v):
        raise ParseError("expected a list of integers", path)
    return v


def _int_matrix(v, path, rows=None, cols=None):
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise ParseError("expected a list of integer rows", path)
    for i, r in enumerate(v):
        _int_list(r, f"{path}[{i}]")
    if rows is not None and len(v) != rows:
        raise ParseError(f"expected {rows} rows, got {len(v)}", path)
    try:
        m = IntMatrix.from_rows(v) if v else IntMatrix.zeros(rows or 0, cols or 0)
    except Exception as exc:
        raise ParseError(str(exc), path)
    if cols is not None and m.cols != cols and m.rows:
        raise ParseError(f"expected {cols} columns, got {m.cols}", path)
    return m


def group_to_json(g):
    return {"invariant_factors": list(g.factors)}


def group_from_json(doc, path="group"):
    f = _int_list(_need(doc, "invariant_factors", path), f"{path}.invariant_factors")
    try:
        return FgAbGroup(tuple(f))
    except Exception as exc:
        raise ParseError(str(exc), path)


def matrix_to_json(m):
    return [list(m.row(i)) for i in range(m.rows)]


def matrix_from_json(v, path, rows, cols):
    return _int_matrix(v, path, rows=rows, cols=cols)


def hom_to_json(h):
    return {"domain": group_to_json(h.domain),
            "codomain": group_to_json(h.codomain),
            "matrix": matrix_to_json(h.matrix)}


def hom_from_json(doc, path="hom"):
    dom = group_from_json(_need(doc, "domain", path), f"{path}.domain")
    cod = group_from_json(_need(doc, "codomain", path), f"{path}.codomain")
    mat = _int_matrix(_need(doc, "matrix", path), f"{path}.matrix",
                      rows=cod.k, cols=dom.k)
    try:
        return GroupHom(dom, cod, mat)
    except Exception as exc:
        raise ParseError(str(exc), path)


def _elements_from_json(v, group, path):
    if not isinstance(v, list):
        raise ParseError("expected a list of elements", path)
    out = []
    for i, coords in enumerate(v):
        c = _int_list(coords, f"{path}[{i}]")
        if len(c) != group.k:
            raise ParseError(f"element length {len(c)} != {group.k}", f"{path}[{i}]")
        out.append(group.element(c))
    return out


def hpair_to_json(p):
    return {"H": group_to_json(p.H),
            "minus": group_to_json(p.minus),
            "plus": group_to_json(p.plus),
            "tau": [[list(v.coords) for v in row] for row in p.tau]}


def hpair_from_json(doc, path="pair"):
    H = group_from_json(_need(doc, "H", path), f"{path}.H")
    minus = group_from_json(_need(doc, "minus", path), f"{path}.minus")
    plus = group_from_json(_need(doc, "plus", path), f"{path}.plus")
    rows = _need(doc, "tau", path)
    if not isinstance(rows, list) or len(rows) != minus.k:
        raise ParseError("tau must list one row per minus generator", f"{path}.tau")
    tau = []
    for i, row in enumerate(rows):
        tau.append(tuple(_elements_from_json(row, plus, f"{path}.tau[{i}]")))
        if len(tau[-1]) != H.k:
            raise ParseError("tau row length must match the H generators", f"{path}.tau[{i}]")
    try:
        return make_hpair(H, minus, plus, tuple(tau))
    except Exception as exc:
        raise ParseError(str(exc), path)


def param_to_json(p):
    return {"G_minus": group_to_json(p.G.minus),
            "G_plus": group_to_json(p.G.plus),
            "tau_G": [[list(v.coords) for v in row] for row in p.G.tau],
            "partial": matrix_to_json(p.partial.matrix),
            "pi": matrix_to_json(p.pi.matrix),
            "epsilon": p.epsilon}


def builtin_parameter(name, H):
    """Named parameters: ``trivial`` (per-H, sign -1 unless suffixed) and ``z2``."""
    base = name.removeprefix("param:")
    if base in ("trivial", "trivial:-1"):
        return trivial_parameter(H, -1)
    if base == "trivial:+1":
        return trivial_parameter(H, 1)
    if base == "z2":
        if H.factors != (2,):
            raise ParseError("the z2 parameter requires H = Z/2", "parameter")
        return z2_parameter()
    raise ParseError(f"unknown built-in parameter {name!r}", "parameter")


def param_from_json(doc, H, path="parameter"):
    if isinstance(doc, str):
        return builtin_parameter(doc, H)
    gm = group_from_json(_need(doc, "G_minus", path), f"{path}.G_minus")
    gp = group_from_json(_need(doc, "G_plus", path), f"{path}.G_plus")
    rows = _need(doc, "tau_G", path)
    if not isinstance(rows, list) or len(rows) != gm.k:
        raise ParseError("tau_G must list one row per G- generator", f"{path}.tau_G")
    tau = []
    for i, row in enumerate(rows):
        tau.append(tuple(_elements_from_json(row, gp, f"{path}.tau_G[{i}]")))
    try:
        G = make_hpair(H, gm, gp, tuple(tau))
        partial = GroupHom(H, gp, _int_matrix(_need(doc, "partial", path),
                                              f"{path}.partial", rows=gp.k, cols=H.k))
        pi = GroupHom(gp, H, _int_matrix(_need(doc, "pi", path),
                                         f"{path}.pi", rows=H.k, cols=gp.k))
        eps = _need(doc, "epsilon", path)
        if eps not in (1, -1):
            raise ParseError("epsilon must be +1 or -1", f"{path}.epsilon")
        return FormParameter(G, partial, pi, eps)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(str(exc), path)


def form_to_json(form):
    return {
        "parameter": param_to_json(form.param),
        "form": {
            "H": group_to_json(form.pair.H),
            "minus": group_to_json(form.pair.minus),
            "plus": group_to_json(form.pair.plus),
            "tau": [[list(v.coords) for v in row] for row in form.pair.tau],
            "lambda": matrix_to_json(form.lam),
            "mu": [[list(v.coords) for v in row] for row in form.mu],
            "alpha_minus": [list(v.coords) for v in form.alpha_minus],
            "alpha_plus": [list(v.coords) for v in form.alpha_plus],
        },
    }


def form_from_json(doc, path=""):
    """Parse and fully validate a form document (axiom checks included)."""
    fdoc = _need(doc, "form", path or "document")
    pair = hpair_from_json(fdoc, (path + "." if path else "") + "form")
    fpath = (path + "." if path else "") + "form"
    param = param_from_json(_need(doc, "parameter", path or "document"), pair.H,
                            (path + "." if path else "") + "parameter")
    lam = _int_matrix(_need(fdoc, "lambda", fpath), f"{fpath}.lambda",
                      rows=pair.minus.k, cols=pair.plus.k)
    mu_rows = _need(fdoc, "mu", fpath)
    if not isinstance(mu_rows, list) or len(mu_rows) != pair.plus.k:
        raise ParseError("mu must list one row per plus generator", f"{fpath}.mu")
    mu = tuple(tuple(_elements_from_json(r, pair.H, f"{fpath}.mu[{i}]"))
               for i, r in enumerate(mu_rows))
    am = tuple(_elements_from_json(_need(fdoc, "alpha_minus", fpath),
                                   param.G.minus, f"{fpath}.alpha_minus"))
    ap = tuple(_elements_from_json(_need(fdoc, "alpha_plus", fpath),
                                   param.G.plus, f"{fpath}.alpha_plus"))
    form = make_wall_form(pair, lam, mu, am, ap, param)
    # recognize standard forms so parsed files keep the block structure
    if pair.minus.torsion_count == 0:
        std = standard_form(pair.minus.free_rank, param)
        if std == form:
            return std
    return form


def morphism_to_json(m):
    doc = {"f_minus": matrix_to_json(m.hmap.f_minus.matrix),
           "f_plus": matrix_to_json(m.hmap.f_plus.matrix)}
    if m.source.layout is not None:
        doc["source_rank"] = m.source.layout.g
    return doc


def standard_morphism_from_json(doc, target, path="morphism", rank=None):
    """A morphism from a standard source, given by its full matrices."""
    if rank is None:
        rank = _need(doc, "source_rank", path)
        if not isinstance(rank, int) or rank < 0:
            raise ParseError("source_rank must be a non-negative integer", path)
    src = standard_form(rank, target.param)
    fm = _int_matrix(_need(doc, "f_minus", path), f"{path}.f_minus",
                     rows=target.pair.minus.k, cols=src.pair.minus.k)
    fp = _int_matrix(_need(doc, "f_plus", path), f"{path}.f_plus",
                     rows=target.pair.plus.k, cols=src.pair.plus.k)
    try:
        minus = [target.pair.minus.element(fm.col(j)) for j in range(fm.cols)]
        plus = [target.pair.plus.element(fp.col(j)) for j in range(fp.cols)]
        return make_morphism(src, target, minus, plus)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(str(exc), path)


def morphism_from_json(doc, source, target, path="morphism"):
    """A morphism between two given forms, from its full matrices."""
    fm = _int_matrix(_need(doc, "f_minus", path), f"{path}.f_minus",
                     rows=target.pair.minus.k, cols=source.pair.minus.k)
    fp = _int_matrix(_need(doc, "f_plus", path), f"{path}.f_plus",
                     rows=target.pair.plus.k, cols=source.pair.plus.k)
    try:
        minus = [target.pair.minus.element(fm.col(j)) for j in range(fm.cols)]
        plus = [target.pair.plus.element(fp.col(j)) for j in range(fp.cols)]
        return make_morphism(source, target, minus, plus)
    except ParseError:
        raise
    except Exception as exc:
        raise ParseError(str(exc), path)


def hmap_to_probe_from_json(doc, form, path="hom"):
    """An H-map from the form's pair into a probe, for kernel commands."""
    nu = _need(doc, "nu", path)
    if nu not in (0, 1):
        raise ParseError("nu must be 0 or 1", f"{path}.nu")
    pair = form.pair
    p = probe(nu, pair.H)
    fm = _int_matrix(_need(doc, "f_minus", path), f"{path}.f_minus",
                     rows=p.minus.k, cols=pair.minus.k)
    fp = _int_matrix(_need(doc, "f_plus", path), f"{path}.f_plus",
                     rows=p.plus.k, cols=pair.plus.k)
    try:
        return HMap(pair, p, GroupHom(pair.minus, p.minus, fm),
                    GroupHom(pair.plus, p.plus, fp))
    except Exception as exc:
        raise ParseError(str(exc), path)


def complex_to_json(x):
    bits = []
    for i in range(x.n):
        bits.append("".join("1" if j in x.nbrs[i] else "0" for j in range(x.n)))
    return {"vertices": [morphism_to_json(v) if isinstance(v, WallMorphism) else v
                         for v in x.vertices],
            "adjacency": bits,
            "max_dim": x.max_dim}


def edge_list_text(x):
    return "\n".join(f"{i} {j}" for (i, j) in x.edges()) + ("\n" if x.edge_count() else "")
