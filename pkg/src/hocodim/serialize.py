"""JSON forms of groups, complexes, chain maps, quotients and modules (schema ``hocodim/1``).

Words are whitespace separated tokens ``g``, ``g^k``, ``g^-k`` with ``"1"``
for the identity.  Group-ring matrices are lists of nonzero entries
``{row, col, terms: [{coeff, word}]}``; permutations are 1-indexed image arrays.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

import numpy as np

from .complexes import ChainMap, EquivariantComplex, GRMatrix, presentation_complex
from .errors import InputError
from .exactla import CoefficientRing, ExactMatrix
from .groups import FiniteQuotient, FpGroup, GroupHom, GroupRingElement, Word, make_finite_quotient

SCHEMA = "hocodim/1"


def _word_key(w: Word) -> tuple:
    return (sum(abs(e) for _, e in w.letters), w.letters)


def element_to_json(group: FpGroup, e: GroupRingElement) -> list[dict]:
    return [{"coeff": int(c), "word": group.format_word(w)}
            for w, c in sorted(e.terms.items(), key=lambda t: _word_key(t[0]))]


def element_from_json(group: FpGroup, terms: list) -> GroupRingElement:
    out = GroupRingElement()
    for t in terms:
        try:
            coeff, word = int(t["coeff"]), str(t["word"])
        except (KeyError, TypeError, ValueError):
            raise InputError(f"bad group ring term {t!r}") from None
        out = out + GroupRingElement.from_word(group.parse_word(word), coeff)
    return out


def grmatrix_to_json(group: FpGroup, m: GRMatrix) -> list[dict]:
    return [{"row": i, "col": j, "terms": element_to_json(group, m[i, j])}
            for i in range(m.rows) for j in range(m.cols) if m[i, j]]


def grmatrix_from_json(group: FpGroup, entries: list, rows: int, cols: int) -> GRMatrix:
    cells = [[GroupRingElement() for _ in range(cols)] for _ in range(rows)]
    for e in entries:
        try:
            i, j = int(e["row"]), int(e["col"])
        except (KeyError, TypeError, ValueError):
            raise InputError(f"bad matrix entry {e!r}") from None
        if not (0 <= i < rows and 0 <= j < cols):
            raise InputError(f"matrix entry ({i}, {j}) outside shape {rows}x{cols}")
        cells[i][j] = cells[i][j] + element_from_json(group, e.get("terms", []))
    return GRMatrix(rows, cols, cells)


def group_to_json(g: FpGroup) -> dict:
    return {"name": g.name, "generators": list(g.generators),
            "relators": [g.format_word(r) for r in g.relators], "aspherical": g.aspherical}


def group_from_json(data: dict) -> FpGroup:
    if not isinstance(data, dict) or "generators" not in data:
        raise InputError("a group needs a 'generators' list")
    gens = [str(x) for x in data["generators"]]
    probe = FpGroup(tuple(gens))
    rels = tuple(probe.parse_word(str(r)) for r in data.get("relators", []))
    return FpGroup(tuple(gens), rels, aspherical=bool(data.get("aspherical", False)), name=str(data.get("name", "")))


def complex_to_json(c: EquivariantComplex) -> dict:
    return {"name": c.name, "group": group_to_json(c.group), "ranks": list(c.ranks),
            "closed_orientable": c.closed_orientable,
            "boundaries": [grmatrix_to_json(c.group, d) for d in c.boundaries]}


def complex_from_json(data: dict, group: FpGroup) -> EquivariantComplex:
    """Either ``{"presentation": true}`` or explicit ``ranks`` and ``boundaries``."""
    closed = bool(data.get("closed_orientable", False))
    name = str(data.get("name", ""))
    if data.get("presentation"):
        return presentation_complex(group, name=name, closed_orientable=closed)
    try:
        ranks = [int(r) for r in data["ranks"]]
        raw = list(data["boundaries"])
    except (KeyError, TypeError, ValueError):
        raise InputError("a complex needs 'presentation': true or 'ranks' and 'boundaries'") from None
    if len(raw) != len(ranks) - 1:
        raise InputError("need one boundary matrix per positive degree")
    bounds = tuple(grmatrix_from_json(group, raw[k - 1], ranks[k], ranks[k - 1]) for k in range(1, len(ranks)))
    edges = None
    if ranks[0] == 1 and len(ranks) > 1:
        edges = _edge_labels(group, bounds[0])
    return EquivariantComplex(group, tuple(ranks), bounds, name=name, edge_generators=edges,
                              closed_orientable=closed)


def _edge_labels(group: FpGroup, d1: GRMatrix) -> tuple[int, ...] | None:
    out = []
    for i in range(d1.rows):
        t = d1[i, 0].terms
        gens = [w for w in t if w]
        if len(t) != 2 or len(gens) != 1 or t[gens[0]] != 1 or t.get(Word()) != -1:
            return None
        w = gens[0]
        if len(w.letters) != 1 or w.letters[0][1] != 1:
            return None
        out.append(w.letters[0][0])
    return tuple(out)


def hom_to_json(h: GroupHom) -> dict:
    return {"name": h.name, "images": [h.target.format_word(w) for w in h.images]}


def hom_from_json(data: dict, source: FpGroup, target: FpGroup) -> GroupHom:
    imgs = data.get("images")
    if not isinstance(imgs, list):
        raise InputError("a homomorphism needs an 'images' list")
    return GroupHom(source, target, tuple(target.parse_word(str(w)) for w in imgs), name=str(data.get("name", "")))


def chain_map_to_json(phi: ChainMap) -> dict:
    return {"hom": hom_to_json(phi.hom),
            "components": [grmatrix_to_json(phi.target.group, m) for m in phi.components]}


def quotient_to_json(q: FiniteQuotient) -> dict:
    return {"label": q.label, "order": q.order, "degree": q.degree,
            "images": [[x + 1 for x in p] for p in q.generator_images]}


def quotient_from_json(data: dict, group: FpGroup, bound: int) -> FiniteQuotient:
    imgs = data.get("images")
    if not isinstance(imgs, list):
        raise InputError("a quotient needs an 'images' list of 1-indexed permutations")
    perms = []
    for p in imgs:
        try:
            perms.append(tuple(int(x) - 1 for x in p))
        except (TypeError, ValueError):
            raise InputError(f"bad permutation {p!r}") from None
    degree = data.get("degree")
    return make_finite_quotient(group, perms, bound=bound, label=str(data.get("label", "")),
                                degree=int(degree) if degree is not None else None)


def scalar_to_json(x) -> Any:
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return int(x)


def matrix_to_json(m: ExactMatrix) -> list[list]:
    return [[scalar_to_json(x) for x in row] for row in m.a.tolist()]


def matrix_from_json(ring: CoefficientRing, rows: list) -> ExactMatrix:
    try:
        data = [[Fraction(str(x)) for x in r] for r in rows]
    except (TypeError, ValueError):
        raise InputError(f"bad matrix {rows!r}") from None
    return ExactMatrix(ring, np.array(data, dtype=object).reshape(len(data), len(data[0]) if data else 0))


def module_to_json(m) -> dict:
    """Dimension plus the action of each generator of the quotient's source group."""
    q = m.quotient
    return {"label": m.describe(), "ring": m.ring.spec(), "dim": m.dim,
            "generators": [matrix_to_json(m.matrices[q.index[p]]) for p in q.generator_images]}


def _default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, Fraction):
        return scalar_to_json(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, default=_default, ensure_ascii=False) + "\n"
