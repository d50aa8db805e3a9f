"""``hocodim`` command line: experiment files, builtin catalog and reports.

An experiment file is JSON with ``"schema": "hocodim/1"`` and named
``groups``, ``complexes``, ``homs`` and ``quotients``; ``context`` names the
homomorphism to study and ``complex`` the space for single-complex commands.
``--builtin NAME`` replaces the file with a catalog entry.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

from . import __version__
from .catalog import (
    COMPLEXES,
    CONTEXTS,
    builtin_complex,
    builtin_context,
    builtin_quotient,
    default_quotients,
    suite_contexts,
)
from .cohomology import (
    QModule,
    augmentation_ideal,
    boundaries_module,
    cohomology,
    dual_module,
    homology,
    induced_map,
    regular_module,
    tensor_power,
    trivial_module,
)
from .complexes import EquivariantComplex, ReducedComplex, standard_diagonal
from .dimension import (
    DEFAULT_BUDGET,
    FamilySpec,
    HomContext,
    build_family,
    cd_lower,
    cd_upper_certificate,
    field_scan,
    hd_equals_cd_suite,
    hd_lower,
    make_context,
    product_experiment,
    soundness_recheck,
)
from .errors import BudgetExceeded, ComplexError, HocodimError, InputError, QuotientTooLarge, WordParseError
from .exactla import GF, QQ, ZZ, CoefficientRing, ExactMatrix, parse_ring
from .groups import DEFAULT_QUOTIENT_BOUND, FiniteQuotient, FpGroup, pullback_quotient
from .serialize import (
    SCHEMA,
    complex_from_json,
    dumps,
    group_from_json,
    hom_from_json,
    matrix_from_json,
    quotient_from_json,
    quotient_to_json,
)

COMMANDS = ("cohomology", "homology", "induced-map", "cd", "hd", "certify-upper", "product-check",
            "field-scan", "bs-power", "hd-eq-cd", "verify")
CONTEXT_COMMANDS = ("induced-map", "cd", "hd", "certify-upper", "product-check", "field-scan", "hd-eq-cd")


class SchemaError(InputError):
    """The experiment file does not match the schema."""


class ReferenceError_(InputError):
    """A name in the experiment file does not resolve."""


class CheckFailed(HocodimError):
    """An asserted property does not hold; exit status 1."""


# --------------------------------------------------------------------------
# experiment resolution


@dataclass
class Experiment:
    """Resolved inputs: at most one context and one complex, plus extra quotients and a module recipe."""

    source: dict
    context: HomContext | None = None
    contexts: list[HomContext] = field(default_factory=list)
    complex: EquivariantComplex | None = None
    quotients: dict[str, FiniteQuotient] = field(default_factory=dict)
    module: object = "trivial"
    params: dict = field(default_factory=dict)


def _lookup(table: dict, name, what: str):
    if not isinstance(name, str) or name not in table:
        raise ReferenceError_(f"unresolved reference: {what} {name!r} (known: {', '.join(sorted(table)) or 'none'})")
    return table[name]


def _builtin(name: str, radius: int) -> Experiment:
    head = name.split(":")[0]
    if name == "suite":
        ctxs = suite_contexts()
        return Experiment({"builtin": name}, contexts=ctxs)
    if head in [c.split(":")[0] for c in CONTEXTS]:
        ctx = builtin_context(name, radius)
        return Experiment({"builtin": name}, context=ctx, contexts=[ctx], complex=ctx.target,
                          quotients=dict(ctx.quotients))
    if head in [c.split(":")[0] for c in COMPLEXES]:
        c = builtin_complex(name)
        return Experiment({"builtin": name}, complex=c, quotients=default_quotients(c.group))
    raise ReferenceError_(f"unresolved reference: builtin {name!r} "
                          f"(known: suite, {', '.join(CONTEXTS)}, {', '.join(COMPLEXES)})")


def load_experiment(doc: dict, radius: int) -> Experiment:
    """Resolve an experiment document; every name must resolve and the schema must be ``hocodim/1``."""
    if not isinstance(doc, dict):
        raise SchemaError("schema mismatch: the experiment file must hold a JSON object")
    if doc.get("schema") != SCHEMA:
        raise SchemaError(f"schema mismatch: expected \"schema\": \"{SCHEMA}\", got {doc.get('schema')!r}")
    known = {"schema", "command", "builtin", "groups", "complexes", "homs", "quotients", "context", "complex",
             "module", "parameters"}
    extra = sorted(set(doc) - known)
    if extra:
        raise SchemaError(f"schema mismatch: unknown keys {extra}")
    params = doc.get("parameters", {})
    if not isinstance(params, dict):
        raise SchemaError("schema mismatch: 'parameters' must be an object")
    radius = int(params.get("support_radius", radius))
    bound = int(params.get("quotient_bound", DEFAULT_QUOTIENT_BOUND))

    if "builtin" in doc:
        exp = _builtin(str(doc["builtin"]), radius)
    else:
        exp = Experiment(doc)
    exp.source = doc
    exp.params = params

    groups: dict[str, FpGroup] = {}
    for name, g in _section(doc, "groups").items():
        groups[name] = group_from_json(dict(g, name=g.get("name", name)))
    complexes: dict[str, EquivariantComplex] = {}
    for name, c in _section(doc, "complexes").items():
        if "builtin" in c:
            complexes[name] = builtin_complex(str(c["builtin"]))
        else:
            complexes[name] = complex_from_json(dict(c, name=c.get("name", name)),
                                                _lookup(groups, c.get("group"), "group"))
    homs = {}
    for name, h in _section(doc, "homs").items():
        src = _lookup(complexes, h.get("source"), "complex")
        tgt = _lookup(complexes, h.get("target"), "complex")
        homs[name] = (hom_from_json(dict(h, name=h.get("name", name)), src.group, tgt.group), src, tgt,
                      h.get("target"))
    qsec = _section(doc, "quotients")
    for qname, qd in qsec.items():
        if qd.get("of") is not None:
            _lookup(complexes, qd["of"], "complex")
    cname = doc.get("complex")
    if cname is not None:
        exp.complex = _lookup(complexes, cname, "complex")
        exp.quotients = default_quotients(exp.complex.group)
        for qname, qd in qsec.items():
            if qd.get("of") in (None, cname):
                exp.quotients[qname] = _quotient(qd, exp.complex.group, bound, qname)
    if "context" in doc:
        hom, src, tgt, target_name = _lookup(homs, doc["context"], "hom")
        quots = default_quotients(tgt.group)
        for qname, qd in qsec.items():
            if qd.get("of") in (None, target_name):
                quots[qname] = _quotient(qd, tgt.group, bound, qname)
        ctx = make_context(str(doc["context"]), hom, src, tgt, quots, radius)
        exp.context, exp.contexts = ctx, [ctx]
        if exp.complex is None:
            exp.complex, exp.quotients = tgt, dict(quots)
    if "builtin" in doc and qsec:
        if exp.context is None and exp.complex is None:
            raise SchemaError("schema mismatch: the builtin suite takes no extra quotients")
        for qname, qd in qsec.items():
            group = exp.context.target.group if exp.context is not None else exp.complex.group
            q = _quotient(qd, group, bound, qname)
            exp.quotients[qname] = q
            if exp.context is not None:
                exp.context.chain_map.verify(q)
                exp.context.quotients[qname] = q
    if "module" in doc:
        exp.module = doc["module"]
    if exp.context is None and exp.complex is None and not exp.contexts:
        raise SchemaError("schema mismatch: need 'builtin', 'context' or 'complex'")
    return exp


def _section(doc: dict, key: str) -> dict:
    sec = doc.get(key, {})
    if not isinstance(sec, dict) or not all(isinstance(v, dict) for v in sec.values()):
        raise SchemaError(f"schema mismatch: '{key}' must map names to objects")
    return sec


def _quotient(qd: dict, group: FpGroup, bound: int, name: str) -> FiniteQuotient:
    if "builtin" in qd:
        return builtin_quotient(group, str(qd["builtin"]))
    return quotient_from_json(dict(qd, label=qd.get("label", name)), group, bound)


# --------------------------------------------------------------------------
# modules, quotients, rings, degrees


def make_module(recipe, q: FiniteQuotient, ring: CoefficientRing, rc: ReducedComplex | None = None) -> QModule:
    """``trivial``, ``regular``, ``aug``, ``aug^J``, ``sign``, ``dual:RECIPE``, ``boundaries:K`` or explicit matrices."""
    if isinstance(recipe, dict):
        gens = recipe.get("generators")
        if not isinstance(gens, list):
            raise SchemaError("schema mismatch: an explicit module needs 'generators' (one matrix per generator)")
        mats = [matrix_from_json(ring, g) for g in gens]
        return QModule.from_generators(q, ring, mats, str(recipe.get("label", "module")))
    if not isinstance(recipe, str):
        raise SchemaError(f"schema mismatch: bad module {recipe!r}")
    r = recipe.strip()
    if r == "trivial":
        return trivial_module(q, ring)
    if r == "regular":
        return regular_module(q, ring)
    if r in ("aug", "I"):
        return augmentation_ideal(q, ring)
    if r.startswith("aug^"):
        try:
            j = int(r[4:])
        except ValueError:
            raise InputError(f"bad module power in {r!r}") from None
        if j < 1:
            raise InputError("module power must be positive")
        return tensor_power(augmentation_ideal(q, ring), j)
    if r == "sign":
        neg = ExactMatrix(ring, [[-1]])
        return QModule.from_generators(q, ring, [neg] * q.source.ngens, "sign")
    if r.startswith("dual:"):
        return dual_module(make_module(r[5:], q, ring, rc))
    if r.startswith("boundaries:"):
        if rc is None:
            raise InputError("boundaries modules need a complex")
        try:
            k = int(r.split(":", 1)[1])
        except ValueError:
            raise InputError(f"bad degree in {r!r}") from None
        return boundaries_module(rc, k).module
    raise InputError(f"unknown module {r!r} (use trivial, regular, aug, aug^J, sign, dual:M, boundaries:K)")


def select_quotients(exp: Experiment, name: str | None, group: FpGroup,
                     registry: dict[str, FiniteQuotient]) -> list[tuple[str, FiniteQuotient]]:
    """All registered quotients, or the one named (registered key, label, or builtin quotient name)."""
    if name is None:
        return list(registry.items())
    if name in registry:
        return [(name, registry[name])]
    for k, q in registry.items():
        if q.describe() == name:
            return [(k, q)]
    q = builtin_quotient(group, name)
    registry[q.describe()] = q
    return [(q.describe(), q)]


def parse_degrees(text: str | None, top: int) -> list[int]:
    if text is None:
        return list(range(top + 1))
    t = str(text).strip()
    try:
        if ".." in t:
            a, b = t.split("..", 1)
            lo, hi = int(a), int(b)
        else:
            lo = hi = int(t)
    except ValueError:
        raise InputError(f"bad degree range {text!r} (use A..B)") from None
    if lo < 0 or hi < lo:
        raise InputError(f"bad degree range {text!r}")
    return list(range(lo, hi + 1))


def parse_primes(text) -> list[int]:
    if isinstance(text, list):
        items = text
    else:
        items = [p for p in str(text).split(",") if p.strip()]
    try:
        primes = [int(p) for p in items]
    except ValueError:
        raise InputError(f"bad prime list {text!r}") from None
    for p in primes:
        GF(p)
    return primes


# --------------------------------------------------------------------------
# commands


@dataclass
class Options:
    ring: CoefficientRing | None
    quotient: str | None
    degrees: str | None
    primes: list[int]
    budget: int
    family: FamilySpec
    level: int | None
    size_budget: int

    def inputs(self) -> dict:
        return {"ring": self.ring.spec() if self.ring else None, "quotient": self.quotient,
                "degrees": self.degrees, "primes": self.primes, "budget": self.budget,
                "family": self.family.describe(), "level": self.level, "size_budget": self.size_budget}


@dataclass
class Outcome:
    results: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    certificates: list = field(default_factory=list)
    headers: tuple[str, ...] = ()
    rows: list[tuple] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    ok: bool = True


def _need_context(exp: Experiment, cmd: str) -> HomContext:
    if exp.context is None:
        raise InputError(f"command {cmd} needs a homomorphism context (builtin context or 'context')")
    return exp.context


def _need_complex(exp: Experiment, cmd: str) -> EquivariantComplex:
    if exp.complex is None:
        raise InputError(f"command {cmd} needs a complex (builtin complex or 'complex')")
    return exp.complex


def _ring(opts: Options) -> CoefficientRing:
    return opts.ring or QQ


def _group_json(h) -> dict:
    out = {"dim": h.dim}
    if h.invariants is not None:
        out.update(group=str(h.invariants), free_rank=h.invariants.free_rank, torsion=list(h.invariants.torsion))
    return out


def run_homology(exp: Experiment, opts: Options, variance: str) -> Outcome:
    c = _need_complex(exp, variance)
    ring = _ring(opts)
    out = Outcome(headers=("quotient", "module", "degree", "H"))
    for qname, q in select_quotients(exp, opts.quotient, c.group, exp.quotients):
        rc = ReducedComplex(c, q, ring)
        m = make_module(exp.module, q, ring, rc)
        for n in parse_degrees(opts.degrees, c.length):
            h = cohomology(rc, m, n) if variance == "cohomology" else homology(rc, m, n)
            g = _group_json(h)
            out.results.append(dict(quotient=qname, module=m.describe(), ring=str(ring), degree=n, **g))
            out.rows.append((qname, m.describe(), n, g.get("group", g["dim"])))
    return out


def run_induced(exp: Experiment, opts: Options) -> Outcome:
    ctx = _need_context(exp, "induced-map")
    ring = _ring(opts)
    out = Outcome(headers=("quotient", "module", "variance", "degree", "rank"))
    for qname, q in select_quotients(exp, opts.quotient, ctx.target.group, ctx.quotients):
        data = ctx.reduction(q, ring)
        m = make_module(exp.module, q, ring, data.target)
        for variance in ("cohomology", "homology"):
            for n in parse_degrees(opts.degrees, ctx.top_degree):
                f = induced_map(data, m, n, variance)
                item = dict(quotient=qname, module=m.describe(), ring=str(ring), variance=variance, degree=n,
                            nonzero=f.nonzero, domain_dim=f.domain.dim, codomain_dim=f.codomain.dim)
                if ring.is_field:
                    item["rank"] = f.rank
                out.results.append(item)
                out.rows.append((qname, m.describe(), variance, n, f.rank if ring.is_field else int(f.nonzero)))
    return out


def run_bound(exp: Experiment, opts: Options, variance: str) -> Outcome:
    ctx = _need_context(exp, variance)
    ring = _ring(opts)
    out = Outcome(headers=("quotient", "module", "degree", "rank"))
    for qname, q in select_quotients(exp, opts.quotient, ctx.target.group, ctx.quotients):
        fam = build_family(ctx, q, ring, opts.family, opts.budget)
        degs = parse_degrees(opts.degrees, ctx.top_degree)
        b = (cd_lower if variance == "cd" else hd_lower)(ctx, q, ring, fam, degs)
        out.results.append(dict(quotient=qname, ring=str(ring), degree=b.degree, witness=b.witness,
                                witness_rank=b.witness_rank, family=b.family, skipped=b.skipped,
                                relative_to=f"{variance} relative to Q={q.describe()} and the scanned family",
                                table=[dict(module=e.module, degree=e.degree, rank=e.rank) for e in b.table]))
        if b.witness is not None:
            out.witnesses.append(dict(quotient=qname, ring=str(ring), module=b.witness, degree=b.degree,
                                      rank=b.witness_rank))
        out.rows.extend((qname, e.module, e.degree, e.rank) for e in b.table)
        out.notes.append(f"{variance}[{qname}, {ring}] >= {b.degree}" +
                         (f"  witness {b.witness} (rank {b.witness_rank})" if b.witness else "  (no witness)"))
    return out


def _cert_json(cert, qname: str) -> dict:
    out = dict(quotient=qname, ring=cert.ring, level=cert.level, trivial=cert.trivial,
               description=cert.describe(), verified=True)
    if cert.homotopy is not None:
        out["size"] = cert.homotopy.size
    return out


def run_certify(exp: Experiment, opts: Options) -> Outcome:
    ctx = _need_context(exp, "certify-upper")
    ring = _ring(opts)
    out = Outcome(headers=("quotient", "ring", "level", "certificate", "recheck"))
    for qname, q in select_quotients(exp, opts.quotient, ctx.target.group, ctx.quotients):
        fam = build_family(ctx, q, ring, opts.family, opts.budget)
        level = opts.level
        if level is None:
            level = max(cd_lower(ctx, q, ring, fam).degree, 0)
        cert = cd_upper_certificate(ctx, q, ring, level)
        if cert is None:
            out.ok = False
            out.results.append(dict(quotient=qname, ring=str(ring), level=level, feasible=False, offending=[]))
            out.rows.append((qname, str(ring), level, "infeasible", "-"))
            continue
        bad = soundness_recheck(ctx, q, ring, level, fam)
        out.ok &= not bad
        out.certificates.append(_cert_json(cert, qname))
        out.results.append(dict(quotient=qname, ring=str(ring), level=level, feasible=True,
                                offending=[dict(module=e.module, degree=e.degree, rank=e.rank) for e in bad]))
        out.rows.append((qname, str(ring), level, cert.describe(), "pass" if not bad else f"{len(bad)} failures"))
    return out


def run_product(exp: Experiment, opts: Options) -> Outcome:
    ctx = _need_context(exp, "product-check")
    ring = _ring(opts)
    out = Outcome(headers=("quotient", "ring", "cd", "cd product", "certificate", "equality"))
    name = opts.quotient if opts.quotient is not None else "trivial"
    for qname, q in select_quotients(exp, name, ctx.target.group, ctx.quotients):
        r = product_experiment(ctx, q, ring, opts.family, opts.budget, opts.size_budget)
        out.ok &= r.equality
        out.results.append(dict(quotient=qname, ring=r.ring, cd=r.cd, upper=r.upper, product_lower=r.product_lower,
                                product_upper=r.product_upper_level if r.product_certificate else None,
                                equality=r.equality))
        if r.product_witness is not None:
            out.witnesses.append(dict(quotient=qname, ring=r.ring, module=r.product_witness,
                                      degree=r.product_lower, product=True))
        if r.product_certificate is not None:
            out.certificates.append(_cert_json(r.product_certificate, qname))
        out.rows.append((qname, r.ring, r.cd, r.product_lower,
                         r.product_certificate.describe() if r.product_certificate else "infeasible", r.equality))
    return out


def run_field_scan(exp: Experiment, opts: Options) -> Outcome:
    ctx = _need_context(exp, "field-scan")
    out = Outcome(headers=("quotient", "ring", "cd", "hd"))
    for qname, q in select_quotients(exp, opts.quotient, ctx.target.group, ctx.quotients):
        degs = parse_degrees(opts.degrees, ctx.top_degree)
        fs = field_scan(ctx, q, opts.primes, opts.family, opts.budget, degs)
        out.ok &= fs.agrees
        out.results.append(dict(quotient=qname, rows=[dict(ring=r, cd=a, hd=b) for r, a, b in fs.rows],
                                z_cd=fs.z_cd, max_field_cd=fs.max_field_cd, z_hd=fs.z_hd,
                                max_field_hd=fs.max_field_hd, witness_fields=fs.witness_fields, agrees=fs.agrees))
        out.witnesses.extend(dict(quotient=qname, field=f, degree=fs.max_field_cd) for f in fs.witness_fields)
        out.rows.extend((qname, r, a, b) for r, a, b in fs.rows)
        out.notes.append(f"[{qname}] max over fields {fs.max_field_cd}, Z scan {fs.z_cd}: "
                         + ("agree" if fs.agrees else "DISAGREE") + f"; witness fields {', '.join(fs.witness_fields)}")
    return out


def run_bs_power(exp: Experiment, opts: Options) -> Outcome:
    from .cohomology import bs_power

    c = _need_complex(exp, "bs-power")
    ring = _ring(opts)
    diag = standard_diagonal(c)
    out = Outcome(headers=("quotient", "ring", "k", "beta^k"))
    for qname, q in select_quotients(exp, opts.quotient, c.group, exp.quotients):
        rc = ReducedComplex(c, q, ring)
        top = 0
        powers = []
        for k in range(1, c.length + 2):
            nz = not bs_power(rc, k, diag).is_zero()
            powers.append(dict(k=k, nonzero=nz))
            out.rows.append((qname, str(ring), k, "nonzero" if nz else "0"))
            if nz:
                top = k
        out.results.append(dict(quotient=qname, ring=str(ring), powers=powers, top_power=top,
                                relative_to=f"finite-quotient class over Q={q.describe()}"))
    return out


def run_hd_eq_cd(exp: Experiment, opts: Options) -> Outcome:
    if not exp.contexts:
        raise InputError("command hd-eq-cd needs a context or the builtin suite")
    rings = (opts.ring,) if opts.ring else (QQ, GF(2))
    out = Outcome(headers=("context", "quotient", "ring", "cd", "hd", "equal"))
    rows = hd_equals_cd_suite(exp.contexts, rings, opts.family, opts.budget, only=opts.quotient)
    for r in rows:
        out.ok &= r.equal
        out.results.append(dict(context=r.context, quotient=r.quotient, ring=r.ring, cd=r.cd, hd=r.hd,
                                cd_witness=r.cd_witness, hd_witness=r.hd_witness, equal=r.equal))
        out.rows.append((r.context, r.quotient, r.ring, r.cd, r.hd, r.equal))
    return out


def _check(out: Outcome, name: str, where: str, fn: Callable[[], object]):
    try:
        res = fn()
        ok = res is None or bool(res)
        detail = "" if ok else "identity fails"
    except ComplexError as e:
        ok, detail = False, str(e)
    out.ok &= ok
    out.results.append(dict(check=name, where=where, ok=ok, detail=detail))
    out.rows.append((name, where, "pass" if ok else "FAIL"))


def _duality(rc: ReducedComplex, m: QModule) -> bool:
    dual = dual_module(m)
    return all(cohomology(rc, m, n).dim == homology(rc, dual, n).dim for n in range(rc.length + 1))


def _poincare(rc: ReducedComplex) -> bool:
    t = trivial_module(rc.quotient, rc.ring)
    top = rc.length
    return all(cohomology(rc, t, k).dim == homology(rc, t, top - k).dim for k in range(top + 1))


def verify_complex(out: Outcome, c: EquivariantComplex, quotients: dict[str, FiniteQuotient]):
    diag = standard_diagonal(c)
    for qname, q in quotients.items():
        where = f"{c.label()} / {qname}"
        _check(out, "dd=0 and augmentation", where, lambda: ReducedComplex(c, q, ZZ).check())
        _check(out, "diagonal", where, lambda: diag.verify(ReducedComplex(c, q, ZZ, check=False).evaluator))
        for ring in (GF(2), QQ):
            rc = ReducedComplex(c, q, ring, check=False)
            for m in (trivial_module(q, ring), regular_module(q, ring), augmentation_ideal(q, ring)):
                _check(out, f"duality {m.describe()}", f"{where} over {ring}", lambda: _duality(rc, m))
            if c.closed_orientable:
                _check(out, "Poincare duality", f"{where} over {ring}", lambda: _poincare(rc))


def run_verify(exp: Experiment, opts: Options) -> Outcome:
    out = Outcome(headers=("check", "where", "result"))
    contexts = exp.contexts
    if contexts:
        for ctx in contexts:
            qs = dict(select_quotients(exp, opts.quotient, ctx.target.group, ctx.quotients))
            for qname, q in qs.items():
                _check(out, "chain map", f"{ctx.name} / {qname}", lambda: ctx.chain_map.verify(q))
                _check(out, "source dd=0", f"{ctx.name} / {qname}", lambda: ctx.reduction(q, ZZ) and None)
            verify_complex(out, ctx.target, qs)
            verify_complex(out, ctx.source, {f"{k} pulled back": pullback_quotient(ctx.hom, q) for k, q in qs.items()})
    else:
        c = _need_complex(exp, "verify")
        verify_complex(out, c, dict(select_quotients(exp, opts.quotient, c.group, exp.quotients)))
    return out


RUNNERS: dict[str, Callable[[Experiment, Options], Outcome]] = {
    "cohomology": lambda e, o: run_homology(e, o, "cohomology"),
    "homology": lambda e, o: run_homology(e, o, "homology"),
    "induced-map": run_induced,
    "cd": lambda e, o: run_bound(e, o, "cd"),
    "hd": lambda e, o: run_bound(e, o, "hd"),
    "certify-upper": run_certify,
    "product-check": run_product,
    "field-scan": run_field_scan,
    "bs-power": run_bs_power,
    "hd-eq-cd": run_hd_eq_cd,
    "verify": run_verify,
}


# --------------------------------------------------------------------------
# output


def _cell(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, bool):
        return "yes" if x else "no"
    return str(x)


def format_table(headers: tuple[str, ...], rows: list[tuple]) -> str:
    cells = [tuple(headers)] + [tuple(_cell(x) for x in r) for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    lines = ["  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hocodim", description="Dimensions of group homomorphisms through finite quotients.")
    p.add_argument("command", choices=COMMANDS)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec", metavar="FILE", help="experiment file (JSON, schema hocodim/1)")
    src.add_argument("--builtin", metavar="NAME", help="catalog entry, e.g. pinch:2, torus:3 or suite")
    p.add_argument("--json", action="store_true", help="print the machine report instead of tables")
    p.add_argument("--ring", help="q, z or fp:P")
    p.add_argument("--quotient", metavar="NAME")
    p.add_argument("--degrees", metavar="A..B")
    p.add_argument("--support-radius", type=int, metavar="R")
    p.add_argument("--primes", metavar="2,3,5")
    p.add_argument("--budget", type=int, metavar="N", help="largest module dimension in scanned families")
    p.add_argument("--family", help="trivial,regular,aug:J,boundaries,induced:N or default")
    p.add_argument("--level", type=int, help="certificate level for certify-upper")
    p.add_argument("--size-budget", type=int, metavar="N", help="largest product cover rank for product-check")
    p.add_argument("--timings", action="store_true", help="include wall-clock timings in the report")
    return p


def _options(args, params: dict) -> Options:
    def pick(flag, key, default=None):
        return flag if flag is not None else params.get(key, default)

    ring = pick(args.ring, "ring")
    fam = pick(args.family, "family", "default")
    budget = int(pick(args.budget, "budget", DEFAULT_BUDGET))
    if budget < 1:
        raise InputError("budget must be positive")
    level = pick(args.level, "level")
    degrees = pick(args.degrees, "degrees")
    if isinstance(degrees, list) and len(degrees) == 2:
        degrees = f"{degrees[0]}..{degrees[1]}"
    return Options(ring=parse_ring(ring) if ring is not None else None,
                   quotient=pick(args.quotient, "quotient"),
                   degrees=degrees,
                   primes=parse_primes(pick(args.primes, "primes", "2,3,5")),
                   budget=budget,
                   family=FamilySpec.parse(fam),
                   level=int(level) if level is not None else None,
                   size_budget=int(pick(args.size_budget, "size_budget", 4096)))


def execute(args) -> tuple[int, str]:
    """Run one command; returns the exit status and the text to print."""
    t0 = time.perf_counter()
    if args.spec is not None:
        try:
            with open(args.spec, encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as e:
            raise InputError(f"cannot read experiment file: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise SchemaError(f"schema mismatch: experiment file is not valid JSON ({e.msg}, line {e.lineno})") from None
        if isinstance(doc, dict) and doc.get("command") not in (None, args.command):
            raise SchemaError(f"schema mismatch: file declares command {doc['command']!r}, invoked as {args.command!r}")
    else:
        doc = {"schema": SCHEMA, "builtin": args.builtin}
    params = doc.get("parameters", {}) if isinstance(doc, dict) else {}
    radius = args.support_radius if args.support_radius is not None else 3
    if radius < 0:
        raise InputError("support radius must be nonnegative")
    if isinstance(params, dict) and args.support_radius is not None:
        params = dict(params, support_radius=radius)
        doc = dict(doc, parameters=params)
    exp = load_experiment(doc, radius)
    opts = _options(args, exp.params)
    out = RUNNERS[args.command](exp, opts)
    elapsed = time.perf_counter() - t0
    report = {
        "command": args.command,
        "version": __version__,
        "inputs": {"experiment": doc, "options": opts.inputs(),
                   "quotients": {k: quotient_to_json(q) for k, q in sorted(exp.quotients.items())}},
        "results": out.results,
        "witnesses": out.witnesses,
        "certificates": out.certificates,
        "timings": {"total_seconds": round(elapsed, 3)} if args.timings else None,
    }
    status = 0 if out.ok else 1
    if args.json:
        return status, dumps(report)
    text = [f"hocodim {args.command} ({__version__})", format_table(out.headers, out.rows)]
    text += out.notes
    if args.timings:
        text.append(f"time: {elapsed:.3f} s")
    text.append("status: " + ("ok" if out.ok else "FAILED"))
    return status, "\n".join(text) + "\n"


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        status, text = execute(args)
    except WordParseError as e:
        print(f"hocodim: parse error: {e}", file=sys.stderr)
        return 2
    except BudgetExceeded as e:
        print(f"hocodim: size budget exceeded: {e}", file=sys.stderr)
        return 2
    except QuotientTooLarge as e:
        print(f"hocodim: quotient too large: {e}", file=sys.stderr)
        return 2
    except InputError as e:
        print(f"hocodim: input error: {e}", file=sys.stderr)
        return 2
    except (ComplexError, CheckFailed) as e:
        print(f"hocodim: check failed: {e}", file=sys.stderr)
        return 1
    except HocodimError as e:
        print(f"hocodim: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
