"""Lower bounds, certificates and experiments for dimensions of homomorphisms.

Everything here is relative to a finite quotient ``Q`` of the target group
and a finite family of coefficient modules.  A lower bound ``n`` means some
family module has a nonzero induced map in degree ``n``; a certificate at
level ``n`` is a chain homotopy in the reduction that kills every induced
map above ``n``.  Neither is a statement about all ``ZH``-modules.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cohomology import (
    HomologyClass,
    MapReduction,
    QModule,
    augmentation_ideal,
    boundaries_module,
    cap_product,
    cohomology,
    detecting_class,
    external_product_module,
    homology,
    induced_map,
    permutation_module,
    regular_module,
    subgroups,
    tensor_power,
    trivial_module,
)
from .complexes import (
    ChainHomotopy,
    ChainMap,
    EquivariantComplex,
    chain_map_degree1,
    find_homotopy,
    lift_chain_map,
    standard_diagonal,
    tensor_chain_map,
    tensor_complex,
)
from .errors import BudgetExceeded, ComplexError, InputError
from .exactla import QQ, ZZ, CoefficientRing, GF
from .groups import FiniteQuotient, GroupHom, product_quotient

DEFAULT_BUDGET = 128


@dataclass(eq=False)
class HomContext:
    """A homomorphism with models of both groups, a chain map and registered quotients."""

    name: str
    hom: GroupHom
    source: EquivariantComplex
    target: EquivariantComplex
    chain_map: ChainMap
    quotients: dict[str, FiniteQuotient] = field(default_factory=dict)
    _reductions: dict = field(default_factory=dict, repr=False)

    def verify(self):
        """Chain-map identities and ``dd = 0`` on both sides through every registered quotient."""
        for q in self.quotients.values():
            self.chain_map.verify(q)
            self.reduction(q, ZZ)

    def reduction(self, q: FiniteQuotient, ring: CoefficientRing) -> MapReduction:
        key = (id(q), ring)
        hit = self._reductions.get(key)
        if hit is None:
            hit = MapReduction(self.chain_map, q, ring)
            self._reductions[key] = hit
        return hit

    def quotient(self, name: str) -> FiniteQuotient:
        try:
            return self.quotients[name]
        except KeyError:
            raise InputError(f"context {self.name} has no quotient {name!r}") from None

    @property
    def top_degree(self) -> int:
        return max(self.source.length, self.target.length)


def make_context(name: str, hom: GroupHom, source: EquivariantComplex, target: EquivariantComplex,
                 quotients: dict[str, FiniteQuotient] | None = None, radius: int = 3) -> HomContext:
    phi = lift_chain_map(chain_map_degree1(hom, source, target), radius)
    ctx = HomContext(name, hom, source, target, phi, dict(quotients or {}))
    ctx.verify()
    return ctx


# --------------------------------------------------------------------------
# module families


@dataclass(frozen=True)
class FamilySpec:
    trivial: bool = True
    regular: bool = True
    aug_powers: int = 3
    boundaries: bool = True
    induced_index: int = 4

    def describe(self) -> str:
        parts = []
        if self.trivial:
            parts.append("trivial")
        if self.regular:
            parts.append("regular")
        if self.aug_powers:
            parts.append(f"I^j (j<={self.aug_powers})")
        if self.boundaries:
            parts.append("B_k")
        if self.induced_index > 1:
            parts.append(f"Ind(trivial) index<={self.induced_index}")
        return ", ".join(parts) or "empty"

    @classmethod
    def parse(cls, text: str) -> "FamilySpec":
        """Comma separated species: ``trivial``, ``regular``, ``aug:J``, ``boundaries``, ``induced:N``, ``default``."""
        if text.strip() == "default":
            return cls()
        kw = dict(trivial=False, regular=False, aug_powers=0, boundaries=False, induced_index=1)
        for tok in filter(None, (t.strip() for t in text.split(","))):
            name, _, arg = tok.partition(":")
            if name == "trivial":
                kw["trivial"] = True
            elif name == "regular":
                kw["regular"] = True
            elif name == "aug":
                kw["aug_powers"] = int(arg or 1)
            elif name == "boundaries":
                kw["boundaries"] = True
            elif name == "induced":
                kw["induced_index"] = int(arg or 4)
            else:
                raise InputError(f"unknown module species {name!r}")
        return cls(**kw)


@dataclass(eq=False)
class Family:
    modules: list[QModule]
    skipped: list[str]
    spec: FamilySpec


def build_family(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, spec: FamilySpec | None = None,
                 budget: int = DEFAULT_BUDGET, extra: Sequence[QModule] = ()) -> Family:
    """Deterministic module list; modules above ``budget`` dimensions are skipped and recorded."""
    spec = spec or FamilySpec()
    mods: list[QModule] = []
    skipped: list[str] = []

    def add(m: QModule):
        if m.dim == 0:
            return
        if m.dim > budget:
            skipped.append(f"{m.describe()} (dim {m.dim})")
        else:
            mods.append(m)

    if spec.trivial:
        add(trivial_module(q, ring))
    if spec.regular and q.order > 1:
        add(regular_module(q, ring))
    if q.order > 1:
        aug = augmentation_ideal(q, ring)
        for j in range(1, spec.aug_powers + 1):
            if (q.order - 1) ** j > budget:
                skipped.append(f"I^{j} (dim {(q.order - 1) ** j})")
                continue
            add(tensor_power(aug, j) if j > 1 else aug)
    if spec.boundaries:
        rc = ctx.reduction(q, ring).target
        for k in range(rc.length + 1):
            if rc.dim(k) > budget:
                skipped.append(f"B{k} (cover rank {rc.dim(k)})")
                continue
            try:
                add(boundaries_module(rc, k).module)
            except ComplexError:
                skipped.append(f"B{k} (torsion over Z)")
    if spec.induced_index > 1:
        for h in subgroups(q, spec.induced_index):
            if len(h) < q.order:
                add(permutation_module(q, h, ring))
    for m in extra:
        add(m)
    if not mods:
        raise InputError("the module family is empty")
    return Family(mods, skipped, spec)


# --------------------------------------------------------------------------
# scans


@dataclass
class ScanEntry:
    module: str
    degree: int
    rank: int


@dataclass(eq=False)
class Bound:
    """Best degree with a nonzero induced map (``-1`` when none) and its witness."""

    variance: str
    quotient: str
    ring: str
    degree: int
    witness: str | None
    witness_rank: int
    table: list[ScanEntry]
    family: str
    skipped: list[str]
    witness_module: QModule | None = None

    def ranks(self, module: str) -> list[int]:
        return [e.rank for e in self.table if e.module == module]


def _degrees(ctx: HomContext, degrees: Sequence[int] | None) -> list[int]:
    if degrees is None:
        return list(range(ctx.top_degree + 1))
    return sorted(set(int(d) for d in degrees))


def scan(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, variance: str,
         family: Family | None = None, degrees: Sequence[int] | None = None) -> Bound:
    family = family or build_family(ctx, q, ring)
    data = ctx.reduction(q, ring)
    table = []
    best, wit, wrank, wmod = -1, None, 0, None
    for m in family.modules:
        for n in _degrees(ctx, degrees):
            r = induced_map(data, m, n, variance).rank
            table.append(ScanEntry(m.describe(), n, r))
            if r > 0 and n > best:
                best, wit, wrank, wmod = n, m.describe(), r, m
    return Bound(variance, q.describe(), str(ring), best, wit, wrank, table, family.spec.describe(),
                 list(family.skipped), wmod)


def cd_lower(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, family: Family | None = None,
             degrees: Sequence[int] | None = None) -> Bound:
    return scan(ctx, q, ring, "cohomology", family, degrees)


def hd_lower(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, family: Family | None = None,
             degrees: Sequence[int] | None = None) -> Bound:
    return scan(ctx, q, ring, "homology", family, degrees)


# --------------------------------------------------------------------------
# certificates


@dataclass(eq=False)
class Certificate:
    level: int
    quotient: str
    ring: str
    trivial: bool
    homotopy: ChainHomotopy | None

    def describe(self) -> str:
        if self.trivial:
            return f"trivial (complex length) at level {self.level}"
        size = self.homotopy.size if self.homotopy is not None else 0
        return f"chain homotopy at level {self.level} ({size} group-algebra entries)"


def cd_upper_certificate(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, n: int) -> Certificate | None:
    """Homotopy ``D`` with ``Phi - (dD + Dd)`` vanishing above ``n``, or ``None`` if infeasible."""
    if n < 0:
        raise InputError("certificate level must be nonnegative")
    field_ring = ring if ring.is_field else QQ
    trivial = n >= min(ctx.source.length, ctx.target.length)
    h = find_homotopy(ctx.chain_map, q, field_ring, n)
    if h is None:
        return None
    return Certificate(n, q.describe(), str(field_ring), trivial, h)


def cd_upper(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, start: int = 0) -> Certificate:
    """Smallest level at or above ``start`` with a certificate."""
    for n in range(max(start, 0), ctx.top_degree + 1):
        cert = cd_upper_certificate(ctx, q, ring, n)
        if cert is not None:
            return cert
    raise ComplexError("no certificate even at the top degree")


def soundness_recheck(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, level: int,
                      family: Family | None = None) -> list[ScanEntry]:
    """All family induced maps above ``level`` in both variances; returns the offending entries."""
    family = family or build_family(ctx, q, ring)
    degrees = [d for d in range(level + 1, ctx.top_degree + 1)]
    bad = []
    for variance in ("cohomology", "homology"):
        for e in scan(ctx, q, ring, variance, family, degrees).table:
            if e.rank:
                bad.append(e)
    return bad


# --------------------------------------------------------------------------
# field scans


@dataclass(eq=False)
class FieldScan:
    quotient: str
    rows: list[tuple[str, int, int]]
    z_cd: int
    z_hd: int
    max_field_cd: int
    max_field_hd: int
    witness_fields: list[str]

    @property
    def agrees(self) -> bool:
        return self.max_field_cd == self.z_cd


def field_scan(ctx: HomContext, q: FiniteQuotient, primes: Sequence[int] = (2, 3, 5),
               spec: FamilySpec | None = None, budget: int = DEFAULT_BUDGET,
               degrees: Sequence[int] | None = None) -> FieldScan:
    """cd/hd lower bounds over ``Q``, each ``F_p`` and ``Z`` on the same module species."""
    if not primes:
        raise InputError("need at least one prime")
    rows = []
    for ring in [QQ] + [GF(p) for p in primes] + [ZZ]:
        fam = build_family(ctx, q, ring, spec, budget)
        cd = cd_lower(ctx, q, ring, fam, degrees).degree
        hd = hd_lower(ctx, q, ring, fam, degrees).degree
        rows.append((str(ring), cd, hd))
    fields = rows[:-1]
    max_cd = max(r[1] for r in fields)
    max_hd = max(r[2] for r in fields)
    wit = [r[0] for r in fields if r[1] == max_cd]
    return FieldScan(q.describe(), rows, rows[-1][1], rows[-1][2], max_cd, max_hd, wit)


# --------------------------------------------------------------------------
# products


@dataclass(eq=False)
class ProductReport:
    ring: str
    quotient: str
    cd: int
    upper: int
    product_lower: int
    product_witness: str | None
    product_certificate: Certificate | None
    product_upper_level: int

    @property
    def equality(self) -> bool:
        return (self.cd == self.upper and self.product_lower == 2 * self.cd
                and self.product_certificate is not None)


def product_context(ctx: HomContext, q: FiniteQuotient, other: HomContext | None = None,
                    q_other: FiniteQuotient | None = None) -> tuple[HomContext, FiniteQuotient]:
    """``phi x psi`` on tensor complexes with the product quotient ``q x q_other``; ``psi`` defaults to ``phi``."""
    other = other or ctx
    q_other = q_other or q
    src = tensor_complex(ctx.source, other.source)
    tgt = tensor_complex(ctx.target, other.target)
    phi = tensor_chain_map(ctx.chain_map, other.chain_map, src, tgt)
    qq = product_quotient(q, q_other, tgt.group)
    out = HomContext(f"{ctx.name}x{other.name}", phi.hom, src, tgt, phi, {qq.describe(): qq})
    phi.verify(qq)
    return out, qq


def product_experiment(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing,
                       spec: FamilySpec | None = None, budget: int = DEFAULT_BUDGET,
                       size_budget: int = 4096) -> ProductReport:
    """cd of ``phi`` and of ``phi x phi`` from tensored witnesses and a certificate at twice the factor level."""
    fam = build_family(ctx, q, ring, spec, budget)
    low = cd_lower(ctx, q, ring, fam)
    up = cd_upper(ctx, q, ring, max(low.degree, 0))
    pctx, qq = product_context(ctx, q)
    cells = max(pctx.source.ranks) * qq.order
    if cells > size_budget:
        raise BudgetExceeded(f"product complex needs {cells} cover cells (budget {size_budget})")
    witnesses = [m for m in fam.modules if low.degree >= 0 and
                 any(e.module == m.describe() and e.degree == low.degree and e.rank for e in low.table)]
    prod_mods = []
    for a in witnesses:
        for b in witnesses:
            m = external_product_module(a, b, qq)
            if m.dim <= budget:
                prod_mods.append(m)
    if low.degree < 0 or not prod_mods:
        plow = -1
        pwit = None
    else:
        pfam = Family(prod_mods, [], FamilySpec())
        pb = cd_lower(pctx, qq, ring, pfam)
        plow, pwit = pb.degree, pb.witness
    level = 2 * up.level
    cert = cd_upper_certificate(pctx, qq, ring, level)
    return ProductReport(str(ring), q.describe(), low.degree, up.level, plow, pwit, cert, level)


# --------------------------------------------------------------------------
# hd = cd, detecting classes


@dataclass
class HdCdRow:
    context: str
    quotient: str
    ring: str
    cd: int
    hd: int
    cd_witness: str | None
    hd_witness: str | None

    @property
    def equal(self) -> bool:
        return self.cd == self.hd


def hd_equals_cd_suite(contexts: Sequence[HomContext], rings: Sequence[CoefficientRing] = (QQ, GF(2)),
                       spec: FamilySpec | None = None, budget: int = DEFAULT_BUDGET,
                       only: str | None = None) -> list[HdCdRow]:
    rows = []
    for ctx in contexts:
        for qname, q in ctx.quotients.items():
            if only is not None and qname != only:
                continue
            for ring in rings:
                fam = build_family(ctx, q, ring, spec, budget)
                cd = cd_lower(ctx, q, ring, fam)
                hd = hd_lower(ctx, q, ring, fam)
                rows.append(HdCdRow(ctx.name, qname, str(ring), cd.degree, hd.degree, cd.witness, hd.witness))
    return rows


def homology_witness_class(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, module: QModule,
                           n: int) -> HomologyClass | None:
    """``phi_*(a)`` for the first basis class ``a`` of ``H_n(G; M)`` with nonzero image."""
    data = ctx.reduction(q, ring)
    dom = homology(data.coefficients(module, "source"), n)
    f = data.chain_map(module, n)
    cod_coef = data.coefficients(module, "target")
    cod = homology(cod_coef, n)
    for j in range(dom.dim):
        img = f @ dom.reps.column_vector(j)
        if not cod.is_zero_class(img):
            return HomologyClass(cod_coef, n, img)
    return None


def detecting_pairing(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, module: QModule,
                      n: int) -> bool | None:
    """Whether ``b cap gamma != 0`` for ``b`` a nonzero image class and ``gamma`` the detecting class on the target."""
    b = homology_witness_class(ctx, q, ring, module, n)
    if b is None:
        return None
    rc = b.coefficients.rc
    gamma = detecting_class(rc, n)
    prod = cap_product(b, gamma, standard_diagonal(rc.complex))
    return not prod.is_zero()


def detecting_pullback_nonzero(ctx: HomContext, q: FiniteQuotient, ring: CoefficientRing, n: int) -> bool:
    """Whether ``phi^*`` of the degree-``n`` detecting class on the target is nonzero."""
    data = ctx.reduction(q, ring)
    rc = data.target
    bm = boundaries_module(rc, n)
    gamma = detecting_class(rc, n, bm, data.coefficients(bm.module, "target"))
    pulled = data.cochain_map(bm.module, n) @ gamma.vector
    return not cohomology(data.coefficients(bm.module, "source"), n).is_zero_class(pulled)
