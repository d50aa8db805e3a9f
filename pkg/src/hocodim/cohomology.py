"""Coefficient modules over finite quotients and (co)homology of reduced complexes.

With a free chain module ``ring[Q]^r`` both ``Hom(ring[Q]^r, M)`` and
``M (x) ring[Q]^r`` are identified with ``M^r``.  A cochain ``f`` is then
the list of values ``f(e_i)`` and ``(delta f)(e_i) = sum_j rho(D[i][j]) f(e_j)``.
Right actions needed for tensor products are turned into left actions
through ``g -> g^-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import ComplexError, InputError, RingMismatch
from .exactla import (
    ZZ,
    CoefficientRing,
    ExactMatrix,
    column_space_basis,
    hstack,
    integer_kernel_basis,
    inverse,
    kernel_basis,
    kron,
    rank,
    smith_normal_form,
    solve,
    subquotient_dim,
)
from .groups import FiniteQuotient, GroupHom
from .complexes import Diagonal, ReducedComplex


@dataclass(frozen=True, eq=False)
class QModule:
    """A representation ``rho: Q -> GL_d(ring)``, one matrix per element of ``Q``.

    Over ``Z`` the underlying group is free abelian of rank ``d``.
    """

    quotient: FiniteQuotient
    ring: CoefficientRing
    matrices: tuple[ExactMatrix, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "matrices", tuple(self.matrices))
        if len(self.matrices) != self.quotient.order:
            raise InputError("a module needs one matrix per quotient element")
        d = self.matrices[0].rows
        for m in self.matrices:
            if m.shape != (d, d) or m.ring != self.ring:
                raise InputError("module matrices must be square of one size over the module's ring")

    @property
    def dim(self) -> int:
        return self.matrices[0].rows

    def validate(self):
        """``rho(e) = 1`` and ``rho(a) rho(x) = rho(ax)`` for every ``a`` and generator image ``x``."""
        q = self.quotient
        if self.matrices[0] != ExactMatrix.identity(self.ring, self.dim):
            raise InputError(f"module {self.label}: identity does not act trivially")
        for g in range(q.source.ngens):
            x = q.index[q.generator_images[g]]
            for a in range(q.order):
                if self.matrices[a] @ self.matrices[x] != self.matrices[int(q.mult[a, x])]:
                    raise InputError(f"module {self.label}: action does not factor through {q.describe()}")
        return self

    @classmethod
    def from_generators(cls, q: FiniteQuotient, ring: CoefficientRing, gens: Sequence[ExactMatrix],
                        label: str = "") -> "QModule":
        """Module from one matrix per generator of ``q.source``; verified to factor through ``Q``."""
        if len(gens) != q.source.ngens:
            raise InputError(f"need {q.source.ngens} generator matrices")
        gens = [g if isinstance(g, ExactMatrix) else ExactMatrix(ring, g) for g in gens]
        d = gens[0].rows if gens else 1
        invs = [inverse(g) for g in gens]
        mats = []
        for w in q.words:
            m = ExactMatrix.identity(ring, d)
            for g, s in w.unit_letters():
                m = m @ (gens[g] if s > 0 else invs[g])
            mats.append(m)
        out = cls(q, ring, tuple(mats), label)
        for g in range(q.source.ngens):
            if out.matrices[q.index[q.generator_images[g]]] != gens[g]:
                raise InputError(f"module {label}: generator matrices do not factor through {q.describe()}")
        return out.validate()

    @cached_property
    def stack(self) -> np.ndarray:
        return np.stack([m.a for m in self.matrices]) if self.dim else np.zeros((self.quotient.order, 0, 0), dtype=object)

    def act(self, coeffs: np.ndarray) -> np.ndarray:
        """``rho`` of the group-algebra element with coefficient vector ``coeffs``."""
        nz = np.nonzero(coeffs)[0]
        d = self.dim
        out = np.zeros((d, d), dtype=self.stack.dtype)
        for x in nz:
            out = out + self.stack[x] * int(coeffs[x])
        return ExactMatrix(self.ring, out).a

    def act_bar(self, coeffs: np.ndarray) -> np.ndarray:
        """``rho`` of the conjugate element ``sum c_g g^-1``."""
        bar = np.zeros_like(coeffs)
        bar[self.quotient.inv] = coeffs
        return self.act(bar)

    def element(self, x: int) -> ExactMatrix:
        return self.matrices[x]

    def change_ring(self, ring: CoefficientRing, label: str | None = None) -> "QModule":
        if self.ring != ZZ and ring != self.ring:
            raise RingMismatch("only integral modules can change rings")
        return QModule(self.quotient, ring, tuple(m.change_ring(ring) for m in self.matrices),
                       self.label if label is None else label)

    def describe(self) -> str:
        return self.label or f"module(dim {self.dim})"


def trivial_module(q: FiniteQuotient, ring: CoefficientRing, dim: int = 1) -> QModule:
    eye = ExactMatrix.identity(ring, dim)
    return QModule(q, ring, (eye,) * q.order, "trivial" if dim == 1 else f"trivial^{dim}")


def regular_module(q: FiniteQuotient, ring: CoefficientRing) -> QModule:
    n = q.order
    mats = []
    for g in range(n):
        m = np.zeros((n, n), dtype=np.int64)
        m[q.mult[g, :], np.arange(n)] = 1
        mats.append(ExactMatrix(ring, m))
    return QModule(q, ring, tuple(mats), "regular")


def augmentation_ideal(q: FiniteQuotient, ring: CoefficientRing) -> QModule:
    """Kernel of ``ring[Q] -> ring`` with basis ``b_x = x - e`` for ``x != e`` in table order.

    ``g b_x = b_{gx} - b_g`` (with ``b_e = 0``).
    """
    n = q.order
    mats = []
    for g in range(n):
        m = np.zeros((n - 1, n - 1), dtype=np.int64)
        for x in range(1, n):
            gx = int(q.mult[g, x])
            if gx:
                m[gx - 1, x - 1] += 1
            if g:
                m[g - 1, x - 1] -= 1
        mats.append(ExactMatrix(ring, m))
    return QModule(q, ring, tuple(mats), "I")


def _same_quotient(m: QModule, n: QModule):
    if m.quotient is not n.quotient:
        raise InputError("modules live over different quotients")
    if m.ring != n.ring:
        raise RingMismatch("modules live over different rings")


def tensor_module(m: QModule, n: QModule, label: str | None = None) -> QModule:
    """Diagonal action ``g (a (x) b) = ga (x) gb``."""
    _same_quotient(m, n)
    mats = tuple(kron(a, b) for a, b in zip(m.matrices, n.matrices))
    return QModule(m.quotient, m.ring, mats, label or f"{m.describe()}(x){n.describe()}")


def tensor_power(m: QModule, k: int) -> QModule:
    if k < 1:
        return trivial_module(m.quotient, m.ring)
    out = m
    for _ in range(k - 1):
        out = tensor_module(out, m)
    return QModule(m.quotient, m.ring, out.matrices, f"{m.describe()}^{k}")


def dual_module(m: QModule) -> QModule:
    inv = m.quotient.inv
    mats = tuple(m.matrices[int(inv[g])].T for g in range(m.quotient.order))
    return QModule(m.quotient, m.ring, mats, f"{m.describe()}*")


def pullback_module(m: QModule, phi: GroupHom) -> QModule:
    """``m`` restricted along ``phi`` to the pulled-back quotient of ``phi.source``."""
    from .groups import pullback_quotient

    qs = pullback_quotient(phi, m.quotient)
    mats = tuple(m.matrices[m.quotient.index[p]] for p in qs.elements)
    return QModule(qs, m.ring, mats, f"{m.describe()}*")


def restrict_module(m: QModule, sub: FiniteQuotient) -> QModule:
    """``m`` restricted to a quotient whose permutations form a subgroup of ``m.quotient``."""
    if not m.quotient.contains_perms_of(sub):
        raise InputError("not a subgroup of the module's quotient")
    mats = tuple(m.matrices[m.quotient.index[p]] for p in sub.elements)
    return QModule(sub, m.ring, mats, m.label)


def external_product_module(m: QModule, n: QModule, q: FiniteQuotient) -> QModule:
    """``m (x) n`` over the product quotient ``q = Q1 x Q2`` acting factorwise."""
    from .groups import split_product_element

    if m.ring != n.ring:
        raise RingMismatch("modules live over different rings")
    parts = split_product_element(q, m.quotient, n.quotient)
    mats = tuple(kron(m.matrices[a], n.matrices[b]) for a, b in parts)
    return QModule(q, m.ring, mats, f"{m.describe()}[x]{n.describe()}")


# --------------------------------------------------------------------------
# subgroups and induction


def subgroup_closure(q: FiniteQuotient, gens: Sequence[int]) -> frozenset[int]:
    out = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = int(q.mult[a, g])
                if b not in out:
                    out.add(b)
                    nxt.append(b)
        frontier = nxt
    return frozenset(out)


def subgroups(q: FiniteQuotient, max_index: int) -> list[frozenset[int]]:
    """Subgroups generated by at most two elements with index at most ``max_index``.

    Sorted by index, then by their sorted element lists.
    """
    seen = set()
    n = q.order
    for x in range(n):
        for y in range(x, n):
            h = subgroup_closure(q, (x, y))
            if n // len(h) <= max_index:
                seen.add(h)
    return sorted(seen, key=lambda h: (n // len(h), sorted(h)))


def _check_subgroup(q: FiniteQuotient, sub: frozenset[int]):
    if 0 not in sub or any(int(q.mult[a, b]) not in sub for a in sub for b in sub):
        raise InputError("subset is not closed under products")


def coset_representatives(q: FiniteQuotient, sub: frozenset[int]) -> list[int]:
    """Minimal element-table index in each left coset ``g Q'``, in increasing order."""
    _check_subgroup(q, sub)
    covered: set[int] = set()
    reps = []
    for g in range(q.order):
        if g in covered:
            continue
        reps.append(g)
        covered.update(int(q.mult[g, h]) for h in sub)
    return reps


def _induce(q: FiniteQuotient, sub: frozenset[int], block, d: int, ring: CoefficientRing, label: str) -> QModule:
    """``rho(x)`` has block ``(j, i)`` equal to ``block(h)`` where ``x g_i = g_j h``."""
    reps = coset_representatives(q, sub)
    m = len(reps)
    inv = q.inv
    mats = []
    for x in range(q.order):
        out = np.zeros((m * d, m * d), dtype=object)
        for i, gi in enumerate(reps):
            y = int(q.mult[x, gi])
            for j, gj in enumerate(reps):
                h = int(q.mult[inv[gj], y])
                if h in sub:
                    out[j * d:(j + 1) * d, i * d:(i + 1) * d] = block(h)
                    break
        mats.append(ExactMatrix(ring, out))
    return QModule(q, ring, tuple(mats), label)


def induced_module(m: QModule, q: FiniteQuotient) -> QModule:
    """``Ind`` from ``m.quotient`` (a permutation subgroup of ``q``) to ``q``."""
    if not q.contains_perms_of(m.quotient):
        raise InputError("module quotient is not a subgroup of the target quotient")
    sub = frozenset(q.index[p] for p in m.quotient.elements)
    sq = m.quotient
    return _induce(q, sub, lambda h: m.matrices[sq.index[q.elements[h]]].a, m.dim, m.ring,
                   f"Ind({m.describe()})")


def permutation_module(q: FiniteQuotient, sub: frozenset[int], ring: CoefficientRing) -> QModule:
    """``ring[Q/Q']``: the module induced from the trivial module of ``Q'``."""
    one = np.ones((1, 1), dtype=np.int64)
    name = "{" + ",".join(map(str, sorted(sub))) + "}"
    return _induce(q, sub, lambda h: one, 1, ring, f"Ind_{name}(trivial)")


# --------------------------------------------------------------------------
# cochain and chain complexes with module coefficients


def _assemble(ring: CoefficientRing, nrow: int, ncol: int, d_row: int, d_col: int, blocks) -> ExactMatrix:
    out = np.zeros((nrow * d_row, ncol * d_col), dtype=ring.dtype)
    for (i, j), b in blocks:
        out[i * d_row:(i + 1) * d_row, j * d_col:(j + 1) * d_col] = b
    return ExactMatrix(ring, out)


class Coefficients:
    """A reduced complex paired with a module over the same quotient and ring.

    Cochains of degree ``k`` are vectors in ``M^{r_k}`` (block ``i`` is the
    value on cell ``i``), and so are chains.
    """

    def __init__(self, rc: ReducedComplex, module: QModule):
        mq, rq = module.quotient, rc.quotient
        if mq is not rq and (mq.source != rq.source or mq.elements != rq.elements
                             or mq.generator_images != rq.generator_images):
            raise InputError(f"module over {module.quotient.describe()} cannot be used on {rc.describe()}")
        if module.ring != rc.ring:
            raise RingMismatch(f"module over {module.ring} cannot be used on a reduction over {rc.ring}")
        self.rc, self.module = rc, module
        self._cob: dict[int, ExactMatrix] = {}
        self._bd: dict[int, ExactMatrix] = {}

    @property
    def ring(self) -> CoefficientRing:
        return self.rc.ring

    def dim(self, k: int) -> int:
        return self.rc.rank(k) * self.module.dim

    def coboundary(self, k: int) -> ExactMatrix:
        """``delta_k: C^{k-1} -> C^k``; block ``(i, j)`` is ``rho(D_k[i][j])``."""
        if k not in self._cob:
            v = self.rc.vectors(k)
            d = self.module.dim
            blocks = [((i, j), self.module.act(v[i, j])) for i in range(v.shape[0]) for j in range(v.shape[1])
                      if v[i, j].any()]
            self._cob[k] = _assemble(self.ring, self.rc.rank(k), self.rc.rank(k - 1), d, d, blocks)
        return self._cob[k]

    def boundary(self, k: int) -> ExactMatrix:
        """``d_k: C_k -> C_{k-1}``; block ``(j, i)`` is ``rho(bar D_k[i][j])``."""
        if k not in self._bd:
            v = self.rc.vectors(k)
            d = self.module.dim
            blocks = [((j, i), self.module.act_bar(v[i, j])) for i in range(v.shape[0]) for j in range(v.shape[1])
                      if v[i, j].any()]
            self._bd[k] = _assemble(self.ring, self.rc.rank(k - 1), self.rc.rank(k), d, d, blocks)
        return self._bd[k]

    def describe(self) -> str:
        return f"{self.rc.describe()} ; {self.module.describe()}"


@dataclass(frozen=True)
class AbelianInvariants:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion coefficients must form a divisibility chain")
        if any(t <= 1 for t in self.torsion):
            raise ValueError("torsion coefficients must exceed 1")

    def t_p(self, p: int) -> int:
        """Number of torsion summands of order divisible by ``p``."""
        return sum(1 for t in self.torsion if t % p == 0)

    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) or "0"


@dataclass(eq=False)
class HomologyGroup:
    """(Co)homology in one degree.

    Over a field ``dim`` is the dimension and ``reps`` holds representative
    columns; over ``Z`` ``invariants`` is set, ``cycles`` is an integral
    basis of the (co)cycles and ``reps`` is ``None``.
    """

    coefficients: Coefficients
    degree: int
    variance: str
    cycles: ExactMatrix
    boundaries: ExactMatrix
    dim: int
    reps: ExactMatrix | None = None
    invariants: AbelianInvariants | None = None

    @property
    def ring(self) -> CoefficientRing:
        return self.coefficients.ring

    def coords(self, vec: ExactMatrix) -> list:
        """Coordinates in ``reps`` of the class of the (co)cycle ``vec`` (field case)."""
        if self.reps is None:
            raise RingMismatch("coordinates need a field")
        if self.dim == 0:
            return []
        sol = solve(hstack([self.reps, self.boundaries], rows=vec.rows), vec)
        if sol is None:
            raise ComplexError("vector is not a (co)cycle")
        return [sol.entry(i, 0) for i in range(self.dim)]

    def is_zero_class(self, vec: ExactMatrix) -> bool:
        if self.boundaries.cols == 0:
            return vec.is_zero()
        return solve(self.boundaries, vec) is not None


def _dims_check(coef: Coefficients, n: int):
    if n < 0:
        raise InputError("degree must be nonnegative")


def cohomology(coef: Coefficients | ReducedComplex, module: QModule | None = None, n: int | None = None) -> HomologyGroup:
    """``H^n`` of ``Hom(C, M)``; accepts ``(coefficients, n)`` or ``(reduced complex, module, n)``."""
    if not isinstance(coef, Coefficients):
        coef = Coefficients(coef, module)
    elif n is None:
        n = module
    _dims_check(coef, n)
    d_in, d_out = coef.coboundary(n), coef.coboundary(n + 1)
    return _subquotient(coef, n, "cohomology", d_out, d_in, coef.dim(n))


def homology(coef: Coefficients | ReducedComplex, module: QModule | None = None, n: int | None = None) -> HomologyGroup:
    """``H_n`` of ``M (x) C``; same calling conventions as :func:`cohomology`."""
    if not isinstance(coef, Coefficients):
        coef = Coefficients(coef, module)
    elif n is None:
        n = module
    _dims_check(coef, n)
    d_out, d_in = coef.boundary(n), coef.boundary(n + 1)
    return _subquotient(coef, n, "homology", d_out, d_in, coef.dim(n))


def _snf_rank_torsion(a: ExactMatrix) -> tuple[int, list[int]]:
    if a.rows == 0 or a.cols == 0:
        return 0, []
    snf = smith_normal_form(a)
    return snf.rank, [t for t in snf.invariant_factors() if t > 1]


def _subquotient(coef: Coefficients, n: int, variance: str, d_out: ExactMatrix, d_in: ExactMatrix,
                 size: int) -> HomologyGroup:
    ring = coef.ring
    if ring.is_field:
        z = kernel_basis(d_out)
        b = column_space_basis(d_in)
        dim, reps = subquotient_dim(z, b)
        return HomologyGroup(coef, n, variance, z, b, dim, reps=reps)
    if d_out.rows == 0 or size == 0:
        z = ExactMatrix.identity(ring, size)
    else:
        z = integer_kernel_basis(d_out)
    r_out, _ = _snf_rank_torsion(d_out)
    r_in, torsion = _snf_rank_torsion(d_in)
    inv = AbelianInvariants(size - r_out - r_in, tuple(torsion))
    return HomologyGroup(coef, n, variance, z, d_in, inv.free_rank, invariants=inv)


# --------------------------------------------------------------------------
# classes and products


def _column(ring: CoefficientRing, values) -> ExactMatrix:
    vals = np.asarray(values, dtype=object).reshape(-1, 1)
    return ExactMatrix(ring, vals)


@dataclass(eq=False)
class CohomologyClass:
    """Class of a cocycle ``vector`` (column in ``M^{r_n}``)."""

    coefficients: Coefficients
    degree: int
    vector: ExactMatrix

    def __post_init__(self):
        coef = self.coefficients
        if self.vector.shape != (coef.dim(self.degree), 1):
            raise InputError("cochain has the wrong size")
        if not (coef.coboundary(self.degree + 1) @ self.vector).is_zero():
            raise ComplexError(f"cochain of degree {self.degree} is not a cocycle")

    @property
    def module(self) -> QModule:
        return self.coefficients.module

    def block(self, i: int) -> np.ndarray:
        d = self.module.dim
        return self.vector.a[i * d:(i + 1) * d, 0]

    def group(self) -> HomologyGroup:
        return cohomology(self.coefficients, self.degree)

    def is_zero(self) -> bool:
        return self.group().is_zero_class(self.vector)


@dataclass(eq=False)
class HomologyClass:
    """Class of a cycle ``vector`` (column in ``M^{r_n}``)."""

    coefficients: Coefficients
    degree: int
    vector: ExactMatrix

    def __post_init__(self):
        coef = self.coefficients
        if self.vector.shape != (coef.dim(self.degree), 1):
            raise InputError("chain has the wrong size")
        if not (coef.boundary(self.degree) @ self.vector).is_zero():
            raise ComplexError(f"chain of degree {self.degree} is not a cycle")

    @property
    def module(self) -> QModule:
        return self.coefficients.module

    def block(self, i: int) -> np.ndarray:
        d = self.module.dim
        return self.vector.a[i * d:(i + 1) * d, 0]

    def group(self) -> HomologyGroup:
        return homology(self.coefficients, self.degree)

    def is_zero(self) -> bool:
        return self.group().is_zero_class(self.vector)


def classes(h: HomologyGroup) -> list:
    """Representative classes of a field (co)homology group."""
    kind = CohomologyClass if h.variance == "cohomology" else HomologyClass
    return [kind(h.coefficients, h.degree, h.reps.column_vector(j)) for j in range(h.dim)]


def cup_product(u: CohomologyClass, v: CohomologyClass, diagonal: Diagonal,
                coefficients: Coefficients | None = None) -> CohomologyClass:
    """``(u (x) v) o D`` with the Koszul sign ``(-1)^{pq}``; coefficients ``M (x) N``."""
    rc = u.coefficients.rc
    if v.coefficients.rc is not rc:
        raise InputError("cup product needs classes on the same reduction")
    if diagonal.complex is not rc.complex:
        raise InputError("diagonal lives on a different complex")
    p, q = u.degree, v.degree
    n = p + q
    mod = coefficients.module if coefficients is not None else tensor_module(u.module, v.module)
    coef = coefficients or Coefficients(rc, mod)
    dm, dn = u.module.dim, v.module.dim
    ring = rc.ring
    sign = -1 if (p * q) % 2 else 1
    out = np.zeros((rc.rank(n) * dm * dn, 1), dtype=ring.dtype)
    if n <= rc.length:
        sm, sn = u.module.stack, v.module.stack
        for i in range(rc.rank(n)):
            acc = np.zeros(dm * dn, dtype=object)
            for c, pp, a, g, b, h in diagonal.reduced_terms(rc.evaluator, n, i):
                if pp != p:
                    continue
                x = sm[g].dot(u.block(a))
                y = sn[h].dot(v.block(b))
                acc = acc + np.kron(x, y) * (c * sign)
            out[i * dm * dn:(i + 1) * dm * dn, 0] = acc
    return CohomologyClass(coef, n, ExactMatrix(ring, out))


def cap_product(a: HomologyClass, u: CohomologyClass, diagonal: Diagonal,
                coefficients: Coefficients | None = None) -> HomologyClass:
    """``(m (x) x) cap u = sum c (rho(g)^-1 m (x) rho(g^-1 h) u_b) (x) e_a`` over ``D(x)`` terms of bidegree ``(n-k, k)``."""
    rc = a.coefficients.rc
    if u.coefficients.rc is not rc:
        raise InputError("cap product needs classes on the same reduction")
    n, k = a.degree, u.degree
    if k > n:
        raise InputError("cap product needs the cochain degree to be at most the chain degree")
    mod = coefficients.module if coefficients is not None else tensor_module(a.module, u.module)
    coef = coefficients or Coefficients(rc, mod)
    dm, dn = a.module.dim, u.module.dim
    ring = rc.ring
    q = rc.quotient
    inv, mult = q.inv, q.mult
    sm, sn = a.module.stack, u.module.stack
    out = np.zeros((rc.rank(n - k) * dm * dn, 1), dtype=object)
    for i in range(rc.rank(n)):
        m = a.block(i)
        if not np.any(m != 0):
            continue
        for c, pp, cell, g, b, h in diagonal.reduced_terms(rc.evaluator, n, i):
            if pp != n - k:
                continue
            gi = int(inv[g])
            x = sm[gi].dot(m)
            y = sn[int(mult[gi, h])].dot(u.block(b))
            out[cell * dm * dn:(cell + 1) * dm * dn, 0] += np.kron(x, y) * c
    return HomologyClass(coef, n - k, ExactMatrix(ring, out))


def fundamental_class(rc: ReducedComplex) -> HomologyClass:
    """Sum of the top cells with trivial coefficients on a closed orientable model."""
    c = rc.complex
    if not c.closed_orientable:
        raise InputError(f"{c.label()} is not a bundled closed orientable model")
    coef = Coefficients(rc, trivial_module(rc.quotient, rc.ring))
    vec = _column(rc.ring, [1] * rc.rank(c.length))
    return HomologyClass(coef, c.length, vec)


# --------------------------------------------------------------------------
# induced maps


class MapReduction:
    """Both sides of a chain map reduced through one quotient of the target group."""

    def __init__(self, phi, q: FiniteQuotient, ring: CoefficientRing):
        self.phi, self.quotient, self.ring = phi, q, ring
        self.target = ReducedComplex(phi.target, q, ring)
        self.source = ReducedComplex(phi.source, q, ring, hom=phi.hom)
        self._coef: dict[tuple[int, str], Coefficients] = {}
        self._vec: dict[int, np.ndarray] = {}

    def coefficients(self, module: QModule, side: str) -> Coefficients:
        key = (id(module), side)
        hit = self._coef.get(key)
        if hit is None or hit.module is not module:
            hit = Coefficients(self.source if side == "source" else self.target, module)
            self._coef[key] = hit
        return hit

    def component_vectors(self, k: int) -> np.ndarray:
        if k not in self._vec:
            self._vec[k] = self.target.evaluator.vectors(self.phi.component(k))
        return self._vec[k]

    def cochain_map(self, module: QModule, k: int) -> ExactMatrix:
        """``Phi^*: C^k(H; M) -> C^k(G; M)``; block ``(i, j)`` is ``rho(Phi_k[i][j])``."""
        v = self.component_vectors(k)
        d = module.dim
        blocks = [((i, j), module.act(v[i, j])) for i in range(v.shape[0]) for j in range(v.shape[1]) if v[i, j].any()]
        return _assemble(self.ring, v.shape[0], v.shape[1], d, d, blocks)

    def chain_map(self, module: QModule, k: int) -> ExactMatrix:
        """``Phi_*: C_k(G; M) -> C_k(H; M)``; block ``(j, i)`` is ``rho(bar Phi_k[i][j])``."""
        v = self.component_vectors(k)
        d = module.dim
        blocks = [((j, i), module.act_bar(v[i, j])) for i in range(v.shape[0]) for j in range(v.shape[1]) if v[i, j].any()]
        return _assemble(self.ring, v.shape[1], v.shape[0], d, d, blocks)


@dataclass(eq=False)
class InducedMap:
    variance: str
    degree: int
    matrix: ExactMatrix | None
    rank: int
    nonzero: bool
    domain: HomologyGroup
    codomain: HomologyGroup


def _mod_rank(mat: ExactMatrix, b: ExactMatrix) -> int:
    if mat.cols == 0:
        return 0
    if b.cols == 0:
        return rank(mat)
    return rank(hstack([mat, b])) - rank(b)


def induced_map(data: MapReduction, module: QModule, n: int, variance: str = "cohomology") -> InducedMap:
    """Matrix and rank of ``phi^*`` on ``H^n`` (or ``phi_*`` on ``H_n``).

    Over ``Z`` ``matrix`` is ``None`` and ``nonzero`` records whether some
    integral (co)cycle has a nonzero image class.
    """
    if variance not in ("cohomology", "homology"):
        raise InputError(f"unknown variance {variance!r}")
    if variance == "cohomology":
        dom = cohomology(data.coefficients(module, "target"), n)
        cod = cohomology(data.coefficients(module, "source"), n)
        f = data.cochain_map(module, n)
    else:
        dom = homology(data.coefficients(module, "source"), n)
        cod = homology(data.coefficients(module, "target"), n)
        f = data.chain_map(module, n)
    if data.ring.is_field:
        img = f @ dom.reps if dom.dim else ExactMatrix.zeros(data.ring, f.rows, 0)
        r = _mod_rank(img, cod.boundaries)
        mat = ExactMatrix(data.ring, np.array([cod.coords(img.column_vector(j)) for j in range(img.cols)],
                                              dtype=object).reshape(img.cols, cod.dim).T) if img.cols and cod.dim \
            else ExactMatrix.zeros(data.ring, cod.dim, dom.dim)
        return InducedMap(variance, n, mat, r, r > 0, dom, cod)
    nonzero = False
    if dom.cycles.cols and f.rows:
        img = f @ dom.cycles
        for j in range(img.cols):
            col = img.column_vector(j)
            if col.is_zero():
                continue
            if cod.boundaries.cols == 0 or solve(cod.boundaries, col) is None:
                nonzero = True
                break
    return InducedMap(variance, n, None, int(nonzero), nonzero, dom, cod)


# --------------------------------------------------------------------------
# Berstein-Schwarz class


def bs_class(rc: ReducedComplex, coefficients: Coefficients | None = None) -> CohomologyClass:
    """``beta(e_i) = sum_j D_1[i][j]`` in ``I_Q`` (coordinates ``x - e``, ``x != e``)."""
    coef = coefficients or Coefficients(rc, augmentation_ideal(rc.quotient, rc.ring))
    n = rc.quotient.order
    v = rc.vectors(1)
    rows = []
    for i in range(rc.rank(1)):
        s = v[i].sum(axis=0) if v.shape[1] else np.zeros(n, dtype=np.int64)
        if s.sum() != 0:
            raise ComplexError("degree-1 boundary does not land in the augmentation ideal")
        rows.extend(s[1:].tolist())
    return CohomologyClass(coef, 1, _column(rc.ring, rows))


def bs_power(rc: ReducedComplex, k: int, diagonal: Diagonal) -> CohomologyClass:
    """``beta^k`` with coefficients ``I_Q^{(x)k}`` by iterated cup products."""
    if k < 1:
        raise InputError("power must be positive")
    beta = bs_class(rc)
    out = beta
    for j in range(2, k + 1):
        mod = tensor_power(beta.module, j)
        out = cup_product(out, beta, diagonal, Coefficients(rc, mod))
    return out


# --------------------------------------------------------------------------
# boundaries modules and detecting classes


@dataclass(eq=False)
class BoundariesModule:
    """``C_k / im d_{k+1}`` of the cover complex with its residual ``Q``-action.

    ``projection`` maps cover chains (blocks of ``|Q|`` per cell) to the
    chosen basis of the quotient.
    """

    module: QModule
    projection: ExactMatrix
    degree: int


def boundaries_module(rc: ReducedComplex, k: int) -> BoundariesModule:
    if rc.hom is not None:
        raise InputError("boundaries modules are built on a reduction without a homomorphism")
    ring = rc.ring
    size = rc.dim(k)
    bd = rc.boundary_matrix(k + 1)
    if ring.is_field:
        img = column_space_basis(bd)
        r = img.cols
        full = hstack([img, ExactMatrix.identity(ring, size)])
        _, piv = _pivots(full)
        t = full[:, piv]
        t_inv = inverse(t)
    else:
        if bd.cols and bd.rows:
            snf = smith_normal_form(bd)
            if any(d > 1 for d in snf.invariant_factors()):
                raise ComplexError(f"C_{k} / im d_{k + 1} has torsion; no integral boundaries module")
            r = snf.rank
            t_inv = snf.U
            t = inverse(snf.U)
        else:
            r = 0
            t = t_inv = ExactMatrix.identity(ring, size)
    mats = []
    for g in range(rc.quotient.order):
        lg = ExactMatrix(ring, rc.left_action(k, g))
        mats.append((t_inv @ lg @ t)[r:, r:])
    mod = QModule(rc.quotient, ring, tuple(mats), f"B{k}")
    return BoundariesModule(mod, t_inv[r:, :], k)


def _pivots(a: ExactMatrix):
    from .exactla import rref

    return rref(a)


def detecting_class(rc: ReducedComplex, k: int, bm: BoundariesModule | None = None,
                    coefficients: Coefficients | None = None) -> CohomologyClass:
    """Class of the projection ``C_k -> B_k``: value on cell ``i`` is the image of ``e * e_i``."""
    bm = bm or boundaries_module(rc, k)
    coef = coefficients or Coefficients(rc, bm.module)
    n = rc.quotient.order
    cols = [bm.projection.column_vector(i * n) for i in range(rc.rank(k))]
    if cols:
        vec = ExactMatrix(rc.ring, np.concatenate([c.a for c in cols], axis=0))
    else:
        vec = ExactMatrix.zeros(rc.ring, 0, 1)
    return CohomologyClass(coef, k, vec)


# --------------------------------------------------------------------------
# Shapiro lemma


@dataclass
class ShapiroRow:
    variance: str
    degree: int
    big: int
    small: int

    @property
    def ok(self) -> bool:
        return self.big == self.small


def shapiro_check(big, small, inclusion: GroupHom, q: FiniteQuotient, module: QModule,
                  degrees: Sequence[int] | None = None) -> list[ShapiroRow]:
    """Compare ``H(G; Ind M)`` with ``H(G'; M)`` for ``G'`` the preimage of a subgroup of ``Q``.

    ``small`` models ``G'``, ``inclusion: G' -> G`` and ``module`` lives on
    the pulled-back quotient ``q o inclusion``.
    """
    from .groups import pullback_quotient

    qs = pullback_quotient(inclusion, q)
    if module.quotient.elements != qs.elements:
        raise InputError("module must live on the pulled-back subgroup quotient")
    mod = QModule(qs, module.ring, module.matrices, module.label)
    ring = module.ring
    ind = induced_module(mod, q)
    rc_big = ReducedComplex(big, q, ring)
    rc_small = ReducedComplex(small, qs, ring)
    top = max(big.length, small.length)
    degrees = list(range(top + 1)) if degrees is None else list(degrees)
    cb, cs = Coefficients(rc_big, ind), Coefficients(rc_small, mod)
    out = []
    for k in degrees:
        out.append(ShapiroRow("homology", k, homology(cb, k).dim, homology(cs, k).dim))
        out.append(ShapiroRow("cohomology", k, cohomology(cb, k).dim, cohomology(cs, k).dim))
    return out
