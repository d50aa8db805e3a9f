"""Free equivariant chain complexes of aspherical models.

A complex ``C`` over a group ``G`` has ``r_k`` free generators ("cells") in
degree ``k``.  Boundaries are group-ring matrices in the row convention: a
chain is a row vector ``x`` over ``ZG`` and ``d(x) = x @ D_k`` with ``D_k`` of
shape ``r_k x r_{k-1}``.  So ``D_k[i][j]`` is the coefficient of cell ``j``
in the boundary of cell ``i``, and composition reads left to right.

Every identity over ``ZG`` is checked only after reducing through finite
quotients.  For the bundled constructors the identities hold by
construction; for user input the checks are quotient-relative, since the
word problem is undecidable in general.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ComplexError, InputError
from .exactla import ZZ, CoefficientRing, ExactMatrix
from .groups import (
    FiniteQuotient,
    FpGroup,
    GroupHom,
    GroupRingElement,
    Word,
    direct_product,
    free_group,
    surface_group,
    trivial_group,
)

ONE = GroupRingElement.one
ZERO = GroupRingElement.zero


class GRMatrix:
    """Dense matrix of group-ring elements."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Sequence[Sequence[GroupRingElement]] | None = None):
        self.rows, self.cols = rows, cols
        if entries is None:
            entries = [[ZERO() for _ in range(cols)] for _ in range(rows)]
        ent = tuple(tuple(r) for r in entries)
        if len(ent) != rows or any(len(r) != cols for r in ent):
            raise InputError(f"group ring matrix entries do not match shape {rows}x{cols}")
        self.entries = ent

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "GRMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "GRMatrix":
        return cls(n, n, [[ONE() if i == j else ZERO() for j in range(n)] for i in range(n)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[GroupRingElement]], cols: int | None = None) -> "GRMatrix":
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> GroupRingElement:
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "GRMatrix") -> "GRMatrix":
        if self.cols != other.rows:
            raise InputError("group ring matrix shapes do not match")
        out = []
        for i in range(self.rows):
            row = []
            for k in range(other.cols):
                acc = ZERO()
                for j in range(self.cols):
                    a = self.entries[i][j]
                    if a:
                        b = other.entries[j][k]
                        if b:
                            acc = acc + a * b
                row.append(acc)
            out.append(row)
        return GRMatrix(self.rows, other.cols, out)

    def __add__(self, other: "GRMatrix") -> "GRMatrix":
        return GRMatrix(self.rows, self.cols, [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)])

    def __neg__(self) -> "GRMatrix":
        return GRMatrix(self.rows, self.cols, [[-a for a in r] for r in self.entries])

    def __sub__(self, other: "GRMatrix") -> "GRMatrix":
        return self + (-other)

    def map(self, f: Callable[[GroupRingElement], GroupRingElement]) -> "GRMatrix":
        return GRMatrix(self.rows, self.cols, [[f(a) for a in r] for r in self.entries])

    def map_words(self, f: Callable[[Word], Word]) -> "GRMatrix":
        return self.map(lambda a: a.map_words(f))

    def is_formally_zero(self) -> bool:
        return not any(a for r in self.entries for a in r)

    def __eq__(self, other) -> bool:
        return isinstance(other, GRMatrix) and self.shape == other.shape and self.entries == other.entries

    __hash__ = None

    def format(self, group: FpGroup) -> list[list[str]]:
        return [[a.format(group) for a in r] for r in self.entries]

    def __repr__(self) -> str:
        return f"GRMatrix({self.rows}x{self.cols})"


def fox_derivative(w: Word, j: int) -> GroupRingElement:
    """Fox derivative of ``w`` with respect to generator ``j``."""
    terms: dict[Word, int] = {}
    prefix = Word()
    for g, s in w.unit_letters():
        step = Word(((g, s),))
        if g == j:
            key = prefix if s > 0 else prefix * step
            terms[key] = terms.get(key, 0) + s
        prefix = prefix * step
    return GroupRingElement(terms)


@dataclass(frozen=True, eq=False)
class EquivariantComplex:
    """Free ``ZG``-complex ``C_0 <- C_1 <- ... <- C_N``.

    ``boundaries[k - 1]`` is ``D_k``.  ``edge_generators[i]`` names the group
    generator ``x`` with ``d(e_i) = (x - 1) e_0`` when the model has a single
    vertex and such edge labels (used to build chain maps in low degrees).
    """

    group: FpGroup
    ranks: tuple[int, ...]
    boundaries: tuple[GRMatrix, ...]
    name: str = ""
    edge_generators: tuple[int, ...] | None = None
    model: str = "custom"
    factors: tuple["EquivariantComplex", "EquivariantComplex"] | None = None
    closed_orientable: bool = False
    _cell_labels: tuple[tuple[str, ...], ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ranks", tuple(int(r) for r in self.ranks))
        object.__setattr__(self, "boundaries", tuple(self.boundaries))
        if not self.ranks or any(r < 0 for r in self.ranks):
            raise InputError("ranks must be a nonempty list of nonnegative integers")
        if len(self.boundaries) != len(self.ranks) - 1:
            raise InputError("need one boundary matrix per positive degree")
        for k, d in enumerate(self.boundaries, start=1):
            if d.shape != (self.ranks[k], self.ranks[k - 1]):
                raise InputError(f"boundary in degree {k} has shape {d.shape}, expected {(self.ranks[k], self.ranks[k - 1])}")
            for row in d.entries:
                for a in row:
                    for w in a.terms:
                        if any(g >= self.group.ngens for g in w.generators_used()):
                            raise InputError(f"boundary in degree {k} uses generators outside the group")

    @property
    def length(self) -> int:
        return len(self.ranks) - 1

    def rank(self, k: int) -> int:
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def boundary(self, k: int) -> GRMatrix:
        """``D_k`` for any integer ``k``; zero of the right shape outside ``1..N``."""
        if 1 <= k <= self.length:
            return self.boundaries[k - 1]
        return GRMatrix.zeros(self.rank(k), self.rank(k - 1))

    def label(self) -> str:
        return self.name or f"C({self.group.label()})"

    def cell_labels(self, k: int) -> tuple[str, ...]:
        if self._cell_labels is not None and k < len(self._cell_labels):
            return self._cell_labels[k]
        return tuple(f"e{k}_{i}" for i in range(self.rank(k)))

    def tensor_index(self, p: int, i: int, q: int, j: int) -> int:
        """Index in degree ``p + q`` of the basis cell ``x_i (x) y_j`` with ``|x_i| = p``."""
        if self.factors is None:
            raise InputError("not a tensor product complex")
        return tensor_index(self.factors[0], self.factors[1], p, i, q, j)

    def tensor_cells(self, n: int) -> list[tuple[int, int, int]]:
        """Cells of degree ``n`` as ``(p, i, j)`` in basis order."""
        if self.factors is None:
            raise InputError("not a tensor product complex")
        c, d = self.factors
        return [(p, i, j) for p in range(n + 1) for i in range(c.rank(p)) for j in range(d.rank(n - p))]


def tensor_index(c: EquivariantComplex, d: EquivariantComplex, p: int, i: int, q: int, j: int) -> int:
    n = p + q
    off = sum(c.rank(a) * d.rank(n - a) for a in range(p))
    return off + i * d.rank(q) + j


# --------------------------------------------------------------------------
# constructors


def point_complex(group: FpGroup | None = None) -> EquivariantComplex:
    """One vertex, no higher cells: the model of the trivial group."""
    group = group if group is not None else trivial_group()
    return EquivariantComplex(group, (1,), (), name="point", edge_generators=(), model="point",
                              closed_orientable=True)


def presentation_complex(group: FpGroup, name: str = "", closed_orientable: bool = False) -> EquivariantComplex:
    """Cellular chains of the universal cover of the presentation 2-complex.

    ``D_1`` has rows ``x_i - 1``; ``D_2`` has rows of Fox derivatives
    ``dr/dx_i``.  Only a resolution when the presentation is aspherical.
    """
    if not group.aspherical:
        raise InputError(f"presentation of {group.label()} is not marked aspherical")
    n, m = group.ngens, len(group.relators)
    if n == 0:
        return point_complex(group)
    d1 = GRMatrix.from_rows([[GroupRingElement.from_word(Word.gen(i)) - ONE()] for i in range(n)], 1)
    bounds = [d1]
    ranks = [1, n]
    if m:
        d2 = GRMatrix.from_rows([[fox_derivative(r, i) for i in range(n)] for r in group.relators], n)
        bounds.append(d2)
        ranks.append(m)
    labels = (("v",), tuple(group.generators), tuple(f"r{k + 1}" for k in range(m)))
    return EquivariantComplex(group, tuple(ranks), tuple(bounds), name=name or f"K({group.label()})",
                              edge_generators=tuple(range(n)), model="presentation",
                              closed_orientable=closed_orientable, _cell_labels=labels[:len(ranks)])


def wedge_complex(n: int, names: Sequence[str] | None = None) -> EquivariantComplex:
    if n < 1:
        raise InputError("a wedge needs at least one circle")
    return presentation_complex(free_group(n, names), name="circle" if n == 1 else f"wedge{n}")


def circle_complex(name: str = "t") -> EquivariantComplex:
    return presentation_complex(free_group(1, [name], name="Z"), name="circle", closed_orientable=True)


def surface_complex(genus: int) -> EquivariantComplex:
    return presentation_complex(surface_group(genus), name=f"surface{genus}", closed_orientable=True)


def _embed(e: GroupRingElement, offset: int) -> GroupRingElement:
    return e.map_words(lambda w: w.shifted(offset)) if offset else e


def tensor_complex(c: EquivariantComplex, d: EquivariantComplex, group: FpGroup | None = None,
                   name: str = "") -> EquivariantComplex:
    """``C (x) D`` over the direct product, ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``.

    Basis in degree ``n``: bidegree ``p`` ascending, then row-major in the
    cells of ``C_p`` and ``D_{n-p}``.
    """
    group = group or direct_product(c.group, d.group)
    off = c.group.ngens
    top = c.length + d.length
    ranks = [sum(c.rank(p) * d.rank(n - p) for p in range(n + 1)) for n in range(top + 1)]
    bounds = []
    for n in range(1, top + 1):
        rows = [[ZERO() for _ in range(ranks[n - 1])] for _ in range(ranks[n])]
        for p in range(n + 1):
            q = n - p
            dc, dd = c.boundary(p), d.boundary(q)
            for i in range(c.rank(p)):
                for j in range(d.rank(q)):
                    row = rows[tensor_index(c, d, p, i, q, j)]
                    if p > 0:
                        for k in range(c.rank(p - 1)):
                            a = dc[i, k]
                            if a:
                                col = tensor_index(c, d, p - 1, k, q, j)
                                row[col] = row[col] + a
                    if q > 0:
                        sign = -1 if p % 2 else 1
                        for l in range(d.rank(q - 1)):
                            b = dd[j, l]
                            if b:
                                col = tensor_index(c, d, p, i, q - 1, l)
                                row[col] = row[col] + _embed(b, off) * sign
        bounds.append(GRMatrix(ranks[n], ranks[n - 1], rows))
    edges = None
    if c.rank(0) == 1 and d.rank(0) == 1 and c.edge_generators is not None and d.edge_generators is not None:
        edges = tuple(off + g for g in d.edge_generators) + tuple(c.edge_generators)
    labels = []
    for n in range(top + 1):
        labels.append(tuple(f"{c.cell_labels(p)[i]}*{d.cell_labels(n - p)[j]}"
                            for p in range(n + 1) for i in range(c.rank(p)) for j in range(d.rank(n - p))))
    out = EquivariantComplex(group, tuple(ranks), tuple(bounds), name=name or f"{c.label()}x{d.label()}",
                             edge_generators=edges, model="tensor", factors=(c, d),
                             closed_orientable=c.closed_orientable and d.closed_orientable,
                             _cell_labels=tuple(labels))
    return out


def torus_complex(n: int) -> EquivariantComplex:
    """``n``-fold tensor power of circles with generators ``x1..xn``."""
    if n < 1:
        raise InputError("torus dimension must be >= 1")
    out = circle_complex("x1")
    if n == 1:
        return out
    for k in range(2, n + 1):
        right = circle_complex(f"x{k}")
        g = direct_product(out.group, right.group)
        g = FpGroup(g.generators, g.relators, aspherical=True, name=f"Z^{k}")
        out = tensor_complex(out, right, group=g, name=f"torus{k}")
    return out


# --------------------------------------------------------------------------
# reduction through finite quotients


class Evaluator:
    """Sends words of ``group`` to elements of ``q``, through ``hom`` when given.

    With a homomorphism this is the pullback of ``q`` along ``hom``, but
    element indices stay in the target quotient's table, so modules over
    ``q`` can be used on both sides of a chain map.
    """

    def __init__(self, q: FiniteQuotient, group: FpGroup | None = None, hom: GroupHom | None = None):
        if hom is not None:
            if hom.target != q.source:
                raise InputError("quotient is not defined on the target of the homomorphism")
            group = hom.source
        elif group is None:
            group = q.source
        elif group != q.source:
            raise InputError(f"quotient of {q.source.label()} cannot reduce a complex over {group.label()}")
        self.quotient, self.group, self.hom = q, group, hom
        self._cache: dict[Word, int] = {}

    def element(self, w: Word) -> int:
        hit = self._cache.get(w)
        if hit is None:
            hit = self.quotient.element_of(self.hom(w) if self.hom is not None else w)
            self._cache[w] = hit
        return hit

    def vector(self, e: GroupRingElement) -> np.ndarray:
        v = np.zeros(self.quotient.order, dtype=np.int64)
        for w, c in e.terms.items():
            v[self.element(w)] += c
        return v

    def vectors(self, m: GRMatrix) -> np.ndarray:
        """Array of shape ``(rows, cols, |Q|)`` of reduced entries."""
        out = np.zeros((m.rows, m.cols, self.quotient.order), dtype=np.int64)
        for i, row in enumerate(m.entries):
            for j, a in enumerate(row):
                if a:
                    out[i, j] = self.vector(a)
        return out


def left_regular_blocks(vecs: np.ndarray, q: FiniteQuotient) -> np.ndarray:
    """Integer block matrix with block ``(i, j)`` the left multiplication by entry ``(i, j)``.

    Because left multiplication is an algebra homomorphism, products of
    group-algebra matrices correspond to products of these block matrices.
    """
    r, c, n = vecs.shape
    out = np.zeros((r * n, c * n), dtype=vecs.dtype if vecs.dtype == object else np.int64)
    cols = np.arange(n)
    mult = q.mult
    for i, j, x in zip(*np.nonzero(vecs)):
        out[i * n + mult[x, :], j * n + cols] += vecs[i, j, x]
    return out


def right_regular_blocks_transposed(vecs: np.ndarray, q: FiniteQuotient) -> np.ndarray:
    """Block ``(j, i)`` is right multiplication by entry ``(i, j)``: the cover boundary on column vectors."""
    r, c, n = vecs.shape
    out = np.zeros((c * n, r * n), dtype=np.int64)
    cols = np.arange(n)
    mult = q.mult
    for i, j, x in zip(*np.nonzero(vecs)):
        out[j * n + mult[:, x], i * n + cols] += vecs[i, j, x]
    return out


@dataclass(frozen=True, eq=False)
class GAMatrix:
    """Matrix over the group algebra ``ring[Q]``, stored through left-regular blocks."""

    quotient: FiniteQuotient
    ring: CoefficientRing
    rows: int
    cols: int
    big: ExactMatrix

    @classmethod
    def from_vectors(cls, q: FiniteQuotient, ring: CoefficientRing, vecs: np.ndarray) -> "GAMatrix":
        r, c, _ = vecs.shape
        return cls(q, ring, r, c, ExactMatrix(ring, left_regular_blocks(vecs, q)))

    @classmethod
    def from_grmatrix(cls, m: GRMatrix, ev: Evaluator, ring: CoefficientRing) -> "GAMatrix":
        return cls.from_vectors(ev.quotient, ring, ev.vectors(m))

    @classmethod
    def zeros(cls, q: FiniteQuotient, ring: CoefficientRing, rows: int, cols: int) -> "GAMatrix":
        n = q.order
        return cls(q, ring, rows, cols, ExactMatrix.zeros(ring, rows * n, cols * n))

    def _same(self, other: "GAMatrix"):
        if other.quotient is not self.quotient or other.ring != self.ring:
            raise InputError("group algebra matrices over different quotients or rings")

    def __matmul__(self, other: "GAMatrix") -> "GAMatrix":
        self._same(other)
        return GAMatrix(self.quotient, self.ring, self.rows, other.cols, self.big @ other.big)

    def __add__(self, other: "GAMatrix") -> "GAMatrix":
        self._same(other)
        return GAMatrix(self.quotient, self.ring, self.rows, self.cols, self.big + other.big)

    def __sub__(self, other: "GAMatrix") -> "GAMatrix":
        self._same(other)
        return GAMatrix(self.quotient, self.ring, self.rows, self.cols, self.big - other.big)

    def __eq__(self, other) -> bool:
        return isinstance(other, GAMatrix) and self.shape == other.shape and self.big == other.big

    __hash__ = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_zero(self) -> bool:
        return self.big.is_zero()

    def entry_vector(self, i: int, j: int) -> list:
        """Coefficients of entry ``(i, j)`` in element-table order."""
        n = self.quotient.order
        return [self.big.entry(i * n + x, j * n) for x in range(n)]

    def vectors(self) -> list[list[list]]:
        return [[self.entry_vector(i, j) for j in range(self.cols)] for i in range(self.rows)]


class ReducedComplex:
    """A complex reduced through a finite quotient ``Q`` over a coefficient ring.

    ``vectors(k)`` holds the reduced entries of ``D_k`` as coefficient
    vectors over ``Q``; module coefficients are applied to these.  The
    regular-coefficient (cover) complex has degree-``k`` dimension
    ``r_k |Q|`` and boundary blocks given by right multiplication.
    """

    def __init__(self, complex: EquivariantComplex, q: FiniteQuotient, ring: CoefficientRing,
                 hom: GroupHom | None = None, check: bool = True):
        if hom is not None and hom.source != complex.group:
            raise InputError("homomorphism source is not the complex's group")
        self.complex, self.quotient, self.ring, self.hom = complex, q, ring, hom
        self.evaluator = Evaluator(q, complex.group, hom)
        self._vectors = [None] + [self.evaluator.vectors(complex.boundary(k)) for k in range(1, complex.length + 1)]
        if check:
            self.check()

    @property
    def length(self) -> int:
        return self.complex.length

    def rank(self, k: int) -> int:
        return self.complex.rank(k)

    def dim(self, k: int) -> int:
        return self.complex.rank(k) * self.quotient.order

    def vectors(self, k: int) -> np.ndarray:
        if 1 <= k <= self.length:
            return self._vectors[k]
        return np.zeros((self.rank(k), self.rank(k - 1), self.quotient.order), dtype=np.int64)

    def integer_boundary(self, k: int) -> np.ndarray:
        return right_regular_blocks_transposed(self.vectors(k), self.quotient)

    def boundary_matrix(self, k: int) -> ExactMatrix:
        """Cover boundary on column vectors, ``dim(k-1) x dim(k)``."""
        return ExactMatrix(self.ring, self.integer_boundary(k))

    def check(self):
        """``dd = 0`` and ``augmentation . d_1 = 0``, checked over the integers."""
        for k in range(2, self.length + 1):
            prod = self.integer_boundary(k - 1) @ self.integer_boundary(k)
            if np.any(prod):
                raise ComplexError(f"d{k - 1} d{k} != 0 for {self.complex.label()} reduced through {self.quotient.describe()}")
        if self.length >= 1 and np.any(self.vectors(1).sum(axis=(1, 2))):
            raise ComplexError(f"augmentation . d1 != 0 for {self.complex.label()}")

    def left_action(self, k: int, g: int) -> np.ndarray:
        """Integer permutation matrix of left translation by ``g`` on degree ``k`` cover chains."""
        n = self.quotient.order
        r = self.rank(k)
        out = np.zeros((r * n, r * n), dtype=np.int64)
        rows = self.quotient.mult[g, :]
        for i in range(r):
            out[i * n + rows, i * n + np.arange(n)] = 1
        return out

    def describe(self) -> str:
        side = f" via {self.hom.label()}" if self.hom is not None else ""
        return f"{self.complex.label()} / {self.quotient.describe()}{side} over {self.ring}"


def reduce_complex(c: EquivariantComplex, q: FiniteQuotient, ring: CoefficientRing) -> ReducedComplex:
    return ReducedComplex(c, q, ring)


# --------------------------------------------------------------------------
# diagonals

DiagKey = tuple[int, int, Word, int, Word]
"""``(p, a, g, b, h)`` stands for ``g e_a (x) h e_b`` with ``|e_a| = p``."""


@dataclass(frozen=True, eq=False)
class Diagonal:
    """Equivariant diagonal ``C -> C (x) C`` with the diagonal group action.

    ``components[n][i]`` maps keys :data:`DiagKey` to integer coefficients
    and is the image of the ``i``-th cell of degree ``n``.
    """

    complex: EquivariantComplex
    components: tuple[tuple[dict, ...], ...]
    origin: str = "standard"

    def terms(self, n: int, i: int) -> dict:
        return self.components[n][i]

    def verify(self, ev: Evaluator):
        """Chain-map and counit identities after reduction; raises :class:`ComplexError`."""
        c = self.complex
        mult = ev.quotient.mult
        red = [[{} for _ in range(c.rank(n))] for n in range(c.length + 1)]
        for n in range(c.length + 1):
            for i in range(c.rank(n)):
                acc = red[n][i]
                for (p, a, g, b, h), coeff in self.components[n][i].items():
                    key = (p, a, ev.element(g), b, ev.element(h))
                    acc[key] = acc.get(key, 0) + coeff
        vec = [None] + [c.boundary(k) for k in range(1, c.length + 1)]
        for n in range(c.length + 1):
            for i in range(c.rank(n)):
                terms = red[n][i]
                left: dict = {}
                right: dict = {}
                for (p, a, g, b, h), coeff in terms.items():
                    q = n - p
                    if p > 0:
                        for k in range(c.rank(p - 1)):
                            for w, d in vec[p][a, k].terms.items():
                                key = (p - 1, k, int(mult[g, ev.element(w)]), b, h)
                                left[key] = left.get(key, 0) + coeff * d
                    if q > 0:
                        s = -1 if p % 2 else 1
                        for l in range(c.rank(q - 1)):
                            for w, d in vec[q][b, l].terms.items():
                                key = (p, a, g, l, int(mult[h, ev.element(w)]))
                                left[key] = left.get(key, 0) + s * coeff * d
                if n > 0:
                    for j in range(c.rank(n - 1)):
                        for w, d in vec[n][i, j].terms.items():
                            x = ev.element(w)
                            for (p, a, g, b, h), coeff in red[n - 1][j].items():
                                key = (p, a, int(mult[x, g]), b, int(mult[x, h]))
                                right[key] = right.get(key, 0) + d * coeff
                left = {k: v for k, v in left.items() if v}
                right = {k: v for k, v in right.items() if v}
                if left != right:
                    raise ComplexError(f"diagonal is not a chain map on cell {i} of degree {n} "
                                       f"(reduction through {ev.quotient.describe()})")
                for side in (0, 1):
                    counit: dict = {}
                    for (p, a, g, b, h), coeff in terms.items():
                        if side == 0 and p == 0:
                            counit[(b, h)] = counit.get((b, h), 0) + coeff
                        elif side == 1 and p == n:
                            counit[(a, g)] = counit.get((a, g), 0) + coeff
                    counit = {k: v for k, v in counit.items() if v}
                    if counit != {(i, 0): 1}:
                        raise ComplexError(f"diagonal fails the counit identity on cell {i} of degree {n}")

    def reduced_terms(self, ev: Evaluator, n: int, i: int) -> list[tuple[int, int, int, int, int, int]]:
        """Aggregated ``(coeff, p, a, g, b, h)`` with ``g, h`` quotient elements."""
        acc: dict = {}
        for (p, a, g, b, h), coeff in self.components[n][i].items():
            key = (p, a, ev.element(g), b, ev.element(h))
            acc[key] = acc.get(key, 0) + coeff
        return [(v, *k) for k, v in sorted(acc.items()) if v]


def _add(d: dict, key, c: int):
    v = d.get(key, 0) + c
    if v:
        d[key] = v
    else:
        d.pop(key, None)


def _presentation_diagonal(c: EquivariantComplex) -> tuple[tuple[dict, ...], ...]:
    """Explicit diagonal of a one-vertex presentation complex.

    For a relator ``r = y_1 ... y_L`` with prefixes ``w_l`` put
    ``lam_l = w_l e_i`` if ``y_l = x_i`` and ``lam_l = -w_l x_i^-1 e_i`` if
    ``y_l = x_i^-1``.  Then
    ``D(e_r) = e_r (x) e_0 + e_0 (x) e_r + sum_{l<m} lam_l (x) lam_m
    + sum_{y_l inverse} lam_l (x) lam_l``.
    """
    one = Word()
    comps = [({(0, 0, one, 0, one): 1},)]
    if c.length >= 1:
        deg1 = []
        for i, g in enumerate(c.edge_generators):
            deg1.append({(1, i, one, 0, Word.gen(g)): 1, (0, 0, one, i, one): 1})
        comps.append(tuple(deg1))
    if c.length >= 2:
        cell_of = {g: i for i, g in enumerate(c.edge_generators)}
        deg2 = []
        for k, r in enumerate(c.group.relators):
            terms: dict = {}
            _add(terms, (2, k, one, 0, one), 1)
            _add(terms, (0, 0, one, k, one), 1)
            lams = []
            prefix = one
            for g, s in r.unit_letters():
                step = Word(((g, s),))
                after = prefix * step
                lams.append((s, cell_of[g], prefix if s > 0 else after))
                prefix = after
            for l, (sl, al, ul) in enumerate(lams):
                for sm, am, um in lams[l + 1:]:
                    _add(terms, (1, al, ul, am, um), sl * sm)
                if sl < 0:
                    _add(terms, (1, al, ul, al, ul), 1)
            deg2.append(terms)
        comps.append(tuple(deg2))
    return tuple(comps)


def _tensor_diagonal(c: EquivariantComplex) -> tuple[tuple[dict, ...], ...]:
    """Shuffle of factor diagonals: ``D(x (x) y) = sum (-1)^{|x''||y'|} (x' (x) y') (x) (x'' (x) y'')``."""
    left, right = c.factors
    dl, dr = standard_diagonal(left), standard_diagonal(right)
    off = left.group.ngens
    comps = []
    for n in range(c.length + 1):
        cells = []
        for p, i, j in c.tensor_cells(n):
            q = n - p
            terms: dict = {}
            for (p1, a, g1, b, h1), c1 in dl.components[p][i].items():
                for (q1, e, g2, f, h2), c2 in dr.components[q][j].items():
                    sign = -1 if ((p - p1) * q1) % 2 else 1
                    first = tensor_index(left, right, p1, a, q1, e)
                    second = tensor_index(left, right, p - p1, b, q - q1, f)
                    key = (p1 + q1, first, g1 * g2.shifted(off), second, h1 * h2.shifted(off))
                    _add(terms, key, sign * c1 * c2)
            cells.append(terms)
        comps.append(tuple(cells))
    return tuple(comps)


def standard_diagonal(c: EquivariantComplex) -> Diagonal:
    """Diagonal for points, one-vertex presentation complexes and tensor products of these."""
    if c.model == "point":
        return Diagonal(c, (({(0, 0, Word(), 0, Word()): 1},),))
    if c.model == "presentation" and c.rank(0) == 1 and c.length <= 2:
        return Diagonal(c, _presentation_diagonal(c))
    if c.model == "tensor" and c.factors is not None:
        return Diagonal(c, _tensor_diagonal(c))
    raise InputError(f"no standard diagonal for complex {c.label()} (model {c.model!r}); use lift_diagonal")


# --------------------------------------------------------------------------
# bounded-support integer solving


def word_ball(group: FpGroup, radius: int) -> list[Word]:
    """Normal forms of all elements of word length at most ``radius``, breadth first."""
    seen = {Word(): None}
    frontier = [Word()]
    letters = [Word(((g, s),)) for g in range(group.ngens) for s in (1, -1)]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for step in letters:
                v = group.canonical(w * step)
                if v not in seen:
                    seen[v] = None
                    nxt.append(v)
        frontier = nxt
    return list(seen)


def _key_order(key) -> tuple:
    return tuple(x.letters if isinstance(x, Word) else x for x in key)


def solve_sparse_integer(columns: Sequence[dict], rhs: dict) -> list[int] | None:
    """Integer ``x`` with ``sum_j x_j columns[j] == rhs`` (dicts keyed by row labels), or ``None``.

    A rational solution is tried first and accepted when integral; otherwise
    the exact integer solve through the Smith normal form decides.
    """
    from .exactla import QQ, solve

    keys = set(rhs)
    for col in columns:
        keys.update(col)
    rows = sorted(keys, key=_key_order)
    where = {k: i for i, k in enumerate(rows)}
    a = np.zeros((len(rows), len(columns)), dtype=np.int64)
    for j, col in enumerate(columns):
        for k, v in col.items():
            a[where[k], j] += v
    b = np.zeros((len(rows), 1), dtype=np.int64)
    for k, v in rhs.items():
        b[where[k], 0] += v
    if not columns:
        return [] if not b.any() else None
    x = solve(ExactMatrix(QQ, a), ExactMatrix(QQ, b))
    if x is None:
        return None
    vals = [x.entry(j, 0) for j in range(len(columns))]
    if all(v.denominator == 1 for v in vals):
        return [int(v) for v in vals]
    xz = solve(ExactMatrix(ZZ, a), ExactMatrix(ZZ, b))
    if xz is None:
        return None
    return [int(xz.entry(j, 0)) for j in range(len(columns))]


def _require_normal_form(group: FpGroup, what: str):
    if group.kind not in ("free", "free_abelian"):
        raise InputError(f"{what} needs a normal form; {group.label()} is neither free nor free abelian")


def lift_diagonal(c: EquivariantComplex, radius: int = 3) -> Diagonal:
    """Solve for a diagonal degree by degree with words of length at most ``radius``.

    Raises :class:`Infeasible` when no solution of that support exists.
    """
    from .errors import Infeasible

    g = c.group
    _require_normal_form(g, "lift_diagonal")
    canon = g.canonical
    ball = word_ball(g, radius)
    comps = [tuple({(0, i, Word(), i, Word()): 1} for i in range(c.rank(0)))]
    for n in range(1, c.length + 1):
        dn = c.boundary(n)
        cells = []
        for i in range(c.rank(n)):
            unknowns = [(p, a, x, b, y) for p in range(n + 1) for a in range(c.rank(p))
                        for b in range(c.rank(n - p)) for x in ball for y in ball]
            columns = []
            for key in unknowns:
                col: dict = {}
                for k2, v in _tensor_boundary(c, key, n).items():
                    _add(col, ("d",) + k2, v)
                p, a, x, b, y = key
                if p == 0:
                    _add(col, ("l", b, y), 1)
                if p == n:
                    _add(col, ("r", a, x), 1)
                columns.append(col)
            rhs: dict = {("l", i, Word()): 1, ("r", i, Word()): 1}
            for j in range(c.rank(n - 1)):
                for w, d in dn[i, j].terms.items():
                    for (p, a, x, b, y), v in comps[n - 1][j].items():
                        _add(rhs, ("d", p, a, canon(w * x), b, canon(w * y)), d * v)
            sol = solve_sparse_integer(columns, rhs)
            if sol is None:
                raise Infeasible(f"no diagonal on cell {i} of degree {n} with support radius {radius}")
            cells.append({k: v for k, v in zip(unknowns, sol) if v})
        comps.append(tuple(cells))
    return Diagonal(c, tuple(comps), origin=f"lifted(radius={radius})")


def _tensor_boundary(c: EquivariantComplex, key: DiagKey, n: int) -> dict:
    """Boundary of ``x e_a (x) y e_b`` (total degree ``n``) in normal forms."""
    canon = c.group.canonical
    p, a, x, b, y = key
    out: dict = {}
    if p > 0:
        for k in range(c.rank(p - 1)):
            for w, d in c.boundary(p)[a, k].terms.items():
                _add(out, (p - 1, k, canon(x * w), b, y), d)
    q = n - p
    if q > 0:
        s = -1 if p % 2 else 1
        for l in range(c.rank(q - 1)):
            for w, d in c.boundary(q)[b, l].terms.items():
                _add(out, (p, a, x, l, canon(y * w)), s * d)
    return out


# --------------------------------------------------------------------------
# chain maps


@dataclass(frozen=True, eq=False)
class ChainMap:
    """``Phi_k : C_k(G) -> C_k(H)`` realizing ``hom``; entries live in ``Z[H]``.

    Row convention: ``D_k^hom @ Phi_{k-1} == Phi_k @ D'_k`` where ``D_k^hom``
    is the source boundary with words pushed through ``hom``.
    """

    source: EquivariantComplex
    target: EquivariantComplex
    hom: GroupHom
    components: tuple[GRMatrix, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        if self.hom.source != self.source.group or self.hom.target != self.target.group:
            raise InputError("homomorphism does not match the complexes' groups")
        for k, m in enumerate(self.components):
            if m.shape != (self.source.rank(k), self.target.rank(k)):
                raise InputError(f"chain map component {k} has shape {m.shape}")

    @property
    def top(self) -> int:
        return len(self.components) - 1

    def component(self, k: int) -> GRMatrix:
        if 0 <= k < len(self.components):
            return self.components[k]
        return GRMatrix.zeros(self.source.rank(k), self.target.rank(k))

    def pushed_boundary(self, k: int) -> GRMatrix:
        return self.source.boundary(k).map_words(self.hom)

    def verify(self, q: FiniteQuotient):
        """Chain-map identities and augmentation through ``q`` (a quotient of the target group)."""
        for i in range(self.source.rank(0)):
            if sum(self.component(0)[i, j].augmentation() for j in range(self.target.rank(0))) != 1:
                raise ComplexError("chain map does not preserve the augmentation")
        ev = Evaluator(q)
        for k in range(1, self.top + 1):
            lhs = left_regular_blocks(ev.vectors(self.pushed_boundary(k)), q) @ \
                left_regular_blocks(ev.vectors(self.component(k - 1)), q)
            rhs = left_regular_blocks(ev.vectors(self.component(k)), q) @ \
                left_regular_blocks(ev.vectors(self.target.boundary(k)), q)
            if not np.array_equal(lhs, rhs):
                raise ComplexError(f"chain map identity fails in degree {k} through {q.describe()}")

    def reduced(self, q: FiniteQuotient, ring: CoefficientRing) -> list[GAMatrix]:
        ev = Evaluator(q)
        return [GAMatrix.from_grmatrix(self.component(k), ev, ring) for k in range(self.source.length + 1)]


def identity_chain_map(c: EquivariantComplex) -> ChainMap:
    from .groups import identity_hom

    return ChainMap(c, c, identity_hom(c.group), tuple(GRMatrix.identity(r) for r in c.ranks))


def chain_map_degree1(hom: GroupHom, cg: EquivariantComplex, ch: EquivariantComplex) -> ChainMap:
    """``Phi_0 = [1]`` and ``Phi_1`` from Fox derivatives of the image words."""
    for c in (cg, ch):
        if c.rank(0) != 1 or c.edge_generators is None:
            raise InputError(f"complex {c.label()} lacks a single vertex with labelled edges")
    if sorted(ch.edge_generators) != list(range(ch.group.ngens)):
        raise InputError(f"edges of {ch.label()} do not correspond to generators")
    comps = [GRMatrix.identity(1)]
    if cg.length >= 1:
        rows = []
        for g in cg.edge_generators:
            img = hom.images[g]
            rows.append([fox_derivative(img, y) for y in ch.edge_generators])
        comps.append(GRMatrix(cg.rank(1), ch.rank(1), rows))
    return ChainMap(cg, ch, hom, tuple(comps))


def lift_chain_map(partial: ChainMap, radius: int = 3) -> ChainMap:
    """Extend ``partial`` to the top source degree with supports of word length at most ``radius``."""
    from .errors import Infeasible

    h = partial.target.group
    tgt = partial.target
    canon = h.canonical
    comps = list(partial.components)
    ball = None
    for k in range(len(comps), partial.source.length + 1):
        rhs_m = partial.pushed_boundary(k) @ comps[k - 1]
        rk = tgt.rank(k)
        if rk == 0:
            for i in range(rhs_m.rows):
                for l in range(rhs_m.cols):
                    if rhs_m[i, l].map_words(canon):
                        raise Infeasible(f"target has no cells in degree {k} but the boundary image is nonzero")
            comps.append(GRMatrix.zeros(partial.source.rank(k), 0))
            continue
        if ball is None:
            _require_normal_form(h, "lift_chain_map")
            ball = word_ball(h, radius)
        dk = tgt.boundary(k)
        unknowns = [(j, w) for j in range(rk) for w in ball]
        columns = []
        for j, w in unknowns:
            col: dict = {}
            for l in range(tgt.rank(k - 1)):
                for v, d in dk[j, l].terms.items():
                    _add(col, (l, canon(w * v)), d)
            columns.append(col)
        rows = []
        for i in range(partial.source.rank(k)):
            rhs: dict = {}
            for l in range(rhs_m.cols):
                for v, d in rhs_m[i, l].terms.items():
                    _add(rhs, (l, canon(v)), d)
            sol = solve_sparse_integer(columns, rhs)
            if sol is None:
                raise Infeasible(f"no chain map component in degree {k} (row {i}) with support radius {radius}")
            row = [dict() for _ in range(rk)]
            for (j, w), x in zip(unknowns, sol):
                if x:
                    row[j][w] = x
            rows.append([GroupRingElement(t) for t in row])
        comps.append(GRMatrix(partial.source.rank(k), rk, rows))
    return ChainMap(partial.source, partial.target, partial.hom, tuple(comps))


def tensor_chain_map(phi: ChainMap, psi: ChainMap, source: EquivariantComplex | None = None,
                     target: EquivariantComplex | None = None) -> ChainMap:
    """``Phi (x) Psi`` between tensor complexes; no signs since both maps have degree zero."""
    from .groups import product_hom

    source = source or tensor_complex(phi.source, psi.source)
    target = target or tensor_complex(phi.target, psi.target)
    hom = product_hom(phi.hom, psi.hom, source.group, target.group)
    off = phi.target.group.ngens
    top = min(source.length, phi.top + psi.top)
    comps = []
    for n in range(source.length + 1):
        rows = [[ZERO() for _ in range(target.rank(n))] for _ in range(source.rank(n))]
        if n <= top:
            for p, i, j in source.tensor_cells(n):
                q = n - p
                fp, gq = phi.component(p), psi.component(q)
                row = rows[source.tensor_index(p, i, q, j)]
                for k in range(target.factors[0].rank(p)):
                    a = fp[i, k]
                    if not a:
                        continue
                    for l in range(target.factors[1].rank(q)):
                        b = gq[j, l]
                        if b:
                            col = target.tensor_index(p, k, q, l)
                            row[col] = row[col] + a * _embed(b, off)
        comps.append(GRMatrix(source.rank(n), target.rank(n), rows))
    return ChainMap(source, target, hom, tuple(comps))


# --------------------------------------------------------------------------
# chain homotopies in a reduction


@dataclass(frozen=True, eq=False)
class ChainHomotopy:
    """``D_k : C_k(G) -> C_{k+1}(H)`` over ``ring[Q]`` with ``d D + D d = F - Psi``.

    ``F`` is ``Phi`` (minus ``other`` when given), and the residual ``Psi``
    vanishes above ``level``.
    """

    chain_map: ChainMap
    other: ChainMap | None
    quotient: FiniteQuotient
    ring: CoefficientRing
    level: int
    components: dict
    residual: dict

    def component(self, k: int) -> GAMatrix:
        src, tgt = self.chain_map.source, self.chain_map.target
        if k in self.components:
            return self.components[k]
        return GAMatrix.zeros(self.quotient, self.ring, src.rank(k), tgt.rank(k + 1))

    def _pieces(self, k: int) -> tuple[GAMatrix, GAMatrix, GAMatrix]:
        phi = self.chain_map
        ev_src = Evaluator(self.quotient, hom=phi.hom)
        ev = Evaluator(self.quotient)
        d_src = GAMatrix.from_grmatrix(phi.source.boundary(k), ev_src, self.ring)
        d_tgt = GAMatrix.from_grmatrix(phi.target.boundary(k + 1), ev, self.ring)
        f = GAMatrix.from_grmatrix(phi.component(k), ev, self.ring)
        if self.other is not None:
            f = f - GAMatrix.from_grmatrix(self.other.component(k), ev, self.ring)
        return d_src, d_tgt, f

    def verify(self):
        for k in range(self.chain_map.source.length + 1):
            d_src, d_tgt, f = self._pieces(k)
            lhs = d_src @ self.component(k - 1) + self.component(k) @ d_tgt
            psi = self.residual.get(k)
            if psi is not None:
                lhs = lhs + psi
            elif k <= self.level:
                raise ComplexError(f"missing residual in degree {k}")
            if lhs != f:
                raise ComplexError(f"homotopy identity fails in degree {k}")

    @property
    def size(self) -> int:
        return sum(m.rows * m.cols for m in self.components.values())


def find_homotopy(phi: ChainMap, q: FiniteQuotient, ring: CoefficientRing, level: int,
                  other: ChainMap | None = None) -> ChainHomotopy | None:
    """Solve one linear system over ``ring`` for ``D`` with residual zero above ``level``.

    Returns ``None`` when infeasible.  ``level = -1`` asks for a homotopy
    between ``phi`` and ``other`` (or zero).
    """
    from .exactla import solve

    if not ring.is_field:
        raise InputError("homotopy certificates are solved over a field")
    src, tgt = phi.source, phi.target
    n = q.order
    ev_src, ev = Evaluator(q, hom=phi.hom), Evaluator(q)
    top = src.length
    start = max(level, 0)
    unknown_deg = [j for j in range(start, top + 1) if src.rank(j) and tgt.rank(j + 1)]
    ucol, width = {}, 0
    for j in unknown_deg:
        ucol[j] = width
        width += src.rank(j) * tgt.rank(j + 1) * n
    eq_deg = [k for k in range(level + 1, top + 1) if src.rank(k) and tgt.rank(k)]
    erow, height = {}, 0
    for k in eq_deg:
        erow[k] = height
        height += src.rank(k) * tgt.rank(k) * n
    a = np.zeros((height, width), dtype=np.int64)
    b = np.zeros((height, 1), dtype=np.int64)
    mult = q.mult
    ar = np.arange(n)
    for k in eq_deg:
        rk, sk = src.rank(k), tgt.rank(k)
        f = ev.vectors(phi.component(k))
        if other is not None:
            f = f - ev.vectors(other.component(k))
        dsrc = ev_src.vectors(src.boundary(k))
        dtgt = ev.vectors(tgt.boundary(k + 1))
        for i in range(rk):
            for l in range(sk):
                r0 = erow[k] + (i * sk + l) * n
                b[r0:r0 + n, 0] = f[i, l]
                if k - 1 in ucol:
                    w = tgt.rank(k)
                    for j in range(src.rank(k - 1)):
                        c0 = ucol[k - 1] + (j * w + l) * n
                        for x in np.nonzero(dsrc[i, j])[0]:
                            a[r0 + mult[x, :], c0 + ar] += dsrc[i, j, x]
                if k in ucol:
                    w = tgt.rank(k + 1)
                    for j in range(w):
                        c0 = ucol[k] + (i * w + j) * n
                        for x in np.nonzero(dtgt[j, l])[0]:
                            a[r0 + mult[:, x], c0 + ar] += dtgt[j, l, x]
    if width == 0:
        feasible = not b.any()
        sol = None
    else:
        sol = solve(ExactMatrix(ring, a), ExactMatrix(ring, b)) if height else ExactMatrix.zeros(ring, width, 1)
        feasible = sol is not None
    if not feasible:
        return None
    comps = {}
    for j in unknown_deg:
        rj, w = src.rank(j), tgt.rank(j + 1)
        vecs = np.zeros((rj, w, n), dtype=object)
        for i in range(rj):
            for l in range(w):
                c0 = ucol[j] + (i * w + l) * n
                vecs[i, l] = [sol.entry(c0 + x, 0) for x in range(n)]
        comps[j] = GAMatrix.from_vectors(q, ring, vecs)
    h = ChainHomotopy(phi, other, q, ring, level, comps, {})
    for k in range(0, level + 1):
        d_src, d_tgt, f = h._pieces(k)
        h.residual[k] = f - (d_src @ h.component(k - 1) + h.component(k) @ d_tgt)
    h.verify()
    return h
