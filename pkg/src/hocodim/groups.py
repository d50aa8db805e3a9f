"""Words, finitely presented groups, homomorphisms and verified finite quotients.

Permutations are stored 0-indexed as tuples of images.  Products of
permutations follow the left-to-right convention: ``compose(p, q)`` means
"first ``p``, then ``q``", so evaluating a word letter by letter is a group
homomorphism from the free group.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InputError, QuotientTooLarge, RelatorError, WordParseError

DEFAULT_QUOTIENT_BOUND = 256

Letter = tuple[int, int]
Perm = tuple[int, ...]

_NAME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9_']*$")
_TOKEN_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_']*)(?:\^(-?[0-9]+))?$")


def free_reduce(letters: Iterable[Letter], ngens: int | None = None) -> "Word":
    """Freely reduce a raw sequence of ``(generator, exponent)`` pairs."""
    stack: list[list[int]] = []
    for gen, exp in letters:
        gen, exp = int(gen), int(exp)
        if gen < 0 or (ngens is not None and gen >= ngens):
            raise InputError(f"generator index {gen} out of range")
        if exp == 0:
            continue
        if stack and stack[-1][0] == gen:
            stack[-1][1] += exp
            if stack[-1][1] == 0:
                stack.pop()
        else:
            stack.append([gen, exp])
    return Word(tuple((g, e) for g, e in stack))


@dataclass(frozen=True)
class Word:
    """A freely reduced word; the empty word is the identity."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        prev = None
        for g, e in self.letters:
            if e == 0 or g == prev:
                raise ValueError(f"word is not freely reduced: {self.letters}")
            prev = g

    @classmethod
    def gen(cls, index: int, exp: int = 1) -> "Word":
        return free_reduce([(index, exp)])

    def __mul__(self, other: "Word") -> "Word":
        if not self.letters:
            return other
        if not other.letters:
            return self
        return free_reduce(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple((g, -e) for g, e in reversed(self.letters)))

    def __pow__(self, k: int) -> "Word":
        base = self if k >= 0 else self.inverse()
        out = Word()
        for _ in range(abs(k)):
            out = out * base
        return out

    def __len__(self) -> int:
        return sum(abs(e) for _, e in self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def unit_letters(self) -> list[Letter]:
        """The word spelled out as single letters ``(g, +-1)``."""
        out = []
        for g, e in self.letters:
            s = 1 if e > 0 else -1
            out.extend([(g, s)] * abs(e))
        return out

    def generators_used(self) -> set[int]:
        return {g for g, _ in self.letters}

    def shifted(self, offset: int) -> "Word":
        return Word(tuple((g + offset, e) for g, e in self.letters))


def commutator(x: Word, y: Word) -> Word:
    return x * y * x.inverse() * y.inverse()


def _commutator_set(ngens: int) -> set[Word]:
    return {commutator(Word.gen(i), Word.gen(j)) for i in range(ngens) for j in range(i + 1, ngens)}


def _cyclic_class(w: Word) -> frozenset[Word]:
    """All cyclic permutations of ``w`` and of its inverse."""
    out = set()
    for v in (w, w.inverse()):
        units = v.unit_letters()
        for k in range(len(units)):
            out.add(free_reduce(units[k:] + units[:k]))
    return frozenset(out)


@dataclass(frozen=True)
class FpGroup:
    generators: tuple[str, ...]
    relators: tuple[Word, ...] = ()
    aspherical: bool = False
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "relators", tuple(self.relators))
        if len(set(self.generators)) != len(self.generators):
            raise InputError(f"generator names must be distinct: {self.generators}")
        for g in self.generators:
            if not _NAME_RE.match(g):
                raise InputError(f"invalid generator name {g!r}")
        for r in self.relators:
            if not r:
                raise InputError("relators must be nonempty")
            if any(g >= self.ngens for g in r.generators_used()):
                raise InputError("relator uses an unknown generator")

    @property
    def ngens(self) -> int:
        return len(self.generators)

    @cached_property
    def kind(self) -> str:
        """``"free"``, ``"free_abelian"`` or ``"generic"``.

        Only the first two carry a normal form (see :meth:`canonical`).
        """
        if not self.relators:
            return "free" if self.ngens > 1 else "free_abelian"
        have = {min(_cyclic_class(r), key=lambda w: w.letters) for r in self.relators}
        want = {min(_cyclic_class(c), key=lambda w: w.letters) for c in _commutator_set(self.ngens)}
        if have == want and len(self.relators) == len(want):
            return "free_abelian"
        return "generic"

    def canonical(self, w: Word) -> Word:
        """Normal form of ``w``; available for free and free abelian groups."""
        if self.kind == "free":
            return w
        if self.kind == "free_abelian":
            exps = [0] * self.ngens
            for g, e in w.letters:
                exps[g] += e
            return Word(tuple((g, e) for g, e in enumerate(exps) if e))
        raise NotImplementedError(f"no normal form for group {self.name or self.generators}")

    def gen(self, name: str) -> int:
        try:
            return self.generators.index(name)
        except ValueError:
            raise InputError(f"unknown generator {name!r}") from None

    def parse_word(self, text: str) -> Word:
        """Parse whitespace separated tokens ``g``, ``g^k``, ``g^-k``; ``""`` or ``"1"`` is the identity."""
        text = text.strip()
        if text in ("", "1"):
            return Word()
        letters = []
        for tok in text.split():
            m = _TOKEN_RE.match(tok)
            if not m:
                raise WordParseError(f"cannot parse token {tok!r} in word {text!r}")
            name, exp = m.group(1), m.group(2)
            if name not in self.generators:
                raise WordParseError(f"unknown generator {name!r} in word {text!r}")
            k = 1 if exp is None else int(exp)
            if k == 0:
                raise WordParseError(f"zero exponent in token {tok!r}")
            letters.append((self.generators.index(name), k))
        return free_reduce(letters)

    def format_word(self, w: Word) -> str:
        if not w:
            return "1"
        parts = []
        for g, e in w.letters:
            name = self.generators[g]
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts)

    def label(self) -> str:
        return self.name or "<" + ",".join(self.generators) + ">"


def free_group(n: int, names: Sequence[str] | None = None, name: str = "") -> FpGroup:
    names = tuple(names) if names else (("t",) if n == 1 else tuple("abcdefgh"[:n]) if n <= 8 else tuple(f"x{i + 1}" for i in range(n)))
    return FpGroup(names, (), aspherical=True, name=name or f"F{n}")


def free_abelian_group(n: int, names: Sequence[str] | None = None, name: str = "") -> FpGroup:
    names = tuple(names) if names else tuple(f"x{i + 1}" for i in range(n))
    rels = tuple(commutator(Word.gen(i), Word.gen(j)) for i in range(n) for j in range(i + 1, n))
    return FpGroup(names, rels, aspherical=True, name=name or f"Z^{n}")


def surface_group(genus: int, name: str = "") -> FpGroup:
    if genus < 1:
        raise InputError("surface genus must be >= 1")
    names = []
    rel = Word()
    for i in range(genus):
        names += [f"a{i + 1}", f"b{i + 1}"]
        rel = rel * commutator(Word.gen(2 * i), Word.gen(2 * i + 1))
    return FpGroup(tuple(names), (rel,), aspherical=True, name=name or f"S{genus}")


def direct_product(g: FpGroup, h: FpGroup) -> FpGroup:
    """Presentation of ``g x h``: both generator sets plus commuting relators.

    Colliding generator names on the right factor get a ``_2`` style suffix.
    Left generators keep their indices; right ones are shifted by ``g.ngens``.
    """
    names = list(g.generators)
    for n in h.generators:
        new, k = n, 2
        while new in names:
            new = f"{n}_{k}"
            k += 1
        names.append(new)
    off = g.ngens
    rels = list(g.relators) + [r.shifted(off) for r in h.relators]
    rels += [commutator(Word.gen(i), Word.gen(off + j)) for i in range(g.ngens) for j in range(h.ngens)]
    label = f"({g.label()} x {h.label()})"
    return FpGroup(tuple(names), tuple(rels), aspherical=g.aspherical and h.aspherical, name=label)


# --------------------------------------------------------------------------
# group ring


class GroupRingElement:
    """Finite integer combination of words; zero coefficients are never stored."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict[Word, int] | None = None):
        self.terms: dict[Word, int] = {w: c for w, c in (terms or {}).items() if c}

    @classmethod
    def from_word(cls, w: Word, coeff: int = 1) -> "GroupRingElement":
        return cls({w: coeff})

    @classmethod
    def one(cls) -> "GroupRingElement":
        return cls({Word(): 1})

    @classmethod
    def zero(cls) -> "GroupRingElement":
        return cls()

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, 0) + c
        return GroupRingElement(out)

    def __neg__(self) -> "GroupRingElement":
        return GroupRingElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: "GroupRingElement") -> "GroupRingElement":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElement({w: c * other for w, c in self.terms.items()})
        out: dict[Word, int] = {}
        for w1, c1 in self.terms.items():
            for w2, c2 in other.terms.items():
                w = w1 * w2
                out[w] = out.get(w, 0) + c1 * c2
        return GroupRingElement(out)

    def __rmul__(self, k: int) -> "GroupRingElement":
        return self * k

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupRingElement) and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def bar(self) -> "GroupRingElement":
        """The involution ``g -> g^-1``."""
        return GroupRingElement({w.inverse(): c for w, c in self.terms.items()})

    def augmentation(self) -> int:
        return sum(self.terms.values())

    def map_words(self, f: Callable[[Word], Word]) -> "GroupRingElement":
        out: dict[Word, int] = {}
        for w, c in self.terms.items():
            v = f(w)
            out[v] = out.get(v, 0) + c
        return GroupRingElement(out)

    def sorted_terms(self) -> list[tuple[Word, int]]:
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0].letters))

    def format(self, group: FpGroup) -> str:
        if not self.terms:
            return "0"
        parts = []
        for w, c in self.sorted_terms():
            s = group.format_word(w)
            parts.append(f"{c:+d}*{s}" if abs(c) != 1 else ("+" if c > 0 else "-") + s)
        return " ".join(parts).lstrip("+")

    def __repr__(self) -> str:
        return f"GroupRingElement({self.sorted_terms()!r})"


# --------------------------------------------------------------------------
# permutations and finite quotients


def compose(p: Perm, q: Perm) -> Perm:
    """``p`` then ``q``."""
    return tuple(q[i] for i in p)


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _check_perm(p: Sequence[int], degree: int) -> Perm:
    p = tuple(int(x) for x in p)
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise InputError(f"not a permutation of {degree} points: {p}")
    return p


def eval_perm(w: Word, images: Sequence[Perm], degree: int) -> Perm:
    out = tuple(range(degree))
    for g, e in w.letters:
        step = images[g] if e > 0 else perm_inverse(images[g])
        for _ in range(abs(e)):
            out = compose(out, step)
    return out


def cycle_perm(degree: int, *cycles: Sequence[int], one_indexed: bool = True) -> Perm:
    """Build a permutation from disjoint cycles, e.g. ``cycle_perm(3, (1, 2, 3))``."""
    img = list(range(degree))
    off = 1 if one_indexed else 0
    for cyc in cycles:
        cyc = [c - off for c in cyc]
        for i, c in enumerate(cyc):
            img[c] = cyc[(i + 1) % len(cyc)]
    return tuple(img)


@dataclass(frozen=True, eq=False)
class FiniteQuotient:
    """A verified map of ``source`` onto a finite permutation group ``Q``.

    ``elements`` lists ``Q`` in breadth-first order from the identity (index 0),
    with ``words[i]`` the shortlex-first word reaching ``elements[i]``.
    """

    source: FpGroup
    degree: int
    generator_images: tuple[Perm, ...]
    elements: tuple[Perm, ...]
    words: tuple[Word, ...]
    label: str = ""
    bound: int = DEFAULT_QUOTIENT_BOUND

    identity_index = 0

    @property
    def order(self) -> int:
        return len(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    @cached_property
    def index(self) -> dict[Perm, int]:
        return {p: i for i, p in enumerate(self.elements)}

    @cached_property
    def mult(self) -> np.ndarray:
        n = self.order
        idx = self.index
        table = np.empty((n, n), dtype=np.int64)
        for a, pa in enumerate(self.elements):
            for b, pb in enumerate(self.elements):
                table[a, b] = idx[compose(pa, pb)]
        return table

    @cached_property
    def inv(self) -> np.ndarray:
        idx = self.index
        return np.array([idx[perm_inverse(p)] for p in self.elements], dtype=np.int64)

    @cached_property
    def _gen_steps(self) -> tuple[tuple[int, int], ...]:
        idx = self.index
        return tuple((idx[p], idx[perm_inverse(p)]) for p in self.generator_images)

    @cached_property
    def _cache(self) -> dict[Word, int]:
        return {}

    def element_of(self, w: Word) -> int:
        """Index in ``elements`` of the image of ``w``."""
        cache = self._cache
        hit = cache.get(w)
        if hit is not None:
            return hit
        mult = self.mult
        steps = self._gen_steps
        i = 0
        for g, e in w.letters:
            s = steps[g][0] if e > 0 else steps[g][1]
            for _ in range(abs(e)):
                i = int(mult[i, s])
        cache[w] = i
        return i

    def perm_of(self, w: Word) -> Perm:
        return self.elements[self.element_of(w)]

    def vector(self, e: GroupRingElement) -> np.ndarray:
        """Coefficient vector (length ``|Q|``) of the image of ``e`` in ``Z[Q]``."""
        v = np.zeros(self.order, dtype=np.int64)
        for w, c in e.terms.items():
            v[self.element_of(w)] += c
        return v

    def is_trivial(self) -> bool:
        return self.order == 1

    def contains_perms_of(self, other: "FiniteQuotient") -> bool:
        return other.degree == self.degree and all(p in self.index for p in other.elements)

    def describe(self) -> str:
        return self.label or f"Q(|Q|={self.order})"


def make_finite_quotient(group: FpGroup, images: Sequence[Sequence[int]], bound: int = DEFAULT_QUOTIENT_BOUND,
                         label: str = "", degree: int | None = None) -> FiniteQuotient:
    """Verify that generator images kill every relator and enumerate the image group."""
    if len(images) != group.ngens:
        raise InputError(f"need {group.ngens} permutations, got {len(images)}")
    if degree is None:
        degrees = {len(p) for p in images}
        if len(degrees) != 1:
            raise InputError("all permutations must act on the same number of points")
        degree = degrees.pop()
    perms = tuple(_check_perm(p, degree) for p in images)
    ident = tuple(range(degree))
    for r in group.relators:
        if eval_perm(r, perms, degree) != ident:
            raise RelatorError(group.format_word(r), label or "the given permutations")
    elements = [ident]
    words = [Word()]
    index = {ident: 0}
    letters = [(i, s) for i in range(group.ngens) for s in (1, -1)]
    steps = [perms[i] if s == 1 else perm_inverse(perms[i]) for i, s in letters]
    head = 0
    while head < len(elements):
        p, w = elements[head], words[head]
        head += 1
        for (i, s), step in zip(letters, steps):
            q = compose(p, step)
            if q not in index:
                if len(elements) >= bound:
                    raise QuotientTooLarge(f"image group exceeds the bound {bound}")
                index[q] = len(elements)
                elements.append(q)
                words.append(w * Word(((i, s),)))
    return FiniteQuotient(group, degree, perms, tuple(elements), tuple(words), label=label, bound=bound)


def trivial_quotient(group: FpGroup) -> FiniteQuotient:
    return make_finite_quotient(group, [(0,)] * group.ngens, label="trivial", degree=1)


def trivial_group() -> FpGroup:
    return FpGroup((), (), aspherical=True, name="1")


def quotient_reduce(e: GroupRingElement, q: FiniteQuotient, ring, side: str = "left"):
    """Regular-representation matrix of the image of ``e`` in ``ring[Q]``.

    ``side="left"`` gives left multiplication ``x -> e x``; ``side="right"``
    gives ``x -> x e``.  Basis is the element table order.
    """
    from .exactla import ExactMatrix

    for w in e.terms:
        if any(g >= q.source.ngens for g in w.generators_used()):
            raise InputError("group ring element uses generators outside the quotient's group")
    n = q.order
    out = np.zeros((n, n), dtype=object)
    cols = np.arange(n)
    for w, c in e.terms.items():
        g = q.element_of(w)
        rows = q.mult[g, :] if side == "left" else q.mult[:, g]
        for j in cols:
            out[rows[j], j] += c
    return ExactMatrix(ring, out)


# --------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class GroupHom:
    source: FpGroup
    target: FpGroup
    images: tuple[Word, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(self.images))
        if len(self.images) != self.source.ngens:
            raise InputError(f"need one image per source generator ({self.source.ngens})")
        for w in self.images:
            if any(g >= self.target.ngens for g in w.generators_used()):
                raise InputError("image word uses an unknown target generator")

    def __call__(self, w: Word) -> Word:
        out = []
        for g, e in w.letters:
            img = self.images[g] if e > 0 else self.images[g].inverse()
            for _ in range(abs(e)):
                out.extend(img.letters)
        return free_reduce(out)

    def apply(self, e: GroupRingElement) -> GroupRingElement:
        return e.map_words(self)

    def label(self) -> str:
        return self.name or f"{self.source.label()}->{self.target.label()}"


def identity_hom(g: FpGroup) -> GroupHom:
    return GroupHom(g, g, tuple(Word.gen(i) for i in range(g.ngens)), name=f"id_{g.label()}")


def compose_hom(f: GroupHom, g: GroupHom) -> GroupHom:
    """``f o g``: apply ``g`` first."""
    if g.target != f.source:
        raise InputError("cannot compose: target of the inner map is not the source of the outer map")
    name = f"{f.name}.{g.name}" if f.name and g.name else ""
    return GroupHom(g.source, f.target, tuple(f(w) for w in g.images), name=name)


def product_hom(f: GroupHom, g: GroupHom, source: FpGroup | None = None,
                target: FpGroup | None = None) -> GroupHom:
    """``f x g`` between the direct product presentations."""
    source = source or direct_product(f.source, g.source)
    target = target or direct_product(f.target, g.target)
    off = f.target.ngens
    images = list(f.images) + [w.shifted(off) for w in g.images]
    name = f"{f.name}x{g.name}" if f.name and g.name else ""
    return GroupHom(source, target, tuple(images), name=name)


def pullback_quotient(phi: GroupHom, q: FiniteQuotient) -> FiniteQuotient:
    """The quotient of ``phi.source`` through ``q o phi``; its image may be a proper subgroup."""
    if q.source != phi.target:
        raise InputError("quotient is not defined on the target of the homomorphism")
    images = [q.perm_of(w) for w in phi.images]
    label = f"{q.describe()}*{phi.name}" if phi.name else f"{q.describe()}*"
    return make_finite_quotient(phi.source, images, bound=q.bound, label=label, degree=q.degree)


def product_quotient(q1: FiniteQuotient, q2: FiniteQuotient, group: FpGroup | None = None) -> FiniteQuotient:
    """``q1 x q2`` acting on the disjoint union of the two permutation domains."""
    group = group or direct_product(q1.source, q2.source)
    d1 = q1.degree
    images = [tuple(p) + tuple(range(d1, d1 + q2.degree)) for p in q1.generator_images]
    images += [tuple(range(d1)) + tuple(d1 + x for x in p) for p in q2.generator_images]
    bound = max(q1.bound, q2.bound, q1.order * q2.order)
    return make_finite_quotient(group, images, bound=bound, label=f"{q1.describe()}x{q2.describe()}",
                                degree=d1 + q2.degree)


def split_product_element(q: FiniteQuotient, q1: FiniteQuotient, q2: FiniteQuotient) -> list[tuple[int, int]]:
    """For a product quotient, the component indices ``(i1, i2)`` of every element."""
    d1 = q1.degree
    out = []
    for p in q.elements:
        p1 = p[:d1]
        p2 = tuple(x - d1 for x in p[d1:])
        out.append((q1.index[p1], q2.index[p2]))
    return out
