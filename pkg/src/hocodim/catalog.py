"""Bundled models, homomorphisms and quotients, addressed by short names like ``torus:3``."""
from __future__ import annotations

from .complexes import (
    EquivariantComplex,
    circle_complex,
    point_complex,
    presentation_complex,
    surface_complex,
    torus_complex,
    wedge_complex,
)
from .dimension import HomContext, make_context
from .errors import InputError
from .groups import (
    FiniteQuotient,
    FpGroup,
    GroupHom,
    Word,
    free_abelian_group,
    make_finite_quotient,
    trivial_quotient,
)

COMPLEXES = ("circle", "wedge:N", "torus:N", "surface:G", "point")
CONTEXTS = ("projection", "inclusion", "pinch:G", "power:M", "abelianization", "constant", "identity:COMPLEX")
QUOTIENTS = ("trivial", "cyclic:M", "elementary:P:N")


def _split(name: str) -> tuple[str, list[str]]:
    head, *args = name.strip().split(":")
    return head, args


def _int_arg(args: list[str], default: int, lo: int, hi: int, what: str) -> int:
    try:
        v = int(args[0]) if args else default
    except ValueError:
        raise InputError(f"{what} needs an integer argument") from None
    if not lo <= v <= hi:
        raise InputError(f"{what} argument must be between {lo} and {hi}")
    return v


def builtin_complex(name: str) -> EquivariantComplex:
    head, args = _split(name)
    if head == "circle":
        return circle_complex()
    if head == "wedge":
        return wedge_complex(_int_arg(args, 2, 1, 4, "wedge"))
    if head == "torus":
        return torus_complex(_int_arg(args, 2, 1, 4, "torus"))
    if head == "surface":
        return surface_complex(_int_arg(args, 2, 1, 3, "surface"))
    if head == "point":
        return point_complex()
    raise InputError(f"unknown builtin complex {name!r}; known: {', '.join(COMPLEXES)}")


def cyclic_quotient(group: FpGroup, m: int) -> FiniteQuotient:
    """Every generator goes to the standard ``m``-cycle."""
    if m < 1:
        raise InputError("cyclic order must be positive")
    c = tuple((i + 1) % m for i in range(m))
    return make_finite_quotient(group, [c] * group.ngens, label=f"Z{m}" if m > 1 else "trivial", degree=m)


def elementary_quotient(group: FpGroup, p: int, n: int) -> FiniteQuotient:
    """``(Z_p)^n`` on ``n`` disjoint ``p``-cycles; generator ``i`` goes to factor ``i mod n``."""
    if p < 2 or n < 1:
        raise InputError("elementary quotient needs p >= 2 and n >= 1")
    deg = p * n
    images = []
    for i in range(group.ngens):
        k = i % n
        img = list(range(deg))
        for j in range(p):
            img[k * p + j] = k * p + (j + 1) % p
        images.append(tuple(img))
    label = f"Z{p}" if n == 1 else f"Z{p}^{n}"
    return make_finite_quotient(group, images, label=label, degree=deg)


def builtin_quotient(group: FpGroup, name: str) -> FiniteQuotient:
    head, args = _split(name)
    if head == "trivial":
        return trivial_quotient(group)
    if head == "cyclic":
        return cyclic_quotient(group, _int_arg(args, 2, 1, 8, "cyclic"))
    if head == "elementary":
        p = _int_arg(args[:1], 2, 2, 7, "elementary")
        n = _int_arg(args[1:], 2, 1, 4, "elementary")
        return elementary_quotient(group, p, n)
    raise InputError(f"unknown builtin quotient {name!r}; known: {', '.join(QUOTIENTS)}")


def default_quotients(group: FpGroup) -> dict[str, FiniteQuotient]:
    if group.ngens == 0:
        return {"trivial": trivial_quotient(group)}
    qs = [trivial_quotient(group), cyclic_quotient(group, 2), cyclic_quotient(group, 3)]
    if group.ngens >= 2:
        qs.append(elementary_quotient(group, 2, 2))
    return {q.label: q for q in qs}


def _hom(src: EquivariantComplex, tgt: EquivariantComplex, images: list[str], name: str) -> GroupHom:
    return GroupHom(src.group, tgt.group, tuple(tgt.group.parse_word(w) for w in images), name=name)


def builtin_context(name: str, radius: int = 3) -> HomContext:
    """A bundled homomorphism with models, chain map and the default quotients of the target."""
    head, args = _split(name)
    if head == "projection":
        src = presentation_complex(free_abelian_group(2, ["a", "b"]), name="torus2", closed_orientable=True)
        tgt = circle_complex()
        hom = _hom(src, tgt, ["t", ""], "projection")
    elif head == "inclusion":
        src, tgt = circle_complex(), torus_complex(2)
        hom = _hom(src, tgt, ["x1"], "inclusion")
    elif head == "pinch":
        g = _int_arg(args, 2, 1, 3, "pinch")
        src, tgt = surface_complex(g), torus_complex(2)
        hom = _hom(src, tgt, ["x1", "x2"] + [""] * (2 * g - 2), f"pinch{g}")
    elif head == "power":
        m = _int_arg(args, 2, -8, 8, "power")
        src = tgt = circle_complex()
        hom = _hom(src, tgt, [f"t^{m}" if m else ""], f"power{m}")
    elif head == "abelianization":
        src, tgt = wedge_complex(2), torus_complex(2)
        hom = _hom(src, tgt, ["x1", "x2"], "abelianization")
    elif head == "constant":
        src, tgt = torus_complex(2), point_complex()
        hom = GroupHom(src.group, tgt.group, (Word(),) * src.group.ngens, name="constant")
    elif head == "identity":
        src = tgt = builtin_complex(":".join(args) or "circle")
        hom = GroupHom(src.group, tgt.group, tuple(Word.gen(i) for i in range(src.group.ngens)),
                       name=f"id_{src.label()}")
    else:
        raise InputError(f"unknown builtin context {name!r}; known: {', '.join(CONTEXTS)}")
    return make_context(name, hom, src, tgt, default_quotients(tgt.group), radius)


def suite_contexts() -> list[HomContext]:
    """The bundled context suite: projection, inclusion, pinch, powers and abelianization."""
    names = ["projection", "inclusion", "pinch:2", "power:2", "power:3", "abelianization"]
    return [builtin_context(n) for n in names]
