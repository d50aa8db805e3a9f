import pytest

from hocodim.catalog import builtin_context, cyclic_quotient, elementary_quotient
from hocodim.complexes import (
    GRMatrix,
    ReducedComplex,
    chain_map_degree1,
    circle_complex,
    find_homotopy,
    identity_chain_map,
    lift_chain_map,
    lift_diagonal,
    point_complex,
    presentation_complex,
    standard_diagonal,
    surface_complex,
    tensor_chain_map,
    tensor_complex,
    torus_complex,
    wedge_complex,
)
from hocodim.errors import ComplexError, Infeasible, InputError
from hocodim.exactla import GF, QQ, ZZ, ExactMatrix
from hocodim.groups import (
    FpGroup,
    GroupHom,
    GroupRingElement,
    Word,
    cycle_perm,
    free_abelian_group,
    free_group,
    make_finite_quotient,
    trivial_quotient,
)

ONE = GroupRingElement.one()


def el(group, *terms):
    out = GroupRingElement()
    for c, text in terms:
        out = out + GroupRingElement.from_word(group.parse_word(text), c)
    return out


def s3_of(group):
    """Onto S3 for free groups and surface groups (a_i, b_i alternate, pairs swapped)."""
    sigma, tau = cycle_perm(3, (1, 2, 3)), cycle_perm(3, (1, 2))
    pattern = [sigma, tau, tau, sigma]
    return make_finite_quotient(group, [pattern[i % 4] for i in range(group.ngens)])


def quotients_for(c):
    out = [trivial_quotient(c.group), cyclic_quotient(c.group, 4)]
    if c.group.kind == "free" or c.model == "presentation":
        out.append(s3_of(c.group))
    elif c.group.ngens >= 2:
        out.append(elementary_quotient(c.group, 2, 2))
    return out


def test_circle_and_wedge_boundaries():
    c = circle_complex()
    assert c.ranks == (1, 1)
    assert c.boundary(1)[0, 0] == el(c.group, (1, "t"), (-1, "1"))
    w = wedge_complex(2)
    assert [w.boundary(1)[i, 0] for i in range(2)] == [el(w.group, (1, "a"), (-1, "1")),
                                                       el(w.group, (1, "b"), (-1, "1"))]


def test_fox_boundary_of_torus_presentation():
    g = free_abelian_group(2, ["a", "b"])
    c = presentation_complex(g)
    assert c.ranks == (1, 2, 1)
    assert c.boundary(2)[0, 0] == el(g, (1, "1"), (-1, "a b a^-1"))
    assert c.boundary(2)[0, 1] == el(g, (1, "a"), (-1, "a b a^-1 b^-1"))


def test_presentation_requires_asphericity_flag():
    with pytest.raises(InputError):
        presentation_complex(FpGroup(("a",), (Word(((0, 2),)),)))


def test_free_presentation_is_wedge():
    p = presentation_complex(free_group(2))
    assert p.ranks == wedge_complex(2).ranks
    assert p.boundary(1).entries == wedge_complex(2).boundary(1).entries


def test_surface_ranks():
    for g in (1, 2, 3):
        assert surface_complex(g).ranks == (1, 2 * g, 1)


def test_tensor_of_circles():
    t = torus_complex(2)
    g = t.group
    assert t.ranks == (1, 2, 1)
    assert t.boundary(2).entries[0] == (el(g, (1, "x1"), (-1, "1")), el(g, (-1, "x2"), (1, "1")))
    assert torus_complex(3).ranks == (1, 3, 3, 1)
    assert torus_complex(4).ranks == (1, 4, 6, 4, 1)
    c = circle_complex()
    assert tensor_complex(c, point_complex()).ranks == c.ranks


def test_reduce_circle_through_z2():
    c = circle_complex()
    rc = ReducedComplex(c, cyclic_quotient(c.group, 2), GF(2))
    assert rc.boundary_matrix(1) == ExactMatrix(GF(2), [[1, 1], [1, 1]])


def test_reduction_dimensions():
    t = torus_complex(2)
    rc = ReducedComplex(t, elementary_quotient(t.group, 2, 2), QQ)
    assert [rc.dim(k) for k in range(3)] == [4, 8, 4]
    triv = ReducedComplex(t, trivial_quotient(t.group), ZZ)
    assert triv.boundary_matrix(1).is_zero() and triv.boundary_matrix(2).is_zero()


def test_broken_complex_detected():
    c = torus_complex(2)
    bad = GRMatrix(1, 2, [[c.boundary(2)[0, 0], c.boundary(2)[0, 0]]])
    from hocodim.complexes import EquivariantComplex

    broken = EquivariantComplex(c.group, c.ranks, (c.boundary(1), bad))
    with pytest.raises(ComplexError):
        ReducedComplex(broken, elementary_quotient(c.group, 2, 2), ZZ)


@pytest.mark.parametrize("make", [circle_complex, lambda: wedge_complex(3), lambda: torus_complex(2),
                                  lambda: torus_complex(3), lambda: surface_complex(2),
                                  lambda: tensor_complex(surface_complex(2), circle_complex())])
def test_standard_diagonal_verifies(make):
    c = make()
    d = standard_diagonal(c)
    for q in quotients_for(c):
        d.verify(ReducedComplex(c, q, ZZ).evaluator)


def test_circle_diagonal_formula():
    c = circle_complex()
    t = Word.gen(0)
    assert standard_diagonal(c).terms(1, 0) == {(1, 0, Word(), 0, t): 1, (0, 0, Word(), 0, Word()): 1}


def test_corrupted_diagonal_rejected():
    c = torus_complex(2)
    d = standard_diagonal(c)
    comps = list(d.components)
    cell = dict(comps[2][0])
    key = next(iter(cell))
    cell[key] += 1
    comps[2] = (cell,)
    from hocodim.complexes import Diagonal

    with pytest.raises(ComplexError):
        Diagonal(c, tuple(comps)).verify(ReducedComplex(c, elementary_quotient(c.group, 2, 2), ZZ).evaluator)


def test_lift_diagonal_radius():
    c = circle_complex()
    with pytest.raises(Infeasible):
        lift_diagonal(c, 0)
    d = lift_diagonal(c, 1)
    d.verify(ReducedComplex(c, cyclic_quotient(c.group, 3), ZZ).evaluator)
    t = torus_complex(2)
    lift_diagonal(t, 1).verify(ReducedComplex(t, elementary_quotient(t.group, 2, 2), ZZ).evaluator)


def test_lift_diagonal_needs_normal_form():
    with pytest.raises(InputError):
        lift_diagonal(surface_complex(2), 2)


def test_chain_map_degree1_examples():
    z2 = presentation_complex(free_abelian_group(2, ["a", "b"]))
    z = circle_complex()
    proj = GroupHom(z2.group, z.group, (Word.gen(0), Word()))
    phi = chain_map_degree1(proj, z2, z)
    assert phi.component(1).entries == ((ONE,), (GroupRingElement(),))
    f2 = wedge_complex(2)
    both = chain_map_degree1(GroupHom(f2.group, z.group, (Word.gen(0), Word.gen(0))), f2, z)
    assert both.component(1).entries == ((ONE,), (ONE,))
    ident = chain_map_degree1(GroupHom(z.group, z.group, (Word.gen(0),)), z, z)
    assert ident.component(1).entries == ((ONE,),)


def test_pinch_chain_map():
    ctx = builtin_context("pinch:2")
    phi = ctx.chain_map
    assert phi.component(2).entries == ((ONE,),)
    for q in ctx.quotients.values():
        phi.verify(q)


def test_projection_top_component_forced_zero():
    phi = builtin_context("projection").chain_map
    assert phi.component(2).shape == (1, 0)


def test_tensor_chain_map_identity():
    c = circle_complex()
    i = identity_chain_map(c)
    t = tensor_chain_map(i, i)
    for k in range(3):
        assert t.component(k).entries == GRMatrix.identity(t.source.rank(k)).entries


def test_lifted_identity_homotopic_to_identity():
    t = torus_complex(2)
    ident = GroupHom(t.group, t.group, tuple(Word.gen(i) for i in range(2)))
    lifted = lift_chain_map(chain_map_degree1(ident, t, t))
    q = elementary_quotient(t.group, 2, 2)
    h = find_homotopy(lifted, q, QQ, -1, other=identity_chain_map(t))
    assert h is not None
    h.verify()


def test_pinch_certificate_levels():
    ctx = builtin_context("pinch:2")
    q = ctx.quotients["trivial"]
    assert find_homotopy(ctx.chain_map, q, QQ, 1) is None
    find_homotopy(ctx.chain_map, q, QQ, 2).verify()


def test_tensor_reduction_dimensions():
    c, d = circle_complex(), surface_complex(2)
    t = tensor_complex(c, d)
    q = elementary_quotient(t.group, 3, 2)
    rc = ReducedComplex(t, q, QQ)
    for n in range(t.length + 1):
        assert rc.dim(n) == sum(c.rank(p) * d.rank(n - p) for p in range(n + 1)) * q.order
