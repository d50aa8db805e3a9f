
import numpy as np
import pytest

from hocodim.catalog import builtin_context, cyclic_quotient, elementary_quotient
from hocodim.cohomology import (
    Coefficients,
    CohomologyClass,
    HomologyClass,
    QModule,
    augmentation_ideal,
    boundaries_module,
    bs_class,
    bs_power,
    cap_product,
    classes,
    cohomology,
    detecting_class,
    dual_module,
    fundamental_class,
    homology,
    induced_map,
    induced_module,
    permutation_module,
    regular_module,
    restrict_module,
    shapiro_check,
    subgroup_closure,
    tensor_module,
    trivial_module,
    cup_product,
)
from hocodim.complexes import ReducedComplex, circle_complex, standard_diagonal, surface_complex, torus_complex
from hocodim.errors import ComplexError, InputError
from hocodim.exactla import GF, QQ, ZZ, ExactMatrix, rank
from hocodim.groups import GroupHom, Word, trivial_quotient

F2 = GF(2)


def dims(rc, m, variance="cohomology"):
    f = cohomology if variance == "cohomology" else homology
    return [f(rc, m, n).dim for n in range(rc.length + 1)]


def test_module_examples():
    c = circle_complex()
    q = cyclic_quotient(c.group, 2)
    aug = augmentation_ideal(q, F2)
    assert aug.dim == 1
    assert aug.element(1) == ExactMatrix.identity(F2, 1)
    m = regular_module(q, QQ)
    assert m.dim == 2
    t = tensor_module(trivial_module(q, QQ), m)
    assert t.matrices == m.matrices
    assert dual_module(m).validate().dim == 2


def test_module_must_factor_through_quotient():
    c = circle_complex()
    q = cyclic_quotient(c.group, 3)
    with pytest.raises(InputError):
        QModule.from_generators(q, QQ, [ExactMatrix(QQ, [[-1]])])


def test_classical_cohomology():
    c = circle_complex()
    assert dims(ReducedComplex(c, trivial_quotient(c.group), QQ), trivial_module(trivial_quotient(c.group), QQ)) == [1, 1]
    t = torus_complex(2)
    q = trivial_quotient(t.group)
    assert dims(ReducedComplex(t, q, F2), trivial_module(q, F2)) == [1, 2, 1]
    s = surface_complex(2)
    qs = trivial_quotient(s.group)
    assert dims(ReducedComplex(s, qs, QQ), trivial_module(qs, QQ)) == [1, 4, 1]


def test_integral_homology():
    c = circle_complex()
    q = trivial_quotient(c.group)
    rc = ReducedComplex(c, q, ZZ)
    assert [str(homology(rc, trivial_module(q, ZZ), n).invariants) for n in range(2)] == ["Z", "Z"]
    s = surface_complex(2)
    qs = trivial_quotient(s.group)
    h1 = homology(ReducedComplex(s, qs, ZZ), trivial_module(qs, ZZ), 1).invariants
    assert h1.free_rank == 4 and h1.torsion == ()


def test_sign_module_torsion():
    c = circle_complex()
    q = cyclic_quotient(c.group, 2)
    sign = QModule.from_generators(q, ZZ, [ExactMatrix(ZZ, [[-1]])], "sign")
    rc = ReducedComplex(c, q, ZZ)
    assert [str(cohomology(rc, sign, n).invariants) for n in range(2)] == ["0", "Z/2"]
    assert [str(homology(rc, sign, n).invariants) for n in range(2)] == ["Z/2", "0"]


def test_augmentation_ideal_on_torus_matches_duality():
    t = torus_complex(2)
    q = elementary_quotient(t.group, 2, 2)
    rc = ReducedComplex(t, q, F2)
    aug = augmentation_ideal(q, F2)
    assert dims(rc, aug) == dims(rc, dual_module(aug), "homology")


@pytest.mark.parametrize("name", ["circle", "torus", "surface"])
@pytest.mark.parametrize("ring", [QQ, F2, GF(3)])
def test_field_duality(name, ring):
    c = {"circle": circle_complex(), "torus": torus_complex(2), "surface": surface_complex(2)}[name]
    qs = [trivial_quotient(c.group), cyclic_quotient(c.group, 2), cyclic_quotient(c.group, 4)]
    if c.group.ngens >= 2:
        qs.append(elementary_quotient(c.group, 2, 2))
    for q in qs:
        rc = ReducedComplex(c, q, ring)
        for m in (trivial_module(q, ring), regular_module(q, ring), augmentation_ideal(q, ring)):
            assert dims(rc, m) == dims(rc, dual_module(m), "homology")


@pytest.mark.parametrize("m", [2, 3, 4])
def test_ucf(m):
    for c in (circle_complex(), torus_complex(2), surface_complex(2)):
        q = cyclic_quotient(c.group, m)
        rc = ReducedComplex(c, q, ZZ)
        for mod in (trivial_module(q, ZZ), regular_module(q, ZZ), augmentation_ideal(q, ZZ)):
            inv = [cohomology(rc, mod, n).invariants for n in range(c.length + 2)]
            for p in (2, 3):
                rp = ReducedComplex(c, q, GF(p))
                for n in range(c.length + 1):
                    want = inv[n].free_rank + inv[n].t_p(p) + inv[n + 1].t_p(p)
                    assert cohomology(rp, mod.change_ring(GF(p)), n).dim == want


def test_cup_products_on_torus():
    t = torus_complex(2)
    q = trivial_quotient(t.group)
    rc = ReducedComplex(t, q, F2)
    d = standard_diagonal(t)
    u, v = classes(cohomology(rc, trivial_module(q, F2), 1))
    assert not cup_product(u, v, d).is_zero()
    assert cup_product(u, u, d).is_zero()
    one = classes(cohomology(rc, trivial_module(q, F2), 0))[0]
    assert cup_product(u, one, d).vector == u.vector


@pytest.mark.parametrize("c", [torus_complex(2), torus_complex(3), surface_complex(2)], ids=["T2", "T3", "S2"])
def test_graded_commutativity(c):
    q = trivial_quotient(c.group)
    rc = ReducedComplex(c, q, QQ)
    d = standard_diagonal(c)
    triv = trivial_module(q, QQ)
    for p in range(1, c.length):
        for r in range(1, c.length - p + 1):
            for u in classes(cohomology(rc, triv, p)):
                for v in classes(cohomology(rc, triv, r)):
                    uv = cup_product(u, v, d)
                    vu = cup_product(v, u, d)
                    sign = -1 if (p * r) % 2 else 1
                    diff = uv.vector - vu.vector if sign > 0 else uv.vector + vu.vector
                    assert uv.group().is_zero_class(diff)


def test_caps_with_fundamental_class():
    t = torus_complex(2)
    q = trivial_quotient(t.group)
    rc = ReducedComplex(t, q, QQ)
    d = standard_diagonal(t)
    a = fundamental_class(rc)
    assert not a.is_zero()
    one = classes(cohomology(rc, trivial_module(q, QQ), 0))[0]
    assert cap_product(a, one, d).vector == a.vector
    images = [cap_product(a, u, d).vector for u in classes(cohomology(rc, trivial_module(q, QQ), 1))]
    h1 = homology(rc, trivial_module(q, QQ), 1)
    coords = ExactMatrix(QQ, np.array([h1.coords(v) for v in images], dtype=object))
    assert rank(coords) == 2


@pytest.mark.parametrize("c", [torus_complex(2), torus_complex(3), surface_complex(1), surface_complex(2)],
                         ids=["T2", "T3", "S1", "S2"])
def test_poincare_duality_ranks(c):
    d = standard_diagonal(c)
    for q in (trivial_quotient(c.group), cyclic_quotient(c.group, 2)):
        rc = ReducedComplex(c, q, QQ)
        a = fundamental_class(rc)
        for m in (trivial_module(q, QQ), regular_module(q, QQ)):
            for k in range(c.length + 1):
                us = classes(cohomology(rc, m, k))
                caps = [cap_product(a, u, d) for u in us]
                target = homology(Coefficients(rc, tensor_module(trivial_module(q, QQ), m)), c.length - k)
                assert target.dim == len(us)
                if us:
                    coords = ExactMatrix(QQ, np.array([target.coords(x.vector) for x in caps], dtype=object))
                    assert rank(coords) == len(us)


def test_surface_cup_pairing_nondegenerate():
    s = surface_complex(2)
    q = trivial_quotient(s.group)
    rc = ReducedComplex(s, q, QQ)
    d = standard_diagonal(s)
    us = classes(cohomology(rc, trivial_module(q, QQ), 1))
    h2 = cohomology(rc, trivial_module(q, QQ), 2)
    pairing = [[h2.coords(cup_product(u, v, d).vector)[0] for v in us] for u in us]
    m = ExactMatrix(QQ, pairing)
    assert rank(m) == 4
    assert m == ExactMatrix(QQ, [[-x for x in row] for row in np.array(pairing, dtype=object).T.tolist()])


def test_cocycle_check():
    circ = circle_complex()
    q = cyclic_quotient(circ.group, 2)
    coef = Coefficients(ReducedComplex(circ, q, QQ), regular_module(q, QQ))
    with pytest.raises(ComplexError):
        CohomologyClass(coef, 0, ExactMatrix(QQ, [[1], [0]]))
    CohomologyClass(coef, 0, ExactMatrix(QQ, [[1], [1]]))
    with pytest.raises(ComplexError):
        HomologyClass(coef, 1, ExactMatrix(QQ, [[1], [0]]))
    with pytest.raises(InputError):
        CohomologyClass(coef, 1, ExactMatrix(QQ, [[1]]))


def test_berstein_schwarz():
    c = circle_complex()
    q = cyclic_quotient(c.group, 2)
    assert not bs_class(ReducedComplex(c, q, F2)).is_zero()
    triv = trivial_quotient(c.group)
    assert bs_class(ReducedComplex(c, triv, F2)).vector.rows == 0
    t = torus_complex(2)
    rc = ReducedComplex(t, elementary_quotient(t.group, 2, 2), F2)
    d = standard_diagonal(t)
    assert not bs_power(rc, 2, d).is_zero()
    assert bs_power(rc, 3, d).is_zero()


def test_boundaries_modules():
    t = torus_complex(2)
    q = trivial_quotient(t.group)
    rc = ReducedComplex(t, q, QQ)
    assert [boundaries_module(rc, k).module.dim for k in range(3)] == [1, 2, 1]
    g0 = detecting_class(rc, 0)
    assert not g0.is_zero()
    g2 = detecting_class(rc, 2)
    assert cohomology(g2.coefficients, 2).dim == 1 and not g2.is_zero()
    rz = ReducedComplex(t, elementary_quotient(t.group, 2, 2), ZZ)
    boundaries_module(rz, 1).module.validate()


def test_induced_modules():
    c = circle_complex()
    q = cyclic_quotient(c.group, 4)
    whole = frozenset(range(q.order))
    m = trivial_module(q, F2)
    assert induced_module(m, q).matrices == m.matrices
    sub = subgroup_closure(q, [q.element_of(Word.gen(0, 2))])
    assert len(sub) == 2
    perm = permutation_module(q, sub, F2)
    assert perm.dim == 2
    with pytest.raises(InputError):
        permutation_module(q, frozenset({0, 1}), F2)
    assert whole == subgroup_closure(q, [1])


def test_shapiro_on_double_cover():
    c = circle_complex()
    q = cyclic_quotient(c.group, 4)
    inc = GroupHom(c.group, c.group, (Word.gen(0, 2),))
    from hocodim.groups import pullback_quotient

    qs = pullback_quotient(inc, q)
    for ring in (QQ, F2):
        for mod in (trivial_module(qs, ring), regular_module(qs, ring)):
            assert all(r.ok for r in shapiro_check(c, c, inc, q, mod))


def test_induced_map_examples():
    t = torus_complex(2)
    ident = builtin_context("identity:torus:2")
    q = ident.quotients["Z2^2"]
    data = ident.reduction(q, QQ)
    for m in (trivial_module(q, QQ), augmentation_ideal(q, QQ)):
        for n in range(3):
            f = induced_map(data, m, n)
            assert f.matrix == ExactMatrix.identity(QQ, f.domain.dim)
    pinch = builtin_context("pinch:2")
    qt = pinch.quotients["trivial"]
    assert induced_map(pinch.reduction(qt, QQ), trivial_module(qt, QQ), 2).rank == 1
    proj = builtin_context("projection")
    qp = proj.quotients["trivial"]
    data = proj.reduction(qp, QQ)
    assert [induced_map(data, trivial_module(qp, QQ), n).rank for n in (1, 2)] == [1, 0]
    assert t.length == 2


@pytest.mark.parametrize("name", ["pinch:2", "inclusion", "abelianization", "power:2", "projection"])
def test_integral_detection_follows_fields(name):
    ctx = builtin_context(name)
    for q in ctx.quotients.values():
        for ring in (QQ, F2, GF(3)):
            data = ctx.reduction(q, ring)
            dz = ctx.reduction(q, ZZ)
            for mz in (trivial_module(q, ZZ), regular_module(q, ZZ)):
                m = mz.change_ring(ring)
                for n in range(ctx.top_degree + 1):
                    for variance in ("cohomology", "homology"):
                        if induced_map(data, m, n, variance).rank:
                            assert induced_map(dz, mz, n, variance).nonzero


@pytest.mark.parametrize("name", ["pinch:2", "identity:torus:2", "abelianization"])
def test_cup_naturality(name):
    ctx = builtin_context(name)
    ds, dt = standard_diagonal(ctx.source), standard_diagonal(ctx.target)
    for q in ctx.quotients.values():
        data = ctx.reduction(q, F2)
        for m in (trivial_module(q, F2), augmentation_ideal(q, F2)):
            mm = tensor_module(m, m)
            for u in classes(cohomology(data.coefficients(m, "target"), 1)):
                for v in classes(cohomology(data.coefficients(m, "target"), 1)):
                    uv = cup_product(u, v, dt, data.coefficients(mm, "target"))
                    lhs = data.cochain_map(mm, 2) @ uv.vector
                    pu = CohomologyClass(data.coefficients(m, "source"), 1, data.cochain_map(m, 1) @ u.vector)
                    pv = CohomologyClass(data.coefficients(m, "source"), 1, data.cochain_map(m, 1) @ v.vector)
                    rhs = cup_product(pu, pv, ds, data.coefficients(mm, "source"))
                    assert rhs.group().is_zero_class(lhs - rhs.vector)


def test_restrict_module():
    c = circle_complex()
    q = cyclic_quotient(c.group, 4)
    inc = GroupHom(c.group, c.group, (Word.gen(0, 2),))
    from hocodim.groups import pullback_quotient

    qs = pullback_quotient(inc, q)
    r = restrict_module(regular_module(q, QQ), qs)
    assert r.dim == 4 and r.quotient is qs
    r.validate()
