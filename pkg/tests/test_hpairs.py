import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wallforms.errors import BilinearityViolation, HMismatch, SquareViolation
from wallforms.forms import standard_form, z2_parameter
from wallforms.hpairs import (
    HMap,
    hmap_kernel,
    hom_to_probe,
    hpair_direct_sum,
    hpair_direct_sum_with_inclusions,
    make_hpair,
    probe,
    sub_hpair,
)
from wallforms.intlinalg import (
    FgAbGroup,
    GroupHom,
    IntMatrix,
    cyclic,
    free_group,
    trivial_group,
)

Z2 = cyclic(2)


def test_probes():
    p0 = probe(0, Z2)
    assert p0.minus.is_trivial() and p0.plus.factors == (0,)
    p1 = probe(1, Z2)
    assert p1.minus.factors == (0,) and p1.plus == Z2
    assert p1.tau[0][0] == Z2.element((1,))
    p1t = probe(1, trivial_group)
    assert p1t.minus.factors == (0,) and p1t.plus.is_trivial()


def test_make_hpair_validates():
    # probe data by hand
    make_hpair(Z2, trivial_group, free_group(1), [])
    make_hpair(Z2, free_group(1), Z2, [[(1,)]])
    with pytest.raises(BilinearityViolation):
        make_hpair(Z2, cyclic(3), Z2, [[(1,)]])
    # H-side violation: H = Z/2 but tau value of infinite order
    with pytest.raises(BilinearityViolation):
        make_hpair(Z2, free_group(1), free_group(1), [[(1,)]])


def test_direct_sum_unital_and_w():
    p0, p1 = probe(0, Z2), probe(1, Z2)
    zero = make_hpair(Z2, trivial_group, trivial_group, [])
    a = hpair_direct_sum(p1, zero)
    assert a == p1
    w = hpair_direct_sum(p0, p1)
    assert w == standard_form(1, z2_parameter()).pair
    with pytest.raises(HMismatch):
        hpair_direct_sum(probe(0, Z2), probe(0, trivial_group))


def test_direct_sum_renormalizes_factors():
    a = make_hpair(trivial_group, cyclic(2), trivial_group, [])
    b = make_hpair(trivial_group, cyclic(3), trivial_group, [])
    s = hpair_direct_sum(a, b)
    assert s.minus.factors == (6,)


def test_direct_sum_associative_normal_form():
    p0, p1 = probe(0, Z2), probe(1, Z2)
    left = hpair_direct_sum(hpair_direct_sum(p0, p1), p0)
    right = hpair_direct_sum(p0, hpair_direct_sum(p1, p0))
    assert left.minus.factors == right.minus.factors
    assert left.plus.factors == right.plus.factors


def test_hmap_square_checked():
    p1 = probe(1, Z2)
    # f-: Z -> Z doubling, f+: id on H breaks the square
    with pytest.raises(SquareViolation):
        HMap(p1, p1,
             GroupHom(p1.minus, p1.minus, IntMatrix.from_rows([[2]])),
             GroupHom.identity(p1.plus))
    # doubling both sides is fine (2h = 0 on the plus side)
    HMap(p1, p1,
         GroupHom(p1.minus, p1.minus, IntMatrix.from_rows([[2]])),
         GroupHom(p1.plus, p1.plus, IntMatrix.from_rows([[0]])))


def test_hmap_kernel_examples():
    p1 = probe(1, Z2)
    ker = hmap_kernel(HMap.identity(p1))
    assert ker.is_zero()
    zero_target = make_hpair(Z2, trivial_group, trivial_group, [])
    zk = hmap_kernel(HMap.zero(p1, zero_target))
    # full sub-pair: every generator lies in the span
    assert all(zk.minus_contains(g) for g in p1.minus.gens())
    assert all(zk.plus_contains(g) for g in p1.plus.gens())
    # f+: Z -> Z/2 reduction with trivial minus parts
    src = make_hpair(trivial_group, trivial_group, free_group(1), [])
    tgt = make_hpair(trivial_group, trivial_group, cyclic(2), [])
    f = HMap(src, tgt, GroupHom.zero(trivial_group, trivial_group),
             GroupHom(free_group(1), cyclic(2), IntMatrix.from_rows([[1]])))
    ker = hmap_kernel(f)
    assert [g.coords for g in ker.plus_gens] == [(2,)]


def test_sub_hpair_tau_closure():
    w = standard_form(1, z2_parameter()).pair
    pg = w.plus.gens()
    # minus generator alone fails closure (tau image escapes)
    with pytest.raises(BilinearityViolation):
        sub_hpair(w, w.minus.gens(), [pg[1]])
    sub = sub_hpair(w, w.minus.gens(), [pg[1], pg[0]])
    assert sub.plus_contains(pg[0])


def test_hom_to_probe_examples():
    p0 = probe(0, Z2)
    homs = hom_to_probe(p0, 0)
    assert homs.group.factors == (0,)
    ident = homs.to_coords(HMap.identity(p0))
    assert not ident.is_zero()
    back = homs.hom_at(ident)
    assert back.f_plus.matrix.entries == (1,)

    w = standard_form(1, z2_parameter()).pair
    homs1 = hom_to_probe(w, 1)
    assert homs1.group.factors == (2, 0)

    m = make_hpair(Z2, trivial_group, Z2, [])
    assert hom_to_probe(m, 0).group.is_trivial()


def test_hom_to_probe_identity_and_additivity():
    p1 = probe(1, Z2)
    homs = hom_to_probe(p1, 1)
    cid = homs.to_coords(HMap.identity(p1))
    assert not cid.is_zero()
    a = homs.hom_at(cid)
    twice = homs.hom_at(cid + cid)
    x = p1.minus.element((3,))
    assert twice.f_minus(x).coords == tuple(2 * c for c in a.f_minus(x).coords)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2), st.sampled_from([(), (2,), (2, 4)]))
def test_hom_group_evaluation_roundtrip(gens, hf):
    H = FgAbGroup(hf)
    from wallforms.forms import standard_form as sf, trivial_parameter

    form = sf(gens, trivial_parameter(H))
    homs = hom_to_probe(form.pair, 1)
    for gelem in homs.group.gens():
        hm = homs.hom_at(gelem)
        assert homs.to_coords(hm) == gelem
