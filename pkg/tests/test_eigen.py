import random
from fractions import Fraction

import pytest

from coxmin.coxeter import (Chamber, CoxeterMatrix, build_system,
                            enumerate_twists, named_matrix, untwisted,
                            TwistedElement)
from coxmin.eigen import (admissible_filtration, eigen_decomposition,
                          elliptic_parabolic_certificate, fixed_space,
                          good_position_chamber, hyperplanes_containing,
                          is_elliptic, is_quasi_elliptic, order,
                          reflection_subgroup, regular_point)
from coxmin.errors import NoRegularPoint, NotAdmissible
from coxmin.linalg import cone_from_constraints, cone_point_avoiding


def identity_basis(system):
    f = system.field
    return [tuple(f.one if i == j else f.zero for j in range(system.rank))
            for i in range(system.rank)]


def test_order_examples():
    a2 = build_system(named_matrix("A2"))
    assert order(untwisted(a2.identity)) == 1
    assert order(untwisted(a2.generator(0))) == 2
    assert order(untwisted(a2.element_from_word([0, 1]))) == 3


def test_eigen_examples():
    a2 = build_system(named_matrix("A2"))
    ident = eigen_decomposition(untwisted(a2.identity))
    assert ident.angles == [Fraction(0)] and ident.entries[0][1] == 2

    # w0 of A2 is the reflection in the highest root: angles {0, pi}, dims 1/1.
    w0 = eigen_decomposition(untwisted(a2.element_from_word([0, 1, 0])))
    assert w0.angles == [Fraction(0), Fraction(1)]
    assert [d for _, d, _ in w0.entries] == [1, 1]

    # B2 Coxeter element rotates by pi/2 on the whole plane.
    b2 = build_system(named_matrix("B2"))
    cox = eigen_decomposition(untwisted(b2.element_from_word([0, 1])))
    assert cox.angles == [Fraction(1, 2)] and cox.entries[0][1] == 2


def test_eigen_exactness_and_orthogonality():
    h3 = build_system(named_matrix("H3"))
    w = untwisted(h3.element_from_word([0, 1, 2]))
    eig = eigen_decomposition(w)
    system = eig.system
    wr = eig.owner
    wi = wr.inverse()
    for q, _, basis in eig.entries:
        c2 = system.field.two_cos(q)
        for v in basis:
            lhs = tuple(a + b for a, b in zip(wr.apply(v), wi.apply(v)))
            rhs = tuple(c2 * x for x in v)
            assert all((a - b).is_zero() for a, b in zip(lhs, rhs))
    # Distinct angles give B-orthogonal spaces.
    for i in range(len(eig.entries)):
        for j in range(i + 1, len(eig.entries)):
            for u in eig.entries[i][2]:
                for v in eig.entries[j][2]:
                    assert system.inner(u, v).is_zero()


def test_field_raise_on_demand():
    # D4 is built over Q (L = 3 covers the bonds); an order-4 element needs
    # cos(pi/2)-level angles 2*pi*k/4, so the system is rebuilt at lcm(3, 4).
    d4 = build_system(named_matrix("D4"))
    assert d4.field.L == 3
    tbl = d4.table()
    w = None
    for idx in range(tbl.size):
        cand = untwisted(tbl.element(idx))
        if order(cand) == 4:
            w = cand
            break
    assert w is not None
    eig = eigen_decomposition(w)
    assert eig.system.field.L == 12
    assert (2 * eig.system.field.L) % 4 == 0
    # Elements carry over verbatim to the raised system.
    assert eig.owner.body.perm == w.body.perm


@pytest.mark.parametrize("name", ["A3", "B3", "H3"])
def test_dimension_additivity_and_evenness(name):
    system = build_system(named_matrix(name))
    tbl = system.table()
    rng = random.Random(31)
    for _ in range(25):
        w = untwisted(tbl.element(rng.randrange(tbl.size)))
        eig = eigen_decomposition(w)
        assert sum(d for _, d, _ in eig.entries) == system.rank
        for q, d, _ in eig.entries:
            if q not in (0, 1):
                assert d % 2 == 0


def test_regular_point_examples_and_determinism():
    a2 = build_system(named_matrix("A2"))
    V = identity_basis(a2)
    v1 = regular_point(a2, V)
    v2 = regular_point(a2, V)
    assert v1 == v2  # deterministic
    for r in range(a2.npos):
        assert not a2.pair_root(r, v1).is_zero()
    # A point on one hyperplane avoiding the others.
    K = fixed_space(untwisted(a2.generator(0)))
    vk = regular_point(a2, K)
    assert a2.pair_root(0, vk).is_zero()
    assert not a2.pair_root(1, vk).is_zero()
    assert not a2.pair_root(2, vk).is_zero()
    # The zero subspace has no regular point.
    with pytest.raises(NoRegularPoint):
        regular_point(a2, [])


def test_regular_point_inside_chamber():
    a2 = build_system(named_matrix("A2"))
    C = Chamber.fundamental(a2)
    v = regular_point(a2, identity_basis(a2), inside=C)
    assert C.contains_in_closure(v)
    # Constrained infeasibility is an exact negative: the fixed line of s1
    # meets the closed chamber s2(C)... pick a chamber whose closure misses it.
    K = fixed_space(untwisted(a2.generator(0)))
    hits, misses = 0, 0
    tbl = a2.table()
    for i in range(tbl.size):
        ch = Chamber(a2, tbl.element(i))
        try:
            w = regular_point(a2, K, inside=ch)
            assert ch.contains_in_closure(w)
            hits += 1
        except NoRegularPoint:
            misses += 1
    assert hits == 4 and misses == 2  # the line has two sides, four cones touch it


def test_hyperplanes_containing_and_reflection_subgroup():
    a2 = build_system(named_matrix("A2"))
    V = identity_basis(a2)
    assert reflection_subgroup(a2, V) == []
    zero = []
    assert hyperplanes_containing(a2, zero) == frozenset(range(a2.npos))
    cox = eigen_decomposition(untwisted(a2.element_from_word([0, 1])))
    assert reflection_subgroup(a2, cox.v_wt) == []  # elliptic rotation plane


def test_elliptic_examples():
    a2 = build_system(named_matrix("A2"))
    assert is_elliptic(untwisted(a2.element_from_word([0, 1])))
    assert not is_elliptic(untwisted(a2.generator(0)))
    assert not is_elliptic(untwisted(a2.element_from_word([0, 1, 0])))


def test_quasi_elliptic_examples():
    a2 = build_system(named_matrix("A2"))
    assert is_quasi_elliptic(untwisted(a2.element_from_word([0, 1])))
    assert not is_quasi_elliptic(untwisted(a2.identity))
    a1a1 = build_system(CoxeterMatrix([[1, 2], [2, 1]]))
    assert not is_quasi_elliptic(untwisted(a1a1.generator(0)))


def test_parabolic_criterion_certificate():
    b3 = build_system(named_matrix("B3"))
    tbl = b3.table()
    from coxmin.conjugacy import enumerate_classes
    for rec in enumerate_classes(b3, certify_elliptic=False):
        crit = elliptic_parabolic_certificate(rec.representative, rec.elements, tbl)
        assert crit == rec.elliptic


def test_admissible_filtration():
    a2 = build_system(named_matrix("A2"))
    cox = untwisted(a2.element_from_word([0, 1]))
    eig = eigen_decomposition(cox)
    filt = admissible_filtration(cox, eig.angles)
    assert filt.admissible
    assert filt.irredundant == (Fraction(2, 3),)
    # angles = {0} for a Coxeter element: F_1 = 0, not admissible.
    filt0 = admissible_filtration(cox, [Fraction(0)])
    assert not filt0.admissible
    with pytest.raises(NotAdmissible):
        good_position_chamber(cox, filt0)
    # Nonzero angles of a quasi-elliptic element are admissible.
    b2 = build_system(named_matrix("B2"))
    w0 = untwisted(b2.element_from_word([0, 1, 0, 1]))
    filtpi = admissible_filtration(w0, [Fraction(1)])
    assert filtpi.admissible


def good_position_predicate(chamber, filt):
    """Independent from-scratch check of the good-position property."""
    system = filt.system
    for i in range(len(filt.f_bases) - 1):
        basis = filt.f_bases[i + 1]
        if not basis:
            return False
        m = len(basis)
        constraints = []
        for r in filt.hyperplane_sets[i]:
            row = tuple(system.pair_root(r, b) for b in basis)
            if all(x.is_zero() for x in row):
                continue
            sgn = chamber.sign(r)
            constraints.append(tuple(x if sgn > 0 else -x for x in row))
        cone = cone_from_constraints(system.field, m, constraints)
        h_next = hyperplanes_containing(system, basis)
        avoid = [tuple(system.pair_root(r, b) for b in basis)
                 for r in range(system.npos) if r not in h_next]
        if cone_point_avoiding(cone, avoid, constraints) is None:
            return False
    return True


@pytest.mark.parametrize("name", ["A2", "B2", "A3", "B3"])
def test_good_position_chamber_predicate(name):
    system = build_system(named_matrix(name))
    tbl = system.table()
    rng = random.Random(17)
    for _ in range(6):
        w = untwisted(tbl.element(rng.randrange(tbl.size)))
        eig = eigen_decomposition(w, dft_check=False)
        filt = admissible_filtration(eig.owner, eig.angles, eig=eig)
        ch = good_position_chamber(eig.owner, filt)
        assert good_position_predicate(ch, filt)


def test_good_position_w0_a2():
    # Chamber closure must contain the +1 eigendirection of the reflection w0.
    a2 = build_system(named_matrix("A2"))
    w0 = untwisted(a2.element_from_word([0, 1, 0]))
    filt = admissible_filtration(w0, [Fraction(0), Fraction(1)])
    ch = good_position_chamber(w0, filt)
    fix = fixed_space(w0)
    v = regular_point(a2, fix)
    contains = ch.contains_in_closure(v) or \
        ch.contains_in_closure(tuple(-c for c in v))
    assert contains


def test_twisted_eigen():
    a2 = build_system(named_matrix("A2"))
    delta = enumerate_twists(a2.matrix)[1]
    de = TwistedElement(a2, delta, 1, a2.identity)
    eig = eigen_decomposition(de)
    assert eig.angles == [Fraction(0), Fraction(1)]
    assert [d for _, d, _ in eig.entries] == [1, 1]


def test_eigen_json_export():
    import json
    b2 = build_system(named_matrix("B2"))
    eig = eigen_decomposition(untwisted(b2.element_from_word([0, 1])))
    data = eig.to_json()
    text = json.dumps(data, sort_keys=True)
    back = json.loads(text)
    assert back["schema"] == "coxmin/eigen-v1"
    assert back["angles"] == [[1, 2]] and back["dims"] == [2]
