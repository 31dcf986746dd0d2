import random
from fractions import Fraction

import pytest

from coxmin.conjugacy import enumerate_classes
from coxmin.coxeter import (Chamber, build_system, conjugate_by_chamber,
                            named_matrix, untwisted)
from coxmin.eigen import eigen_decomposition, fixed_space, regular_point
from coxmin.errors import HypothesisFailed
from coxmin.walk import (component_length, decompose_at_regular,
                         derivative_test, descent_walk, flow_curve,
                         special_length_formula, strongly_connected_step)


def test_flow_curve_components():
    a2 = build_system(named_matrix("A2"))
    cox = untwisted(a2.element_from_word([0, 1]))
    C = Chamber.fundamental(a2)
    y = C.interior_point()
    curve = flow_curve(cox, y)
    # Components recombine to the start vector.
    total = [a2.field.zero] * 2
    for comp in curve.components.values():
        total = [a + b for a, b in zip(total, comp)]
    assert all((a - b).is_zero() for a, b in zip(total, y))
    # Decay rates are nonnegative (1 - cos theta >= 0).
    for q in curve.components:
        assert curve.rate(q) >= 0
        assert 0 <= q <= 1


def test_derivative_identity_is_flat():
    a2 = build_system(named_matrix("A2"))
    ident = untwisted(a2.identity)
    K = fixed_space(untwisted(a2.generator(0)))
    h = regular_point(a2, K)
    assert derivative_test(ident, 0, h, a2.pos_roots[0]) == 0


def test_derivative_exact_sign_a2():
    a2 = build_system(named_matrix("A2"))
    s1 = untwisted(a2.generator(0))
    K = fixed_space(untwisted(a2.generator(1)))
    h = regular_point(a2, K)
    v = a2.pos_roots[1]
    assert derivative_test(s1, 1, h, v) in (-1, 1)


@pytest.mark.parametrize("name", ["B2", "A3"])
def test_derivative_lemma_property(name):
    """Crossing a wall that raises the length by 2 has positive derivative."""
    system = build_system(named_matrix(name))
    tbl = system.table()
    rng = random.Random(7)
    checked = 0
    for _ in range(120):
        A = Chamber(system, tbl.element(rng.randrange(tbl.size)))
        i = rng.randrange(system.rank)
        A2 = A.cross(i)
        w = untwisted(tbl.element(rng.randrange(tbl.size)))
        la = conjugate_by_chamber(w, A).length()
        la2 = conjugate_by_chamber(w, A2).length()
        if la2 != la + 2:
            continue
        wall = A.walls()[i]
        # h: a regular point of the wall hyperplane inside the closed chamber.
        basis = fixed_space(untwisted(system.reflection_element(wall)))
        try:
            h = regular_point(system, basis, inside=A)
        except Exception:
            continue
        v = system.root_vector(wall)
        if system.inner(v, A.interior_point()).sign() > 0:
            v = tuple(-c for c in v)  # point out of A
        assert derivative_test(w, wall, h, v) > 0
        checked += 1
    assert checked >= 10


def test_walk_trivial_cases():
    a2 = build_system(named_matrix("A2"))
    C = Chamber.fundamental(a2)
    res = descent_walk(untwisted(a2.identity), C)
    assert res.steps == [] and res.end_chamber == C
    # Elliptic rotation: V_w = V, every chamber already qualifies.
    cox = untwisted(a2.element_from_word([0, 1]))
    for word in ([], [0], [1, 0]):
        res = descent_walk(cox, Chamber(a2, a2.element_from_word(word)))
        assert res.steps == []


def test_walk_soundness_and_chain():
    a3 = build_system(named_matrix("A3"))
    tbl = a3.table()
    rng = random.Random(12)
    for _ in range(20):
        w = untwisted(tbl.element(rng.randrange(tbl.size)))
        A = Chamber(a3, tbl.element(rng.randrange(tbl.size)))
        res = descent_walk(w, A)
        for s in res.steps:
            assert s.length_after <= s.length_before
        wa = conjugate_by_chamber(w, A)
        assert res.chain.apply(wa) == res.end_element
        assert res.end_chamber.contains_in_closure(res.regular_point)
        # The regular point is regular in V_w: recheck from scratch.
        eig = eigen_decomposition(w, dft_check=False)
        system = eig.system
        from coxmin.eigen import hyperplanes_containing
        h_vwt = hyperplanes_containing(system, eig.v_wt)
        for r in range(system.npos):
            if system.pair_root(r, res.regular_point).is_zero():
                assert r in h_vwt


def test_certified_curve_signs_match_floats():
    """The interval escalation agrees with float guidance away from walls."""
    import math
    from coxmin.walk import _certified_curve_signs
    b3 = build_system(named_matrix("B3"))
    tbl = b3.table()
    w = untwisted(tbl.element(33))
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    C = Chamber.fundamental(system)
    y = C.interior_point()
    comps = {q: c for q, c in eig.project(y).items()
             if any(not x.is_zero() for x in c)}
    angles = sorted(comps)
    theta0 = eig.theta0
    lam0 = 4.0 * (1.0 - math.cos(float(theta0) * math.pi))
    rates = [4.0 * (1.0 - math.cos(float(q) * math.pi)) - lam0 for q in angles]
    for s in (0.0, 0.37, 1.5):
        certified = _certified_curve_signs(system, angles, comps, theta0, s, 128)
        for r in range(system.npos):
            val = sum(float(system.pair_root(r, comps[q])) * math.exp(-rt * s)
                      for q, rt in zip(angles, rates))
            if abs(val) > 1e-9:
                assert certified[r] == (1 if val > 0 else -1)


def test_walk_deterministic():
    b3 = build_system(named_matrix("B3"))
    tbl = b3.table()
    w = untwisted(tbl.element(30))
    A = Chamber(b3, tbl.element(41))
    r1 = descent_walk(w, A)
    r2 = descent_walk(w, A)
    assert [s.wall_root for s in r1.steps] == [s.wall_root for s in r2.steps]
    assert r1.regular_point == r2.regular_point


def test_walk_reaches_class_minimum_with_recursion():
    """Walk plus parabolic recursion equals the brute-force class minimum."""
    from coxmin.walk import geometric_min_length
    rng = random.Random(5)
    for name, samples in [("A3", 24), ("B3", 12), ("D4", 8), ("F4", 6)]:
        system = build_system(named_matrix(name))
        recs = enumerate_classes(system)
        tbl = system.table()
        index_to_rec = {}
        for rec in recs:
            for x in rec.elements:
                index_to_rec[x] = rec
        for _ in range(samples):
            idx = rng.randrange(tbl.size)
            w = untwisted(tbl.element(idx))
            assert geometric_min_length(w) == index_to_rec[idx].min_length


def test_walk_reflection_class_ends_minimal():
    """For reflection-class elements the walk alone reaches minimal length."""
    a3 = build_system(named_matrix("A3"))
    tbl = a3.table()
    w = untwisted(a3.element_from_word([0, 1, 0]))  # a reflection, length 3
    for ci in range(tbl.size):
        A = Chamber(a3, tbl.element(ci))
        res = descent_walk(w, A)
        assert res.end_element.length() == 1


def test_special_length_formula_examples():
    b2 = build_system(named_matrix("B2"))
    C = Chamber.fundamental(b2)
    cox = untwisted(b2.element_from_word([0, 1]))
    eig = eigen_decomposition(cox, dft_check=False)
    assert special_length_formula(cox, eig.basis_of(Fraction(1, 2)), C) == 2
    # theta = 0: length 0.
    a2 = build_system(named_matrix("A2"))
    ident = untwisted(a2.identity)
    eig0 = eigen_decomposition(ident, dft_check=False)
    assert special_length_formula(ident, eig0.basis_of(Fraction(0)),
                                  Chamber.fundamental(a2)) == 0
    # theta = pi: length #(H - H_K).
    w0 = untwisted(b2.element_from_word([0, 1, 0, 1]))
    eigpi = eigen_decomposition(w0, dft_check=False)
    assert special_length_formula(w0, eigpi.basis_of(Fraction(1)), C) == 4


def test_special_length_formula_rejects():
    a2 = build_system(named_matrix("A2"))
    s1 = untwisted(a2.generator(0))
    eig = eigen_decomposition(s1, dft_check=False)
    # K = fixed line of s1; a chamber with w(A) in another H_K-component.
    bad = Chamber(a2, a2.generator(0))
    with pytest.raises(HypothesisFailed):
        special_length_formula(s1, eig.basis_of(Fraction(0)), bad)


def test_decompose_at_regular():
    a2 = build_system(named_matrix("A2"))
    C = Chamber.fundamental(a2)
    # Elliptic rotation plane: J empty, u trivial.
    cox = untwisted(a2.element_from_word([0, 1]))
    eig = eigen_decomposition(cox, dft_check=False)
    w_k, u, J = decompose_at_regular(cox, C, eig.basis_of(Fraction(2, 3)))
    assert J == () and u.is_identity() and w_k == cox
    # K = fixed line of s1: J = {0}, u in <s1>.
    s1 = untwisted(a2.generator(0))
    eig1 = eigen_decomposition(s1, dft_check=False)
    w_k, u, J = decompose_at_regular(s1, C, eig1.basis_of(Fraction(0)))
    assert J == (0,) and u == a2.generator(0) and w_k.length() == 0


def test_decompose_length_bookkeeping_random():
    b3 = build_system(named_matrix("B3"))
    tbl = b3.table()
    rng = random.Random(23)
    accepted = 0
    for _ in range(40):
        w = untwisted(tbl.element(rng.randrange(tbl.size)))
        A = Chamber(b3, tbl.element(rng.randrange(tbl.size)))
        eig = eigen_decomposition(w, dft_check=False)
        for q, _, basis in eig.entries:
            try:
                w_k, u, J = decompose_at_regular(w, A, basis)
            except HypothesisFailed:
                continue
            wa = conjugate_by_chamber(eig.owner, Chamber(
                eig.system, eig.system.identity.__class__(eig.system, A.x.perm)))
            assert wa.length() == u.length() + w_k.length()
            accepted += 1
    assert accepted > 10


def test_component_length():
    a2 = build_system(named_matrix("A2"))
    C = Chamber.fundamental(a2)
    ident = untwisted(a2.identity)
    eig = eigen_decomposition(ident, dft_check=False)
    assert component_length(ident, eig.basis_of(Fraction(0)), C) == 0
    s1 = untwisted(a2.generator(0))
    eig1 = eigen_decomposition(s1, dft_check=False)
    K = eig1.basis_of(Fraction(0))
    # s1 flips the component across its own wall: exactly one separation.
    assert component_length(s1, K, C) == 1


def test_component_formula_consistency():
    """l(w_A) = l(U) + (theta/pi)#(H - H_K) for qualifying A."""
    b2 = build_system(named_matrix("B2"))
    tbl = b2.table()
    for wi in range(tbl.size):
        w = untwisted(tbl.element(wi))
        eig = eigen_decomposition(w, dft_check=False)
        q = eig.theta0
        basis = eig.v_wt
        h_k_size = len(__import__("coxmin.eigen", fromlist=["hyperplanes_containing"])
                       .hyperplanes_containing(eig.system, basis))
        for ci in range(tbl.size):
            A = Chamber(b2, tbl.element(ci))
            try:
                w_k, u, J = decompose_at_regular(w, A, basis)
            except HypothesisFailed:
                continue
            lu = component_length(w, basis, A)
            wa = conjugate_by_chamber(w, A)
            predicted = lu + q * (b2.npos - h_k_size)
            assert predicted.denominator == 1
            assert wa.length() == int(predicted)


def test_strongly_connected_step_search():
    """Exhaustive qualifying pairs in B2 have verified equal lengths."""
    b2 = build_system(named_matrix("B2"))
    tbl = b2.table()
    qualifying = 0
    for wi in range(tbl.size):
        w = untwisted(tbl.element(wi))
        for ci in range(tbl.size):
            A = Chamber(b2, tbl.element(ci))
            for i in range(2):
                A2 = A.cross(i)
                try:
                    strongly_connected_step(w, A, A2)
                    qualifying += 1
                except HypothesisFailed:
                    pass
    assert qualifying > 0


def test_strongly_connected_hypothesis_gate():
    # w fixes H_0 & V_w: must raise HypothesisFailed (precondition gate).
    a2 = build_system(named_matrix("A2"))
    ident = untwisted(a2.identity)
    C = Chamber.fundamental(a2)
    with pytest.raises(HypothesisFailed):
        strongly_connected_step(ident, C, C.cross(0))
