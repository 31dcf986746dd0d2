import itertools
from fractions import Fraction

from coxmin.linalg import (cone_from_constraints, cone_point_avoiding,
                           intersect_subspaces, kernel_basis, rank,
                           rational_tuples, rref, solve_in_span,
                           subspace_contains, vec_dot)
from coxmin.scalars import get_field


def _vec(f, *vals):
    return tuple(f.from_rational(Fraction(v)) for v in vals)


def test_rref_rank_kernel():
    f = get_field(3)
    rows = [_vec(f, 1, 2, 3), _vec(f, 2, 4, 6), _vec(f, 0, 1, 1)]
    red, pivots = rref(rows)
    assert len(red) == 2 and pivots == [0, 1]
    assert rank(rows) == 2
    ker = kernel_basis(rows, 3, f)
    assert len(ker) == 1
    for row in rows:
        assert vec_dot(row, ker[0]).is_zero()


def test_solve_in_span():
    f = get_field(3)
    basis = [_vec(f, 1, 0, 1), _vec(f, 0, 1, 1)]
    v = _vec(f, 2, 3, 5)
    coords = solve_in_span(basis, v, f)
    assert coords is not None
    assert [float(c) for c in coords] == [2.0, 3.0]
    assert not subspace_contains(basis, _vec(f, 0, 0, 1), f)


def test_intersection():
    f = get_field(3)
    b1 = [_vec(f, 1, 0, 0), _vec(f, 0, 1, 0)]
    b2 = [_vec(f, 0, 1, 0), _vec(f, 0, 0, 1)]
    inter = intersect_subspaces(b1, b2, f)
    assert len(inter) == 1
    assert subspace_contains([_vec(f, 0, 1, 0)], inter[0], f)


def test_rational_tuples_deterministic_and_dense():
    a = list(itertools.islice(rational_tuples(2), 40))
    b = list(itertools.islice(rational_tuples(2), 40))
    assert a == b
    assert a[0] == (Fraction(0), Fraction(0))
    assert len(set(a)) == 40
    # start_index shifts the same stream.
    c = list(itertools.islice(rational_tuples(2, 5), 10))
    assert c == a[5:15]
    # Both coordinates eventually vary.
    assert any(t[0] != 0 for t in a) and any(t[1] != 0 for t in a)


def test_cone_quadrant():
    f = get_field(3)
    # x >= 0, y >= 0 in the plane.
    cone = cone_from_constraints(f, 2, [_vec(f, 1, 0), _vec(f, 0, 1)])
    assert not cone.lines and len(cone.rays) == 2
    p = cone.relative_interior_point()
    assert float(p[0]) > 0 and float(p[1]) > 0


def test_cone_halfplane_has_line():
    f = get_field(3)
    cone = cone_from_constraints(f, 2, [_vec(f, 1, 0)])
    assert len(cone.lines) == 1 and len(cone.rays) == 1


def test_cone_point_avoiding_exact_negative():
    f = get_field(3)
    # Cone = the x-axis ray; avoiding the hyperplane y = 0 is impossible.
    cone = cone_from_constraints(f, 2, [_vec(f, 1, 0), _vec(f, 0, 1),
                                        _vec(f, 0, -1)])
    res = cone_point_avoiding(cone, [_vec(f, 0, 1)],
                              [_vec(f, 1, 0), _vec(f, 0, 1), _vec(f, 0, -1)])
    assert res is None
    # Avoiding x = y is possible.
    res = cone_point_avoiding(cone, [_vec(f, 1, -1)],
                              [_vec(f, 1, 0), _vec(f, 0, 1), _vec(f, 0, -1)])
    assert res is not None
    assert not vec_dot(_vec(f, 1, -1), res).is_zero()


def test_cone_simplex_3d():
    f = get_field(3)
    cons = [_vec(f, 1, 0, 0), _vec(f, 0, 1, 0), _vec(f, 0, 0, 1),
            _vec(f, 1, 1, -1)]
    cone = cone_from_constraints(f, 3, cons)
    p = cone.relative_interior_point()
    for c in cons:
        assert vec_dot(c, p).sign() >= 0
    span = cone.span()
    assert len(span) == 3
