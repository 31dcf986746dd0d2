"""Exact linear algebra over a scalar field, plus polyhedral cone support.

Vectors are tuples of AlgebraicScalar, matrices are lists of row vectors.
Dimensions here are tiny (the rank of the Coxeter system), so everything is
plain fraction-free-ish Gaussian elimination with exact zero tests.

The double description machinery converts a cone {v : a_i . v >= 0} into a
generator form (lineality basis + extreme rays).  It is used to decide
exactly whether a closed chamber (or a face of one) contains a regular point
of a subspace, and to produce such a point deterministically when it does.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .scalars import AlgebraicScalar, ScalarField

Vector = tuple[AlgebraicScalar, ...]
Matrix = list[Vector]


def vec_add(u: Vector, v: Vector) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v: Vector) -> Vector:
    return tuple(c * a for a in v)


def vec_dot(u: Vector, v: Vector) -> AlgebraicScalar:
    acc = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        acc = acc + a * b
    return acc


def vec_is_zero(v: Vector) -> bool:
    return all(a.is_zero() for a in v)


def zero_vector(field: ScalarField, n: int) -> Vector:
    return (field.zero,) * n


def mat_apply(rows: Matrix, v: Vector) -> Vector:
    return tuple(vec_dot(r, v) for r in rows)


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = list(zip(*b))
    return [tuple(vec_dot(row, col) for col in bt) for row in a]


def rref(rows: Iterable[Vector]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    work = [list(r) for r in rows if not vec_is_zero(r)]
    if not work:
        return [], []
    ncols = len(work[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(work)) if not work[i][c].is_zero()), None)
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        inv = work[r][c].inverse()
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and not work[i][c].is_zero():
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
        if r == len(work):
            break
    return [tuple(row) for row in work[:r]], pivots


def rank(rows: Iterable[Vector]) -> int:
    return len(rref(rows)[0])


def kernel_basis(rows: Matrix, ncols: int, field: ScalarField) -> Matrix:
    """Basis of {v : M v = 0} for M given by rows of length ncols."""
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis: Matrix = []
    for fc in free:
        v = [field.zero] * ncols
        v[fc] = field.one
        for row, pc in zip(red, pivots):
            v[pc] = -row[fc]
        basis.append(tuple(v))
    return basis


def solve_in_span(basis: Matrix, v: Vector, field: ScalarField) -> list[AlgebraicScalar] | None:
    """Coordinates of v in span(basis), or None if v is outside."""
    if not basis:
        return [] if vec_is_zero(v) else None
    n = len(v)
    # Solve basis^T x = v by eliminating on the augmented system.
    aug = [[basis[j][i] for j in range(len(basis))] + [v[i]] for i in range(n)]
    red, pivots = rref([tuple(r) for r in aug])
    m = len(basis)
    if any(p == m for p in pivots):
        return None  # inconsistent
    coords = [field.zero] * m
    for row, p in zip(red, pivots):
        coords[p] = row[m]
    return coords


def subspace_contains(basis: Matrix, v: Vector, field: ScalarField) -> bool:
    return solve_in_span(basis, v, field) is not None


def subspace_equal(b1: Matrix, b2: Matrix, field: ScalarField) -> bool:
    if len(rref(b1)[0]) != len(rref(b2)[0]):
        return False
    return all(subspace_contains(b1, v, field) for v in b2)


def intersect_subspaces(b1: Matrix, b2: Matrix, field: ScalarField) -> Matrix:
    """Basis of span(b1) & span(b2)."""
    if not b1 or not b2:
        return []
    n = len(b1[0])
    # Kernel of the matrix whose columns are the b1 and b2 vectors: a kernel
    # element (x, y) has sum x_i b1_i = -sum y_j b2_j in the intersection.
    rows = [tuple(list(col)) for col in zip(*([list(b) for b in b1] + [list(b) for b in b2]))]
    ker = kernel_basis([tuple(r) for r in rows], len(b1) + len(b2), field)
    out: Matrix = []
    for k in ker:
        v = zero_vector(field, n)
        for x, b in zip(k[: len(b1)], b1):
            v = vec_add(v, vec_scale(x, b))
        if not vec_is_zero(v):
            out.append(v)
    red, _ = rref(out)
    return red


# ---------------------------------------------------------------------------
# Deterministic rational tuple enumeration.


def _fractions_by_height() -> Iterator[Fraction]:
    yield Fraction(0)
    seen = {Fraction(0)}
    for h in itertools.count(1):
        batch = []
        for b in range(1, h + 1):
            for a in range(-h, h + 1):
                f = Fraction(a, b)
                if f not in seen:
                    seen.add(f)
                    batch.append(f)
        yield from sorted(batch)


def rational_tuples(m: int, start_index: int = 0) -> Iterator[tuple[Fraction, ...]]:
    """Deterministic enumeration of Q^m, ordered by entry height.

    The same (m, start_index) always yields the same stream; downstream
    constructions that take "the first tuple that works" are therefore
    reproducible run to run.
    """
    if m == 0:
        yield ()
        return
    fracs: list[Fraction] = []
    gen = _fractions_by_height()

    def frac(i: int) -> Fraction:
        while len(fracs) <= i:
            fracs.append(next(gen))
        return fracs[i]

    idx = 0
    for total in itertools.count(0):
        for split in itertools.product(range(total + 1), repeat=m):
            if max(split) != total:
                continue  # yielded in an earlier ring
            if idx >= start_index:
                yield tuple(frac(i) for i in split)
            idx += 1


# ---------------------------------------------------------------------------
# Double description: cone {v : a . v >= 0 for all constraints}.


class Cone:
    """Generator form of a polyhedral cone: lineality basis plus rays."""

    def __init__(self, field: ScalarField, dim: int, lines: Matrix, rays: Matrix,
                 tight: list[set[int]], nconstraints: int):
        self.field = field
        self.dim = dim
        self.lines = lines
        self.rays = rays
        self._tight = tight
        self._nconstraints = nconstraints

    def span(self) -> Matrix:
        red, _ = rref(list(self.lines) + list(self.rays))
        return red

    def relative_interior_point(self) -> Vector:
        v = zero_vector(self.field, self.dim)
        for r in self.rays:
            v = vec_add(v, r)
        return v

    def is_zero(self) -> bool:
        return not self.lines and not self.rays


def cone_from_constraints(field: ScalarField, dim: int, constraints: Sequence[Vector]) -> Cone:
    """Double description method, rank-based adjacency test."""
    lines: Matrix = [tuple(field.one if i == j else field.zero for j in range(dim))
                     for i in range(dim)]
    rays: Matrix = []
    tight: list[set[int]] = []

    for idx, a in enumerate(constraints):
        vals_lines = [vec_dot(a, l) for l in lines]
        pivot = next((i for i, v in enumerate(vals_lines) if not v.is_zero()), None)
        if pivot is not None:
            l0 = lines[pivot]
            v0 = vals_lines[pivot]
            if v0.sign() < 0:
                l0 = vec_scale(field.from_rational(-1), l0)
                v0 = -v0
            new_lines = []
            for i, l in enumerate(lines):
                if i == pivot:
                    continue
                vl = vals_lines[i]
                new_lines.append(vec_sub(l, vec_scale(vl / v0, l0)) if not vl.is_zero() else l)
            new_rays = []
            for r, t in zip(rays, tight):
                vr = vec_dot(a, r)
                new_rays.append(vec_sub(r, vec_scale(vr / v0, l0)) if not vr.is_zero() else r)
                t.add(idx)
            lines = new_lines
            rays = new_rays
            rays.append(l0)
            tight.append(set(range(idx)))
            continue

        vals = [vec_dot(a, r) for r in rays]
        signs = [v.sign() for v in vals]
        if all(s == 0 for s in signs):
            for t in tight:
                t.add(idx)
            continue
        keep = [i for i, s in enumerate(signs) if s >= 0]
        plus = [i for i, s in enumerate(signs) if s > 0]
        minus = [i for i, s in enumerate(signs) if s < 0]
        new_rays = [rays[i] for i in keep]
        new_tight = [tight[i] | ({idx} if signs[i] == 0 else set()) for i in keep]
        lrank = len(lines)
        for ip, im in itertools.product(plus, minus):
            z12 = tight[ip] & tight[im]
            face = [rays[k] for k in range(len(rays))
                    if k not in (ip, im) and z12 <= tight[k]]
            if rank(list(lines) + face + [rays[ip], rays[im]]) != lrank + 2:
                continue  # not adjacent
            comb = vec_add(vec_scale(vals[ip], rays[im]), vec_scale(-vals[im], rays[ip]))
            if not vec_is_zero(comb):
                new_rays.append(comb)
                new_tight.append(z12 | {idx})
        rays, tight = new_rays, new_tight

    return Cone(field, dim, lines, rays, tight, len(constraints))


def cone_point_avoiding(cone: Cone, avoid: Sequence[Vector],
                        constraints: Sequence[Vector],
                        start_index: int = 0) -> Vector | None:
    """A point of the cone on none of the `avoid` hyperplanes.

    Returns None when impossible, i.e. when the span of the cone lies inside
    one of the hyperplanes (exact negative).  Otherwise searches
    deterministically: perturb the relative interior point along enumerated
    combinations of the generators, halving the step until the cone
    membership check passes again.
    """
    field = cone.field
    span = cone.span()
    if not span:
        return None
    for h in avoid:
        if all(vec_dot(h, b).is_zero() for b in span):
            return None
    gens = list(cone.lines) + list(cone.rays)
    p0 = cone.relative_interior_point()

    def ok(v: Vector) -> bool:
        if any(vec_dot(a, v).sign() < 0 for a in constraints):
            return False
        return all(not vec_dot(h, v).is_zero() for h in avoid)

    if ok(p0):
        return p0
    for coeffs in itertools.islice(rational_tuples(len(gens), start_index), 20000):
        u = zero_vector(field, cone.dim)
        for c, g in zip(coeffs, gens):
            if c:
                u = vec_add(u, vec_scale(field.from_rational(c), g))
        if vec_is_zero(u):
            continue
        step = Fraction(1)
        for _ in range(64):
            v = vec_add(p0, vec_scale(field.from_rational(step), u))
            if ok(v):
                return v
            step /= 2
    from .errors import ConstructionFailed

    raise ConstructionFailed("cone point search exhausted; existence was guaranteed")
