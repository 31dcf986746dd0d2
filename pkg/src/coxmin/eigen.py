"""Exact spectral data of a twisted element acting on V.

Angles are rationals q in [0, 1] standing for theta = q*pi.  The eigenspace
V^theta = ker(M + M^-1 - 2cos(theta) I) is computed by exact Gaussian
elimination; expressing 2cos(2*pi*k/d) may require a larger field, in which
case the system is transparently rebuilt at level lcm(L, d) (root indices
are stable, so elements carry over).

The kernel ranks are the primary multiplicities.  A redundant cross-check
recomputes them as the discrete Fourier transform of the trace sequence
tr(M^j), evaluated in certified interval arithmetic (mpmath.iv) and rounded;
a disagreement signals an arithmetic bug, not a property of the input.

Also here: deterministic regular points of subspaces (with or without a
chamber constraint), the reflection subgroup of a subspace, the elliptic and
quasi-elliptic predicates, admissible filtrations and good-position chambers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .coxeter import Chamber, CoxeterSystem, GroupElement, TwistedElement
from .errors import (ConstructionFailed, FieldTooSmall, MultiplicityMismatch,
                     NoRegularPoint, NotAdmissible)
from .linalg import (Matrix, Vector, cone_from_constraints, cone_point_avoiding,
                     kernel_basis, mat_mul, rational_tuples, rref, solve_in_span,
                     vec_add, vec_is_zero, vec_scale, zero_vector)

Angle = Fraction  # q in [0, 1], theta = q*pi


def order(w: TwistedElement) -> int:
    """The least d >= 1 with w^d = identity in the extended group."""
    d = 1
    acc = w
    while not acc.is_identity():
        acc = acc * w
        d += 1
    return d


@dataclass
class EigenDecomposition:
    """Angles of w on V with exact eigenspace bases.

    entries: (angle q, dim V^{q*pi}, basis), ascending in q, zero dims absent.
    theta0 is the least angle with V^theta != V^W; v_wt is the corresponding
    V_w = V^{theta0} & (V^W)-perp.  For the ambient group V^W = 0, so vw_basis
    is empty and v_wt is simply the first eigenspace.
    """
    owner: TwistedElement
    system: CoxeterSystem
    entries: list[tuple[Angle, int, Matrix]]
    theta0: Angle
    v_wt: Matrix
    vw_basis: Matrix

    @property
    def angles(self) -> list[Angle]:
        return [q for q, _, _ in self.entries]

    def basis_of(self, q: Angle) -> Matrix:
        for qq, _, basis in self.entries:
            if qq == q:
                return basis
        return []

    def full_basis(self) -> Matrix:
        out: Matrix = []
        for _, _, basis in self.entries:
            out.extend(basis)
        return out

    def project(self, v: Vector) -> dict[Angle, Vector]:
        """Exact eigencomponents of v, indexed by angle."""
        field = self.system.field
        basis = self.full_basis()
        coords = solve_in_span(basis, v, field)
        assert coords is not None
        out: dict[Angle, Vector] = {}
        pos = 0
        for q, dim, _ in self.entries:
            comp = zero_vector(field, self.system.rank)
            for j in range(pos, pos + dim):
                comp = vec_add(comp, vec_scale(coords[j], basis[j]))
            pos += dim
            out[q] = comp
        return out

    def to_json(self) -> dict:
        def enc(mat: Matrix):
            return [[[ [c.numerator, c.denominator] for c in s.coeffs] for s in v]
                    for v in mat]
        return {
            "schema": "coxmin/eigen-v1",
            "L": self.system.field.L,
            "angles": [[q.numerator, q.denominator] for q in self.angles],
            "dims": [dim for _, dim, _ in self.entries],
            "bases": [enc(basis) for _, _, basis in self.entries],
            "theta0": [self.theta0.numerator, self.theta0.denominator],
            "v_wt": enc(self.v_wt),
        }


def _matrix_plus_inverse(w: TwistedElement, system: CoxeterSystem) -> Matrix:
    m = w.matrix()
    mi = w.inverse().matrix()
    return [tuple(a + b for a, b in zip(ra, rb)) for ra, rb in zip(m, mi)]


def eigen_decomposition(w: TwistedElement, dft_check: bool = True) -> EigenDecomposition:
    """Exact eigen-angle decomposition, raising the field level as needed."""
    d = order(w)
    system = w.system
    try:
        system.field.two_cos(Fraction(2, d) if d > 1 else Fraction(0))
    except FieldTooSmall:
        system = system.with_field_level(d)
        w = TwistedElement(system, w.twist, w.k,
                           GroupElement(system, w.body.perm))
    field = system.field
    n = system.rank
    s = _matrix_plus_inverse(w, system)

    entries: list[tuple[Angle, int, Matrix]] = []
    total = 0
    for k in range(d // 2 + 1):
        q = Fraction(2 * k, d)
        if q > 1:
            break
        c2 = field.two_cos(q)
        rows = [tuple(s[i][j] - (c2 if i == j else field.zero) for j in range(n))
                for i in range(n)]
        basis = kernel_basis(rows, n, field)
        if basis:
            entries.append((q, len(basis), basis))
            total += len(basis)
    if total != n:
        raise MultiplicityMismatch(
            f"eigenspace dimensions sum to {total}, expected {n}")

    if dft_check:
        _dft_crosscheck(w, system, d, entries)

    theta0 = entries[0][0]
    v_wt = entries[0][2]
    return EigenDecomposition(owner=w, system=system, entries=entries,
                              theta0=theta0, v_wt=v_wt, vw_basis=[])


def _dft_crosscheck(w: TwistedElement, system: CoxeterSystem, d: int,
                    entries: list[tuple[Angle, int, Matrix]]) -> None:
    """Recompute multiplicities from tr(M^j) by an interval-arithmetic DFT."""
    field = system.field
    n = system.rank
    traces = []
    m = w.matrix()
    acc = [tuple(field.one if i == j else field.zero for j in range(n))
           for i in range(n)]
    for _ in range(d):
        tr = acc[0][0]
        for i in range(1, n):
            tr = tr + acc[i][i]
        traces.append(tr)
        acc = mat_mul(acc, m)

    iv = mpmath.iv
    old_prec = iv.prec
    iv.prec = 120
    try:
        eps = Fraction(1, 10 ** 12)
        tr_iv = []
        for t in traces:
            lo, hi = t.interval(eps)
            lo_iv = iv.mpf(lo.numerator) / lo.denominator
            hi_iv = iv.mpf(hi.numerator) / hi.denominator
            tr_iv.append(iv.mpf([lo_iv.a, hi_iv.b]))
        by_angle = {q: dim for q, dim, _ in entries}
        for k in range(d // 2 + 1):
            q = Fraction(2 * k, d)
            if q > 1:
                break
            mk = iv.mpf(0)
            for j in range(d):
                mk += tr_iv[j] * iv.cos(2 * iv.pi * j * k / d)
            mk /= d
            width = float(mpmath.mpf(mk.b) - mpmath.mpf(mk.a))
            if width / 2 >= 1e-6:
                raise MultiplicityMismatch(
                    f"DFT interval too wide ({width}) at angle {q}")
            val = round(float(mpmath.mpf(mk.a) + mpmath.mpf(mk.b)) / 2)
            expected = by_angle.get(q, 0)
            if q not in (0, 1):
                expected //= 2  # kernel dim counts the conjugate pair
            if val != expected:
                raise MultiplicityMismatch(
                    f"DFT multiplicity {val} != kernel rank {expected} at angle {q}")
    finally:
        iv.prec = old_prec


# ---------------------------------------------------------------------------
# Regular points and reflection subgroups.


def hyperplanes_containing(system: CoxeterSystem, basis: Matrix) -> frozenset[int]:
    """Positive-root indices of hyperplanes containing span(basis)."""
    out = []
    for r in range(system.npos):
        if all(system.pair_root(r, b).is_zero() for b in basis):
            out.append(r)
    return frozenset(out)


def reflection_subgroup(system: CoxeterSystem, basis: Matrix) -> list[int]:
    """Generating reflections of W_K as sorted positive-root indices."""
    return sorted(hyperplanes_containing(system, basis))


def regular_point(system: CoxeterSystem, basis: Matrix,
                  inside: Chamber | None = None,
                  start_index: int = 0) -> Vector:
    """A deterministic regular point of span(basis).

    For each hyperplane H either K lies inside H or the point avoids H.  With
    `inside`, the point is additionally constrained to the closed chamber;
    NoRegularPoint is raised exactly when that combination is infeasible.
    """
    field = system.field
    if not basis or all(vec_is_zero(b) for b in basis):
        raise NoRegularPoint("the zero subspace has no regular points")
    h_k = hyperplanes_containing(system, basis)
    avoid_roots = [r for r in range(system.npos) if r not in h_k]

    if inside is None:
        m = len(basis)
        # Pairings of each basis vector against the hyperplanes to avoid;
        # a candidate's pairing is then a small linear combination.
        prods = [[system.pair_root(r, b) for b in basis]
                 for r in avoid_roots]
        for coeffs in itertools.islice(rational_tuples(m, start_index), 200000):
            if all(c == 0 for c in coeffs):
                continue
            ok = True
            for row in prods:
                val = field.zero
                for c, p in zip(coeffs, row):
                    if c:
                        val = val + c * p
                if val.is_zero():
                    ok = False
                    break
            if not ok:
                continue
            v = zero_vector(field, system.rank)
            for c, bvec in zip(coeffs, basis):
                if c:
                    v = vec_add(v, vec_scale(field.from_rational(c), bvec))
            if not vec_is_zero(v):
                return v
        raise ConstructionFailed("regular point search exhausted")

    # Constrained: work in basis coordinates and build the chamber cone.
    m = len(basis)
    rows_by_root = {}
    for r in range(system.npos):
        rows_by_root[r] = tuple(system.pair_root(r, b) for b in basis)
    constraints = []
    for r in range(system.npos):
        srow = rows_by_root[r]
        if all(x.is_zero() for x in srow):
            continue
        sgn = inside.sign(r)
        constraints.append(tuple(x if sgn > 0 else -x for x in srow))
    cone = cone_from_constraints(field, m, constraints)
    avoid = [rows_by_root[r] for r in avoid_roots]
    coeffs = cone_point_avoiding(cone, avoid, constraints, start_index)
    if coeffs is None:
        raise NoRegularPoint("no regular point of K in the closed chamber")
    v = zero_vector(field, system.rank)
    for c, bvec in zip(coeffs, basis):
        if not c.is_zero():
            v = vec_add(v, vec_scale(c, bvec))
    return v


def fixed_space(w: TwistedElement) -> Matrix:
    """Basis of the fixed space of w on V."""
    system = w.system
    field = system.field
    n = system.rank
    m = w.matrix()
    rows = [tuple(m[i][j] - (field.one if i == j else field.zero) for j in range(n))
            for i in range(n)]
    return kernel_basis(rows, n, field)


def is_elliptic(w: TwistedElement) -> bool:
    """Fixed points of w lie in V^W (= 0 for the ambient group)."""
    return not fixed_space(w)


def elliptic_parabolic_certificate(w: TwistedElement,
                                   class_bodies: list[int],
                                   table) -> bool:
    """The parabolic criterion: the class misses every proper twisted parabolic.

    `class_bodies` are table indices of the bodies of the class of w (all in
    the same twist coset).  Returns the criterion's verdict; callers assert
    agreement with is_elliptic.
    """
    system = w.system
    n = system.rank
    stable_subsets = []
    for size in range(n):
        for J in itertools.combinations(range(n), size):
            if all(w.twist.perm[j] in J for j in J):
                stable_subsets.append(frozenset(J))
    # Keep only maximal proper stable subsets; membership in a smaller W_J
    # implies membership in a maximal one.
    maximal = [J for J in stable_subsets
               if not any(J < K for K in stable_subsets)]
    for x in class_bodies:
        ld = table.ldesc[x]
        for J in maximal:
            # x in W_J iff stripping left descents within J reaches identity.
            y = x
            while True:
                msk = table.ldesc[y]
                i = next((i for i in J if msk >> i & 1), None)
                if i is None:
                    break
                y = table.left[i][y]
            if y == 0:
                return False
    return True


def is_quasi_elliptic(w: TwistedElement) -> bool:
    """(V^w)-perp contains a regular point of V."""
    system = w.system
    field = system.field
    n = system.rank
    fix = fixed_space(w)
    if not fix:
        return True  # complement is all of V
    rows = [tuple(system.inner(f, tuple(field.one if j == i else field.zero
                                        for j in range(n))) for i in range(n))
            for f in fix]
    comp = kernel_basis([tuple(r) for r in rows], n, field)
    if not comp:
        return False
    return not hyperplanes_containing(system, comp)


# ---------------------------------------------------------------------------
# Admissible filtrations and good-position chambers.


@dataclass
class Filtration:
    """Cumulative eigenspace filtration of an increasing angle sequence."""
    owner: TwistedElement
    system: CoxeterSystem
    angles: tuple[Angle, ...]
    f_bases: list[Matrix]              # F_0 = 0, F_1, ..., F_r
    hyperplane_sets: list[frozenset[int]]  # H_{F_i} as positive root indices
    admissible: bool
    irredundant_indices: tuple[int, ...]   # i with W_{F_i} != W_{F_{i-1}}

    @property
    def irredundant(self) -> tuple[Angle, ...]:
        return tuple(self.angles[i - 1] for i in self.irredundant_indices)

    def subgroup_generators(self, i: int) -> list[int]:
        return sorted(self.hyperplane_sets[i])


def admissible_filtration(w: TwistedElement, angles,
                          eig: EigenDecomposition | None = None) -> Filtration:
    """Build F_i = sum of V^theta_j for j <= i and the W_{F_i} chain."""
    qs = tuple(Fraction(q) for q in angles)
    assert all(a < b for a, b in zip(qs, qs[1:])), "angles must strictly increase"
    if eig is None or eig.owner != w:
        eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    f_bases: list[Matrix] = [[]]
    cur: Matrix = []
    for q in qs:
        cur = cur + [v for v in eig.basis_of(q)]
        red, _ = rref(cur)
        cur = list(red)
        f_bases.append(list(cur))
    hsets = [hyperplanes_containing(system, b) if b else
             frozenset(range(system.npos)) for b in f_bases]
    admissible = not hsets[-1]
    irred = tuple(i for i in range(1, len(f_bases))
                  if hsets[i] != hsets[i - 1])
    return Filtration(owner=eig.owner, system=system, angles=qs,
                      f_bases=f_bases, hyperplane_sets=hsets,
                      admissible=admissible, irredundant_indices=irred)


def good_position_chamber(w: TwistedElement, filtration: Filtration,
                          start_index: int = 0) -> Chamber:
    """A chamber whose H_{F_i}-component closures reach regular points of F_{i+1}.

    Built by lexicographic sign perturbation: a chamber of the point
    x_1 + eps x_2 + eps^2 x_3 + ... for regular points x_i of F_i and a final
    generic vector, with eps treated symbolically (first nonzero sign wins).
    """
    if not filtration.admissible:
        raise NotAdmissible("filtration does not reach a regular point of V")
    system = filtration.system
    n = system.rank
    field = system.field

    for attempt in range(8):
        seed = start_index + attempt
        points: list[Vector] = []
        for i in range(1, len(filtration.f_bases)):
            if len(filtration.f_bases[i]) > len(filtration.f_bases[i - 1]):
                points.append(regular_point(system, filtration.f_bases[i],
                                            start_index=seed))
        ident = [tuple(field.one if i == j else field.zero for j in range(n))
                 for i in range(n)]
        points.append(regular_point(system, ident, start_index=seed))

        def lex_sign(root_idx: int, pts: list[Vector]) -> int:
            for p in pts:
                s = system.pair_root(root_idx, p).sign()
                if s:
                    return s
            return 0

        # Walk the symbolic point into the fundamental chamber.
        pts = list(points)
        g = system.identity
        guard = 0
        while True:
            i = next((i for i in range(n) if lex_sign(i, pts) < 0), None)
            if i is None:
                break
            pts = [system.simple_reflect(i, p) for p in pts]
            g = system.generator(i) * g
            guard += 1
            assert guard <= system.npos + 1, "sign walk failed to terminate"
        chamber = Chamber(system, g.inverse())

        if _good_position_holds(chamber, filtration, points):
            return chamber
    raise ConstructionFailed("good-position construction failed; existence is guaranteed")


def _good_position_holds(chamber: Chamber, filtration: Filtration,
                         witnesses: list[Vector]) -> bool:
    """Exact witness check of the good-position property."""
    system = filtration.system
    pt_iter = iter(witnesses)
    pt_of_level: dict[int, Vector] = {}
    for i in range(1, len(filtration.f_bases)):
        if len(filtration.f_bases[i]) > len(filtration.f_bases[i - 1]):
            pt_of_level[i] = next(pt_iter)
    for i in range(len(filtration.f_bases) - 1):
        # Some regular point of F_{i+1} must lie in the closure of the
        # H_{F_i}-component of the chamber.  When F_{i+1} = F_j for the last
        # growth level j <= i, the witness x_j pairs to zero against every
        # H in H_{F_i} (those hyperplanes contain F_j), so the condition is
        # automatic and only growth levels need checking.
        x = pt_of_level.get(i + 1)
        if x is None:
            continue
        for r in filtration.hyperplane_sets[i]:
            s = system.pair_root(r, x).sign()
            if s != 0 and s != chamber.sign(r):
                return False
    return True


def good_position_chamber_full(w: TwistedElement, start_index: int = 0) -> Chamber:
    """Good position with respect to the full angle sequence of w."""
    eig = eigen_decomposition(w, dft_check=False)
    filt = admissible_filtration(eig.owner, eig.angles)
    return good_position_chamber(eig.owner, filt, start_index)
