"""Gradient-flow chamber walk and the length formulas along subspaces.

The squared displacement f(v) = |w(v) - v|^2 has gradient flow with closed
form C(v, t) = sum_theta exp(4t(1 - cos theta)) v_theta over the exact
eigencomponents of the start vector.  Followed backwards in time the curve
collapses onto the direction of the minimal-angle component, crossing
chamber walls with never-increasing conjugate length; the walk ends in a
chamber whose closure contains a regular point of V_w.

The curve itself is transcendental, so wall selection is guided numerically
(floats, escalating to certified mpmath intervals on a straddle), while
every accepted step and the end condition are certified in exact arithmetic:
a step is kept only if the group-side length comparison l(w_{A'}) <= l(w_A)
holds, and the end test evaluates the exact signs of the limit direction
against the chamber.  On unresolvable numerical ambiguity the walk falls
back to trying the flipped walls directly, and finally restarts from a
perturbed start point (deterministic enumeration, so walks are reproducible).

The length-formula operations verify their hypotheses exactly before
asserting the formulas; a hypothesis that cannot be verified raises
HypothesisFailed, a verified hypothesis with a failing conclusion raises
TheoremViolation (it would contradict a proved statement).
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .conjugacy import ReductionChain, parabolic_subsystem
from .coxeter import (Chamber, CoxeterSystem, GroupElement, TwistedElement,
                      conjugate_by_chamber, coset_decompose,
                      normalizes_parabolic)
from .eigen import (EigenDecomposition, eigen_decomposition,
                    hyperplanes_containing, regular_point)
from .errors import HypothesisFailed, NoRegularPoint, TheoremViolation, WalkStuck
from .linalg import (Matrix, Vector, cone_from_constraints, kernel_basis,
                     rational_tuples, rref, subspace_contains, subspace_equal,
                     vec_add, vec_is_zero, vec_scale, vec_sub, zero_vector)


@dataclass
class FlowCurve:
    """Eigen-coordinates of a start vector under the displacement flow.

    C(v, t) = sum over angles q of exp(4t(1 - cos(q pi))) * component_q;
    the backwards limit direction is the normalized theta_0 component.
    """
    owner: TwistedElement
    eigen: EigenDecomposition
    start: Vector
    components: dict[Fraction, Vector]

    def limit_component(self) -> Vector:
        return self.components[self.eigen.theta0]

    def rate(self, q: Fraction) -> float:
        return 4.0 * (1.0 - math.cos(float(q) * math.pi))

    def float_value(self, t: float) -> list[float]:
        n = self.eigen.system.rank
        out = [0.0] * n
        for q, comp in self.components.items():
            scale = math.exp(self.rate(q) * t)
            for i in range(n):
                out[i] += scale * float(comp[i])
        return out


def flow_curve(w: TwistedElement, v: Vector,
               eig: EigenDecomposition | None = None) -> FlowCurve:
    if eig is None or eig.owner != w:
        eig = eigen_decomposition(w, dft_check=False)
    comps = eig.project(v)
    return FlowCurve(owner=eig.owner, eigen=eig, start=v, components=comps)


def derivative_test(w: TwistedElement, wall_root: int, h: Vector, v: Vector) -> int:
    """Exact sign of the directional derivative D_v f at a face point h.

    f(p) = |w(p) - p|^2, so D_v f(h) = 2 (w(h) - h, w(v) - v).  The caller
    supplies h on the wall and v perpendicular to it pointing out of the
    chamber; if crossing that wall raises the conjugate length by 2, the
    lemma says the returned sign is positive.
    """
    system = w.system
    if wall_root >= system.npos:
        wall_root -= system.npos
    assert system.pair_root(wall_root, h).is_zero(), "h must lie on the wall"
    alpha = system.pos_roots[wall_root]
    stacked = rref([alpha, v])[0]
    assert len(stacked) <= 1, "v must be perpendicular to the wall"
    wh = w.apply(h)
    wv = w.apply(v)
    d = system.inner(vec_sub(wh, h), vec_sub(wv, v))
    return (d + d).sign()


# ---------------------------------------------------------------------------
# The descent walk.


@dataclass
class WalkStep:
    wall_root: int
    simple_index: int
    length_before: int
    length_after: int

    def digest(self) -> str:
        payload = f"{self.wall_root}|{self.simple_index}|{self.length_before}|{self.length_after}"
        return hashlib.sha256(payload.encode()).hexdigest()[:16]


@dataclass
class WalkResult:
    start_chamber: Chamber
    end_chamber: Chamber
    steps: list[WalkStep]
    regular_point: Vector
    end_element: TwistedElement

    @property
    def chain(self) -> ReductionChain:
        return ReductionChain([(s.simple_index, s.length_after - s.length_before)
                               for s in self.steps])

    def to_json(self) -> dict:
        return {
            "schema": "coxmin/walk-v1",
            "start_word": self.start_chamber.x.to_word(),
            "end_word": self.end_chamber.x.to_word(),
            "steps": [{"wall_root": s.wall_root,
                       "sign_digest": s.digest(),
                       "length_before": s.length_before,
                       "length_after": s.length_after} for s in self.steps],
            "end_length": self.end_element.length(),
        }


class _RetryWalk(Exception):
    pass


def descent_walk(w: TwistedElement, chamber: Chamber,
                 start_index: int = 0, retries: int = 8) -> WalkResult:
    """Walk from `chamber` to one whose closure holds a regular point of V_w."""
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    w = eig.owner
    chamber = Chamber(system, GroupElement(system, chamber.x.perm))
    starts = _good_start_points(eig, chamber, start_index)
    for _ in range(retries):
        state = next(starts, None)
        if state is None:
            break
        try:
            return _walk_once(w, eig, chamber, *state)
        except _RetryWalk:
            continue
    raise WalkStuck("descent walk failed after perturbation retries")


def _good_start_points(eig: EigenDecomposition, chamber: Chamber,
                       start_index: int):
    """Interior points of the chamber whose limit direction is usable.

    Yields (y, components, x, signs) with the theta_0 component x nonzero
    and regular in V_w.  Candidates come from the deterministic tuple
    enumerator around the chamber's canonical interior point, so the stream
    (and every downstream walk) is reproducible.
    """
    system = eig.system
    npos = system.npos
    field = system.field
    n = system.rank
    h_vwt = hyperplanes_containing(system, eig.v_wt)
    base = chamber.interior_point()

    def check(y: Vector):
        comps = {q: c for q, c in eig.project(y).items() if not vec_is_zero(c)}
        x_dir = comps.get(eig.theta0)
        if x_dir is None:
            return None
        sgn_x = []
        for r in range(npos):
            s = system.pair_root(r, x_dir).sign()
            if s == 0 and r not in h_vwt:
                return None  # p(y) is not regular in V_w
            sgn_x.append(s)
        return comps, x_dir, sgn_x

    if start_index == 0:
        res = check(base)
        if res is not None:
            yield (base, *res)
    for tup in itertools.islice(rational_tuples(n, max(start_index, 1)), 4096):
        if all(c == 0 for c in tup):
            continue
        scale = Fraction(1, 4)
        cand = None
        for _ in range(16):
            trial = vec_add(base, tuple(field.from_rational(c * scale) for c in tup))
            if all(system.pair_root(r, trial).sign() == chamber.sign(r)
                   for r in range(npos)):
                cand = trial
                break
            scale /= 4
        if cand is None:
            continue
        res = check(cand)
        if res is not None:
            yield (cand, *res)


def _walk_once(w: TwistedElement, eig: EigenDecomposition, start: Chamber,
               y: Vector, comps: dict, x_dir: Vector,
               sgn_x: list[int]) -> WalkResult:
    system = eig.system
    npos = system.npos
    theta0 = eig.theta0

    # Float guidance, decay rates shifted so the theta_0 term is constant.
    angles = sorted(comps)
    lam0 = 4.0 * (1.0 - math.cos(float(theta0) * math.pi))
    rates = [4.0 * (1.0 - math.cos(float(q) * math.pi)) - lam0 for q in angles]
    coeff = [[float(system.pair_root(r, comps[q])) for q in angles]
             for r in range(npos)]
    scale_ref = max(max(abs(c) for c in row) for row in coeff) or 1.0

    def float_vals(s: float) -> list[float]:
        decay = [math.exp(-rt * s) for rt in rates]
        return [sum(c * d for c, d in zip(row, decay)) for row in coeff]

    def interval_signs(s: float, prec: int) -> list[int | None]:
        return _certified_curve_signs(system, angles, comps, theta0, s, prec)

    cur_ch = start
    cur_wt = conjugate_by_chamber(w, start)
    steps: list[WalkStep] = []
    visited = {cur_ch.x.perm}
    s_anchor = 0.0
    step_cap = 16 * npos + 64

    def end_ok(ch: Chamber) -> bool:
        return all(sgn_x[r] == 0 or sgn_x[r] == ch.sign(r) for r in range(npos))

    def try_cross(root: int) -> bool:
        nonlocal cur_ch, cur_wt
        i = cur_ch.wall_simple_index(root)
        if i is None:
            return False
        nxt_wt = cur_wt.conjugate_by_simple(i)
        if nxt_wt.length() > cur_wt.length():
            return False
        nxt_ch = cur_ch.cross(i)
        if nxt_ch.x.perm in visited:
            return False
        steps.append(WalkStep(wall_root=root, simple_index=i,
                              length_before=cur_wt.length(),
                              length_after=nxt_wt.length()))
        visited.add(nxt_ch.x.perm)
        cur_ch, cur_wt = nxt_ch, nxt_wt
        return True

    while True:
        if end_ok(cur_ch):
            return WalkResult(start_chamber=start, end_chamber=cur_ch,
                              steps=steps, regular_point=x_dir,
                              end_element=cur_wt)
        if len(steps) > step_cap:
            raise _RetryWalk

        cur_signs = [cur_ch.sign(r) for r in range(npos)]
        tol = 1e-11 * scale_ref
        h = 0.25
        s0 = s_anchor
        candidates: list[int] | None = None
        s_after = s0
        while h < 1e6:
            s1 = s0 + h
            vals = float_vals(s1)
            flips = [r for r in range(npos)
                     if abs(vals[r]) > tol and (vals[r] > 0) != (cur_signs[r] > 0)]
            tiny = [r for r in range(npos) if abs(vals[r]) <= tol]
            if not flips and not tiny:
                s0 = s1
                h *= 2
                continue
            # Bisect down to a single wall flip.
            for _ in range(200):
                if len(flips) == 1 and not tiny:
                    break
                mid = (s0 + s1) / 2
                if mid in (s0, s1):
                    break
                vals = float_vals(mid)
                flips_m = [r for r in range(npos)
                           if abs(vals[r]) > tol and (vals[r] > 0) != (cur_signs[r] > 0)]
                tiny_m = [r for r in range(npos) if abs(vals[r]) <= tol]
                if not flips_m and not tiny_m:
                    s0 = mid
                else:
                    s1, flips, tiny = mid, flips_m, tiny_m
            if len(flips) == 1 and not tiny:
                candidates = flips
                s_after = s1
                break
            # Escalate to certified intervals at s1, doubling precision.
            prec = 128
            resolved = None
            while prec <= 4096:
                signs = interval_signs(s1, prec)
                if all(sg is not None for sg in signs):
                    resolved = [r for r in range(npos)
                                if (signs[r] > 0) != (cur_signs[r] > 0)]
                    break
                prec *= 2
            if resolved is not None and len(resolved) == 1:
                candidates = resolved
                s_after = s1
                break
            # Ambiguity: fall back to trying every flipped wall.
            candidates = sorted(set(flips) | set(tiny))
            s_after = s1
            break
        if candidates is None:
            raise _RetryWalk  # guidance found no further crossing
        if not any(try_cross(r) for r in candidates):
            # Last resort within this attempt: any wall with a certified
            # non-increasing crossing.
            if not any(try_cross(r) for r in range(npos)):
                raise _RetryWalk
        s_anchor = s_after


def _iv_frac(iv, f: Fraction):
    return iv.mpf(f.numerator) / f.denominator


def _certified_curve_signs(system: CoxeterSystem, angles, comps,
                           theta0, s: float, prec: int) -> list[int | None]:
    """Certified signs of <alpha_r, P(s)> for every positive root.

    P is the time-reversed flow with the theta_0 decay factored out; each
    entry is +-1 when the interval evaluation at the given precision excludes
    zero, None on a straddle (the caller doubles the precision or falls back
    to trying the flipped walls directly).
    """
    iv = mpmath.iv
    old = iv.prec
    iv.prec = prec
    try:
        sf = Fraction(s).limit_denominator(10 ** 12)
        s_iv = _iv_frac(iv, sf)
        eps = Fraction(1, 2 ** (prec // 2))
        base = 4 - 2 * system.field.two_cos(Fraction(theta0))
        decay = []
        for q in angles:
            lam = (4 - 2 * system.field.two_cos(Fraction(q))) - base
            llo, lhi = lam.interval(eps)
            lam_iv = iv.mpf([_iv_frac(iv, llo).a, _iv_frac(iv, lhi).b])
            decay.append(iv.exp(-lam_iv * s_iv))
        out: list[int | None] = []
        for r in range(system.npos):
            acc = iv.mpf(0)
            for qi, q in enumerate(angles):
                clo, chi = system.pair_root(r, comps[q]).interval(eps)
                c_iv = iv.mpf([_iv_frac(iv, clo).a, _iv_frac(iv, chi).b])
                acc += c_iv * decay[qi]
            if acc.a > 0:
                out.append(1)
            elif acc.b < 0:
                out.append(-1)
            else:
                out.append(None)
        return out
    finally:
        iv.prec = old


# ---------------------------------------------------------------------------
# Length formulas.


def _embed_matrix(system: CoxeterSystem, mat: Matrix) -> Matrix:
    """Re-express vectors in the system's field (levels nest by construction)."""
    if not mat or mat[0][0].field.L == system.field.L:
        return mat
    return [tuple(system.field.embed_from(c) for c in v) for v in mat]


def _angle_of_invariant_subspace(w: TwistedElement, eig: EigenDecomposition,
                                 basis: Matrix) -> Fraction:
    """The q with span(basis) inside V^{q pi}; checks w-stability."""
    system = eig.system
    field = system.field
    images = [w.apply(b) for b in basis]
    if not subspace_equal(list(basis), images, field):
        raise HypothesisFailed("subspace is not w-stable")
    for q, _, eigbasis in eig.entries:
        if all(subspace_contains(eigbasis, b, field) for b in basis):
            return q
    raise HypothesisFailed("subspace lies in no single eigenspace")


def special_length_formula(w: TwistedElement, basis: Matrix, chamber: Chamber,
                           witness: Vector | None = None) -> int:
    """l(w_A) = (theta/pi) #(H - H_K) for K inside V^theta meeting the chamber.

    Hypotheses verified exactly: A and w(A) in one H_K-component, and the
    closure of A contains a nonzero v in K such that any hyperplane through
    both v and w(v) contains K (a regular point of K is such a v).
    """
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    w = eig.owner
    chamber = Chamber(system, GroupElement(system, chamber.x.perm))
    basis = _embed_matrix(system, basis)
    if witness is not None:
        witness = _embed_matrix(system, [witness])[0]
    q = _angle_of_invariant_subspace(w, eig, basis)
    h_k = hyperplanes_containing(system, basis)
    image = chamber.image_under(w)
    if chamber.separating_set(image) & h_k:
        raise HypothesisFailed("A and w(A) lie in different H_K-components")

    if witness is None:
        try:
            witness = regular_point(system, list(basis), inside=chamber)
        except NoRegularPoint as exc:
            raise HypothesisFailed(
                "no regular point of K in the closed chamber") from exc
    else:
        if not subspace_contains(list(basis), witness, system.field):
            raise HypothesisFailed("witness is not in K")
        if not chamber.contains_in_closure(witness):
            raise HypothesisFailed("witness is not in the closed chamber")
        w_witness = w.apply(witness)
        for r in range(system.npos):
            if r in h_k:
                continue
            if system.pair_root(r, witness).is_zero() and \
                    system.pair_root(r, w_witness).is_zero():
                raise HypothesisFailed("witness fails the separation property")

    value = q * (system.npos - len(h_k))
    if value.denominator != 1:
        raise TheoremViolation(f"(theta/pi)#(H-H_K) = {value} is not an integer")
    direct = len(chamber.separating_set(image))
    if int(value) != direct:
        raise TheoremViolation(
            f"special length formula gives {value}, direct count {direct}")
    assert direct == conjugate_by_chamber(w, chamber).length()
    return int(value)


def decompose_at_regular(w: TwistedElement, chamber: Chamber, basis: Matrix
                         ) -> tuple[TwistedElement, GroupElement, tuple[int, ...]]:
    """w_A = w_{K,A} u with u in W_J, J = I(K, A), and additive lengths."""
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    w = eig.owner
    chamber = Chamber(system, GroupElement(system, chamber.x.perm))
    basis = _embed_matrix(system, basis)
    q = _angle_of_invariant_subspace(w, eig, basis)
    h_k = hyperplanes_containing(system, basis)
    try:
        point = regular_point(system, list(basis), inside=chamber)
    except NoRegularPoint as exc:
        raise HypothesisFailed("closure of A contains no regular point of K") from exc

    back = chamber.x.inverse().apply(point)
    J = tuple(sorted(i for i in range(system.rank)
                     if system.pair_root(i, back).is_zero()))
    w_a = conjugate_by_chamber(w, chamber)
    u_left, w_k, u_right = coset_decompose(w_a, J)
    if not normalizes_parabolic(w_k, J):
        raise HypothesisFailed("double coset representative does not normalize W_J")
    inner_u = (w_k.inverse() *
               TwistedElement(system, w.twist, 0, u_left) * w_k).body
    u = inner_u * u_right

    image = chamber.image_under(w)
    sep_k = chamber.separating_set(image) & h_k
    if u.length() != len(sep_k):
        raise TheoremViolation(
            f"l(u) = {u.length()} but #H(A, wA)_K = {len(sep_k)}")
    predicted = q * (system.npos - len(h_k))
    if predicted.denominator != 1 or w_k.length() != int(predicted):
        raise TheoremViolation(
            f"l(w_K,A) = {w_k.length()} but formula gives {predicted}")
    recomposed = w_k * TwistedElement(system, w.twist, 0, u)
    if recomposed != w_a:
        raise TheoremViolation("w_{K,A} u does not recompose to w_A")
    if w_a.length() != u.length() + w_k.length():
        raise TheoremViolation("length bookkeeping failed in the decomposition")
    return w_k, u, J


def component_length(w: TwistedElement, basis: Matrix, component: Chamber) -> int:
    """Hyperplanes of H_K separating a component U from w(U).

    The component is named by any chamber inside it; only the signs at the
    hyperplanes containing K matter, and those are constant on U.
    """
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    w = eig.owner
    component = Chamber(system, GroupElement(system, component.x.perm))
    basis = _embed_matrix(system, basis)
    _angle_of_invariant_subspace(w, eig, basis)  # checks stability
    h_k = hyperplanes_containing(system, basis)
    perm_inv = GroupElement(system, w.root_perm()).inv_perm
    count = 0
    for r in h_k:
        s = perm_inv[r]
        if s < system.npos:
            sign_w = component.sign(s)
        else:
            sign_w = -component.sign(s - system.npos)
        if sign_w != component.sign(r):
            count += 1
    return count


def geometric_min_length(w: TwistedElement, start_index: int = 0) -> int:
    """Minimal class length via the walk plus parabolic recursion.

    Walk to a chamber whose closure meets V_w, split w_A = w_{K,A} u at the
    regular point, and recurse on the strictly smaller twisted parabolic
    acting on W_J.  This is the geometric route to O_min; it is independent
    of the combinatorial plateau search and serves as its oracle twin.
    """
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    w = eig.owner
    result = descent_walk(w, Chamber.fundamental(system), start_index=start_index)
    w_k, u, J = decompose_at_regular(w, result.end_chamber, eig.v_wt)
    if not J:
        return w_k.length()
    sub, sub_twist, to_sub = parabolic_subsystem(w_k, J)
    du = TwistedElement(sub, sub_twist, 1, to_sub(u))
    return w_k.length() + geometric_min_length(du, start_index)


def strongly_connected_step(w: TwistedElement, a: Chamber, a2: Chamber) -> int:
    """Verified equal lengths across a strongly connected pair of chambers.

    Hypotheses: common wall H_0; both chambers in one H_K-component for
    K = V_w; their shared closure meets K in a spanning subset of H_0 & K;
    and w moves H_0 & K.  Conclusion (asserted):
    l(w_A) = l(w_{A'}) = #H(A, wA)_K + (theta_0/pi) #(H - H_K).
    """
    eig = eigen_decomposition(w, dft_check=False)
    system = eig.system
    field = system.field
    w = eig.owner
    a = Chamber(system, GroupElement(system, a.x.perm))
    a2 = Chamber(system, GroupElement(system, a2.x.perm))
    sep = a.separating_set(a2)
    if len(sep) != 1:
        raise HypothesisFailed("chambers do not share a common wall")
    h0 = next(iter(sep))
    k_basis = eig.v_wt
    h_k = hyperplanes_containing(system, k_basis)
    if h0 in h_k:
        raise HypothesisFailed("the common wall contains V_w")
    if a.separating_set(a.image_under(w)) & h_k:
        raise HypothesisFailed("A and w(A) lie in different H_K-components")
    if a2.separating_set(a2.image_under(w)) & h_k:
        raise HypothesisFailed("A' and w(A') lie in different H_K-components")

    # P = H_0 & K, its w-image must differ.
    prow = tuple(system.pair_root(h0, b) for b in k_basis)
    ker = kernel_basis([prow], len(k_basis), field)
    p_basis = []
    for kv in ker:
        vec = zero_vector(field, system.rank)
        for c, b in zip(kv, k_basis):
            vec = vec_add(vec, vec_scale(c, b))
        p_basis.append(vec)
    p_basis, _ = rref(p_basis)
    if not p_basis:
        raise HypothesisFailed("H_0 meets V_w trivially")
    images = [w.apply(b) for b in p_basis]
    if subspace_equal(list(p_basis), images, field):
        raise HypothesisFailed("w fixes H_0 & V_w; the strong-connection "
                               "hypothesis fails")

    # The common face closure must meet K in a set spanning P: build the cone
    # {v in K : both chambers' closed sign constraints} and compare spans.
    m = len(k_basis)
    constraints = []
    for r in range(system.npos):
        rrow = tuple(system.pair_root(r, b) for b in k_basis)
        if all(x.is_zero() for x in rrow):
            continue
        sa = a.sign(r)
        s2 = a2.sign(r)
        constraints.append(tuple(x if sa > 0 else -x for x in rrow))
        if s2 != sa:
            constraints.append(tuple(x if s2 > 0 else -x for x in rrow))
    cone = cone_from_constraints(field, m, constraints)
    span_coords = cone.span()
    span_vecs = []
    for sc in span_coords:
        vec = zero_vector(field, system.rank)
        for c, b in zip(sc, k_basis):
            vec = vec_add(vec, vec_scale(c, b))
        span_vecs.append(vec)
    span_vecs, _ = rref(span_vecs)
    if not subspace_equal(span_vecs, p_basis, field):
        raise HypothesisFailed("closure intersection does not span H_0 & V_w")

    theta0 = eig.theta0
    predicted = theta0 * (system.npos - len(h_k))
    sep_k = len(a.separating_set(a.image_under(w)) & h_k)
    if predicted.denominator != 1:
        raise TheoremViolation("(theta/pi)#(H - H_K) is not an integer")
    expected = sep_k + int(predicted)
    la = conjugate_by_chamber(w, a).length()
    la2 = conjugate_by_chamber(w, a2).length()
    if not (la == la2 == expected):
        raise TheoremViolation(
            f"strong connection: lengths {la}, {la2}, formula {expected}")
    return expected
