"""Positive braid monoid with Garside normal form and good-element certificates.

Positive braids over a finite Coxeter system have W itself as the simple
elements; a word is canonically a left-weighted sequence of simples (each
pair (x, y) satisfying L(y) contained in R(x), identities dropped).  Equality
of positive braids is equality of these sequences, which is the decision
procedure behind every certificate here.  Factors are GroupTable indices, so
the transfer step "move s from the left of y to the right of x" is two table
lookups guided by descent bitmasks.

The twisted extension <d> x| B+ keeps the twist as a prefix exponent and
pushes it through words eagerly (d sigma_i = sigma_{d(i)} d).

Goodness: for w of order d with the fundamental chamber in good position for
an admissible angle sequence, the d-th power of the lift equals a twist times
a telescoping product of even powers of lifted parabolic longest elements
over a strictly decreasing chain of subsets.  certify_good derives the chain
from the filtration, validates the exponent arithmetic, and compares normal
forms; good_min_element runs the whole construction from a conjugacy class.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .conjugacy import ConjugacyClassRecord
from .coxeter import (Chamber, CoxeterSystem, DiagramTwist, GroupElement,
                      TwistedElement, conjugate_by_chamber, parabolic_max)
from .eigen import (Filtration, admissible_filtration, eigen_decomposition,
                    good_position_chamber, order, regular_point)
from .errors import (HypothesisFailed, IdentityFailed, NoRegularPoint,
                     NotGoodPosition, TheoremViolation)


class BraidContext:
    """Normal-form machinery bound to one system's group table."""

    def __init__(self, system: CoxeterSystem, twist: DiagramTwist | None = None):
        self.system = system
        self.twist = twist if twist is not None else DiagramTwist(
            system.matrix, tuple(range(system.rank)))
        self.table = system.table()
        self._twist_maps: dict[int, list[int]] = {}

    def twist_map(self, m: int) -> list[int]:
        """Element index map of conjugation by d^m."""
        m %= self.twist.order
        tm = self._twist_maps.get(m)
        if tm is None:
            if m == 0:
                tm = list(range(self.table.size))
            else:
                tm = self.table.twist_index_map(self.twist, m)
            self._twist_maps[m] = tm
        return tm

    # -- the left-weighting transfer ---------------------------------------

    def transfer(self, x: int, y: int) -> tuple[int, int, bool]:
        """Move letters from the head of y to the tail of x until left-weighted."""
        t = self.table
        moved = False
        while True:
            mask = t.ldesc[y] & ~t.rdesc[x]
            if not mask:
                return x, y, moved
            i = (mask & -mask).bit_length() - 1
            x = t.right[i][x]
            y = t.left[i][y]
            moved = True

    def is_left_weighted_pair(self, x: int, y: int) -> bool:
        t = self.table
        return not (t.ldesc[y] & ~t.rdesc[x])

    def normalize(self, factors: Sequence[int]) -> tuple[int, ...]:
        fs = [f for f in factors if f != 0]
        i = 0
        while i < len(fs) - 1:
            x, y, moved = self.transfer(fs[i], fs[i + 1])
            if moved:
                fs[i] = x
                if y == 0:
                    del fs[i + 1]
                else:
                    fs[i + 1] = y
                i = max(i - 1, 0)
            else:
                i += 1
        return tuple(fs)


@dataclass(frozen=True)
class TwistedBraid:
    """A twist prefix d^k and a positive word in the Artin generators."""
    context: BraidContext
    k: int
    word: tuple[int, ...]

    def __mul__(self, other: "TwistedBraid") -> "TwistedBraid":
        assert other.context is self.context
        # d^k u d^l v = d^{k+l} (d^-l u d^l) v; letters twist by d^{-l}.
        perm = self.context.twist.power_perm(-other.k % self.context.twist.order)
        shifted = tuple(perm[i] for i in self.word)
        return TwistedBraid(self.context, self.k + other.k, shifted + other.word)

    def power(self, k: int) -> "TwistedBraid":
        assert k >= 0
        out = TwistedBraid(self.context, 0, ())
        for _ in range(k):
            out = out * self
        return out

    def normal_form(self) -> "GarsideNormalForm":
        t = self.context.table
        factors: list[int] = []
        for letter in self.word:
            g = t.right[letter][0]
            if factors and t.length[t.right[letter][factors[-1]]] == \
                    t.length[factors[-1]] + 1:
                factors[-1] = t.right[letter][factors[-1]]
            else:
                factors.append(g)
            # Comb backwards to restore left-weighting.
            j = len(factors) - 1
            while j > 0:
                x, y, moved = self.context.transfer(factors[j - 1], factors[j])
                if not moved:
                    break
                factors[j - 1] = x
                if y == 0:
                    del factors[j]
                else:
                    factors[j] = y
                j -= 1
        return GarsideNormalForm(self.context,
                                 self.k % self.context.twist.order,
                                 self.context.normalize(factors))

    def __repr__(self):
        word = ".".join(f"s{i}" for i in self.word) or "e"
        return f"B(d^{self.k} {word})" if self.k else f"B({word})"


@dataclass(frozen=True)
class GarsideNormalForm:
    """Twist exponent plus the left-weighted sequence of simple factors."""
    context: BraidContext
    k: int
    factors: tuple[int, ...]

    def __eq__(self, other):
        return (isinstance(other, GarsideNormalForm)
                and self.k == other.k and self.factors == other.factors)

    def __hash__(self):
        return hash((self.k, self.factors))

    def is_valid(self) -> bool:
        if any(f == 0 for f in self.factors):
            return False
        return all(self.context.is_left_weighted_pair(a, b)
                   for a, b in zip(self.factors, self.factors[1:]))

    def infimum(self) -> int:
        w0 = self.context.table.w0
        count = 0
        for f in self.factors:
            if f != w0:
                break
            count += 1
        return count

    def canonical_length(self) -> int:
        return len(self.factors)

    def letter_count(self) -> int:
        t = self.context.table
        return sum(t.length[f] for f in self.factors)

    def mul(self, other: "GarsideNormalForm") -> "GarsideNormalForm":
        assert other.context is self.context
        tm = self.context.twist_map(-other.k)
        shifted = [tm[f] for f in self.factors]
        return GarsideNormalForm(
            self.context, (self.k + other.k) % self.context.twist.order,
            self.context.normalize(shifted + list(other.factors)))

    def power(self, k: int) -> "GarsideNormalForm":
        assert k >= 0
        out = GarsideNormalForm(self.context, 0, ())
        base = self
        while k:
            if k & 1:
                out = out.mul(base)
            base = base.mul(base)
            k >>= 1
        return out

    def expand(self) -> TwistedBraid:
        """A positive word spelling this normal form."""
        letters: list[int] = []
        for f in self.factors:
            letters.extend(self.context.table.element(f).to_word())
        return TwistedBraid(self.context, self.k, tuple(letters))

    def digest(self) -> str:
        payload = f"{self.k}|" + ",".join(map(str, self.factors))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def __repr__(self):
        t = self.context.table
        words = ["".join(map(str, t.element(f).to_word())) for f in self.factors]
        head = f"d^{self.k} " if self.k else ""
        return f"NF({head}{' | '.join(words) if words else 'e'})"


def lift(w: GroupElement | TwistedElement, context: BraidContext) -> TwistedBraid:
    """The canonical injection of W (or its twisted extension) into B+."""
    if isinstance(w, TwistedElement):
        return TwistedBraid(context, w.k, tuple(w.body.to_word()))
    return TwistedBraid(context, 0, tuple(w.to_word()))


def delta_squared(context: BraidContext) -> GarsideNormalForm:
    w0 = context.table.w0
    return GarsideNormalForm(context, 0, (w0, w0))


def divisible_by_delta_squared(b: TwistedBraid | GarsideNormalForm) -> bool:
    nf = b.normal_form() if isinstance(b, TwistedBraid) else b
    return nf.infimum() >= 2


# ---------------------------------------------------------------------------
# Good elements.


@dataclass
class GoodCertificate:
    """A verified instance of the good-element power identity.

    subsets: strictly decreasing S_0 > S_1 > ... (simple-reflection index
    tuples); exponents: the matching even positive powers; the identity
    (lift w)^d = sigma * prod lift(w_{S_j})^{e_j} holds at normal-form level.
    When d is even the half-power identity is verified too and recorded.
    """
    element: TwistedElement
    d: int
    subsets: tuple[tuple[int, ...], ...]
    exponents: tuple[int, ...]
    sigma_exponent: int
    lhs_digest: str
    rhs_digest: str
    very_good: bool
    half_sigma_exponent: int | None = None
    half_lhs_digest: str | None = None

    def to_json(self, type_label: str | None = None,
                class_id: int | None = None) -> dict:
        row = {
            "schema": "coxmin/good-certificate-v1",
            "twist": list(self.element.twist.perm),
            "twist_exponent": self.element.k,
            "word": self.element.body.to_word(),
            "order": self.d,
            "subsets": [list(s) for s in self.subsets],
            "exponents": list(self.exponents),
            "sigma_exponent": self.sigma_exponent,
            "very_good": self.very_good,
            "nf_digest_lhs": self.lhs_digest,
            "nf_digest_rhs": self.rhs_digest,
        }
        if type_label is not None:
            row["type"] = type_label
        if class_id is not None:
            row["class_id"] = class_id
        return row


def _parabolic_chain(filtration: Filtration) -> list[tuple[int, ...]]:
    """Simple-index sets of W_{F_i} along the irredundant chain.

    Good position makes every W_{F_i} a standard parabolic; the check is
    that the hyperplanes through F_i are exactly the positive roots of the
    parabolic generated by the simple roots orthogonal to F_i.
    """
    system = filtration.system
    chain: list[tuple[int, ...]] = []
    for i in (0,) + filtration.irredundant_indices:
        hset = filtration.hyperplane_sets[i]
        simple = tuple(sorted(j for j in range(system.rank) if j in hset))
        para_roots = _parabolic_positive_roots(system, simple)
        if para_roots != hset:
            raise NotGoodPosition(
                f"W_K at level {i} is not the standard parabolic on {simple}")
        chain.append(simple)
    return chain


def _parabolic_positive_roots(system: CoxeterSystem, J: Sequence[int]) -> frozenset[int]:
    """Positive roots lying in the span of the simple roots indexed by J."""
    J = set(J)
    out = []
    for r in range(system.npos):
        v = system.pos_roots[r]
        if all(v[j].is_zero() for j in range(system.rank) if j not in J):
            out.append(r)
    return frozenset(out)


def certify_good(w: TwistedElement, filtration: Filtration,
                 context: BraidContext | None = None) -> GoodCertificate:
    """Verify the power identity of a good element at normal-form level.

    Requires the fundamental chamber to be in good position with respect to
    (w, filtration.angles); the derived subgroup chain must then be standard
    parabolic, which is checked and reported as NotGoodPosition otherwise.
    """
    system = filtration.system
    if context is None:
        context = BraidContext(system, w.twist)
    assert w.system is system, "element and filtration must share one system"
    d = order(w)
    for q in filtration.angles:
        if (Fraction(q) * d / 2).denominator != 1:
            raise HypothesisFailed(f"d*theta/(2*pi) not integral at angle {q}")

    chain = _parabolic_chain(filtration)  # S_0 = S, then the retained levels
    retained = filtration.irredundant
    # Telescoping exponents d(theta_{j+1} - theta_j)/pi over retained angles.
    qs = (Fraction(0),) + retained
    subsets: list[tuple[int, ...]] = []
    exponents: list[int] = []
    for j in range(len(retained)):
        e = (qs[j + 1] - qs[j]) * d
        assert e.denominator == 1 and e >= 0
        e = int(e)
        if e == 0:
            continue  # a leading zero angle contributes an empty factor
        assert e % 2 == 0, "good-element exponents must be even"
        subsets.append(chain[j])
        exponents.append(e)
    assert all(len(a) > len(b) for a, b in zip(subsets, subsets[1:]))

    lhs = lift(w, context).power(d).normal_form()
    sigma = (w.k * d) % w.twist.order
    rhs = GarsideNormalForm(context, sigma, ())
    maxes = [context.table.index_of(parabolic_max(system, s)) for s in subsets]
    for m, e in zip(maxes, exponents):
        rhs = rhs.mul(GarsideNormalForm(context, 0, (m,)).power(e))
    # Letter-count conservation: both sides spell d*l(w) letters.
    assert lhs.letter_count() == d * w.length()
    if rhs.letter_count() != d * w.length():
        raise IdentityFailed("exponent arithmetic does not conserve letters")
    if lhs != rhs:
        raise IdentityFailed("good-element braid identity failed at normal form")

    very_good = False
    half_sigma = None
    half_digest = None
    if d % 2 == 0:
        half_lhs = lift(w, context).power(d // 2).normal_form()
        half_sigma = (w.k * (d // 2)) % w.twist.order
        half_rhs = GarsideNormalForm(context, half_sigma, ())
        for m, e in zip(maxes, exponents):
            half_rhs = half_rhs.mul(GarsideNormalForm(context, 0, (m,)).power(e // 2))
        if half_lhs != half_rhs:
            raise IdentityFailed("very-good half-power identity failed")
        very_good = True
        half_digest = half_lhs.digest()

    return GoodCertificate(
        element=w, d=d, subsets=tuple(subsets), exponents=tuple(exponents),
        sigma_exponent=sigma, lhs_digest=lhs.digest(), rhs_digest=rhs.digest(),
        very_good=very_good, half_sigma_exponent=half_sigma,
        half_lhs_digest=half_digest)


def good_min_element(record: ConjugacyClassRecord, angles=None,
                     start_index: int = 0) -> tuple[TwistedElement, GoodCertificate]:
    """A good element of minimal length in the class, with its certificate.

    Conjugates a representative into a chamber in good position with respect
    to the full angle sequence (or a supplied admissible subsequence, e.g.
    the nonzero angles for the quasi-elliptic divisibility corollary).
    """
    rep = record.representative
    eig = eigen_decomposition(rep, dft_check=False)
    rep = eig.owner  # possibly rebound to a larger field
    use_angles = list(eig.angles) if angles is None else list(angles)
    filt = admissible_filtration(rep, use_angles, eig=eig)
    chamber = good_position_chamber(rep, filt, start_index)
    w_a = conjugate_by_chamber(rep, chamber)
    filt_a = admissible_filtration(w_a, use_angles)
    context = BraidContext(filt_a.system, w_a.twist)
    cert = certify_good(w_a, filt_a, context)
    if angles is None and w_a.length() != record.min_length:
        raise TheoremViolation(
            f"good-position conjugate has length {w_a.length()}, class minimum "
            f"is {record.min_length}")
    return w_a, cert


def verify_rotation_identity(w: TwistedElement, q, d: int | None = None,
                             context: BraidContext | None = None) -> bool:
    """The single-eigenspace power identity for K = V^theta, theta = q*pi.

    Hypotheses (verified, HypothesisFailed otherwise): C and w(C) in the same
    H_K-chamber, the closure of C contains a regular point of K, W_K standard
    parabolic, and d*q/2 integral.  Then with w1 the longest element of W_K
    and w0 the longest element of W:

        lift(w)^d = sigma (lift(w1 w0) lift(w0 w1))^{d q / 2}

    and, when d is even and dq/2 odd, the half-power variant.
    """
    q = Fraction(q)
    eig = eigen_decomposition(w, dft_check=False)
    w = eig.owner
    system = eig.system
    if context is None:
        context = BraidContext(system, w.twist)
    if d is None:
        d = order(w)
    if (q * d / 2).denominator != 1:
        raise HypothesisFailed("d*theta/(2*pi) is not an integer")
    basis = eig.basis_of(q)
    if not basis:
        raise HypothesisFailed(f"{q}*pi is not an angle of the element")

    from .eigen import hyperplanes_containing
    h_k = hyperplanes_containing(system, basis)
    fund = Chamber.fundamental(system)
    image = fund.image_under(w)
    if fund.separating_set(image) & h_k:
        raise HypothesisFailed("C and w(C) lie in different H_K-components")
    try:
        point = regular_point(system, basis, inside=fund)
    except NoRegularPoint as exc:
        raise HypothesisFailed("no regular point of K in the closed chamber") from exc
    J = tuple(sorted(i for i in range(system.rank)
                     if system.pair_root(i, point).is_zero()))
    if _parabolic_positive_roots(system, J) != h_k:
        raise HypothesisFailed("W_K is not the standard parabolic on I(K, C)")

    w1 = parabolic_max(system, J)
    w0 = context.table.element(context.table.w0)
    exp = int(q * d / 2)
    lhs = lift(w, context).power(d).normal_form()
    sigma = (w.k * d) % w.twist.order
    block = lift(w1 * w0, context) * lift(w0 * w1, context)
    rhs = (GarsideNormalForm(context, sigma, ()).mul(
        block.normal_form().power(exp)))
    if lhs != rhs:
        raise IdentityFailed("rotation identity failed at normal form")

    if d % 2 == 0 and exp % 2 == 1:
        half = lift(w, context).power(d // 2).normal_form()
        half_sigma = (w.k * (d // 2)) % w.twist.order
        half_rhs = GarsideNormalForm(context, half_sigma, ()).mul(
            lift(w0 * w1, context).normal_form()).mul(
            block.normal_form().power((exp - 1) // 2))
        if half != half_rhs:
            raise IdentityFailed("rotation half-power identity failed")
    return True


def verify_quasi_elliptic_divisibility(record: ConjugacyClassRecord) -> bool:
    """Corollary: quasi-elliptic classes have w^d left-divisible by Delta^2."""
    assert record.quasi_elliptic
    rep = record.representative
    eig = eigen_decomposition(rep, dft_check=False)
    nonzero = [q for q in eig.angles if q != 0]
    w_a, cert = good_min_element(record, angles=nonzero)
    context = BraidContext(w_a.system, w_a.twist)
    power = lift(w_a, context).power(cert.d).normal_form()
    if power.infimum() < 2:
        raise TheoremViolation(
            f"class {record.class_id}: w^d has infimum {power.infimum()} < 2")
    return True
