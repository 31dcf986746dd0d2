"""Twisted conjugacy classes and the arrow / approx / strong relations.

A twisted class is a W-conjugacy orbit inside the coset W d^k of the
extended group.  All class-scale work runs over the GroupTable index space:
conjugation of d^k w by a simple reflection s_i sends the body w to
s_j w s_i with j = d^{-k}(i), two table lookups.

The key computations:

* enumerate_classes: union-find over generator conjugations.
* arrow_reduce: non-increasing conjugation by simple reflections down to an
  element with no strict descent reachable through its equal-length plateau.
  Within a class sweep the plateau searches share an exit-pointer cache, so
  reducing every element of a class costs about one traversal of the class.
* approx_partition / strong_partition: connected components of O_min under
  equal-length simple conjugation, respectively under elementary strong
  conjugation (witness search over length-additive conjugators with prefix
  pruning).
* path_graph: the graph on W_w = {x : l(x^-1 w x) = l(w)} walked by paths of
  equal-length simple conjugations, with the centralizer coverage report.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .coxeter import (CoxeterMatrix, CoxeterSystem, DiagramTwist, GroupElement,
                      TwistedElement, build_system, compose, invert_perm,
                      is_minimal_double_coset_rep, normalizes_parabolic,
                      parabolic_index_map)
from .eigen import (elliptic_parabolic_certificate, is_elliptic,
                    is_quasi_elliptic)
from .errors import SearchBound, TheoremViolation


class TwistedCoset:
    """The coset W d^k with table-backed conjugation by simple reflections."""

    def __init__(self, system: CoxeterSystem, twist: DiagramTwist, k: int = 1,
                 max_order: int = 10 ** 6):
        self.system = system
        self.twist = twist
        self.k = k % twist.order
        self.table = system.table(max_order)
        n = system.rank
        self._left_letter = [twist.apply_index(i, -self.k) for i in range(n)]

    def conj(self, x: int, i: int) -> int:
        """Body index of s_i (d^k x) s_i."""
        t = self.table
        return t.left[self._left_letter[i]][t.right[i][x]]

    def length(self, x: int) -> int:
        return self.table.length[x]

    def element(self, x: int) -> TwistedElement:
        return TwistedElement(self.system, self.twist, self.k, self.table.element(x))

    def index(self, w: TwistedElement) -> int:
        assert w.k == self.k and w.twist == self.twist
        return self.table.index_of(w.body)

    def conjugate_by_index(self, x: int, g: int) -> int:
        """Body index of (g^-1) (d^k x) g for an arbitrary g."""
        t = self.table
        pg = t.perms[g]
        twisted_inv = self._twist_body(invert_perm(pg))
        return t.index[compose(twisted_inv, compose(t.perms[x], pg))]

    def _twist_body(self, perm: tuple[int, ...]) -> tuple[int, ...]:
        m = (-self.k) % self.twist.order
        if m == 0:
            return perm
        rp = self.system.twist_root_perm(self.twist)
        fwd = rp
        for _ in range(m - 1):
            fwd = compose(rp, fwd)
        return compose(fwd, compose(perm, invert_perm(fwd)))


@dataclass
class ConjugacyClassRecord:
    coset: TwistedCoset
    class_id: int
    elements: list[int]          # body indices, ascending
    o_min: list[int]             # body indices of minimal length, ascending
    min_length: int
    elliptic: bool
    quasi_elliptic: bool
    _exit_cache: dict = dc_field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.elements)

    @property
    def representative(self) -> TwistedElement:
        return self.coset.element(self.o_min[0])

    def element_list(self) -> list[TwistedElement]:
        return [self.coset.element(x) for x in self.elements]

    def o_min_list(self) -> list[TwistedElement]:
        return [self.coset.element(x) for x in self.o_min]


def enumerate_classes(system: CoxeterSystem, twist: DiagramTwist | None = None,
                      k: int = 1, max_order: int = 10 ** 6,
                      certify_elliptic: bool = True) -> list[ConjugacyClassRecord]:
    """All W-conjugacy classes in the coset W d^k, as records."""
    if twist is None:
        twist = DiagramTwist(system.matrix, tuple(range(system.rank)))
    coset = TwistedCoset(system, twist, k, max_order)
    t = coset.table
    size = t.size
    parent = list(range(size))

    def find(x: int) -> int:
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    for x in range(size):
        for i in range(system.rank):
            y = coset.conj(x, i)
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)

    buckets: dict[int, list[int]] = {}
    for x in range(size):
        buckets.setdefault(find(x), []).append(x)

    classes = sorted(buckets.values(), key=lambda els: (min(t.length[x] for x in els),
                                                        len(els), els[0]))
    records = []
    for cid, els in enumerate(classes):
        mlen = min(t.length[x] for x in els)
        o_min = [x for x in els if t.length[x] == mlen]
        rep = coset.element(o_min[0])
        ell = is_elliptic(rep)
        if certify_elliptic:
            crit = elliptic_parabolic_certificate(rep, els, t)
            assert crit == ell, "parabolic criterion disagrees with the fixed-space test"
        records.append(ConjugacyClassRecord(
            coset=coset, class_id=cid, elements=els, o_min=o_min,
            min_length=mlen, elliptic=ell,
            quasi_elliptic=is_quasi_elliptic(rep)))
    return records


# ---------------------------------------------------------------------------
# Arrow reduction.


@dataclass
class ReductionChain:
    """Conjugation steps (simple index, length delta in {0, -2})."""
    steps: list[tuple[int, int]]

    def __len__(self):
        return len(self.steps)

    def apply(self, w: TwistedElement) -> TwistedElement:
        cur = w
        for i, delta in self.steps:
            nxt = cur.conjugate_by_simple(i)
            assert nxt.length() - cur.length() == delta
            cur = nxt
        return cur


def _plateau_exit(coset: TwistedCoset, x: int, cache: dict) -> tuple[int, int] | None:
    """Next step from x: None if no strict descent is plateau-reachable.

    Explores the equal-length component of x, following cached pointers as
    soon as it touches one.  On success the discovered path is written into
    the cache so sibling searches stay near-linear per class.
    """
    if x in cache:
        return cache[x]
    n = coset.system.rank
    lx = coset.length(x)
    parent: dict[int, tuple[int, int] | None] = {x: None}
    queue = [x]
    qi = 0
    exit_node = None
    exit_step = None
    while qi < len(queue):
        cur = queue[qi]
        qi += 1
        if cur in cache and cur != x:
            step = cache[cur]
            if step is None:
                continue  # known terminal; keep searching elsewhere
            exit_node, exit_step = cur, step
            break
        found = None
        for i in range(n):
            y = coset.conj(cur, i)
            ly = coset.length(y)
            if ly < lx:
                found = (i, y)
                break
            if ly == lx and y not in parent:
                parent[y] = (cur, i)
                queue.append(y)
        if found is not None:
            exit_node, exit_step = cur, found
            break
    if exit_node is None:
        # The whole plateau component has no strict descent: terminal.
        for node in parent:
            cache[node] = None
        return None
    # Reverse the parent pointers along the path x -> exit_node.
    cache[exit_node] = exit_step
    node = exit_node
    while parent[node] is not None:
        prev, letter = parent[node]
        cache[prev] = (letter, node)
        node = prev
    return cache[x]


def arrow_reduce(w: TwistedElement, record: ConjugacyClassRecord | None = None,
                 coset: TwistedCoset | None = None
                 ) -> tuple[TwistedElement, ReductionChain]:
    """Follow non-increasing simple conjugations until no descent is reachable.

    With a class record the plateau searches share the record's cache and the
    end length is checked against the class minimum (TheoremViolation on
    mismatch; the theorem says it never happens).
    """
    if record is not None:
        coset = record.coset
        cache = record._exit_cache
    else:
        if coset is None:
            coset = TwistedCoset(w.system, w.twist, w.k)
        cache = {}
    x = coset.index(w)
    steps: list[tuple[int, int]] = []
    while True:
        step = _plateau_exit(coset, x, cache)
        if step is None:
            break
        i, y = step
        steps.append((i, coset.length(y) - coset.length(x)))
        x = y
    end = coset.element(x)
    if record is not None and end.length() != record.min_length:
        raise TheoremViolation(
            f"arrow reduction stopped at length {end.length()}, class minimum "
            f"is {record.min_length}")
    return end, ReductionChain(steps)


def verify_arrow_reduction(record: ConjugacyClassRecord) -> bool:
    """Reverse-reachability check that every class element reaches O_min."""
    coset = record.coset
    n = coset.system.rank
    reach = set(record.o_min)
    frontier = list(record.o_min)
    while frontier:
        nxt = []
        for y in frontier:
            ly = coset.length(y)
            for i in range(n):
                x = coset.conj(y, i)
                if x not in reach and coset.length(x) >= ly:
                    reach.add(x)
                    nxt.append(x)
        frontier = nxt
    if len(reach) != record.size:
        raise TheoremViolation(
            f"class {record.class_id}: {record.size - len(reach)} elements "
            "cannot reach O_min")
    return True


# ---------------------------------------------------------------------------
# Partitions of O_min.


def _blocks_from_unionfind(items: Sequence[int], parent: dict[int, int]) -> list[list[int]]:
    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    buckets: dict[int, list[int]] = {}
    for x in items:
        buckets.setdefault(find(x), []).append(x)
    return sorted(buckets.values())


def approx_partition(record: ConjugacyClassRecord,
                     elements: Sequence[int] | None = None) -> list[list[int]]:
    """Blocks of O_min (body indices) under equal-length simple conjugation."""
    coset = record.coset
    items = list(elements) if elements is not None else list(record.o_min)
    level = {coset.length(x) for x in items}
    assert len(level) == 1, "approx partition needs elements of equal length"
    members = set(items)
    parent = {x: x for x in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for x in items:
        lx = coset.length(x)
        for i in range(coset.system.rank):
            y = coset.conj(x, i)
            if y in members and coset.length(y) == lx:
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
    return _blocks_from_unionfind(items, parent)


def elementary_strong_targets(coset: TwistedCoset, x: int,
                              bound: int | None = None,
                              pruned: bool = True) -> set[int]:
    """Bodies elementarily strongly conjugate to d^k x.

    Pruned mode enumerates conjugators g in BFS order with the
    length-additivity condition maintained letter by letter (the condition
    is prefix-closed on the additive side, so no witness is missed).
    Unpruned mode scans all of W; it is the oracle for the pruned search.
    """
    t = coset.table
    n = coset.system.rank
    lw = t.length[x]
    limit = bound if bound is not None else 2 * t.size + 1
    targets: set[int] = set()

    if not pruned:
        px = t.perms[x]
        for g in range(t.size):
            pg = t.perms[g]
            gb = coset._twist_body(pg)
            left_len = t.length[t.index[compose(gb, px)]]
            right_len = t.length[t.index[compose(px, invert_perm(pg))]]
            if left_len == t.length[g] + lw or right_len == t.length[g] + lw:
                # y = g (d^k x) g^-1, body d^{-k}(g) x g^-1.
                y = t.index[compose(gb, compose(px, invert_perm(pg)))]
                if t.length[y] == lw:
                    targets.add(y)
        return targets

    # Family 1: g grown on the left, l(g w) = l(g) + l(w).
    # State: (g, b = body of g * d^k x, c = body of g (d^k x) g^-1).
    seen = {0}
    frontier = [(0, x, x)]
    count = 0
    while frontier:
        nxt = []
        for g, b, c in frontier:
            if t.length[c] == lw:
                targets.add(c)
            for i in range(n):
                g2 = t.left[i][g]
                if t.length[g2] != t.length[g] + 1 or g2 in seen:
                    continue
                j = coset._left_letter[i]
                b2 = t.left[j][b]
                if t.length[b2] != t.length[b] + 1:
                    continue
                seen.add(g2)
                count += 1
                if count > limit:
                    raise SearchBound("witness search exceeded its bound")
                c2 = t.left[j][t.right[i][c]]
                nxt.append((g2, b2, c2))
        frontier = nxt

    # Family 2: h grown on the right, l(w h) = l(w) + l(h); witness g = h^-1.
    seen = {0}
    frontier = [(0, x, x)]
    while frontier:
        nxt = []
        for h, b, c in frontier:
            if t.length[c] == lw:
                targets.add(c)
            for i in range(n):
                h2 = t.right[i][h]
                if t.length[h2] != t.length[h] + 1 or h2 in seen:
                    continue
                b2 = t.right[i][b]
                if t.length[b2] != t.length[b] + 1:
                    continue
                seen.add(h2)
                count += 1
                if count > limit:
                    raise SearchBound("witness search exceeded its bound")
                j = coset._left_letter[i]
                c2 = t.left[j][t.right[i][c]]
                nxt.append((h2, b2, c2))
        frontier = nxt
    return targets


def strong_partition(record: ConjugacyClassRecord,
                     elements: Sequence[int] | None = None,
                     bound: int | None = None,
                     pruned: bool = True) -> list[list[int]]:
    """Blocks of O_min under strong conjugation.

    Seeds with the approx blocks (equal-length simple conjugations satisfy
    the elementary witness condition unless the step is trivial), then joins
    blocks with witnesses from the elementary search.  Stops as soon as a
    single block remains.
    """
    coset = record.coset
    items = list(elements) if elements is not None else list(record.o_min)
    parent = {x: x for x in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            return True
        return False

    nblocks = len(items)
    for block in approx_partition(record, items):
        for other in block[1:]:
            if union(block[0], other):
                nblocks -= 1

    members = set(items)
    for x in items:
        if nblocks == 1:
            break
        # Skip searches that cannot merge anything new: all members of x's
        # block searched already is not tracked, so just search every x whose
        # block is still not alone; correctness over speed.
        for y in elementary_strong_targets(coset, x, bound, pruned):
            if y in members and union(x, y):
                nblocks -= 1
    return _blocks_from_unionfind(items, parent)


def verify_strong_single_block(record: ConjugacyClassRecord,
                               bound: int | None = None) -> bool:
    blocks = strong_partition(record, bound=bound)
    if len(blocks) != 1:
        raise TheoremViolation(
            f"class {record.class_id}: O_min splits into {len(blocks)} strong blocks")
    return True


def verify_elliptic_approx(record: ConjugacyClassRecord) -> bool:
    """Elliptic classes have a single approx block on O_min."""
    assert record.elliptic
    blocks = approx_partition(record)
    if len(blocks) != 1:
        raise TheoremViolation(
            f"elliptic class {record.class_id}: O_min splits into "
            f"{len(blocks)} approx blocks")
    return True


# ---------------------------------------------------------------------------
# The path graph on W_w and the tau map.


@dataclass
class PathGraph:
    """Vertices W_w (as element indices), the tau-reachable set, and Z_W(w)."""
    coset: TwistedCoset
    start_body: int
    vertices: list[int]
    reached: list[int]
    centralizer: list[int]

    @property
    def surjective(self) -> bool:
        return len(self.reached) == len(self.vertices)

    @property
    def centralizer_covered(self) -> bool:
        reached = set(self.reached)
        return all(z in reached for z in self.centralizer)


def path_graph(w: TwistedElement, coset: TwistedCoset | None = None) -> PathGraph:
    """BFS over x -> x s_i inside W_w, recording tau-image reachability.

    Walking to x exhibits a path of equal-length conjugations from w to
    x^-1 w x whose tau-image is x; reaching x in Z_W(w) therefore exhibits a
    closed path at w with tau-image x.
    """
    if coset is None:
        coset = TwistedCoset(w.system, w.twist, w.k)
    t = coset.table
    n = coset.system.rank
    wbody = coset.index(w)
    lw = t.length[wbody]

    # Conjugate map over all of W: cm[x] = body of x^-1 (d^k w) x.
    cm = [0] * t.size
    cm[0] = wbody
    frontier = [0]
    seen = bytearray(t.size)
    seen[0] = 1
    while frontier:
        nxt = []
        for x in frontier:
            cx = cm[x]
            for i in range(n):
                y = t.right[i][x]
                if not seen[y]:
                    seen[y] = 1
                    cm[y] = t.left[coset._left_letter[i]][t.right[i][cx]]
                    nxt.append(y)
        frontier = nxt

    vertices = [x for x in range(t.size) if t.length[cm[x]] == lw]
    in_w = bytearray(t.size)
    for x in vertices:
        in_w[x] = 1
    reached = []
    if in_w[0]:
        seen2 = bytearray(t.size)
        seen2[0] = 1
        frontier = [0]
        reached = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for i in range(n):
                    y = t.right[i][x]
                    if in_w[y] and not seen2[y]:
                        seen2[y] = 1
                        reached.append(y)
                        nxt.append(y)
            frontier = nxt
    centralizer = [x for x in range(t.size) if cm[x] == wbody]
    return PathGraph(coset=coset, start_body=wbody, vertices=sorted(vertices),
                     reached=sorted(reached), centralizer=sorted(centralizer))


def verify_tau_surjective(w: TwistedElement,
                          coset: TwistedCoset | None = None) -> PathGraph:
    graph = path_graph(w, coset)
    if not graph.surjective:
        raise TheoremViolation(
            f"tau not surjective: {len(graph.reached)} of {len(graph.vertices)} reached")
    if not graph.centralizer_covered:
        raise TheoremViolation("some centralizer element has no closed path")
    return graph


# ---------------------------------------------------------------------------
# Arrow reachability and the partial conjugation transfer oracle.


def arrow_reachable_set(w: TwistedElement, coset: TwistedCoset | None = None) -> set[int]:
    """Bodies reachable from w by non-increasing simple conjugations."""
    if coset is None:
        coset = TwistedCoset(w.system, w.twist, w.k)
    n = coset.system.rank
    start = coset.index(w)
    reach = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            lx = coset.length(x)
            for i in range(n):
                y = coset.conj(x, i)
                if y not in reach and coset.length(y) <= lx:
                    reach.add(y)
                    nxt.append(y)
        frontier = nxt
    return reach


def _strong_related(coset: TwistedCoset, a: int, b: int) -> bool:
    """Whether d^k a ~ d^k b (transitive closure of elementary strong)."""
    if coset.length(a) != coset.length(b):
        return False
    level = coset.length(a)
    comp = {a}
    frontier = [a]
    while frontier:
        nxt = []
        for x in frontier:
            for y in elementary_strong_targets(coset, x):
                if coset.length(y) == level and y not in comp:
                    comp.add(y)
                    nxt.append(y)
        frontier = nxt
        if b in comp:
            return True
    return b in comp


def parabolic_subsystem(w_prime: TwistedElement, J: Sequence[int]):
    """The twisted group <d'> x| W_J induced by conjugation by w_prime.

    Returns (subsystem, twist, to_sub) where to_sub maps elements of W_J to
    the subsystem; requires w_prime(J) = J.
    """
    J = sorted(J)
    sys_full = w_prime.system
    assert normalizes_parabolic(w_prime, J), "w' must normalize W_J"
    sub = build_system(CoxeterMatrix([[sys_full.matrix[a, b] for b in J]
                                      for a in J]))
    imap = parabolic_index_map(w_prime, J)
    pos = {j: p for p, j in enumerate(J)}
    sub_twist = DiagramTwist(sub.matrix, tuple(pos[imap[j]] for j in J))

    def to_sub(g: GroupElement) -> GroupElement:
        word = g.to_word()
        assert all(i in J for i in word), "element is not in W_J"
        return sub.element_from_word([pos[i] for i in word])

    return sub, sub_twist, to_sub


def partial_conjugation_transfer(J: Sequence[int], w_prime: TwistedElement,
                                 x: GroupElement, y: GroupElement) -> bool:
    """Check the transfer law between W~ and <d'> x| W_J for w' normalizing W_J.

    Tests that w'x -> w'y iff d'x -> d'y in the subsystem (and the same for
    the approx and strong relations).  Returns True when all three agree;
    raises TheoremViolation otherwise.
    """
    J = sorted(J)
    sys_full = w_prime.system
    assert is_minimal_double_coset_rep(w_prime, J), "w' must be the minimal double coset rep"
    assert normalizes_parabolic(w_prime, J), "w' must normalize W_J"
    if not J:
        # W_J is trivial: both sides compare w' with itself.
        assert x.is_identity() and y.is_identity()
        return True

    sub, sub_twist, to_sub = parabolic_subsystem(w_prime, J)
    full_coset = TwistedCoset(sys_full, w_prime.twist, w_prime.k)
    sub_coset = TwistedCoset(sub, sub_twist, 1)

    wx = w_prime * TwistedElement(sys_full, w_prime.twist, 0, x)
    wy = w_prime * TwistedElement(sys_full, w_prime.twist, 0, y)
    dx = TwistedElement(sub, sub_twist, 1, to_sub(x))
    dy = TwistedElement(sub, sub_twist, 1, to_sub(y))

    arrow_full = full_coset.index(wy) in arrow_reachable_set(wx, full_coset)
    arrow_sub = sub_coset.index(dy) in arrow_reachable_set(dx, sub_coset)
    if arrow_full != arrow_sub:
        raise TheoremViolation("partial conjugation: arrow relation does not transfer")

    approx_full = (wx.length() == wy.length() and arrow_full
                   and full_coset.index(wx) in arrow_reachable_set(wy, full_coset))
    approx_sub = (dx.length() == dy.length() and arrow_sub
                  and sub_coset.index(dx) in arrow_reachable_set(dy, sub_coset))
    if approx_full != approx_sub:
        raise TheoremViolation("partial conjugation: approx relation does not transfer")

    strong_full = _strong_related(full_coset, full_coset.index(wx), full_coset.index(wy))
    strong_sub = _strong_related(sub_coset, sub_coset.index(dx), sub_coset.index(dy))
    if strong_full != strong_sub:
        raise TheoremViolation("partial conjugation: strong relation does not transfer")
    return True
