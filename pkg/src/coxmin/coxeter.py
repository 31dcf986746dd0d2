"""Finite Coxeter systems in their exact reflection representation.

A system is built from a Coxeter matrix.  V is the span of the simple roots
with the bilinear form B(a_i, a_j) = -cos(pi/m_ij); positive definiteness of
B is the finiteness test.  The full root set is the orbit closure of the
simple roots under the simple reflections, stored as exact vectors over
Q(2cos(pi/L)) with L = lcm of the finite bond labels.

Group elements are stored as permutations of the root index set (positive
roots first, the negative of root r at index r + N).  This gives O(1)
equality, O(N) length (inversion count), and composition by table lookup.
Reduced words are derived on demand by descent walking.

A diagram twist d extends the group to the semidirect product <d> x W; a
twisted element is a twist exponent plus a body, with l(d^k w) = l(w).

For enumeration-scale work (conjugacy classes, braid normal forms) a
GroupTable indexes every element of W and tabulates multiplication by the
generators on both sides, descent masks and lengths.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import NotFinite, TooLarge
from .linalg import Matrix, Vector, rref
from .scalars import AlgebraicScalar, ScalarField, get_field

ROOT_BOUND_DEFAULT = 5000


# ---------------------------------------------------------------------------
# Coxeter matrices and classification of finite types.


class CoxeterMatrix:
    """A symmetric integer matrix with 1 on the diagonal, entries >= 2 off it."""

    def __init__(self, entries: Sequence[Sequence[int]]):
        m = tuple(tuple(int(x) for x in row) for row in entries)
        n = len(m)
        if n == 0:
            raise ValueError("empty Coxeter matrix")
        for i in range(n):
            if len(m[i]) != n:
                raise ValueError("Coxeter matrix must be square")
            if m[i][i] != 1:
                raise ValueError("diagonal entries must be 1")
            for j in range(n):
                if m[i][j] != m[j][i]:
                    raise ValueError("Coxeter matrix must be symmetric")
                if i != j and m[i][j] < 2:
                    raise ValueError("off-diagonal entries must be >= 2")
        self.entries = m
        self.rank = n

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return self.entries[ij[0]][ij[1]]

    def __eq__(self, other):
        return isinstance(other, CoxeterMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"CoxeterMatrix({list(map(list, self.entries))})"

    def components(self) -> list[list[int]]:
        """Connected components of the Coxeter graph (bond label > 2)."""
        n = self.rank
        seen = [False] * n
        comps = []
        for start in range(n):
            if seen[start]:
                continue
            comp, stack = [], [start]
            seen[start] = True
            while stack:
                i = stack.pop()
                comp.append(i)
                for j in range(n):
                    if not seen[j] and self.entries[i][j] > 2:
                        seen[j] = True
                        stack.append(j)
            comps.append(sorted(comp))
        return comps

    def classify(self) -> list[tuple[str, int]]:
        """Irreducible type and order of each component; NotFinite otherwise."""
        return [_classify_component(self, comp) for comp in self.components()]

    def group_order(self) -> int:
        order = 1
        for _, o in self.classify():
            order *= o
        return order

    def field_level(self) -> int:
        L = 1
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if self.entries[i][j] >= 3:
                    L = math.lcm(L, self.entries[i][j])
        return L


def _classify_component(m: CoxeterMatrix, comp: list[int]) -> tuple[str, int]:
    n = len(comp)
    labels = {}
    deg = {i: 0 for i in comp}
    for a in range(n):
        for b in range(a + 1, n):
            i, j = comp[a], comp[b]
            if m[i, j] > 2:
                labels[(i, j)] = m[i, j]
                deg[i] += 1
                deg[j] += 1
    if n == 1:
        return "A1", 2
    if n == 2:
        mm = next(iter(labels.values()))
        name = {3: "A2", 4: "B2", 6: "G2"}.get(mm, f"I2({mm})")
        return name, 2 * mm
    if len(labels) != n - 1:
        raise NotFinite("Coxeter graph of a finite component must be a tree")
    degs = sorted(deg.values())
    big = sorted(labels.values())[-1]
    if degs[-1] == 2:  # a path
        ends = [i for i in comp if deg[i] == 1]
        path = _trace_path(comp, labels, ends[0])
        lbl = [labels[tuple(sorted((path[k], path[k + 1])))] for k in range(n - 1)]
        if lbl != lbl[::-1]:
            pass  # orientation only matters for reading the pattern below
        pattern = sorted((lbl, lbl[::-1]))[0]
        if all(x == 3 for x in lbl):
            return f"A{n}", math.factorial(n + 1)
        if pattern == [3] * (n - 2) + [4] or pattern == [4] + [3] * (n - 2):
            return f"B{n}", (2 ** n) * math.factorial(n)
        if n == 3 and pattern in ([3, 5], [5, 3]):
            return "H3", 120
        if n == 4 and pattern in ([3, 3, 5], [5, 3, 3]):
            return "H4", 14400
        if n == 4 and lbl in ([3, 4, 3],):
            return "F4", 1152
        raise NotFinite(f"unrecognized path labels {lbl}")
    if degs[-1] == 3 and degs.count(3) == 1 and all(v == 3 for v in labels.values()):
        branch = next(i for i in comp if deg[i] == 3)
        legs = sorted(_leg_lengths(comp, labels, branch))
        if legs[0] == 1 and legs[1] == 1:
            return f"D{n}", (2 ** (n - 1)) * math.factorial(n)
        if legs == [1, 2, 2]:
            return "E6", 51840
        if legs == [1, 2, 3]:
            return "E7", 2903040
        if legs == [1, 2, 4]:
            return "E8", 696729600
    raise NotFinite("Coxeter graph is not of finite type")


def _trace_path(comp, labels, start):
    adj = {i: [] for i in comp}
    for (i, j) in labels:
        adj[i].append(j)
        adj[j].append(i)
    path, prev, cur = [start], None, start
    while len(path) < len(comp):
        nxt = next(x for x in adj[cur] if x != prev)
        path.append(nxt)
        prev, cur = cur, nxt
    return path


def _leg_lengths(comp, labels, branch):
    adj = {i: [] for i in comp}
    for (i, j) in labels:
        adj[i].append(j)
        adj[j].append(i)
    lens = []
    for nb in adj[branch]:
        ln, prev, cur = 1, branch, nb
        while True:
            nxts = [x for x in adj[cur] if x != prev]
            if not nxts:
                break
            prev, cur = cur, nxts[0]
            ln += 1
        lens.append(ln)
    return lens


_NAMED_CACHE: dict[str, CoxeterMatrix] = {}


def named_matrix(name: str) -> CoxeterMatrix:
    """Coxeter matrix of a named type: A_n, B_n, D_n, E6-8, F4, G2, H3, H4, I2(m)."""
    key = name.strip().upper().replace("_", "")
    if key in _NAMED_CACHE:
        return _NAMED_CACHE[key]

    def chain(n, special=None):
        e = [[1 if i == j else 2 for j in range(n)] for i in range(n)]
        for i in range(n - 1):
            e[i][i + 1] = e[i + 1][i] = 3
        if special:
            pos, val = special
            e[pos][pos + 1] = e[pos + 1][pos] = val
        return e

    if key.startswith("I2(") and key.endswith(")"):
        m = int(key[3:-1])
        if m < 3:
            raise ValueError("I2(m) needs m >= 3")
        mat = CoxeterMatrix([[1, m], [m, 1]])
    else:
        family, num = key[0], key[1:]
        try:
            n = int(num) if num else 0
        except ValueError:
            raise ValueError(f"unknown Coxeter type {name!r}") from None
        if family == "A" and n >= 1:
            mat = CoxeterMatrix(chain(n))
        elif family in ("B", "C") and n >= 2:
            mat = CoxeterMatrix(chain(n, (0, 4)))
        elif family == "D" and n >= 4:
            e = chain(n - 1)
            for row in e:
                row.append(2)
            e.append([2] * (n - 1) + [1])
            e[n - 3][n - 1] = e[n - 1][n - 3] = 3
            mat = CoxeterMatrix(e)
        elif family == "E" and n in (6, 7, 8):
            e = chain(n - 1)
            for row in e:
                row.append(2)
            e.append([2] * (n - 1) + [1])
            e[2][n - 1] = e[n - 1][2] = 3
            mat = CoxeterMatrix(e)
        elif family == "F" and n == 4:
            mat = CoxeterMatrix(chain(4, (1, 4)))
        elif family == "G" and n == 2:
            mat = CoxeterMatrix([[1, 6], [6, 1]])
        elif family == "H" and n in (3, 4):
            mat = CoxeterMatrix(chain(n, (0, 5)))
        else:
            raise ValueError(f"unknown Coxeter type {name!r}")
    _NAMED_CACHE[key] = mat
    return mat


# ---------------------------------------------------------------------------
# The system: roots, reflection tables, bilinear form.


class CoxeterSystem:
    """A finite Coxeter group in its exact geometric representation."""

    def __init__(self, matrix: CoxeterMatrix, field: ScalarField,
                 pos_roots: Matrix, reflections: list[tuple[int, ...]]):
        self.matrix = matrix
        self.rank = matrix.rank
        self.field = field
        self.pos_roots = pos_roots          # index r in [0, N): vector of root r
        self.npos = len(pos_roots)
        self.nroots = 2 * self.npos
        self.reflections = reflections      # generator i -> permutation of all roots
        self.bilinear = _bilinear_matrix(matrix, field)
        self._identity_perm = tuple(range(self.nroots))
        self._table: GroupTable | None = None
        self._twist_root_perms: dict[tuple[int, ...], tuple[int, ...]] = {}
        self._pairing_rows: list[Vector | None] = [None] * self.npos

    # -- roots ----------------------------------------------------------------

    def root_vector(self, idx: int) -> Vector:
        if idx < self.npos:
            return self.pos_roots[idx]
        return tuple(-c for c in self.pos_roots[idx - self.npos])

    def negate_root(self, idx: int) -> int:
        return idx + self.npos if idx < self.npos else idx - self.npos

    def inner(self, u: Vector, v: Vector) -> AlgebraicScalar:
        acc = self.field.zero
        for i, ui in enumerate(u):
            if not ui.is_zero():
                row = self.bilinear[i]
                for j, vj in enumerate(v):
                    if not vj.is_zero():
                        acc = acc + ui * row[j] * vj
        return acc

    def pairing_row(self, r: int) -> Vector:
        """B * alpha_r for a positive root, cached; <alpha_r, v> = row . v."""
        rows = self._pairing_rows
        if rows[r] is None:
            alpha = self.pos_roots[r]
            rows[r] = tuple(
                sum((alpha[i] * self.bilinear[i][j] for i in range(self.rank)
                     if not alpha[i].is_zero()), self.field.zero)
                for j in range(self.rank))
        return rows[r]

    def pair_root(self, r: int, v: Vector) -> AlgebraicScalar:
        """<alpha_r, v> via the cached pairing row."""
        row = self.pairing_row(r)
        acc = self.field.zero
        for a, b in zip(row, v):
            if not (a.is_zero() or b.is_zero()):
                acc = acc + a * b
        return acc

    def simple_reflect(self, i: int, v: Vector) -> Vector:
        """s_i(v) in coordinates: only entry i changes."""
        c = self.pair_root(i, v)
        out = list(v)
        out[i] = out[i] - (c + c)
        return tuple(out)

    def reflect_vector(self, root_idx: int, v: Vector) -> Vector:
        alpha = self.root_vector(root_idx)
        c = self.inner(alpha, v)
        two_c = c + c
        return tuple(x - two_c * a for x, a in zip(v, alpha))

    def reflection_element(self, root_idx: int) -> "GroupElement":
        """The reflection s_H for the hyperplane of the given positive root."""
        if root_idx >= self.npos:
            root_idx -= self.npos
        perm = []
        for r in range(self.nroots):
            img = self.reflect_vector(root_idx, self.root_vector(r))
            perm.append(self.root_index(img))
        return GroupElement(self, tuple(perm))

    def root_index(self, v: Vector) -> int:
        key = tuple(v)
        idx = self._root_lookup.get(key)
        if idx is None:
            raise KeyError("vector is not a root")
        return idx

    # -- elements ---------------------------------------------------------------

    @property
    def identity(self) -> "GroupElement":
        return GroupElement(self, self._identity_perm)

    def generator(self, i: int) -> "GroupElement":
        return GroupElement(self, self.reflections[i])

    def element_from_word(self, word: Iterable[int]) -> "GroupElement":
        e = self.identity
        for i in word:
            e = e * self.generator(i)
        return e

    def table(self, max_order: int = 10 ** 6) -> "GroupTable":
        if self._table is None:
            order = self.matrix.group_order()
            if order > max_order:
                raise TooLarge(f"group order {order} exceeds bound {max_order}")
            self._table = GroupTable(self)
        return self._table

    def with_field_level(self, L: int) -> "CoxeterSystem":
        """A fresh system over a field of level lcm(L, current).

        Root indices and reflection tables are identical to this system's, so
        group elements carry over verbatim.
        """
        target = math.lcm(self.field.L, L)
        if target == self.field.L:
            return self
        sys2 = build_system(self.matrix, L_hint=target)
        assert sys2.npos == self.npos and sys2.reflections == self.reflections
        return sys2

    def twist_root_perm(self, twist: "DiagramTwist") -> tuple[int, ...]:
        key = twist.perm
        cached = self._twist_root_perms.get(key)
        if cached is None:
            inv = [0] * self.rank
            for i, im in enumerate(twist.perm):
                inv[im] = i
            perm = []
            for r in range(self.nroots):
                v = self.root_vector(r)
                img = tuple(v[inv[i]] for i in range(self.rank))
                perm.append(self.root_index(img))
            cached = tuple(perm)
            self._twist_root_perms[key] = cached
        return cached

    def __repr__(self):
        names = "x".join(name for name, _ in self.matrix.classify())
        return f"CoxeterSystem({names}, L={self.field.L}, roots={self.nroots})"


def _bilinear_matrix(matrix: CoxeterMatrix, field: ScalarField) -> Matrix:
    n = matrix.rank
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            m = matrix[i, j]
            if i == j:
                row.append(field.one)
            elif m == 2:
                row.append(field.zero)
            else:
                row.append(-(field.two_cos(Fraction(1, m)) / 2))
        rows.append(tuple(row))
    return rows


def _leading_minors_positive(b: Matrix, field: ScalarField) -> bool:
    n = len(b)
    # Gaussian elimination without pivoting tracks the leading minors as
    # products of pivots; for a symmetric matrix a zero pivot on the way with
    # all previous positive already refutes positive definiteness.
    work = [list(row) for row in b]
    for k in range(n):
        piv = work[k][k]
        if piv.sign() <= 0:
            return False
        for i in range(k + 1, n):
            f = work[i][k] / piv
            if not f.is_zero():
                for j in range(k, n):
                    work[i][j] = work[i][j] - f * work[k][j]
    return True


def build_system(matrix: CoxeterMatrix, L_hint: int | None = None,
                 root_bound: int = ROOT_BOUND_DEFAULT) -> CoxeterSystem:
    """Construct the root system by orbit closure of the simple roots."""
    L = matrix.field_level()
    if L_hint:
        L = math.lcm(L, L_hint)
    field = get_field(L)
    b = _bilinear_matrix(matrix, field)
    if not _leading_minors_positive(b, field):
        raise NotFinite("bilinear form is not positive definite")

    n = matrix.rank
    simple: Matrix = [tuple(field.one if i == j else field.zero for j in range(n))
                      for i in range(n)]

    def refl(i: int, v: Vector) -> Vector:
        c = field.zero
        for j, vj in enumerate(v):
            if not vj.is_zero():
                c = c + b[i][j] * vj
        out = list(v)
        out[i] = out[i] - (c + c)
        return tuple(out)

    pos: Matrix = []
    lookup: dict[tuple, int] = {}

    def root_sign(v: Vector) -> int:
        signs = {c.sign() for c in v if not c.is_zero()}
        assert signs in ({1}, {-1}), "root is not sign-coherent"
        return 1 if signs == {1} else -1

    # Track positive roots only; a reflection image landing on the negative
    # side is recorded through its positive counterpart.
    frontier = []
    for i in range(n):
        lookup[tuple(simple[i])] = i
        pos.append(simple[i])
        frontier.append(simple[i])
    while frontier:
        nxt = []
        for v in frontier:
            for i in range(n):
                img = refl(i, v)
                if root_sign(img) < 0:
                    img = tuple(-c for c in img)
                key = tuple(img)
                if key in lookup:
                    continue
                if len(pos) >= root_bound:
                    raise NotFinite(f"orbit closure exceeded {root_bound} roots")
                lookup[key] = len(pos)
                pos.append(img)
                nxt.append(img)
        frontier = nxt

    npos = len(pos)
    final_lookup: dict[tuple, int] = {}
    for idx, v in enumerate(pos):
        final_lookup[tuple(v)] = idx
        final_lookup[tuple(-c for c in v)] = idx + npos

    reflections = []
    for i in range(n):
        perm = []
        for r in range(2 * npos):
            v = pos[r] if r < npos else tuple(-c for c in pos[r - npos])
            perm.append(final_lookup[tuple(refl(i, v))])
        reflections.append(tuple(perm))

    system = CoxeterSystem(matrix, field, pos, reflections)
    system._root_lookup = final_lookup
    return system


# ---------------------------------------------------------------------------
# Group elements.


def compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """Permutation of the product: apply b, then a."""
    return tuple(a[x] for x in b)


def invert_perm(p: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


class GroupElement:
    """A group element as a permutation of the root index set."""

    __slots__ = ("system", "perm", "_inv", "_len")

    def __init__(self, system: CoxeterSystem, perm: tuple[int, ...]):
        self.system = system
        self.perm = perm
        self._inv = None
        self._len = None

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.system, compose(self.perm, other.perm))

    def inverse(self) -> "GroupElement":
        return GroupElement(self.system, self.inv_perm)

    @property
    def inv_perm(self) -> tuple[int, ...]:
        if self._inv is None:
            self._inv = invert_perm(self.perm)
        return self._inv

    def length(self) -> int:
        if self._len is None:
            npos = self.system.npos
            self._len = sum(1 for r in range(npos) if self.perm[r] >= npos)
        return self._len

    def is_identity(self) -> bool:
        return self.perm == self.system._identity_perm

    def right_descents(self) -> set[int]:
        npos = self.system.npos
        return {i for i in range(self.system.rank) if self.perm[i] >= npos}

    def left_descents(self) -> set[int]:
        npos = self.system.npos
        return {i for i in range(self.system.rank) if self.inv_perm[i] >= npos}

    def to_word(self) -> list[int]:
        """Lexicographically smallest reduced word."""
        word = []
        cur = self
        while True:
            ld = cur.left_descents()
            if not ld:
                break
            i = min(ld)
            word.append(i)
            cur = self.system.generator(i) * cur
        return word

    def apply(self, v: Vector) -> Vector:
        sys = self.system
        out = list(v)
        acc = None
        for j, vj in enumerate(v):
            if vj.is_zero():
                continue
            rv = sys.root_vector(self.perm[j])
            term = tuple(vj * c for c in rv)
            acc = term if acc is None else tuple(a + t for a, t in zip(acc, term))
        return acc if acc is not None else tuple(sys.field.zero for _ in v)

    def matrix(self) -> Matrix:
        """Rows of the matrix of this element acting on V (simple basis)."""
        sys = self.system
        cols = [sys.root_vector(self.perm[j]) for j in range(sys.rank)]
        return [tuple(cols[j][i] for j in range(sys.rank)) for i in range(sys.rank)]

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.perm == other.perm

    def __hash__(self):
        return hash(self.perm)

    def __repr__(self):
        return f"W[{','.join(map(str, self.to_word())) or 'e'}]"


# ---------------------------------------------------------------------------
# Diagram twists and twisted elements.


class DiagramTwist:
    """A permutation of the simple reflections preserving the Coxeter matrix."""

    def __init__(self, matrix: CoxeterMatrix, perm: Sequence[int]):
        p = tuple(perm)
        n = matrix.rank
        assert sorted(p) == list(range(n)), "not a permutation of the index set"
        for i in range(n):
            for j in range(n):
                if matrix[p[i], p[j]] != matrix[i, j]:
                    raise ValueError("permutation does not preserve the Coxeter matrix")
        self.matrix = matrix
        self.perm = p
        order, q = 1, p
        ident = tuple(range(n))
        while q != ident:
            q = tuple(p[x] for x in q)
            order += 1
        self.order = order

    def is_identity(self) -> bool:
        return self.perm == tuple(range(self.matrix.rank))

    def inverse_perm(self) -> tuple[int, ...]:
        return invert_perm(self.perm)

    def power_perm(self, k: int) -> tuple[int, ...]:
        k %= self.order
        q = tuple(range(self.matrix.rank))
        for _ in range(k):
            q = tuple(self.perm[x] for x in q)
        return q

    def apply_index(self, i: int, k: int = 1) -> int:
        return self.power_perm(k)[i]

    def __eq__(self, other):
        return (isinstance(other, DiagramTwist) and self.perm == other.perm
                and self.matrix == other.matrix)

    def __hash__(self):
        return hash(self.perm)

    def __repr__(self):
        return f"DiagramTwist{self.perm}"


def enumerate_twists(matrix: CoxeterMatrix) -> list[DiagramTwist]:
    """All Coxeter-matrix automorphisms, as a group (identity first)."""
    n = matrix.rank
    found: list[tuple[int, ...]] = []

    def extend(partial: list[int], used: set[int]):
        i = len(partial)
        if i == n:
            found.append(tuple(partial))
            return
        for cand in range(n):
            if cand in used:
                continue
            if all(matrix[partial[j], cand] == matrix[j, i] for j in range(i)):
                partial.append(cand)
                used.add(cand)
                extend(partial, used)
                partial.pop()
                used.remove(cand)

    extend([], set())
    found.sort(key=lambda p: (p != tuple(range(n)), p))
    return [DiagramTwist(matrix, p) for p in found]


class TwistedElement:
    """An element d^k w of the extended group <d> x| W."""

    __slots__ = ("system", "twist", "k", "body")

    def __init__(self, system: CoxeterSystem, twist: DiagramTwist, k: int,
                 body: GroupElement):
        self.system = system
        self.twist = twist
        self.k = k % twist.order
        self.body = body

    def _twist_conj_perm(self, perm: tuple[int, ...], m: int) -> tuple[int, ...]:
        """Permutation of d^m w d^-m."""
        m %= self.twist.order
        if m == 0:
            return perm
        rp = self.system.twist_root_perm(self.twist)
        fwd = rp
        for _ in range(m - 1):
            fwd = compose(rp, fwd)
        return compose(fwd, compose(perm, invert_perm(fwd)))

    def twist_conj_body(self, g: GroupElement, m: int) -> GroupElement:
        return GroupElement(self.system, self._twist_conj_perm(g.perm, m))

    def __mul__(self, other: "TwistedElement") -> "TwistedElement":
        assert other.twist == self.twist
        body = self.twist_conj_body(self.body, -other.k) * other.body
        return TwistedElement(self.system, self.twist, self.k + other.k, body)

    def inverse(self) -> "TwistedElement":
        body = self.twist_conj_body(self.body.inverse(), self.k)
        return TwistedElement(self.system, self.twist, -self.k, body)

    def length(self) -> int:
        return self.body.length()

    def is_identity(self) -> bool:
        return self.k == 0 and self.body.is_identity()

    def conjugate_by_simple(self, i: int) -> "TwistedElement":
        """s_i * self * s_i."""
        sys = self.system
        j = self.twist.apply_index(i, -self.k)
        body = sys.generator(j) * self.body * sys.generator(i)
        return TwistedElement(sys, self.twist, self.k, body)

    def conjugate_by(self, x: GroupElement) -> "TwistedElement":
        """x^-1 * self * x."""
        body = self.twist_conj_body(x.inverse(), -self.k) * self.body * x
        return TwistedElement(self.system, self.twist, self.k, body)

    def root_perm(self) -> tuple[int, ...]:
        """Action on the root index set (body first, then the twist)."""
        rp = self.system.twist_root_perm(self.twist)
        out = self.body.perm
        for _ in range(self.k):
            out = compose(rp, out)
        return out

    def apply(self, v: Vector) -> Vector:
        w = self.body.apply(v)
        if self.k:
            inv = invert_perm(self.twist.power_perm(self.k))
            w = tuple(w[inv[i]] for i in range(len(w)))
        return w

    def matrix(self) -> Matrix:
        sys = self.system
        perm = self.root_perm()
        cols = [sys.root_vector(perm[j]) for j in range(sys.rank)]
        return [tuple(cols[j][i] for j in range(sys.rank)) for i in range(sys.rank)]

    def __eq__(self, other):
        return (isinstance(other, TwistedElement) and self.k == other.k
                and self.body == other.body and self.twist == other.twist)

    def __hash__(self):
        return hash((self.k, self.body.perm))

    def __repr__(self):
        return f"d^{self.k}*{self.body!r}" if self.k else repr(self.body)


def untwisted(element: GroupElement) -> TwistedElement:
    sys = element.system
    twist = DiagramTwist(sys.matrix, tuple(range(sys.rank)))
    return TwistedElement(sys, twist, 0, element)


# ---------------------------------------------------------------------------
# Chambers.


class Chamber:
    """A Weyl chamber, encoded by the unique x with x(C) = A."""

    __slots__ = ("system", "x")

    def __init__(self, system: CoxeterSystem, x: GroupElement):
        self.system = system
        self.x = x

    @classmethod
    def fundamental(cls, system: CoxeterSystem) -> "Chamber":
        return cls(system, system.identity)

    def sign(self, root_idx: int) -> int:
        """Sign of <alpha_r, p> for p interior to the chamber."""
        return 1 if self.x.inv_perm[root_idx] < self.system.npos else -1

    def separating_set(self, other: "Chamber") -> set[int]:
        npos = self.system.npos
        a, b = self.x.inv_perm, other.x.inv_perm
        return {r for r in range(npos) if (a[r] < npos) != (b[r] < npos)}

    def walls(self) -> list[int]:
        """Positive root indices of the chamber's walls."""
        return [self.x.perm[i] if self.x.perm[i] < self.system.npos
                else self.x.perm[i] - self.system.npos
                for i in range(self.system.rank)]

    def wall_simple_index(self, root_idx: int) -> int | None:
        """If H_root is a wall of this chamber, the i with x^-1 s_H x = s_i."""
        j = self.x.inv_perm[root_idx]
        if j >= self.system.npos:
            j -= self.system.npos
        return j if j < self.system.rank else None

    def cross(self, i: int) -> "Chamber":
        """The neighbour across the i-th wall (in chamber-local coordinates)."""
        return Chamber(self.system, self.x * self.system.generator(i))

    def image_under(self, w: TwistedElement) -> "Chamber":
        """The chamber w(A)."""
        body = (w.body * self.x)
        moved = w.twist_conj_body(body, w.k)
        return Chamber(self.system, moved)

    def interior_point(self) -> Vector:
        """An exact interior point (image of the standard dominant point)."""
        rho = _dominant_point(self.system)
        return self.x.apply(rho)

    def contains_in_closure(self, v: Vector) -> bool:
        sys = self.system
        for r in range(sys.npos):
            s = sys.pair_root(r, v).sign()
            if s != 0 and s != self.sign(r):
                return False
        return True

    def __eq__(self, other):
        return isinstance(other, Chamber) and self.x == other.x

    def __hash__(self):
        return hash(self.x)

    def __repr__(self):
        return f"Chamber({self.x!r})"


def _dominant_point(system: CoxeterSystem) -> Vector:
    """The exact point p with <alpha_i, p> = 1 for all simple roots."""
    cached = getattr(system, "_dominant", None)
    if cached is not None:
        return cached
    n = system.rank
    field = system.field
    rows = [list(system.bilinear[i]) + [field.one] for i in range(n)]
    red, pivots = rref([tuple(r) for r in rows])
    sol = [field.zero] * n
    for row, p in zip(red, pivots):
        assert p < n, "bilinear form must be invertible"
        sol[p] = row[n]
    system._dominant = tuple(sol)
    return system._dominant


def conjugate_by_chamber(w: TwistedElement, chamber: Chamber) -> TwistedElement:
    """w_A = x_A^-1 w x_A."""
    return w.conjugate_by(chamber.x)


# ---------------------------------------------------------------------------
# Parabolic subgroups and coset decompositions.


def parabolic_max(system: CoxeterSystem, J: Iterable[int]) -> GroupElement:
    """Longest element of the standard parabolic subgroup W_J."""
    J = sorted(set(J))
    w = system.identity
    while True:
        i = next((i for i in J if i not in w.right_descents()), None)
        if i is None:
            return w
        w = w * system.generator(i)


def coset_decompose(w: TwistedElement, J: Iterable[int]) \
        -> tuple[GroupElement, TwistedElement, GroupElement]:
    """Write w = u' * w' * u'' with u', u'' in W_J, w' minimal in W_J w W_J.

    Lengths are additive: l(w) = l(u') + l(w') + l(u'').
    """
    J = set(J)
    sys = w.system
    u_left = sys.identity
    u_right = sys.identity
    cur = w
    while True:
        i = next((i for i in J
                  if w.twist.apply_index(i, -cur.k) in cur.body.left_descents()), None)
        if i is not None:
            # cur = s_i * rest; accumulate on u_left.
            j = w.twist.apply_index(i, -cur.k)
            cur = TwistedElement(sys, w.twist, cur.k, sys.generator(j) * cur.body)
            u_left = u_left * sys.generator(i)
            continue
        i = next((i for i in J if i in cur.body.right_descents()), None)
        if i is not None:
            cur = TwistedElement(sys, w.twist, cur.k, cur.body * sys.generator(i))
            u_right = sys.generator(i) * u_right
            continue
        break
    return u_left, cur, u_right


def is_minimal_double_coset_rep(w: TwistedElement, J: Iterable[int]) -> bool:
    J = set(J)
    left = {w.twist.apply_index(i, w.k) for i in w.body.left_descents()}
    if J & left:
        return False
    return not (J & w.body.right_descents())


def normalizes_parabolic(w: TwistedElement, J: Iterable[int]) -> bool:
    """Whether conjugation by w maps {s_j : j in J} to itself."""
    J = set(J)
    perm = w.root_perm()
    return all(perm[j] in J for j in J)


def parabolic_index_map(w: TwistedElement, J: Iterable[int]) -> dict[int, int]:
    """j -> j' with w s_j w^-1 = s_j' (requires normalizes_parabolic)."""
    perm = w.root_perm()
    return {j: perm[j] for j in J}


# ---------------------------------------------------------------------------
# Indexed enumeration of the whole group.


class GroupTable:
    """Every element of W indexed, with generator multiplication tables.

    Element 0 is the identity; elements are discovered in breadth-first
    order by right multiplication, so indices are stable for a fixed matrix.
    """

    def __init__(self, system: CoxeterSystem):
        self.system = system
        n = system.rank
        npos = system.npos
        gens = [system.reflections[i] for i in range(n)]
        ident = system._identity_perm
        perms: list[tuple[int, ...]] = [ident]
        index: dict[tuple[int, ...], int] = {ident: 0}
        length = [0]
        right = [[0] for _ in range(n)]
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                px = perms[x]
                for i in range(n):
                    py = compose(px, gens[i])
                    y = index.get(py)
                    if y is None:
                        y = len(perms)
                        perms.append(py)
                        index[py] = y
                        length.append(length[x] + 1)
                        for tbl in right:
                            tbl.append(-1)
                        nxt.append(y)
                    right[i][x] = y
            frontier = nxt
        size = len(perms)
        left = [[0] * size for _ in range(n)]
        for x in range(size):
            px = perms[x]
            for i in range(n):
                left[i][x] = index[compose(gens[i], px)]
        rdesc = [0] * size
        ldesc = [0] * size
        for x in range(size):
            px = perms[x]
            m = 0
            for i in range(n):
                if px[i] >= npos:
                    m |= 1 << i
            rdesc[x] = m
            m = 0
            for i in range(n):
                if length[left[i][x]] < length[x]:
                    m |= 1 << i
            ldesc[x] = m
        self.size = size
        self.perms = perms
        self.index = index
        self.right = right
        self.left = left
        self.length = length
        self.rdesc = rdesc
        self.ldesc = ldesc
        self.w0 = max(range(size), key=length.__getitem__)
        assert length.count(length[self.w0]) == 1

    def element(self, x: int) -> GroupElement:
        return GroupElement(self.system, self.perms[x])

    def index_of(self, g: GroupElement) -> int:
        return self.index[g.perm]

    def mult(self, x: int, y: int) -> int:
        """General product via the permutations (not table-backed)."""
        return self.index[compose(self.perms[x], self.perms[y])]

    def inverse_of(self, x: int) -> int:
        return self.index[invert_perm(self.perms[x])]

    def twist_index_map(self, twist: DiagramTwist, k: int = 1) -> list[int]:
        """x -> index of d^k x d^-k."""
        rp = self.system.twist_root_perm(twist)
        fwd = self.system._identity_perm
        for _ in range(k % twist.order):
            fwd = compose(rp, fwd)
        inv = invert_perm(fwd)
        return [self.index[compose(fwd, compose(p, inv))] for p in self.perms]


# ---------------------------------------------------------------------------
# Versioned JSON cache for built systems.

CACHE_SCHEMA = "coxmin/rootsys-v1"


def _coeff_encode(s: AlgebraicScalar) -> list[list[int]]:
    return [[c.numerator, c.denominator] for c in s.coeffs]


def system_to_json(system: CoxeterSystem) -> dict:
    return {
        "schema": CACHE_SCHEMA,
        "matrix": [list(r) for r in system.matrix.entries],
        "L": system.field.L,
        "positive_roots": [[_coeff_encode(c) for c in v] for v in system.pos_roots],
        "reflections": [list(p) for p in system.reflections],
    }


def system_from_json(data: dict) -> CoxeterSystem:
    assert data["schema"] == CACHE_SCHEMA
    matrix = CoxeterMatrix(data["matrix"])
    field = get_field(data["L"])
    pos = [tuple(field.scalar([Fraction(a, b) for a, b in coeffs]) for coeffs in vec)
           for vec in data["positive_roots"]]
    reflections = [tuple(p) for p in data["reflections"]]
    system = CoxeterSystem(matrix, field, pos, reflections)
    lookup: dict[tuple, int] = {}
    for idx, v in enumerate(pos):
        lookup[tuple(v)] = idx
        lookup[tuple(-c for c in v)] = idx + len(pos)
    system._root_lookup = lookup
    return system


def cache_key(matrix: CoxeterMatrix, L: int) -> str:
    payload = json.dumps({"matrix": [list(r) for r in matrix.entries], "L": L},
                         sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def load_or_build(matrix: CoxeterMatrix, L_hint: int | None = None,
                  cache_dir: str | None = None) -> CoxeterSystem:
    L = matrix.field_level()
    if L_hint:
        L = math.lcm(L, L_hint)
    if cache_dir is None:
        return build_system(matrix, L_hint=L)
    path = os.path.join(cache_dir, f"rootsys-{cache_key(matrix, L)}.json")
    if os.path.exists(path):
        with open(path) as fh:
            return system_from_json(json.load(fh))
    system = build_system(matrix, L_hint=L)
    os.makedirs(cache_dir, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        json.dump(system_to_json(system), fh)
    os.replace(tmp, path)
    return system
