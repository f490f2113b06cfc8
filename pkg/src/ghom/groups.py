"""Finite groups, subgroups, coset spaces and the orbit category.

Elements are integer indices ``0 .. order-1`` with 0 the identity.  A
morphism ``G/H -> G/K`` of the orbit category is stored as the coset ``gK``
that receives ``eH``, normalized to its least element index.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from ghom.errors import (
    ClosureExceedsLimit,
    GroupError,
    NoIdentity,
    NoInverse,
    NonAssociative,
    NotAPermutation,
    NotASubgroup,
    NotASubgroupPair,
    NotComposable,
)

DEFAULT_CLOSURE_LIMIT = 10080


# -- permutations -------------------------------------------------------------

def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse cycle notation such as ``(0 1)(2 3)`` into an image tuple.

    ``e`` and ``()`` denote the identity.
    """
    text = text.strip()
    perm = list(range(degree))
    if text in ("e", "()", ""):
        return tuple(perm)
    seen: set[int] = set()
    rest = text
    while rest:
        rest = rest.lstrip()
        if not rest:
            break
        if not rest.startswith("("):
            raise NotAPermutation(f"bad cycle notation {text!r}")
        close = rest.find(")")
        if close < 0:
            raise NotAPermutation(f"unbalanced parenthesis in {text!r}")
        body = rest[1:close].replace(",", " ").split()
        rest = rest[close + 1:]
        try:
            points = [int(tok) for tok in body]
        except ValueError:
            raise NotAPermutation(f"non-integer point in {text!r}") from None
        for pt in points:
            if not 0 <= pt < degree:
                raise NotAPermutation(f"point {pt} outside 0..{degree - 1} in {text!r}")
            if pt in seen:
                raise NotAPermutation(f"point {pt} repeated in {text!r}")
            seen.add(pt)
        for a, b in zip(points, points[1:] + points[:1]):
            perm[a] = b
    return tuple(perm)


def format_cycles(perm: Sequence[int]) -> str:
    seen = set()
    cycles = []
    for start in range(len(perm)):
        if start in seen or perm[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = perm[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = perm[x]
        cycles.append("(" + " ".join(map(str, cyc)) + ")")
    return "".join(cycles) or "e"


def _check_perm(perm: Sequence[int], degree: int) -> tuple[int, ...]:
    perm = tuple(int(x) for x in perm)
    if len(perm) != degree or sorted(perm) != list(range(degree)):
        raise NotAPermutation(f"{list(perm)} is not a permutation of 0..{degree - 1}")
    return perm


# -- groups -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A finite group given by its multiplication table.

    ``multiply[a][b]`` is the index of ``a*b``.  When the group was built from
    permutations, ``perms[a]`` is the permutation of element ``a`` and the
    product ``a*b`` acts as ``a(b(x))``.
    """

    multiply: tuple[tuple[int, ...], ...]
    invert: tuple[int, ...]
    generators: tuple[int, ...]
    element_labels: tuple[str, ...] | None = None
    perms: tuple[tuple[int, ...], ...] | None = None

    @property
    def order(self) -> int:
        return len(self.invert)

    @property
    def elements(self) -> range:
        return range(self.order)

    def mul(self, a: int, b: int) -> int:
        return self.multiply[a][b]

    def inv(self, a: int) -> int:
        return self.invert[a]

    def product(self, *elems: int) -> int:
        out = 0
        for x in elems:
            out = self.multiply[out][x]
        return out

    def conj(self, g: int, h: int) -> int:
        """Return ``g h g^-1``."""
        return self.multiply[self.multiply[g][h]][self.invert[g]]

    def label(self, a: int) -> str:
        if self.element_labels is not None:
            return self.element_labels[a]
        return "e" if a == 0 else str(a)

    def element(self, token: str) -> int:
        """Resolve an element written as a label, an index or cycle notation."""
        token = token.strip()
        if token == "e":
            return 0
        if self.perms is not None and token.startswith("("):
            perm = parse_cycles(token, len(self.perms[0]))
            try:
                return self._perm_index[perm]
            except KeyError:
                raise GroupError(f"permutation {token} is not in the group") from None
        if self.element_labels is not None and token in self.element_labels:
            return self.element_labels.index(token)
        try:
            idx = int(token)
        except ValueError:
            raise GroupError(f"unknown group element {token!r}") from None
        if not 0 <= idx < self.order:
            raise GroupError(f"element index {idx} out of range 0..{self.order - 1}")
        return idx

    @cached_property
    def _perm_index(self) -> dict[tuple[int, ...], int]:
        return {p: i for i, p in enumerate(self.perms or ())}

    @cached_property
    def whole(self) -> "Subgroup":
        return Subgroup(self, tuple(self.elements))

    @cached_property
    def trivial(self) -> "Subgroup":
        return Subgroup(self, (0,))

    def subgroup(self, members: Iterable[int]) -> "Subgroup":
        """Validated subgroup from an explicit element list."""
        mem = tuple(sorted(set(int(m) for m in members)))
        if not mem or mem[0] != 0:
            raise NotASubgroup(f"element list {list(mem)} does not contain the identity")
        mset = set(mem)
        for a in mem:
            if self.invert[a] not in mset:
                raise NotASubgroup(f"element list {list(mem)} is not closed under inverse ({a})")
            for b in mem:
                if self.multiply[a][b] not in mset:
                    raise NotASubgroup(
                        f"element list {list(mem)} is not closed under multiplication ({a}*{b})")
        return Subgroup(self, mem)

    def generated(self, gens: Iterable[int]) -> "Subgroup":
        members = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = self.multiply[x][s]
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
        return Subgroup(self, tuple(sorted(members)))

    @cached_property
    def subgroups(self) -> tuple["Subgroup", ...]:
        """All subgroups, as joins of cyclic subgroups; sorted by (order, members)."""
        cyclic = {self.generated([g]) for g in self.elements}
        found = set(cyclic)
        frontier = list(found)
        while frontier:
            nxt = []
            for a in frontier:
                for c in cyclic:
                    j = self.generated(a.members + c.members)
                    if j not in found:
                        found.add(j)
                        nxt.append(j)
            frontier = nxt
        return tuple(sorted(found, key=lambda s: (s.order, s.members)))

    def is_abelian(self) -> bool:
        return all(self.multiply[a][b] == self.multiply[b][a]
                   for a in self.elements for b in self.elements)


def _greedy_generators(multiply, order) -> tuple[int, ...]:
    gens: list[int] = []
    members = {0}
    for g in range(order):
        if g in members:
            continue
        gens.append(g)
        frontier = list(members)
        while frontier:
            nxt = []
            for x in frontier:
                for s in gens:
                    y = multiply[x][s]
                    if y not in members:
                        members.add(y)
                        nxt.append(y)
            frontier = nxt
    return tuple(gens)


def group_from_table(table: Sequence[Sequence[int]],
                     labels: Sequence[str] | None = None) -> FiniteGroup:
    n = len(table)
    if n == 0:
        raise GroupError("empty multiplication table")
    rows = []
    for i, row in enumerate(table):
        if len(row) != n:
            raise GroupError(f"table row {i} has {len(row)} entries, expected {n}")
        for x in row:
            if not (isinstance(x, int) and 0 <= x < n):
                raise GroupError(f"table entry {x!r} in row {i} outside 0..{n - 1}")
        rows.append(tuple(row))
    for a in range(n):
        if rows[0][a] != a or rows[a][0] != a:
            raise NoIdentity(f"element 0 is not a two-sided identity (fails at element {a})")
    invert = []
    for a in range(n):
        cands = [b for b in range(n) if rows[a][b] == 0 and rows[b][a] == 0]
        if not cands:
            raise NoInverse(f"element {a} has no two-sided inverse")
        invert.append(cands[0])
    for a, b, c in itertools.product(range(n), repeat=3):
        if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
            raise NonAssociative(f"(a*b)*c != a*(b*c) for (a, b, c) = ({a}, {b}, {c})")
    return FiniteGroup(
        multiply=tuple(rows),
        invert=tuple(invert),
        generators=_greedy_generators(rows, n),
        element_labels=tuple(labels) if labels is not None else None,
    )


def group_from_permutations(degree: int, generators: Sequence[Sequence[int]],
                            limit: int = DEFAULT_CLOSURE_LIMIT) -> FiniteGroup:
    """Close a list of permutations under composition.

    Elements are listed breadth-first from the identity, multiplying by the
    generators on the right in input order.
    """
    gens = [_check_perm(g, degree) for g in generators]
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    queue = deque([ident])
    while queue:
        p = queue.popleft()
        for s in gens:
            q = tuple(p[s[x]] for x in range(degree))
            if q not in index:
                if len(elems) >= limit:
                    raise ClosureExceedsLimit(
                        f"generated group exceeds {limit} elements")
                index[q] = len(elems)
                elems.append(q)
                queue.append(q)
    n = len(elems)
    multiply = tuple(
        tuple(index[tuple(a[b[x]] for x in range(degree))] for b in elems)
        for a in elems)
    invert = []
    for a in elems:
        inv = [0] * degree
        for x, y in enumerate(a):
            inv[y] = x
        invert.append(index[tuple(inv)])
    gen_idx = []
    for s in gens:
        i = index[s]
        if i != 0 and i not in gen_idx:
            gen_idx.append(i)
    return FiniteGroup(
        multiply=multiply,
        invert=tuple(invert),
        generators=tuple(gen_idx),
        element_labels=tuple(format_cycles(p) for p in elems),
        perms=tuple(elems),
    )


def cyclic_group(n: int) -> FiniteGroup:
    return group_from_permutations(n, [[(i + 1) % n for i in range(n)]] if n > 1 else [])


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of an n-gon (order 2n)."""
    rot = [(i + 1) % n for i in range(n)]
    ref = [(-i) % n for i in range(n)]
    return group_from_permutations(n, [rot, ref])


def symmetric_group(n: int) -> FiniteGroup:
    if n < 2:
        return group_from_permutations(max(n, 1), [])
    cyc = [(i + 1) % n for i in range(n)]
    swap = list(range(n))
    swap[0], swap[1] = 1, 0
    return group_from_permutations(n, [swap, cyc])


# -- subgroups and cosets -----------------------------------------------------

@dataclass(frozen=True)
class Subgroup:
    group: FiniteGroup = field(repr=False)
    members: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.members)

    @cached_property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    def __contains__(self, g: int) -> bool:
        return g in self.member_set

    def __le__(self, other: "Subgroup") -> bool:
        return self.member_set <= other.member_set

    def __lt__(self, other: "Subgroup") -> bool:
        return self.member_set < other.member_set

    def __str__(self) -> str:
        if self.order == 1:
            return "e"
        if self.order == self.group.order:
            return "G"
        return "{" + ",".join(self.group.label(m) for m in self.members) + "}"

    @cached_property
    def cosets(self) -> "CosetSpace":
        return CosetSpace.of(self)

    def left_coset_rep(self, g: int) -> int:
        """Least element index of ``gH``."""
        mul = self.group.multiply[g]
        return min(mul[h] for h in self.members)

    def is_normal(self) -> bool:
        return all(conjugate_subgroup(self, g) == self for g in self.group.generators)

    def as_group(self) -> tuple[FiniteGroup, tuple[int, ...]]:
        """This subgroup as an abstract group plus its embedding into the parent."""
        pos = {m: i for i, m in enumerate(self.members)}
        G = self.group
        table = [[pos[G.multiply[a][b]] for b in self.members] for a in self.members]
        labels = [G.label(m) for m in self.members]
        return group_from_table(table, labels), self.members


@dataclass(frozen=True, eq=False)
class CosetSpace:
    """Left cosets ``gH``; coset 0 is ``eH`` and representatives are least indices."""

    subgroup: Subgroup
    representatives: tuple[int, ...]
    coset_of: tuple[int, ...]

    @classmethod
    def of(cls, H: Subgroup) -> "CosetSpace":
        G = H.group
        rep_of = [H.left_coset_rep(g) for g in G.elements]
        reps = tuple(sorted(set(rep_of)))
        pos = {r: i for i, r in enumerate(reps)}
        return cls(H, reps, tuple(pos[r] for r in rep_of))

    def __len__(self) -> int:
        return len(self.representatives)

    def act(self, g: int, i: int) -> int:
        """Coset index of ``g * (coset i)``."""
        G = self.subgroup.group
        return self.coset_of[G.multiply[g][self.representatives[i]]]


def conjugate_subgroup(H: Subgroup, g: int) -> Subgroup:
    """``H^g = {g h g^-1}``."""
    G = H.group
    return Subgroup(G, tuple(sorted({G.conj(g, h) for h in H.members})))


def conjugacy_class(H: Subgroup) -> list[Subgroup]:
    seen: list[Subgroup] = []
    for g in H.group.elements:
        K = conjugate_subgroup(H, g)
        if K not in seen:
            seen.append(K)
    return sorted(seen, key=lambda s: s.members)


# -- the orbit category -------------------------------------------------------

@dataclass(frozen=True)
class OrbitMorphism:
    """Equivariant map ``G/source -> G/target`` sending ``e*source`` to ``image*target``."""

    source: Subgroup
    target: Subgroup
    image: int

    @classmethod
    def make(cls, source: Subgroup, target: Subgroup, g: int) -> "OrbitMorphism":
        G = source.group
        ginv = G.inv(g)
        for h in source.members:
            if G.conj(ginv, h) not in target:
                raise NotASubgroupPair(
                    f"no equivariant map G/{source} -> G/{target} sends eH to "
                    f"{G.label(g)}K: conjugate of {G.label(h)} leaves K")
        return cls(source, target, target.left_coset_rep(g))

    def is_identity(self) -> bool:
        return self.source == self.target and self.image in self.target

    def on_coset(self, i: int) -> int:
        """Image of coset index ``i`` of ``G/source`` as a coset index of ``G/target``."""
        G = self.source.group
        a = self.source.cosets.representatives[i]
        return self.target.cosets.coset_of[G.multiply[a][self.image]]

    def as_map(self) -> tuple[int, ...]:
        return tuple(self.on_coset(i) for i in range(len(self.source.cosets)))


def identity_morphism(H: Subgroup) -> OrbitMorphism:
    return OrbitMorphism(H, H, 0)


def make_mu(g: int, H: Subgroup) -> OrbitMorphism:
    """``mu(g, H): G/H^g -> G/H`` with ``e H^g -> gH``."""
    return OrbitMorphism(conjugate_subgroup(H, g), H, H.left_coset_rep(g))


def make_kappa(K: Subgroup, H: Subgroup) -> OrbitMorphism:
    """``kappa(K, H): G/H -> G/K`` with ``eH -> eK``; requires ``H <= K``."""
    if not H <= K:
        raise NotASubgroupPair(f"{H} is not contained in {K}")
    return OrbitMorphism(H, K, 0)


def compose(f2: OrbitMorphism, f1: OrbitMorphism) -> OrbitMorphism:
    """``f2 o f1``."""
    if f1.target != f2.source:
        raise NotComposable(f"target {f1.target} of f1 differs from source {f2.source} of f2")
    G = f1.source.group
    return OrbitMorphism(f1.source, f2.target,
                         f2.target.left_coset_rep(G.mul(f1.image, f2.image)))


def enumerate_morphisms(H: Subgroup, K: Subgroup) -> list[OrbitMorphism]:
    G = H.group
    out = []
    for rep in K.cosets.representatives:
        ginv = G.inv(rep)
        if all(G.conj(ginv, h) in K for h in H.members):
            out.append(OrbitMorphism(H, K, rep))
    return out


# -- G-sets -------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FiniteGSet:
    """``act[g][x]`` is the image of point ``x`` under ``g``."""

    group: FiniteGroup
    act: tuple[tuple[int, ...], ...]
    point_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        G = self.group
        if len(self.act) != G.order:
            raise GroupError("action table needs one row per group element")
        m = len(self.act[0]) if self.act else 0
        for g in G.elements:
            row = self.act[g]
            if len(row) != m or sorted(row) != list(range(m)):
                raise GroupError(f"element {G.label(g)} does not act by a bijection")
        if any(self.act[0][x] != x for x in range(m)):
            raise GroupError("identity does not act trivially")
        for g in G.elements:
            for h in G.elements:
                gh = G.mul(g, h)
                for x in range(m):
                    if self.act[g][self.act[h][x]] != self.act[gh][x]:
                        raise GroupError(
                            f"action is not compatible with multiplication at "
                            f"({G.label(g)}, {G.label(h)}, point {x})")

    @property
    def size(self) -> int:
        return len(self.act[0]) if self.act else 0

    @property
    def points(self) -> range:
        return range(self.size)

    def label(self, x: int) -> str:
        return self.point_labels[x] if self.point_labels else str(x)

    def stabilizer(self, x: int) -> Subgroup:
        return Subgroup(self.group, tuple(g for g in self.group.elements if self.act[g][x] == x))

    @classmethod
    def from_generators(cls, group: FiniteGroup, size: int,
                        images: dict[int, Sequence[int]],
                        point_labels: Sequence[str] | None = None) -> "FiniteGSet":
        """Extend an action given on some elements (typically the generators).

        Elements not in ``images`` are reached as products; inconsistencies are
        reported as a :class:`GroupError`.
        """
        act: dict[int, tuple[int, ...]] = {0: tuple(range(size))}
        gens = list(images)
        for g in gens:
            _check_perm(images[g], size)
        for g, perm in images.items():
            if g == 0 and tuple(perm) != tuple(range(size)):
                raise GroupError("identity must act trivially")
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for s in gens:
                    b = group.mul(a, s)
                    perm = tuple(act[a][images[s][x]] for x in range(size))
                    if b in act:
                        if act[b] != perm:
                            raise GroupError(
                                f"vertex action is not a homomorphism (element {group.label(b)})")
                    else:
                        act[b] = perm
                        nxt.append(b)
            frontier = nxt
        if len(act) != group.order:
            raise GroupError("action generators do not generate the group")
        table = tuple(act[g] for g in group.elements)
        return cls(group, table, tuple(point_labels) if point_labels is not None else None)

    @classmethod
    def cosets(cls, H: Subgroup) -> "FiniteGSet":
        cs = H.cosets
        G = H.group
        table = tuple(tuple(cs.act(g, i) for i in range(len(cs))) for g in G.elements)
        labels = tuple(f"{G.label(r)}H" for r in cs.representatives)
        return cls(G, table, labels)


def orbits_and_stabilizers(S: FiniteGSet) -> list[tuple[list[int], int, Subgroup]]:
    out = []
    seen: set[int] = set()
    for x in S.points:
        if x in seen:
            continue
        orbit = sorted({S.act[g][x] for g in S.group.elements})
        seen.update(orbit)
        out.append((orbit, x, S.stabilizer(x)))
    return out
