"""Finite abstract simplicial G-complexes.

A complex keeps its simplices in *registration order*; the first simplex of
each orbit in that order is the orbit representative.  Every simplex carries
a preferred vertex ordering.  :func:`close` gives representatives the order
they were listed with and gives translates the transported order, so the
orientation sign of a representative is always +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from ghom.errors import InvalidComplex, InvalidHComplex, NotEquivariant, NotRegular
from ghom.groups import FiniteGroup, FiniteGSet, Subgroup, group_from_permutations

Simplex = frozenset


def permutation_sign(seq: Sequence[int], target: Sequence[int]) -> int:
    """Sign of the permutation rearranging ``seq`` into ``target`` (same entries)."""
    pos = {v: i for i, v in enumerate(target)}
    perm = [pos[v] for v in seq]
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def trivial_group() -> FiniteGroup:
    return group_from_permutations(1, [])


def trivial_gset(n: int, group: FiniteGroup | None = None,
                 labels: Sequence[str] | None = None) -> FiniteGSet:
    G = group or trivial_group()
    row = tuple(range(n))
    return FiniteGSet(G, tuple(row for _ in G.elements), tuple(labels) if labels else None)


@dataclass
class ValidationReport:
    ok: bool
    failures: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class SimplexOrbit:
    dim: int
    representative: Simplex
    stabilizer: Subgroup
    members: tuple[tuple[Simplex, int], ...]  # (member, aligning h with h*member == representative)


class GSimplicialComplex:
    """Finite simplicial complex on the points of a G-set.

    ``simplices`` is a sequence of ordered vertex tuples in registration
    order.  ``vertices`` restricts the vertex set to a G-stable subset of the
    points (default: all points).
    """

    def __init__(self, vertex_set: FiniteGSet, simplices: Iterable[Sequence[int]],
                 vertices: Iterable[int] | None = None, name: str = ""):
        self.vertex_set = vertex_set
        self.group = vertex_set.group
        self.name = name
        self.order: dict[Simplex, tuple[int, ...]] = {}
        self.registration: list[Simplex] = []
        for seq in simplices:
            seq = tuple(int(v) for v in seq)
            if not seq:
                raise InvalidComplex("empty simplex")
            if len(set(seq)) != len(seq):
                raise InvalidComplex(f"simplex {seq} repeats a vertex")
            for v in seq:
                if not 0 <= v < vertex_set.size:
                    raise InvalidComplex(f"simplex {seq} uses unknown vertex {v}")
            key = Simplex(seq)
            if key not in self.order:
                self.order[key] = seq
                self.registration.append(key)
        if vertices is None:
            self.vertices = frozenset(vertex_set.points)
        else:
            self.vertices = frozenset(vertices)

    # -- basic queries ------------------------------------------------------
    def __contains__(self, s) -> bool:
        return Simplex(s) in self.order

    def __len__(self) -> int:
        return len(self.registration)

    @cached_property
    def by_dim(self) -> list[list[Simplex]]:
        top = max((len(s) for s in self.registration), default=0)
        out: list[list[Simplex]] = [[] for _ in range(top)]
        for s in self.registration:
            out[len(s) - 1].append(s)
        return out

    @property
    def dim(self) -> int:
        return len(self.by_dim) - 1

    def simplices(self, p: int) -> list[Simplex]:
        return self.by_dim[p] if 0 <= p < len(self.by_dim) else []

    def translate(self, g: int, s: Iterable[int]) -> Simplex:
        act = self.vertex_set.act[g]
        return Simplex(act[v] for v in s)

    def sign_of(self, g: int, s: Iterable[int]) -> int:
        """Sign of the permutation taking ``g * order(s)`` to ``order(g s)``."""
        s = Simplex(s)
        act = self.vertex_set.act[g]
        moved = tuple(act[v] for v in self.order[s])
        return permutation_sign(moved, self.order[Simplex(moved)])

    def label(self, s: Iterable[int]) -> str:
        s = Simplex(s)
        seq = self.order.get(s, tuple(sorted(s)))
        return "[" + " ".join(self.vertex_set.label(v) for v in seq) + "]"

    def face(self, s: Simplex, k: int) -> tuple[int, ...]:
        """The ordered face of ``s`` opposite its ``k``-th vertex."""
        seq = self.order[s]
        return seq[:k] + seq[k + 1:]

    # -- orbit data --------------------------------------------------------
    @cached_property
    def orbits(self) -> list[list[SimplexOrbit]]:
        G = self.group
        assigned: dict[Simplex, int] = {}
        out: list[list[SimplexOrbit]] = []
        for p, simplices in enumerate(self.by_dim):
            level = []
            for s in simplices:
                if s in assigned:
                    continue
                members: dict[Simplex, int] = {}
                for g in G.elements:
                    t = self.translate(g, s)
                    if t not in self.order:
                        raise InvalidComplex(
                            f"complex is not closed under the action: {G.label(g)} moves "
                            f"{self.label(s)} outside")
                    members.setdefault(t, g)
                stab = Subgroup(G, tuple(g for g in G.elements if self.translate(g, s) == s))
                mem = tuple(sorted(((t, G.inv(h)) for t, h in members.items()),
                                   key=lambda th: self.registration_index[th[0]]))
                for t, _ in mem:
                    assigned[t] = len(level)
                level.append(SimplexOrbit(p, s, stab, mem))
            out.append(level)
        return out

    @cached_property
    def registration_index(self) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.registration)}

    @cached_property
    def _orbit_lookup(self) -> dict[Simplex, tuple[SimplexOrbit, int]]:
        look = {}
        for level in self.orbits:
            for orb in level:
                for t, h in orb.members:
                    look[t] = (orb, h)
        return look

    def orbit_of(self, s: Iterable[int]) -> SimplexOrbit:
        return self._orbit_lookup[Simplex(s)][0]

    def aligning_element(self, s: Iterable[int]) -> int:
        """Least-index ``h`` (by first discovery) with ``h * s`` the orbit representative."""
        return self._orbit_lookup[Simplex(s)][1]

    def aligning_elements(self, s: Iterable[int]) -> list[int]:
        s = Simplex(s)
        rep = self.orbit_of(s).representative
        return [g for g in self.group.elements if self.translate(g, s) == rep]

    def stabilizer(self, s: Iterable[int]) -> Subgroup:
        s = Simplex(s)
        G = self.group
        return Subgroup(G, tuple(g for g in G.elements if self.translate(g, s) == s))

    def vertex_gset(self) -> FiniteGSet:
        return self.vertex_set

    # -- derived complexes -----------------------------------------------
    def restrict(self, keep: Iterable[Iterable[int]], name: str = "") -> "GSimplicialComplex":
        """Subcollection of simplices with the same orders and registration order."""
        keep = {Simplex(s) for s in keep}
        kept = [self.order[s] for s in self.registration if s in keep]
        verts = {v for s in keep for v in s}
        return GSimplicialComplex(self.vertex_set, kept, vertices=verts, name=name or self.name)

    def with_representatives(self, choose) -> "GSimplicialComplex":
        """Same complex with other orbit representatives.

        ``choose(orbit)`` returns a member of the orbit to become its
        representative; the new representative keeps its preferred order and
        the rest of the orbit receives transported orders.
        """
        G = self.group
        new_order: dict[Simplex, tuple[int, ...]] = {}
        reg: list[Simplex] = []
        for level in self.orbits:
            for orb in level:
                rep = Simplex(choose(orb))
                seq = self.order[rep]
                reg.append(rep)
                new_order[rep] = seq
                for g in G.elements:
                    t = tuple(self.vertex_set.act[g][v] for v in seq)
                    if Simplex(t) not in new_order:
                        new_order[Simplex(t)] = t
                        reg.append(Simplex(t))
        return GSimplicialComplex(self.vertex_set, [new_order[s] for s in reg],
                                  vertices=self.vertices, name=self.name)

    def __repr__(self) -> str:
        counts = [len(x) for x in self.by_dim]
        return f"GSimplicialComplex({self.name!r}, |G|={self.group.order}, f-vector={counts})"


def validate(X: GSimplicialComplex) -> ValidationReport:
    """Check the four axioms of a simplicial G-complex; collect every failure."""
    G = X.group
    fails = []
    for v in sorted(X.vertices):
        if Simplex([v]) not in X.order:
            fails.append(f"(i) vertex {X.vertex_set.label(v)} is not a simplex")
    for s in X.registration:
        for v in s:
            if v not in X.vertices:
                fails.append(f"(i) simplex {X.label(s)} uses vertex {X.vertex_set.label(v)} "
                             f"outside the vertex set")
        if len(s) > 1:
            for v in s:
                f = s - {v}
                if f not in X.order:
                    fails.append(f"(ii) face {X.label(f)} of {X.label(s)} is missing")
    for v in X.vertices:
        for g in G.elements:
            if X.vertex_set.act[g][v] not in X.vertices:
                fails.append(f"(iii) {G.label(g)} moves vertex {v} outside the vertex set")
    for s in X.registration:
        for g in G.elements:
            t = X.translate(g, s)
            if t not in X.order:
                fails.append(f"(iii) {G.label(g)} {X.label(s)} is not a simplex")
            elif t == s and any(X.vertex_set.act[g][v] != v for v in s):
                fails.append(f"(iv) {G.label(g)} stabilizes {X.label(s)} but moves its vertices")
    return ValidationReport(not fails, fails)


def simplex_orbits(X: GSimplicialComplex, p: int) -> list[SimplexOrbit]:
    """Orbits of ``p``-simplices with their stabilizers and aligning elements."""
    if p < 0 or p > X.dim:
        return []
    return list(X.orbits[p])


def require_valid(X: GSimplicialComplex, exc=InvalidComplex) -> None:
    rep = validate(X)
    if not rep.ok:
        raise exc("; ".join(rep.failures[:5]))


def close(seeds: Iterable[Sequence[int]], vertex_set: FiniteGSet,
          name: str = "", vertices: Iterable[int] | None = None) -> GSimplicialComplex:
    """Smallest complex containing ``seeds``, closed under faces and the action.

    Vertices are registered first (index order), then each seed followed by
    its faces.  A newly met orbit takes the first-met member as representative
    with its listed order; translates receive the transported order.
    """
    G = vertex_set.group
    act = vertex_set.act
    order: dict[Simplex, tuple[int, ...]] = {}
    reg: list[Simplex] = []

    def register(seq):
        for g in G.elements:
            t = tuple(act[g][v] for v in seq)
            key = Simplex(t)
            if key not in order:
                order[key] = t
                reg.append(key)

    def process(seq):
        if Simplex(seq) in order:
            return
        register(seq)
        if len(seq) > 1:
            for k in range(len(seq)):
                process(seq[:k] + seq[k + 1:])

    seeds = [tuple(int(v) for v in s) for s in seeds]
    verts = set(vertex_set.points) if vertices is None else set(vertices)
    for s in seeds:
        for v in s:
            if v not in verts:
                raise InvalidComplex(f"seed {s} uses a vertex outside the vertex set")
    for v in sorted(verts):
        process((v,))
    for s in seeds:
        if len(set(s)) != len(s):
            raise InvalidComplex(f"seed {s} repeats a vertex")
        process(s)
    return GSimplicialComplex(vertex_set, [order[s] for s in reg], vertices=verts, name=name)


# -- pairs and maps ---------------------------------------------------------------

class SubcomplexPair:
    """``(X, A)`` with ``A`` a G-stable subcomplex of ``X`` given by its simplices."""

    def __init__(self, total: GSimplicialComplex, sub: Iterable[Iterable[int]] = ()):
        self.total = total
        self.sub = frozenset(Simplex(s) for s in sub)
        G = total.group
        for s in self.sub:
            if s not in total.order:
                raise InvalidComplex(f"subcomplex simplex {sorted(s)} is not in the complex")
            if len(s) > 1:
                for v in s:
                    if s - {v} not in self.sub:
                        raise InvalidComplex(
                            f"subcomplex is not closed under faces at {total.label(s)}")
            for g in G.elements:
                if total.translate(g, s) not in self.sub:
                    raise InvalidComplex(f"subcomplex is not G-stable at {total.label(s)}")

    @classmethod
    def absolute(cls, X: GSimplicialComplex) -> "SubcomplexPair":
        return cls(X, ())

    def sub_complex(self) -> GSimplicialComplex:
        return self.total.restrict(self.sub)

    def relative_orbits(self, p: int) -> list[SimplexOrbit]:
        if p < 0 or p >= len(self.total.orbits):
            return []
        return [o for o in self.total.orbits[p] if o.representative not in self.sub]

    @property
    def dim(self) -> int:
        return self.total.dim


def skeleton_pair(X: GSimplicialComplex, A: Iterable[Iterable[int]], p: int) -> SubcomplexPair:
    """``(X_p, A)`` with ``X_p`` the ``p``-skeleton of ``X`` together with ``A``."""
    A = frozenset(Simplex(s) for s in A)
    keep = [s for s in X.registration if len(s) - 1 <= p or s in A]
    return SubcomplexPair(X.restrict(keep), A)


@dataclass(frozen=True)
class EquivariantSimplicialMap:
    source: GSimplicialComplex
    target: GSimplicialComplex
    vertex_map: tuple[int, ...]

    def __post_init__(self):
        S, T = self.source, self.target
        if S.group is not T.group:
            raise NotEquivariant("source and target complexes use different groups")
        G = S.group
        f = self.vertex_map
        for v in S.vertices:
            if f[v] not in T.vertices:
                raise NotEquivariant(f"vertex {v} is sent outside the target vertex set")
            for g in G.elements:
                if f[S.vertex_set.act[g][v]] != T.vertex_set.act[g][f[v]]:
                    raise NotEquivariant(f"f(g v) != g f(v) at g = {G.label(g)}, v = {v}")
        for s in S.registration:
            if self.image(s) not in T.order:
                raise NotEquivariant(f"image of {S.label(s)} is not a simplex of the target")

    def image(self, s: Iterable[int]) -> Simplex:
        return Simplex(self.vertex_map[v] for v in s)

    def is_degenerate(self, s: Simplex) -> bool:
        return len(self.image(s)) < len(s)


def inclusion(sub: GSimplicialComplex, total: GSimplicialComplex) -> EquivariantSimplicialMap:
    return EquivariantSimplicialMap(sub, total, tuple(range(sub.vertex_set.size)))


# -- constructions --------------------------------------------------------------

@dataclass(frozen=True)
class QuotientCellComplex:
    """Orbit space ``X/G`` as a complex of cells with incidence signs.

    Cell ``i`` in dimension ``p`` is the ``i``-th simplex orbit of ``X``; its
    vertices are the orbits of the representative's vertices in preferred
    order.  Two cells may share a vertex set (the antipodal octahedron has two
    edges over every pair of vertex orbits), so faces are stored explicitly.
    """

    vertex_labels: tuple[str, ...]
    cells: tuple[tuple[tuple[int, ...], ...], ...]
    faces: tuple[tuple[tuple[tuple[int, int], ...], ...], ...]
    sub: frozenset = frozenset()  # (p, i) of cells lying in the subcomplex

    @property
    def dim(self) -> int:
        return len(self.cells) - 1

    def is_simplicial(self) -> bool:
        return all(len({frozenset(c) for c in level}) == len(level) for level in self.cells)

    def chain_complex(self, relative: bool = True):
        """Cellular chains, relative to ``sub`` unless ``relative`` is false."""
        from ghom.abelian import ChainComplex, IntMatrix

        keep = [[i for i in range(len(level)) if not (relative and (p, i) in self.sub)]
                for p, level in enumerate(self.cells)]
        pos = [{i: j for j, i in enumerate(k)} for k in keep]
        bd = {}
        for p in range(1, len(self.cells)):
            rows = [[0] * len(keep[p]) for _ in keep[p - 1]]
            for col, i in enumerate(keep[p]):
                for f, sign in self.faces[p][i]:
                    if f in pos[p - 1]:
                        rows[pos[p - 1][f]][col] += sign
            bd[p] = IntMatrix(rows, len(keep[p - 1]), len(keep[p]))
        return ChainComplex([len(k) for k in keep], bd)


def quotient_complex(X: GSimplicialComplex, A: Iterable[Iterable[int]] = ()
                     ) -> QuotientCellComplex:
    """Orbit complex ``X/G`` with the orientation of each orbit representative.

    Requires the orbit map to be injective on the vertices of every simplex.
    """
    Vs = X.vertex_set
    vorbit: dict[int, int] = {}
    vlabels = []
    for orb in X.orbits[0] if X.orbits else []:
        (v,) = tuple(orb.representative)
        vlabels.append(Vs.label(v))
        for t, _ in orb.members:
            (w,) = tuple(t)
            vorbit[w] = len(vlabels) - 1
    index = {}
    cells = []
    for p, level in enumerate(X.orbits):
        row = []
        for i, orb in enumerate(level):
            s = orb.representative
            img = tuple(vorbit[v] for v in X.order[s])
            if len(set(img)) != len(img):
                raise NotRegular(f"orbit map is not injective on the vertices of {X.label(s)}")
            row.append(img)
            index[s] = i
        cells.append(tuple(row))
    faces = [()]
    for p in range(1, len(X.orbits)):
        level = []
        for orb in X.orbits[p]:
            s = orb.representative
            fs = []
            for k in range(p + 1):
                tp = X.face(s, k)
                face_orbit = X.orbit_of(tp)
                h = X.aligning_element(tp)
                moved = tuple(Vs.act[h][v] for v in tp)
                eps = permutation_sign(moved, X.order[face_orbit.representative])
                fs.append((index[face_orbit.representative], (-1) ** k * eps))
            level.append(tuple(fs))
        faces.append(tuple(level))
    sub = frozenset((len(a) - 1, index[X.orbit_of(a).representative])
                    for a in (Simplex(a) for a in A))
    return QuotientCellComplex(tuple(vlabels), tuple(cells), tuple(faces), sub)


def forget_action(X: GSimplicialComplex) -> GSimplicialComplex:
    """Underlying complex with the trivial group and the same orders."""
    Vs = X.vertex_set
    return GSimplicialComplex(trivial_gset(Vs.size, labels=Vs.point_labels),
                              [X.order[s] for s in X.registration], vertices=X.vertices,
                              name=X.name)


def orbit_point(G: FiniteGroup, H: Subgroup) -> GSimplicialComplex:
    """``G/H`` as a 0-dimensional complex."""
    Vs = FiniteGSet.cosets(H)
    return GSimplicialComplex(Vs, [(i,) for i in Vs.points], name=f"G/{H}")


def cone(X: GSimplicialComplex, apex: str = "apex") -> GSimplicialComplex:
    """Join with a new G-fixed vertex placed last in every cone simplex."""
    Vs = X.vertex_set
    m = Vs.size
    act = tuple(row + (m,) for row in Vs.act)
    labels = (Vs.point_labels or tuple(str(i) for i in range(m))) + (apex,)
    CV = FiniteGSet(X.group, act, labels)
    verts = [X.order[s] for s in X.registration if len(s) == 1]
    higher = [X.order[s] for s in X.registration if len(s) > 1]
    cones = [X.order[s] + (m,) for s in X.registration]
    return GSimplicialComplex(CV, verts + [(m,)] + higher + cones,
                              vertices=set(X.vertices) | {m}, name=f"cone({X.name})")


def disjoint_union(X1: GSimplicialComplex, X2: GSimplicialComplex) -> GSimplicialComplex:
    if X1.group is not X2.group:
        raise InvalidComplex("disjoint union needs complexes over the same group")
    V1, V2 = X1.vertex_set, X2.vertex_set
    m = V1.size
    act = tuple(r1 + tuple(x + m for x in r2) for r1, r2 in zip(V1.act, V2.act))
    l1 = V1.point_labels or tuple(str(i) for i in range(m))
    l2 = V2.point_labels or tuple(str(i) for i in range(V2.size))
    V = FiniteGSet(X1.group, act, tuple(f"{x}.1" for x in l1) + tuple(f"{x}.2" for x in l2))
    s1 = [X1.order[s] for s in X1.registration]
    s2 = [tuple(v + m for v in X2.order[s]) for s in X2.registration]
    verts = set(X1.vertices) | {v + m for v in X2.vertices}
    return GSimplicialComplex(V, s1 + s2, vertices=verts, name=f"{X1.name}+{X2.name}")


def balanced_product(H: Subgroup, Y: GSimplicialComplex,
                     embedding: Sequence[int] | None = None) -> GSimplicialComplex:
    """``G x_H Y`` for an H-complex ``Y``.

    ``Y`` is a complex over some group ``K`` and ``embedding[k]`` is the image
    of ``k`` in ``G``; the embedding must be an injective homomorphism onto
    ``H``.  If ``Y`` is already a complex over ``G`` its action is restricted
    to ``H``.
    """
    G = H.group
    K = Y.group
    if embedding is None:
        if K is G:
            embedding = None
        elif K.order == 1 and H.order == 1:
            embedding = (0,)
        else:
            raise InvalidHComplex("an embedding of the complex's group onto H is required")
    if embedding is not None:
        emb = tuple(embedding)
        if len(emb) != K.order or sorted(emb) != list(H.members):
            raise InvalidHComplex("embedding is not a bijection onto H")
        for a in K.elements:
            for b in K.elements:
                if emb[K.mul(a, b)] != G.mul(emb[a], emb[b]):
                    raise InvalidHComplex("embedding is not a homomorphism")
        pullback = {g: k for k, g in enumerate(emb)}
        y_act = {h: Y.vertex_set.act[pullback[h]] for h in H.members}
    else:
        y_act = {h: Y.vertex_set.act[h] for h in H.members}
    # H-complex axioms, checked on the H-action
    for s in Y.registration:
        for h in H.members:
            t = Simplex(y_act[h][v] for v in s)
            if t not in Y.order:
                raise InvalidHComplex(f"H does not preserve the simplices of Y ({Y.label(s)})")
            if t == s and any(y_act[h][v] != v for v in s):
                raise InvalidHComplex(f"{G.label(h)} stabilizes {Y.label(s)} but moves its vertices")
    if not validate_faces(Y):
        raise InvalidHComplex("Y is not closed under faces")
    cs = H.cosets
    reps = cs.representatives
    n = Y.vertex_set.size
    table = []
    for g in G.elements:
        row = []
        for i, a in enumerate(reps):
            ga = G.mul(g, a)
            j = cs.coset_of[ga]
            h = G.mul(G.inv(reps[j]), ga)
            for y in range(n):
                row.append(j * n + y_act[h][y])
        table.append(tuple(row))
    ylabels = Y.vertex_set.point_labels or tuple(str(i) for i in range(n))
    labels = tuple(f"[{G.label(a)},{yl}]" for a in reps for yl in ylabels)
    V = FiniteGSet(G, tuple(table), labels)
    seeds = [tuple(v for v in Y.order[s]) for s in Y.registration]
    verts = {j * n + y for j in range(len(reps)) for y in Y.vertices}
    return close(seeds, V, name=f"G x_H {Y.name}", vertices=verts)


def validate_faces(Y: GSimplicialComplex) -> bool:
    return all(s - {v} in Y.order for s in Y.registration if len(s) > 1 for v in s)


def complex_from_orbit_reps(vertex_set: FiniteGSet, seeds: Iterable[Sequence[int]],
                            name: str = "") -> GSimplicialComplex:
    return close(seeds, vertex_set, name=name)
