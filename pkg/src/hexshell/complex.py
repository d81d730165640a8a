"""Combinatorial quadrangulations of the sphere and hexahedra.

Hexahedron corners use the XOR labeling: corner ``i`` is adjacent to corners
``i ^ 1``, ``i ^ 2`` and ``i ^ 4``; corner ``i`` and ``7 - i`` are the ends of
an interior diagonal.  Face ``f = 2 * b + s`` is the set of corners whose bit
``b`` equals ``s``.
"""

from __future__ import annotations

import os
from collections import deque
from typing import Iterable, Sequence

from .errors import (
    DegenerateQuad,
    NonManifoldEdge,
    NotASphere,
    NotOrientable,
    OverSharedFace,
)

DEBUG = bool(os.environ.get("HEXSHELL_DEBUG"))

PAIR_STRIDE = 1 << 21


def pair_key(u: int, v: int) -> int:
    """Pack an unordered vertex pair into one integer."""
    if u < v:
        return u * PAIR_STRIDE + v
    return v * PAIR_STRIDE + u


def unpack_pair(k: int) -> tuple[int, int]:
    return divmod(k, PAIR_STRIDE)


def quad_key(q: Sequence[int]) -> tuple[int, int, int, int]:
    """Canonical form of a quad cycle, equal for all rotations and reflections."""
    a, b, c, d = q
    m = min(a, b, c, d)
    if m == a:
        return (a, b, c, d) if b < d else (a, d, c, b)
    if m == b:
        return (b, c, d, a) if c < a else (b, a, d, c)
    if m == c:
        return (c, d, a, b) if d < b else (c, b, a, d)
    return (d, a, b, c) if a < c else (d, c, b, a)


def quad_diagonals(q: Sequence[int]) -> tuple[tuple[int, int], tuple[int, int]]:
    a, b, c, d = q
    return (min(a, c), max(a, c)), (min(b, d), max(b, d))


def _face_cycle(f: int) -> tuple[int, int, int, int]:
    b, s = divmod(f, 2)
    p, q = [k for k in range(3) if k != b]
    base = s << b
    return (base, base | 1 << p, base | 1 << p | 1 << q, base | 1 << q)


HEX_FACES: tuple[tuple[int, int, int, int], ...] = tuple(_face_cycle(f) for f in range(6))
HEX_EDGES: tuple[tuple[int, int], ...] = tuple(
    (c, c ^ k) for c in range(8) for k in (1, 2, 4) if c < c ^ k
)
HEX_FACE_DIAGONALS: tuple[tuple[int, int], ...] = tuple(
    d for f in HEX_FACES for d in ((f[0], f[2]), (f[1], f[3]))
)
HEX_INTERIOR_DIAGONALS: tuple[tuple[int, int], ...] = tuple((c, 7 - c) for c in range(4))
OPPOSITE_FACE = (1, 0, 3, 2, 5, 4)


def _cube_symmetries() -> tuple[tuple[int, ...], ...]:
    perms = []
    for bits in ((0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)):
        for flip in range(8):
            perm = []
            for c in range(8):
                x = c ^ flip
                perm.append(sum(((x >> k) & 1) << bits[k] for k in range(3)))
            perms.append(tuple(perm))
    return tuple(perms)


CUBE_SYMMETRIES = _cube_symmetries()


def hex_key(corners: Sequence[int]) -> tuple[int, ...]:
    """Canonical 8-tuple of a hexahedron, equal for all 48 cube relabelings.

    The smallest vertex goes to corner 0 and its neighbours, sorted, to corners
    1, 2 and 4.
    """
    i0 = min(range(8), key=corners.__getitem__)
    nb = sorted((corners[i0 ^ k], k) for k in (1, 2, 4))
    b0, b1, b2 = nb[0][1], nb[1][1], nb[2][1]
    out = []
    for j in range(8):
        x = i0
        if j & 1:
            x ^= b0
        if j & 2:
            x ^= b1
        if j & 4:
            x ^= b2
        out.append(corners[x])
    return tuple(out)


class Hexahedron:
    """Eight distinct vertex ids in XOR corner order.

    Two hexahedra compare equal when one is a cube relabeling of the other.
    """

    __slots__ = ("corners", "_key")

    def __init__(self, corners: Iterable[int]):
        c = tuple(int(v) for v in corners)
        if len(c) != 8 or len(set(c)) != 8:
            raise DegenerateQuad(f"a hexahedron needs 8 distinct vertices, got {c}")
        self.corners = c
        self._key = hex_key(c)

    @property
    def key(self) -> tuple[int, ...]:
        return self._key

    def __eq__(self, other):
        if isinstance(other, Hexahedron):
            return self._key == other._key
        return NotImplemented

    def __hash__(self):
        return hash(self._key)

    def __iter__(self):
        return iter(self.corners)

    def __getitem__(self, i):
        return self.corners[i]

    def __len__(self):
        return 8

    def __repr__(self):
        return f"Hexahedron({self.corners})"

    def faces(self) -> list[tuple[int, int, int, int]]:
        return hex_faces(self.corners)


def as_corners(h) -> tuple[int, ...]:
    if isinstance(h, Hexahedron):
        return h.corners
    return tuple(h)


def hex_faces(c: Sequence[int]) -> list[tuple[int, int, int, int]]:
    return [(c[a], c[b], c[d], c[e]) for a, b, d, e in HEX_FACES]


def hex_elements(h):
    """Faces, edges, face diagonals and interior diagonals of a hexahedron.

    Pairs are returned sorted so that the three pair lists can be compared as
    sets.
    """
    c = as_corners(h)

    def pair(i, j):
        u, v = c[i], c[j]
        return (u, v) if u < v else (v, u)

    faces = hex_faces(c)
    edges = [pair(i, j) for i, j in HEX_EDGES]
    diagonals = [pair(i, j) for i, j in HEX_FACE_DIAGONALS]
    interior = [pair(i, j) for i, j in HEX_INTERIOR_DIAGONALS]
    return faces, edges, diagonals, interior


def boundary_of(hexes: Iterable) -> list[tuple[int, int, int, int]]:
    """Faces that belong to exactly one of the given hexahedra.

    Raises :class:`OverSharedFace` if some face lies in three or more hexes.
    """
    count: dict[tuple, int] = {}
    first: dict[tuple, tuple] = {}
    order: list[tuple] = []
    for h in hexes:
        for f in hex_faces(as_corners(h)):
            k = quad_key(f)
            n = count.get(k, 0) + 1
            if n >= 3:
                raise OverSharedFace(f"face {k} is shared by three or more hexahedra")
            count[k] = n
            if n == 1:
                first[k] = f
                order.append(k)
    return [first[k] for k in order if count[k] == 1]


class Quadrangulation:
    """A closed quad surface with edge and vertex incidence indices.

    ``quads`` keeps the cycles exactly as given.  ``edge_index`` maps a packed
    vertex pair (see :func:`pair_key`) to the indices of the two quads
    containing that edge and ``vertex_quads`` maps a vertex to its quads.
    ``labels``, when set, maps each internal vertex id back to the id used by
    the original input.
    """

    __slots__ = ("quads", "edge_index", "vertex_quads", "labels", "_keys")

    def __init__(self, quads: Iterable[Sequence[int]], *, validate: bool = True, labels=None):
        self.quads = tuple(tuple(int(v) for v in q) for q in quads)
        self.labels = tuple(labels) if labels is not None else None
        self._keys = None
        edge_index: dict[int, list[int]] = {}
        vertex_quads: dict[int, list[int]] = {}
        for i, q in enumerate(self.quads):
            if validate and (len(q) != 4 or len(set(q)) != 4):
                raise DegenerateQuad(f"quad {i} {q} does not have four distinct corners")
            for j in range(4):
                u, v = q[j], q[(j + 1) & 3]
                edge_index.setdefault(pair_key(u, v), []).append(i)
                vertex_quads.setdefault(u, []).append(i)
        self.edge_index = edge_index
        self.vertex_quads = vertex_quads
        if validate or DEBUG:
            self._validate()

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self.quads)

    def __iter__(self):
        return iter(self.quads)

    def __repr__(self):
        return f"Quadrangulation(F={len(self.quads)}, V={self.n_vertices})"

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_quads)

    @property
    def n_edges(self) -> int:
        return len(self.edge_index)

    @property
    def vertices(self) -> list[int]:
        return sorted(self.vertex_quads)

    def quad_keys(self) -> frozenset:
        if self._keys is None:
            self._keys = frozenset(quad_key(q) for q in self.quads)
        return self._keys

    def valence(self, v: int) -> int:
        # every vertex of a valid quad sphere has as many edges as quads
        return len(self.vertex_quads[v])

    def neighbors(self, v: int) -> list[int]:
        out = set()
        for i in self.vertex_quads[v]:
            q = self.quads[i]
            j = q.index(v)
            out.add(q[(j + 1) & 3])
            out.add(q[(j + 3) & 3])
        return sorted(out)

    def has_edge(self, u: int, v: int) -> bool:
        return pair_key(u, v) in self.edge_index

    def edges(self) -> list[tuple[int, int]]:
        return sorted(divmod(k, PAIR_STRIDE) for k in self.edge_index)

    def same_quads(self, other) -> bool:
        other_keys = other.quad_keys() if isinstance(other, Quadrangulation) else frozenset(
            quad_key(q) for q in other
        )
        return self.quad_keys() == other_keys

    def original(self, v: int) -> int:
        return self.labels[v] if self.labels is not None else v

    def oriented(self) -> "Quadrangulation":
        """Copy whose quads are consistently oriented, starting from quad 0."""
        quads = _orient(self.quads, self.edge_index)
        if quads is None:
            raise NotOrientable("no consistent orientation exists")
        return Quadrangulation(quads, validate=False, labels=self.labels)

    # -- validation --------------------------------------------------------

    def _validate(self) -> None:
        quads = self.quads
        if not quads:
            raise NotASphere("empty quadrangulation")
        seen = set()
        for i, q in enumerate(quads):
            k = quad_key(q)
            if k in seen:
                raise DegenerateQuad(f"quad {q} appears twice")
            seen.add(k)
        for k, qs in self.edge_index.items():
            if len(qs) != 2:
                u, v = divmod(k, PAIR_STRIDE)
                raise NonManifoldEdge(f"edge ({u}, {v}) lies in {len(qs)} quads")
        # each vertex link must be a single cycle
        for v, qs in self.vertex_quads.items():
            nbr_pairs = []
            for i in qs:
                q = quads[i]
                j = q.index(v)
                nbr_pairs.append((q[(j + 1) & 3], q[(j + 3) & 3]))
            adj: dict[int, list[int]] = {}
            for a, b in nbr_pairs:
                adj.setdefault(a, []).append(b)
                adj.setdefault(b, []).append(a)
            start = nbr_pairs[0][0]
            stack, reached = [start], {start}
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y not in reached:
                        reached.add(y)
                        stack.append(y)
            if len(reached) != len(adj):
                raise NotASphere(f"vertex {v} is pinched (its link is not one cycle)")
        # connectivity
        reached = {0}
        queue = deque([0])
        while queue:
            i = queue.popleft()
            q = quads[i]
            for j in range(4):
                for o in self.edge_index[pair_key(q[j], q[(j + 1) & 3])]:
                    if o not in reached:
                        reached.add(o)
                        queue.append(o)
        if len(reached) != len(quads):
            raise NotASphere("surface is disconnected")
        if _orient(quads, self.edge_index) is None:
            raise NotOrientable("no consistent orientation exists")
        chi = self.n_vertices - self.n_edges + len(quads)
        if chi != 2:
            raise NotASphere(f"Euler characteristic is {chi}, expected 2")


def _orient(quads, edge_index):
    """Reorient quads so that every edge is traversed once in each direction."""
    n = len(quads)
    out: list = [None] * n
    out[0] = quads[0]
    queue = deque([0])
    while queue:
        i = queue.popleft()
        q = out[i]
        for j in range(4):
            u, v = q[j], q[(j + 1) & 3]
            for o in edge_index[pair_key(u, v)]:
                if o == i:
                    continue
                p = quads[o]
                forward = any(p[t] == u and p[(t + 1) & 3] == v for t in range(4))
                cand = tuple(reversed(p)) if forward else p
                if out[o] is None:
                    out[o] = cand
                    queue.append(o)
                elif out[o] != cand:
                    return None
    if any(q is None for q in out):
        return None
    return tuple(out)


def build_quadrangulation(quads: Iterable[Sequence[int]]) -> Quadrangulation:
    """Validate user quads and compact their vertex ids to ``0..V-1``.

    The compacted ids follow the sorted order of the input ids; the returned
    quadrangulation's ``labels`` gives the input id of each compact id.
    Quads keep the input orientation when it is consistent and are otherwise
    reoriented starting from the first quad.
    """
    raw = [tuple(int(v) for v in q) for q in quads]
    if not raw:
        raise NotASphere("empty quadrangulation")
    for q in raw:
        if len(q) != 4:
            raise DegenerateQuad(f"quad {q} does not have four corners")
        if min(q) < 0:
            raise DegenerateQuad(f"quad {q} has a negative vertex id")
    ids = sorted({v for q in raw for v in q})
    index = {v: i for i, v in enumerate(ids)}
    compact = [tuple(index[v] for v in q) for q in raw]
    Q = Quadrangulation(compact, validate=True, labels=ids)
    oriented = _orient(Q.quads, Q.edge_index)
    if oriented != Q.quads:
        Q = Quadrangulation(oriented, validate=False, labels=ids)
    return Q


def relabel_to_original(Q: Quadrangulation, quads) -> list[tuple[int, ...]]:
    return [tuple(Q.original(v) for v in q) for q in quads]


CUBE_QUADS: tuple[tuple[int, int, int, int], ...] = HEX_FACES


def cube_boundary() -> Quadrangulation:
    """Boundary of the hexahedron with corners ``0..7``."""
    return build_quadrangulation(HEX_FACES)
