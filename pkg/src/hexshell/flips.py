"""Quad flips: the six ways a hexahedron can be glued onto a cavity boundary.

A flip removes a disk ``P`` of boundary quads that matches a set of faces of
a cube and replaces it by the complementary faces ``P'``.  The six patterns
are the six classes of disks on the cube boundary.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .complex import (
    CUBE_SYMMETRIES,
    HEX_FACES,
    Hexahedron,
    Quadrangulation,
    pair_key,
    quad_key,
)
from .errors import WouldCreateNonSimpleBoundary

KINDS = ("D1", "D2", "D3C", "D3S", "D4", "D5")
KIND_INDEX = {k: i for i, k in enumerate(KINDS)}

# removed faces of the canonical representative of each pattern
_REMOVED = {
    "D1": (5,),
    "D2": (3, 5),
    "D3C": (1, 3, 5),
    "D3S": (3, 4, 5),
    "D4": (0, 1, 3, 5),
    "D5": (0, 1, 2, 3, 5),
}
N_FRESH = {"D1": 4, "D2": 2, "D3C": 1, "D3S": 0, "D4": 0, "D5": 0}
COMPLEMENT = {"D1": "D5", "D2": "D4", "D3C": "D3C", "D3S": "D3S", "D4": "D2", "D5": "D1"}


@dataclass(frozen=True)
class FlipPattern:
    kind: str
    removed_disk: frozenset
    added_disk: frozenset

    @property
    def delta(self) -> int:
        return len(self.added_disk) - len(self.removed_disk)

    @property
    def interior_corners(self) -> tuple[int, ...]:
        """Corners not touched by any added face (they vanish from the boundary)."""
        return tuple(c for c in range(8) if not any(c in HEX_FACES[f] for f in self.added_disk))

    @property
    def fresh_corners(self) -> tuple[int, ...]:
        """Corners not touched by any removed face (they get new vertex ids)."""
        return tuple(c for c in range(8) if not any(c in HEX_FACES[f] for f in self.removed_disk))


PATTERNS = {
    k: FlipPattern(k, frozenset(r), frozenset(set(range(6)) - set(r))) for k, r in _REMOVED.items()
}
_MASK = {k: sum(1 << f for f in _REMOVED[k]) for k in KINDS}
FLIP_MASK = _MASK


# -- disk catalog of the cube boundary --------------------------------------


def is_disk(mask: int) -> bool:
    """True when the cube faces selected by ``mask`` form a closed disk."""
    faces = [f for f in range(6) if mask >> f & 1]
    if not faces or len(faces) == 6:
        return False
    # connectivity through shared edges (faces are adjacent unless opposite)
    reached = {faces[0]}
    stack = [faces[0]]
    while stack:
        f = stack.pop()
        for g in faces:
            if g not in reached and g // 2 != f // 2:
                reached.add(g)
                stack.append(g)
    if len(reached) != len(faces):
        return False
    verts = {c for f in faces for c in HEX_FACES[f]}
    edge_count: dict[tuple, int] = {}
    for f in faces:
        cyc = HEX_FACES[f]
        for i in range(4):
            e = tuple(sorted((cyc[i], cyc[(i + 1) % 4])))
            edge_count[e] = edge_count.get(e, 0) + 1
    if len(verts) - len(edge_count) + len(faces) != 1:
        return False
    bnd = [e for e, n in edge_count.items() if n == 1]
    adj: dict[int, list[int]] = {}
    for a, b in bnd:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    if any(len(v) != 2 for v in adj.values()):
        return False
    start = bnd[0][0]
    seen, stack = {start}, [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == len(adj)


def _face_perm(perm) -> list[int]:
    keys = [frozenset(f) for f in HEX_FACES]
    return [keys.index(frozenset(perm[c] for c in HEX_FACES[f])) for f in range(6)]


def classify_mask(mask: int) -> str:
    """Pattern kind of a disk of cube faces, found through the cube symmetries."""
    for perm in CUBE_SYMMETRIES:
        fp = _face_perm(perm)
        image = sum(1 << fp[f] for f in range(6) if mask >> f & 1)
        for k in KINDS:
            if image == _MASK[k]:
                return k
    raise ValueError(f"face set {mask:06b} is not a disk")


# -- flip sites --------------------------------------------------------------


@dataclass(frozen=True)
class FlipSite:
    """One occurrence of a pattern on a boundary.

    ``embedding[c]`` is the boundary vertex placed at cube corner ``c`` or -1
    for the corners that receive fresh vertices.  ``quads`` holds the sorted
    indices of the removed boundary quads.
    """

    kind: str
    quads: tuple[int, ...]
    embedding: tuple[int, ...]

    @property
    def pattern(self) -> FlipPattern:
        return PATTERNS[self.kind]

    def sort_key(self):
        return (KIND_INDEX[self.kind], self.quads)


def _other(q, v, w):
    """Neighbour of ``v`` in quad ``q`` that is not ``w``."""
    i = q.index(v)
    a, b = q[(i + 1) & 3], q[(i + 3) & 3]
    return b if a == w else a


def _opposite(q, v):
    return q[(q.index(v) + 2) & 3]


def _injective(emb) -> bool:
    vals = [x for x in emb if x >= 0]
    return len(set(vals)) == len(vals)


def iter_sites(Q: Quadrangulation) -> Iterator[FlipSite]:
    """Yield every flip site of ``Q`` (unordered)."""
    quads = Q.quads
    eidx = Q.edge_index
    vq = Q.vertex_quads

    # D1: any quad
    for i, q in enumerate(quads):
        yield FlipSite("D1", (i,), (-1, -1, -1, -1, q[0], q[1], q[3], q[2]))

    # D2 and D4: per edge
    for k, (i, j) in eidx.items():
        if i > j:
            i, j = j, i
        s0, s1 = divmod(k, 1 << 21)
        qa, qb = quads[i], quads[j]
        e4, e5 = _other(qa, s0, s1), _other(qa, s1, s0)
        e2, e3 = _other(qb, s0, s1), _other(qb, s1, s0)
        emb = (-1, -1, e2, e3, e4, e5, s0, s1)
        if _injective(emb):
            yield FlipSite("D2", (i, j), emb)
        if len(vq[s0]) == 3 and len(vq[s1]) == 3:
            k6 = [x for x in vq[s0] if x != i and x != j]
            k7 = [x for x in vq[s1] if x != i and x != j]
            if len(k6) != 1 or len(k7) != 1:
                continue
            q6, q7 = quads[k6[0]], quads[k7[0]]
            if e2 not in q6 or e4 not in q6 or e3 not in q7 or e5 not in q7:
                continue
            emb = (_opposite(q6, s0), _opposite(q7, s1), e2, e3, e4, e5, s0, s1)
            if _injective(emb) and k6[0] != k7[0]:
                yield FlipSite("D4", tuple(sorted((i, j, k6[0], k7[0]))), emb)

    # D3C: valence-3 vertices
    for w, qs in vq.items():
        if len(qs) != 3:
            continue
        nb = {}
        for t in qs:
            q = quads[t]
            p = q.index(w)
            a, b = q[(p + 1) & 3], q[(p + 3) & 3]
            nb[(min(a, b), max(a, b))] = (t, q[(p + 2) & 3])
        ns = sorted({x for pr in nb for x in pr})
        if len(ns) != 3:
            continue
        n0, n1, n2 = ns
        try:
            t5, c4 = nb[(n0, n1)]
            t3, c2 = nb[(n0, n2)]
            t1, c1 = nb[(n1, n2)]
        except KeyError:
            continue
        emb = (-1, c1, c2, n2, c4, n1, n0, w)
        if _injective(emb):
            yield FlipSite("D3C", tuple(sorted((t1, t3, t5))), emb)

    # D3S: middle quad plus the two quads across a pair of opposite edges
    for m, q in enumerate(quads):
        for t in (0, 1):
            ea = (q[t], q[t + 1])
            eb = (q[t + 2], q[(t + 3) & 3])
            oa = _across(eidx, ea, m)
            ob = _across(eidx, eb, m)
            if oa == ob:
                continue
            if oa < ob:
                e5, i5, i4 = ea, oa, ob
            else:
                e5, i5, i4 = eb, ob, oa
            v6, v7 = min(e5), max(e5)
            v2, v3 = _other(q, v6, v7), _other(q, v7, v6)
            q5, q4 = quads[i5], quads[i4]
            v4, v5 = _other(q5, v6, v7), _other(q5, v7, v6)
            v0, v1 = _other(q4, v2, v3), _other(q4, v3, v2)
            emb = (v0, v1, v2, v3, v4, v5, v6, v7)
            if _injective(emb):
                yield FlipSite("D3S", tuple(sorted((m, oa, ob))), emb)

    # D5: a quad whose four corners have valence 3
    for m, q in enumerate(quads):
        if any(len(vq[v]) != 3 for v in q):
            continue
        top = (q[0], q[1], q[3], q[2])  # corners 4, 5, 6, 7
        emb = [-1] * 8
        emb[4], emb[5], emb[6], emb[7] = top
        ok = True
        mset = set(q)
        for c in range(4, 8):
            out = [x for x in Q.neighbors(emb[c]) if x not in mset]
            if len(out) != 1:
                ok = False
                break
            emb[c - 4] = out[0]
        if not ok or not _injective(emb):
            continue
        side = []
        for f in (0, 1, 2, 3):
            cyc = HEX_FACES[f]
            key = quad_key([emb[c] for c in cyc])
            u, v = [emb[c] for c in cyc if c >= 4]
            o = _across(eidx, (u, v), m)
            if quad_key(quads[o]) != key:
                ok = False
                break
            side.append(o)
        if ok:
            yield FlipSite("D5", tuple(sorted([m] + side)), tuple(emb))


def _across(eidx, e, m):
    a, b = eidx[pair_key(e[0], e[1])]
    return b if a == m else a


def enumerate_flips(Q: Quadrangulation) -> list[FlipSite]:
    """All flip sites of ``Q`` in deterministic order (kind, then quad indices)."""
    return sorted(iter_sites(Q), key=FlipSite.sort_key)


# -- applying flips ----------------------------------------------------------


class IdAllocator:
    """Hands out fresh vertex ids counting up from ``start``."""

    __slots__ = ("next",)

    def __init__(self, start: int):
        self.next = int(start)

    def take(self) -> int:
        v = self.next
        self.next += 1
        return v

    def __call__(self) -> int:
        return self.take()


def added_quads(corners, kind: str) -> list[tuple[int, int, int, int]]:
    return [tuple(corners[c] for c in HEX_FACES[f]) for f in sorted(PATTERNS[kind].added_disk)]


def apply_hex(Q: Quadrangulation, corners, removed_mask: int, removed_quads) -> Quadrangulation:
    """Boundary obtained by replacing ``removed_quads`` (the hex faces selected
    by ``removed_mask``) with the remaining faces of the hexahedron.

    Raises :class:`WouldCreateNonSimpleBoundary` when a new boundary edge or
    quad already exists on ``Q``.
    """
    rim = set()
    for f in range(6):
        if removed_mask >> f & 1:
            cyc = HEX_FACES[f]
            for i in range(4):
                rim.add(pair_key(cyc[i], cyc[(i + 1) & 3]))
    eidx = Q.edge_index
    keys = Q.quad_keys()
    new = []
    for f in range(6):
        if removed_mask >> f & 1:
            continue
        cyc = HEX_FACES[f]
        for i in range(4):
            a, b = cyc[i], cyc[(i + 1) & 3]
            if pair_key(a, b) in rim:
                continue
            if pair_key(corners[a], corners[b]) in eidx:
                raise WouldCreateNonSimpleBoundary(
                    f"flip would double edge ({corners[a]}, {corners[b]})"
                )
        nq = tuple(corners[c] for c in cyc)
        if quad_key(nq) in keys:
            raise WouldCreateNonSimpleBoundary(f"flip would double quad {nq}")
        new.append(nq)
    removed = set(removed_quads)
    result = [q for i, q in enumerate(Q.quads) if i not in removed]
    result.extend(new)
    return Quadrangulation(result, validate=False)


def site_corners(site: FlipSite, next_id: int) -> tuple[tuple[int, ...], int]:
    """Corners of the hexahedron of ``site`` with fresh ids from ``next_id``,
    and the next unused id."""
    corners = list(site.embedding)
    for c in range(8):
        if corners[c] < 0:
            corners[c] = next_id
            next_id += 1
    return tuple(corners), next_id


def perform_flip(Q: Quadrangulation, site: FlipSite, alloc) -> tuple[Quadrangulation, Hexahedron]:
    """Apply ``site``; fresh corners get ids from ``alloc`` in corner order."""
    take = alloc.take if hasattr(alloc, "take") else alloc
    corners = list(site.embedding)
    for c in range(8):
        if corners[c] < 0:
            corners[c] = take()
    Q2 = apply_hex(Q, corners, _MASK[site.kind], site.quads)
    return Q2, Hexahedron(corners)


def hex_attachment(Q: Quadrangulation, corners):
    """How hexahedron ``corners`` would attach to the cavity bounded by ``Q``.

    Returns ``(mask, quad indices)`` when gluing it is a quad flip: the faces
    of the hex found on ``Q`` form a disk, the hex meets the boundary in
    exactly the vertices of that disk and the vertices inside the disk touch
    no other boundary quad.  Returns None otherwise.  A hex whose six faces
    are all on ``Q`` closes the cavity and yields mask 63.
    """
    mask = 0
    idx = []
    for f in range(6):
        cyc = HEX_FACES[f]
        a, b = corners[cyc[0]], corners[cyc[1]]
        qs = Q.edge_index.get(pair_key(a, b))
        if not qs:
            continue
        want = frozenset(corners[c] for c in cyc)
        for i in qs:
            if frozenset(Q.quads[i]) == want:
                mask |= 1 << f
                idx.append(i)
                break
    if mask == 63:
        return (63, tuple(sorted(idx))) if len(Q.quads) == 6 else None
    if not mask or not is_disk(mask):
        return None
    vq = Q.vertex_quads
    on_disk = {c for f in range(6) if mask >> f & 1 for c in HEX_FACES[f]}
    for c in range(8):
        v = corners[c]
        if c in on_disk:
            continue
        if v in vq:
            return None
    # corners whose every incident face is removed disappear from the boundary
    count = {}
    for f in range(6):
        if mask >> f & 1:
            for c in HEX_FACES[f]:
                count[c] = count.get(c, 0) + 1
    for c, n in count.items():
        if n == 3 and len(vq[corners[c]]) != 3:
            return None
    return mask, tuple(sorted(idx))


def site_for_removed(Q: Quadrangulation, removed_keys) -> list[FlipSite]:
    """Flip sites whose removed quads are exactly the given quads."""
    want = set(removed_keys)
    out = []
    for s in enumerate_flips(Q):
        if {quad_key(Q.quads[i]) for i in s.quads} == want:
            out.append(s)
    return out


def closing_hex(Q: Quadrangulation):
    """Corners of the hexahedron bounded by ``Q`` if ``Q`` is a cube, else None."""
    if len(Q.quads) != 6 or Q.n_vertices != 8:
        return None
    vq = Q.vertex_quads
    if any(len(qs) != 3 for qs in vq.values()):
        return None
    a, b, c, d = Q.quads[0]
    corners = [a, b, d, c, -1, -1, -1, -1]
    base = set(Q.quads[0])
    for k in range(4):
        out = [x for x in Q.neighbors(corners[k]) if x not in base]
        if len(out) != 1:
            return None
        corners[k + 4] = out[0]
    if len(set(corners)) != 8:
        return None
    keys = Q.quad_keys()
    if any(quad_key([corners[i] for i in f]) not in keys for f in HEX_FACES):
        return None
    return tuple(corners)
