"""Symmetries and isomorphisms of quadrangulations.

One symmetry is computed by fixing the image of a single quad and
propagating the correspondence cell by cell across shared facets; the first
contradiction ends the attempt.  The propagation only needs a cell-adjacency
structure, so it works for quads glued along edges and for hexahedra glued
along quads alike.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass, field
from functools import total_ordering

from .complex import HEX_FACES, Quadrangulation, pair_key

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes, h: int = FNV_OFFSET) -> int:
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & MASK64
    return h


# -- vertex maps ---------------------------------------------------------------


class VertexMap:
    """A partial bijection between vertex ids with its inverse."""

    __slots__ = ("forward", "inverse")

    def __init__(self, forward=None):
        self.forward: dict[int, int] = {}
        self.inverse: dict[int, int] = {}
        if forward:
            items = forward.items() if isinstance(forward, dict) else enumerate(forward)
            for a, b in items:
                if not self.bind(a, b):
                    raise ValueError(f"map is not injective at {a} -> {b}")

    def bind(self, a: int, b: int) -> bool:
        """Add ``a -> b``; False if it contradicts the map."""
        fa = self.forward.get(a)
        if fa is not None:
            return fa == b
        if b in self.inverse:
            return False
        self.forward[a] = b
        self.inverse[b] = a
        return True

    def unbind(self, a: int) -> None:
        b = self.forward.pop(a)
        del self.inverse[b]

    def __call__(self, a: int) -> int:
        return self.forward[a]

    def get(self, a, default=None):
        return self.forward.get(a, default)

    def __contains__(self, a) -> bool:
        return a in self.forward

    def __len__(self) -> int:
        return len(self.forward)

    def __eq__(self, other):
        return isinstance(other, VertexMap) and self.forward == other.forward

    def __hash__(self):
        return hash(tuple(sorted(self.forward.items())))

    def __repr__(self):
        return f"VertexMap({dict(sorted(self.forward.items()))})"

    def copy(self) -> "VertexMap":
        m = VertexMap()
        m.forward = dict(self.forward)
        m.inverse = dict(self.inverse)
        return m

    def invert(self) -> "VertexMap":
        m = VertexMap()
        m.forward = dict(self.inverse)
        m.inverse = dict(self.forward)
        return m

    def compose(self, other: "VertexMap") -> "VertexMap":
        """``self`` after ``other``: x -> self(other(x))."""
        return VertexMap({a: self.forward[b] for a, b in other.forward.items()})

    def is_identity(self) -> bool:
        return all(a == b for a, b in self.forward.items())

    def apply(self, seq):
        return tuple(self.forward[v] for v in seq)


# -- generic propagation -------------------------------------------------------


class CellComplex:
    """Cells given as vertex tuples, glued along facets.

    ``facets[i]`` lists the facets of cell ``i`` as frozensets and
    ``links[i]`` maps each vertex of cell ``i`` to its neighbours inside the
    cell.  Completing a cell from one of its facets relies on every vertex of
    the facet having exactly one neighbour off the facet, which holds for
    quads along edges and hexahedra along quads.
    """

    def __init__(self, cells, facet_cycles, cell_edges):
        self.cells = [tuple(c) for c in cells]
        self.facets = []
        self.links = []
        self.by_facet: dict[frozenset, list[int]] = {}
        for i, c in enumerate(self.cells):
            fs = [frozenset(c[j] for j in fc) for fc in facet_cycles]
            self.facets.append(fs)
            for f in fs:
                self.by_facet.setdefault(f, []).append(i)
            link: dict[int, list[int]] = {v: [] for v in c}
            for a, b in cell_edges:
                link[c[a]].append(c[b])
                link[c[b]].append(c[a])
            self.links.append(link)

    def across(self, i: int, facet: frozenset):
        for j in self.by_facet.get(facet, ()):
            if j != i:
                return j
        return None


QUAD_FACETS = ((0, 1), (1, 2), (2, 3), (3, 0))
QUAD_EDGES = QUAD_FACETS
HEX_EDGE_LIST = tuple((c, c ^ k) for c in range(8) for k in (1, 2, 4) if c < c ^ k)


def quad_complex(Q) -> CellComplex:
    quads = Q.quads if isinstance(Q, Quadrangulation) else Q
    return CellComplex(quads, QUAD_FACETS, QUAD_EDGES)


def hex_complex(hexes) -> CellComplex:
    return CellComplex(hexes, HEX_FACES, HEX_EDGE_LIST)


def complete_cell(la, lb, facet, sigma: VertexMap, undo=None) -> bool:
    """Extend ``sigma`` from a mapped facet to the rest of a cell.

    ``la`` and ``lb`` map each vertex of the source and target cell to its
    neighbours inside that cell.  Each facet vertex has one neighbour off the
    facet; those neighbours must correspond.  New bindings are appended to
    ``undo`` so a caller can roll them back.
    """
    img_facet = {sigma.forward[u] for u in facet}
    for u in facet:
        xs = [x for x in la[u] if x not in facet]
        ys = [y for y in lb[sigma.forward[u]] if y not in img_facet]
        if len(xs) != 1 or len(ys) != 1:
            return False
        x, y = xs[0], ys[0]
        if x in sigma.forward:
            if sigma.forward[x] != y:
                return False
        elif not sigma.bind(x, y):
            return False
        elif undo is not None:
            undo.append(x)
    return True


def extend_through(A: CellComplex, i: int, B: CellComplex, j: int, facet, sigma: VertexMap, undo=None) -> bool:
    """Extend ``sigma`` from ``facet`` of cell ``A.i`` onto cell ``B.j``."""
    return complete_cell(A.links[i], B.links[j], facet, sigma, undo)


def propagate(A: CellComplex, B: CellComplex, i0: int, j0: int, sigma: VertexMap, degree_a=None, degree_b=None) -> bool:
    """Spread ``sigma`` (known on all of cell ``i0``, landing on ``j0``) over
    the connected complex.  Returns False on a contradiction."""
    seen_a = {i0}
    seen_b = {j0}
    pairs = {i0: j0}
    queue = deque([i0])
    while queue:
        i = queue.popleft()
        j = pairs[i]
        for f in A.facets[i]:
            ia = A.across(i, f)
            img = frozenset(sigma.forward[u] for u in f)
            jb = B.across(j, img)
            if (ia is None) != (jb is None):
                return False
            if ia is None:
                continue
            if ia in seen_a:
                if pairs[ia] != jb:
                    return False
                continue
            if jb in seen_b:
                return False
            new = []
            if not extend_through(A, ia, B, jb, f, sigma, new):
                return False
            if degree_a is not None:
                for x in new:
                    if degree_a(x) != degree_b(sigma.forward[x]):
                        return False
            seen_a.add(ia)
            seen_b.add(jb)
            pairs[ia] = jb
            queue.append(ia)
    return True


# -- quadrangulation symmetries ------------------------------------------------


def _placements(q):
    a, b, c, d = q
    return [
        (a, b, c, d), (b, c, d, a), (c, d, a, b), (d, a, b, c),
        (a, d, c, b), (d, c, b, a), (c, b, a, d), (b, a, d, c),
    ]


def _quad_class(Q: Quadrangulation, q):
    vq = Q.vertex_quads
    return min(tuple(len(vq[v]) for v in p) for p in _placements(q))


def _anchor(Q: Quadrangulation):
    counts: dict[tuple, list[int]] = {}
    for i, q in enumerate(Q.quads):
        counts.setdefault(_quad_class(Q, q), []).append(i)
    cls = min(counts, key=lambda k: (len(counts[k]), k))
    return counts[cls][0], cls, counts


def compute_symmetry(Q: Quadrangulation, q0, image, Q2: Quadrangulation | None = None):
    """Map extending ``q0[k] -> image[k]``, or None on contradiction.

    ``q0`` may be a quad index or a cycle of ``Q``; ``image`` must be a placement
    of a quad of ``Q2`` (default ``Q``).
    """
    B = Q if Q2 is None else Q2
    if isinstance(q0, int):
        i0 = q0
        q0 = Q.quads[q0]
    else:
        i0 = _find_quad(Q, q0)
        if i0 is None:
            return None
    j0 = _find_quad(B, image)
    if j0 is None:
        return None
    return _symmetry(Q, B, i0, tuple(q0), tuple(image), j0)


def _find_quad(Q: Quadrangulation, q):
    s = frozenset(q)
    a, b = q[0], q[1]
    for i in Q.edge_index.get(pair_key(a, b), ()):
        if frozenset(Q.quads[i]) == s:
            return i
    return None


def _symmetry(A: Quadrangulation, B: Quadrangulation, i0, q0, image, j0, ca=None, cb=None):
    vqa, vqb = A.vertex_quads, B.vertex_quads
    for u, v in zip(q0, image):
        if len(vqa[u]) != len(vqb[v]):
            return None
    # the image must be a real cycle of quad j0 (rotation or reflection)
    if tuple(image) not in _placements(B.quads[j0]):
        return None
    sigma = VertexMap()
    for u, v in zip(q0, image):
        if not sigma.bind(u, v):
            return None
    ca = ca or quad_complex(A)
    cb = cb or quad_complex(B)
    # align the cell tuples with the chosen placement of the anchor quads
    if not propagate(ca, cb, i0, j0, sigma, lambda x: len(vqa[x]), lambda y: len(vqb[y])):
        return None
    if len(sigma) != A.n_vertices or len(sigma) != B.n_vertices:
        return None
    return sigma


def automorphism_group(Q: Quadrangulation) -> list[VertexMap]:
    """All quad-set-preserving vertex bijections of ``Q``, identity first."""
    i0, cls, classes = _anchor(Q)
    q0 = Q.quads[i0]
    cc = quad_complex(Q)
    out = []
    for j in classes[cls]:
        for p in _placements(Q.quads[j]):
            s = _symmetry(Q, Q, i0, q0, p, j, cc, cc)
            if s is not None:
                out.append(s)
    out.sort(key=lambda s: (not s.is_identity(), tuple(s.forward[v] for v in sorted(s.forward))))
    return out


def are_isomorphic(Q1: Quadrangulation, Q2: Quadrangulation):
    """A bijection taking the quads of ``Q1`` onto those of ``Q2``, or None."""
    if len(Q1.quads) != len(Q2.quads) or Q1.n_vertices != Q2.n_vertices:
        return None
    if signature(Q1) != signature(Q2):
        return None
    i0, cls, _ = _anchor(Q1)
    q0 = Q1.quads[i0]
    ca, cb = quad_complex(Q1), quad_complex(Q2)
    for j, q in enumerate(Q2.quads):
        if _quad_class(Q2, q) != cls:
            continue
        for p in _placements(q):
            s = _symmetry(Q1, Q2, i0, q0, p, j, ca, cb)
            if s is not None:
                return s
    return None


# -- signatures ----------------------------------------------------------------


@total_ordering
@dataclass(frozen=True)
class Signature:
    valence_histogram: tuple
    valence_pair_edge_counts: tuple
    data: bytes = field(repr=False, compare=False, default=b"")

    def to_bytes(self) -> bytes:
        return self.data

    @property
    def hash64(self) -> int:
        return fnv1a64(self.data)

    def __lt__(self, other):
        return self.data < other.data

    @classmethod
    def from_bytes(cls, data: bytes) -> "Signature":
        (n,) = struct.unpack_from("<H", data, 0)
        off = 2
        hist = []
        for _ in range(n):
            hist.append(struct.unpack_from("<HH", data, off))
            off += 4
        (m,) = struct.unpack_from("<H", data, off)
        off += 2
        pairs = []
        for _ in range(m):
            a, b, c = struct.unpack_from("<HHH", data, off)
            pairs.append(((a, b), c))
            off += 6
        return cls(tuple(hist), tuple(pairs), bytes(data))


def signature_from_counts(hist: dict, pairs: dict) -> Signature:
    h = tuple(sorted(hist.items()))
    p = tuple(sorted(pairs.items()))
    parts = [struct.pack("<H", len(h))]
    parts.extend(struct.pack("<HH", v, c) for v, c in h)
    parts.append(struct.pack("<H", len(p)))
    parts.extend(struct.pack("<HHH", a, b, c) for (a, b), c in p)
    return Signature(h, p, b"".join(parts))


def signature(Q: Quadrangulation) -> Signature:
    vq = Q.vertex_quads
    hist: dict[int, int] = {}
    for qs in vq.values():
        hist[len(qs)] = hist.get(len(qs), 0) + 1
    pairs: dict[tuple, int] = {}
    for k in Q.edge_index:
        u, v = divmod(k, 1 << 21)
        a, b = len(vq[u]), len(vq[v])
        key = (a, b) if a <= b else (b, a)
        pairs[key] = pairs.get(key, 0) + 1
    return signature_from_counts(hist, pairs)


# -- canonical form ------------------------------------------------------------


def _bfs_labeling(Q: Quadrangulation, j0: int, start):
    quads = Q.quads
    eidx = Q.edge_index
    label = {}
    for v in start:
        label[v] = len(label)
    seen = {j0}
    order = [tuple(start)]
    queue = deque([tuple(start)])
    while queue:
        a, b, c, d = queue.popleft()
        for u, v in ((a, b), (b, c), (c, d), (d, a)):
            i, k = eidx[pair_key(u, v)]
            if frozenset(quads[i]) == frozenset((a, b, c, d)):
                o = k
            else:
                o = i
            if o in seen:
                continue
            seen.add(o)
            q = quads[o]
            # walk the neighbour in the direction (v, u, x, y)
            p = q.index(v)
            if q[(p + 1) & 3] == u:
                cyc = (v, u, q[(p + 2) & 3], q[(p + 3) & 3])
            else:
                cyc = (v, u, q[(p + 2) & 3], q[(p + 1) & 3])
            for x in cyc[2:]:
                if x not in label:
                    label[x] = len(label)
            order.append(cyc)
            queue.append(cyc)
    return label, order


def _relabeled(order, label):
    # cycles are taken in the traversal orientation so reflections compare fairly
    out = []
    for q in order:
        r = [label[v] for v in q]
        m = r.index(min(r))
        out.append(tuple(r[m:] + r[:m]))
    out.sort()
    return tuple(out)


def canonical_form(Q: Quadrangulation):
    """Canonical quad list and the relabeling (old id -> canonical id).

    Every rarest-class anchor placement seeds a breadth-first relabeling; the
    lexicographically smallest relabeled quad list wins.  Isomorphic inputs
    give identical quad lists.
    """
    _, cls, classes = _anchor(Q)
    vq = Q.vertex_quads
    best = None
    best_label = None
    for j in classes[cls]:
        for p in _placements(Q.quads[j]):
            if tuple(len(vq[v]) for v in p) != cls:
                continue
            label, order = _bfs_labeling(Q, j, p)
            form = _relabeled(order, label)
            if best is None or form < best:
                best, best_label = form, label
    return best, best_label
