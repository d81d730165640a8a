"""Symmetry breaking by dominance detection.

The explored part of the search tree is kept as a flat sequence: entering a
child appends its hexahedron and a branching marker, leaving it drops
everything after and including the last marker.  Hexahedra followed by a
marker are on the current path; the others root fully explored subtrees.
"""

from __future__ import annotations

from .complex import HEX_EDGES, HEX_FACES, Quadrangulation, as_corners, quad_key
from .errors import UnderflowExit, WouldCreateNonSimpleBoundary
from .flips import apply_hex, hex_attachment
from .iso import VertexMap, complete_cell

BRANCH = None


class NoGoodSequence:
    """Hexahedra interleaved with branching markers (``None``)."""

    __slots__ = ("items", "_marks")

    def __init__(self, no_goods=()):
        self.items: list = []
        self._marks: list[int] = []
        for h in no_goods:
            self.items.append(as_corners(h))

    def record_enter(self, h) -> None:
        self.items.append(as_corners(h))
        self._marks.append(len(self.items))
        self.items.append(BRANCH)

    def record_exit(self) -> None:
        if not self._marks:
            raise UnderflowExit("no branching marker left to remove")
        del self.items[self._marks.pop():]

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def entries(self):
        """Pairs ``(hex, on_path)`` in sequence order."""
        items = self.items
        n = len(items)
        for i, x in enumerate(items):
            if x is not BRANCH:
                yield x, i + 1 < n and items[i + 1] is BRANCH

    def no_goods(self) -> list:
        return [h for h, on_path in self.entries() if not on_path]


def record_enter(S: NoGoodSequence, h) -> None:
    S.record_enter(h)


def record_exit(S: NoGoodSequence) -> None:
    S.record_exit()


def _link(c):
    link = {v: [] for v in c}
    for a, b in HEX_EDGES:
        link[c[a]].append(c[b])
        link[c[b]].append(c[a])
    return link


def _face_index(hexes):
    index: dict[frozenset, list[int]] = {}
    for j, c in enumerate(hexes):
        for f in HEX_FACES:
            index.setdefault(frozenset(c[i] for i in f), []).append(j)
    return index


def match_no_good(S: NoGoodSequence, hexes, sigma: VertexMap, index=None):
    """Indices of the hexes of ``hexes`` forming the image of a no-good, or None.

    ``sigma`` is extended in place while the sequence is scanned.
    """
    hexes = [as_corners(h) for h in hexes]
    if index is None:
        index = _face_index(hexes)
    seen: list[int] = []
    seen_set: set[int] = set()
    fwd = sigma.forward
    for c, on_path in S.entries():
        success = False
        face = None
        for f in HEX_FACES:
            if all(c[i] in fwd for i in f):
                face = f
                break
        if face is not None:
            facet = frozenset(c[i] for i in face)
            image = frozenset(fwd[v] for v in facet)
            la = _link(c)
            for j in index.get(image, ()):
                if j in seen_set:
                    continue
                target = hexes[j]
                undo: list[int] = []
                ok = complete_cell(la, _link(target), facet, sigma, undo)
                if ok:
                    tset = set(target)
                    ok = all(fwd.get(c[a]) in tset for a in range(8)) and _edges_map(c, target, fwd)
                if ok:
                    seen.append(j)
                    seen_set.add(j)
                    success = True
                    break
                for x in undo:
                    sigma.unbind(x)
        if on_path:
            if not success:
                return None
        elif success:
            return seen
    return None


def _edges_map(c, target, fwd) -> bool:
    edges = {frozenset((target[a], target[b])) for a, b in HEX_EDGES}
    return all(frozenset((fwd[c[a]], fwd[c[b]])) in edges for a, b in HEX_EDGES)


def contains_no_good(S: NoGoodSequence, H, sigma: VertexMap) -> bool:
    hexes = H.hexes if hasattr(H, "hexes") else list(H)
    return match_no_good(S, hexes, sigma.copy()) is not None


def cavity_after(Q_target: Quadrangulation, hexes) -> Quadrangulation | None:
    """Boundary of the unmeshed region once ``hexes`` are placed in ``Q_target``."""
    count: dict[tuple, int] = {}
    cycle: dict[tuple, tuple] = {}
    for q in Q_target.quads:
        k = quad_key(q)
        count[k] = 1
        cycle[k] = q
    for h in hexes:
        c = as_corners(h)
        for f in HEX_FACES:
            q = tuple(c[i] for i in f)
            k = quad_key(q)
            count[k] = count.get(k, 0) + 1
            cycle.setdefault(k, q)
    quads = [cycle[k] for k, n in count.items() if n % 2 == 1]
    if not quads:
        return None
    return Quadrangulation(quads, validate=False)


def try_reverse_shell(Q: Quadrangulation | None, H, M: int = 10) -> bool:
    """Look for an order in which flips starting at ``Q`` create all of ``H``.

    At most ``M`` failed orders are explored, so the answer can be a false
    negative but never a false positive.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    rest = [as_corners(h) for h in H]
    tested = [0]

    def rec(Q, rest):
        if not rest:
            return True
        if Q is None:
            return False
        for i, c in enumerate(rest):
            att = hex_attachment(Q, c)
            if att is not None:
                mask, idx = att
                if mask == 63:
                    Q2 = None
                else:
                    try:
                        Q2 = apply_hex(Q, c, mask, idx)
                    except WouldCreateNonSimpleBoundary:
                        Q2 = False
                if Q2 is not False:
                    if rec(Q2, rest[:i] + rest[i + 1:]):
                        return True
                    tested[0] += 1
            if tested[0] >= M:
                return False
        return False

    return rec(Q, rest)


def visited_symmetric_counterpart(S: NoGoodSequence, H, group, Q_target: Quadrangulation, M: int = 10) -> bool:
    """True when the node ``H`` is dominated by an explored no-good."""
    if not S.items:
        return False
    hexes = [as_corners(h) for h in (H.hexes if hasattr(H, "hexes") else H)]
    index = _face_index(hexes)
    for g in group:
        sigma = g.copy()
        m = match_no_good(S, hexes, sigma, index)
        if m is None:
            continue
        mset = set(m)
        surplus = [hexes[j] for j in range(len(hexes)) if j not in mset]
        if not surplus:
            if g.is_identity():
                continue
            return True
        cav = cavity_after(Q_target, [hexes[j] for j in m])
        if try_reverse_shell(cav, surplus, M):
            return True
    return False
