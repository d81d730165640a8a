"""Edge / quad-diagonal / hex-diagonal bookkeeping for partial meshes.

Each vertex pair touched by the mesh carries one of three relation types.
A hexahedron may join the mesh exactly when the relations stay disjoint,
new quads share no diagonal with a different quad, and no interior
diagonal is reused.
"""

from __future__ import annotations

from .complex import (
    HEX_EDGES,
    HEX_FACES,
    HEX_INTERIOR_DIAGONALS,
    Hexahedron,
    as_corners,
    pair_key,
    quad_key,
)
from .errors import IncompatibleHex, NonLifoUndo

EDGE, QDIAG, HDIAG = 1, 2, 3


def _hex_pairs(c):
    """Packed pairs of a hex: 12 edges, 6 diagonal pairs, 4 interior diagonals."""
    edges = [pair_key(c[a], c[b]) for a, b in HEX_EDGES]
    diags = []
    for f in HEX_FACES:
        d1 = pair_key(c[f[0]], c[f[2]])
        d2 = pair_key(c[f[1]], c[f[3]])
        diags.append((d1, d2))
    inner = [pair_key(c[a], c[b]) for a, b in HEX_INTERIOR_DIAGONALS]
    return edges, diags, inner


class PartialMesh:
    """Hexahedra plus the relations E, D_Q and D_H, with LIFO undo.

    ``rel`` maps a packed vertex pair to ``[type, count, partner]``.  For
    edges ``count`` is the number of hexes containing the edge.  For quad
    diagonals ``count`` is the number of hexes containing the quad and
    ``partner`` is the other diagonal of the same quad, which identifies it.
    """

    def __init__(self, hexes=()):
        self.hexes: list[tuple[int, ...]] = []
        self.rel: dict[int, list[int]] = {}
        self.quads: dict[tuple, int] = {}
        self._log: list[list] = []
        for h in hexes:
            self.add_hex(h)

    # -- relation views ------------------------------------------------------

    def _of_type(self, t):
        return {k for k, v in self.rel.items() if v[0] == t}

    @property
    def E(self) -> set:
        return self._of_type(EDGE)

    @property
    def D_Q(self) -> dict:
        return {k: v[2] for k, v in self.rel.items() if v[0] == QDIAG}

    @property
    def D_H(self) -> set:
        return self._of_type(HDIAG)

    def __len__(self) -> int:
        return len(self.hexes)

    def snapshot(self):
        return (
            tuple(self.hexes),
            tuple(sorted((k, tuple(v)) for k, v in self.rel.items())),
            tuple(sorted(self.quads.items())),
        )

    # -- compatibility -------------------------------------------------------

    def is_compatible(self, h) -> bool:
        c = as_corners(h)
        if len(set(c)) != 8:
            return False
        rel = self.rel
        edges, diags, inner = _hex_pairs(c)
        for k in edges:
            r = rel.get(k)
            if r is not None and r[0] != EDGE:
                return False
        for d1, d2 in diags:
            r1 = rel.get(d1)
            r2 = rel.get(d2)
            if r1 is None and r2 is None:
                continue
            # a diagonal in use is fine only for the very same quad, once
            if r1 is None or r2 is None:
                return False
            if r1[0] != QDIAG or r2[0] != QDIAG or r1[2] != d2 or r1[1] >= 2:
                return False
        for k in inner:
            if k in rel:
                return False
        return True

    def add_hex(self, h) -> int:
        c = as_corners(h)
        if len(set(c)) != 8:
            raise IncompatibleHex(f"hexahedron {c} has repeated vertices")
        if not self.is_compatible(c):
            raise IncompatibleHex(f"hexahedron {c} is not compatible with the mesh")
        rel = self.rel
        changes: list = []
        edges, diags, inner = _hex_pairs(c)
        for k in edges:
            r = rel.get(k)
            if r is None:
                rel[k] = [EDGE, 1, 0]
                changes.append((k, None))
            else:
                r[1] += 1
                changes.append((k, 1))
        for d1, d2 in diags:
            for a, b in ((d1, d2), (d2, d1)):
                r = rel.get(a)
                if r is None:
                    rel[a] = [QDIAG, 1, b]
                    changes.append((a, None))
                else:
                    r[1] += 1
                    changes.append((a, 1))
        for k in inner:
            rel[k] = [HDIAG, 1, 0]
            changes.append((k, None))
        for f in HEX_FACES:
            qk = quad_key([c[i] for i in f])
            self.quads[qk] = self.quads.get(qk, 0) + 1
        self.hexes.append(c)
        self._log.append(changes)
        return len(self._log)

    def undo(self, token: int) -> None:
        if token != len(self._log) or token == 0:
            raise NonLifoUndo(f"token {token} is not the most recent edit")
        changes = self._log.pop()
        c = self.hexes.pop()
        rel = self.rel
        for k, prev in reversed(changes):
            if prev is None:
                del rel[k]
            else:
                rel[k][1] -= 1
        for f in HEX_FACES:
            qk = quad_key([c[i] for i in f])
            n = self.quads[qk] - 1
            if n:
                self.quads[qk] = n
            else:
                del self.quads[qk]

    def pop(self) -> None:
        self.undo(len(self._log))

    def hexahedra(self) -> list[Hexahedron]:
        return [Hexahedron(c) for c in self.hexes]


def is_compatible(M: PartialMesh, h) -> bool:
    return M.is_compatible(h)


def add_hex(M: PartialMesh, h) -> int:
    return M.add_hex(h)


def undo(M: PartialMesh, token: int) -> None:
    M.undo(token)
