"""Slow, independent validation of hexahedral meshes and shellings.

Nothing here uses the incremental relations of :mod:`hexshell.compat`; every
check is a direct pairwise inspection.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

from .complex import HEX_FACES, Quadrangulation, as_corners, quad_key
from .flips import is_disk

R_DISTINCT = "distinct-vertices"
R_INTERSECTION = "intersection"
R_FACE_COUNT = "face-count"
R_BOUNDARY = "boundary"
R_ATTACH = "attachment"
R_PREFIX = "prefix-boundary"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, rule, elements, text):
        self.violations.append((rule, tuple(elements), text))

    def __bool__(self):
        return self.ok


def _faces(c):
    return [frozenset(c[i] for i in f) for f in HEX_FACES]


def _edges(c):
    return [frozenset((c[i], c[i ^ k])) for i in range(8) for k in (1, 2, 4) if i < i ^ k]


def _face_cycles(c):
    return {quad_key([c[i] for i in f]) for f in HEX_FACES}


def is_common_face(a, b) -> bool:
    """True if the shared vertices of two hexes are a face of both, with the
    same cyclic order in each."""
    s = frozenset(a) & frozenset(b)
    n = len(s)
    if n <= 1:
        return True
    if n == 2:
        return s in _edges(a) and s in _edges(b)
    if n == 4:
        common = _face_cycles(a) & _face_cycles(b)
        return any(frozenset(k) == s for k in common)
    return False


def verify_mesh(hexes, Q) -> ValidationReport:
    """Check mesh validity and that its boundary is exactly ``Q``."""
    rep = ValidationReport()
    hs = [tuple(as_corners(h)) for h in hexes]
    for i, c in enumerate(hs):
        if len(c) != 8 or len(set(c)) != 8:
            rep.add(R_DISTINCT, (i,), f"hexahedron {i} does not have 8 distinct vertices")
    for i, j in combinations(range(len(hs)), 2):
        if len(set(hs[i])) == 8 and len(set(hs[j])) == 8 and not is_common_face(hs[i], hs[j]):
            shared = sorted(set(hs[i]) & set(hs[j]))
            rep.add(R_INTERSECTION, (i, j), f"hexahedra {i} and {j} share {shared}, not a face of both")
    count: dict[frozenset, list[int]] = {}
    for i, c in enumerate(hs):
        for f in _faces(c):
            count.setdefault(f, []).append(i)
    for f, owners in count.items():
        if len(owners) > 2:
            rep.add(R_FACE_COUNT, owners, f"quad {sorted(f)} lies in {len(owners)} hexahedra")
    bnd = {f for f, owners in count.items() if len(owners) == 1}
    quads = Q.quads if isinstance(Q, Quadrangulation) else Q
    target = {frozenset(q) for q in quads}
    boundary_cycles = set()
    for c in hs:
        for f in HEX_FACES:
            if frozenset(c[i] for i in f) in bnd:
                boundary_cycles.add(quad_key([c[i] for i in f]))
    target_cycles = {quad_key(q) for q in quads}
    missing = target_cycles - boundary_cycles
    extra = boundary_cycles - target_cycles
    if missing or extra or bnd != target:
        rep.add(
            R_BOUNDARY,
            (),
            f"boundary differs from the target: {len(missing)} missing, {len(extra)} extra quads",
        )
    return rep


def _attachment_ok(c, boundary_keys, boundary_vertices):
    mask = 0
    for f in range(6):
        if quad_key([c[i] for i in HEX_FACES[f]]) in boundary_keys:
            mask |= 1 << f
    if not is_disk(mask):
        return False, mask
    disk_vertices = {c[i] for f in range(6) if mask >> f & 1 for i in HEX_FACES[f]}
    return (set(c) & boundary_vertices) == disk_vertices, mask


def verify_shelling(hexes) -> ValidationReport:
    """Check that each hex meets the union of its predecessors in a disk of
    faces (and nowhere else), keeping every prefix a ball with a sphere
    boundary."""
    rep = ValidationReport()
    hs = [tuple(as_corners(h)) for h in hexes]
    if not hs:
        return rep
    count: dict[tuple, int] = {}
    cycle: dict[tuple, tuple] = {}

    def add(c):
        for f in HEX_FACES:
            q = tuple(c[i] for i in f)
            k = quad_key(q)
            count[k] = count.get(k, 0) + 1
            cycle.setdefault(k, q)

    add(hs[0])
    for k in range(1, len(hs)):
        keys = {q for q, n in count.items() if n == 1}
        verts = {v for q in keys for v in q}
        ok, mask = _attachment_ok(hs[k], keys, verts)
        if not ok:
            rep.add(R_ATTACH, (k,), f"hexahedron {k} meets the previous ones in face set {mask:06b}, not a disk")
            return rep
        add(hs[k])
        bnd = [cycle[q] for q, n in count.items() if n == 1]
        try:
            Quadrangulation(bnd, validate=True)
        except Exception as e:  # any structural failure of the prefix surface
            rep.add(R_PREFIX, (k,), f"boundary after {k + 1} hexahedra is not a sphere: {e}")
            return rep
    return rep
