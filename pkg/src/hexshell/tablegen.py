"""Breadth-first generation of every boundary shellable with few hexahedra.

Starting from the cube, each stored mesh is grown by every compatible quad
flip; a boundary is kept the first time it is met (up to isomorphism),
together with the hexahedra that produced it.
"""

from __future__ import annotations

import struct
import sys
import time
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .compat import PartialMesh
from .complex import Quadrangulation, cube_boundary
from .errors import OutOfMemoryBudget, TableFormatError, WouldCreateNonSimpleBoundary
from .flips import IdAllocator, enumerate_flips, perform_flip
from .iso import Signature, VertexMap, are_isomorphic, canonical_form, fnv1a64, signature

MAGIC = b"HXTB"
VERSION = 1


class ShellingTable:
    """Boundaries in canonical labels with one stored shelling each.

    Entries are sorted by signature bytes and kept in flat numpy arrays.
    Boundary vertices of entry ``i`` are ``0..V_i-1``; interior vertices of
    its shelling follow.  Shellings are stored cube first, so every prefix is
    itself shellable.
    """

    def __init__(self, depth, sig_blob, sig_off, quad_off, quads, hex_off, hexes, counts=None):
        self.depth = int(depth)
        self.sig_blob = np.asarray(sig_blob, dtype=np.uint8)
        self.sig_off = np.asarray(sig_off, dtype=np.int64)
        self.quad_off = np.asarray(quad_off, dtype=np.int64)
        self.quads = np.asarray(quads, dtype=np.uint32).reshape(-1, 4)
        self.hex_off = np.asarray(hex_off, dtype=np.int64)
        self.hexes = np.asarray(hexes, dtype=np.uint32).reshape(-1, 8)
        self.counts = dict(counts or {})
        self.authoritative = True
        self.rejected: list = []
        self.native = None
        self._blob = self.sig_blob.tobytes()

    # -- construction --------------------------------------------------------

    @classmethod
    def from_entries(cls, depth, entries, counts=None):
        """``entries``: iterable of (signature bytes, quads, hexes)."""
        entries = sorted(entries, key=lambda e: (e[0], _flat(e[1])))
        sig_off = [0]
        quad_off = [0]
        hex_off = [0]
        blob = bytearray()
        quads = []
        hexes = []
        for s, qs, hs in entries:
            blob += s
            sig_off.append(len(blob))
            quads.extend(qs)
            quad_off.append(len(quads))
            hexes.extend(hs)
            hex_off.append(len(hexes))
        return cls(
            depth,
            np.frombuffer(bytes(blob), dtype=np.uint8),
            sig_off,
            quad_off,
            np.array(quads, dtype=np.uint32).reshape(-1, 4),
            hex_off,
            np.array(hexes, dtype=np.uint32).reshape(-1, 8),
            counts,
        )

    # -- access --------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.sig_off) - 1

    @property
    def count(self) -> int:
        return len(self)

    def signature_bytes(self, i: int) -> bytes:
        return self._blob[self.sig_off[i]:self.sig_off[i + 1]]

    def signature(self, i: int) -> Signature:
        return Signature.from_bytes(self.signature_bytes(i))

    def boundary_quads(self, i: int) -> list[tuple[int, ...]]:
        a, b = self.quad_off[i], self.quad_off[i + 1]
        return [tuple(int(x) for x in q) for q in self.quads[a:b]]

    def boundary(self, i: int) -> Quadrangulation:
        return Quadrangulation(self.boundary_quads(i), validate=False)

    def shelling(self, i: int) -> list[tuple[int, ...]]:
        a, b = self.hex_off[i], self.hex_off[i + 1]
        return [tuple(int(x) for x in h) for h in self.hexes[a:b]]

    def n_boundary_vertices(self, i: int) -> int:
        a, b = self.quad_off[i], self.quad_off[i + 1]
        return int(self.quads[a:b].max()) + 1

    def entries(self):
        for i in range(len(self)):
            yield self.signature_bytes(i), self.boundary_quads(i), self.shelling(i)

    def bucket(self, sig: bytes) -> range:
        n = len(self)
        lo = bisect_left(range(n), sig, key=self.signature_bytes)
        hi = lo
        while hi < n and self.signature_bytes(hi) == sig:
            hi += 1
        return range(lo, hi)

    def lookup_map(self, Q: Quadrangulation, backend: str | None = None):
        """``(entry index, map stored boundary -> Q)`` or None."""
        engine = _backend.engine(backend)
        if engine is not None:
            hit = engine.native_index(self).lookup(Q.quads)
            if hit is None:
                return None
            i, sigma = hit
            return i, VertexMap(dict(enumerate(sigma)))
        sig = signature(Q).to_bytes()
        for i in self.bucket(sig):
            B = self.boundary(i)
            if len(B.quads) != len(Q.quads):
                continue
            m = are_isomorphic(B, Q)
            if m is not None:
                return i, m
        return None

    def lookup(self, Q: Quadrangulation, alloc=None):
        """Stored shelling of ``Q`` in Q's vertex ids, or None.

        Interior vertices get fresh ids from ``alloc`` (default: just above the
        largest id of ``Q``).
        """
        hit = self.lookup_map(Q)
        if hit is None:
            return None
        i, m = hit
        if alloc is None:
            alloc = IdAllocator(max(Q.vertex_quads) + 1)
        take = alloc.take if hasattr(alloc, "take") else alloc
        vb = self.n_boundary_vertices(i)
        fresh: dict[int, int] = {}
        out = []
        for h in self.shelling(i):
            row = []
            for v in h:
                if v < vb:
                    row.append(m.forward[v])
                else:
                    if v not in fresh:
                        fresh[v] = take()
                    row.append(fresh[v])
            out.append(tuple(row))
        return out

    # -- persistence ---------------------------------------------------------

    def _body(self) -> bytes:
        engine = _backend.engine()
        if engine is not None and sys.byteorder == "little":
            c = np.ascontiguousarray
            return engine.table_body(c(self.sig_blob), c(self.sig_off), c(self.quad_off), c(self.quads),
                                     c(self.hex_off), c(self.hexes))
        parts = []
        for i in range(len(self)):
            s = self.signature_bytes(i)
            a, b = self.quad_off[i], self.quad_off[i + 1]
            c, d = self.hex_off[i], self.hex_off[i + 1]
            parts.append(struct.pack("<H", len(s)))
            parts.append(s)
            parts.append(struct.pack("<H", b - a))
            parts.append(self.quads[a:b].astype("<u4").tobytes())
            parts.append(struct.pack("<H", d - c))
            parts.append(self.hexes[c:d].astype("<u4").tobytes())
        return b"".join(parts)

    def to_bytes(self) -> bytes:
        body = self._body()
        head = MAGIC + struct.pack("<HHQ", VERSION, self.depth, len(self))
        return head + body + struct.pack("<Q", _checksum(body))

    def write(self, path) -> None:
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def from_bytes(cls, data: bytes) -> "ShellingTable":
        if len(data) < 24 or data[:4] != MAGIC:
            raise TableFormatError("not a shelling table (bad magic)")
        version, depth, count = struct.unpack_from("<HHQ", data, 4)
        if version != VERSION:
            raise TableFormatError(f"unsupported table version {version}")
        body = memoryview(data)[16:-8]
        (check,) = struct.unpack_from("<Q", data, len(data) - 8)
        if _checksum(body) != check:
            raise TableFormatError("checksum mismatch")
        engine = _backend.engine()
        if engine is not None and sys.byteorder == "little":
            try:
                parsed = engine.parse_body(body, count)
            except ValueError as e:
                raise TableFormatError(str(e)) from None
        else:
            parsed = _parse_body(bytes(body), count)
        t = cls(depth, *parsed)
        return t

    @classmethod
    def read(cls, path) -> "ShellingTable":
        with open(path, "rb") as fh:
            data = fh.read()
        t = cls.from_bytes(data)
        return t


def _checksum(body) -> int:
    engine = _backend.engine()
    if engine is not None:
        return engine.fnv1a64(body)
    return fnv1a64(bytes(body))


def _flat(quads):
    return tuple(v for q in quads for v in q)


def _parse_body(body: bytes, count: int):
    mv = memoryview(body)
    off = 0
    blob = bytearray()
    sig_off = [0]
    quad_off = [0]
    hex_off = [0]
    qchunks = []
    hchunks = []
    nq = nh = 0
    try:
        for _ in range(count):
            (ls,) = struct.unpack_from("<H", mv, off)
            off += 2
            blob += mv[off:off + ls]
            off += ls
            sig_off.append(len(blob))
            (k,) = struct.unpack_from("<H", mv, off)
            off += 2
            qchunks.append(np.frombuffer(mv[off:off + 16 * k], dtype="<u4"))
            off += 16 * k
            nq += k
            quad_off.append(nq)
            (k,) = struct.unpack_from("<H", mv, off)
            off += 2
            hchunks.append(np.frombuffer(mv[off:off + 32 * k], dtype="<u4"))
            off += 32 * k
            nh += k
            hex_off.append(nh)
    except struct.error as e:
        raise TableFormatError(f"truncated table body: {e}") from None
    if off != len(body):
        raise TableFormatError("trailing bytes after the last entry")
    quads = np.concatenate(qchunks) if qchunks else np.zeros(0, dtype=np.uint32)
    hexes = np.concatenate(hchunks) if hchunks else np.zeros(0, dtype=np.uint32)
    return (np.frombuffer(bytes(blob), dtype=np.uint8), sig_off, quad_off,
            quads.astype(np.uint32), hex_off, hexes.astype(np.uint32))


# -- generation ----------------------------------------------------------------


def canonical_entry(Q: Quadrangulation, hexes):
    """Signature bytes, canonical quads and the shelling relabeled to match."""
    form, label = canonical_form(Q)
    nxt = len(label)
    lab = dict(label)
    out = []
    for h in hexes:
        row = []
        for v in h:
            if v not in lab:
                lab[v] = nxt
                nxt += 1
            row.append(lab[v])
        out.append(tuple(row))
    return signature(Q).to_bytes(), list(form), out


def _expand(H, Q, nxt, n):
    """Children of one stored mesh: (canonical key, Q', H', next id, ok)."""
    M = PartialMesh(H)
    out = []
    for s in enumerate_flips(Q):
        alloc = IdAllocator(nxt)
        try:
            Q2, h = perform_flip(Q, s, alloc)
        except WouldCreateNonSimpleBoundary:
            continue
        ok = M.is_compatible(h.corners)
        key = canonical_form(Q2)[0]
        out.append((key, Q2, h.corners, alloc.next, ok))
    return out


def generate_shellings(n: int, workers: int = 1, *, max_entries: int | None = None,
                       record_rejected: bool = False, backend: str | None = None,
                       progress=None) -> ShellingTable:
    """All boundaries with a greedy shelling of at most ``n`` hexahedra."""
    if n < 1:
        raise ValueError("depth must be at least 1")
    engine = _backend.engine(backend)
    if engine is not None:
        return engine.generate_shellings(n, workers, max_entries, record_rejected, progress)
    t0 = time.monotonic()
    cube = cube_boundary()
    cube_hex = tuple(range(8))
    seen = {canonical_form(cube)[0]}
    entries = [canonical_entry(cube, [cube_hex])]
    counts = {1: 1}
    rejected: dict = {}
    level = [([cube_hex], cube, 8)]
    depth = 1
    while level and depth < n:
        nxt_level = []
        for H, Q, nxt in level:
            for key, Q2, h, nid, ok in _expand(H, Q, nxt, n):
                if key in seen:
                    continue
                if not ok:
                    if record_rejected and key not in rejected:
                        rejected[key] = depth + 1
                    continue
                seen.add(key)
                H2 = H + [h]
                entries.append(canonical_entry(Q2, H2))
                nxt_level.append((H2, Q2, nid))
                if max_entries is not None and len(entries) > max_entries:
                    t = ShellingTable.from_entries(depth + 1, entries, counts)
                    t.authoritative = False
                    raise OutOfMemoryBudget(f"more than {max_entries} entries", partial=t)
        depth += 1
        counts[depth] = len(entries)
        if progress is not None:
            progress({"depth": depth, "count": len(entries), "time": time.monotonic() - t0})
        level = nxt_level
    for d in range(depth + 1, n + 1):
        counts[d] = len(entries)
    t = ShellingTable.from_entries(n, entries, counts)
    if record_rejected:
        t.rejected = sorted((list(k), d) for k, d in rejected.items() if k not in seen)
    return t


# -- greedy completeness audit -------------------------------------------------


@dataclass
class CompletenessReport:
    n: int
    checked: int = 0
    counterexamples: list = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def verify_greedy_completeness(n: int, table: ShellingTable | None = None, *, workers: int = 1,
                               backend: str | None = None) -> CompletenessReport:
    """Search exhaustively every boundary the BFS met but did not keep.

    A boundary is met when it results from a flip whose hexahedron was not
    compatible with the stored mesh.  A mesh with at most ``n`` hexahedra for
    such a boundary would show that the greedy table misses something.
    """
    from .search import SearchLimits, search_exhaustive

    t0 = time.monotonic()
    if table is None or not table.rejected:
        table = generate_shellings(n, workers, record_rejected=True, backend=backend)
    rep = CompletenessReport(n)
    for quads, d in table.rejected:
        Q = Quadrangulation(quads, validate=False)
        rep.checked += 1
        sols = search_exhaustive(Q, SearchLimits(h_max=n), mode="first", backend=backend)
        if sols:
            rep.counterexamples.append((quads, len(sols[0].hexes)))
    rep.elapsed = time.monotonic() - t0
    return rep


def audit_bucket(table: ShellingTable, sig: bytes) -> bool:
    """True when the boundaries sharing ``sig`` are pairwise non-isomorphic."""
    idx = list(table.bucket(sig))
    bs = [table.boundary(i) for i in idx]
    for a in range(len(bs)):
        for b in range(a + 1, len(bs)):
            if are_isomorphic(bs[a], bs[b]) is not None:
                return False
    return True
