"""Readers and writers for quad spheres, planar code streams and hex meshes.

Text quad files::

    quadsphere 1
    V F
    a b c d        (F lines, 0-based vertex ids)

Several records may follow each other in one file.  Hex mesh files use the
header ``hexmesh 1``, a ``V H`` line and ``H`` lines of eight ids in XOR
corner order, optionally followed by ``boundary F`` and ``F`` quad lines.
"""

from __future__ import annotations

import struct
from pathlib import Path

from .complex import as_corners
from .errors import ParseError

PLANAR_HEADER = b">>planar_code<<"


# -- text quad spheres ---------------------------------------------------------


def _tokens(text: str):
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            yield line


def parse_quads_text(text: str) -> list[list[tuple[int, int, int, int]]]:
    lines = list(_tokens(text))
    out = []
    i = 0
    while i < len(lines):
        if lines[i].split() != ["quadsphere", "1"]:
            raise ParseError(f"expected 'quadsphere 1', got {lines[i]!r}")
        try:
            V, F = (int(x) for x in lines[i + 1].split())
        except (IndexError, ValueError):
            raise ParseError("expected a 'V F' line after the header") from None
        quads = []
        for k in range(F):
            try:
                parts = [int(x) for x in lines[i + 2 + k].split()]
            except IndexError:
                raise ParseError(f"file ends after {k} of {F} quads") from None
            except ValueError:
                raise ParseError(f"bad quad line {lines[i + 2 + k]!r}") from None
            if len(parts) != 4:
                raise ParseError(f"quad line {lines[i + 2 + k]!r} must have 4 ids")
            if min(parts) < 0 or max(parts) >= V:
                raise ParseError(f"quad {parts} has ids outside 0..{V - 1}")
            quads.append(tuple(parts))
        out.append(quads)
        i += 2 + F
    if not out:
        raise ParseError("no quadrangulation found")
    return out


def format_quads_text(quads) -> str:
    quads = [tuple(q) for q in quads]
    V = max(max(q) for q in quads) + 1
    lines = ["quadsphere 1", f"{V} {len(quads)}"]
    lines.extend(" ".join(str(v) for v in q) for q in quads)
    return "\n".join(lines) + "\n"


# -- plantri planar code -------------------------------------------------------


def _rotation_system(quads):
    """Clockwise neighbour order per vertex for oriented quads."""
    succ: dict[int, dict[int, int]] = {}
    for q in quads:
        for k in range(4):
            x, y, z = q[k], q[(k + 1) & 3], q[(k + 2) & 3]
            succ.setdefault(y, {})[x] = z
    rot = {}
    for v, m in succ.items():
        start = min(m)
        order = [start]
        x = m[start]
        while x != start:
            order.append(x)
            x = m[x]
        if len(order) != len(m):
            raise ValueError(f"vertex {v} has an inconsistent rotation")
        rot[v] = order
    return rot


def encode_planar_code(graphs) -> bytes:
    """Planar code stream of oriented quadrangulations (ids 0..n-1)."""
    out = bytearray(PLANAR_HEADER)
    for quads in graphs:
        rot = _rotation_system(quads)
        n = max(rot) + 1
        if n < 256:
            out.append(n)
            for v in range(n):
                out.extend(u + 1 for u in rot[v])
                out.append(0)
        else:
            out.append(0)
            out += struct.pack("<H", n)
            for v in range(n):
                for u in rot[v]:
                    out += struct.pack("<H", u + 1)
                out += struct.pack("<H", 0)
    return bytes(out)


def _faces_from_rotation(rot):
    pos = {v: {u: i for i, u in enumerate(nb)} for v, nb in rot.items()}
    used = set()
    faces = []
    for u, nb in rot.items():
        for v in nb:
            if (u, v) in used:
                continue
            face = []
            a, b = u, v
            while (a, b) not in used:
                used.add((a, b))
                face.append(a)
                nbb = rot[b]
                c = nbb[(pos[b][a] + 1) % len(nbb)]
                a, b = b, c
            faces.append(tuple(face))
    return faces


def decode_planar_code(data: bytes) -> list[list[tuple[int, ...]]]:
    """Faces of each embedded graph in a planar code stream."""
    if not data.startswith(b">>planar_code"):
        raise ParseError("missing >>planar_code<< header")
    end = data.index(b"<<") + 2
    header = data[:end]
    big = b" be" in header
    off = end
    graphs = []
    fmt = ">H" if big else "<H"
    while off < len(data):
        n = data[off]
        off += 1
        wide = n == 0
        if wide:
            if off + 2 > len(data):
                raise ParseError("truncated planar code")
            (n,) = struct.unpack_from(fmt, data, off)
            off += 2
        rot = {}
        for v in range(n):
            nb = []
            while True:
                if off >= len(data):
                    raise ParseError("truncated planar code")
                if wide:
                    (x,) = struct.unpack_from(fmt, data, off)
                    off += 2
                else:
                    x = data[off]
                    off += 1
                if x == 0:
                    break
                if x > n:
                    raise ParseError(f"neighbour {x} out of range for {n} vertices")
                nb.append(x - 1)
            rot[v] = nb
        graphs.append(_faces_from_rotation(rot))
    return graphs


# -- dispatch ------------------------------------------------------------------


def read_quadrangulations(path) -> list[list[tuple[int, ...]]]:
    """All quad spheres stored in ``path`` (text or planar code)."""
    data = Path(path).read_bytes()
    if data.startswith(b">>planar_code"):
        graphs = decode_planar_code(data)
        for g in graphs:
            if any(len(f) != 4 for f in g):
                raise ParseError("planar code graph has a face that is not a quad")
        return graphs
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise ParseError("file is neither planar code nor text") from None
    if text.lstrip().startswith("hexmesh"):
        mesh = parse_hexmesh(text)
        if mesh[1] is None:
            raise ParseError("mesh file has no boundary section")
        return [mesh[1]]
    return parse_quads_text(text)


def write_quadrangulation(path, quads) -> None:
    Path(path).write_text(format_quads_text(quads))


# -- hex meshes ----------------------------------------------------------------


def format_hexmesh(hexes, boundary=None) -> str:
    hs = [tuple(as_corners(h)) for h in hexes]
    V = max((max(h) for h in hs), default=-1) + 1
    if boundary is not None:
        V = max(V, max(max(q) for q in boundary) + 1)
    lines = ["hexmesh 1", f"{V} {len(hs)}"]
    lines.extend(" ".join(str(v) for v in h) for h in hs)
    if boundary is not None:
        lines.append(f"boundary {len(boundary)}")
        lines.extend(" ".join(str(v) for v in q) for q in boundary)
    return "\n".join(lines) + "\n"


def parse_hexmesh(text: str):
    """``(hexes, boundary or None)`` from hex mesh text."""
    lines = list(_tokens(text))
    if not lines or lines[0].split() != ["hexmesh", "1"]:
        raise ParseError("expected 'hexmesh 1' header")
    try:
        V, H = (int(x) for x in lines[1].split())
    except (IndexError, ValueError):
        raise ParseError("expected a 'V H' line after the header") from None
    hexes = []
    for k in range(H):
        try:
            parts = [int(x) for x in lines[2 + k].split()]
        except (IndexError, ValueError):
            raise ParseError(f"bad or missing hexahedron line {k}") from None
        if len(parts) != 8 or min(parts) < 0 or max(parts) >= V:
            raise ParseError(f"hexahedron line {parts} is invalid")
        hexes.append(tuple(parts))
    rest = lines[2 + H:]
    boundary = None
    if rest:
        head = rest[0].split()
        if len(head) != 2 or head[0] != "boundary":
            raise ParseError(f"unexpected line {rest[0]!r}")
        F = int(head[1])
        boundary = []
        for k in range(F):
            try:
                parts = [int(x) for x in rest[1 + k].split()]
            except (IndexError, ValueError):
                raise ParseError(f"bad or missing boundary line {k}") from None
            if len(parts) != 4:
                raise ParseError(f"boundary line {parts} must have 4 ids")
            boundary.append(tuple(parts))
    return hexes, boundary


def read_hexmesh(path):
    return parse_hexmesh(Path(path).read_text())


def write_hexmesh(path, hexes, boundary=None) -> None:
    Path(path).write_text(format_hexmesh(hexes, boundary))
