"""Named boundary fixtures and a small enumerator of quad spheres."""

from __future__ import annotations

from importlib import resources
from itertools import combinations

from .complex import HEX_FACES, Quadrangulation, build_quadrangulation
from .errors import InvalidQuadrangulation
from .iso import canonical_form


def cube():
    return [tuple(f) for f in HEX_FACES]


def trapezohedron():
    """Tetragonal trapezohedron: 8 kite faces around two apices."""
    T, B = 0, 1
    u = [2, 3, 4, 5]
    l = [6, 7, 8, 9]
    quads = []
    for i in range(4):
        quads.append((T, u[i], l[i], u[(i + 1) % 4]))
    for i in range(4):
        quads.append((B, l[i], u[(i + 1) % 4], l[(i + 1) % 4]))
    return quads


def _split_triangle(a, b, c, mab, mbc, mca, center):
    return [(a, mab, center, mca), (b, mbc, center, mab), (c, mca, center, mbc)]


def pyramid():
    """Square pyramid, base cut into 2x2 quads, each side triangle into 3."""
    apex = 0
    b = [1, 2, 3, 4]  # base corners
    e = [5, 6, 7, 8]  # base edge midpoints b_i b_{i+1}
    z = 9  # base centre
    lm = [10, 11, 12, 13]  # midpoints of apex-b_i
    s = [14, 15, 16, 17]  # side centres
    quads = []
    for i in range(4):
        quads.append((b[i], e[i], z, e[(i - 1) % 4]))
    for i in range(4):
        j = (i + 1) % 4
        quads.extend(_split_triangle(apex, b[i], b[j], lm[i], e[i], lm[j], s[i]))
    return quads


def _hexagon(v, n_quads, fresh):
    """Split the hexagon ``v`` into 3 quads (one inner vertex) or 4 (two)."""
    if n_quads == 3:
        c = fresh()
        return [(v[0], v[1], v[2], c), (v[2], v[3], v[4], c), (v[4], v[5], v[0], c)]
    x, y = fresh(), fresh()
    return [(v[0], v[1], v[2], x), (v[2], v[3], y, x), (v[3], v[4], v[5], y), (v[5], v[0], x, y)]


def buffer_cell(side_quads=(3, 3, 3, 4)):
    """A four-sided cell: a quad on top, a bottom square made of two split
    triangles, and side faces split into 3 or 4 quads."""
    nxt = [0]

    def fresh():
        nxt[0] += 1
        return nxt[0] - 1

    t = [fresh() for _ in range(4)]
    b = [fresh() for _ in range(4)]
    e = [fresh() for _ in range(4)]  # bottom edge midpoints b_i b_{i+1}
    md = fresh()  # midpoint of the diagonal b0 b2
    c1, c2 = fresh(), fresh()
    # vertical edges t_i b_i carry an extra vertex on odd i
    mid = {1: fresh(), 3: fresh()}
    quads = [(t[0], t[1], t[2], t[3])]
    quads += _split_triangle(b[0], b[1], b[2], e[0], e[1], md, c1)
    quads += _split_triangle(b[2], b[3], b[0], e[2], e[3], md, c2)

    def vertical(i, downward):
        path = [t[i]] + ([mid[i]] if i in mid else []) + [b[i]]
        return path if downward else path[::-1]

    for i in range(4):
        j = (i + 1) % 4
        ring = [t[j], t[i]] + vertical(i, True)[1:] + [e[i]] + vertical(j, False)[:-1]
        if len(ring) != 6:
            raise AssertionError("side face of the buffer cell is not a hexagon")
        quads += _hexagon(ring, side_quads[i], fresh)
    return quads


def erickson_cell_1():
    return buffer_cell((3, 3, 3, 4))


def erickson_cell_2():
    return buffer_cell((3, 4, 4, 4))


NAMED = {
    "cube": cube,
    "trapezohedron": trapezohedron,
    "pyramid": pyramid,
    "buffer20": erickson_cell_1,
    "buffer22": erickson_cell_2,
}


def named(name: str) -> Quadrangulation:
    return build_quadrangulation(NAMED[name]())


# -- enumeration ---------------------------------------------------------------


def pseudo_double_wheel(k: int):
    """Cycle of length 2k with one hub on even and one on odd positions."""
    a, b = 0, 1
    cyc = list(range(2, 2 + 2 * k))
    quads = []
    for i in range(0, 2 * k, 2):
        quads.append((a, cyc[i], cyc[(i + 1) % (2 * k)], cyc[(i + 2) % (2 * k)]))
        quads.append((b, cyc[(i + 1) % (2 * k)], cyc[(i + 2) % (2 * k)], cyc[(i + 3) % (2 * k)]))
    return quads


def _try(quads):
    try:
        return build_quadrangulation(quads)
    except InvalidQuadrangulation:
        return None


def _grow(Q: Quadrangulation):
    """Quad spheres with one more face: a new degree-2 vertex inside a face,
    or a vertex split that opens a new face."""
    quads = list(Q.quads)
    n = Q.n_vertices
    x = n
    for i, (a, b, c, d) in enumerate(quads):
        for (p, q, r, s) in ((a, b, c, d), (b, c, d, a)):
            rest = quads[:i] + quads[i + 1:]
            yield rest + [(p, q, r, x), (p, x, r, s)]
    # vertex split: v with neighbours u, w splits into v and x, adding (v,u,x,w)
    for v in range(n):
        ring = _ring(Q, v)
        k = len(ring)
        for i, j in combinations(range(k), 2):
            u, w = ring[i][0], ring[j][0]
            moved = {ring[t][1] for t in range(i, j)}
            new = []
            for t, q in enumerate(quads):
                if t in moved:
                    new.append(tuple(x if y == v else y for y in q))
                else:
                    new.append(q)
            new.append((v, u, x, w))
            yield new


def _ring(Q, v):
    """Neighbours of ``v`` in cyclic order, each with the quad that follows."""
    quads = Q.quads
    qs = Q.vertex_quads[v]
    nxt = {}
    for t in qs:
        q = quads[t]
        p = q.index(v)
        nxt[q[(p + 1) & 3]] = (q[(p + 3) & 3], t)
    start = min(nxt)
    out = []
    u = start
    while True:
        w, t = nxt[u]
        out.append((u, t))
        u = w
        if u == start:
            break
    return out


def is_three_connected(Q: Quadrangulation) -> bool:
    vs = Q.vertices
    adj = {v: set(Q.neighbors(v)) for v in vs}
    for a, b in combinations(vs, 2):
        rest = [v for v in vs if v != a and v != b]
        seen = {rest[0]}
        stack = [rest[0]]
        while stack:
            y = stack.pop()
            for z in adj[y]:
                if z != a and z != b and z not in seen:
                    seen.add(z)
                    stack.append(z)
        if len(seen) != len(rest):
            return False
    return True


def enumerate_quadrangulations(max_faces: int, *, min_faces: int = 6, three_connected: bool = False):
    """All simple quad spheres with ``min_faces..max_faces`` quads, up to
    isomorphism.  With ``three_connected`` only 3-connected ones of minimum
    degree 3 are returned."""
    start = _try([(0, 2, 1, 3), (0, 3, 1, 4), (0, 4, 1, 2)])
    levels = {3: {canonical_form(start)[0]: start}}
    for F in range(4, max_faces + 1):
        cur: dict = {}
        for Q in levels[F - 1].values():
            for quads in _grow(Q):
                R = _try(quads)
                if R is None:
                    continue
                key = canonical_form(R)[0]
                if key not in cur:
                    cur[key] = R
        if F % 2 == 0 and F >= 6 and F // 2 >= 3:
            R = _try(pseudo_double_wheel(F // 2))
            key = canonical_form(R)[0]
            cur.setdefault(key, R)
        levels[F] = cur
    out = []
    for F in range(min_faces, max_faces + 1):
        for key in sorted(levels[F]):
            Q = Quadrangulation(key, validate=False)
            if three_connected:
                if min(len(v) for v in Q.vertex_quads.values()) < 3 or not is_three_connected(Q):
                    continue
            out.append(Q)
    return out


def load_data(name: str):
    """Quad spheres from a planar code file shipped with the package."""
    from .io import decode_planar_code

    data = resources.files("hexshell").joinpath("data", name).read_bytes()
    return decode_planar_code(data)
