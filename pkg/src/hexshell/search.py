"""Search for shellable hexahedral meshes of a quad sphere.

``search_exhaustive`` enumerates meshes built by quad flips up to a size
limit, pruning nodes that are symmetric to explored ones.
``search_with_table`` stops as soon as the unmeshed cavity is a boundary
from a precomputed table and completes the mesh from the stored shelling.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

from . import _backend
from .compat import PartialMesh
from .complex import Hexahedron, Quadrangulation, build_quadrangulation, HEX_FACES
from .errors import BudgetExhausted, NotFound, OddQuadCount, WouldCreateNonSimpleBoundary
from .flips import (
    FLIP_MASK,
    N_FRESH,
    IdAllocator,
    apply_hex,
    closing_hex,
    enumerate_flips,
    hex_attachment,
    site_corners,
)
from .iso import VertexMap, automorphism_group
from .sbdd import NoGoodSequence, visited_symmetric_counterpart

log = logging.getLogger(__name__)


@dataclass
class SearchLimits:
    h_max: int
    v_max: int | None = None
    time_budget: float | None = None
    node_budget: int | None = None

    def __post_init__(self):
        if self.h_max < 1:
            raise ValueError("h_max must be at least 1")
        if self.v_max is not None and self.v_max < 8:
            raise ValueError("v_max must be at least 8")

    def resolved_v_max(self, n_vertices: int) -> int:
        # each flip adds at most four vertices, so this never cuts a solution
        if self.v_max is not None:
            return self.v_max
        return n_vertices + 4 * self.h_max + 1


@dataclass
class SearchStats:
    nodes: int = 0
    sbdd_prunes: int = 0
    vmax_prunes: int = 0
    solutions: int = 0
    table_hits: int = 0
    wall_time: float = 0.0

    def merge(self, other: "SearchStats") -> None:
        self.nodes += other.nodes
        self.sbdd_prunes += other.sbdd_prunes
        self.vmax_prunes += other.vmax_prunes
        self.solutions += other.solutions
        self.table_hits += other.table_hits

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class Solution:
    """Hexahedra in insertion order; reversed, they form a shelling."""

    hexes: list
    stats: SearchStats = field(default_factory=SearchStats)
    method: str = "exhaustive"

    def __len__(self):
        return len(self.hexes)


class _Stop(Exception):
    pass


class _Relabel:
    """Maps compact search ids back to the ids of the user's input."""

    def __init__(self, Q: Quadrangulation):
        self.V = Q.n_vertices
        self.labels = Q.labels
        top = max(Q.labels) if Q.labels is not None else self.V - 1
        self.offset = top + 1 - self.V

    def __call__(self, v: int) -> int:
        if v < self.V:
            return self.labels[v] if self.labels is not None else v
        return v + self.offset

    def hexes(self, hexes) -> list[Hexahedron]:
        return [Hexahedron(tuple(self(v) for v in c)) for c in hexes]


def _prepare(Q) -> Quadrangulation:
    if not isinstance(Q, Quadrangulation):
        Q = build_quadrangulation(Q)
    elif set(Q.vertex_quads) != set(range(Q.n_vertices)):
        # the searches allocate fresh ids from V upwards
        labels = Q.labels
        Q = build_quadrangulation(Q.quads)
        if labels is not None:
            Q = Quadrangulation(Q.quads, validate=False, labels=[labels[v] for v in Q.labels])
    if len(Q.quads) % 2:
        raise OddQuadCount(f"a quad sphere with {len(Q.quads)} quads bounds no hex mesh")
    return Q


# -- exhaustive search ---------------------------------------------------------


class _Exhaustive:
    """Depth-first flip search over one quad sphere (reference implementation)."""

    def __init__(self, Q, limits, mode, sbdd, M, group, progress=None, progress_every=10000):
        self.target = Q
        self.h_max = limits.h_max
        self.v_max = limits.resolved_v_max(Q.n_vertices)
        self.deadline = None if limits.time_budget is None else time.monotonic() + limits.time_budget
        self.node_budget = limits.node_budget
        self.first = mode == "first"
        self.sbdd = sbdd
        self.M = M
        self.group = group
        self.mesh = PartialMesh()
        self.seq = NoGoodSequence()
        self.stats = SearchStats()
        self.found: list[list[tuple]] = []
        self.found_child: list[int] = []
        self.current_child = -1
        self.progress = progress
        self.progress_every = progress_every

    def _tick(self):
        st = self.stats
        st.nodes += 1
        if self.node_budget is not None and st.nodes > self.node_budget:
            raise BudgetExhausted("node budget exhausted", stats=st)
        if (st.nodes & 255) == 0 and self.deadline is not None and time.monotonic() > self.deadline:
            raise BudgetExhausted("time budget exhausted", stats=st)
        if self.progress is not None and st.nodes % self.progress_every == 0:
            self.progress({"event": "progress", **st.as_dict()})

    def _emit(self, hexes):
        self.found.append(list(hexes))
        self.found_child.append(self.current_child)
        self.stats.solutions += 1
        if self.progress is not None:
            self.progress({"event": "solution", "size": len(hexes), **self.stats.as_dict()})
        if self.first:
            raise _Stop

    def children(self, Q, next_id, depth):
        """Compatible, unpruned children as ``(Q', corners, next_id)``."""
        return self._children(Q, next_id, depth, exact=True)

    def _children(self, Q, next_id, depth, exact):
        # vertex limit and compatibility are checked before the flip is built;
        # the accepted children are the same as in flip-first order
        mesh = self.mesh
        out = []
        for site in enumerate_flips(Q):
            if next_id + N_FRESH[site.kind] >= self.v_max:
                self.stats.vmax_prunes += 1
                continue
            c, nid = site_corners(site, next_id)
            if not mesh.is_compatible(c):
                continue
            # the child must still be able to shrink to a cube and close it
            if exact and depth + 1 >= self.h_max:
                continue
            try:
                Q2 = apply_hex(Q, c, FLIP_MASK[site.kind], site.quads)
            except WouldCreateNonSimpleBoundary:
                continue
            if exact and len(Q2.quads) - 4 * (self.h_max - depth - 2) > 6:
                continue
            out.append((Q2, c, nid))
        return out

    def dominated(self, c) -> bool:
        if not self.sbdd:
            return False
        H = self.mesh.hexes + [c]
        if visited_symmetric_counterpart(self.seq, H, self.group, self.target, self.M):
            self.stats.sbdd_prunes += 1
            return True
        return False

    def node(self, Q, next_id):
        self._tick()
        depth = len(self.mesh.hexes)
        if depth >= self.h_max:
            return
        c = closing_hex(Q)
        if c is not None and self.mesh.is_compatible(c):
            self._emit(self.mesh.hexes + [c])
        for Q2, h, nid in self.children(Q, next_id, depth):
            self.descend(Q2, h, nid)

    def descend(self, Q2, h, nid):
        if self.dominated(h):
            return
        self.seq.record_enter(h)
        tok = self.mesh.add_hex(h)
        try:
            self.node(Q2, nid)
        finally:
            self.mesh.undo(tok)
            self.seq.record_exit()

    def run(self, assigned=None, count_root=True):
        """Explore the tree.  With ``assigned`` only those root children are
        expanded; the others are recorded as explored so that pruning matches
        a sequential run."""
        Q = self.target
        try:
            if assigned is None:
                self.node(Q, Q.n_vertices)
                return
            if count_root:
                self._tick()
                c = closing_hex(Q)
                if c is not None and self.h_max >= 1:
                    self._emit([c])
            if self.h_max <= 1:
                return
            for i, (Q2, h, nid) in enumerate(self.children(Q, Q.n_vertices, 0)):
                if i in assigned:
                    self.current_child = i
                    self.descend(Q2, h, nid)
                elif not self.dominated(h):
                    self.seq.record_enter(h)
                    self.seq.record_exit()
        except _Stop:
            pass


def _worker_run(args):
    Q, limits, mode, sbdd, M, assigned, count_root = args
    group = automorphism_group(Q)
    s = _Exhaustive(Q, limits, mode, sbdd, M, group)
    err = None
    try:
        s.run(assigned=set(assigned), count_root=count_root)
    except BudgetExhausted as e:
        err = str(e)
    return list(zip(s.found_child, s.found)), s.stats, err


def search_exhaustive(Q, limits: SearchLimits, mode: str = "all", *, sbdd: bool = True,
                      M: int = 10, workers: int = 1, backend: str | None = None,
                      progress=None) -> list[Solution]:
    """All shellable meshes of ``Q`` within ``limits`` (one per symmetry class
    when ``sbdd`` is on), or the first one found when ``mode='first'``."""
    if mode not in ("first", "all"):
        raise ValueError("mode must be 'first' or 'all'")
    Q = _prepare(Q)
    t0 = time.monotonic()
    relabel = _Relabel(Q)
    engine = _backend.engine(backend)
    if engine is not None:
        found, stats, err = engine.search_exhaustive(Q, limits, mode, sbdd, M, workers)
    elif workers > 1:
        found, stats, err = _parallel(Q, limits, mode, sbdd, M, workers)
    else:
        group = automorphism_group(Q) if sbdd else []
        s = _Exhaustive(Q, limits, mode, sbdd, M, group, progress)
        err = None
        try:
            s.run()
        except BudgetExhausted as e:
            err = str(e)
        found, stats = s.found, s.stats
    stats.wall_time = time.monotonic() - t0
    sols = [Solution(relabel.hexes(h), stats) for h in found]
    if err is not None:
        raise BudgetExhausted(err, partial=sols, stats=stats)
    return sols


def _parallel(Q, limits, mode, sbdd, M, workers):
    import multiprocessing as mp

    probe = _Exhaustive(Q, limits, mode, sbdd, M, [])
    n_children = len(probe.children(Q, Q.n_vertices, 0)) if limits.h_max > 1 else 0
    jobs = []
    for k in range(workers):
        assigned = [i for i in range(n_children) if i % workers == k]
        jobs.append((Q, limits, mode, sbdd, M, assigned, k == 0))
    ctx = mp.get_context("fork")
    with ctx.Pool(workers) as pool:
        results = pool.map(_worker_run, jobs)
    return merge_parallel(results, mode)


def merge_parallel(results, mode):
    """Combine worker results into the order of a sequential run."""
    stats = SearchStats()
    err = None
    tagged = []
    for found, st, e in results:
        stats.merge(st)
        err = err or e
        tagged.extend(found)
    # sort is stable, so solutions of one child keep their order
    tagged.sort(key=lambda t: t[0])
    found_all = [h for _, h in tagged]
    if mode == "first" and found_all:
        found_all = found_all[:1]
    stats.solutions = len(found_all)
    return found_all, stats, err


# -- buffer layer and table-assisted search ------------------------------------


def _layer_hex(q, copy):
    a, b, c, d = q
    return (a, b, d, c, copy[a], copy[b], copy[d], copy[c])


def insert_buffer_layer(cavity: Quadrangulation, alloc):
    """Hexahedra joining every cavity quad to a fresh copy of itself.

    Returns ``(layer, copy, corr)``: the layer in an order where each hex is
    a quad flip of the cavity left by the previous ones, the copied boundary
    and the vertex correspondence cavity -> copy.
    """
    take = alloc.take if hasattr(alloc, "take") else alloc
    corr = VertexMap()
    for v in sorted(cavity.vertex_quads):
        corr.bind(v, take())
    cp = corr.forward
    copy = Quadrangulation([tuple(cp[v] for v in q) for q in cavity.quads], validate=False)
    hexes = [_layer_hex(q, cp) for q in cavity.quads]
    order = _shelling_order(cavity, hexes)
    return [hexes[i] for i in order], copy, corr


def _shelling_order(cavity, hexes):
    """Greedy order in which each layer hex is a valid flip; falls back to the
    plain quad order if greedy gets stuck."""
    remaining = list(range(len(hexes)))
    Q = cavity
    order = []
    while remaining:
        for pos, i in enumerate(remaining):
            att = hex_attachment(Q, hexes[i])
            if att is None or att[0] == 63:
                continue
            try:
                Q2 = apply_hex(Q, hexes[i], att[0], att[1])
            except WouldCreateNonSimpleBoundary:
                continue
            Q = Q2
            order.append(i)
            del remaining[pos]
            break
        else:
            log.warning("no flip order found for the buffer layer; using quad order")
            return order + remaining
    return order


def _assemble(mesh: PartialMesh, cavity, table, next_id, hit):
    """Complete ``mesh`` using a table hit on ``cavity``: first by replaying the
    stored shelling directly, then through a buffer layer."""
    entry, sigma = hit
    stored = table.shelling(entry)
    vb = table.n_boundary_vertices(entry)

    def mapped(sig, start):
        fresh = {}
        nxt = [start]

        def m(v):
            if v < vb:
                return sig[v]
            if v not in fresh:
                fresh[v] = nxt[0]
                nxt[0] += 1
            return fresh[v]

        return [tuple(m(v) for v in h) for h in stored]

    direct = mapped(sigma.forward, next_id)
    toks = []
    ok = True
    for h in reversed(direct):
        if not mesh.is_compatible(h):
            ok = False
            break
        toks.append(mesh.add_hex(h))
    for t in reversed(toks):
        mesh.undo(t)
    if ok:
        return list(mesh.hexes) + list(reversed(direct)), "table-direct"
    alloc = IdAllocator(next_id)
    layer, copy, corr = insert_buffer_layer(cavity, alloc)
    sig2 = {k: corr.forward[v] for k, v in sigma.forward.items()}
    inner = mapped(sig2, alloc.next)
    return list(mesh.hexes) + layer + list(reversed(inner)), "table-buffer"


class _TableSearch(_Exhaustive):
    def __init__(self, Q, limits, table, sbdd, M, group, verify_each=True):
        super().__init__(Q, limits, "first", sbdd, M, group)
        self.table = table
        self.verify_each = verify_each
        self.result = None

    def children(self, Q, next_id, depth):
        return self._children(Q, next_id, depth, exact=False)

    def node(self, Q, next_id):
        self._tick()
        hit = self.table.lookup_map(Q)
        if hit is not None:
            self.stats.table_hits += 1
            hexes, how = _assemble(self.mesh, Q, self.table, next_id, hit)
            if self._check(hexes):
                self.result = (hexes, how)
                raise _Stop
        if len(self.mesh.hexes) >= self.h_max:
            return
        for Q2, h, nid in self.children(Q, next_id, len(self.mesh.hexes)):
            self.descend(Q2, h, nid)

    def _check(self, hexes) -> bool:
        return not self.verify_each or _verified(hexes, self.target)


def _verified(hexes, target) -> bool:
    from .verify import verify_mesh

    rep = verify_mesh(hexes, target)
    if not rep.ok:
        log.warning("assembled mesh failed verification: %s", rep.violations[:3])
    return rep.ok


def search_with_table(Q, table, limits: SearchLimits, *, sbdd: bool = True, M: int = 10,
                      backend: str | None = None) -> Solution:
    """First mesh found by flipping until the cavity is a table boundary.

    The table is consulted at every node of a depth-first flip search whose
    prefix holds at most ``limits.h_max`` hexahedra; the size of the
    completed mesh is not bounded.
    """
    Q = _prepare(Q)
    t0 = time.monotonic()
    relabel = _Relabel(Q)
    engine = _backend.engine(backend)
    if engine is not None:
        res, stats, err = engine.search_with_table(Q, table, limits, sbdd, M)
        if res is None:
            stats.wall_time = time.monotonic() - t0
            raise NotFound(f"no table boundary reached: {err}" if err else
                           "no table boundary reached within the limits", stats)
        hexes, how, stats = res
        stats.wall_time = time.monotonic() - t0
        return Solution(relabel.hexes(hexes), stats, how)
    group = automorphism_group(Q) if sbdd else []
    s = _TableSearch(Q, limits, table, sbdd, M, group)
    try:
        s.node(Q, Q.n_vertices)
    except _Stop:
        pass
    except BudgetExhausted as e:
        s.stats.wall_time = time.monotonic() - t0
        raise NotFound(f"no table boundary reached: {e}", s.stats) from None
    s.stats.wall_time = time.monotonic() - t0
    if s.result is None:
        raise NotFound("no table boundary reached within the limits", s.stats)
    hexes, how = s.result
    return Solution(relabel.hexes(hexes), s.stats, how)


def search_with_table_deepening(Q, table, limits: SearchLimits, *, sbdd: bool = True, M: int = 10,
                                backend: str | None = None) -> Solution:
    """``search_with_table`` with the prefix bound raised 1, 2, ... up to ``limits.h_max``.

    Table hits are sparse, and a single deep DFS spends its budget far from
    the root, so shallow prefixes are exhausted first.  The time budget is
    shared by all rounds, the node budget applies to each round, and
    re-running the shallower levels costs about 1/18 extra.
    """
    deadline = None if limits.time_budget is None else time.monotonic() + limits.time_budget
    last = None
    for h in range(1, limits.h_max + 1):
        left = None
        if deadline is not None:
            left = deadline - time.monotonic()
            if left <= 0:
                break
        lim = SearchLimits(h, limits.v_max, left, limits.node_budget)
        try:
            return search_with_table(Q, table, lim, sbdd=sbdd, M=M, backend=backend)
        except NotFound as e:
            last = e
            log.info("prefix %d: %s", h, e)
            if "budget" in str(e):
                break
    if last is None:
        raise NotFound("no table boundary reached: time budget exhausted", SearchStats())
    raise last
