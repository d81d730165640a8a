"""Adapters between the package data types and the compiled engine.

Each function mirrors the pure-Python routine of the same name and returns
the same shapes, so callers only choose which one to call.
"""

from __future__ import annotations

import time

from . import _engine
from .complex import Quadrangulation, cube_boundary
from .errors import OutOfMemoryBudget

_STOP_FIRST, _STOP_NODES, _STOP_TIME, _STOP_INTERRUPT = 1, 2, 3, 4
_NO_LIMIT = -1

fnv1a64 = _engine.fnv1a64
table_body = _engine.table_body
parse_body = _engine.parse_body


def flips(Q: Quadrangulation):
    return _engine.flips(Q.quads)


def canonical_form(Q: Quadrangulation):
    return _engine.canonical(Q.quads)


def signature_bytes(Q: Quadrangulation) -> bytes:
    return _engine.signature_bytes(Q.quads)


def is_compatible(hexes, h) -> bool:
    return _engine.compatible(hexes, h)


# -- table generation ------------------------------------------------------------


def generate_shellings(n, workers=1, max_entries=None, record_rejected=False, progress=None):
    from .tablegen import ShellingTable

    t0 = time.monotonic()
    g = _engine.ShellingGenerator(n, workers, _NO_LIMIT if max_entries is None else max_entries,
                                  record_rejected, cube_boundary().quads)
    while not g.done:
        g.step()
        if progress is not None and not g.overflow:
            progress({"depth": g.depth, "count": len(g), "time": time.monotonic() - t0})
    counts = {}
    for d in range(1, n + 1):
        c = g.count(d)
        counts[d] = c if c >= 0 else len(g)
    if g.overflow:
        t = ShellingTable(g.depth, *g.export(), counts={d: c for d, c in counts.items() if d < g.depth})
        t.authoritative = False
        raise OutOfMemoryBudget(f"more than {max_entries} entries", partial=t)
    t = ShellingTable(n, *g.export(), counts=counts)
    if record_rejected:
        t.rejected = sorted((list(k), d) for k, d in g.rejected())
    return t


# -- searches --------------------------------------------------------------------


def _group_arrays(Q, sbdd):
    from .iso import automorphism_group

    if not sbdd:
        return [], []
    group = automorphism_group(Q)
    return [g.forward for g in group], [g.is_identity() for g in group]


def _stats(d):
    from .search import SearchStats

    return SearchStats(**d)


def _make_search(Q, limits, first, sbdd, M, group=None):
    maps, ident = group if group is not None else _group_arrays(Q, sbdd)
    s = _engine.NativeSearch(Q.quads, maps, ident, Q.n_vertices)
    nb = _NO_LIMIT if limits.node_budget is None else int(limits.node_budget)
    tb = -1.0 if limits.time_budget is None else float(limits.time_budget)
    s.configure(limits.h_max, limits.resolved_v_max(Q.n_vertices), nb, tb, first, sbdd, M)
    return s


def _status_error(code):
    if code == _STOP_NODES:
        return "node budget exhausted"
    if code == _STOP_TIME:
        return "time budget exhausted"
    if code == _STOP_INTERRUPT:
        return "interrupted"
    return None


def search_exhaustive(Q, limits, mode, sbdd, M, workers):
    """``(solutions, stats, error or None)`` like the Python search."""
    first = mode == "first"
    group = _group_arrays(Q, sbdd)
    if workers > 1 and limits.h_max > 1:
        return _parallel(Q, limits, first, sbdd, M, workers, group)
    s = _make_search(Q, limits, first, sbdd, M, group)
    code = s.run()
    found = [h for _, h in s.solutions()]
    return found, _stats(s.stats()), _status_error(code)


def _worker(args):
    Q, limits, first, sbdd, M, group, assigned, count_root = args
    s = _make_search(Q, limits, first, sbdd, M, group)
    s.assign(assigned, count_root)
    code = s.run()
    return s.solutions(), _stats(s.stats()), _status_error(code)


def _parallel(Q, limits, first, sbdd, M, workers, group):
    import multiprocessing as mp

    from .search import merge_parallel

    probe = _make_search(Q, limits, first, sbdd, M, group)
    n_children = probe.root_children()
    jobs = []
    for k in range(workers):
        assigned = [i for i in range(n_children) if i % workers == k]
        jobs.append((Q, limits, first, sbdd, M, group, assigned, k == 0))
    with mp.get_context("fork").Pool(workers) as pool:
        results = pool.map(_worker, jobs)
    return merge_parallel(results, "first" if first else "all")


def native_index(table):
    if getattr(table, "native", None) is None:
        table.native = _engine.NativeTable(table.quads, table.quad_off)
    return table.native


def search_with_table(Q, table, limits, sbdd, M):
    """``(hexes, method, stats)`` of the first verified assembly, or None."""
    from .compat import PartialMesh
    from .iso import VertexMap
    from .search import _assemble, _verified

    s = _make_search(Q, limits, True, sbdd, M)
    result = []

    def on_hit(prefix, cavity, entry, sigma, next_id):
        mesh = PartialMesh(prefix)
        cavity = Quadrangulation(cavity, validate=False)
        hit = (entry, VertexMap(dict(enumerate(sigma))))
        hexes, how = _assemble(mesh, cavity, table, next_id, hit)
        if _verified(hexes, Q):
            result.append((hexes, how))
            return True
        return False

    s.use_table(native_index(table), on_hit)
    code = s.run()
    stats = _stats(s.stats())
    if not result:
        return None, stats, _status_error(code)
    hexes, how = result[0]
    return (hexes, how, stats), stats, None
