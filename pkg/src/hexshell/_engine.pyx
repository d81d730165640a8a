# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels.  Use :mod:`hexshell._native_api`, not this module."""

from cpython.exc cimport PyErr_CheckSignals
from libc.string cimport memcpy
from libcpp cimport bool as cbool
from libcpp.string cimport string
from libcpp.vector cimport vector

import numpy as np

FNV_OFFSET = 0xCBF29CE484222325


cdef extern from "csrc/bridge.hpp" namespace "hx" nogil:
    ctypedef int (*hit_callback)(void* ctx, const int* prefix, int n_prefix, const int* cavity,
                                 int n_cavity, int entry,
                                 const int* sigma, int n_sigma, int next_id) noexcept
    ctypedef int (*poll_callback)(void* ctx) noexcept

    cdef cppclass Generator:
        int depth
        cbool overflow
        cbool done()
        void step() except +
        size_t n_entries "entries.size"()

    cdef cppclass TableIndex:
        pass

    cdef cppclass SearchHandle:
        vector[int] assigned
        cbool use_assigned
        cbool count_root
        void set_target(const vector[int]&)
        void set_group(const vector[int]&, int, const vector[int]&)
        void set_limits(int, int, long long, double)
        void set_mode(cbool, cbool, int)
        void set_table(TableIndex*, hit_callback, void*)
        void set_poll(poll_callback, void*)
        int run() except +
        int root_children() except +
        int n_found()
        void solution(int, vector[int]&)
        int solution_child(int)

    cdef cppclass SearchStatsView "hx::Stats":
        long long nodes, sbdd_prunes, vmax_prunes, solutions, table_hits

    vector[int] flips_flat(const vector[int]&) except +
    void canonical_flat(const vector[int]&, vector[int]&, vector[int]&) except +
    string signature_flat(const vector[int]&) except +
    cbool compatible_flat(const vector[int]&, const vector[int]&) except +
    int apply_flat(const vector[int]&, const vector[int]&, int, const vector[int]&, vector[int]&) except +
    void gen_init(Generator&, int, int, long long, cbool, const vector[int]&) except +
    void gen_export(const Generator&, string&, vector[long long]&, vector[long long]&,
                    vector[unsigned int]&, vector[long long]&, vector[unsigned int]&) except +
    void gen_rejected(const Generator&, vector[string]&, vector[int]&) except +
    int gen_count(const Generator&, int)
    void table_index_add(TableIndex&, int, const unsigned int*, int)
    int table_index_lookup(const TableIndex&, const vector[int]&, vector[int]&) except +
    unsigned long long fnv_bytes(const unsigned char*, size_t, unsigned long long)


cdef extern from *:
    """
    static inline hx::Stats* hx_stats(hx::SearchHandle* h) { return &h->s.stats; }
    """
    SearchStatsView* hx_stats(SearchHandle*)


cdef vector[int] _flat(quads):
    cdef vector[int] out
    for q in quads:
        for v in q:
            out.push_back(v)
    return out


def flips(quads):
    """Flip sites as (kind index, quad indices, corners with -1 for fresh)."""
    cdef vector[int] r = flips_flat(_flat(quads))
    out = []
    cdef size_t i = 0
    cdef int nq
    while i < r.size():
        nq = r[i + 1]
        out.append((r[i], tuple(r[i + 2 + k] for k in range(nq)), tuple(r[i + 7 + k] for k in range(8))))
        i += 15
    return out


def canonical(quads):
    cdef vector[int] form, label
    canonical_flat(_flat(quads), form, label)
    cyc = tuple(tuple(form[i + k] for k in range(4)) for i in range(0, form.size(), 4))
    lab = {v: label[v] for v in range(label.size()) if label[v] >= 0}
    return cyc, lab


def signature_bytes(quads):
    cdef string s = signature_flat(_flat(quads))
    return s.data()[:s.size()]


def compatible(hexes, h):
    return bool(compatible_flat(_flat(hexes), _flat([h])))


def apply(quads, corners, int mask, removed):
    cdef vector[int] out
    cdef vector[int] rem = removed
    cdef int n = apply_flat(_flat(quads), _flat([corners]), mask, rem, out)
    if n < 0:
        return None
    return [tuple(out[i + k] for k in range(4)) for i in range(0, out.size(), 4)]


def fnv1a64(const unsigned char[::1] data, unsigned long long h=FNV_OFFSET):
    if data.shape[0] == 0:
        return h
    return fnv_bytes(&data[0], data.shape[0], h)


def table_body(const unsigned char[::1] sig_blob, const long long[::1] sig_off,
               const long long[::1] quad_off, const unsigned int[:, ::1] quads,
               const long long[::1] hex_off, const unsigned int[:, ::1] hexes):
    """Serialized entries of a shelling table (little-endian)."""
    cdef Py_ssize_t n = sig_off.shape[0] - 1
    cdef Py_ssize_t total = 0, i, off = 0
    cdef long long ls, nq, nh
    for i in range(n):
        total += 6 + (sig_off[i + 1] - sig_off[i]) + 16 * (quad_off[i + 1] - quad_off[i]) \
            + 32 * (hex_off[i + 1] - hex_off[i])
    buf = bytearray(total)
    cdef unsigned char[::1] out = buf
    cdef unsigned char* p
    for i in range(n):
        ls = sig_off[i + 1] - sig_off[i]
        nq = quad_off[i + 1] - quad_off[i]
        nh = hex_off[i + 1] - hex_off[i]
        out[off] = ls & 255
        out[off + 1] = ls >> 8
        off += 2
        if ls:
            memcpy(&out[off], &sig_blob[sig_off[i]], ls)
        off += ls
        out[off] = nq & 255
        out[off + 1] = nq >> 8
        off += 2
        if nq:
            memcpy(&out[off], &quads[quad_off[i], 0], 16 * nq)
        off += 16 * nq
        out[off] = nh & 255
        out[off + 1] = nh >> 8
        off += 2
        if nh:
            memcpy(&out[off], &hexes[hex_off[i], 0], 32 * nh)
        off += 32 * nh
    return bytes(buf)


def parse_body(const unsigned char[::1] body, long long count):
    """Arrays of a serialized table body, or ValueError when malformed."""
    cdef Py_ssize_t n = body.shape[0], off = 0
    cdef long long i, ls, nq, nh, sb = 0, tq = 0, th = 0
    # first pass: sizes
    for i in range(count):
        if off + 2 > n:
            raise ValueError("truncated table body")
        ls = body[off] | (body[off + 1] << 8)
        off += 2 + ls
        if off + 2 > n:
            raise ValueError("truncated table body")
        nq = body[off] | (body[off + 1] << 8)
        off += 2 + 16 * nq
        if off + 2 > n:
            raise ValueError("truncated table body")
        nh = body[off] | (body[off + 1] << 8)
        off += 2 + 32 * nh
        if off > n:
            raise ValueError("truncated table body")
        sb += ls
        tq += nq
        th += nh
    if off != n:
        raise ValueError("trailing bytes after the last entry")
    sig_blob = np.empty(sb, dtype=np.uint8)
    sig_off = np.zeros(count + 1, dtype=np.int64)
    quad_off = np.zeros(count + 1, dtype=np.int64)
    hex_off = np.zeros(count + 1, dtype=np.int64)
    quads = np.empty((tq, 4), dtype=np.uint32)
    hexes = np.empty((th, 8), dtype=np.uint32)
    cdef unsigned char[::1] vb = sig_blob
    cdef long long[::1] vs = sig_off, vq = quad_off, vh = hex_off
    cdef unsigned int[:, ::1] mq = quads, mh = hexes
    off = 0
    sb = tq = th = 0
    for i in range(count):
        ls = body[off] | (body[off + 1] << 8)
        off += 2
        if ls:
            memcpy(&vb[sb], &body[off], ls)
        sb += ls
        off += ls
        vs[i + 1] = sb
        nq = body[off] | (body[off + 1] << 8)
        off += 2
        if nq:
            memcpy(&mq[tq, 0], &body[off], 16 * nq)
        tq += nq
        off += 16 * nq
        vq[i + 1] = tq
        nh = body[off] | (body[off + 1] << 8)
        off += 2
        if nh:
            memcpy(&mh[th, 0], &body[off], 32 * nh)
        th += nh
        off += 32 * nh
        vh[i + 1] = th
    return sig_blob, sig_off, quad_off, quads, hex_off, hexes


cdef class ShellingGenerator:
    """Level-by-level breadth-first table generation."""

    cdef Generator g

    def __init__(self, int n, int workers, long long max_entries, bint record_rejected, cube):
        gen_init(self.g, n, workers, max_entries, record_rejected, _flat(cube))

    @property
    def done(self):
        return self.g.done()

    @property
    def depth(self):
        return self.g.depth

    @property
    def overflow(self):
        return self.g.overflow

    def __len__(self):
        return self.g.n_entries()

    def step(self):
        with nogil:
            self.g.step()

    def count(self, int d):
        return gen_count(self.g, d)

    def export(self):
        cdef string blob
        cdef vector[long long] so, qo, ho
        cdef vector[unsigned int] q, h
        gen_export(self.g, blob, so, qo, q, ho, h)
        sig_blob = np.frombuffer(blob.data()[:blob.size()], dtype=np.uint8).copy()
        sig_off = np.asarray(<long long[:so.size()]> so.data(), dtype=np.int64).copy()
        quad_off = np.asarray(<long long[:qo.size()]> qo.data(), dtype=np.int64).copy()
        hex_off = np.asarray(<long long[:ho.size()]> ho.data(), dtype=np.int64).copy()
        if q.size():
            quads = np.asarray(<unsigned int[:q.size()]> q.data()).copy().reshape(-1, 4)
        else:
            quads = np.zeros((0, 4), dtype=np.uint32)
        if h.size():
            hexes = np.asarray(<unsigned int[:h.size()]> h.data()).copy().reshape(-1, 8)
        else:
            hexes = np.zeros((0, 8), dtype=np.uint32)
        return sig_blob, sig_off, quad_off, quads.astype(np.uint32), hex_off, hexes.astype(np.uint32)

    def rejected(self):
        cdef vector[string] keys
        cdef vector[int] depth
        gen_rejected(self.g, keys, depth)
        out = []
        cdef size_t i
        for i in range(keys.size()):
            k = keys[i].data()[:keys[i].size()]
            out.append(([tuple(k[j:j + 4]) for j in range(0, len(k), 4)], depth[i]))
        out.sort()
        return out


cdef class NativeTable:
    """Canonical-form index over the boundaries of a shelling table."""

    cdef TableIndex index

    def __init__(self, quads, quad_off):
        cdef unsigned int[:, ::1] q = np.ascontiguousarray(quads, dtype=np.uint32)
        cdef long long[::1] qo = np.ascontiguousarray(quad_off, dtype=np.int64)
        cdef Py_ssize_t i
        for i in range(qo.shape[0] - 1):
            if qo[i + 1] > qo[i]:
                table_index_add(self.index, i, &q[qo[i], 0], qo[i + 1] - qo[i])

    def lookup(self, quads):
        """``(entry, sigma)`` with ``sigma[stored id] = id in quads``, or None."""
        cdef vector[int] sigma
        cdef int e = table_index_lookup(self.index, _flat(quads), sigma)
        if e < 0:
            return None
        return e, [x for x in sigma if x >= 0]


cdef int _on_hit(void* ctx, const int* prefix, int n_prefix, const int* cavity, int n_cavity,
                 int entry, const int* sigma, int n_sigma, int next_id) noexcept with gil:
    cdef NativeSearch s = <NativeSearch> ctx
    try:
        hexes = [tuple(prefix[8 * i + k] for k in range(8)) for i in range(n_prefix)]
        cav = [tuple(cavity[4 * i + k] for k in range(4)) for i in range(n_cavity)]
        sig = [sigma[i] for i in range(n_sigma)]
        return 1 if s.hit_handler(hexes, cav, entry, sig, next_id) else 0
    except BaseException as e:
        s.error = e
        return 1


cdef int _poll(void* ctx) noexcept with gil:
    cdef NativeSearch s = <NativeSearch> ctx
    try:
        PyErr_CheckSignals()
    except BaseException as e:
        s.error = e
        return 1
    return 0


cdef class NativeSearch:
    """Depth-first flip search (exhaustive, or stopping at table boundaries)."""

    cdef SearchHandle h
    cdef public object hit_handler
    cdef public object error
    cdef NativeTable table

    def __init__(self, quads, group, identity, int V):
        self.h.set_target(_flat(quads))
        cdef vector[int] flat
        for g in group:
            for a in range(V):
                flat.push_back(g.get(a, -1))
        self.h.set_group(flat, V, [1 if x else 0 for x in identity])
        self.h.set_poll(_poll, <void*> self)
        self.error = None

    def configure(self, int h_max, int v_max, long long node_budget, double time_budget,
                  bint first, bint sbdd, int M):
        self.h.set_limits(h_max, v_max, node_budget, time_budget)
        self.h.set_mode(first, sbdd, M)

    def use_table(self, NativeTable table, handler):
        self.table = table
        self.hit_handler = handler
        self.h.set_table(&table.index, _on_hit, <void*> self)

    def assign(self, children, bint count_root):
        self.h.assigned = list(children)
        self.h.use_assigned = True
        self.h.count_root = count_root

    def root_children(self):
        return self.h.root_children()

    def run(self):
        cdef int r
        with nogil:
            r = self.h.run()
        if self.error is not None:
            e, self.error = self.error, None
            raise e
        return r

    def solutions(self):
        cdef vector[int] buf
        out = []
        for i in range(self.h.n_found()):
            self.h.solution(i, buf)
            out.append((self.h.solution_child(i),
                        [tuple(buf[j + k] for k in range(8)) for j in range(0, buf.size(), 8)]))
        return out

    def stats(self):
        cdef SearchStatsView* st = hx_stats(&self.h)
        return {
            "nodes": st.nodes, "sbdd_prunes": st.sbdd_prunes, "vmax_prunes": st.vmax_prunes,
            "solutions": st.solutions, "table_hits": st.table_hits,
        }
