// Flat-array entry points used by the Cython wrapper.
#pragma once

#include "engine.hpp"

namespace hx {

inline std::vector<Quad> quads_from_flat(const std::vector<int>& flat) {
    std::vector<Quad> q(flat.size() / 4);
    for (size_t i = 0; i < q.size(); ++i)
        for (int k = 0; k < 4; ++k) q[i][k] = flat[i * 4 + k];
    return q;
}

inline void flat_from_quads(const std::vector<Quad>& q, std::vector<int>& out) {
    out.clear();
    for (auto& x : q) out.insert(out.end(), x.begin(), x.end());
}

// 15 ints per site: kind, nq, 5 quad slots (-1 padded), 8 corners
inline std::vector<int> flips_flat(const std::vector<int>& quads) {
    Surf Q(quads_from_flat(quads));
    std::vector<int> out;
    for (const Site& s : enumerate_flips(Q)) {
        out.push_back(s.kind);
        out.push_back(s.nq);
        for (int k = 0; k < 5; ++k) out.push_back(k < s.nq ? s.qs[k] : -1);
        out.insert(out.end(), s.emb.begin(), s.emb.end());
    }
    return out;
}

// canonical quads (4 labels each), label per vertex id (-1 if absent)
inline void canonical_flat(const std::vector<int>& quads, std::vector<int>& form, std::vector<int>& label) {
    Surf Q(quads_from_flat(quads));
    Canon cf;
    canonical(Q, cf);
    form.clear();
    for (u64 x : cf.form)
        for (int t = 0; t < 4; ++t) form.push_back(int((x >> (48 - 16 * t)) & 0xffff));
    label = cf.label;
}

inline std::string signature_flat(const std::vector<int>& quads) {
    Surf Q(quads_from_flat(quads));
    return signature(Q);
}

// hexes hold 8 ids each; a candidate with a repeated corner is rejected
inline bool compatible_flat(const std::vector<int>& hexes, const std::vector<int>& h) {
    Mesh M;
    for (size_t i = 0; i + 8 <= hexes.size(); i += 8) {
        Hex c;
        for (int k = 0; k < 8; ++k) c[k] = hexes[i + k];
        M.add(c);
    }
    Hex c;
    for (int k = 0; k < 8; ++k) c[k] = h[k];
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b)
            if (c[a] == c[b]) return false;
    return M.compatible(c);
}

// -1 when the flip repeats an edge or quad, else the number of quads
inline int apply_flat(const std::vector<int>& quads, const std::vector<int>& corners, int mask,
                      const std::vector<int>& removed, std::vector<int>& out) {
    Surf Q(quads_from_flat(quads)), R;
    Hex c;
    for (int k = 0; k < 8; ++k) c[k] = corners[k];
    if (!apply_hex(Q, c, mask, removed.data(), (int)removed.size(), R)) return -1;
    flat_from_quads(R.q, out);
    return R.nquads();
}

inline void gen_init(Generator& g, int n, int workers, long long max_entries, bool record_rejected,
                     const std::vector<int>& cube) {
    g.init(n, workers, max_entries, record_rejected, quads_from_flat(cube));
}

inline void gen_export(const Generator& g, std::string& sig_blob, std::vector<long long>& sig_off,
                       std::vector<long long>& quad_off, std::vector<unsigned int>& quads,
                       std::vector<long long>& hex_off, std::vector<unsigned int>& hexes) {
    std::vector<int> order = g.sorted_order();
    sig_blob.clear();
    sig_off.assign(1, 0);
    quad_off.assign(1, 0);
    hex_off.assign(1, 0);
    quads.clear();
    hexes.clear();
    for (int i : order) {
        const Entry& e = g.entries[i];
        sig_blob += e.sig;
        sig_off.push_back((long long)sig_blob.size());
        for (char ch : e.quads) quads.push_back(u8(ch));
        quad_off.push_back((long long)quads.size() / 4);
        for (u8 x : e.hexes) hexes.push_back(x);
        hex_off.push_back((long long)hexes.size() / 8);
    }
}

// rejected boundaries not in the table: flat labels and the depth at which they were met
inline void gen_rejected(const Generator& g, std::vector<std::string>& keys, std::vector<int>& depth) {
    keys.clear();
    depth.clear();
    for (auto& kv : g.rejected)
        if (!g.seen.count(std::string_view(kv.first))) {
            keys.push_back(kv.first);
            depth.push_back(kv.second);
        }
}

inline int gen_count(const Generator& g, int d) { return d < (int)g.counts.size() ? (int)g.counts[d] : -1; }

struct SearchHandle {
    Search s;
    TableIndex* index = nullptr;
    std::vector<int> assigned;
    bool use_assigned = false;
    bool count_root = true;

    void set_target(const std::vector<int>& quads) { s.target = Surf(quads_from_flat(quads)); }
    void set_group(const std::vector<int>& flat, int V, const std::vector<int>& identity) {
        s.group.maps.clear();
        s.group.identity.clear();
        for (size_t i = 0; i + V <= flat.size(); i += V) {
            s.group.maps.emplace_back(flat.begin() + i, flat.begin() + i + V);
        }
        for (int x : identity) s.group.identity.push_back(char(x));
    }
    void set_limits(int h_max, int v_max, long long node_budget, double time_budget) {
        s.h_max = h_max;
        s.v_max = v_max;
        s.node_budget = node_budget;
        s.time_budget = time_budget;
    }
    void set_mode(bool first, bool sbdd, int M) {
        s.first = first;
        s.sbdd = sbdd;
        s.M = M;
    }
    void set_table(TableIndex* t, hit_callback cb, void* ctx) {
        s.table = t;
        s.on_hit = cb;
        s.hit_ctx = ctx;
    }
    void set_poll(poll_callback cb, void* ctx) {
        s.poll = cb;
        s.poll_ctx = ctx;
    }
    int run() { return s.run(use_assigned ? &assigned : nullptr, count_root); }
    int root_children() { return s.n_root_children(); }
    int n_found() const { return (int)s.found.size(); }
    void solution(int i, std::vector<int>& out) const {
        out.clear();
        for (auto& h : s.found[i]) out.insert(out.end(), h.begin(), h.end());
    }
    int solution_child(int i) const { return s.found_child[i]; }
};

inline void table_index_add(TableIndex& t, int entry, const unsigned int* quads, int nquads) {
    std::string form(nquads * 4, '\0');
    for (int i = 0; i < nquads * 4; ++i) {
        if (quads[i] > 255) return;  // such entries cannot be a canonical form key
        form[i] = char(quads[i]);
    }
    t.add(entry, form);
}

// entry index (or -1) and the map stored boundary id -> id in ``quads``
inline int table_index_lookup(const TableIndex& t, const std::vector<int>& quads, std::vector<int>& sigma) {
    Surf Q(quads_from_flat(quads));
    return t.lookup(Q, sigma);
}

inline unsigned long long fnv_bytes(const unsigned char* p, size_t n, unsigned long long h) {
    return fnv1a64(p, n, h);
}

}  // namespace hx
