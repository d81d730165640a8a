// Compiled kernels for hexshell: surfaces, quad flips, compatibility,
// canonical forms, table generation and the flip searches.
//
// Every routine mirrors the pure-Python reference in the package, including
// its iteration orders, so both backends produce identical tables and
// identical search trees.
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <deque>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace hx {

using u8 = uint8_t;
using u16 = uint16_t;
using u64 = uint64_t;
using Quad = std::array<int, 4>;
using Hex = std::array<int, 8>;

constexpr int HEX_FACES[6][4] = {{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                 {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}};
constexpr int HEX_EDGES[12][2] = {{0, 1}, {0, 2}, {0, 4}, {1, 3}, {1, 5}, {2, 3},
                                  {2, 6}, {3, 7}, {4, 5}, {4, 6}, {5, 7}, {6, 7}};
// removed-face masks of D1, D2, D3C, D3S, D4, D5
constexpr int KIND_MASK[6] = {32, 40, 42, 56, 43, 47};
// fresh vertices created by each flip kind
constexpr int KIND_FRESH[6] = {4, 2, 1, 0, 0, 0};

inline u64 pkey(int u, int v) {
    return u < v ? (u64(u) << 32) | u64(v) : (u64(v) << 32) | u64(u);
}

inline Quad quad_key(int a, int b, int c, int d) {
    int m = std::min(std::min(a, b), std::min(c, d));
    if (m == a) return b < d ? Quad{a, b, c, d} : Quad{a, d, c, b};
    if (m == b) return c < a ? Quad{b, c, d, a} : Quad{b, a, d, c};
    if (m == c) return d < b ? Quad{c, d, a, b} : Quad{c, b, a, d};
    return a < c ? Quad{d, a, b, c} : Quad{d, c, b, a};
}
inline Quad quad_key(const Quad& q) { return quad_key(q[0], q[1], q[2], q[3]); }

inline u64 pack4(const Quad& q) {
    return (u64(u16(q[0])) << 48) | (u64(u16(q[1])) << 32) | (u64(u16(q[2])) << 16) | u64(u16(q[3]));
}

inline u64 set_key(int a, int b, int c, int d) {
    Quad s{a, b, c, d};
    std::sort(s.begin(), s.end());
    return pack4(s);
}

// -- disks of the cube boundary ----------------------------------------------

inline bool compute_is_disk(int mask) {
    int faces[6], nf = 0;
    for (int f = 0; f < 6; ++f)
        if (mask >> f & 1) faces[nf++] = f;
    if (nf == 0 || nf == 6) return false;
    int reached = 1 << faces[0];
    bool grew = true;
    while (grew) {
        grew = false;
        for (int i = 0; i < nf; ++i) {
            int g = faces[i];
            if (reached >> g & 1) continue;
            for (int f = 0; f < 6; ++f)
                if ((reached >> f & 1) && f / 2 != g / 2) {
                    reached |= 1 << g;
                    grew = true;
                    break;
                }
        }
    }
    if (reached != mask) return false;
    int verts = 0;
    int ecount[8][8] = {};
    for (int i = 0; i < nf; ++i) {
        const int* cyc = HEX_FACES[faces[i]];
        for (int k = 0; k < 4; ++k) {
            verts |= 1 << cyc[k];
            int a = cyc[k], b = cyc[(k + 1) & 3];
            if (a > b) std::swap(a, b);
            ecount[a][b]++;
        }
    }
    int nv = __builtin_popcount(verts), ne = 0;
    int deg[8] = {};
    int any = -1;
    for (int a = 0; a < 8; ++a)
        for (int b = a + 1; b < 8; ++b) {
            if (ecount[a][b]) ++ne;
            if (ecount[a][b] == 1) {
                deg[a]++;
                deg[b]++;
                any = a;
            }
        }
    if (nv - ne + nf != 1) return false;
    int nb = 0;
    for (int a = 0; a < 8; ++a) {
        if (deg[a] && deg[a] != 2) return false;
        if (deg[a]) ++nb;
    }
    int seen = 1 << any, stack[8], sp = 0, cnt = 1;
    stack[sp++] = any;
    while (sp) {
        int x = stack[--sp];
        for (int y = 0; y < 8; ++y) {
            int a = std::min(x, y), b = std::max(x, y);
            if (x != y && ecount[a][b] == 1 && !(seen >> y & 1)) {
                seen |= 1 << y;
                stack[sp++] = y;
                ++cnt;
            }
        }
    }
    return cnt == nb;
}

struct DiskTable {
    bool disk[64];
    DiskTable() {
        for (int m = 0; m < 64; ++m) disk[m] = compute_is_disk(m);
    }
};
inline const DiskTable& disks() {
    static DiskTable t;
    return t;
}
inline bool is_disk(int mask) { return disks().disk[mask]; }

// -- surfaces -----------------------------------------------------------------

struct Surf {
    std::vector<Quad> q;
    int cap = 0;  // one past the largest vertex id
    std::vector<int> voff, vlist, vorder, across;

    Surf() = default;
    explicit Surf(std::vector<Quad> quads) : q(std::move(quads)) { build(); }

    void build() {
        cap = 0;
        for (auto& x : q)
            for (int v : x) cap = std::max(cap, v + 1);
        voff.assign(cap + 1, 0);
        for (auto& x : q)
            for (int v : x) voff[v + 1]++;
        for (int v = 0; v < cap; ++v) voff[v + 1] += voff[v];
        vlist.assign(voff[cap], 0);
        std::vector<int> fill(voff.begin(), voff.end() - 1);
        vorder.clear();
        for (int i = 0; i < (int)q.size(); ++i)
            for (int v : q[i]) {
                if (fill[v] == voff[v]) vorder.push_back(v);
                vlist[fill[v]++] = i;
            }
        across.assign(q.size() * 4, -1);
        for (int i = 0; i < (int)q.size(); ++i)
            for (int j = 0; j < 4; ++j) {
                int u = q[i][j], v = q[i][(j + 1) & 3];
                for (int k = voff[u]; k < voff[u + 1]; ++k) {
                    int t = vlist[k];
                    if (t != i && adjacent_in(t, u, v)) {
                        across[i * 4 + j] = t;
                        break;
                    }
                }
            }
    }

    int nquads() const { return (int)q.size(); }
    int nverts() const { return (int)vorder.size(); }
    int val(int v) const { return (v >= 0 && v < cap) ? voff[v + 1] - voff[v] : 0; }
    bool has_vertex(int v) const { return val(v) > 0; }
    const int* vq_begin(int v) const { return vlist.data() + voff[v]; }
    const int* vq_end(int v) const { return vlist.data() + voff[v + 1]; }

    int pos(int t, int v) const {
        const Quad& x = q[t];
        for (int k = 0; k < 4; ++k)
            if (x[k] == v) return k;
        return -1;
    }
    bool adjacent_in(int t, int u, int v) const {
        int p = pos(t, u);
        return p >= 0 && (q[t][(p + 1) & 3] == v || q[t][(p + 3) & 3] == v);
    }
    bool has_edge(int u, int v) const {
        if (!has_vertex(u)) return false;
        for (const int* t = vq_begin(u); t != vq_end(u); ++t)
            if (adjacent_in(*t, u, v)) return true;
        return false;
    }
    // quad across the edge {u, v} of quad t
    int across_edge(int t, int u, int v) const {
        int p = pos(t, u);
        if (q[t][(p + 1) & 3] == v) return across[t * 4 + p];
        return across[t * 4 + ((p + 3) & 3)];
    }
    int find_quad(const Quad& key) const {
        int a = key[0];
        if (!has_vertex(a)) return -1;
        for (const int* t = vq_begin(a); t != vq_end(a); ++t)
            if (quad_key(q[*t]) == key) return *t;
        return -1;
    }
    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (const int* t = vq_begin(v); t != vq_end(v); ++t) {
            int p = pos(*t, v);
            out.push_back(q[*t][(p + 1) & 3]);
            out.push_back(q[*t][(p + 3) & 3]);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }
};

// -- flip sites -----------------------------------------------------------------

struct Site {
    int kind;
    int nq;
    std::array<int, 5> qs;
    Hex emb;
};

inline bool site_less(const Site& a, const Site& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return std::lexicographical_compare(a.qs.begin(), a.qs.begin() + a.nq, b.qs.begin(),
                                        b.qs.begin() + b.nq);
}

inline int other_nb(const Quad& q, int v, int w) {
    int i = 0;
    while (q[i] != v) ++i;
    int a = q[(i + 1) & 3], b = q[(i + 3) & 3];
    return a == w ? b : a;
}
inline int opposite(const Quad& q, int v) {
    int i = 0;
    while (q[i] != v) ++i;
    return q[(i + 2) & 3];
}
inline bool injective(const Hex& e) {
    for (int i = 0; i < 8; ++i)
        if (e[i] >= 0)
            for (int j = i + 1; j < 8; ++j)
                if (e[i] == e[j]) return false;
    return true;
}
inline bool quad_has(const Quad& q, int v) { return q[0] == v || q[1] == v || q[2] == v || q[3] == v; }

inline void push_site(std::vector<Site>& out, int kind, std::initializer_list<int> qs, const Hex& emb) {
    Site s;
    s.kind = kind;
    s.nq = (int)qs.size();
    int k = 0;
    for (int x : qs) s.qs[k++] = x;
    std::sort(s.qs.begin(), s.qs.begin() + s.nq);
    s.emb = emb;
    out.push_back(s);
}

inline std::vector<Site> enumerate_flips(const Surf& Q) {
    std::vector<Site> out;
    const auto& quads = Q.q;
    int F = Q.nquads();
    // D1
    for (int i = 0; i < F; ++i) {
        const Quad& q = quads[i];
        push_site(out, 0, {i}, Hex{-1, -1, -1, -1, q[0], q[1], q[3], q[2]});
    }
    // D2 and D4, edges in order of first appearance
    for (int i = 0; i < F; ++i)
        for (int jj = 0; jj < 4; ++jj) {
            int j = Q.across[i * 4 + jj];
            if (j <= i) continue;
            int s0 = quads[i][jj], s1 = quads[i][(jj + 1) & 3];
            if (s0 > s1) std::swap(s0, s1);
            const Quad &qa = quads[i], &qb = quads[j];
            int e4 = other_nb(qa, s0, s1), e5 = other_nb(qa, s1, s0);
            int e2 = other_nb(qb, s0, s1), e3 = other_nb(qb, s1, s0);
            Hex emb{-1, -1, e2, e3, e4, e5, s0, s1};
            if (injective(emb)) push_site(out, 1, {i, j}, emb);
            if (Q.val(s0) == 3 && Q.val(s1) == 3) {
                int k6 = -1, k7 = -1, n6 = 0, n7 = 0;
                for (const int* t = Q.vq_begin(s0); t != Q.vq_end(s0); ++t)
                    if (*t != i && *t != j) k6 = *t, ++n6;
                for (const int* t = Q.vq_begin(s1); t != Q.vq_end(s1); ++t)
                    if (*t != i && *t != j) k7 = *t, ++n7;
                if (n6 != 1 || n7 != 1) continue;
                const Quad &q6 = quads[k6], &q7 = quads[k7];
                if (!quad_has(q6, e2) || !quad_has(q6, e4) || !quad_has(q7, e3) || !quad_has(q7, e5))
                    continue;
                Hex e2m{opposite(q6, s0), opposite(q7, s1), e2, e3, e4, e5, s0, s1};
                if (injective(e2m) && k6 != k7) push_site(out, 4, {i, j, k6, k7}, e2m);
            }
        }
    // D3C
    for (int w : Q.vorder) {
        if (Q.val(w) != 3) continue;
        // neighbour pair -> (quad, opposite corner); later duplicates overwrite
        int pa[3], pb[3], pt[3], pc[3], np = 0;
        for (const int* t = Q.vq_begin(w); t != Q.vq_end(w); ++t) {
            const Quad& q = quads[*t];
            int p = Q.pos(*t, w);
            int a = q[(p + 1) & 3], b = q[(p + 3) & 3];
            if (a > b) std::swap(a, b);
            int k = 0;
            while (k < np && !(pa[k] == a && pb[k] == b)) ++k;
            if (k == np) ++np;
            pa[k] = a, pb[k] = b, pt[k] = *t, pc[k] = q[(p + 2) & 3];
        }
        int ns[6], nn = 0;
        for (int k = 0; k < np; ++k) ns[nn++] = pa[k], ns[nn++] = pb[k];
        std::sort(ns, ns + nn);
        nn = int(std::unique(ns, ns + nn) - ns);
        if (nn != 3) continue;
        auto find = [&](int a, int b) {
            for (int k = 0; k < np; ++k)
                if (pa[k] == a && pb[k] == b) return k;
            return -1;
        };
        int n0 = ns[0], n1 = ns[1], n2 = ns[2];
        int k5 = find(n0, n1), k3 = find(n0, n2), k1 = find(n1, n2);
        if (k5 < 0 || k3 < 0 || k1 < 0) continue;
        Hex emb{-1, pc[k1], pc[k3], n2, pc[k5], n1, n0, w};
        if (injective(emb)) push_site(out, 2, {pt[k1], pt[k3], pt[k5]}, emb);
    }
    // D3S
    for (int m = 0; m < F; ++m) {
        const Quad& q = quads[m];
        for (int t = 0; t < 2; ++t) {
            int oa = Q.across_edge(m, q[t], q[t + 1]);
            int ob = Q.across_edge(m, q[t + 2], q[(t + 3) & 3]);
            if (oa == ob) continue;
            int v6, v7, i5, i4;
            if (oa < ob) {
                v6 = q[t], v7 = q[t + 1], i5 = oa, i4 = ob;
            } else {
                v6 = q[t + 2], v7 = q[(t + 3) & 3], i5 = ob, i4 = oa;
            }
            if (v6 > v7) std::swap(v6, v7);
            int v2 = other_nb(q, v6, v7), v3 = other_nb(q, v7, v6);
            const Quad &q5 = quads[i5], &q4 = quads[i4];
            int v4 = other_nb(q5, v6, v7), v5 = other_nb(q5, v7, v6);
            int v0 = other_nb(q4, v2, v3), v1 = other_nb(q4, v3, v2);
            Hex emb{v0, v1, v2, v3, v4, v5, v6, v7};
            if (injective(emb)) push_site(out, 3, {m, oa, ob}, emb);
        }
    }
    // D5
    for (int m = 0; m < F; ++m) {
        const Quad& q = quads[m];
        if (Q.val(q[0]) != 3 || Q.val(q[1]) != 3 || Q.val(q[2]) != 3 || Q.val(q[3]) != 3) continue;
        Hex emb{-1, -1, -1, -1, q[0], q[1], q[3], q[2]};
        bool ok = true;
        for (int c = 4; c < 8 && ok; ++c) {
            int found = -1, n = 0;
            for (int x : Q.neighbors(emb[c]))
                if (!quad_has(q, x)) found = x, ++n;
            if (n != 1) ok = false;
            else emb[c - 4] = found;
        }
        if (!ok || !injective(emb)) continue;
        int side[4];
        for (int f = 0; f < 4 && ok; ++f) {
            const int* cyc = HEX_FACES[f];
            Quad key = quad_key(emb[cyc[0]], emb[cyc[1]], emb[cyc[2]], emb[cyc[3]]);
            int uv[2], k = 0;
            for (int i = 0; i < 4; ++i)
                if (cyc[i] >= 4) uv[k++] = emb[cyc[i]];
            int o = Q.across_edge(m, uv[0], uv[1]);
            if (o < 0 || quad_key(quads[o]) != key) ok = false;
            else side[f] = o;
        }
        if (ok) push_site(out, 5, {m, side[0], side[1], side[2], side[3]}, emb);
    }
    std::stable_sort(out.begin(), out.end(), site_less);
    return out;
}

// The faces of ``corners`` outside ``mask``, or false when they would repeat
// an edge or a quad of ``Q``.
inline bool added_faces(const Surf& Q, const Hex& c, int mask, std::vector<Quad>& added) {
    bool rim[8][8] = {};
    for (int f = 0; f < 6; ++f)
        if (mask >> f & 1) {
            const int* cyc = HEX_FACES[f];
            for (int i = 0; i < 4; ++i) {
                int a = cyc[i], b = cyc[(i + 1) & 3];
                rim[a][b] = rim[b][a] = true;
            }
        }
    added.clear();
    for (int f = 0; f < 6; ++f) {
        if (mask >> f & 1) continue;
        const int* cyc = HEX_FACES[f];
        for (int i = 0; i < 4; ++i) {
            int a = cyc[i], b = cyc[(i + 1) & 3];
            if (rim[a][b]) continue;
            if (Q.has_edge(c[a], c[b])) return false;
        }
        Quad nq{c[cyc[0]], c[cyc[1]], c[cyc[2]], c[cyc[3]]};
        if (Q.find_quad(quad_key(nq)) >= 0) return false;
        added.push_back(nq);
    }
    return true;
}

inline void replace_quads(const Surf& Q, const int* removed, int nremoved, const std::vector<Quad>& added,
                          Surf& out) {
    out.q.clear();
    out.q.reserve(Q.q.size() + added.size());
    for (int i = 0; i < Q.nquads(); ++i) {
        bool gone = false;
        for (int k = 0; k < nremoved; ++k)
            if (removed[k] == i) gone = true;
        if (!gone) out.q.push_back(Q.q[i]);
    }
    for (auto& x : added) out.q.push_back(x);
    out.build();
}

// Replace the removed quads by the other faces of ``corners``.  False when
// the new boundary would repeat an edge or a quad.
inline bool apply_hex(const Surf& Q, const Hex& c, int mask, const int* removed, int nremoved, Surf& out) {
    std::vector<Quad> added;
    if (!added_faces(Q, c, mask, added)) return false;
    replace_quads(Q, removed, nremoved, added, out);
    return true;
}

inline Hex site_corners(const Site& s, int& next_id) {
    Hex c = s.emb;
    for (int k = 0; k < 8; ++k)
        if (c[k] < 0) c[k] = next_id++;
    return c;
}

inline bool perform_flip(const Surf& Q, const Site& s, int& next_id, Surf& out, Hex& corners) {
    corners = site_corners(s, next_id);
    return apply_hex(Q, corners, KIND_MASK[s.kind], s.qs.data(), s.nq, out);
}

// Faces of ``c`` found on ``Q`` when gluing ``c`` is a flip; mask 63 when ``c``
// closes a 6-quad cavity.  Returns -1 otherwise.
inline int hex_attachment(const Surf& Q, const Hex& c, std::vector<int>& idx) {
    int mask = 0;
    idx.clear();
    for (int f = 0; f < 6; ++f) {
        const int* cyc = HEX_FACES[f];
        int a = c[cyc[0]], b = c[cyc[1]];
        if (!Q.has_vertex(a)) continue;
        u64 want = set_key(c[cyc[0]], c[cyc[1]], c[cyc[2]], c[cyc[3]]);
        for (const int* t = Q.vq_begin(a); t != Q.vq_end(a); ++t) {
            if (!Q.adjacent_in(*t, a, b)) continue;
            const Quad& x = Q.q[*t];
            if (set_key(x[0], x[1], x[2], x[3]) == want) {
                mask |= 1 << f;
                idx.push_back(*t);
                break;
            }
        }
    }
    std::sort(idx.begin(), idx.end());
    if (mask == 63) return Q.nquads() == 6 ? 63 : -1;
    if (!mask || !is_disk(mask)) return -1;
    int count[8] = {};
    for (int f = 0; f < 6; ++f)
        if (mask >> f & 1)
            for (int k = 0; k < 4; ++k) count[HEX_FACES[f][k]]++;
    for (int k = 0; k < 8; ++k)
        if (!count[k] && Q.has_vertex(c[k])) return -1;
    for (int k = 0; k < 8; ++k)
        if (count[k] == 3 && Q.val(c[k]) != 3) return -1;
    return mask;
}

inline bool closing_hex(const Surf& Q, Hex& out) {
    if (Q.nquads() != 6 || Q.nverts() != 8) return false;
    for (int v : Q.vorder)
        if (Q.val(v) != 3) return false;
    const Quad& b = Q.q[0];
    out = Hex{b[0], b[1], b[3], b[2], -1, -1, -1, -1};
    for (int k = 0; k < 4; ++k) {
        int found = -1, n = 0;
        for (int x : Q.neighbors(out[k]))
            if (!quad_has(b, x)) found = x, ++n;
        if (n != 1) return false;
        out[k + 4] = found;
    }
    for (int i = 0; i < 8; ++i)
        for (int j = i + 1; j < 8; ++j)
            if (out[i] == out[j]) return false;
    for (auto& f : HEX_FACES)
        if (Q.find_quad(quad_key(out[f[0]], out[f[1]], out[f[2]], out[f[3]])) < 0) return false;
    return true;
}

// -- signatures and canonical forms -------------------------------------------

inline void put16(std::string& s, int x) {
    s.push_back(char(x & 255));
    s.push_back(char((x >> 8) & 255));
}

inline std::string signature(const Surf& Q) {
    std::vector<std::pair<int, int>> hist;
    {
        std::vector<int> cnt;
        for (int v : Q.vorder) {
            int d = Q.val(v);
            if ((int)cnt.size() <= d) cnt.resize(d + 1, 0);
            cnt[d]++;
        }
        for (int d = 0; d < (int)cnt.size(); ++d)
            if (cnt[d]) hist.push_back({d, cnt[d]});
    }
    std::vector<std::pair<u64, int>> pairs;
    {
        std::unordered_map<u64, int> m;
        for (int i = 0; i < Q.nquads(); ++i)
            for (int j = 0; j < 4; ++j) {
                int o = Q.across[i * 4 + j];
                if (o < i) continue;
                int a = Q.val(Q.q[i][j]), b = Q.val(Q.q[i][(j + 1) & 3]);
                if (a > b) std::swap(a, b);
                m[(u64(a) << 32) | u64(b)]++;
            }
        pairs.assign(m.begin(), m.end());
        std::sort(pairs.begin(), pairs.end());
    }
    std::string s;
    put16(s, (int)hist.size());
    for (auto& h : hist) put16(s, h.first), put16(s, h.second);
    put16(s, (int)pairs.size());
    for (auto& p : pairs) put16(s, int(p.first >> 32)), put16(s, int(p.first & 0xffffffffu)), put16(s, p.second);
    return s;
}

struct Canon {
    std::vector<u64> form;
    std::vector<int> label;  // vertex id -> canonical id, -1 when absent
};

inline u64 placement_class(const Surf& Q, const Quad& p) {
    return (u64(Q.val(p[0])) << 48) | (u64(Q.val(p[1])) << 32) | (u64(Q.val(p[2])) << 16) | u64(Q.val(p[3]));
}

inline void placements(const Quad& q, Quad out[8]) {
    int a = q[0], b = q[1], c = q[2], d = q[3];
    out[0] = {a, b, c, d}, out[1] = {b, c, d, a}, out[2] = {c, d, a, b}, out[3] = {d, a, b, c};
    out[4] = {a, d, c, b}, out[5] = {d, c, b, a}, out[6] = {c, b, a, d}, out[7] = {b, a, d, c};
}

inline void rarest_class(const Surf& Q, u64& cls, std::vector<int>& members) {
    int F = Q.nquads();
    std::vector<u64> qc(F);
    Quad pl[8];
    for (int i = 0; i < F; ++i) {
        placements(Q.q[i], pl);
        u64 best = ~u64(0);
        for (auto& p : pl) best = std::min(best, placement_class(Q, p));
        qc[i] = best;
    }
    std::vector<u64> sorted = qc;
    std::sort(sorted.begin(), sorted.end());
    size_t best_n = SIZE_MAX;
    cls = 0;
    for (size_t i = 0; i < sorted.size();) {
        size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        if (j - i < best_n) best_n = j - i, cls = sorted[i];
        i = j;
    }
    members.clear();
    for (int i = 0; i < F; ++i)
        if (qc[i] == cls) members.push_back(i);
}

// Breadth-first relabeling from a placement of quad j0; cycles are kept in
// traversal orientation and rotated to start at their smallest label.
inline void bfs_form(const Surf& Q, int j0, const Quad& start, std::vector<int>& label,
                     std::vector<u64>& form, std::vector<char>& seen, std::vector<std::pair<Quad, int>>& queue) {
    int F = Q.nquads();
    label.assign(Q.cap, -1);
    seen.assign(F, 0);
    queue.clear();
    int next = 0;
    for (int v : start) label[v] = next++;
    seen[j0] = 1;
    queue.push_back({start, j0});
    for (size_t h = 0; h < queue.size(); ++h) {
        Quad cur = queue[h].first;
        int ci = queue[h].second;
        for (int k = 0; k < 4; ++k) {
            int u = cur[k], v = cur[(k + 1) & 3];
            int o = Q.across_edge(ci, u, v);
            if (o < 0 || seen[o]) continue;
            seen[o] = 1;
            const Quad& x = Q.q[o];
            int p = Q.pos(o, v);
            Quad cyc;
            if (x[(p + 1) & 3] == u) cyc = {v, u, x[(p + 2) & 3], x[(p + 3) & 3]};
            else cyc = {v, u, x[(p + 2) & 3], x[(p + 1) & 3]};
            for (int t = 2; t < 4; ++t)
                if (label[cyc[t]] < 0) label[cyc[t]] = next++;
            queue.push_back({cyc, o});
        }
    }
    form.clear();
    for (auto& e : queue) {
        Quad r{label[e.first[0]], label[e.first[1]], label[e.first[2]], label[e.first[3]]};
        int m = 0;
        for (int t = 1; t < 4; ++t)
            if (r[t] < r[m]) m = t;
        Quad rot{r[m], r[(m + 1) & 3], r[(m + 2) & 3], r[(m + 3) & 3]};
        form.push_back(pack4(rot));
    }
    std::sort(form.begin(), form.end());
}

inline void canonical(const Surf& Q, Canon& out) {
    u64 cls;
    std::vector<int> members;
    rarest_class(Q, cls, members);
    std::vector<int> label;
    std::vector<u64> form;
    std::vector<char> seen;
    std::vector<std::pair<Quad, int>> queue;
    bool have = false;
    Quad pl[8];
    for (int j : members) {
        placements(Q.q[j], pl);
        for (auto& p : pl) {
            if (placement_class(Q, p) != cls) continue;
            bfs_form(Q, j, p, label, form, seen, queue);
            if (!have || form < out.form) {
                out.form.swap(form);
                out.label.swap(label);
                have = true;
            }
        }
    }
}

// canonical quads as bytes, four labels per quad (labels must be < 256)
inline bool form_bytes(const std::vector<u64>& form, std::string& s) {
    s.resize(form.size() * 4);
    for (size_t i = 0; i < form.size(); ++i)
        for (int t = 0; t < 4; ++t) {
            u64 x = (form[i] >> (48 - 16 * t)) & 0xffff;
            if (x > 255) return false;
            s[i * 4 + t] = char(x);
        }
    return true;
}

// -- compatibility bookkeeping ------------------------------------------------

enum { EDGE = 1, QDIAG = 2, HDIAG = 3 };

struct Rel {
    int type;
    int count;
    u64 partner;
};

struct Mesh {
    std::vector<Hex> hexes;
    std::unordered_map<u64, Rel> rel;
    std::vector<std::vector<std::pair<u64, bool>>> log;

    bool compatible(const Hex& c) const {
        for (auto& e : HEX_EDGES) {
            auto it = rel.find(pkey(c[e[0]], c[e[1]]));
            if (it != rel.end() && it->second.type != EDGE) return false;
        }
        for (auto& f : HEX_FACES) {
            u64 d1 = pkey(c[f[0]], c[f[2]]), d2 = pkey(c[f[1]], c[f[3]]);
            auto r1 = rel.find(d1), r2 = rel.find(d2);
            bool n1 = r1 == rel.end(), n2 = r2 == rel.end();
            if (n1 && n2) continue;
            if (n1 || n2) return false;
            if (r1->second.type != QDIAG || r2->second.type != QDIAG || r1->second.partner != d2 ||
                r1->second.count >= 2)
                return false;
        }
        for (int a = 0; a < 4; ++a)
            if (rel.count(pkey(c[a], c[7 - a]))) return false;
        return true;
    }

    void add(const Hex& c) {
        std::vector<std::pair<u64, bool>> ch;
        ch.reserve(28);
        auto bump = [&](u64 k, int type, u64 partner) {
            auto it = rel.find(k);
            if (it == rel.end()) {
                rel.emplace(k, Rel{type, 1, partner});
                ch.push_back({k, true});
            } else {
                it->second.count++;
                ch.push_back({k, false});
            }
        };
        for (auto& e : HEX_EDGES) bump(pkey(c[e[0]], c[e[1]]), EDGE, 0);
        for (auto& f : HEX_FACES) {
            u64 d1 = pkey(c[f[0]], c[f[2]]), d2 = pkey(c[f[1]], c[f[3]]);
            bump(d1, QDIAG, d2);
            bump(d2, QDIAG, d1);
        }
        for (int a = 0; a < 4; ++a) {
            u64 k = pkey(c[a], c[7 - a]);
            rel[k] = Rel{HDIAG, 1, 0};
            ch.push_back({k, true});
        }
        hexes.push_back(c);
        log.push_back(std::move(ch));
    }

    void pop() {
        auto& ch = log.back();
        for (auto it = ch.rbegin(); it != ch.rend(); ++it) {
            if (it->second) rel.erase(it->first);
            else rel[it->first].count--;
        }
        log.pop_back();
        hexes.pop_back();
    }

    void clear() {
        hexes.clear();
        rel.clear();
        log.clear();
    }
};

// -- vertex maps ----------------------------------------------------------------

struct VMap {
    std::vector<int> fwd, inv;
    explicit VMap(int cap = 0) : fwd(cap, -1), inv(cap, -1) {}
    void grow(int v) {
        if (v >= (int)fwd.size()) {
            fwd.resize(v + 1, -1);
            inv.resize(v + 1, -1);
        }
    }
    int get(int a) const { return a < (int)fwd.size() ? fwd[a] : -1; }
    bool has(int a) const { return get(a) >= 0; }
    bool bind(int a, int b) {
        int fa = get(a);
        if (fa >= 0) return fa == b;
        if (b < (int)inv.size() && inv[b] >= 0) return false;
        grow(std::max(a, b));
        fwd[a] = b;
        inv[b] = a;
        return true;
    }
    void unbind(int a) {
        inv[fwd[a]] = -1;
        fwd[a] = -1;
    }
};

// -- no-good sequence and dominance detection ---------------------------------

struct NoGoods {
    std::vector<Hex> items;
    std::vector<char> branch;
    std::vector<size_t> marks;

    void enter(const Hex& h) {
        items.push_back(h);
        branch.push_back(0);
        marks.push_back(items.size());
        items.push_back(Hex{});
        branch.push_back(1);
    }
    void exit() {
        size_t m = marks.back();
        marks.pop_back();
        items.resize(m);
        branch.resize(m);
    }
    void clear() {
        items.clear();
        branch.clear();
        marks.clear();
    }
};

inline int corner_of(const Hex& h, int v) {
    for (int k = 0; k < 8; ++k)
        if (h[k] == v) return k;
    return -1;
}

// Extend sigma from the mapped face ``face`` of ``c`` onto ``t``.
inline bool complete_cell(const Hex& c, const int* face, const Hex& t, VMap& sigma, std::vector<int>& undo) {
    for (int i = 0; i < 4; ++i) {
        int k = face[i];
        int x = -1;
        for (int b : {1, 2, 4}) {
            int j = k ^ b;
            if (j != face[0] && j != face[1] && j != face[2] && j != face[3]) x = c[j];
        }
        int kt = corner_of(t, sigma.get(c[k]));
        if (kt < 0) return false;
        int img[4];
        for (int s = 0; s < 4; ++s) img[s] = sigma.get(c[face[s]]);
        int y = -1, ny = 0;
        for (int b : {1, 2, 4}) {
            int yy = t[kt ^ b];
            if (yy != img[0] && yy != img[1] && yy != img[2] && yy != img[3]) y = yy, ++ny;
        }
        if (ny != 1) return false;
        int fx = sigma.get(x);
        if (fx >= 0) {
            if (fx != y) return false;
        } else if (!sigma.bind(x, y)) {
            return false;
        } else {
            undo.push_back(x);
        }
    }
    return true;
}

struct FaceIndex {
    std::vector<std::pair<u64, int>> items;
    void build(const std::vector<Hex>& hexes) {
        items.clear();
        for (int j = 0; j < (int)hexes.size(); ++j)
            for (auto& f : HEX_FACES) {
                const Hex& c = hexes[j];
                items.push_back({set_key(c[f[0]], c[f[1]], c[f[2]], c[f[3]]), j});
            }
        std::sort(items.begin(), items.end());
    }
};

inline bool match_no_good(const NoGoods& S, const std::vector<Hex>& hexes, VMap& sigma, const FaceIndex& index,
                          std::vector<int>& seen) {
    seen.clear();
    std::vector<char> used(hexes.size(), 0);
    std::vector<int> undo;
    size_t n = S.items.size();
    for (size_t i = 0; i < n; ++i) {
        if (S.branch[i]) continue;
        const Hex& c = S.items[i];
        bool on_path = i + 1 < n && S.branch[i + 1];
        bool success = false;
        const int* face = nullptr;
        for (auto& f : HEX_FACES)
            if (sigma.has(c[f[0]]) && sigma.has(c[f[1]]) && sigma.has(c[f[2]]) && sigma.has(c[f[3]])) {
                face = f;
                break;
            }
        if (face) {
            u64 image = set_key(sigma.get(c[face[0]]), sigma.get(c[face[1]]), sigma.get(c[face[2]]),
                                sigma.get(c[face[3]]));
            auto lo = std::lower_bound(index.items.begin(), index.items.end(), std::make_pair(image, -1));
            for (auto it = lo; it != index.items.end() && it->first == image; ++it) {
                int j = it->second;
                if (used[j]) continue;
                const Hex& t = hexes[j];
                undo.clear();
                bool ok = complete_cell(c, face, t, sigma, undo);
                if (ok)
                    for (int a = 0; a < 8 && ok; ++a) ok = corner_of(t, sigma.get(c[a])) >= 0;
                if (ok)
                    for (auto& e : HEX_EDGES) {
                        int ka = corner_of(t, sigma.get(c[e[0]])), kb = corner_of(t, sigma.get(c[e[1]]));
                        int x = ka ^ kb;
                        if (x != 1 && x != 2 && x != 4) {
                            ok = false;
                            break;
                        }
                    }
                if (ok) {
                    seen.push_back(j);
                    used[j] = 1;
                    success = true;
                    break;
                }
                for (int x : undo) sigma.unbind(x);
            }
        }
        if (on_path) {
            if (!success) return false;
        } else if (success) {
            return true;
        }
    }
    return false;
}

inline bool cavity_after(const Surf& target, const std::vector<Hex>& hexes, const std::vector<int>& which, Surf& out) {
    std::unordered_map<u64, std::pair<int, int>> count;  // key -> (count, order slot)
    std::vector<Quad> cycles;
    auto add = [&](const Quad& q) {
        u64 k = pack4(quad_key(q));
        auto it = count.find(k);
        if (it == count.end()) {
            count.emplace(k, std::make_pair(1, (int)cycles.size()));
            cycles.push_back(q);
        } else {
            it->second.first++;
        }
    };
    for (auto& q : target.q) add(q);
    for (int j : which) {
        const Hex& c = hexes[j];
        for (auto& f : HEX_FACES) add(Quad{c[f[0]], c[f[1]], c[f[2]], c[f[3]]});
    }
    std::vector<int> odd(cycles.size(), 0);
    for (auto& kv : count)
        if (kv.second.first % 2 == 1) odd[kv.second.second] = 1;
    out.q.clear();
    for (size_t i = 0; i < cycles.size(); ++i)
        if (odd[i]) out.q.push_back(cycles[i]);
    if (out.q.empty()) return false;
    out.build();
    return true;
}

struct ReverseShell {
    int M;
    int tested = 0;
    bool rec(const Surf* Q, std::vector<Hex>& rest) {
        if (rest.empty()) return true;
        if (!Q) return false;
        std::vector<int> idx;
        for (size_t i = 0; i < rest.size(); ++i) {
            Hex c = rest[i];
            int mask = hex_attachment(*Q, c, idx);
            if (mask >= 0) {
                Surf Q2;
                bool valid = true;
                bool closed = mask == 63;
                if (!closed) valid = apply_hex(*Q, c, mask, idx.data(), (int)idx.size(), Q2);
                if (valid) {
                    std::vector<Hex> r2;
                    r2.reserve(rest.size() - 1);
                    for (size_t k = 0; k < rest.size(); ++k)
                        if (k != i) r2.push_back(rest[k]);
                    if (rec(closed ? nullptr : &Q2, r2)) return true;
                    ++tested;
                }
            }
            if (tested >= M) return false;
        }
        return false;
    }
};

struct Group {
    std::vector<std::vector<int>> maps;  // target vertex -> image
    std::vector<char> identity;
};

inline bool visited_symmetric_counterpart(const NoGoods& S, const std::vector<Hex>& hexes, const Group& group,
                                          const Surf& target, int M) {
    if (S.items.empty()) return false;
    FaceIndex index;
    index.build(hexes);
    std::vector<int> seen;
    for (size_t g = 0; g < group.maps.size(); ++g) {
        VMap sigma((int)group.maps[g].size());
        for (int a = 0; a < (int)group.maps[g].size(); ++a)
            if (group.maps[g][a] >= 0) sigma.bind(a, group.maps[g][a]);
        if (!match_no_good(S, hexes, sigma, index, seen)) continue;
        std::vector<char> in(hexes.size(), 0);
        for (int j : seen) in[j] = 1;
        std::vector<Hex> surplus;
        for (size_t j = 0; j < hexes.size(); ++j)
            if (!in[j]) surplus.push_back(hexes[j]);
        if (surplus.empty()) {
            if (group.identity[g]) continue;
            return true;
        }
        Surf cav;
        bool have = cavity_after(target, hexes, seen, cav);
        ReverseShell rs{M};
        if (rs.rec(have ? &cav : nullptr, surplus)) return true;
    }
    return false;
}

// -- searches -------------------------------------------------------------------

struct Stats {
    long long nodes = 0, sbdd_prunes = 0, vmax_prunes = 0, solutions = 0, table_hits = 0;
};

enum StopReason { STOP_NONE = 0, STOP_FIRST = 1, STOP_NODES = 2, STOP_TIME = 3, STOP_INTERRUPT = 4 };

struct StopSearch {
    int reason;
};

struct Child {
    Surf Q;
    Hex h;
    int next_id;
};

// Lookup interface for table-assisted searches: returns the entry index and
// fills ``sigma`` (stored boundary id -> cavity id) on a hit.
struct TableIndex {
    std::unordered_map<std::string, int> by_form;
    int min_f = 1 << 30, max_f = 0, max_v = 0;

    void add(int entry, const std::string& form) {
        by_form.emplace(form, entry);
        int F = int(form.size() / 4);
        min_f = std::min(min_f, F);
        max_f = std::max(max_f, F);
        int v = 0;
        for (char ch : form) v = std::max(v, int(u8(ch)) + 1);
        max_v = std::max(max_v, v);
    }

    int lookup(const Surf& Q, std::vector<int>& sigma) const {
        int F = Q.nquads();
        if (F < min_f || F > max_f || Q.nverts() > max_v) return -1;
        Canon cf;
        canonical(Q, cf);
        std::string key;
        if (!form_bytes(cf.form, key)) return -1;
        auto it = by_form.find(key);
        if (it == by_form.end()) return -1;
        sigma.assign(Q.nverts(), -1);
        for (int v = 0; v < (int)cf.label.size(); ++v)
            if (cf.label[v] >= 0) sigma[cf.label[v]] = v;
        return it->second;
    }
};

// returns nonzero when the assembled mesh was accepted; ``prefix`` holds
// 8 ids per hexahedron, ``cavity`` 4 per quad and ``sigma`` maps stored boundary ids to cavity ids
typedef int (*hit_callback)(void* ctx, const int* prefix, int n_prefix, const int* cavity, int n_cavity,
                            int entry, const int* sigma, int n_sigma, int next_id);
typedef int (*poll_callback)(void* ctx);

struct Search {
    Surf target;
    int h_max = 1, v_max = 0;
    long long node_budget = -1;
    double time_budget = -1;
    bool first = false, sbdd = true;
    int M = 10;
    Group group;
    Mesh mesh;
    NoGoods seq;
    Stats stats;
    std::vector<std::vector<Hex>> found;
    std::vector<int> found_child;
    int current_child = -1;
    std::chrono::steady_clock::time_point deadline;
    bool has_deadline = false;
    // table mode
    const TableIndex* table = nullptr;
    hit_callback on_hit = nullptr;
    void* hit_ctx = nullptr;
    poll_callback poll = nullptr;
    void* poll_ctx = nullptr;

    void start_clock() {
        has_deadline = time_budget >= 0;
        if (has_deadline)
            deadline = std::chrono::steady_clock::now() +
                       std::chrono::microseconds((long long)(time_budget * 1e6));
    }

    void tick() {
        stats.nodes++;
        if (node_budget >= 0 && stats.nodes > node_budget) throw StopSearch{STOP_NODES};
        if ((stats.nodes & 255) == 0) {
            if (has_deadline && std::chrono::steady_clock::now() > deadline) throw StopSearch{STOP_TIME};
            if ((stats.nodes & 65535) == 0 && poll && poll(poll_ctx)) throw StopSearch{STOP_INTERRUPT};
        }
    }

    void emit(const std::vector<Hex>& hexes) {
        found.push_back(hexes);
        found_child.push_back(current_child);
        stats.solutions++;
        if (first) throw StopSearch{STOP_FIRST};
    }

    void children(const Surf& Q, int next_id, int depth, std::vector<Child>& out) {
        out.clear();
        Child ch;
        for (const Site& s : enumerate_flips(Q)) {
            // vertex limit and compatibility before building the child boundary
            if (next_id + KIND_FRESH[s.kind] >= v_max) {
                stats.vmax_prunes++;
                continue;
            }
            int nid = next_id;
            ch.h = site_corners(s, nid);
            if (!mesh.compatible(ch.h)) continue;
            // the child must still be able to shrink to a cube and close it
            if (!table && depth + 1 >= h_max) continue;
            if (!apply_hex(Q, ch.h, KIND_MASK[s.kind], s.qs.data(), s.nq, ch.Q)) continue;
            if (!table && ch.Q.nquads() - 4 * (h_max - depth - 2) > 6) continue;
            ch.next_id = nid;
            out.push_back(std::move(ch));
            ch = Child();
        }
    }

    bool dominated(const Hex& c) {
        if (!sbdd) return false;
        std::vector<Hex> H = mesh.hexes;
        H.push_back(c);
        if (visited_symmetric_counterpart(seq, H, group, target, M)) {
            stats.sbdd_prunes++;
            return true;
        }
        return false;
    }

    void node(const Surf& Q, int next_id) {
        tick();
        int depth = (int)mesh.hexes.size();
        if (table) {
            std::vector<int> sigma;
            int e = table->lookup(Q, sigma);
            if (e >= 0) {
                stats.table_hits++;
                std::vector<int> flat;
                for (auto& h : mesh.hexes) flat.insert(flat.end(), h.begin(), h.end());
                std::vector<int> cav;
                for (auto& q : Q.q) cav.insert(cav.end(), q.begin(), q.end());
                if (on_hit(hit_ctx, flat.data(), (int)mesh.hexes.size(), cav.data(), Q.nquads(), e, sigma.data(),
                           (int)sigma.size(), next_id))
                    throw StopSearch{STOP_FIRST};
            }
            if (depth >= h_max) return;
        } else {
            if (depth >= h_max) return;
            Hex c;
            if (closing_hex(Q, c) && mesh.compatible(c)) {
                std::vector<Hex> sol = mesh.hexes;
                sol.push_back(c);
                emit(sol);
            }
        }
        // same children and order as children(), but a child boundary is
        // only built once the child survives the dominance check
        std::vector<Site> sites = enumerate_flips(Q);
        std::vector<Quad> added;
        Child ch;
        for (const Site& s : sites) {
            if (next_id + KIND_FRESH[s.kind] >= v_max) {
                stats.vmax_prunes++;
                continue;
            }
            int nid = next_id;
            ch.h = site_corners(s, nid);
            if (!mesh.compatible(ch.h)) continue;
            if (!table) {
                if (depth + 1 >= h_max) continue;
                if (Q.nquads() + 6 - 2 * s.nq - 4 * (h_max - depth - 2) > 6) continue;
            }
            if (!added_faces(Q, ch.h, KIND_MASK[s.kind], added)) continue;
            if (dominated(ch.h)) continue;
            replace_quads(Q, s.qs.data(), s.nq, added, ch.Q);
            ch.next_id = nid;
            enter(ch);
        }
    }

    void descend(const Child& k) {
        if (dominated(k.h)) return;
        enter(k);
    }

    void enter(const Child& k) {
        seq.enter(k.h);
        mesh.add(k.h);
        try {
            node(k.Q, k.next_id);
        } catch (...) {
            mesh.pop();
            seq.exit();
            throw;
        }
        mesh.pop();
        seq.exit();
    }

    // Full search, or only the root children listed in ``assigned`` (the
    // others are recorded as explored, as a sequential run would have).
    int run(const std::vector<int>* assigned, bool count_root) {
        start_clock();
        try {
            if (!assigned) {
                node(target, target.cap);
                return STOP_NONE;
            }
            if (count_root) {
                tick();
                Hex c;
                if (closing_hex(target, c) && h_max >= 1) emit(std::vector<Hex>{c});
            }
            if (h_max <= 1) return STOP_NONE;
            std::vector<Child> kids;
            children(target, target.cap, 0, kids);
            std::vector<char> mine(kids.size(), 0);
            for (int i : *assigned)
                if (i >= 0 && i < (int)kids.size()) mine[i] = 1;
            for (size_t i = 0; i < kids.size(); ++i) {
                if (mine[i]) {
                    current_child = (int)i;
                    descend(kids[i]);
                } else if (!dominated(kids[i].h)) {
                    seq.enter(kids[i].h);
                    seq.exit();
                }
            }
        } catch (StopSearch& s) {
            return s.reason;
        }
        return STOP_NONE;
    }

    int n_root_children() {
        std::vector<Child> kids;
        children(target, target.cap, 0, kids);
        return (int)kids.size();
    }
};

// -- shelling table generation ------------------------------------------------

struct Entry {
    std::string sig;
    std::string quads;  // canonical form, one byte per label
    std::vector<u8> hexes;
};

struct LevelNode {
    std::vector<Hex> H;
    std::vector<Quad> Q;
    int next_id;
};

struct ChildRec {
    bool ok;
    std::string key;
    std::vector<int> label;
    std::vector<Quad> Q;
    Hex h;
    int next_id;
};

inline bool entry_from(const std::vector<Quad>& quads, const std::vector<int>& label, const std::string& key,
                       const std::vector<Hex>& H, Entry& e) {
    (void)quads;
    e.quads = key;
    int nb = 0;
    for (int x : label)
        if (x >= 0) ++nb;
    int cap = (int)label.size();
    for (auto& h : H)
        for (int v : h) cap = std::max(cap, v + 1);
    std::vector<int> lab(cap, -1);
    for (int v = 0; v < (int)label.size(); ++v) lab[v] = label[v];
    int nxt = nb;
    e.hexes.clear();
    for (auto& h : H)
        for (int v : h) {
            if (lab[v] < 0) lab[v] = nxt++;
            if (lab[v] > 255) return false;
            e.hexes.push_back(u8(lab[v]));
        }
    return true;
}

inline void expand_parent(const LevelNode& p, bool record_rejected, std::vector<ChildRec>& out) {
    out.clear();
    Surf Q(p.Q);
    Mesh M;
    for (auto& h : p.H) M.add(h);
    Surf Q2;
    Canon cf;
    for (const Site& s : enumerate_flips(Q)) {
        int nid = p.next_id;
        Hex h;
        if (!perform_flip(Q, s, nid, Q2, h)) continue;
        bool ok = M.compatible(h);
        if (!ok && !record_rejected) continue;
        canonical(Q2, cf);
        ChildRec r;
        r.ok = ok;
        if (!form_bytes(cf.form, r.key)) throw std::runtime_error("boundary has more than 256 vertices");
        if (ok) {
            r.label = cf.label;
            r.Q = Q2.q;
        }
        r.h = h;
        r.next_id = nid;
        out.push_back(std::move(r));
    }
}

struct SvHash {
    size_t operator()(std::string_view s) const { return std::hash<std::string_view>()(s); }
};

struct Generator {
    int n = 1, workers = 1;
    long long max_entries = -1;
    bool record_rejected = false;
    int depth = 1;
    bool overflow = false;
    std::deque<Entry> entries;
    std::unordered_set<std::string_view, SvHash> seen;
    std::unordered_map<std::string, int> rejected;
    std::vector<LevelNode> level;
    std::vector<long long> counts;  // counts[d] for d = 0..depth

    // ``cube`` is the oriented boundary of the hexahedron 0..7
    void init(int n_, int workers_, long long max_entries_, bool record_rejected_, const std::vector<Quad>& cube) {
        n = n_;
        workers = std::max(1, workers_);
        max_entries = max_entries_;
        record_rejected = record_rejected_;
        Surf Q(cube);
        Canon cf;
        canonical(Q, cf);
        Entry e;
        std::string key;
        form_bytes(cf.form, key);
        e.sig = signature(Q);
        Hex h{0, 1, 2, 3, 4, 5, 6, 7};
        entry_from(cube, cf.label, key, {h}, e);
        entries.push_back(std::move(e));
        seen.insert(std::string_view(entries.back().quads));
        level.push_back(LevelNode{{h}, cube, 8});
        counts.assign(2, 0);
        counts[1] = 1;
        depth = 1;
    }

    bool done() const { return level.empty() || depth >= n || overflow; }

    // Merge one parent's children; false when max_entries is exceeded.
    bool merge(const LevelNode& p, std::vector<ChildRec>& recs, std::vector<LevelNode>& next, bool last) {
        for (auto& r : recs) {
            if (seen.count(std::string_view(r.key))) continue;
            if (!r.ok) {
                if (record_rejected && !rejected.count(r.key)) rejected.emplace(r.key, depth + 1);
                continue;
            }
            std::vector<Hex> H2 = p.H;
            H2.push_back(r.h);
            Entry e;
            Surf Q2(r.Q);
            e.sig = signature(Q2);
            if (!entry_from(r.Q, r.label, r.key, H2, e)) throw std::runtime_error("too many vertices in a table entry");
            entries.push_back(std::move(e));
            seen.insert(std::string_view(entries.back().quads));
            if (!last) next.push_back(LevelNode{std::move(H2), std::move(r.Q), r.next_id});
            if (max_entries >= 0 && (long long)entries.size() > max_entries) return false;
        }
        return true;
    }

    // Process one breadth-first level.
    void step() {
        std::vector<LevelNode> next;
        bool last = depth + 1 >= n;
        const size_t block = workers > 1 ? 2048 : 1;
        std::vector<std::vector<ChildRec>> recs(block);
        for (size_t b0 = 0; b0 < level.size() && !overflow; b0 += block) {
            size_t b1 = std::min(level.size(), b0 + block);
            if (workers > 1) {
                std::vector<std::thread> pool;
                int nt = std::min<int>(workers, int(b1 - b0));
                for (int t = 0; t < nt; ++t)
                    pool.emplace_back([&, t]() {
                        for (size_t i = b0 + t; i < b1; i += nt) expand_parent(level[i], record_rejected, recs[i - b0]);
                    });
                for (auto& th : pool) th.join();
            } else {
                expand_parent(level[b0], record_rejected, recs[0]);
            }
            for (size_t i = b0; i < b1; ++i)
                if (!merge(level[i], recs[i - b0], next, last)) {
                    overflow = true;
                    break;
                }
        }
        depth += 1;
        counts.push_back((long long)entries.size());
        level.swap(next);
    }

    // entry order of the stored table: signature bytes, then quads
    std::vector<int> sorted_order() const {
        std::vector<int> idx(entries.size());
        for (size_t i = 0; i < idx.size(); ++i) idx[i] = (int)i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            const Entry &x = entries[a], &y = entries[b];
            int c = x.sig.compare(y.sig);
            if (c) return c < 0;
            return x.quads < y.quads;
        });
        return idx;
    }
};

// -- misc -----------------------------------------------------------------------

inline u64 fnv1a64(const u8* data, size_t n, u64 h = 0xcbf29ce484222325ULL) {
    for (size_t i = 0; i < n; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace hx
