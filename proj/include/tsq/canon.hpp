#pragma once

// Canonical form and automorphism-group order for a complete triple system,
// via a colored-graph encoding: one vertex per element, one per triangle,
// undirected membership edges, directed tail arcs, idempotency as a vertex
// color. Graph isomorphisms restricted to element vertices are exactly the
// quasigroup isomorphisms, so equal keys <=> isomorphic quasigroups.
//
// The search is individualization-refinement. The key is the
// lexicographically least serialization over all leaves of the search tree;
// the automorphism order is the number of leaves attaining it. Subtrees are
// pruned only on node invariants (cell-size sequences), which are equal on
// isomorphic search nodes, so every minimal leaf survives pruning and the
// leaf count is exact.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "tsq/error.hpp"
#include "tsq/triples.hpp"

namespace tsq {

struct EncodedGraph {
    int element_count = 0;
    int vertex_count = 0;
    std::vector<uint64_t> und;      // membership edges, symmetric
    std::vector<uint64_t> arc_out;  // tail arcs x -> d(x)
    std::vector<uint64_t> arc_in;
    std::vector<int> color;  // 0 plain element, 1 idempotent element, 2 triple
};

inline EncodedGraph encode(const TripleSystem& s) {
    const int n = s.order();
    const int nv = n + static_cast<int>(s.triples().size());
    if (nv > 64) throw limit_error("encoded graph exceeds 64 vertices");
    EncodedGraph g;
    g.element_count = n;
    g.vertex_count = nv;
    g.und.assign(nv, 0);
    g.arc_out.assign(nv, 0);
    g.arc_in.assign(nv, 0);
    g.color.assign(nv, 0);
    for (int x = 0; x < n; ++x) {
        const int y = s.diag(x);
        if (y == x) {
            g.color[x] = 1;
        } else {
            g.arc_out[x] |= 1ull << y;
            g.arc_in[y] |= 1ull << x;
        }
    }
    for (size_t i = 0; i < s.triples().size(); ++i) {
        const int tv = n + static_cast<int>(i);
        g.color[tv] = 2;
        for (int e : s.triples()[i].v) {
            g.und[tv] |= 1ull << e;
            g.und[e] |= 1ull << tv;
        }
    }
    return g;
}

inline TripleSystem decode(const EncodedGraph& g) {
    const int n = g.element_count;
    DiagonalMap diag(n);
    for (int x = 0; x < n; ++x) {
        if (g.color[x] == 1) {
            diag[x] = static_cast<uint8_t>(x);
        } else {
            if (std::popcount(g.arc_out[x]) != 1)
                throw domain_error("element vertex without unique tail arc");
            diag[x] = static_cast<uint8_t>(std::countr_zero(g.arc_out[x]));
        }
    }
    std::vector<Triple> triples;
    for (int tv = n; tv < g.vertex_count; ++tv) {
        uint64_t m = g.und[tv] & ((n == 64) ? ~0ull : ((1ull << n) - 1));
        if (std::popcount(m) != 3)
            throw domain_error("triple vertex without exactly 3 members");
        int a = std::countr_zero(m);
        m &= m - 1;
        int b = std::countr_zero(m);
        m &= m - 1;
        int c = std::countr_zero(m);
        triples.emplace_back(a, b, c);
    }
    return TripleSystem(g.element_count, std::move(diag), std::move(triples));
}

struct CanonicalRecord {
    std::string key;
    uint64_t aut_order = 0;
};

namespace detail {

struct PartitionState {
    // lab[p] = vertex at position p; pos[v] = position of vertex v;
    // start[p] = true iff a cell begins at position p.
    std::vector<uint8_t> lab, pos;
    std::vector<uint8_t> start;
};

class CanonSearch {
public:
    CanonSearch(const EncodedGraph& g, const TripleSystem& s) : g_(g), s_(s) {}

    CanonicalRecord run() {
        const int V = g_.vertex_count;
        PartitionState st;
        st.lab.resize(V);
        st.pos.resize(V);
        st.start.assign(V, 0);
        // initial cells ordered by color id
        int p = 0;
        for (int c = 0; c <= 2; ++c) {
            bool first = true;
            for (int v = 0; v < V; ++v) {
                if (g_.color[v] != c) continue;
                st.lab[p] = static_cast<uint8_t>(v);
                st.pos[v] = static_cast<uint8_t>(p);
                if (first) st.start[p] = 1;
                first = false;
                ++p;
            }
        }
        refine(st, /*from_scratch=*/true, 0);
        cur_invs_.clear();
        cur_invs_.push_back(invariant(st));
        dfs(st);
        return CanonicalRecord{best_serial_, best_count_};
    }

private:
    std::vector<int> invariant(const PartitionState& st) const {
        std::vector<int> sizes;
        const int V = g_.vertex_count;
        int run = 0;
        for (int i = 0; i < V; ++i) {
            if (st.start[i] && run) {
                sizes.push_back(run);
                run = 0;
            }
            ++run;
        }
        sizes.push_back(run);
        return sizes;
    }

    bool discrete(const PartitionState& st) const {
        for (int i = 0; i < g_.vertex_count; ++i)
            if (!st.start[i]) return false;
        return true;
    }

    int cell_end(const PartitionState& st, int s) const {
        int e = s + 1;
        while (e < g_.vertex_count && !st.start[e]) ++e;
        return e;
    }

    // Equitable refinement. Positions are stable under splits, so the work
    // queue holds cell start positions.
    void refine(PartitionState& st, bool from_scratch, int touched) const {
        const int V = g_.vertex_count;
        std::vector<int> queue;
        std::vector<uint8_t> queued(V, 0);
        auto push = [&](int s) {
            if (!queued[s]) {
                queued[s] = 1;
                queue.push_back(s);
            }
        };
        if (from_scratch) {
            for (int i = 0; i < V; ++i)
                if (st.start[i]) push(i);
        } else {
            push(touched);
            if (touched + 1 < V && st.start[touched + 1]) push(touched + 1);
        }
        size_t qi = 0;
        while (qi < queue.size()) {
            const int s = queue[qi++];
            queued[s] = 0;
            uint64_t smask = 0;
            for (int i = s, e = cell_end(st, s); i < e; ++i)
                smask |= 1ull << st.lab[i];
            for (int ds = 0; ds < V;) {
                const int de = cell_end(st, ds);
                if (de - ds >= 2) split_cell(st, ds, de, smask, push);
                ds = de;
            }
        }
    }

    template <typename Push>
    void split_cell(PartitionState& st, int ds, int de, uint64_t smask,
                    Push push) const {
        struct Entry {
            uint32_t key;
            uint8_t v;
        };
        Entry ent[64];
        const int len = de - ds;
        bool uniform = true;
        for (int i = 0; i < len; ++i) {
            const int v = st.lab[ds + i];
            const uint32_t key =
                (static_cast<uint32_t>(std::popcount(g_.und[v] & smask)) << 14) |
                (static_cast<uint32_t>(std::popcount(g_.arc_out[v] & smask)) << 7) |
                static_cast<uint32_t>(std::popcount(g_.arc_in[v] & smask));
            ent[i] = {key, static_cast<uint8_t>(v)};
            if (key != ent[0].key) uniform = false;
        }
        if (uniform) return;
        std::stable_sort(ent, ent + len,
                         [](const Entry& a, const Entry& b) { return a.key < b.key; });
        for (int i = 0; i < len; ++i) {
            st.lab[ds + i] = ent[i].v;
            st.pos[ent[i].v] = static_cast<uint8_t>(ds + i);
            if (i > 0 && ent[i].key != ent[i - 1].key) {
                st.start[ds + i] = 1;
                push(ds + i);
            }
        }
        push(ds);
    }

    int target_cell(const PartitionState& st) const {
        const int V = g_.vertex_count;
        int best = -1, best_len = 1;
        for (int s = 0; s < V;) {
            const int e = cell_end(st, s);
            if (e - s > best_len) {
                best = s;
                best_len = e - s;
            }
            s = e;
        }
        return best;
    }

    // Lexicographic compare of the current invariant stack against the best
    // leaf's stack, over the levels the current path has reached.
    int compare_prefix() const {
        for (size_t d = 0; d < cur_invs_.size(); ++d) {
            if (d >= best_invs_.size()) return 0;  // unreachable in practice
            if (cur_invs_[d] != best_invs_[d])
                return cur_invs_[d] < best_invs_[d] ? -1 : 1;
        }
        return 0;
    }

    std::string serialize(const PartitionState& st) const {
        const int n = g_.element_count;
        std::string out;
        out.push_back(static_cast<char>(n));
        for (int p = 0; p < n; ++p) {
            const int v = st.lab[p];
            out.push_back(static_cast<char>(st.pos[s_.diag(v)]));
        }
        std::vector<std::array<uint8_t, 3>> tr;
        tr.reserve(s_.triples().size());
        for (const Triple& t : s_.triples()) {
            std::array<uint8_t, 3> m{st.pos[t.v[0]], st.pos[t.v[1]],
                                     st.pos[t.v[2]]};
            std::sort(m.begin(), m.end());
            tr.push_back(m);
        }
        std::sort(tr.begin(), tr.end());
        out.push_back(static_cast<char>(tr.size()));
        int prev = 0;
        for (const auto& m : tr) {
            out.push_back(static_cast<char>(m[0] - prev));  // deltas keep keys small
            out.push_back(static_cast<char>(m[1]));
            out.push_back(static_cast<char>(m[2]));
            prev = m[0];
        }
        return out;
    }

    void dfs(const PartitionState& st) {
        int cmp = have_best_ ? compare_prefix() : -1;
        if (cmp > 0) return;
        if (discrete(st)) {
            std::string serial = serialize(st);
            if (!have_best_ || cmp < 0 || serial < best_serial_) {
                best_invs_ = cur_invs_;
                best_serial_ = std::move(serial);
                best_count_ = 1;
                have_best_ = true;
            } else if (serial == best_serial_) {
                ++best_count_;
            }
            return;
        }
        const int ts = target_cell(st);
        const int te = cell_end(st, ts);
        std::vector<uint8_t> members(st.lab.begin() + ts, st.lab.begin() + te);
        std::sort(members.begin(), members.end());
        for (uint8_t v : members) {
            PartitionState child = st;
            individualize(child, v, ts);
            refine(child, /*from_scratch=*/false, ts);
            cur_invs_.push_back(invariant(child));
            dfs(child);
            cur_invs_.pop_back();
        }
    }

    static void individualize(PartitionState& st, uint8_t v, int ts) {
        int vp = st.pos[v];
        while (vp > ts) {
            const uint8_t w = st.lab[vp - 1];
            st.lab[vp] = w;
            st.pos[w] = static_cast<uint8_t>(vp);
            --vp;
        }
        st.lab[ts] = v;
        st.pos[v] = static_cast<uint8_t>(ts);
        st.start[ts + 1] = 1;
    }

    const EncodedGraph& g_;
    const TripleSystem& s_;
    std::vector<std::vector<int>> cur_invs_;
    std::vector<std::vector<int>> best_invs_;
    std::string best_serial_;
    uint64_t best_count_ = 0;
    bool have_best_ = false;
};

}  // namespace detail

inline CanonicalRecord canonical(const TripleSystem& s) {
    EncodedGraph g = encode(s);
    detail::CanonSearch search(g, s);
    return search.run();
}

// Test oracle: count permutations fixing the system outright.
inline uint64_t aut_order_bruteforce(const TripleSystem& s) {
    const int n = s.order();
    if (n > 8) throw limit_error("aut_order_bruteforce limited to order 8");
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    uint64_t count = 0;
    do {
        if (relabel(s, perm) == s) ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return count;
}

inline std::string to_hex(std::string_view key) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(key.size() * 2);
    for (unsigned char c : key) {
        out.push_back(digits[c >> 4]);
        out.push_back(digits[c & 15]);
    }
    return out;
}

}  // namespace tsq
