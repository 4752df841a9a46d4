#pragma once

// Exact-cover search: partition the residual pair graph (complete graph
// minus tail edges) into triangles. Branching always extends the
// lexicographically smallest uncovered pair, trying third vertices in
// ascending order, so the visit sequence is deterministic. Each partition is
// one labeled totally symmetric quasigroup with the given diagonal.

#include <bit>
#include <cstdint>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsq/diagonal.hpp"
#include "tsq/error.hpp"
#include "tsq/triples.hpp"

namespace tsq {

struct ResidualGraph {
    int order = 0;
    std::vector<uint32_t> adj;  // adj[v] = uncovered partners of v
    int edge_count = 0;
};

inline ResidualGraph make_residual(int n, std::span<const uint8_t> d) {
    if (n < 1 || static_cast<int>(d.size()) != n)
        throw domain_error("diagonal length does not match order");
    if (n > 32) throw limit_error("solver supports orders up to 32");
    if (has_two_cycle(d)) throw domain_error("diagonal contains a 2-cycle");
    ResidualGraph g;
    g.order = n;
    g.adj.assign(n, 0);
    for (int v = 0; v < n; ++v)
        for (int u = 0; u < n; ++u)
            if (u != v) g.adj[v] |= 1u << u;
    for (int x = 0; x < n; ++x) {
        const int y = d[x];
        if (y == x) continue;
        g.adj[x] &= ~(1u << y);
        g.adj[y] &= ~(1u << x);
    }
    for (int v = 0; v < n; ++v) {
        const int deg = std::popcount(g.adj[v]);
        if (deg % 2 != 0)
            throw domain_error("residual degree odd; diagonal not admissible");
        g.edge_count += deg;
    }
    g.edge_count /= 2;
    if (g.edge_count % 3 != 0)
        throw domain_error("residual edge count not divisible by 3");
    return g;
}

namespace detail {

template <typename Visitor>
uint64_t cover_triangles(std::vector<uint32_t>& adj, std::vector<Triple>& chosen,
                         Visitor&& visit) {
    int v = -1;
    for (size_t i = 0; i < adj.size(); ++i) {
        if (adj[i]) {
            v = static_cast<int>(i);
            break;
        }
    }
    if (v < 0) {
        const std::vector<Triple>& done = chosen;
        visit(done);
        return 1;
    }
    const int u = std::countr_zero(adj[v]);
    uint64_t count = 0;
    uint32_t cand = adj[v] & adj[u];
    while (cand) {
        const int w = std::countr_zero(cand);
        cand &= cand - 1;
        const uint32_t bv = 1u << v, bu = 1u << u, bw = 1u << w;
        adj[v] &= ~(bu | bw);
        adj[u] &= ~(bv | bw);
        adj[w] &= ~(bv | bu);
        chosen.emplace_back(v, u, w);
        count += cover_triangles(adj, chosen, visit);
        chosen.pop_back();
        adj[v] |= bu | bw;
        adj[u] |= bv | bw;
        adj[w] |= bv | bu;
    }
    return count;
}

}  // namespace detail

// Visitor receives each completed triangle set exactly once; a throwing
// visitor aborts the enumeration and the exception propagates.
template <typename Visitor>
uint64_t enumerate_triangle_partitions(int n, std::span<const uint8_t> d,
                                       Visitor&& visit) {
    ResidualGraph g = make_residual(n, d);
    std::vector<Triple> chosen;
    chosen.reserve(static_cast<size_t>(g.edge_count) / 3);
    return detail::cover_triangles(g.adj, chosen, visit);
}

inline uint64_t count_triangle_partitions(int n, std::span<const uint8_t> d) {
    return enumerate_triangle_partitions(n, d,
                                         [](const std::vector<Triple>&) {});
}

// Resumable work unit: the first few triangle choices are fixed.
struct SubJob {
    int order = 0;
    std::vector<uint8_t> diag;
    std::vector<Triple> prefix;
};

namespace detail {

inline void split_rec(std::vector<uint32_t>& adj, std::vector<Triple>& chosen,
                      int depth, int n, std::span<const uint8_t> d,
                      std::vector<SubJob>& out) {
    if (depth == 0) {
        out.push_back(SubJob{n, {d.begin(), d.end()}, chosen});
        return;
    }
    int v = -1;
    for (size_t i = 0; i < adj.size(); ++i) {
        if (adj[i]) {
            v = static_cast<int>(i);
            break;
        }
    }
    if (v < 0) {
        out.push_back(SubJob{n, {d.begin(), d.end()}, chosen});
        return;
    }
    const int u = std::countr_zero(adj[v]);
    uint32_t cand = adj[v] & adj[u];
    while (cand) {
        const int w = std::countr_zero(cand);
        cand &= cand - 1;
        const uint32_t bv = 1u << v, bu = 1u << u, bw = 1u << w;
        adj[v] &= ~(bu | bw);
        adj[u] &= ~(bv | bw);
        adj[w] &= ~(bv | bu);
        chosen.emplace_back(v, u, w);
        split_rec(adj, chosen, depth - 1, n, d, out);
        chosen.pop_back();
        adj[v] |= bu | bw;
        adj[u] |= bv | bw;
        adj[w] |= bv | bu;
    }
}

}  // namespace detail

// Split the search tree at a fixed depth; the sub-jobs partition the
// solution set and can run independently.
inline std::vector<SubJob> split_jobs(int n, std::span<const uint8_t> d,
                                      int depth) {
    ResidualGraph g = make_residual(n, d);
    std::vector<SubJob> out;
    std::vector<Triple> chosen;
    detail::split_rec(g.adj, chosen, depth, n, d, out);
    return out;
}

// Visitor sees the full triangle set (prefix plus completion).
template <typename Visitor>
uint64_t run_subjob(const SubJob& job, Visitor&& visit) {
    ResidualGraph g = make_residual(job.order, job.diag);
    std::vector<Triple> chosen;
    for (const Triple& t : job.prefix) {
        const uint32_t ba = 1u << t.v[0], bb = 1u << t.v[1], bc = 1u << t.v[2];
        if (!(g.adj[t.v[0]] & bb) || !(g.adj[t.v[0]] & bc) ||
            !(g.adj[t.v[1]] & bc))
            throw domain_error("sub-job prefix covers a pair twice");
        g.adj[t.v[0]] &= ~(bb | bc);
        g.adj[t.v[1]] &= ~(ba | bc);
        g.adj[t.v[2]] &= ~(ba | bb);
        chosen.push_back(t);
    }
    return detail::cover_triangles(g.adj, chosen, visit);
}

// Line format: order|comma-separated diagonal|semicolon-separated triangles.
inline std::string checkpoint_line(const SubJob& job) {
    std::ostringstream os;
    os << job.order << '|';
    for (int x = 0; x < job.order; ++x) {
        if (x) os << ',';
        os << static_cast<int>(job.diag[x]);
    }
    os << '|';
    for (size_t i = 0; i < job.prefix.size(); ++i) {
        if (i) os << ';';
        os << static_cast<int>(job.prefix[i].v[0]) << '-'
           << static_cast<int>(job.prefix[i].v[1]) << '-'
           << static_cast<int>(job.prefix[i].v[2]);
    }
    return os.str();
}

inline SubJob parse_checkpoint(std::string_view line) {
    auto fail = [&](const char* what) -> parse_error {
        return parse_error(what, 1, 1);
    };
    SubJob job;
    size_t p1 = line.find('|');
    size_t p2 = line.find('|', p1 == std::string_view::npos ? 0 : p1 + 1);
    if (p1 == std::string_view::npos || p2 == std::string_view::npos)
        throw fail("checkpoint needs three fields");
    auto to_int = [&](std::string_view s) {
        if (s.empty()) throw fail("empty number in checkpoint");
        int v = 0;
        for (char c : s) {
            if (c < '0' || c > '9') throw fail("bad number in checkpoint");
            v = v * 10 + (c - '0');
            if (v > 1000) throw fail("checkpoint number too large");
        }
        return v;
    };
    job.order = to_int(line.substr(0, p1));
    std::string_view ds = line.substr(p1 + 1, p2 - p1 - 1);
    while (!ds.empty()) {
        size_t c = ds.find(',');
        job.diag.push_back(static_cast<uint8_t>(to_int(ds.substr(0, c))));
        ds = (c == std::string_view::npos) ? std::string_view{} : ds.substr(c + 1);
    }
    if (static_cast<int>(job.diag.size()) != job.order)
        throw fail("checkpoint diagonal length mismatch");
    std::string_view ts = line.substr(p2 + 1);
    while (!ts.empty()) {
        size_t semi = ts.find(';');
        std::string_view one = ts.substr(0, semi);
        size_t d1 = one.find('-');
        size_t d2 = one.find('-', d1 == std::string_view::npos ? 0 : d1 + 1);
        if (d1 == std::string_view::npos || d2 == std::string_view::npos)
            throw fail("bad triangle in checkpoint");
        job.prefix.emplace_back(to_int(one.substr(0, d1)),
                                to_int(one.substr(d1 + 1, d2 - d1 - 1)),
                                to_int(one.substr(d2 + 1)));
        ts = (semi == std::string_view::npos) ? std::string_view{}
                                              : ts.substr(semi + 1);
    }
    return job;
}

}  // namespace tsq
