#pragma once

// Shared helpers for the test suites: small table builders, independent
// oracles, and deterministic sampling of totally symmetric systems.

#include <numeric>
#include <random>
#include <vector>

#include "tsq/cayley.hpp"
#include "tsq/solver.hpp"
#include "tsq/triples.hpp"

namespace tsqtest {

inline tsq::CayleyTable table(const std::vector<std::vector<int>>& rows) {
    return tsq::CayleyTable::from_rows(rows);
}

// x*y = (c - x - y) mod n, the archetypal totally symmetric family
inline tsq::CayleyTable negsum_table(int n, int c = 0) {
    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) rows[x][y] = ((c - x - y) % n + n) % n;
    return tsq::CayleyTable::from_rows(rows);
}

inline tsq::CayleyTable mod_add_table(int n) {
    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) rows[x][y] = (x + y) % n;
    return tsq::CayleyTable::from_rows(rows);
}

inline tsq::CayleyTable xor_table(int n) {
    std::vector<std::vector<int>> rows(n, std::vector<int>(n));
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) rows[x][y] = x ^ y;
    return tsq::CayleyTable::from_rows(rows);
}

// Alternate four-variable medial identity, kept strictly as a test oracle.
inline bool medial_alternate_form(const tsq::CayleyTable& t) {
    const int n = t.order();
    for (int w = 0; w < n; ++w)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    if (t.at(w, t.at(x, t.at(y, z))) !=
                        t.at(y, t.at(x, t.at(w, z))))
                        return false;
    return true;
}

template <typename Emit>
void all_latin_squares(int n, Emit emit) {
    std::vector<uint8_t> cells(static_cast<size_t>(n) * n);
    std::vector<uint32_t> colmask(n, 0);
    auto rec = [&](auto&& self, int r, int c, uint32_t rowmask) -> void {
        if (c == n) {
            if (r + 1 == n)
                emit(tsq::CayleyTable(n, cells));
            else
                self(self, r + 1, 0, 0);
            return;
        }
        for (int v = 0; v < n; ++v) {
            const uint32_t b = 1u << v;
            if ((rowmask & b) || (colmask[c] & b)) continue;
            cells[static_cast<size_t>(r) * n + c] = static_cast<uint8_t>(v);
            colmask[c] |= b;
            self(self, r, c + 1, rowmask | b);
            colmask[c] &= ~b;
        }
    };
    rec(rec, 0, 0, 0);
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        std::uniform_int_distribution<int> d(0, i);
        std::swap(p[i], p[d(rng)]);
    }
    return p;
}

// All labeled totally symmetric systems of the given order, via the solver
// over every admissible diagonal map (not just class representatives).
inline std::vector<tsq::TripleSystem> all_ts_systems(int n) {
    std::vector<tsq::TripleSystem> out;
    std::vector<uint8_t> d(n, 0);
    auto rec = [&](auto&& self, int pos) -> void {
        if (pos == n) {
            if (!tsq::is_admissible_diagonal(d)) return;
            tsq::enumerate_triangle_partitions(
                n, d, [&](const std::vector<tsq::Triple>& triangles) {
                    out.emplace_back(tsq::TripleSystem::Unchecked{}, n,
                                     tsq::DiagonalMap(d), triangles);
                });
            return;
        }
        for (int v = 0; v < n; ++v) {
            d[pos] = static_cast<uint8_t>(v);
            self(self, pos + 1);
        }
    };
    rec(rec, 0);
    return out;
}

}  // namespace tsqtest
