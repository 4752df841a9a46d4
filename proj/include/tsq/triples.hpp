#pragma once

// Triple-system form of a totally symmetric quasigroup: the diagonal map
// d(x) = x*x plus a partition of the non-tail pairs into triangles. This is
// the primary internal representation; the Cayley table is materialized on
// demand.

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "tsq/cayley.hpp"
#include "tsq/error.hpp"

namespace tsq {

using DiagonalMap = std::vector<uint8_t>;

struct Triple {
    std::array<uint8_t, 3> v;  // strictly increasing

    Triple() : v{0, 0, 0} {}
    Triple(int a, int b, int c) {
        std::array<int, 3> w{a, b, c};
        std::sort(w.begin(), w.end());
        if (w[0] == w[1] || w[1] == w[2])
            throw domain_error("triple needs three distinct elements");
        v = {static_cast<uint8_t>(w[0]), static_cast<uint8_t>(w[1]),
             static_cast<uint8_t>(w[2])};
    }

    friend bool operator==(const Triple& a, const Triple& b) { return a.v == b.v; }
    friend bool operator<(const Triple& a, const Triple& b) { return a.v < b.v; }
};

class TripleSystem {
public:
    struct Unchecked {};  // tag: caller vouches for the invariants

    TripleSystem(int order, DiagonalMap diag, std::vector<Triple> triples)
        : order_(order), diag_(std::move(diag)), triples_(std::move(triples)) {
        std::sort(triples_.begin(), triples_.end());
        validate();
    }

    TripleSystem(Unchecked, int order, DiagonalMap diag, std::vector<Triple> triples)
        : order_(order), diag_(std::move(diag)), triples_(std::move(triples)) {
        std::sort(triples_.begin(), triples_.end());
    }

    int order() const { return order_; }
    int diag(int x) const { return diag_[x]; }
    const DiagonalMap& diagonal() const { return diag_; }
    const std::vector<Triple>& triples() const { return triples_; }

    int idempotent_count() const {
        int i = 0;
        for (int x = 0; x < order_; ++x)
            if (diag_[x] == x) ++i;
        return i;
    }

    bool has_identity_diagonal() const { return idempotent_count() == order_; }

    std::optional<int> constant_diagonal() const {
        for (int x = 1; x < order_; ++x)
            if (diag_[x] != diag_[0]) return std::nullopt;
        return diag_[0];
    }

    // Every pair {x,y} must be covered exactly once, as a tail edge or
    // inside one triangle; the diagonal must be free of 2-cycles.
    void validate() const {
        const int n = order_;
        if (n < 1 || static_cast<int>(diag_.size()) != n)
            throw domain_error("diagonal length does not match order");
        for (int x = 0; x < n; ++x) {
            if (diag_[x] >= n) throw domain_error("diagonal image out of range");
            int y = diag_[x];
            if (y != x && diag_[y] == x)
                throw domain_error("diagonal contains a 2-cycle");
        }
        std::vector<uint8_t> covered(static_cast<size_t>(n) * n, 0);
        auto cover = [&](int a, int b) {
            uint8_t& c = covered[static_cast<size_t>(a) * n + b];
            if (c) throw domain_error("pair covered twice");
            c = 1;
            covered[static_cast<size_t>(b) * n + a] = 1;
        };
        for (int x = 0; x < n; ++x)
            if (diag_[x] != x) cover(x, diag_[x]);
        for (const Triple& t : triples_) {
            if (t.v[2] >= n) throw domain_error("triple element out of range");
            cover(t.v[0], t.v[1]);
            cover(t.v[0], t.v[2]);
            cover(t.v[1], t.v[2]);
        }
        for (int x = 0; x < n; ++x)
            for (int y = x + 1; y < n; ++y)
                if (!covered[static_cast<size_t>(x) * n + y])
                    throw domain_error("pair left uncovered");
    }

    friend bool operator==(const TripleSystem& a, const TripleSystem& b) {
        return a.order_ == b.order_ && a.diag_ == b.diag_ && a.triples_ == b.triples_;
    }

private:
    int order_;
    DiagonalMap diag_;
    std::vector<Triple> triples_;
};

inline TripleSystem to_triples(const CayleyTable& t) {
    if (!is_totally_symmetric(t))
        throw domain_error("table is not totally symmetric");
    const int n = t.order();
    DiagonalMap diag(n);
    std::vector<Triple> triples;
    for (int x = 0; x < n; ++x) diag[x] = static_cast<uint8_t>(t.at(x, x));
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            const int z = t.at(x, y);
            if (z != x && z != y && z > y) triples.emplace_back(x, y, z);
        }
    return TripleSystem(n, std::move(diag), std::move(triples));
}

inline CayleyTable from_triples(const TripleSystem& s) {
    s.validate();
    const int n = s.order();
    std::vector<uint8_t> cells(static_cast<size_t>(n) * n);
    auto set = [&](int x, int y, int z) {
        cells[static_cast<size_t>(x) * n + y] = static_cast<uint8_t>(z);
    };
    for (int x = 0; x < n; ++x) {
        set(x, x, s.diag(x));
        const int y = s.diag(x);
        if (y != x) {
            set(x, y, x);
            set(y, x, x);
        }
    }
    for (const Triple& t : s.triples()) {
        const int a = t.v[0], b = t.v[1], c = t.v[2];
        set(a, b, c);
        set(b, a, c);
        set(a, c, b);
        set(c, a, b);
        set(b, c, a);
        set(c, b, a);
    }
    return CayleyTable(n, std::move(cells));
}

inline TripleSystem relabel(const TripleSystem& s, std::span<const int> perm) {
    const int n = s.order();
    DiagonalMap diag(n);
    for (int x = 0; x < n; ++x)
        diag[perm[x]] = static_cast<uint8_t>(perm[s.diag(x)]);
    std::vector<Triple> triples;
    triples.reserve(s.triples().size());
    for (const Triple& t : s.triples())
        triples.emplace_back(perm[t.v[0]], perm[t.v[1]], perm[t.v[2]]);
    return TripleSystem(TripleSystem::Unchecked{}, n, std::move(diag),
                        std::move(triples));
}

inline PropertyFlags compute_flags(const TripleSystem& s) {
    CayleyTable t = from_triples(s);
    return compute_flags(t);
}

}  // namespace tsq
