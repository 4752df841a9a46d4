#pragma once

// Independent oracles: the idempotent <-> unipotent order-shift bijection,
// and closed-form medial counts from abelian-group enumeration (labeled
// count via automorphism orders, class count via the 3-divisibility rule).

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "tsq/bigint.hpp"
#include "tsq/error.hpp"
#include "tsq/triples.hpp"

namespace tsq {

// From an idempotent system of order n, build the unipotent system of order
// n+1 whose constant diagonal value is `slot`: adjoin a new element as the
// common square, then transpose it with `slot`. The n+1 slot choices give
// n+1 distinct labeled systems.
inline TripleSystem expand_idempotent(const TripleSystem& q, int slot) {
    const int n = q.order();
    if (!q.has_identity_diagonal())
        throw domain_error("expand requires an idempotent system");
    if (slot < 0 || slot > n) throw domain_error("slot out of range 0..n");
    const int a = n;  // the adjoined element
    DiagonalMap diag(n + 1, static_cast<uint8_t>(a));
    TripleSystem expanded(TripleSystem::Unchecked{}, n + 1, std::move(diag),
                          q.triples());
    if (slot == a) return expanded;
    std::vector<int> perm(n + 1);
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[slot], perm[a]);
    return relabel(expanded, perm);
}

// Inverse: transpose the constant diagonal value with the last element,
// drop that element, and make the rest idempotent.
inline TripleSystem collapse_unipotent(const TripleSystem& q) {
    const int m = q.order();
    auto k = q.constant_diagonal();
    if (m < 2 || !k) throw domain_error("collapse requires a unipotent system");
    const int a = m - 1;
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    std::swap(perm[*k], perm[a]);
    TripleSystem shifted = relabel(q, perm);
    DiagonalMap diag(m - 1);
    for (int x = 0; x < m - 1; ++x) diag[x] = static_cast<uint8_t>(x);
    for (const Triple& t : shifted.triples())
        if (t.v[2] == a)
            throw domain_error("unipotent system has a triangle at the apex");
    return TripleSystem(m - 1, std::move(diag), shifted.triples());
}

// One cyclic factor per prime power.
struct AbelianType {
    uint64_t order = 1;
    std::vector<std::pair<uint64_t, int>> factors;  // (p, e), sorted
};

namespace detail {

inline std::vector<std::pair<uint64_t, int>> factorize(uint64_t n) {
    std::vector<std::pair<uint64_t, int>> out;
    for (uint64_t p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        out.emplace_back(p, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline std::vector<std::vector<int>> partitions(int n) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self, int remaining, int max_part) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            cur.push_back(part);
            self(self, remaining - part, part);
            cur.pop_back();
        }
    };
    rec(rec, n, n);
    return out;
}

inline uint64_t ipow(uint64_t base, int exp) {
    uint64_t r = 1;
    while (exp-- > 0) r *= base;
    return r;
}

// Automorphism order of the abelian p-group with exponent partition
// e_1 <= e_2 <= ... <= e_k (Hillar-Rhea form).
inline uint64_t p_group_aut_order(uint64_t p, std::vector<int> exps) {
    std::sort(exps.begin(), exps.end());
    const int k = static_cast<int>(exps.size());
    std::vector<int> d(k), c(k);
    for (int i = 0; i < k; ++i) {
        d[i] = c[i] = i + 1;
        for (int l = 0; l < k; ++l) {
            if (exps[l] == exps[i]) {
                c[i] = std::min(c[i], l + 1);
                d[i] = std::max(d[i], l + 1);
            }
        }
    }
    uint64_t aut = 1;
    for (int i = 0; i < k; ++i) aut *= ipow(p, d[i]) - ipow(p, i);
    for (int j = 0; j < k; ++j) aut *= ipow(ipow(p, exps[j]), k - d[j]);
    for (int i = 0; i < k; ++i) aut *= ipow(ipow(p, exps[i] - 1), k - c[i] + 1);
    return aut;
}

}  // namespace detail

inline std::vector<AbelianType> abelian_types(uint64_t n) {
    if (n < 1) throw domain_error("group order must be >= 1");
    auto primes = detail::factorize(n);
    std::vector<AbelianType> out;
    AbelianType cur;
    cur.order = n;
    auto rec = [&](auto&& self, size_t pi) -> void {
        if (pi == primes.size()) {
            out.push_back(cur);
            return;
        }
        const auto [p, e] = primes[pi];
        for (const auto& part : detail::partitions(e)) {
            const size_t mark = cur.factors.size();
            for (int exp : part) cur.factors.emplace_back(p, exp);
            self(self, pi + 1);
            cur.factors.resize(mark);
        }
    };
    rec(rec, 0);
    return out;
}

inline uint64_t abelian_aut_order(const AbelianType& t) {
    std::map<uint64_t, std::vector<int>> by_prime;
    for (const auto& [p, e] : t.factors) by_prime[p].push_back(e);
    uint64_t aut = 1;
    for (const auto& [p, exps] : by_prime)
        aut *= detail::p_group_aut_order(p, exps);
    return aut;
}

inline uint64_t abelian_group_count(uint64_t n) {
    return static_cast<uint64_t>(abelian_types(n).size());
}

// Number of isomorphism classes of medial totally symmetric quasigroups.
// The doubling rule for 3 | n holds when every abelian group of order n has
// a single cyclic 3-factor, which is the case through order 16; larger
// orders are refused rather than answered with the unsimplified rule.
inline uint64_t predicted_medial_classes(int n) {
    if (n < 1) throw domain_error("order must be >= 1");
    if (n > 16) throw limit_error("medial class prediction limited to order 16");
    const uint64_t groups = abelian_group_count(static_cast<uint64_t>(n));
    return (n % 3 == 0) ? 2 * groups : groups;
}

// Number of medial totally symmetric quasigroups of order n = number of
// labeled abelian groups of order n.
inline BigUint predicted_medial_labeled(int n) {
    if (n < 1) throw domain_error("order must be >= 1");
    if (n > 20) throw limit_error("labeled prediction limited to order 20");
    const uint64_t nfact = factorial_u64(n);
    BigUint total;
    for (const AbelianType& t : abelian_types(static_cast<uint64_t>(n))) {
        const uint64_t aut = abelian_aut_order(t);
        if (nfact % aut != 0)
            throw audit_error("automorphism order does not divide n!");
        total += nfact / aut;
    }
    return total;
}

}  // namespace tsq
