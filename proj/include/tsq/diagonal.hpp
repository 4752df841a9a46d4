#pragma once

// Admissible diagonal configurations for a given order, up to isomorphism.
// A diagonal map d(x) = x*x is admissible when its functional digraph has no
// 2-cycle, every vertex has tail-degree congruent to n-1 mod 2, and the pair
// count left for triangles is divisible by 3.
//
// A 2-cycle-free functional digraph decomposes into components that are
// directed cycles (length 1 = fixed point, length >= 3) carrying rooted
// trees. Canonical form: canonical tree encodings, minimal rotation per
// cycle, sorted component list. Classes are generated directly from that
// decomposition, so no labeled map is ever enumerated.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "tsq/bigint.hpp"
#include "tsq/error.hpp"

namespace tsq {

inline bool has_two_cycle(std::span<const uint8_t> d) {
    const int n = static_cast<int>(d.size());
    for (int x = 0; x < n; ++x) {
        const int y = d[x];
        if (y != x && d[y] == x) return true;
    }
    return false;
}

// tail-degree(v) = incident tail edges {x, d(x)}, x != d(x)
inline bool tail_parity_admissible(std::span<const uint8_t> d) {
    const int n = static_cast<int>(d.size());
    std::vector<int> deg(n, 0);
    for (int x = 0; x < n; ++x) {
        if (d[x] != x) {
            ++deg[x];
            ++deg[d[x]];
        }
    }
    for (int v = 0; v < n; ++v)
        if ((deg[v] & 1) != ((n - 1) & 1)) return false;
    return true;
}

inline bool triple_divisibility(int n, int idempotents) {
    const int pairs = n * (n - 1) / 2;
    return (pairs - (n - idempotents)) % 3 == 0;
}

inline int fixed_point_count(std::span<const uint8_t> d) {
    int i = 0;
    for (size_t x = 0; x < d.size(); ++x)
        if (d[x] == x) ++i;
    return i;
}

inline bool is_admissible_diagonal(std::span<const uint8_t> d) {
    return !has_two_cycle(d) && tail_parity_admissible(d) &&
           triple_divisibility(static_cast<int>(d.size()), fixed_point_count(d));
}

// The i for which all three conditions are simultaneously satisfiable.
// Shape satisfiability in closed form: odd n needs a fixed-point-free
// permutation part with cycles >= 3 (i = n, or n-i >= 3); even n needs each
// fixed point to absorb an odd number of tails (1 <= i <= n/2), or, with no
// fixed point at all, cycle components of size >= 6 (i = 0, n >= 6).
inline std::vector<int> admissible_idempotent_counts(int n) {
    if (n < 1) throw domain_error("order must be >= 1");
    std::vector<int> out;
    for (int i = 0; i <= n; ++i) {
        if (!triple_divisibility(n, i)) continue;
        bool shape_ok;
        if (n % 2 == 1)
            shape_ok = (i == n) || (n - i >= 3);
        else
            shape_ok = (i >= 1 && 2 * i <= n) || (i == 0 && n >= 6);
        if (shape_ok) out.push_back(i);
    }
    return out;
}

namespace detail {

struct DiagonalAnalysis {
    std::string key;
    uint64_t aut_order;
};

struct TreeCode {
    std::string enc;
    uint64_t aut;
};

inline TreeCode encode_tree(int v, const std::vector<std::vector<int>>& children) {
    std::vector<TreeCode> kids;
    kids.reserve(children[v].size());
    for (int u : children[v]) kids.push_back(encode_tree(u, children));
    std::sort(kids.begin(), kids.end(),
              [](const TreeCode& a, const TreeCode& b) { return a.enc < b.enc; });
    TreeCode out{"(", 1};
    uint64_t run = 1;
    for (size_t i = 0; i < kids.size(); ++i) {
        out.enc += kids[i].enc;
        out.aut *= kids[i].aut;
        if (i > 0 && kids[i].enc == kids[i - 1].enc)
            out.aut *= ++run;  // multiplicity factorial, built incrementally
        else
            run = 1;
    }
    out.enc += ")";
    return out;
}

inline DiagonalAnalysis analyze_diagonal(std::span<const uint8_t> d) {
    const int n = static_cast<int>(d.size());
    // locate cycle vertices
    std::vector<int> state(n, 0);  // 0 new, 1 walking, 2 done
    std::vector<uint8_t> oncycle(n, 0);
    std::vector<std::vector<int>> cycles;
    for (int v = 0; v < n; ++v) {
        if (state[v]) continue;
        std::vector<int> path;
        int u = v;
        while (state[u] == 0) {
            state[u] = 1;
            path.push_back(u);
            u = d[u];
        }
        if (state[u] == 1) {
            std::vector<int> cyc;
            int w = u;
            do {
                oncycle[w] = 1;
                cyc.push_back(w);
                w = d[w];
            } while (w != u);
            if (cyc.size() == 2)
                throw domain_error("diagonal contains a 2-cycle");
            cycles.push_back(std::move(cyc));
        }
        for (int w : path) state[w] = 2;
    }
    std::vector<std::vector<int>> children(n);
    for (int u = 0; u < n; ++u) {
        const int v = d[u];
        if (u == v) continue;
        if (oncycle[u] && oncycle[v]) continue;  // cycle arc, not a tree edge
        children[v].push_back(u);
    }

    std::vector<std::string> comp_encs;
    uint64_t aut = 1;
    for (const auto& cyc : cycles) {
        if (cyc.size() == 1) {
            TreeCode t = encode_tree(cyc[0], children);
            comp_encs.push_back("F" + t.enc);
            aut *= t.aut;
            continue;
        }
        const size_t c = cyc.size();
        std::vector<std::string> seq(c);
        for (size_t j = 0; j < c; ++j) {
            TreeCode t = encode_tree(cyc[j], children);
            seq[j] = t.enc;
            aut *= t.aut;
        }
        size_t best = 0;
        uint64_t symmetric = 0;
        auto rot_less = [&](size_t a, size_t b) {
            for (size_t j = 0; j < c; ++j) {
                const auto& ea = seq[(a + j) % c];
                const auto& eb = seq[(b + j) % c];
                if (ea != eb) return ea < eb ? -1 : 1;
            }
            return 0;
        };
        for (size_t r = 0; r < c; ++r) {
            const int cmp = rot_less(r, best);
            if (cmp < 0) best = r;
        }
        for (size_t r = 0; r < c; ++r)
            if (rot_less(r, best) == 0) ++symmetric;
        aut *= symmetric;
        std::string enc = "C" + std::to_string(c) + "[";
        for (size_t j = 0; j < c; ++j) enc += seq[(best + j) % c];
        enc += "]";
        comp_encs.push_back(std::move(enc));
    }
    std::sort(comp_encs.begin(), comp_encs.end());
    std::string key = std::to_string(n) + "#";
    uint64_t run = 1;
    for (size_t i = 0; i < comp_encs.size(); ++i) {
        key += comp_encs[i];
        key += ',';
        if (i > 0 && comp_encs[i] == comp_encs[i - 1])
            aut *= ++run;
        else
            run = 1;
    }
    return DiagonalAnalysis{std::move(key), aut};
}

}  // namespace detail

// Keys equal iff the functional digraphs are isomorphic.
inline std::string diagonal_canonical_form(std::span<const uint8_t> d) {
    return detail::analyze_diagonal(d).key;
}

inline uint64_t diagonal_aut_order(std::span<const uint8_t> d) {
    return detail::analyze_diagonal(d).aut_order;
}

struct DiagonalClass {
    int order = 0;
    std::vector<uint8_t> rep;
    int idempotents = 0;
    uint64_t aut_order = 1;
    uint64_t labeled_count = 1;  // n! / aut_order
    std::string key;
};

namespace detail {

// Shape catalogs for one order. Parity of the child count is n-1 mod 2 at
// roots (fixed points and cycle vertices) and n mod 2 elsewhere.
class DiagonalGenerator {
public:
    explicit DiagonalGenerator(int n) : n_(n) {
        build_trees();
        build_components();
    }

    std::vector<DiagonalClass> generate() {
        std::vector<DiagonalClass> out;
        std::vector<int> chosen;
        assemble(0, n_, 0, chosen, out);
        std::sort(out.begin(), out.end(),
                  [](const DiagonalClass& a, const DiagonalClass& b) {
                      if (a.idempotents != b.idempotents)
                          return a.idempotents < b.idempotents;
                      return a.key < b.key;
                  });
        return out;
    }

private:
    struct Tree {
        int size;
        std::string enc;
        uint64_t aut;
        std::vector<int> children;  // tree ids, non-increasing
    };
    struct Component {
        int size;
        int fixed;  // 1 for a fixed-point component, else 0
        std::string enc;
        uint64_t aut;
        std::vector<int> roots;  // tree ids; one for fixed, cycle order else
    };

    void build_trees() {
        const int nonroot_parity = n_ & 1;
        const int root_parity = (n_ - 1) & 1;
        // single-vertex shape usable as a non-root leaf only when 0 matches
        // the parity; enumerate sizes upward, children drawn from smaller
        // non-root shapes
        for (int m = 1; m <= n_; ++m) {
            // children come from strictly smaller shapes, all built already
            const int max_id = static_cast<int>(trees_.size());
            std::vector<int> kids;
            enumerate_children(m - 1, max_id, nonroot_parity, kids,
                               [&](const std::vector<int>& ch) {
                                   add_tree(m, ch, nonroot_trees_);
                               });
            enumerate_children(m - 1, max_id, root_parity, kids,
                               [&](const std::vector<int>& ch) {
                                   add_tree(m, ch, root_trees_);
                               });
        }
    }

    template <typename Emit>
    void enumerate_children(int remaining, int max_id, int parity,
                            std::vector<int>& acc, Emit emit) {
        if (remaining == 0) {
            if (static_cast<int>(acc.size() & 1) == parity) emit(acc);
            return;
        }
        const int start = acc.empty() ? max_id - 1 : acc.back();
        for (int id = start; id >= 0; --id) {
            if (!nonroot_usable_[id]) continue;
            if (trees_[id].size > remaining) continue;
            acc.push_back(id);
            enumerate_children(remaining - trees_[id].size, max_id, parity, acc,
                               emit);
            acc.pop_back();
        }
    }

    void add_tree(int size, const std::vector<int>& children,
                  std::vector<int>& index) {
        Tree t;
        t.size = size;
        t.children = children;
        std::vector<std::string> encs;
        encs.reserve(children.size());
        t.aut = 1;
        for (int id : children) {
            encs.push_back(trees_[id].enc);
            t.aut *= trees_[id].aut;
        }
        std::sort(encs.begin(), encs.end());
        t.enc = "(";
        uint64_t run = 1;
        for (size_t i = 0; i < encs.size(); ++i) {
            t.enc += encs[i];
            if (i > 0 && encs[i] == encs[i - 1])
                t.aut *= ++run;
            else
                run = 1;
        }
        t.enc += ")";
        const int id = static_cast<int>(trees_.size());
        trees_.push_back(std::move(t));
        nonroot_usable_.push_back(&index == &nonroot_trees_);
        index.push_back(id);
    }

    void build_components() {
        for (int id = 0; id < static_cast<int>(trees_.size()); ++id) {
            if (nonroot_usable_[id]) continue;  // root shapes only
            const Tree& t = trees_[id];
            components_.push_back(Component{t.size, 1, "F" + t.enc, t.aut, {id}});
        }
        // cycles of length >= 3 over root shapes, minimal under rotation
        std::vector<int> root_ids;
        for (int id = 0; id < static_cast<int>(trees_.size()); ++id)
            if (!nonroot_usable_[id]) root_ids.push_back(id);
        std::vector<int> seq;
        for (int c = 3; c <= n_; ++c) build_cycles(c, n_, root_ids, seq);
        std::sort(components_.begin(), components_.end(),
                  [](const Component& a, const Component& b) {
                      return a.enc < b.enc;
                  });
    }

    void build_cycles(int c, int budget, const std::vector<int>& root_ids,
                      std::vector<int>& seq) {
        if (static_cast<int>(seq.size()) == c) {
            if (!rotation_minimal(seq)) return;
            Component comp;
            comp.size = 0;
            comp.fixed = 0;
            comp.aut = rotation_symmetry(seq);
            std::string body;
            for (int id : seq) {
                comp.size += trees_[id].size;
                comp.aut *= trees_[id].aut;
                body += trees_[id].enc;
            }
            comp.enc = "C" + std::to_string(c) + "[" + body + "]";
            comp.roots = seq;
            components_.push_back(std::move(comp));
            return;
        }
        const int slots_left = c - static_cast<int>(seq.size());
        for (int id : root_ids) {
            const int sz = trees_[id].size;
            if (sz > budget - (slots_left - 1)) continue;  // each slot needs >= 1
            seq.push_back(id);
            build_cycles(c, budget - sz, root_ids, seq);
            seq.pop_back();
        }
    }

    bool rotation_minimal(const std::vector<int>& seq) const {
        return rotation_compare_best(seq) == 0;
    }
    uint64_t rotation_symmetry(const std::vector<int>& seq) const {
        const size_t c = seq.size();
        uint64_t count = 0;
        for (size_t r = 0; r < c; ++r) {
            bool eq = true;
            for (size_t j = 0; j < c && eq; ++j)
                eq = trees_[seq[(r + j) % c]].enc == trees_[seq[j]].enc;
            if (eq) ++count;
        }
        return count;
    }
    // 0 if rotation 0 is minimal (ties allowed), else 1
    int rotation_compare_best(const std::vector<int>& seq) const {
        const size_t c = seq.size();
        for (size_t r = 1; r < c; ++r) {
            for (size_t j = 0; j < c; ++j) {
                const std::string& a = trees_[seq[(r + j) % c]].enc;
                const std::string& b = trees_[seq[j]].enc;
                if (a != b) {
                    if (a < b) return 1;
                    break;
                }
            }
        }
        return 0;
    }

    void assemble(int first_comp, int remaining, int fixed_so_far,
                  std::vector<int>& chosen, std::vector<DiagonalClass>& out) {
        if (remaining == 0) {
            if (!triple_divisibility(n_, fixed_so_far)) return;
            out.push_back(materialize(chosen, fixed_so_far));
            return;
        }
        for (int ci = first_comp; ci < static_cast<int>(components_.size());
             ++ci) {
            if (components_[ci].size > remaining) continue;
            chosen.push_back(ci);
            assemble(ci, remaining - components_[ci].size,
                     fixed_so_far + components_[ci].fixed, chosen, out);
            chosen.pop_back();
        }
    }

    int materialize_tree(int tree_id, std::vector<uint8_t>& d, int parent) {
        const int me = next_index_++;
        d[me] = static_cast<uint8_t>(parent < 0 ? me : parent);
        for (int child : trees_[tree_id].children) materialize_tree(child, d, me);
        return me;
    }

    DiagonalClass materialize(const std::vector<int>& chosen, int fixed) {
        DiagonalClass dc;
        dc.order = n_;
        dc.idempotents = fixed;
        dc.rep.assign(n_, 0);
        next_index_ = 0;
        uint64_t aut = 1;
        uint64_t run = 1;
        for (size_t k = 0; k < chosen.size(); ++k) {
            const Component& comp = components_[chosen[k]];
            aut *= comp.aut;
            if (k > 0 && chosen[k] == chosen[k - 1])
                aut *= ++run;
            else
                run = 1;
            if (comp.fixed) {
                materialize_tree(comp.roots[0], dc.rep, -1);
            } else {
                std::vector<int> roots;
                roots.reserve(comp.roots.size());
                for (int tid : comp.roots)
                    roots.push_back(materialize_tree(tid, dc.rep, -1));
                for (size_t j = 0; j < roots.size(); ++j)
                    dc.rep[roots[j]] =
                        static_cast<uint8_t>(roots[(j + 1) % roots.size()]);
            }
        }
        dc.aut_order = aut;
        dc.labeled_count = factorial_u64(n_) / aut;
        DiagonalAnalysis an = analyze_diagonal(dc.rep);
        dc.key = an.key;
        if (an.aut_order != aut)
            throw audit_error("diagonal automorphism bookkeeping mismatch");
        return dc;
    }

    int n_;
    std::vector<Tree> trees_;
    std::vector<uint8_t> nonroot_usable_;
    std::vector<int> nonroot_trees_;
    std::vector<int> root_trees_;
    std::vector<Component> components_;
    int next_index_ = 0;
};

}  // namespace detail

// One class per isomorphism class of admissible diagonal maps, ordered by
// (idempotent count, canonical key).
inline std::vector<DiagonalClass> generate_diagonal_classes(int n) {
    if (n < 1) throw domain_error("order must be >= 1");
    detail::DiagonalGenerator gen(n);
    return gen.generate();
}

}  // namespace tsq
