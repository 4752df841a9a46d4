#pragma once

// Full order-n enumeration: diagonal classes -> triangle partitions per
// canonical representative -> property flags -> canonical keys -> class
// store. Each solver visit is canonicalized once; the class store receives
// multiplicity = visits x labeled diagonals, so stored multiplicities are
// labeled class sizes. Double-entry audit: n!/aut per class must reproduce
// that product, and the per-diagonal visit totals must reproduce the grand
// labeled total.

#include <atomic>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tsq/bigint.hpp"
#include "tsq/canon.hpp"
#include "tsq/diagonal.hpp"
#include "tsq/error.hpp"
#include "tsq/solver.hpp"
#include "tsq/store.hpp"
#include "tsq/triples.hpp"

namespace tsq {

enum class Filter { none, idempotent, unipotent, medial };

struct FlagSummary {
    BigUint labeled;
    uint64_t classes = 0;
};

struct OrderSummary {
    int order = 0;
    BigUint labeled_total;
    uint64_t class_total = 0;
    FlagSummary medial, idempotent, unipotent, associative;
    uint64_t diagonal_class_count = 0;
    uint64_t work_units = 0;
    uint64_t solver_visits = 0;
    uint64_t runtime_ms = 0;
};

// Counting fields only; run statistics and timing are excluded.
inline bool equals_counts(const OrderSummary& a, const OrderSummary& b) {
    auto fs = [](const FlagSummary& x, const FlagSummary& y) {
        return x.classes == y.classes && x.labeled == y.labeled;
    };
    return a.order == b.order && a.labeled_total == b.labeled_total &&
           a.class_total == b.class_total && fs(a.medial, b.medial) &&
           fs(a.idempotent, b.idempotent) && fs(a.unipotent, b.unipotent) &&
           fs(a.associative, b.associative) &&
           a.diagonal_class_count == b.diagonal_class_count;
}

struct PipelineConfig {
    StoreConfig store;
    int workers = 1;
    int split_depth = 2;
    bool validate_every_visit = false;  // otherwise sampled
};

struct EnumerationResult {
    OrderSummary summary;
    std::vector<ClassRecord> records;  // key-sorted
};

namespace detail {

struct ClassAggEntry {
    uint64_t aut_order = 0;
    PropertyFlags flags;
    uint64_t visits = 0;
};

struct DiagonalWork {
    DiagonalClass dc;
    std::vector<SubJob> jobs;
    std::unordered_map<std::string, ClassAggEntry> classes;
    uint64_t visits = 0;
    int pending = 0;
    std::mutex mtx;

    DiagonalWork() = default;
    DiagonalWork(DiagonalWork&& o) noexcept
        : dc(std::move(o.dc)),
          jobs(std::move(o.jobs)),
          classes(std::move(o.classes)),
          visits(o.visits),
          pending(o.pending) {}
};

inline std::vector<DiagonalClass> select_diagonals(int n, Filter f) {
    if (f == Filter::idempotent || f == Filter::unipotent) {
        std::vector<uint8_t> d(n);
        for (int x = 0; x < n; ++x)
            d[x] = static_cast<uint8_t>(f == Filter::idempotent ? x : 0);
        if (!is_admissible_diagonal(d)) return {};
        DiagonalClass dc;
        dc.order = n;
        dc.rep = std::move(d);
        dc.idempotents = (f == Filter::idempotent) ? n : 1;
        dc.aut_order = diagonal_aut_order(dc.rep);
        dc.labeled_count = factorial_u64(n) / dc.aut_order;
        dc.key = diagonal_canonical_form(dc.rep);
        return {std::move(dc)};
    }
    return generate_diagonal_classes(n);
}

}  // namespace detail

inline EnumerationResult enumerate_order_full(int n, Filter filter,
                                              PipelineConfig cfg) {
    if (n < 1) throw domain_error("order must be >= 1");
    if (n > 16) throw limit_error("enumeration supports orders up to 16");
    const auto t0 = std::chrono::steady_clock::now();
    const uint64_t nfact = factorial_u64(n);

    std::vector<detail::DiagonalWork> work;
    {
        std::vector<DiagonalClass> classes = detail::select_diagonals(n, filter);
        work.reserve(classes.size());
        for (DiagonalClass& dc : classes) {
            detail::DiagonalWork w;
            w.dc = std::move(dc);
            w.jobs = split_jobs(n, w.dc.rep, cfg.split_depth);
            w.pending = static_cast<int>(w.jobs.size());
            work.push_back(std::move(w));
        }
    }

    ClassStore store(cfg.store);
    std::atomic<uint64_t> total_units{0};
    std::atomic<uint64_t> total_visits{0};

    // flat unit list: (work index, job index)
    std::vector<std::pair<int, int>> units;
    for (int wi = 0; wi < static_cast<int>(work.size()); ++wi)
        for (int ji = 0; ji < static_cast<int>(work[wi].jobs.size()); ++ji)
            units.emplace_back(wi, ji);
    total_units = units.size();

    std::atomic<size_t> next_unit{0};
    std::atomic<bool> failed{false};
    std::mutex fail_mtx;
    std::exception_ptr first_error;

    auto complete_diagonal = [&](detail::DiagonalWork& w) {
        // per-class audit and orbit arithmetic
        for (const auto& [key, agg] : w.classes) {
            if (nfact % agg.aut_order != 0)
                throw audit_error("automorphism order does not divide n!");
            const uint64_t class_size = nfact / agg.aut_order;
            const uint128 attributed =
                static_cast<uint128>(agg.visits) * w.dc.labeled_count;
            if (attributed != class_size)
                throw audit_error(
                    "orbit audit failed for diagonal class i=" +
                    std::to_string(w.dc.idempotents) + " key=" + w.dc.key +
                    ": visits " + std::to_string(agg.visits) + " x labeled " +
                    std::to_string(w.dc.labeled_count) + " != n!/aut " +
                    std::to_string(class_size));
            store.record(key, agg.aut_order, agg.flags, attributed);
        }
    };

    auto run_unit = [&](int wi, int ji) {
        detail::DiagonalWork& w = work[wi];
        const SubJob& job = w.jobs[ji];
        uint64_t local_visit = 0;
        run_subjob(job, [&](const std::vector<Triple>& triangles) {
            if (failed.load(std::memory_order_relaxed))
                throw error("aborted by concurrent failure");
            TripleSystem s(TripleSystem::Unchecked{}, n,
                           {w.dc.rep.begin(), w.dc.rep.end()}, triangles);
            if (cfg.validate_every_visit || local_visit % 61 == 0) {
                s.validate();
                if (!is_totally_symmetric(from_triples(s)))
                    throw audit_error("solver visit is not totally symmetric");
            }
            ++local_visit;
            CanonicalRecord cr = canonical(s);
            std::lock_guard<std::mutex> lk(w.mtx);
            auto it = w.classes.find(cr.key);
            if (it == w.classes.end()) {
                detail::ClassAggEntry e;
                e.aut_order = cr.aut_order;
                e.flags = compute_flags(s);
                e.visits = 1;
                w.classes.emplace(cr.key, e);
            } else {
                if (it->second.aut_order != cr.aut_order)
                    throw audit_error("canonical key with two aut orders");
                ++it->second.visits;
            }
            ++w.visits;
        });
        total_visits += local_visit;
        bool last = false;
        {
            std::lock_guard<std::mutex> lk(w.mtx);
            last = (--w.pending == 0);
        }
        if (last) complete_diagonal(w);
    };

    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const size_t idx = next_unit.fetch_add(1);
            if (idx >= units.size()) return;
            try {
                run_unit(units[idx].first, units[idx].second);
            } catch (...) {
                std::lock_guard<std::mutex> lk(fail_mtx);
                if (!first_error) first_error = std::current_exception();
                failed = true;
                return;
            }
        }
    };

    const int nworkers = std::max(1, cfg.workers);
    if (nworkers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<size_t>(nworkers));
        for (int i = 0; i < nworkers; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    ClassStore::FinalizeResult fin = store.finalize();
    if (store.has_runs()) store.write_manifest();

    // grand-total audit, diagonal side vs class side
    BigUint diagonal_side;
    for (const detail::DiagonalWork& w : work)
        diagonal_side += static_cast<uint128>(w.visits) * w.dc.labeled_count;
    if (!(diagonal_side == fin.summary.labeled_total))
        throw audit_error("diagonal-side labeled total disagrees with store");
    for (const ClassRecord& r : fin.records)
        if (static_cast<uint128>(r.aut_order) * r.multiplicity != nfact)
            throw audit_error("class multiplicity x aut != n! for key " +
                              to_hex(r.key));

    EnumerationResult out;
    if (filter == Filter::medial) {
        std::vector<ClassRecord> kept;
        for (const ClassRecord& r : fin.records)
            if (r.flags.medial) kept.push_back(r);
        out.records = std::move(kept);
    } else {
        out.records = std::move(fin.records);
    }

    OrderSummary& s = out.summary;
    s.order = n;
    for (const ClassRecord& r : out.records) {
        ++s.class_total;
        s.labeled_total += r.multiplicity;
        auto tally = [&](bool on, FlagSummary& t) {
            if (!on) return;
            ++t.classes;
            t.labeled += r.multiplicity;
        };
        tally(r.flags.medial, s.medial);
        tally(r.flags.idempotent, s.idempotent);
        tally(r.flags.unipotent, s.unipotent);
        tally(r.flags.associative, s.associative);
    }
    s.diagonal_class_count = work.size();
    s.work_units = total_units.load();
    s.solver_visits = total_visits.load();
    s.runtime_ms = static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());
    return out;
}

inline OrderSummary enumerate_order(int n, Filter filter, StoreConfig store,
                                    int workers) {
    PipelineConfig cfg;
    cfg.store = std::move(store);
    cfg.workers = workers;
    return enumerate_order_full(n, filter, std::move(cfg)).summary;
}

namespace detail {

// All Latin squares of order n by row-wise backtracking.
template <typename Emit>
void latin_squares(int n, Emit emit) {
    std::vector<uint8_t> cells(static_cast<size_t>(n) * n);
    std::vector<uint32_t> colmask(n, 0);
    auto rec = [&](auto&& self, int r, int c, uint32_t rowmask) -> void {
        if (c == n) {
            if (r + 1 == n) {
                emit(CayleyTable(n, cells));
                return;
            }
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

inline bool tables_isomorphic(const CayleyTable& a, const CayleyTable& b,
                              std::vector<int>& perm) {
    const int n = a.order();
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (int x = 0; x < n && ok; ++x)
            for (int y = 0; y < n && ok; ++y)
                ok = b.at(perm[x], perm[y]) == perm[a.at(x, y)];
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace detail

// Independent oracle: enumerate all Latin squares directly, filter by total
// symmetry, classify by permutation search. No shared code with the class
// pipeline beyond the property predicates.
inline OrderSummary bruteforce_order(int n) {
    if (n < 1) throw domain_error("order must be >= 1");
    if (n > 5) throw limit_error("bruteforce_order limited to order 5");
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<CayleyTable> found;
    detail::latin_squares(n, [&](const CayleyTable& t) {
        if (is_totally_symmetric(t)) found.push_back(t);
    });

    std::vector<CayleyTable> reps;
    std::vector<uint64_t> sizes;
    std::vector<int> perm(n);
    for (const CayleyTable& t : found) {
        bool placed = false;
        for (size_t i = 0; i < reps.size() && !placed; ++i) {
            if (detail::tables_isomorphic(t, reps[i], perm)) {
                ++sizes[i];
                placed = true;
            }
        }
        if (!placed) {
            reps.push_back(t);
            sizes.push_back(1);
        }
    }

    OrderSummary s;
    s.order = n;
    const uint64_t nfact = factorial_u64(n);
    for (size_t i = 0; i < reps.size(); ++i) {
        uint64_t aut = 0;
        std::iota(perm.begin(), perm.end(), 0);
        do {
            bool fixes = true;
            for (int x = 0; x < n && fixes; ++x)
                for (int y = 0; y < n && fixes; ++y)
                    fixes = reps[i].at(perm[x], perm[y]) == perm[reps[i].at(x, y)];
            if (fixes) ++aut;
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (aut * sizes[i] != nfact)
            throw audit_error("bruteforce orbit size disagrees with n!/aut");
        PropertyFlags f = compute_flags(reps[i]);
        ++s.class_total;
        s.labeled_total += sizes[i];
        auto tally = [&](bool on, FlagSummary& t) {
            if (!on) return;
            ++t.classes;
            t.labeled += sizes[i];
        };
        tally(f.medial, s.medial);
        tally(f.idempotent, s.idempotent);
        tally(f.unipotent, s.unipotent);
        tally(f.associative, s.associative);
    }

    // diagonal classes among the found squares, again by permutation search
    std::vector<std::vector<uint8_t>> diag_reps;
    for (const CayleyTable& t : found) {
        std::vector<uint8_t> d(n);
        for (int x = 0; x < n; ++x) d[x] = static_cast<uint8_t>(t.at(x, x));
        bool placed = false;
        for (const auto& rep : diag_reps) {
            std::iota(perm.begin(), perm.end(), 0);
            do {
                bool ok = true;
                for (int x = 0; x < n && ok; ++x)
                    ok = rep[perm[x]] == perm[d[x]];
                if (ok) {
                    placed = true;
                    break;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            if (placed) break;
        }
        if (!placed) diag_reps.push_back(d);
    }
    s.diagonal_class_count = diag_reps.size();
    s.solver_visits = found.size();
    s.runtime_ms = static_cast<uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0)
            .count());
    return s;
}

inline nlohmann::json flag_summary_to_json(const FlagSummary& f) {
    return nlohmann::json{{"labeled", f.labeled.to_string()},
                          {"classes", f.classes}};
}

inline nlohmann::json summary_to_json(const OrderSummary& s) {
    nlohmann::json j;
    j["order"] = s.order;
    j["labeled_total"] = s.labeled_total.to_string();
    j["class_total"] = s.class_total;
    j["medial"] = flag_summary_to_json(s.medial);
    j["idempotent"] = flag_summary_to_json(s.idempotent);
    j["unipotent"] = flag_summary_to_json(s.unipotent);
    j["associative"] = flag_summary_to_json(s.associative);
    j["diagonal_class_count"] = s.diagonal_class_count;
    j["work_units"] = s.work_units;
    j["solver_visits"] = s.solver_visits;
    j["runtime_ms"] = s.runtime_ms;
    return j;
}

inline std::string summary_csv_header() {
    return "order,labeled,classes,medial_labeled,medial_classes,"
           "idempotent_labeled,idempotent_classes,unipotent_labeled,"
           "unipotent_classes";
}

inline std::string summary_csv_row(const OrderSummary& s) {
    std::string out = std::to_string(s.order);
    out += ',' + s.labeled_total.to_string();
    out += ',' + std::to_string(s.class_total);
    out += ',' + s.medial.labeled.to_string();
    out += ',' + std::to_string(s.medial.classes);
    out += ',' + s.idempotent.labeled.to_string();
    out += ',' + std::to_string(s.idempotent.classes);
    out += ',' + s.unipotent.labeled.to_string();
    out += ',' + std::to_string(s.unipotent.classes);
    return out;
}

}  // namespace tsq
