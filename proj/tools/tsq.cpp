// Command-line driver: enumerate totally symmetric quasigroups, list
// diagonal configurations, check single tables, and verify the counting
// identities.
//
// Exit codes: 0 success, 1 semantic negative (not TS, failed verdict),
// 2 usage or parse error, 3 internal audit failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsq/cayley.hpp"
#include "tsq/crosscheck.hpp"
#include "tsq/diagonal.hpp"
#include "tsq/pipeline.hpp"
#include "tsq/store.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kDefaultOrderLimit = 12;

struct CommonOpts {
    int workers = 1;
    uint64_t memory_budget = 256ull << 20;
    std::string spill_dir;
    std::string format = "text";
    bool force = false;
};

fs::path resolve_spill_dir(const CommonOpts& opts) {
    if (!opts.spill_dir.empty()) return opts.spill_dir;
    if (const char* env = std::getenv("TSQ_SPILL_DIR"); env && *env) return env;
    return fs::temp_directory_path() / "tsq-spill";
}

tsq::StoreConfig make_store_config(const CommonOpts& opts) {
    tsq::StoreConfig cfg;
    cfg.memory_budget = opts.memory_budget;
    cfg.spill_directory = resolve_spill_dir(opts);
    return cfg;
}

void check_order_limit(int order, bool force) {
    if (order > kDefaultOrderLimit && !force)
        throw tsq::limit_error(
            "orders above " + std::to_string(kDefaultOrderLimit) +
            " can run for hours or days; pass --force to proceed");
}

tsq::Filter parse_filter(const std::string& name) {
    if (name == "none") return tsq::Filter::none;
    if (name == "idempotent") return tsq::Filter::idempotent;
    if (name == "unipotent") return tsq::Filter::unipotent;
    if (name == "medial") return tsq::Filter::medial;
    throw CLI::ValidationError("--filter",
                               "expected none|idempotent|unipotent|medial");
}

void print_summary_text(const tsq::OrderSummary& s, std::ostream& os) {
    os << "order " << s.order << '\n'
       << "  labeled            " << s.labeled_total.to_string() << '\n'
       << "  classes            " << s.class_total << '\n'
       << "  medial             " << s.medial.labeled.to_string() << " / "
       << s.medial.classes << '\n'
       << "  idempotent         " << s.idempotent.labeled.to_string() << " / "
       << s.idempotent.classes << '\n'
       << "  unipotent          " << s.unipotent.labeled.to_string() << " / "
       << s.unipotent.classes << '\n'
       << "  associative        " << s.associative.labeled.to_string() << " / "
       << s.associative.classes << '\n'
       << "  diagonal classes   " << s.diagonal_class_count << '\n'
       << "  work units         " << s.work_units << '\n'
       << "  solver visits      " << s.solver_visits << '\n'
       << "  runtime            " << s.runtime_ms << " ms\n";
}

void emit_summary(const tsq::OrderSummary& s, const std::string& format) {
    if (format == "json") {
        std::cout << tsq::summary_to_json(s).dump(2) << '\n';
    } else if (format == "csv") {
        std::cout << tsq::summary_csv_header() << '\n'
                  << tsq::summary_csv_row(s) << '\n';
    } else {
        print_summary_text(s, std::cout);
    }
}

int cmd_diagonals(int order, bool count_only) {
    std::vector<tsq::DiagonalClass> classes = tsq::generate_diagonal_classes(order);
    if (count_only) {
        std::map<int, uint64_t> by_i;
        for (const auto& dc : classes) ++by_i[dc.idempotents];
        std::string line;
        for (const auto& [i, count] : by_i)
            line += "i=" + std::to_string(i) + ": " + std::to_string(count) + ", ";
        line += "total: " + std::to_string(classes.size());
        std::cout << line << '\n';
        return 0;
    }
    for (const auto& dc : classes) {
        std::cout << "i=" << dc.idempotents << " aut=" << dc.aut_order
                  << " labeled=" << dc.labeled_count << " d=";
        for (int x = 0; x < dc.order; ++x) {
            if (x) std::cout << ',';
            std::cout << static_cast<int>(dc.rep[x]);
        }
        std::cout << '\n';
    }
    return 0;
}

int cmd_enumerate(int order, const std::string& filter_name,
                  const CommonOpts& opts) {
    check_order_limit(order, opts.force);
    tsq::PipelineConfig cfg;
    cfg.store = make_store_config(opts);
    cfg.workers = opts.workers;
    tsq::OrderSummary s =
        tsq::enumerate_order_full(order, parse_filter(filter_name), cfg).summary;
    emit_summary(s, opts.format);
    return 0;
}

int cmd_tables(int max_order, bool predicted, const CommonOpts& opts) {
    check_order_limit(max_order, opts.force);
    std::vector<tsq::OrderSummary> rows;
    for (int n = 1; n <= max_order; ++n) {
        tsq::PipelineConfig cfg;
        cfg.store = make_store_config(opts);
        cfg.workers = opts.workers;
        rows.push_back(tsq::enumerate_order_full(n, tsq::Filter::none, cfg).summary);
    }
    bool disagreement = false;
    if (opts.format == "csv") {
        std::string header = tsq::summary_csv_header();
        if (predicted)
            header += ",predicted_medial_labeled,predicted_medial_classes,match";
        std::cout << header << '\n';
        for (const auto& s : rows) {
            std::string line = tsq::summary_csv_row(s);
            if (predicted) {
                const tsq::BigUint lab = tsq::predicted_medial_labeled(s.order);
                const uint64_t cls = tsq::predicted_medial_classes(s.order);
                const bool ok =
                    lab == s.medial.labeled && cls == s.medial.classes;
                disagreement = disagreement || !ok;
                line += ',' + lab.to_string() + ',' + std::to_string(cls) + ',' +
                        (ok ? "yes" : "DISAGREE");
            }
            std::cout << line << '\n';
        }
    } else {
        std::cout << "order | labeled / classes | medial / classes | "
                     "idempotent / classes | unipotent / classes";
        if (predicted) std::cout << " | predicted medial / classes";
        std::cout << '\n';
        for (const auto& s : rows) {
            std::cout << s.order << " | " << s.labeled_total.to_string() << " / "
                      << s.class_total << " | " << s.medial.labeled.to_string()
                      << " / " << s.medial.classes << " | "
                      << s.idempotent.labeled.to_string() << " / "
                      << s.idempotent.classes << " | "
                      << s.unipotent.labeled.to_string() << " / "
                      << s.unipotent.classes;
            if (predicted) {
                const tsq::BigUint lab = tsq::predicted_medial_labeled(s.order);
                const uint64_t cls = tsq::predicted_medial_classes(s.order);
                const bool ok =
                    lab == s.medial.labeled && cls == s.medial.classes;
                disagreement = disagreement || !ok;
                std::cout << " | " << lab.to_string() << " / " << cls
                          << (ok ? "" : "  <-- DISAGREE");
            }
            std::cout << '\n';
        }
    }
    return disagreement ? 1 : 0;
}

int cmd_check(const std::string& file, int base_point, bool has_base_point) {
    std::ifstream in(file);
    if (!in) {
        std::cerr << "error: cannot open " << file << '\n';
        return 2;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    tsq::CayleyTable t = tsq::parse_cayley(buf.str());

    auto verdict = [](bool b) { return b ? "yes" : "no"; };
    if (!tsq::is_latin(t)) {
        std::cout << "latin: no\n";
        std::cout << "not a Latin square\n";
        return 1;
    }
    std::cout << "latin: yes\n";
    const bool ts = tsq::is_totally_symmetric(t);
    std::cout << "totally_symmetric: " << verdict(ts) << '\n';
    std::cout << "medial: " << verdict(tsq::is_medial(t)) << '\n';
    std::cout << "idempotent: " << verdict(tsq::is_idempotent(t)) << '\n';
    if (auto k = tsq::is_unipotent(t))
        std::cout << "unipotent: yes (k=" << *k << ")\n";
    else
        std::cout << "unipotent: no\n";
    std::cout << "associative: " << verdict(tsq::is_associative(t)) << '\n';
    std::cout << "elementary_abelian_2: "
              << verdict(tsq::is_elementary_abelian_2(t)) << '\n';
    if (has_base_point) {
        if (base_point < 0 || base_point >= t.order()) {
            std::cerr << "error: base point out of range\n";
            return 2;
        }
        if (ts) {
            tsq::CayleyTable a = tsq::derived_addition(t, base_point);
            std::cout << "derived_addition_associative (p=" << base_point
                      << "): " << verdict(tsq::is_associative(a)) << '\n';
        } else {
            std::cout << "derived_addition_associative (p=" << base_point
                      << "): n/a (not totally symmetric)\n";
        }
    }
    return ts ? 0 : 1;
}

int cmd_bijection(int order, const CommonOpts& opts) {
    check_order_limit(order + 1, opts.force);
    tsq::PipelineConfig cfg;
    cfg.store = make_store_config(opts);
    cfg.workers = opts.workers;
    tsq::OrderSummary idem =
        tsq::enumerate_order_full(order, tsq::Filter::idempotent, cfg).summary;
    tsq::PipelineConfig cfg2;
    cfg2.store = make_store_config(opts);
    cfg2.workers = opts.workers;
    tsq::OrderSummary unip =
        tsq::enumerate_order_full(order + 1, tsq::Filter::unipotent, cfg2).summary;

    bool all_pass = true;
    {
        const tsq::BigUint expected =
            idem.labeled_total * static_cast<uint64_t>(order + 1);
        const bool ok = unip.labeled_total == expected;
        all_pass = all_pass && ok;
        std::cout << (ok ? "PASS" : "FAIL") << ": unipotent labeled "
                  << unip.labeled_total.to_string() << " = " << (order + 1)
                  << " x " << idem.labeled_total.to_string()
                  << " idempotent labeled\n";
    }
    {
        const bool ok = unip.class_total == idem.class_total;
        all_pass = all_pass && ok;
        std::cout << (ok ? "PASS" : "FAIL") << ": unipotent classes "
                  << unip.class_total << " = idempotent classes "
                  << idem.class_total << '\n';
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"totally symmetric quasigroup enumerator"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto add_common = [&](CLI::App* sub, bool with_format = true) {
        sub->add_option("--workers", opts.workers, "worker thread count")
            ->check(CLI::Range(1, 256));
        sub->add_option("--memory-budget", opts.memory_budget,
                        "class store budget in bytes before spilling");
        sub->add_option("--spill-dir", opts.spill_dir,
                        "spill directory (default $TSQ_SPILL_DIR)");
        sub->add_flag("--force", opts.force, "allow orders above the safety limit");
        if (with_format)
            sub->add_option("--format", opts.format, "output format")
                ->check(CLI::IsMember({"text", "json", "csv"}));
    };

    int order = 0;
    bool count_only = false;
    CLI::App* diagonals =
        app.add_subcommand("diagonals", "list admissible diagonal classes");
    diagonals->add_option("--order", order, "quasigroup order")
        ->required()
        ->check(CLI::Range(1, 16));
    diagonals->add_flag("--count-only", count_only, "print per-i counts only");

    std::string filter = "none";
    CLI::App* enumerate =
        app.add_subcommand("enumerate", "enumerate one order and summarize");
    enumerate->add_option("--order", order, "quasigroup order")
        ->required()
        ->check(CLI::Range(1, 16));
    enumerate->add_option("--filter", filter,
                          "none|idempotent|unipotent|medial");
    add_common(enumerate);

    int max_order = 0;
    bool predicted = false;
    CLI::App* tables =
        app.add_subcommand("tables", "summary tables for orders 1..N");
    tables->add_option("--max-order", max_order, "largest order")
        ->required()
        ->check(CLI::Range(1, 16));
    tables->add_flag("--predicted", predicted,
                     "add predicted medial columns and mark disagreements");
    add_common(tables);

    std::string file;
    int base_point = 0;
    CLI::App* check = app.add_subcommand("check", "property report for a table");
    check->add_option("file", file, "Cayley table file")->required();
    CLI::Option* popt =
        check->add_option("--p", base_point, "base point for derived addition");

    CLI::App* bijection = app.add_subcommand(
        "bijection", "verify the idempotent/unipotent correspondence at order n");
    bijection->add_option("--order", order, "idempotent-side order")
        ->required()
        ->check(CLI::Range(1, 15));
    add_common(bijection, /*with_format=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(diagonals)) return cmd_diagonals(order, count_only);
        if (app.got_subcommand(enumerate)) return cmd_enumerate(order, filter, opts);
        if (app.got_subcommand(tables)) return cmd_tables(max_order, predicted, opts);
        if (app.got_subcommand(check))
            return cmd_check(file, base_point, popt->count() > 0);
        if (app.got_subcommand(bijection)) return cmd_bijection(order, opts);
    } catch (const tsq::parse_error& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const tsq::audit_error& e) {
        std::cerr << "audit failure: " << e.what() << '\n';
        return 3;
    } catch (const tsq::limit_error& e) {
        std::cerr << "refused: " << e.what() << '\n';
        return 2;
    } catch (const tsq::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
