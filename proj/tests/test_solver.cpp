#include <catch2/catch_amalgamated.hpp>

#include "test_util.hpp"
#include "tsq/canon.hpp"
#include "tsq/solver.hpp"
#include "tsq/triples.hpp"

using namespace tsq;

namespace {

std::vector<uint8_t> identity_diag(int n) {
    std::vector<uint8_t> d(n);
    for (int x = 0; x < n; ++x) d[x] = static_cast<uint8_t>(x);
    return d;
}

}  // namespace

TEST_CASE("residual graph construction") {
    ResidualGraph g = make_residual(3, std::vector<uint8_t>{1, 2, 0});
    CHECK(g.edge_count == 0);

    ResidualGraph g2 = make_residual(7, identity_diag(7));
    CHECK(g2.edge_count == 21);
    for (int v = 0; v < 7; ++v) CHECK(std::popcount(g2.adj[v]) == 6);

    CHECK_THROWS_AS(make_residual(2, std::vector<uint8_t>{1, 0}), domain_error);
    // identity at n = 2: odd residual degree
    CHECK_THROWS_AS(make_residual(2, std::vector<uint8_t>{0, 1}), domain_error);
}

TEST_CASE("known partition counts") {
    // labeled Steiner triple systems on 7 and 9 points
    CHECK(count_triangle_partitions(7, identity_diag(7)) == 30);
    CHECK(count_triangle_partitions(9, identity_diag(9)) == 840);

    // constant diagonal at n = 4 leaves one triangle
    for (int k = 0; k < 4; ++k) {
        std::vector<uint8_t> d(4, static_cast<uint8_t>(k));
        CHECK(count_triangle_partitions(4, d) == 1);
    }

    // empty residual graph has exactly the empty partition
    CHECK(count_triangle_partitions(3, std::vector<uint8_t>{1, 2, 0}) == 1);
    CHECK(count_triangle_partitions(1, std::vector<uint8_t>{0}) == 1);
}

TEST_CASE("visits are valid systems in deterministic order") {
    std::vector<std::vector<Triple>> first, second;
    auto run = [&](std::vector<std::vector<Triple>>& sink) {
        return enumerate_triangle_partitions(
            7, identity_diag(7),
            [&](const std::vector<Triple>& ts) { sink.push_back(ts); });
    };
    CHECK(run(first) == 30);
    CHECK(run(second) == 30);
    CHECK(first == second);

    for (const auto& ts : first) {
        TripleSystem s(7, identity_diag(7), ts);  // validates invariants
        CHECK(is_totally_symmetric(from_triples(s)));
    }
}

TEST_CASE("branching follows the lowest uncovered pair") {
    std::vector<std::vector<Triple>> visits;
    enumerate_triangle_partitions(
        7, identity_diag(7),
        [&](const std::vector<Triple>& ts) { visits.push_back(ts); });
    for (const auto& ts : visits) {
        // first chosen triangle must cover the pair {0,1}
        CHECK(ts[0].v[0] == 0);
        CHECK(ts[0].v[1] == 1);
    }
    // third vertices of the first triangle appear in ascending runs
    std::vector<int> thirds;
    for (const auto& ts : visits) thirds.push_back(ts[0].v[2]);
    CHECK(std::is_sorted(thirds.begin(), thirds.end()));
}

TEST_CASE("visitor exceptions abort and propagate") {
    int seen = 0;
    CHECK_THROWS_AS(enumerate_triangle_partitions(
                        7, identity_diag(7),
                        [&](const std::vector<Triple>&) {
                            if (++seen == 3) throw io_error("stop");
                        }),
                    io_error);
    CHECK(seen == 3);
}

TEST_CASE("split jobs partition the search") {
    const auto d = identity_diag(9);
    for (int depth : {0, 1, 2, 3}) {
        auto jobs = split_jobs(9, d, depth);
        uint64_t total = 0;
        std::vector<std::vector<Triple>> all;
        for (const SubJob& job : jobs)
            total += run_subjob(job, [&](const std::vector<Triple>& ts) {
                all.push_back(ts);
            });
        CHECK(total == 840);
        CHECK(all.size() == 840);
        std::sort(all.begin(), all.end());
        CHECK(std::adjacent_find(all.begin(), all.end()) == all.end());
    }
}

TEST_CASE("checkpoint lines round trip") {
    auto jobs = split_jobs(7, identity_diag(7), 2);
    REQUIRE(!jobs.empty());
    for (const SubJob& job : jobs) {
        const std::string line = checkpoint_line(job);
        const SubJob back = parse_checkpoint(line);
        CHECK(back.order == job.order);
        CHECK(back.diag == job.diag);
        CHECK(back.prefix == job.prefix);
        CHECK(checkpoint_line(back) == line);
    }
    const SubJob empty_prefix = parse_checkpoint("3|1,2,0|");
    CHECK(empty_prefix.prefix.empty());
    CHECK(run_subjob(empty_prefix, [](const std::vector<Triple>&) {}) == 1);

    CHECK_THROWS_AS(parse_checkpoint("junk"), parse_error);
    CHECK_THROWS_AS(parse_checkpoint("3|1,2|"), parse_error);
    CHECK_THROWS_AS(parse_checkpoint("7|0,1,2,3,4,5,6|0-1"), parse_error);
}

TEST_CASE("resuming a stale prefix is rejected") {
    SubJob bad;
    bad.order = 7;
    bad.diag = identity_diag(7);
    bad.prefix = {Triple(0, 1, 2), Triple(0, 2, 3)};  // reuses pair {0,2}
    CHECK_THROWS_AS(run_subjob(bad, [](const std::vector<Triple>&) {}),
                    domain_error);
}

TEST_CASE("count consistency with diagonal orbit arithmetic, n <= 6") {
    // sum over diagonal classes of labeled_count x partitions(rep) equals
    // the count of labeled TS systems found by the map-level sweep
    for (int n = 1; n <= 6; ++n) {
        uint64_t via_classes = 0;
        for (const auto& dc : generate_diagonal_classes(n))
            via_classes += dc.labeled_count * count_triangle_partitions(n, dc.rep);
        CHECK(via_classes == tsqtest::all_ts_systems(n).size());
    }
}
