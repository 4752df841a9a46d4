#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "test_util.hpp"
#include "tsq/crosscheck.hpp"
#include "tsq/solver.hpp"

using namespace tsq;

namespace {

TripleSystem sts3() { return TripleSystem(3, {0, 1, 2}, {Triple(0, 1, 2)}); }

std::vector<TripleSystem> labeled_idempotent(int n) {
    std::vector<uint8_t> d(n);
    for (int x = 0; x < n; ++x) d[x] = static_cast<uint8_t>(x);
    std::vector<TripleSystem> out;
    if (!is_admissible_diagonal(d)) return out;
    enumerate_triangle_partitions(n, d, [&](const std::vector<Triple>& ts) {
        out.emplace_back(TripleSystem::Unchecked{}, n, DiagonalMap(d), ts);
    });
    return out;
}

std::vector<TripleSystem> labeled_unipotent(int n) {
    std::vector<TripleSystem> out;
    for (int k = 0; k < n; ++k) {
        std::vector<uint8_t> d(n, static_cast<uint8_t>(k));
        if (!is_admissible_diagonal(d)) return out;
        enumerate_triangle_partitions(n, d, [&](const std::vector<Triple>& ts) {
            out.emplace_back(TripleSystem::Unchecked{}, n, DiagonalMap(d), ts);
        });
    }
    return out;
}

std::string fingerprint(const TripleSystem& s) {
    std::string f;
    f.push_back(static_cast<char>(s.order()));
    for (int x = 0; x < s.order(); ++x) f.push_back(static_cast<char>(s.diag(x)));
    for (const Triple& t : s.triples())
        for (uint8_t v : t.v) f.push_back(static_cast<char>(v));
    return f;
}

}  // namespace

TEST_CASE("expanding the 3-point idempotent system") {
    std::set<std::string> outputs;
    for (int slot = 0; slot <= 3; ++slot) {
        TripleSystem up = expand_idempotent(sts3(), slot);
        CHECK(up.order() == 4);
        CHECK(up.constant_diagonal() == slot);
        CHECK(is_totally_symmetric(from_triples(up)));
        outputs.insert(fingerprint(up));
    }
    // the 4 slots give the 4 distinct labeled unipotent systems of order 4
    CHECK(outputs.size() == 4);
    auto all4 = labeled_unipotent(4);
    CHECK(all4.size() == 4);
    for (const auto& q : all4) CHECK(outputs.count(fingerprint(q)) == 1);
}

TEST_CASE("expand then collapse is the identity") {
    for (int n : {3, 7}) {
        for (const TripleSystem& q : labeled_idempotent(n)) {
            for (int slot = 0; slot <= n; ++slot) {
                TripleSystem up = expand_idempotent(q, slot);
                CHECK(collapse_unipotent(up) == q);
            }
        }
    }
}

TEST_CASE("expansion covers order 8 exactly") {
    std::set<std::string> outputs;
    auto idem7 = labeled_idempotent(7);
    CHECK(idem7.size() == 30);
    for (const TripleSystem& q : idem7)
        for (int slot = 0; slot <= 7; ++slot)
            CHECK(outputs.insert(fingerprint(expand_idempotent(q, slot))).second);
    CHECK(outputs.size() == 240);
    auto unip8 = labeled_unipotent(8);
    CHECK(unip8.size() == 240);
    for (const auto& q : unip8) CHECK(outputs.count(fingerprint(q)) == 1);
}

TEST_CASE("collapse fibers have size n+1") {
    // order 10 unipotent -> order 9 idempotent, every fiber exactly 10
    std::map<std::string, int> fibers;
    auto unip10 = labeled_unipotent(10);
    CHECK(unip10.size() == 8400);
    for (const TripleSystem& q : unip10) {
        TripleSystem down = collapse_unipotent(q);
        CHECK(down.order() == 9);
        ++fibers[fingerprint(down)];
    }
    CHECK(fibers.size() == 840);
    for (const auto& [fp, count] : fibers) CHECK(count == 10);
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(expand_idempotent(TripleSystem(3, {1, 2, 0}, {}), 0),
                    domain_error);
    CHECK_THROWS_AS(expand_idempotent(sts3(), 4), domain_error);
    CHECK_THROWS_AS(collapse_unipotent(sts3()), domain_error);
}

TEST_CASE("abelian group counts") {
    CHECK(abelian_group_count(1) == 1);
    CHECK(abelian_group_count(4) == 2);
    CHECK(abelian_group_count(8) == 3);
    CHECK(abelian_group_count(12) == 2);
    CHECK(abelian_group_count(16) == 5);
    CHECK(abelian_group_count(36) == 4);
}

TEST_CASE("abelian automorphism orders") {
    auto aut_of = [](uint64_t n, std::vector<std::pair<uint64_t, int>> fs) {
        AbelianType t;
        t.order = n;
        t.factors = std::move(fs);
        return abelian_aut_order(t);
    };
    CHECK(aut_of(4, {{2, 2}}) == 2);            // cyclic 4
    CHECK(aut_of(4, {{2, 1}, {2, 1}}) == 6);    // Klein
    CHECK(aut_of(8, {{2, 3}}) == 4);
    CHECK(aut_of(8, {{2, 1}, {2, 2}}) == 8);
    CHECK(aut_of(8, {{2, 1}, {2, 1}, {2, 1}}) == 168);
    CHECK(aut_of(16, {{2, 2}, {2, 2}}) == 96);
    CHECK(aut_of(16, {{2, 1}, {2, 1}, {2, 2}}) == 192);
    CHECK(aut_of(16, {{2, 1}, {2, 1}, {2, 1}, {2, 1}}) == 20160);
    CHECK(aut_of(9, {{3, 2}}) == 6);
    CHECK(aut_of(9, {{3, 1}, {3, 1}}) == 48);
    CHECK(aut_of(6, {{2, 1}, {3, 1}}) == 2);
}

TEST_CASE("predicted medial class counts, orders 1..16") {
    const std::vector<uint64_t> expected = {1, 1, 2, 2, 1, 2, 1, 3,
                                            4, 1, 1, 4, 1, 1, 2, 5};
    for (int n = 1; n <= 16; ++n)
        CHECK(predicted_medial_classes(n) == expected[n - 1]);
    CHECK_THROWS_AS(predicted_medial_classes(17), limit_error);
}

TEST_CASE("predicted medial labeled counts, orders 1..16") {
    const std::vector<const char*> expected = {
        "1", "2", "3", "16", "30", "360", "840", "15360", "68040", "907200",
        "3991680", "159667200", "518918400", "14529715200", "163459296000",
        "4250979532800"};
    for (int n = 1; n <= 16; ++n)
        CHECK(predicted_medial_labeled(n) == BigUint::from_decimal(expected[n - 1]));
}
