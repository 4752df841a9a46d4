#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "tsq/store.hpp"

using namespace tsq;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("tsq-test-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static inline int counter = 0;
};

StoreConfig config(const TempDir& dir, uint64_t budget = 1u << 30,
                   int shards = 8) {
    StoreConfig cfg;
    cfg.shard_count = shards;
    cfg.memory_budget = budget;
    cfg.spill_directory = dir.path;
    return cfg;
}

const PropertyFlags kFlags{true, false, false, false};

}  // namespace

TEST_CASE("record accumulates multiplicity") {
    TempDir dir;
    ClassStore store(config(dir));
    store.record("k1", 6, kFlags, 1);
    store.record("k1", 6, kFlags, 1);
    store.record("k2", 3, kFlags, 2);
    auto fin = store.finalize();
    REQUIRE(fin.records.size() == 2);
    CHECK(fin.records[0].multiplicity + fin.records[1].multiplicity == 4);
    CHECK(fin.summary.class_count == 2);
    CHECK(fin.summary.labeled_total == BigUint(4));
}

TEST_CASE("mismatched metadata for one key is corruption") {
    TempDir dir;
    ClassStore store(config(dir));
    store.record("k1", 6, kFlags, 1);
    CHECK_THROWS_AS(store.record("k1", 3, kFlags, 1), corruption_error);
    PropertyFlags other{false, true, false, false};
    CHECK_THROWS_AS(store.record("k1", 6, other, 1), corruption_error);
}

TEST_CASE("multiplicity must be positive") {
    TempDir dir;
    ClassStore store(config(dir));
    CHECK_THROWS_AS(store.record("k", 1, kFlags, 0), domain_error);
}

TEST_CASE("spill transparency") {
    TempDir dir;
    auto run = [&](bool spill_mid, uint64_t budget) {
        ClassStore store(config(dir, budget));
        store.record("alpha", 6, kFlags, 1);
        store.record("beta", 3, kFlags, 2);
        if (spill_mid) store.spill_all();
        store.record("alpha", 6, kFlags, 4);
        store.record("gamma", 2, kFlags, 1);
        if (spill_mid) store.spill_all();
        auto fin = store.finalize();
        return serialize_class_records(fin.records);
    };
    const std::string plain = run(false, 1u << 30);
    CHECK(run(true, 1u << 30) == plain);
    // budget 0 forces a spill after every record
    CHECK(run(false, 0) == plain);
}

TEST_CASE("spill returns the run file path") {
    TempDir dir;
    ClassStore store(config(dir));
    store.record("k", 6, kFlags, 1);
    const int shard = store.shard_of("k");
    const fs::path run = store.spill(shard);
    CHECK(fs::exists(run));
    CHECK(run.filename().string() ==
          "shard" + std::to_string(shard) + "-run0.tsq");
    CHECK(store.spill(shard).empty());  // nothing left to spill
    CHECK(store.has_runs());
}

TEST_CASE("overlapping runs merge at finalize") {
    TempDir dir;
    ClassStore store(config(dir));
    store.record("k", 6, kFlags, 1);
    store.spill_all();
    store.record("k", 6, kFlags, 2);
    store.spill_all();
    CHECK(store.resident_bytes() == 0);
    store.record("k", 6, kFlags, 3);
    CHECK(store.resident_bytes() > 0);
    auto fin = store.finalize();
    REQUIRE(fin.records.size() == 1);
    CHECK(fin.records[0].multiplicity == 6);
}

TEST_CASE("empty store summary is zero") {
    TempDir dir;
    ClassStore store(config(dir));
    auto fin = store.finalize();
    CHECK(fin.records.empty());
    CHECK(fin.summary.class_count == 0);
    CHECK(fin.summary.labeled_total == BigUint(0));
    CHECK(fin.summary.medial.classes == 0);
}

TEST_CASE("per-flag sub-summaries") {
    TempDir dir;
    ClassStore store(config(dir));
    store.record("a", 2, PropertyFlags{true, true, false, false}, 10);
    store.record("b", 2, PropertyFlags{true, false, true, true}, 20);
    store.record("c", 2, PropertyFlags{false, false, false, false}, 30);
    auto fin = store.finalize();
    CHECK(fin.summary.labeled_total == BigUint(60));
    CHECK(fin.summary.medial.classes == 2);
    CHECK(fin.summary.medial.labeled == BigUint(30));
    CHECK(fin.summary.idempotent.classes == 1);
    CHECK(fin.summary.idempotent.labeled == BigUint(10));
    CHECK(fin.summary.unipotent.labeled == BigUint(20));
    CHECK(fin.summary.associative.labeled == BigUint(20));
}

TEST_CASE("records come back sorted by key with 128-bit multiplicities") {
    TempDir dir;
    ClassStore store(config(dir, 0));  // spill everything
    const uint128 big = (static_cast<uint128>(1) << 90) + 7;
    store.record("zzz", 1, kFlags, big);
    store.record("aaa", 1, kFlags, 3);
    store.record("mmm", 1, kFlags, 5);
    store.record("zzz", 1, kFlags, big);
    auto fin = store.finalize();
    REQUIRE(fin.records.size() == 3);
    CHECK(fin.records[0].key == "aaa");
    CHECK(fin.records[1].key == "mmm");
    CHECK(fin.records[2].key == "zzz");
    CHECK(fin.records[2].multiplicity == big * 2);
    CHECK(fin.summary.labeled_total ==
          BigUint(big) * 2 + BigUint(8));
}

TEST_CASE("corrupt run files are reported by name") {
    TempDir dir;
    {
        ClassStore store(config(dir, 0, 1));
        store.record("k", 6, kFlags, 1);
        // truncate the run file behind the store's back
        fs::path run = dir.path / "shard0-run0.tsq";
        REQUIRE(fs::exists(run));
        std::ofstream f(run, std::ios::binary | std::ios::trunc);
        f << "TSQ1\x05";
        f.close();
        CHECK_THROWS_AS(store.finalize(), corruption_error);
    }
    {
        ClassStore store(config(dir, 0, 1));
        store.record("k", 6, kFlags, 1);
        fs::path run = dir.path / "shard0-run0.tsq";
        std::ofstream f(run, std::ios::binary | std::ios::trunc);
        f << "BAD!";
        f.close();
        try {
            store.finalize();
            FAIL("expected corruption_error");
        } catch (const corruption_error& e) {
            CHECK(std::string(e.what()).find("shard0-run0.tsq") !=
                  std::string::npos);
        }
    }
}

TEST_CASE("spill failure leaves the shard intact") {
    TempDir dir;
    StoreConfig cfg = config(dir);
    // a regular file where the spill directory should be
    cfg.spill_directory = dir.path / "blocked";
    std::ofstream(cfg.spill_directory).put('x');
    ClassStore store(cfg);
    store.record("k", 6, kFlags, 2);
    CHECK_THROWS_AS(store.spill(store.shard_of("k")), io_error);
    auto fin = store.finalize();  // memory copy still present
    REQUIRE(fin.records.size() == 1);
    CHECK(fin.records[0].multiplicity == 2);
}

TEST_CASE("shard filter drops foreign records for later passes") {
    TempDir dir1, dir2, dirf;
    // full run
    ClassStore full(config(dirf, 0, 4));
    std::vector<std::string> keys = {"a", "b", "c", "d", "e", "f", "g", "h"};
    for (const auto& k : keys) full.record(k, 2, kFlags, 1);
    auto want = serialize_class_records(full.finalize().records);

    // two passes over complementary shard sets
    StoreConfig c1 = config(dir1, 0, 4);
    c1.shard_filter = std::set<int>{0, 1};
    StoreConfig c2 = config(dir2, 0, 4);
    c2.shard_filter = std::set<int>{2, 3};
    ClassStore pass1(c1), pass2(c2);
    for (const auto& k : keys) {
        pass1.record(k, 2, kFlags, 1);
        pass2.record(k, 2, kFlags, 1);
    }
    CHECK(pass1.dropped_records() + pass2.dropped_records() == keys.size());
    auto r1 = pass1.finalize().records;
    auto r2 = pass2.finalize().records;
    std::vector<ClassRecord> merged = r1;
    merged.insert(merged.end(), r2.begin(), r2.end());
    std::sort(merged.begin(), merged.end(),
              [](const ClassRecord& a, const ClassRecord& b) {
                  return a.key < b.key;
              });
    CHECK(serialize_class_records(merged) == want);
}

TEST_CASE("manifest lists completed shards and runs") {
    TempDir dir;
    StoreConfig cfg = config(dir, 0, 4);
    cfg.shard_filter = std::set<int>{1, 3};
    ClassStore store(cfg);
    for (const char* k : {"a", "b", "c", "d", "e", "f"})
        store.record(k, 2, kFlags, 1);
    store.write_manifest();
    std::ifstream in(dir.path / "manifest.json");
    REQUIRE(in.good());
    nlohmann::json m = nlohmann::json::parse(in);
    CHECK(m["shard_count"] == 4);
    CHECK(m["completed_shards"] == nlohmann::json({1, 3}));
    for (const auto& [shard, runs] : m["runs"].items()) {
        CHECK((shard == "1" || shard == "3"));
        CHECK(!runs.empty());
    }
}

TEST_CASE("concurrent producers") {
    TempDir dir;
    ClassStore store(config(dir, 1 << 10, 8));
    constexpr int kThreads = 4, kPerThread = 500;
    std::vector<std::thread> threads;
    for (int t = 0; t < kThreads; ++t) {
        threads.emplace_back([&store, t] {
            for (int i = 0; i < kPerThread; ++i)
                store.record("key" + std::to_string(i % 50), 2, kFlags, 1);
            (void)t;
        });
    }
    for (auto& th : threads) th.join();
    auto fin = store.finalize();
    CHECK(fin.records.size() == 50);
    CHECK(fin.summary.labeled_total ==
          BigUint(static_cast<uint64_t>(kThreads) * kPerThread));
}

TEST_CASE("record after finalize is an error") {
    TempDir dir;
    ClassStore store(config(dir));
    store.finalize();
    CHECK_THROWS_AS(store.record("k", 1, kFlags, 1), tsq::error);
}
