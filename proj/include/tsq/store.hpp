#pragma once

// Memory-bounded accumulator of isomorphism classes: a sharded hash map
// keyed by canonical key. Shards spill to sorted run files under memory
// pressure; finalize merges all runs and resident entries into one
// key-sorted stream with exact big-integer totals. Spilling never changes
// the finalize output.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "tsq/bigint.hpp"
#include "tsq/cayley.hpp"
#include "tsq/error.hpp"

namespace tsq {

struct StoreConfig {
    int shard_count = 256;  // power of two
    uint64_t memory_budget = 256ull << 20;
    std::filesystem::path spill_directory;
    // Recovery mode: records hashed to other shards are dropped and must be
    // recovered by a later pass.
    std::optional<std::set<int>> shard_filter;
};

struct ClassRecord {
    std::string key;
    uint64_t aut_order = 0;
    PropertyFlags flags;
    uint128 multiplicity = 0;
};

struct FlagTotals {
    uint64_t classes = 0;
    BigUint labeled;
};

struct ClassSummary {
    uint64_t class_count = 0;
    BigUint labeled_total;
    FlagTotals medial, idempotent, unipotent, associative;
};

namespace detail {

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>(v >> 8));
}
inline void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
inline void put_u128(std::string& out, uint128 v) {
    for (int i = 0; i < 16; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class RunReader {
public:
    RunReader(const std::filesystem::path& path) : path_(path.string()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw io_error("cannot open run file " + path_);
        std::string data((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        data_ = std::move(data);
        if (data_.size() < 4 || data_.compare(0, 4, "TSQ1") != 0)
            throw corruption_error("bad magic in run file " + path_);
        pos_ = 4;
    }

    std::optional<ClassRecord> next() {
        if (pos_ == data_.size()) return std::nullopt;
        ClassRecord r;
        const uint16_t klen = static_cast<uint16_t>(u8() | (u8() << 8));
        if (data_.size() - pos_ < klen)
            throw corruption_error("truncated key in run file " + path_);
        r.key = data_.substr(pos_, klen);
        pos_ += klen;
        uint64_t aut = 0;
        for (int i = 0; i < 8; ++i) aut |= static_cast<uint64_t>(u8()) << (8 * i);
        r.aut_order = aut;
        r.flags = flags_from_byte(static_cast<uint8_t>(u8()));
        uint128 mult = 0;
        for (int i = 0; i < 16; ++i) mult |= static_cast<uint128>(u8()) << (8 * i);
        r.multiplicity = mult;
        return r;
    }

private:
    unsigned u8() {
        if (pos_ >= data_.size())
            throw corruption_error("truncated record in run file " + path_);
        return static_cast<unsigned char>(data_[pos_++]);
    }
    std::string path_;
    std::string data_;
    size_t pos_ = 0;
};

}  // namespace detail

inline std::string serialize_class_record(const ClassRecord& r) {
    std::string out;
    if (r.key.size() > 0xffff) throw domain_error("class key too long");
    detail::put_u16(out, static_cast<uint16_t>(r.key.size()));
    out += r.key;
    detail::put_u64(out, r.aut_order);
    out.push_back(static_cast<char>(flags_to_byte(r.flags)));
    detail::put_u128(out, r.multiplicity);
    return out;
}

// Canonical byte stream for a record list; used for run files and for
// comparing finalize outputs.
inline std::string serialize_class_records(const std::vector<ClassRecord>& rs) {
    std::string out = "TSQ1";
    for (const ClassRecord& r : rs) out += serialize_class_record(r);
    return out;
}

class ClassStore {
public:
    explicit ClassStore(StoreConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.shard_count < 1 || (cfg_.shard_count & (cfg_.shard_count - 1)))
            throw domain_error("shard_count must be a power of two");
        shards_ = std::vector<Shard>(static_cast<size_t>(cfg_.shard_count));
        shard_shift_ = 64;
        for (int c = cfg_.shard_count; c > 1; c >>= 1) --shard_shift_;
    }

    int shard_of(std::string_view key) const {
        if (cfg_.shard_count == 1) return 0;
        return static_cast<int>(detail::fnv1a64(key) >> shard_shift_);
    }

    // Accumulates multiplicity; aut_order and flags must match any existing
    // entry for the key.
    void record(std::string_view key, uint64_t aut_order, PropertyFlags flags,
                uint128 multiplicity) {
        if (finalized_) throw error("record after finalize");
        if (multiplicity == 0) throw domain_error("multiplicity must be >= 1");
        const int si = shard_of(key);
        if (cfg_.shard_filter && !cfg_.shard_filter->count(si)) {
            ++dropped_;
            return;
        }
        Shard& sh = shards_[si];
        {
            std::lock_guard<std::mutex> lk(sh.mtx);
            auto it = sh.map.find(std::string(key));
            if (it == sh.map.end()) {
                sh.map.emplace(std::string(key),
                               Entry{aut_order, flags, multiplicity});
                const uint64_t cost = entry_cost(key.size());
                sh.bytes += cost;
                resident_ += cost;
            } else {
                if (it->second.aut_order != aut_order ||
                    !(it->second.flags == flags))
                    throw corruption_error(
                        "record mismatch for existing class key " +
                        std::string(key));
                it->second.multiplicity += multiplicity;
            }
        }
        enforce_budget();
    }

    // Serialize one shard to a fresh run file and clear it from memory;
    // returns the run file's path (empty if the shard was already empty).
    // On I/O failure the shard is left intact.
    std::filesystem::path spill(int shard_index) {
        Shard& sh = shards_[shard_index];
        std::lock_guard<std::mutex> lk(sh.mtx);
        return spill_locked(shard_index, sh);
    }

    void spill_all() {
        for (int i = 0; i < cfg_.shard_count; ++i) spill(i);
    }

    bool has_runs() const {
        for (const Shard& sh : shards_)
            if (!sh.runs.empty()) return true;
        return false;
    }

    struct FinalizeResult {
        std::vector<ClassRecord> records;  // key-sorted, each key once
        ClassSummary summary;
    };

    // External merge of all runs and resident entries. Producers must have
    // stopped.
    FinalizeResult finalize() {
        finalized_ = true;
        FinalizeResult out;
        for (int si = 0; si < cfg_.shard_count; ++si) {
            Shard& sh = shards_[si];
            std::map<std::string, Entry> merged;
            auto absorb = [&](const std::string& key, const Entry& e) {
                auto it = merged.find(key);
                if (it == merged.end()) {
                    merged.emplace(key, e);
                } else {
                    if (it->second.aut_order != e.aut_order ||
                        !(it->second.flags == e.flags))
                        throw corruption_error("run files disagree on class " +
                                               to_hex_prefix(key));
                    it->second.multiplicity += e.multiplicity;
                }
            };
            for (const auto& run : sh.runs) {
                detail::RunReader reader(run);
                while (auto r = reader.next())
                    absorb(r->key, Entry{r->aut_order, r->flags, r->multiplicity});
            }
            for (const auto& [key, e] : sh.map) absorb(key, e);
            for (auto& [key, e] : merged)
                out.records.push_back(
                    ClassRecord{key, e.aut_order, e.flags, e.multiplicity});
        }
        std::sort(out.records.begin(), out.records.end(),
                  [](const ClassRecord& a, const ClassRecord& b) {
                      return a.key < b.key;
                  });
        for (const ClassRecord& r : out.records) {
            ++out.summary.class_count;
            out.summary.labeled_total += r.multiplicity;
            auto tally = [&](bool on, FlagTotals& t) {
                if (!on) return;
                ++t.classes;
                t.labeled += r.multiplicity;
            };
            tally(r.flags.medial, out.summary.medial);
            tally(r.flags.idempotent, out.summary.idempotent);
            tally(r.flags.unipotent, out.summary.unipotent);
            tally(r.flags.associative, out.summary.associative);
        }
        return out;
    }

    void write_manifest() const {
        nlohmann::json m;
        m["format"] = "tsq-manifest-v1";
        m["shard_count"] = cfg_.shard_count;
        m["memory_budget"] = cfg_.memory_budget;
        std::vector<int> completed;
        for (int i = 0; i < cfg_.shard_count; ++i)
            if (!cfg_.shard_filter || cfg_.shard_filter->count(i))
                completed.push_back(i);
        m["completed_shards"] = completed;
        nlohmann::json runs = nlohmann::json::object();
        for (int i = 0; i < cfg_.shard_count; ++i) {
            if (shards_[i].runs.empty()) continue;
            std::vector<std::string> names;
            for (const auto& p : shards_[i].runs)
                names.push_back(p.filename().string());
            runs[std::to_string(i)] = names;
        }
        m["runs"] = runs;
        std::filesystem::path path = cfg_.spill_directory / "manifest.json";
        std::ofstream outf(path);
        if (!outf) throw io_error("cannot write manifest " + path.string());
        outf << m.dump(2) << '\n';
    }

    uint64_t resident_bytes() const { return resident_.load(); }
    uint64_t dropped_records() const { return dropped_.load(); }
    const StoreConfig& config() const { return cfg_; }

private:
    struct Entry {
        uint64_t aut_order;
        PropertyFlags flags;
        uint128 multiplicity;
    };
    struct Shard {
        std::unordered_map<std::string, Entry> map;
        std::vector<std::filesystem::path> runs;
        std::atomic<uint64_t> bytes{0};
        int next_run = 0;
        std::mutex mtx;

        Shard() = default;
        Shard(Shard&& o) noexcept
            : map(std::move(o.map)),
              runs(std::move(o.runs)),
              bytes(o.bytes.load()),
              next_run(o.next_run) {}
    };

    static uint64_t entry_cost(size_t key_size) {
        return static_cast<uint64_t>(key_size) + 64;  // rough per-entry cost
    }

    static std::string to_hex_prefix(const std::string& key) {
        static const char* digits = "0123456789abcdef";
        std::string out;
        for (size_t i = 0; i < key.size() && i < 8; ++i) {
            out.push_back(digits[static_cast<unsigned char>(key[i]) >> 4]);
            out.push_back(digits[static_cast<unsigned char>(key[i]) & 15]);
        }
        return out;
    }

    std::filesystem::path spill_locked(int shard_index, Shard& sh) {
        if (sh.map.empty()) return {};
        std::vector<ClassRecord> records;
        records.reserve(sh.map.size());
        for (const auto& [key, e] : sh.map)
            records.push_back(ClassRecord{key, e.aut_order, e.flags, e.multiplicity});
        std::sort(records.begin(), records.end(),
                  [](const ClassRecord& a, const ClassRecord& b) {
                      return a.key < b.key;
                  });
        std::error_code ec;
        std::filesystem::create_directories(cfg_.spill_directory, ec);
        if (ec)
            throw io_error("cannot create spill directory " +
                           cfg_.spill_directory.string());
        std::filesystem::path path =
            cfg_.spill_directory / ("shard" + std::to_string(shard_index) +
                                    "-run" + std::to_string(sh.next_run) + ".tsq");
        {
            std::ofstream outf(path, std::ios::binary | std::ios::trunc);
            if (!outf) throw io_error("cannot open run file " + path.string());
            const std::string bytes = serialize_class_records(records);
            outf.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            outf.flush();
            if (!outf) {
                std::error_code rm;
                std::filesystem::remove(path, rm);
                throw io_error("write failed for run file " + path.string());
            }
        }
        sh.runs.push_back(path);
        ++sh.next_run;
        resident_ -= sh.bytes.load();
        sh.bytes = 0;
        sh.map.clear();
        return path;
    }

    void enforce_budget() {
        while (resident_.load() > cfg_.memory_budget) {
            // largest resident shard first; ties to the lowest index
            int best = -1;
            uint64_t best_bytes = 0;
            for (int i = 0; i < cfg_.shard_count; ++i) {
                const uint64_t b = shards_[i].bytes.load();
                if (b > best_bytes) {
                    best = i;
                    best_bytes = b;
                }
            }
            if (best < 0) return;
            spill(best);
        }
    }

    StoreConfig cfg_;
    std::vector<Shard> shards_;
    int shard_shift_ = 56;
    std::atomic<uint64_t> resident_{0};
    std::atomic<uint64_t> dropped_{0};
    bool finalized_ = false;
};

}  // namespace tsq
