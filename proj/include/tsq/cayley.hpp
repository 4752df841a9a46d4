#pragma once

// Cayley-table view of a quasigroup: an n x n array over symbols 0..n-1,
// plus the single-table property predicates.

#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsq/error.hpp"

namespace tsq {

class CayleyTable {
public:
    CayleyTable(int order, std::vector<uint8_t> cells)
        : order_(order), cells_(std::move(cells)) {
        if (order_ < 1) throw domain_error("table order must be >= 1");
        if (cells_.size() != static_cast<size_t>(order_) * order_)
            throw domain_error("table has wrong cell count");
        for (uint8_t c : cells_)
            if (c >= order_) throw domain_error("table symbol out of range");
    }

    static CayleyTable from_rows(const std::vector<std::vector<int>>& rows) {
        int n = static_cast<int>(rows.size());
        std::vector<uint8_t> cells;
        cells.reserve(static_cast<size_t>(n) * n);
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != n)
                throw domain_error("table is not square");
            for (int v : row) {
                if (v < 0 || v >= n)
                    throw domain_error("table symbol out of range");
                cells.push_back(static_cast<uint8_t>(v));
            }
        }
        return CayleyTable(n, std::move(cells));
    }

    int order() const { return order_; }
    int at(int x, int y) const { return cells_[static_cast<size_t>(x) * order_ + y]; }

    friend bool operator==(const CayleyTable& a, const CayleyTable& b) {
        return a.order_ == b.order_ && a.cells_ == b.cells_;
    }

private:
    int order_;
    std::vector<uint8_t> cells_;
};

inline bool is_latin(const CayleyTable& t) {
    const int n = t.order();
    const uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
    for (int x = 0; x < n; ++x) {
        uint32_t row = 0, col = 0;
        for (int y = 0; y < n; ++y) {
            row |= 1u << t.at(x, y);
            col |= 1u << t.at(y, x);
        }
        if (row != full || col != full) return false;
    }
    return true;
}

// xy = z forces all six permuted products among x, y, z.
inline bool is_totally_symmetric(const CayleyTable& t) {
    const int n = t.order();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            const int z = t.at(x, y);
            if (t.at(x, z) != y || t.at(y, x) != z || t.at(y, z) != x ||
                t.at(z, x) != y || t.at(z, y) != x)
                return false;
        }
    return true;
}

inline bool is_medial(const CayleyTable& t) {
    const int n = t.order();
    for (int w = 0; w < n; ++w)
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y)
                for (int z = 0; z < n; ++z)
                    if (t.at(t.at(w, x), t.at(y, z)) !=
                        t.at(t.at(w, y), t.at(x, z)))
                        return false;
    return true;
}

inline bool is_idempotent(const CayleyTable& t) {
    for (int x = 0; x < t.order(); ++x)
        if (t.at(x, x) != x) return false;
    return true;
}

inline std::optional<int> is_unipotent(const CayleyTable& t) {
    const int k = t.at(0, 0);
    for (int x = 1; x < t.order(); ++x)
        if (t.at(x, x) != k) return std::nullopt;
    return k;
}

inline bool is_associative(const CayleyTable& t) {
    const int n = t.order();
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            for (int z = 0; z < n; ++z)
                if (t.at(t.at(x, y), z) != t.at(x, t.at(y, z))) return false;
    return true;
}

// Group table, commutative, every square equal to the identity.
inline bool is_elementary_abelian_2(const CayleyTable& t) {
    const int n = t.order();
    if (!is_associative(t)) return false;
    int e = -1;
    for (int c = 0; c < n && e < 0; ++c) {
        bool ident = true;
        for (int y = 0; y < n && ident; ++y)
            ident = t.at(c, y) == y && t.at(y, c) == y;
        if (ident) e = c;
    }
    if (e < 0) return false;
    for (int x = 0; x < n; ++x) {
        if (t.at(x, x) != e) return false;
        for (int y = 0; y < n; ++y)
            if (t.at(x, y) != t.at(y, x)) return false;
    }
    return true;
}

// Point addition over a totally symmetric table: a[x][y] = p(xy).
// p becomes a two-sided identity of the result.
inline CayleyTable derived_addition(const CayleyTable& t, int p) {
    const int n = t.order();
    if (p < 0 || p >= n) throw domain_error("base point out of range");
    std::vector<uint8_t> cells(static_cast<size_t>(n) * n);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
            cells[static_cast<size_t>(x) * n + y] =
                static_cast<uint8_t>(t.at(p, t.at(x, y)));
    return CayleyTable(n, std::move(cells));
}

struct PropertyFlags {
    bool medial = false;
    bool idempotent = false;
    bool unipotent = false;
    bool associative = false;

    friend bool operator==(const PropertyFlags&, const PropertyFlags&) = default;
};

// Bit layout used in run files: bit0 medial, bit1 idempotent, bit2 unipotent,
// bit3 associative.
inline uint8_t flags_to_byte(const PropertyFlags& f) {
    return static_cast<uint8_t>((f.medial ? 1 : 0) | (f.idempotent ? 2 : 0) |
                                (f.unipotent ? 4 : 0) | (f.associative ? 8 : 0));
}
inline PropertyFlags flags_from_byte(uint8_t b) {
    if (b & ~0x0fu) throw corruption_error("bad property flag byte");
    return PropertyFlags{(b & 1) != 0, (b & 2) != 0, (b & 4) != 0, (b & 8) != 0};
}

inline PropertyFlags compute_flags(const CayleyTable& t) {
    return PropertyFlags{is_medial(t), is_idempotent(t),
                         is_unipotent(t).has_value(), is_associative(t)};
}

// Text format: line 1 is the order, lines 2..n+1 hold n symbols each.
// Out-of-range symbols and trailing garbage are rejected.
inline CayleyTable parse_cayley(std::string_view text) {
    int line = 1, col = 1;
    size_t pos = 0;
    auto skip_spaces = [&] {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) {
            ++pos;
            ++col;
        }
    };
    auto read_int = [&](const char* what) -> long {
        skip_spaces();
        if (pos >= text.size() || text[pos] < '0' || text[pos] > '9')
            throw parse_error(std::string("expected ") + what, line, col);
        long v = 0;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') {
            v = v * 10 + (text[pos] - '0');
            if (v > 1000000) throw parse_error("number too large", line, col);
            ++pos;
            ++col;
        }
        return v;
    };
    auto end_line = [&](const char* what) {
        skip_spaces();
        if (pos < text.size() && text[pos] == '\r') {
            ++pos;
        }
        if (pos < text.size()) {
            if (text[pos] != '\n')
                throw parse_error(std::string("trailing garbage after ") + what,
                                  line, col);
            ++pos;
            ++line;
            col = 1;
        }
    };

    long n = read_int("order");
    if (n < 1 || n > 32) throw parse_error("order out of range 1..32", line, col);
    end_line("order");

    std::vector<uint8_t> cells;
    cells.reserve(static_cast<size_t>(n) * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            long v = read_int("symbol");
            if (v >= n) throw parse_error("symbol out of range", line, col);
            cells.push_back(static_cast<uint8_t>(v));
        }
        end_line("row");
    }
    skip_spaces();
    while (pos < text.size() &&
           (text[pos] == '\n' || text[pos] == '\r' || text[pos] == ' ')) {
        if (text[pos] == '\n') {
            ++line;
            col = 1;
        }
        ++pos;
    }
    if (pos < text.size()) throw parse_error("trailing garbage after table", line, col);
    return CayleyTable(static_cast<int>(n), std::move(cells));
}

inline std::string to_text(const CayleyTable& t) {
    std::ostringstream os;
    os << t.order() << '\n';
    for (int x = 0; x < t.order(); ++x) {
        for (int y = 0; y < t.order(); ++y) {
            if (y) os << ' ';
            os << t.at(x, y);
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace tsq
