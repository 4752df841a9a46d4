#pragma once

// Minimal unsigned bignum for exact class/labeled totals. Only the
// operations the counting pipeline needs: addition, small multiplication,
// division by a machine word, comparison, decimal I/O.

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tsq/error.hpp"

namespace tsq {

using uint128 = unsigned __int128;

inline std::string to_decimal(uint128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v != 0) {
        s.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

class BigUint {
public:
    BigUint() = default;
    BigUint(uint128 v) {  // NOLINT: implicit on purpose
        if (v != 0) limbs_.push_back(static_cast<uint64_t>(v));
        if (v >> 64) limbs_.push_back(static_cast<uint64_t>(v >> 64));
    }

    static BigUint from_decimal(std::string_view s) {
        if (s.empty()) throw domain_error("empty decimal string");
        BigUint r;
        for (char c : s) {
            if (c == ',' || c == '_') continue;  // tolerate separators
            if (c < '0' || c > '9') throw domain_error("bad decimal digit");
            r = r * 10;
            r += static_cast<uint64_t>(c - '0');
        }
        return r;
    }

    bool is_zero() const { return limbs_.empty(); }

    BigUint& operator+=(const BigUint& o) {
        if (o.limbs_.size() > limbs_.size()) limbs_.resize(o.limbs_.size(), 0);
        unsigned carry = 0;
        for (size_t i = 0; i < limbs_.size(); ++i) {
            uint128 t = static_cast<uint128>(limbs_[i]) + carry +
                        (i < o.limbs_.size() ? o.limbs_[i] : 0);
            limbs_[i] = static_cast<uint64_t>(t);
            carry = static_cast<unsigned>(t >> 64);
        }
        if (carry) limbs_.push_back(carry);
        return *this;
    }
    BigUint& operator+=(uint128 v) { return *this += BigUint(v); }

    friend BigUint operator+(BigUint a, const BigUint& b) { return a += b; }

    BigUint operator*(uint64_t m) const {
        BigUint r;
        if (m == 0 || is_zero()) return r;
        r.limbs_.resize(limbs_.size(), 0);
        uint64_t carry = 0;
        for (size_t i = 0; i < limbs_.size(); ++i) {
            uint128 t = static_cast<uint128>(limbs_[i]) * m + carry;
            r.limbs_[i] = static_cast<uint64_t>(t);
            carry = static_cast<uint64_t>(t >> 64);
        }
        if (carry) r.limbs_.push_back(carry);
        return r;
    }

    // Quotient in place, returns remainder. Divisor must be nonzero.
    uint64_t divmod(uint64_t d) {
        if (d == 0) throw domain_error("division by zero");
        uint128 rem = 0;
        for (size_t i = limbs_.size(); i-- > 0;) {
            uint128 cur = (rem << 64) | limbs_[i];
            limbs_[i] = static_cast<uint64_t>(cur / d);
            rem = cur % d;
        }
        trim();
        return static_cast<uint64_t>(rem);
    }

    friend bool operator==(const BigUint& a, const BigUint& b) {
        return a.limbs_ == b.limbs_;
    }
    friend bool operator!=(const BigUint& a, const BigUint& b) {
        return !(a == b);
    }
    friend bool operator<(const BigUint& a, const BigUint& b) {
        if (a.limbs_.size() != b.limbs_.size())
            return a.limbs_.size() < b.limbs_.size();
        for (size_t i = a.limbs_.size(); i-- > 0;)
            if (a.limbs_[i] != b.limbs_[i]) return a.limbs_[i] < b.limbs_[i];
        return false;
    }
    friend bool operator>(const BigUint& a, const BigUint& b) { return b < a; }
    friend bool operator<=(const BigUint& a, const BigUint& b) { return !(b < a); }
    friend bool operator>=(const BigUint& a, const BigUint& b) { return !(a < b); }

    std::string to_string() const {
        if (is_zero()) return "0";
        BigUint t = *this;
        std::string out;
        while (!t.is_zero()) {
            uint64_t r = t.divmod(10000000000000000000ull);  // 10^19
            std::string chunk = std::to_string(r);
            if (t.is_zero()) {
                out.insert(0, chunk);
            } else {
                out.insert(0, std::string(19 - chunk.size(), '0') + chunk);
            }
        }
        return out;
    }

private:
    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }
    std::vector<uint64_t> limbs_;  // little-endian, no trailing zeros
};

inline uint64_t factorial_u64(int n) {
    if (n < 0 || n > 20) throw limit_error("factorial_u64: n out of range");
    uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<uint64_t>(i);
    return f;
}

}  // namespace tsq
