#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace revca::detail {

// Arbitrary-size natural number. Little-endian base-2^32 limbs, no trailing
// zero limbs (zero is the empty limb vector). Only the handful of operations
// needed for Wolfram-number conversion are provided.
class Bignat {
public:
    Bignat() = default;

    explicit Bignat(std::uint64_t v) {
        if (v != 0) {
            limbs_.push_back(static_cast<std::uint32_t>(v));
            if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
        }
    }

    static Bignat from_decimal(std::string_view s) {
        if (s.empty()) throw std::invalid_argument("empty decimal number");
        Bignat x;
        for (char c : s) {
            if (c < '0' || c > '9') {
                throw std::invalid_argument(std::string("invalid decimal digit '") + c + "'");
            }
            x.mul_add_small(10, static_cast<std::uint32_t>(c - '0'));
        }
        return x;
    }

    bool is_zero() const { return limbs_.empty(); }

    // *this = *this * mul + add
    void mul_add_small(std::uint32_t mul, std::uint32_t add) {
        std::uint64_t carry = add;
        for (auto& limb : limbs_) {
            std::uint64_t v = static_cast<std::uint64_t>(limb) * mul + carry;
            limb = static_cast<std::uint32_t>(v);
            carry = v >> 32;
        }
        while (carry) {
            limbs_.push_back(static_cast<std::uint32_t>(carry));
            carry >>= 32;
        }
    }

    // Divides in place, returns the remainder.
    std::uint32_t divmod_small(std::uint32_t d) {
        if (d == 0) throw std::invalid_argument("division by zero");
        std::uint64_t rem = 0;
        for (auto it = limbs_.rbegin(); it != limbs_.rend(); ++it) {
            std::uint64_t v = (rem << 32) | *it;
            *it = static_cast<std::uint32_t>(v / d);
            rem = v % d;
        }
        trim();
        return static_cast<std::uint32_t>(rem);
    }

    std::string to_decimal() const {
        if (is_zero()) return "0";
        Bignat tmp = *this;
        std::string out;
        while (!tmp.is_zero()) {
            std::uint32_t chunk = tmp.divmod_small(1000000000u);
            for (int i = 0; i < 9; ++i) {
                out.push_back(static_cast<char>('0' + chunk % 10));
                chunk /= 10;
            }
        }
        while (out.size() > 1 && out.back() == '0') out.pop_back();
        std::reverse(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const Bignat&, const Bignat&) = default;

private:
    std::vector<std::uint32_t> limbs_;

    void trim() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
    }
};

} // namespace revca::detail
