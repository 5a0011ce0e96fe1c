// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>

namespace remat {

/// Exact count of forward operations, or infinity.
///
/// Infinity is a distinct state rather than a large integer, so an
/// infeasible schedule can never be confused with an expensive one.
/// Addition saturates at infinity.
class Cost {
public:
    constexpr Cost() = default;
    constexpr explicit Cost(std::int64_t ops) : ops_(ops) {
        if (ops < 0) {
            throw std::invalid_argument("Cost: negative operation count");
        }
    }

    static constexpr Cost infinity() {
        Cost c;
        c.ops_ = kInfinite;
        return c;
    }

    constexpr bool is_infinite() const { return ops_ == kInfinite; }
    constexpr bool is_finite() const { return ops_ != kInfinite; }

    /// Operation count; throws on infinity.
    constexpr std::int64_t value() const {
        if (is_infinite()) {
            throw std::logic_error("Cost: value() of infinite cost");
        }
        return ops_;
    }

    /// Raw encoding: the count, or -1 for infinity.
    constexpr std::int64_t encoded() const { return ops_; }
    static constexpr Cost decode(std::int64_t raw) {
        return raw == kInfinite ? infinity() : Cost(raw);
    }

    friend constexpr Cost operator+(Cost a, Cost b) {
        if (a.is_infinite() || b.is_infinite()) return infinity();
        Cost c;
        c.ops_ = a.ops_ + b.ops_;
        return c;
    }
    friend constexpr Cost operator+(Cost a, std::int64_t b) { return a + Cost(b); }

    friend constexpr bool operator==(Cost a, Cost b) { return a.ops_ == b.ops_; }
    friend constexpr std::strong_ordering operator<=>(Cost a, Cost b) {
        if (a.is_infinite() || b.is_infinite()) {
            return static_cast<int>(a.is_infinite()) <=> static_cast<int>(b.is_infinite());
        }
        return a.ops_ <=> b.ops_;
    }

    friend std::ostream& operator<<(std::ostream& os, Cost c) {
        if (c.is_infinite()) return os << "inf";
        return os << c.ops_;
    }

private:
    static constexpr std::int64_t kInfinite = -1;
    std::int64_t ops_ = 0;
};

}  // namespace remat
