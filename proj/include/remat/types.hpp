// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "remat/errors.hpp"

namespace remat {

enum class Algorithm : std::uint8_t { hsm, ism, msm, msm_dedup };

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::hsm: return "HSM";
        case Algorithm::ism: return "ISM";
        case Algorithm::msm: return "MSM";
        case Algorithm::msm_dedup: return "MSM_DEDUP";
    }
    return "?";
}

/// Accepts the document spelling ("MSM_DEDUP") and the CLI spelling ("msm").
inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "HSM" || s == "hsm") return Algorithm::hsm;
    if (s == "ISM" || s == "ism") return Algorithm::ism;
    if (s == "MSM" || s == "msm") return Algorithm::msm;
    if (s == "MSM_DEDUP" || s == "msm_dedup") return Algorithm::msm_dedup;
    throw ParseError("algorithm", "unknown algorithm '" + std::string(s) + "'");
}

inline bool is_mixed(Algorithm a) { return a == Algorithm::msm || a == Algorithm::msm_dedup; }

enum class PushKind : std::uint8_t { hidden = 0, internal = 1 };

/// Memory sizes in hidden-state units. A hidden state is always one unit.
struct CostModel {
    int alpha = 2;  ///< full internal state
    int beta = 1;   ///< internal state whose input hidden state is stored below it
    double backward_ratio = 2.0;

    void validate() const {
        if (alpha < 2) throw ConfigError("cost model: alpha must be >= 2");
        if (beta < 1 || beta > alpha) throw ConfigError("cost model: need 1 <= beta <= alpha");
        if (!(backward_ratio > 0.0)) throw ConfigError("cost model: backward_ratio must be positive");
    }

    /// Memory equality only; backward_ratio does not affect schedules.
    bool same_memory(const CostModel& o) const { return alpha == o.alpha && beta == o.beta; }
    friend bool operator==(const CostModel&, const CostModel&) = default;
};

/// Checkpoint capacity in hidden-state units (internal-state slots for ISM).
class MemoryBudget {
public:
    explicit MemoryBudget(int units) : units_(units) {
        if (units < 1) throw ConfigError("memory budget must be at least one unit");
    }
    int units() const noexcept { return units_; }
    friend bool operator==(const MemoryBudget&, const MemoryBudget&) = default;

private:
    int units_;
};

}  // namespace remat
