// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "remat/policy_table.hpp"
#include "remat/types.hpp"

namespace remat {

struct BoundViolation {
    std::string bound;
    int t = 0;
    int m = 0;
    std::int64_t cost = 0;
    double limit = 0.0;
};

namespace detail {

/// t * a! <= m^a, exactly.
inline bool within_power_ratio(int t, int m, int a) {
    __int128 lhs = t;
    __int128 rhs = 1;
    for (int i = 2; i <= a; ++i) lhs *= i;
    for (int i = 0; i < a; ++i) rhs *= m;
    return lhs <= rhs;
}

inline void hidden_bounds(int t, int m, std::int64_t c,
                          std::vector<BoundViolation>& out) {
    const long double g = std::pow(static_cast<long double>(t), 1.0L + 1.0L / m);
    if (static_cast<long double>(c) > m * g) out.push_back({"m*t^(1+1/m)", t, m, c, static_cast<double>(m * g)});
    if (!(static_cast<long double>(c) < 4 * g)) out.push_back({"4*t^(1+1/m)", t, m, c, static_cast<double>(4 * g)});
    for (int a = 1; a <= 6; ++a) {
        if (within_power_ratio(t, m, a) && c > static_cast<std::int64_t>(a + 1) * t) {
            out.push_back({"(a+1)t, a=" + std::to_string(a), t, m, c, static_cast<double>((a + 1) * t)});
        }
    }
}

}  // namespace detail

/// Checks the analytic cost bounds over every covered cell with t >= 1.
///
/// Hidden-state and mixed tables get the hidden-state bounds; internal-state
/// tables get cost <= a*t whenever t <= m^a / a!. With `hsm_reference`, the
/// table must also lie pointwise at or below it on the shared range.
inline std::vector<BoundViolation> check_bounds(const PolicyTable& policy,
                                                const PolicyTable* hsm_reference = nullptr) {
    std::vector<BoundViolation> out;
    for (int m = 1; m <= policy.m_max(); ++m) {
        for (int t = 1; t <= policy.t_max(); ++t) {
            const std::int64_t c = policy.cost(t, m).value();
            if (policy.algorithm() == Algorithm::ism) {
                for (int a = 1; a <= 6; ++a) {
                    if (detail::within_power_ratio(t, m, a) && c > static_cast<std::int64_t>(a) * t) {
                        out.push_back({"a*t, a=" + std::to_string(a), t, m, c, static_cast<double>(a * t)});
                    }
                }
            } else {
                detail::hidden_bounds(t, m, c, out);
            }
            if (hsm_reference && hsm_reference->covers(t, m)) {
                const std::int64_t h = hsm_reference->cost(t, m).value();
                if (c > h) out.push_back({"<= hidden-state cost", t, m, c, static_cast<double>(h)});
            }
        }
    }
    return out;
}

}  // namespace remat
