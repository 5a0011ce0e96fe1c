// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>

#include "remat/cost.hpp"
#include "remat/errors.hpp"
#include "remat/grid.hpp"
#include "remat/policy_table.hpp"
#include "remat/types.hpp"

namespace remat {

struct SolveRequest {
    Algorithm algorithm = Algorithm::hsm;
    int t_max = 1;
    int m_max = 1;
    CostModel cost_model{};  ///< only read for MSM
};

namespace detail {

inline void check_dims(int t_max, int m_max) {
    if (t_max < 1) throw ConfigError("t_max must be >= 1");
    if (m_max < 1) throw ConfigError("m_max must be >= 1");
}

/// Allocates tables with the shared boundary: m = 0 infinite, m = 1 quadratic.
inline PolicyTable::Tables make_tables(int t_max, int m_max, bool mixed) {
    PolicyTable::Tables tb;
    tb.cost = Grid<Cost>(t_max, m_max, Cost(0));
    tb.split = Grid<int>(t_max, m_max, 0);
    if (mixed) {
        tb.split_hidden = Grid<int>(t_max, m_max, 0);
        tb.split_internal = Grid<int>(t_max, m_max, 0);
        tb.kind = Grid<PushKind>(t_max, m_max, PushKind::hidden);
    }
    for (int t = 0; t <= t_max; ++t) {
        tb.cost(t, 0) = Cost::infinity();
        tb.cost(t, 1) = Cost(static_cast<std::int64_t>(t) * (t + 1) / 2);
    }
    return tb;
}

}  // namespace detail

/// Hidden-state-only checkpointing.
///
/// Bottom-up over m, then t. Cells with m >= t take the closed form 2t - 1
/// with the first push at offset 1. Ties resolve to the smallest offset.
inline PolicyTable solve_hsm(int t_max, int m_max) {
    detail::check_dims(t_max, m_max);
    auto tb = detail::make_tables(t_max, m_max, false);
    auto& C = tb.cost;
    for (int m = 2; m <= m_max; ++m) {
        C(1, m) = Cost(1);
        for (int t = 2; t <= t_max; ++t) {
            if (m >= t) {
                C(t, m) = Cost(2 * static_cast<std::int64_t>(t) - 1);
                tb.split(t, m) = 1;
                continue;
            }
            Cost best = Cost::infinity();
            int arg = 1;
            for (int y = 1; y < t; ++y) {
                // Every sub-cost is at least 2n - 1, so Q(y) >= y + 2t - 2.
                if (Cost(static_cast<std::int64_t>(y) + 2 * t - 2) >= best) break;
                const Cost q = Cost(y) + C(y, m) + C(t - y, m - 1);
                if (q < best) {
                    best = q;
                    arg = y;
                }
            }
            C(t, m) = best;
            tb.split(t, m) = arg;
        }
    }
    return PolicyTable(Algorithm::hsm, t_max, m_max, std::nullopt, std::move(tb));
}

/// Internal-state-only checkpointing; m counts internal-state slots.
inline PolicyTable solve_ism(int t_max, int m_max) {
    detail::check_dims(t_max, m_max);
    auto tb = detail::make_tables(t_max, m_max, false);
    auto& C = tb.cost;
    for (int m = 2; m <= m_max; ++m) {
        C(1, m) = Cost(1);
        for (int t = 2; t <= t_max; ++t) {
            if (m >= t) {
                C(t, m) = Cost(t);
                tb.split(t, m) = 1;
                continue;
            }
            Cost best = Cost::infinity();
            int arg = 1;
            for (int y = 1; y <= t; ++y) {
                if (Cost(static_cast<std::int64_t>(t) + y - 1) >= best) break;
                const Cost q = Cost(y) + C(y - 1, m) + C(t - y, m - 1);
                if (q < best) {
                    best = q;
                    arg = y;
                }
            }
            C(t, m) = best;
            tb.split(t, m) = arg;
        }
    }
    return PolicyTable(Algorithm::ism, t_max, m_max, std::nullopt, std::move(tb));
}

/// Mixed hidden/internal checkpointing with budget in hidden-state units.
///
/// With `dedup`, an internal push at offset 1 is charged beta instead of
/// alpha: its input hidden state is the subsequence entry, already stored.
/// When both kinds attain the minimum the internal push is recorded.
inline PolicyTable solve_msm(int t_max, MemoryBudget budget, const CostModel& model, bool dedup) {
    const int m_max = budget.units();
    detail::check_dims(t_max, m_max);
    model.validate();
    auto tb = detail::make_tables(t_max, m_max, true);
    auto& C = tb.cost;
    auto lookup = [&C](int t, int m) { return m <= 0 ? Cost::infinity() : C(t, m); };

    for (int m = 2; m <= m_max; ++m) {
        C(1, m) = Cost(1);
        for (int t = 2; t <= t_max; ++t) {
            Cost best_hidden = Cost::infinity();
            int arg_hidden = 1;
            for (int y = 1; y < t; ++y) {
                if (Cost(static_cast<std::int64_t>(t) + y) >= best_hidden) break;
                const Cost q = Cost(y) + C(y, m) + C(t - y, m - 1);
                if (q < best_hidden) {
                    best_hidden = q;
                    arg_hidden = y;
                }
            }
            Cost best_internal = Cost::infinity();
            int arg_internal = 1;
            for (int y = 1; y <= t; ++y) {
                if (Cost(static_cast<std::int64_t>(t) + y - 1) >= best_internal) break;
                const int charge = (dedup && y == 1) ? model.beta : model.alpha;
                const Cost q = Cost(y) + C(y - 1, m) + lookup(t - y, m - charge);
                if (q < best_internal) {
                    best_internal = q;
                    arg_internal = y;
                }
            }
            tb.split_hidden(t, m) = arg_hidden;
            tb.split_internal(t, m) = arg_internal;
            if (best_internal <= best_hidden) {
                C(t, m) = best_internal;
                tb.kind(t, m) = PushKind::internal;
                tb.split(t, m) = arg_internal;
            } else {
                C(t, m) = best_hidden;
                tb.kind(t, m) = PushKind::hidden;
                tb.split(t, m) = arg_hidden;
            }
        }
    }
    return PolicyTable(dedup ? Algorithm::msm_dedup : Algorithm::msm, t_max, m_max, model,
                       std::move(tb));
}

inline PolicyTable solve(const SolveRequest& req) {
    switch (req.algorithm) {
        case Algorithm::hsm: return solve_hsm(req.t_max, req.m_max);
        case Algorithm::ism: return solve_ism(req.t_max, req.m_max);
        case Algorithm::msm:
            return solve_msm(req.t_max, MemoryBudget(req.m_max), req.cost_model, false);
        case Algorithm::msm_dedup:
            return solve_msm(req.t_max, MemoryBudget(req.m_max), req.cost_model, true);
    }
    throw ConfigError("unknown algorithm");
}

}  // namespace remat
