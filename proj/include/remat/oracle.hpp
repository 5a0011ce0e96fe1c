// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "remat/errors.hpp"
#include "remat/types.hpp"

namespace remat {

struct OracleOptions {
    /// Random access to stored states instead of a stack: forward from any
    /// stored state and push positions in any order.
    bool relax_lifo = false;
    int max_t = 12;
    int max_budget = 6;
};

namespace detail {

/// Abstract machine for exhaustive schedule search.
///
/// `frontier` is the next position to backpropagate (done at 0). `core`
/// is the position whose internal state sits in the working core (0: none).
/// Stored entries carry position, kind and whether an internal entry was
/// stored without its input hidden state.
struct SearchState {
    struct Entry {
        int pos;
        PushKind kind;
        bool dedup;
        friend bool operator==(const Entry&, const Entry&) = default;
    };
    int frontier;
    int core;
    std::vector<Entry> entries;

    std::string key() const {
        std::string k;
        k.reserve(2 + entries.size() * 2);
        k.push_back(static_cast<char>(frontier));
        k.push_back(static_cast<char>(core));
        for (const auto& e : entries) {
            k.push_back(static_cast<char>(e.pos));
            k.push_back(static_cast<char>(static_cast<int>(e.kind) | (e.dedup ? 2 : 0)));
        }
        return k;
    }
};

class ScheduleSearch {
public:
    ScheduleSearch(int t, int budget, const CostModel& model, Algorithm cls, bool relax)
        : t_(t), budget_(budget), model_(model), cls_(cls), relax_(relax) {}

    std::int64_t run() {
        SearchState start{t_, 0, {{0, PushKind::hidden, false}}};
        std::deque<std::pair<SearchState, std::int64_t>> open;
        std::unordered_map<std::string, std::int64_t> dist;
        dist.emplace(start.key(), 0);
        open.emplace_back(std::move(start), 0);
        while (!open.empty()) {
            auto [s, d] = std::move(open.front());
            open.pop_front();
            if (dist.at(s.key()) < d) continue;
            if (s.frontier == 0) return d;
            expand(s, [&](SearchState next, int cost) {
                normalize(next);
                const std::int64_t nd = d + cost;
                auto [it, inserted] = dist.try_emplace(next.key(), nd);
                if (!inserted) {
                    if (it->second <= nd) return;
                    it->second = nd;
                }
                if (cost == 0) {
                    open.emplace_front(std::move(next), nd);
                } else {
                    open.emplace_back(std::move(next), nd);
                }
            });
        }
        throw std::logic_error("state_space_oracle: no schedule reaches the goal");
    }

private:
    bool allows_hidden() const { return cls_ != Algorithm::ism; }
    bool allows_internal() const { return cls_ != Algorithm::hsm; }

    int charge(const SearchState::Entry& e) const {
        if (e.kind == PushKind::hidden) return 1;
        if (cls_ == Algorithm::ism) return 1;
        return e.dedup ? model_.beta : model_.alpha;
    }

    int occupancy(const SearchState& s) const {
        int u = 0;
        for (const auto& e : s.entries) u += charge(e);
        return u;
    }

    /// Drops states that can no longer be read: hidden states at or past the
    /// frontier and internal states past it.
    static void normalize(SearchState& s) {
        std::erase_if(s.entries, [&](const SearchState::Entry& e) {
            return e.kind == PushKind::hidden ? e.pos >= s.frontier : e.pos > s.frontier;
        });
        if (s.core > s.frontier) s.core = 0;
    }

    bool has_pos(const SearchState& s, int pos) const {
        if (relax_) {
            return std::any_of(s.entries.begin(), s.entries.end(), [&](const auto& e) { return e.pos == pos; });
        }
        return !s.entries.empty() && s.entries.back().pos == pos;
    }

    bool can_push_at(const SearchState& s, int pos, PushKind kind) const {
        if (relax_) {
            return std::none_of(s.entries.begin(), s.entries.end(),
                                [&](const auto& e) { return e.pos == pos && e.kind == kind; });
        }
        return s.entries.empty() || s.entries.back().pos < pos;
    }

    template <class Emit>
    void expand(const SearchState& s, Emit&& emit) const {
        const int f = s.frontier;
        if (s.core >= 1 && s.core + 1 <= f) {
            SearchState n = s;
            n.core = s.core + 1;
            emit(std::move(n), 1);
        }
        auto forward_from = [&](const SearchState::Entry& e) {
            if (e.pos + 1 <= f && e.pos + 1 != s.core) {
                SearchState n = s;
                n.core = e.pos + 1;
                emit(std::move(n), 1);
            }
        };
        if (relax_) {
            for (const auto& e : s.entries) forward_from(e);
        } else if (!s.entries.empty()) {
            forward_from(s.entries.back());
        }

        const int used = occupancy(s);
        const int c = s.core;
        if (c >= 1 && allows_hidden() && c < f && can_push_at(s, c, PushKind::hidden) && used + 1 <= budget_) {
            SearchState n = s;
            n.entries.push_back({c, PushKind::hidden, false});
            emit(std::move(n), 0);
        }
        if (c >= 1 && allows_internal() && c <= f && can_push_at(s, c, PushKind::internal)) {
            const bool dedup = cls_ == Algorithm::msm_dedup && has_pos(s, c - 1);
            SearchState::Entry e{c, PushKind::internal, dedup};
            if (used + charge(e) <= budget_) {
                SearchState n = s;
                n.entries.push_back(e);
                emit(std::move(n), 0);
            }
        }

        if (c == f) {
            SearchState n = s;
            n.frontier = f - 1;
            n.core = 0;
            emit(std::move(n), 0);
        } else {
            auto it = std::find_if(s.entries.begin(), s.entries.end(), [&](const auto& e) {
                return e.kind == PushKind::internal && e.pos == f;
            });
            if (it != s.entries.end() && (relax_ || std::next(it) == s.entries.end())) {
                SearchState n = s;
                n.entries.erase(n.entries.begin() + (it - s.entries.begin()));
                n.frontier = f - 1;
                emit(std::move(n), 0);
            }
        }
    }

    int t_;
    int budget_;
    CostModel model_;
    Algorithm cls_;
    bool relax_;
};

}  // namespace detail

/// Minimum total forward operations over every schedule of the checkpoint
/// model, by uniform-cost (0-1 BFS) search.
///
/// Actions: forward one step from the working core or from a stored state
/// (cost 1); push the working core's hidden or internal state; backward at
/// the frontier from the working core or a stored internal state. The
/// initial hidden state is stored from the start and takes one unit.
/// States that can no longer be read are dropped automatically. `cls`
/// restricts the push kinds: HSM hidden only, ISM internal only (one slot
/// each), MSM both, MSM_DEDUP charges beta when the input hidden state is
/// already stored directly below.
inline std::int64_t state_space_oracle(int t, MemoryBudget budget, const CostModel& model, Algorithm cls,
                                       const OracleOptions& opts = {}) {
    if (t < 0) throw ConfigError("sequence length must be >= 0");
    if (t > opts.max_t || budget.units() > opts.max_budget) {
        throw LimitError("state_space_oracle: limited to t <= " + std::to_string(opts.max_t) +
                         " and budget <= " + std::to_string(opts.max_budget) + " (exponential search)");
    }
    if (is_mixed(cls)) model.validate();
    if (t == 0) return 0;
    return detail::ScheduleSearch(t, budget.units(), model, cls, opts.relax_lifo).run();
}

}  // namespace remat
