// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <utility>

#include "remat/cost.hpp"
#include "remat/errors.hpp"
#include "remat/grid.hpp"
#include "remat/types.hpp"

namespace remat {

/// Divide-and-conquer cost of the first checkpoint at offset y.
///
/// `C` is any callable (t, m) -> Cost that yields infinity for m <= 0.
namespace recurrence {

/// Hidden state pushed at y: forward y, solve the right part with one unit
/// less, then the left part with the full budget.
template <class Lookup>
Cost hidden_push(const Lookup& C, int t, int m, int y) {
    return Cost(y) + C(y, m) + C(t - y, m - 1);
}

/// Internal state pushed at y and charged `charge` units: the backward step
/// at y is free, so only y - 1 positions remain on the left.
template <class Lookup>
Cost internal_push(const Lookup& C, int t, int m, int y, int charge) {
    return Cost(y) + C(y - 1, m) + C(t - y, m - charge);
}

}  // namespace recurrence

/// Optimal checkpoint policy for every (t, m) with t <= t_max, m <= m_max.
///
/// `split(t, m)` is the offset of the first push relative to the
/// subsequence entry; 0 marks cells that push nothing (t <= 1, or m == 1
/// where the quadratic strategy is the only option). Mixed-strategy tables
/// additionally carry both candidate offsets and the chosen kind.
///
/// Immutable after construction; the constructor validates every invariant.
class PolicyTable {
public:
    struct Tables {
        Grid<Cost> cost;
        Grid<int> split;
        Grid<int> split_hidden;
        Grid<int> split_internal;
        Grid<PushKind> kind;
        friend bool operator==(const Tables&, const Tables&) = default;
    };

    PolicyTable(Algorithm algorithm, int t_max, int m_max, std::optional<CostModel> model,
                Tables tables)
        : algorithm_(algorithm), t_max_(t_max), m_max_(m_max), model_(model),
          tables_(std::move(tables)) {
        validate();
    }

    Algorithm algorithm() const noexcept { return algorithm_; }
    int t_max() const noexcept { return t_max_; }
    int m_max() const noexcept { return m_max_; }
    const std::optional<CostModel>& cost_model() const noexcept { return model_; }
    const Tables& tables() const noexcept { return tables_; }

    bool covers(int t, int m) const noexcept {
        return t >= 0 && t <= t_max_ && m >= 1 && m <= m_max_;
    }

    /// Infinity for m <= 0; throws std::out_of_range beyond the table.
    Cost cost(int t, int m) const {
        if (m <= 0) return Cost::infinity();
        return tables_.cost.at(t, m);
    }
    int split(int t, int m) const { return tables_.split.at(t, m); }

    PushKind kind(int t, int m) const {
        switch (algorithm_) {
            case Algorithm::hsm: return PushKind::hidden;
            case Algorithm::ism: return PushKind::internal;
            default: return tables_.kind.at(t, m);
        }
    }
    int split_hidden(int t, int m) const { return mixed_grid(tables_.split_hidden).at(t, m); }
    int split_internal(int t, int m) const { return mixed_grid(tables_.split_internal).at(t, m); }

    /// Units charged for an internal push at offset y (slots for ISM).
    int internal_charge(int y) const {
        switch (algorithm_) {
            case Algorithm::ism: return 1;
            case Algorithm::msm: return model_->alpha;
            case Algorithm::msm_dedup: return y == 1 ? model_->beta : model_->alpha;
            case Algorithm::hsm: break;
        }
        throw std::logic_error("internal_charge: HSM has no internal pushes");
    }
    bool internal_push_deduplicated(int y) const {
        return algorithm_ == Algorithm::msm_dedup && y == 1 && model_->beta < model_->alpha;
    }

    friend bool operator==(const PolicyTable& a, const PolicyTable& b) {
        return a.algorithm_ == b.algorithm_ && a.t_max_ == b.t_max_ && a.m_max_ == b.m_max_ &&
               a.model_.has_value() == b.model_.has_value() &&
               (!a.model_ || a.model_->same_memory(*b.model_)) && a.tables_ == b.tables_;
    }

private:
    template <class G>
    const G& mixed_grid(const G& g) const {
        if (!is_mixed(algorithm_)) throw std::logic_error("table only exists for MSM policies");
        return g;
    }

    [[noreturn]] static void fail(const std::string& what, int t, int m) {
        std::ostringstream os;
        os << what << " at (t=" << t << ", m=" << m << ")";
        throw ValidationError(os.str());
    }

    static std::int64_t quadratic(int t) {
        return static_cast<std::int64_t>(t) * (t + 1) / 2;
    }

    void validate_shape() const {
        if (t_max_ < 1 || m_max_ < 1) throw ValidationError("t_max and m_max must be >= 1");
        auto check = [&](const auto& g, const char* name) {
            if (g.t_max() != t_max_ || g.m_max() != m_max_) {
                throw ValidationError(std::string("table '") + name + "' has the wrong shape");
            }
        };
        check(tables_.cost, "cost");
        check(tables_.split, "split");
        if (is_mixed(algorithm_)) {
            if (!model_) throw ValidationError("MSM policy requires a cost model");
            try {
                model_->validate();
            } catch (const ConfigError& e) {
                throw ValidationError(e.what());
            }
            check(tables_.split_hidden, "split_hidden");
            check(tables_.split_internal, "split_internal");
            check(tables_.kind, "kind");
        } else if (model_ || !tables_.split_hidden.empty() || !tables_.split_internal.empty() ||
                   !tables_.kind.empty()) {
            throw ValidationError("only MSM policies carry a cost model and mixed tables");
        }
    }

    void validate_costs() const {
        const auto& C = tables_.cost;
        for (int t = 0; t <= t_max_; ++t) {
            if (!C(t, 0).is_infinite()) fail("cost must be infinite for m = 0", t, 0);
        }
        for (int m = 1; m <= m_max_; ++m) {
            if (C(0, m) != Cost(0)) fail("cost of an empty sequence must be 0", 0, m);
            for (int t = 1; t <= t_max_; ++t) {
                if (C(t, m).is_infinite()) fail("cost must be finite for m >= 1", t, m);
            }
        }
        for (int t = 1; t <= t_max_; ++t) {
            for (int m = 1; m <= m_max_; ++m) {
                if (m >= 2 && C(t, m) > C(t, m - 1)) fail("cost increases with memory", t, m);
                if (C(t, m) < C(t - 1, m)) fail("cost decreases with sequence length", t, m);
            }
        }
        for (int t = 1; t <= t_max_; ++t) {
            if (C(t, 1).value() != quadratic(t)) fail("cost(t, 1) must be t(t+1)/2", t, 1);
            for (int m = 1; m <= m_max_; ++m) {
                const std::int64_t c = C(t, m).value();
                switch (algorithm_) {
                    case Algorithm::hsm:
                        if (m >= t && c != 2 * t - 1) fail("cost must be 2t-1 for m >= t", t, m);
                        break;
                    case Algorithm::ism:
                        if (m >= t && c != t) fail("cost must be t for m >= t", t, m);
                        break;
                    case Algorithm::msm:
                    case Algorithm::msm_dedup:
                        if (t == 1 && c != 1) fail("cost(1, m) must be 1", t, m);
                        if (static_cast<std::int64_t>(m) >= static_cast<std::int64_t>(model_->alpha) * t &&
                            c != t) {
                            fail("cost must be t for m >= alpha*t", t, m);
                        }
                        break;
                }
            }
        }
    }

    void validate_splits() const {
        auto C = [this](int t, int m) { return cost(t, m); };
        const bool mixed = is_mixed(algorithm_);
        for (int t = 0; t <= t_max_; ++t) {
            for (int m = 0; m <= m_max_; ++m) {
                const int y = tables_.split(t, m);
                if (t <= 1 || m <= 1) {
                    bool zero = y == 0;
                    if (mixed) zero = zero && tables_.split_hidden(t, m) == 0 && tables_.split_internal(t, m) == 0;
                    if (!zero) fail("split must be 0 where no push happens", t, m);
                    continue;
                }
                if (mixed) {
                    const int y1 = tables_.split_hidden(t, m);
                    const int y2 = tables_.split_internal(t, m);
                    if (y1 < 1 || y1 >= t) fail("split_hidden out of [1, t)", t, m);
                    if (y2 < 1 || y2 > t) fail("split_internal out of [1, t]", t, m);
                    const PushKind k = tables_.kind(t, m);
                    if (k != PushKind::hidden && k != PushKind::internal) fail("invalid kind", t, m);
                    if (y != (k == PushKind::hidden ? y1 : y2)) fail("split disagrees with kind", t, m);
                }
                Cost q;
                switch (kind(t, m)) {
                    case PushKind::hidden:
                        if (y < 1 || y >= t) fail("split out of [1, t)", t, m);
                        q = recurrence::hidden_push(C, t, m, y);
                        break;
                    case PushKind::internal:
                        if (y < 1 || y > t) fail("split out of [1, t]", t, m);
                        q = recurrence::internal_push(C, t, m, y, internal_charge(y));
                        break;
                }
                if (q != C(t, m)) fail("cost is not attained by its split", t, m);
            }
        }
    }

    void validate() const {
        validate_shape();
        validate_costs();
        validate_splits();
    }

    Algorithm algorithm_;
    int t_max_;
    int m_max_;
    std::optional<CostModel> model_;
    Tables tables_;
};

}  // namespace remat
