// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "remat/baselines.hpp"
#include "remat/errors.hpp"
#include "remat/solvers.hpp"
#include "remat/types.hpp"

namespace remat {

enum class Figure { hsm_cost, ism_cost, msm_cost, strategy_compare, chen_memory_ratio, chen_cost_fixed_memory };

inline constexpr std::string_view kFigureNames[] = {"hsm_cost",         "ism_cost",          "msm_cost",
                                                    "strategy_compare", "chen_memory_ratio", "chen_cost_fixed_memory"};

inline std::string_view to_string(Figure f) { return kFigureNames[static_cast<int>(f)]; }

inline Figure parse_figure(std::string_view s) {
    for (int i = 0; i < 6; ++i) {
        if (kFigureNames[i] == s) return static_cast<Figure>(i);
    }
    throw ConfigError("unknown figure: " + std::string(s));
}

inline int default_max_t() { return 4096; }

/// Sweep parameters. `t` runs t_min, t_min + t_step, ... up to t_max.
/// `m_list` is in hidden-state units except for ism_cost (internal slots)
/// and strategy_compare (internal slots; hidden-unit budget is m * alpha).
/// The Chen figures sweep `beta_list` with alpha = beta + 1.
struct CurveRequest {
    Figure figure = Figure::hsm_cost;
    int t_min = 10;
    int t_max = 1000;
    int t_step = 10;
    std::vector<int> m_list{10, 50, 100, 500, 1000};
    int alpha = 2;
    int beta = 1;
    bool dedup = false;
    std::vector<int> beta_list{2, 5, 10};
    double backward_ratio = 2.0;
    int max_t = default_max_t();

    void validate() const {
        if (t_min < 1 || t_max < t_min || t_step < 1) throw ConfigError("invalid t range");
        if (m_list.empty() || beta_list.empty()) throw ConfigError("empty m or beta list");
        for (int m : m_list) {
            if (m < 1) throw ConfigError("memory values must be >= 1");
        }
        for (int b : beta_list) {
            if (b < 1) throw ConfigError("beta values must be >= 1");
        }
        CostModel{alpha, beta, backward_ratio}.validate();
        if (t_max > max_t) {
            throw LimitError("t_max " + std::to_string(t_max) + " exceeds the solver cap " + std::to_string(max_t));
        }
        const int m_top = *std::max_element(m_list.begin(), m_list.end());
        const long long scaled = figure == Figure::strategy_compare ? 1LL * m_top * alpha : m_top;
        if (scaled > max_t) {
            throw LimitError("memory " + std::to_string(scaled) + " exceeds the solver cap " + std::to_string(max_t));
        }
    }

    std::vector<int> t_values() const {
        std::vector<int> ts;
        for (int t = t_min; t <= t_max; t += t_step) ts.push_back(t);
        return ts;
    }
};

struct CurveRow {
    std::string figure;
    int t = 0;
    int m = 0;
    std::string algorithm;
    std::int64_t total_forwards = 0;
    double forwards_per_step = 0.0;
    double memory_units = 0.0;
    double simulated_time_per_step = 0.0;
};

inline std::string format_fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// RFC 4180: quote fields containing a comma, quote or line break.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

namespace detail {

inline CurveRow make_row(const CurveRequest& req, int t, int m, std::string algorithm, std::int64_t forwards,
                         double memory) {
    const double fps = static_cast<double>(forwards) / t;
    return CurveRow{std::string(to_string(req.figure)), t, m, std::move(algorithm), forwards, fps, memory,
                    fps + req.backward_ratio};
}

inline std::string beta_tag(std::string_view alg, int beta) {
    return std::string(alg) + "(beta=" + std::to_string(beta) + ")";
}

/// Smallest budget at which the dedup solver matches 2 forwards per step.
/// Chen's footprint always suffices, so the search is bounded by it.
inline int min_memory_at_two_per_step(const PolicyTable& p, int t) {
    for (int m = 1; m <= p.m_max(); ++m) {
        if (p.cost(t, m).value() <= 2LL * t) return m;
    }
    throw std::logic_error("no budget reaches 2 forwards per step");
}

inline int chen_budget(int t, int beta) {
    return static_cast<int>(std::floor(std::sqrt(static_cast<double>(t)) * (1 + beta)));
}

}  // namespace detail

inline std::vector<CurveRow> compute_curves(const CurveRequest& req) {
    req.validate();
    const auto ts = req.t_values();
    const int m_top = *std::max_element(req.m_list.begin(), req.m_list.end());
    const CostModel model{req.alpha, req.beta, req.backward_ratio};
    std::vector<CurveRow> rows;

    switch (req.figure) {
        case Figure::hsm_cost: {
            const auto p = solve_hsm(req.t_max, m_top);
            for (int m : req.m_list) {
                for (int t : ts) rows.push_back(detail::make_row(req, t, m, "HSM", p.cost(t, m).value(), m));
            }
            break;
        }
        case Figure::ism_cost: {
            const auto p = solve_ism(req.t_max, m_top);
            for (int m : req.m_list) {
                for (int t : ts) {
                    rows.push_back(detail::make_row(req, t, m, "ISM", p.cost(t, m).value(),
                                                    static_cast<double>(m) * req.alpha));
                }
            }
            break;
        }
        case Figure::msm_cost: {
            const auto p = solve_msm(req.t_max, MemoryBudget(m_top), model, req.dedup);
            const std::string name(to_string(p.algorithm()));
            for (int m : req.m_list) {
                for (int t : ts) rows.push_back(detail::make_row(req, t, m, name, p.cost(t, m).value(), m));
            }
            break;
        }
        case Figure::strategy_compare: {
            const int hidden_top = m_top * req.alpha;
            const auto h = solve_hsm(req.t_max, hidden_top);
            const auto i = solve_ism(req.t_max, m_top);
            const auto x = solve_msm(req.t_max, MemoryBudget(hidden_top), model, req.dedup);
            const std::string mixed(to_string(x.algorithm()));
            for (int m : req.m_list) {
                const int units = m * req.alpha;
                for (int t : ts) {
                    rows.push_back(detail::make_row(req, t, m, "HSM", h.cost(t, units).value(), units));
                    rows.push_back(detail::make_row(req, t, m, "ISM", i.cost(t, m).value(), units));
                    rows.push_back(detail::make_row(req, t, m, mixed, x.cost(t, units).value(), units));
                }
            }
            break;
        }
        case Figure::chen_memory_ratio:
        case Figure::chen_cost_fixed_memory: {
            for (int beta : req.beta_list) {
                const CostModel cm{beta + 1, beta, req.backward_ratio};
                int top = 1;
                for (int t : ts) {
                    top = std::max(top, static_cast<int>(std::ceil(chen_sqrt(t, cm).memory_units)));
                }
                const auto p = solve_msm(req.t_max, MemoryBudget(top), cm, true);
                for (int t : ts) {
                    const auto chen = chen_sqrt(t, cm);
                    const double scale = std::sqrt(static_cast<double>(t)) * (1 + beta);
                    if (req.figure == Figure::chen_memory_ratio) {
                        const int m = detail::min_memory_at_two_per_step(p, t);
                        rows.push_back(detail::make_row(req, t, m, detail::beta_tag("MSM_DEDUP", beta),
                                                        p.cost(t, m).value(), m / scale));
                        rows.push_back(detail::make_row(req, t, static_cast<int>(std::ceil(chen.memory_units)),
                                                        detail::beta_tag("CHEN_SQRT", beta), chen.total_forwards,
                                                        chen.memory_units / scale));
                    } else {
                        const int m = detail::chen_budget(t, beta);
                        rows.push_back(detail::make_row(req, t, m, detail::beta_tag("MSM_DEDUP", beta),
                                                        p.cost(t, m).value(), m));
                        rows.push_back(detail::make_row(req, t, m, detail::beta_tag("CHEN_SQRT", beta),
                                                        chen.total_forwards, chen.memory_units));
                    }
                }
            }
            break;
        }
    }
    return rows;
}

inline std::string curves_to_csv(const std::vector<CurveRow>& rows) {
    std::string out =
        "figure,t,m,algorithm,total_forwards,forwards_per_step,memory_units,simulated_time_per_step\n";
    for (const auto& r : rows) {
        out += csv_field(r.figure) + ',' + std::to_string(r.t) + ',' + std::to_string(r.m) + ',' +
               csv_field(r.algorithm) + ',' + std::to_string(r.total_forwards) + ',' +
               format_fixed(r.forwards_per_step) + ',' + format_fixed(r.memory_units) + ',' +
               format_fixed(r.simulated_time_per_step) + '\n';
    }
    return out;
}

/// Chen's sqrt(t) against the dedup solver in both comparison modes.
struct ChenComparison {
    int t = 0;
    int beta = 0;
    std::int64_t chen_forwards = 0;
    double chen_memory_units = 0.0;
    int fixed_memory_budget = 0;         ///< floor(sqrt(t)(1 + beta))
    std::int64_t fixed_memory_forwards = 0;
    int min_memory_at_two_per_step = 0;
    double memory_ratio = 0.0;           ///< min memory / (sqrt(t)(1 + beta))
};

inline std::vector<ChenComparison> compare_chen(const std::vector<int>& ts, int beta, int max_t = default_max_t()) {
    if (ts.empty()) throw ConfigError("empty t list");
    if (beta < 1) throw ConfigError("beta must be >= 1");
    const int t_top = *std::max_element(ts.begin(), ts.end());
    if (*std::min_element(ts.begin(), ts.end()) < 1) throw ConfigError("t values must be >= 1");
    if (t_top > max_t) throw LimitError("t " + std::to_string(t_top) + " exceeds the solver cap " + std::to_string(max_t));

    const CostModel cm{beta + 1, beta, 2.0};
    int top = 1;
    for (int t : ts) {
        top = std::max({top, static_cast<int>(std::ceil(chen_sqrt(t, cm).memory_units)), detail::chen_budget(t, beta)});
    }
    const auto p = solve_msm(t_top, MemoryBudget(top), cm, true);
    std::vector<ChenComparison> out;
    for (int t : ts) {
        const auto chen = chen_sqrt(t, cm);
        const int fixed = detail::chen_budget(t, beta);
        const int min_m = detail::min_memory_at_two_per_step(p, t);
        out.push_back(ChenComparison{t, beta, chen.total_forwards, chen.memory_units, fixed,
                                     p.cost(t, fixed).value(), min_m,
                                     min_m / (std::sqrt(static_cast<double>(t)) * (1 + beta))});
    }
    return out;
}

inline std::string chen_comparison_to_csv(const std::vector<ChenComparison>& rows) {
    std::string out =
        "t,beta,chen_forwards,chen_memory_units,fixed_memory_budget,fixed_memory_forwards,"
        "fixed_memory_forwards_per_step,min_memory_at_two_per_step,memory_ratio\n";
    for (const auto& r : rows) {
        out += std::to_string(r.t) + ',' + std::to_string(r.beta) + ',' + std::to_string(r.chen_forwards) + ',' +
               format_fixed(r.chen_memory_units) + ',' + std::to_string(r.fixed_memory_budget) + ',' +
               std::to_string(r.fixed_memory_forwards) + ',' +
               format_fixed(static_cast<double>(r.fixed_memory_forwards) / r.t) + ',' +
               std::to_string(r.min_memory_at_two_per_step) + ',' + format_fixed(r.memory_ratio) + '\n';
    }
    return out;
}

}  // namespace remat
