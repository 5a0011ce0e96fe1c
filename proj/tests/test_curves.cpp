// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "remat/curves.hpp"

using namespace remat;

namespace {

CurveRequest small(Figure f) {
    CurveRequest r;
    r.figure = f;
    r.t_min = 10;
    r.t_max = 200;
    r.t_step = 10;
    r.m_list = {2, 5, 10};
    return r;
}

}  // namespace

TEST(Csv, Quoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(format_fixed(4.0 / 3.0), "1.333333");
}

TEST(Curves, HeaderAndRowCount) {
    const auto req = small(Figure::hsm_cost);
    const auto csv = curves_to_csv(compute_curves(req));
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "figure,t,m,algorithm,total_forwards,forwards_per_step,memory_units,simulated_time_per_step");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 20 * 3);
}

TEST(Curves, HsmRowsWithinEnvelope) {
    auto req = small(Figure::hsm_cost);
    req.t_min = 1000;
    req.t_max = 1000;
    req.m_list = {10};
    const auto rows = compute_curves(req);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_LT(rows[0].forwards_per_step, 4 * std::pow(1000.0, 0.1));
    EXPECT_DOUBLE_EQ(rows[0].simulated_time_per_step, rows[0].forwards_per_step + 2.0);
}

TEST(Curves, StrategyCompareOrdering) {
    auto req = small(Figure::strategy_compare);
    req.alpha = 3;
    req.beta = 2;
    const auto rows = compute_curves(req);
    ASSERT_EQ(rows.size() % 3, 0u);
    for (std::size_t i = 0; i < rows.size(); i += 3) {
        EXPECT_EQ(rows[i].algorithm, "HSM");
        EXPECT_EQ(rows[i + 1].algorithm, "ISM");
        EXPECT_EQ(rows[i + 2].algorithm, "MSM");
        EXPECT_LE(rows[i + 2].total_forwards, std::min(rows[i].total_forwards, rows[i + 1].total_forwards));
        EXPECT_EQ(rows[i].memory_units, rows[i + 2].memory_units);
    }
}

TEST(Curves, ChenMemoryRatioBelowOne) {
    auto req = small(Figure::chen_memory_ratio);
    req.t_min = 1024;
    req.t_max = 1024;
    req.beta_list = {5};
    const auto rows = compute_curves(req);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].algorithm, "MSM_DEDUP(beta=5)");
    EXPECT_LE(rows[0].total_forwards, 2 * 1024);
    EXPECT_LE(rows[0].memory_units, 1.0);
    EXPECT_DOUBLE_EQ(rows[1].memory_units, 1.0);
}

TEST(Curves, ChenFixedMemoryAtMostTwoPerStep) {
    auto req = small(Figure::chen_cost_fixed_memory);
    req.t_min = 16;
    req.t_max = 256;
    req.t_step = 16;
    for (const auto& r : compute_curves(req)) {
        if (r.algorithm.rfind("MSM", 0) == 0) {
            EXPECT_LE(r.forwards_per_step, 2.0) << r.t;
        }
    }
}

TEST(Curves, Deterministic) {
    const auto req = small(Figure::msm_cost);
    EXPECT_EQ(curves_to_csv(compute_curves(req)), curves_to_csv(compute_curves(req)));
}

TEST(Curves, RequestValidation) {
    auto req = small(Figure::hsm_cost);
    req.t_max = 5;
    EXPECT_THROW(compute_curves(req), ConfigError);
    req = small(Figure::hsm_cost);
    req.max_t = 100;
    EXPECT_THROW(compute_curves(req), LimitError);
    req = small(Figure::hsm_cost);
    req.m_list.clear();
    EXPECT_THROW(compute_curves(req), ConfigError);
    EXPECT_THROW(parse_figure("fig9"), ConfigError);
}

TEST(CompareChen, BothModes) {
    for (int beta : {2, 5, 10}) {
        const auto rows = compare_chen({1, 16, 64, 256}, beta);
        ASSERT_EQ(rows.size(), 4u);
        EXPECT_EQ(rows[0].fixed_memory_forwards, 1);
        for (const auto& r : rows) {
            EXPECT_LE(r.fixed_memory_forwards, 2 * r.t);
            EXPECT_LE(r.fixed_memory_forwards, r.chen_forwards);
        }
        EXPECT_LT(rows[3].memory_ratio, 1.0);
    }
}
