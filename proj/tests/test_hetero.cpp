// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "remat/hetero.hpp"
#include "remat/solvers.hpp"

using namespace remat;

TEST(ChainSpec, Validation) {
    EXPECT_THROW(ChainSpec(std::vector<Layer>{}), ValidationError);
    EXPECT_THROW(ChainSpec({Layer{0.0, 1, 1}}), ValidationError);
    EXPECT_THROW(ChainSpec({Layer{1.0, 0, 1}}), ValidationError);
    EXPECT_EQ(ChainSpec::homogeneous(5).size(), 5);
}

TEST(ChainSpec, ParsesLayerRecords) {
    const auto c = parse_chain_spec(R"({"layers":[{"u":2,"s":1,"p":1},{"u":3.5,"s":2,"p":4}]})");
    ASSERT_EQ(c.size(), 2);
    EXPECT_DOUBLE_EQ(c.layer(2).u, 3.5);
    EXPECT_EQ(c.layer(2).s, 2);
    EXPECT_EQ(c.layer(2).p, 4);
    EXPECT_EQ(c.max_working_size(), 4);
}

TEST(ChainSpec, ParseErrorsNameTheField) {
    try {
        (void)parse_chain_spec(R"({"layers":[{"u":2,"s":1}]})");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "layers[0].p");
    }
    EXPECT_THROW((void)parse_chain_spec(R"({"layers":[{"u":2,"s":1.5,"p":1}]})"), ParseError);
    EXPECT_THROW((void)parse_chain_spec("{\"layers\": ["), ParseError);
    EXPECT_THROW((void)parse_chain_spec(R"({"stages":[]})"), ParseError);
}

TEST(CumulativeCost, Examples) {
    const auto unit = ChainSpec::homogeneous(8);
    EXPECT_DOUBLE_EQ(cumulative_cost(unit, 0, 5), 5.0);
    const ChainSpec c({Layer{2, 1, 1}, Layer{3, 1, 1}, Layer{4, 1, 1}});
    EXPECT_DOUBLE_EQ(cumulative_cost(c, 1, 2), 7.0);
    EXPECT_DOUBLE_EQ(cumulative_cost(c, 0, 3), 9.0);
    EXPECT_THROW((void)cumulative_cost(c, 2, 2), std::invalid_argument);
    EXPECT_THROW((void)cumulative_cost(c, 0, 0), std::invalid_argument);
}

TEST(FeasibilityGate, Examples) {
    const auto inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(feasibility_gate(ChainSpec::homogeneous(4), 0, 4, 1), 0.0);
    const ChainSpec c({Layer{1, 1, 1}, Layer{1, 1, 9}, Layer{1, 1, 1}});
    EXPECT_EQ(feasibility_gate(c, 0, 2, 8), inf);
    EXPECT_EQ(feasibility_gate(c, 2, 1, 8), 0.0);
    for (int x = 0; x < 3; ++x) {
        for (int y = 1; x + y <= 3; ++y) EXPECT_EQ(feasibility_gate(c, x, y, 9), 0.0);
    }
}

TEST(SolveHetero, HomogeneousReduction) {
    const auto h = solve_hsm(64, 8);
    const auto p = solve_hetero(ChainSpec::homogeneous(64), 8);
    for (int t = 0; t <= 64; ++t) {
        for (int m = 1; m <= 8; ++m) {
            ASSERT_EQ(p.cost(t, m, 0), static_cast<double>(h.cost(t, m).value())) << "t=" << t << " m=" << m;
        }
    }
}

TEST(SolveHetero, Boundaries) {
    const auto p = solve_hetero(ChainSpec::homogeneous(4), 10);
    EXPECT_EQ(p.cost(4, 10, 0), 7.0);
    EXPECT_EQ(p.cost(4, 1, 0), 10.0);
    EXPECT_TRUE(std::isinf(p.cost(4, 0, 0)));
    EXPECT_TRUE(std::isinf(p.cost(4, -1, 0)));
    EXPECT_EQ(p.cost(0, 3, 0), 0.0);
    EXPECT_EQ(p.cost(3, 3, 2), 0.0);
    EXPECT_THROW((void)p.cost(2, 11, 0), std::out_of_range);
}

TEST(SolveHetero, WeightedBoundaries) {
    const ChainSpec c({Layer{2, 1, 1}, Layer{3, 1, 1}, Layer{5, 1, 1}});
    const auto p = solve_hetero(c, 3);
    // store everything: top layer once, the others twice
    EXPECT_EQ(p.cost(3, 3, 0), 5 + 2 * (2 + 3));
    // no spare memory: layer j runs t - j + 1 times
    EXPECT_EQ(p.cost(3, 1, 0), 3 * 2 + 2 * 3 + 1 * 5);
}

TEST(SolveHetero, MonotoneInMemory) {
    std::vector<Layer> layers;
    for (int i = 1; i <= 20; ++i) layers.push_back(Layer{1.0 + (i * 7) % 5, 1 + i % 3, 1 + i % 4});
    const ChainSpec c(layers);
    const auto p = solve_hetero(c, 14);
    for (int x = 0; x < 20; ++x) {
        for (int t = 1; x + t <= 20; ++t) {
            for (int m = 1; m <= 14; ++m) {
                EXPECT_LE(p.cost(t, m, x), p.cost(t, m - 1, x));
            }
        }
    }
}

TEST(SolveHetero, GateBlocksOversizedLayers) {
    const ChainSpec c({Layer{1, 1, 1}, Layer{1, 1, 5}, Layer{1, 1, 1}, Layer{1, 1, 1}});
    const auto p = solve_hetero(c, 6);
    for (int m = 0; m < 5; ++m) EXPECT_TRUE(std::isinf(p.cost(4, m, 0)));
    EXPECT_FALSE(std::isinf(p.cost(4, 5, 0)));
    EXPECT_EQ(p.cost(2, 1, 2), 3.0);
}

TEST(SolveHetero, InfeasibleReportsSmallestBudget) {
    const ChainSpec c({Layer{1, 1, 2}, Layer{1, 1, 7}});
    try {
        (void)solve_hetero(c, 4);
        FAIL();
    } catch (const InfeasibleError& e) {
        EXPECT_EQ(e.smallest_admissible_budget(), 7);
    }
    EXPECT_NO_THROW((void)solve_hetero(c, 7));
}

TEST(SolveHetero, LayerCap) {
    const auto c = ChainSpec::homogeneous(20);
    HeteroOptions opts;
    opts.max_layers = 10;
    EXPECT_THROW((void)solve_hetero(c, 3, opts), LimitError);
    opts.force = true;
    EXPECT_NO_THROW((void)solve_hetero(c, 3, opts));
}
