// SPDX-License-Identifier: Apache-2.0
#include <random>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "remat/cost.hpp"
#include "remat/errors.hpp"
#include "remat/grid.hpp"
#include "remat/policy_io.hpp"
#include "remat/policy_table.hpp"
#include "remat/solvers.hpp"
#include "remat/types.hpp"

using namespace remat;

TEST(Cost, InfinityOrdersAboveEverything) {
    EXPECT_LT(Cost(5), Cost::infinity());
    EXPECT_LT(Cost(0), Cost(1));
    EXPECT_EQ(Cost::infinity(), Cost::infinity());
    EXPECT_TRUE((Cost(3) + Cost::infinity()).is_infinite());
    EXPECT_EQ(Cost(3) + Cost(4), Cost(7));
    EXPECT_THROW((void)Cost::infinity().value(), std::logic_error);
    EXPECT_THROW(Cost(-2), std::invalid_argument);
}

TEST(Cost, EncodesInfinityAsMinusOne) {
    EXPECT_EQ(Cost::infinity().encoded(), -1);
    EXPECT_EQ(Cost::decode(-1), Cost::infinity());
    EXPECT_EQ(Cost::decode(42), Cost(42));
    std::ostringstream os;
    os << Cost(9) << ' ' << Cost::infinity();
    EXPECT_EQ(os.str(), "9 inf");
}

TEST(Grid, BoundsChecked) {
    Grid<int> g(3, 2, 7);
    EXPECT_EQ(g.at(3, 2), 7);
    g(1, 1) = 4;
    EXPECT_EQ(g.at(1, 1), 4);
    EXPECT_THROW((void)g.at(4, 0), std::out_of_range);
    EXPECT_THROW((void)g.at(0, -1), std::out_of_range);
}

TEST(CostModel, Validation) {
    EXPECT_NO_THROW((CostModel{2, 1, 2.0}.validate()));
    EXPECT_NO_THROW((CostModel{5, 5, 2.0}.validate()));
    EXPECT_THROW((CostModel{1, 1, 2.0}.validate()), ConfigError);
    EXPECT_THROW((CostModel{3, 4, 2.0}.validate()), ConfigError);
    EXPECT_THROW((CostModel{3, 0, 2.0}.validate()), ConfigError);
    EXPECT_THROW((CostModel{3, 2, -1.0}.validate()), ConfigError);
}

TEST(MemoryBudget, AtLeastOneUnit) {
    EXPECT_EQ(MemoryBudget(3).units(), 3);
    EXPECT_THROW(MemoryBudget(0), ConfigError);
}

TEST(Algorithm, NamesRoundTrip) {
    for (auto a : {Algorithm::hsm, Algorithm::ism, Algorithm::msm, Algorithm::msm_dedup}) {
        EXPECT_EQ(parse_algorithm(to_string(a)), a);
    }
    EXPECT_EQ(parse_algorithm("hsm"), Algorithm::hsm);
    EXPECT_THROW(parse_algorithm("xyz"), ParseError);
}

TEST(PolicyIo, SingleStepDocument) {
    const auto doc = nlohmann::json::parse(serialize_policy(solve_hsm(1, 1)));
    EXPECT_EQ(doc["version"], kPolicyFormatVersion);
    EXPECT_EQ(doc["algorithm"], "HSM");
    EXPECT_EQ(doc["cost"][1][1], 1);
    EXPECT_TRUE(doc["alpha"].is_null());
}

TEST(PolicyIo, FiveByTwoDocument) {
    const auto doc = nlohmann::json::parse(serialize_policy(solve_hsm(5, 2)));
    EXPECT_EQ(doc["cost"][5][2], 11);
    EXPECT_EQ(doc["cost"][5][0], -1);
}

TEST(PolicyIo, RoundTripRandomTables) {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> tdist(1, 40), mdist(1, 12), adist(2, 6);
    for (int trial = 0; trial < 60; ++trial) {
        const int t = tdist(rng), m = mdist(rng), alpha = adist(rng);
        const int beta = std::uniform_int_distribution<int>(1, alpha)(rng);
        const Algorithm alg = static_cast<Algorithm>(trial % 4);
        const auto p = solve(SolveRequest{alg, t, m, CostModel{alpha, beta, 2.0}});
        const auto q = deserialize_policy(serialize_policy(p));
        EXPECT_EQ(p, q) << to_string(alg) << " t=" << t << " m=" << m;
        EXPECT_EQ(serialize_policy(q), serialize_policy(p));
    }
}

namespace {

nlohmann::json hsm_doc() { return nlohmann::json::parse(serialize_policy(solve_hsm(6, 3))); }

}  // namespace

TEST(PolicyIo, RejectsCostIncreasingWithMemory) {
    auto doc = hsm_doc();
    doc["cost"][3][2] = doc["cost"][3][1].get<int>() + 1;
    try {
        (void)deserialize_policy(doc.dump());
        FAIL() << "accepted a non-monotone table";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("memory"), std::string::npos) << e.what();
    }
}

TEST(PolicyIo, RejectsCostDecreasingWithLength) {
    auto doc = hsm_doc();
    doc["cost"][4][3] = 1;
    EXPECT_THROW((void)deserialize_policy(doc.dump()), ValidationError);
}

TEST(PolicyIo, RejectsBrokenBellmanConsistency) {
    auto doc = hsm_doc();
    doc["split"][5][2] = doc["split"][5][2].get<int>() == 1 ? 2 : 1;
    EXPECT_THROW((void)deserialize_policy(doc.dump()), ValidationError);
}

TEST(PolicyIo, RejectsSplitOutOfRange) {
    auto doc = hsm_doc();
    doc["split"][3][2] = 3;
    EXPECT_THROW((void)deserialize_policy(doc.dump()), ValidationError);
}

TEST(PolicyIo, TruncatedDocumentIsParseError) {
    const std::string text = serialize_policy(solve_hsm(6, 3));
    try {
        (void)deserialize_policy(text.substr(0, text.size() / 2));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "document");
    }
}

TEST(PolicyIo, ParseErrorNamesField) {
    auto doc = hsm_doc();
    doc.erase("m_max");
    try {
        (void)deserialize_policy(doc.dump());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "m_max");
    }
    doc = hsm_doc();
    doc["algorithm"] = 7;
    try {
        (void)deserialize_policy(doc.dump());
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.field(), "algorithm");
    }
}

TEST(PolicyIo, RejectsUnknownVersion) {
    auto doc = hsm_doc();
    doc["version"] = 99;
    EXPECT_THROW((void)deserialize_policy(doc.dump()), ParseError);
}

TEST(PolicyIo, MixedTablesNeedTheirExtraFields) {
    auto doc = nlohmann::json::parse(serialize_policy(solve_msm(5, MemoryBudget(4), CostModel{2, 1, 2.0}, false)));
    doc.erase("kind");
    EXPECT_THROW((void)deserialize_policy(doc.dump()), ParseError);
}

TEST(PolicyTable, CostOutsideMemoryRange) {
    const auto p = solve_hsm(4, 2);
    EXPECT_TRUE(p.cost(3, 0).is_infinite());
    EXPECT_TRUE(p.cost(3, -1).is_infinite());
    EXPECT_THROW((void)p.cost(5, 1), std::out_of_range);
    EXPECT_TRUE(p.covers(0, 1));
    EXPECT_FALSE(p.covers(2, 0));
    EXPECT_FALSE(p.covers(2, 3));
}

TEST(PolicyTable, InternalChargeFollowsModel) {
    const auto plain = solve_msm(4, MemoryBudget(6), CostModel{3, 2, 2.0}, false);
    const auto dedup = solve_msm(4, MemoryBudget(6), CostModel{3, 2, 2.0}, true);
    EXPECT_EQ(plain.internal_charge(1), 3);
    EXPECT_EQ(dedup.internal_charge(1), 2);
    EXPECT_EQ(dedup.internal_charge(2), 3);
    EXPECT_TRUE(dedup.internal_push_deduplicated(1));
    EXPECT_FALSE(plain.internal_push_deduplicated(1));
    EXPECT_EQ(solve_ism(3, 2).internal_charge(2), 1);
}
