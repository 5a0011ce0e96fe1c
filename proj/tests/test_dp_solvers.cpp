// SPDX-License-Identifier: Apache-2.0
#include <functional>
#include <map>
#include <tuple>

#include <gtest/gtest.h>

#include "remat/solvers.hpp"

using namespace remat;

namespace {

/// Top-down recursion over every admissible split, no pruning.
struct Recursion {
    Algorithm alg;
    CostModel model;
    std::map<std::pair<int, int>, Cost> memo;

    Cost operator()(int t, int m) {
        if (m <= 0) return Cost::infinity();
        if (t == 0) return Cost(0);
        if (t == 1) return Cost(1);
        if (m == 1) return Cost(static_cast<std::int64_t>(t) * (t + 1) / 2);
        auto key = std::make_pair(t, m);
        if (auto it = memo.find(key); it != memo.end()) return it->second;
        Cost best = Cost::infinity();
        if (alg != Algorithm::ism) {
            for (int y = 1; y < t; ++y) best = std::min(best, Cost(y) + (*this)(y, m) + (*this)(t - y, m - 1));
        }
        if (alg != Algorithm::hsm) {
            for (int y = 1; y <= t; ++y) {
                int charge = alg == Algorithm::ism ? 1 : model.alpha;
                if (alg == Algorithm::msm_dedup && y == 1) charge = model.beta;
                best = std::min(best, Cost(y) + (*this)(y - 1, m) + (*this)(t - y, m - charge));
            }
        }
        return memo[key] = best;
    }
};

std::int64_t tri(int t) { return static_cast<std::int64_t>(t) * (t + 1) / 2; }

}  // namespace

TEST(SolveHsm, Examples) {
    const auto p = solve_hsm(10, 4);
    for (int m = 1; m <= 4; ++m) EXPECT_EQ(p.cost(1, m), Cost(1));
    EXPECT_EQ(p.cost(10, 1), Cost(55));
    EXPECT_EQ(p.cost(4, 4), Cost(7));
    EXPECT_EQ(p.cost(3, 2), Cost(5));
    EXPECT_EQ(p.split(3, 2), 1);
    EXPECT_EQ(p.cost(5, 2), Cost(11));
}

TEST(SolveIsm, Examples) {
    const auto p = solve_ism(5, 5);
    EXPECT_EQ(p.cost(0, 3), Cost(0));
    EXPECT_EQ(p.cost(5, 5), Cost(5));
    EXPECT_EQ(p.cost(3, 2), Cost(4));
    EXPECT_EQ(p.split(3, 2), 1);
}

TEST(SolveMsm, Examples) {
    const auto p = solve_msm(6, MemoryBudget(4), CostModel{2, 1, 2.0}, false);
    EXPECT_EQ(p.cost(2, 4), Cost(2));
    EXPECT_EQ(p.cost(6, 1), Cost(21));
    const auto d = solve_msm(10, MemoryBudget(10), CostModel{5, 4, 2.0}, true);
    EXPECT_EQ(d.cost(10, 10), Cost(18));
}

TEST(SolveMsm, DedupWithEqualSizesMatchesPlain) {
    for (int alpha : {2, 3, 5}) {
        const CostModel cm{alpha, alpha, 2.0};
        const auto a = solve_msm(60, MemoryBudget(20), cm, false);
        const auto b = solve_msm(60, MemoryBudget(20), cm, true);
        EXPECT_EQ(a.tables(), b.tables()) << "alpha=" << alpha;
    }
}

TEST(Solvers, RejectBadDimensions) {
    EXPECT_THROW(solve_hsm(0, 3), ConfigError);
    EXPECT_THROW(solve_ism(3, 0), ConfigError);
    EXPECT_THROW(solve_msm(3, MemoryBudget(3), CostModel{1, 1, 2.0}, false), ConfigError);
}

TEST(Solvers, Boundaries) {
    const int T = 120;
    const auto h = solve_hsm(T, T);
    const auto i = solve_ism(T, T);
    const CostModel cm{3, 2, 2.0};
    const auto x = solve_msm(40, MemoryBudget(cm.alpha * 40), cm, false);
    for (int t = 1; t <= T; ++t) {
        EXPECT_EQ(h.cost(t, 1), Cost(tri(t)));
        EXPECT_EQ(i.cost(t, 1), Cost(tri(t)));
        for (int m = t; m <= T; m += 7) {
            EXPECT_EQ(h.cost(t, m), Cost(2 * t - 1));
            EXPECT_EQ(i.cost(t, m), Cost(t));
        }
    }
    for (int t = 1; t <= 40; ++t) {
        EXPECT_EQ(x.cost(t, 1), Cost(tri(t)));
        EXPECT_EQ(x.cost(t, cm.alpha * t), Cost(t));
    }
}

TEST(Solvers, MatchUnprunedRecursion) {
    const int T = 45, M = 9;
    const CostModel cm{3, 2, 2.0};
    for (auto alg : {Algorithm::hsm, Algorithm::ism, Algorithm::msm, Algorithm::msm_dedup}) {
        const auto p = solve(SolveRequest{alg, T, M, cm});
        Recursion r{alg, cm, {}};
        for (int t = 0; t <= T; ++t) {
            for (int m = 1; m <= M; ++m) {
                ASSERT_EQ(p.cost(t, m), r(t, m)) << to_string(alg) << " t=" << t << " m=" << m;
            }
        }
    }
}

TEST(Solvers, SplitIsSmallestMinimiser) {
    const int T = 60, M = 8;
    const auto h = solve_hsm(T, M);
    const auto i = solve_ism(T, M);
    auto Ch = [&](int t, int m) { return h.cost(t, m); };
    auto Ci = [&](int t, int m) { return i.cost(t, m); };
    for (int t = 2; t <= T; ++t) {
        for (int m = 2; m <= M; ++m) {
            const int yh = h.split(t, m);
            ASSERT_EQ(recurrence::hidden_push(Ch, t, m, yh), h.cost(t, m));
            for (int y = 1; y < yh; ++y) EXPECT_GT(recurrence::hidden_push(Ch, t, m, y), h.cost(t, m));
            for (int y = yh; y < t; ++y) EXPECT_GE(recurrence::hidden_push(Ch, t, m, y), h.cost(t, m));
            const int yi = i.split(t, m);
            ASSERT_EQ(recurrence::internal_push(Ci, t, m, yi, 1), i.cost(t, m));
            for (int y = 1; y < yi; ++y) EXPECT_GT(recurrence::internal_push(Ci, t, m, y, 1), i.cost(t, m));
            for (int y = yi; y <= t; ++y) EXPECT_GE(recurrence::internal_push(Ci, t, m, y, 1), i.cost(t, m));
        }
    }
}

TEST(SolveMsm, TiesFavourInternalPush) {
    const CostModel cm{2, 1, 2.0};
    const auto p = solve_msm(50, MemoryBudget(12), cm, false);
    auto C = [&](int t, int m) { return p.cost(t, m); };
    for (int t = 2; t <= 50; ++t) {
        for (int m = 2; m <= 12; ++m) {
            const Cost qh = recurrence::hidden_push(C, t, m, p.split_hidden(t, m));
            const Cost qi = recurrence::internal_push(C, t, m, p.split_internal(t, m), cm.alpha);
            EXPECT_EQ(p.cost(t, m), std::min(qh, qi));
            if (qi <= qh) {
                EXPECT_EQ(p.kind(t, m), PushKind::internal);
            } else {
                EXPECT_EQ(p.kind(t, m), PushKind::hidden);
            }
        }
    }
}

TEST(Solvers, Monotone) {
    const auto p = solve_msm(80, MemoryBudget(16), CostModel{3, 1, 2.0}, true);
    for (int t = 1; t <= 80; ++t) {
        for (int m = 1; m <= 16; ++m) {
            if (m > 1) {
                EXPECT_LE(p.cost(t, m), p.cost(t, m - 1));
            }
            EXPECT_GE(p.cost(t, m), p.cost(t - 1, m));
        }
    }
}

TEST(Solvers, Dominance) {
    const int T = 128, M = 12;
    const CostModel cm{3, 2, 2.0};
    const auto h = solve_hsm(T, M * cm.alpha);
    const auto i = solve_ism(T, M);
    const auto x = solve_msm(T, MemoryBudget(M * cm.alpha), cm, false);
    const auto d = solve_msm(T, MemoryBudget(M * cm.alpha), cm, true);
    for (int t = 1; t <= T; ++t) {
        for (int m = 1; m <= M; ++m) {
            EXPECT_LE(i.cost(t, m), h.cost(t, m));
            EXPECT_LE(x.cost(t, m * cm.alpha), i.cost(t, m));
        }
        for (int m = 1; m <= M * cm.alpha; ++m) {
            EXPECT_LE(x.cost(t, m), h.cost(t, m));
            EXPECT_LE(d.cost(t, m), x.cost(t, m));
        }
    }
}
