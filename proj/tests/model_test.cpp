#include <gtest/gtest.h>

#include <random>

#include "deltamap/errors.hpp"
#include "deltamap/model.hpp"
#include "support.hpp"

namespace deltamap {
namespace {

using testing::ints;
using testing::m1;

TEST(Model, EvaluateM1) {
  const auto m = m1();
  EXPECT_EQ(evaluate(m, std::vector<int>{0, 0, 0}), 0);
  EXPECT_EQ(evaluate(m, std::vector<int>{0, 1, 0}), 2);
  EXPECT_EQ(evaluate(m, std::vector<int>{0, 0, 1}), 1);
  EXPECT_THROW(evaluate(m, std::vector<int>{0, 0}), InvalidAssignment);
  EXPECT_THROW(evaluate(m, std::vector<int>{0, 2, 0}), InvalidAssignment);
}

TEST(Model, RejectsMalformedFactors) {
  EXPECT_THROW(Model(3, 2, {FactorTable(Hypersite{1, 2}, ints({0, 1, 1}))}), ModelError);
  EXPECT_THROW(Model(2, 2, {FactorTable(Hypersite{2, 3}, ints({0, 1, 1, 0}))}), ModelError);
  EXPECT_THROW(Model(2, 1, {}), ModelError);
}

TEST(Model, SumsDuplicateScopes) {
  const Model m(2, 2,
                {FactorTable(Hypersite{1, 2}, ints({1, 2, 3, 4})),
                 FactorTable(Hypersite{1, 2}, ints({10, 20, 30, 40}))});
  ASSERT_EQ(m.factors().size(), 1u);
  EXPECT_EQ(std::vector<Rational>(m.factors()[0].values().begin(), m.factors()[0].values().end()),
            ints({11, 22, 33, 44}));
}

TEST(Model, Validate) {
  const auto d = validate(m1());
  EXPECT_TRUE(d.covers);
  EXPECT_TRUE(d.constant_factors.empty());

  const Model partial(3, 2, {FactorTable(Hypersite{1, 2}, ints({0, 1, 1, 0}))});
  EXPECT_FALSE(validate(partial).covers);
  EXPECT_EQ(validate(partial).uncovered_sites, std::vector<int>{3});

  const Model flat(2, 2, {FactorTable(Hypersite{1, 2}, ints({5, 5, 5, 5}))});
  EXPECT_EQ(validate(flat).constant_factors, std::vector<Hypersite>{Hypersite({1, 2})});
}

TEST(MergeToFrontier, LeavesFrontierModelsAlone) {
  EXPECT_EQ(merge_to_frontier(m1()), m1());
  EXPECT_TRUE(is_frontier_form(m1()));
}

TEST(MergeToFrontier, BroadcastsUnaryIntoPair) {
  const Model m(2, 2,
                {FactorTable(Hypersite{1, 2}, ints({0, 1, 1, 0})),
                 FactorTable(Hypersite{1}, ints({0, 3}))});
  const auto merged = merge_to_frontier(m);
  ASSERT_EQ(merged.factors().size(), 1u);
  // Entries in order x = 00, 10, 01, 11 (first site fastest).
  EXPECT_EQ(std::vector<Rational>(merged.factors()[0].values().begin(),
                                  merged.factors()[0].values().end()),
            ints({0, 4, 1, 3}));
  for (std::size_t k = 0; k < 4; ++k) {
    const auto x = assignment_at(k, 2, 2);
    EXPECT_EQ(evaluate(merged, x), evaluate(m, x));
  }
}

TEST(MergeToFrontier, TiesGoToLexicographicallySmallestAncestor) {
  const Model m(3, 2,
                {FactorTable(Hypersite{1, 2}, ints({0, 0, 0, 0})),
                 FactorTable(Hypersite{2, 3}, ints({0, 0, 0, 0})),
                 FactorTable(Hypersite{2}, ints({0, 7}))});
  const auto merged = merge_to_frontier(m);
  EXPECT_EQ(merged.find(Hypersite{1, 2})->values()[2], 7);
  EXPECT_EQ(merged.find(Hypersite{2, 3})->values()[1], 0);
  EXPECT_EQ(merge_to_frontier(m), merged);
}

TEST(MergeToFrontier, PreservesEvaluateExhaustively) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 2, 8));
    const int L = n > 6 ? 2 : static_cast<int>(testing::draw(rng, 2, 3));
    const auto scopes = testing::random_hypersite_set(n, 6, 3, rng);
    const auto m = testing::random_model(n, L, scopes, rng, -5, 5);
    const auto merged = merge_to_frontier(m);
    EXPECT_TRUE(is_frontier_form(merged));
    std::size_t total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(L);
    for (std::size_t k = 0; k < total; ++k) {
      const auto x = assignment_at(k, n, L);
      ASSERT_EQ(evaluate(merged, x), evaluate(m, x));
    }
  }
}

TEST(Model, FingerprintIsStableAndContentSensitive) {
  EXPECT_EQ(fingerprint(m1()), fingerprint(m1()));
  EXPECT_EQ(fingerprint(m1()).size(), 16u);
  const Model other(3, 2,
                    {FactorTable(Hypersite{1, 2}, ints({0, 1, 1, 0})),
                     FactorTable(Hypersite{2, 3}, ints({0, 1, 1, 1}))});
  EXPECT_NE(fingerprint(m1()), fingerprint(other));
}

}  // namespace
}  // namespace deltamap
