#include <gtest/gtest.h>

#include <random>

#include "deltamap/errors.hpp"
#include "deltamap/hypersites.hpp"
#include "support.hpp"

namespace deltamap {
namespace {

TEST(Frontier, DropsStrictSubsets) {
  EXPECT_EQ(frontier({{1, 2}, {2, 3}, {2}}), (HypersiteSet{{1, 2}, {2, 3}}));
  EXPECT_EQ(frontier({{1}, {2}, {3}}), (HypersiteSet{{1}, {2}, {3}}));
  EXPECT_EQ(frontier({{1, 2, 3}, {1, 2}, {3}}), (HypersiteSet{{1, 2, 3}}));
  EXPECT_THROW(frontier(HypersiteSet{}), EmptyInput);
}

TEST(Ancestry, SmallestFrontierSuperset) {
  const auto anc = ancestry({{1, 2}, {2, 3}, {2}});
  ASSERT_EQ(anc.size(), 1u);
  EXPECT_EQ(anc.at(Hypersite{2}), (Hypersite{1, 2}));
  EXPECT_EQ(ancestry({{1, 2, 3}, {3}}).at(Hypersite{3}), (Hypersite{1, 2, 3}));
  EXPECT_TRUE(ancestry({{1, 2}, {3, 4}}).empty());
}

TEST(FrontierClosure, HandExamples) {
  EXPECT_EQ(frontier_closure({{1, 2}, {2, 3}}), (HypersiteSet{{1, 2}, {2, 3}, {2}, {}}));
  EXPECT_EQ(frontier_closure({{1, 2}, {3, 4}}), (HypersiteSet{{1, 2}, {3, 4}, {}}));
  EXPECT_EQ(frontier_closure({{1, 2, 3}, {2, 3, 4}, {1, 3, 4}}),
            (HypersiteSet{{1, 2, 3}, {2, 3, 4}, {1, 3, 4}, {2, 3}, {3}, {3, 4}, {1, 3}, {}}));
  // Non-frontier members do not contribute.
  EXPECT_EQ(frontier_closure({{1, 2}, {2, 3}, {1}}), (HypersiteSet{{1, 2}, {2, 3}, {2}, {}}));
}

// Closure by brute force: add pairwise intersections until nothing changes.
HypersiteSet brute_closure(const HypersiteSet& set) {
  auto out = frontier(set);
  for (bool grew = true; grew;) {
    grew = false;
    const auto members = out.members();
    for (const auto& a : members) {
      for (const auto& b : members) {
        const auto meet = a.intersect(b);
        if (!meet.empty()) grew = out.insert(meet) || grew;
      }
    }
  }
  out.insert(Hypersite{});
  return out;
}

TEST(FrontierClosure, MatchesBruteForceAndIsClosed) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 2, 7));
    const auto set = testing::random_hypersite_set(n, 8, 4, rng);
    const auto closure = frontier_closure(set);
    EXPECT_EQ(closure, brute_closure(set));
    EXPECT_TRUE(closed_under_intersection(closure));
    EXPECT_EQ(frontier(frontier(set)), frontier(set));
  }
}

TEST(Rho, HandExamples) {
  const HypersiteSet chain{{1, 2}, {2, 3}};
  const auto rho = rho_coefficients(frontier_closure(chain), frontier(chain));
  EXPECT_EQ(rho.at(Hypersite{1, 2}), 1);
  EXPECT_EQ(rho.at(Hypersite{2, 3}), 1);
  EXPECT_EQ(rho.at(Hypersite{2}), -1);
  EXPECT_EQ(rho.at(Hypersite{}), 0);

  const HypersiteSet single{{1, 2, 3}};
  const auto rs = rho_coefficients(frontier_closure(single), single);
  EXPECT_EQ(rs.at(Hypersite{1, 2, 3}), 1);
  EXPECT_EQ(rs.at(Hypersite{}), 0);

  const HypersiteSet disjoint{{1, 2}, {3, 4}};
  const auto rd = rho_coefficients(frontier_closure(disjoint), disjoint);
  EXPECT_EQ(rd.at(Hypersite{1, 2}), 1);
  EXPECT_EQ(rd.at(Hypersite{3, 4}), 1);
  EXPECT_EQ(rd.at(Hypersite{}), -1);
}

TEST(Rho, SupersetSumsAreOne) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 2, 7));
    const auto set = testing::random_hypersite_set(n, 6, 4, rng);
    const auto closure = frontier_closure(set);
    const auto rho = rho_coefficients(closure, frontier(set));
    ASSERT_EQ(rho.size(), closure.size());
    for (const auto& c : closure) {
      long long sum = 0;
      for (const auto& t : closure) {
        if (c.is_subset_of(t)) sum += rho.at(t);
      }
      EXPECT_EQ(sum, 1) << c.to_string();
    }
  }
}

TEST(HypersiteSet, SortedUniqueMembers) {
  HypersiteSet set{{2, 3}, {1, 2}};
  EXPECT_FALSE(set.insert(Hypersite{1, 2}));
  EXPECT_TRUE(set.insert(Hypersite{}));
  EXPECT_EQ(set.members().front(), Hypersite{});
  EXPECT_EQ(set.sites(), (Hypersite{1, 2, 3}));
  EXPECT_TRUE(set.erase(Hypersite{2, 3}));
  EXPECT_FALSE(set.contains(Hypersite{2, 3}));
}

}  // namespace
}  // namespace deltamap
