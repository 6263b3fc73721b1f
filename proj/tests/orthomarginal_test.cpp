#include <gtest/gtest.h>

#include <random>

#include "deltamap/errors.hpp"
#include "deltamap/orthomarginal.hpp"
#include "support.hpp"

namespace deltamap {
namespace {

using testing::ints;

// Independent margin: sum over every x agreeing with each x_c.
std::vector<Rational> direct_margin(const DenseFunction& f, const Hypersite& c) {
  std::vector<Rational> out(table_size(f.num_labels(), c.size()));
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto x = assignment_at(k, f.num_sites(), f.num_labels());
    out[scope_index(c, x, f.num_labels())] += f[k];
  }
  return out;
}

// A function built as a sum of random local terms over the members of `set`.
DenseFunction local_sum(int n, int L, const HypersiteSet& set, std::mt19937_64& rng) {
  DenseFunction f(n, L);
  for (const auto& s : set) {
    std::vector<Rational> h(table_size(L, s.size()));
    for (auto& v : h) v = Rational(testing::draw(rng, -4, 4));
    for (std::size_t k = 0; k < f.size(); ++k) {
      f[k] += h[scope_index(s, assignment_at(k, n, L), L)];
    }
  }
  return f;
}

DenseFunction minus(const DenseFunction& a, const DenseFunction& b) {
  DenseFunction out = a;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] -= b[k];
  return out;
}

TEST(Margin, HandExamples) {
  DenseFunction ones(3, 2, std::vector<Rational>(8, Rational(1)));
  EXPECT_EQ(margin(ones, Hypersite{2}), ints({4, 4}));

  DenseFunction spike(3, 2);
  spike[0] = 1;
  EXPECT_EQ(margin(spike, Hypersite{1, 2}), ints({1, 0, 0, 0}));

  std::mt19937_64 rng(1);
  const auto f = testing::random_dense(3, 3, rng);
  Rational total;
  for (const auto& v : f.values()) total += v;
  EXPECT_EQ(margin(f, Hypersite{}), std::vector<Rational>{total});
}

TEST(Margin, MatchesDirectSummation) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 1, 5));
    const int L = static_cast<int>(testing::draw(rng, 2, 3));
    const auto f = testing::random_dense(n, L, rng);
    const auto c = testing::random_hypersite(n, 3, rng);
    EXPECT_EQ(margin(f, c), direct_margin(f, c));
  }
}

TEST(DenseFunction, EnforcesCap) {
  EXPECT_THROW(DenseFunction(13, 2), SizeError);
  EXPECT_NO_THROW(DenseFunction(12, 2));
  EXPECT_NO_THROW(DenseFunction(13, 2, 1u << 13));
}

TEST(Project, ZeroMarginsGiveZero) {
  // f = a(x1) b(x3) with zero-sum a and b: every closure margin of
  // {1,2},{2,3} vanishes.
  DenseFunction f(3, 2);
  for (std::size_t k = 0; k < 8; ++k) {
    const auto x = assignment_at(k, 3, 2);
    f[k] = (x[0] == x[2]) ? 1 : -1;
  }
  const HypersiteSet set{{1, 2}, {2, 3}};
  for (const auto& c : frontier_closure(set)) {
    ASSERT_EQ(margin(f, c), std::vector<Rational>(table_size(2, c.size())));
  }
  EXPECT_EQ(project(f, set), DenseFunction(3, 2));
}

TEST(Project, LocalSumsAreFixed) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 2, 5));
    const int L = static_cast<int>(testing::draw(rng, 2, 3));
    const auto set = testing::random_hypersite_set(n, 4, 3, rng);
    const auto f = local_sum(n, L, set, rng);
    EXPECT_EQ(project(f, set), f);
  }
}

TEST(Project, IdempotentOrthogonalMarginPreserving) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 1, 5));
    const int L = static_cast<int>(testing::draw(rng, 2, 3));
    const auto set = testing::random_hypersite_set(n, 4, 3, rng);
    const auto f = testing::random_dense(n, L, rng);
    const auto g = testing::random_dense(n, L, rng);
    const auto pf = project(f, set);
    EXPECT_EQ(project(pf, set), pf);
    EXPECT_EQ(inner_product(minus(f, pf), project(g, set)), 0);
    for (const auto& c : frontier_closure(set)) EXPECT_EQ(margin(pf, c), margin(f, c));
  }
}

TEST(Project, FrontierMarginsDetermineProjectedFunctions) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 2, 5));
    const int L = static_cast<int>(testing::draw(rng, 2, 3));
    const auto set = testing::random_hypersite_set(n, 4, 3, rng);
    const auto f = local_sum(n, L, set, rng);
    const auto g = project(lift(margins(f, frontier(set)), testing::random_dense(n, L, rng)), set);
    EXPECT_EQ(g, f);
  }
}

TEST(CheckPseudoMarginals, M1Tables) {
  MarginalSet p{3, 2, {}};
  p.tables[Hypersite{1, 2}] = {Rational(1, 2), 0, 0, Rational(1, 2)};
  p.tables[Hypersite{2, 3}] = {0, Rational(1, 2), Rational(1, 2), 0};
  EXPECT_TRUE(check_pseudo_marginals(p));
  p.tables[Hypersite{2, 3}] = ints({1, 0, 0, 0});
  const auto report = check_pseudo_marginals(p);
  EXPECT_FALSE(report);
  ASSERT_EQ(report.violations.size(), 1u);
}

TEST(CheckPseudoMarginals, AncestorEquationsAndDisjointScopes) {
  std::mt19937_64 rng(9);
  const auto f = testing::random_dense(4, 2, rng);
  auto p = margins(f, HypersiteSet{{1, 2}, {2, 3}, {2}, {3, 4}});
  EXPECT_TRUE(check_pseudo_marginals(p));
  p.tables[Hypersite{2}][0] += 1;
  EXPECT_FALSE(check_pseudo_marginals(p));

  MarginalSet disjoint{4, 2, {}};
  disjoint.tables[Hypersite{1, 2}] = ints({1, 0, 0, 0});
  disjoint.tables[Hypersite{3, 4}] = ints({2, 0, 0, 0});
  EXPECT_TRUE(check_pseudo_marginals(disjoint));
}

TEST(Lift, ReproducesInputs) {
  std::mt19937_64 rng(10);
  const HypersiteSet set{{1, 2}, {2, 3}};
  const auto f = testing::random_dense(3, 2, rng);
  const auto p = margins(f, set);
  EXPECT_EQ(lift(p, f), f);
  EXPECT_EQ(lift(p, DenseFunction(3, 2)), project(f, set));
  for (int trial = 0; trial < 40; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 1, 5));
    const int L = static_cast<int>(testing::draw(rng, 2, 3));
    const auto s = testing::random_hypersite_set(n, 4, 3, rng);
    const auto tables = margins(testing::random_dense(n, L, rng), s);
    EXPECT_EQ(margins(lift(tables, testing::random_dense(n, L, rng)), s), tables);
  }
}

TEST(Lift, RejectsInconsistentTables) {
  MarginalSet p{3, 2, {}};
  p.tables[Hypersite{1, 2}] = {Rational(1, 2), 0, 0, Rational(1, 2)};
  p.tables[Hypersite{2, 3}] = ints({1, 0, 0, 0});
  EXPECT_THROW(lift(p, DenseFunction(3, 2)), PreconditionError);

  // Disjoint members with different totals pass the overlap test but have no
  // common global source.
  MarginalSet disjoint{4, 2, {}};
  disjoint.tables[Hypersite{1, 2}] = ints({1, 0, 0, 0});
  disjoint.tables[Hypersite{3, 4}] = ints({2, 0, 0, 0});
  EXPECT_THROW(lift(disjoint, DenseFunction(4, 2)), PreconditionError);
}

}  // namespace
}  // namespace deltamap
