#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "deltamap/errors.hpp"
#include "deltamap/lp.hpp"
#include "support.hpp"

namespace deltamap {
namespace {

const SolveOptions kFloat{Arithmetic::Float};

bool satisfied(const LinearProgram& lp, const std::vector<Rational>& x) {
  for (const auto& c : lp.constraints()) {
    Rational lhs;
    for (const auto& t : c.terms) lhs += t.coefficient * x[t.variable];
    if (c.relation == Relation::Equal && lhs != c.rhs) return false;
    if (c.relation == Relation::LessEqual && lhs > c.rhs) return false;
    if (c.relation == Relation::GreaterEqual && lhs < c.rhs) return false;
  }
  for (std::size_t j = 0; j < x.size(); ++j) {
    const auto& v = lp.variables()[j];
    if (v.lower && x[j] < *v.lower) return false;
    if (v.upper && x[j] > *v.upper) return false;
  }
  return true;
}

TEST(Solve, LowerBoundRow) {
  LinearProgram lp;
  const auto x = lp.add_variable("x");
  lp.add_objective(x, Rational(1));
  lp.add_constraint("low", {{x, Rational(1)}}, Relation::GreaterEqual, Rational(3));
  for (const auto& options : {SolveOptions{}, kFloat}) {
    const auto s = solve(lp, options);
    ASSERT_TRUE(s.optimal());
    EXPECT_EQ(s.objective, 3);
    EXPECT_EQ(s.values[x], 3);
  }
}

TEST(Solve, DetectsInfeasibility) {
  LinearProgram lp;
  const auto x = lp.add_nonnegative("x");
  lp.add_constraint("neg", {{x, Rational(1)}}, Relation::LessEqual, Rational(-1));
  EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
  EXPECT_EQ(solve(lp, kFloat).status, LpStatus::Infeasible);
}

TEST(Solve, DetectsUnboundedness) {
  LinearProgram lp(Sense::Maximize);
  const auto x = lp.add_nonnegative("x");
  const auto y = lp.add_nonnegative("y");
  lp.add_objective(x, Rational(1));
  lp.add_constraint("diff", {{x, Rational(1)}, {y, Rational(-1)}}, Relation::LessEqual,
                    Rational(1));
  EXPECT_EQ(solve(lp).status, LpStatus::Unbounded);
  EXPECT_EQ(solve(lp, kFloat).status, LpStatus::Unbounded);
}

TEST(Solve, HandlesBoundsOfEveryKind) {
  LinearProgram lp(Sense::Maximize);
  const auto a = lp.add_variable("a", Rational(-2), Rational(5));
  const auto b = lp.add_variable("b", std::nullopt, Rational(-1));
  const auto c = lp.add_variable("c");
  lp.add_objective(a, Rational(1));
  lp.add_objective(b, Rational(2));
  lp.add_objective(c, Rational(-1));
  lp.add_constraint("c_low", {{c, Rational(1)}}, Relation::GreaterEqual, Rational(-7, 2));
  const auto s = solve(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_EQ(s.values[a], 5);
  EXPECT_EQ(s.values[b], -1);
  EXPECT_EQ(s.values[c], Rational(-7, 2));
  EXPECT_EQ(s.objective, Rational(13, 2));
}

TEST(Solve, RedundantEqualitiesAndEmptyRows) {
  LinearProgram lp;
  const auto x = lp.add_nonnegative("x");
  const auto y = lp.add_nonnegative("y");
  lp.add_objective(x, Rational(1));
  lp.add_objective(y, Rational(2));
  lp.add_constraint("sum", {{x, Rational(1)}, {y, Rational(1)}}, Relation::Equal, Rational(1));
  lp.add_constraint("sum2", {{x, Rational(2)}, {y, Rational(2)}}, Relation::Equal, Rational(2));
  lp.add_constraint("empty", {}, Relation::Equal, Rational(0));
  const auto s = solve(lp);
  ASSERT_TRUE(s.optimal());
  EXPECT_EQ(s.objective, 1);

  lp.add_constraint("bad", {}, Relation::Equal, Rational(1));
  EXPECT_EQ(solve(lp).status, LpStatus::Infeasible);
}

TEST(Solve, RejectsMalformedPrograms) {
  LinearProgram lp;
  lp.add_variable("x");
  EXPECT_THROW(lp.add_variable("x"), LpError);
  EXPECT_THROW(lp.add_variable(""), LpError);
  EXPECT_THROW(lp.add_variable("y", Rational(1), Rational(0)), LpError);
  EXPECT_THROW(lp.add_constraint("r", {{7, Rational(1)}}, Relation::Equal, Rational(0)), LpError);
  EXPECT_THROW(lp.add_objective(3, Rational(1)), LpError);
}

// Box programs have the closed-form optimum sum_j min(0, c_j) * u_j.
TEST(Solve, RandomBoxProgramsMatchClosedForm) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    LinearProgram lp;
    Rational expected;
    for (int j = 0; j < 6; ++j) {
      const Rational c(testing::draw(rng, -5, 5));
      const Rational u(testing::draw(rng, 1, 4));
      const auto x = lp.add_nonnegative("x" + std::to_string(j));
      lp.add_objective(x, c);
      lp.add_constraint("u" + std::to_string(j), {{x, Rational(1)}}, Relation::LessEqual, u);
      if (c < 0) expected += c * u;
    }
    const auto s = solve(lp);
    ASSERT_TRUE(s.optimal());
    EXPECT_EQ(s.objective, expected);
  }
}

// Dense random programs: the optimum is feasible, bounded below by any dual
// feasible point we can build, and float mode agrees.
TEST(Solve, RandomProgramsWeakDualityAndAgreement) {
  std::mt19937_64 rng(32);
  int solved = 0;
  for (int trial = 0; trial < 60; ++trial) {
    // min c.x  s.t.  A x >= b, x >= 0 with c >= 0 keeps the program bounded.
    const int m = static_cast<int>(testing::draw(rng, 1, 4));
    const int n = static_cast<int>(testing::draw(rng, 1, 5));
    LinearProgram lp;
    std::vector<std::size_t> x;
    std::vector<Rational> c;
    for (int j = 0; j < n; ++j) {
      x.push_back(lp.add_nonnegative("x" + std::to_string(j)));
      c.emplace_back(testing::draw(rng, 0, 6));
      lp.add_objective(x.back(), c.back());
    }
    std::vector<std::vector<Rational>> a(static_cast<std::size_t>(m));
    std::vector<Rational> b;
    for (int i = 0; i < m; ++i) {
      std::vector<LpTerm> terms;
      for (int j = 0; j < n; ++j) {
        a[static_cast<std::size_t>(i)].emplace_back(testing::draw(rng, -2, 4));
        terms.push_back({x[static_cast<std::size_t>(j)], a[static_cast<std::size_t>(i)].back()});
      }
      b.emplace_back(testing::draw(rng, -3, 5));
      lp.add_constraint("r" + std::to_string(i), terms, Relation::GreaterEqual, b.back());
    }
    const auto exact = solve(lp);
    const auto approx = solve(lp, kFloat);
    ASSERT_EQ(exact.status, approx.status);
    if (!exact.optimal()) continue;
    ++solved;
    EXPECT_TRUE(satisfied(lp, exact.values));
    EXPECT_LT(std::abs(to_double(exact.objective) - to_double(approx.objective)), 1e-6);

    // y = t * e_i is dual feasible when t * a_i <= c componentwise.
    for (int i = 0; i < m; ++i) {
      std::optional<Rational> t;
      for (int j = 0; j < n; ++j) {
        const auto& aij = a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        if (aij > 0) {
          const Rational cap = c[static_cast<std::size_t>(j)] / aij;
          if (!t || cap < *t) t = cap;
        }
      }
      if (!t) continue;
      EXPECT_LE(*t * b[static_cast<std::size_t>(i)], exact.objective);
    }
  }
  EXPECT_GT(solved, 20);
}

TEST(Solve, Deterministic) {
  LinearProgram lp;
  std::vector<std::size_t> x;
  for (int j = 0; j < 4; ++j) x.push_back(lp.add_nonnegative("x" + std::to_string(j)));
  lp.add_constraint("sum", {{x[0], Rational(1)}, {x[1], Rational(1)}, {x[2], Rational(1)},
                            {x[3], Rational(1)}},
                    Relation::Equal, Rational(1));
  const auto first = solve(lp);
  const auto second = solve(lp);
  EXPECT_EQ(first.values, second.values);
  EXPECT_EQ(first.iterations, second.iterations);
}

TEST(WriteLp, ProducesReadableText) {
  LinearProgram lp(Sense::Maximize);
  const auto x = lp.add_variable("x", Rational(0), Rational(1, 4));
  const auto y = lp.add_variable("y");
  lp.add_objective(x, Rational(3));
  lp.add_objective(y, Rational(-1, 3));
  lp.add_constraint("row", {{x, Rational(1)}, {y, Rational(-2)}}, Relation::LessEqual,
                    Rational(5));
  std::ostringstream out;
  write_lp(lp, out);
  const auto text = out.str();
  EXPECT_NE(text.find("Maximize"), std::string::npos);
  EXPECT_NE(text.find("row: + 1 x - 2 y <= 5"), std::string::npos);
  EXPECT_NE(text.find("0 <= x <= 0.25"), std::string::npos);
  EXPECT_NE(text.find("y free"), std::string::npos);
  EXPECT_NE(text.find("0.33333333333333331 y"), std::string::npos);
}

}  // namespace
}  // namespace deltamap
