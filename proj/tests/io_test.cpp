#include <gtest/gtest.h>

#include <random>

#include "deltamap/errors.hpp"
#include "deltamap/io.hpp"
#include "support.hpp"

namespace deltamap {
namespace {

using testing::ints;

std::string data(const std::string& name) {
  return read_file(std::string(DELTAMAP_TEST_DATA) + "/" + name);
}

// Line of the ParseError thrown for `text`, or 0 if it parsed.
std::size_t native_error_line(const std::string& text) {
  try {
    parse_native(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

TEST(Native, ParsesDataFile) { EXPECT_EQ(parse_native(data("m1.dm")), testing::m1()); }

TEST(Native, RoundTrips) {
  const auto m1 = testing::m1();
  EXPECT_EQ(parse_native(serialize_native(m1)), m1);

  const Model third(2, 2, {FactorTable(Hypersite{1}, {Rational(1, 3), Rational(-5, 7)})});
  const auto text = serialize_native(third);
  EXPECT_NE(text.find("1/3 -5/7"), std::string::npos);
  EXPECT_EQ(parse_native(text), third);

  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 1, 5));
    const auto m = testing::random_model(n, 3, testing::random_hypersite_set(n, 4, 3, rng), rng, -9, 9);
    EXPECT_EQ(serialize_native(parse_native(serialize_native(m))), serialize_native(m));
  }
}

TEST(Native, AcceptsDecimalsAndComments) {
  const auto m = parse_native(
      "deltamap-model 1  # header\nsites 1\nlabels 2\nfactor 1\n0.25 -1.5e1\nend\n");
  EXPECT_EQ(testing::values_of(m.factors().front()), (std::vector<Rational>{Rational(1, 4), Rational(-15)}));
}

TEST(Native, DocumentsWithSolutions) {
  NativeDocument doc{testing::m1(), {}};
  SolutionSection s;
  s.name = "delta";
  s.meta = {{"relaxation", "pseudo"}, {"note", "two words"}};
  s.value = Rational(-2);
  s.assignment = Assignment{0, 1, 0};
  s.marginals[Hypersite{1, 2}] = {Rational(1, 2), Rational(-1, 2), Rational(-1, 2),
                                  Rational(1, 2)};
  doc.solutions.push_back(s);
  const auto text = serialize_native(doc);
  const auto back = parse_native_document(text);
  EXPECT_EQ(back, doc);
  ASSERT_NE(back.find_solution("delta"), nullptr);
  EXPECT_EQ(back.find_solution("delta")->find_meta("note"), "two words");
  EXPECT_EQ(back.find_solution("min"), nullptr);
  EXPECT_EQ(serialize_native(back), text);
}

TEST(Native, ReportsErrorPositions) {
  EXPECT_EQ(native_error_line("deltamap-model 2\n"), 1u);
  EXPECT_EQ(native_error_line("deltamap-model 1\nsites 2\nlabels 2\nfactor 1 3\n0 1\nend\n"), 4u);
  EXPECT_EQ(native_error_line("deltamap-model 1\nsites 2\nlabels 2\nfactor 1\n0 x\nend\n"), 5u);
  EXPECT_EQ(native_error_line("deltamap-model 1\nsites 2\nlabels 2\nfactor 1\n0 1 2\nend\n"), 5u);
  EXPECT_EQ(native_error_line("deltamap-model 1\nsites 2\nlabels 1\n"), 3u);
  EXPECT_NE(native_error_line("deltamap-model 1\nsites 2\nlabels 2\nfactor 1\n0\n"), 0u);
  // An assignment label outside 0..L-1.
  EXPECT_NE(native_error_line("deltamap-model 1\nsites 1\nlabels 2\nfactor 1\n0 1\nend\n"
                              "solution x\nassignment 2\nend\n"),
            0u);
}

TEST(Uai, ReindexesTables) {
  const auto m = parse_uai(
      "MARKOV\n2\n2 2\n1\n2 0 1\n4\n0 1 2 3\n");
  ASSERT_EQ(m.factors().size(), 1u);
  EXPECT_EQ(testing::values_of(m.factors().front()), ints({0, 2, 1, 3}));

  // Listing the variables in reverse order makes the file order little-endian.
  EXPECT_EQ(testing::values_of(parse_uai(data("asym.uai")).factors().front()), ints({0, 1, 2, 3}));
  EXPECT_EQ(parse_uai(data("m1.uai")), testing::m1());
}

TEST(Uai, SingleVariable) {
  const auto m = parse_uai("MARKOV\n1\n3\n1\n1 0\n3\n2 0 5\n");
  EXPECT_EQ(m.num_sites(), 1);
  EXPECT_EQ(m.num_labels(), 3);
  EXPECT_EQ(testing::values_of(m.factors().front()), ints({2, 0, 5}));
}

TEST(Uai, RoundTripsThroughSerializer) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(testing::draw(rng, 1, 5));
    const auto m = testing::random_model(n, 2, testing::random_hypersite_set(n, 4, 3, rng), rng);
    EXPECT_EQ(parse_uai(serialize_uai(m)), m);
  }
}

TEST(Uai, NegLog) {
  const auto m = parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n1 0.5\n", UaiOptions{true});
  EXPECT_EQ(m.factors().front()[0], 0);
  EXPECT_NEAR(to_double(m.factors().front()[1]), std::log(2.0), 1e-12);
  EXPECT_THROW(parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n1 0\n", UaiOptions{true}), ParseError);
}

TEST(Uai, RejectsMalformedInput) {
  EXPECT_THROW(parse_uai("BAYES\n1\n2\n1\n1 0\n2\n1 1\n"), ParseError);
  EXPECT_THROW(parse_uai("MARKOV\n2\n2 3\n1\n1 0\n2\n1 1\n"), ParseError);
  EXPECT_THROW(parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n1 x\n"), ParseError);
  EXPECT_THROW(parse_uai("MARKOV\n1\n2\n1\n1 0\n3\n1 1 1\n"), ParseError);
  EXPECT_THROW(parse_uai("MARKOV\n2\n2 2\n1\n2 0 0\n4\n1 1 1 1\n"), ParseError);
  EXPECT_THROW(parse_uai("MARKOV\n1\n2\n1\n1 4\n2\n1 1\n"), ParseError);
  EXPECT_THROW(parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n1 1\n7\n"), ParseError);
  try {
    parse_uai("MARKOV\n2\n2 2\n2\n1 0\n1 1\n2\n1 1\n2\n1\n");
    FAIL() << "truncated table accepted";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("factor 1"), std::string::npos) << e.what();
    EXPECT_EQ(e.line(), 10u);
  }
}

TEST(ReadFile, MissingFile) { EXPECT_THROW(read_file("/nonexistent/model.dm"), Error); }

}  // namespace
}  // namespace deltamap
