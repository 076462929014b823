#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "flexsat/formula/cnf.hpp"
#include "oracles.hpp"

using namespace flexsat;

TEST(Dimacs, ParsesSimpleFormula) {
  const auto cnf = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n");
  ASSERT_EQ(cnf.num_vars(), 2);
  ASSERT_EQ(cnf.num_clauses(), 2u);
  EXPECT_EQ(std::vector<Lit>(cnf.clauses()[0].begin(), cnf.clauses()[0].end()), (std::vector<Lit>{1, -2}));
  EXPECT_EQ(std::vector<Lit>(cnf.clauses()[1].begin(), cnf.clauses()[1].end()), (std::vector<Lit>{2}));
  EXPECT_EQ(cnf.serialized_size(), 5u);
}

TEST(Dimacs, DropsTautology) {
  const auto cnf = parse_dimacs("p cnf 1 1\n1 -1 0\n");
  EXPECT_EQ(cnf.num_clauses(), 0u);
  EXPECT_EQ(cnf.serialized_size(), 0u);
}

TEST(Dimacs, RejectsOutOfRange) {
  try {
    parse_dimacs("p cnf 3 1\n4 0\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_NE(std::string(e.what()).find("literal out of range"), std::string::npos);
  }
}

TEST(Dimacs, ErrorsCarryLineNumbers) {
  EXPECT_THROW(parse_dimacs(""), ParseError);
  EXPECT_THROW(parse_dimacs("c only a comment\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf x 1\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 2\n"), ParseError);
  EXPECT_THROW(parse_dimacs("1 0\np cnf 1 1\n"), ParseError);
  EXPECT_THROW(parse_dimacs("p cnf 2 1\n1 q 0\n"), ParseError);
}

TEST(Dimacs, CommentsAndDuplicateLiterals) {
  const auto cnf = parse_dimacs("c hello\np cnf 3 5\n3 1 3 0\nc between\n-2\n 1 0\n");
  ASSERT_EQ(cnf.num_clauses(), 2u);  // header count is advisory
  EXPECT_EQ(std::vector<Lit>(cnf.clauses()[0].begin(), cnf.clauses()[0].end()), (std::vector<Lit>{1, 3}));
  EXPECT_EQ(std::vector<Lit>(cnf.clauses()[1].begin(), cnf.clauses()[1].end()), (std::vector<Lit>{1, -2}));
}

TEST(Dimacs, RoundTripRandom) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto cnf = oracle::random_kcnf(30, 50 + static_cast<int>(seed % 40), 1 + static_cast<int>(seed % 5), seed);
    EXPECT_EQ(parse_dimacs(to_dimacs(cnf)), cnf) << "seed " << seed;
  }
}

TEST(Clause, CanonicalOrder) {
  const auto c = Clause::make({3, -1, 2, -2 + 4});
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(std::vector<Lit>(c->begin(), c->end()), (std::vector<Lit>{-1, 2, 3}));
  EXPECT_FALSE(Clause::make({5, -5}).has_value());
  EXPECT_THROW(Clause::make({}), FormulaError);
  EXPECT_THROW(Clause::make({1, 0}), FormulaError);
  EXPECT_EQ(*Clause::make({1, -2}), *Clause::make({-2, 1}));
  EXPECT_TRUE(lit_less(-3, 3));
  EXPECT_TRUE(lit_less(3, -4));
}

TEST(CheckModel, Examples) {
  const auto cnf = parse_dimacs("p cnf 2 2\n1 -2 0\n2 0\n");
  Assignment a(2);
  a.set(1, true);
  a.set(2, true);
  EXPECT_TRUE(check_model(cnf, a));

  const auto unit = parse_dimacs("p cnf 1 1\n1 0\n");
  Assignment f(1);
  f.set(1, false);
  EXPECT_FALSE(check_model(unit, f));

  EXPECT_TRUE(check_model(Cnf(0), Assignment(0)));
}

TEST(CheckModel, UnassignedThrows) {
  const auto cnf = parse_dimacs("p cnf 2 1\n1 2 0\n");
  Assignment a(2);
  a.set(1, true);
  EXPECT_THROW(check_model(cnf, a), FormulaError);
}

TEST(CheckModel, BruteForceOracleModelsVerify) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto cnf = oracle::random_kcnf(12, 50, 3, seed);
    if (auto m = oracle::brute_force(cnf)) EXPECT_TRUE(check_model(cnf, *m));
  }
}
