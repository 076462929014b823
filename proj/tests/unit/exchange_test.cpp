#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>
#include <unordered_set>

#include "flexsat/exchange/clause_buffer.hpp"
#include "flexsat/exchange/clause_filter.hpp"
#include "flexsat/exchange/clause_hash.hpp"
#include "oracles.hpp"

using namespace flexsat;
using namespace flexsat::exchange;

namespace {

Clause cl(std::vector<Lit> lits) { return *Clause::make(std::move(lits)); }

std::vector<oracle::RefClause> random_set(std::mt19937_64& rng, int n, int vars, int max_len) {
  std::vector<oracle::RefClause> cs;
  for (int i = 0; i < n; ++i) cs.push_back(oracle::random_canonical_clause(rng, vars, max_len));
  std::sort(cs.begin(), cs.end(), oracle::ref_less);
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  return cs;
}

std::vector<Clause> to_clauses(const std::vector<oracle::RefClause>& cs) {
  std::vector<Clause> out;
  for (const auto& c : cs) out.push_back(Clause::from_canonical(c));
  return out;
}

}  // namespace

TEST(Codec, Examples) {
  EXPECT_TRUE(serialize({}).empty());
  EXPECT_EQ(serialize({cl({5})}).data, (std::vector<std::int32_t>{1, 5}));
  EXPECT_EQ(serialize({cl({3}), cl({-1, 2}), cl({2, 4})}).data, (std::vector<std::int32_t>{1, 3, 2, -1, 2, 2, 4}));
  // empty shorter groups are written as zero counts
  EXPECT_EQ(serialize({cl({1, 2, 3})}).data, (std::vector<std::int32_t>{0, 0, 1, 1, 2, 3}));
  const auto back = deserialize(ClauseBuffer{{1, 3, 2, -1, 2, 2, 4}});
  EXPECT_EQ(back, (std::vector<Clause>{cl({3}), cl({-1, 2}), cl({2, 4})}));
}

TEST(Codec, MalformedInput) {
  EXPECT_THROW(deserialize(ClauseBuffer{{2, 5}}), BufferFormatError);
  EXPECT_THROW(deserialize(ClauseBuffer{{-1}}), BufferFormatError);
  EXPECT_THROW(deserialize(ClauseBuffer{{1, 0}}), BufferFormatError);
  EXPECT_THROW(deserialize(ClauseBuffer{{0, 1, 2, 1}}), BufferFormatError);  // non-canonical
}

TEST(Codec, RoundTripAgainstReferenceEncoder) {
  std::mt19937_64 rng(7);
  for (int iter = 0; iter < 2000; ++iter) {
    const auto set = random_set(rng, static_cast<int>(rng() % 40), 50, 8);
    auto clauses = to_clauses(set);
    std::shuffle(clauses.begin(), clauses.end(), rng);
    const auto buf = serialize(clauses);
    ASSERT_EQ(buf.data, oracle::ref_encode(set));
    ASSERT_EQ(deserialize(buf), to_clauses(set));
  }
}

TEST(BufferLimit, Examples) {
  ExchangeConfig cfg;
  EXPECT_EQ(buffer_limit(1, cfg), 1500);
  EXPECT_EQ(buffer_limit(8, 1.0, 1500), 12000);
  EXPECT_EQ(buffer_limit(16, 0.5, 1500), 1500);
  EXPECT_EQ(buffer_limit(4, 7.0 / 8.0, 1500), 4594);
  EXPECT_EQ(buffer_limit(3, 1.0, 1500), 4500);
}

TEST(BufferLimit, MatchesMultiprecisionOracle) {
  const int nums[] = {4, 5, 6, 7, 8};
  for (int beta : {100, 1500})
    for (int num : nums)
      for (int u = 1; u <= 4096; u += (u < 300 ? 1 : 37))
        ASSERT_EQ(buffer_limit(u, num / 8.0, beta), oracle::ref_buffer_limit(u, num, 8, beta)) << "u=" << u << " alpha=" << num << "/8";
}

TEST(BufferLimit, Monotone) {
  for (double alpha : {0.5, 0.625, 0.75, 0.875, 1.0}) {
    int prev = 0;
    for (int u = 1; u <= 4096; ++u) {
      const int b = buffer_limit(u, alpha, 1500);
      ASSERT_GE(b, prev) << u;
      prev = b;
    }
  }
}

TEST(ExchangeConfig, Validation) {
  ExchangeConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.alpha = 0.4;
  try {
    cfg.validate();
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "alpha out of [0.5,1]");
  }
  cfg = {};
  cfg.beta = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.share_period_s = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Merge, Identity) {
  const auto b = serialize({cl({1}), cl({2, 3})});
  const MergeInput in{b, {1}};
  const auto r = merge(std::span(&in, 1), ClauseBuffer{}, ExchangeConfig{});
  EXPECT_EQ(r.buffer, b);
  EXPECT_EQ(r.meta.u, 2);
}

TEST(Merge, DuplicateAcrossInputsKeptOnce) {
  const auto b = serialize({cl({-1, 2})});
  const MergeInput ins[] = {{b, {1}}, {b, {1}}};
  const auto r = merge(ins, ClauseBuffer{}, ExchangeConfig{});
  EXPECT_EQ(deserialize(r.buffer), (std::vector<Clause>{cl({-1, 2})}));
  EXPECT_EQ(r.duplicates, 1u);
  EXPECT_EQ(r.meta.u, 3);
}

TEST(Merge, TruncatesToShortestWholeClauses) {
  // 40 integers in total; limit 7 fits two units and one binary
  const auto a = serialize({cl({1}), cl({4, 5}), cl({1, 2, 3}), cl({6, 7, 8, 9})});
  const auto b = serialize({cl({-2}), cl({3, 4, 5}), cl({1, 2, 3, 4, 5})});
  const auto c = serialize({cl({5, 6, 7, 8, 9, 10})});
  ASSERT_EQ(a.size() + b.size() + c.size(), 40u);
  const ClauseBuffer* ins[] = {&a, &b, &c};
  const auto r = merge_limited(ins, 4, 7);
  EXPECT_EQ(r.buffer.data, (std::vector<std::int32_t>{2, 1, -2, 1, 4, 5}));
  EXPECT_EQ(deserialize(r.buffer), (std::vector<Clause>{cl({1}), cl({-2}), cl({4, 5})}));
}

TEST(Merge, EqualsBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 1000; ++iter) {
    std::vector<std::vector<std::int32_t>> raw;
    std::vector<ClauseBuffer> bufs;
    for (int k = 0; k < 3; ++k) {
      raw.push_back(oracle::ref_encode(random_set(rng, static_cast<int>(rng() % 30), 12, 6)));
      bufs.push_back(ClauseBuffer{raw.back()});
    }
    const std::size_t limit = rng() % 120;
    const ClauseBuffer* ins[] = {&bufs[0], &bufs[1], &bufs[2]};
    const auto r = merge_limited(ins, 3, limit);
    ASSERT_EQ(r.buffer.data, oracle::ref_merge(raw, limit)) << "iteration " << iter;
    ASSERT_LE(r.buffer.size(), limit);
  }
}

TEST(Merge, AssociativeWithoutTruncation) {
  std::mt19937_64 rng(3);
  ExchangeConfig cfg;
  cfg.beta = 1 << 20;
  for (int iter = 0; iter < 200; ++iter) {
    ClauseBuffer a{oracle::ref_encode(random_set(rng, 20, 10, 5))};
    ClauseBuffer b{oracle::ref_encode(random_set(rng, 20, 10, 5))};
    ClauseBuffer c{oracle::ref_encode(random_set(rng, 20, 10, 5))};
    const MergeInput ab_in[] = {{a, {1}}, {b, {1}}};
    const auto ab = merge(ab_in, ClauseBuffer{}, cfg);
    const MergeInput left_in[] = {{ab.buffer, ab.meta}, {c, {1}}};
    const auto left = merge(left_in, ClauseBuffer{}, cfg);
    const MergeInput bc_in[] = {{b, {1}}, {c, {1}}};
    const auto bc = merge(bc_in, ClauseBuffer{}, cfg);
    const MergeInput right_in[] = {{a, {1}}, {bc.buffer, bc.meta}};
    const auto right = merge(right_in, ClauseBuffer{}, cfg);
    ASSERT_EQ(left.meta.u, right.meta.u);
    ASSERT_EQ(left.buffer, right.buffer);
  }
}

TEST(Merge, RejectsUnsortedInput) {
  const ClauseBuffer bad{{2, 3, 1}};
  const ClauseBuffer* ins[] = {&bad};
  EXPECT_THROW(merge_limited(ins, 2, 100), BufferFormatError);
}

TEST(Hash, Commutative) {
  const std::vector<Lit> a{1, -2, 3}, b{3, 1, -2};
  EXPECT_EQ(commutative_hash(a), commutative_hash(b));
  // fixed algorithm, fixed value
  EXPECT_EQ(commutative_hash(std::vector<Lit>{1}), commutative_hash(std::vector<Lit>{1}));
  EXPECT_NE(commutative_hash(std::vector<Lit>{1, 2}), commutative_hash(std::vector<Lit>{1, 2, 3}));
}

TEST(Hash, CollisionRate) {
  std::mt19937_64 rng(5);
  int collisions = 0;
  constexpr int kPairs = 1'000'000;
  for (int i = 0; i < kPairs; ++i) {
    const auto a = oracle::random_canonical_clause(rng, 1000, 8);
    const auto b = oracle::random_canonical_clause(rng, 1000, 8);
    if (a != b && commutative_hash(a) == commutative_hash(b)) ++collisions;
  }
  EXPECT_LE(collisions, 1);
}

TEST(Filter, SetSemantics) {
  ClauseFilter f(16);
  EXPECT_TRUE(f.register_export(cl({7})));
  EXPECT_FALSE(f.register_export(cl({7})));
  EXPECT_TRUE(f.register_export(cl({-1, 2})));
  EXPECT_FALSE(f.register_export(cl({-1, 2})));
  EXPECT_FALSE(f.check_import(cl({-1, 2})));
  EXPECT_TRUE(f.check_import(cl({-7})));
}

TEST(Filter, BloomFalsePositiveRate) {
  ClauseFilter f;  // default size
  std::mt19937_64 rng(9);
  std::set<oracle::RefClause> seen;
  int rejected_fresh = 0, fresh = 0;
  while (fresh < 10'000) {
    std::vector<Lit> lits;
    while (lits.size() < 3) {
      const Lit v = static_cast<Lit>(rng() % 5000) + 1;
      if (std::find_if(lits.begin(), lits.end(), [&](Lit l) { return var_of(l) == v; }) == lits.end())
        lits.push_back((rng() & 1u) ? v : -v);
    }
    const auto c = cl(lits);
    const oracle::RefClause key(c.begin(), c.end());
    if (!seen.insert(key).second) continue;
    ++fresh;
    if (!f.register_export(c)) ++rejected_fresh;
  }
  EXPECT_LE(rejected_fresh, 100);  // 1%
}

TEST(Filter, UnitsHaveNoFalsePositives) {
  ClauseFilter f(10);  // tiny Bloom part must not matter for units
  std::unordered_set<Lit> oracle;
  std::mt19937_64 rng(13);
  for (int i = 0; i < 100'000; ++i) {
    const Lit l = static_cast<Lit>(rng() % 20000) + 1;
    const Lit lit = (rng() & 1u) ? l : -l;
    const bool fresh = oracle.insert(lit).second;
    ASSERT_EQ(f.register_lits(std::vector<Lit>{lit}), fresh);
  }
}

TEST(Filter, ForgetHalfIsBinomial) {
  ClauseFilter f(12);
  for (Lit l = 1; l <= 10'000; ++l) f.register_lits(std::vector<Lit>{l});
  f.forget_half(42);
  const double mean = 5000, sigma = 50;  // sqrt(10^4 / 4)
  EXPECT_NEAR(static_cast<double>(f.unit_count()), mean, 3 * sigma);
}

TEST(Filter, ForgottenClauseReadmitted) {
  ClauseFilter f(16, 1.0);
  EXPECT_TRUE(f.register_export(cl({1, 2})));
  EXPECT_FALSE(f.register_export(cl({1, 2})));
  f.forget_half(1);  // moves to the older generation
  EXPECT_FALSE(f.register_export(cl({1, 2})));
  f.forget_half(2);
  f.forget_half(3);
  EXPECT_TRUE(f.register_export(cl({1, 2})));

  // units: forget until the coin removes it
  ClauseFilter g(16, 1.0);
  g.register_lits(std::vector<Lit>{9});
  for (std::uint64_t s = 0; g.unit_count() == 1 && s < 64; ++s) g.forget_half(s);
  EXPECT_EQ(g.unit_count(), 0u);
  EXPECT_TRUE(g.register_lits(std::vector<Lit>{9}));
}

TEST(Filter, InfiniteHalfLifeNeverForgets) {
  ClauseFilter f(12);
  f.register_lits(std::vector<Lit>{1});
  for (double t = 0; t < 1e6; t += 1e4) f.maybe_forget(t, 7);
  EXPECT_EQ(f.unit_count(), 1u);
}

TEST(Filter, MaybeForgetFollowsHalfLife) {
  ClauseFilter f(12, 2.0);
  for (Lit l = 1; l <= 1000; ++l) f.register_lits(std::vector<Lit>{l});
  f.maybe_forget(1.5, 1);
  EXPECT_EQ(f.unit_count(), 1000u);
  f.maybe_forget(2.0, 1);
  EXPECT_LT(f.unit_count(), 1000u);
}

TEST(LbdGate, Rules) {
  LbdGate g(true, 2);
  g.update(0.5);
  EXPECT_EQ(g.limit(), 3);
  LbdGate h(true, 2);
  h.update(0.95);
  EXPECT_EQ(h.limit(), 2);
  EXPECT_TRUE(h.admits(1, 50));
  EXPECT_FALSE(h.admits(4, 3));
  LbdGate off(false, 2);
  EXPECT_TRUE(off.admits(10, 99));
}
