#include "oracles.hpp"

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <algorithm>
#include <stdexcept>

namespace flexsat::oracle {

namespace {

// Truth table of variable v (0-based) across the 64 assignments sharing the
// upper bits `block`: low 6 variables vary inside the word.
std::uint64_t column(int v, std::uint64_t block) {
  static constexpr std::uint64_t kPatterns[6] = {
      0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL, 0xF0F0F0F0F0F0F0F0ULL,
      0xFF00FF00FF00FF00ULL, 0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  if (v < 6) return kPatterns[v];
  return ((block >> (v - 6)) & 1u) ? ~0ULL : 0ULL;
}

}  // namespace

std::optional<Assignment> brute_force(const Cnf& cnf) {
  const int n = cnf.num_vars();
  if (n > 30) throw std::invalid_argument("brute force limited to 30 variables");
  const int high = n > 6 ? n - 6 : 0;
  const std::uint64_t blocks = 1ULL << high;
  const std::uint64_t low_mask = n >= 6 ? ~0ULL : ((1ULL << (1u << n)) - 1);
  for (std::uint64_t block = 0; block < blocks; ++block) {
    std::uint64_t ok = low_mask;
    for (const auto& c : cnf.clauses()) {
      std::uint64_t any = 0;
      for (Lit l : c) {
        const auto col = column(var_of(l) - 1, block);
        any |= l > 0 ? col : ~col;
      }
      ok &= any;
      if (!ok) break;
    }
    if (ok) {
      int bit = 0;
      while (!((ok >> bit) & 1u)) ++bit;
      const std::uint64_t index = (block << 6) | static_cast<std::uint64_t>(bit);
      Assignment a(n);
      for (int v = 1; v <= n; ++v) a.set(v, (index >> (v - 1)) & 1u);
      return a;
    }
  }
  return std::nullopt;
}

Cnf random_kcnf(int num_vars, int num_clauses, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(1, num_vars);
  Cnf cnf(num_vars);
  while (static_cast<int>(cnf.num_clauses()) < num_clauses) {
    std::vector<Lit> lits;
    while (static_cast<int>(lits.size()) < k) {
      const int v = pick(rng);
      if (std::any_of(lits.begin(), lits.end(), [&](Lit l) { return var_of(l) == v; })) continue;
      lits.push_back((rng() & 1u) ? v : -v);
    }
    cnf.add(*Clause::make(std::move(lits)));
  }
  return cnf;
}

namespace {

void add(Cnf& cnf, std::vector<Lit> lits) {
  if (auto c = Clause::make(std::move(lits))) cnf.add(std::move(*c));
}

// n+1 pigeons into n holes
Cnf pigeonhole(int holes) {
  const int pigeons = holes + 1;
  auto x = [&](int p, int h) { return p * holes + h + 1; };
  Cnf cnf(pigeons * holes);
  for (int p = 0; p < pigeons; ++p) {
    std::vector<Lit> c;
    for (int h = 0; h < holes; ++h) c.push_back(x(p, h));
    add(cnf, c);
  }
  for (int h = 0; h < holes; ++h)
    for (int p = 0; p < pigeons; ++p)
      for (int q = p + 1; q < pigeons; ++q) add(cnf, {-x(p, h), -x(q, h)});
  return cnf;
}

// x1 xor ... xor xn = parity, as a chain with auxiliary variables
Cnf parity(int n, bool parity_value, bool contradict) {
  // variables 1..n inputs, n+1..2n-1 running xor
  Cnf cnf(2 * n - 1);
  auto xor3 = [&](Lit a, Lit b, Lit out) {
    add(cnf, {-a, -b, -out});
    add(cnf, {a, b, -out});
    add(cnf, {a, -b, out});
    add(cnf, {-a, b, out});
  };
  Lit acc = 1;
  for (int i = 2; i <= n; ++i) {
    const Lit out = n + i - 1;
    xor3(acc, i, out);
    acc = out;
  }
  add(cnf, {parity_value ? acc : -acc});
  if (contradict) {
    // second chain over the same inputs in reverse order with opposite result
    // would need more variables; instead pin every input so parity is wrong
    const int ones = parity_value ? 0 : 1;
    for (int i = 1; i <= n; ++i) add(cnf, {i <= ones ? i : -i});
  }
  return cnf;
}

// a1 -> a2 -> ... -> an, with both ends pinned
Cnf ladder(int n, bool consistent) {
  Cnf cnf(n);
  for (int i = 1; i < n; ++i) add(cnf, {-i, i + 1});
  add(cnf, {1});
  add(cnf, {consistent ? n : -n});
  return cnf;
}

// every pair of adjacent vertices on an odd/even cycle gets different colors (2 colors)
Cnf cycle_coloring(int n) {
  Cnf cnf(n);
  for (int i = 1; i <= n; ++i) {
    const int j = i % n + 1;
    add(cnf, {i, j});
    add(cnf, {-i, -j});
  }
  return cnf;
}

}  // namespace

std::vector<Cnf> crafted_instances() {
  std::vector<Cnf> out;
  out.push_back(pigeonhole(3));   // 12 vars, unsat
  out.push_back(pigeonhole(4));   // 20 vars, unsat
  out.push_back(parity(8, true, false));
  out.push_back(parity(12, false, false));
  out.push_back(parity(10, true, true));   // unsat
  out.push_back(parity(12, false, true));  // unsat
  out.push_back(ladder(24, true));
  out.push_back(ladder(24, false));        // unsat
  out.push_back(cycle_coloring(24));       // even cycle, sat
  out.push_back(cycle_coloring(23));       // odd cycle, unsat
  out.push_back(random_kcnf(24, 40, 2, 101));
  out.push_back(random_kcnf(24, 24, 2, 102));
  out.push_back(random_kcnf(22, 200, 4, 103));
  out.push_back(random_kcnf(24, 260, 4, 104));
  out.push_back(random_kcnf(24, 104, 3, 105));
  out.push_back(random_kcnf(24, 110, 3, 106));
  out.push_back(random_kcnf(18, 140, 5, 107));
  out.push_back(random_kcnf(16, 30, 1, 108) );
  {
    Cnf c(1);
    add(c, {1});
    add(c, {-1});
    out.push_back(c);
  }
  out.push_back(Cnf(5));  // no clauses
  return out;
}

bool ref_less(const RefClause& a, const RefClause& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto va = std::abs(a[i]), vb = std::abs(b[i]);
    if (va != vb) return va < vb;
    if (a[i] != b[i]) return a[i] < b[i];
  }
  return false;
}

std::vector<RefClause> ref_decode(const std::vector<std::int32_t>& data) {
  std::vector<RefClause> out;
  std::size_t pos = 0;
  for (std::size_t len = 1; pos < data.size(); ++len) {
    const auto count = data.at(pos++);
    if (count < 0) throw std::runtime_error("negative count");
    for (std::int32_t i = 0; i < count; ++i) {
      if (pos + len > data.size()) throw std::runtime_error("truncated");
      out.emplace_back(data.begin() + static_cast<std::ptrdiff_t>(pos),
                       data.begin() + static_cast<std::ptrdiff_t>(pos + len));
      pos += len;
    }
  }
  return out;
}

std::vector<std::int32_t> ref_encode(const std::vector<RefClause>& sorted) {
  std::vector<std::int32_t> out;
  std::size_t i = 0;
  for (std::size_t len = 1; i < sorted.size(); ++len) {
    std::int32_t count = 0;
    std::vector<std::int32_t> body;
    while (i < sorted.size() && sorted[i].size() == len) {
      ++count;
      body.insert(body.end(), sorted[i].begin(), sorted[i].end());
      ++i;
    }
    out.push_back(count);
    out.insert(out.end(), body.begin(), body.end());
  }
  return out;
}

std::vector<std::int32_t> ref_merge(const std::vector<std::vector<std::int32_t>>& inputs, std::size_t limit) {
  std::vector<RefClause> all;
  for (const auto& in : inputs) {
    auto cs = ref_decode(in);
    all.insert(all.end(), cs.begin(), cs.end());
  }
  std::sort(all.begin(), all.end(), ref_less);
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<RefClause> taken;
  for (const auto& c : all) {
    taken.push_back(c);
    if (ref_encode(taken).size() > limit) {
      taken.pop_back();
      break;
    }
  }
  return ref_encode(taken);
}

RefClause random_canonical_clause(std::mt19937_64& rng, int num_vars, int max_len) {
  std::uniform_int_distribution<int> len_dist(1, max_len);
  std::uniform_int_distribution<int> var_dist(1, num_vars);
  const int len = std::min(len_dist(rng), num_vars);
  std::set<int> vars;
  while (static_cast<int>(vars.size()) < len) vars.insert(var_dist(rng));
  RefClause c;
  for (int v : vars) c.push_back((rng() & 1u) ? v : -v);
  return c;
}

// Powers of two give integers that 50 digits represent within rounding
// noise, so values within 1e-40 of an integer are snapped.
long long ref_buffer_limit(int u, int alpha_num, int alpha_den, int beta) {
  using boost::multiprecision::cpp_dec_float_50;
  const cpp_dec_float_50 alpha = cpp_dec_float_50(alpha_num) / alpha_den;
  const cpp_dec_float_50 lg = log(cpp_dec_float_50(u)) / log(cpp_dec_float_50(2));
  const cpp_dec_float_50 value = cpp_dec_float_50(u) * pow(alpha, lg) * beta;
  const cpp_dec_float_50 nearest = round(value);
  if (abs(value - nearest) < cpp_dec_float_50("1e-40")) return nearest.convert_to<long long>();
  return ceil(value).convert_to<long long>();
}

std::vector<double> ideal_shares(const std::vector<std::pair<double, int>>& jobs, int budget) {
  long long total = 0;
  for (const auto& [p, d] : jobs) total += d;
  const double target = std::min<double>(budget, static_cast<double>(total));
  auto share = [](double l, double p, int d) { return std::min<double>(d, std::max(1.0, l * p * d)); };
  auto sum = [&](double l) {
    double s = 0;
    for (const auto& [p, d] : jobs) s += share(l, p, d);
    return s;
  };
  double lo = 0, hi = 1;
  while (sum(hi) < target) hi *= 2;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (sum(mid) < target ? lo : hi) = mid;
  }
  std::vector<double> out;
  for (const auto& [p, d] : jobs) out.push_back(share(hi, p, d));
  return out;
}

}  // namespace flexsat::oracle
