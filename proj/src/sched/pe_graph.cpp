#include "flexsat/sched/pe_graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flexsat::sched {

PeGraph::PeGraph(std::vector<int> pes, int degree, std::uint64_t seed) : pes_(std::move(pes)) {
  const int n = static_cast<int>(pes_.size());
  degree_ = std::clamp(degree, 0, std::max(0, n - 1));
  adj_.assign(static_cast<std::size_t>(n), {});
  int max_id = 0;
  for (int pe : pes_) max_id = std::max(max_id, pe);
  position_.assign(static_cast<std::size_t>(max_id) + 1, -1);
  for (int i = 0; i < n; ++i) position_[static_cast<std::size_t>(pes_[static_cast<std::size_t>(i)])] = i;

  std::mt19937_64 rng(seed);
  auto bad = [&](int from, int to) {
    if (from == to) return true;
    const auto& a = adj_[static_cast<std::size_t>(from)];
    return std::find(a.begin(), a.end(), to) != a.end();
  };
  for (int round = 0; round < degree_; ++round) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int attempt = 0;; ++attempt) {
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      // redraw conflicting targets by swapping with random positions
      bool ok = true;
      for (int i = 0; i < n; ++i) {
        int tries = 0;
        while (bad(i, perm[static_cast<std::size_t>(i)])) {
          const auto j = static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(n));
          if (!bad(static_cast<int>(j), perm[static_cast<std::size_t>(i)]) && !bad(i, perm[j]))
            std::swap(perm[static_cast<std::size_t>(i)], perm[j]);
          if (++tries > 64 * n) {
            ok = false;
            break;
          }
        }
        if (!ok) break;
      }
      if (ok) break;
      if (attempt > 100) throw std::runtime_error("could not build PE graph");
    }
    for (int i = 0; i < n; ++i) adj_[static_cast<std::size_t>(i)].push_back(perm[static_cast<std::size_t>(i)]);
  }
  // translate positions to PE ids
  for (auto& a : adj_)
    for (auto& x : a) x = pes_[static_cast<std::size_t>(x)];
}

const std::vector<int>& PeGraph::neighbors(int pe) const {
  if (pe < 0 || static_cast<std::size_t>(pe) >= position_.size() || position_[static_cast<std::size_t>(pe)] < 0)
    throw std::out_of_range("PE not in graph");
  return adj_[static_cast<std::size_t>(position_[static_cast<std::size_t>(pe)])];
}

int PeGraph::random_neighbor(int pe, std::mt19937_64& rng) const {
  const auto& a = neighbors(pe);
  if (a.empty()) return pe;
  return a[rng() % a.size()];
}

}  // namespace flexsat::sched
