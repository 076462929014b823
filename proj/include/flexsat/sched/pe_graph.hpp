#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace flexsat::sched {

/// Sparse out-regular graph over a set of PE ids, built from r seeded
/// random permutations. Self-loops and repeated edges are redrawn, so every
/// vertex has min(r, n-1) distinct out-neighbors (and as many in-neighbors).
class PeGraph {
 public:
  PeGraph() = default;
  PeGraph(std::vector<int> pes, int degree, std::uint64_t seed);

  const std::vector<int>& neighbors(int pe) const;
  const std::vector<int>& vertices() const { return pes_; }
  int degree() const { return degree_; }

  int random_neighbor(int pe, std::mt19937_64& rng) const;

 private:
  std::vector<int> pes_;
  std::vector<std::vector<int>> adj_;  // indexed by position in pes_
  std::vector<int> position_;          // pe id -> position, -1 if absent
  int degree_ = 0;
};

}  // namespace flexsat::sched
