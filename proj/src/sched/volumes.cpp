#include "flexsat/sched/volumes.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace flexsat::sched {

int VolumeMap::total() const {
  int sum = 0;
  for (const auto& [id, v] : volumes) sum += v;
  return sum;
}

int volume_budget(int num_pes, double epsilon, int num_clients) {
  const int workers = num_pes - num_clients;
  if (workers < 1) return 0;
  const int b = static_cast<int>(std::floor((1.0 - epsilon) * workers + 1e-9));
  return std::max(1, b);
}

bool tie_before(const JobDemand& a, const JobDemand& b) {
  if (a.priority != b.priority) return a.priority > b.priority;
  if (a.arrival != b.arrival) return a.arrival < b.arrival;
  return a.id < b.id;
}

std::vector<double> water_fill(std::span<const JobDemand> jobs, int budget) {
  const std::size_t n = jobs.size();
  std::vector<double> share(n);
  if (n == 0) return share;
  if (static_cast<std::size_t>(budget) < n) throw std::invalid_argument("budget below job count");

  long long total_demand = 0;
  for (const auto& j : jobs) total_demand += j.demand;
  if (total_demand <= budget) {
    for (std::size_t i = 0; i < n; ++i) share[i] = jobs[i].demand;
    return share;
  }
  const double target = budget;

  // sum_j clamp(lambda*w_j, 1, d_j) is piecewise linear and nondecreasing in
  // lambda; its kinks sit at 1/w_j and d_j/w_j.
  auto weight = [&](std::size_t i) { return jobs[i].priority * jobs[i].demand; };
  auto at = [&](double lambda) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += std::clamp(lambda * weight(i), 1.0, static_cast<double>(jobs[i].demand));
    return s;
  };
  std::vector<double> kinks;
  kinks.reserve(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    kinks.push_back(1.0 / weight(i));
    kinks.push_back(jobs[i].demand / weight(i));
  }
  std::sort(kinks.begin(), kinks.end());

  // at(kinks.front()) = n <= target < total_demand = at(kinks.back())
  std::size_t hi = 0;
  while (hi < kinks.size() && at(kinks[hi]) < target) ++hi;
  double lambda = kinks[std::min(hi, kinks.size() - 1)];
  if (hi > 0 && hi < kinks.size()) {
    // linear between kinks[hi-1] and kinks[hi]: slope = sum of w over unclamped jobs
    const double lo_l = kinks[hi - 1];
    const double mid = 0.5 * (lo_l + kinks[hi]);
    double slope = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = mid * weight(i);
      if (x > 1.0 && x < jobs[i].demand) slope += weight(i);
    }
    if (slope > 0) lambda = lo_l + (target - at(lo_l)) / slope;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::clamp(lambda * weight(i), 1.0, static_cast<double>(jobs[i].demand));
    // absorb rounding noise so that exact integers stay exact
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9) x = r;
    share[i] = x;
  }
  return share;
}

VolumeMap compute_volumes(std::span<const JobDemand> jobs_in, int budget) {
  VolumeMap out;
  std::vector<JobDemand> jobs(jobs_in.begin(), jobs_in.end());
  std::sort(jobs.begin(), jobs.end(), tie_before);
  if (budget <= 0) {
    for (const auto& j : jobs) {
      out.volumes[j.id] = 0;
      out.waiting.push_back(j.id);
    }
    return out;
  }
  if (jobs.size() > static_cast<std::size_t>(budget)) {
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      const bool admitted = i < static_cast<std::size_t>(budget);
      out.volumes[jobs[i].id] = admitted ? 1 : 0;
      if (!admitted) out.waiting.push_back(jobs[i].id);
    }
    return out;
  }

  const auto share = water_fill(jobs, budget);
  const double total = std::accumulate(share.begin(), share.end(), 0.0);
  const int target = static_cast<int>(std::llround(total));

  std::vector<int> v(jobs.size());
  int assigned = 0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    v[i] = static_cast<int>(std::floor(share[i]));
    assigned += v[i];
  }
  // largest remainder; the stable sort keeps tie order among equal remainders
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return share[a] - v[a] > share[b] - v[b]; });
  for (std::size_t k = 0; k < order.size() && assigned < target; ++k) {
    const auto i = order[k];
    if (v[i] < jobs[i].demand) {
      ++v[i];
      ++assigned;
    }
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) out.volumes[jobs[i].id] = v[i];
  return out;
}

std::uint64_t digest(const VolumeMap& map) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& [id, v] : map.volumes) {
    mix(static_cast<std::uint64_t>(id));
    mix(static_cast<std::uint64_t>(v));
  }
  return h;
}

}  // namespace flexsat::sched
