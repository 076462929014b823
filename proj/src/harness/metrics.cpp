#include "flexsat/harness/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace flexsat::harness {

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of nothing");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2;
}

double par2(std::span<const RunTime> runs, double limit) {
  if (runs.empty()) return 0;
  double sum = 0;
  for (const auto& r : runs) {
    if (r.solved && r.time > limit) throw std::invalid_argument("solved time above the limit");
    sum += r.solved ? r.time : 2 * limit;
  }
  return sum / static_cast<double>(runs.size());
}

Speedups speedups(std::span<const RunTime> seq, double seq_limit, std::span<const RunTime> par,
                  std::optional<double> hard_threshold) {
  if (seq.size() != par.size()) throw std::invalid_argument("instance sets differ in size");
  std::vector<double> ratios;
  double seq_sum = 0, par_sum = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (!par[i].solved) continue;
    const double s = seq[i].solved ? seq[i].time : seq_limit;
    if (hard_threshold && s < *hard_threshold) continue;
    if (!(par[i].time > 0)) throw std::invalid_argument("parallel time must be positive");
    ratios.push_back(s / par[i].time);
    seq_sum += s;
    par_sum += par[i].time;
  }
  Speedups out;
  out.instances = ratios.size();
  if (ratios.empty()) return out;
  out.median = median(ratios);
  out.total = seq_sum / par_sum;
  return out;
}

HosSchedule hos_baseline(std::span<const std::optional<double>> times, double limit) {
  HosSchedule h;
  h.response.assign(times.size(), limit);
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i]) {
      if (*times[i] < 0) throw std::invalid_argument("negative runtime");
      h.order.push_back(i);
    }
  std::stable_sort(h.order.begin(), h.order.end(), [&](std::size_t a, std::size_t b) { return *times[a] < *times[b]; });
  double clock = 0, solved_sum = 0;
  for (std::size_t i : h.order) {
    clock += *times[i];
    h.response[i] = clock;
    solved_sum += clock;
  }
  if (!times.empty())
    h.r_all = std::accumulate(h.response.begin(), h.response.end(), 0.0) / static_cast<double>(times.size());
  if (!h.order.empty()) h.r_slv = solved_sum / static_cast<double>(h.order.size());
  return h;
}

double over_transfer(std::size_t starts, std::size_t sum_max_volume) {
  if (sum_max_volume == 0) throw std::invalid_argument("no job volume recorded");
  return static_cast<double>(starts) / static_cast<double>(sum_max_volume);
}

}  // namespace flexsat::harness
