#include "flexsat/runtime/trace.hpp"

#include <fmt/format.h>

namespace flexsat::runtime {

std::string format_time_ms(std::int64_t time_us) {
  return fmt::format("{}.{:03d}", time_us / 1000, static_cast<int>(time_us % 1000));
}

void Trace::log(std::int64_t time_us, int pe, std::string_view kind, std::int64_t job, std::string_view detail) {
  std::string line = fmt::format("{} {} {} ", format_time_ms(time_us), pe, kind);
  if (job < 0)
    line += '-';
  else
    line += std::to_string(job);
  if (!detail.empty()) {
    line += ' ';
    line += detail;
  }
  std::lock_guard lock(mutex_);
  if (mirror_) *mirror_ << line << '\n';
  lines_.push_back(std::move(line));
}

std::vector<std::string> Trace::lines() const {
  std::lock_guard lock(mutex_);
  return lines_;
}

std::string Trace::text() const {
  std::lock_guard lock(mutex_);
  std::string out;
  for (const auto& l : lines_) {
    out += l;
    out += '\n';
  }
  return out;
}

}  // namespace flexsat::runtime
