#pragma once

#include <cstdint>
#include <mutex>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace flexsat::runtime {

/// Event log, one line per event: `<time_ms> <pe> <KIND> <job> <detail>`.
/// A job of -1 is written as "-". Thread safe.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::ostream* mirror) : mirror_(mirror) {}

  void log(std::int64_t time_us, int pe, std::string_view kind, std::int64_t job, std::string_view detail);

  std::vector<std::string> lines() const;
  std::string text() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> lines_;
  std::ostream* mirror_ = nullptr;
};

std::string format_time_ms(std::int64_t time_us);

}  // namespace flexsat::runtime
