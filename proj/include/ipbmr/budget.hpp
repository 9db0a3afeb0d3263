#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

namespace ipbmr {

/// Flip and wall-clock limits shared by every stage of one run.
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  Budget(std::optional<std::uint64_t> max_flips = std::nullopt, std::optional<double> seconds = std::nullopt)
      : max_flips_(max_flips), start_(Clock::now()) {
    if (seconds) deadline_ = start_ + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*seconds));
  }

  void charge(std::uint64_t flips = 1) { flips_ += flips; }
  std::uint64_t flips() const { return flips_; }

  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  // The clock is sampled on every 64th poll.
  bool exhausted() {
    if (exhausted_) return true;
    if (max_flips_ && flips_ >= *max_flips_) return exhausted_ = true;
    if (deadline_ && (polls_++ & 63) == 0 && Clock::now() >= *deadline_) return exhausted_ = true;
    return false;
  }

 private:
  std::optional<std::uint64_t> max_flips_;
  std::optional<Clock::time_point> deadline_;
  Clock::time_point start_;
  std::uint64_t flips_ = 0;
  std::uint64_t polls_ = 0;
  bool exhausted_ = false;
};

}  // namespace ipbmr
