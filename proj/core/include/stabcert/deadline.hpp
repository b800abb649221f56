#pragma once

#include <chrono>
#include <optional>

namespace stabcert {

// Cooperative per-thread deadline. Long-running kernels (LU elimination,
// QR sweeps, simplex pivots) call check_deadline() in their outer loops and
// throw Timeout once the installed deadline has passed.
class ScopedDeadline {
 public:
  using Clock = std::chrono::steady_clock;

  explicit ScopedDeadline(std::chrono::duration<double> budget);
  ~ScopedDeadline();
  ScopedDeadline(const ScopedDeadline&) = delete;
  ScopedDeadline& operator=(const ScopedDeadline&) = delete;

 private:
  std::optional<Clock::time_point> saved_;
};

void check_deadline();

}  // namespace stabcert
