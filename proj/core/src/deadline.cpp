#include "stabcert/deadline.hpp"

#include "stabcert/error.hpp"

namespace stabcert {

namespace {

std::optional<ScopedDeadline::Clock::time_point>& current_deadline() noexcept {
  thread_local std::optional<ScopedDeadline::Clock::time_point> deadline;
  return deadline;
}

}  // namespace

ScopedDeadline::ScopedDeadline(std::chrono::duration<double> budget) : saved_(current_deadline()) {
  auto until = Clock::now() + std::chrono::duration_cast<Clock::duration>(budget);
  if (saved_ && *saved_ < until) until = *saved_;
  current_deadline() = until;
}

ScopedDeadline::~ScopedDeadline() { current_deadline() = saved_; }

void check_deadline() {
  const auto& d = current_deadline();
  if (d && ScopedDeadline::Clock::now() > *d) throw Timeout("deadline exceeded");
}

}  // namespace stabcert
