#include "stabcert/memory.hpp"

#include <algorithm>

namespace stabcert::memory {

Counters& thread_counters() noexcept {
  thread_local Counters counters;
  return counters;
}

void note_allocate(std::size_t bytes) noexcept {
  Counters& c = thread_counters();
  c.current += bytes;
  c.peak = std::max(c.peak, c.current);
}

void note_deallocate(std::size_t bytes) noexcept {
  Counters& c = thread_counters();
  c.current = bytes > c.current ? 0 : c.current - bytes;
}

PeakScope::PeakScope() noexcept
    : base_(thread_counters().current), saved_peak_(thread_counters().peak) {
  thread_counters().peak = base_;
}

PeakScope::~PeakScope() {
  Counters& c = thread_counters();
  c.peak = std::max(saved_peak_, c.peak);
}

std::size_t PeakScope::peak_bytes() const noexcept {
  const Counters& c = thread_counters();
  return c.peak > base_ ? c.peak - base_ : 0;
}

}  // namespace stabcert::memory
