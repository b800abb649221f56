#pragma once

#include <cstddef>
#include <limits>
#include <new>

namespace stabcert::memory {

// Per-thread byte counters fed by TrackedAllocator. Only matrix and tableau
// storage is tracked, so the figures describe the algorithms' working sets
// rather than the process footprint.
struct Counters {
  std::size_t current = 0;
  std::size_t peak = 0;
};

Counters& thread_counters() noexcept;

void note_allocate(std::size_t bytes) noexcept;
void note_deallocate(std::size_t bytes) noexcept;

// Measures the peak number of tracked bytes live at any point inside the
// scope, above the level at scope entry. Scopes nest.
class PeakScope {
 public:
  PeakScope() noexcept;
  ~PeakScope();
  PeakScope(const PeakScope&) = delete;
  PeakScope& operator=(const PeakScope&) = delete;

  std::size_t peak_bytes() const noexcept;

 private:
  std::size_t base_;
  std::size_t saved_peak_;
};

template <class T>
struct TrackedAllocator {
  using value_type = T;

  TrackedAllocator() noexcept = default;
  template <class U>
  TrackedAllocator(const TrackedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    if (n > std::numeric_limits<std::size_t>::max() / sizeof(T)) throw std::bad_array_new_length();
    T* p = static_cast<T*>(::operator new(n * sizeof(T)));
    note_allocate(n * sizeof(T));
    return p;
  }
  void deallocate(T* p, std::size_t n) noexcept {
    note_deallocate(n * sizeof(T));
    ::operator delete(p);
  }

  template <class U>
  bool operator==(const TrackedAllocator<U>&) const noexcept {
    return true;
  }
};

}  // namespace stabcert::memory
