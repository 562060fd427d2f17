#pragma once

#include <cstddef>
#include <functional>

namespace geoscale {

/// Worker-thread cap. Reads GEOSCALE_THREADS (positive integer) unless a
/// ScopedThreadLimit is active; falls back to hardware concurrency.
std::size_t thread_limit();

/// Overrides thread_limit() for the lifetime of the object. Not reentrant
/// across threads; intended for tests and the CLI entry point.
class ScopedThreadLimit {
public:
  explicit ScopedThreadLimit(std::size_t threads);
  ~ScopedThreadLimit();
  ScopedThreadLimit(const ScopedThreadLimit&) = delete;
  ScopedThreadLimit& operator=(const ScopedThreadLimit&) = delete;

private:
  std::size_t previous_;
};

/// Runs body(i) for i in [0, count) on up to thread_limit() threads.
///
/// Iterations are split into contiguous blocks; every iteration must write
/// only to its own output slot so the result is independent of scheduling.
/// The first exception thrown by any iteration is rethrown after all
/// workers join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace geoscale
