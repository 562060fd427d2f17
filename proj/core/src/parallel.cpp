#include "geoscale/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace geoscale {
namespace {

std::atomic<std::size_t> g_override{0};
thread_local bool t_inside_parallel = false;

std::size_t from_environment() {
  if (const char* env = std::getenv("GEOSCALE_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) {
        return static_cast<std::size_t>(value);
      }
    } catch (const std::exception&) {
      // ignore malformed values
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

std::size_t thread_limit() {
  const std::size_t forced = g_override.load();
  return forced > 0 ? forced : from_environment();
}

ScopedThreadLimit::ScopedThreadLimit(std::size_t threads) : previous_(g_override.exchange(threads)) {}

ScopedThreadLimit::~ScopedThreadLimit() { g_override.store(previous_); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  // Nested loops run serially on the calling worker.
  const std::size_t workers = t_inside_parallel ? 1 : std::min(thread_limit(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      body(i);
    }
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const std::size_t block = (count + workers - 1) / workers;
  {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * block;
      const std::size_t end = std::min(count, begin + block);
      if (begin >= end) {
        break;
      }
      threads.emplace_back([&, begin, end] {
        t_inside_parallel = true;
        try {
          for (std::size_t i = begin; i < end; ++i) {
            body(i);
          }
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) {
            failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) {
    std::rethrow_exception(failure);
  }
}

} // namespace geoscale
