#include "cli/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace drone_gossip::cli {

std::size_t worker_count() {
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DRONE_GOSSIP_THREADS")) {
    try {
      long long cap = std::stoll(env);
      if (cap >= 1) workers = std::min(workers, static_cast<std::size_t>(cap));
    } catch (const std::exception&) {
      // Unparseable values leave the default in place.
    }
  }
  return workers;
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace drone_gossip::cli
