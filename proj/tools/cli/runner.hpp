#pragma once

#include <cstddef>
#include <functional>

namespace drone_gossip::cli {

/// Worker count: hardware concurrency, capped by DRONE_GOSSIP_THREADS when set.
std::size_t worker_count();

/// Calls task(i) for i in [0, count) across up to `workers` threads. Each
/// index runs exactly once; the first exception is rethrown after all
/// workers stop.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace drone_gossip::cli
