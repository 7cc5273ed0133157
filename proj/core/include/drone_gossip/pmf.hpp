#pragma once

#include <cstdint>
#include <map>

namespace drone_gossip {

/// Probability mass function over nonnegative integers; absent keys are 0.
using Pmf = std::map<std::uint64_t, double>;

}  // namespace drone_gossip
