#pragma once

#include <optional>

namespace squish {

// Caps OpenMP parallelism. Without an explicit count, SQUISH_THREADS is honoured
// when set. Returns the count in effect.
int set_num_threads(std::optional<int> threads = std::nullopt);
int max_threads();

}  // namespace squish
