#pragma once

#include <cstddef>

#include "writor/types.hpp"

namespace writor {

struct Progress {
  double fraction = 0.0;
  std::size_t addressed = 0;
  std::size_t total = 0;

  bool operator==(const Progress&) const = default;
};

// Addressed critiques over all critiques. Praise cards are not counted.
Progress compute_progress(const Session& session);

}  // namespace writor
