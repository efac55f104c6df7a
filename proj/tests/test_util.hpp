#pragma once

#include <random>

#include "shiptrack/bbox.hpp"

namespace shiptrack::testing {

inline BBox random_box(std::mt19937_64& rng, double span = 100.0, double max_dim = 40.0) {
  std::uniform_real_distribution<double> pos(-span, span);
  std::uniform_real_distribution<double> dim(0.5, max_dim);
  return BBox(pos(rng), pos(rng), dim(rng), dim(rng));
}

}  // namespace shiptrack::testing
