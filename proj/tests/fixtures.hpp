#pragma once

#include "shiftest/preprocess.hpp"

namespace shiftest::fixtures {

/// Large-shock data on [0, 1].
inline std::vector<Segment> exp1_segments() {
  return {{-kInf, 0.25, 3.0, 0.0},
          {0.25, 0.5, 1.0, 2.0},
          {0.5, 0.625, 0.0, 1.0},
          {0.625, kInf, 0.0, 0.0}};
}

/// Data with one rapidly decreasing piece.
inline std::vector<Segment> exp2_segments() {
  return {{-kInf, 0.2, 2.5, 0.0},
          {0.2, 0.4, 3.5, -5.0},
          {0.4, 0.625, 1.1, 1.0},
          {0.625, kInf, 0.0, 0.0}};
}

} // namespace shiftest::fixtures
