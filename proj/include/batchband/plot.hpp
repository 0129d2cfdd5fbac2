#pragma once

// SVG line charts of final regret against batch size, one chart per
// environment and one series per policy.

#include <iosfwd>
#include <string>
#include <vector>

#include "batchband/core.hpp"

namespace batchband {

struct PlotPoint {
  std::string env;
  std::string policy;
  Timestep b = 1;
  double mean = 0.0;
  double stderr_ = 0.0;
};

// Reads curves.csv and keeps the last-t row of every cell. Throws DataError
// naming the offending line on malformed input, including an empty file.
std::vector<PlotPoint> read_curve_endpoints(std::istream& in);

void write_svg(std::ostream& out, const std::vector<PlotPoint>& points);

}  // namespace batchband
