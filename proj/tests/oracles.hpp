#pragma once

// Independent reference computations. Nothing here calls into the library;
// values are recomputed from the textbook formulas in long double.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

// Means of the six Bernoulli reference environments.
inline const std::vector<std::vector<double>>& reference_means() {
  static const std::vector<std::vector<double>> table = {
      {0.7, 0.5}, {0.7, 0.4}, {0.7, 0.1},
      {0.35, 0.18, 0.47, 0.61}, {0.40, 0.75, 0.57, 0.49}, {0.70, 0.50, 0.30, 0.10},
  };
  return table;
}

inline std::vector<double> gaps(const std::vector<double>& means) {
  const double best = *std::max_element(means.begin(), means.end());
  std::vector<double> out;
  for (double m : means) out.push_back(best - m);
  return out;
}

// 4 ln(t+1) / (t gap^2) + 8 / t, clamped to [0, 1].
inline double arm_bound(double gap, std::int64_t t) {
  const long double td = static_cast<long double>(t);
  const long double g = gap;
  const long double raw = 4.0L * std::log(td + 1.0L) / (td * g * g) + 8.0L / td;
  return static_cast<double>(std::min<long double>(1.0L, std::max<long double>(0.0L, raw)));
}

inline double instance_bound(const std::vector<double>& means, std::int64_t t) {
  const auto g = gaps(means);
  long double sum = 0.0L;
  bool best_seen = false;
  for (double d : g) {
    if (d == 0.0 && !best_seen) {
      best_seen = true;
      continue;
    }
    sum += arm_bound(d, t);
  }
  return static_cast<double>(std::max<long double>(0.0L, 1.0L - sum));
}

inline double ucb_index(double mean, std::size_t count, double s, double c) {
  return static_cast<double>(static_cast<long double>(mean) +
                             std::sqrt(static_cast<long double>(c) * std::log((long double)s) /
                                       static_cast<long double>(count)));
}

// Number of visible entries when deciding step t.
inline std::size_t visible_batch(std::int64_t t, std::int64_t b) {
  return static_cast<std::size_t>(b * ((t - 1) / b));
}
inline std::size_t visible_short(std::int64_t t, std::int64_t b) {
  return static_cast<std::size_t>((t - 1) / b);
}

// Expected per-step pseudo-regret of uniform play.
inline double uniform_regret_rate(const std::vector<double>& means) {
  const auto g = gaps(means);
  long double s = 0.0L;
  for (double d : g) s += d;
  return static_cast<double>(s / static_cast<long double>(g.size()));
}

inline double mean_of(const std::vector<double>& v) {
  long double s = 0.0L;
  for (double x : v) s += x;
  return static_cast<double>(s / static_cast<long double>(v.size()));
}

}  // namespace oracle
