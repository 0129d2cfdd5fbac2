#pragma once

// Streaming moments and the interval arithmetic shared by the checkers.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace batchband {

// Running mean and sum of squared deviations (Welford), mergeable in a
// fixed order (Chan et al.).
struct Moments {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }
  void merge(const Moments& o);
  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double std_error() const {
    return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

// Point-wise moments of equal-length curves.
class CurveMoments {
 public:
  CurveMoments() = default;
  explicit CurveMoments(std::size_t length) : points_(length) {}

  void add(std::span<const double> curve);
  void merge(const CurveMoments& other);

  std::size_t length() const { return points_.size(); }
  std::size_t count() const { return points_.empty() ? 0 : points_.front().count; }
  std::vector<double> means() const;
  std::vector<double> std_errors() const;

 private:
  std::vector<Moments> points_;
};

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

Estimate estimate(std::span<const double> samples);

inline double pooled_se(double se_a, double se_b) { return std::sqrt(se_a * se_a + se_b * se_b); }

// One-sided Wilson score bounds for a binomial proportion.
double wilson_lower(std::size_t successes, std::size_t trials, double z);
double wilson_upper(std::size_t successes, std::size_t trials, double z);

// z for a one-sided 95% bound.
inline constexpr double kZ95OneSided = 1.6448536269514722;

enum class Verdict { holds, consistent, violated, inconclusive, boundary, vacuous, not_evaluated };

std::string to_string(Verdict verdict);

}  // namespace batchband
