#include "batchband/stats.hpp"

#include <algorithm>

#include "batchband/error.hpp"

namespace batchband {

void Moments::merge(const Moments& o) {
  if (o.count == 0) return;
  if (count == 0) {
    *this = o;
    return;
  }
  const double n_a = static_cast<double>(count);
  const double n_b = static_cast<double>(o.count);
  const double n = n_a + n_b;
  const double d = o.mean - mean;
  mean += d * n_b / n;
  m2 += o.m2 + d * d * n_a * n_b / n;
  count += o.count;
}

void CurveMoments::add(std::span<const double> curve) {
  if (points_.empty()) points_.resize(curve.size());
  if (curve.size() != points_.size()) throw DimensionMismatchError("curves differ in length");
  for (std::size_t i = 0; i < curve.size(); ++i) points_[i].add(curve[i]);
}

void CurveMoments::merge(const CurveMoments& other) {
  if (other.points_.empty()) return;
  if (points_.empty()) {
    points_ = other.points_;
    return;
  }
  if (other.points_.size() != points_.size()) throw DimensionMismatchError("curves differ in length");
  for (std::size_t i = 0; i < points_.size(); ++i) points_[i].merge(other.points_[i]);
}

std::vector<double> CurveMoments::means() const {
  std::vector<double> out(points_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = points_[i].mean;
  return out;
}

std::vector<double> CurveMoments::std_errors() const {
  std::vector<double> out(points_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = points_[i].std_error();
  return out;
}

Estimate estimate(std::span<const double> samples) {
  Moments m;
  for (double x : samples) m.add(x);
  return {m.mean, m.std_error()};
}

double wilson_lower(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return 0.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::max(0.0, (centre - spread) / (1.0 + z2 / n));
}

double wilson_upper(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (centre + spread) / (1.0 + z2 / n));
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::holds: return "holds";
    case Verdict::consistent: return "consistent";
    case Verdict::violated: return "violated";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::boundary: return "boundary";
    case Verdict::vacuous: return "vacuous";
    case Verdict::not_evaluated: return "not_evaluated";
  }
  return "unknown";
}

}  // namespace batchband
