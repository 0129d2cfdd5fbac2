#include <doctest.h>

#include <cmath>
#include <vector>

#include "batchband/csv.hpp"
#include "batchband/parallel.hpp"
#include "batchband/rng.hpp"
#include "batchband/stats.hpp"
#include "oracles.hpp"

using namespace batchband;

TEST_CASE("merged moments equal direct moments") {
  Rng rng(2);
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(rng.normal() * 3.0 + 1.0);

  Moments direct;
  for (double x : xs) direct.add(x);
  Moments merged;
  for (std::size_t start = 0; start < xs.size(); start += 37) {
    Moments part;
    for (std::size_t i = start; i < std::min(xs.size(), start + 37); ++i) part.add(xs[i]);
    merged.merge(part);
  }
  const double mean = oracle::mean_of(xs);
  long double ss = 0.0L;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = static_cast<double>(ss / (xs.size() - 1));

  CHECK(direct.count == 1000);
  CHECK(merged.count == 1000);
  CHECK(direct.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(merged.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(direct.variance() == doctest::Approx(var).epsilon(1e-10));
  CHECK(merged.variance() == doctest::Approx(var).epsilon(1e-10));
  CHECK(direct.std_error() == doctest::Approx(std::sqrt(var / 1000)).epsilon(1e-10));

  Moments empty;
  empty.merge(direct);
  CHECK(empty.mean == direct.mean);
  CHECK(Moments{}.std_error() == 0.0);
}

TEST_CASE("curve moments") {
  CurveMoments a(3), b(3);
  a.add(std::vector<double>{1, 2, 3});
  a.add(std::vector<double>{3, 4, 5});
  b.add(std::vector<double>{5, 6, 7});
  a.merge(b);
  CHECK(a.count() == 3);
  CHECK(a.means() == std::vector<double>{3, 4, 5});
  CHECK(a.std_errors()[0] == doctest::Approx(std::sqrt(4.0 / 3.0)));

  const auto e = estimate(std::vector<double>{1, 2, 3, 4});
  CHECK(e.mean == 2.5);
  CHECK(e.se == doctest::Approx(std::sqrt((2.25 + 0.25 + 0.25 + 2.25) / 3.0 / 4.0)));
}

TEST_CASE("Wilson bounds") {
  const double z = kZ95OneSided;
  const double n = 100, p = 0.3;
  const double denom = 1 + z * z / n;
  const double centre = (p + z * z / (2 * n)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom;
  CHECK(wilson_lower(30, 100, z) == doctest::Approx(centre - half));
  CHECK(wilson_upper(30, 100, z) == doctest::Approx(centre + half));
  CHECK(wilson_lower(0, 50, z) == doctest::Approx(0.0));
  CHECK(wilson_upper(50, 50, z) == doctest::Approx(1.0));
  CHECK(wilson_lower(0, 50, z) >= 0.0);
  CHECK(wilson_upper(0, 50, z) > 0.0);
}

TEST_CASE("parallel_map returns results in index order") {
  for (unsigned threads : {1u, 2u, 4u}) {
    const auto out = parallel_map(100, threads, [](std::size_t i) { return i * i; });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == i * i);
  }
  CHECK_THROWS_AS(parallel_map(10, 3,
                               [](std::size_t i) -> int {
                                 if (i == 5) throw std::runtime_error("boom");
                                 return 0;
                               }),
                  std::runtime_error);
}

TEST_CASE("csv helpers") {
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  double d = 0;
  CHECK(parse_double("0.25", d));
  CHECK(d == 0.25);
  CHECK_FALSE(parse_double("0.25x", d));
  CHECK_FALSE(parse_double("", d));
  std::size_t s = 0;
  CHECK(parse_size("12", s));
  CHECK_FALSE(parse_size("-1", s));
  CHECK(format_double(0.1) == "0.1");
  CHECK(to_string(Verdict::holds) == "holds");
}
