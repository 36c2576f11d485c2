#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rpavg/errors.hpp"
#include "rpavg/stats.hpp"

using namespace rpavg;

TEST_CASE("percentiles by linear interpolation") {
  std::vector<double> x(10);
  std::iota(x.begin(), x.end(), 1.0);
  std::shuffle(x.begin(), x.end(), std::mt19937(1));
  CHECK(percentile(x, 0.95) == doctest::Approx(9.55));
  CHECK(percentile(x, 0.0) == 1.0);
  CHECK(percentile(x, 1.0) == 10.0);
  CHECK(median(x) == doctest::Approx(5.5));
  const std::vector<double> odd{3.0, 1.0, 2.0};
  CHECK(median(odd) == 2.0);
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), ArgumentError);
  CHECK_THROWS_AS(percentile(x, 1.5), ArgumentError);
}

TEST_CASE("exact mann-kendall p-values match permutation counts") {
  for (int n = 3; n <= 7; ++n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> scores;
    do {
      int s = 0;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) s += (perm[j] > perm[i]) - (perm[j] < perm[i]);
      scores.push_back(s);
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::mt19937 rng(static_cast<unsigned>(n));
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> series(static_cast<std::size_t>(n));
      std::iota(series.begin(), series.end(), 0.0);
      std::shuffle(series.begin(), series.end(), rng);
      const TrendTest t = mann_kendall(series);
      CHECK(t.exact);
      const auto ge = std::count_if(scores.begin(), scores.end(), [&](int s) { return s >= t.S; });
      CHECK(t.p_increasing == doctest::Approx(static_cast<double>(ge) / scores.size()).epsilon(1e-12));
    }
  }
  const std::vector<double> up{1.0, 2.0, 3.0, 4.0};
  const TrendTest t = mann_kendall(up);
  CHECK(t.S == 6.0);
  CHECK(t.p_increasing == doctest::Approx(1.0 / 24.0));
  CHECK(t.increasing);
}

TEST_CASE("normal approximation with ties") {
  std::vector<double> x;
  for (int i = 0; i < 30; ++i) x.push_back(std::floor(i / 3.0));
  const TrendTest t = mann_kendall(x);
  CHECK_FALSE(t.exact);
  CHECK(t.increasing);
  // Tie-corrected variance: groups of three tied values.
  const double n = 30.0;
  const double var = (n * (n - 1) * (2 * n + 5) - 10 * (3.0 * 2.0 * 11.0)) / 18.0;
  CHECK(t.variance == doctest::Approx(var));
  CHECK(t.z == doctest::Approx((t.S - 1.0) / std::sqrt(var)));

  std::vector<double> down(x.rbegin(), x.rend());
  CHECK_FALSE(mann_kendall(down).increasing);
  CHECK_THROWS_AS(mann_kendall(std::vector<double>{1.0, 2.0}), ArgumentError);
}
