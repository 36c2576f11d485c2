#include "rpavg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rpavg/errors.hpp"

namespace rpavg {

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw ArgumentError("percentile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ArgumentError("percentile level must lie in [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::span<const double> values) { return percentile(values, 0.5); }

TrendTest mann_kendall(std::span<const double> x, double alpha) {
  const std::size_t n = x.size();
  if (n < 3) throw ArgumentError("Mann-Kendall needs at least 3 observations");
  TrendTest t;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) t.S += (x[j] > x[i]) - (x[j] < x[i]);

  std::map<double, int> groups;
  for (double v : x) ++groups[v];
  const double nn = static_cast<double>(n);
  t.variance = nn * (nn - 1) * (2 * nn + 5);
  bool ties = false;
  for (const auto& [v, c] : groups) {
    if (c > 1) ties = true;
    t.variance -= static_cast<double>(c) * (c - 1) * (2.0 * c + 5);
  }
  t.variance /= 18.0;
  if (t.S > 0) t.z = (t.S - 1) / std::sqrt(t.variance);
  else if (t.S < 0) t.z = (t.S + 1) / std::sqrt(t.variance);

  if (!ties && n <= 10) {
    // Inversion counts of random permutations (Mahonian numbers);
    // S = n(n-1)/2 - 2 inv.
    const std::size_t maxinv = n * (n - 1) / 2;
    std::vector<double> dist(1, 1.0);
    for (std::size_t m = 2; m <= n; ++m) {
      std::vector<double> next(dist.size() + m - 1, 0.0);
      for (std::size_t i = 0; i < dist.size(); ++i)
        for (std::size_t add = 0; add < m; ++add) next[i + add] += dist[i];
      dist = std::move(next);
    }
    double total = 0.0, tail = 0.0;
    for (std::size_t inv = 0; inv <= maxinv; ++inv) {
      const double s = static_cast<double>(maxinv) - 2.0 * static_cast<double>(inv);
      total += dist[inv];
      if (s >= t.S) tail += dist[inv];
    }
    t.p_increasing = tail / total;
    t.exact = true;
  } else {
    t.p_increasing = 0.5 * std::erfc(t.z / std::sqrt(2.0));
  }
  t.increasing = t.p_increasing < alpha;
  return t;
}

}  // namespace rpavg
