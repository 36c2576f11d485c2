#pragma once

#include <span>
#include <vector>

namespace rpavg {

// Linear interpolation between order statistics (the "type 7" definition),
// q in [0, 1].
double percentile(std::span<const double> values, double q);
double median(std::span<const double> values);

struct TrendTest {
  double S = 0.0;          // Mann-Kendall score sum sign(x_j - x_i), i < j
  double variance = 0.0;   // of S under no trend, tie-corrected
  double z = 0.0;          // continuity-corrected normal score
  double p_increasing = 1.0;  // one-sided P(S' >= S) under no trend
  bool exact = false;      // p from the exact permutation law
  bool increasing = false; // p_increasing < alpha
};

// One-sided Mann-Kendall test for an increasing trend. Without ties and for
// n <= 10 the p-value uses the exact distribution of S over permutations.
TrendTest mann_kendall(std::span<const double> series, double alpha = 0.05);

}  // namespace rpavg
