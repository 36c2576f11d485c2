#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace rpavg {

// v(s)(x) = sup over finite subsequences n_1 < ... < n_J of
// (sum_j |x_{n_{j+1}} - x_{n_j}|^s)^{1/s}. Empty and single-point
// subsequences contribute 0.
inline constexpr double kDefaultVariationExponent = 3.0;

// Exact value in O(N^2): best[j] = max(0, max_{i<j} best[i] + |x_j - x_i|^s).
double variation_norm(std::span<const std::complex<double>> x, double s = kDefaultVariationExponent);
double variation_norm(std::span<const double> x, double s = kDefaultVariationExponent);

// Exhaustive enumeration of all 2^N subsequences, N <= 20.
double variation_bruteforce(std::span<const std::complex<double>> x, double s = kDefaultVariationExponent);

inline constexpr std::size_t kBruteforceMaxLength = 20;

// For x vanishing at every block start (the first at index 0): returns
// (v(s)(x), 2 sum_blocks v(s)(block)).
std::pair<double, double> variation_block_bound(std::span<const std::complex<double>> x,
                                                std::span<const std::size_t> block_starts,
                                                double s = kDefaultVariationExponent);

}  // namespace rpavg
