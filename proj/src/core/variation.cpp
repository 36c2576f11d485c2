#include "rpavg/variation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rpavg/errors.hpp"

namespace rpavg {

namespace {

void check_query(std::size_t n, double s) {
  if (!(s >= 1.0) || !std::isfinite(s)) throw ArgumentError("variation exponent s must be a finite value >= 1");
  if (n == 0) throw ArgumentError("variation norm needs at least one value");
}

}  // namespace

double variation_norm(std::span<const std::complex<double>> x, double s) {
  check_query(x.size(), s);
  std::vector<double> best(x.size(), 0.0);
  double top = 0.0;
  for (std::size_t j = 1; j < x.size(); ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) b = std::max(b, best[i] + std::pow(std::abs(x[j] - x[i]), s));
    best[j] = b;
    top = std::max(top, b);
  }
  return std::pow(top, 1.0 / s);
}

double variation_norm(std::span<const double> x, double s) {
  std::vector<std::complex<double>> z(x.begin(), x.end());
  return variation_norm(std::span<const std::complex<double>>(z), s);
}

double variation_bruteforce(std::span<const std::complex<double>> x, double s) {
  check_query(x.size(), s);
  if (x.size() > kBruteforceMaxLength)
    throw SizeError("brute-force variation supports at most " + std::to_string(kBruteforceMaxLength) +
                        " values, got " + std::to_string(x.size()),
                    static_cast<double>(kBruteforceMaxLength));
  const std::size_t n = x.size();
  double top = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      if (prev >= 0) sum += std::pow(std::abs(x[i] - x[static_cast<std::size_t>(prev)]), s);
      prev = static_cast<int>(i);
    }
    top = std::max(top, sum);
  }
  return std::pow(top, 1.0 / s);
}

std::pair<double, double> variation_block_bound(std::span<const std::complex<double>> x,
                                                std::span<const std::size_t> block_starts,
                                                double s) {
  check_query(x.size(), s);
  if (block_starts.empty() || block_starts.front() != 0)
    throw ArgumentError("the first block must start at index 0");
  for (std::size_t b = 0; b < block_starts.size(); ++b) {
    const std::size_t i = block_starts[b];
    if (i >= x.size()) throw ArgumentError("block start beyond the sequence");
    if (b > 0 && i <= block_starts[b - 1]) throw ArgumentError("block starts must be increasing");
    if (x[i] != 0.0) throw ArgumentError("sequence must vanish at block start " + std::to_string(i));
  }
  const double lhs = variation_norm(x, s);
  double rhs = 0.0;
  for (std::size_t b = 0; b < block_starts.size(); ++b) {
    const std::size_t lo = block_starts[b];
    const std::size_t hi = b + 1 < block_starts.size() ? block_starts[b + 1] : x.size();
    rhs += variation_norm(x.subspan(lo, hi - lo), s);
  }
  return {lhs, 2.0 * rhs};
}

}  // namespace rpavg
