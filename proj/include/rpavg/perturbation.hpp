#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rpavg/rng.hpp"

namespace rpavg {

using Vec = std::vector<double>;
using MultiIndex = std::vector<long long>;

// |u| = max_i |u_i|
double max_norm(std::span<const double> u) noexcept;
long long max_norm(std::span<const long long> k) noexcept;

enum class PerturbationFamily { kConstant, kUniform, kExponential, kPareto, kRademacherShift };

std::string to_string(PerturbationFamily f);
PerturbationFamily perturbation_family_from_string(const std::string& s);

// Per-coordinate law of a positive random vector with independent coordinates.
//   constant(c)            c >= 0
//   uniform(0,a)           a > 0
//   exponential(rate)      rate > 0
//   pareto(alpha, scale)   P(X > x) = (scale/x)^alpha for x >= scale
//   rademacher_shift(o)    o + xi, xi = +-1 with probability 1/2, o >= 1
struct CoordinateLaw {
  PerturbationFamily family = PerturbationFamily::kConstant;
  double p1 = 0.0;  // c, a, rate, alpha or offset
  double p2 = 0.0;  // pareto scale

  void validate() const;
  double sample(Stream& s) const noexcept;
  double tail(double x) const noexcept;  // P(X > x)
  double mean() const noexcept;          // +inf when it does not exist
  double second_moment() const noexcept; // +inf when it does not exist
  double upper_support() const noexcept; // +inf for unbounded laws
  bool has_closed_form_cf() const noexcept;
  std::complex<double> characteristic(double t) const;  // E exp(i t X)
  bool is_degenerate() const noexcept { return family == PerturbationFamily::kConstant; }

  bool operator==(const CoordinateLaw&) const = default;
};

struct PerturbationSpec {
  int d = 1;
  std::vector<CoordinateLaw> coords;  // size d

  static PerturbationSpec iid(PerturbationFamily family, int d, double p1, double p2 = 0.0);
  static PerturbationSpec constant(double c, int d = 1) {
    return iid(PerturbationFamily::kConstant, d, c);
  }
  static PerturbationSpec uniform(double a, int d = 1) {
    return iid(PerturbationFamily::kUniform, d, a);
  }
  static PerturbationSpec exponential(double rate, int d = 1) {
    return iid(PerturbationFamily::kExponential, d, rate);
  }
  static PerturbationSpec pareto(double tail_index, double scale, int d = 1) {
    return iid(PerturbationFamily::kPareto, d, tail_index, scale);
  }
  static PerturbationSpec rademacher_shift(double offset, int d = 1) {
    return iid(PerturbationFamily::kRademacherShift, d, offset);
  }

  void validate() const;
  bool deterministic() const noexcept;
  bool has_closed_form_cf() const noexcept;
  void sample_into(Stream& s, std::span<double> out) const noexcept;
  // P(|X| > x) with |.| the max-coordinate norm.
  double max_tail(double x) const noexcept;
  // Upper bound on E|X|_2 (Euclidean); +inf when no moment bound exists.
  double euclidean_mean_bound() const noexcept;
  std::complex<double> characteristic(std::span<const double> t) const;

  bool operator==(const PerturbationSpec&) const = default;
};

// Draws delta_1..delta_count; element i is the vector attached to the
// one-dimensional index k = i + 1, identical to what the models realize.
std::vector<Vec> sample_delta(const PerturbationSpec& spec, std::size_t count, std::uint64_t seed,
                              StreamTag tag = StreamTag::kDelta);

enum class SubsequenceFamily { kLinear, kPower, kLacunaryExponential };

std::string to_string(SubsequenceFamily f);
SubsequenceFamily subsequence_family_from_string(const std::string& s);

// n_k with coordinate i equal to scale_i * g(k_{i mod r}), where
//   linear: g(x) = x,  power: g(x) = x^p,  lacunary: g(x) = floor(2^{x^{r beta}}).
// The growth certificate |n_k| <= c 2^{|k|^{r beta}} is checked on every value.
struct SubsequenceSpec {
  SubsequenceFamily family = SubsequenceFamily::kLinear;
  double beta = 0.5;
  int r = 1;
  int d = 1;
  double power = 2.0;
  Vec scales;              // empty means all ones
  double certificate = 0;  // c; 0 means "derive the tight default"

  void validate() const;
  double growth_exponent() const noexcept { return r * beta; }
  double certificate_constant() const;
  // Largest k with 2^{k^{r beta}} representable in a double.
  long long largest_admissible_index() const noexcept;

  bool operator==(const SubsequenceSpec&) const = default;
};

Vec subsequence_values(const SubsequenceSpec& spec, std::span<const long long> k);

enum class TailMethod { kClosedForm, kNumericTail };

struct TailReport {
  std::vector<double> partial_sums;
  bool converged = false;
  TailMethod method = TailMethod::kClosedForm;
  double last_increment = 0.0;
};

// Partial sums of sum_{k<=K} k^{r-1} P(|delta| > 2^{k^{r beta}}).
TailReport check_tail_condition(const PerturbationSpec& spec, double beta, int r, long long K);

}  // namespace rpavg
