#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpavg/measures.hpp"
#include "rpavg/spectral.hpp"

namespace rpavg {

// Random averages built from nu_k over k in [1,n]^r.
//   K  as configured                     G  nu_k = delta_{n_k + delta_k}
//   H  nu_k = delta_{delta_k}            F  smoothed, theta dropped
//   E  expectation of K                  D  K - E
enum class AverageFamily { kK, kG, kH, kF, kE, kD };

std::string to_string(AverageFamily f);
AverageFamily average_family_from_string(const std::string& s);

// The transition-measure model a family draws its nu_k from.
TransitionMeasureModel family_model(AverageFamily family, const TransitionMeasureModel& model);

// b_n = n^r sup |nu_k|(R^d); n^r for probability measures.
double normalization(const TransitionMeasureModel& model, long long n);

// Fourier multiplier of one average for a fixed realization.
class AverageKernel {
 public:
  AverageKernel(AverageFamily family, const TransitionMeasureModel& model, std::uint64_t seed,
                long long n);

  AverageFamily family() const noexcept { return family_; }
  long long n() const noexcept { return n_; }
  double normalization() const noexcept { return b_; }
  const TransitionMeasureModel& model() const noexcept { return model_; }
  const std::vector<RealizedTerm>& terms() const noexcept { return terms_; }

  cplx operator()(std::span<const double> t) const;

 private:
  AverageFamily family_;
  TransitionMeasureModel model_;
  long long n_;
  double b_;
  bool vanishes_;
  std::vector<RealizedTerm> terms_;
};

cplx kernel_value(AverageFamily family, const TransitionMeasureModel& model, std::uint64_t seed,
                  long long n, std::span<const double> t);

TorusObservable apply_average(AverageFamily family, const TransitionMeasureModel& model,
                              std::uint64_t seed, long long n, const TorusObservable& f);

enum class MomentKind { kLogLog, kLogPsi };

std::string to_string(MomentKind k);
MomentKind moment_kind_from_string(const std::string& s);

struct SquareFunctionResult {
  double rho = 2.0;
  int N = 1;
  std::vector<long long> indices;  // distinct floor(rho^j), j = 1..N
  double value = 0.0;              // || (sum_n |D_n f|^2)^{1/2} ||_2^2
  double moment = 0.0;
  double ratio = 0.0;
};

// Indices floor(rho^j) for j = 1..N with repeats removed.
std::vector<long long> geometric_indices(double rho, int N);

// Exact spectral evaluation sum_j rho_j sum_n |D_n(t_j)|^2. The log-psi
// moment uses `phi`, defaulting to the subsequence's growth function.
SquareFunctionResult square_function(const TransitionMeasureModel& model, std::uint64_t seed,
                                     const SpectralMeasure& mu, double rho, int N,
                                     MomentKind moment = MomentKind::kLogLog,
                                     std::optional<GrowthFunction> phi = std::nullopt);
SquareFunctionResult square_function(const TransitionMeasureModel& model, std::uint64_t seed,
                                     const TorusObservable& f, double rho, int N,
                                     MomentKind moment = MomentKind::kLogLog,
                                     std::optional<GrowthFunction> phi = std::nullopt);

// S_n = sum_{k in [1,n]^r} (T_{n_k+delta_k} L_{eps_k} f - T_{n_k} E(T_delta L_eps f)) / |k|^r
// kept as cumulative per-shell Fourier multipliers on the frequencies of f.
class SeriesState {
 public:
  SeriesState(TorusObservable f, std::vector<std::vector<cplx>> cumulative);

  long long n() const noexcept { return static_cast<long long>(cumulative_.size()) - 1; }
  const TorusObservable& observable() const noexcept { return f_; }
  // S_j for 0 <= j <= n; S_0 = 0.
  TorusObservable partial_sum(long long j) const;
  // ||S_b - S_a||_2
  double increment(long long a, long long b) const;
  std::vector<cplx> sample(long long j, std::span<const Vec> points) const;

 private:
  TorusObservable f_;
  std::vector<std::vector<cplx>> cumulative_;  // [shell][term of f]
};

SeriesState series_partial_sum(const TransitionMeasureModel& model, std::uint64_t seed,
                               const TorusObservable& f, long long n);

struct MoriczSample {
  long long n = 0;
  long long m = 0;
  double norm = 0.0;  // || sum_{k=n+1}^m G_k ||_2
};

struct MoriczViolation {
  long long n = 0;
  long long m = 0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct MoriczReport {
  bool holds = true;
  std::vector<MoriczViolation> violations;
  double max_ratio = 0.0;        // max lhs / rhs over the samples
  double bound_constant = 0.0;   // sum_n alpha_n A_n (log n)^2
  double growth_constant = 0.0;  // max_n A_n / n^gamma
};

// Checks ||sum_{n+1}^m G_k||^2 <= A_m sum_{k=n+1}^m alpha_k. alpha and A are
// indexed from k = 1 (alpha[0] is alpha_1).
MoriczReport moricz_check(std::span<const MoriczSample> samples, std::span<const double> alpha,
                          std::span<const double> A, double gamma);

// Variance envelope weights alpha_k = 4 r ||f||^2 / k^{r+1} for shell sums of
// the smoothed series, k = 1..K.
std::vector<double> series_alpha(int r, double f_norm_sq, long long K);
// A_m = m^{r beta}, m = 1..K.
std::vector<double> series_growth(int r, double beta, long long K);

// 64 Kronecker-sequence torus points followed by 64 seeded uniform points.
std::vector<Vec> convergence_sample_points(int d, std::uint64_t seed, std::size_t per_kind = 64);

}  // namespace rpavg
