#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rpavg/measures.hpp"
#include "rpavg/spectral.hpp"

namespace rpavg {

// All k in N^r with lo < |k| <= hi, ordered by shell |k| and then
// lexicographically. shell_offsets[j] is the first position of shell lo+1+j;
// the last entry equals the total count.
struct IndexSet {
  int r = 1;
  long long lo = 0;
  long long hi = 0;
  std::vector<MultiIndex> indices;
  std::vector<std::size_t> shell_offsets;
};

IndexSet enumerate_shells(int r, long long lo, long long hi);

// S(t) = sum_k c_k e^{i<p_k,t>} zhat(eps_k . t), with the smoothing factor
// optional. Positions are stored per axis so the inner loops run over k.
class ExponentialSum {
 public:
  ExponentialSum(int d, std::vector<Vec> positions, std::vector<double> coefficients,
                 std::optional<SmoothingKernel> kernel = std::nullopt,
                 std::vector<Vec> eps = {});

  int d() const noexcept { return d_; }
  std::size_t size() const noexcept { return coef_.size(); }

  cplx value(std::span<const double> t) const;
  // Values at start + j*h*e_axis for j < count. Phases advance by a fixed
  // rotation and are recomputed exactly every kAnchorInterval steps.
  void line(std::span<const double> start, int axis, double h, std::size_t count,
            std::span<cplx> out) const;

  static constexpr std::size_t kAnchorInterval = 256;
  // Terms are processed in blocks of kLanes independent accumulators.
  static constexpr std::size_t kLanes = 8;

 private:
  int d_;
  std::vector<std::vector<double>> pos_;  // [axis][k]
  std::vector<double> coef_;
  std::optional<SmoothingKernel> kernel_;
  std::vector<std::vector<double>> eps_;  // [axis][k]
};

// P(t) = sum_{k in N_{lo,hi}} a_k (nuhat_k(omega,t) - E nuhat_k(t)) for one
// realization omega.
class CenteredSum {
 public:
  // `uniform_coefficient` replaces the model's a_k rule when given.
  CenteredSum(const TransitionMeasureModel& model, std::uint64_t seed, long long lo, long long hi,
              std::optional<double> uniform_coefficient = std::nullopt);

  int d() const noexcept { return model_.d(); }
  const TransitionMeasureModel& model() const noexcept { return model_; }
  std::size_t terms() const noexcept { return realized_.size(); }

  cplx value(std::span<const double> t) const;
  void line(std::span<const double> start, int axis, double h, std::size_t count,
            std::span<cplx> out) const;

  // Euclidean Lipschitz bound of t -> P(t) for this realization.
  double lipschitz() const noexcept { return lipschitz_; }
  // Seed-independent version using E|delta| in place of |delta_k|.
  double nominal_lipschitz() const noexcept { return nominal_lipschitz_; }
  double coefficient_mass() const noexcept { return coef_mass_; }
  double coefficient_square_sum() const noexcept { return coef_sq_; }
  // sum a_k^2 ||nu_k||_inf^2
  double weighted_square_sum() const noexcept;
  // |P(-t)| = |P(t)| holds when every measure is real.
  bool conjugate_symmetric() const noexcept { return model_.real_measures(); }

 private:
  struct Terms;
  CenteredSum(const TransitionMeasureModel& model, Terms terms);
  static Terms realize(const TransitionMeasureModel& model, std::uint64_t seed, long long lo,
                       long long hi, std::optional<double> uniform_coefficient);
  cplx combine(std::span<const double> t, cplx realized, cplx expected) const;

  TransitionMeasureModel model_;
  ExponentialSum realized_;
  ExponentialSum expected_;
  double lipschitz_ = 0.0;
  double nominal_lipschitz_ = 0.0;
  double coef_mass_ = 0.0;
  double coef_sq_ = 0.0;
  bool deterministic_ = false;  // nu_k equals E nu_k exactly, so P vanishes
  bool dirac_base_ = false;     // theta = delta_0, so thetahat = 1
};

cplx partial_sum_transform(const TransitionMeasureModel& model, std::uint64_t seed, long long n,
                           long long m, std::span<const double> t);

struct GridSpec {
  double T = 2.0;
  double h = 0.1;
  int d = 1;
  int refinement_levels = 1;
  int refine_factor = 8;
  std::size_t max_refine_cells = 256;
  std::size_t budget = std::size_t{1} << 25;
  bool allow_half_box = true;
};

struct SupResult {
  double sup_value = 0.0;
  Vec argmax;
  double certified_bound = 0.0;
  double lipschitz_constant = 0.0;
  std::size_t grid_points = 0;
  std::size_t refined_cells = 0;
  bool half_box = false;
};

// h = 0.5 max(1, sum |a_k|) / Lip_nominal: a spacing of half a unit over the
// mass-normalized Lipschitz constant.
double default_spacing(const CenteredSum& sum);
std::size_t grid_point_count(const GridSpec& grid, bool half_box);

SupResult sup_on_grid(const CenteredSum& sum, const GridSpec& grid);
SupResult sup_on_grid(const TransitionMeasureModel& model, std::uint64_t seed, long long n,
                      long long m, const GridSpec& grid);

struct EngineOptions {
  std::size_t budget = std::size_t{1} << 25;
  double T_max = 4096.0;
  int refinement_levels = 1;
  int refine_factor = 8;
  std::size_t max_refine_cells = 256;
  std::optional<double> spacing;  // overrides default_spacing
};

enum class RatioMode {
  kProbability,  // [sum a_k^2] log max(phi(m), T)
  kGeneral,      // 1 + sum a_k^2 ||nu_k||^2 log max(phi(m), T)
};

struct RatioEntry {
  long long n = 0;
  long long m = 0;
  double T = 0.0;
  SupResult sup;
  double denominator = 0.0;
  double ratio = 0.0;
};

struct RatioStatistic {
  double value = 0.0;
  long long n = 0;
  long long m = 0;
  double T = 0.0;
  Vec argmax;
  std::vector<RatioEntry> entries;
};

// Default growth function for n_k with certificate c: (2 + c) 2^{x^{r beta}}.
GrowthFunction default_growth(const SubsequenceSpec& sub);

RatioStatistic ratio_statistic(const TransitionMeasureModel& model, std::uint64_t seed,
                               std::span<const std::pair<long long, long long>> pairs,
                               std::span<const double> Ts, const GrowthFunction& phi,
                               RatioMode mode = RatioMode::kProbability,
                               const EngineOptions& options = {});

struct DecayRow {
  long long n = 0;
  double T_target = 0.0;  // 2^{n^{r beta}}, may be +inf
  double T_used = 0.0;
  bool capped = false;
  double spacing = 0.0;
  double sup_sq = 0.0;        // sup |D_n|^2 on the grid (with refinement)
  double certified_sq = 0.0;  // certified bound, squared
};

// Centered kernel D_n = P_{0,n} / n^r on [-T,T]^d with T = 2^{n^{r beta}},
// capped by T_max and by the grid budget.
std::vector<DecayRow> decay_profile(const TransitionMeasureModel& model, std::uint64_t seed,
                                    std::span<const long long> ns, double beta, int r,
                                    const EngineOptions& options = {});

}  // namespace rpavg
