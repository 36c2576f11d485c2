#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rpavg/perturbation.hpp"

namespace rpavg {

using cplx = std::complex<double>;

// Finite complex measure on R^d carried by finitely many weighted atoms.
// Immutable after construction.
class AtomicMeasure {
 public:
  struct Atom {
    Vec point;
    cplx weight;
  };

  AtomicMeasure() = default;
  AtomicMeasure(int d, std::vector<Atom> atoms);
  static AtomicMeasure dirac(Vec point);

  int d() const noexcept { return d_; }
  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> point(std::size_t j) const noexcept {
    return {points_.data() + j * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  cplx weight(std::size_t j) const noexcept { return weights_[j]; }
  double variation_mass() const noexcept { return variation_; }
  // Real non-negative weights summing to one within 1e-12.
  bool is_probability() const noexcept { return probability_; }
  bool has_real_weights() const noexcept { return real_weights_; }
  // The same atoms translated by `shift`.
  AtomicMeasure shifted(std::span<const double> shift) const;
  std::vector<Atom> atoms() const;

  bool operator==(const AtomicMeasure& o) const {
    return d_ == o.d_ && points_ == o.points_ && weights_ == o.weights_;
  }

 private:
  int d_ = 1;
  std::vector<double> points_;
  std::vector<cplx> weights_;
  double variation_ = 0.0;
  bool probability_ = false;
  bool real_weights_ = true;
};

double variation_mass(const AtomicMeasure& m) noexcept;

enum class KernelFamily { kBox, kTriangle, kGaussianTruncated };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

// Product smoothing density zeta(t) = prod_j z(t_j) with z >= 0, int z = 1.
//   box:       z = 1/2 on [-1,1],          zhat(x) = sin x / x
//   triangle:  z = 1 - |x| on [-1,1],      zhat(x) = (sin(x/2)/(x/2))^2
//   gaussian:  standard normal truncated to [-c,c] and renormalized
class SmoothingKernel {
 public:
  SmoothingKernel() = default;
  explicit SmoothingKernel(KernelFamily family, double cutoff = 3.0);

  KernelFamily family() const noexcept { return family_; }
  double cutoff() const noexcept { return cutoff_; }

  double transform_1d(double x) const;
  double transform(std::span<const double> t) const;
  // zhat(eps . t)
  double scaled_transform(std::span<const double> eps, std::span<const double> t) const;
  double density_1d(double x) const;

  // alpha in sup_t prod_j max(1,|t_j|)^alpha |zhat(t)| < infinity
  double decay_exponent() const noexcept;
  // The finite value of that supremum for dimension d.
  double decay_certificate(int d) const;
  // int x^2 z(x) dx
  double second_moment_1d() const noexcept;

  bool operator==(const SmoothingKernel& o) const {
    return family_ == o.family_ && cutoff_ == o.cutoff_;
  }

 private:
  KernelFamily family_ = KernelFamily::kBox;
  double cutoff_ = 3.0;
  double norm_ = 1.0;  // gaussian truncation mass
};

struct SmoothingSpec {
  PerturbationSpec epsilon;
  SmoothingKernel kernel;
  bool operator==(const SmoothingSpec&) const = default;
};

// Closed-form smoothing factor attached to one realized measure.
struct SmoothingFactor {
  Vec eps;
  SmoothingKernel kernel;
};

enum class CoefficientRule { kUnit, kInversePower };

struct CoefficientSpec {
  CoefficientRule rule = CoefficientRule::kUnit;
  double scale = 1.0;
  bool operator==(const CoefficientSpec&) const = default;
};

enum class ExpectationMode { kAuto, kMonteCarlo };

struct ExpectationSpec {
  ExpectationMode mode = ExpectationMode::kAuto;
  std::size_t samples = 100000;
  std::uint64_t seed = 0x5EEDE4EC;
  bool operator==(const ExpectationSpec&) const = default;
};

// Declarative recipe nu_k = theta * delta_{n_k + delta_k} (* L_{eps_k}).
struct ModelSpec {
  PerturbationSpec perturbation = PerturbationSpec::uniform(1.0);
  SubsequenceSpec subsequence;
  std::optional<SmoothingSpec> smoothing;
  std::optional<AtomicMeasure> base;  // theta; Dirac at 0 when absent
  CoefficientSpec coefficients;
  ExpectationSpec expectation;

  bool operator==(const ModelSpec&) const = default;
};

enum class EstimateMethod { kClosedForm, kQuadrature, kMonteCarlo };

struct ExpectedValue {
  cplx value;
  double std_error = 0.0;
  EstimateMethod method = EstimateMethod::kClosedForm;
};

// One realized summand of an average: nu_k(omega) and the data of E nu_k.
struct RealizedTerm {
  MultiIndex k;
  Vec center;    // n_k
  Vec position;  // n_k + delta_k(omega)
  Vec eps;       // epsilon_k(omega), empty without smoothing
  double coefficient = 1.0;
};

enum class ModelView { kFull, kPointMass, kPerturbationOnly, kSmoothed };

class TransitionMeasureModel {
 public:
  explicit TransitionMeasureModel(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  int d() const noexcept { return spec_.perturbation.d; }
  int r() const noexcept { return spec_.subsequence.r; }
  bool has_smoothing() const noexcept { return use_smoothing_ && spec_.smoothing.has_value(); }
  bool centers_zero() const noexcept { return zero_centers_; }
  const AtomicMeasure& base() const noexcept { return base_; }
  // Every realized nu_k is a probability measure.
  bool is_probability() const noexcept { return base_.is_probability(); }
  bool real_measures() const noexcept { return base_.has_real_weights(); }
  // sup_omega |nu_k|(R^d)
  double term_mass() const noexcept { return base_.variation_mass(); }

  // kFull: as configured. kPointMass: theta and smoothing dropped.
  // kPerturbationOnly: additionally n_k = 0. kSmoothed: theta dropped,
  // smoothing required.
  TransitionMeasureModel view(ModelView v) const;

  Vec center(std::span<const long long> k) const;
  Vec delta(std::uint64_t seed, std::span<const long long> k) const;
  Vec epsilon(std::uint64_t seed, std::span<const long long> k) const;
  double coefficient(std::span<const long long> k) const noexcept;
  RealizedTerm realize(std::uint64_t seed, std::span<const long long> k) const;

  // E exp(i<delta,t>)
  ExpectedValue delta_transform(std::span<const double> t) const;
  // E zhat(eps . t); exactly 1 without smoothing
  ExpectedValue smoothing_transform(std::span<const double> t) const;
  cplx base_transform(std::span<const double> t) const;
  std::optional<SmoothingFactor> smoothing_factor(std::span<const double> eps) const;

  // Euclidean first absolute moment of |nu_k| and of |E nu_k|, the
  // Lipschitz constants of their transforms.
  double realized_moment(const RealizedTerm& term) const;
  double expected_moment(const RealizedTerm& term) const;

 private:
  struct McCache {
    std::vector<double> delta;  // samples x d
    std::vector<double> eps;    // samples x d (empty unless needed)
  };

  ModelSpec spec_;
  AtomicMeasure base_;
  bool use_base_ = true;
  bool use_smoothing_ = true;
  bool zero_centers_ = false;
  bool delta_mc_ = false;
  bool eps_mc_ = false;
  std::shared_ptr<const McCache> mc_;
};

AtomicMeasure realize_measure(const TransitionMeasureModel& model, std::uint64_t seed,
                              std::span<const long long> k);

cplx fourier_stieltjes(const AtomicMeasure& measure, std::span<const double> t,
                       const std::optional<SmoothingFactor>& smoothing = std::nullopt);

ExpectedValue expected_transform(const TransitionMeasureModel& model, std::span<const long long> k,
                                 std::span<const double> t);

// Transform restricted to atoms inside the box [-L, L]^d.
cplx truncated_transform(const AtomicMeasure& measure, std::span<const double> t, double L);

}  // namespace rpavg
