#include "rpavg/measures.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/sinc.hpp>

#include "rpavg/errors.hpp"

namespace rpavg {

namespace {

using GaussRule = boost::math::quadrature::gauss<double, 15>;

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double euclid(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

// Composite Gauss-Legendre over [a,b] with panels short enough to resolve
// oscillations of angular frequency `omega`.
template <class F>
double oscillatory_integral(F&& f, double a, double b, double omega) {
  const double len = b - a;
  const auto panels =
      static_cast<std::size_t>(std::ceil(len * std::abs(omega) / std::numbers::pi)) + 2;
  const double w = len / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + w * static_cast<double>(p);
    total += GaussRule::integrate(f, lo, lo + w);
  }
  return total;
}

// E zhat(X x) for one coordinate law, deterministic methods only.
double law_kernel_mean(const CoordinateLaw& law, const SmoothingKernel& kernel, double x) {
  auto g = [&](double e) { return kernel.transform_1d(e * x); };
  switch (law.family) {
    case PerturbationFamily::kConstant: return g(law.p1);
    case PerturbationFamily::kRademacherShift: return 0.5 * (g(law.p1 - 1.0) + g(law.p1 + 1.0));
    case PerturbationFamily::kUniform:
      return oscillatory_integral(g, 0.0, law.p1, x) / law.p1;
    case PerturbationFamily::kExponential: {
      const double lambda = law.p1;
      const double upper = 40.0 / lambda;
      return oscillatory_integral([&](double e) { return lambda * std::exp(-lambda * e) * g(e); },
                                  0.0, upper, x);
    }
    case PerturbationFamily::kPareto: break;
  }
  throw ConfigurationError("no deterministic expectation for " + to_string(law.family));
}

bool has_deterministic_kernel_mean(const CoordinateLaw& law) {
  return law.family != PerturbationFamily::kPareto;
}

}  // namespace

AtomicMeasure::AtomicMeasure(int d, std::vector<Atom> atoms) : d_(d) {
  if (d < 1) throw ArgumentError("AtomicMeasure: dimension must be >= 1");
  points_.reserve(atoms.size() * static_cast<std::size_t>(d));
  weights_.reserve(atoms.size());
  double real_sum = 0.0;
  bool nonneg = true;
  for (auto& a : atoms) {
    if (a.point.size() != static_cast<std::size_t>(d))
      throw ArgumentError("AtomicMeasure: atom dimension mismatch");
    for (double x : a.point)
      if (!std::isfinite(x)) throw ArgumentError("AtomicMeasure: non-finite atom location");
    if (!std::isfinite(a.weight.real()) || !std::isfinite(a.weight.imag()))
      throw ArgumentError("AtomicMeasure: non-finite weight");
    points_.insert(points_.end(), a.point.begin(), a.point.end());
    weights_.push_back(a.weight);
    variation_ += std::abs(a.weight);
    if (a.weight.imag() != 0.0) real_weights_ = false;
    if (a.weight.imag() != 0.0 || a.weight.real() < 0.0) nonneg = false;
    real_sum += a.weight.real();
  }
  probability_ = nonneg && !weights_.empty() && std::abs(real_sum - 1.0) <= 1e-12;
}

AtomicMeasure AtomicMeasure::dirac(Vec point) {
  const int d = static_cast<int>(point.size());
  return AtomicMeasure(d, {Atom{std::move(point), 1.0}});
}

AtomicMeasure AtomicMeasure::shifted(std::span<const double> shift) const {
  auto a = atoms();
  for (auto& atom : a)
    for (int i = 0; i < d_; ++i) atom.point[static_cast<std::size_t>(i)] += shift[static_cast<std::size_t>(i)];
  return AtomicMeasure(d_, std::move(a));
}

std::vector<AtomicMeasure::Atom> AtomicMeasure::atoms() const {
  std::vector<Atom> out;
  out.reserve(size());
  for (std::size_t j = 0; j < size(); ++j) {
    auto p = point(j);
    out.push_back({Vec(p.begin(), p.end()), weights_[j]});
  }
  return out;
}

double variation_mass(const AtomicMeasure& m) noexcept { return m.variation_mass(); }

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::kBox: return "box";
    case KernelFamily::kTriangle: return "triangle";
    case KernelFamily::kGaussianTruncated: return "gaussian_truncated";
  }
  return "?";
}

KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "box") return KernelFamily::kBox;
  if (s == "triangle") return KernelFamily::kTriangle;
  if (s == "gaussian_truncated") return KernelFamily::kGaussianTruncated;
  throw ConfigurationError("unknown smoothing kernel '" + s + "'");
}

SmoothingKernel::SmoothingKernel(KernelFamily family, double cutoff)
    : family_(family), cutoff_(cutoff) {
  if (family_ == KernelFamily::kGaussianTruncated) {
    if (!(cutoff_ > 0.0) || !std::isfinite(cutoff_))
      throw ParameterError("gaussian_truncated: cutoff must be > 0");
    norm_ = std::erf(cutoff_ / std::numbers::sqrt2);
  }
}

double SmoothingKernel::density_1d(double x) const {
  const double ax = std::abs(x);
  switch (family_) {
    case KernelFamily::kBox: return ax <= 1.0 ? 0.5 : 0.0;
    case KernelFamily::kTriangle: return ax <= 1.0 ? 1.0 - ax : 0.0;
    case KernelFamily::kGaussianTruncated:
      return ax <= cutoff_ ? std::exp(-0.5 * x * x) / (std::sqrt(2.0 * std::numbers::pi) * norm_)
                           : 0.0;
  }
  return 0.0;
}

double SmoothingKernel::transform_1d(double x) const {
  switch (family_) {
    case KernelFamily::kBox: return boost::math::sinc_pi(x);
    case KernelFamily::kTriangle: {
      const double s = boost::math::sinc_pi(0.5 * x);
      return s * s;
    }
    case KernelFamily::kGaussianTruncated: {
      auto f = [&](double y) { return density_1d(y) * std::cos(x * y); };
      return 2.0 * oscillatory_integral(f, 0.0, cutoff_, x);
    }
  }
  return 0.0;
}

double SmoothingKernel::transform(std::span<const double> t) const {
  double v = 1.0;
  for (double x : t) v *= transform_1d(x);
  return v;
}

double SmoothingKernel::scaled_transform(std::span<const double> eps, std::span<const double> t) const {
  double v = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) v *= transform_1d(eps[i] * t[i]);
  return v;
}

double SmoothingKernel::decay_exponent() const noexcept {
  return family_ == KernelFamily::kTriangle ? 2.0 : 1.0;
}

double SmoothingKernel::decay_certificate(int d) const {
  double one = 1.0;
  switch (family_) {
    case KernelFamily::kBox: one = 1.0; break;           // |sin x| <= 1
    case KernelFamily::kTriangle: one = 4.0; break;      // x^2 sinc^2(x/2) = 4 sin^2(x/2)
    case KernelFamily::kGaussianTruncated:               // |x zhat(x)| <= 2 z(0)
      one = std::max(1.0, 2.0 * density_1d(0.0));
      break;
  }
  return std::pow(one, d);
}

double SmoothingKernel::second_moment_1d() const noexcept {
  switch (family_) {
    case KernelFamily::kBox: return 1.0 / 3.0;
    case KernelFamily::kTriangle: return 1.0 / 6.0;
    case KernelFamily::kGaussianTruncated:
      return 1.0 - 2.0 * cutoff_ * density_1d(cutoff_);
  }
  return 1.0;
}

TransitionMeasureModel::TransitionMeasureModel(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.perturbation.validate();
  spec_.subsequence.validate();
  const int dim = spec_.perturbation.d;
  if (spec_.subsequence.d != dim)
    throw ConfigurationError("subsequence dimension differs from perturbation dimension");
  if (spec_.smoothing) {
    spec_.smoothing->epsilon.validate();
    if (spec_.smoothing->epsilon.d != dim)
      throw ConfigurationError("smoothing scale dimension differs from perturbation dimension");
    for (const auto& c : spec_.smoothing->epsilon.coords)
      if (c.family == PerturbationFamily::kConstant && c.p1 <= 0.0)
        throw ParameterError("smoothing scales must be strictly positive");
  }
  if (spec_.base) {
    if (spec_.base->d() != dim) throw ConfigurationError("base measure dimension mismatch");
    if (spec_.base->size() == 0) throw ConfigurationError("base measure has no atoms");
    base_ = *spec_.base;
  } else {
    base_ = AtomicMeasure::dirac(Vec(static_cast<std::size_t>(dim), 0.0));
  }
  if (!(spec_.coefficients.scale > 0.0) || !std::isfinite(spec_.coefficients.scale))
    throw ParameterError("coefficient scale must be > 0");

  const bool force_mc = spec_.expectation.mode == ExpectationMode::kMonteCarlo;
  delta_mc_ = force_mc || !spec_.perturbation.has_closed_form_cf();
  if (spec_.perturbation.deterministic()) delta_mc_ = false;
  if (spec_.smoothing) {
    eps_mc_ = force_mc;
    for (const auto& c : spec_.smoothing->epsilon.coords)
      if (!has_deterministic_kernel_mean(c)) eps_mc_ = true;
    if (spec_.smoothing->epsilon.deterministic()) eps_mc_ = false;
  }
  if (delta_mc_ || eps_mc_) {
    const std::size_t n = spec_.expectation.samples;
    if (n < 1000)
      throw ConfigurationError("Monte Carlo expectation needs at least 1000 samples");
    auto cache = std::make_shared<McCache>();
    const auto d = static_cast<std::size_t>(dim);
    const long long zero = 0;
    if (delta_mc_) {
      Stream s(spec_.expectation.seed, StreamTag::kExpectation, std::span<const long long>(&zero, 1));
      cache->delta.resize(n * d);
      for (std::size_t i = 0; i < n; ++i)
        spec_.perturbation.sample_into(s, std::span<double>(cache->delta.data() + i * d, d));
    }
    if (eps_mc_) {
      const long long one = 1;
      Stream s(spec_.expectation.seed, StreamTag::kExpectation, std::span<const long long>(&one, 1));
      cache->eps.resize(n * d);
      for (std::size_t i = 0; i < n; ++i)
        spec_.smoothing->epsilon.sample_into(s, std::span<double>(cache->eps.data() + i * d, d));
    }
    mc_ = std::move(cache);
  }
}

TransitionMeasureModel TransitionMeasureModel::view(ModelView v) const {
  TransitionMeasureModel out = *this;
  switch (v) {
    case ModelView::kFull: break;
    case ModelView::kPointMass:
      out.use_base_ = false;
      out.use_smoothing_ = false;
      break;
    case ModelView::kPerturbationOnly:
      out.use_base_ = false;
      out.use_smoothing_ = false;
      out.zero_centers_ = true;
      break;
    case ModelView::kSmoothed:
      if (!spec_.smoothing)
        throw ConfigurationError("smoothed averages require a smoothing kernel and scales");
      out.use_base_ = false;
      out.use_smoothing_ = true;
      break;
  }
  if (!out.use_base_) out.base_ = AtomicMeasure::dirac(Vec(static_cast<std::size_t>(d()), 0.0));
  return out;
}

Vec TransitionMeasureModel::center(std::span<const long long> k) const {
  if (zero_centers_) {
    if (k.size() != static_cast<std::size_t>(r())) throw ArgumentError("index must have r coordinates");
    return Vec(static_cast<std::size_t>(d()), 0.0);
  }
  return subsequence_values(spec_.subsequence, k);
}

Vec TransitionMeasureModel::delta(std::uint64_t seed, std::span<const long long> k) const {
  Vec out(static_cast<std::size_t>(d()));
  Stream s(seed, StreamTag::kDelta, k);
  spec_.perturbation.sample_into(s, out);
  return out;
}

Vec TransitionMeasureModel::epsilon(std::uint64_t seed, std::span<const long long> k) const {
  if (!has_smoothing()) return {};
  Vec out(static_cast<std::size_t>(d()));
  Stream s(seed, StreamTag::kEpsilon, k);
  spec_.smoothing->epsilon.sample_into(s, out);
  return out;
}

double TransitionMeasureModel::coefficient(std::span<const long long> k) const noexcept {
  const double s = spec_.coefficients.scale;
  if (spec_.coefficients.rule == CoefficientRule::kUnit) return s;
  return s / std::pow(static_cast<double>(max_norm(k)), r());
}

RealizedTerm TransitionMeasureModel::realize(std::uint64_t seed, std::span<const long long> k) const {
  RealizedTerm t;
  t.k.assign(k.begin(), k.end());
  t.center = center(k);
  t.position = t.center;
  const Vec dlt = delta(seed, k);
  for (std::size_t i = 0; i < dlt.size(); ++i) t.position[i] += dlt[i];
  t.eps = epsilon(seed, k);
  t.coefficient = coefficient(k);
  return t;
}

ExpectedValue TransitionMeasureModel::delta_transform(std::span<const double> t) const {
  if (!delta_mc_) return {spec_.perturbation.characteristic(t), 0.0, EstimateMethod::kClosedForm};
  const auto d = static_cast<std::size_t>(this->d());
  const std::size_t n = spec_.expectation.samples;
  cplx sum = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = dot(std::span<const double>(mc_->delta.data() + i * d, d), t);
    const cplx z = std::polar(1.0, phase);
    sum += z;
  }
  const cplx mean = sum / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = dot(std::span<const double>(mc_->delta.data() + i * d, d), t);
    sq += std::norm(std::polar(1.0, phase) - mean);
  }
  const double se = std::sqrt(sq / (static_cast<double>(n) * static_cast<double>(n - 1)));
  return {mean, se, EstimateMethod::kMonteCarlo};
}

ExpectedValue TransitionMeasureModel::smoothing_transform(std::span<const double> t) const {
  if (!has_smoothing()) return {1.0, 0.0, EstimateMethod::kClosedForm};
  const auto& sm = *spec_.smoothing;
  if (!eps_mc_) {
    double v = 1.0;
    bool quadrature = false;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const auto& law = sm.epsilon.coords[i];
      if (law.family == PerturbationFamily::kUniform || law.family == PerturbationFamily::kExponential)
        quadrature = true;
      v *= law_kernel_mean(law, sm.kernel, t[i]);
    }
    return {v, 0.0, quadrature ? EstimateMethod::kQuadrature : EstimateMethod::kClosedForm};
  }
  const auto d = static_cast<std::size_t>(this->d());
  const std::size_t n = spec_.expectation.samples;
  std::vector<double> vals(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    vals[i] = sm.kernel.scaled_transform(std::span<const double>(mc_->eps.data() + i * d, d), t);
    sum += vals[i];
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double v : vals) sq += (v - mean) * (v - mean);
  const double se = std::sqrt(sq / (static_cast<double>(n) * static_cast<double>(n - 1)));
  return {mean, se, EstimateMethod::kMonteCarlo};
}

cplx TransitionMeasureModel::base_transform(std::span<const double> t) const {
  return fourier_stieltjes(base_, t);
}

std::optional<SmoothingFactor> TransitionMeasureModel::smoothing_factor(std::span<const double> eps) const {
  if (!has_smoothing()) return std::nullopt;
  return SmoothingFactor{Vec(eps.begin(), eps.end()), spec_.smoothing->kernel};
}

double TransitionMeasureModel::realized_moment(const RealizedTerm& term) const {
  double m = 0.0;
  Vec p(static_cast<std::size_t>(d()));
  for (std::size_t j = 0; j < base_.size(); ++j) {
    auto th = base_.point(j);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = th[i] + term.position[i];
    m += std::abs(base_.weight(j)) * euclid(p);
  }
  if (has_smoothing() && !term.eps.empty())
    m += base_.variation_mass() *
         std::sqrt(spec_.smoothing->kernel.second_moment_1d() * dot(term.eps, term.eps));
  return m;
}

double TransitionMeasureModel::expected_moment(const RealizedTerm& term) const {
  double m = 0.0;
  Vec p(static_cast<std::size_t>(d()));
  for (std::size_t j = 0; j < base_.size(); ++j) {
    auto th = base_.point(j);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = th[i] + term.center[i];
    m += std::abs(base_.weight(j)) * euclid(p);
  }
  double spread = spec_.perturbation.euclidean_mean_bound();
  if (has_smoothing()) {
    double e2 = 0.0;
    for (const auto& c : spec_.smoothing->epsilon.coords) e2 += c.second_moment();
    spread += std::sqrt(spec_.smoothing->kernel.second_moment_1d() * e2);
  }
  return m + base_.variation_mass() * spread;
}

AtomicMeasure realize_measure(const TransitionMeasureModel& model, std::uint64_t seed,
                              std::span<const long long> k) {
  const Vec center = model.center(k);
  Vec shift = model.delta(seed, k);
  for (std::size_t i = 0; i < shift.size(); ++i) shift[i] += center[i];
  return model.base().shifted(shift);
}

cplx fourier_stieltjes(const AtomicMeasure& measure, std::span<const double> t,
                       const std::optional<SmoothingFactor>& smoothing) {
  if (t.size() != static_cast<std::size_t>(measure.d()))
    throw ArgumentError("fourier_stieltjes: t has wrong dimension");
  cplx sum = 0.0;
  for (std::size_t j = 0; j < measure.size(); ++j)
    sum += measure.weight(j) * std::polar(1.0, dot(measure.point(j), t));
  if (smoothing) sum *= smoothing->kernel.scaled_transform(smoothing->eps, t);
  return sum;
}

ExpectedValue expected_transform(const TransitionMeasureModel& model, std::span<const long long> k,
                                 std::span<const double> t) {
  if (t.size() != static_cast<std::size_t>(model.d()))
    throw ArgumentError("expected_transform: t has wrong dimension");
  const Vec c = model.center(k);
  const cplx lead = model.base_transform(t) * std::polar(1.0, dot(c, t));
  const ExpectedValue phi = model.delta_transform(t);
  const ExpectedValue zeta = model.smoothing_transform(t);
  ExpectedValue out;
  out.value = lead * phi.value * zeta.value;
  out.std_error = std::abs(lead) * (phi.std_error * std::abs(zeta.value) +
                                    std::abs(phi.value) * zeta.std_error);
  out.method = phi.method == EstimateMethod::kMonteCarlo || zeta.method == EstimateMethod::kMonteCarlo
                   ? EstimateMethod::kMonteCarlo
                   : (zeta.method == EstimateMethod::kQuadrature ? EstimateMethod::kQuadrature
                                                                 : EstimateMethod::kClosedForm);
  return out;
}

cplx truncated_transform(const AtomicMeasure& measure, std::span<const double> t, double L) {
  if (!(L > 0.0)) throw ArgumentError("truncated_transform: L must be > 0");
  if (t.size() != static_cast<std::size_t>(measure.d()))
    throw ArgumentError("truncated_transform: t has wrong dimension");
  cplx sum = 0.0;
  for (std::size_t j = 0; j < measure.size(); ++j)
    if (max_norm(measure.point(j)) <= L) sum += measure.weight(j) * std::polar(1.0, dot(measure.point(j), t));
  return sum;
}

}  // namespace rpavg
