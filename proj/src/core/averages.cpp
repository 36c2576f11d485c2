#include "rpavg/averages.hpp"

#include <cmath>
#include <numbers>

#include "rpavg/errors.hpp"
#include "rpavg/kernel_engine.hpp"
#include "rpavg/rng.hpp"

namespace rpavg {

namespace {

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool realization_free(const TransitionMeasureModel& model) {
  const auto& s = model.spec();
  return s.perturbation.deterministic() &&
         (!model.has_smoothing() || s.smoothing->epsilon.deterministic());
}

Vec angular(const TorusObservable::Term& term) {
  Vec t(term.m.size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 2.0 * std::numbers::pi * static_cast<double>(term.m[i]);
  return t;
}

// nuhat_k(t) - E nuhat_k(t) with the t-only factors passed in.
cplx centered_term(const TransitionMeasureModel& model, const RealizedTerm& term,
                   std::span<const double> t, cplx expected_factor) {
  double z = 1.0;
  if (model.has_smoothing()) z = model.spec().smoothing->kernel.scaled_transform(term.eps, t);
  return z * std::polar(1.0, dot(term.position, t)) -
         expected_factor * std::polar(1.0, dot(term.center, t));
}

}  // namespace

std::string to_string(AverageFamily f) {
  switch (f) {
    case AverageFamily::kK: return "K";
    case AverageFamily::kG: return "G";
    case AverageFamily::kH: return "H";
    case AverageFamily::kF: return "F";
    case AverageFamily::kE: return "E";
    case AverageFamily::kD: return "D";
  }
  return "?";
}

AverageFamily average_family_from_string(const std::string& s) {
  for (auto f : {AverageFamily::kK, AverageFamily::kG, AverageFamily::kH, AverageFamily::kF,
                 AverageFamily::kE, AverageFamily::kD})
    if (s == to_string(f)) return f;
  throw ConfigurationError("unknown average family '" + s + "'");
}

TransitionMeasureModel family_model(AverageFamily family, const TransitionMeasureModel& model) {
  switch (family) {
    case AverageFamily::kG: return model.view(ModelView::kPointMass);
    case AverageFamily::kH: return model.view(ModelView::kPerturbationOnly);
    case AverageFamily::kF: return model.view(ModelView::kSmoothed);
    default: return model;
  }
}

double normalization(const TransitionMeasureModel& model, long long n) {
  if (n < 1) throw ArgumentError("averages need n >= 1");
  return std::pow(static_cast<double>(n), model.r()) * model.term_mass();
}

AverageKernel::AverageKernel(AverageFamily family, const TransitionMeasureModel& model,
                             std::uint64_t seed, long long n)
    : family_(family),
      model_(family_model(family, model)),
      n_(n),
      b_(rpavg::normalization(model_, n)),
      vanishes_(family == AverageFamily::kD && realization_free(model_)) {
  const IndexSet set = enumerate_shells(model_.r(), 0, n);
  terms_.reserve(set.indices.size());
  for (const auto& k : set.indices) terms_.push_back(model_.realize(seed, k));
}

cplx AverageKernel::operator()(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(model_.d())) throw ArgumentError("t has wrong dimension");
  if (vanishes_) return 0.0;
  const cplx theta = model_.base_transform(t);
  const bool want_realized = family_ != AverageFamily::kE;
  const bool want_expected = family_ == AverageFamily::kE || family_ == AverageFamily::kD;
  cplx expected_factor = 0.0;
  if (want_expected)
    expected_factor = model_.delta_transform(t).value * model_.smoothing_transform(t).value;
  const SmoothingKernel* kernel = model_.has_smoothing() ? &model_.spec().smoothing->kernel : nullptr;
  cplx realized = 0.0, expected = 0.0;
  for (const auto& term : terms_) {
    if (want_realized) {
      const double z = kernel ? kernel->scaled_transform(term.eps, t) : 1.0;
      realized += z * std::polar(1.0, dot(term.position, t));
    }
    if (want_expected) expected += std::polar(1.0, dot(term.center, t));
  }
  const cplx K = theta * realized / b_;
  const cplx E = theta * expected_factor * expected / b_;
  switch (family_) {
    case AverageFamily::kE: return E;
    case AverageFamily::kD: return K - E;
    default: return K;
  }
}

cplx kernel_value(AverageFamily family, const TransitionMeasureModel& model, std::uint64_t seed,
                  long long n, std::span<const double> t) {
  return AverageKernel(family, model, seed, n)(t);
}

TorusObservable apply_average(AverageFamily family, const TransitionMeasureModel& model,
                              std::uint64_t seed, long long n, const TorusObservable& f) {
  if (f.d() != model.d()) throw ArgumentError("observable and model dimensions differ");
  const AverageKernel kernel(family, model, seed, n);
  return apply_multiplier(f, [&](std::span<const double> t) { return kernel(t); });
}

std::string to_string(MomentKind k) { return k == MomentKind::kLogLog ? "loglog" : "logpsi"; }

MomentKind moment_kind_from_string(const std::string& s) {
  if (s == "loglog") return MomentKind::kLogLog;
  if (s == "logpsi") return MomentKind::kLogPsi;
  throw ConfigurationError("unknown moment '" + s + "' (expected loglog or logpsi)");
}

std::vector<long long> geometric_indices(double rho, int N) {
  if (!(rho > 1.0)) throw ArgumentError("rho must be > 1");
  if (N < 1) throw ArgumentError("N must be >= 1");
  std::vector<long long> out;
  double v = 1.0;
  for (int j = 1; j <= N; ++j) {
    v *= rho;
    if (!(v < 9.0e15)) throw RangeError("rho^N exceeds the exactly representable index range", j - 1);
    const auto idx = static_cast<long long>(std::floor(v));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

SquareFunctionResult square_function(const TransitionMeasureModel& model, std::uint64_t seed,
                                     const SpectralMeasure& mu, double rho, int N,
                                     MomentKind moment, std::optional<GrowthFunction> phi) {
  if (mu.d() != model.d()) throw ArgumentError("spectral measure and model dimensions differ");
  SquareFunctionResult res;
  res.rho = rho;
  res.N = N;
  res.indices = geometric_indices(rho, N);
  res.moment = moment == MomentKind::kLogLog
                   ? loglog_moment(mu)
                   : logpsi_moment(mu, phi ? *phi : default_growth(model.spec().subsequence));
  if (realization_free(model) || mu.atoms().empty()) {
    res.value = 0.0;
    res.ratio = 0.0;
    return res;
  }
  const auto& atoms = mu.atoms();
  std::vector<cplx> factor(atoms.size()), running(atoms.size(), 0.0), theta(atoms.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    const auto& t = atoms[a].location;
    theta[a] = model.base_transform(t);
    factor[a] = model.delta_transform(t).value * model.smoothing_transform(t).value;
  }
  const long long top = res.indices.back();
  std::size_t next = 0;
  for (long long j = 1; j <= top; ++j) {
    const IndexSet shell = enumerate_shells(model.r(), j - 1, j);
    for (const auto& k : shell.indices) {
      const RealizedTerm term = model.realize(seed, k);
      for (std::size_t a = 0; a < atoms.size(); ++a)
        running[a] += centered_term(model, term, atoms[a].location, factor[a]);
    }
    if (j == res.indices[next]) {
      const double b = normalization(model, j);
      for (std::size_t a = 0; a < atoms.size(); ++a)
        res.value += atoms[a].mass * std::norm(theta[a] * running[a] / b);
      ++next;
    }
  }
  res.ratio = res.moment > 0.0 ? res.value / res.moment : 0.0;
  return res;
}

SquareFunctionResult square_function(const TransitionMeasureModel& model, std::uint64_t seed,
                                     const TorusObservable& f, double rho, int N,
                                     MomentKind moment, std::optional<GrowthFunction> phi) {
  return square_function(model, seed, spectral_measure(f), rho, N, moment, phi);
}

SeriesState::SeriesState(TorusObservable f, std::vector<std::vector<cplx>> cumulative)
    : f_(std::move(f)), cumulative_(std::move(cumulative)) {
  if (cumulative_.empty()) throw ArgumentError("SeriesState needs at least S_0");
}

TorusObservable SeriesState::partial_sum(long long j) const {
  if (j < 0 || j > n()) throw ArgumentError("partial sum index out of range");
  const auto& mult = cumulative_[static_cast<std::size_t>(j)];
  std::vector<TorusObservable::Term> terms;
  terms.reserve(f_.terms().size());
  for (std::size_t i = 0; i < f_.terms().size(); ++i)
    terms.push_back({f_.terms()[i].m, mult[i] * f_.terms()[i].c});
  return TorusObservable(f_.d(), std::move(terms));
}

double SeriesState::increment(long long a, long long b) const {
  if (a < 0 || b < 0 || a > n() || b > n()) throw ArgumentError("increment index out of range");
  const auto& x = cumulative_[static_cast<std::size_t>(a)];
  const auto& y = cumulative_[static_cast<std::size_t>(b)];
  double s = 0.0;
  for (std::size_t i = 0; i < f_.terms().size(); ++i) s += std::norm((y[i] - x[i]) * f_.terms()[i].c);
  return std::sqrt(s);
}

std::vector<cplx> SeriesState::sample(long long j, std::span<const Vec> points) const {
  const TorusObservable s = partial_sum(j);
  const Vec zero(static_cast<std::size_t>(f_.d()), 0.0);
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(evaluate(s, x, zero));
  return out;
}

SeriesState series_partial_sum(const TransitionMeasureModel& model, std::uint64_t seed,
                               const TorusObservable& f, long long n) {
  if (n < 0) throw ArgumentError("series_partial_sum: n must be >= 0");
  if (f.d() != model.d()) throw ArgumentError("observable and model dimensions differ");
  const TransitionMeasureModel smoothed = model.view(ModelView::kSmoothed);
  const auto& fterms = f.terms();
  std::vector<Vec> ts;
  std::vector<cplx> factor;
  for (const auto& term : fterms) {
    ts.push_back(angular(term));
    factor.push_back(smoothed.delta_transform(ts.back()).value *
                     smoothed.smoothing_transform(ts.back()).value);
  }
  std::vector<std::vector<cplx>> cumulative(1, std::vector<cplx>(fterms.size(), 0.0));
  const bool zero = realization_free(smoothed);
  for (long long j = 1; j <= n; ++j) {
    std::vector<cplx> next = cumulative.back();
    if (!zero) {
      const double w = 1.0 / std::pow(static_cast<double>(j), smoothed.r());
      const IndexSet shell = enumerate_shells(smoothed.r(), j - 1, j);
      for (const auto& k : shell.indices) {
        const RealizedTerm term = smoothed.realize(seed, k);
        for (std::size_t i = 0; i < fterms.size(); ++i)
          next[i] += w * centered_term(smoothed, term, ts[i], factor[i]);
      }
    }
    cumulative.push_back(std::move(next));
  }
  return SeriesState(f, std::move(cumulative));
}

MoriczReport moricz_check(std::span<const MoriczSample> samples, std::span<const double> alpha,
                          std::span<const double> A, double gamma) {
  if (alpha.size() != A.size()) throw ArgumentError("moricz_check: alpha and A lengths differ");
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (!(alpha[i] >= 0.0)) throw ArgumentError("moricz_check: alpha must be non-negative");
    if (!(A[i] > 0.0)) throw ArgumentError("moricz_check: A must be positive");
    if (i > 0 && A[i] < A[i - 1]) throw ArgumentError("moricz_check: A must be non-decreasing");
  }
  std::vector<double> prefix(alpha.size() + 1, 0.0);
  for (std::size_t i = 0; i < alpha.size(); ++i) prefix[i + 1] = prefix[i] + alpha[i];

  MoriczReport rep;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    const double lg = std::log(n);
    rep.bound_constant += alpha[i] * A[i] * lg * lg;
    rep.growth_constant = std::max(rep.growth_constant, A[i] / std::pow(n, gamma));
  }
  for (const auto& s : samples) {
    if (s.n < 0 || s.m <= s.n || static_cast<std::size_t>(s.m) > alpha.size())
      throw ArgumentError("moricz_check: sample (n, m) outside the supplied weights");
    const double lhs = s.norm * s.norm;
    const double rhs = A[static_cast<std::size_t>(s.m - 1)] *
                       (prefix[static_cast<std::size_t>(s.m)] - prefix[static_cast<std::size_t>(s.n)]);
    if (rhs > 0.0) rep.max_ratio = std::max(rep.max_ratio, lhs / rhs);
    else if (lhs > 0.0) rep.max_ratio = std::numeric_limits<double>::infinity();
    if (lhs > rhs * (1.0 + 1e-12)) {
      rep.holds = false;
      rep.violations.push_back({s.n, s.m, lhs, rhs});
    }
  }
  return rep;
}

std::vector<double> series_alpha(int r, double f_norm_sq, long long K) {
  std::vector<double> a(static_cast<std::size_t>(std::max(0LL, K)));
  for (std::size_t i = 0; i < a.size(); ++i)
    a[i] = 4.0 * r * f_norm_sq / std::pow(static_cast<double>(i + 1), r + 1);
  return a;
}

std::vector<double> series_growth(int r, double beta, long long K) {
  std::vector<double> a(static_cast<std::size_t>(std::max(0LL, K)));
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::pow(static_cast<double>(i + 1), r * beta);
  return a;
}

std::vector<Vec> convergence_sample_points(int d, std::uint64_t seed, std::size_t per_kind) {
  if (d < 1) throw ArgumentError("dimension must be >= 1");
  // Generalized golden ratio: the unique positive root of x^{d+1} = x + 1.
  double g = 2.0;
  for (int it = 0; it < 64; ++it) g = std::pow(1.0 + g, 1.0 / (d + 1));
  std::vector<Vec> pts;
  pts.reserve(2 * per_kind);
  for (std::size_t i = 0; i < per_kind; ++i) {
    Vec x(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      const double a = 1.0 / std::pow(g, j + 1);
      x[static_cast<std::size_t>(j)] = std::fmod(0.5 + a * static_cast<double>(i), 1.0);
    }
    pts.push_back(std::move(x));
  }
  for (std::size_t i = 0; i < per_kind; ++i) {
    const long long idx = static_cast<long long>(i);
    Stream s(seed, StreamTag::kSamplePoints, std::span<const long long>(&idx, 1));
    Vec x(static_cast<std::size_t>(d));
    for (auto& v : x) v = s.next_uniform();
    pts.push_back(std::move(x));
  }
  return pts;
}

}  // namespace rpavg
