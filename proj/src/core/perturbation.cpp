#include "rpavg/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/sinc.hpp>

#include "rpavg/errors.hpp"

namespace rpavg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

double max_norm(std::span<const double> u) noexcept {
  double m = 0.0;
  for (double x : u) m = std::max(m, std::abs(x));
  return m;
}

long long max_norm(std::span<const long long> k) noexcept {
  long long m = 0;
  for (long long x : k) m = std::max(m, x < 0 ? -x : x);
  return m;
}

std::string to_string(PerturbationFamily f) {
  switch (f) {
    case PerturbationFamily::kConstant: return "constant";
    case PerturbationFamily::kUniform: return "uniform";
    case PerturbationFamily::kExponential: return "exponential";
    case PerturbationFamily::kPareto: return "pareto";
    case PerturbationFamily::kRademacherShift: return "rademacher_shift";
  }
  return "?";
}

PerturbationFamily perturbation_family_from_string(const std::string& s) {
  if (s == "constant") return PerturbationFamily::kConstant;
  if (s == "uniform") return PerturbationFamily::kUniform;
  if (s == "exponential") return PerturbationFamily::kExponential;
  if (s == "pareto") return PerturbationFamily::kPareto;
  if (s == "rademacher_shift") return PerturbationFamily::kRademacherShift;
  throw ConfigurationError("unknown perturbation family '" + s + "'");
}

void CoordinateLaw::validate() const {
  auto fail = [this](const std::string& what) {
    throw ParameterError(to_string(family) + ": " + what);
  };
  switch (family) {
    case PerturbationFamily::kConstant:
      if (!std::isfinite(p1) || p1 < 0.0) fail("constant must be finite and >= 0");
      break;
    case PerturbationFamily::kUniform:
      if (!finite_positive(p1)) fail("upper end a must be > 0");
      break;
    case PerturbationFamily::kExponential:
      if (!finite_positive(p1)) fail("rate must be > 0");
      break;
    case PerturbationFamily::kPareto:
      if (!finite_positive(p1)) fail("tail_index must be > 0");
      if (!finite_positive(p2)) fail("scale must be > 0");
      break;
    case PerturbationFamily::kRademacherShift:
      if (!std::isfinite(p1) || p1 < 1.0) fail("offset must be >= 1 to keep values non-negative");
      break;
  }
}

double CoordinateLaw::sample(Stream& s) const noexcept {
  switch (family) {
    case PerturbationFamily::kConstant: return p1;
    case PerturbationFamily::kUniform: return p1 * s.next_uniform();
    case PerturbationFamily::kExponential: return -std::log1p(-s.next_uniform()) / p1;
    case PerturbationFamily::kPareto: return p2 * std::pow(1.0 - s.next_uniform(), -1.0 / p1);
    case PerturbationFamily::kRademacherShift: return s.next_uniform() < 0.5 ? p1 - 1.0 : p1 + 1.0;
  }
  return 0.0;
}

double CoordinateLaw::tail(double x) const noexcept {
  switch (family) {
    case PerturbationFamily::kConstant: return p1 > x ? 1.0 : 0.0;
    case PerturbationFamily::kUniform:
      if (x < 0.0) return 1.0;
      return x >= p1 ? 0.0 : 1.0 - x / p1;
    case PerturbationFamily::kExponential: return x < 0.0 ? 1.0 : std::exp(-p1 * x);
    case PerturbationFamily::kPareto: return x < p2 ? 1.0 : std::pow(p2 / x, p1);
    case PerturbationFamily::kRademacherShift:
      if (x < p1 - 1.0) return 1.0;
      return x < p1 + 1.0 ? 0.5 : 0.0;
  }
  return 0.0;
}

double CoordinateLaw::mean() const noexcept {
  switch (family) {
    case PerturbationFamily::kConstant: return p1;
    case PerturbationFamily::kUniform: return 0.5 * p1;
    case PerturbationFamily::kExponential: return 1.0 / p1;
    case PerturbationFamily::kPareto: return p1 > 1.0 ? p1 * p2 / (p1 - 1.0) : kInf;
    case PerturbationFamily::kRademacherShift: return p1;
  }
  return kInf;
}

double CoordinateLaw::second_moment() const noexcept {
  switch (family) {
    case PerturbationFamily::kConstant: return p1 * p1;
    case PerturbationFamily::kUniform: return p1 * p1 / 3.0;
    case PerturbationFamily::kExponential: return 2.0 / (p1 * p1);
    case PerturbationFamily::kPareto: return p1 > 2.0 ? p1 * p2 * p2 / (p1 - 2.0) : kInf;
    case PerturbationFamily::kRademacherShift: return p1 * p1 + 1.0;
  }
  return kInf;
}

double CoordinateLaw::upper_support() const noexcept {
  switch (family) {
    case PerturbationFamily::kConstant: return p1;
    case PerturbationFamily::kUniform: return p1;
    case PerturbationFamily::kRademacherShift: return p1 + 1.0;
    default: return kInf;
  }
}

bool CoordinateLaw::has_closed_form_cf() const noexcept {
  return family != PerturbationFamily::kPareto;
}

std::complex<double> CoordinateLaw::characteristic(double t) const {
  using namespace std::complex_literals;
  switch (family) {
    case PerturbationFamily::kConstant: return std::polar(1.0, p1 * t);
    case PerturbationFamily::kUniform: {
      // (e^{iat} - 1)/(iat) = e^{iat/2} sinc(at/2), stable near 0
      const double half = 0.5 * p1 * t;
      const double sn = std::sin(half), cs = std::cos(half);
      const double sinc = std::abs(half) < 1e-4 ? boost::math::sinc_pi(half) : sn / half;
      return {sinc * cs, sinc * sn};
    }
    case PerturbationFamily::kExponential: return p1 / (p1 - 1i * t);
    case PerturbationFamily::kRademacherShift: return std::polar(std::cos(t), p1 * t);
    case PerturbationFamily::kPareto: break;
  }
  throw ConfigurationError("no closed-form characteristic function for " + to_string(family));
}

PerturbationSpec PerturbationSpec::iid(PerturbationFamily family, int d, double p1, double p2) {
  PerturbationSpec s;
  s.d = d;
  s.coords.assign(static_cast<std::size_t>(std::max(d, 0)), CoordinateLaw{family, p1, p2});
  return s;
}

void PerturbationSpec::validate() const {
  if (d < 1) throw ParameterError("perturbation dimension d must be >= 1");
  if (coords.size() != static_cast<std::size_t>(d))
    throw ParameterError("perturbation needs one coordinate law per dimension");
  for (const auto& c : coords) c.validate();
}

bool PerturbationSpec::deterministic() const noexcept {
  return std::all_of(coords.begin(), coords.end(), [](const auto& c) { return c.is_degenerate(); });
}

bool PerturbationSpec::has_closed_form_cf() const noexcept {
  return std::all_of(coords.begin(), coords.end(),
                     [](const auto& c) { return c.has_closed_form_cf(); });
}

void PerturbationSpec::sample_into(Stream& s, std::span<double> out) const noexcept {
  for (std::size_t i = 0; i < coords.size(); ++i) out[i] = coords[i].sample(s);
}

double PerturbationSpec::max_tail(double x) const noexcept {
  double stay = 1.0;
  for (const auto& c : coords) stay *= 1.0 - c.tail(x);
  return 1.0 - stay;
}

double PerturbationSpec::euclidean_mean_bound() const noexcept {
  double second = 0.0, first = 0.0;
  for (const auto& c : coords) {
    second += c.second_moment();
    first += c.mean();
  }
  return std::min(std::sqrt(second), first);
}

std::complex<double> PerturbationSpec::characteristic(std::span<const double> t) const {
  std::complex<double> v = 1.0;
  for (std::size_t i = 0; i < coords.size(); ++i) v *= coords[i].characteristic(t[i]);
  return v;
}

std::vector<Vec> sample_delta(const PerturbationSpec& spec, std::size_t count, std::uint64_t seed,
                              StreamTag tag) {
  spec.validate();
  if (count < 1) throw ArgumentError("sample_delta: count must be >= 1");
  std::vector<Vec> out(count, Vec(static_cast<std::size_t>(spec.d)));
  for (std::size_t i = 0; i < count; ++i) {
    const long long k = static_cast<long long>(i) + 1;
    Stream s(seed, tag, std::span<const long long>(&k, 1));
    spec.sample_into(s, out[i]);
  }
  return out;
}

std::string to_string(SubsequenceFamily f) {
  switch (f) {
    case SubsequenceFamily::kLinear: return "linear";
    case SubsequenceFamily::kPower: return "power";
    case SubsequenceFamily::kLacunaryExponential: return "lacunary_exponential";
  }
  return "?";
}

SubsequenceFamily subsequence_family_from_string(const std::string& s) {
  if (s == "linear") return SubsequenceFamily::kLinear;
  if (s == "power") return SubsequenceFamily::kPower;
  if (s == "lacunary_exponential" || s == "lacunary") return SubsequenceFamily::kLacunaryExponential;
  throw ConfigurationError("unknown subsequence family '" + s + "'");
}

void SubsequenceSpec::validate() const {
  if (r < 1) throw ParameterError("subsequence index dimension r must be >= 1");
  if (d < 1) throw ParameterError("subsequence value dimension d must be >= 1");
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ParameterError("subsequence beta must be > 0");
  if (family == SubsequenceFamily::kPower && !(power > 0.0))
    throw ParameterError("power subsequence needs p > 0");
  if (!scales.empty() && scales.size() != static_cast<std::size_t>(d))
    throw ParameterError("subsequence scales must have one entry per dimension");
  for (double s : scales)
    if (!std::isfinite(s) || s < 0.0) throw ParameterError("subsequence scales must be >= 0");
  if (certificate < 0.0) throw ParameterError("growth certificate constant must be >= 0");
}

double SubsequenceSpec::certificate_constant() const {
  if (certificate > 0.0) return certificate;
  double max_scale = scales.empty() ? 1.0 : *std::max_element(scales.begin(), scales.end());
  const double g = growth_exponent();
  double sup = 1.0;
  if (family != SubsequenceFamily::kLacunaryExponential) {
    // sup_{x>=1} x^p 2^{-x^g}; interior critical point x* = (p/(g ln 2))^{1/g}
    const double p = family == SubsequenceFamily::kLinear ? 1.0 : power;
    const double xstar = std::pow(p / (g * std::numbers::ln2), 1.0 / g);
    sup = xstar > 1.0 ? std::exp(p * std::log(xstar) - p / g) : 0.5;
  }
  return max_scale * sup * (1.0 + 1e-12);
}

long long SubsequenceSpec::largest_admissible_index() const noexcept {
  const double g = growth_exponent();
  const double bound = std::pow(1024.0, 1.0 / g);
  if (!(bound < 9.0e18)) return std::numeric_limits<long long>::max();
  auto k = static_cast<long long>(std::floor(bound));
  while (k > 0 && std::pow(static_cast<double>(k), g) >= 1024.0) --k;
  return k;
}

Vec subsequence_values(const SubsequenceSpec& spec, std::span<const long long> k) {
  if (k.size() != static_cast<std::size_t>(spec.r))
    throw ArgumentError("subsequence index must have r coordinates");
  for (long long ki : k)
    if (ki < 1) throw ArgumentError("subsequence index coordinates must be >= 1");
  const double g = spec.growth_exponent();
  const long long kn = max_norm(k);
  const double growth_log2 = std::pow(static_cast<double>(kn), g);
  if (!(growth_log2 < 1024.0)) {
    const long long kmax = spec.largest_admissible_index();
    std::ostringstream os;
    os << "2^{|k|^{r beta}} overflows for |k| = " << kn << "; largest admissible |k| is " << kmax;
    throw RangeError(os.str(), kmax);
  }
  Vec out(static_cast<std::size_t>(spec.d));
  for (int i = 0; i < spec.d; ++i) {
    const auto x = static_cast<double>(k[static_cast<std::size_t>(i % spec.r)]);
    double v = 0.0;
    switch (spec.family) {
      case SubsequenceFamily::kLinear: v = x; break;
      case SubsequenceFamily::kPower: v = std::pow(x, spec.power); break;
      case SubsequenceFamily::kLacunaryExponential: v = std::floor(std::exp2(std::pow(x, g))); break;
    }
    out[static_cast<std::size_t>(i)] = v * (spec.scales.empty() ? 1.0 : spec.scales[static_cast<std::size_t>(i)]);
  }
  const double c = spec.certificate_constant();
  if (max_norm(out) > c * std::exp2(growth_log2) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "growth certificate |n_k| <= " << c << " * 2^{|k|^{r beta}} violated at |k| = " << kn;
    throw RangeError(os.str(), kn - 1);
  }
  return out;
}

TailReport check_tail_condition(const PerturbationSpec& spec, double beta, int r, long long K) {
  if (!(beta > 0.0 && beta < 1.0)) throw ArgumentError("check_tail_condition: need 0 < beta < 1");
  if (K < 1) throw ArgumentError("check_tail_condition: need K >= 1");
  if (r < 1) throw ArgumentError("check_tail_condition: need r >= 1");
  spec.validate();
  TailReport rep;
  rep.method = TailMethod::kClosedForm;
  rep.partial_sums.reserve(static_cast<std::size_t>(K));
  double sum = 0.0, inc = 0.0;
  for (long long k = 1; k <= K; ++k) {
    const auto kd = static_cast<double>(k);
    const double threshold = std::exp2(std::pow(kd, r * beta));  // inf once it overflows
    inc = std::pow(kd, r - 1) * spec.max_tail(threshold);
    sum += inc;
    rep.partial_sums.push_back(sum);
  }
  rep.last_increment = inc;
  rep.converged = inc < 1e-12;
  return rep;
}

}  // namespace rpavg
