#include "rpavg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "rpavg/errors.hpp"

namespace rpavg {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 2 pi <m, x> reduced mod 2 pi before the trig call.
double torus_phase(const Frequency& m, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double prod = static_cast<double>(m[i]) * x[i];
    acc += prod - std::floor(prod);
  }
  return kTwoPi * (acc - std::floor(acc));
}

}  // namespace

TorusObservable::TorusObservable(int d, std::vector<Term> terms, bool real_valued)
    : d_(d), real_valued_(real_valued) {
  if (d < 1) throw ArgumentError("TorusObservable: dimension must be >= 1");
  std::map<Frequency, cplx> merged;
  for (auto& t : terms) {
    if (t.m.size() != static_cast<std::size_t>(d))
      throw ArgumentError("TorusObservable: frequency dimension mismatch");
    if (!std::isfinite(t.c.real()) || !std::isfinite(t.c.imag()))
      throw ArgumentError("TorusObservable: non-finite coefficient");
    merged[t.m] += t.c;
  }
  terms_.reserve(merged.size());
  for (auto& [m, c] : merged) terms_.push_back({m, c});
  if (real_valued_) {
    for (const auto& [m, c] : merged) {
      Frequency neg = m;
      for (auto& v : neg) v = -v;
      auto it = merged.find(neg);
      const cplx partner = it == merged.end() ? cplx(0.0) : it->second;
      if (std::abs(partner - std::conj(c)) > 1e-12 * std::max(1.0, std::abs(c)))
        throw ParameterError("TorusObservable: real_valued requires c_{-m} = conj(c_m)");
    }
  }
}

TorusObservable TorusObservable::constant(int d, cplx value) {
  return TorusObservable(d, {Term{Frequency(static_cast<std::size_t>(d), 0), value}},
                         value.imag() == 0.0);
}

double TorusObservable::l2_norm_squared() const noexcept {
  double s = 0.0;
  for (const auto& t : terms_) s += std::norm(t.c);
  return s;
}

TorusObservable TorusObservable::shifted(std::span<const double> s) const {
  std::vector<Term> out = terms_;
  for (auto& t : out) t.c *= std::polar(1.0, torus_phase(t.m, s));
  TorusObservable r(d_, std::move(out), false);
  r.real_valued_ = real_valued_;
  return r;
}

bool TorusObservable::operator==(const TorusObservable& o) const {
  if (d_ != o.d_ || terms_.size() != o.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].m != o.terms_[i].m || terms_[i].c != o.terms_[i].c) return false;
  return true;
}

SpectralMeasure::SpectralMeasure(int d, std::vector<Atom> atoms) : d_(d), atoms_(std::move(atoms)) {
  if (d < 1) throw ArgumentError("SpectralMeasure: dimension must be >= 1");
  for (const auto& a : atoms_) {
    if (a.location.size() != static_cast<std::size_t>(d))
      throw ArgumentError("SpectralMeasure: atom dimension mismatch");
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass))
      throw ArgumentError("SpectralMeasure: masses must be finite and >= 0");
  }
}

double SpectralMeasure::total_mass() const noexcept {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

cplx SpectralMeasure::correlation(std::span<const double> s) const {
  cplx acc = 0.0;
  for (const auto& a : atoms_) {
    double ph = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) ph += s[i] * a.location[i];
    acc += a.mass * std::polar(1.0, ph);
  }
  return acc;
}

SpectralMeasure spectral_measure(const TorusObservable& f) {
  std::vector<SpectralMeasure::Atom> atoms;
  atoms.reserve(f.terms().size());
  for (const auto& t : f.terms()) {
    Vec loc(t.m.size());
    for (std::size_t i = 0; i < loc.size(); ++i) loc[i] = kTwoPi * static_cast<double>(t.m[i]);
    atoms.push_back({std::move(loc), std::norm(t.c)});
  }
  return SpectralMeasure(f.d(), std::move(atoms));
}

double GrowthFunction::log_phi(double x) const noexcept {
  if (kind == Kind::kLinear) return std::log(c * x);
  return std::log(c) + std::pow(x, gamma) * std::numbers::ln2;
}

double GrowthFunction::psi(double y) const noexcept {
  if (kind == Kind::kLinear) return y / c;
  if (y <= c) return 0.0;
  return std::pow(std::log2(y / c), 1.0 / gamma);
}

double log_psi_plus(const GrowthFunction& phi, double y) noexcept {
  const double p = phi.psi(y);
  return p > 2.0 ? std::log2(p) : 1.0;
}

double logpsi_moment(const SpectralMeasure& mu, const GrowthFunction& phi) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.mass * log_psi_plus(phi, max_norm(a.location));
  return s;
}

double loglog_plus(double y) noexcept {
  if (!(y > std::numbers::e)) return 1.0;
  return std::max(1.0, std::log(std::log(y)));
}

double loglog_moment(const SpectralMeasure& mu) {
  double s = 0.0;
  for (const auto& a : mu.atoms()) s += a.mass * loglog_plus(max_norm(a.location));
  return s;
}

cplx evaluate(const TorusObservable& f, std::span<const double> x, std::span<const double> t) {
  if (x.size() != static_cast<std::size_t>(f.d()) || t.size() != x.size())
    throw ArgumentError("evaluate: point dimension mismatch");
  Vec xt(x.begin(), x.end());
  for (std::size_t i = 0; i < xt.size(); ++i) xt[i] += t[i];
  cplx acc = 0.0;
  for (const auto& term : f.terms()) acc += term.c * std::polar(1.0, torus_phase(term.m, xt));
  return acc;
}

TorusObservable apply_multiplier(const TorusObservable& f, const Multiplier& multiplier) {
  std::vector<TorusObservable::Term> out;
  out.reserve(f.terms().size());
  Vec t(static_cast<std::size_t>(f.d()));
  for (const auto& term : f.terms()) {
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = kTwoPi * static_cast<double>(term.m[i]);
    out.push_back({term.m, multiplier(t) * term.c});
  }
  return TorusObservable(f.d(), std::move(out), false);
}

}  // namespace rpavg
