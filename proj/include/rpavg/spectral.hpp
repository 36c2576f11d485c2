#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "rpavg/perturbation.hpp"

namespace rpavg {

using cplx = std::complex<double>;
using Frequency = std::vector<long long>;

// Trigonometric polynomial f(x) = sum_m c_m e^{2 pi i <m,x>} on the d-torus.
// The translation flow acts by T_t f(x) = f(x + t mod 1).
class TorusObservable {
 public:
  struct Term {
    Frequency m;
    cplx c;
  };

  TorusObservable() = default;
  // Duplicate frequencies are merged. With real_valued set, the conjugate
  // symmetry c_{-m} = conj(c_m) is checked to 1e-12.
  TorusObservable(int d, std::vector<Term> terms, bool real_valued = false);
  static TorusObservable constant(int d, cplx value);

  int d() const noexcept { return d_; }
  bool real_valued() const noexcept { return real_valued_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }
  double l2_norm_squared() const noexcept;
  TorusObservable shifted(std::span<const double> s) const;

  bool operator==(const TorusObservable&) const;

 private:
  int d_ = 1;
  bool real_valued_ = false;
  std::vector<Term> terms_;
};

// Atomic spectral measure: atoms at t_j in R^d with masses rho_j >= 0.
class SpectralMeasure {
 public:
  struct Atom {
    Vec location;
    double mass;
  };

  SpectralMeasure() = default;
  SpectralMeasure(int d, std::vector<Atom> atoms);

  int d() const noexcept { return d_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  double total_mass() const noexcept;
  // <T_s f, f> = int e^{i<s,t>} d mu_f(t)
  cplx correlation(std::span<const double> s) const;

 private:
  int d_ = 1;
  std::vector<Atom> atoms_;
};

SpectralMeasure spectral_measure(const TorusObservable& f);

// Growth function phi and its generalized inverse psi.
//   exponential: phi(x) = c 2^{x^gamma},  psi(y) = (log2(y/c))^{1/gamma} for y > c
//   linear:      phi(x) = c x,            psi(y) = y / c
struct GrowthFunction {
  enum class Kind { kExponential, kLinear };
  Kind kind = Kind::kExponential;
  double c = 1.0;
  double gamma = 0.5;

  static GrowthFunction exponential(double c, double gamma) { return {Kind::kExponential, c, gamma}; }
  static GrowthFunction linear(double c) { return {Kind::kLinear, c, 1.0}; }

  double log_phi(double x) const noexcept;  // natural log of phi(x)
  double psi(double y) const noexcept;
};

// (log psi)^+(y) = log2 psi(y) if psi(y) > 2, else 1
double log_psi_plus(const GrowthFunction& phi, double y) noexcept;
double logpsi_moment(const SpectralMeasure& mu, const GrowthFunction& phi);
// max(1, log log |t|), natural logs; equal to 1 whenever |t| <= e^e
double loglog_plus(double y) noexcept;
double loglog_moment(const SpectralMeasure& mu);

cplx evaluate(const TorusObservable& f, std::span<const double> x, std::span<const double> t);

using Multiplier = std::function<cplx(std::span<const double>)>;

// c_m -> K(2 pi m) c_m
TorusObservable apply_multiplier(const TorusObservable& f, const Multiplier& multiplier);

}  // namespace rpavg
