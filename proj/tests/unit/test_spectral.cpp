#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "rpavg/spectral.hpp"

using namespace rpavg;
using namespace std::complex_literals;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// <T_s f, f> = int f(x + s) conj(f(x)) dx by a midpoint rule with n points per axis.
cplx correlation_by_quadrature(const TorusObservable& f, std::span<const double> s, int n) {
  const int d = f.d();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  cplx acc = 0.0;
  long long count = 0;
  while (true) {
    Vec x(static_cast<std::size_t>(d)), xs(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      x[static_cast<std::size_t>(i)] = (idx[static_cast<std::size_t>(i)] + 0.5) / n;
      xs[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)] + s[static_cast<std::size_t>(i)];
    }
    acc += oracle::eval_observable(f, xs) * std::conj(oracle::eval_observable(f, x));
    ++count;
    int p = 0;
    while (p < d && ++idx[static_cast<std::size_t>(p)] == n) idx[static_cast<std::size_t>(p++)] = 0;
    if (p == d) break;
  }
  return acc / static_cast<double>(count);
}
}  // namespace

TEST_CASE("spectral measure examples") {
  const TorusObservable e1(1, {{{1}, 1.0}});
  const SpectralMeasure mu = spectral_measure(e1);
  REQUIRE(mu.atoms().size() == 1);
  CHECK(mu.atoms()[0].location[0] == doctest::Approx(kTwoPi));
  CHECK(mu.atoms()[0].mass == 1.0);

  const TorusObservable cosine(1, {{{1}, 0.5}, {{-1}, 0.5}}, true);
  const SpectralMeasure mc = spectral_measure(cosine);
  REQUIRE(mc.atoms().size() == 2);
  for (const auto& a : mc.atoms()) {
    CHECK(std::abs(a.location[0]) == doctest::Approx(kTwoPi));
    CHECK(a.mass == doctest::Approx(0.25));
  }
}

TEST_CASE("correlation matches torus quadrature") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const TorusObservable f = fixtures::random_observable(rng, 1, 10, 12);
  const SpectralMeasure mu = spectral_measure(f);
  for (int i = 0; i < 20; ++i) {
    const double s[] = {u(rng)};
    CHECK(std::abs(correlation_by_quadrature(f, s, 2048) - mu.correlation(s)) < 1e-8);
  }
  const TorusObservable g = fixtures::random_observable(rng, 2, 10, 6);
  const SpectralMeasure mg = spectral_measure(g);
  for (int i = 0; i < 5; ++i) {
    const double s[] = {u(rng), u(rng)};
    CHECK(std::abs(correlation_by_quadrature(g, s, 48) - mg.correlation(s)) < 1e-8);
  }
}

TEST_CASE("parseval against quadrature and total mass") {
  std::mt19937_64 rng(4);
  for (int d : {1, 2}) {
    for (int trial = 0; trial < 5; ++trial) {
      const TorusObservable f = fixtures::random_observable(rng, d, 8, 9, trial % 2 == 0);
      const double coef = f.l2_norm_squared();
      CHECK(std::abs(oracle::torus_l2_squared(f, d == 1 ? 2048 : 45) - coef) < 1e-8 * std::max(1.0, coef));
      CHECK(std::abs(spectral_measure(f).total_mass() - coef) < 1e-12 * std::max(1.0, coef));
    }
  }
}

TEST_CASE("spectral masses are translation invariant") {
  std::mt19937_64 rng(6);
  const TorusObservable f = fixtures::random_observable(rng, 2, 7, 5);
  const double s[] = {0.123, -4.56};
  const SpectralMeasure a = spectral_measure(f), b = spectral_measure(f.shifted(s));
  REQUIRE(a.atoms().size() == b.atoms().size());
  for (std::size_t j = 0; j < a.atoms().size(); ++j) {
    CHECK(a.atoms()[j].location == b.atoms()[j].location);
    CHECK(a.atoms()[j].mass == doctest::Approx(b.atoms()[j].mass).epsilon(1e-14));
  }
}

TEST_CASE("logpsi moment") {
  const auto phi = GrowthFunction::exponential(1.0, 0.5);
  const SpectralMeasure one(1, {{{1.0}, 1.0}});
  CHECK(logpsi_moment(one, phi) == 1.0);
  const SpectralMeasure big(1, {{{std::exp2(16.0)}, 1.0}});
  CHECK(logpsi_moment(big, phi) == doctest::Approx(8.0).epsilon(1e-14));
  const SpectralMeasure both(1, {{{1.0}, 1.0}, {{std::exp2(16.0)}, 2.0}});
  CHECK(logpsi_moment(both, phi) == doctest::Approx(logpsi_moment(one, phi) + 2.0 * logpsi_moment(big, phi)));
}

TEST_CASE("loglog moment") {
  const double e = std::numbers::e;
  CHECK(loglog_moment(SpectralMeasure(1, {{{std::exp(e)}, 1.0}})) == doctest::Approx(1.0));
  CHECK(loglog_moment(SpectralMeasure(1, {{{std::exp(e * e)}, 2.0}})) == doctest::Approx(4.0));
  CHECK(loglog_moment(SpectralMeasure(1, {{{0.5}, 1.0}})) == 1.0);
  // The max-coordinate norm picks the larger coordinate.
  CHECK(loglog_moment(SpectralMeasure(2, {{{0.1, -std::exp(e * e)}, 1.0}})) == doctest::Approx(2.0));
}

TEST_CASE("evaluate and the flow property") {
  const double zero[] = {0.0}, quarter[] = {0.25};
  CHECK(evaluate(TorusObservable::constant(1, 1.0), quarter, quarter) == cplx(1.0));
  const TorusObservable e1(1, {{{1}, 1.0}});
  CHECK(std::abs(evaluate(e1, zero, quarter) - 1i) < 1e-15);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const TorusObservable f = fixtures::random_observable(rng, 2, 6, 7);
  for (int i = 0; i < 20; ++i) {
    const double x[] = {u(rng), u(rng)}, s[] = {u(rng), u(rng)}, t[] = {u(rng), u(rng)};
    const double st[] = {s[0] + t[0], s[1] + t[1]};
    const double xs[] = {oracle::frac(x[0] + s[0]), oracle::frac(x[1] + s[1])};
    CHECK(std::abs(evaluate(f, x, st) - evaluate(f, xs, t)) < 1e-11);
  }
}

TEST_CASE("apply_multiplier") {
  std::mt19937_64 rng(10);
  const TorusObservable f = fixtures::random_observable(rng, 2, 6, 7);
  CHECK(apply_multiplier(f, [](std::span<const double>) { return cplx(1.0); }) == f);
  const TorusObservable zero = apply_multiplier(f, [](std::span<const double>) { return cplx(0.0); });
  CHECK(zero.l2_norm_squared() == 0.0);

  const double s[] = {0.3, -0.45};
  const TorusObservable mod = apply_multiplier(f, [&](std::span<const double> t) {
    return std::polar(1.0, t[0] * s[0] + t[1] * s[1]);
  });
  const TorusObservable sh = f.shifted(s);
  REQUIRE(mod.terms().size() == sh.terms().size());
  for (std::size_t j = 0; j < sh.terms().size(); ++j)
    CHECK(std::abs(mod.terms()[j].c - sh.terms()[j].c) < 1e-12);

  auto k1 = [](std::span<const double> t) { return cplx(std::cos(t[0]), 0.5 * t[1]); };
  auto k2 = [](std::span<const double> t) { return cplx(0.25, std::sin(t[1])); };
  const TorusObservable seq = apply_multiplier(apply_multiplier(f, k1), k2);
  const TorusObservable prod = apply_multiplier(f, [&](std::span<const double> t) { return k1(t) * k2(t); });
  REQUIRE(seq.terms().size() == prod.terms().size());
  for (std::size_t j = 0; j < seq.terms().size(); ++j)
    CHECK(std::abs(seq.terms()[j].c - prod.terms()[j].c) <= 1e-14 * std::abs(prod.terms()[j].c) + 1e-300);

  double expect = 0.0;
  for (const auto& t : f.terms()) {
    Vec w(t.m.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = kTwoPi * static_cast<double>(t.m[i]);
    expect += std::norm(k1(w)) * std::norm(t.c);
  }
  CHECK(apply_multiplier(f, k1).l2_norm_squared() == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("real-valued observables require conjugate symmetry") {
  CHECK_THROWS(TorusObservable(1, {{{1}, 1.0}}, true));
  CHECK_NOTHROW(TorusObservable(1, {{{1}, 1.0 + 1i}, {{-1}, 1.0 - 1i}}, true));
}
