#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../support/fixtures.hpp"
#include "rpavg/errors.hpp"
#include "rpavg/measures.hpp"

using namespace rpavg;
using namespace std::complex_literals;

namespace {

AtomicMeasure random_measure(std::mt19937_64& rng, int d, int atoms, bool real) {
  std::normal_distribution<double> g(0.0, 3.0);
  std::vector<AtomicMeasure::Atom> a;
  for (int j = 0; j < atoms; ++j) {
    Vec u(static_cast<std::size_t>(d));
    for (auto& v : u) v = g(rng);
    const cplx w = real ? cplx(g(rng), 0.0) : cplx(g(rng), g(rng));
    a.push_back({u, w});
  }
  return AtomicMeasure(d, a);
}

}  // namespace

TEST_CASE("realized measures in the simple examples") {
  auto spec = fixtures::linear(PerturbationSpec::constant(0.5));
  const TransitionMeasureModel model(spec);
  const long long k[] = {3};
  const AtomicMeasure nu = realize_measure(model, 1, k);
  REQUIRE(nu.size() == 1);
  CHECK(nu.point(0)[0] == 3.5);
  CHECK(nu.weight(0) == cplx(1.0));

  auto spec2 = fixtures::linear(PerturbationSpec::constant(0.0));
  spec2.subsequence.scales = {0.0};
  spec2.base = AtomicMeasure(1, {{{0.0}, 0.5}, {{1.0}, 0.5}});
  const AtomicMeasure nu2 = realize_measure(TransitionMeasureModel(spec2), 1, k);
  CHECK(nu2 == *spec2.base);

  auto spec3 = fixtures::linear(PerturbationSpec::uniform(1.0));
  const TransitionMeasureModel m3(spec3);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const double u = realize_measure(m3, seed, k).point(0)[0];
    CHECK(u >= 3.0);
    CHECK(u <= 4.0);
  }
}

TEST_CASE("fourier-stieltjes examples") {
  const AtomicMeasure dirac = AtomicMeasure::dirac({1.5, -2.0});
  const double t[] = {0.3, 0.7};
  const cplx v = fourier_stieltjes(dirac, t);
  CHECK(std::abs(v) == doctest::Approx(1.0));
  CHECK(std::abs(v - std::exp(1i * (1.5 * 0.3 - 2.0 * 0.7))) < 1e-15);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<AtomicMeasure::Atom> atoms;
  for (int j = 0; j < 5; ++j) atoms.push_back({{u(rng) * 10}, 0.2});
  const AtomicMeasure prob(1, atoms);
  CHECK(prob.is_probability());
  const double zero[] = {0.0};
  CHECK(std::abs(fourier_stieltjes(prob, zero) - 1.0) < 1e-14);

  SmoothingFactor box{{1.0}, SmoothingKernel(KernelFamily::kBox)};
  const double pi[] = {std::numbers::pi};
  CHECK(std::abs(fourier_stieltjes(AtomicMeasure::dirac({0.4}), pi, box)) < 1e-15);
}

TEST_CASE("transform modulus is bounded by the variation mass") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g(0.0, 20.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 1 + trial % 3;
    const AtomicMeasure m = random_measure(rng, d, 1 + trial % 7, trial % 2 == 0);
    Vec t(static_cast<std::size_t>(d));
    for (auto& v : t) v = g(rng);
    CHECK(std::abs(fourier_stieltjes(m, t)) <= variation_mass(m) * (1 + 1e-14));
  }
}

TEST_CASE("real measures have conjugate-symmetric transforms") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    const AtomicMeasure m = random_measure(rng, 2, 4, true);
    const Vec t{g(rng), g(rng)};
    const Vec mt{-t[0], -t[1]};
    CHECK(std::abs(fourier_stieltjes(m, mt) - std::conj(fourier_stieltjes(m, t))) < 1e-12);
  }
}

TEST_CASE("truncated transform") {
  const double L = 2.0;
  const AtomicMeasure inside(1, {{{0.5}, 0.3}, {{-1.5}, 0.7}});
  const double t[] = {1.3};
  CHECK(truncated_transform(inside, t, L) == fourier_stieltjes(inside, t));
  const AtomicMeasure outside(1, {{{5.0}, 0.3}, {{-3.0}, 0.7}});
  CHECK(truncated_transform(outside, t, L) == cplx(0.0));
  const AtomicMeasure mixed(1, {{{0.0}, 0.5}, {{2.0 * L}, 0.5}});
  const double zero[] = {0.0};
  CHECK(std::abs(truncated_transform(mixed, zero, L) - 0.5) < 1e-15);

  std::mt19937_64 rng(8);
  const AtomicMeasure m = random_measure(rng, 2, 6, false);
  double reach = 0.0;
  for (std::size_t j = 0; j < m.size(); ++j) reach = std::max(reach, max_norm(m.point(j)));
  const double t2[] = {0.7, -1.1};
  CHECK(truncated_transform(m, t2, reach * 1.01) == fourier_stieltjes(m, t2));
}

TEST_CASE("variation mass") {
  CHECK(variation_mass(AtomicMeasure::dirac({0.0})) == 1.0);
  CHECK(variation_mass(AtomicMeasure(1, {{{0.0}, 1.0}, {{1.0}, -1.0}})) == 2.0);
  CHECK(variation_mass(AtomicMeasure(1, {{{0.0}, 1i}, {{1.0}, 3.0}})) == 4.0);
  const AtomicMeasure signed_m(1, {{{0.0}, 1.0}, {{1.0}, -1.0}});
  CHECK_FALSE(signed_m.is_probability());
}

TEST_CASE("expected transform closed forms") {
  const long long k[] = {2};
  const TransitionMeasureModel constant(fixtures::linear(PerturbationSpec::constant(0.75)));
  const double t[] = {1.7};
  const ExpectedValue e = expected_transform(constant, k, t);
  CHECK(e.method == EstimateMethod::kClosedForm);
  CHECK(std::abs(e.value - std::exp(1i * 1.7 * 2.75)) < 1e-14);

  const TransitionMeasureModel uni(fixtures::linear(PerturbationSpec::uniform(1.0)));
  const double two_pi[] = {2.0 * std::numbers::pi};
  CHECK(std::abs(uni.delta_transform(two_pi).value) < 1e-15);
}

TEST_CASE("monte carlo expectations agree with the closed forms") {
  for (auto p : {PerturbationSpec::exponential(1.0), PerturbationSpec::uniform(1.0)}) {
    auto spec = fixtures::linear(p);
    spec.expectation.mode = ExpectationMode::kMonteCarlo;
    spec.expectation.samples = 100000;
    const TransitionMeasureModel model(spec);
    const double t[] = {1.0};
    const ExpectedValue mc = model.delta_transform(t);
    CHECK(mc.method == EstimateMethod::kMonteCarlo);
    CHECK(mc.std_error > 0.0);
    const cplx exact = p.coords[0].family == PerturbationFamily::kExponential
                           ? 1.0 / (1.0 - 1i)
                           : (std::exp(1i) - 1.0) / 1i;
    CHECK(std::abs(mc.value - exact) <= 3.0 * mc.std_error);
  }
}

TEST_CASE("too few monte carlo samples is a configuration error") {
  auto spec = fixtures::linear(PerturbationSpec::pareto(2.0, 1.0));
  spec.expectation.samples = 500;
  CHECK_THROWS_AS(TransitionMeasureModel{spec}, ConfigurationError);
}

TEST_CASE("smoothing kernels") {
  for (auto fam : {KernelFamily::kBox, KernelFamily::kTriangle, KernelFamily::kGaussianTruncated}) {
    const SmoothingKernel z(fam);
    CHECK(z.transform_1d(0.0) == doctest::Approx(1.0));
    for (double x = -40.0; x <= 40.0; x += 0.37) CHECK(std::abs(z.transform_1d(x)) <= 1.0 + 1e-12);
    CHECK(z.decay_exponent() > 0.0);
    const double cert = z.decay_certificate(2);
    CHECK(std::isfinite(cert));
    // The certificate bounds the weighted transform on a sample of points.
    for (double a = -30.0; a <= 30.0; a += 1.3)
      for (double b = -30.0; b <= 30.0; b += 2.1) {
        const double t[] = {a, b};
        const double w = std::pow(std::max(1.0, std::abs(a)), z.decay_exponent()) *
                         std::pow(std::max(1.0, std::abs(b)), z.decay_exponent());
        CHECK(w * std::abs(z.transform(t)) <= cert * (1 + 1e-9));
      }
    // Density integrates to one.
    double mass = 0.0;
    const double h = 1e-3;
    for (double x = -10.0; x <= 10.0; x += h) mass += z.density_1d(x) * h;
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
  }
  CHECK(SmoothingKernel(KernelFamily::kBox).transform_1d(1.0) == doctest::Approx(std::sin(1.0)));
  const double s = std::sin(0.5) / 0.5;
  CHECK(SmoothingKernel(KernelFamily::kTriangle).transform_1d(1.0) == doctest::Approx(s * s));
}

TEST_CASE("probability ingredients give probability measures") {
  auto spec = fixtures::lacunary_uniform(0.5, 2, 2);
  spec.base = AtomicMeasure(2, {{{0.0, 0.0}, 0.25}, {{0.5, 1.0}, 0.75}});
  const TransitionMeasureModel model(spec);
  CHECK(model.is_probability());
  for (long long a = 1; a <= 4; ++a) {
    const long long k[] = {a, 5 - a};
    CHECK(realize_measure(model, 3, k).is_probability());
  }
}
