#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"
#include "rpavg/averages.hpp"
#include "rpavg/errors.hpp"
#include "rpavg/kernel_engine.hpp"

using namespace rpavg;
using namespace std::complex_literals;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx at(const TorusObservable& f, std::span<const double> x) {
  const Vec zero(x.size(), 0.0);
  return evaluate(f, x, zero);
}

std::vector<Vec> torus_points(std::mt19937_64& rng, int d, int count) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> pts;
  for (int i = 0; i < count; ++i) {
    Vec x(static_cast<std::size_t>(d));
    for (auto& v : x) v = u(rng);
    pts.push_back(x);
  }
  return pts;
}

}  // namespace

TEST_CASE("G kernel for a single constant perturbation") {
  auto spec = fixtures::linear(PerturbationSpec::constant(0.3));
  spec.subsequence.scales = {5.0};
  const TransitionMeasureModel model(spec);
  for (double t : {0.0, 0.7, -2.2, 13.0}) {
    const double tt[] = {t};
    CHECK(std::abs(kernel_value(AverageFamily::kG, model, 1, 1, tt) - std::exp(1i * t * 5.3)) < 1e-14);
    CHECK(kernel_value(AverageFamily::kD, model, 1, 6, tt) == cplx(0.0));
  }
}

TEST_CASE("D equals K minus E and probability kernels are bounded") {
  auto spec = fixtures::lacunary_uniform(0.5, 1, 2);
  spec.base = AtomicMeasure(2, {{{0.0, 0.0}, 0.5}, {{0.3, 0.1}, 0.5}});
  const TransitionMeasureModel model(spec);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 30; ++i) {
    const double t[] = {u(rng), u(rng)};
    const cplx K = kernel_value(AverageFamily::kK, model, 3, 7, t);
    const cplx E = kernel_value(AverageFamily::kE, model, 3, 7, t);
    CHECK(kernel_value(AverageFamily::kD, model, 3, 7, t) == K - E);
    for (auto fam : {AverageFamily::kK, AverageFamily::kG, AverageFamily::kH, AverageFamily::kE})
      CHECK(std::abs(kernel_value(fam, model, 3, 7, t)) <= 1.0 + 1e-12);
  }
  CHECK(normalization(model, 7) == 7.0);
}

TEST_CASE("F kernel matches box-window quadrature") {
  auto spec = fixtures::lacunary_uniform(0.5, 1, 1);
  fixtures::add_box_smoothing(spec, 0.4);
  const TransitionMeasureModel model(spec);
  std::mt19937_64 rng(5);
  const TorusObservable f = fixtures::random_observable(rng, 1, 6, 8);
  const TorusObservable Ff = apply_average(AverageFamily::kF, model, 11, 6, f);
  for (const auto& x : torus_points(rng, 1, 16))
    CHECK(std::abs(at(Ff, x) - oracle::time_domain_average(family_model(AverageFamily::kF, model), 11, 6, f, x)) < 1e-8);
}

TEST_CASE("averages of constants are constants for probability families") {
  auto spec = fixtures::lacunary_uniform(0.5, 2, 2);
  fixtures::add_box_smoothing(spec, 0.5);
  const TransitionMeasureModel model(spec);
  const TorusObservable one = TorusObservable::constant(2, 2.5);
  for (auto fam : {AverageFamily::kK, AverageFamily::kG, AverageFamily::kH, AverageFamily::kF, AverageFamily::kE}) {
    const TorusObservable r = apply_average(fam, model, 4, 5, one);
    REQUIRE(r.terms().size() == 1);
    CHECK(std::abs(r.terms()[0].c - 2.5) < 1e-14);
  }
}

TEST_CASE("H average with n = 1 is a translation by delta_1") {
  const TransitionMeasureModel model(fixtures::lacunary_uniform(0.5, 1, 2));
  std::mt19937_64 rng(8);
  const TorusObservable f = fixtures::random_observable(rng, 2, 5, 6);
  const long long one[] = {1};
  const Vec d1 = model.delta(3, one);
  const TorusObservable a = apply_average(AverageFamily::kH, model, 3, 1, f);
  const TorusObservable b = f.shifted(d1);
  REQUIRE(a.terms().size() == b.terms().size());
  for (std::size_t j = 0; j < a.terms().size(); ++j) CHECK(std::abs(a.terms()[j].c - b.terms()[j].c) < 1e-13);
}

TEST_CASE("G average agrees with direct time-domain averaging") {
  const TransitionMeasureModel model(fixtures::lacunary_uniform());
  std::mt19937_64 rng(13);
  const TorusObservable f = fixtures::random_observable(rng, 1, 7, 9);
  const TorusObservable Gf = apply_average(AverageFamily::kG, model, 21, 8, f);
  for (const auto& x : torus_points(rng, 1, 16)) {
    cplx direct = 0.0;
    for (long long k = 1; k <= 8; ++k) {
      const long long kk[] = {k};
      const Vec p = model.realize(21, kk).position;
      const double y[] = {x[0] + p[0]};
      direct += oracle::eval_observable(f, y);
    }
    CHECK(std::abs(at(Gf, x) - direct / 8.0) < 1e-8);
  }
}

TEST_CASE("E and D agree with time-domain expectations") {
  auto spec = fixtures::lacunary_uniform(0.5, 1, 2, 0.8);
  spec.perturbation.coords[1] = {PerturbationFamily::kConstant, 0.25, 0.0};
  const TransitionMeasureModel model(spec);
  std::mt19937_64 rng(17);
  const TorusObservable f = fixtures::random_observable(rng, 2, 4, 4);
  const TorusObservable Ef = apply_average(AverageFamily::kE, model, 2, 3, f);
  const TorusObservable Df = apply_average(AverageFamily::kD, model, 2, 3, f);
  for (const auto& x : torus_points(rng, 2, 8)) {
    const cplx e = oracle::time_domain_expectation(model, 3, f, x);
    const cplx k = oracle::time_domain_average(model, 2, 3, f, x);
    CHECK(std::abs(at(Ef, x) - e) < 1e-8);
    CHECK(std::abs(at(Df, x) - (k - e)) < 1e-8);
  }
}

TEST_CASE("centered averages are bounded by twice the norm") {
  std::mt19937_64 rng(23);
  const TransitionMeasureModel model(fixtures::lacunary_uniform(0.5, 1, 1));
  for (int trial = 0; trial < 20; ++trial) {
    const TorusObservable f = fixtures::random_observable(rng, 1, 8, 30);
    const double bound = 2.0 * std::sqrt(f.l2_norm_squared());
    for (long long n : {1, 4, 16})
      CHECK(std::sqrt(apply_average(AverageFamily::kD, model, static_cast<std::uint64_t>(trial), n, f).l2_norm_squared()) <= bound);
  }
}

TEST_CASE("sandwich between consecutive geometric indices") {
  // f = |1 + e^{2 pi i x} + 0.5 e^{4 pi i x}|^2 >= 0.
  const TorusObservable f(1, {{{0}, 2.25}, {{1}, 1.5}, {{-1}, 1.5}, {{2}, 0.5}, {{-2}, 0.5}}, true);
  const TransitionMeasureModel model(fixtures::lacunary_uniform());
  std::mt19937_64 rng(29);
  const auto pts = torus_points(rng, 1, 8);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    for (long long lo : {2LL, 4LL, 8LL}) {
      const long long hi = 2 * lo;
      for (const auto& x : pts) {
        const double klo = oracle::time_domain_average(model, seed, lo, f, x).real();
        const double khi = oracle::time_domain_average(model, seed, hi, f, x).real();
        const double blo = static_cast<double>(lo), bhi = static_cast<double>(hi);
        for (long long m = lo; m < hi; ++m) {
          const double km = at(apply_average(AverageFamily::kG, model, seed, m, f), x).real();
          CHECK(km >= blo / bhi * klo - 1e-12);
          CHECK(km <= bhi / blo * khi + 1e-12);
        }
      }
    }
  }
}

TEST_CASE("geometric indices are deduplicated floors") {
  CHECK(geometric_indices(2.0, 4) == std::vector<long long>{2, 4, 8, 16});
  CHECK(geometric_indices(1.5, 4) == std::vector<long long>{1, 2, 3, 5});
  CHECK(geometric_indices(1.1, 5) == std::vector<long long>{1});
  const auto g = geometric_indices(1.1, 10);
  CHECK(std::adjacent_find(g.begin(), g.end()) == g.end());
  CHECK(g.front() == 1);
  CHECK_THROWS_AS(geometric_indices(1.0, 3), ArgumentError);
  CHECK_THROWS_AS(geometric_indices(2.0, 0), ArgumentError);
  CHECK_THROWS_AS(geometric_indices(2.0, 60), RangeError);
}

TEST_CASE("square function reductions") {
  const TransitionMeasureModel det(fixtures::linear(PerturbationSpec::constant(1.0)));
  const TorusObservable f(1, {{{1}, 1.0}, {{3}, 0.5}});
  CHECK(square_function(det, 1, f, 2.0, 4).value == 0.0);

  const TransitionMeasureModel model(fixtures::lacunary_uniform());
  const double t0 = kTwoPi * 3.0;
  const SpectralMeasure single(1, {{{t0}, 1.0}});
  const SquareFunctionResult r = square_function(model, 5, single, 1.5, 6);
  double expect = 0.0;
  const double tt[] = {t0};
  for (long long n : geometric_indices(1.5, 6)) expect += std::norm(kernel_value(AverageFamily::kD, model, 5, n, tt));
  CHECK(r.value == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.moment == doctest::Approx(loglog_plus(t0)));

  const SpectralMeasure A(1, {{{kTwoPi}, 0.7}}), B(1, {{{kTwoPi * 40.0}, 1.3}, {{-kTwoPi * 2.0}, 0.2}});
  const SpectralMeasure AB(1, {{{kTwoPi}, 0.7}, {{kTwoPi * 40.0}, 1.3}, {{-kTwoPi * 2.0}, 0.2}});
  CHECK(square_function(model, 2, AB, 2.0, 5).value ==
        doctest::Approx(square_function(model, 2, A, 2.0, 5).value + square_function(model, 2, B, 2.0, 5).value)
            .epsilon(1e-12));

  double prev = 0.0;
  for (int N = 1; N <= 7; ++N) {
    const double v = square_function(model, 2, AB, 2.0, N).value;
    CHECK(v >= prev);
    prev = v;
  }

  const SquareFunctionResult lp = square_function(model, 2, AB, 2.0, 3, MomentKind::kLogPsi);
  CHECK(lp.moment == doctest::Approx(logpsi_moment(AB, default_growth(model.spec().subsequence))));
}

TEST_CASE("series partial sums") {
  auto det_spec = fixtures::lacunary_uniform(0.5, 1, 1);
  det_spec.perturbation = PerturbationSpec::constant(0.5);
  det_spec.smoothing = SmoothingSpec{PerturbationSpec::constant(0.3), SmoothingKernel(KernelFamily::kBox)};
  std::mt19937_64 rng(31);
  const TorusObservable f = fixtures::random_observable(rng, 1, 5, 7);
  const SeriesState zero = series_partial_sum(TransitionMeasureModel(det_spec), 1, f, 8);
  CHECK(zero.partial_sum(8).l2_norm_squared() == 0.0);

  auto spec = fixtures::lacunary_uniform(0.5, 1, 1);
  fixtures::add_box_smoothing(spec, 0.5);
  const TransitionMeasureModel model(spec);
  const SeriesState s = series_partial_sum(model, 4, f, 1);
  const TorusObservable F1 = apply_average(AverageFamily::kF, model, 4, 1, f);
  const TorusObservable E1 = apply_average(AverageFamily::kE, model, 4, 1, f);
  const TorusObservable S1 = s.partial_sum(1);
  REQUIRE(S1.terms().size() == F1.terms().size());
  for (std::size_t j = 0; j < S1.terms().size(); ++j)
    CHECK(std::abs(S1.terms()[j].c - (F1.terms()[j].c - E1.terms()[j].c)) < 1e-13);

  const SeriesState big = series_partial_sum(model, 4, f, 20);
  const TorusObservable d = big.partial_sum(20);
  double diff = 0.0;
  const TorusObservable a = big.partial_sum(7);
  for (std::size_t j = 0; j < d.terms().size(); ++j) diff += std::norm(d.terms()[j].c - a.terms()[j].c);
  CHECK(big.increment(7, 20) == doctest::Approx(std::sqrt(diff)).epsilon(1e-12));
  CHECK(big.increment(5, 5) == 0.0);

  const auto pts = convergence_sample_points(1, 3);
  CHECK(pts.size() == 128);
  const auto vals = big.sample(20, pts);
  for (std::size_t i = 0; i < pts.size(); i += 9) CHECK(std::abs(vals[i] - at(d, pts[i])) < 1e-13);

  CHECK_THROWS_AS(series_partial_sum(TransitionMeasureModel(fixtures::lacunary_uniform()), 1, f, 3), ConfigurationError);
}

TEST_CASE("series increments shrink at larger scales") {
  auto spec = fixtures::lacunary_uniform(0.5, 1, 1);
  fixtures::add_box_smoothing(spec, 0.5);
  const TransitionMeasureModel model(spec);
  const TorusObservable f(1, {{{1}, 0.5}, {{-1}, 0.5}, {{3}, 0.25}, {{-3}, 0.25}}, true);
  std::vector<double> early, late;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const SeriesState s = series_partial_sum(model, seed, f, 128);
    early.push_back(s.increment(8, 16));
    late.push_back(s.increment(64, 128));
  }
  std::sort(early.begin(), early.end());
  std::sort(late.begin(), late.end());
  CHECK(late[12] < early[12]);
}

TEST_CASE("moricz check") {
  const std::vector<double> alpha{1.0, 0.5, 0.25, 0.125}, A{1.0, 1.0, 1.0, 1.0};
  std::vector<MoriczSample> zeros;
  for (long long n = 0; n < 4; ++n)
    for (long long m = n + 1; m <= 4; ++m) zeros.push_back({n, m, 0.0});
  const MoriczReport z = moricz_check(zeros, alpha, A, 0.0);
  CHECK(z.holds);
  CHECK(z.max_ratio == 0.0);

  std::vector<MoriczSample> orth;
  for (long long n = 0; n < 4; ++n)
    for (long long m = n + 1; m <= 4; ++m) {
      double s = 0.0;
      for (long long k = n + 1; k <= m; ++k) s += alpha[static_cast<std::size_t>(k - 1)];
      orth.push_back({n, m, std::sqrt(s)});
    }
  const MoriczReport o = moricz_check(orth, alpha, A, 0.0);
  CHECK(o.holds);
  CHECK(o.max_ratio == doctest::Approx(1.0));
  double bc = 0.0;
  for (std::size_t i = 0; i < 4; ++i) bc += alpha[i] * A[i] * std::pow(std::log(i + 1.0), 2);
  CHECK(o.bound_constant == doctest::Approx(bc));

  orth.push_back({1, 3, 2.0});
  const MoriczReport bad = moricz_check(orth, alpha, A, 0.0);
  CHECK_FALSE(bad.holds);
  REQUIRE(bad.violations.size() == 1);
  CHECK(bad.violations[0].n == 1);
  CHECK(bad.violations[0].m == 3);

  const std::vector<double> decreasing{2.0, 1.0, 1.0, 1.0};
  CHECK_THROWS_AS(moricz_check(orth, alpha, decreasing, 0.0), ArgumentError);

  const auto sa = series_alpha(2, 3.0, 4);
  CHECK(sa[1] == doctest::Approx(4.0 * 2 * 3.0 / 8.0));
  const auto sg = series_growth(2, 0.5, 4);
  CHECK(sg[3] == doctest::Approx(4.0));
}
