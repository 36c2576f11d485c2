// Model and observable builders shared by the tests.
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "rpavg/measures.hpp"
#include "rpavg/spectral.hpp"

namespace fixtures {

inline rpavg::ModelSpec lacunary_uniform(double beta = 0.5, int r = 1, int d = 1, double a = 1.0) {
  rpavg::ModelSpec spec;
  spec.perturbation = rpavg::PerturbationSpec::uniform(a, d);
  spec.subsequence.family = rpavg::SubsequenceFamily::kLacunaryExponential;
  spec.subsequence.beta = beta;
  spec.subsequence.r = r;
  spec.subsequence.d = d;
  return spec;
}

inline rpavg::ModelSpec linear(rpavg::PerturbationSpec p, int r = 1) {
  rpavg::ModelSpec spec;
  spec.perturbation = p;
  spec.subsequence.family = rpavg::SubsequenceFamily::kLinear;
  spec.subsequence.r = r;
  spec.subsequence.d = p.d;
  return spec;
}

inline void add_box_smoothing(rpavg::ModelSpec& spec, double eps) {
  spec.smoothing = rpavg::SmoothingSpec{rpavg::PerturbationSpec::uniform(eps, spec.perturbation.d),
                                        rpavg::SmoothingKernel(rpavg::KernelFamily::kBox)};
}

// Random trigonometric polynomial with `count` frequencies in [-K, K]^d.
inline rpavg::TorusObservable random_observable(std::mt19937_64& rng, int d, int count, int K,
                                                bool real = false) {
  std::uniform_int_distribution<int> freq(-K, K);
  std::normal_distribution<double> coef(0.0, 1.0);
  std::vector<rpavg::TorusObservable::Term> terms;
  for (int i = 0; i < count; ++i) {
    rpavg::Frequency m(static_cast<std::size_t>(d));
    for (auto& v : m) v = freq(rng);
    const rpavg::cplx c(coef(rng), coef(rng));
    if (real) {
      rpavg::Frequency neg = m;
      for (auto& v : neg) v = -v;
      if (m == neg) {
        terms.push_back({m, c.real()});
        continue;
      }
      terms.push_back({m, c});
      terms.push_back({neg, std::conj(c)});
    } else {
      terms.push_back({m, c});
    }
  }
  return rpavg::TorusObservable(d, std::move(terms), real);
}

}  // namespace fixtures
