#include "rpavg/experiments.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <numbers>
#include <thread>

#include "rpavg/averages.hpp"
#include "rpavg/errors.hpp"
#include "rpavg/kernel_engine.hpp"
#include "rpavg/stats.hpp"
#include "rpavg/variation.hpp"

namespace rpavg {

namespace {

constexpr long long kTailTerms = 2000;

using Row = std::vector<std::string>;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
std::string fmt(long long v) { return std::to_string(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }

template <class T>
std::vector<T> param_list(const Json& params, const char* key) {
  const Json& v = params.at(key);
  if (!v.is_array() || v.empty()) throw ConfigurationError(std::string("params.") + key + " must be a non-empty list");
  try {
    return v.get<std::vector<T>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("params.") + key + ": " + e.what());
  }
}

template <class T>
T param(const Json& params, const char* key) {
  try {
    return params.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("params.") + key + ": " + e.what());
  }
}

SpectralMeasure spectral_atoms_param(const Json& atoms, int d) {
  if (!atoms.is_array() || atoms.empty()) throw ConfigurationError("params.spectral_atoms must be a non-empty list");
  std::vector<SpectralMeasure::Atom> out;
  for (const auto& a : atoms) {
    if (!a.is_array() || a.size() != 2) throw ConfigurationError("each spectral atom is [[t...], mass]");
    Vec t = a[0].get<Vec>();
    if (t.size() != static_cast<std::size_t>(d)) throw ConfigurationError("spectral atom has the wrong dimension");
    const double mass = a[1].get<double>();
    if (!(mass >= 0.0)) throw ConfigurationError("spectral atom masses must be >= 0");
    out.push_back({std::move(t), mass});
  }
  return SpectralMeasure(d, std::move(out));
}

// Per-seed work, collected in seed order whatever the worker count.
std::vector<std::vector<Row>> fan_out(const std::vector<std::uint64_t>& seeds, int threads,
                                      const std::function<std::vector<Row>(std::uint64_t)>& work) {
  std::vector<std::vector<Row>> out(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        out[i] = work(seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const auto n = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(n, seeds.size()); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot write " + p.string());
  out << text;
  if (!out) throw IoError("write failed for " + p.string());
}

std::string csv_text(const Row& header, const std::vector<std::vector<Row>>& blocks) {
  std::string s;
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) s += ',';
      s += r[i];
    }
    s += '\n';
  };
  line(header);
  for (const auto& b : blocks)
    for (const auto& r : b) line(r);
  return s;
}

// Column `col` of every row whose column `key_col` equals `key`.
std::vector<double> column(const std::vector<std::vector<Row>>& blocks, std::size_t key_col,
                           const std::string& key, std::size_t col) {
  std::vector<double> v;
  for (const auto& b : blocks)
    for (const auto& r : b)
      if (r[key_col] == key) v.push_back(std::stod(r[col]));
  return v;
}

struct Experiment {
  Row header;
  std::function<std::vector<Row>(std::uint64_t)> per_seed;
  std::function<Json(const std::vector<std::vector<Row>>&)> summarize;
  std::string plot_body;  // gnuplot commands after the data file is set
};

EngineOptions engine_options(const ExperimentConfig& c) {
  EngineOptions o;
  o.budget = c.grid_budget;
  o.T_max = c.T_max;
  if (c.params.contains("spacing")) o.spacing = param<double>(c.params, "spacing");
  return o;
}

Experiment decay_experiment(const ExperimentConfig& c, const std::string& hash) {
  const TransitionMeasureModel model(c.model);
  const auto ns = param_list<long long>(c.params, "ns");
  const double beta = c.model.subsequence.beta;
  const int r = c.model.subsequence.r;
  const EngineOptions opts = engine_options(c);
  Experiment e;
  e.header = {"seed", "config_hash", "n", "T_target", "T_used", "capped", "spacing", "sup_sq", "certified_sq", "scaled_sup_sq"};
  e.per_seed = [=](std::uint64_t seed) {
    std::vector<Row> rows;
    for (const auto& d : decay_profile(model, seed, ns, beta, r, opts)) {
      const double scale = std::pow(static_cast<double>(d.n), r * (1.0 - beta));
      rows.push_back({fmt(seed), hash, fmt(d.n), fmt(d.T_target), fmt(d.T_used), d.capped ? "1" : "0",
                      fmt(d.spacing), fmt(d.sup_sq), fmt(d.certified_sq), fmt(scale * d.sup_sq)});
    }
    return rows;
  };
  e.summarize = [=](const std::vector<std::vector<Row>>& blocks) {
    Json per_n = Json::array();
    std::vector<double> medians;
    for (long long n : ns) {
      const auto v = column(blocks, 2, fmt(n), 9);
      medians.push_back(median(v));
      per_n.push_back(Json{{"n", n}, {"median_scaled_sup_sq", medians.back()},
                           {"p95_scaled_sup_sq", percentile(v, 0.95)}});
    }
    Json s{{"per_n", per_n}};
    if (medians.size() >= 3) {
      const TrendTest t = mann_kendall(medians);
      s["mann_kendall"] = Json{{"S", t.S}, {"p_increasing", t.p_increasing}, {"exact", t.exact},
                               {"increasing_trend", t.increasing}};
    }
    return s;
  };
  e.plot_body = "set xlabel 'n'\nset ylabel 'n^{r(1-beta)} sup |D_n|^2'\nset logscale x 2\n"
                "plot data using 3:10 with points title 'per seed'\n";
  return e;
}

Experiment ratio_experiment(const ExperimentConfig& c, const std::string& hash) {
  const TransitionMeasureModel model(c.model);
  const auto ms = param_list<long long>(c.params, "ms");
  const auto Ts = param_list<double>(c.params, "Ts");
  const auto mode_name = param<std::string>(c.params, "mode");
  RatioMode mode;
  if (mode_name == "probability") mode = RatioMode::kProbability;
  else if (mode_name == "general") mode = RatioMode::kGeneral;
  else throw ConfigurationError("params.mode must be probability or general");
  for (long long m : ms)
    if (m < 2) throw ConfigurationError("params.ms entries must be >= 2");
  const GrowthFunction phi = default_growth(c.model.subsequence);
  const EngineOptions opts = engine_options(c);
  Experiment e;
  e.header = {"seed", "config_hash", "m", "statistic", "n_witness", "T_witness", "sup", "certified"};
  e.per_seed = [=](std::uint64_t seed) {
    std::vector<Row> rows;
    for (long long m : ms) {
      const std::vector<std::pair<long long, long long>> pairs{{0, m}, {m / 2, m}};
      const RatioStatistic st = ratio_statistic(model, seed, pairs, Ts, phi, mode, opts);
      double sup = 0.0, cert = 0.0;
      for (const auto& en : st.entries)
        if (en.n == st.n && en.T == st.T) {
          sup = en.sup.sup_value;
          cert = en.sup.certified_bound;
        }
      rows.push_back({fmt(seed), hash, fmt(m), fmt(st.value), fmt(st.n), fmt(st.T), fmt(sup), fmt(cert)});
    }
    return rows;
  };
  e.summarize = [=](const std::vector<std::vector<Row>>& blocks) {
    Json per_m = Json::array();
    std::vector<double> p95;
    for (long long m : ms) {
      const auto v = column(blocks, 2, fmt(m), 3);
      p95.push_back(percentile(v, 0.95));
      per_m.push_back(Json{{"m", m}, {"p95", p95.back()}, {"median", median(v)}});
    }
    bool non_increasing = true, bounded = true;
    for (std::size_t i = 1; i < p95.size(); ++i) {
      non_increasing = non_increasing && p95[i] <= p95[i - 1];
      bounded = bounded && p95[i] <= 10.0 * p95[0];
    }
    return Json{{"per_m", per_m}, {"p95_non_increasing", non_increasing}, {"p95_within_10x_first", bounded}};
  };
  e.plot_body = "set xlabel 'm'\nset ylabel 'ratio statistic'\nset logscale x 2\n"
                "plot data using 3:4 with points title 'per seed'\n";
  return e;
}

Experiment square_experiment(const ExperimentConfig& c, const std::string& hash) {
  const TransitionMeasureModel model(c.model);
  SpectralMeasure mu;
  if (c.params.contains("spectral_atoms")) {
    mu = spectral_atoms_param(c.params.at("spectral_atoms"), c.model.perturbation.d);
  } else {
    const auto f = c.resolve_observable();
    if (!f) throw ConfigurationError("E3_square needs an observable or params.spectral_atoms");
    if (f->d() != model.d()) throw ConfigurationError("observable dimension differs from the model");
    mu = spectral_measure(*f);
  }
  const auto rhos = param_list<double>(c.params, "rhos");
  const int N = param<int>(c.params, "N");
  const MomentKind moment = moment_kind_from_string(param<std::string>(c.params, "moment"));
  for (double rho : rhos) geometric_indices(rho, N);
  Experiment e;
  e.header = {"seed", "config_hash", "rho", "N", "value", "moment", "ratio"};
  e.per_seed = [=](std::uint64_t seed) {
    std::vector<Row> rows;
    for (double rho : rhos) {
      const auto res = square_function(model, seed, mu, rho, N, moment);
      rows.push_back({fmt(seed), hash, fmt(rho), fmt(static_cast<long long>(N)), fmt(res.value), fmt(res.moment), fmt(res.ratio)});
    }
    return rows;
  };
  e.summarize = [=](const std::vector<std::vector<Row>>& blocks) {
    Json per = Json::array();
    for (double rho : rhos) {
      const auto v = column(blocks, 2, fmt(rho), 6);
      per.push_back(Json{{"rho", rho}, {"p95_ratio", percentile(v, 0.95)}, {"median_ratio", median(v)}});
    }
    return Json{{"per_rho", per}, {"moment", to_string(moment)}};
  };
  e.plot_body = "set xlabel 'seed'\nset ylabel 'square function / moment'\n"
                "plot data using 1:7 with points title 'ratio'\n";
  return e;
}

Experiment convergence_experiment(const ExperimentConfig& c, const std::string& hash) {
  const TransitionMeasureModel model(c.model);
  const auto f = c.resolve_observable();
  if (!f) throw ConfigurationError("E4_convergence needs an observable");
  if (f->d() != model.d()) throw ConfigurationError("observable dimension differs from the model");
  const auto js = param_list<int>(c.params, "js");
  const double s = param<double>(c.params, "s");
  const auto family = average_family_from_string(param<std::string>(c.params, "family"));
  const auto points = convergence_sample_points(model.d(), param<std::uint64_t>(c.params, "sample_seed"));
  for (int j : js)
    if (j < 0 || j > 40) throw ConfigurationError("params.js entries must lie in [0, 40]");
  const TorusObservable fo = *f;
  Experiment e;
  e.header = {"seed", "config_hash", "j", "n", "max_abs", "max_variation"};
  e.per_seed = [=](std::uint64_t seed) {
    const Vec zero(static_cast<std::size_t>(model.d()), 0.0);
    std::vector<std::vector<cplx>> traj(points.size());
    std::vector<double> maxabs;
    for (int j : js) {
      const TorusObservable avg = apply_average(family, model, seed, 1LL << j, fo);
      double mx = 0.0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        const cplx v = evaluate(avg, points[p], zero);
        traj[p].push_back(v);
        mx = std::max(mx, std::abs(v));
      }
      maxabs.push_back(mx);
    }
    double var = 0.0;
    for (const auto& t : traj) var = std::max(var, variation_norm(std::span<const cplx>(t), s));
    std::vector<Row> rows;
    for (std::size_t i = 0; i < js.size(); ++i)
      rows.push_back({fmt(seed), hash, fmt(static_cast<long long>(js[i])), fmt(1LL << js[i]), fmt(maxabs[i]), fmt(var)});
    return rows;
  };
  e.summarize = [=](const std::vector<std::vector<Row>>& blocks) {
    Json per = Json::array();
    std::vector<double> med;
    for (int j : js) {
      med.push_back(median(column(blocks, 2, fmt(static_cast<long long>(j)), 4)));
      per.push_back(Json{{"j", j}, {"median_max_abs", med.back()}});
    }
    const double drop = med.front() > 0.0 ? 1.0 - med.back() / med.front() : 0.0;
    return Json{{"per_j", per}, {"relative_decrease", drop}, {"decrease_at_least_half", drop >= 0.5},
                {"sample_points", points.size()}};
  };
  e.plot_body = "set xlabel 'j'\nset ylabel 'max_x |D_{2^j} f(x)|'\nset logscale y\n"
                "plot data using 3:5 with points title 'per seed'\n";
  return e;
}

Experiment smoothed_experiment(const ExperimentConfig& c, const std::string& hash) {
  if (!c.model.smoothing) throw ConfigurationError("E5_smoothed needs model.smoothing");
  const TransitionMeasureModel model(c.model);
  const auto f = c.resolve_observable();
  if (!f) throw ConfigurationError("E5_smoothed needs an observable");
  if (f->d() != model.d()) throw ConfigurationError("observable dimension differs from the model");
  const auto ms = param_list<long long>(c.params, "ms");
  for (long long m : ms)
    if (m < 1) throw ConfigurationError("params.ms entries must be >= 1");
  const long long top = 2 * *std::max_element(ms.begin(), ms.end());
  const int r = model.r();
  const auto alpha = series_alpha(r, f->l2_norm_squared(), top);
  const auto A = series_growth(r, c.model.subsequence.beta, top);
  const TorusObservable fo = *f;
  Experiment e;
  e.header = {"seed", "config_hash", "m", "increment", "moricz_max_ratio", "moricz_holds", "moricz_bound_constant"};
  e.per_seed = [=](std::uint64_t seed) {
    const SeriesState st = series_partial_sum(model, seed, fo, top);
    std::vector<MoriczSample> samples;
    for (long long n = 0; n < top; ++n)
      for (long long m = n + 1; m <= top; ++m) samples.push_back({n, m, st.increment(n, m)});
    const MoriczReport rep = moricz_check(samples, alpha, A, r * c.model.subsequence.beta);
    std::vector<Row> rows;
    for (long long m : ms)
      rows.push_back({fmt(seed), hash, fmt(m), fmt(st.increment(m, 2 * m)), fmt(rep.max_ratio),
                      rep.holds ? "1" : "0", fmt(rep.bound_constant)});
    return rows;
  };
  e.summarize = [=](const std::vector<std::vector<Row>>& blocks) {
    Json per = Json::array();
    std::vector<double> med;
    for (long long m : ms) {
      med.push_back(median(column(blocks, 2, fmt(m), 3)));
      per.push_back(Json{{"m", m}, {"median_increment", med.back()}});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < med.size(); ++i) decreasing = decreasing && med[i] < med[i - 1];
    bool holds = true;
    double worst = 0.0;
    for (const auto& b : blocks)
      for (const auto& row : b) {
        holds = holds && row[5] == "1";
        worst = std::max(worst, std::stod(row[4]));
      }
    return Json{{"per_m", per}, {"median_decreasing", decreasing}, {"moricz_holds_everywhere", holds},
                {"moricz_worst_ratio", worst}};
  };
  e.plot_body = "set xlabel 'm'\nset ylabel '||S_{2m} - S_m||_2'\nset logscale xy\n"
                "plot data using 3:4 with points title 'per seed'\n";
  return e;
}

// Deterministic shifts t_k = t_scale / k (tending to 0) against the model's
// random perturbations along the same n_k; the demo records how far the
// averages sit from the mean of f at the sample points.
Experiment contrast_experiment(const ExperimentConfig& c, const std::string& hash) {
  const TransitionMeasureModel model(c.model);
  const auto f = c.resolve_observable();
  if (!f) throw ConfigurationError("E6_contrast needs an observable");
  if (f->d() != model.d()) throw ConfigurationError("observable dimension differs from the model");
  const auto ns = param_list<long long>(c.params, "ns");
  const double t_scale = param<double>(c.params, "t_scale");
  const auto points = convergence_sample_points(model.d(), 7);
  const TorusObservable fo = *f;
  cplx mean = 0.0;
  for (const auto& t : fo.terms()) {
    bool zero = true;
    for (long long m : t.m) zero = zero && m == 0;
    if (zero) mean = t.c;
  }
  Experiment e;
  e.header = {"seed", "config_hash", "mode", "n", "max_deviation"};
  e.per_seed = [=](std::uint64_t seed) {
    const Vec zero(static_cast<std::size_t>(model.d()), 0.0);
    const auto point_model = model.view(ModelView::kPointMass);
    std::vector<Row> rows;
    for (long long n : ns) {
      const IndexSet set = enumerate_shells(model.r(), 0, n);
      std::vector<Vec> shifts;
      for (const auto& k : set.indices) {
        Vec u = point_model.center(k);
        const double tk = t_scale / static_cast<double>(max_norm(k));
        for (auto& x : u) x += tk;
        shifts.push_back(std::move(u));
      }
      const double b = static_cast<double>(set.indices.size());
      const TorusObservable det = apply_multiplier(fo, [&](std::span<const double> t) {
        cplx s = 0.0;
        for (const auto& u : shifts) {
          double ph = 0.0;
          for (std::size_t i = 0; i < u.size(); ++i) ph += u[i] * t[i];
          s += std::polar(1.0, ph);
        }
        return s / b;
      });
      const TorusObservable rnd = apply_average(AverageFamily::kG, model, seed, n, fo);
      for (const auto& [name, g] : {std::pair<const char*, const TorusObservable*>{"deterministic", &det},
                                    {"random", &rnd}}) {
        double dev = 0.0;
        for (const auto& x : points) dev = std::max(dev, std::abs(evaluate(*g, x, zero) - mean));
        rows.push_back({fmt(seed), hash, name, fmt(n), fmt(dev)});
      }
    }
    return rows;
  };
  e.summarize = [=](const std::vector<std::vector<Row>>& blocks) {
    Json per = Json::array();
    for (long long n : ns) {
      std::vector<double> det, rnd;
      for (const auto& b : blocks)
        for (const auto& row : b)
          if (row[3] == fmt(n)) (row[2] == "deterministic" ? det : rnd).push_back(std::stod(row[4]));
      per.push_back(Json{{"n", n}, {"deterministic_median", median(det)}, {"random_median", median(rnd)}});
    }
    return Json{{"per_n", per}, {"note", "qualitative demo only"}};
  };
  e.plot_body = "set xlabel 'n'\nset ylabel 'max_x |B_n f(x) - mean f|'\nset logscale x 2\n"
                "plot data using 4:(strcol(3) eq 'deterministic' ? $5 : 1/0) title 'deterministic t_k', \\\n"
                "     data using 4:(strcol(3) eq 'random' ? $5 : 1/0) title 'random delta_k'\n";
  return e;
}

Experiment make_experiment(const ExperimentConfig& c, const std::string& hash) {
  switch (c.experiment) {
    case ExperimentId::kDecay: return decay_experiment(c, hash);
    case ExperimentId::kRatio: return ratio_experiment(c, hash);
    case ExperimentId::kSquare: return square_experiment(c, hash);
    case ExperimentId::kConvergence: return convergence_experiment(c, hash);
    case ExperimentId::kSmoothed: return smoothed_experiment(c, hash);
    case ExperimentId::kContrast: return contrast_experiment(c, hash);
  }
  throw ConfigurationError("unknown experiment");
}

HypothesisCheck check(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

}  // namespace

Json ValidationReport::to_json() const {
  Json cs = Json::array();
  for (const auto& c : checks) cs.push_back(Json{{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  return Json{{"ok", ok()}, {"checks", cs}, {"failures", failures}, {"satisfied", satisfied}};
}

ValidationReport validate(const ExperimentConfig& c) {
  ValidationReport rep;
  const auto& sub = c.model.subsequence;
  const bool beta_ok = sub.beta > 0.0 && sub.beta < 1.0;
  rep.checks.push_back(check("growth exponent", beta_ok,
                             "beta = " + fmt(sub.beta) + (beta_ok ? " lies in (0,1)" : " must lie strictly inside (0,1)")));
  bool tail_ok = false;
  if (beta_ok) {
    const TailReport tail = check_tail_condition(c.model.perturbation, sub.beta, sub.r, kTailTerms);
    tail_ok = tail.converged;
    std::string detail = "partial sums";
    for (long long k : {10LL, 100LL, 1000LL, kTailTerms})
      detail += " S_" + fmt(k) + "=" + fmt(tail.partial_sums[static_cast<std::size_t>(k - 1)]);
    detail += "; last increment " + fmt(tail.last_increment) + (tail_ok ? " < 1e-12" : " >= 1e-12 (not summable at this depth)");
    rep.checks.push_back(check("tail summability", tail_ok, detail));
  } else {
    rep.checks.push_back(check("tail summability", false, "not evaluated: needs 0 < beta < 1"));
  }
  const TransitionMeasureModel model(c.model);
  const bool prob = model.is_probability();
  rep.checks.push_back(check("probability transition measures", prob,
                             prob ? "base measure is a probability measure" : "base measure is not a probability measure"));
  bool smoothing_ok = false;
  if (c.model.smoothing) {
    const auto& k = c.model.smoothing->kernel;
    const double cert = k.decay_certificate(c.model.perturbation.d);
    smoothing_ok = std::isfinite(cert) && k.decay_exponent() >= 1.0;
    rep.checks.push_back(check("smoothing decay", smoothing_ok,
                               to_string(k.family()) + " kernel: decay exponent " + fmt(k.decay_exponent()) +
                                   ", certificate " + fmt(cert)));
  } else if (c.experiment == ExperimentId::kSmoothed) {
    rep.checks.push_back(check("smoothing decay", false, "E5_smoothed needs a smoothing kernel"));
  }
  if (c.params.contains("s")) {
    const double s = c.params.at("s").get<double>();
    const bool ok = s > 2.0;
    rep.checks.push_back(check("variation exponent", ok, "s = " + fmt(s) + (ok ? " > 2" : " must exceed 2")));
  }
  if (c.params.contains("rhos")) {
    bool ok = true;
    for (double rho : c.params.at("rhos").get<std::vector<double>>()) ok = ok && rho > 1.0;
    rep.checks.push_back(check("geometric ratio", ok, ok ? "every rho > 1" : "every rho must exceed 1"));
  }
  const bool needs_f = c.experiment == ExperimentId::kConvergence || c.experiment == ExperimentId::kSmoothed ||
                       c.experiment == ExperimentId::kContrast ||
                       (c.experiment == ExperimentId::kSquare && !c.params.contains("spectral_atoms"));
  if (needs_f) {
    std::string detail;
    bool ok = false;
    try {
      const auto f = c.resolve_observable();
      ok = f.has_value() && f->d() == c.model.perturbation.d;
      detail = !f ? "no observable given" : ok ? "trigonometric polynomial: finite log-log moment"
                                              : "observable dimension differs from the model";
    } catch (const Error& e) {
      detail = e.what();
    }
    rep.checks.push_back(check("observable", ok, detail));
  }

  for (const auto& ch : rep.checks)
    if (!ch.passed) rep.failures.push_back(ch.name + ": " + ch.detail);
  const bool core = beta_ok && tail_ok;
  if (core && prob) rep.satisfied.push_back("uniform bound for centered random exponential sums");
  if (core && prob) rep.satisfied.push_back("universal a.e. convergence of the perturbed averages");
  if (core) rep.satisfied.push_back("square-function bound along geometric subsequences");
  if (core && smoothing_ok) rep.satisfied.push_back("a.e. convergence of the smoothed averages and series");
  return rep;
}

RunResult run_experiment(const ExperimentConfig& c) {
  const std::string hash = config_hash(c);
  const ValidationReport validation = validate(c);
  Experiment e = make_experiment(c, hash);
  const auto seeds = c.seeds.seeds();
  const auto blocks = fan_out(seeds, c.threads, e.per_seed);

  const std::filesystem::path dir(c.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::string id = to_string(c.experiment);
  RunResult res;
  res.csv = dir / (id + ".csv");
  res.summary = dir / (id + ".summary.json");
  res.plot = dir / (id + ".gp");
  write_text(res.csv, csv_text(e.header, blocks));

  Json summary{{"experiment", id}, {"config_hash", hash}, {"seeds", seeds.size()},
               {"csv", res.csv.filename().string()}};
  summary["results"] = e.summarize(blocks);
  summary["validation"] = validation.to_json();
  res.summary_json = summary;
  write_text(res.summary, summary.dump(2) + "\n");
  write_text(dir / (id + ".config.json"), to_json(c).dump(2) + "\n");
  write_text(res.plot, "set datafile separator ','\nset key autotitle columnhead\nset terminal pngcairo size 900,600\n"
                       "set output '" + id + ".png'\ndata = '" + res.csv.filename().string() + "'\n" + e.plot_body);
  return res;
}

std::vector<Json> expand_sweep(const Json& document) {
  std::vector<Json> out{document};
  out.front().erase("sweep");
  if (!document.contains("sweep")) return out;
  const Json& sw = document.at("sweep");
  if (!sw.is_object()) throw ConfigurationError("sweep must map dotted keys to lists of values");
  for (const auto& [key, values] : sw.items()) {
    if (!values.is_array() || values.empty()) throw ConfigurationError("sweep." + key + " must be a non-empty list");
    std::string ptr = "/" + key;
    for (auto& ch : ptr)
      if (ch == '.') ch = '/';
    std::vector<Json> next;
    for (const auto& base : out)
      for (const auto& v : values) {
        Json j = base;
        j[Json::json_pointer(ptr)] = v;
        next.push_back(std::move(j));
      }
    out = std::move(next);
  }
  return out;
}

Json run_sweep(const Json& document, const std::filesystem::path& base_dir, const std::filesystem::path& out_dir,
               int threads) {
  const auto variants = expand_sweep(document);
  Json index = Json::array();
  for (std::size_t i = 0; i < variants.size(); ++i) {
    ExperimentConfig c = config_from_json(variants[i], base_dir);
    c.output_dir = (out_dir / ("variant_" + std::to_string(i))).string();
    c.threads = threads;
    const RunResult r = run_experiment(c);
    index.push_back(Json{{"variant", i}, {"config_hash", r.summary_json.at("config_hash")},
                         {"output", c.output_dir}, {"results", r.summary_json.at("results")}});
  }
  Json summary{{"variants", index.size()}, {"runs", index}};
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "sweep.summary.json", summary.dump(2) + "\n");
  return summary;
}

}  // namespace rpavg
