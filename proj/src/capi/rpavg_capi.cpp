#include "rpavg/rpavg.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "rpavg/averages.hpp"
#include "rpavg/config.hpp"
#include "rpavg/errors.hpp"
#include "rpavg/experiments.hpp"
#include "rpavg/kernel_engine.hpp"
#include "rpavg/variation.hpp"

struct rpa_config {
  rpavg::Json document;
  rpavg::ExperimentConfig config;
};

struct rpa_model {
  rpavg::TransitionMeasureModel model;
};

struct rpa_observable {
  rpavg::TorusObservable f;
};

namespace {

thread_local std::string g_last_error;

rpa_status fail(rpa_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
rpa_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RPA_OK;
  } catch (const rpavg::Error& e) {
    return fail(static_cast<rpa_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(RPA_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(RPA_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(RPA_ERR_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void need(const void* p, const char* what) {
  if (!p) throw rpavg::ArgumentError(std::string(what) + " must not be NULL");
}

}  // namespace

extern "C" {

const char* rpa_version(void) { return "1.0.0"; }

const char* rpa_last_error(void) { return g_last_error.c_str(); }

const char* rpa_status_name(rpa_status status) {
  switch (status) {
    case RPA_OK: return "ok";
    case RPA_ERR_PARAMETER: return "parameter error";
    case RPA_ERR_RANGE: return "range error";
    case RPA_ERR_CONFIGURATION: return "configuration error";
    case RPA_ERR_SIZE: return "size error";
    case RPA_ERR_ARGUMENT: return "argument error";
    case RPA_ERR_IO: return "i/o error";
    case RPA_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void rpa_string_free(char* s) { std::free(s); }

rpa_status rpa_config_load(const char* path, rpa_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = nullptr;
    const std::filesystem::path p(path);
    if (!std::filesystem::exists(p)) throw rpavg::ConfigurationError(std::string("config file not found: ") + path);
    rpavg::Json doc = rpavg::load_document(p);
    auto* c = new rpa_config{doc, rpavg::config_from_json(doc, p.parent_path())};
    *out = c;
  });
}

rpa_status rpa_config_parse(const char* text, const char* format, const char* base_dir, rpa_config** out) {
  return guarded([&] {
    need(text, "text");
    need(format, "format");
    need(out, "out");
    *out = nullptr;
    rpavg::Json doc = rpavg::parse_document(text, format);
    const std::filesystem::path base = base_dir ? base_dir : "";
    *out = new rpa_config{doc, rpavg::config_from_json(doc, base)};
  });
}

void rpa_config_free(rpa_config* config) { delete config; }

rpa_status rpa_config_override(rpa_config* config, const char* out_dir, int threads, long long seed_count) {
  return guarded([&] {
    need(config, "config");
    auto& c = config->config;
    auto& doc = config->document;
    if (out_dir) {
      c.output_dir = out_dir;
      doc["output"] = out_dir;
    }
    if (threads > 0) {
      c.threads = threads;
      doc["threads"] = threads;
    }
    if (seed_count > 0) {
      const std::uint64_t base = c.seeds.list.empty() ? c.seeds.base : c.seeds.list.front();
      c.seeds = rpavg::SeedPlan{{}, base, static_cast<std::size_t>(seed_count)};
      doc.erase("seed");
      doc["seeds"] = rpavg::Json{{"base", base}, {"count", seed_count}};
    }
  });
}

rpa_status rpa_config_to_json(const rpa_config* config, char** json) {
  return guarded([&] {
    need(config, "config");
    need(json, "json");
    *json = dup(rpavg::to_json(config->config).dump(2));
  });
}

rpa_status rpa_config_hash(const rpa_config* config, char** hex) {
  return guarded([&] {
    need(config, "config");
    need(hex, "hex");
    *hex = dup(rpavg::config_hash(config->config));
  });
}

rpa_status rpa_config_validate(const rpa_config* config, char** report_json, int* ok) {
  return guarded([&] {
    need(config, "config");
    const auto rep = rpavg::validate(config->config);
    if (ok) *ok = rep.ok() ? 1 : 0;
    if (report_json) *report_json = dup(rep.to_json().dump(2));
  });
}

rpa_status rpa_config_run(const rpa_config* config, char** summary_json) {
  return guarded([&] {
    need(config, "config");
    const auto res = rpavg::run_experiment(config->config);
    if (summary_json) *summary_json = dup(res.summary_json.dump(2));
  });
}

rpa_status rpa_config_sweep(const rpa_config* config, char** summary_json) {
  return guarded([&] {
    need(config, "config");
    rpavg::Json doc = config->document;
    const auto summary = rpavg::run_sweep(doc, config->config.base_dir, config->config.output_dir,
                                          config->config.threads);
    if (summary_json) *summary_json = dup(summary.dump(2));
  });
}

rpa_status rpa_model_create(const char* model_json, rpa_model** out) {
  return guarded([&] {
    need(model_json, "model_json");
    need(out, "out");
    *out = nullptr;
    const auto spec = rpavg::model_from_json(rpavg::parse_document(model_json, "json"));
    *out = new rpa_model{rpavg::TransitionMeasureModel(spec)};
  });
}

void rpa_model_free(rpa_model* model) { delete model; }

int rpa_model_dimension(const rpa_model* model) { return model ? model->model.d() : 0; }

rpa_status rpa_partial_sum(const rpa_model* model, uint64_t seed, long long n, long long m, const double* t,
                           size_t d, double* re, double* im) {
  return guarded([&] {
    need(model, "model");
    need(t, "t");
    const auto z = rpavg::partial_sum_transform(model->model, seed, n, m, std::span<const double>(t, d));
    if (re) *re = z.real();
    if (im) *im = z.imag();
  });
}

rpa_status rpa_sup_on_grid(const rpa_model* model, uint64_t seed, long long n, long long m, double T, double h,
                           double* sup, double* certified) {
  return guarded([&] {
    need(model, "model");
    const rpavg::CenteredSum sum(model->model, seed, n, m);
    rpavg::GridSpec g;
    g.T = T;
    g.h = h > 0.0 ? h : rpavg::default_spacing(sum);
    g.d = model->model.d();
    const auto res = rpavg::sup_on_grid(sum, g);
    if (sup) *sup = res.sup_value;
    if (certified) *certified = res.certified_bound;
  });
}

rpa_status rpa_kernel_value(const rpa_model* model, const char* family, uint64_t seed, long long n,
                            const double* t, size_t d, double* re, double* im) {
  return guarded([&] {
    need(model, "model");
    need(family, "family");
    need(t, "t");
    const auto z = rpavg::kernel_value(rpavg::average_family_from_string(family), model->model, seed, n,
                                       std::span<const double>(t, d));
    if (re) *re = z.real();
    if (im) *im = z.imag();
  });
}

rpa_status rpa_observable_create(const char* json, rpa_observable** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = nullptr;
    *out = new rpa_observable{rpavg::observable_from_json(rpavg::parse_document(json, "json"))};
  });
}

void rpa_observable_free(rpa_observable* f) { delete f; }

rpa_status rpa_square_function(const rpa_model* model, uint64_t seed, const rpa_observable* f, double rho, int N,
                               double* value, double* moment) {
  return guarded([&] {
    need(model, "model");
    need(f, "f");
    const auto res = rpavg::square_function(model->model, seed, f->f, rho, N);
    if (value) *value = res.value;
    if (moment) *moment = res.moment;
  });
}

rpa_status rpa_variation_norm(const double* re, const double* im, size_t n, double s, double* out) {
  return guarded([&] {
    need(re, "re");
    need(out, "out");
    std::vector<std::complex<double>> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = {re[i], im ? im[i] : 0.0};
    *out = rpavg::variation_norm(std::span<const std::complex<double>>(x), s);
  });
}

}  // extern "C"
