#include "rpavg/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "rpavg/errors.hpp"

namespace rpavg {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigurationError(where + ": missing key '" + key + "'");
  return j.at(key);
}

void allow_keys(const Json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError(where + " must be an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigurationError(where + ": unknown key '" + k + "'");
}

template <class T>
T get_as(const Json& j, const std::string& where) {
  try {
    return j.get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigurationError(where + " must be a number");
  return j.get<double>();
}

Json law_to_json(const CoordinateLaw& law) {
  Json params = Json::array({law.p1});
  if (law.family == PerturbationFamily::kPareto) params.push_back(law.p2);
  return Json{{"family", to_string(law.family)}, {"params", params}};
}

CoordinateLaw law_from_json(const Json& j, const std::string& where) {
  allow_keys(j, {"family", "params", "d"}, where);
  CoordinateLaw law;
  try {
    law.family = perturbation_family_from_string(get_as<std::string>(require(j, "family", where), where));
  } catch (const ParameterError& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
  const Json& p = require(j, "params", where);
  const std::size_t want = law.family == PerturbationFamily::kPareto ? 2 : 1;
  if (!p.is_array() || p.size() != want)
    throw ConfigurationError(where + ": family " + to_string(law.family) + " takes " +
                             std::to_string(want) + " parameter(s)");
  law.p1 = number(p[0], where + ".params[0]");
  if (want == 2) law.p2 = number(p[1], where + ".params[1]");
  return law;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json toml_node_to_json(const toml::node& n) {
  if (auto t = n.as_table()) {
    Json out = Json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_node_to_json(v);
    return out;
  }
  if (auto a = n.as_array()) {
    Json out = Json::array();
    for (const auto& v : *a) out.push_back(toml_node_to_json(v));
    return out;
  }
  if (auto v = n.as_string()) return v->get();
  if (auto v = n.as_integer()) return v->get();
  if (auto v = n.as_floating_point()) return v->get();
  if (auto v = n.as_boolean()) return v->get();
  throw ConfigurationError("unsupported TOML value (dates and times are not config values)");
}

struct ParamSchema {
  Json defaults;
  std::vector<const char*> optional;
};

ParamSchema schema(ExperimentId id) {
  switch (id) {
    case ExperimentId::kDecay: return {Json{{"ns", {16, 32, 64, 128}}}, {"spacing"}};
    case ExperimentId::kRatio:
      return {Json{{"ms", {64, 128, 256}}, {"Ts", {8.0, 32.0}}, {"mode", "probability"}}, {"spacing"}};
    case ExperimentId::kSquare:
      return {Json{{"rhos", {1.5, 2.0}}, {"N", 10}, {"moment", "loglog"}}, {"spectral_atoms"}};
    case ExperimentId::kConvergence:
      return {Json{{"js", {3, 4, 5, 6, 7}}, {"s", 3.0}, {"sample_seed", 7}, {"family", "D"}}, {}};
    case ExperimentId::kSmoothed: return {Json{{"ms", {8, 16, 32, 64}}, {"s", 3.0}}, {}};
    case ExperimentId::kContrast:
      return {Json{{"ns", {8, 16, 32, 64, 128, 256}}, {"t_scale", 1.0}}, {}};
  }
  return {};
}

}  // namespace

std::string to_string(ExperimentId id) {
  switch (id) {
    case ExperimentId::kDecay: return "E1_decay";
    case ExperimentId::kRatio: return "E2_ratio";
    case ExperimentId::kSquare: return "E3_square";
    case ExperimentId::kConvergence: return "E4_convergence";
    case ExperimentId::kSmoothed: return "E5_smoothed";
    case ExperimentId::kContrast: return "E6_contrast";
  }
  return "?";
}

ExperimentId experiment_from_string(const std::string& s) {
  for (auto id : {ExperimentId::kDecay, ExperimentId::kRatio, ExperimentId::kSquare,
                  ExperimentId::kConvergence, ExperimentId::kSmoothed, ExperimentId::kContrast})
    if (s == to_string(id)) return id;
  throw ConfigurationError("unknown experiment '" + s + "'");
}

std::vector<std::uint64_t> SeedPlan::seeds() const {
  if (!list.empty()) return list;
  std::vector<std::uint64_t> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = base + i;
  return out;
}

std::optional<TorusObservable> ExperimentConfig::resolve_observable() const {
  if (observable) return observable;
  if (!observable_file) return std::nullopt;
  std::filesystem::path p(*observable_file);
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return load_observable(p);
}

Json to_json(const PerturbationSpec& p) {
  bool iid = !p.coords.empty();
  for (const auto& c : p.coords) iid = iid && c == p.coords.front();
  if (iid) {
    Json j = law_to_json(p.coords.front());
    j["d"] = p.d;
    return j;
  }
  Json coords = Json::array();
  for (const auto& c : p.coords) coords.push_back(law_to_json(c));
  return Json{{"d", p.d}, {"coords", coords}};
}

PerturbationSpec perturbation_from_json(const Json& j) {
  const std::string where = "perturbation";
  if (!j.is_object()) throw ConfigurationError(where + " must be an object");
  PerturbationSpec p;
  p.d = j.contains("d") ? get_as<int>(j.at("d"), where + ".d") : 1;
  if (p.d < 1) throw ConfigurationError(where + ".d must be >= 1");
  if (j.contains("coords")) {
    allow_keys(j, {"d", "coords"}, where);
    const Json& c = j.at("coords");
    if (!c.is_array() || c.size() != static_cast<std::size_t>(p.d))
      throw ConfigurationError(where + ".coords must list d laws");
    for (std::size_t i = 0; i < c.size(); ++i)
      p.coords.push_back(law_from_json(c[i], where + ".coords[" + std::to_string(i) + "]"));
  } else {
    p.coords.assign(static_cast<std::size_t>(p.d), law_from_json(j, where));
  }
  p.validate();
  return p;
}

Json to_json(const SubsequenceSpec& s) {
  Json j{{"family", to_string(s.family)}, {"beta", s.beta}, {"r", s.r}, {"d", s.d}};
  if (s.family == SubsequenceFamily::kPower) j["power"] = s.power;
  if (!s.scales.empty()) j["scales"] = s.scales;
  if (s.certificate > 0.0) j["certificate"] = s.certificate;
  return j;
}

SubsequenceSpec subsequence_from_json(const Json& j) {
  const std::string where = "subsequence";
  allow_keys(j, {"family", "beta", "r", "d", "power", "scales", "certificate"}, where);
  SubsequenceSpec s;
  try {
    s.family = subsequence_family_from_string(get_as<std::string>(require(j, "family", where), where));
  } catch (const ParameterError& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
  if (j.contains("beta")) s.beta = number(j.at("beta"), where + ".beta");
  if (j.contains("r")) s.r = get_as<int>(j.at("r"), where + ".r");
  if (j.contains("d")) s.d = get_as<int>(j.at("d"), where + ".d");
  if (j.contains("power")) s.power = number(j.at("power"), where + ".power");
  if (j.contains("scales")) s.scales = get_as<Vec>(j.at("scales"), where + ".scales");
  if (j.contains("certificate")) s.certificate = number(j.at("certificate"), where + ".certificate");
  s.validate();
  return s;
}

Json to_json(const AtomicMeasure& m) {
  Json atoms = Json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto p = m.point(i);
    atoms.push_back(Json::array({Vec(p.begin(), p.end()), m.weight(i).real(), m.weight(i).imag()}));
  }
  return Json{{"atoms", atoms}};
}

AtomicMeasure atomic_measure_from_json(const Json& j) {
  const std::string where = "base";
  allow_keys(j, {"atoms"}, where);
  const Json& a = require(j, "atoms", where);
  if (!a.is_array() || a.empty()) throw ConfigurationError(where + ".atoms must be a non-empty list");
  std::vector<AtomicMeasure::Atom> atoms;
  int d = -1;
  for (const auto& e : a) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_array())
      throw ConfigurationError(where + ": each atom is [[u...], re, im]");
    Vec u = get_as<Vec>(e[0], where);
    if (d < 0) d = static_cast<int>(u.size());
    atoms.push_back({std::move(u), {number(e[1], where), number(e[2], where)}});
  }
  try {
    return AtomicMeasure(d, std::move(atoms));
  } catch (const ArgumentError& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
}

Json to_json(const ModelSpec& m) {
  Json j{{"perturbation", to_json(m.perturbation)}, {"subsequence", to_json(m.subsequence)}};
  if (m.smoothing) {
    j["smoothing"] = Json{{"kernel", to_string(m.smoothing->kernel.family())},
                          {"cutoff", m.smoothing->kernel.cutoff()},
                          {"epsilon", to_json(m.smoothing->epsilon)}};
  }
  if (m.base) j["base"] = to_json(*m.base);
  j["coefficients"] = Json{{"rule", m.coefficients.rule == CoefficientRule::kUnit ? "unit" : "inverse_power"},
                           {"scale", m.coefficients.scale}};
  j["expectation"] = Json{{"mode", m.expectation.mode == ExpectationMode::kAuto ? "auto" : "monte_carlo"},
                          {"samples", m.expectation.samples},
                          {"seed", m.expectation.seed}};
  return j;
}

ModelSpec model_from_json(const Json& j) {
  const std::string where = "model";
  allow_keys(j, {"perturbation", "subsequence", "smoothing", "base", "coefficients", "expectation"}, where);
  ModelSpec m;
  m.perturbation = perturbation_from_json(require(j, "perturbation", where));
  m.subsequence = subsequence_from_json(require(j, "subsequence", where));
  if (j.contains("smoothing")) {
    const Json& s = j.at("smoothing");
    allow_keys(s, {"kernel", "cutoff", "epsilon"}, "smoothing");
    KernelFamily fam = KernelFamily::kBox;
    if (s.contains("kernel")) {
      try {
        fam = kernel_family_from_string(get_as<std::string>(s.at("kernel"), "smoothing.kernel"));
      } catch (const ParameterError& e) {
        throw ConfigurationError(std::string("smoothing: ") + e.what());
      }
    }
    const double cutoff = s.contains("cutoff") ? number(s.at("cutoff"), "smoothing.cutoff") : 3.0;
    m.smoothing = SmoothingSpec{perturbation_from_json(require(s, "epsilon", "smoothing")),
                                SmoothingKernel(fam, cutoff)};
  }
  if (j.contains("base")) m.base = atomic_measure_from_json(j.at("base"));
  if (j.contains("coefficients")) {
    const Json& c = j.at("coefficients");
    allow_keys(c, {"rule", "scale"}, "coefficients");
    if (c.contains("rule")) {
      const auto rule = get_as<std::string>(c.at("rule"), "coefficients.rule");
      if (rule == "unit") m.coefficients.rule = CoefficientRule::kUnit;
      else if (rule == "inverse_power") m.coefficients.rule = CoefficientRule::kInversePower;
      else throw ConfigurationError("coefficients.rule must be unit or inverse_power");
    }
    if (c.contains("scale")) m.coefficients.scale = number(c.at("scale"), "coefficients.scale");
  }
  if (j.contains("expectation")) {
    const Json& e = j.at("expectation");
    allow_keys(e, {"mode", "samples", "seed"}, "expectation");
    if (e.contains("mode")) {
      const auto mode = get_as<std::string>(e.at("mode"), "expectation.mode");
      if (mode == "auto") m.expectation.mode = ExpectationMode::kAuto;
      else if (mode == "monte_carlo") m.expectation.mode = ExpectationMode::kMonteCarlo;
      else throw ConfigurationError("expectation.mode must be auto or monte_carlo");
    }
    if (e.contains("samples")) m.expectation.samples = get_as<std::size_t>(e.at("samples"), "expectation.samples");
    if (e.contains("seed")) m.expectation.seed = get_as<std::uint64_t>(e.at("seed"), "expectation.seed");
  }
  if (m.subsequence.d != m.perturbation.d)
    throw ConfigurationError("subsequence.d and perturbation.d differ");
  return m;
}

Json to_json(const TorusObservable& f) {
  Json terms = Json::array();
  for (const auto& t : f.terms()) terms.push_back(Json::array({t.m, t.c.real(), t.c.imag()}));
  Json j{{"d", f.d()}, {"terms", terms}};
  if (f.real_valued()) j["real"] = true;
  return j;
}

TorusObservable observable_from_json(const Json& j) {
  const std::string where = "observable";
  allow_keys(j, {"d", "terms", "real"}, where);
  const int d = get_as<int>(require(j, "d", where), where + ".d");
  const Json& t = require(j, "terms", where);
  if (!t.is_array()) throw ConfigurationError(where + ".terms must be a list");
  std::vector<TorusObservable::Term> terms;
  for (const auto& e : t) {
    if (!e.is_array() || e.size() != 3 || !e[0].is_array())
      throw ConfigurationError(where + ": each term is [[m...], re, im]");
    terms.push_back({get_as<Frequency>(e[0], where), {number(e[1], where), number(e[2], where)}});
  }
  const bool real = j.contains("real") && get_as<bool>(j.at("real"), where + ".real");
  try {
    return TorusObservable(d, std::move(terms), real);
  } catch (const ArgumentError& e) {
    throw ConfigurationError(where + ": " + e.what());
  }
}

TorusObservable load_observable(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigurationError("observable file not found: " + path.string());
  return observable_from_json(load_document(path));
}

Json default_params(ExperimentId id) { return schema(id).defaults; }

Json to_json(const ExperimentConfig& c) {
  Json j{{"experiment", to_string(c.experiment)}, {"model", to_json(c.model)}};
  if (c.observable_file) j["observable"] = *c.observable_file;
  else if (c.observable) j["observable"] = to_json(*c.observable);
  if (!c.seeds.list.empty()) j["seeds"] = c.seeds.list;
  else j["seeds"] = Json{{"base", c.seeds.base}, {"count", c.seeds.count}};
  j["budget"] = Json{{"grid_points", c.grid_budget}, {"T_max", c.T_max}};
  j["output"] = c.output_dir;
  j["threads"] = c.threads;
  j["params"] = c.params;
  return j;
}

ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  allow_keys(j, {"experiment", "model", "observable", "seeds", "seed", "budget", "output", "threads", "params",
                 "sweep"},
             "config");
  ExperimentConfig c;
  c.base_dir = base_dir;
  c.experiment = experiment_from_string(get_as<std::string>(require(j, "experiment", "config"), "experiment"));
  c.model = model_from_json(require(j, "model", "config"));
  if (j.contains("observable")) {
    const Json& o = j.at("observable");
    if (o.is_string()) c.observable_file = o.get<std::string>();
    else c.observable = observable_from_json(o);
  }
  if (j.contains("seed") && j.contains("seeds")) throw ConfigurationError("give either seed or seeds, not both");
  if (j.contains("seed")) {
    c.seeds.list = {get_as<std::uint64_t>(j.at("seed"), "seed")};
  } else if (j.contains("seeds")) {
    const Json& s = j.at("seeds");
    if (s.is_array()) {
      c.seeds.list = get_as<std::vector<std::uint64_t>>(s, "seeds");
      if (c.seeds.list.empty()) throw ConfigurationError("seeds list is empty");
    } else {
      allow_keys(s, {"base", "count"}, "seeds");
      if (s.contains("base")) c.seeds.base = get_as<std::uint64_t>(s.at("base"), "seeds.base");
      if (s.contains("count")) c.seeds.count = get_as<std::size_t>(s.at("count"), "seeds.count");
      if (c.seeds.count == 0) throw ConfigurationError("seeds.count must be >= 1");
    }
  }
  if (j.contains("budget")) {
    const Json& b = j.at("budget");
    allow_keys(b, {"grid_points", "T_max"}, "budget");
    if (b.contains("grid_points")) c.grid_budget = get_as<std::size_t>(b.at("grid_points"), "budget.grid_points");
    if (b.contains("T_max")) c.T_max = number(b.at("T_max"), "budget.T_max");
    if (c.grid_budget < 1 || !(c.T_max >= 2.0)) throw ConfigurationError("budget needs grid_points >= 1 and T_max >= 2");
  }
  if (j.contains("output")) c.output_dir = get_as<std::string>(j.at("output"), "output");
  if (j.contains("threads")) c.threads = get_as<int>(j.at("threads"), "threads");
  if (c.threads < 1) throw ConfigurationError("threads must be >= 1");

  const ParamSchema sch = schema(c.experiment);
  c.params = sch.defaults;
  if (j.contains("params")) {
    const Json& p = j.at("params");
    if (!p.is_object()) throw ConfigurationError("params must be an object");
    for (const auto& [k, v] : p.items()) {
      bool known = sch.defaults.contains(k);
      for (const char* o : sch.optional) known = known || k == o;
      if (!known)
        throw ConfigurationError("params: unknown key '" + k + "' for " + to_string(c.experiment));
      c.params[k] = v;
    }
  }
  return c;
}

Json parse_document(const std::string& text, const std::string& format) {
  if (format == "toml") {
    try {
      return toml_node_to_json(toml::parse(text));
    } catch (const toml::parse_error& e) {
      std::ostringstream os;
      os << "TOML parse error: " << e.description() << " at line " << e.source().begin.line;
      throw ConfigurationError(os.str());
    }
  }
  if (format == "json") {
    try {
      return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigurationError(std::string("JSON parse error: ") + e.what());
    }
  }
  throw ArgumentError("unknown document format '" + format + "'");
}

Json load_document(const std::filesystem::path& path) {
  const std::string ext = path.extension().string();
  return parse_document(read_file(path), ext == ".toml" ? "toml" : "json");
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigurationError("config file not found: " + path.string());
  return config_from_json(load_document(path), path.parent_path());
}

std::string config_hash(const ExperimentConfig& c) {
  Json j = to_json(c);
  j.erase("output");
  j.erase("threads");
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace rpavg
