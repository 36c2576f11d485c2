#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpavg/measures.hpp"
#include "rpavg/spectral.hpp"

namespace rpavg {

using Json = nlohmann::ordered_json;

enum class ExperimentId { kDecay, kRatio, kSquare, kConvergence, kSmoothed, kContrast };

std::string to_string(ExperimentId id);
ExperimentId experiment_from_string(const std::string& s);

// Either an explicit list or base, base+1, ..., base+count-1.
struct SeedPlan {
  std::vector<std::uint64_t> list;
  std::uint64_t base = 1;
  std::size_t count = 10;

  std::vector<std::uint64_t> seeds() const;
  bool operator==(const SeedPlan&) const = default;
};

struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::kDecay;
  ModelSpec model;
  // Exactly one of these describes f when the experiment needs one.
  std::optional<std::string> observable_file;
  std::optional<TorusObservable> observable;
  SeedPlan seeds;
  std::size_t grid_budget = std::size_t{1} << 25;
  double T_max = 4096.0;
  std::string output_dir = "rpavg_out";
  int threads = 1;
  Json params;  // experiment parameters, defaults filled in
  std::filesystem::path base_dir;  // resolves a relative observable_file

  // The observable, reading observable_file on demand.
  std::optional<TorusObservable> resolve_observable() const;
};

Json to_json(const PerturbationSpec& p);
PerturbationSpec perturbation_from_json(const Json& j);
Json to_json(const SubsequenceSpec& s);
SubsequenceSpec subsequence_from_json(const Json& j);
Json to_json(const AtomicMeasure& m);
AtomicMeasure atomic_measure_from_json(const Json& j);
Json to_json(const ModelSpec& m);
ModelSpec model_from_json(const Json& j);
Json to_json(const TorusObservable& f);
TorusObservable observable_from_json(const Json& j);
TorusObservable load_observable(const std::filesystem::path& path);

Json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});

// Parses JSON or TOML text into the common tree.
Json parse_document(const std::string& text, const std::string& format);
// Format chosen by extension (.toml, otherwise JSON).
Json load_document(const std::filesystem::path& path);
ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a of the canonical serialization without output directory and thread
// count, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

// Defaults of each experiment's parameter block.
Json default_params(ExperimentId id);

}  // namespace rpavg
