#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rpavg/config.hpp"
#include "rpavg/perturbation.hpp"

namespace rpavg {

struct HypothesisCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;
  std::vector<std::string> failures;   // details of the failed checks
  std::vector<std::string> satisfied;  // results whose hypotheses all hold
  bool ok() const noexcept { return failures.empty(); }
  Json to_json() const;
};

// Checks the growth, tail, smoothing and parameter hypotheses the
// experiment's estimates depend on. Never throws for a failed hypothesis.
ValidationReport validate(const ExperimentConfig& config);

struct RunResult {
  std::filesystem::path csv;
  std::filesystem::path summary;
  std::filesystem::path plot;
  Json summary_json;
};

// Runs every seed (fanned out over config.threads workers, aggregated in
// seed order) and writes <id>.csv, <id>.summary.json, <id>.gp and the
// resolved <id>.config.json into config.output_dir.
RunResult run_experiment(const ExperimentConfig& config);

// Expands the document's "sweep" table (dotted key -> list of values) into
// the cartesian product of configs, runs each under out_dir/variant_<i>
// and returns an index of the variants.
Json run_sweep(const Json& document, const std::filesystem::path& base_dir,
               const std::filesystem::path& out_dir, int threads = 1);
std::vector<Json> expand_sweep(const Json& document);

}  // namespace rpavg
