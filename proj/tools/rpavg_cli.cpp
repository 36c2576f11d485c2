// Command-line front end over the C interface.
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "rpavg/rpavg.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitBudget = 2;

struct ConfigDeleter {
  void operator()(rpa_config* c) const { rpa_config_free(c); }
};
using ConfigPtr = std::unique_ptr<rpa_config, ConfigDeleter>;

struct CString {
  char* p = nullptr;
  ~CString() { rpa_string_free(p); }
};

int report(rpa_status s) {
  std::fprintf(stderr, "rpavg: %s: %s\n", rpa_status_name(s), rpa_last_error());
  return s == RPA_ERR_SIZE ? kExitBudget : kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomly perturbed ergodic averages: seeded experiments and checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(rpa_version()));

  std::string config_path, out_dir;
  int threads = 0;
  long long seed_count = 0;

  auto add_common = [&](CLI::App* sub, bool outputs) {
    sub->add_option("--config", config_path, "Experiment config (.json or .toml)")->required();
    if (outputs) {
      sub->add_option("--out", out_dir, "Output directory (overrides the config)");
      sub->add_option("--threads", threads, "Worker threads over seeds")->check(CLI::PositiveNumber);
      sub->add_option("--seed-count", seed_count, "Number of seeds (overrides the config)")
          ->check(CLI::PositiveNumber);
    }
  };
  auto* validate = app.add_subcommand("validate", "Check the hypotheses a config relies on");
  auto* run = app.add_subcommand("run", "Run one experiment and write CSV, JSON summary and plot script");
  auto* sweep = app.add_subcommand("sweep", "Run the cartesian product given by the config's sweep table");
  add_common(validate, false);
  add_common(run, true);
  add_common(sweep, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  rpa_config* raw = nullptr;
  if (rpa_status s = rpa_config_load(config_path.c_str(), &raw); s != RPA_OK) return report(s);
  ConfigPtr config(raw);
  if (rpa_status s = rpa_config_override(config.get(), out_dir.empty() ? nullptr : out_dir.c_str(), threads,
                                         seed_count);
      s != RPA_OK)
    return report(s);

  CString text;
  if (validate->parsed()) {
    int ok = 0;
    if (rpa_status s = rpa_config_validate(config.get(), &text.p, &ok); s != RPA_OK) return report(s);
    std::printf("%s\n", text.p);
    return ok ? kExitOk : kExitInvalid;
  }
  const rpa_status s = run->parsed() ? rpa_config_run(config.get(), &text.p) : rpa_config_sweep(config.get(), &text.p);
  if (s != RPA_OK) return report(s);
  std::printf("%s\n", text.p);
  return kExitOk;
}
