#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>

#include <json.hpp>

#include "../support/tempdir.hpp"
#include "rpavg/rpavg.h"

namespace {

const char* kModel = R"({"perturbation": {"family": "uniform", "params": [1.0], "d": 1},
                         "subsequence": {"family": "lacunary_exponential", "beta": 0.5, "r": 1, "d": 1}})";

const char* kConfig = R"({"experiment": "E1_decay",
  "model": {"perturbation": {"family": "uniform", "params": [1.0], "d": 1},
            "subsequence": {"family": "lacunary_exponential", "beta": 0.5, "r": 1, "d": 1}},
  "seeds": {"base": 1, "count": 2}, "params": {"ns": [4, 8]}})";

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(rpa_version()) > 0);
  CHECK(std::string(rpa_status_name(RPA_OK)) == "ok");
  CHECK(std::string(rpa_status_name(RPA_ERR_SIZE)) == "size error");
  rpa_string_free(nullptr);
}

TEST_CASE("model handles and evaluations") {
  rpa_model* m = nullptr;
  REQUIRE(rpa_model_create(kModel, &m) == RPA_OK);
  CHECK(rpa_model_dimension(m) == 1);

  const double zero[] = {0.0};
  double re = 1, im = 1;
  CHECK(rpa_partial_sum(m, 3, 0, 5, zero, 1, &re, &im) == RPA_OK);
  CHECK(std::hypot(re, im) < 1e-14);
  const double t[] = {2.5};
  CHECK(rpa_partial_sum(m, 3, 0, 5, t, 1, &re, &im) == RPA_OK);
  CHECK(std::hypot(re, im) > 0.0);

  double sup = 0, cert = 0;
  CHECK(rpa_sup_on_grid(m, 3, 0, 5, 10.0, -1.0, &sup, &cert) == RPA_OK);
  CHECK(sup <= cert);
  CHECK(sup >= std::hypot(re, im) * 0.5);

  CHECK(rpa_kernel_value(m, "G", 3, 4, zero, 1, &re, &im) == RPA_OK);
  CHECK(re == doctest::Approx(1.0));
  CHECK(rpa_kernel_value(m, "Q", 3, 4, zero, 1, &re, &im) == RPA_ERR_CONFIGURATION);
  CHECK(std::string(rpa_last_error()).find("Q") != std::string::npos);
  CHECK(rpa_partial_sum(m, 3, 5, 5, t, 1, &re, &im) == RPA_ERR_ARGUMENT);
  CHECK(rpa_partial_sum(m, 3, 0, 5, t, 2, &re, &im) == RPA_ERR_ARGUMENT);
  CHECK(rpa_sup_on_grid(m, 3, 0, 5, 1e6, 1e-6, &sup, &cert) == RPA_ERR_SIZE);

  rpa_observable* f = nullptr;
  REQUIRE(rpa_observable_create(R"({"d": 1, "terms": [[[3], 1.0, 0.0]]})", &f) == RPA_OK);
  double value = -1, moment = -1;
  CHECK(rpa_square_function(m, 3, f, 2.0, 5, &value, &moment) == RPA_OK);
  CHECK(value >= 0.0);
  CHECK(moment == doctest::Approx(std::log(std::log(6.0 * std::numbers::pi))));
  rpa_observable_free(f);
  rpa_model_free(m);
  rpa_model_free(nullptr);
}

TEST_CASE("invalid inputs map to error codes") {
  rpa_model* m = nullptr;
  CHECK(rpa_model_create("{", &m) == RPA_ERR_CONFIGURATION);
  CHECK(m == nullptr);
  CHECK(rpa_model_create(R"({"perturbation": {"family": "uniform", "params": [-1.0]},
                              "subsequence": {"family": "linear"}})", &m) == RPA_ERR_PARAMETER);
  CHECK(rpa_model_create(nullptr, &m) == RPA_ERR_ARGUMENT);
  double out = 0;
  const double re[] = {0.0, 1.0, 0.0};
  CHECK(rpa_variation_norm(re, nullptr, 3, 0.5, &out) == RPA_ERR_ARGUMENT);
  CHECK(rpa_variation_norm(re, nullptr, 3, 3.0, &out) == RPA_OK);
  CHECK(out == doctest::Approx(std::cbrt(2.0)));
  const double im[] = {0.0, 0.0, 1.0};
  CHECK(rpa_variation_norm(re, im, 3, 1.0, &out) == RPA_OK);
  CHECK(out == doctest::Approx(1.0 + std::sqrt(2.0)));
}

TEST_CASE("config lifecycle") {
  TempDir dir;
  rpa_config* c = nullptr;
  REQUIRE(rpa_config_parse(kConfig, "json", nullptr, &c) == RPA_OK);
  CHECK(rpa_config_override(c, dir.path.string().c_str(), 1, 3) == RPA_OK);

  char* text = nullptr;
  REQUIRE(rpa_config_to_json(c, &text) == RPA_OK);
  const auto j = nlohmann::json::parse(text);
  rpa_string_free(text);
  CHECK(j.at("seeds").at("count") == 3);

  char* hash = nullptr;
  REQUIRE(rpa_config_hash(c, &hash) == RPA_OK);
  CHECK(std::strlen(hash) == 16);
  rpa_string_free(hash);

  int ok = 0;
  REQUIRE(rpa_config_validate(c, &text, &ok) == RPA_OK);
  CHECK(ok == 1);
  rpa_string_free(text);

  REQUIRE(rpa_config_run(c, &text) == RPA_OK);
  CHECK(nlohmann::json::parse(text).at("seeds") == 3);
  rpa_string_free(text);
  CHECK(std::filesystem::exists(dir.path / "E1_decay.csv"));
  rpa_config_free(c);

  CHECK(rpa_config_load((dir.path / "none.json").string().c_str(), &c) == RPA_ERR_CONFIGURATION);
  CHECK(rpa_config_parse("x = ", "toml", nullptr, &c) == RPA_ERR_CONFIGURATION);
}
