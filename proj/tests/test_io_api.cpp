#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>

#include "nnls/config.hpp"
#include "nnls/errors.hpp"
#include "nnls/nnls.h"
#include "nnls/report.hpp"

using namespace nnls;
using nlohmann::json;

namespace {

json base_config() {
  return json{{"params",
               {{"N", 3}, {"p", 3.0}, {"q", 5.0}, {"beta", 1.0}, {"alpha_factor", 0.5},
                {"alpha_ref", "alpha_V"}}},
              {"potential", {{"kind", "zero"}}},
              {"branch", "local"},
              {"grid", {{"M", 512}, {"r_factor", 2.0}}},
              {"constants_cache", (std::filesystem::temp_directory_path() /
                                   "nnls_test_cache").string()}};
}

}  // namespace

TEST_CASE("config parsing reports the offending field") {
  json j = base_config();
  j["grid"]["M"] = 4;
  try {
    ExperimentConfig::parse(j);
    FAIL("expected ConfigInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigInvalid);
    CHECK(std::string(e.what()).find("grid.M") != std::string::npos);
  }
  json j2 = base_config();
  j2["tolerances"] = {{"poh", -1.0}};
  CHECK_THROWS_AS(ExperimentConfig::parse(j2), Error);
  json j3 = base_config();
  j3["params"].erase("alpha_factor");
  CHECK_THROWS_AS(ExperimentConfig::parse(j3), Error);
  json j4 = base_config();
  j4["sweep"] = {{"alpha_list", {2.0, 1.0}}};
  CHECK_THROWS_AS(ExperimentConfig::parse(j4), Error);
}

TEST_CASE("axis specs parse") {
  const auto g = parse_geometric_axis("2:16:4");
  REQUIRE(g.size() == 4);
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(4.0));
  CHECK(g[2] == doctest::Approx(8.0));
  CHECK(g[3] == doctest::Approx(16.0));
  const auto l = parse_linear_axis("0.5:1.0:6");
  REQUIRE(l.size() == 6);
  CHECK(l[1] == doctest::Approx(0.6));
  CHECK(l.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(parse_geometric_axis("nope"), Error);
}

TEST_CASE("defaults are echoed so reports are self-describing") {
  const auto cfg = ExperimentConfig::parse(base_config());
  const auto echo = cfg.echo();
  CHECK(echo.at("tolerances").at("res_rel").get<double>() == 1e-8);
  CHECK(echo.at("tolerances").at("poh").get<double>() == 1e-6);
  CHECK(echo.at("tolerances").at("path_points").get<int>() == 33);
  CHECK(echo.at("s").get<double>() == 1.0);
}

TEST_CASE("a local-branch request with beta <= 0 is refused as a regime error") {
  json j = base_config();
  j["params"]["beta"] = -1.0;
  j["params"].erase("alpha_factor");
  j["params"]["alpha"] = 0.5;
  const auto cfg = ExperimentConfig::parse(j);
  try {
    run_solve(cfg, false);
    FAIL("expected RegimeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegimeMismatch);
  }
}

TEST_CASE("an overweight local-branch request is refused up front") {
  json j = base_config();
  j["params"].erase("alpha_factor");
  j["params"]["alpha"] = 1e9;
  const auto cfg = ExperimentConfig::parse(j);
  try {
    run_solve(cfg, false);
    FAIL("expected RegimeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RegimeMismatch);
    CHECK(std::string(e.what()).find("alpha_V") != std::string::npos);
  }
}

TEST_CASE("solve reports pass their own verification and verify flags tampering") {
  const auto cfg = ExperimentConfig::parse(base_config());
  auto rep = run_solve(cfg, true);
  CHECK(rep.exit_grade() == 0);
  REQUIRE_FALSE(rep.results.empty());

  auto ver = run_verify(rep.results.back());
  CHECK(ver.exit_grade() == 0);

  // tamper with one interior profile value: identities must break
  auto tampered = rep.results.back();
  auto values = tampered.at("profile").at("values").get<std::vector<double>>();
  values[values.size() / 3] *= 1.02;
  tampered["profile"]["values"] = values;
  auto bad = run_verify(tampered);
  CHECK(bad.exit_grade() == 3);
}

TEST_CASE("sweep output is deterministic and row-counted") {
  json j = base_config();
  j["grid"]["M"] = 256;
  j["sweep"] = {{"r_geom", "2:4:2"}};
  const auto cfg = ExperimentConfig::parse(j);
  std::string csv1, csv2;
  auto rep1 = run_sweep(cfg, &csv1);
  auto rep2 = run_sweep(cfg, &csv2);
  CHECK(csv1 == csv2);  // byte-identical
  CHECK(rep1.to_json().dump() == rep2.to_json().dump());
  // header + one row per radius
  CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 3);
  CHECK(csv1.rfind("r,alpha,beta,s,branch,energy,lambda,mass_err,residual,pohozaev,", 0) == 0);
}

TEST_CASE("report JSON round-trips through its schema") {
  const auto cfg = ExperimentConfig::parse(base_config());
  const auto rep = run_thresholds(cfg);
  const auto j = rep.to_json();
  const auto back = json::parse(j.dump());
  for (const char* key : {"schema", "config", "thresholds", "checks", "exit_grade"})
    CHECK(back.contains(key));
  CHECK(back.at("schema") == "nnls-report-v1");
  CHECK(json::parse(back.dump()).dump() == back.dump());
}

TEST_CASE("C interface: constants handle and error reporting") {
  nnls_constants* table = nullptr;
  const double exps[2] = {3.0, 5.0};
  const auto cache = (std::filesystem::temp_directory_path() / "nnls_test_cache").string();
  REQUIRE(nnls_constants_compute(3, exps, 2, cache.c_str(), &table) == NNLS_OK);
  char* text = nullptr;
  REQUIRE(nnls_constants_to_json(table, &text) == NNLS_OK);
  const auto j = json::parse(text);
  CHECK(j.at("S").at("value").get<double>() == doctest::Approx(5.4779).epsilon(1e-4));
  CHECK(j.at("theta1").at("value").get<double>() == doctest::Approx(M_PI * M_PI).epsilon(1e-9));
  nnls_string_free(text);
  nnls_constants_free(table);

  CHECK(nnls_constants_compute(1, exps, 2, nullptr, &table) != NNLS_OK);
  CHECK(std::strlen(nnls_last_error()) > 0);
}

TEST_CASE("C interface: solve returns a graded report; bad configs are classified") {
  const std::string cfg = base_config().dump();
  char* rep = nullptr;
  const nnls_status st = nnls_solve_json(cfg.c_str(), &rep);
  CHECK(st == NNLS_OK);
  REQUIRE(rep != nullptr);
  const auto j = json::parse(rep);
  CHECK(j.at("exit_grade").get<int>() == 0);
  nnls_string_free(rep);

  CHECK(nnls_solve_json("{not json", nullptr) == NNLS_CONFIG_ERROR);
  CHECK(nnls_solve_json("{\"params\":{\"p\": 9.0, \"alpha\": 1.0}}", nullptr) ==
        NNLS_CONFIG_ERROR);
  char* out = nullptr;
  CHECK(nnls_verify_json("{}", &out) == NNLS_CONFIG_ERROR);
}
