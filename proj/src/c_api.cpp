#include "nnls/nnls.h"

#include <cstdlib>
#include <cstring>
#include <optional>
#include <vector>
#include <string>

#include "nnls/config.hpp"
#include "nnls/errors.hpp"
#include "nnls/report.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

nnls_status status_of(const nnls::Error& e) {
  using nnls::ErrorCode;
  switch (e.code()) {
    case ErrorCode::ConfigInvalid:
    case ErrorCode::ExponentOrderViolation:
    case ErrorCode::NonpositiveMass:
    case ErrorCode::RegimeMismatch:
    case ErrorCode::TailNotIntegrable:
    case ErrorCode::HypothesisViolated:
      return NNLS_CONFIG_ERROR;
    case ErrorCode::IoFailure:
      return NNLS_IO_ERROR;
    case ErrorCode::Internal:
      return NNLS_INTERNAL_ERROR;
    default:
      return NNLS_HARD_CHECK_FAILED;  /* solver/identity failures */
  }
}

nnls_status grade_to_status(int grade) {
  if (grade == 0) return NNLS_OK;
  if (grade == 2) return NNLS_SOFT_CHECK_FAILED;
  return NNLS_HARD_CHECK_FAILED;
}

template <typename Fn>
nnls_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const nnls::Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return NNLS_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown failure";
    return NNLS_INTERNAL_ERROR;
  }
}

nlohmann::json parse_json_or_throw(const char* text, const char* what) {
  if (text == nullptr) nnls::fail(nnls::ErrorCode::ConfigInvalid, std::string(what) + " is null");
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    nnls::fail(nnls::ErrorCode::ConfigInvalid, std::string(what) + ": " + e.what());
  }
}

}  // namespace

struct nnls_constants {
  nnls::ConstantsTable table;
};

extern "C" {

const char* nnls_version(void) { return "0.1.0"; }

const char* nnls_last_error(void) { return g_last_error.c_str(); }

void nnls_string_free(char* s) { std::free(s); }

nnls_status nnls_constants_compute(int N, const double* s_exponents, int n_exponents,
                                   const char* cache_dir, nnls_constants** out) {
  return guarded([&]() -> nnls_status {
    if (out == nullptr || (n_exponents > 0 && s_exponents == nullptr))
      nnls::fail(nnls::ErrorCode::ConfigInvalid, "null output or exponent buffer");
    std::vector<double> s(s_exponents, s_exponents + n_exponents);
    std::optional<std::string> dir;
    if (cache_dir != nullptr)
      dir = std::string(cache_dir);
    else if (const char* env = std::getenv("NNLS_CONSTANTS_CACHE"))
      dir = std::string(env);
    auto table = nnls::compute_constants(N, s, nnls::Tolerances{}, dir);
    *out = new nnls_constants{std::move(table)};
    return NNLS_OK;
  });
}

void nnls_constants_free(nnls_constants* table) { delete table; }

nnls_status nnls_constants_to_json(const nnls_constants* table, char** json_out) {
  return guarded([&]() -> nnls_status {
    if (table == nullptr || json_out == nullptr)
      nnls::fail(nnls::ErrorCode::ConfigInvalid, "null argument");
    *json_out = dup_string(nnls::constants_to_json(table->table).dump(1));
    return NNLS_OK;
  });
}

nnls_status nnls_thresholds_json(const char* config_json, char** report_json) {
  return guarded([&]() -> nnls_status {
    auto cfg = nnls::ExperimentConfig::parse(parse_json_or_throw(config_json, "config"));
    auto rep = nnls::run_thresholds(cfg);
    if (report_json != nullptr) *report_json = dup_string(rep.to_json().dump(1));
    return grade_to_status(rep.exit_grade());
  });
}

nnls_status nnls_solve_json(const char* config_json, char** report_json) {
  return guarded([&]() -> nnls_status {
    auto cfg = nnls::ExperimentConfig::parse(parse_json_or_throw(config_json, "config"));
    auto rep = nnls::run_solve(cfg, true);
    if (report_json != nullptr) *report_json = dup_string(rep.to_json().dump(1));
    return grade_to_status(rep.exit_grade());
  });
}

nnls_status nnls_sweep_csv(const char* config_json, char** csv_out, char** report_json) {
  return guarded([&]() -> nnls_status {
    auto cfg = nnls::ExperimentConfig::parse(parse_json_or_throw(config_json, "config"));
    std::string csv;
    auto rep = nnls::run_sweep(cfg, &csv);
    if (csv_out != nullptr) *csv_out = dup_string(csv);
    if (report_json != nullptr) *report_json = dup_string(rep.to_json().dump(1));
    return grade_to_status(rep.exit_grade());
  });
}

nnls_status nnls_homotopy_json(const char* config_json, char** report_json) {
  return guarded([&]() -> nnls_status {
    auto cfg = nnls::ExperimentConfig::parse(parse_json_or_throw(config_json, "config"));
    auto rep = nnls::run_homotopy(cfg);
    if (report_json != nullptr) *report_json = dup_string(rep.to_json().dump(1));
    return grade_to_status(rep.exit_grade());
  });
}

nnls_status nnls_run_json(const char* config_json, char** csv_out, char** report_json) {
  return guarded([&]() -> nnls_status {
    auto cfg = nnls::ExperimentConfig::parse(parse_json_or_throw(config_json, "config"));
    std::string csv;
    auto rep = nnls::run_experiment(cfg, &csv);
    if (csv_out != nullptr) *csv_out = dup_string(csv);
    if (report_json != nullptr) *report_json = dup_string(rep.to_json().dump(1));
    return grade_to_status(rep.exit_grade());
  });
}

nnls_status nnls_verify_json(const char* result_json, char** report_json) {
  return guarded([&]() -> nnls_status {
    auto rep = nnls::run_verify(parse_json_or_throw(result_json, "result"));
    if (report_json != nullptr) *report_json = dup_string(rep.to_json().dump(1));
    return grade_to_status(rep.exit_grade());
  });
}

}  // extern "C"
