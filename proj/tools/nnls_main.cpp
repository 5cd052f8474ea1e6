// Command-line front end; talks to the solver library exclusively through the
// C interface in nnls/nnls.h.

#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nnls/nnls.h"

namespace {

using nlohmann::json;

int map_status(nnls_status st) {
  switch (st) {
    case NNLS_OK: return 0;
    case NNLS_SOFT_CHECK_FAILED: return 2;
    case NNLS_HARD_CHECK_FAILED: return 3;
    case NNLS_CONFIG_ERROR: return 4;
    case NNLS_IO_ERROR: return 4;
    case NNLS_INTERNAL_ERROR: return 3;
  }
  return 3;
}

std::string fmt(double x) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot open " << path << "\n";
    std::exit(4);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    std::cerr << "error: " << path << " is not valid JSON: " << e.what() << "\n";
    std::exit(4);
  }
  return j;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
  return static_cast<bool>(out);
}

struct Owned {
  char* ptr = nullptr;
  ~Owned() { nnls_string_free(ptr); }
  std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

int report_failure(nnls_status st, const char* what) {
  std::cerr << "error (" << what << "): " << nnls_last_error() << "\n";
  return map_status(st);
}

void print_check_lines(const json& report) {
  if (!report.contains("checks")) return;
  for (const auto& c : report.at("checks")) {
    std::cout << (c.at("pass").get<bool>() ? "PASS" : "FAIL") << "  " << std::left
              << c.at("name").get<std::string>() << "  value=" << c.at("value").dump()
              << " " << c.at("relation").get<std::string>() << " " << c.at("bound").dump()
              << (c.at("hard").get<bool>() ? "" : "  [soft]") << "\n";
  }
}

json merged_config(const std::string& config_path, const std::optional<std::string>& branch,
                   std::optional<double> r, std::optional<int> M, std::optional<double> s,
                   const std::optional<std::string>& r_geom,
                   const std::optional<std::string>& s_grid,
                   const std::optional<std::string>& alpha_bisect) {
  json cfg = load_json(config_path);
  if (branch) cfg["branch"] = *branch;
  if (r) cfg["grid"]["r"] = *r;
  if (M) cfg["grid"]["M"] = *M;
  if (s) cfg["s"] = *s;
  if (r_geom) cfg["sweep"]["r_geom"] = *r_geom;
  if (s_grid) cfg["sweep"]["s_grid"] = *s_grid;
  if (alpha_bisect) {
    double lo, hi;
    int n;
    char c1, c2;
    std::istringstream in(*alpha_bisect);
    in >> lo >> c1 >> hi >> c2 >> n;
    if (!in || c1 != ':' || c2 != ':') {
      std::cerr << "error: --alpha-bisect wants lo:hi:steps\n";
      std::exit(4);
    }
    cfg["sweep"]["alpha_bisect"] = {{"lo", lo}, {"hi", hi}, {"steps", n}};
  }
  return cfg;
}

void emit_profile_csv(const json& report, const std::string& path) {
  const json* result = nullptr;
  if (report.contains("results"))
    for (const auto& res : report.at("results"))
      if (res.contains("profile")) result = &res;
  if (result == nullptr) {
    std::cerr << "warning: no embedded profile; skipping " << path << "\n";
    return;
  }
  const auto& prof = result->at("profile");
  const double R = prof.at("R").get<double>();
  const int M = prof.at("M").get<int>();
  const auto values = prof.at("values").get<std::vector<double>>();
  std::ofstream out(path);
  out << "s,u\n";
  for (int i = 0; i <= M && i < static_cast<int>(values.size()); ++i)
    out << fmt(R * i / M) << ',' << fmt(values[i]) << '\n';
}

int cmd_constants(int N, const std::vector<double>& s_list,
                  const std::optional<std::string>& cache,
                  const std::optional<std::string>& out_path) {
  nnls_constants* table = nullptr;
  const nnls_status st = nnls_constants_compute(
      N, s_list.data(), static_cast<int>(s_list.size()), cache ? cache->c_str() : nullptr,
      &table);
  if (st != NNLS_OK) return report_failure(st, "constants");
  Owned text;
  nnls_constants_to_json(table, &text.ptr);
  nnls_constants_free(table);
  const json j = json::parse(text.str());
  std::cout << "N = " << j.at("N").get<int>() << "\n";
  auto prov = [](const json& p) {
    return p.at("method").get<std::string>() + "; " + p.at("resolution").get<std::string>() +
           "; err<=" + fmt(p.at("error_estimate").get<double>());
  };
  std::cout << "S      = " << fmt(j.at("S").at("value").get<double>()) << "   ["
            << prov(j.at("S").at("provenance")) << "]\n";
  std::cout << "theta1 = " << fmt(j.at("theta1").at("value").get<double>()) << "   ["
            << prov(j.at("theta1").at("provenance")) << "]\n";
  for (const auto& g : j.at("gn"))
    std::cout << "C_{N," << fmt(g.at("s").get<double>())
              << "} = " << fmt(g.at("value").get<double>()) << "   ["
              << prov(g.at("provenance")) << "]\n";
  if (out_path && !write_file(*out_path, text.str())) {
    std::cerr << "error: cannot write " << *out_path << "\n";
    return 4;
  }
  return 0;
}

int cmd_thresholds(const std::string& config_path, const std::optional<std::string>& out_path,
                   const std::optional<std::string>& csv_path) {
  const json raw = load_json(config_path);

  // sweep mode: one threshold report per (alpha, beta) tuple
  std::vector<double> alphas, betas;
  if (raw.contains("sweep")) {
    if (raw.at("sweep").contains("alpha_list"))
      alphas = raw.at("sweep").at("alpha_list").get<std::vector<double>>();
    if (raw.at("sweep").contains("beta_list"))
      betas = raw.at("sweep").at("beta_list").get<std::vector<double>>();
  }
  if (csv_path && (!alphas.empty() || !betas.empty())) {
    if (alphas.empty()) alphas = {raw.at("params").value("alpha", 1.0)};
    if (betas.empty()) betas = {raw.at("params").value("beta", 1.0)};
    std::ostringstream csv;
    csv << "alpha,beta,regime,alpha_V,alpha_tilde_V,A_pq,mp_lower,mp_upper,T_alpha_level,"
           "T_alpha_radius,R1,R2,t0,t1,t_bar,t_g,t2,t_alpha,t_tilde,r_alpha,h1_apriori\n";
    for (double b : betas) {
      for (double a : alphas) {
        json cfg = raw;
        cfg.erase("sweep");
        cfg["params"]["alpha"] = a;
        cfg["params"].erase("alpha_factor");
        cfg["params"]["beta"] = b;
        Owned rep;
        const nnls_status st = nnls_thresholds_json(cfg.dump().c_str(), &rep.ptr);
        if (st != NNLS_OK && st != NNLS_SOFT_CHECK_FAILED)
          return report_failure(st, "thresholds sweep");
        const json t = json::parse(rep.str()).at("thresholds");
        auto cell = [&](const char* key) {
          return t.at(key).is_null() ? std::string("nan") : fmt(t.at(key).get<double>());
        };
        csv << fmt(a) << ',' << fmt(b) << ',' << t.at("regime").get<std::string>() << ','
            << cell("alpha_V") << ',' << cell("alpha_tilde_V") << ',' << cell("A_pq") << ','
            << cell("mp_lower") << ',' << cell("mp_upper") << ',' << cell("T_alpha_level") << ','
            << cell("T_alpha_radius") << ',' << cell("R1") << ',' << cell("R2") << ','
            << cell("t0") << ',' << cell("t1") << ',' << cell("t_bar") << ',' << cell("t_g")
            << ',' << cell("t2") << ',' << cell("t_alpha") << ',' << cell("t_tilde") << ','
            << cell("r_alpha") << ',' << cell("h1_apriori") << '\n';
      }
    }
    if (!write_file(*csv_path, csv.str())) {
      std::cerr << "error: cannot write " << *csv_path << "\n";
      return 4;
    }
  }

  Owned rep;
  const nnls_status st = nnls_thresholds_json(raw.dump().c_str(), &rep.ptr);
  if (st != NNLS_OK && st != NNLS_SOFT_CHECK_FAILED && st != NNLS_HARD_CHECK_FAILED)
    return report_failure(st, "thresholds");
  const json j = json::parse(rep.str());
  std::cout << j.at("thresholds").dump(1) << "\n";
  print_check_lines(j);
  if (out_path && !write_file(*out_path, rep.str())) {
    std::cerr << "error: cannot write " << *out_path << "\n";
    return 4;
  }
  return map_status(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"normalized-solution laboratory for radial Schrodinger problems on balls"};
  app.require_subcommand(1);

  // constants
  auto* c_cmd = app.add_subcommand("constants", "compute S, theta1 and C_{N,s}");
  int c_N = 3;
  std::vector<double> c_s;
  std::optional<std::string> c_cache, c_out;
  c_cmd->add_option("--N", c_N, "dimension");
  c_cmd->add_option("--s", c_s, "GN exponent (repeatable)");
  c_cmd->add_option("--cache", c_cache, "constants cache directory");
  c_cmd->add_option("--out", c_out, "write the table as JSON");

  // shared flags
  std::string config_path;
  std::optional<std::string> branch, out_path, csv_path, r_geom, s_grid, alpha_bisect,
      profile_csv;
  std::optional<double> r_opt, s_opt;
  std::optional<int> M_opt;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", config_path, "experiment config JSON")->required();
    cmd->add_option("--branch", branch, "local|mp");
    cmd->add_option("--r", r_opt, "domain radius");
    cmd->add_option("--M", M_opt, "grid intervals");
    cmd->add_option("--s", s_opt, "homotopy weight in [0.5,1]");
    cmd->add_option("--out", out_path, "output report JSON");
  };

  auto* t_cmd = app.add_subcommand("thresholds", "closed-form thresholds and geometry");
  t_cmd->add_option("--config", config_path, "experiment config JSON")->required();
  t_cmd->add_option("--out", out_path, "output report JSON");
  t_cmd->add_option("--csv", csv_path, "CSV over sweep.alpha_list x sweep.beta_list");

  auto* sv_cmd = app.add_subcommand("solve", "one solve on B_r");
  add_common(sv_cmd);
  sv_cmd->add_option("--profile-csv", profile_csv, "dump the converged profile as CSV");

  auto* sw_cmd = app.add_subcommand("sweep", "r-continuation (optionally over alphas)");
  add_common(sw_cmd);
  sw_cmd->add_option("--r-geom", r_geom, "a:b:n geometric factors of r_alpha");
  sw_cmd->add_option("--alpha-bisect", alpha_bisect, "lo:hi:steps empirical lambda-sign search");
  sw_cmd->add_option("--csv", csv_path, "output CSV path");

  auto* h_cmd = app.add_subcommand("homotopy", "s-homotopy chain ending at s=1");
  add_common(h_cmd);
  h_cmd->add_option("--s-grid", s_grid, "a:b:n increasing grid ending at 1");

  auto* v_cmd = app.add_subcommand("verify", "re-run identity checks on a stored result");
  std::string verify_path;
  v_cmd->add_option("result", verify_path, "result or report JSON")->required();

  auto* r_cmd = app.add_subcommand("run", "full experiment: thresholds, solves, verification");
  add_common(r_cmd);
  r_cmd->add_option("--csv", csv_path, "output CSV path (sweeps)");

  CLI11_PARSE(app, argc, argv);

  if (c_cmd->parsed()) {
    if (c_s.empty()) c_s = {3.0, 5.0};
    return cmd_constants(c_N, c_s, c_cache, c_out);
  }
  if (t_cmd->parsed()) return cmd_thresholds(config_path, out_path, csv_path);

  if (v_cmd->parsed()) {
    json stored = load_json(verify_path);
    if (stored.contains("results")) {
      json found;
      for (const auto& res : stored.at("results"))
        if (res.contains("profile")) found = res;
      if (found.is_null()) {
        std::cerr << "error: no embedded profile in " << verify_path << "\n";
        return 4;
      }
      stored = std::move(found);
    }
    Owned rep;
    const nnls_status st = nnls_verify_json(stored.dump().c_str(), &rep.ptr);
    if (st == NNLS_CONFIG_ERROR || st == NNLS_IO_ERROR || st == NNLS_INTERNAL_ERROR)
      return report_failure(st, "verify");
    print_check_lines(json::parse(rep.str()));
    if (out_path && !write_file(*out_path, rep.str())) return 4;
    return map_status(st);
  }

  const json cfg =
      merged_config(config_path, branch, r_opt, M_opt, s_opt, r_geom, s_grid, alpha_bisect);

  Owned rep, csv;
  nnls_status st = NNLS_INTERNAL_ERROR;
  const char* what = "";
  if (sv_cmd->parsed()) {
    st = nnls_solve_json(cfg.dump().c_str(), &rep.ptr);
    what = "solve";
  } else if (sw_cmd->parsed()) {
    st = nnls_sweep_csv(cfg.dump().c_str(), &csv.ptr, &rep.ptr);
    what = "sweep";
  } else if (h_cmd->parsed()) {
    st = nnls_homotopy_json(cfg.dump().c_str(), &rep.ptr);
    what = "homotopy";
  } else if (r_cmd->parsed()) {
    st = nnls_run_json(cfg.dump().c_str(), &csv.ptr, &rep.ptr);
    what = "run";
  }
  if (st == NNLS_CONFIG_ERROR || st == NNLS_IO_ERROR || st == NNLS_INTERNAL_ERROR)
    return report_failure(st, what);

  const json report = json::parse(rep.str());
  print_check_lines(report);
  if (out_path && !write_file(*out_path, rep.str())) {
    std::cerr << "error: cannot write " << *out_path << "\n";
    return 4;
  }
  if (csv_path && csv.ptr != nullptr && !write_file(*csv_path, csv.str())) {
    std::cerr << "error: cannot write " << *csv_path << "\n";
    return 4;
  }
  if (profile_csv) emit_profile_csv(report, *profile_csv);
  return map_status(st);
}
