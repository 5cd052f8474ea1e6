#include "nnls/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "nnls/errors.hpp"

namespace nnls {

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& why) {
  fail(ErrorCode::ConfigInvalid, path + ": " + why);
}

double need_positive(const std::string& path, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) bad(path, "must be positive and finite");
  return v;
}

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    bad(key, e.what());
  }
}

std::vector<double> sorted_axis(const nlohmann::json& j, const std::string& path) {
  std::vector<double> v;
  try {
    v = j.get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    bad(path, e.what());
  }
  for (size_t i = 1; i < v.size(); ++i)
    if (!(v[i] > v[i - 1])) bad(path, "axis must be strictly increasing");
  return v;
}

}  // namespace

std::vector<double> parse_geometric_axis(const std::string& spec) {
  double a = 0, b = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  in >> a >> c1 >> b >> c2 >> n;
  if (!in || c1 != ':' || c2 != ':' || !(a > 0) || !(b >= a) || n < 1)
    fail(ErrorCode::ConfigInvalid, "cannot parse geometric axis '" + spec + "' (want a:b:n)");
  if (n == 1) return {a};
  std::vector<double> out;
  const double ratio = std::pow(b / a, 1.0 / (n - 1));
  double v = a;
  for (int i = 0; i < n; ++i, v *= ratio) out.push_back(v);
  out.back() = b;
  return out;
}

std::vector<double> parse_linear_axis(const std::string& spec) {
  double a = 0, b = 0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  in >> a >> c1 >> b >> c2 >> n;
  if (!in || c1 != ':' || c2 != ':' || !(b >= a) || n < 1)
    fail(ErrorCode::ConfigInvalid, "cannot parse linear axis '" + spec + "' (want a:b:n)");
  if (n == 1) return {a};
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(a + (b - a) * i / (n - 1));
  return out;
}

ExperimentConfig ExperimentConfig::parse(const nlohmann::json& j) {
  if (!j.is_object()) fail(ErrorCode::ConfigInvalid, "config root must be a JSON object");
  ExperimentConfig cfg;

  if (!j.contains("params")) bad("params", "missing");
  const auto& jp = j.at("params");
  cfg.params.dim = get_or<int>(jp, "N", 3);
  cfg.params.p = get_or<double>(jp, "p", 3.0);
  cfg.params.q = get_or<double>(jp, "q", 5.0);
  cfg.params.beta = get_or<double>(jp, "beta", 1.0);
  if (jp.contains("alpha")) {
    cfg.params.alpha = need_positive("params.alpha", jp.at("alpha").get<double>());
  } else if (jp.contains("alpha_factor")) {
    cfg.alpha_factor = need_positive("params.alpha_factor", jp.at("alpha_factor").get<double>());
    cfg.alpha_ref = get_or<std::string>(jp, "alpha_ref", "alpha_V");
    if (cfg.alpha_ref != "alpha_V" && cfg.alpha_ref != "alpha_tilde_V")
      bad("params.alpha_ref", "expected alpha_V or alpha_tilde_V");
    cfg.params.alpha = 1.0;  // resolved against the threshold at run time
  } else {
    bad("params", "needs alpha or alpha_factor");
  }

  if (j.contains("potential")) {
    cfg.potential_spec = j.at("potential");
    (void)RadialPotential::from_json(cfg.potential_spec);  // validate now
  }

  cfg.branch = branch_from_string(get_or<std::string>(j, "branch", "local"));
  if (j.contains("grid")) {
    const auto& jg = j.at("grid");
    cfg.M = get_or<int>(jg, "M", 2048);
    if (cfg.M < 16) bad("grid.M", "must be >= 16");
    if (jg.contains("r")) cfg.r_abs = need_positive("grid.r", jg.at("r").get<double>());
    if (jg.contains("r_factor"))
      cfg.r_factor = need_positive("grid.r_factor", jg.at("r_factor").get<double>());
  }
  cfg.s = get_or<double>(j, "s", 1.0);
  if (!(cfg.s >= 0.5 && cfg.s <= 1.0)) bad("s", "must lie in [0.5, 1]");

  if (j.contains("tolerances")) {
    const auto& jt = j.at("tolerances");
    auto& t = cfg.solver_tol;
    t.res_rel = need_positive("tolerances.res_rel", get_or<double>(jt, "res_rel", t.res_rel));
    t.mass_rel = need_positive("tolerances.mass_rel", get_or<double>(jt, "mass_rel", t.mass_rel));
    t.poh = need_positive("tolerances.poh", get_or<double>(jt, "poh", t.poh));
    t.max_iterations = get_or<int>(jt, "max_iterations", t.max_iterations);
    t.path_points = get_or<int>(jt, "path_points", t.path_points);
    t.string_max_iterations = get_or<int>(jt, "string_max_iterations", t.string_max_iterations);
    t.string_stall = need_positive("tolerances.string_stall",
                                   get_or<double>(jt, "string_stall", t.string_stall));
    t.clip_every = get_or<int>(jt, "clip_every", t.clip_every);
    t.tail_floor =
        need_positive("tolerances.tail_floor", get_or<double>(jt, "tail_floor", t.tail_floor));
    if (t.path_points < 5) bad("tolerances.path_points", "must be >= 5");
    if (t.max_iterations < 1) bad("tolerances.max_iterations", "must be >= 1");
    auto& ct = cfg.constants_tol;
    ct.quad_rel = need_positive("tolerances.constants_quad_rel",
                                get_or<double>(jt, "constants_quad_rel", ct.quad_rel));
    ct.shoot_residual =
        need_positive("tolerances.constants_shoot_residual",
                      get_or<double>(jt, "constants_shoot_residual", ct.shoot_residual));
    ct.eigen_rel = need_positive("tolerances.constants_eigen_rel",
                                 get_or<double>(jt, "constants_eigen_rel", ct.eigen_rel));
  }

  if (j.contains("sweep")) {
    const auto& js = j.at("sweep");
    if (js.contains("r_geom")) {
      cfg.sweep_r_factors = parse_geometric_axis(js.at("r_geom").get<std::string>());
    } else if (js.contains("r_factors")) {
      cfg.sweep_r_factors = sorted_axis(js.at("r_factors"), "sweep.r_factors");
    }
    if (js.contains("alpha_list"))
      cfg.sweep_alphas = sorted_axis(js.at("alpha_list"), "sweep.alpha_list");
    if (js.contains("s_grid")) {
      if (js.at("s_grid").is_string())
        cfg.s_grid = parse_linear_axis(js.at("s_grid").get<std::string>());
      else
        cfg.s_grid = sorted_axis(js.at("s_grid"), "sweep.s_grid");
    }
    if (js.contains("alpha_bisect")) {
      const auto& jb = js.at("alpha_bisect");
      AlphaBisect ab;
      ab.lo = need_positive("sweep.alpha_bisect.lo", jb.at("lo").get<double>());
      ab.hi = need_positive("sweep.alpha_bisect.hi", jb.at("hi").get<double>());
      ab.steps = jb.at("steps").get<int>();
      if (!(ab.hi > ab.lo) || ab.steps < 1) bad("sweep.alpha_bisect", "needs hi > lo, steps >= 1");
      cfg.alpha_bisect = ab;
    }
  }

  if (j.contains("output")) cfg.output_dir = get_or<std::string>(j.at("output"), "dir", ".");
  if (j.contains("constants_cache"))
    cfg.constants_cache = j.at("constants_cache").get<std::string>();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoFailure, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigInvalid, std::string("config is not valid JSON: ") + e.what());
  }
  return parse(j);
}

nlohmann::ordered_json ExperimentConfig::echo() const {
  nlohmann::ordered_json j;
  j["params"] = {{"N", params.dim}, {"p", params.p}, {"q", params.q}, {"beta", params.beta}};
  if (alpha_factor) {
    j["params"]["alpha_factor"] = *alpha_factor;
    j["params"]["alpha_ref"] = alpha_ref;
  } else {
    j["params"]["alpha"] = params.alpha;
  }
  j["potential"] = potential_spec;
  j["branch"] = to_string(branch);
  j["grid"] = nlohmann::ordered_json{{"M", M}};
  if (r_abs)
    j["grid"]["r"] = *r_abs;
  else
    j["grid"]["r_factor"] = r_factor;
  j["s"] = s;
  j["tolerances"] = {{"res_rel", solver_tol.res_rel},
                     {"mass_rel", solver_tol.mass_rel},
                     {"poh", solver_tol.poh},
                     {"max_iterations", solver_tol.max_iterations},
                     {"path_points", solver_tol.path_points},
                     {"string_max_iterations", solver_tol.string_max_iterations},
                     {"string_stall", solver_tol.string_stall},
                     {"clip_every", solver_tol.clip_every},
                     {"tail_floor", solver_tol.tail_floor},
                     {"constants_quad_rel", constants_tol.quad_rel},
                     {"constants_shoot_residual", constants_tol.shoot_residual},
                     {"constants_eigen_rel", constants_tol.eigen_rel}};
  nlohmann::ordered_json sweep;
  if (!sweep_r_factors.empty()) sweep["r_factors"] = sweep_r_factors;
  if (!sweep_alphas.empty()) sweep["alpha_list"] = sweep_alphas;
  if (!s_grid.empty()) sweep["s_grid"] = s_grid;
  if (alpha_bisect)
    sweep["alpha_bisect"] = {
        {"lo", alpha_bisect->lo}, {"hi", alpha_bisect->hi}, {"steps", alpha_bisect->steps}};
  if (!sweep.empty()) j["sweep"] = sweep;
  j["output"] = {{"dir", output_dir}};
  if (constants_cache) j["constants_cache"] = *constants_cache;
  return j;
}

}  // namespace nnls
