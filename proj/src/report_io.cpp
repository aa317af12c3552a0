#include "gradest/report_io.hpp"

#include <charconv>
#include <cmath>
#include <initializer_list>
#include <stdexcept>
#include <string_view>

namespace gradest {

using nlohmann::json;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void check_keys(const json& j, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw std::invalid_argument("experiment spec must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = item.key() == "experiment" || item.key() == "output";
    for (auto k : allowed) known = known || item.key() == k;
    if (!known) throw std::invalid_argument("unknown spec key '" + item.key() + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

void read_methods(const json& j, std::vector<Method>& target) {
  if (!j.contains("methods")) return;
  target.clear();
  for (const auto& m : j.at("methods")) target.push_back(method_from_string(m.get<std::string>()));
}

}  // namespace

Method method_from_string(const std::string& name) {
  if (auto m = parse_method(name)) return *m;
  throw std::invalid_argument("unknown method '" + name + "'");
}

DirectionScheme scheme_from_string(const std::string& name) {
  for (auto s : {DirectionScheme::coordinate, DirectionScheme::orthonormal, DirectionScheme::general_interp,
                 DirectionScheme::gaussian, DirectionScheme::sphere}) {
    if (to_string(s) == name) return s;
  }
  throw std::invalid_argument("unknown direction scheme '" + name + "'");
}

NoiseKind noise_kind_from_string(const std::string& name) {
  for (auto k : {NoiseKind::none, NoiseKind::uniform_iid, NoiseKind::sinusoidal_deterministic}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown noise kind '" + name + "'");
}

DirectionRule direction_rule_from_string(const std::string& name) {
  if (name == "lbfgs") return DirectionRule::lbfgs;
  if (name == "sd" || name == "steepest_descent") return DirectionRule::steepest_descent;
  throw std::invalid_argument("unknown direction rule '" + name + "'");
}

json to_json(const BoundReport& r, const BoundQuery& q) {
  json j;
  j["method"] = std::string(to_string(r.method));
  j["n"] = q.n;
  j["L"] = q.L;
  j["M"] = optional_number(q.M);
  j["eps_f"] = q.eps_f;
  j["theta"] = q.theta;
  j["delta"] = is_smoothing(q.method) ? json(q.delta) : json(nullptr);
  j["grad_norm"] = optional_number(q.grad_norm);
  j["cond_Qinv"] = optional_number(q.cond_qinv);
  if (r.interval_empty) {
    j["interval"] = "empty";
  } else if (!r.sigma_hi) {
    j["interval"] = "unknown";
  } else {
    j["interval"] = "nonempty";
  }
  j["sigma_lo"] = r.interval_empty ? json(nullptr) : optional_number(r.sigma_lo);
  j["sigma_hi"] = optional_number(r.sigma_hi);
  j["N_min"] = r.n_min;
  j["N_min_is_dimension"] = r.n_min_is_dimension;
  j["rho"] = r.rho;
  j["grad_norm_min"] = r.grad_norm_min;
  j["lambda"] = optional_number(r.lambda_used);
  return j;
}

SweepSpec sweep_spec_from_json(const json& j) {
  check_keys(j, {"methods", "problem", "n", "sigma", "N_factor", "N", "L", "M", "eps_f", "noise", "li_scheme",
                 "points", "trials", "seed", "threads"});
  SweepSpec s;
  read_methods(j, s.methods);
  read(j, "problem", s.problem);
  read(j, "n", s.n);
  read(j, "sigma", s.sigma);
  read(j, "N_factor", s.N_factor);
  read(j, "N", s.N);
  read(j, "L", s.L);
  read(j, "M", s.M);
  read(j, "eps_f", s.eps_f);
  if (j.contains("noise")) s.noise = noise_kind_from_string(j.at("noise").get<std::string>());
  if (j.contains("li_scheme")) s.li_scheme = scheme_from_string(j.at("li_scheme").get<std::string>());
  read(j, "points", s.points);
  read(j, "trials", s.trials);
  read(j, "seed", s.seed);
  read(j, "threads", s.threads);
  return s;
}

ThetaDistSpec theta_dist_spec_from_json(const json& j) {
  check_keys(j, {"n", "N_list", "trials", "seed", "threads"});
  ThetaDistSpec s;
  read(j, "n", s.n);
  read(j, "N_list", s.N_list);
  read(j, "trials", s.trials);
  read(j, "seed", s.seed);
  read(j, "threads", s.threads);
  return s;
}

BoundCheckSpec bound_check_spec_from_json(const json& j) {
  check_keys(j, {"methods", "n", "L", "M", "sigma", "eps_f", "points", "noise_draws", "theta", "delta",
                 "trials", "seed", "threads"});
  BoundCheckSpec s;
  read_methods(j, s.methods);
  read(j, "n", s.n);
  read(j, "L", s.L);
  read(j, "M", s.M);
  read(j, "sigma", s.sigma);
  read(j, "eps_f", s.eps_f);
  read(j, "points", s.points);
  read(j, "noise_draws", s.noise_draws);
  read(j, "theta", s.theta);
  read(j, "delta", s.delta);
  read(j, "trials", s.trials);
  read(j, "seed", s.seed);
  read(j, "threads", s.threads);
  return s;
}

BenchSpec bench_spec_from_json(const json& j) {
  check_keys(j, {"solvers", "problems", "eps_f", "budget_units", "taus", "reference_budget_factor", "seed",
                 "threads"});
  BenchSpec s;
  if (j.contains("solvers")) {
    for (const auto& js : j.at("solvers")) {
      SolverSpec solver;
      solver.method = method_from_string(js.at("method").get<std::string>());
      solver.name = js.value("name", std::string(to_string(solver.method)));
      solver.sigma = js.value("sigma", solver.sigma);
      solver.N_factor = js.value("N_factor", solver.N_factor);
      if (js.contains("direction"))
        solver.direction = direction_rule_from_string(js.at("direction").get<std::string>());
      s.solvers.push_back(solver);
    }
  }
  read(j, "problems", s.problems);
  read(j, "eps_f", s.eps_f);
  read(j, "budget_units", s.budget_units);
  read(j, "taus", s.taus);
  read(j, "reference_budget_factor", s.reference_budget_factor);
  read(j, "seed", s.seed);
  read(j, "threads", s.threads);
  return s;
}

}  // namespace gradest
