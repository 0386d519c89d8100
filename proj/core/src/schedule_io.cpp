#include "wcm/schedule_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wcm/errors.hpp"

namespace wcm {

using nlohmann::json;

namespace {

PricingMethod method_from(const json& j) {
  const std::string kind = j.value("method", std::string("mc"));
  if (kind == "quad") {
    return PricingMethod::quadrature(j.value("n_nodes", 40), j.value("dimension_cap", 4));
  }
  if (kind != "mc") throw ConfigError("schedule: method must be \"mc\" or \"quad\", got \"" + kind + "\"");
  const int degree = j.value("cv_degree", 0);
  if (degree < 0 || degree > 2) throw ConfigError("schedule: cv_degree must be 0, 1 or 2");
  const auto paths = j.value("n_paths", 100000);
  if (paths < 1) throw ConfigError("schedule: n_paths must be positive");
  return PricingMethod::monte_carlo(static_cast<std::size_t>(paths), degree,
                                    static_cast<std::size_t>(j.value("cv_sample_size", 10000)));
}

json method_to(const PricingMethod& m) {
  if (m.is_quadrature()) return {{"method", "quad"}, {"n_nodes", m.n_nodes}, {"dimension_cap", m.dimension_cap}};
  return {{"method", "mc"}, {"n_paths", m.n_paths}, {"cv_degree", m.cv_degree}, {"cv_sample_size", m.cv_sample_size}};
}

json parse_or_throw(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

PricingSchedule schedule_from_json(const std::string& text) {
  const json j = parse_or_throw(text, "schedule");
  try {
    PricingSchedule s;
    if (j.contains("fallback")) s.fallback = method_from(j["fallback"]);
    if (j.contains("maturities")) {
      for (const auto& e : j["maturities"]) s.entries.emplace_back(e.at("maturity").get<double>(), method_from(e));
    }
    return s;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("schedule is malformed: ") + e.what());
  }
}

std::string schedule_to_json(const PricingSchedule& schedule) {
  json j;
  j["fallback"] = method_to(schedule.fallback);
  j["maturities"] = json::array();
  for (const auto& [t, m] : schedule.entries) {
    auto e = method_to(m);
    e["maturity"] = t;
    j["maturities"].push_back(e);
  }
  return j.dump(1);
}

PricingSchedule load_schedule(const std::string& path) { return schedule_from_json(read_text_file(path)); }

BasisSpec basis_from_json(const std::string& text) {
  const json j = parse_or_throw(text, "basis");
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "piecewise") {
      if (j.contains("grid")) return BasisSpec::piecewise(j["grid"].get<std::vector<double>>());
      return BasisSpec::uniform_piecewise(j.at("horizon").get<double>(), j.at("cells").get<int>());
    }
    if (kind == "legendre") return BasisSpec::legendre(j.at("horizon").get<double>(), j.at("count").get<int>());
    throw ConfigError("basis kind must be \"piecewise\" or \"legendre\", got \"" + kind + "\"");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("basis is malformed: ") + e.what());
  }
}

std::string basis_to_json(const BasisSpec& basis) {
  json j;
  if (basis.is_piecewise()) {
    j["kind"] = "piecewise";
    j["grid"] = std::vector<double>(basis.grid().begin(), basis.grid().end());
  } else {
    j["kind"] = "legendre";
    j["horizon"] = basis.horizon();
    j["count"] = basis.size();
  }
  return j.dump();
}

RunConfig run_config_from_json(const std::string& text) {
  const json j = parse_or_throw(text, "config");
  try {
    RunConfig rc;
    auto& c = rc.calibration;
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.weight_decay = j.value("weight_decay", c.weight_decay);
    c.resimulation_period = j.value("resimulation_period", c.resimulation_period);
    c.patience = j.value("patience", c.patience);
    c.tolerance = j.value("tolerance", c.tolerance);
    c.init_std = j.value("init_std", c.init_std);
    c.adam_beta1 = j.value("adam_beta1", c.adam_beta1);
    c.adam_beta2 = j.value("adam_beta2", c.adam_beta2);
    c.adam_eps = j.value("adam_eps", c.adam_eps);
    c.seed = j.value("seed", c.seed);
    c.fine_steps_per_unit = j.value("fine_steps_per_unit", c.fine_steps_per_unit);
    c.normalize_by_spot = j.value("normalize_by_spot", c.normalize_by_spot);
    c.validate();
    rc.shape.order = j.value("order", rc.shape.order);
    rc.shape.components = j.value("components", rc.shape.components);
    if (j.contains("basis")) rc.shape.basis = basis_from_json(j["basis"].dump());
    if (rc.shape.order < 1 || rc.shape.components < 1) throw ConfigError("config: order and components must be >= 1");
    return rc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is malformed: ") + e.what());
  }
}

RunConfig load_run_config(const std::string& path) { return run_config_from_json(read_text_file(path)); }

}  // namespace wcm
