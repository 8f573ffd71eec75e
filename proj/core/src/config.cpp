#include "kslab/config.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <set>

#include "kslab/error.hpp"

namespace kslab {

using nlohmann::json;

std::string to_string(PdeMode mode) { return mode == PdeMode::kLimit ? "limit" : "mollified"; }

std::string to_string(DriftMethod method) {
  return method == DriftMethod::kCellList ? "cell_list" : "direct";
}

namespace {

/// Reads typed values out of a JSON object, remembering every problem.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
    if (!obj.is_object()) {
      errors_.push_back((path.empty() ? std::string("config") : path) + " must be an object");
      return;
    }
    for (const auto& [key, value] : obj.items()) {
      if (!allowed.count(key)) errors_.push_back("unknown key: " + join(path, key));
    }
  }

  template <class T>
  void read(const json& obj, const std::string& path, const std::string& key, T& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw std::invalid_argument("boolean");
        out = v.get<bool>();
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) throw std::invalid_argument("integer");
        if (std::is_unsigned_v<T> && v.is_number_integer() && !v.is_number_unsigned() &&
            v.get<long long>() < 0) {
          throw std::invalid_argument("nonnegative integer");
        }
        out = v.get<T>();
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw std::invalid_argument("number");
        out = v.get<T>();
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw std::invalid_argument("string");
        out = v.get<std::string>();
      } else {
        out = v.get<T>();
      }
    } catch (const std::invalid_argument& e) {
      errors_.push_back(join(path, key) + " must be a " + e.what());
    } catch (const json::exception&) {
      errors_.push_back(join(path, key) + " has the wrong type");
    }
  }

  template <class T>
  void read_list(const json& obj, const std::string& path, const std::string& key,
                 std::vector<T>& out) {
    if (!obj.is_object() || !obj.contains(key)) return;
    const json& v = obj.at(key);
    if (!v.is_array()) {
      errors_.push_back(join(path, key) + " must be an array");
      return;
    }
    std::vector<T> tmp;
    for (const auto& item : v) {
      const bool ok = std::is_integral_v<T> ? item.is_number_unsigned() : item.is_number();
      if (!ok) {
        errors_.push_back(join(path, key) + std::string(" must contain ") +
                          (std::is_integral_v<T> ? "nonnegative integers" : "numbers"));
        return;
      }
      tmp.push_back(item.get<T>());
    }
    out = std::move(tmp);
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

 private:
  std::vector<std::string>& errors_;
};

const json& section(const json& root, const std::string& key) {
  static const json empty = json::object();
  return root.contains(key) ? root.at(key) : empty;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<std::string> errors;
  Reader r(errors);
  r.check_keys(root, "",
               {"dimension", "m", "particles", "sigma", "horizon", "dt", "eps_k", "eps_p", "lambda",
                "initial", "seed", "replications", "output_times", "drifts", "drift_method",
                "cell_width", "workers", "grid", "field_store_interval", "pde", "plan",
                "fluctuation", "meanfield_rate", "chaos", "bench"});

  RunConfig cfg;
  SimConfig& sim = cfg.coupling.sim;
  if (!root.is_object()) throw ConfigError("invalid config:\n  config must be an object");
  r.read(root, "", "dimension", sim.dimension);
  r.read(root, "", "m", sim.m);
  r.read(root, "", "particles", sim.particles);
  r.read(root, "", "sigma", sim.sigma);
  r.read(root, "", "horizon", sim.horizon);
  r.read(root, "", "dt", sim.dt);
  r.read(root, "", "eps_k", sim.kernel.eps_k);
  r.read(root, "", "eps_p", sim.kernel.eps_p);
  bool lambda_given = root.contains("lambda");
  r.read(root, "", "lambda", sim.kernel.lambda);
  r.read(root, "", "seed", sim.seed);
  r.read(root, "", "replications", sim.replications);
  r.read_list(root, "", "output_times", sim.output_times);
  r.read(root, "", "cell_width", sim.cell_width);
  r.read(root, "", "workers", sim.workers);
  r.read(root, "", "field_store_interval", cfg.coupling.field_store_interval);

  std::string method = to_string(sim.method);
  r.read(root, "", "drift_method", method);
  if (method == "direct") {
    sim.method = DriftMethod::kDirect;
  } else if (method == "cell_list") {
    sim.method = DriftMethod::kCellList;
  } else {
    errors.push_back("drift_method must be \"direct\" or \"cell_list\"");
  }

  const json& init = section(root, "initial");
  r.check_keys(init, "initial", {"kind", "center", "scale"});
  std::string kind = to_string(sim.initial.kind);
  r.read(init, "initial", "kind", kind);
  try {
    sim.initial.kind = initial_kind_from_string(kind);
  } catch (const Error& e) {
    errors.push_back(std::string("initial.kind: ") + e.what());
  }
  r.read_list(init, "initial", "center", sim.initial.center);
  r.read(init, "initial", "scale", sim.initial.scale);

  const json& drifts = section(root, "drifts");
  r.check_keys(drifts, "drifts", {"aggregation", "repulsion"});
  r.read(drifts, "drifts", "aggregation", sim.drifts.aggregation);
  r.read(drifts, "drifts", "repulsion", sim.drifts.repulsion);

  const json& grid = section(root, "grid");
  r.check_keys(grid, "grid", {"half_width", "resolution"});
  r.read(grid, "grid", "half_width", cfg.coupling.grid.half_width);
  r.read(grid, "grid", "resolution", cfg.coupling.grid.resolution);
  cfg.coupling.grid.dimension = sim.dimension;

  const json& pde = section(root, "pde");
  r.check_keys(pde, "pde", {"mode", "dt"});
  std::string mode = to_string(cfg.pde_mode);
  r.read(pde, "pde", "mode", mode);
  if (mode == "mollified") {
    cfg.pde_mode = PdeMode::kMollified;
  } else if (mode == "limit") {
    cfg.pde_mode = PdeMode::kLimit;
  } else {
    errors.push_back("pde.mode must be \"mollified\" or \"limit\"");
  }
  r.read(pde, "pde", "dt", cfg.coupling.pde_dt);

  const json& plan = section(root, "plan");
  r.check_keys(plan, "plan", {"N", "alpha_k", "alpha_p", "beta", "delta"});
  r.read(plan, "plan", "N", cfg.plan.particles);
  r.read(plan, "plan", "alpha_k", cfg.plan.alpha_k);
  r.read(plan, "plan", "alpha_p", cfg.plan.alpha_p);
  if (plan.contains("beta")) {
    double b = 0.0;
    r.read(plan, "plan", "beta", b);
    cfg.plan.beta = b;
  }
  if (plan.contains("delta")) {
    double d = 0.0;
    r.read(plan, "plan", "delta", d);
    cfg.plan.delta = d;
  }

  const json& fl = section(root, "fluctuation");
  r.check_keys(fl, "fluctuation", {"N_list"});
  r.read_list(fl, "fluctuation", "N_list", cfg.fluctuation_particles);
  const json& mf = section(root, "meanfield_rate");
  r.check_keys(mf, "meanfield_rate", {"eps_list"});
  r.read_list(mf, "meanfield_rate", "eps_list", cfg.meanfield_eps);
  const json& ch = section(root, "chaos");
  r.check_keys(ch, "chaos", {"particles", "replications", "directions"});
  r.read(ch, "chaos", "particles", cfg.chaos.particles);
  r.read(ch, "chaos", "replications", cfg.chaos.replications);
  r.read(ch, "chaos", "directions", cfg.chaos.directions);
  const json& bench = section(root, "bench");
  r.check_keys(bench, "bench", {"N", "steps", "eps"});
  r.read(bench, "bench", "N", cfg.bench.particles);
  r.read(bench, "bench", "steps", cfg.bench.steps);
  r.read(bench, "bench", "eps", cfg.bench.eps);

  if (!lambda_given && (sim.dimension == 2 || sim.dimension == 3) && sim.kernel.eps_p > 0.0) {
    sim.kernel.lambda = std::pow(sim.kernel.eps_p, sim.dimension) / 2.0;
  }

  for (auto& v : cfg.coupling.violations()) errors.push_back(std::move(v));
  if (cfg.plan.beta && !(*cfg.plan.beta > 0.0 && *cfg.plan.beta < 1.0)) {
    errors.push_back("plan.beta must lie in (0, 1)");
  }
  if (cfg.plan.delta && !(*cfg.plan.delta > 0.0)) errors.push_back("plan.delta must be > 0");
  if (cfg.plan.beta.has_value() != cfg.plan.delta.has_value()) {
    errors.push_back("plan.beta and plan.delta must be given together");
  }
  for (std::size_t n : cfg.fluctuation_particles) {
    if (n < 2) {
      errors.push_back("fluctuation.N_list entries must be >= 2");
      break;
    }
  }
  for (double e : cfg.meanfield_eps) {
    if (!(e > 0.0)) {
      errors.push_back("meanfield_rate.eps_list entries must be > 0");
      break;
    }
  }
  if (cfg.chaos.particles < 2) errors.push_back("chaos.particles must be >= 2");
  if (cfg.chaos.replications < 2) errors.push_back("chaos.replications must be >= 2");
  if (cfg.chaos.directions < 1) errors.push_back("chaos.directions must be >= 1");
  if (cfg.bench.particles < 1) errors.push_back("bench.N must be >= 1");
  if (!(cfg.bench.eps > 0.0)) errors.push_back("bench.eps must be > 0");

  // Deduplicate while keeping order: several checks can report the same fact.
  std::vector<std::string> unique;
  for (auto& e : errors) {
    if (std::find(unique.begin(), unique.end(), e) == unique.end()) unique.push_back(std::move(e));
  }
  if (!unique.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : unique) msg += "\n  " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

std::string echo_config(const RunConfig& cfg) {
  const SimConfig& sim = cfg.coupling.sim;
  json j;
  j["dimension"] = sim.dimension;
  j["m"] = sim.m;
  j["particles"] = sim.particles;
  j["sigma"] = sim.sigma;
  j["horizon"] = sim.horizon;
  j["dt"] = sim.dt;
  j["eps_k"] = sim.kernel.eps_k;
  j["eps_p"] = sim.kernel.eps_p;
  j["lambda"] = sim.kernel.lambda;
  j["initial"] = {{"kind", to_string(sim.initial.kind)},
                  {"center", sim.initial.center},
                  {"scale", sim.initial.scale}};
  j["seed"] = sim.seed;
  j["replications"] = sim.replications;
  j["output_times"] = sim.output_times;
  j["drifts"] = {{"aggregation", sim.drifts.aggregation}, {"repulsion", sim.drifts.repulsion}};
  j["drift_method"] = to_string(sim.method);
  j["cell_width"] = sim.cell_width;
  j["grid"] = {{"half_width", cfg.coupling.grid.half_width},
               {"resolution", cfg.coupling.grid.resolution}};
  j["field_store_interval"] = cfg.coupling.field_store_interval;
  j["pde"] = {{"mode", to_string(cfg.pde_mode)}, {"dt", cfg.coupling.pde_dt}};
  json plan = {{"N", cfg.plan.particles},
               {"alpha_k", cfg.plan.alpha_k},
               {"alpha_p", cfg.plan.alpha_p}};
  if (cfg.plan.beta) plan["beta"] = *cfg.plan.beta;
  if (cfg.plan.delta) plan["delta"] = *cfg.plan.delta;
  j["plan"] = plan;
  j["fluctuation"] = {{"N_list", cfg.fluctuation_particles}};
  j["meanfield_rate"] = {{"eps_list", cfg.meanfield_eps}};
  j["chaos"] = {{"particles", cfg.chaos.particles},
                {"replications", cfg.chaos.replications},
                {"directions", cfg.chaos.directions}};
  j["bench"] = {{"N", cfg.bench.particles}, {"steps", cfg.bench.steps}, {"eps", cfg.bench.eps}};
  return j.dump(2);
}

}  // namespace kslab
