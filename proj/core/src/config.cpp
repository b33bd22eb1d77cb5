#include "thermocal/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "thermocal/error.hpp"

namespace thermocal {

namespace {

using nlohmann::json;

const char* update_name(VarianceUpdate u) {
  return u == VarianceUpdate::Gibbs ? "gibbs" : "log_random_walk";
}

json theta_json(const ParameterVector& t) { return json::array({t[0], t[1], t[2]}); }

ParameterVector theta_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != ParameterVector::kSize) {
    throw ConfigError(std::string(key) + " must be an array of 3 numbers");
  }
  ParameterVector t;
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) t[i] = j.at(i).get<double>();
  return t;
}

// Walks an object, rejecting keys the handler does not consume.
template <typename Handler>
void read_object(const json& j, const std::string& context, Handler&& handle) {
  if (!j.is_object()) throw ConfigError(context + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!handle(it.key(), it.value())) {
      throw ConfigError("unknown configuration key '" + context + "." + it.key() + "'");
    }
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (block_count < 1) fail("block_count must be positive");
  if (!(initial_power >= 0.0)) fail("initial_power_w must be non-negative");
  try {
    prior.validate();
    mcmc.settings.validate();
    if (mcmc.chains < 1) fail("mcmc.chains must be at least 1");
    if (!(validation.alpha > 0.0 && validation.alpha < 1.0)) fail("validation.alpha must lie in (0,1)");
    if (validation.min_draws < kMinDrawsForPValue) {
      fail("validation.min_draws must be at least " + std::to_string(kMinDrawsForPValue));
    }
    for (double p : validation.qoi_probs) {
      if (!(p > 0.0 && p < 1.0)) fail("validation.qoi_probs must lie in (0,1)");
    }
    if (!(sensitivity.oat.fraction > 0.0 && sensitivity.oat.fraction < 0.5)) {
      fail("sensitivity.fraction must lie in (0, 0.5)");
    }
    if (!prior.contains(sensitivity.oat.nominal)) fail("sensitivity.nominal outside the prior box");
    if (sensitivity.threshold && !(*sensitivity.threshold >= 0.0)) {
      fail("sensitivity.threshold must be non-negative");
    }
    if (sensitivity.n_mc < 1000) fail("sensitivity.n_mc must be at least 1000");
    UtilitySpec{decision.m, 0.0}.validate();
    if (decision.c.empty()) fail("decision.c needs at least one defection rate");
    for (double c : decision.c) UtilitySpec{decision.m, c}.validate();
    if (decision.search.grid_points < 3) fail("decision.grid_points must be at least 3");
    if (!(decision.search.tolerance > 0.0)) fail("decision.tolerance must be positive");
    synthetic.validate(prior, static_cast<std::size_t>(block_count));
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  RunConfig cfg;
  cfg.output_dir = base / cfg.output_dir;
  bool horizon_given = false;
  try {
    read_object(root, "config", [&](const std::string& key, const json& v) {
      if (key == "forcing") cfg.forcing = resolve(base, v.get<std::string>());
      else if (key == "measurements") cfg.measurements = resolve(base, v.get<std::string>());
      else if (key == "geometry") cfg.geometry = resolve(base, v.get<std::string>());
      else if (key == "output_dir") cfg.output_dir = resolve(base, v.get<std::string>());
      else if (key == "block_count") cfg.block_count = v.get<int>();
      else if (key == "initial_power_w") cfg.initial_power = v.get<double>();
      else if (key == "simulate_theta") cfg.simulate_theta = theta_from(v, "simulate_theta");
      else if (key == "prior") {
        read_object(v, "prior", [&](const std::string& k, const json& x) {
          if (k == "lower") cfg.prior.lower = theta_from(x, "prior.lower").values;
          else if (k == "upper") cfg.prior.upper = theta_from(x, "prior.upper").values;
          else return false;
          return true;
        });
      } else if (key == "mcmc") {
        auto& s = cfg.mcmc.settings;
        read_object(v, "mcmc", [&](const std::string& k, const json& x) {
          if (k == "n_iter") s.n_iter = x.get<int>();
          else if (k == "burn_in") s.burn_in = x.get<int>();
          else if (k == "thin") s.thin = x.get<int>();
          else if (k == "seed") cfg.mcmc.seed = x.get<std::uint64_t>();
          else if (k == "chains") cfg.mcmc.chains = x.get<int>();
          else if (k == "cache_capacity") cfg.mcmc.cache_capacity = x.get<std::size_t>();
          else if (k == "initial_scales") s.initial_scales = theta_from(x, "mcmc.initial_scales").values;
          else if (k == "log_lambda2_scale") s.log_lambda2_scale = x.get<double>();
          else if (k == "lambda2_update") {
            const auto name = x.get<std::string>();
            if (name == "gibbs") s.variance_update = VarianceUpdate::Gibbs;
            else if (name == "log_random_walk") s.variance_update = VarianceUpdate::LogRandomWalk;
            else throw ConfigError("mcmc.lambda2_update must be 'gibbs' or 'log_random_walk'");
          } else if (k == "adaptation") {
            read_object(x, "mcmc.adaptation", [&](const std::string& a, const json& y) {
              if (a == "low") s.policy.low = y.get<double>();
              else if (a == "high") s.policy.high = y.get<double>();
              else if (a == "multiplier_up") s.policy.multiplier_up = y.get<double>();
              else if (a == "multiplier_down") s.policy.multiplier_down = y.get<double>();
              else if (a == "window") s.policy.window = y.get<int>();
              else if (a == "horizon") {
                s.policy.horizon = y.get<int>();
                horizon_given = true;
              }
              else return false;
              return true;
            });
          } else return false;
          return true;
        });
      } else if (key == "validation") {
        read_object(v, "validation", [&](const std::string& k, const json& x) {
          if (k == "alpha") cfg.validation.alpha = x.get<double>();
          else if (k == "min_draws") cfg.validation.min_draws = x.get<std::size_t>();
          else if (k == "qoi_probs") cfg.validation.qoi_probs = x.get<std::vector<double>>();
          else return false;
          return true;
        });
      } else if (key == "sensitivity") {
        read_object(v, "sensitivity", [&](const std::string& k, const json& x) {
          if (k == "nominal") cfg.sensitivity.oat.nominal = theta_from(x, "sensitivity.nominal");
          else if (k == "fraction") cfg.sensitivity.oat.fraction = x.get<double>();
          else if (k == "threshold") cfg.sensitivity.threshold = x.get<double>();
          else if (k == "n_mc") cfg.sensitivity.n_mc = x.get<std::size_t>();
          else if (k == "time_resolved") cfg.sensitivity.time_resolved = x.get<bool>();
          else return false;
          return true;
        });
      } else if (key == "decision") {
        read_object(v, "decision", [&](const std::string& k, const json& x) {
          if (k == "m") cfg.decision.m = x.get<double>();
          else if (k == "c") cfg.decision.c = x.get<std::vector<double>>();
          else if (k == "grid_points") cfg.decision.search.grid_points = x.get<int>();
          else if (k == "tolerance") cfg.decision.search.tolerance = x.get<double>();
          else return false;
          return true;
        });
      } else if (key == "synthetic") {
        read_object(v, "synthetic", [&](const std::string& k, const json& x) {
          if (k == "theta") cfg.synthetic.theta = theta_from(x, "synthetic.theta");
          else if (k == "lambda") cfg.synthetic.lambda = x.get<double>();
          else if (k == "seed") cfg.synthetic.seed = x.get<std::uint64_t>();
          else if (k == "bias") {
            cfg.synthetic.bias = x.is_array() ? x.get<std::vector<double>>()
                                              : std::vector<double>{x.get<double>()};
          } else return false;
          return true;
        });
      } else {
        return false;
      }
      return true;
    });
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
  // Adaptation runs through burn-in unless a horizon is given explicitly.
  if (!horizon_given) cfg.mcmc.settings.policy.horizon = cfg.mcmc.settings.burn_in;
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::filesystem::absolute(path).parent_path());
}

std::string canonical_json(const RunConfig& c) {
  const auto& s = c.mcmc.settings;
  json j;
  j["forcing"] = c.forcing.string();
  j["measurements"] = c.measurements.string();
  j["geometry"] = c.geometry.string();
  j["output_dir"] = c.output_dir.string();
  j["block_count"] = c.block_count;
  j["initial_power_w"] = c.initial_power;
  j["simulate_theta"] = theta_json(c.simulate_theta);
  j["prior"] = {{"lower", c.prior.lower}, {"upper", c.prior.upper}};
  j["mcmc"] = {{"n_iter", s.n_iter},
               {"burn_in", s.burn_in},
               {"thin", s.thin},
               {"seed", c.mcmc.seed},
               {"chains", c.mcmc.chains},
               {"cache_capacity", c.mcmc.cache_capacity},
               {"initial_scales", s.initial_scales},
               {"log_lambda2_scale", s.log_lambda2_scale},
               {"lambda2_update", update_name(s.variance_update)},
               {"adaptation",
                {{"low", s.policy.low},
                 {"high", s.policy.high},
                 {"multiplier_up", s.policy.multiplier_up},
                 {"multiplier_down", s.policy.multiplier_down},
                 {"window", s.policy.window},
                 {"horizon", s.policy.horizon}}}};
  j["validation"] = {{"alpha", c.validation.alpha},
                     {"min_draws", c.validation.min_draws},
                     {"qoi_probs", c.validation.qoi_probs}};
  j["sensitivity"] = {{"nominal", theta_json(c.sensitivity.oat.nominal)},
                      {"fraction", c.sensitivity.oat.fraction},
                      {"threshold", c.sensitivity.threshold ? json(*c.sensitivity.threshold) : json()},
                      {"n_mc", c.sensitivity.n_mc},
                      {"time_resolved", c.sensitivity.time_resolved}};
  j["decision"] = {{"m", c.decision.m},
                   {"c", c.decision.c},
                   {"grid_points", c.decision.search.grid_points},
                   {"tolerance", c.decision.search.tolerance}};
  j["synthetic"] = {{"theta", theta_json(c.synthetic.theta)},
                    {"lambda", c.synthetic.lambda},
                    {"bias", c.synthetic.bias},
                    {"seed", c.synthetic.seed}};
  return j.dump();  // nlohmann::json objects iterate in sorted key order
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace thermocal
