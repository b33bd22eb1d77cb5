#include "thermocal/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <functional>
#include <memory>
#include <sstream>

#include <json.hpp>

#include "thermocal/error.hpp"
#include "thermocal/io.hpp"
#include "thermocal/sensitivity.hpp"
#include "thermocal/stats.hpp"
#include "thermocal/validation.hpp"

#ifndef THERMOCAL_VERSION
#define THERMOCAL_VERSION "unknown"
#endif

namespace thermocal {

namespace fs = std::filesystem;
using nlohmann::json;

std::string library_version() { return THERMOCAL_VERSION; }

OutputLock::OutputLock(const fs::path& dir) {
  fs::create_directories(dir);
  path_ = dir / artifacts::kLock;
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    const fs::path held = path_;
    path_.clear();
    throw ConfigError("output directory " + dir.string() + " is locked by another run (" +
                      held.string() + ")");
  }
  const std::string pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

OutputLock::~OutputLock() {
  if (path_.empty()) return;
  std::error_code ec;
  fs::remove(path_, ec);
}

namespace {

constexpr std::uint64_t kReplicateStream = 1001;
constexpr std::uint64_t kSobolStream = 2001;

// State shared by the commands of one invocation.
class Session {
 public:
  Session(RunConfig config, CommandOptions options)
      : config_(std::move(config)), options_(options) {
    if (options_.seed) config_.mcmc.seed = *options_.seed;
  }

  const RunConfig& config() const { return config_; }
  unsigned threads() const { return std::max(1u, options_.threads); }
  fs::path out(const char* name) const { return config_.output_dir / name; }

  const ForcingMatrix& forcing() {
    if (!forcing_) {
      require_input(config_.forcing, "forcing");
      forcing_ = io::load_forcing(config_.forcing);
    }
    return *forcing_;
  }

  const CellGeometry& geometry() {
    if (!geometry_) {
      geometry_ = config_.geometry.empty() ? CellGeometry{} : io::load_geometry(config_.geometry);
    }
    return *geometry_;
  }

  std::shared_ptr<ForwardModel> model() {
    if (!model_) {
      model_ = std::make_shared<ForwardModel>(forcing(), geometry(), config_.block_count,
                                              config_.initial_power, config_.mcmc.cache_capacity);
    }
    return model_;
  }

  const MeasurementSeries& measurements() {
    if (!measurements_) {
      require_input(config_.measurements, "measurements");
      measurements_ = io::load_measurements(config_.measurements);
      if (measurements_->size() != static_cast<std::size_t>(config_.block_count)) {
        throw DataError("measurement file has " + std::to_string(measurements_->size()) +
                        " rows but block_count is " + std::to_string(config_.block_count));
      }
    }
    return *measurements_;
  }

  // Posterior sample from memory, or from the calibrate artifacts on disk.
  const PosteriorSample& sample() {
    if (sample_) return *sample_;
    const fs::path chain_path = out(artifacts::kChain);
    if (!fs::exists(chain_path)) {
      throw MissingArtifactError("no " + chain_path.string() + ": run calibrate first");
    }
    PosteriorSample s;
    s.draws = io::load_chain(chain_path);
    const fs::path pred_path = out(artifacts::kChainPredictions);
    if (fs::exists(pred_path)) {
      auto preds = io::load_trajectories(pred_path);
      if (preds.size() == s.draws.size()) {
        for (std::size_t m = 0; m < preds.size(); ++m) model()->remember(s.draws[m].theta, preds[m]);
        s.predictions = std::move(preds);
      }
    }
    sample_ = std::move(s);
    return *sample_;
  }

  void set_sample(PosteriorSample s) { sample_ = std::move(s); }

  std::vector<double> qoi_draws() {
    if (qoi_) return *qoi_;
    const fs::path path = out(artifacts::kEnsemble);
    if (!fs::exists(path)) {
      throw MissingArtifactError("no " + path.string() + ": run propagate first");
    }
    std::istringstream in(io::read_text(path));
    std::string line;
    std::getline(in, line);
    if (line.rfind("draw,qoi_mean_power_w", 0) != 0) throw DataError(path.string() + ": bad header");
    std::vector<double> q;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw DataError(path.string() + ": malformed row");
      q.push_back(std::stod(line.substr(comma + 1)));
    }
    qoi_ = std::move(q);
    return *qoi_;
  }

  void set_qoi(std::vector<double> q) { qoi_ = std::move(q); }

  std::size_t simulations() const { return model_ ? model_->simulation_count() : 0; }

 private:
  static void require_input(const fs::path& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("config does not name a ") + what + " file");
    if (!fs::exists(path)) throw ConfigError(std::string(what) + " file not found: " + path.string());
  }

  RunConfig config_;
  CommandOptions options_;
  std::optional<ForcingMatrix> forcing_;
  std::optional<CellGeometry> geometry_;
  std::shared_ptr<ForwardModel> model_;
  std::optional<MeasurementSeries> measurements_;
  std::optional<PosteriorSample> sample_;
  std::optional<std::vector<double>> qoi_;
};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_manifest(Session& s, const std::string& command, std::uint64_t seed,
                    const CommandResult& result, double wall_seconds) {
  json files = json::array();
  for (const auto& f : result.files) files.push_back(f.filename().string());
  const json manifest = {{"command", command},
                         {"config_hash", config_hash(s.config())},
                         {"seed", seed},
                         {"version", library_version()},
                         {"threads", s.threads()},
                         {"simulations_run", result.simulations},
                         {"wall_time_s", wall_seconds},
                         {"files", files}};
  io::write_text(s.out(("manifest_" + command + ".json").c_str()), dump(manifest));
}

using Step = std::function<CommandResult(Session&)>;

CommandResult timed(Session& s, const std::string& name, std::uint64_t seed, const Step& step) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t sims_before = s.simulations();
  CommandResult r = step(s);
  r.simulations = s.simulations() - sims_before;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(s, name, seed, r, wall);
  return r;
}

CommandResult run_simulate(Session& s) {
  const auto& cfg = s.config();
  const PredictionSeries traj = s.model()->trajectory(cfg.simulate_theta);
  const auto& forcing = s.forcing();
  std::ostringstream raw;
  raw << "t,timestamp,power_w\n";
  for (std::size_t k = 0; k < traj.powers.size(); ++k) {
    raw << k << ',' << io::format_double(forcing.records[k].timestamp) << ','
        << io::format_double(traj.powers[k]) << '\n';
  }
  io::write_text(s.out(artifacts::kSimulation), raw.str());
  MeasurementSeries avg{block_average(traj.powers, cfg.block_count),
                        block_timestamps(forcing, cfg.block_count)};
  io::write_measurements(s.out(artifacts::kSimulationAveraged), avg);
  return {{s.out(artifacts::kSimulation), s.out(artifacts::kSimulationAveraged)}, 0};
}

CommandResult run_generate(Session& s, std::uint64_t seed) {
  SyntheticDataSpec spec = s.config().synthetic;
  spec.seed = seed;
  const SyntheticData data = generate_synthetic(spec, *s.model(), s.config().prior);
  io::write_measurements(s.out(artifacts::kMeasurements), data.measurements);
  io::write_text(s.out(artifacts::kTruth), truth_record(data));
  return {{s.out(artifacts::kMeasurements), s.out(artifacts::kTruth)}, 0};
}

CommandResult run_sensitivity(Session& s) {
  const auto& cfg = s.config();
  if (!cfg.sensitivity.threshold) {
    throw ConfigError("sensitivity.threshold must be set explicitly in the config");
  }
  auto model = s.model();
  const ResponseFn response = [model](const ParameterVector& theta) { return *model->averaged(theta); };
  const SensitivityIndices oat = oat_analysis(cfg.sensitivity.oat, response, cfg.prior);
  std::array<double, ParameterVector::kSize> hybrid{};
  for (std::size_t i = 0; i < hybrid.size(); ++i) hybrid[i] = oat.hybrid[i].hybrid;
  const auto kept = screen(hybrid, *cfg.sensitivity.threshold);

  const std::uint64_t seed = derive_seed(cfg.mcmc.seed, kSobolStream);
  // Pick-freeze designs visit fresh random points; keep them out of the cache.
  auto sobol_model = std::make_shared<ForwardModel>(s.forcing(), s.geometry(), cfg.block_count,
                                                    cfg.initial_power, 0);
  const ResponseFn sobol_response = [sobol_model](const ParameterVector& theta) {
    return *sobol_model->averaged(theta);
  };
  std::ostringstream csv;
  csv << "param,s_mean,s_std,s_hybrid,sobol_first_order,retained\n";
  std::vector<std::vector<double>> sobol_series;
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    const SobolEstimate sobol =
        sobol_first_order(i, cfg.prior, cfg.sensitivity.n_mc, sobol_response, seed, s.threads());
    const bool retained = std::find(kept.begin(), kept.end(), i) != kept.end();
    csv << kParameterNames[i] << ',' << io::format_double(oat.hybrid[i].mean) << ','
        << io::format_double(oat.hybrid[i].sd) << ',' << io::format_double(oat.hybrid[i].hybrid)
        << ',' << io::format_double(sobol.index) << ',' << (retained ? "true" : "false") << '\n';
    if (cfg.sensitivity.time_resolved) {
      sobol_series.push_back(sobol_first_order_series(i, cfg.prior, cfg.sensitivity.n_mc,
                                                      sobol_response, seed, s.threads()));
    }
  }
  io::write_text(s.out(artifacts::kSensitivity), csv.str());

  std::ostringstream series;
  series << "t,theta1,theta2,theta3\n";
  for (std::size_t t = 0; t < oat.oat[0].size(); ++t) {
    series << t << ',' << io::format_double(oat.oat[0][t]) << ',' << io::format_double(oat.oat[1][t])
           << ',' << io::format_double(oat.oat[2][t]) << '\n';
  }
  io::write_text(s.out(artifacts::kOatSeries), series.str());
  CommandResult r{{s.out(artifacts::kSensitivity), s.out(artifacts::kOatSeries)}, 0};

  if (cfg.sensitivity.time_resolved) {
    std::ostringstream ts;
    ts << "t,theta1,theta2,theta3\n";
    for (std::size_t t = 0; t < sobol_series[0].size(); ++t) {
      ts << t << ',' << io::format_double(sobol_series[0][t]) << ','
         << io::format_double(sobol_series[1][t]) << ',' << io::format_double(sobol_series[2][t])
         << '\n';
    }
    io::write_text(s.out(artifacts::kSobolSeries), ts.str());
    r.files.push_back(s.out(artifacts::kSobolSeries));
  }
  return r;
}

json summary_json(const ComponentSummary& c) {
  return {{"mean", c.mean},   {"sd", c.sd},   {"ci_low", c.ci_low},
          {"ci_high", c.ci_high}, {"ess", c.ess}, {"acceptance_rate", c.acceptance_rate}};
}

CommandResult run_calibrate(Session& s) {
  const auto& cfg = s.config();
  const PosteriorModel posterior(s.measurements(), s.model(), cfg.prior);
  Chain chain = run_chains(posterior, cfg.mcmc.settings, cfg.mcmc.seed, cfg.mcmc.chains, s.threads());
  const ChainSummary summary = diagnostics(chain);

  io::write_chain(s.out(artifacts::kChain), chain.draws);
  io::write_trajectories(s.out(artifacts::kChainPredictions), chain.predictions);

  json components = json::object();
  for (const auto& c : summary.components) components[c.name] = summary_json(c);
  const auto& final_scales = chain.scale_history.back();
  const json diag = {{"draws", summary.draws},
                     {"chains", cfg.mcmc.chains},
                     {"seed", cfg.mcmc.seed},
                     {"components", components},
                     {"burn_in_acceptance", chain.burn_in_acceptance},
                     {"final_scales", final_scales}};
  io::write_text(s.out(artifacts::kDiagnostics), dump(diag));

  s.set_sample(PosteriorSample::from_chain(chain));
  return {{s.out(artifacts::kChain), s.out(artifacts::kChainPredictions),
           s.out(artifacts::kDiagnostics)},
          0};
}

CommandResult run_validate(Session& s) {
  const auto& cfg = s.config();
  const PosteriorSample& sample = s.sample();
  if (sample.size() < cfg.validation.min_draws) {
    throw DomainError("validation needs at least " + std::to_string(cfg.validation.min_draws) +
                      " posterior draws, chain has " + std::to_string(sample.size()));
  }
  std::vector<ReplicatePoint> scatter;
  const MeasurementSeries& z = s.measurements();
  const ValidationReport report =
      validate(z, sample, *s.model(), cfg.validation.qoi_probs, cfg.validation.alpha,
               derive_seed(cfg.mcmc.seed, kReplicateStream), s.threads(), nullptr, &scatter);

  json quantiles = json::array();
  for (std::size_t k = 0; k < report.qoi_probs.size(); ++k) {
    quantiles.push_back({{"prob", report.qoi_probs[k]}, {"value", report.qoi_quantiles[k]}});
  }
  const json j = {{"p_b_expectation", report.expectation.p},
                  {"p_b_replicate", report.replicate.p},
                  {"se_expectation", report.expectation.se},
                  {"se_replicate", report.replicate.se},
                  {"qoi_quantiles", quantiles},
                  {"alpha", report.alpha},
                  {"reject_h0", report.reject_h0}};
  io::write_text(s.out(artifacts::kValidation), dump(j));

  std::ostringstream csv;
  csv << "draw,p_value,realized,predictive\n";
  const double dof = static_cast<double>(z.size());
  for (std::size_t m = 0; m < scatter.size(); ++m) {
    csv << m << ',' << io::format_double(chi2_upper_tail(scatter[m].realized, dof)) << ','
        << io::format_double(scatter[m].realized) << ',' << io::format_double(scatter[m].predictive)
        << '\n';
  }
  io::write_text(s.out(artifacts::kDiscrepancies), csv.str());
  return {{s.out(artifacts::kValidation), s.out(artifacts::kDiscrepancies)}, 0};
}

CommandResult run_propagate(Session& s) {
  const PredictionEnsemble ens = propagate(s.sample(), *s.model(), s.threads());
  std::ostringstream csv;
  csv << "draw,qoi_mean_power_w\n";
  for (std::size_t m = 0; m < ens.qoi.size(); ++m) csv << m << ',' << io::format_double(ens.qoi[m]) << '\n';
  io::write_text(s.out(artifacts::kEnsemble), csv.str());
  io::write_trajectories(s.out(artifacts::kTrajectories), ens.trajectories);
  s.set_qoi(ens.qoi);
  return {{s.out(artifacts::kEnsemble), s.out(artifacts::kTrajectories)}, 0};
}

CommandResult run_decide(Session& s) {
  const auto& cfg = s.config();
  const std::vector<double> draws = s.qoi_draws();
  CommandResult r;
  for (std::size_t k = 0; k < cfg.decision.c.size(); ++k) {
    const UtilitySpec spec{cfg.decision.m, cfg.decision.c[k]};
    const DecisionResult d = optimize_fee(draws, spec, cfg.decision.search);
    const json j = {{"d_hat", d.d_hat},
                    {"utility_at_d_hat", d.utility_at_d_hat},
                    {"m", spec.m},
                    {"c", spec.c},
                    {"warning_flags", d.warning_flags}};
    const std::string stem = "decision_c" + std::to_string(k);
    io::write_text(s.out((stem + ".json").c_str()), dump(j));
    std::ostringstream csv;
    csv << "d,expected_utility,se\n";
    for (const auto& p : d.curve) {
      csv << io::format_double(p.d) << ',' << io::format_double(p.expected_utility) << ','
          << io::format_double(p.se) << '\n';
    }
    const std::string curve = "utility_curve_c" + std::to_string(k) + ".csv";
    io::write_text(s.out(curve.c_str()), csv.str());
    r.files.push_back(s.out((stem + ".json").c_str()));
    r.files.push_back(s.out(curve.c_str()));
  }
  return r;
}

CommandResult single(const RunConfig& config, const CommandOptions& options, const std::string& name,
                     const std::function<CommandResult(Session&, std::uint64_t)>& body,
                     bool synthetic_seed = false) {
  RunConfig cfg = config;
  if (synthetic_seed && options.seed) cfg.synthetic.seed = *options.seed;
  Session s(std::move(cfg), options);
  OutputLock lock(s.config().output_dir);
  const std::uint64_t seed = synthetic_seed ? s.config().synthetic.seed : s.config().mcmc.seed;
  return timed(s, name, seed, [&](Session& sess) { return body(sess, seed); });
}

}  // namespace

CommandResult cmd_simulate(const RunConfig& config, const CommandOptions& options) {
  return single(config, options, "simulate", [](Session& s, std::uint64_t) { return run_simulate(s); });
}

CommandResult cmd_generate(const RunConfig& config, const CommandOptions& options) {
  return single(
      config, options, "generate", [](Session& s, std::uint64_t seed) { return run_generate(s, seed); },
      true);
}

CommandResult cmd_sensitivity(const RunConfig& config, const CommandOptions& options) {
  return single(config, options, "sensitivity",
                [](Session& s, std::uint64_t) { return run_sensitivity(s); });
}

CommandResult cmd_calibrate(const RunConfig& config, const CommandOptions& options) {
  return single(config, options, "calibrate",
                [](Session& s, std::uint64_t) { return run_calibrate(s); });
}

CommandResult cmd_validate(const RunConfig& config, const CommandOptions& options) {
  return single(config, options, "validate", [](Session& s, std::uint64_t) { return run_validate(s); });
}

CommandResult cmd_propagate(const RunConfig& config, const CommandOptions& options) {
  return single(config, options, "propagate",
                [](Session& s, std::uint64_t) { return run_propagate(s); });
}

CommandResult cmd_decide(const RunConfig& config, const CommandOptions& options) {
  return single(config, options, "decide", [](Session& s, std::uint64_t) { return run_decide(s); });
}

CommandResult cmd_pipeline(const RunConfig& config, const CommandOptions& options) {
  Session s(config, options);
  OutputLock lock(s.config().output_dir);
  const std::uint64_t seed = s.config().mcmc.seed;
  CommandResult all;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t sims_before = s.simulations();
  const std::vector<std::pair<std::string, Step>> steps{
      {"sensitivity", run_sensitivity}, {"calibrate", run_calibrate}, {"validate", run_validate},
      {"propagate", run_propagate},     {"decide", run_decide}};
  for (const auto& [name, step] : steps) {
    if (name == "sensitivity" && !s.config().sensitivity.threshold) continue;
    const CommandResult r = timed(s, name, seed, step);
    all.files.insert(all.files.end(), r.files.begin(), r.files.end());
  }
  all.simulations = s.simulations() - sims_before;
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_manifest(s, "pipeline", seed, all, wall);
  return all;
}

std::string truth_record(const SyntheticData& data) {
  const auto& spec = data.spec;
  const json truth = {{"theta", {spec.theta[0], spec.theta[1], spec.theta[2]}},
                      {"lambda", spec.lambda},
                      {"lambda2", spec.lambda * spec.lambda},
                      {"bias", spec.bias},
                      {"seed", spec.seed},
                      {"truth_averaged_power_w", data.truth},
                      {"true_period_mean_w", stats::mean(data.truth)}};
  return dump(truth);
}

}  // namespace thermocal
