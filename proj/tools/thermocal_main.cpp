// thermocal: calibrate, validate and exploit a building thermal model from
// power measurements.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "thermocal/error.hpp"
#include "thermocal/pipeline.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kData = 3, kNumerical = 4 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian calibration and validation of a building thermal model"};
  app.set_version_flag("--version", thermocal::library_version());
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 1;
  app.add_option("--config", config_path, "Run configuration (JSON)")->required();
  app.add_option("--seed", seed, "Override the configured seed");
  app.add_option("--out", out_dir, "Override the output directory");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  using Command = thermocal::CommandResult (*)(const thermocal::RunConfig&,
                                               const thermocal::CommandOptions&);
  const std::map<std::string, std::pair<Command, std::string>> commands{
      {"simulate", {thermocal::cmd_simulate, "Run the forward model at simulate_theta"}},
      {"generate", {thermocal::cmd_generate, "Generate synthetic measurements with a truth record"}},
      {"sensitivity", {thermocal::cmd_sensitivity, "OAT screening and first-order Sobol indices"}},
      {"calibrate", {thermocal::cmd_calibrate, "Sample the posterior by adaptive MCMC"}},
      {"validate", {thermocal::cmd_validate, "Posterior predictive chi-square test"}},
      {"propagate", {thermocal::cmd_propagate, "Propagate posterior draws to the mean power"}},
      {"decide", {thermocal::cmd_decide, "Bayes-optimal fixed fee per defection rate"}},
      {"pipeline", {thermocal::cmd_pipeline, "sensitivity, calibrate, validate, propagate, decide"}},
  };
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.second);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    thermocal::RunConfig config = thermocal::load_config(config_path);
    if (!out_dir.empty()) config.output_dir = std::filesystem::absolute(out_dir);
    thermocal::CommandOptions options{threads, seed};
    for (const auto& [name, entry] : commands) {
      if (!app.got_subcommand(name)) continue;
      const thermocal::CommandResult result = entry.first(config, options);
      for (const auto& file : result.files) std::cout << file.string() << '\n';
    }
  } catch (const thermocal::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const thermocal::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const thermocal::Error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}
