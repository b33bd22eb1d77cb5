#pragma once

// End-to-end commands. Each writes its reports into config.output_dir plus a
// manifest_<command>.json (config hash, seed, version, wall time). A lock
// file rejects concurrent commands on the same output directory.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thermocal/config.hpp"

namespace thermocal {

struct CommandOptions {
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;  // overrides the command's configured seed
};

struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::size_t simulations = 0;
};

namespace artifacts {
inline constexpr const char* kChain = "chain.csv";
inline constexpr const char* kChainPredictions = "chain_predictions.csv";
inline constexpr const char* kDiagnostics = "diagnostics.json";
inline constexpr const char* kValidation = "validation.json";
inline constexpr const char* kDiscrepancies = "discrepancies.csv";
inline constexpr const char* kEnsemble = "ensemble.csv";
inline constexpr const char* kTrajectories = "trajectories.csv";
inline constexpr const char* kSensitivity = "sensitivity.csv";
inline constexpr const char* kOatSeries = "oat_series.csv";
inline constexpr const char* kSobolSeries = "sobol_series.csv";
inline constexpr const char* kMeasurements = "measurements.csv";
inline constexpr const char* kTruth = "truth.json";
inline constexpr const char* kSimulation = "simulation.csv";
inline constexpr const char* kSimulationAveraged = "simulation_averaged.csv";
inline constexpr const char* kLock = ".thermocal.lock";
}  // namespace artifacts

CommandResult cmd_simulate(const RunConfig& config, const CommandOptions& options = {});
CommandResult cmd_generate(const RunConfig& config, const CommandOptions& options = {});
CommandResult cmd_sensitivity(const RunConfig& config, const CommandOptions& options = {});
CommandResult cmd_calibrate(const RunConfig& config, const CommandOptions& options = {});
CommandResult cmd_validate(const RunConfig& config, const CommandOptions& options = {});
CommandResult cmd_propagate(const RunConfig& config, const CommandOptions& options = {});
CommandResult cmd_decide(const RunConfig& config, const CommandOptions& options = {});

// sensitivity -> calibrate -> validate -> propagate -> decide, sharing one
// forward model so validation and propagation reuse calibration's runs.
CommandResult cmd_pipeline(const RunConfig& config, const CommandOptions& options = {});

// Exclusive lock on an output directory, released on destruction.
class OutputLock {
 public:
  explicit OutputLock(const std::filesystem::path& dir);
  ~OutputLock();
  OutputLock(const OutputLock&) = delete;
  OutputLock& operator=(const OutputLock&) = delete;

 private:
  std::filesystem::path path_;
};

std::string library_version();

// JSON sidecar recording how a synthetic dataset was generated.
std::string truth_record(const SyntheticData& data);

}  // namespace thermocal
