#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "thermocal/decision.hpp"
#include "thermocal/mcmc.hpp"
#include "thermocal/sensitivity.hpp"
#include "thermocal/statmodel.hpp"
#include "thermocal/synthetic.hpp"
#include "thermocal/validation.hpp"

namespace thermocal {

struct McmcConfig {
  ChainSettings settings;
  std::uint64_t seed = 20150601;
  int chains = 1;
  std::size_t cache_capacity = ForwardModel::kUnbounded;
};

struct ValidationConfig {
  double alpha = 0.05;
  std::size_t min_draws = kMinDrawsForPValue;
  std::vector<double> qoi_probs{0.025, 0.5, 0.975};
};

struct SensitivityConfig {
  OATSpec oat;
  std::optional<double> threshold;  // must be given before `sensitivity` runs
  std::size_t n_mc = 10000;
  bool time_resolved = false;
};

struct DecisionConfig {
  double m = 1.0;
  std::vector<double> c{0.01, 0.2};
  SearchConfig search;
};

// Everything a command needs. Paths are resolved against the directory of
// the config file at load time.
struct RunConfig {
  std::filesystem::path forcing;
  std::filesystem::path measurements;
  std::filesystem::path geometry;
  std::filesystem::path output_dir = "out";
  int block_count = 30;
  double initial_power = 0.0;
  ParameterVector simulate_theta{{0.175, 10.0, 5.0}};
  PriorSpec prior;
  McmcConfig mcmc;
  ValidationConfig validation;
  SensitivityConfig sensitivity;
  DecisionConfig decision;
  SyntheticDataSpec synthetic;

  // Checks numeric settings against the owning modules' preconditions.
  void validate() const;
};

// Strict JSON loader: unknown keys and type mismatches raise ConfigError.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);

// Canonical serialization of every field (sorted keys, round-trip doubles).
std::string canonical_json(const RunConfig& config);

// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace thermocal
