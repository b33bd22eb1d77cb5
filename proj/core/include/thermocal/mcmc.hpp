#pragma once

// Componentwise adaptive random-walk Metropolis for theta, combined with an
// exact Inverse-Gamma draw for the noise variance (or, optionally, a random
// walk on log lambda2).

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "thermocal/random.hpp"
#include "thermocal/statmodel.hpp"

namespace thermocal {

struct ChainState {
  ParameterVector theta;
  double lambda2 = 1.0;
  double log_post = 0.0;
  double ss = 0.0;
  std::shared_ptr<const Series> prediction;
};

struct AdaptationPolicy {
  double low = 0.2;
  double high = 0.5;
  double multiplier_up = 1.1;
  double multiplier_down = 0.9;
  int window = 50;
  int horizon = 10000;  // last iteration (exclusive) at which scales may change

  void validate(int burn_in) const;
};

enum class VarianceUpdate { Gibbs, LogRandomWalk };

struct ChainSettings {
  int n_iter = 60000;
  int burn_in = 10000;
  int thin = 10;
  AdaptationPolicy policy;
  // Initial proposal s.d. per theta component; non-positive entries default
  // to 5% of the prior width.
  std::array<double, ParameterVector::kSize> initial_scales{0.0, 0.0, 0.0};
  std::array<bool, ParameterVector::kSize> sample_component{true, true, true};
  VarianceUpdate variance_update = VarianceUpdate::Gibbs;
  double log_lambda2_scale = 0.3;
  bool keep_predictions = true;

  void validate() const;
  std::size_t retained_count() const noexcept;
};

struct Draw {
  int iter = 0;
  ParameterVector theta;
  double lambda2 = 0.0;
};

struct Chain {
  std::vector<Draw> draws;
  std::vector<std::shared_ptr<const Series>> predictions;  // aligned with draws, may be empty
  // Acceptance over the post-burn-in iterations; index 3 is lambda2 (1 for Gibbs).
  std::array<double, 4> acceptance{};
  std::array<double, 4> burn_in_acceptance{};
  // Proposal scales in force at each iteration (index 3: log-lambda2 scale).
  std::vector<std::array<double, 4>> scale_history;
  std::uint64_t seed = 0;
};

struct StepOutcome {
  ChainState state;
  bool accepted = false;
};

// Metropolis accept/reject for a symmetric proposal given log pi(new) - log pi(old).
bool metropolis_accept(double log_ratio, Rng& rng);

StepOutcome rw_component_step(const ChainState& state, std::size_t component, double scale,
                              const LogTarget& target, Rng& rng);

// lambda2 ~ Inverse-Gamma(T/2, SS/2). Throws DomainError when SS == 0.
ChainState lambda2_gibbs_update(const ChainState& state, const LogTarget& target, Rng& rng);

// Random walk on log lambda2, Jacobian included.
StepOutcome lambda2_log_rw_step(const ChainState& state, double scale, const LogTarget& target,
                                Rng& rng);

// theta at the prior-box midpoint, lambda2 = SS(theta)/T.
ChainState initial_state(const LogTarget& target);

// Builds a coherent ChainState at the given point.
ChainState make_state(const LogTarget& target, const ParameterVector& theta, double lambda2);

Chain run_chain(const LogTarget& target, const ChainState& init, const ChainSettings& settings,
                std::uint64_t seed);

// Independent chains on substreams (seed, k), run on up to `threads` workers
// and concatenated in chain order.
Chain run_chains(const LogTarget& target, const ChainSettings& settings, std::uint64_t seed,
                 int chain_count, unsigned threads = 1);

struct ComponentSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ess = 0.0;
  double acceptance_rate = 0.0;
};

struct ChainSummary {
  std::size_t draws = 0;
  std::array<ComponentSummary, 4> components;  // theta1..3, lambda2
};

ChainSummary diagnostics(const Chain& chain);

}  // namespace thermocal
