#include "thermocal/mcmc.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "thermocal/error.hpp"
#include "thermocal/parallel.hpp"
#include "thermocal/stats.hpp"

namespace thermocal {

namespace {

constexpr std::size_t kVarianceSlot = ParameterVector::kSize;

}  // namespace

void AdaptationPolicy::validate(int burn_in) const {
  if (!(low > 0.0 && low < high && high < 1.0)) {
    throw DomainError("adaptation band must satisfy 0 < low < high < 1");
  }
  if (!(multiplier_up > 1.0 && multiplier_down > 0.0 && multiplier_down < 1.0)) {
    throw DomainError("adaptation multipliers must satisfy up > 1 > down > 0");
  }
  if (window < 1) throw DomainError("adaptation window must be positive");
  if (horizon < 0 || horizon > burn_in) {
    throw DomainError("adaptation horizon must lie in [0, burn_in]");
  }
}

void ChainSettings::validate() const {
  if (burn_in < 0 || !(burn_in < n_iter)) throw DomainError("burn_in must be in [0, n_iter)");
  if (thin < 1) throw DomainError("thin must be at least 1");
  policy.validate(burn_in);
  if (!(log_lambda2_scale > 0.0)) throw DomainError("log_lambda2_scale must be positive");
}

std::size_t ChainSettings::retained_count() const noexcept {
  const int post = n_iter - burn_in;
  return post <= 0 ? 0 : static_cast<std::size_t>((post + thin - 1) / thin);
}

bool metropolis_accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(rng.uniform()) < log_ratio;
}

StepOutcome rw_component_step(const ChainState& state, std::size_t component, double scale,
                              const LogTarget& target, Rng& rng) {
  if (component >= ParameterVector::kSize) throw DomainError("component index out of range");
  if (!(scale > 0.0)) throw DomainError("proposal scale must be positive");

  ParameterVector proposal = state.theta;
  proposal[component] += scale * rng.normal();
  if (!target.prior().contains(proposal)) {
    // Zero posterior density: rejected without touching the simulator.
    return {state, false};
  }
  Evaluation eval = target.evaluate(proposal, state.lambda2);
  if (!metropolis_accept(eval.log_post - state.log_post, rng)) return {state, false};
  return {ChainState{proposal, state.lambda2, eval.log_post, eval.ss, std::move(eval.prediction)},
          true};
}

ChainState lambda2_gibbs_update(const ChainState& state, const LogTarget& target, Rng& rng) {
  if (!(state.ss > 0.0)) {
    throw DomainError("lambda2 update: SS(theta) is zero, Inverse-Gamma scale degenerate");
  }
  const double shape = 0.5 * static_cast<double>(target.observation_count());
  std::gamma_distribution<double> gamma(shape, 1.0);
  ChainState next = state;
  next.lambda2 = 0.5 * state.ss / gamma(rng);
  next.log_post = target.rescore(next.theta, next.ss, next.lambda2);
  return next;
}

StepOutcome lambda2_log_rw_step(const ChainState& state, double scale, const LogTarget& target,
                                Rng& rng) {
  const double log_current = std::log(state.lambda2);
  const double log_proposed = log_current + scale * rng.normal();
  const double lambda2 = std::exp(log_proposed);
  const double log_post = target.rescore(state.theta, state.ss, lambda2);
  // Jacobian of lambda2 -> log lambda2.
  const double log_ratio = log_post - state.log_post + log_proposed - log_current;
  if (!metropolis_accept(log_ratio, rng)) return {state, false};
  ChainState next = state;
  next.lambda2 = lambda2;
  next.log_post = log_post;
  return {std::move(next), true};
}

ChainState make_state(const LogTarget& target, const ParameterVector& theta, double lambda2) {
  Evaluation eval = target.evaluate(theta, lambda2);
  return {theta, lambda2, eval.log_post, eval.ss, std::move(eval.prediction)};
}

ChainState initial_state(const LogTarget& target) {
  const ParameterVector theta = target.prior().midpoint();
  // Any positive lambda2 gives the same SS; rescale afterwards.
  ChainState state = make_state(target, theta, 1.0);
  double lambda2 = state.ss / static_cast<double>(target.observation_count());
  if (!(lambda2 > 0.0)) lambda2 = 1.0;
  state.lambda2 = lambda2;
  state.log_post = target.rescore(theta, state.ss, lambda2);
  return state;
}

Chain run_chain(const LogTarget& target, const ChainState& init, const ChainSettings& settings,
                std::uint64_t seed) {
  settings.validate();
  if (!target.prior().contains(init.theta) || !(init.lambda2 > 0.0)) {
    throw DomainError("run_chain: initial state outside the prior support");
  }
  if (!std::isfinite(init.log_post)) {
    throw DomainError("run_chain: initial log-posterior is not finite");
  }

  Rng rng(seed);
  Chain chain;
  chain.seed = seed;
  chain.draws.reserve(settings.retained_count());
  if (settings.keep_predictions) chain.predictions.reserve(settings.retained_count());
  chain.scale_history.reserve(static_cast<std::size_t>(settings.n_iter));

  std::array<double, 4> scales{};
  for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
    scales[i] = settings.initial_scales[i] > 0.0 ? settings.initial_scales[i]
                                                 : 0.05 * target.prior().width(i);
  }
  scales[kVarianceSlot] = settings.log_lambda2_scale;

  std::array<int, 4> window_accepts{};
  std::array<long, 4> burn_accepts{};
  std::array<long, 4> post_accepts{};
  const bool gibbs = settings.variance_update == VarianceUpdate::Gibbs;

  ChainState state = init;
  for (int it = 0; it < settings.n_iter; ++it) {
    chain.scale_history.push_back(scales);
    const bool post = it >= settings.burn_in;
    std::array<bool, 4> accepted{};

    for (std::size_t i = 0; i < ParameterVector::kSize; ++i) {
      if (!settings.sample_component[i]) continue;
      StepOutcome out = rw_component_step(state, i, scales[i], target, rng);
      accepted[i] = out.accepted;
      if (out.accepted) state = std::move(out.state);
    }
    if (gibbs) {
      state = lambda2_gibbs_update(state, target, rng);
      accepted[kVarianceSlot] = true;
    } else {
      StepOutcome out = lambda2_log_rw_step(state, scales[kVarianceSlot], target, rng);
      accepted[kVarianceSlot] = out.accepted;
      if (out.accepted) state = std::move(out.state);
    }

    for (std::size_t i = 0; i < 4; ++i) {
      if (!accepted[i]) continue;
      ++window_accepts[i];
      ++(post ? post_accepts[i] : burn_accepts[i]);
    }

    if ((it + 1) % settings.policy.window == 0) {
      if (it + 1 <= settings.policy.horizon) {
        for (std::size_t i = 0; i < 4; ++i) {
          const bool adaptive = i < ParameterVector::kSize ? settings.sample_component[i] : !gibbs;
          if (!adaptive) continue;
          const double rate = static_cast<double>(window_accepts[i]) / settings.policy.window;
          if (rate < settings.policy.low) scales[i] *= settings.policy.multiplier_down;
          if (rate > settings.policy.high) scales[i] *= settings.policy.multiplier_up;
        }
      }
      window_accepts.fill(0);
    }

    if (post && (it - settings.burn_in) % settings.thin == 0) {
      chain.draws.push_back(Draw{it, state.theta, state.lambda2});
      if (settings.keep_predictions) chain.predictions.push_back(state.prediction);
    }
  }

  const double n_post = settings.n_iter - settings.burn_in;
  const double n_burn = settings.burn_in;
  for (std::size_t i = 0; i < 4; ++i) {
    const bool active = i < ParameterVector::kSize ? settings.sample_component[i] : true;
    chain.acceptance[i] = active ? post_accepts[i] / n_post : 0.0;
    chain.burn_in_acceptance[i] = active && n_burn > 0 ? burn_accepts[i] / n_burn : 0.0;
  }
  return chain;
}

Chain run_chains(const LogTarget& target, const ChainSettings& settings, std::uint64_t seed,
                 int chain_count, unsigned threads) {
  if (chain_count < 1) throw DomainError("chain count must be at least 1");
  const ChainState init = initial_state(target);
  std::vector<Chain> chains(static_cast<std::size_t>(chain_count));
  parallel_for(chains.size(), threads, [&](std::size_t k) {
    chains[k] = run_chain(target, init, settings, derive_seed(seed, k));
  });
  if (chains.size() == 1) return std::move(chains.front());

  Chain merged;
  merged.seed = seed;
  merged.scale_history = chains.front().scale_history;
  for (const Chain& c : chains) {
    merged.draws.insert(merged.draws.end(), c.draws.begin(), c.draws.end());
    merged.predictions.insert(merged.predictions.end(), c.predictions.begin(), c.predictions.end());
    for (std::size_t i = 0; i < 4; ++i) {
      merged.acceptance[i] += c.acceptance[i] / static_cast<double>(chains.size());
      merged.burn_in_acceptance[i] += c.burn_in_acceptance[i] / static_cast<double>(chains.size());
    }
  }
  return merged;
}

ChainSummary diagnostics(const Chain& chain) {
  const std::size_t m = chain.draws.size();
  if (m < 10) throw DomainError("diagnostics need at least 10 draws, got " + std::to_string(m));
  ChainSummary summary;
  summary.draws = m;
  static constexpr std::array<const char*, 4> kNames{"theta1", "theta2", "theta3", "lambda2"};
  static constexpr std::array<double, 2> kProbs{0.025, 0.975};
  std::vector<double> values(m);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t k = 0; k < m; ++k) {
      values[k] = c < ParameterVector::kSize ? chain.draws[k].theta[c] : chain.draws[k].lambda2;
    }
    ComponentSummary& s = summary.components[c];
    s.name = kNames[c];
    s.mean = stats::mean(values);
    s.sd = stats::stddev_sample(values);
    const auto q = stats::quantiles(values, kProbs);
    s.ci_low = q[0];
    s.ci_high = q[1];
    s.ess = stats::effective_sample_size(values);
    s.acceptance_rate = chain.acceptance[c];
  }
  return summary;
}

}  // namespace thermocal
