#pragma once

#include <cstdint>
#include <vector>

#include "paulilearn/channel.hpp"
#include "paulilearn/estimation.hpp"
#include "paulilearn/protocol.hpp"

namespace paulilearn {

enum class Hypothesis { depolarizing, spiked };

/// Alice's draw: a uniform nonidentity Pauli k, a fair sign, and a fair coin
/// between the depolarizing channel and the spiked channel with eigenvalue
/// +-1/3 at k.
struct GameInstance {
  uint32_t n = 0;
  PauliLabel k;
  int sign = +1;
  Hypothesis hypothesis = Hypothesis::depolarizing;
  Channel channel = Channel::identity(0);
};

inline constexpr double kGameEps = 1.0 / 3.0;

inline GameInstance alice_sample(uint32_t n, Rng& rng) {
  if (n < 1) throw DomainError("alice_sample: n must be >= 1");
  GameInstance inst;
  inst.n = n;
  do {
    inst.k = PauliLabel::random(n, rng);
  } while (inst.k.is_identity());
  inst.sign = rng.bernoulli(0.5) ? +1 : -1;
  inst.hypothesis = rng.bernoulli(0.5) ? Hypothesis::depolarizing : Hypothesis::spiked;
  inst.channel = inst.hypothesis == Hypothesis::depolarizing
                     ? Channel::depolarizing(n)
                     : Channel::spiked(inst.k, inst.sign, kGameEps);
  return inst;
}

/// Bob's decision rule: depolarizing iff |lambda_k| < 1/6; the exact
/// boundary counts as spiked.
inline Hypothesis bob_decide(double lambda_hat) {
  return std::abs(lambda_hat) < 1.0 / 6.0 ? Hypothesis::depolarizing : Hypothesis::spiked;
}

/// Success-probability upper bound for entanglement-free strategies,
/// min(1, 1/2 + 0.43 M 2^-n); stated only for n >= 4.
inline double efl_upper_bound(long measurements, uint32_t n) {
  if (n < 4) throw DomainError("efl_upper_bound: the bound is only asserted for n >= 4");
  if (measurements < 0) throw DomainError("efl_upper_bound: negative measurement count");
  const double p = 0.5 + 0.43 * static_cast<double>(measurements) * std::ldexp(1.0, -static_cast<int>(n));
  return std::min(1.0, p);
}

enum class GameProtocol { single_depth, spam_robust };
enum class GameMode { direct, injected };

inline const char* game_protocol_name(GameProtocol p) {
  return p == GameProtocol::single_depth ? "single_depth" : "spam_robust";
}

struct GameConfig {
  uint32_t n = 4;
  long measurements = 1000;  // M per phase
  GameProtocol protocol = GameProtocol::spam_robust;
  SPAMModel spam = SPAMModel::noiseless(8);  // on 2n qubits
  long trials = 100;
  uint64_t seed = 0;
  GameMode mode = GameMode::direct;
  size_t pool_size = 0;  // injected mode; defaults to 2M
};

struct GameResult {
  long trials = 0;
  long successes = 0;
  long trials_depol = 0, successes_depol = 0;
  long trials_spiked = 0, successes_spiked = 0;
  double success_rate = 0.0;
  WilsonInterval wilson;
};

namespace detail {

/// Outcome labels of one Bell-sampling phase with the game channel applied
/// `depth` times (0 or 1); gate is the identity, ancilla noise is trivial.
inline std::vector<ShotRecord> game_phase(const GameConfig& cfg, const Channel& channel, int depth,
                                          uint64_t phase_seed) {
  ExperimentPlan plan;
  plan.protocol = Protocol::eel;
  plan.n = cfg.n;
  plan.gate = CliffordMap::identity(cfg.n);
  plan.depths = {depth};
  plan.n_circuits = static_cast<int>(cfg.measurements);
  plan.n_shots = 1;
  plan.system_noise = channel;
  plan.ancilla_noise = Channel::identity(cfg.n);
  plan.spam = cfg.spam;
  plan.seed = phase_seed;
  return collect_eel(plan);
}

inline double mean_estimator(const std::vector<ShotRecord>& records, const PauliLabel& k) {
  double acc = 0.0;
  for (const auto& r : records) acc += symplectic_inner(r.outcome, k) ? -1.0 : 1.0;
  return records.empty() ? 0.0 : acc / static_cast<double>(records.size());
}

}  // namespace detail

/// Play the distinguishing game `trials` times and report success rates.
/// All measurement data of a trial is collected before k is used; the
/// estimators are pure post-processing.
inline GameResult run_game(const GameConfig& cfg) {
  if (cfg.measurements < 1 || cfg.trials < 0) throw ConfigError("run_game: bad config");
  if (cfg.spam.state_prep.n() != 2 * cfg.n)
    throw DimensionError("run_game: SPAM must act on 2n qubits");
  GameResult res;
  res.trials = cfg.trials;

  // Injected mode reuses one uniformly-inserted Pauli pool across trials,
  // mirroring the hardware emulation pipeline.
  std::vector<PauliLabel> pool_inserted;
  std::vector<PauliLabel> pool_outcomes_d1, pool_outcomes_d0;
  if (cfg.mode == GameMode::injected) {
    const size_t pool_size =
        cfg.pool_size ? cfg.pool_size : 2 * static_cast<size_t>(cfg.measurements);
    if (pool_size < static_cast<size_t>(cfg.measurements))
      throw ConfigError("run_game: pool smaller than M");
    pool_inserted.reserve(pool_size);
    pool_outcomes_d1.reserve(pool_size);
    pool_outcomes_d0.reserve(pool_size);
    for (size_t i = 0; i < pool_size; ++i) {
      Rng rng(cfg.seed, 3, i, 0);
      const PauliLabel inserted = PauliLabel::random(cfg.n, rng);
      const PauliLabel prep = cfg.spam.state_prep.sample_error(rng);
      const PauliLabel meas = cfg.spam.measurement.sample_error(rng);
      const uint32_t n = cfg.n;
      const uint64_t nmask = n >= 64 ? ~0ULL : ((1ULL << n) - 1);
      const uint64_t sx = (prep.x & nmask) ^ (prep.x >> n) ^ (meas.x & nmask) ^ (meas.x >> n);
      const uint64_t sz = (prep.z & nmask) ^ (prep.z >> n) ^ (meas.z & nmask) ^ (meas.z >> n);
      pool_outcomes_d0.emplace_back(n, sx, sz);
      pool_outcomes_d1.emplace_back(n, sx ^ inserted.x, sz ^ inserted.z);
      pool_inserted.push_back(inserted);
    }
  }

  for (long t = 0; t < cfg.trials; ++t) {
    Rng trial_rng(cfg.seed, 1, static_cast<uint64_t>(t), 0);
    const GameInstance inst = alice_sample(cfg.n, trial_rng);

    double lambda_hat = 0.0;
    if (cfg.mode == GameMode::direct) {
      const uint64_t s1 = Rng(cfg.seed, 2, static_cast<uint64_t>(t), 1)();
      const auto phase2 = detail::game_phase(cfg, inst.channel, 1, s1);
      const double l2 = detail::mean_estimator(phase2, inst.k);
      if (cfg.protocol == GameProtocol::single_depth) {
        lambda_hat = l2;
      } else {
        const uint64_t s0 = Rng(cfg.seed, 2, static_cast<uint64_t>(t), 0)();
        const auto phase1 = detail::game_phase(cfg, Channel::identity(cfg.n), 0, s0);
        lambda_hat = spam_robust_pair(detail::mean_estimator(phase1, inst.k), l2);
      }
    } else {
      InjectedTarget target;
      target.depolarizing = inst.hypothesis == Hypothesis::depolarizing;
      target.k = inst.k;
      target.lambda_k = inst.sign * kGameEps;
      const auto subset = emulate_injected_channel(pool_inserted,
                                                   static_cast<size_t>(cfg.measurements), target,
                                                   trial_rng);
      double acc = 0.0;
      for (size_t i : subset)
        acc += symplectic_inner(pool_outcomes_d1[i], inst.k) ? -1.0 : 1.0;
      const double l2 = acc / static_cast<double>(subset.size());
      if (cfg.protocol == GameProtocol::single_depth) {
        lambda_hat = l2;
      } else {
        // Depth-0 calibration from a uniform subsample of the same size.
        InjectedTarget uniform;
        uniform.depolarizing = true;
        const auto cal = emulate_injected_channel(pool_inserted,
                                                  static_cast<size_t>(cfg.measurements), uniform,
                                                  trial_rng);
        double c0 = 0.0;
        for (size_t i : cal) c0 += symplectic_inner(pool_outcomes_d0[i], inst.k) ? -1.0 : 1.0;
        lambda_hat = spam_robust_pair(c0 / static_cast<double>(cal.size()), l2);
      }
    }

    const Hypothesis guess = bob_decide(lambda_hat);
    const bool success = guess == inst.hypothesis;
    res.successes += success;
    if (inst.hypothesis == Hypothesis::depolarizing) {
      res.trials_depol += 1;
      res.successes_depol += success;
    } else {
      res.trials_spiked += 1;
      res.successes_spiked += success;
    }
  }

  res.success_rate = cfg.trials ? static_cast<double>(res.successes) / cfg.trials : 0.0;
  res.wilson = wilson_interval(res.successes, res.trials);
  return res;
}

}  // namespace paulilearn
