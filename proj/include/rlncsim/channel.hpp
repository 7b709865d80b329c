#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "rlncsim/rng.hpp"

namespace rlncsim {

/// Two-state Markov (ON/OFF) channel parameters.
/// alpha: P(ON -> OFF), beta: P(OFF -> ON).
struct ChannelParams {
  double alpha = 0.0;
  double beta = 0.0;

  ChannelParams() = default;
  ChannelParams(double a, double b) : alpha(a), beta(b) {
    if (!(alpha > 0.0) || !(beta > 0.0) || alpha > 1.0 || beta > 1.0) {
      throw std::invalid_argument(
          "channel transition probabilities must lie in (0,1]");
    }
  }

  /// Steady-state erasure probability alpha/(alpha+beta).
  double erasure() const { return alpha / (alpha + beta); }

  /// -ln(1-beta); abscissa of convergence of the inter-success m.g.f.
  double lambda() const { return -std::log(1.0 - beta); }

  /// Aperiodic-embedded-chain hypothesis needed by the correlated-channel
  /// analytics (alpha + beta != 2; alpha = beta = 1 alternates forever).
  bool analytics_valid() const { return alpha + beta != 2.0; }
};

struct Invariant {
  double p;  // per-slot erasure probability
};
struct Correlated {
  ChannelParams params;
};
struct Asymmetric {
  std::vector<double> p;  // per-user erasure probabilities
};
struct PerfectlyDependent {
  double p;  // one shared time-invariant channel
};
/// Hook for user-supplied joint state samplers (dependent channels beyond
/// perfect correlation). The callable maps the current ON/OFF vector to the
/// next one in place, drawing from the given stream.
struct CustomJoint {
  std::function<void(std::vector<std::uint8_t>&, Rng&)> step;
};

using ChannelRegime =
    std::variant<Invariant, Correlated, Asymmetric, PerfectlyDependent,
                 CustomJoint>;

/// Per-user ON/OFF state vector; on[i] == 1 means user i's channel is ON.
struct ChannelState {
  std::vector<std::uint8_t> on;

  bool all_on() const {
    for (auto b : on)
      if (!b) return false;
    return true;
  }
};

double steady_state_erasure(const ChannelParams& params);

/// P(X = u) for the gap X between consecutive successes of a user whose
/// state at the previous success slot is ON: 1-alpha for u=1, and
/// alpha*beta*(1-beta)^(u-2) for u >= 2.
double inter_success_pmf_from_on(const ChannelParams& params, long u);

enum class StartState { On, Off };

/// Closed-form m.g.f. E[e^{tau X}] of the inter-success gap, from either
/// start state. Finite for tau < -ln(1-beta).
double inter_success_mgf(const ChannelParams& params, double tau,
                         StartState start);

/// Mean gap from a given start state (m.g.f. derivative at zero):
/// 1 + alpha/beta from ON, 1/beta from OFF.
double inter_success_mean(const ChannelParams& params, StartState start);

/// Generates per-user channel state sequences for any regime. Each user owns
/// an independent substream of the master seed, so a process with more users
/// replays the smaller process's per-user draws exactly.
class ChannelProcess {
 public:
  ChannelProcess(ChannelRegime regime, long n, std::uint64_t master_seed,
                 bool start_all_on = true);

  long user_count() const { return n_; }
  const ChannelState& state() const { return state_; }
  void set_state(const ChannelState& s);

  /// Advances every user's channel one slot; returns the new state. The
  /// reception bit of user i equals state().on[i].
  const ChannelState& step();

 private:
  ChannelRegime regime_;
  long n_;
  ChannelState state_;
  std::vector<Rng> streams_;  // one per user; single stream for joint regimes
};

}  // namespace rlncsim
