#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "rlncsim/channel.hpp"
#include "rlncsim/coding.hpp"

namespace rlncsim {

/// Block execution engine.
///  - Slot: steps the channel slot by slot; supports every regime and decode
///    model and can record per-user inter-success gaps.
///  - Collapsed: samples each user's per-block completion time directly from
///    its exact distribution (negative-binomial / binomial collapsing of the
///    gap sums) and propagates the end-of-block channel state in closed form.
///    Identical in law to Slot for the regimes it supports; used for large
///    (n, k) sweeps.
enum class Engine { Auto, Slot, Collapsed };

struct SimConfig {
  ChannelRegime regime = Invariant{0.5};
  DecodeModel model = Idealized{1};
  long n = 1;
  std::uint64_t seed = 1;
  long budget = 200;       // counted blocks per session
  long warmup_limit = 50;  // max blocks searched for the first all-ON return
  bool record_gaps = false;
  bool reset_all_on = false;  // force every block to start from all-ON
  Engine engine = Engine::Auto;
};

/// Per-block record: decoding delay U = max_i Y_i, per-user completion
/// times, optional gap samples, and the channel state when the block ends.
struct BlockOutcome {
  long delay = 0;
  std::vector<long> completion;                // Y_i
  std::vector<long> first_gap;                 // X_{i1} (record_gaps only)
  std::vector<std::vector<long>> later_gaps;   // X_{ih}, h >= 2
  ChannelState end_state;
};

/// Renewal bookkeeping over returns of the end-of-block state to all-ON.
struct RenewalSummary {
  long cycles = 0;
  long total_cycle_blocks = 0;  // sum of M over completed cycles
  long total_cycle_length = 0;  // sum of W over completed cycles
  double mean_blocks = std::numeric_limits<double>::quiet_NaN();   // E[M]
  double mean_length = std::numeric_limits<double>::quiet_NaN();   // E[W]
  double renewal_throughput =
      std::numeric_limits<double>::quiet_NaN();  // k*E[M]/E[W]
};

struct SessionReport {
  long n = 0;
  long k = 0;                      // packets per block
  long receptions_required = 0;    // k, or nu_k for the LT model
  double capacity = std::numeric_limits<double>::quiet_NaN();  // 1 - p
  std::string engine_used;

  long blocks = 0;
  long total_slots = 0;
  double throughput = 0.0;  // R[t]/t over the counted region
  double delay_mean = 0.0;
  double delay_variance = 0.0;
  std::vector<double> delays;

  bool renewal_tracked = false;
  RenewalSummary renewal;
  /// k / mean(U); reported for the idealized model over invariant channels.
  double consistency_throughput = std::numeric_limits<double>::quiet_NaN();
  /// Fraction of (user, block) decode draws that succeeded (LT model).
  double lt_decode_fraction = std::numeric_limits<double>::quiet_NaN();

  long warmup_blocks = 0;
  bool warmup_renewal_found = true;

  // Replication aggregates (filled by replicate()).
  long replications = 1;
  double throughput_ci = 0.0;  // 95% half-width over replication means
  double delay_ci = 0.0;
  std::vector<double> rep_throughputs;
  std::vector<double> rep_delay_means;
};

using BlockObserver = std::function<void(const BlockOutcome&)>;

/// Runs one session: blocks are transmitted back to back, each starting at
/// the channel state the previous block left behind (all-ON initially).
SessionReport run_session(const SimConfig& config,
                          const BlockObserver& observer = {});

/// Independent replications with split seeds, pooled with
/// between-replication variance. Deterministic for a fixed master seed
/// regardless of worker count. Replication 0 reuses the master seed, so
/// reps = 1 reproduces run_session exactly.
SessionReport replicate(const SimConfig& config, long reps, int workers = 1);

}  // namespace rlncsim
