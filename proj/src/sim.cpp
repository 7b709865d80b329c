#include "rlncsim/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <optional>
#include <stdexcept>

namespace rlncsim {

namespace {

constexpr std::uint64_t kRepSeedSalt = 0x7265706c69636174ULL;  // "replicat"

std::uint64_t replication_seed(std::uint64_t master, long rep) {
  if (rep == 0) return master;
  return substream_seed(master ^ kRepSeedSalt,
                        static_cast<std::uint64_t>(rep));
}

bool regime_is_correlated(const ChannelRegime& regime) {
  return std::holds_alternative<Correlated>(regime);
}

double regime_capacity(const ChannelRegime& regime) {
  if (const auto* inv = std::get_if<Invariant>(&regime)) return 1.0 - inv->p;
  if (const auto* corr = std::get_if<Correlated>(&regime)) {
    return 1.0 - corr->params.erasure();
  }
  if (const auto* asym = std::get_if<Asymmetric>(&regime)) {
    return 1.0 - *std::max_element(asym->p.begin(), asym->p.end());
  }
  if (const auto* dep = std::get_if<PerfectlyDependent>(&regime)) {
    return 1.0 - dep->p;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Erasure probabilities must leave a positive success rate; ChannelProcess
// checks the same, but the collapsed engine never constructs one.
void validate_regime(const ChannelRegime& regime) {
  auto check = [](double p) {
    if (!(p >= 0.0) || p >= 1.0) {
      throw std::invalid_argument("erasure probability must lie in [0,1)");
    }
  };
  if (const auto* inv = std::get_if<Invariant>(&regime)) check(inv->p);
  if (const auto* asym = std::get_if<Asymmetric>(&regime)) {
    if (asym->p.empty()) {
      throw std::invalid_argument("asymmetric regime needs one p per user");
    }
    for (double p : asym->p) check(p);
  }
  if (const auto* dep = std::get_if<PerfectlyDependent>(&regime)) {
    check(dep->p);
  }
}

// ---------------------------------------------------------------------------
// Slot-level engine

class SlotEngine {
 public:
  SlotEngine(const SimConfig& cfg)
      : cfg_(cfg),
        process_(cfg.regime, cfg.n, cfg.seed, /*start_all_on=*/true),
        req_(model_receptions_required(cfg.model)) {
    if (const auto* rb = std::get_if<RankBased>(&cfg.model)) {
      field_.emplace(rb->q);
      coding_rng_ = make_stream(cfg.seed, kCodingStream);
    }
  }

  void reset_all_on() {
    ChannelState s;
    s.on.assign(static_cast<std::size_t>(cfg_.n), 1);
    process_.set_state(s);
  }

  BlockOutcome run_block() {
    const long n = cfg_.n;
    const bool rank_based = field_.has_value();
    BlockOutcome out;
    out.completion.assign(static_cast<std::size_t>(n), 0);
    if (cfg_.record_gaps) {
      out.first_gap.assign(static_cast<std::size_t>(n), 0);
      out.later_gaps.assign(static_cast<std::size_t>(n), {});
    }
    std::vector<long> received(static_cast<std::size_t>(n), 0);
    std::vector<long> last_success(static_cast<std::size_t>(n), 0);
    std::vector<Decoder> decoders;
    if (rank_based) {
      const long k = model_block_size(cfg_.model);
      decoders.assign(static_cast<std::size_t>(n), Decoder(k, *field_));
    }

    long remaining = n;
    long slot = 0;
    std::uniform_int_distribution<unsigned> coeff_dist(
        0, rank_based ? field_->order() - 1 : 1);
    std::vector<std::uint8_t> coeffs;
    while (remaining > 0) {
      ++slot;
      const ChannelState& state = process_.step();
      if (rank_based) {
        // One shared combination per slot, received by every ON user.
        const long k = model_block_size(cfg_.model);
        coeffs.resize(static_cast<std::size_t>(k));
        for (auto& c : coeffs) {
          c = static_cast<std::uint8_t>(coeff_dist(coding_rng_));
        }
      }
      for (long i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (out.completion[ui] != 0 || !state.on[ui]) continue;
        ++received[ui];
        if (cfg_.record_gaps) {
          const long gap = slot - last_success[ui];
          if (received[ui] == 1) {
            out.first_gap[ui] = gap;
          } else {
            out.later_gaps[ui].push_back(gap);
          }
        }
        last_success[ui] = slot;
        bool done;
        if (rank_based) {
          CodedPacket pkt;
          pkt.coefficients = coeffs;
          decoders[ui].ingest(pkt);
          done = decoders[ui].decoded();
        } else {
          done = received[ui] >= req_;
        }
        if (done) {
          out.completion[ui] = slot;
          --remaining;
        }
      }
    }
    out.delay = slot;
    out.end_state = process_.state();
    return out;
  }

 private:
  const SimConfig& cfg_;
  ChannelProcess process_;
  long req_;
  std::optional<GfField> field_;
  Rng coding_rng_;
};

// ---------------------------------------------------------------------------
// Collapsed engine: exact-in-distribution per-block sampling.

class CollapsedEngine {
 public:
  CollapsedEngine(const SimConfig& cfg)
      : cfg_(cfg), req_(model_receptions_required(cfg.model)) {
    const bool shared = std::holds_alternative<PerfectlyDependent>(cfg.regime);
    const long streams = shared ? 1 : cfg.n;
    streams_.reserve(static_cast<std::size_t>(streams));
    for (long i = 0; i < streams; ++i) {
      streams_.push_back(
          make_stream(cfg.seed, static_cast<std::uint64_t>(i)));
    }
    start_on_.assign(static_cast<std::size_t>(cfg.n), 1);
  }

  void reset_all_on() {
    std::fill(start_on_.begin(), start_on_.end(), std::uint8_t{1});
  }

  BlockOutcome run_block() {
    BlockOutcome out;
    const long n = cfg_.n;
    out.completion.assign(static_cast<std::size_t>(n), 0);
    out.end_state.on.assign(static_cast<std::size_t>(n), 0);

    if (const auto* dep = std::get_if<PerfectlyDependent>(&cfg_.regime)) {
      const long y = sample_negbin_slots(streams_[0], req_, dep->p);
      std::fill(out.completion.begin(), out.completion.end(), y);
      // The shared channel is ON in the completion slot.
      std::fill(out.end_state.on.begin(), out.end_state.on.end(),
                std::uint8_t{1});
      out.delay = y;
      return out;
    }

    long t_max = 0;
    if (const auto* corr = std::get_if<Correlated>(&cfg_.regime)) {
      for (long i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        out.completion[ui] =
            sample_correlated_completion(streams_[ui], start_on_[ui] != 0,
                                         corr->params);
        t_max = std::max(t_max, out.completion[ui]);
      }
      finish_correlated(out, t_max, corr->params);
    } else {
      // Invariant or Asymmetric: Y_i is negative binomial.
      for (long i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        out.completion[ui] =
            sample_negbin_slots(streams_[ui], req_, erasure_of(i));
        t_max = std::max(t_max, out.completion[ui]);
      }
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (long i = 0; i < n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        // One draw per user per block unconditionally, so a user's stream
        // position never depends on the other users (keeps runs with
        // different n coupled under a common seed).
        const bool on = unif(streams_[ui]) >= erasure_of(i);
        out.end_state.on[ui] = (out.completion[ui] == t_max || on) ? 1 : 0;
        start_on_[ui] = out.end_state.on[ui];
      }
    }
    out.delay = t_max;
    return out;
  }

 private:
  double erasure_of(long i) const {
    if (const auto* inv = std::get_if<Invariant>(&cfg_.regime)) return inv->p;
    return std::get<Asymmetric>(cfg_.regime).p[static_cast<std::size_t>(i)];
  }

  // Slot index of the req-th success when each slot succeeds w.p. 1-p.
  static long sample_negbin_slots(Rng& rng, long req, double p) {
    if (p <= 0.0) return req;
    std::negative_binomial_distribution<long> failures(req, 1.0 - p);
    return req + failures(rng);
  }

  // Y = X_1 + (X_2 + ... + X_req) with the gap sum collapsed to one
  // binomial draw (how many gaps leave the ON state) plus one negative
  // binomial draw (the total OFF dwell across those gaps).
  // OFF dwell slots beyond the first; degenerate at beta = 1.
  static long sample_off_dwell(Rng& rng, long gaps, double beta) {
    if (gaps <= 0) return 0;
    if (beta >= 1.0) return gaps;
    std::negative_binomial_distribution<long> extra(gaps, beta);
    return gaps + extra(rng);
  }

  long sample_correlated_completion(Rng& rng, bool start_on,
                                    const ChannelParams& cp) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    long first;
    if (start_on) {
      first = unif(rng) < 1.0 - cp.alpha
                  ? 1
                  : 1 + sample_off_dwell(rng, 1, cp.beta);
    } else {
      first = sample_off_dwell(rng, 1, cp.beta);
    }
    long rest = req_ - 1;
    if (rest > 0) {
      std::binomial_distribution<long> drops(rest, cp.alpha);
      rest += sample_off_dwell(rng, drops(rng), cp.beta);
    }
    return first + rest;
  }

  // End-of-block state: every user is ON at its own completion slot; the
  // remaining delta slots are bridged by the two-state chain's delta-step
  // transition probability.
  void finish_correlated(BlockOutcome& out, long t_max,
                         const ChannelParams& cp) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double pi_on = cp.beta / (cp.alpha + cp.beta);
    const double decay = 1.0 - cp.alpha - cp.beta;
    for (std::size_t ui = 0; ui < out.completion.size(); ++ui) {
      const long delta = t_max - out.completion[ui];
      if (delta == 0) {
        out.end_state.on[ui] = 1;
      } else {
        const double p_on =
            pi_on + (1.0 - pi_on) * std::pow(decay, static_cast<double>(delta));
        out.end_state.on[ui] = unif(streams_[ui]) < p_on ? 1 : 0;
      }
      start_on_[ui] = out.end_state.on[ui];
    }
  }

  const SimConfig& cfg_;
  long req_;
  std::vector<Rng> streams_;
  std::vector<std::uint8_t> start_on_;
};

bool collapsed_supported(const SimConfig& cfg) {
  if (cfg.record_gaps) return false;
  if (std::holds_alternative<RankBased>(cfg.model)) return false;
  if (std::holds_alternative<CustomJoint>(cfg.regime)) return false;
  return true;
}

}  // namespace

SessionReport run_session(const SimConfig& cfg, const BlockObserver& observer) {
  if (cfg.n < 1) throw std::invalid_argument("user count must be >= 1");
  if (cfg.budget < 1) throw std::invalid_argument("block budget must be >= 1");
  if (cfg.warmup_limit < 0) {
    throw std::invalid_argument("warm-up limit must be >= 0");
  }
  validate_regime(cfg.regime);

  bool use_collapsed;
  switch (cfg.engine) {
    case Engine::Slot:
      use_collapsed = false;
      break;
    case Engine::Collapsed:
      if (!collapsed_supported(cfg)) {
        throw std::invalid_argument(
            "collapsed engine cannot serve this configuration (rank-based "
            "decoding, gap recording, or a custom joint regime)");
      }
      use_collapsed = true;
      break;
    case Engine::Auto:
    default:
      use_collapsed = collapsed_supported(cfg);
      break;
  }

  const long k = model_block_size(cfg.model);
  const long req = model_receptions_required(cfg.model);
  const auto* lt = std::get_if<LtThreshold>(&cfg.model);

  SessionReport rep;
  rep.n = cfg.n;
  rep.k = k;
  rep.receptions_required = req;
  rep.capacity = regime_capacity(cfg.regime);
  rep.engine_used = use_collapsed ? "collapsed" : "slot";

  std::optional<SlotEngine> slot;
  std::optional<CollapsedEngine> collapsed;
  if (use_collapsed) {
    collapsed.emplace(cfg);
  } else {
    slot.emplace(cfg);
  }
  auto next_block = [&]() {
    if (cfg.reset_all_on) {
      if (collapsed) collapsed->reset_all_on();
      else slot->reset_all_on();
    }
    return collapsed ? collapsed->run_block() : slot->run_block();
  };

  const bool track_renewal =
      regime_is_correlated(cfg.regime) && !cfg.reset_all_on;

  // Warm-up: discard the first cycle up to the first all-ON return. For
  // large n such returns can be astronomically rare, so the search is capped
  // and skipped warm-up is reported rather than fatal.
  rep.warmup_renewal_found = true;
  if (track_renewal && cfg.warmup_limit > 0) {
    rep.warmup_renewal_found = false;
    for (long b = 0; b < cfg.warmup_limit; ++b) {
      const BlockOutcome out = next_block();
      ++rep.warmup_blocks;
      if (out.end_state.all_on()) {
        rep.warmup_renewal_found = true;
        break;
      }
    }
  }

  std::vector<Rng> decode_streams;
  std::vector<long> lt_decoded;
  if (lt) {
    decode_streams.reserve(static_cast<std::size_t>(cfg.n));
    for (long i = 0; i < cfg.n; ++i) {
      decode_streams.push_back(make_stream(
          cfg.seed, kDecodeStreamBase + static_cast<std::uint64_t>(i)));
    }
    lt_decoded.assign(static_cast<std::size_t>(cfg.n), 0);
  }

  rep.delays.reserve(static_cast<std::size_t>(cfg.budget));
  long cycle_blocks = 0;
  long cycle_length = 0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (long b = 0; b < cfg.budget; ++b) {
    const BlockOutcome out = next_block();
    rep.total_slots += out.delay;
    rep.delays.push_back(static_cast<double>(out.delay));
    if (lt) {
      for (long i = 0; i < cfg.n; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        if (unif(decode_streams[ui]) >= lt->delta) ++lt_decoded[ui];
      }
    }
    if (track_renewal) {
      ++cycle_blocks;
      cycle_length += out.delay;
      if (out.end_state.all_on()) {
        ++rep.renewal.cycles;
        rep.renewal.total_cycle_blocks += cycle_blocks;
        rep.renewal.total_cycle_length += cycle_length;
        cycle_blocks = 0;
        cycle_length = 0;
      }
    }
    if (observer) observer(out);
  }
  rep.blocks = cfg.budget;
  rep.renewal_tracked = track_renewal;
  if (track_renewal && rep.renewal.cycles > 0) {
    rep.renewal.mean_blocks =
        static_cast<double>(rep.renewal.total_cycle_blocks) /
        static_cast<double>(rep.renewal.cycles);
    rep.renewal.mean_length =
        static_cast<double>(rep.renewal.total_cycle_length) /
        static_cast<double>(rep.renewal.cycles);
    rep.renewal.renewal_throughput = static_cast<double>(k) *
                                     rep.renewal.mean_blocks /
                                     rep.renewal.mean_length;
  }

  double mean = 0.0;
  for (double d : rep.delays) mean += d;
  mean /= static_cast<double>(rep.delays.size());
  double ss = 0.0;
  for (double d : rep.delays) ss += (d - mean) * (d - mean);
  rep.delay_mean = mean;
  rep.delay_variance = rep.delays.size() > 1
                           ? ss / (static_cast<double>(rep.delays.size()) - 1.0)
                           : 0.0;

  if (lt) {
    long decoded = 0;
    for (long c : lt_decoded) decoded += c;
    rep.lt_decode_fraction =
        static_cast<double>(decoded) /
        (static_cast<double>(cfg.n) * static_cast<double>(cfg.budget));
    rep.throughput = static_cast<double>(decoded) * static_cast<double>(k) /
                     (static_cast<double>(cfg.n) *
                      static_cast<double>(rep.total_slots));
  } else {
    rep.throughput = static_cast<double>(k) *
                     static_cast<double>(rep.blocks) /
                     static_cast<double>(rep.total_slots);
  }
  if (std::holds_alternative<Invariant>(cfg.regime) &&
      std::holds_alternative<Idealized>(cfg.model)) {
    rep.consistency_throughput = static_cast<double>(k) / rep.delay_mean;
  }

  rep.rep_throughputs = {rep.throughput};
  rep.rep_delay_means = {rep.delay_mean};
  return rep;
}

SessionReport replicate(const SimConfig& cfg, long reps, int workers) {
  if (reps < 1) throw std::invalid_argument("replication count must be >= 1");
  if (workers < 1) workers = 1;
  if (reps == 1) return run_session(cfg);

  std::vector<SessionReport> results(static_cast<std::size_t>(reps));
  std::atomic<long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long r = next.fetch_add(1);
      if (r >= reps) return;
      SimConfig local = cfg;
      local.seed = replication_seed(cfg.seed, r);
      results[static_cast<std::size_t>(r)] = run_session(local);
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) {
      futs.push_back(std::async(std::launch::async, worker));
    }
    for (auto& f : futs) f.get();
  }

  SessionReport agg = results.front();
  agg.delays.clear();
  agg.rep_throughputs.clear();
  agg.rep_delay_means.clear();
  agg.blocks = 0;
  agg.total_slots = 0;
  agg.warmup_blocks = 0;
  agg.renewal = RenewalSummary{};
  double lt_fraction = 0.0;
  for (const auto& r : results) {
    agg.blocks += r.blocks;
    agg.total_slots += r.total_slots;
    agg.warmup_blocks += r.warmup_blocks;
    agg.warmup_renewal_found =
        agg.warmup_renewal_found && r.warmup_renewal_found;
    agg.delays.insert(agg.delays.end(), r.delays.begin(), r.delays.end());
    agg.rep_throughputs.push_back(r.throughput);
    agg.rep_delay_means.push_back(r.delay_mean);
    agg.renewal.cycles += r.renewal.cycles;
    agg.renewal.total_cycle_blocks += r.renewal.total_cycle_blocks;
    agg.renewal.total_cycle_length += r.renewal.total_cycle_length;
    if (!std::isnan(r.lt_decode_fraction)) {
      lt_fraction += r.lt_decode_fraction;
    }
  }
  agg.replications = reps;

  // Equal per-replication weights: every replication runs the same budget.
  double tmean = 0.0;
  for (double t : agg.rep_throughputs) tmean += t;
  tmean /= static_cast<double>(reps);
  agg.throughput = tmean;

  double dmean = 0.0;
  for (double d : agg.delays) dmean += d;
  dmean /= static_cast<double>(agg.delays.size());
  double dss = 0.0;
  for (double d : agg.delays) dss += (d - dmean) * (d - dmean);
  agg.delay_mean = dmean;
  agg.delay_variance = dss / (static_cast<double>(agg.delays.size()) - 1.0);

  auto halfwidth = [&](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    s /= static_cast<double>(v.size()) - 1.0;
    return 1.959963985 * std::sqrt(s / static_cast<double>(v.size()));
  };
  agg.throughput_ci = halfwidth(agg.rep_throughputs);
  agg.delay_ci = halfwidth(agg.rep_delay_means);

  if (agg.renewal_tracked && agg.renewal.cycles > 0) {
    agg.renewal.mean_blocks =
        static_cast<double>(agg.renewal.total_cycle_blocks) /
        static_cast<double>(agg.renewal.cycles);
    agg.renewal.mean_length =
        static_cast<double>(agg.renewal.total_cycle_length) /
        static_cast<double>(agg.renewal.cycles);
    agg.renewal.renewal_throughput = static_cast<double>(agg.k) *
                                     agg.renewal.mean_blocks /
                                     agg.renewal.mean_length;
  }
  if (!std::isnan(results.front().lt_decode_fraction)) {
    agg.lt_decode_fraction = lt_fraction / static_cast<double>(reps);
  }
  if (!std::isnan(agg.consistency_throughput)) {
    agg.consistency_throughput = static_cast<double>(agg.k) / agg.delay_mean;
  }
  return agg;
}

}  // namespace rlncsim
