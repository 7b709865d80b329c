#include "rlncsim/channel.hpp"

#include <cmath>

namespace rlncsim {

double steady_state_erasure(const ChannelParams& params) {
  return params.erasure();
}

double inter_success_pmf_from_on(const ChannelParams& params, long u) {
  if (u < 1) throw std::invalid_argument("gap length must be >= 1");
  if (u == 1) return 1.0 - params.alpha;
  return params.alpha * params.beta *
         std::pow(1.0 - params.beta, static_cast<double>(u - 2));
}

double inter_success_mgf(const ChannelParams& params, double tau,
                         StartState start) {
  const double lambda = params.lambda();
  if (!(tau < lambda)) {
    throw std::domain_error("mgf argument must satisfy tau < -ln(1-beta)");
  }
  const double et = std::exp(tau);
  const double denom = 1.0 - (1.0 - params.beta) * et;
  if (start == StartState::Off) {
    return params.beta * et / denom;
  }
  return (1.0 - params.alpha) * et +
         params.alpha * params.beta * et * et / denom;
}

double inter_success_mean(const ChannelParams& params, StartState start) {
  if (start == StartState::On) return 1.0 + params.alpha / params.beta;
  return 1.0 / params.beta;
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p >= 0.0) || !(p < 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0,1)");
  }
}

}  // namespace

ChannelProcess::ChannelProcess(ChannelRegime regime, long n,
                               std::uint64_t master_seed, bool start_all_on)
    : regime_(std::move(regime)), n_(n) {
  if (n_ < 1) throw std::invalid_argument("user count must be >= 1");
  if (const auto* asym = std::get_if<Asymmetric>(&regime_)) {
    if (static_cast<long>(asym->p.size()) != n_) {
      throw std::invalid_argument(
          "asymmetric regime needs one erasure probability per user");
    }
    for (double p : asym->p) check_probability(p, "per-user erasure");
  } else if (const auto* inv = std::get_if<Invariant>(&regime_)) {
    check_probability(inv->p, "erasure probability");
  } else if (const auto* dep = std::get_if<PerfectlyDependent>(&regime_)) {
    check_probability(dep->p, "erasure probability");
  }

  state_.on.assign(static_cast<std::size_t>(n_),
                   start_all_on ? std::uint8_t{1} : std::uint8_t{0});
  const bool joint = std::holds_alternative<PerfectlyDependent>(regime_) ||
                     std::holds_alternative<CustomJoint>(regime_);
  const long streams = joint ? 1 : n_;
  streams_.reserve(static_cast<std::size_t>(streams));
  for (long i = 0; i < streams; ++i) {
    streams_.push_back(make_stream(master_seed, static_cast<std::uint64_t>(i)));
  }
}

void ChannelProcess::set_state(const ChannelState& s) {
  if (static_cast<long>(s.on.size()) != n_) {
    throw std::invalid_argument("channel state dimension mismatch");
  }
  state_ = s;
}

const ChannelState& ChannelProcess::step() {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  if (const auto* inv = std::get_if<Invariant>(&regime_)) {
    for (long i = 0; i < n_; ++i) {
      state_.on[i] = unif(streams_[i]) >= inv->p ? 1 : 0;
    }
  } else if (const auto* asym = std::get_if<Asymmetric>(&regime_)) {
    for (long i = 0; i < n_; ++i) {
      state_.on[i] = unif(streams_[i]) >= asym->p[i] ? 1 : 0;
    }
  } else if (const auto* corr = std::get_if<Correlated>(&regime_)) {
    const double a = corr->params.alpha;
    const double b = corr->params.beta;
    for (long i = 0; i < n_; ++i) {
      const double u = unif(streams_[i]);
      state_.on[i] = state_.on[i] ? (u >= a ? 1 : 0) : (u < b ? 1 : 0);
    }
  } else if (const auto* dep = std::get_if<PerfectlyDependent>(&regime_)) {
    const std::uint8_t bit = unif(streams_[0]) >= dep->p ? 1 : 0;
    for (long i = 0; i < n_; ++i) state_.on[i] = bit;
  } else {
    std::get<CustomJoint>(regime_).step(state_.on, streams_[0]);
    if (static_cast<long>(state_.on.size()) != n_) {
      throw std::invalid_argument("joint sampler changed the state dimension");
    }
  }
  return state_;
}

}  // namespace rlncsim
