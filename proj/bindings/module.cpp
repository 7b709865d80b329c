// Python bindings for the closed forms, bounds, and the simulator driver.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>

#include "rlncsim/analytics.hpp"
#include "rlncsim/sim.hpp"
#include "rlncsim/stats.hpp"

namespace py = pybind11;
using namespace rlncsim;

namespace {

ChannelRegime regime_from_args(const std::string& regime, double p,
                               double alpha, double beta,
                               const std::vector<double>& p_list) {
  if (regime == "invariant") return Invariant{p};
  if (regime == "correlated") return Correlated{ChannelParams(alpha, beta)};
  if (regime == "dependent") return PerfectlyDependent{p};
  if (regime == "asymmetric") return Asymmetric{p_list};
  throw std::invalid_argument("unknown regime: " + regime);
}

DecodeModel model_from_args(const std::string& model, long k, unsigned q,
                            double delta, double c) {
  if (model == "idealized") return Idealized{k};
  if (model == "rank") return RankBased{k, q};
  if (model == "lt") return LtThreshold{k, delta, c};
  throw std::invalid_argument("unknown model: " + model);
}

py::dict report_to_dict(const SessionReport& r) {
  py::dict d;
  d["n"] = r.n;
  d["k"] = r.k;
  d["receptions_required"] = r.receptions_required;
  d["capacity"] = r.capacity;
  d["engine"] = r.engine_used;
  d["replications"] = r.replications;
  d["blocks"] = r.blocks;
  d["total_slots"] = r.total_slots;
  d["throughput"] = r.throughput;
  d["throughput_ci95"] = r.throughput_ci;
  d["delay_mean"] = r.delay_mean;
  d["delay_variance"] = r.delay_variance;
  d["delay_ci95"] = r.delay_ci;
  d["delays"] = r.delays;
  d["rep_throughputs"] = r.rep_throughputs;
  d["consistency_throughput"] = r.consistency_throughput;
  d["lt_decode_fraction"] = r.lt_decode_fraction;
  d["renewal_tracked"] = r.renewal_tracked;
  if (r.renewal_tracked) {
    py::dict ren;
    ren["cycles"] = r.renewal.cycles;
    ren["mean_blocks"] = r.renewal.mean_blocks;
    ren["mean_length"] = r.renewal.mean_length;
    ren["renewal_throughput"] = r.renewal.renewal_throughput;
    d["renewal"] = ren;
    d["warmup_blocks"] = r.warmup_blocks;
    d["warmup_renewal_found"] = r.warmup_renewal_found;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_rlncsim, m) {
  m.doc() =
      "Random linear network coding broadcast: simulator and closed-form "
      "analytics";

  // channel closed forms
  m.def(
      "steady_state_erasure",
      [](double alpha, double beta) {
        return steady_state_erasure(ChannelParams(alpha, beta));
      },
      py::arg("alpha"), py::arg("beta"));
  m.def(
      "inter_success_pmf_from_on",
      [](double alpha, double beta, long u) {
        return inter_success_pmf_from_on(ChannelParams(alpha, beta), u);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("u"));
  m.def(
      "inter_success_mgf",
      [](double alpha, double beta, double tau, const std::string& start) {
        return inter_success_mgf(ChannelParams(alpha, beta), tau,
                                 start == "off" ? StartState::Off
                                                : StartState::On);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("tau"),
      py::arg("start") = "on");
  m.def(
      "inter_success_mean",
      [](double alpha, double beta, const std::string& start) {
        return inter_success_mean(ChannelParams(alpha, beta),
                                  start == "off" ? StartState::Off
                                                 : StartState::On);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("start") = "on");

  // coding
  m.def("full_rank_probability", &full_rank_probability, py::arg("k"),
        py::arg("d"));
  m.def("lt_threshold", &lt_threshold, py::arg("k"), py::arg("delta"),
        py::arg("c") = 0.1);

  // delay analytics
  m.def("negbin_pmf", &negbin_pmf, py::arg("t"), py::arg("k"), py::arg("p"));
  m.def("negbin_cdf", &negbin_cdf, py::arg("t"), py::arg("k"), py::arg("p"));
  m.def("negbin_quantile", &negbin_quantile, py::arg("level"), py::arg("k"),
        py::arg("p"));
  m.def("exact_mean_delay", &exact_mean_delay_invariant, py::arg("n"),
        py::arg("k"), py::arg("p"), py::arg("tol") = 1e-9);
  m.def("fraction_decoded", &fraction_decoded, py::arg("t"), py::arg("k"),
        py::arg("p"));
  m.def("fraction_decoded_normalized", &fraction_decoded_normalized,
        py::arg("s"), py::arg("k"), py::arg("p"));
  m.def(
      "evt_moments",
      [](long n, double k, double alpha, double beta) {
        const EvtMoments e = evt_moments(n, k, alpha, beta);
        py::dict d;
        d["mean"] = e.mean;
        d["variance"] = e.variance;
        d["a_n"] = e.a_n;
        d["b_n"] = e.b_n;
        return d;
      },
      py::arg("n"), py::arg("k"), py::arg("alpha"), py::arg("beta"));
  m.def(
      "gumbel_norming",
      [](long n, const std::string& mode, double p) {
        return gumbel_norming(
            n, mode == "fixed_k" ? NormingMode::FixedK : NormingMode::ScaledK,
            p);
      },
      py::arg("n"), py::arg("mode") = "scaled_k", py::arg("p") = 0.0);

  // throughput bounds
  m.def("throughput_upper_bound", &throughput_upper_bound, py::arg("n"),
        py::arg("k"), py::arg("alpha"), py::arg("beta"));
  m.def(
      "throughput_lower_bound",
      [](long n, double f, double alpha, double beta, double tau0_frac,
         double b_frac) {
        const auto consts = BoundConstants::defaults(
            n, f, ChannelParams(alpha, beta), tau0_frac, b_frac);
        const LowerBoundResult r =
            throughput_lower_bound(n, f, alpha, beta, consts);
        py::dict d;
        d["bound"] = r.bound;
        d["r_n"] = r.r_n;
        d["phi_n"] = r.phi_n;
        d["limit_ratio"] = r.limit_ratio;
        d["implied_r"] = r.implied_r;
        return d;
      },
      py::arg("n"), py::arg("f"), py::arg("alpha"), py::arg("beta"),
      py::arg("tau0_frac") = 0.5, py::arg("b_frac") = 0.5);
  m.def(
      "max_gap_bounds",
      [](long n, double f, double alpha, double beta) {
        const auto consts =
            BoundConstants::defaults(n, f, ChannelParams(alpha, beta));
        return max_gap_bounds(n, consts, alpha, beta);
      },
      py::arg("n"), py::arg("f"), py::arg("alpha"), py::arg("beta"));
  m.def(
      "dependent_bound_functions",
      [](long n, double f, double p, double b) {
        if (b <= 0.0) b = dependent_bound_default_b(f, p);
        const DependentBounds r = dependent_bound_functions(n, f, p, b);
        py::dict d;
        d["g"] = r.g;
        d["h"] = r.h;
        return d;
      },
      py::arg("n"), py::arg("f"), py::arg("p"), py::arg("b") = 0.0);
  m.def("lt_throughput_bounds", &lt_throughput_bounds, py::arg("n"),
        py::arg("k"), py::arg("delta"), py::arg("c"), py::arg("alpha"),
        py::arg("beta"));

  // statistics helpers
  m.def("ks_against_gumbel", &ks_against_gumbel, py::arg("rescaled"));
  m.def("gumbel_quantile", &gumbel_quantile, py::arg("u"));

  // simulation
  m.def(
      "simulate",
      [](long n, long k, const std::string& regime, const std::string& model,
         double p, double alpha, double beta, const std::vector<double>& p_list,
         unsigned q, double delta, double c, std::uint64_t seed, long budget,
         long reps, int workers, bool record_gaps, bool reset_all_on,
         const std::string& engine) {
        SimConfig cfg;
        cfg.n = n;
        cfg.regime = regime_from_args(regime, p, alpha, beta, p_list);
        cfg.model = model_from_args(model, k, q, delta, c);
        cfg.seed = seed;
        cfg.budget = budget;
        cfg.record_gaps = record_gaps;
        cfg.reset_all_on = reset_all_on;
        cfg.engine = engine == "slot"        ? Engine::Slot
                     : engine == "collapsed" ? Engine::Collapsed
                                             : Engine::Auto;
        return report_to_dict(replicate(cfg, reps, workers));
      },
      py::arg("n"), py::arg("k"), py::arg("regime") = "invariant",
      py::arg("model") = "idealized", py::arg("p") = 0.5,
      py::arg("alpha") = 0.0, py::arg("beta") = 0.0,
      py::arg("p_list") = std::vector<double>{}, py::arg("q") = 8u,
      py::arg("delta") = 0.1, py::arg("c") = 0.1, py::arg("seed") = 1,
      py::arg("budget") = 200, py::arg("reps") = 1, py::arg("workers") = 1,
      py::arg("record_gaps") = false, py::arg("reset_all_on") = false,
      py::arg("engine") = "auto");
}
