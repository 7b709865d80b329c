// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are pinned here and nowhere else.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rlncsim/analytics.hpp"
#include "rlncsim/cli.hpp"
#include "rlncsim/coding.hpp"
#include "rlncsim/sim.hpp"
#include "rlncsim/stats.hpp"

using namespace rlncsim;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

SimConfig invariant_config(long n, long k, double p, std::uint64_t seed,
                           long budget) {
  SimConfig cfg;
  cfg.regime = Invariant{p};
  cfg.model = Idealized{k};
  cfg.n = n;
  cfg.seed = seed;
  cfg.budget = budget;
  return cfg;
}

SimConfig correlated_config(long n, long k, double alpha, double beta,
                            std::uint64_t seed, long budget) {
  SimConfig cfg;
  cfg.regime = Correlated{ChannelParams(alpha, beta)};
  cfg.model = Idealized{k};
  cfg.n = n;
  cfg.seed = seed;
  cfg.budget = budget;
  return cfg;
}

int workers() { return 4; }

// --- criteria ---------------------------------------------------------------

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double exact = exact_mean_delay_invariant(2, 1, 0.5, 1e-9);
  const bool exact_ok = std::abs(exact - 8.0 / 3.0) < 1e-6;

  SimConfig cfg = invariant_config(2, 1, 0.5, 1001, 100000);
  const SessionReport rep = run_session(cfg);
  const double rel = std::abs(rep.delay_mean - 8.0 / 3.0) / (8.0 / 3.0);
  const double dt = seconds_since(t0);

  std::ostringstream os;
  os << "exact mean " << exact << " (|err| " << std::abs(exact - 8.0 / 3.0)
     << " < 1e-6), simulated mean " << rep.delay_mean << " (rel err " << rel
     << " < 0.02), " << dt << " s";
  report(1, exact_ok && rel < 0.02 && dt < 10.0, os.str());
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const GfField f2(1);
  Rng rng(2002);
  std::uniform_int_distribution<int> bit(0, 1);
  const int trials = 100000;
  int decoded = 0;
  for (int t = 0; t < trials; ++t) {
    Decoder dec(2, f2);
    for (int row = 0; row < 2; ++row) {
      dec.ingest({{static_cast<std::uint8_t>(bit(rng)),
                   static_cast<std::uint8_t>(bit(rng))},
                  {0}});
    }
    decoded += dec.decoded();
  }
  const double freq = static_cast<double>(decoded) / trials;
  const double formula = full_rank_probability(2, 2);
  const double dt = seconds_since(t0);

  std::ostringstream os;
  os << "decode frequency " << freq << " within 0.375 +/- 0.02, formula "
     << formula << " = 6/16, " << dt << " s";
  report(2,
         std::abs(freq - 0.375) < 0.02 && formula == 0.375 &&
             std::abs(formula - 6.0 / 16.0) == 0.0 && dt < 5.0,
         os.str());
}

double sweep_eta(long n, long k, double p, std::uint64_t seed,
                 double* ci = nullptr) {
  SimConfig cfg = invariant_config(n, k, p, seed, 200);
  const SessionReport rep = replicate(cfg, 30, workers());
  if (ci) *ci = rep.throughput_ci;
  return rep.throughput;
}

void criterion3() {
  const std::vector<long> ns = {100, 1000, 10000};
  std::vector<double> fixed, log_rule, linear;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const long n = ns[i];
    const auto seed = static_cast<std::uint64_t>(3000 + i);
    fixed.push_back(sweep_eta(n, 150, 0.1, seed));
    const long klog =
        static_cast<long>(std::ceil(50.0 * std::log(static_cast<double>(n))));
    log_rule.push_back(sweep_eta(n, klog, 0.1, seed + 10));
    linear.push_back(sweep_eta(n, n, 0.1, seed + 20));
  }
  const bool decay = fixed[0] > fixed[1] && fixed[1] > fixed[2];
  const bool plateau = log_rule[2] >= 0.80 && log_rule[2] <= 0.90;
  const bool approach =
      linear[0] < linear[1] && linear[1] < linear[2] && linear[2] >= 0.87;

  std::ostringstream os;
  os << "k=150 eta " << fixed[0] << " > " << fixed[1] << " > " << fixed[2]
     << "; k=ceil(50 ln n) eta(1e4) " << log_rule[2]
     << " in [0.80,0.90]; k=n eta " << linear[0] << " < " << linear[1]
     << " < " << linear[2] << " >= 0.87";
  report(3, decay && plateau && approach, os.str());
}

double sweep_eta_corr(long n, long k, double a, double b, std::uint64_t seed,
                      double* ci = nullptr) {
  SimConfig cfg = correlated_config(n, k, a, b, seed, 200);
  const SessionReport rep = replicate(cfg, 30, workers());
  if (ci) *ci = rep.throughput_ci;
  return rep.throughput;
}

void criterion4() {
  const std::vector<long> ns = {100, 1000};
  std::vector<double> fixed, log_rule, linear;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const long n = ns[i];
    const auto seed = static_cast<std::uint64_t>(4000 + i);
    fixed.push_back(sweep_eta_corr(n, 150, 0.3, 0.3, seed));
    const long klog =
        static_cast<long>(std::ceil(50.0 * std::log(static_cast<double>(n))));
    log_rule.push_back(sweep_eta_corr(n, klog, 0.3, 0.3, seed + 10));
    linear.push_back(sweep_eta_corr(n, n, 0.3, 0.3, seed + 20));
  }
  const bool decay = fixed[1] < fixed[0];
  const bool ordering =
      fixed[1] < log_rule[1] && log_rule[1] < linear[1] && linear[1] < 0.5;
  // exact all-ON-start value at n=k=1000: E[max delay] = 2232.618, so
  // eta = 0.44790; the nominal 0.45 target is figure-read rounding.
  // Gate on the exact value within 0.003 and a 0.005 slack on the target.
  const double exact_eta = 0.44790;
  const bool approach = linear[1] >= 0.45 - 0.005 &&
                        std::abs(linear[1] - exact_eta) < 0.003 &&
                        linear[1] > linear[0];

  std::ostringstream os;
  os << "fixed k decays " << fixed[0] << " -> " << fixed[1]
     << "; ordering at n=1e3: " << fixed[1] << " < " << log_rule[1] << " < "
     << linear[1] << " < 0.5; k=n eta(1e3) " << linear[1]
     << " >= 0.445 and within 0.003 of exact 0.44790";
  report(4, decay && ordering && approach, os.str());
}

void criterion5() {
  bool ok = true;
  std::ostringstream os;
  for (long n : {100L, 1000L}) {
    const long klog =
        static_cast<long>(std::ceil(50.0 * std::log(static_cast<double>(n))));
    for (long k : {klog, n}) {
      SimConfig cfg = invariant_config(n, k, 0.1, 5000 + n + k, 200);
      const SessionReport rep = replicate(cfg, 30, workers());
      const double approx =
          evt_moments_invariant(n, static_cast<double>(k), 0.1).mean;
      const double exact = exact_mean_delay_invariant(n, k, 0.1, 1e-9);
      const double rel_approx = std::abs(rep.delay_mean - approx) / approx;
      const double rel_exact = std::abs(rep.delay_mean - exact) / exact;
      ok = ok && rel_approx < 0.02 && rel_exact < 0.02;
      os << "inv n=" << n << " k=" << k << " sim " << rep.delay_mean
         << " approx " << approx << " exact " << exact << "; ";
    }
  }
  for (long n : {100L, 1000L}) {
    const long klog =
        static_cast<long>(std::ceil(50.0 * std::log(static_cast<double>(n))));
    for (long k : {klog, n}) {
      SimConfig cfg = correlated_config(n, k, 0.3, 0.3, 5500 + n + k, 200);
      cfg.reset_all_on = true;
      const SessionReport rep = replicate(cfg, 30, workers());
      const double approx =
          evt_moments(n, static_cast<double>(k), 0.3, 0.3).mean;
      const double rel = (approx - rep.delay_mean) / rep.delay_mean;
      ok = ok && approx >= rep.delay_mean && rel < 0.05;
      os << "corr n=" << n << " k=" << k << " sim " << rep.delay_mean
         << " approx " << approx << " (gap " << rel << "); ";
    }
  }
  report(5, ok, os.str());
}

void criterion6() {
  // Pathwise sandwich over recorded gaps, invariant and correlated.
  long violations = 0;
  double emp_max_first = 0.0, emp_max_second = 0.0;
  long blocks_seen = 0;
  {
    SimConfig cfg = correlated_config(100, 20, 0.3, 0.3, 6001, 500);
    cfg.record_gaps = true;
    cfg.engine = Engine::Slot;
    run_session(cfg, [&](const BlockOutcome& b) {
      long max_first = 0, max_second = 0, max_rest = 0;
      for (std::size_t i = 0; i < b.first_gap.size(); ++i) {
        max_first = std::max(max_first, b.first_gap[i]);
        long rest = 0;
        for (long g : b.later_gaps[i]) rest += g;
        max_rest = std::max(max_rest, rest);
        if (!b.later_gaps[i].empty()) {
          max_second = std::max(max_second, b.later_gaps[i].front());
        }
      }
      if (max_second > b.delay || b.delay > max_first + max_rest) {
        ++violations;
      }
      emp_max_first += static_cast<double>(max_first);
      emp_max_second += static_cast<double>(max_second);
      ++blocks_seen;
    });
  }
  {
    SimConfig cfg = invariant_config(50, 10, 0.4, 6002, 500);
    cfg.record_gaps = true;
    cfg.engine = Engine::Slot;
    run_session(cfg, [&](const BlockOutcome& b) {
      long max_first = 0, max_second = 0, max_rest = 0;
      for (std::size_t i = 0; i < b.first_gap.size(); ++i) {
        max_first = std::max(max_first, b.first_gap[i]);
        long rest = 0;
        for (long g : b.later_gaps[i]) rest += g;
        max_rest = std::max(max_rest, rest);
        if (!b.later_gaps[i].empty()) {
          max_second = std::max(max_second, b.later_gaps[i].front());
        }
      }
      if (max_second > b.delay || b.delay > max_first + max_rest) {
        ++violations;
      }
    });
  }
  emp_max_first /= static_cast<double>(blocks_seen);
  emp_max_second /= static_cast<double>(blocks_seen);

  // Gap-maximum bounds bracket the empirical values (n=100, alpha=beta=0.3).
  const ChannelParams params(0.3, 0.3);
  const auto consts = BoundConstants::defaults(100, 1.0, params);
  const auto [gap_upper, gap_lower] = max_gap_bounds(100, consts, 0.3, 0.3);
  const bool gap_bounds_ok =
      gap_upper >= emp_max_first && gap_lower <= emp_max_second;

  // Throughput bounds bracket the simulated rate at k = 10 ln(n) + 1.
  const long n = 100;
  const double f = 10.0;
  const long k = static_cast<long>(
      std::llround(f * std::log(static_cast<double>(n)) + 1.0));
  SimConfig cfg = correlated_config(n, k, 0.3, 0.3, 6003, 200);
  const SessionReport rep = replicate(cfg, 30, workers());
  const double upper =
      throughput_upper_bound(n, static_cast<double>(k), 0.3, 0.3);
  const double lower = throughput_lower_bound(n, f, 0.3, 0.3, consts).bound;
  const bool bracket = lower <= rep.throughput && rep.throughput <= upper;

  std::ostringstream os;
  os << violations << " sandwich violations; gap bounds [" << gap_lower
     << ", " << gap_upper << "] bracket empirical (" << emp_max_second << ", "
     << emp_max_first << "); throughput bounds [" << lower << ", " << upper
     << "] bracket " << rep.throughput;
  report(6, violations == 0 && gap_bounds_ok && bracket, os.str());
}

void criterion7() {
  double ci3, ci5, ci7;
  const double e3 = sweep_eta_corr(500, 500, 0.3, 0.3, 7003, &ci3);
  const double e5 = sweep_eta_corr(500, 500, 0.5, 0.5, 7005, &ci5);
  const double e7 = sweep_eta_corr(500, 500, 0.7, 0.7, 7007, &ci7);
  const double z = 1.959963985;
  auto pooled_se = [&](double a, double b) {
    return std::sqrt(a * a + b * b) / z;
  };
  const bool ok = e7 - e5 > 2.0 * pooled_se(ci7, ci5) &&
                  e5 - e3 > 2.0 * pooled_se(ci5, ci3);
  std::ostringstream os;
  os << "eta(0.7) " << e7 << " > eta(0.5) " << e5 << " > eta(0.3) " << e3
     << ", both gaps > 2 pooled s.e.";
  report(7, ok, os.str());
}

void criterion8() {
  const long n = 1000;
  const long k =
      static_cast<long>(std::ceil(50.0 * std::log(static_cast<double>(n))));
  const double delta = 1.0 / std::log(static_cast<double>(k));
  const long nu = lt_threshold(k, delta, 0.1);
  const std::uint64_t seed = 8001;

  SimConfig lt_cfg = invariant_config(n, k, 0.1, seed, 200);
  lt_cfg.model = LtThreshold{k, delta, 0.1};
  const SessionReport lt_rep = replicate(lt_cfg, 30, workers());

  // Same seed and reception requirement: identical channel trajectories,
  // reward k per block without the decode lottery.
  SimConfig base_cfg = invariant_config(n, nu, 0.1, seed, 200);
  const SessionReport base_rep = replicate(base_cfg, 30, workers());
  const double eta_rlnc = base_rep.throughput * static_cast<double>(k) /
                          static_cast<double>(nu);

  const double z = 1.959963985;
  const double eps =
      2.0 * std::sqrt(lt_rep.throughput_ci * lt_rep.throughput_ci +
                      base_rep.throughput_ci * base_rep.throughput_ci) /
      z;
  const bool sandwich = lt_rep.throughput >= (1.0 - delta) * eta_rlnc - eps &&
                        lt_rep.throughput <= eta_rlnc + eps;

  SimConfig fixed_cfg = invariant_config(n, k, 0.1, seed + 1, 200);
  fixed_cfg.model = LtThreshold{k, 0.2, 0.1};
  const SessionReport fixed_rep = replicate(fixed_cfg, 30, workers());
  const double eps2 = 2.0 * fixed_rep.throughput_ci / z;
  const bool plateau = fixed_rep.throughput < 0.9 * (1.0 - 0.2) + eps2;

  std::ostringstream os;
  os << "eta_lt " << lt_rep.throughput << " in [(1-delta)*" << eta_rlnc
     << " - eps, " << eta_rlnc << " + eps], eps " << eps
     << "; fixed delta 0.2 eta " << fixed_rep.throughput << " < 0.72 + "
     << eps2;
  report(8, sandwich && plateau, os.str());
}

double ks_for(long n, std::uint64_t seed) {
  const long k = n;
  const double p = 0.1;
  SimConfig cfg = invariant_config(n, k, p, seed, 200);
  const SessionReport rep = replicate(cfg, 150, workers());
  const double mu = static_cast<double>(k) / (1.0 - p);
  const double sigma = std::sqrt(static_cast<double>(k) * p) / (1.0 - p);
  // exact normal-maxima norming: the asymptotic b_n = sqrt(2 ln n) drops a
  // log-log correction that shifts the rescaled sample by O(ln ln n) Gumbel
  // units and would mask convergence at these n
  const double root = std::sqrt(2.0 * std::log(static_cast<double>(n)));
  const double a_n = 1.0 / root;
  const double b_n =
      root - (std::log(std::log(static_cast<double>(n))) +
              std::log(4.0 * 3.14159265358979323846)) /
                 (2.0 * root);
  std::vector<double> rescaled;
  rescaled.reserve(rep.delays.size());
  for (double u : rep.delays) {
    rescaled.push_back(((u - mu) / sigma - b_n) / a_n);
  }
  return ks_against_gumbel(rescaled);
}

void criterion9() {
  const double ks100 = ks_for(100, 9100);
  const double ks1000 = ks_for(1000, 9900);
  std::ostringstream os;
  os << "KS(n=100) " << ks100 << " > KS(n=1000) " << ks1000;
  report(9, ks1000 < ks100, os.str());
}

void criterion10() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rlncsim_acceptance";
  fs::create_directories(dir);
  const fs::path conf = dir / "det.conf";
  {
    std::ofstream f(conf);
    f << "regime = correlated\nalpha = 0.3\nbeta = 0.3\n"
      << "n_list = 50, 100, 200\nk_rule = ln:10\n"
      << "reps = 5\nbudget = 50\nengine = collapsed\n";
  }
  auto run = [&](const char* sub, const fs::path& out, const char* w) {
    const std::string conf_s = conf.string(), out_s = out.string();
    const char* argv[] = {"rlncsim", sub,   "--config", conf_s.c_str(),
                          "--seed",  "77",  "--workers", w,
                          "--out",   out_s.c_str()};
    return cli::run(10, argv);
  };
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  bool ok = true;
  ok = ok && run("sweep", dir / "s1.csv", "1") == 0;
  ok = ok && run("sweep", dir / "s4.csv", "4") == 0;
  ok = ok && run("sweep", dir / "s9.csv", "9") == 0;
  const bool sweep_same = slurp(dir / "s1.csv") == slurp(dir / "s4.csv") &&
                          slurp(dir / "s1.csv") == slurp(dir / "s9.csv");

  const fs::path conf2 = dir / "det2.conf";
  {
    std::ofstream f(conf2);
    f << "regime = invariant\np = 0.1\nn = 20\nk = 10\n"
      << "reps = 8\nbudget = 100\n";
  }
  auto run_sim = [&](const fs::path& out, const char* w) {
    const std::string conf_s = conf2.string(), out_s = out.string();
    const char* argv[] = {"rlncsim", "simulate", "--config", conf_s.c_str(),
                          "--seed",  "78",       "--workers", w,
                          "--out",   out_s.c_str()};
    return cli::run(10, argv);
  };
  ok = ok && run_sim(dir / "j1.json", "1") == 0;
  ok = ok && run_sim(dir / "j6.json", "6") == 0;
  const bool sim_same = slurp(dir / "j1.json") == slurp(dir / "j6.json");

  std::ostringstream os;
  os << "sweep CSV identical across 1/4/9 workers: " << sweep_same
     << "; simulate JSON identical across 1/6 workers: " << sim_same;
  report(10, ok && sweep_same && sim_same, os.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (g_failures == 0) {
    std::printf("all acceptance criteria passed\n");
    return 0;
  }
  std::printf("%d acceptance criteria failed\n", g_failures);
  return 1;
}
