#include "rlncsim/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rlncsim/analytics.hpp"
#include "rlncsim/sim.hpp"
#include "rlncsim/stats.hpp"

namespace rlncsim::cli {

namespace {

constexpr const char* kSchemaVersion = "1";

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// --- config access ---------------------------------------------------------

const std::set<std::string> kKnownKeys = {
    "regime",     "p",          "alpha",      "beta",        "p_list",
    "n",          "n_list",     "k",          "k_list",      "k_rule",
    "model",      "q",          "delta",      "delta_rule",  "lt_c",
    "seed",       "budget",     "warmup_limit", "reps",      "workers",
    "engine",     "record_gaps", "reset_all_on", "tol",
    "s_max",      "s_step"};

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool has(const Config& cfg, const std::string& key) {
  return cfg.find(key) != cfg.end();
}

std::string where(const Config& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end() || it->second.line == 0) return key;
  return key + " (line " + std::to_string(it->second.line) + ")";
}

std::string get_string(const Config& cfg, const std::string& key,
                       const std::string& fallback) {
  const auto it = cfg.find(key);
  return it == cfg.end() ? fallback : it->second.value;
}

std::string require_string(const Config& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) throw ConfigError("missing required key: " + key);
  return it->second.value;
}

double parse_double(const Config& cfg, const std::string& key,
                    const std::string& raw) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(raw, &pos);
    if (pos != raw.size()) throw std::invalid_argument(raw);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for " + where(cfg, key) + ": '" +
                      raw + "'");
  }
}

double get_double(const Config& cfg, const std::string& key, double fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  return parse_double(cfg, key, it->second.value);
}

double require_double(const Config& cfg, const std::string& key) {
  return parse_double(cfg, key, require_string(cfg, key));
}

long get_long(const Config& cfg, const std::string& key, long fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const long v = std::stol(it->second.value, &pos);
    if (pos != it->second.value.size()) {
      throw std::invalid_argument(it->second.value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + where(cfg, key) + ": '" +
                      it->second.value + "'");
  }
}

long require_long(const Config& cfg, const std::string& key) {
  if (!has(cfg, key)) throw ConfigError("missing required key: " + key);
  return get_long(cfg, key, 0);
}

std::uint64_t get_u64(const Config& cfg, const std::string& key,
                      std::uint64_t fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(it->second.value, &pos);
    if (pos != it->second.value.size()) {
      throw std::invalid_argument(it->second.value);
    }
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for " + where(cfg, key) + ": '" +
                      it->second.value + "'");
  }
}

bool get_bool(const Config& cfg, const std::string& key, bool fallback) {
  const auto it = cfg.find(key);
  if (it == cfg.end()) return fallback;
  const std::string& v = it->second.value;
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad boolean value for " + where(cfg, key) + ": '" + v +
                    "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

std::vector<double> get_double_list(const Config& cfg,
                                    const std::string& key) {
  std::vector<double> out;
  for (const auto& item : split(require_string(cfg, key), ',')) {
    out.push_back(parse_double(cfg, key, item));
  }
  if (out.empty()) throw ConfigError(where(cfg, key) + " is empty");
  return out;
}

std::vector<long> get_long_list(const Config& cfg, const std::string& key) {
  std::vector<long> out;
  for (double v : get_double_list(cfg, key)) {
    out.push_back(static_cast<long>(std::llround(v)));
  }
  return out;
}

// --- model/regime construction ---------------------------------------------

ChannelRegime build_regime(const Config& cfg, long n) {
  const std::string name = get_string(cfg, "regime", "invariant");
  try {
    if (name == "invariant") return Invariant{require_double(cfg, "p")};
    if (name == "correlated") {
      return Correlated{ChannelParams(require_double(cfg, "alpha"),
                                      require_double(cfg, "beta"))};
    }
    if (name == "dependent") {
      return PerfectlyDependent{require_double(cfg, "p")};
    }
    if (name == "asymmetric") {
      auto p = get_double_list(cfg, "p_list");
      if (static_cast<long>(p.size()) == 1 && n > 1) {
        p.assign(static_cast<std::size_t>(n), p.front());
      }
      return Asymmetric{std::move(p)};
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw std::domain_error(std::string("invalid channel parameters: ") +
                            e.what());
  }
  throw ConfigError("unknown regime '" + name +
                    "' (expected invariant|correlated|dependent|asymmetric)");
}

DecodeModel build_model(const Config& cfg, long k) {
  const std::string name = get_string(cfg, "model", "idealized");
  if (name == "idealized") return Idealized{k};
  if (name == "rank") {
    const long q = get_long(cfg, "q", 8);
    if (q < 1 || q > 8) throw std::domain_error("field exponent q must be 1..8");
    return RankBased{k, static_cast<unsigned>(q)};
  }
  if (name == "lt") {
    const std::string rule = get_string(cfg, "delta_rule", "fixed");
    double delta;
    if (rule == "inv_ln_k") {
      delta = 1.0 / std::log(static_cast<double>(k));
    } else if (rule == "fixed") {
      delta = require_double(cfg, "delta");
    } else {
      throw ConfigError("unknown delta_rule '" + rule +
                        "' (expected fixed|inv_ln_k)");
    }
    return LtThreshold{k, delta, get_double(cfg, "lt_c", 0.1)};
  }
  throw ConfigError("unknown model '" + name +
                    "' (expected idealized|rank|lt)");
}

Engine build_engine(const Config& cfg) {
  const std::string name = get_string(cfg, "engine", "auto");
  if (name == "auto") return Engine::Auto;
  if (name == "slot") return Engine::Slot;
  if (name == "collapsed") return Engine::Collapsed;
  throw ConfigError("unknown engine '" + name +
                    "' (expected auto|slot|collapsed)");
}

SimConfig build_sim_config(const Config& cfg, long n, long k) {
  SimConfig sim;
  sim.n = n;
  sim.regime = build_regime(cfg, n);
  sim.model = build_model(cfg, k);
  sim.seed = get_u64(cfg, "seed", 1);
  sim.budget = get_long(cfg, "budget", 200);
  sim.warmup_limit = get_long(cfg, "warmup_limit", 50);
  sim.record_gaps = get_bool(cfg, "record_gaps", false);
  sim.reset_all_on = get_bool(cfg, "reset_all_on", false);
  sim.engine = build_engine(cfg);
  if (const auto* asym = std::get_if<Asymmetric>(&sim.regime)) {
    if (static_cast<long>(asym->p.size()) != n) {
      throw ConfigError("p_list length does not match n");
    }
  }
  return sim;
}

struct ChannelScalars {
  double alpha, beta, p;
  bool correlated;
};

ChannelScalars regime_scalars(const Config& cfg) {
  const std::string name = get_string(cfg, "regime", "invariant");
  if (name == "correlated") {
    const double a = require_double(cfg, "alpha");
    const double b = require_double(cfg, "beta");
    return {a, b, a / (a + b), true};
  }
  const double p = require_double(cfg, "p");
  return {p, 1.0 - p, p, false};
}

// --- output plumbing ---------------------------------------------------------

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + out_path);
  f << content;
}

nlohmann::ordered_json report_to_json(const SessionReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n;
  j["k"] = r.k;
  j["receptions_required"] = r.receptions_required;
  j["capacity"] = r.capacity;
  j["engine"] = r.engine_used;
  j["replications"] = r.replications;
  j["blocks"] = r.blocks;
  j["total_slots"] = r.total_slots;
  j["throughput"] = r.throughput;
  j["throughput_ci95"] = r.throughput_ci;
  j["delay_mean"] = r.delay_mean;
  j["delay_variance"] = r.delay_variance;
  j["delay_ci95"] = r.delay_ci;
  if (!std::isnan(r.consistency_throughput)) {
    j["consistency_throughput"] = r.consistency_throughput;
  }
  if (!std::isnan(r.lt_decode_fraction)) {
    j["lt_decode_fraction"] = r.lt_decode_fraction;
  }
  if (r.renewal_tracked) {
    nlohmann::ordered_json ren;
    ren["cycles"] = r.renewal.cycles;
    if (r.renewal.cycles > 0) {
      ren["mean_blocks"] = r.renewal.mean_blocks;
      ren["mean_length"] = r.renewal.mean_length;
      ren["renewal_throughput"] = r.renewal.renewal_throughput;
    }
    ren["warmup_blocks"] = r.warmup_blocks;
    ren["warmup_renewal_found"] = r.warmup_renewal_found;
    j["renewal"] = ren;
  }
  j["rep_throughputs"] = r.rep_throughputs;
  return j;
}

// --- subcommands -------------------------------------------------------------

int cmd_simulate(const Config& cfg, const std::string& out_path,
                 const std::string& format) {
  const long n = require_long(cfg, "n");
  const long k = require_long(cfg, "k");
  const long reps = get_long(cfg, "reps", 1);
  const int workers = static_cast<int>(get_long(cfg, "workers", 1));
  const SimConfig sim = build_sim_config(cfg, n, k);
  const SessionReport rep = replicate(sim, reps, workers);

  if (format == "json") {
    nlohmann::ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "simulate";
    nlohmann::ordered_json c;
    c["regime"] = get_string(cfg, "regime", "invariant");
    c["model"] = get_string(cfg, "model", "idealized");
    c["n"] = n;
    c["k"] = k;
    c["seed"] = get_u64(cfg, "seed", 1);
    c["budget"] = get_long(cfg, "budget", 200);
    c["reps"] = reps;
    j["config"] = c;
    j["report"] = report_to_json(rep);
    write_output(out_path, j.dump(2) + "\n");
  } else {
    std::ostringstream os;
    os << "# schema_version=" << kSchemaVersion
       << " seed=" << get_u64(cfg, "seed", 1) << "\n";
    os << "n,k,throughput,throughput_ci95,delay_mean,delay_ci95,"
          "delay_variance,blocks,total_slots\n";
    os << rep.n << ',' << rep.k << ',' << fmt(rep.throughput) << ','
       << fmt(rep.throughput_ci) << ',' << fmt(rep.delay_mean) << ','
       << fmt(rep.delay_ci) << ',' << fmt(rep.delay_variance) << ','
       << rep.blocks << ',' << rep.total_slots << "\n";
    write_output(out_path, os.str());
  }
  return 0;
}

// A cell that may be empty when the requested formula is out of its domain.
struct Cell {
  std::string value;
  std::string note;
};

template <typename F>
Cell eval_cell(const std::string& name, F&& f) {
  try {
    return {fmt(f()), ""};
  } catch (const std::exception& e) {
    return {"", name + ": " + e.what()};
  }
}

int cmd_analyze(const Config& cfg, const std::string& out_path) {
  const auto ch = regime_scalars(cfg);
  std::vector<long> ns = has(cfg, "n_list") ? get_long_list(cfg, "n_list")
                                            : std::vector<long>{
                                                  require_long(cfg, "n")};
  std::vector<long> ks = has(cfg, "k_list") ? get_long_list(cfg, "k_list")
                                            : std::vector<long>{
                                                  require_long(cfg, "k")};
  const double tol = get_double(cfg, "tol", 1e-9);

  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << " regime="
     << get_string(cfg, "regime", "invariant") << " alpha=" << fmt(ch.alpha)
     << " beta=" << fmt(ch.beta) << "\n";
  os << "n,k,exact_mean,exact_mean_src,evt_mean,evt_mean_src,evt_variance,"
        "evt_variance_src,gumbel_a,gumbel_b,gumbel_src,fixed_a,fixed_b,"
        "fixed_src,eta_upper,eta_upper_src,eta_lower,eta_lower_src,"
        "gap_max_upper,gap_max_lower,gap_src,notes\n";
  for (long n : ns) {
    for (long k : ks) {
      std::vector<std::string> notes;
      auto push = [&](const Cell& c) {
        if (!c.note.empty()) notes.push_back(c.note);
        return c.value;
      };
      const double kd = static_cast<double>(k);
      const Cell exact = eval_cell("exact_mean", [&] {
        if (ch.correlated) {
          throw std::domain_error("closed form holds for invariant channels");
        }
        return exact_mean_delay_invariant(n, k, ch.p, tol);
      });
      const Cell evtm = eval_cell("evt_mean", [&] {
        return evt_moments(n, kd, ch.alpha, ch.beta).mean;
      });
      const Cell evtv = eval_cell("evt_variance", [&] {
        return evt_moments(n, kd, ch.alpha, ch.beta).variance;
      });
      const Cell ga = eval_cell("gumbel_norming", [&] {
        return gumbel_norming(n, NormingMode::ScaledK).first;
      });
      const Cell gb = eval_cell("gumbel_norming", [&] {
        return gumbel_norming(n, NormingMode::ScaledK).second;
      });
      const Cell fa = eval_cell("fixed_norming", [&] {
        return gumbel_norming(n, NormingMode::FixedK, ch.p).first;
      });
      const Cell fb = eval_cell("fixed_norming", [&] {
        return gumbel_norming(n, NormingMode::FixedK, ch.p).second;
      });
      const Cell ub = eval_cell("eta_upper", [&] {
        return throughput_upper_bound(n, kd, ch.alpha, ch.beta);
      });
      auto consts = [&] {
        const double f =
            (kd - 1.0) / std::log(static_cast<double>(std::max(n, 2L)));
        return BoundConstants::defaults(n, f,
                                        ChannelParams(ch.alpha, ch.beta));
      };
      const Cell lb = eval_cell("eta_lower", [&] {
        const double f = (kd - 1.0) / std::log(static_cast<double>(n));
        return throughput_lower_bound(n, f, ch.alpha, ch.beta, consts())
            .bound;
      });
      const Cell l1 = eval_cell("gap_max_upper", [&] {
        return max_gap_bounds(n, consts(), ch.alpha, ch.beta).first;
      });
      const Cell l4 = eval_cell("gap_max_lower", [&] {
        return max_gap_bounds(n, consts(), ch.alpha, ch.beta).second;
      });

      os << n << ',' << k << ',' << push(exact) << ",exact," << push(evtm)
         << ",approximation," << push(evtv) << ",approximation," << push(ga)
         << ',' << push(gb) << ",exact," << push(fa) << ',' << push(fb)
         << ",exact," << push(ub) << ",bound," << push(lb) << ",bound,"
         << push(l1) << ',' << push(l4) << ",bound,";
      std::set<std::string> unique(notes.begin(), notes.end());
      std::string joined;
      for (const auto& m : unique) {
        if (!joined.empty()) joined += "; ";
        joined += m;
      }
      os << '"' << joined << '"' << "\n";
    }
  }
  write_output(out_path, os.str());
  return 0;
}

long apply_k_rule(const std::string& rule, long n, const Config& cfg) {
  const auto parts = split(rule, ':');
  const double lnn = std::log(static_cast<double>(n));
  if (parts[0] == "constant") {
    if (parts.size() != 2) throw ConfigError("k_rule constant needs a value");
    return get_long({{ "k_rule", {parts[1], 0} }}, "k_rule", 0);
  }
  if (parts[0] == "ln") {
    if (parts.size() != 2) throw ConfigError("k_rule ln needs a coefficient");
    const double c = parse_double(cfg, "k_rule", parts[1]);
    return static_cast<long>(std::ceil(c * lnn));
  }
  if (parts[0] == "ln2") {
    if (parts.size() != 2) throw ConfigError("k_rule ln2 needs a coefficient");
    const double c = parse_double(cfg, "k_rule", parts[1]);
    return static_cast<long>(std::ceil(c * lnn * lnn));
  }
  if (parts[0] == "n") return n;
  if (parts[0] == "table") {
    if (parts.size() != 2) throw ConfigError("k_rule table needs entries");
    for (const auto& entry : split(parts[1], ',')) {
      const auto kv = split(entry, '=');
      if (kv.size() != 2) throw ConfigError("bad k_rule table entry: " + entry);
      if (std::stol(kv[0]) == n) return std::stol(kv[1]);
    }
    throw ConfigError("k_rule table has no entry for n=" + std::to_string(n));
  }
  throw ConfigError("unknown k_rule '" + rule +
                    "' (expected constant:K|ln:C|ln2:C|n|table:...)");
}

int cmd_sweep(const Config& cfg, const std::string& out_path) {
  const auto ns = get_long_list(cfg, "n_list");
  for (std::size_t i = 1; i < ns.size(); ++i) {
    if (ns[i] <= ns[i - 1]) {
      throw ConfigError("n_list values must be strictly increasing");
    }
  }
  const std::string rule = require_string(cfg, "k_rule");
  const long reps = get_long(cfg, "reps", 30);
  const int workers = static_cast<int>(get_long(cfg, "workers", 1));
  const std::uint64_t master = get_u64(cfg, "seed", 1);
  const auto ch = regime_scalars(cfg);
  const double tol = get_double(cfg, "tol", 1e-9);

  struct Row {
    long n, k;
    std::uint64_t seed;
    SessionReport rep;
    Cell analytic;
    std::string analytic_src;
    Cell upper, lower;
  };
  std::vector<Row> rows(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    rows[i].n = ns[i];
    rows[i].k = apply_k_rule(rule, ns[i], cfg);
    if (rows[i].k < 1) throw ConfigError("k_rule evaluates to k < 1");
    rows[i].seed = substream_seed(master, static_cast<std::uint64_t>(i));
  }

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      Row& row = rows[i];
      Config local = cfg;
      local["seed"] = {std::to_string(row.seed), 0};
      const SimConfig sim = build_sim_config(local, row.n, row.k);
      row.rep = replicate(sim, reps, 1);
      const double kd = static_cast<double>(row.k);
      if (ch.correlated) {
        row.analytic = eval_cell("analytic_mean", [&] {
          return evt_moments(row.n, kd, ch.alpha, ch.beta).mean;
        });
        row.analytic_src = "approximation";
      } else {
        row.analytic = eval_cell("analytic_mean", [&] {
          return exact_mean_delay_invariant(row.n, row.k, ch.p, tol);
        });
        row.analytic_src = "exact";
      }
      row.upper = eval_cell("eta_upper", [&] {
        return throughput_upper_bound(row.n, kd, ch.alpha, ch.beta);
      });
      row.lower = eval_cell("eta_lower", [&] {
        const double f =
            (kd - 1.0) / std::log(static_cast<double>(row.n));
        const auto consts = BoundConstants::defaults(
            row.n, f, ChannelParams(ch.alpha, ch.beta));
        return throughput_lower_bound(row.n, f, ch.alpha, ch.beta, consts)
            .bound;
      });
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::future<void>> futs;
    for (int w = 0; w < workers; ++w) {
      futs.push_back(std::async(std::launch::async, work));
    }
    for (auto& f : futs) f.get();
  }

  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << " seed=" << master
     << " k_rule=" << rule << " reps=" << reps << " budget="
     << get_long(cfg, "budget", 200) << " regime="
     << get_string(cfg, "regime", "invariant") << "\n";
  os << "n,k,seed,eta,eta_ci95,eta_src,delay_mean,delay_ci95,delay_var,"
        "delay_src,analytic_mean,analytic_src,eta_upper,eta_lower,bound_src,"
        "cycles,mean_M,mean_W,renewal_eta,flags\n";
  for (const Row& row : rows) {
    const auto& r = row.rep;
    std::string flags;
    if (r.renewal_tracked && r.renewal.cycles == 0) flags = "no_renewal_cycle";
    if (r.renewal_tracked && !r.warmup_renewal_found) {
      if (!flags.empty()) flags += "|";
      flags += "warmup_skipped";
    }
    os << row.n << ',' << row.k << ',' << row.seed << ',' << fmt(r.throughput)
       << ',' << fmt(r.throughput_ci) << ",simulated," << fmt(r.delay_mean)
       << ',' << fmt(r.delay_ci) << ',' << fmt(r.delay_variance)
       << ",simulated," << row.analytic.value << ',' << row.analytic_src
       << ',' << row.upper.value << ',' << row.lower.value << ",bound,";
    if (r.renewal_tracked && r.renewal.cycles > 0) {
      os << r.renewal.cycles << ',' << fmt(r.renewal.mean_blocks) << ','
         << fmt(r.renewal.mean_length) << ','
         << fmt(r.renewal.renewal_throughput);
    } else {
      os << (r.renewal_tracked ? "0" : "") << ",,,";
    }
    os << ',' << flags << "\n";
  }
  write_output(out_path, os.str());
  return 0;
}

int cmd_example1(const Config& cfg, const std::string& out_path) {
  const double p = get_double(cfg, "p", 0.5);
  std::vector<long> ks = has(cfg, "k_list") ? get_long_list(cfg, "k_list")
                                            : std::vector<long>{10, 100};
  const double s_max = get_double(cfg, "s_max", 2.0);
  const double s_step = get_double(cfg, "s_step", 0.02);
  if (!(s_step > 0.0)) throw ConfigError("s_step must be positive");

  std::ostringstream os;
  os << "# schema_version=" << kSchemaVersion << " p=" << fmt(p) << "\n";
  os << "s";
  for (long k : ks) os << ",r_k" << k;
  os << "\n";
  for (double s = 0.0; s <= s_max + 1e-12; s += s_step) {
    os << fmt(s);
    for (long k : ks) os << ',' << fmt(fraction_decoded_normalized(s, k, p));
    os << "\n";
  }
  write_output(out_path, os.str());
  return 0;
}

}  // namespace

Config load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    if (kKnownKeys.find(key) == kKnownKeys.end()) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
    if (cfg.count(key)) {
      throw ConfigError(path + ":" + std::to_string(lineno) +
                        ": duplicate key '" + key + "'");
    }
    cfg[key] = {value, lineno};
  }
  return cfg;
}

int run(int argc, const char* const* argv) {
  CLI::App app{"RLNC broadcast throughput/delay simulator and analytics"};
  app.require_subcommand(1);

  std::string config_path, out_path, format;
  std::string seed;
  long reps = -1, budget = -1, workers = -1;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* opt = sub->add_option("--config", config_path, "config file path");
    if (config_required) opt->required();
    sub->add_option("--seed", seed, "master seed (overrides config)");
    sub->add_option("--reps", reps, "replication count (overrides config)");
    sub->add_option("--budget", budget, "block budget (overrides config)");
    sub->add_option("--workers", workers, "parallel workers");
    sub->add_option("--out", out_path, "output path (default stdout)");
    sub->add_option("--format", format, "output format: csv or json");
  };

  auto* simulate = app.add_subcommand("simulate", "run one configuration");
  add_common(simulate, true);
  auto* analyze =
      app.add_subcommand("analyze", "closed-form values for (n,k) grids");
  add_common(analyze, true);
  auto* sweep = app.add_subcommand("sweep", "scaling sweeps over n");
  add_common(sweep, true);
  auto* example1 =
      app.add_subcommand("example1", "fraction-decoded curves r'(s)");
  add_common(example1, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    Config cfg =
        config_path.empty() ? Config{} : load_config(config_path);
    if (!seed.empty()) cfg["seed"] = {seed, 0};
    if (reps >= 0) cfg["reps"] = {std::to_string(reps), 0};
    if (budget >= 0) cfg["budget"] = {std::to_string(budget), 0};
    if (workers >= 0) cfg["workers"] = {std::to_string(workers), 0};
    if (!format.empty() && format != "csv" && format != "json") {
      throw ConfigError("unknown format '" + format + "'");
    }

    if (simulate->parsed()) {
      return cmd_simulate(cfg, out_path, format.empty() ? "json" : format);
    }
    if (analyze->parsed()) {
      if (format == "json") throw ConfigError("analyze emits csv only");
      return cmd_analyze(cfg, out_path);
    }
    if (sweep->parsed()) {
      if (format == "json") throw ConfigError("sweep emits csv only");
      return cmd_sweep(cfg, out_path);
    }
    if (format == "json") throw ConfigError("example1 emits csv only");
    return cmd_example1(cfg, out_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace rlncsim::cli
