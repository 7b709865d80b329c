#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rlncsim/cli.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.push_back("rlncsim");
  for (const auto& a : args) argv.push_back(a.c_str());
  return rlncsim::cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path test_dir() {
  const fs::path d = fs::temp_directory_path() / "rlncsim_cli_tests";
  fs::create_directories(d);
  return d;
}

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = test_dir() / name;
  std::ofstream f(p, std::ios::binary);
  f << content;
  return p;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config file parsing") {
  SUBCASE("comments, blanks, and whitespace") {
    const fs::path p = write_file("parse_ok.conf",
                                  "# leading comment\n"
                                  "\n"
                                  "  regime = invariant  # trailing\n"
                                  "p=0.5\n"
                                  "n   =   3\n");
    const auto cfg = rlncsim::cli::load_config(p.string());
    CHECK(cfg.at("regime").value == "invariant");
    CHECK(cfg.at("p").value == "0.5");
    CHECK(cfg.at("n").value == "3");
    CHECK(cfg.at("n").line == 5);
  }

  SUBCASE("unknown key carries its line number") {
    const fs::path p =
        write_file("parse_unknown.conf", "regime = invariant\nbogus = 1\n");
    try {
      rlncsim::cli::load_config(p.string());
      FAIL("expected ConfigError");
    } catch (const rlncsim::cli::ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find(":2:") != std::string::npos);
      CHECK(msg.find("bogus") != std::string::npos);
    }
  }

  SUBCASE("duplicate and malformed lines rejected") {
    CHECK_THROWS_AS(rlncsim::cli::load_config(
                        write_file("dup.conf", "n = 1\nn = 2\n").string()),
                    rlncsim::cli::ConfigError);
    CHECK_THROWS_AS(rlncsim::cli::load_config(
                        write_file("noeq.conf", "just words\n").string()),
                    rlncsim::cli::ConfigError);
    CHECK_THROWS_AS(rlncsim::cli::load_config("/nonexistent/path.conf"),
                    rlncsim::cli::ConfigError);
  }
}

TEST_CASE("simulate subcommand") {
  const fs::path conf = write_file("sim_min.conf",
                                   "regime = invariant\n"
                                   "p = 0.5\n"
                                   "n = 1\n"
                                   "k = 1\n"
                                   "budget = 20000\n");
  const fs::path out = test_dir() / "sim_min.json";

  SUBCASE("minimal run lands near the capacity") {
    REQUIRE(run_cli({"simulate", "--config", conf.string(), "--seed", "5",
                     "--out", out.string()}) == 0);
    const std::string body = read_file(out);
    CHECK(body.find("\"schema_version\": \"1\"") != std::string::npos);
    // eta ~ 0.5; the JSON carries full precision, so just bracket it
    const auto pos = body.find("\"throughput\": 0.");
    REQUIRE(pos != std::string::npos);
    const double eta = std::stod(body.substr(pos + 15, 18));
    CHECK(eta == doctest::Approx(0.5).epsilon(0.05));
  }

  SUBCASE("byte-identical reruns") {
    const fs::path out2 = test_dir() / "sim_min2.json";
    REQUIRE(run_cli({"simulate", "--config", conf.string(), "--seed", "5",
                     "--out", out.string()}) == 0);
    REQUIRE(run_cli({"simulate", "--config", conf.string(), "--seed", "5",
                     "--out", out2.string()}) == 0);
    CHECK(read_file(out) == read_file(out2));
  }

  SUBCASE("worker count does not change the bytes") {
    const fs::path w1 = test_dir() / "sim_w1.json";
    const fs::path w4 = test_dir() / "sim_w4.json";
    REQUIRE(run_cli({"simulate", "--config", conf.string(), "--seed", "5",
                     "--reps", "6", "--workers", "1", "--out",
                     w1.string()}) == 0);
    REQUIRE(run_cli({"simulate", "--config", conf.string(), "--seed", "5",
                     "--reps", "6", "--workers", "4", "--out",
                     w4.string()}) == 0);
    CHECK(read_file(w1) == read_file(w4));
  }

  SUBCASE("csv format") {
    REQUIRE(run_cli({"simulate", "--config", conf.string(), "--format", "csv",
                     "--out", (test_dir() / "sim.csv").string()}) == 0);
    const std::string body = read_file(test_dir() / "sim.csv");
    CHECK(body.find("n,k,throughput") != std::string::npos);
  }
}

TEST_CASE("exit codes") {
  SUBCASE("config errors exit 2") {
    CHECK(run_cli({"simulate", "--config", "/no/such/file.conf"}) == 2);
    const fs::path bad = write_file("bad_key.conf", "wibble = 3\n");
    CHECK(run_cli({"simulate", "--config", bad.string()}) == 2);
    const fs::path missing =
        write_file("missing_n.conf", "regime = invariant\np = 0.5\nk = 1\n");
    CHECK(run_cli({"simulate", "--config", missing.string()}) == 2);
    const fs::path badfmt = write_file("fmt.conf",
                                       "regime = invariant\np = 0.5\n"
                                       "n = 1\nk = 1\n");
    CHECK(run_cli({"simulate", "--config", badfmt.string(), "--format",
                   "xml"}) == 2);
  }

  SUBCASE("domain errors exit 3") {
    const fs::path p_high = write_file(
        "p_high.conf", "regime = invariant\np = 1.2\nn = 1\nk = 1\n");
    CHECK(run_cli({"simulate", "--config", p_high.string()}) == 3);
    const fs::path a_zero = write_file(
        "a_zero.conf",
        "regime = correlated\nalpha = 0\nbeta = 0.5\nn = 2\nk = 1\n");
    CHECK(run_cli({"simulate", "--config", a_zero.string()}) == 3);
  }

  SUBCASE("missing subcommand or flags exit 2") {
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"simulate"}) == 2);
  }
}

TEST_CASE("analyze subcommand") {
  SUBCASE("per-cell domain notes keep the row") {
    const fs::path conf = write_file(
        "an_alt.conf",
        "regime = correlated\nalpha = 1\nbeta = 1\nn = 4\nk = 3\n");
    const fs::path out = test_dir() / "an_alt.csv";
    REQUIRE(run_cli({"analyze", "--config", conf.string(), "--out",
                     out.string()}) == 0);
    const std::string body = read_file(out);
    // the aperiodicity hypothesis is named in the notes
    CHECK(body.find("alpha + beta != 2") != std::string::npos);
    CHECK(body.find("4,3,") != std::string::npos);
  }

  SUBCASE("invariant row carries the frozen approximation value") {
    const fs::path conf = write_file(
        "an_evt.conf", "regime = invariant\np = 0.1\nn = 1000\nk = 100\n");
    const fs::path out = test_dir() / "an_evt.csv";
    REQUIRE(run_cli({"analyze", "--config", conf.string(), "--out",
                     out.string()}) == 0);
    CHECK(read_file(out).find("124.71") != std::string::npos);
  }

  SUBCASE("matches the committed golden file") {
    const fs::path conf = write_file("an_gold.conf",
                                     "regime = invariant\n"
                                     "p = 0.1\n"
                                     "n_list = 100, 1000\n"
                                     "k_list = 150\n");
    const fs::path out = test_dir() / "an_gold.csv";
    REQUIRE(run_cli({"analyze", "--config", conf.string(), "--out",
                     out.string()}) == 0);
    const fs::path golden =
        fs::path(__FILE__).parent_path() / "golden" / "analyze_invariant.csv";
    CHECK(read_file(out) == read_file(golden));
  }
}

TEST_CASE("sweep subcommand") {
  const fs::path conf = write_file("sweep.conf",
                                   "regime = invariant\n"
                                   "p = 0.1\n"
                                   "n_list = 50, 100, 200\n"
                                   "k_rule = ln:10\n"
                                   "reps = 3\n"
                                   "budget = 40\n"
                                   "engine = collapsed\n");

  SUBCASE("deterministic across worker counts") {
    const fs::path w1 = test_dir() / "sweep_w1.csv";
    const fs::path w3 = test_dir() / "sweep_w3.csv";
    REQUIRE(run_cli({"sweep", "--config", conf.string(), "--seed", "11",
                     "--workers", "1", "--out", w1.string()}) == 0);
    REQUIRE(run_cli({"sweep", "--config", conf.string(), "--seed", "11",
                     "--workers", "3", "--out", w3.string()}) == 0);
    const std::string body = read_file(w1);
    CHECK(body == read_file(w3));
    CHECK(body.find("# schema_version=1 seed=11") != std::string::npos);
    // three data rows
    CHECK(std::count(body.begin(), body.end(), '\n') == 5);
  }

  SUBCASE("rows reproducible in isolation via simulate") {
    const fs::path out = test_dir() / "sweep_rep.csv";
    REQUIRE(run_cli({"sweep", "--config", conf.string(), "--seed", "11",
                     "--out", out.string()}) == 0);
    // pull (n, k, seed, eta) from the first data row
    std::istringstream is(read_file(out));
    std::string line;
    std::getline(is, line);  // header comment
    std::getline(is, line);  // column names
    std::getline(is, line);
    std::istringstream row(line);
    std::string n, k, seed, eta;
    std::getline(row, n, ',');
    std::getline(row, k, ',');
    std::getline(row, seed, ',');
    std::getline(row, eta, ',');

    const fs::path iso = write_file("sweep_iso.conf",
                                    "regime = invariant\np = 0.1\n"
                                    "n = " + n + "\nk = " + k +
                                        "\nreps = 3\nbudget = 40\n"
                                        "engine = collapsed\n");
    const fs::path iso_out = test_dir() / "sweep_iso.json";
    REQUIRE(run_cli({"simulate", "--config", iso.string(), "--seed", seed,
                     "--out", iso_out.string()}) == 0);
    const std::string body = read_file(iso_out);
    const auto pos = body.find("\"throughput\": ");
    REQUIRE(pos != std::string::npos);
    const double eta_iso = std::stod(body.substr(pos + 14, 20));
    CHECK(eta_iso == doctest::Approx(std::stod(eta)).epsilon(1e-9));
  }

  SUBCASE("k rules") {
    const fs::path tbl = write_file("sweep_tbl.conf",
                                    "regime = invariant\np = 0.1\n"
                                    "n_list = 10, 20\n"
                                    "k_rule = table:10=4,20=9\n"
                                    "reps = 2\nbudget = 20\n");
    const fs::path out = test_dir() / "sweep_tbl.csv";
    REQUIRE(run_cli({"sweep", "--config", tbl.string(), "--out",
                     out.string()}) == 0);
    const std::string body = read_file(out);
    CHECK(body.find("\n10,4,") != std::string::npos);
    CHECK(body.find("\n20,9,") != std::string::npos);

    const fs::path miss = write_file("sweep_tbl_miss.conf",
                                     "regime = invariant\np = 0.1\n"
                                     "n_list = 10, 30\n"
                                     "k_rule = table:10=4\n");
    CHECK(run_cli({"sweep", "--config", miss.string()}) == 2);

    const fs::path dec = write_file("sweep_dec.conf",
                                    "regime = invariant\np = 0.1\n"
                                    "n_list = 20, 10\nk_rule = n\n");
    CHECK(run_cli({"sweep", "--config", dec.string()}) == 2);
  }

  SUBCASE("correlated sweep flags budget-starved renewal cycles") {
    const fs::path corr = write_file("sweep_corr.conf",
                                     "regime = correlated\n"
                                     "alpha = 0.3\nbeta = 0.3\n"
                                     "n_list = 200\n"
                                     "k_rule = constant:5\n"
                                     "reps = 2\nbudget = 20\n"
                                     "engine = collapsed\n");
    const fs::path out = test_dir() / "sweep_corr.csv";
    REQUIRE(run_cli({"sweep", "--config", corr.string(), "--out",
                     out.string()}) == 0);
    const std::string body = read_file(out);
    CHECK(body.find("no_renewal_cycle") != std::string::npos);
    CHECK(body.find("warmup_skipped") != std::string::npos);
  }
}

TEST_CASE("example1 subcommand") {
  const fs::path out = test_dir() / "example1.csv";
  REQUIRE(run_cli({"example1", "--out", out.string()}) == 0);
  std::istringstream is(read_file(out));
  std::string line;
  std::getline(is, line);
  CHECK(line.find("p=0.5") != std::string::npos);
  std::getline(is, line);
  CHECK(line == "s,r_k10,r_k100");
  // both curves are nondecreasing in s
  double prev10 = -1.0, prev100 = -1.0;
  long rows = 0;
  while (std::getline(is, line)) {
    std::istringstream row(line);
    std::string s, r10, r100;
    std::getline(row, s, ',');
    std::getline(row, r10, ',');
    std::getline(row, r100, ',');
    CHECK(std::stod(r10) >= prev10 - 1e-12);
    CHECK(std::stod(r100) >= prev100 - 1e-12);
    prev10 = std::stod(r10);
    prev100 = std::stod(r100);
    ++rows;
  }
  CHECK(rows == 101);
  CHECK(prev100 > 0.99);
}
