#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adia/config.hpp"
#include "adia/experiment.hpp"

using namespace adia;
namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::path(ADIA_TEST_TMP) / "cli";

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Result run_cli(const std::string& args, const std::string& env = "") {
  fs::create_directories(kTmp);
  const fs::path out = kTmp / "stdout.txt", err = kTmp / "stderr.txt";
  const std::string cmd = env + " '" + std::string(ADIA_CLI_PATH) + "' " + args + " > '" + out.string() + "' 2> '" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string strip_timestamp(const std::string& manifest) {
  std::stringstream in(manifest), out;
  std::string line;
  while (std::getline(in, line))
    if (line.rfind("# timestamp", 0) != 0) out << line << "\n";
  return out.str();
}

const std::string kSmall = "--sites 4 --total-time 1 --delta 0.5";

}  // namespace

TEST_CASE("strategy tags round-trip") {
  for (Strategy s : kAllStrategies) CHECK(parse_strategy(strategy_tag(s)) == s);
  CHECK(strategy_tag(Strategy::OI_AH_CD) == "oi+ah+cd");
  CHECK(uses_cd(Strategy::SA_CD));
  CHECK_FALSE(uses_aux(Strategy::OI_CD));
  CHECK(uses_orientations(Strategy::OI_AH));
  try {
    parse_strategy("fast");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    for (Strategy s : kAllStrategies) CHECK(msg.find(strategy_tag(s)) != std::string::npos);
  }
}

TEST_CASE("config file parsing and errors") {
  ExperimentConfig cfg;
  std::istringstream in(
      "# comment\n"
      "strategy = oi+cd\n"
      "\n"
      "delta=1.5   # trailing comment\n"
      "  total_time = 3\n"
      "seed = 42\n"
      "dt = 0.0005\n"
      "restarts = 4\n"
      "delta = 0.5\n");
  read_config(in, cfg);
  CHECK(cfg.strategy == Strategy::OI_CD);
  CHECK(cfg.delta == 0.5);
  CHECK(cfg.total_time == 3.0);
  CHECK(cfg.optimizer.seed == 42);
  CHECK(cfg.integration.dt == 5e-4);
  CHECK(cfg.optimizer.restarts == 4);

  auto fails = [](const std::string& text) {
    ExperimentConfig c;
    std::istringstream s(text);
    try {
      read_config(s, c, "test.cfg");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(fails("delta = abc\n").find("test.cfg:1") != std::string::npos);
  CHECK(fails("\nfoo = 1\n").find("test.cfg:2") != std::string::npos);
  CHECK_FALSE(fails("just text\n").empty());
  CHECK_FALSE(fails("n = 2.5\n").empty());
  CHECK_FALSE(fails("delta = nan\n").empty());
  CHECK_FALSE(fails("strategy = xyz\n").empty());

  ExperimentConfig bad;
  bad.total_time = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  CHECK_THROWS_AS(load_config(kTmp / "missing.cfg", bad), IoError);
}

TEST_CASE("config entries reload to the same configuration") {
  ExperimentConfig cfg;
  cfg.set("strategy", "sa+ah");
  cfg.set("delta", "0.123456789012345");
  cfg.set("seed", "7");
  std::stringstream text;
  for (const auto& [k, v] : cfg.entries()) text << k << " = " << v << "\n";
  ExperimentConfig back;
  read_config(text, back);
  CHECK(back.entries() == cfg.entries());
}

TEST_CASE("number formatting") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(-8.0) == "-8");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(123456789.123456789) == "123456789.123");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("exit codes") {
  const Result bad_tag = run_cli("run --strategy bogus --out '" + (kTmp / "x").string() + "'");
  CHECK(bad_tag.code == 2);
  CHECK(bad_tag.err.find("oi+ah+cd") != std::string::npos);

  CHECK(run_cli("run --delta abc").code == 2);
  CHECK(run_cli("run --total-time -3").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("run --config '" + (kTmp / "nope.cfg").string() + "'").code == 4);

  // Output root is a regular file.
  fs::create_directories(kTmp);
  std::ofstream(kTmp / "blocker") << "x";
  CHECK(run_cli("run " + kSmall + " --out '" + (kTmp / "blocker").string() + "'").code == 4);

  // dt too coarse for T: rejected before any work.
  CHECK(run_cli("run --sites 4 --total-time 1 --dt 0.05").code == 2);

  CHECK(run_cli("--help").code == 0);
}

TEST_CASE("run writes consistent, reproducible artifacts") {
  const fs::path root = kTmp / "repro";
  fs::remove_all(root);
  const std::string args = "run " + kSmall + " --strategy sa+cd --seed 3 --spectrum-grid 21 --spectrum-levels 5";
  const Result first = run_cli(args, "ADIA_OUT_DIR='" + root.string() + "'");
  REQUIRE(first.code == 0);
  const fs::path dir = root / run_label(Strategy::SA_CD, 0.5, 1.0);
  REQUIRE(fs::exists(dir / "summary.csv"));
  for (const char* f : {"trace.csv", "spectrum.csv", "optimization.json", "manifest.txt"}) CHECK(fs::exists(dir / f));

  const auto summary = read_csv(dir / "summary.csv");
  REQUIRE(summary.size() == 2);
  CHECK(summary[0] == std::vector<std::string>{"strategy", "delta", "total_time", "n_metric", "f_ad",
                                                "initial_energy", "final_energy", "ground_energy"});
  CHECK(first.out == slurp(dir / "summary.csv"));

  // Both metrics are recomputable from the trace.
  const auto trace = read_csv(dir / "trace.csv");
  CHECK(trace[0] == std::vector<std::string>{"t", "fidelity_to_target", "fidelity_to_instantaneous", "energy"});
  REQUIRE(trace.size() == 1002);
  double integral = 0.0;
  for (std::size_t i = 2; i < trace.size(); ++i)
    integral += 0.5 * (std::stod(trace[i][0]) - std::stod(trace[i - 1][0])) *
                (std::stod(trace[i][2]) + std::stod(trace[i - 1][2]));
  const double t_end = std::stod(trace.back()[0]);
  const double e0 = std::stod(trace[1][3]), e1 = std::stod(trace.back()[3]);
  const double eg = std::stod(summary[1][7]);
  CHECK(std::abs(integral / t_end - std::stod(summary[1][4])) < 1e-6);
  CHECK(std::abs((e0 - e1) / (e0 - eg) - std::stod(summary[1][3])) < 1e-6);

  const auto spectrum = read_csv(dir / "spectrum.csv");
  REQUIRE(spectrum.size() == 22);
  CHECK(spectrum[0] == std::vector<std::string>{"s", "E_0", "E_1", "E_2", "E_3", "E_4"});
  for (const auto& row : spectrum) CHECK(row.size() == 6);
  CHECK(std::stod(spectrum[1][1]) == doctest::Approx(-4.0).epsilon(1e-10));

  const auto report = nlohmann::json::parse(slurp(dir / "optimization.json"));
  CHECK(report.contains("stages"));

  const std::string manifest = slurp(dir / "manifest.txt");
  int stamp_lines = 0;
  std::stringstream ms(manifest);
  for (std::string line; std::getline(ms, line);)
    if (line.find("timestamp") != std::string::npos) ++stamp_lines;
  CHECK(stamp_lines == 1);

  std::map<std::string, std::string> before;
  for (const char* f : {"summary.csv", "trace.csv", "spectrum.csv", "optimization.json"}) before[f] = slurp(dir / f);
  const std::string manifest_before = strip_timestamp(manifest);

  // Rerun from the manifest alone, into a fresh root.
  const fs::path again = kTmp / "repro2";
  fs::remove_all(again);
  const Result second = run_cli("run --config '" + (dir / "manifest.txt").string() + "' --out '" + again.string() + "'");
  REQUIRE(second.code == 0);
  const fs::path dir2 = again / run_label(Strategy::SA_CD, 0.5, 1.0);
  for (const auto& [f, text] : before) {
    CAPTURE(f);
    CHECK(slurp(dir2 / f) == text);
  }
  const std::string m2 = strip_timestamp(slurp(dir2 / "manifest.txt"));
  CHECK(m2.find("n = 4") != std::string::npos);
  CHECK(m2.find("strategy = sa+cd") != std::string::npos);
}

TEST_CASE("flags override the config file") {
  fs::create_directories(kTmp);
  const fs::path cfg = kTmp / "override.cfg";
  std::ofstream(cfg) << "strategy = oi\nn = 4\ntotal_time = 1\ndelta = 1.5\nspectrum_grid = 11\n";
  const fs::path root = kTmp / "override";
  fs::remove_all(root);
  const Result r = run_cli("spectrum --config '" + cfg.string() + "' --delta 0.5 --out '" + root.string() + "'");
  REQUIRE(r.code == 0);
  const fs::path dir = root / run_label(Strategy::OI, 0.5, 1.0);
  CHECK(fs::exists(dir / "spectrum.csv"));
  CHECK(read_csv(dir / "spectrum.csv").size() == 12);
  CHECK_FALSE(fs::exists(root / run_label(Strategy::OI, 1.5, 1.0)));
}

TEST_CASE("table for a delta without published values") {
  ExperimentConfig cfg;
  cfg.n = 3;
  cfg.delta = 2.7;
  cfg.optimizer.restarts = 2;
  cfg.optimizer.max_evals = 20;
  cfg.static_max_evals = 200;
  cfg.spectrum_levels = 4;
  cfg.out_dir = kTmp / "table";
  fs::remove_all(cfg.out_dir);
  const TableResult t = reproduce_table(cfg);
  CHECK(t.cells.size() == 21);
  for (const TableCell& c : t.cells) {
    CHECK(c.summary.has_value());
    CHECK_FALSE(c.reference.has_value());
  }
  CHECK(fs::exists(t.csv));
  CHECK(read_csv(t.csv).size() == 22);
  CHECK(t.formatted.find('[') == std::string::npos);

  CHECK(reference_value(Strategy::SA, 1.0, 10.0)->f_ad == doctest::Approx(0.37));
  CHECK(reference_value(Strategy::OI_CD, 0.5, 1.0)->n_metric == doctest::Approx(0.84));
  CHECK_FALSE(reference_value(Strategy::SA, 2.7, 10.0).has_value());
}
