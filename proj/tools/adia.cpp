// Command-line front end: adia run | table | spectrum.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adia/errors.hpp"
#include "adia/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Overrides {
  std::optional<std::string> config;
  std::vector<std::pair<std::string, std::optional<std::string>>> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config, "key = value configuration file");
    values = {{"strategy", {}},   {"delta", {}}, {"total_time", {}}, {"n", {}},
              {"dt", {}},         {"seed", {}},  {"out_dir", {}},    {"spectrum_levels", {}},
              {"spectrum_grid", {}}};
    auto opt = [&](const std::string& flag, std::size_t k, const std::string& help) {
      app.add_option(flag, values[k].second, help);
    };
    opt("--strategy", 0, "sa | sa+ah | sa+cd | oi | oi+ah | oi+cd | oi+ah+cd");
    opt("--delta", 1, "anisotropy of the target XXZ ring");
    opt("--total-time", 2, "protocol duration T in 1/J");
    opt("--sites", 3, "ring size n");
    opt("--dt", 4, "RK4 step upper bound");
    opt("--seed", 5, "optimizer seed");
    opt("--out", 6, "output root directory (default $ADIA_OUT_DIR, else ./out)");
    opt("--spectrum-levels", 7, "lowest levels kept in spectrum output (0 = all)");
    opt("--spectrum-grid", 8, "grid points in s for spectrum output");
  }

  adia::ExperimentConfig resolve() const {
    adia::ExperimentConfig cfg;
    if (const char* env = std::getenv("ADIA_OUT_DIR"); env && *env) cfg.out_dir = env;
    if (config) adia::load_config(*config, cfg);
    for (const auto& [key, value] : values)
      if (value) {
        try {
          cfg.set(key, *value);
        } catch (const adia::ConfigError& e) {
          throw adia::ConfigError("command line: " + std::string(e.what()));
        }
      }
    cfg.validate();
    return cfg;
  }
};

void print_summary(const adia::RunSummary& s) {
  adia::write_summary_csv(std::cout, {s});
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adiabatic ground-state preparation of the XXZ ring"};
  app.set_version_flag("--version", std::string(ADIA_VERSION));
  app.require_subcommand(1);

  Overrides run_opts, table_opts, spectrum_opts;
  CLI::App* run = app.add_subcommand("run", "optimize (if the strategy needs it), propagate and write all artifacts");
  CLI::App* table = app.add_subcommand("table", "all strategies at T = 1, 3, 10 for one delta");
  CLI::App* spectrum = app.add_subcommand("spectrum", "instantaneous spectrum of the strategy's interpolation");
  run_opts.attach(*run);
  table_opts.attach(*table);
  spectrum_opts.attach(*spectrum);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (run->parsed()) {
      const adia::OutputBundle b = adia::run(run_opts.resolve());
      print_summary(b.summary);
      std::cerr << "wrote " << b.directory.string() << "\n";
    } else if (table->parsed()) {
      const adia::TableResult t = adia::reproduce_table(table_opts.resolve());
      std::cout << t.formatted;
      std::cerr << "wrote " << t.csv.string() << "\n";
      for (const auto& c : t.cells)
        if (!c.summary) return kNumerical;
    } else if (spectrum->parsed()) {
      std::cout << adia::emit_spectrum(spectrum_opts.resolve()).string() << "\n";
    }
  } catch (const adia::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const adia::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const adia::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
