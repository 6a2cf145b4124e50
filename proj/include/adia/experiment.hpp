#pragma once

// Strategy pipelines and their on-disk artifacts.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "adia/config.hpp"
#include "adia/metrics.hpp"

namespace adia {

struct StageReport {
  std::string stage;  // "orientations", "aux_fields", "cd_alpha", "aux_fields+cd_alpha"
  OptimizationReport report;
};

/// The protocol a strategy settles on, with the searches that produced it.
struct PreparedProtocol {
  ProtocolSpec spec;
  bool with_cd = false;
  std::vector<StageReport> stages;
};

/// Runs the strategy's searches: orientations first (static), then aux
/// fields and/or alpha against the final energy.
PreparedProtocol prepare(const ExperimentConfig& cfg);

struct RunOutcome {
  PreparedProtocol prepared;
  EvolutionTrace trace;
  RunSummary summary;
};

/// prepare() followed by a full propagation; writes nothing.
RunOutcome execute(const ExperimentConfig& cfg);

struct OutputBundle {
  RunSummary summary;
  std::filesystem::path directory;
  std::filesystem::path summary_csv;
  std::filesystem::path trace_csv;
  std::filesystem::path spectrum_csv;
  std::filesystem::path report_json;
  std::filesystem::path manifest;
};

/// Directory name of a run below out_dir, e.g. "sa+ah_delta1_T10".
std::string run_label(Strategy s, double delta, double total_time);

/// execute() and write every artifact under out_dir/run_label.
OutputBundle run(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

struct ReferenceValue {
  double n_metric = 0.0;
  double f_ad = 0.0;
};

/// Published two-decimal values for delta in {0.5, 1, 1.5} and T in {1, 3, 10}.
std::optional<ReferenceValue> reference_value(Strategy s, double delta, double total_time);

inline constexpr std::array<double, 3> kTableTimes{1.0, 3.0, 10.0};

struct TableCell {
  Strategy strategy = Strategy::SA;
  double total_time = 0.0;
  std::optional<RunSummary> summary;
  std::optional<ReferenceValue> reference;
  std::string error;
};

struct TableResult {
  double delta = 0.0;
  std::vector<TableCell> cells;  // strategy-major, times ascending
  std::filesystem::path csv;
  std::filesystem::path text;
  std::string formatted;
};

/// All seven strategies at T = 1, 3, 10 for cfg.delta. Each cell is a full
/// run() below out_dir/table_delta<d>/; failed cells are marked and the table
/// is still written.
TableResult reproduce_table(const ExperimentConfig& cfg);

/// Spectrum of the CD-free interpolation of the prepared protocol on
/// spectrum_grid points, lowest spectrum_levels levels (0 keeps all).
SpectrumTrace strategy_spectrum(const ExperimentConfig& cfg, const PreparedProtocol& prepared);
/// prepare() and write out_dir/run_label/spectrum.csv plus a manifest.
std::filesystem::path emit_spectrum(const ExperimentConfig& cfg);

// ---------------------------------------------------------------------------

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows);
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);
/// Header "s,E_0,...,E_{k-1}", one row per grid point.
void write_spectrum_csv(std::ostream& out, const SpectrumTrace& trace);
void write_report_json(std::ostream& out, const PreparedProtocol& prepared);
/// Config echo as key=value lines, readable back with load_config. The
/// timestamp sits alone on one comment line.
void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const std::string& timestamp,
                    const std::vector<std::filesystem::path>& files);

}  // namespace adia
