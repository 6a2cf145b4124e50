#include "adia/experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "adia/errors.hpp"

namespace adia {

namespace fs = std::filesystem;

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  body(out);
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

void make_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

double alpha_bound(const ExperimentConfig& cfg) { return kDefaultAlphaBoundFactor * cfg.epsilon; }

}  // namespace

PreparedProtocol prepare(const ExperimentConfig& cfg) {
  cfg.validate();
  PreparedProtocol out;
  out.spec = cfg.base_spec();
  const Strategy s = cfg.strategy;

  if (uses_orientations(s)) {
    auto r = optimize_initial_orientations(out.spec.xxz, cfg.epsilon, cfg.static_optimizer());
    out.spec.initial = r.field;
    out.stages.push_back({"orientations", std::move(r.report)});
  }
  if (uses_cd(s)) out.spec.cd = CdSettings{0.0, alpha_bound(cfg)};
  out.with_cd = uses_cd(s);

  const IntegrationSettings search = cfg.search_integration();
  if (uses_aux(s) && uses_cd(s)) {
    auto r = optimize_aux_and_alpha(out.spec, cfg.optimizer, search);
    out.spec.aux = r.field;
    out.spec.cd->alpha = r.alpha;
    out.stages.push_back({"aux_fields+cd_alpha", std::move(r.report)});
  } else if (uses_aux(s)) {
    auto r = optimize_aux_fields(out.spec, cfg.optimizer, search);
    out.spec.aux = r.field;
    out.stages.push_back({"aux_fields", std::move(r.report)});
  } else if (uses_cd(s)) {
    auto r = optimize_cd_alpha(out.spec, cfg.optimizer, search);
    out.spec.cd->alpha = r.alpha;
    out.stages.push_back({"cd_alpha", std::move(r.report)});
  }
  return out;
}

RunOutcome execute(const ExperimentConfig& cfg) {
  RunOutcome r;
  r.prepared = prepare(cfg);
  r.trace = propagate(r.prepared.spec, r.prepared.with_cd, cfg.integration);
  r.summary = summarize(r.trace, r.prepared.spec, strategy_tag(cfg.strategy));
  return r;
}

std::string run_label(Strategy s, double delta, double total_time) {
  return strategy_tag(s) + "_delta" + format_number(delta) + "_T" + format_number(total_time);
}

SpectrumTrace strategy_spectrum(const ExperimentConfig& cfg, const PreparedProtocol& prepared) {
  const Protocol p = realize_protocol(prepared.spec);
  return spectrum_trace(p, uniform_grid(cfg.spectrum_grid), cfg.spectrum_levels);
}

OutputBundle run(const ExperimentConfig& cfg) {
  const RunOutcome r = execute(cfg);
  const SpectrumTrace spectrum = strategy_spectrum(cfg, r.prepared);

  OutputBundle b;
  b.summary = r.summary;
  b.directory = cfg.out_dir / run_label(cfg.strategy, cfg.delta, cfg.total_time);
  make_directory(b.directory);
  b.summary_csv = b.directory / "summary.csv";
  b.trace_csv = b.directory / "trace.csv";
  b.spectrum_csv = b.directory / "spectrum.csv";
  b.report_json = b.directory / "optimization.json";
  b.manifest = b.directory / "manifest.txt";

  write_file(b.summary_csv, [&](std::ostream& o) { write_summary_csv(o, {r.summary}); });
  write_file(b.trace_csv, [&](std::ostream& o) { write_trace_csv(o, r.trace); });
  write_file(b.spectrum_csv, [&](std::ostream& o) { write_spectrum_csv(o, spectrum); });
  write_file(b.report_json, [&](std::ostream& o) { write_report_json(o, r.prepared); });
  write_file(b.manifest, [&](std::ostream& o) {
    write_manifest(o, cfg, utc_timestamp(), {b.summary_csv, b.trace_csv, b.spectrum_csv, b.report_json});
  });
  return b;
}

fs::path emit_spectrum(const ExperimentConfig& cfg) {
  const PreparedProtocol prepared = prepare(cfg);
  const SpectrumTrace spectrum = strategy_spectrum(cfg, prepared);
  const fs::path dir = cfg.out_dir / run_label(cfg.strategy, cfg.delta, cfg.total_time);
  make_directory(dir);
  const fs::path csv = dir / "spectrum.csv";
  write_file(csv, [&](std::ostream& o) { write_spectrum_csv(o, spectrum); });
  write_file(dir / "manifest.txt", [&](std::ostream& o) { write_manifest(o, cfg, utc_timestamp(), {csv}); });
  return csv;
}

// ---------------------------------------------------------------------------

namespace {

struct ReferenceRow {
  double delta;
  Strategy strategy;
  std::array<ReferenceValue, 3> values;  // T = 1, 3, 10
};

// clang-format off
const std::vector<ReferenceRow> kReference{
    {0.5, Strategy::SA,       {{{0.01, 0.38}, {0.06, 0.39}, {0.20, 0.40}}}},
    {0.5, Strategy::SA_AH,    {{{0.57, 0.39}, {0.78, 0.50}, {0.94, 0.87}}}},
    {0.5, Strategy::SA_CD,    {{{0.56, 0.55}, {0.85, 0.85}, {1.00, 0.99}}}},
    {0.5, Strategy::OI,       {{{0.30, 0.82}, {0.88, 0.94}, {0.98, 0.99}}}},
    {0.5, Strategy::OI_AH,    {{{0.30, 0.82}, {0.88, 0.94}, {0.98, 0.99}}}},
    {0.5, Strategy::OI_CD,    {{{0.84, 0.94}, {0.92, 0.96}, {0.99, 0.96}}}},
    {0.5, Strategy::OI_AH_CD, {{{0.84, 0.94}, {0.92, 0.96}, {0.99, 0.96}}}},
    {1.0, Strategy::SA,       {{{0.00, 0.37}, {0.00, 0.37}, {0.00, 0.37}}}},
    {1.0, Strategy::SA_AH,    {{{0.37, 0.36}, {0.62, 0.43}, {0.90, 0.71}}}},
    {1.0, Strategy::SA_CD,    {{{0.00, 0.37}, {0.00, 0.37}, {0.00, 0.37}}}},
    {1.0, Strategy::OI,       {{{0.34, 0.79}, {0.92, 0.95}, {1.00, 1.00}}}},
    {1.0, Strategy::OI_AH,    {{{0.34, 0.79}, {0.92, 0.95}, {1.00, 1.00}}}},
    {1.0, Strategy::OI_CD,    {{{0.85, 0.95}, {0.95, 0.98}, {1.00, 0.94}}}},
    {1.0, Strategy::OI_AH_CD, {{{0.84, 0.94}, {0.95, 0.98}, {1.00, 0.94}}}},
    {1.5, Strategy::SA,       {{{0.01, 0.36}, {0.04, 0.36}, {0.12, 0.37}}}},
    {1.5, Strategy::SA_AH,    {{{0.60, 0.39}, {0.56, 0.47}, {0.94, 0.82}}}},
    {1.5, Strategy::SA_CD,    {{{0.58, 0.58}, {0.85, 0.85}, {1.00, 0.99}}}},
    {1.5, Strategy::OI,       {{{0.40, 0.84}, {0.91, 0.96}, {0.99, 0.99}}}},
    {1.5, Strategy::OI_AH,    {{{0.84, 0.94}, {0.92, 0.96}, {1.00, 0.99}}}},
    {1.5, Strategy::OI_CD,    {{{0.84, 0.94}, {0.93, 0.97}, {0.99, 0.96}}}},
    {1.5, Strategy::OI_AH_CD, {{{0.84, 0.95}, {0.92, 0.97}, {1.00, 0.99}}}},
};
// clang-format on

}  // namespace

std::optional<ReferenceValue> reference_value(Strategy s, double delta, double total_time) {
  for (std::size_t k = 0; k < kTableTimes.size(); ++k) {
    if (total_time != kTableTimes[k]) continue;
    for (const auto& row : kReference)
      if (row.strategy == s && row.delta == delta) return row.values[k];
  }
  return std::nullopt;
}

namespace {

std::string fixed2(double x) {
  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << std::fixed << std::setprecision(2) << x;
  return o.str();
}

std::string format_table(const TableResult& t) {
  bool any_reference = false;
  for (const auto& c : t.cells) any_reference = any_reference || c.reference.has_value();

  std::ostringstream o;
  o.imbue(std::locale::classic());
  o << "delta = " << format_number(t.delta) << (any_reference ? "  (published values in brackets)" : "") << "\n";
  o << std::left << std::setw(10) << "strategy";
  for (double T : kTableTimes) {
    const std::string head = "T=" + format_number(T) + "  N / F_ad";
    o << " | " << std::setw(any_reference ? 25 : 13) << head;
  }
  o << "\n";
  for (Strategy s : kAllStrategies) {
    o << std::left << std::setw(10) << strategy_tag(s);
    for (const auto& c : t.cells) {
      if (c.strategy != s) continue;
      std::string cell = c.summary ? fixed2(c.summary->n_metric) + " / " + fixed2(c.summary->f_ad) : "FAILED";
      if (c.reference) cell += "  [" + fixed2(c.reference->n_metric) + " / " + fixed2(c.reference->f_ad) + "]";
      o << " | " << std::setw(any_reference ? 25 : 13) << cell;
    }
    o << "\n";
  }
  for (const auto& c : t.cells)
    if (!c.error.empty())
      o << "failed: " << strategy_tag(c.strategy) << " T=" << format_number(c.total_time) << ": " << c.error << "\n";
  return o.str();
}

}  // namespace

TableResult reproduce_table(const ExperimentConfig& cfg) {
  cfg.validate();
  TableResult t;
  t.delta = cfg.delta;
  for (Strategy s : kAllStrategies)
    for (double T : kTableTimes) t.cells.push_back({s, T, std::nullopt, reference_value(s, cfg.delta, T), {}});

  const fs::path dir = cfg.out_dir / ("table_delta" + format_number(cfg.delta));
  make_directory(dir);

  // Cells are independent and write to distinct directories.
  const auto count = static_cast<long>(t.cells.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < count; ++k) {
    TableCell& c = t.cells[static_cast<std::size_t>(k)];
    ExperimentConfig cell = cfg;
    cell.strategy = c.strategy;
    cell.total_time = c.total_time;
    cell.out_dir = dir;
    try {
      c.summary = run(cell).summary;
    } catch (const std::exception& e) {
      c.error = e.what();
    }
  }

  t.formatted = format_table(t);
  t.csv = dir / "table.csv";
  t.text = dir / "table.txt";
  write_file(t.csv, [&](std::ostream& o) {
    o << "strategy,delta,total_time,n_metric,f_ad,reference_n_metric,reference_f_ad,status\n";
    for (const auto& c : t.cells) {
      o << strategy_tag(c.strategy) << ',' << format_number(t.delta) << ',' << format_number(c.total_time) << ',';
      o << (c.summary ? format_number(c.summary->n_metric) : "") << ',';
      o << (c.summary ? format_number(c.summary->f_ad) : "") << ',';
      o << (c.reference ? format_number(c.reference->n_metric) : "") << ',';
      o << (c.reference ? format_number(c.reference->f_ad) : "") << ',';
      o << (c.summary ? "ok" : "failed") << '\n';
    }
  });
  write_file(t.text, [&](std::ostream& o) { o << t.formatted; });
  return t;
}

// ---------------------------------------------------------------------------

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << "strategy,delta,total_time,n_metric,f_ad,initial_energy,final_energy,ground_energy\n";
  for (const auto& r : rows) {
    out << r.strategy << ',' << format_number(r.delta) << ',' << format_number(r.total_time) << ','
        << format_number(r.n_metric) << ',' << format_number(r.f_ad) << ',' << format_number(r.initial_energy) << ','
        << format_number(r.final_energy) << ',' << format_number(r.ground_energy) << '\n';
  }
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << "t,fidelity_to_target,fidelity_to_instantaneous,energy\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    out << format_number(trace.times[i]) << ',' << format_number(trace.fidelity_to_target[i]) << ','
        << format_number(trace.fidelity_to_instantaneous[i]) << ',' << format_number(trace.energy[i]) << '\n';
  }
}

void write_spectrum_csv(std::ostream& out, const SpectrumTrace& trace) {
  const Eigen::Index k = trace.levels.empty() ? 0 : trace.levels.front().size();
  out << "s";
  for (Eigen::Index j = 0; j < k; ++j) out << ",E_" << j;
  out << '\n';
  for (std::size_t i = 0; i < trace.s_grid.size(); ++i) {
    out << format_number(trace.s_grid[i]);
    for (Eigen::Index j = 0; j < k; ++j) out << ',' << format_number(trace.levels[i][j]);
    out << '\n';
  }
}

void write_report_json(std::ostream& out, const PreparedProtocol& prepared) {
  using nlohmann::json;
  const ProtocolSpec& s = prepared.spec;
  json j;
  json angles = json::array();
  for (int site = 0; site < s.initial.sites(); ++site) {
    const auto [theta, phi] = s.initial.angles(site);
    angles.push_back({theta, phi});
  }
  j["parameters"]["initial_angles"] = angles;
  j["parameters"]["aux_omegas"] = s.aux ? json(s.aux->omegas) : json(nullptr);
  j["parameters"]["cd_alpha"] = s.cd ? json(s.cd->alpha) : json(nullptr);
  j["stages"] = json::array();
  for (const auto& st : prepared.stages) {
    const OptimizationReport& r = st.report;
    json js{{"stage", st.stage},
            {"seed", r.seed},
            {"best", r.best},
            {"best_objective", r.best_objective},
            {"best_restart", r.best_restart},
            {"converged", r.converged},
            {"evaluations", r.total_evaluations()}};
    js["restarts"] = json::array();
    for (const auto& t : r.restarts) {
      json h = json::array();
      for (const auto& [count, value] : t.history) h.push_back({count, value});
      js["restarts"].push_back({{"start", t.start},
                                {"best", t.best},
                                {"best_objective", std::isfinite(t.best_objective) ? json(t.best_objective) : json(nullptr)},
                                {"evaluations", t.evaluations},
                                {"converged", t.converged},
                                {"canonical", t.canonical},
                                {"error", t.error},
                                {"history", h}});
    }
    j["stages"].push_back(js);
  }
  out << j.dump(2) << '\n';
}

void write_manifest(std::ostream& out, const ExperimentConfig& cfg, const std::string& timestamp,
                    const std::vector<fs::path>& files) {
  out << "# adia " << ADIA_VERSION << "\n";
  out << "# timestamp " << timestamp << "\n";
  for (const auto& f : files) out << "# file " << f.filename().string() << "\n";
  for (const auto& [k, v] : cfg.entries()) out << k << " = " << v << "\n";
}

}  // namespace adia
