#pragma once

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "gpid/decomposition.hpp"
#include "gpid/montecarlo.hpp"
#include "gpid/serialize.hpp"
#include "gpid/survey.hpp"

namespace gpid {

enum class Command { index, decompose, simulate, diagnose };
enum class OutputFormat { table, json };

struct Invocation {
  Command command = Command::index;
  std::vector<std::string> input_paths;  // 1 path (csv) or 3 (legacy triple)
  SurveyFormat format = SurveyFormat::csv;
  double Z = 0.0;
  std::string measure = "sen";
  double level = 0.95;
  OutputFormat output = OutputFormat::table;
  std::string config_path;  // simulate
  // simulate overrides; 0 / empty means "take from config"
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t n = 0;
  std::size_t reps = 0;
  bool timestamp = false;
  std::vector<std::size_t> diagnose_ns = {100, 1000, 10000};
  double poor_fraction = 0.4;
};

namespace render {

inline std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v);
  return buf;
}

inline std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

inline void table_row(std::ostream& out, const std::string& a, const std::string& b, const std::string& c) {
  out << std::left << std::setw(14) << a << "\t" << std::setw(10) << b << "\t" << std::setw(8) << c << "\n";
}

}  // namespace render

inline std::string measure_display(MeasureId id, double parameter) {
  std::string s = measure_name(id);
  if (id == MeasureId::fgt || id == MeasureId::chakravarty || id == MeasureId::kakwani) {
    char buf[24];
    std::snprintf(buf, sizeof buf, ":%g", parameter);
    s += buf;
  }
  return s;
}

// Aligned-column table of a gap report; index cells as percentages with two
// decimals, gap and interval bounds in scientific notation.
inline std::string render_report(const GapReport& r, OutputFormat format) {
  if (format == OutputFormat::json) return to_json(r).dump(2) + "\n";
  std::ostringstream out;
  out << "measure: " << measure_display(r.id, r.parameter) << "   Z: " << r.Z << "   n: " << r.n << "\n";
  render::table_row(out, "group", "index", "size");
  render::table_row(out, "all", render::pct(r.global_index), std::to_string(r.n));
  for (const auto& g : r.group_indices)
    render::table_row(out, std::to_string(g.label), render::pct(g.index), std::to_string(g.n_i));
  out << "\n";
  out << "gd_n:                 " << render::sci(r.gd_n) << "\n";
  if (r.id == MeasureId::fgt || r.id == MeasureId::chakravarty)
    out << "note: decomposable measure; the gap is identically zero\n";
  out << "theta1^2:             " << render::sci(r.components.theta1_sq) << "\n";
  out << "theta2^2:             " << render::sci(r.components.theta2_sq) << "\n";
  out << "theta3^2:             " << render::sci(r.components.theta3_sq) << "\n";
  const int pct_level = static_cast<int>(r.level * 100.0 + 0.5);
  out << pct_level << "% CI (gd):          [" << render::sci(r.ci_gd.lo) << ", " << render::sci(r.ci_gd.hi) << "]\n";
  out << pct_level << "% CI (gd0 center):  [" << render::sci(r.ci_gd0.lo) << ", " << render::sci(r.ci_gd0.hi)
      << "]\n";
  if (r.components.hd0_warning)
    out << "warning: a stratum is entirely poor or entirely non-poor (HD0)\n";
  return out.str();
}

inline std::string render_index_table(const GroupedSample& sample, double Z, const MeasureSpec& m,
                                      OutputFormat format) {
  const GapValue gv = gap(sample, Z, m);
  if (format == OutputFormat::json) {
    nlohmann::json groups = nlohmann::json::array();
    for (const auto& g : gv.group_indices)
      groups.push_back({{"label", g.label}, {"n_i", g.n_i}, {"index", g.index}});
    nlohmann::json j{{"measure", {{"id", measure_name(m.id)}, {"parameter", m.parameter}}},
                     {"Z", Z},
                     {"n", sample.n()},
                     {"global_index", gv.global_index},
                     {"group_indices", groups}};
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "measure: " << measure_display(m.id, m.parameter) << "   Z: " << Z << "   n: " << sample.n() << "\n";
  render::table_row(out, "group", "index", "size");
  render::table_row(out, "all", render::pct(gv.global_index), std::to_string(sample.n()));
  for (const auto& g : gv.group_indices)
    render::table_row(out, std::to_string(g.label), render::pct(g.index), std::to_string(g.n_i));
  return out.str();
}

inline std::string render_sim(const SimResult& res, const ExperimentConfig& cfg, OutputFormat format) {
  if (format == OutputFormat::json) {
    nlohmann::json j = to_json(res);
    j["config"] = {{"K", cfg.mix.K()}, {"Z", cfg.Z},       {"measure", measure_display(cfg.measure.id, cfg.measure.parameter)},
                   {"n", cfg.n},       {"reps", cfg.reps}, {"level", cfg.level},
                   {"seed", cfg.seed}};
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "simulate: measure " << measure_display(cfg.measure.id, cfg.measure.parameter) << ", K=" << cfg.mix.K()
      << ", n=" << cfg.n << ", reps=" << cfg.reps << ", level=" << cfg.level << ", seed=" << cfg.seed << "\n";
  out << "Z:                    " << cfg.Z << "\n";
  out << "true gd:              " << render::sci(res.true_gd) << "\n";
  out << "mean gd_n:            " << render::sci(res.mean_gd_n) << "\n";
  out << "coverage:             " << res.coverage << "\n";
  out << "empirical var:        " << render::sci(res.empirical_var) << "\n";
  out << "mean plug-in theta^2: " << render::sci(res.mean_plugin_theta_sq) << "\n";
  out << "KS stat (studentized):" << res.ks_stat << "  p=" << render::sci(res.ks_p) << "\n";
  out << "KS stat (centered):   " << res.ks_stat_centered << "  p=" << render::sci(res.ks_p_centered) << "\n";
  if (res.skipped) out << "skipped replications: " << res.skipped << "\n";
  return out.str();
}

inline std::string render_diagnose(const MeasureSpec& m, const std::vector<std::size_t>& ns, double poor_fraction,
                                   OutputFormat format) {
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream out;
  if (format == OutputFormat::table) {
    out << "measure: " << measure_display(m.id, m.parameter) << "   Q/n: " << poor_fraction << "\n";
    out << std::left << std::setw(8) << "n" << "\t" << std::setw(8) << "Q" << "\t" << std::setw(13) << "dev1"
        << "\t" << std::setw(13) << "sqrt(n)*dev1" << "\t" << std::setw(13) << "dev2" << "\t" << std::setw(13)
        << "n^1.5*dev2" << "\n";
  }
  for (std::size_t n : ns) {
    const auto Q = static_cast<std::size_t>(std::llround(poor_fraction * static_cast<double>(n)));
    const HdDeviation d = hd_diagnostic(m, n, std::max<std::size_t>(1, Q));
    const double sn = std::sqrt(static_cast<double>(n));
    if (format == OutputFormat::table) {
      out << std::left << std::setw(8) << n << "\t" << std::setw(8) << Q << "\t" << std::setw(13)
          << render::sci(d.dev1) << "\t" << std::setw(13) << render::sci(sn * d.dev1) << "\t" << std::setw(13)
          << render::sci(d.dev2) << "\t" << std::setw(13) << render::sci(sn * static_cast<double>(n) * d.dev2)
          << "\n";
    } else {
      rows.push_back({{"n", n},
                      {"Q", Q},
                      {"dev1", d.dev1},
                      {"sqrt_n_dev1", sn * d.dev1},
                      {"dev2", d.dev2},
                      {"n32_dev2", sn * static_cast<double>(n) * d.dev2}});
    }
  }
  if (format == OutputFormat::json) {
    nlohmann::json j{{"measure", measure_display(m.id, m.parameter)}, {"poor_fraction", poor_fraction}, {"sweep", rows}};
    return j.dump(2) + "\n";
  }
  return out.str();
}

inline GroupedSample load_from_invocation(const Invocation& inv) {
  if (inv.format == SurveyFormat::legacy_triple || inv.input_paths.size() == 3) {
    if (inv.input_paths.size() != 3)
      throw UsageError("legacy format needs three paths: dep eq labels");
    return load_survey(inv.input_paths[0], inv.input_paths[1], inv.input_paths[2]);
  }
  if (inv.input_paths.size() != 1) throw UsageError("expected one --input path for csv format");
  return load_survey(inv.input_paths[0], SurveyFormat::csv);
}

// Executes one invocation; writes the rendered output to `out`, errors to
// `err` as a single `error: ...` line.  Exit status: 0 ok, 1 data error,
// 2 usage error.
inline int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    std::ostringstream body;
    switch (inv.command) {
      case Command::index: {
        const MeasureSpec m = parse_measure(inv.measure);
        if (!(inv.Z > 0.0)) throw UsageError("--poverty-line must be positive");
        const GroupedSample sample = load_from_invocation(inv);
        body << render_index_table(sample, inv.Z, m, inv.output);
        break;
      }
      case Command::decompose: {
        const MeasureSpec m = parse_measure(inv.measure);
        if (!(inv.Z > 0.0)) throw UsageError("--poverty-line must be positive");
        if (!(inv.level > 0.0 && inv.level < 1.0)) throw UsageError("--level must be in (0,1)");
        const GroupedSample sample = load_from_invocation(inv);
        body << render_report(decompose(sample, inv.Z, m, inv.level), inv.output);
        break;
      }
      case Command::simulate: {
        if (inv.config_path.empty()) throw UsageError("simulate requires --config");
        std::ifstream cf(inv.config_path);
        if (!cf) throw DataError("cannot open file " + inv.config_path);
        ExperimentConfig cfg = parse_experiment_config(cf);
        if (inv.seed_set) cfg.seed = inv.seed;
        if (inv.n) cfg.n = inv.n;
        if (inv.reps) cfg.reps = inv.reps;
        const SimResult res = run_experiment(cfg);
        body << render_sim(res, cfg, inv.output);
        break;
      }
      case Command::diagnose: {
        const MeasureSpec m = parse_measure(inv.measure);
        body << render_diagnose(m, inv.diagnose_ns, inv.poor_fraction, inv.output);
        break;
      }
    }
    if (inv.timestamp) {
      const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      char buf[64];
      std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&now));
      out << "# generated " << buf << "Z\n";
    }
    out << body.str();
    return 0;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gpid
