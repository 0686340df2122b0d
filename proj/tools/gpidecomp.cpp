// Command-line front end: poverty indices, decomposability-gap reports,
// Monte Carlo experiments and HD diagnostics on grouped survey data.
#include <CLI11.hpp>

#include <iostream>

#include "gpid/cli.hpp"

namespace {

void add_common(CLI::App* cmd, gpid::Invocation& inv, bool needs_data) {
  if (needs_data) {
    cmd->add_option("--input", inv.input_paths, "input path (csv) or three paths (legacy)")->expected(1, 3);
    auto* fmt = cmd->add_option_function<std::string>(
        "--format",
        [&inv](const std::string& f) {
          if (f == "csv") inv.format = gpid::SurveyFormat::csv;
          else if (f == "legacy") inv.format = gpid::SurveyFormat::legacy_triple;
          else throw CLI::ValidationError("--format must be csv or legacy");
        },
        "input format: csv|legacy (default csv)");
    (void)fmt;
    cmd->add_option_function<std::vector<std::string>>(
           "--legacy",
           [&inv](const std::vector<std::string>& paths) {
             inv.input_paths = paths;
             inv.format = gpid::SurveyFormat::legacy_triple;
           },
           "compatibility mode: dep.txt eq.txt labels.txt")
        ->expected(3);
  }
  cmd->add_option_function<std::string>(
      "--output",
      [&inv](const std::string& o) {
        if (o == "table") inv.output = gpid::OutputFormat::table;
        else if (o == "json") inv.output = gpid::OutputFormat::json;
        else throw CLI::ValidationError("--output must be table or json");
      },
      "output format: table|json (default table)");
  cmd->add_flag("--timestamp", inv.timestamp, "prepend a generation timestamp");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"poverty indices and decomposability-gap inference on grouped survey data"};
  app.require_subcommand(1);

  gpid::Invocation inv;

  auto* index = app.add_subcommand("index", "per-stratum and global poverty index values");
  index->add_option("--poverty-line", inv.Z, "poverty line Z")->required();
  index->add_option("--measure", inv.measure, "sen | shorrocks | thon | kakwani:k | fgt:a | chakravarty:a");
  add_common(index, inv, true);

  auto* dec = app.add_subcommand("decompose", "decomposability-gap report with confidence intervals");
  dec->add_option("--poverty-line", inv.Z, "poverty line Z")->required();
  dec->add_option("--measure", inv.measure, "measure spec");
  dec->add_option("--level", inv.level, "confidence level (default 0.95)");
  add_common(dec, inv, true);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo experiment from a config file");
  sim->add_option("--config", inv.config_path, "experiment config path")->required();
  sim->add_option("--seed", inv.seed, "override config seed")->each([&inv](const std::string&) { inv.seed_set = true; });
  sim->add_option("--n", inv.n, "override sample size");
  sim->add_option("--reps", inv.reps, "override replication count");
  add_common(sim, inv, false);

  auto* diag = app.add_subcommand("diagnose", "HD1/HD2 deviation sweep over n");
  diag->add_option("--measure", inv.measure, "measure spec");
  diag->add_option("--n", inv.diagnose_ns, "sweep sizes (default 100 1000 10000)")->expected(1, 16);
  diag->add_option("--poor-fraction", inv.poor_fraction, "Q/n ratio held fixed (default 0.4)");
  add_common(diag, inv, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  if (index->parsed()) inv.command = gpid::Command::index;
  else if (dec->parsed()) inv.command = gpid::Command::decompose;
  else if (sim->parsed()) inv.command = gpid::Command::simulate;
  else inv.command = gpid::Command::diagnose;

  return gpid::run(inv, std::cout, std::cerr);
}
