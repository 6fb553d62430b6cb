// ngrc: simulate | train | forecast | metrics | sweep | reproduce

#include "commands.hpp"

#include "ngrc/errors.hpp"
#include "ngrc/sweep_spec.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void add_config_flags(CLI::App* cmd, ngrc::cli::ConfigOptions& opt) {
  cmd->add_option("--config", opt.config, "Run config file (key = value)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", opt.seed, "Initial-condition seed (overrides the config)");
  cmd->add_option("--solver", opt.solver, "cholesky | svd | lu | all (overrides the config)");
  cmd->add_option("--set", opt.overrides, "Override any config key, e.g. --set k=2")->type_name("KEY=VALUE");
}

void add_sweep_flags(CLI::App* cmd, ngrc::cli::SweepRun& run) {
  cmd->add_option("--scale", run.scale, "Desk-scale divisor on seeds and n_test")->check(CLI::Range(1.0, 1e6));
  cmd->add_option("--workers", run.workers, "Worker threads (0: hardware concurrency)");
  cmd->add_option("--cache", run.cache_dir, "Directory for cached simulations");
  cmd->add_flag("--quiet", run.quiet, "No progress output");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = ngrc::cli;
  CLI::App app{"Next generation reservoir computing workbench"};
  app.set_version_flag("--version", NGRC_VERSION);
  app.require_subcommand(1);

  cli::ConfigOptions cfg_opt;
  cli::SweepRun run;
  std::filesystem::path out, trajectory, report, truth, prediction, spec;
  std::filesystem::path spec_dir = NGRC_SPEC_DIR;
  std::string figure;

  auto* simulate = app.add_subcommand("simulate", "Write a normalized ground-truth trajectory CSV");
  add_config_flags(simulate, cfg_opt);
  simulate->add_option("--out", out, "Output CSV")->required();

  auto* train = app.add_subcommand("train", "Fit readouts; writes a JSON report and one W CSV per solver");
  add_config_flags(train, cfg_opt);
  train->add_option("--trajectory", trajectory, "Trajectory CSV from simulate")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "Report JSON")->required();

  auto* forecast = app.add_subcommand("forecast", "Roll the trained model forward and score it");
  add_config_flags(forecast, cfg_opt);
  forecast->add_option("--trajectory", trajectory, "Trajectory CSV (training rows, then ground truth)")
      ->required()
      ->check(CLI::ExistingFile);
  forecast->add_option("--report", report, "Report JSON from train")->required()->check(CLI::ExistingFile);
  forecast->add_option("--out", out, "Forecast CSV")->required();

  auto* metrics = app.add_subcommand("metrics", "Score a predicted trajectory against ground truth");
  add_config_flags(metrics, cfg_opt);
  metrics->add_option("--truth", truth, "Ground-truth CSV")->required()->check(CLI::ExistingFile);
  metrics->add_option("--prediction", prediction, "Predicted CSV")->required()->check(CLI::ExistingFile);
  auto* metrics_out = metrics->add_option("--out", out, "Metrics JSON (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "Run a sweep spec file");
  sweep->add_option("--spec", spec, "Sweep spec file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", out, "Output directory")->required();
  add_sweep_flags(sweep, run);

  auto* reproduce = app.add_subcommand("reproduce", "Run the checked-in spec of a figure or table");
  reproduce->add_option("--figure", figure, "Figure id, e.g. F5_degree_growth")->required();
  reproduce->add_option("--out", out, "Output directory")->required();
  reproduce->add_option("--spec-dir", spec_dir, "Directory holding <figure>.spec files");
  add_sweep_flags(reproduce, run);

  auto* list = app.add_subcommand("list", "List figure ids with checked-in specs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*simulate) return cli::cmd_simulate(cli::resolve_config(cfg_opt), out);
    if (*train) return cli::cmd_train(cli::resolve_config(cfg_opt), trajectory, out);
    if (*forecast) return cli::cmd_forecast(cli::resolve_config(cfg_opt), trajectory, report, out);
    if (*metrics) {
      std::optional<std::filesystem::path> dest;
      if (*metrics_out) dest = out;
      return cli::cmd_metrics(cli::resolve_config(cfg_opt), truth, prediction, dest);
    }
    if (*sweep) return cli::cmd_sweep(spec, out, run);
    if (*reproduce) return cli::cmd_reproduce(figure, spec_dir, out, run);
    if (*list) {
      for (const auto& id : ngrc::figure_ids()) std::cout << id << '\n';
      return 0;
    }
  } catch (const ngrc::ArgumentError& e) {
    std::cerr << "ngrc: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "ngrc: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
