#include "commands.hpp"

#include "ngrc/errors.hpp"
#include "ngrc/experiments.hpp"
#include "ngrc/forecast.hpp"
#include "ngrc/io.hpp"
#include "ngrc/metrics.hpp"
#include "ngrc/sweep_spec.hpp"
#include "ngrc/training.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>

namespace ngrc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path sibling(const fs::path& out, const std::string& suffix) {
  fs::path p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

void ensure_parent(const fs::path& out) {
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << text;
  if (text.empty() || text.back() != '\n') os << '\n';
}

std::vector<std::string> coordinate_names(const NgrcConfig& cfg) {
  std::vector<std::string> names;
  for (int c : cfg.coordinates) names.push_back(coordinate_name(cfg.system, c));
  return names;
}

// A trajectory file is trusted to be the observed, normalized series of cfg.
Trajectory load_observed(const fs::path& path, const NgrcConfig& cfg) {
  Trajectory traj = read_trajectory_csv(path);
  if (traj.dim() != cfg.observed_dimension()) {
    throw FormatError(path.string() + ": " + std::to_string(traj.dim()) + " columns, config observes " +
                      std::to_string(cfg.observed_dimension()) + " coordinates");
  }
  if (traj.size() > 1 && std::abs(traj.h - cfg.h) > 1e-9 * cfg.h) {
    throw FormatError(path.string() + ": time step " + std::to_string(traj.h) + " differs from config h = " +
                      std::to_string(cfg.h));
  }
  traj.h = cfg.h;
  traj.system = cfg.system;
  traj.integrator = cfg.integrator;
  traj.integration_step = cfg.simulation().effective_integration_step();
  traj.seed = cfg.seed;
  traj.coordinates = cfg.coordinates;
  return traj;
}

MetricsOptions metrics_options(const NgrcConfig& cfg) {
  MetricsOptions m;
  m.h = cfg.h;
  m.lyapunov_exponent = lyapunov_exponent(cfg.system);
  m.eta = cfg.vpt_threshold;
  m.maxima_coordinate = cfg.resolved_maxima_coordinate();
  return m;
}

json manifest_base(const std::string& command) {
  json j;
  j["tool"] = "ngrc";
  j["version"] = NGRC_VERSION;
  j["command"] = command;
  j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
#ifdef __VERSION__
  j["compiler"] = __VERSION__;
#endif
  return j;
}

int run_spec(const SweepSpec& loaded, const fs::path& out_dir, const SweepRun& run, const std::string& command) {
  const SweepSpec spec = run.scale > 1.0 ? loaded.scaled(run.scale) : loaded;
  SweepOptions opt;
  opt.workers = run.workers;
  opt.cache_dir = run.cache_dir;
  if (!run.quiet) {
    opt.progress = [id = spec.figure_id, last = std::size_t{0}](std::size_t done, std::size_t total) mutable {
      const std::size_t decile = done * 10 / total;
      if (decile != last || done == total) {
        std::cerr << "[" << id << "] " << done << "/" << total << " tasks\n";
        last = decile;
      }
    };
  }
  const std::vector<ExperimentRecord> records = run_sweep(spec, opt);
  const std::vector<SummaryRow> summary = summarize(records);

  fs::create_directories(out_dir);
  {
    std::ofstream os(out_dir / "records.csv", std::ios::binary);
    write_records_csv(os, records);
  }
  {
    std::ofstream os(out_dir / "summary.csv", std::ios::binary);
    write_summary_csv(os, summary);
  }

  std::size_t skipped = 0, failed = 0;
  for (const auto& r : records) {
    if (r.status.rfind("skipped", 0) == 0) ++skipped;
    if (r.status.rfind("failed", 0) == 0) ++failed;
  }
  json m = manifest_base(command);
  m["figure_id"] = spec.figure_id;
  m["description"] = spec.description;
  m["scale"] = run.scale;
  m["seeds"] = spec.seeds;
  m["grid_points"] = spec.expand().size();
  m["records"] = records.size();
  m["skipped_records"] = skipped;
  m["failed_records"] = failed;
  m["spec"] = spec.to_text();
  write_text(out_dir / "manifest.json", m.dump(2));

  std::cout << spec.figure_id << ": " << records.size() << " records (" << skipped << " skipped, " << failed
            << " failed) -> " << out_dir.string() << '\n';
  return 0;
}

}  // namespace

NgrcConfig resolve_config(const ConfigOptions& options) {
  NgrcConfig cfg = options.config ? load_config(*options.config) : NgrcConfig{};
  KeyValueSection overrides;
  for (const std::string& item : options.overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ArgumentError("--set expects key=value, got '" + item + "'");
    overrides.set(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
  }
  cfg.apply(overrides);
  if (options.seed) cfg.seed = *options.seed;
  if (options.solver) cfg.solvers = parse_solver_list(*options.solver);
  cfg.validate();
  return cfg;
}

int cmd_simulate(const NgrcConfig& config, const fs::path& out) {
  const Dataset data = make_dataset(config);
  ensure_parent(out);
  write_trajectory_csv(out, data.series);

  json m = manifest_base("simulate");
  m["config"] = json::parse(config_to_json(config));
  m["rows"] = data.series.size();
  m["coordinates"] = coordinate_names(config);
  if (data.series.scale) {
    const auto& s = *data.series.scale;
    m["scale"] = std::vector<double>(s.data(), s.data() + s.size());
  }
  write_text(sibling(out, ".manifest.json"), m.dump(2));
  std::cout << "wrote " << data.series.size() << " rows to " << out.string() << '\n';
  return 0;
}

int cmd_train(const NgrcConfig& config, const fs::path& trajectory, const fs::path& out) {
  const Trajectory traj = load_observed(trajectory, config);
  const TrainReport report = train(traj, config, config.solvers);
  const auto names = coordinate_names(config);
  write_text(out, train_report_to_json(report, config, names));

  const MonomialBasis basis = config.basis();
  for (const SolverOutcome& o : report.outcomes) {
    write_readout_csv(sibling(out, "_W_" + std::string(to_string(o.readout.solver)) + ".csv"), o.readout, basis,
                      names);
  }

  std::cout << "kappa=" << report.kappa << " kappa_hat=" << report.kappa_hat;
  if (report.delta) std::cout << " delta=" << *report.delta;
  std::cout << '\n';
  for (const SolverOutcome& o : report.outcomes) {
    std::cout << "  " << to_string(o.readout.solver) << ":";
    for (std::size_t i = 0; i < o.theta.size(); ++i) {
      std::cout << " theta_" << names[i] << "=";
      if (o.readout.per_coordinate_failed[i]) std::cout << "failed";
      else if (o.theta[i]) std::cout << *o.theta[i];
      else std::cout << "-";
    }
    std::cout << '\n';
  }
  return 0;
}

int cmd_forecast(const NgrcConfig& config, const fs::path& trajectory, const fs::path& report,
                 const fs::path& out) {
  const Trajectory traj = load_observed(trajectory, config);
  // SVD when the config lists it, otherwise the first listed solver.
  std::optional<SolverId> wanted;
  if (!config.solvers.empty()) {
    const bool has_svd = std::find(config.solvers.begin(), config.solvers.end(), SolverId::Svd) != config.solvers.end();
    wanted = has_svd ? SolverId::Svd : config.solvers.front();
  }
  const ReadoutMatrix W = read_readout_from_report(report, wanted);
  const auto d = static_cast<Eigen::Index>(config.observed_dimension());
  const auto m = static_cast<Eigen::Index>(config.feature_count());
  if (W.W.rows() != d || W.W.cols() != m) {
    throw FormatError(report.string() + ": readout is " + std::to_string(W.W.rows()) + " x " +
                      std::to_string(W.W.cols()) + ", config needs " + std::to_string(d) + " x " +
                      std::to_string(m));
  }

  const std::size_t train_rows = config.embedding().warmup() + config.n_train + 1;
  if (traj.size() < train_rows) {
    throw ArgumentError("insufficient data: forecast needs " + std::to_string(train_rows) +
                        " training rows, trajectory has " + std::to_string(traj.size()));
  }
  const Trajectory training = slice(traj, 0, train_rows);
  const ForecastResult fc = rollout(W, training, config, config.n_test);

  ensure_parent(out);
  {
    std::ofstream os(out, std::ios::binary);
    if (!os) throw Error("cannot write '" + out.string() + "'");
    write_trajectory_csv(os, fc.states, config.h, static_cast<double>(train_rows) * config.h);
  }

  const std::size_t available = traj.size() - train_rows;
  const fs::path metrics_path = sibling(out, ".metrics.json");
  if (available >= config.n_test && config.n_test > 0) {
    const Eigen::MatrixXd truth =
        traj.states.middleRows(static_cast<Eigen::Index>(train_rows), static_cast<Eigen::Index>(config.n_test));
    const MetricsReport metrics = score_forecast(truth, fc, metrics_options(config));
    write_text(metrics_path, metrics_to_json(metrics, fc, config, W.solver));
    if (fc.states.rows() >= static_cast<Eigen::Index>(welch_segment_length(config.h))) {
      const PsdEstimate pt = welch_psd(truth, config.h);
      const PsdEstimate pp = welch_psd(fc.states, config.h);
      write_psd_csv(sibling(out, ".psd.csv"), pt, &pp, coordinate_names(config));
    }
    std::cout << "bounded=" << (metrics.bounded ? "true" : "false") << " vpt=" << metrics.vpt
              << " d_maxima=" << (metrics.d_maxima ? std::to_string(*metrics.d_maxima) : "undefined")
              << " e_psd=" << (metrics.e_psd ? std::to_string(*metrics.e_psd) : "undefined") << '\n';
  } else {
    MetricsReport none;
    none.bounded = fc.bounded && !fc.halted;
    none.vpt = kUndefined;
    write_text(metrics_path, metrics_to_json(none, fc, config, W.solver));
    std::cout << "bounded=" << (none.bounded ? "true" : "false") << " (no ground truth for metrics)\n";
  }
  return 0;
}

int cmd_metrics(const NgrcConfig& config, const fs::path& truth_path, const fs::path& prediction_path,
                const std::optional<fs::path>& out) {
  const Trajectory truth = load_observed(truth_path, config);
  const Trajectory pred = load_observed(prediction_path, config);
  if (pred.size() > truth.size() || pred.states.cols() != truth.states.cols())
    throw ArgumentError("prediction is " + std::to_string(pred.size()) + " x " + std::to_string(pred.states.cols()) +
                        " but truth is " + std::to_string(truth.size()) + " x " +
                        std::to_string(truth.states.cols()));
  ForecastResult fc;
  fc.states = pred.states;
  fc.n_test = truth.size();
  const BoundsCheck bc = is_bounded(pred.states, config.box_half_width);
  fc.bounded = bc.bounded;
  fc.escape_index = bc.escape_index;
  fc.halted = pred.size() < truth.size();
  const MetricsReport metrics = score_forecast(truth.states, fc, metrics_options(config));
  const SolverId solver = config.solvers.empty() ? SolverId::Svd : config.solvers.front();
  const std::string text = metrics_to_json(metrics, fc, config, solver);
  if (out) write_text(*out, text);
  else std::cout << text << '\n';
  return 0;
}

int cmd_sweep(const fs::path& spec, const fs::path& out_dir, const SweepRun& run) {
  return run_spec(load_sweep_spec(spec), out_dir, run, "sweep");
}

int cmd_reproduce(const std::string& figure_id, const fs::path& spec_dir, const fs::path& out_dir,
                  const SweepRun& run) {
  return run_spec(load_sweep_spec(spec_path(spec_dir, figure_id)), out_dir, run, "reproduce");
}

}  // namespace ngrc::cli
