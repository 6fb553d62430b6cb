#include "ngrc/experiments.hpp"

#include "ngrc/errors.hpp"
#include "ngrc/forecast.hpp"
#include "ngrc/io.hpp"
#include "ngrc/metrics.hpp"
#include "ngrc/statistics.hpp"
#include "ngrc/training.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace ngrc {

namespace {

double opt(const std::optional<double>& v) { return v ? *v : kUndefined; }

ExperimentRecord base_record(const std::string& figure_id, const GridPoint& point, std::uint64_t seed) {
  ExperimentRecord r;
  r.figure_id = figure_id;
  r.seed = seed;
  r.k = point.config.k;
  r.tau = point.config.tau;
  r.p = point.config.p;
  r.beta = point.config.beta;
  r.h = point.config.h;
  r.n_train = point.config.n_train;
  r.grid_index = point.index;
  return r;
}

// One row per requested solver, or a single "none" row for diagnostics-only points.
std::vector<ExperimentRecord> rows_with_status(const std::string& figure_id, const GridPoint& point,
                                               std::uint64_t seed, const std::string& status) {
  std::vector<ExperimentRecord> out;
  const bool diag_only = point.design == DesignKind::XSubmatrix || point.config.solvers.empty();
  if (diag_only) {
    out.push_back(base_record(figure_id, point, seed));
    out.back().status = status;
    return out;
  }
  for (SolverId id : point.config.solvers) {
    out.push_back(base_record(figure_id, point, seed));
    out.back().solver = std::string(to_string(id));
    out.back().status = status;
  }
  return out;
}

std::string sanitize(std::string text) {
  for (char& c : text) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  }
  return text;
}

}  // namespace

std::vector<ExperimentRecord> run_point(const std::string& figure_id, const GridPoint& point, std::uint64_t seed,
                                        const Trajectory* raw) {
  if (!point.satisfiable()) {
    return rows_with_status(figure_id, point, seed,
                            "skipped:n_train<=m(m=" + std::to_string(point.config.feature_count()) + ")");
  }
  NgrcConfig cfg = point.config;
  cfg.seed = seed;

  try {
    const Dataset data = make_dataset(cfg, raw);

    if (point.design == DesignKind::XSubmatrix) {
      const ColumnWeighting cw = x_submatrix(data.series, cfg.tau, cfg.n_train, 0);
      ExperimentRecord r = base_record(figure_id, point, seed);
      const Eigen::MatrixXd unweighted = cw.weighted * cw.norms.asDiagonal();
      r.kappa = condition_number(unweighted);
      r.kappa_hat = condition_number(cw.weighted);
      r.status = "ok:x_submatrix";
      return {r};
    }

    const Trajectory training = data.training();
    if (cfg.solvers.empty()) {
      const TrainReport rep = conditioning_report(training, cfg);
      ExperimentRecord r = base_record(figure_id, point, seed);
      r.kappa = rep.kappa;
      r.kappa_hat = rep.kappa_hat;
      r.kappa_beta = opt(rep.kappa_beta);
      return {r};
    }

    const TrainReport rep = train(training, cfg, cfg.solvers);
    const Trajectory truth = point.forecast ? data.truth() : Trajectory{};
    MetricsOptions mopt;
    mopt.h = cfg.h;
    mopt.lyapunov_exponent = lyapunov_exponent(cfg.system);
    mopt.eta = cfg.vpt_threshold;
    mopt.maxima_coordinate = cfg.resolved_maxima_coordinate();

    std::vector<ExperimentRecord> out;
    for (const SolverOutcome& o : rep.outcomes) {
      ExperimentRecord r = base_record(figure_id, point, seed);
      r.solver = std::string(to_string(o.readout.solver));
      r.kappa = rep.kappa;
      r.kappa_hat = rep.kappa_hat;
      r.kappa_beta = opt(rep.kappa_beta);
      for (std::size_t i = 0; i < o.theta.size(); ++i) {
        const int c = cfg.coordinates[i];
        r.theta[static_cast<std::size_t>(c)] = opt(o.theta[i]);
      }
      r.theta_max = opt(o.theta_max);
      r.delta = opt(rep.delta);
      if (o.readout.any_failed()) {
        std::string which;
        for (std::size_t i = 0; i < o.readout.per_coordinate_failed.size(); ++i) {
          if (!o.readout.per_coordinate_failed[i]) continue;
          which += (which.empty() ? "" : ";") + coordinate_name(cfg.system, cfg.coordinates[i]);
        }
        r.status = "ok:solver_failed(" + which + ")";
      }
      if (point.forecast) {
        const ForecastResult fc = rollout(o.readout, training, cfg, cfg.n_test);
        const MetricsReport m = score_forecast(truth.states, fc, mopt);
        r.bounded = m.bounded;
        r.vpt = m.vpt;
        r.d_maxima = opt(m.d_maxima);
        r.e_psd = opt(m.e_psd);
      }
      out.push_back(std::move(r));
    }
    return out;
  } catch (const DivergenceError& e) {
    return rows_with_status(figure_id, point, seed, "failed:divergence(step " + std::to_string(e.step()) + ")");
  } catch (const Error& e) {
    return rows_with_status(figure_id, point, seed, "failed:" + sanitize(e.what()));
  }
}

std::vector<ExperimentRecord> run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  const std::vector<GridPoint> points = spec.expand();

  // Points sharing a data source reuse one simulated trajectory per seed,
  // generated at the longest length any of them needs.
  using DataKey = std::tuple<int, int, double, double, std::size_t>;
  std::map<DataKey, std::pair<SimulationRequest, std::vector<std::size_t>>> groups;
  for (const GridPoint& gp : points) {
    const SimulationRequest req = gp.config.simulation();
    const DataKey key{static_cast<int>(req.system), static_cast<int>(req.integrator), req.h,
                      req.effective_integration_step(), req.n_discard};
    auto [it, inserted] = groups.try_emplace(key, req, std::vector<std::size_t>{});
    if (gp.satisfiable()) it->second.first.n_steps = std::max(it->second.first.n_steps, req.n_steps);
    it->second.second.push_back(gp.index);
  }

  struct Task {
    const SimulationRequest* request;
    const std::vector<std::size_t>* members;
    std::size_t seed_index;
  };
  std::vector<Task> tasks;
  for (const auto& [key, group] : groups) {
    for (std::size_t s = 0; s < spec.seeds.size(); ++s) tasks.push_back({&group.first, &group.second, s});
  }

  // results[grid][seed] -> rows
  std::vector<std::vector<std::vector<ExperimentRecord>>> results(
      points.size(), std::vector<std::vector<ExperimentRecord>>(spec.seeds.size()));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      const std::uint64_t seed = spec.seeds[task.seed_index];
      SimulationRequest req = *task.request;
      req.seed = seed;
      std::optional<Trajectory> raw;
      std::string data_error;
      try {
        raw = cached_simulate(req, options.cache_dir);
      } catch (const DivergenceError& e) {
        data_error = "failed:divergence(step " + std::to_string(e.step()) + ")";
      } catch (const Error& e) {
        data_error = "failed:" + sanitize(e.what());
      }
      for (std::size_t g : *task.members) {
        const GridPoint& gp = points[g];
        if (!raw && gp.satisfiable()) {
          results[g][task.seed_index] = rows_with_status(spec.figure_id, gp, seed, data_error);
        } else {
          results[g][task.seed_index] = run_point(spec.figure_id, gp, seed, raw ? &*raw : nullptr);
        }
      }
      const std::size_t finished = ++done;
      if (options.progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        options.progress(finished, tasks.size());
      }
    }
  };

  unsigned n_workers = options.workers ? options.workers : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(std::min<std::size_t>(n_workers, std::max<std::size_t>(1, tasks.size())));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  }

  std::vector<ExperimentRecord> out;
  for (auto& per_grid : results) {
    for (auto& rows : per_grid) {
      for (auto& r : rows) out.push_back(std::move(r));
    }
  }
  return out;
}

double record_metric(const ExperimentRecord& r, std::string_view metric) {
  if (metric == "kappa") return r.kappa;
  if (metric == "kappa_hat") return r.kappa_hat;
  if (metric == "kappa_beta") return r.kappa_beta;
  if (metric == "theta_x") return r.theta[0];
  if (metric == "theta_y") return r.theta[1];
  if (metric == "theta_z") return r.theta[2];
  if (metric == "theta_max") return r.theta_max;
  if (metric == "delta") return r.delta;
  if (metric == "vpt") return r.vpt;
  if (metric == "d_maxima") return r.d_maxima;
  if (metric == "e_psd") return r.e_psd;
  return kUndefined;
}

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  using Key = std::tuple<std::string, int, int, int, double, double, std::size_t, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ExperimentRecord*>> groups;
  for (const auto& r : records) {
    const Key key{r.figure_id, r.k, r.tau, r.p, r.beta, r.h, r.n_train, r.solver};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<SummaryRow> out;
  for (const Key& key : order) {
    const auto& rows = groups[key];
    std::size_t forecasts = 0, bounded = 0;
    for (const auto* r : rows) {
      if (!r->usable() || !r->bounded) continue;
      ++forecasts;
      if (*r->bounded) ++bounded;
    }
    const double fraction =
        forecasts ? static_cast<double>(bounded) / static_cast<double>(forecasts) : kUndefined;

    for (const char* metric : kSummaryMetrics) {
      const std::string_view name(metric);
      const bool forecast_metric = name == "vpt" || name == "d_maxima" || name == "e_psd";
      std::vector<double> values;
      for (const auto* r : rows) {
        if (!r->usable()) continue;
        if (forecast_metric && !(r->bounded && *r->bounded)) continue;
        const double v = record_metric(*r, name);
        if (std::isfinite(v)) values.push_back(v);
      }
      SummaryRow s;
      std::tie(s.figure_id, s.k, s.tau, s.p, s.beta, s.h, s.n_train, s.solver) = key;
      s.metric = metric;
      s.bounded_fraction = fraction;
      if (!values.empty()) {
        s.median = median(values);
        s.q25 = quantile(values, 0.25);
        s.q75 = quantile(values, 0.75);
      } else if (rows.empty() || std::none_of(rows.begin(), rows.end(), [](const auto* r) { return r->usable(); })) {
        continue;
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records) {
  os << kRecordsHeader << '\n';
  for (const auto& r : records) {
    os << r.figure_id << ',' << r.seed << ',' << r.k << ',' << r.tau << ',' << r.p << ',' << format_number(r.beta)
       << ',' << format_number(r.h) << ',' << r.n_train << ',' << r.solver << ',' << format_number(r.kappa) << ','
       << format_number(r.kappa_hat) << ',' << format_number(r.kappa_beta) << ',' << format_number(r.theta[0]) << ','
       << format_number(r.theta[1]) << ',' << format_number(r.theta[2]) << ',' << format_number(r.theta_max) << ','
       << format_number(r.delta) << ',' << format_number(r.vpt) << ',' << format_number(r.d_maxima) << ','
       << format_number(r.e_psd) << ',' << (r.bounded ? (*r.bounded ? "true" : "false") : "nan") << ','
       << r.status << '\n';
  }
}

std::vector<ExperimentRecord> read_records_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("records file is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRecordsHeader) throw FormatError("records header does not match the expected schema");

  const auto num = [](const std::string& s) {
    if (s == "nan") return kUndefined;
    return parse_double(s);
  };
  std::vector<ExperimentRecord> out;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 22) throw FormatError("records line " + std::to_string(line_no) + " has " +
                                          std::to_string(f.size()) + " fields, expected 22");
    ExperimentRecord r;
    r.figure_id = f[0];
    r.seed = static_cast<std::uint64_t>(parse_int(f[1]));
    r.k = static_cast<int>(parse_int(f[2]));
    r.tau = static_cast<int>(parse_int(f[3]));
    r.p = static_cast<int>(parse_int(f[4]));
    r.beta = num(f[5]);
    r.h = num(f[6]);
    r.n_train = static_cast<std::size_t>(parse_int(f[7]));
    r.solver = f[8];
    r.kappa = num(f[9]);
    r.kappa_hat = num(f[10]);
    r.kappa_beta = num(f[11]);
    r.theta = {num(f[12]), num(f[13]), num(f[14])};
    r.theta_max = num(f[15]);
    r.delta = num(f[16]);
    r.vpt = num(f[17]);
    r.d_maxima = num(f[18]);
    r.e_psd = num(f[19]);
    if (f[20] == "true") r.bounded = true;
    else if (f[20] == "false") r.bounded = false;
    r.status = f[21];
    out.push_back(std::move(r));
  }
  return out;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryHeader << '\n';
  for (const auto& s : rows) {
    os << s.figure_id << ',' << s.k << ',' << s.tau << ',' << s.p << ',' << format_number(s.beta) << ','
       << format_number(s.h) << ',' << s.n_train << ',' << s.solver << ',' << s.metric << ','
       << format_number(s.median) << ',' << format_number(s.q25) << ',' << format_number(s.q75) << ','
       << format_number(s.bounded_fraction) << '\n';
  }
}

}  // namespace ngrc
