#pragma once

// Sweep harness: runs every grid point x seed of a SweepSpec, emits one
// ExperimentRecord per solver, and summarizes records over seeds.

#include "ngrc/sweep_spec.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace ngrc {

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

struct ExperimentRecord {
  std::string figure_id;
  std::uint64_t seed = 0;
  int k = 1;
  int tau = 1;
  int p = 2;
  double beta = 0.0;
  double h = 0.01;
  std::size_t n_train = 0;
  std::string solver = "none";
  double kappa = kUndefined;
  double kappa_hat = kUndefined;
  double kappa_beta = kUndefined;
  std::array<double, 3> theta = {kUndefined, kUndefined, kUndefined};  // by system coordinate
  double theta_max = kUndefined;
  double delta = kUndefined;
  double vpt = kUndefined;
  double d_maxima = kUndefined;
  double e_psd = kUndefined;
  std::optional<bool> bounded;  // empty when no forecast was run
  std::string status = "ok";

  std::size_t grid_index = 0;  // position in the expanded grid; not serialized

  [[nodiscard]] bool usable() const noexcept { return status.rfind("ok", 0) == 0; }
};

inline constexpr const char* kRecordsHeader =
    "figure_id,seed,k,tau,p,beta,h,n_train,solver,kappa,kappa_hat,kappa_beta,theta_x,theta_y,theta_z,"
    "theta_max,delta,vpt,d_maxima,e_psd,bounded,status";

inline constexpr const char* kSummaryHeader =
    "figure_id,k,tau,p,beta,h,n_train,solver,metric,median,q25,q75,bounded_fraction";

struct SweepOptions {
  unsigned workers = 0;  // 0: hardware concurrency
  std::optional<std::filesystem::path> cache_dir;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Records ordered by (grid index, seed, solver request order).
[[nodiscard]] std::vector<ExperimentRecord> run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

/// Records for one grid point and seed; raw (full-state, unnormalized, long
/// enough) may be supplied to skip simulation.
[[nodiscard]] std::vector<ExperimentRecord> run_point(const std::string& figure_id, const GridPoint& point,
                                                      std::uint64_t seed, const Trajectory* raw = nullptr);

struct SummaryRow {
  std::string figure_id;
  int k = 1;
  int tau = 1;
  int p = 2;
  double beta = 0.0;
  double h = 0.01;
  std::size_t n_train = 0;
  std::string solver;
  std::string metric;
  double median = kUndefined;
  double q25 = kUndefined;
  double q75 = kUndefined;
  double bounded_fraction = kUndefined;
};

inline constexpr const char* kSummaryMetrics[] = {"kappa",   "kappa_hat", "kappa_beta", "theta_x",  "theta_y",
                                                   "theta_z", "theta_max", "delta",      "vpt",      "d_maxima",
                                                   "e_psd"};

/// Median and quartiles over seeds per (grid columns, solver, metric). Only
/// usable rows enter; forecast metrics use bounded rows only.
[[nodiscard]] std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records);

/// Value of a named metric column; NaN for unknown names.
[[nodiscard]] double record_metric(const ExperimentRecord& r, std::string_view metric);

/// Shortest round-trip decimal; "nan" for NaN.
[[nodiscard]] std::string format_number(double v);

void write_records_csv(std::ostream& os, const std::vector<ExperimentRecord>& records);
[[nodiscard]] std::vector<ExperimentRecord> read_records_csv(std::istream& is);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace ngrc
