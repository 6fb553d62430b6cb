#pragma once

// File formats: trajectory CSV and binary cache, matrix CSV, readout CSV,
// PSD CSV, and JSON documents for bases, training reports and metrics.

#include "ngrc/config.hpp"
#include "ngrc/dynamics.hpp"
#include "ngrc/features.hpp"
#include "ngrc/forecast.hpp"
#include "ngrc/metrics.hpp"
#include "ngrc/training.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ngrc {

/// Header "t,x1,...,xd"; t = t0 + n h.
void write_trajectory_csv(std::ostream& os, const Eigen::MatrixXd& states, double h, double t0 = 0.0);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
/// Reads states and h (from the first two time stamps). Marks the result normalized
/// when every component lies in [-1, 1].
[[nodiscard]] Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Compact little-endian binary form with the full provenance.
void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj);
[[nodiscard]] Trajectory read_trajectory_binary(const std::filesystem::path& path);

/// Cache file name for a simulation request (system, integrator, seed, h,
/// integration step, n_steps, n_discard).
[[nodiscard]] std::string cache_file_name(const SimulationRequest& request);
/// simulate() with an optional on-disk cache directory.
[[nodiscard]] Trajectory cached_simulate(const SimulationRequest& request,
                                         const std::optional<std::filesystem::path>& cache_dir);

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header = {});
[[nodiscard]] Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, bool has_header = true);

/// JSON array of exponent vectors.
[[nodiscard]] std::string basis_to_json(const MonomialBasis& basis);

/// One row per monomial: exponent vector, label, then one column per coordinate.
void write_readout_csv(const std::filesystem::path& path, const ReadoutMatrix& W, const MonomialBasis& basis,
                       const std::vector<std::string>& coordinate_names);

[[nodiscard]] std::string train_report_to_json(const TrainReport& report, const NgrcConfig& config,
                                               const std::vector<std::string>& coordinate_names);
/// Readout of the given solver (or the first one) stored in a report file.
[[nodiscard]] ReadoutMatrix read_readout_from_report(const std::filesystem::path& path,
                                                     std::optional<SolverId> solver = std::nullopt);

[[nodiscard]] std::string metrics_to_json(const MetricsReport& metrics, const ForecastResult& forecast,
                                          const NgrcConfig& config, SolverId solver);

/// "frequency,truth_<c>,pred_<c>,..." for each coordinate.
void write_psd_csv(const std::filesystem::path& path, const PsdEstimate& truth, const PsdEstimate* pred,
                   const std::vector<std::string>& coordinate_names);

/// Effective config as a JSON object.
[[nodiscard]] std::string config_to_json(const NgrcConfig& config);

}  // namespace ngrc
