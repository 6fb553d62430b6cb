#include "ngrc/io.hpp"

#include "ngrc/errors.hpp"
#include "ngrc/experiments.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

namespace ngrc {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, mode);
  if (!os) throw FormatError("cannot write '" + path.string() + "'");
  return os;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream is(path, mode);
  if (!is) throw FormatError("cannot open '" + path.string() + "'");
  return is;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

json optional_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(number_or_null(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

constexpr char kMagic[8] = {'N', 'G', 'R', 'C', 'T', 'R', 'J', '1'};

template <class T>
void put(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little, "binary cache assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw FormatError("truncated binary trajectory");
  return v;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Eigen::MatrixXd& states, double h, double t0) {
  os << 't';
  for (Eigen::Index c = 0; c < states.cols(); ++c) os << ",x" << (c + 1);
  os << '\n';
  for (Eigen::Index r = 0; r < states.rows(); ++r) {
    os << format_number(t0 + static_cast<double>(r) * h);
    for (Eigen::Index c = 0; c < states.cols(); ++c) os << ',' << format_number(states(r, c));
    os << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os = open_out(path);
  write_trajectory_csv(os, traj.states, traj.h);
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream is = open_in(path);
  std::string line;
  if (!std::getline(is, line)) throw FormatError(path.string() + ": empty trajectory file");
  const std::vector<std::string> header = split_csv(line);
  if (header.size() < 2 || header[0] != "t") throw FormatError(path.string() + ": header must be t,x1,...,xd");
  const std::size_t d = header.size() - 1;

  std::vector<double> times;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (cells.size() != d + 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(d + 1) +
                        " fields");
    }
    try {
      times.push_back(parse_double(cells[0]));
      for (std::size_t c = 1; c <= d; ++c) values.push_back(parse_double(cells[c]));
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (times.empty()) throw FormatError(path.string() + ": trajectory has no rows");

  Trajectory traj;
  traj.states = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(d));
  traj.h = times.size() > 1 ? times[1] - times[0] : 0.0;
  traj.integration_step = traj.h;
  for (std::size_t c = 0; c < d; ++c) traj.coordinates.push_back(static_cast<int>(c));
  traj.normalized = traj.states.size() > 0 && traj.states.cwiseAbs().maxCoeff() <= 1.0;
  return traj;
}

void write_trajectory_binary(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream os = open_out(path, std::ios::out | std::ios::binary);
  os.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(traj.system));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(traj.integrator));
  put<std::uint64_t>(os, traj.seed);
  put<double>(os, traj.h);
  put<double>(os, traj.integration_step);
  put<std::uint8_t>(os, traj.normalized ? 1 : 0);
  put<std::uint8_t>(os, traj.scale ? 1 : 0);
  put<std::uint64_t>(os, static_cast<std::uint64_t>(traj.states.rows()));
  put<std::uint64_t>(os, static_cast<std::uint64_t>(traj.states.cols()));
  for (int c : traj.coordinates) put<std::int32_t>(os, c);
  put<std::int32_t>(os, -1);
  if (traj.scale) {
    for (Eigen::Index i = 0; i < traj.scale->size(); ++i) put<double>(os, (*traj.scale)[i]);
  }
  // Row-major payload.
  for (Eigen::Index r = 0; r < traj.states.rows(); ++r) {
    for (Eigen::Index c = 0; c < traj.states.cols(); ++c) put<double>(os, traj.states(r, c));
  }
  if (!os) throw FormatError("failed writing '" + path.string() + "'");
}

Trajectory read_trajectory_binary(const std::filesystem::path& path) {
  std::ifstream is = open_in(path, std::ios::in | std::ios::binary);
  char magic[sizeof kMagic];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError(path.string() + ": not a trajectory cache file");
  }
  Trajectory traj;
  traj.system = static_cast<SystemId>(get<std::uint32_t>(is));
  traj.integrator = static_cast<IntegratorId>(get<std::uint32_t>(is));
  traj.seed = get<std::uint64_t>(is);
  traj.h = get<double>(is);
  traj.integration_step = get<double>(is);
  traj.normalized = get<std::uint8_t>(is) != 0;
  const bool has_scale = get<std::uint8_t>(is) != 0;
  const auto rows = static_cast<Eigen::Index>(get<std::uint64_t>(is));
  const auto cols = static_cast<Eigen::Index>(get<std::uint64_t>(is));
  for (std::int32_t c = get<std::int32_t>(is); c >= 0; c = get<std::int32_t>(is)) traj.coordinates.push_back(c);
  if (has_scale) {
    Eigen::VectorXd scale(cols);
    for (Eigen::Index i = 0; i < cols; ++i) scale[i] = get<double>(is);
    traj.scale = scale;
  }
  traj.states.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) traj.states(r, c) = get<double>(is);
  }
  return traj;
}

std::string cache_file_name(const SimulationRequest& request) {
  std::ostringstream os;
  os << to_string(request.system) << '_' << to_string(request.integrator) << "_s" << request.seed << "_h"
     << format_number(request.h) << "_dt" << format_number(request.effective_integration_step()) << "_n"
     << request.n_steps << "_d" << request.n_discard << ".bin";
  return os.str();
}

Trajectory cached_simulate(const SimulationRequest& request, const std::optional<std::filesystem::path>& cache_dir) {
  if (!cache_dir) return simulate(request);
  const std::filesystem::path file = *cache_dir / cache_file_name(request);
  if (std::filesystem::exists(file)) {
    try {
      Trajectory cached = read_trajectory_binary(file);
      if (cached.size() == request.n_steps + 1) return cached;
    } catch (const FormatError&) {
      // Corrupt entries are regenerated below.
    }
  }
  Trajectory traj = simulate(request);
  // Write-then-rename keeps concurrent readers from seeing a partial file.
  const std::filesystem::path tmp =
      file.string() + ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  write_trajectory_binary(tmp, traj);
  std::filesystem::rename(tmp, file);
  return traj;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& header) {
  std::ofstream os = open_out(path);
  if (!header.empty()) {
    if (header.size() != static_cast<std::size_t>(m.cols())) throw ArgumentError("header does not match columns");
    for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
    os << '\n';
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) os << (c ? "," : "") << format_number(m(r, c));
    os << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream is = open_in(path);
  std::string line;
  if (has_header && !std::getline(is, line)) throw FormatError(path.string() + ": empty file");
  std::vector<double> values;
  std::size_t rows = 0, cols = 0;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv(line);
    if (rows == 0) cols = cells.size();
    if (cells.size() != cols) throw FormatError(path.string() + ": ragged matrix");
    for (const auto& c : cells) values.push_back(c == "nan" ? kUndefined : parse_double(c));
    ++rows;
  }
  return Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

std::string basis_to_json(const MonomialBasis& basis) { return json(basis.exponents()).dump(); }

void write_readout_csv(const std::filesystem::path& path, const ReadoutMatrix& W, const MonomialBasis& basis,
                       const std::vector<std::string>& coordinate_names) {
  if (static_cast<std::size_t>(W.W.cols()) != basis.size()) throw ArgumentError("readout does not match basis");
  if (coordinate_names.size() != static_cast<std::size_t>(W.W.rows())) {
    throw ArgumentError("one coordinate name per readout row is required");
  }
  std::ofstream os = open_out(path);
  os << "exponents,monomial";
  for (const auto& name : coordinate_names) os << ',' << name;
  os << '\n';
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const auto& alpha = basis.exponent(j);
    for (std::size_t v = 0; v < alpha.size(); ++v) os << (v ? " " : "") << alpha[v];
    os << ',' << basis.label(j);
    for (Eigen::Index i = 0; i < W.W.rows(); ++i) os << ',' << format_number(W.W(i, static_cast<Eigen::Index>(j)));
    os << '\n';
  }
}

std::string config_to_json(const NgrcConfig& config) {
  json j = json::object();
  const KeyValueSection section = config.to_section();
  for (const auto& e : section.entries()) j[e.key] = e.value;
  return j.dump(2);
}

std::string train_report_to_json(const TrainReport& report, const NgrcConfig& config,
                                 const std::vector<std::string>& coordinate_names) {
  json j;
  j["config"] = json::parse(config_to_json(config));
  j["k"] = report.embedding.k;
  j["tau"] = report.embedding.tau;
  j["d"] = report.embedding.d;
  j["p"] = report.p;
  j["beta"] = report.beta;
  j["n_train"] = report.n_train;
  j["n_features"] = report.n_features;
  j["coordinates"] = coordinate_names;
  j["kappa"] = report.kappa;
  j["kappa_hat"] = report.kappa_hat;
  j["kappa_beta"] = optional_number(report.kappa_beta);
  j["delta"] = optional_number(report.delta);
  j["sigma"] = std::vector<double>(report.sigma.data(), report.sigma.data() + report.sigma.size());
  j["zero_columns"] = report.zero_columns;
  json solvers = json::array();
  for (const SolverOutcome& o : report.outcomes) {
    json s;
    s["solver"] = std::string(to_string(o.readout.solver));
    s["failed"] = o.readout.per_coordinate_failed;
    json theta = json::array();
    for (const auto& t : o.theta) theta.push_back(optional_number(t));
    s["theta"] = theta;
    s["theta_max"] = optional_number(o.theta_max);
    if (!o.relative_error.empty()) {
      json err = json::array(), bound = json::array();
      for (std::size_t i = 0; i < o.relative_error.size(); ++i) {
        err.push_back(optional_number(o.relative_error[i]));
        bound.push_back(optional_number(o.error_bound[i]));
      }
      s["relative_error_vs_exact"] = err;
      s["relative_error_bound"] = bound;
    }
    s["W"] = matrix_to_json(o.readout.W);
    solvers.push_back(std::move(s));
  }
  j["solvers"] = solvers;
  return j.dump(2);
}

ReadoutMatrix read_readout_from_report(const std::filesystem::path& path, std::optional<SolverId> solver) {
  std::ifstream is = open_in(path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (!j.contains("solvers") || !j["solvers"].is_array() || j["solvers"].empty()) {
    throw FormatError(path.string() + ": report has no solver readouts");
  }
  for (const auto& s : j["solvers"]) {
    const SolverId id = parse_solver(s.at("solver").get<std::string>());
    if (solver && id != *solver) continue;
    ReadoutMatrix out;
    out.solver = id;
    out.beta = j.value("beta", 0.0);
    const auto& rows = s.at("W");
    const auto n_rows = static_cast<Eigen::Index>(rows.size());
    const auto n_cols = n_rows ? static_cast<Eigen::Index>(rows[0].size()) : 0;
    out.W.resize(n_rows, n_cols);
    for (Eigen::Index r = 0; r < n_rows; ++r) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != n_cols) {
        throw FormatError(path.string() + ": ragged readout matrix");
      }
      for (Eigen::Index c = 0; c < n_cols; ++c) {
        const auto& v = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
        out.W(r, c) = v.is_null() ? kUndefined : v.get<double>();
      }
    }
    out.per_coordinate_failed = s.value("failed", std::vector<bool>(static_cast<std::size_t>(n_rows), false));
    return out;
  }
  throw FormatError(path.string() + ": report has no readout for solver " +
                    std::string(to_string(solver.value_or(SolverId::Svd))));
}

std::string metrics_to_json(const MetricsReport& metrics, const ForecastResult& forecast, const NgrcConfig& config,
                            SolverId solver) {
  json j;
  j["config"] = json::parse(config_to_json(config));
  j["solver"] = std::string(to_string(solver));
  j["bounded"] = metrics.bounded;
  j["sentinel_applied"] = metrics.sentinel_applied;
  j["escape_index"] = forecast.escape_index ? json(*forecast.escape_index) : json(nullptr);
  j["halted"] = forecast.halted;
  j["n_predicted"] = forecast.states.rows();
  j["vpt"] = number_or_null(metrics.vpt);
  j["d_maxima"] = optional_number(metrics.d_maxima);
  j["e_psd"] = optional_number(metrics.e_psd);
  return j.dump(2);
}

void write_psd_csv(const std::filesystem::path& path, const PsdEstimate& truth, const PsdEstimate* pred,
                   const std::vector<std::string>& coordinate_names) {
  if (pred && (pred->power.rows() != truth.power.rows() || pred->power.cols() != truth.power.cols())) {
    throw ArgumentError("spectra are defined on different grids");
  }
  std::ofstream os = open_out(path);
  os << "frequency";
  for (Eigen::Index c = 0; c < truth.power.cols(); ++c) {
    const std::string name = static_cast<std::size_t>(c) < coordinate_names.size()
                                 ? coordinate_names[static_cast<std::size_t>(c)]
                                 : "c" + std::to_string(c);
    os << ",truth_" << name;
    if (pred) os << ",pred_" << name;
  }
  os << '\n';
  for (Eigen::Index b = 0; b < truth.power.rows(); ++b) {
    os << format_number(truth.frequencies[b]);
    for (Eigen::Index c = 0; c < truth.power.cols(); ++c) {
      os << ',' << format_number(truth.power(b, c));
      if (pred) os << ',' << format_number(pred->power(b, c));
    }
    os << '\n';
  }
}

}  // namespace ngrc
