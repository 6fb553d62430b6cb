#include "ngrc/features.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ngrc {

namespace {

// Appends every exponent vector of exact total degree `remaining` over
// variables [var, n) to out, larger powers of earlier variables first.
void append_degree(int var, int n, int remaining, std::vector<int>& current,
                   std::vector<std::vector<int>>& out) {
  if (var == n - 1) {
    current[var] = remaining;
    out.push_back(current);
    current[var] = 0;
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[var] = e;
    append_degree(var + 1, n, remaining - e, current, out);
  }
  current[var] = 0;
}

}  // namespace

void EmbeddingConfig::validate() const {
  if (k < 1) throw ArgumentError("delay dimension k must be >= 1");
  if (tau < 1) throw ArgumentError("time lag tau must be >= 1");
  if (d < 1) throw ArgumentError("state dimension d must be >= 1");
}

std::size_t monomial_count(int n_vars, int degree) {
  if (n_vars < 1) throw ArgumentError("monomial basis needs at least one variable");
  if (degree < 0) throw ArgumentError("maximum degree must be >= 0");
  // C(n + p, p) = prod_{i=1..p} (n + i) / i, exact at every step.
  std::size_t count = 1;
  for (int i = 1; i <= degree; ++i) {
    std::size_t numerator = 0;
    if (__builtin_mul_overflow(count, static_cast<std::size_t>(n_vars + i), &numerator)) {
      throw ArgumentError("monomial count C(" + std::to_string(n_vars + degree) + ", " + std::to_string(degree) +
                          ") overflows the platform size type");
    }
    count = numerator / static_cast<std::size_t>(i);
  }
  return count;
}

MonomialBasis::MonomialBasis(int n_vars, int degree) : n_vars_(n_vars), degree_(degree) {
  const std::size_t m = monomial_count(n_vars, degree);
  if (m > (std::size_t{1} << 24)) {
    throw ArgumentError("monomial basis with " + std::to_string(m) + " terms is too large to materialize");
  }
  exponents_.reserve(m);
  std::vector<int> current(static_cast<std::size_t>(n_vars), 0);
  for (int t = 0; t <= degree; ++t) append_degree(0, n_vars, t, current, exponents_);

  factors_.reserve(exponents_.size());
  for (const auto& alpha : exponents_) {
    std::vector<Factor> f;
    for (int v = 0; v < n_vars; ++v) {
      if (alpha[v] > 0) f.push_back({v, alpha[v]});
    }
    factors_.push_back(std::move(f));
  }
}

std::size_t MonomialBasis::index_of(std::span<const int> alpha) const {
  for (std::size_t j = 0; j < exponents_.size(); ++j) {
    if (std::equal(alpha.begin(), alpha.end(), exponents_[j].begin(), exponents_[j].end())) return j;
  }
  return exponents_.size();
}

void MonomialBasis::evaluate(std::span<const double> X, std::span<double> out) const {
  if (X.size() != static_cast<std::size_t>(n_vars_)) throw ArgumentError("feature input has wrong dimension");
  if (out.size() != exponents_.size()) throw ArgumentError("feature output has wrong length");

  // Power table: powers[v * (p + 1) + e] = X_v^e.
  thread_local std::vector<double> powers;
  const std::size_t stride = static_cast<std::size_t>(degree_) + 1;
  powers.resize(static_cast<std::size_t>(n_vars_) * stride);
  for (int v = 0; v < n_vars_; ++v) {
    double* row = powers.data() + static_cast<std::size_t>(v) * stride;
    row[0] = 1.0;
    for (int e = 1; e <= degree_; ++e) row[e] = row[e - 1] * X[static_cast<std::size_t>(v)];
  }
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    double value = 1.0;
    for (const Factor& f : factors_[j]) value *= powers[static_cast<std::size_t>(f.var) * stride + f.power];
    out[j] = value;
  }
}

Eigen::VectorXd MonomialBasis::evaluate(const Eigen::VectorXd& X) const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(size()));
  evaluate(std::span<const double>(X.data(), static_cast<std::size_t>(X.size())),
           std::span<double>(out.data(), size()));
  return out;
}

std::string MonomialBasis::label(std::size_t j) const {
  const auto& f = factors_.at(j);
  if (f.empty()) return "1";
  std::string out;
  for (const Factor& factor : f) {
    if (!out.empty()) out += '*';
    out += 'x' + std::to_string(factor.var + 1);
    if (factor.power > 1) out += '^' + std::to_string(factor.power);
  }
  return out;
}

MonomialBasis monomial_exponents(int k, int d, int p) {
  if (k < 1 || d < 1) throw ArgumentError("k and d must be >= 1");
  if (p < 0) throw ArgumentError("maximum degree p must be >= 0");
  int n_vars = 0;
  if (__builtin_mul_overflow(k, d, &n_vars)) throw ArgumentError("k * d overflows");
  return MonomialBasis(n_vars, p);
}

Eigen::VectorXd embed(const Eigen::MatrixXd& states, const EmbeddingConfig& cfg, std::size_t n) {
  cfg.validate();
  if (states.cols() != cfg.d) throw ArgumentError("embedding dimension d does not match data");
  const std::size_t last = n + cfg.warmup();
  if (last >= static_cast<std::size_t>(states.rows())) {
    throw ArgumentError("embedding index " + std::to_string(n) + " needs row " + std::to_string(last) +
                        " but data has " + std::to_string(states.rows()) + " rows");
  }
  Eigen::VectorXd X(cfg.dimension());
  for (int j = 0; j < cfg.k; ++j) {
    const auto row = static_cast<Eigen::Index>(n + static_cast<std::size_t>(j) * static_cast<std::size_t>(cfg.tau));
    X.segment(j * cfg.d, cfg.d) = states.row(row).transpose();
  }
  return X;
}

Eigen::VectorXd embed(const Trajectory& traj, const EmbeddingConfig& cfg, std::size_t n) {
  return embed(traj.states, cfg, n);
}

Eigen::VectorXd feature_vector(const Eigen::VectorXd& X, const MonomialBasis& basis) {
  return basis.evaluate(X);
}

bool ColumnWeighting::degenerate() const noexcept {
  for (bool z : zero_columns) {
    if (z) return true;
  }
  return false;
}

ColumnWeighting column_weight(const Eigen::MatrixXd& psi) {
  if (psi.size() == 0) throw ArgumentError("column weighting needs a non-empty matrix");
  ColumnWeighting out;
  out.weighted = psi;
  out.norms = psi.colwise().norm().transpose();
  out.zero_columns.assign(static_cast<std::size_t>(psi.cols()), false);
  for (Eigen::Index j = 0; j < psi.cols(); ++j) {
    if (out.norms[j] > 0.0) {
      out.weighted.col(j) /= out.norms[j];
    } else {
      out.weighted.col(j).setZero();
      out.zero_columns[static_cast<std::size_t>(j)] = true;
    }
  }
  return out;
}

Eigen::VectorXd DesignSet::target(int coordinate) const {
  if (coordinate < 0 || coordinate >= dim()) throw ArgumentError("coordinate out of range");
  return targets.col(coordinate);
}

std::size_t required_length(const EmbeddingConfig& cfg, std::size_t n_train) noexcept {
  return n_train + cfg.warmup() + 1;
}

Eigen::MatrixXd feature_rows(const Eigen::MatrixXd& states, const EmbeddingConfig& cfg,
                             const MonomialBasis& basis, std::size_t n_rows) {
  cfg.validate();
  if (basis.n_vars() != cfg.dimension()) throw ArgumentError("basis variable count does not equal k * d");
  if (n_rows + cfg.warmup() > static_cast<std::size_t>(states.rows())) {
    throw ArgumentError("not enough rows for " + std::to_string(n_rows) + " feature vectors");
  }
  // Row-major scratch so each feature vector is written contiguously.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows(
      static_cast<Eigen::Index>(n_rows), static_cast<Eigen::Index>(basis.size()));
  Eigen::VectorXd X(cfg.dimension());
  for (std::size_t r = 0; r < n_rows; ++r) {
    for (int j = 0; j < cfg.k; ++j) {
      const auto src = static_cast<Eigen::Index>(r + static_cast<std::size_t>(j) * static_cast<std::size_t>(cfg.tau));
      X.segment(j * cfg.d, cfg.d) = states.row(src).transpose();
    }
    basis.evaluate(std::span<const double>(X.data(), static_cast<std::size_t>(X.size())),
                   std::span<double>(rows.row(static_cast<Eigen::Index>(r)).data(), basis.size()));
  }
  return rows;
}

DesignSet build_design(const Trajectory& traj, const EmbeddingConfig& cfg, const MonomialBasis& basis,
                       std::size_t n_train) {
  cfg.validate();
  if (cfg.d != traj.dim()) throw ArgumentError("embedding d does not match trajectory dimension");
  if (n_train == 0) throw ArgumentError("n_train must be >= 1");
  const std::size_t needed = required_length(cfg, n_train);
  if (traj.size() < needed) {
    throw ArgumentError("insufficient data: n_train=" + std::to_string(n_train) + " with warm-up " +
                        std::to_string(cfg.warmup()) + " requires " + std::to_string(needed) +
                        " states, trajectory has " + std::to_string(traj.size()));
  }

  DesignSet design;
  design.embedding = cfg;
  design.basis = basis;
  design.psi = feature_rows(traj.states, cfg, basis, n_train) / std::sqrt(static_cast<double>(n_train));

  const auto w = static_cast<Eigen::Index>(cfg.warmup());
  const auto n = static_cast<Eigen::Index>(n_train);
  design.targets = traj.states.middleRows(w + 1, n) - traj.states.middleRows(w, n);

  ColumnWeighting cw = column_weight(design.psi);
  design.psi_hat = std::move(cw.weighted);
  design.column_norms = std::move(cw.norms);
  design.zero_columns = std::move(cw.zero_columns);
  return design;
}

ColumnWeighting x_submatrix(const Trajectory& traj, int tau, std::size_t n_train, int coordinate) {
  if (tau < 1) throw ArgumentError("tau must be >= 1");
  if (coordinate < 0 || coordinate >= traj.dim()) throw ArgumentError("coordinate out of range");
  if (n_train == 0) throw ArgumentError("n_train must be >= 1");
  const std::size_t needed = n_train + static_cast<std::size_t>(tau) + 1;
  if (traj.size() < needed) {
    throw ArgumentError("insufficient data: x-submatrix with tau=" + std::to_string(tau) + " requires " +
                        std::to_string(needed) + " states, trajectory has " + std::to_string(traj.size()));
  }
  const auto n = static_cast<Eigen::Index>(n_train);
  const Eigen::VectorXd used = traj.states.col(coordinate).head(n + tau);
  const double mean = used.mean();

  Eigen::MatrixXd psi(n, 3);
  psi.col(0).setOnes();
  psi.col(1) = used.head(n).array() - mean;
  psi.col(2) = used.segment(tau, n).array() - mean;
  psi /= std::sqrt(static_cast<double>(n_train));

  // Centering a constant series leaves round-off; treat it as an exact zero.
  const double range = used.maxCoeff() - used.minCoeff();
  if (!(range > 0.0)) {
    psi.col(1).setZero();
    psi.col(2).setZero();
  }
  return column_weight(psi);
}

}  // namespace ngrc
