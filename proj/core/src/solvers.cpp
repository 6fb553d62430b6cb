#include "ngrc/solvers.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <string>

namespace ngrc {

namespace {

void check_beta(double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ArgumentError("regularizer beta must be finite and >= 0");
}

void check_shapes(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y) {
  if (psi.size() == 0) throw ArgumentError("feature matrix is empty");
  if (psi.rows() != y.size()) throw ArgumentError("target length does not match feature rows");
}

Eigen::MatrixXd regularized_gram(const Eigen::MatrixXd& gram, double beta) {
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += beta;
  return a;
}

std::optional<Eigen::VectorXd> cholesky_from_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs,
                                                  double beta) {
  Eigen::LLT<Eigen::MatrixXd> llt(regularized_gram(gram, beta));
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::VectorXd u = llt.solve(rhs);
  if (!u.allFinite()) return std::nullopt;
  return u;
}

std::optional<Eigen::VectorXd> lu_from_gram(const Eigen::MatrixXd& gram, const Eigen::VectorXd& rhs, double beta) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(regularized_gram(gram, beta));
  const auto& factors = lu.matrixLU();
  for (Eigen::Index i = 0; i < factors.rows(); ++i) {
    if (factors(i, i) == 0.0) return std::nullopt;
  }
  const Eigen::MatrixXd inverse = lu.inverse();
  if (!inverse.allFinite()) return std::nullopt;
  return Eigen::VectorXd(inverse * rhs);
}

Eigen::VectorXd svd_filter(const Eigen::MatrixXd& u, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& v,
                           const Eigen::VectorXd& y, double beta) {
  Eigen::VectorXd coeffs = u.transpose() * y;
  for (Eigen::Index j = 0; j < sigma.size(); ++j) {
    const double s = sigma[j];
    const double denom = s * s + beta;
    coeffs[j] = denom > 0.0 ? coeffs[j] * (s / denom) : 0.0;
  }
  return v * coeffs;
}

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(SolverId id) noexcept {
  switch (id) {
    case SolverId::Cholesky: return "cholesky";
    case SolverId::Svd: return "svd";
    case SolverId::Lu: return "lu";
  }
  return "unknown";
}

SolverId parse_solver(std::string_view text) {
  const std::string t = lower(text);
  if (t == "cholesky" || t == "cho") return SolverId::Cholesky;
  if (t == "svd") return SolverId::Svd;
  if (t == "lu") return SolverId::Lu;
  throw ArgumentError("unknown solver '" + std::string(text) + "' (expected cholesky | svd | lu)");
}

std::vector<SolverId> parse_solver_list(std::string_view text) {
  std::vector<SolverId> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(std::remove_if(item.begin(), item.end(), [](unsigned char c) { return std::isspace(c); }), item.end());
    if (item.empty()) continue;
    const std::string t = lower(item);
    if (t == "all") {
      for (SolverId s : kAllSolvers) {
        if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
      }
      continue;
    }
    if (t == "none") continue;
    const SolverId s = parse_solver(t);
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  return out;
}

std::optional<Eigen::VectorXd> solve_cholesky(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, double beta) {
  check_beta(beta);
  check_shapes(psi, y);
  const Eigen::MatrixXd gram = psi.transpose() * psi;
  return cholesky_from_gram(gram, psi.transpose() * y, beta);
}

std::optional<Eigen::VectorXd> solve_svd(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, double beta) {
  check_beta(beta);
  check_shapes(psi, y);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd u = svd_filter(svd.matrixU(), svd.singularValues(), svd.matrixV(), y, beta);
  if (!u.allFinite()) return std::nullopt;
  return u;
}

std::optional<Eigen::VectorXd> solve_lu(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y, double beta) {
  check_beta(beta);
  check_shapes(psi, y);
  const Eigen::MatrixXd gram = psi.transpose() * psi;
  return lu_from_gram(gram, psi.transpose() * y, beta);
}

std::optional<Eigen::VectorXd> solve_cholesky(const DesignSet& design, int coordinate, double beta) {
  return solve_cholesky(design.psi, design.target(coordinate), beta);
}

std::optional<Eigen::VectorXd> solve_svd(const DesignSet& design, int coordinate, double beta) {
  return solve_svd(design.psi, design.target(coordinate), beta);
}

std::optional<Eigen::VectorXd> solve_lu(const DesignSet& design, int coordinate, double beta) {
  return solve_lu(design.psi, design.target(coordinate), beta);
}

RegularizedLeastSquares::RegularizedLeastSquares(Eigen::MatrixXd psi) : psi_(std::move(psi)) {
  if (psi_.size() == 0) throw ArgumentError("feature matrix is empty");
}

const Eigen::MatrixXd& RegularizedLeastSquares::gram() {
  if (!gram_) gram_ = Eigen::MatrixXd(psi_.transpose() * psi_);
  return *gram_;
}

void RegularizedLeastSquares::ensure_svd() {
  if (have_svd_) return;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi_, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u_ = svd.matrixU();
  sigma_ = svd.singularValues();
  v_ = svd.matrixV();
  have_svd_ = true;
}

const Eigen::VectorXd& RegularizedLeastSquares::singular_values() {
  ensure_svd();
  return sigma_;
}

std::optional<Eigen::VectorXd> RegularizedLeastSquares::solve(SolverId solver, const Eigen::VectorXd& y,
                                                              double beta) {
  check_beta(beta);
  check_shapes(psi_, y);
  switch (solver) {
    case SolverId::Cholesky:
      return cholesky_from_gram(gram(), psi_.transpose() * y, beta);
    case SolverId::Lu:
      return lu_from_gram(gram(), psi_.transpose() * y, beta);
    case SolverId::Svd: {
      ensure_svd();
      Eigen::VectorXd u = svd_filter(u_, sigma_, v_, y, beta);
      if (!u.allFinite()) return std::nullopt;
      return u;
    }
  }
  return std::nullopt;
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& psi) {
  if (psi.size() == 0) throw ArgumentError("matrix is empty");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(psi);
  return svd.singularValues();
}

double condition_number_from_singular_values(const Eigen::VectorXd& sigma) {
  if (sigma.size() == 0) throw ArgumentError("no singular values");
  const double smax = sigma.maxCoeff();
  const double smin = sigma.minCoeff();
  if (smax == 0.0 || smin == 0.0) return kSingularConditionNumber;
  return smax / smin;
}

double condition_number(const Eigen::MatrixXd& psi) {
  // Wide matrices have a nontrivial kernel.
  if (psi.rows() < psi.cols()) return kSingularConditionNumber;
  return condition_number_from_singular_values(singular_values(psi));
}

double regularized_condition_number_from_sigma1(double sigma1, double beta) {
  if (!(beta > 0.0)) throw ArgumentError("regularized condition number needs beta > 0");
  return sigma1 / std::sqrt(beta);
}

double regularized_condition_number(const Eigen::MatrixXd& psi, double beta) {
  if (!(beta > 0.0)) throw ArgumentError("regularized condition number needs beta > 0");
  return regularized_condition_number_from_sigma1(singular_values(psi)[0], beta);
}

std::optional<double> closeness_of_fit(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& w) {
  check_shapes(psi, y);
  if (w.size() != psi.cols()) throw ArgumentError("coefficient length does not match feature columns");
  const double ynorm = y.norm();
  if (!(ynorm > 0.0)) throw DegenerateDataError("closeness of fit is undefined for a zero target vector");
  if (!w.allFinite()) return std::nullopt;
  const double ratio = (y - psi * w).norm() / ynorm;
  if (!std::isfinite(ratio) || ratio > 1.0) return std::nullopt;
  return std::asin(ratio);
}

std::optional<double> closeness_of_fit(const DesignSet& design, int coordinate, const Eigen::VectorXd& w) {
  return closeness_of_fit(design.psi, design.target(coordinate), w);
}

double relative_error_bound(double kappa, double theta, double eps) {
  return eps * (2.0 * kappa / std::cos(theta) + std::tan(theta) * kappa * kappa);
}

bool ReadoutMatrix::any_failed() const noexcept {
  return std::any_of(per_coordinate_failed.begin(), per_coordinate_failed.end(), [](bool f) { return f; });
}

std::optional<double> pairwise_diff(std::span<const ReadoutMatrix> readouts) {
  if (readouts.size() < 2) return std::nullopt;
  const Eigen::Index d = readouts.front().W.rows();
  std::optional<double> best;
  for (Eigen::Index i = 0; i < d; ++i) {
    for (std::size_t a = 0; a < readouts.size(); ++a) {
      for (std::size_t b = a + 1; b < readouts.size(); ++b) {
        const auto& ra = readouts[a];
        const auto& rb = readouts[b];
        if (ra.W.rows() != d || rb.W.rows() != d || ra.W.cols() != rb.W.cols()) {
          throw ArgumentError("readout matrices have different shapes");
        }
        const auto ia = static_cast<std::size_t>(i);
        if (ra.per_coordinate_failed.at(ia) || rb.per_coordinate_failed.at(ia)) continue;
        const double dist = (ra.W.row(i) - rb.W.row(i)).norm();
        if (!best || dist > *best || std::isnan(dist)) best = dist;
      }
    }
  }
  return best;
}

}  // namespace ngrc
