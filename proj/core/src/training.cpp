#include "ngrc/training.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ngrc {

Trajectory Dataset::training() const { return slice(series, 0, training_rows()); }

Trajectory Dataset::truth() const { return slice(series, training_rows(), n_test); }

Dataset make_dataset(const NgrcConfig& config, const Trajectory* raw) {
  config.validate();
  const std::size_t rows = config.required_steps() + 1;

  Trajectory full;
  if (raw != nullptr) {
    if (raw->normalized) throw ArgumentError("make_dataset expects an unnormalized trajectory");
    if (raw->size() < rows) {
      throw ArgumentError("trajectory has " + std::to_string(raw->size()) + " rows, config needs " +
                          std::to_string(rows));
    }
    full = slice(*raw, 0, rows);
  } else {
    full = simulate(config.simulation());
  }

  Dataset out;
  out.warmup = config.embedding().warmup();
  out.n_train = config.n_train;
  out.n_test = config.n_test;
  const Trajectory observed = select_coordinates(full, config.coordinates);
  const std::size_t scale_rows =
      config.normalization == NormalizationSegment::Training ? out.training_rows() : observed.size();
  out.series = normalize(observed, scale_rows);
  return out;
}

const SolverOutcome* TrainReport::find(SolverId id) const noexcept {
  for (const auto& o : outcomes) {
    if (o.readout.solver == id) return &o;
  }
  return nullptr;
}

std::vector<ReadoutMatrix> TrainReport::readouts() const {
  std::vector<ReadoutMatrix> out;
  out.reserve(outcomes.size());
  for (const auto& o : outcomes) out.push_back(o.readout);
  return out;
}

std::optional<Eigen::MatrixXd> lorenz_euler_readout(const Trajectory& traj, const EmbeddingConfig& cfg,
                                                    const MonomialBasis& basis, std::size_t n_train) {
  if (traj.system != SystemId::Lorenz63 || traj.integrator != IntegratorId::ExplicitEuler) return std::nullopt;
  if (!traj.full_state() || !traj.scale || basis.degree() < 2) return std::nullopt;
  if (std::abs(traj.integration_step - traj.h) > 1e-12 * traj.h) return std::nullopt;

  const Eigen::VectorXd& s = *traj.scale;
  const int base = (cfg.k - 1) * cfg.d;  // variables of the most recent delayed state
  const auto index = [&](std::initializer_list<std::pair<int, int>> powers) {
    std::vector<int> alpha(static_cast<std::size_t>(basis.n_vars()), 0);
    for (const auto& [var, e] : powers) alpha[static_cast<std::size_t>(base + var)] += e;
    const std::size_t j = basis.index_of(alpha);
    if (j >= basis.size()) throw ArgumentError("reference monomial missing from basis");
    return static_cast<Eigen::Index>(j);
  };

  // Normalized field: each raw coefficient picks up s_(monomial) / s_(target).
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, static_cast<Eigen::Index>(basis.size()));
  c(0, index({{0, 1}})) = -lorenz::kSigma;
  c(0, index({{1, 1}})) = lorenz::kSigma * s[1] / s[0];
  c(1, index({{0, 1}})) = lorenz::kRho * s[0] / s[1];
  c(1, index({{1, 1}})) = -1.0;
  c(1, index({{0, 1}, {2, 1}})) = -s[0] * s[2] / s[1];
  c(2, index({{0, 1}, {1, 1}})) = s[0] * s[1] / s[2];
  c(2, index({{2, 1}})) = -lorenz::kBetaNumerator / lorenz::kBetaDenominator;
  return Eigen::MatrixXd(c * (std::sqrt(static_cast<double>(n_train)) * traj.h));
}

namespace {

TrainReport diagnostics(const DesignSet& design, RegularizedLeastSquares& lsq, const NgrcConfig& config) {
  TrainReport report;
  report.embedding = design.embedding;
  report.p = design.basis.degree();
  report.beta = config.beta;
  report.n_train = design.n_train();
  report.n_features = design.n_features();
  report.sigma = lsq.singular_values();
  report.kappa = design.psi.rows() < design.psi.cols() ? kSingularConditionNumber
                                                       : condition_number_from_singular_values(report.sigma);
  report.kappa_hat = condition_number(design.psi_hat);
  if (config.beta > 0.0) report.kappa_beta = regularized_condition_number_from_sigma1(report.sigma[0], config.beta);
  report.zero_columns = design.zero_columns;
  return report;
}

}  // namespace

TrainReport conditioning_report(const Trajectory& traj, const NgrcConfig& config) {
  const EmbeddingConfig emb{config.k, config.tau, traj.dim()};
  const DesignSet design = build_design(traj, emb, monomial_exponents(config.k, traj.dim(), config.p), config.n_train);
  RegularizedLeastSquares lsq(design.psi);
  return diagnostics(design, lsq, config);
}

TrainReport train(const Trajectory& traj, const NgrcConfig& config, std::span<const SolverId> solvers) {
  const EmbeddingConfig emb{config.k, config.tau, traj.dim()};
  const MonomialBasis basis = monomial_exponents(config.k, traj.dim(), config.p);
  const DesignSet design = build_design(traj, emb, basis, config.n_train);
  RegularizedLeastSquares lsq(design.psi);
  TrainReport report = diagnostics(design, lsq, config);

  const std::optional<Eigen::MatrixXd> reference = lorenz_euler_readout(traj, emb, basis, config.n_train);
  const int d = design.dim();
  const auto m = static_cast<Eigen::Index>(design.n_features());

  for (SolverId id : solvers) {
    SolverOutcome out;
    out.readout.solver = id;
    out.readout.beta = config.beta;
    out.readout.W = Eigen::MatrixXd::Zero(d, m);
    out.readout.per_coordinate_failed.assign(static_cast<std::size_t>(d), false);
    out.theta.assign(static_cast<std::size_t>(d), std::nullopt);
    if (reference) {
      out.relative_error.assign(static_cast<std::size_t>(d), std::nullopt);
      out.error_bound.assign(static_cast<std::size_t>(d), std::nullopt);
    }
    bool all_theta = true;
    double theta_max = 0.0;
    for (int i = 0; i < d; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      const Eigen::VectorXd y = design.target(i);
      std::optional<Eigen::VectorXd> w = lsq.solve(id, y, config.beta);
      if (!w) {
        out.readout.per_coordinate_failed[ii] = true;
        all_theta = false;
        continue;
      }
      out.readout.W.row(i) = w->transpose();
      try {
        out.theta[ii] = closeness_of_fit(design.psi, y, *w);
      } catch (const DegenerateDataError&) {
        out.theta[ii] = std::nullopt;
      }
      if (out.theta[ii]) {
        theta_max = std::max(theta_max, *out.theta[ii]);
      } else {
        all_theta = false;
      }
      if (reference) {
        const Eigen::VectorXd c = reference->row(i).transpose();
        out.relative_error[ii] = (*w - c).norm() / c.norm();
        if (out.theta[ii]) out.error_bound[ii] = relative_error_bound(report.kappa, *out.theta[ii]);
      }
    }
    if (all_theta) out.theta_max = theta_max;
    report.outcomes.push_back(std::move(out));
  }

  const std::vector<ReadoutMatrix> readouts = report.readouts();
  report.delta = pairwise_diff(readouts);
  return report;
}

TrainReport train(const Trajectory& traj, const NgrcConfig& config) { return train(traj, config, config.solvers); }

}  // namespace ngrc
