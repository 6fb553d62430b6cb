#include "ngrc/errors.hpp"
#include "ngrc/solvers.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ngrc;

namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  return m;
}

Eigen::VectorXd solve(SolverId id, const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double beta) {
  std::optional<Eigen::VectorXd> w;
  switch (id) {
    case SolverId::Cholesky: w = solve_cholesky(A, y, beta); break;
    case SolverId::Svd: w = solve_svd(A, y, beta); break;
    case SolverId::Lu: w = solve_lu(A, y, beta); break;
  }
  EXPECT_TRUE(w.has_value()) << to_string(id);
  return w.value_or(Eigen::VectorXd::Zero(A.cols()));
}

// Normal equations in 50-digit arithmetic, partial-pivot elimination.
Eigen::VectorXd oracle(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double beta) {
  const auto m = static_cast<std::size_t>(A.cols());
  std::vector<std::vector<Big>> G(m, std::vector<Big>(m + 1));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= m; ++j) {
      Big s = 0;
      for (Eigen::Index r = 0; r < A.rows(); ++r) {
        const double rhs = j == m ? y(r) : A(r, static_cast<Eigen::Index>(j));
        s += Big(A(r, static_cast<Eigen::Index>(i))) * Big(rhs);
      }
      G[i][j] = s + (i == j ? Big(beta) : Big(0));
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (abs(G[r][c]) > abs(G[piv][c])) piv = r;
    std::swap(G[c], G[piv]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const Big f = G[r][c] / G[c][c];
      for (std::size_t j = c; j <= m; ++j) G[r][j] -= f * G[c][j];
    }
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  std::vector<Big> x(m);
  for (std::size_t i = m; i-- > 0;) {
    Big s = G[i][m];
    for (std::size_t j = i + 1; j < m; ++j) s -= G[i][j] * x[j];
    x[i] = s / G[i][i];
    w(static_cast<Eigen::Index>(i)) = static_cast<double>(x[i]);
  }
  return w;
}

}  // namespace

TEST(Solvers, IdentityReturnsTarget) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(5, 5);
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, -1.0, 3.0);
  for (SolverId id : kAllSolvers) {
    EXPECT_LT((solve(id, I, y, 0.0) - y).norm(), 1e-15) << to_string(id);
    EXPECT_LT((solve(id, I, y, 0.25) - y / 1.25).norm(), 1e-15) << to_string(id);
  }
}

TEST(Solvers, OrthonormalColumnsShrinkByOnePlusBeta) {
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(12, 4, 1)).householderQ() *
                            Eigen::MatrixXd::Identity(12, 4);
  const Eigen::VectorXd y = gaussian(12, 1, 2);
  const Eigen::VectorXd want = Q.transpose() * y / 1.5;
  for (SolverId id : kAllSolvers) EXPECT_LT((solve(id, Q, y, 0.5) - want).norm(), 1e-14) << to_string(id);
}

TEST(Solvers, PaddedDiagonal) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 2);
  A(0, 0) = 2.0;
  A(1, 1) = 1.0;
  const Eigen::Vector3d y(2, 1, 0);
  for (SolverId id : kAllSolvers) EXPECT_LT((solve(id, A, y, 0.0) - Eigen::Vector2d(1, 1)).norm(), 1e-15);
}

TEST(Solvers, SvdMinimumNormOnZeroSingularValue) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(3, 2);
  A(0, 0) = 1.0;
  const Eigen::Vector3d y(3, 4, 0);
  const auto w = solve_svd(A, y, 0.0);
  ASSERT_TRUE(w);
  EXPECT_EQ(*w, Eigen::Vector2d(3, 0));
}

TEST(Solvers, CholeskyAndLuReportSingularGram) {
  const Eigen::MatrixXd Z = Eigen::MatrixXd::Zero(4, 2);
  const Eigen::Vector4d y(1, 0, 1, 0);
  EXPECT_FALSE(solve_cholesky(Z, y, 0.0));
  EXPECT_FALSE(solve_lu(Z, y, 0.0));
  EXPECT_TRUE(solve_cholesky(Z, y, 1e-3));
}

TEST(Solvers, NormShrinksMonotonicallyInBeta) {
  const Eigen::MatrixXd A = gaussian(40, 6, 3);
  const Eigen::VectorXd y = gaussian(40, 1, 4);
  double previous = std::numeric_limits<double>::infinity();
  for (double beta : {0.0, 1e-12, 1e-10, 1e-8, 1e-6, 1e-4, 1e-2, 1.0, 1e2, 1e6}) {
    const double n = solve(SolverId::Svd, A, y, beta).norm();
    EXPECT_LE(n, previous * (1.0 + 1e-14)) << "beta=" << beta;
    previous = n;
  }
  EXPECT_LT(previous, 1e-4);
}

TEST(Solvers, SvdSatisfiesNormalEquations) {
  const Eigen::MatrixXd A = gaussian(50, 8, 5);
  const Eigen::VectorXd y = gaussian(50, 1, 6);
  const Eigen::VectorXd w = solve(SolverId::Svd, A, y, 0.0);
  EXPECT_LE((A.transpose() * (y - A * w)).norm(), 1e-10 * (A.transpose() * y).norm());
}

TEST(Solvers, BetaScalingIdentity) {
  const std::size_t n = 400;
  const double root = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXd raw = gaussian(static_cast<Eigen::Index>(n), 6, 7);
  const Eigen::MatrixXd psi = raw / root;
  const Eigen::VectorXd y = gaussian(static_cast<Eigen::Index>(n), 1, 8);
  for (double beta : {1e-6, 1e-3, 0.1}) {
    const Eigen::VectorXd scaled = solve(SolverId::Svd, psi, y, beta);
    const Eigen::VectorXd mapped = root * solve(SolverId::Svd, raw, y, beta * static_cast<double>(n));
    EXPECT_LE((scaled - mapped).norm(), 1e-8 * scaled.norm()) << "beta=" << beta;
  }
}

TEST(Solvers, WellConditionedSolversAgree) {
  const Eigen::MatrixXd A = gaussian(200, 10, 9);
  const Eigen::VectorXd y = gaussian(200, 1, 10);
  ASSERT_LE(condition_number(A) * kMachineEpsilon, 1e-6);
  const Eigen::VectorXd s = solve(SolverId::Svd, A, y, 0.0);
  for (SolverId id : {SolverId::Cholesky, SolverId::Lu}) {
    const Eigen::VectorXd w = solve(id, A, y, 0.0);
    EXPECT_LE((w - s).norm(), 1e-10 * s.norm()) << to_string(id);
  }
}

TEST(Solvers, MatchExtendedPrecisionOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Eigen::MatrixXd A = gaussian(8, 4, 100 + seed);
    const Eigen::VectorXd y = gaussian(8, 1, 200 + seed);
    const double beta = seed % 2 == 0 ? 0.0 : 1e-3;
    const Eigen::VectorXd want = oracle(A, y, beta);
    for (SolverId id : kAllSolvers) {
      EXPECT_LE((solve(id, A, y, beta) - want).norm(), 1e-9 * std::max(1.0, want.norm()))
          << to_string(id) << " seed=" << seed;
    }
  }
}

TEST(Solvers, ParseNames) {
  EXPECT_EQ(parse_solver("SVD"), SolverId::Svd);
  EXPECT_EQ(parse_solver_list("all").size(), 3u);
  EXPECT_TRUE(parse_solver_list("none").empty());
  EXPECT_EQ(parse_solver_list("lu, cholesky"), (std::vector<SolverId>{SolverId::Lu, SolverId::Cholesky}));
  EXPECT_THROW((void)parse_solver("qr"), ArgumentError);
}

TEST(ConditionNumber, Examples) {
  EXPECT_DOUBLE_EQ(condition_number(Eigen::MatrixXd::Identity(4, 4)), 1.0);
  EXPECT_NEAR(condition_number(Eigen::Vector2d(10, 0.1).asDiagonal().toDenseMatrix()), 100.0, 1e-12);
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(3, 2);
  singular(0, 0) = 1.0;
  EXPECT_EQ(condition_number(singular), kSingularConditionNumber);
  const Eigen::VectorXd s = singular_values(gaussian(10, 4, 11));
  for (Eigen::Index i = 1; i < s.size(); ++i) EXPECT_GE(s[i - 1], s[i]);
}

TEST(ConditionNumber, Regularized) {
  EXPECT_DOUBLE_EQ(regularized_condition_number(Eigen::MatrixXd::Identity(2, 2), 1.0), 1.0);
  EXPECT_NEAR(regularized_condition_number_from_sigma1(10.0, 1e-4), 1000.0, 1e-9);
  EXPECT_THROW((void)regularized_condition_number(Eigen::MatrixXd::Identity(2, 2), 0.0), ArgumentError);
  const Eigen::MatrixXd A = gaussian(30, 5, 12);
  double previous = std::numeric_limits<double>::infinity();
  for (double beta : {1e-12, 1e-8, 1e-4, 1e-2}) {
    const double k = regularized_condition_number(A, beta);
    EXPECT_LT(k, previous);
    previous = k;
  }
}

TEST(ClosenessOfFit, Examples) {
  const Eigen::MatrixXd A = gaussian(20, 3, 13);
  const Eigen::VectorXd w_true = Eigen::Vector3d(0.5, -1.0, 2.0);
  const Eigen::VectorXd y = A * w_true;
  const auto exact = closeness_of_fit(A, y, w_true);
  ASSERT_TRUE(exact);
  EXPECT_LT(*exact, 1e-15);

  const auto zero = closeness_of_fit(A, y, Eigen::VectorXd::Zero(3));
  ASSERT_TRUE(zero);
  EXPECT_DOUBLE_EQ(*zero, std::numbers::pi / 2.0);

  EXPECT_FALSE(closeness_of_fit(A, y, -3.0 * w_true));
  EXPECT_THROW((void)closeness_of_fit(A, Eigen::VectorXd::Zero(20), w_true), DegenerateDataError);
}

TEST(RelativeErrorBound, Formula) {
  EXPECT_NEAR(relative_error_bound(100.0, 0.0, 1e-16), 2e-14, 1e-28);
  const double t = 0.3;
  EXPECT_NEAR(relative_error_bound(10.0, t, 1e-16), 1e-16 * (20.0 / std::cos(t) + std::tan(t) * 100.0), 1e-30);
}

TEST(PairwiseDiff, Examples) {
  ReadoutMatrix a;
  a.W = Eigen::MatrixXd::Ones(3, 4);
  a.per_coordinate_failed = {false, false, false};
  ReadoutMatrix b = a;
  b.solver = SolverId::Lu;
  std::vector<ReadoutMatrix> same = {a, b};
  ASSERT_TRUE(pairwise_diff(same));
  EXPECT_EQ(*pairwise_diff(same), 0.0);

  b.W(1, 2) += 1.0;
  std::vector<ReadoutMatrix> unit = {a, b};
  EXPECT_DOUBLE_EQ(*pairwise_diff(unit), 1.0);

  std::vector<ReadoutMatrix> one = {a};
  EXPECT_FALSE(pairwise_diff(one));

  // A failed coordinate on one side drops out of the comparison.
  b.per_coordinate_failed[1] = true;
  std::vector<ReadoutMatrix> flagged = {a, b};
  EXPECT_EQ(*pairwise_diff(flagged), 0.0);
}
