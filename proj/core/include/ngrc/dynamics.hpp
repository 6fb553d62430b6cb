#pragma once

// Ground-truth trajectories of the benchmark chaotic flows.
//
// A Trajectory stores one state per row. Integration always produces the
// full system state; partial observations are taken afterwards with
// select_coordinates().

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ngrc {

enum class SystemId { Lorenz63, DoubleScroll };

enum class IntegratorId { ExplicitEuler, RungeKutta4 };

using State3 = Eigen::Vector3d;

[[nodiscard]] constexpr int system_dimension(SystemId) noexcept { return 3; }

[[nodiscard]] std::string_view to_string(SystemId id) noexcept;
[[nodiscard]] std::string_view to_string(IntegratorId id) noexcept;
/// Accepts "lorenz", "lorenz63", "doublescroll", "double_scroll" (case-insensitive).
[[nodiscard]] SystemId parse_system(std::string_view text);
/// Accepts "euler" and "rk4" spellings.
[[nodiscard]] IntegratorId parse_integrator(std::string_view text);

/// Maximum Lyapunov exponent used to express forecast horizons.
/// Lorenz: 0.9056. Double-Scroll: inverse of its 7.81 Lyapunov time.
[[nodiscard]] double lyapunov_exponent(SystemId id) noexcept;

namespace lorenz {
inline constexpr double kSigma = 10.0;
inline constexpr double kRho = 28.0;
inline constexpr double kBetaNumerator = 8.0;  // b = 8/3
inline constexpr double kBetaDenominator = 3.0;
}  // namespace lorenz

namespace double_scroll {
inline constexpr double kR1 = 1.2;
inline constexpr double kR2 = 3.44;
inline constexpr double kR4 = 0.193;
inline constexpr double kAlpha = 11.6;
inline constexpr double kIr = 2.25e-5;
/// Largest |alpha * (V1 - V2)| accepted before sinh is considered divergent.
inline constexpr double kSinhArgumentLimit = 700.0;
}  // namespace double_scroll

/// Lorenz-63 vector field with sigma = 10, rho = 28, b = 8/3.
[[nodiscard]] State3 lorenz_rhs(const State3& state) noexcept;

/// Dimensionless Double-Scroll circuit, state = (V1, V2, I).
/// Throws DomainError when |alpha * (V1 - V2)| exceeds kSinhArgumentLimit.
[[nodiscard]] State3 double_scroll_rhs(const State3& state);

[[nodiscard]] State3 system_rhs(SystemId id, const State3& state);

/// One explicit step of the chosen scheme.
[[nodiscard]] State3 step(SystemId id, IntegratorId integrator, const State3& state, double h);

struct Trajectory {
  Eigen::MatrixXd states;  // rows = time index, cols = observed coordinates
  double h = 0.0;
  SystemId system = SystemId::Lorenz63;
  IntegratorId integrator = IntegratorId::ExplicitEuler;
  double integration_step = 0.0;  // step actually used by the integrator
  std::uint64_t seed = 0;
  bool normalized = false;
  std::optional<Eigen::VectorXd> scale;  // per-coordinate divisor, set by normalize()
  std::vector<int> coordinates;          // observed system coordinates, in column order

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(states.rows()); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(states.cols()); }
  [[nodiscard]] bool full_state() const noexcept {
    return dim() == system_dimension(system) && coordinates == std::vector<int>{0, 1, 2};
  }
};

/// Integrates n_steps steps from ic. Returns n_steps + 1 states with states.row(0) == ic.
/// Throws DivergenceError carrying the step index if a state becomes non-finite.
[[nodiscard]] Trajectory integrate(SystemId system, IntegratorId integrator, const State3& ic,
                                   double h, std::size_t n_steps, std::uint64_t seed = 0);

/// Drops the first n_discard states.
[[nodiscard]] Trajectory discard_transient(const Trajectory& traj, std::size_t n_discard);

/// Keeps rows 0, stride, 2*stride, ... and multiplies h by stride.
[[nodiscard]] Trajectory subsample(const Trajectory& traj, std::size_t stride);

/// Divides each coordinate by its maximum absolute value over the first
/// scale_rows rows (all rows when scale_rows is 0), recording the scale.
[[nodiscard]] Trajectory normalize(const Trajectory& traj, std::size_t scale_rows = 0);

/// Divides by an externally supplied scale (e.g. a training-segment scale).
[[nodiscard]] Trajectory apply_scale(const Trajectory& traj, const Eigen::VectorXd& scale);

/// Inverse of normalize(); requires a recorded scale.
[[nodiscard]] Trajectory denormalize(const Trajectory& traj);

/// Rows [begin, begin + count).
[[nodiscard]] Trajectory slice(const Trajectory& traj, std::size_t begin, std::size_t count);

/// Keeps only the given columns (indices into the current columns).
[[nodiscard]] Trajectory select_coordinates(const Trajectory& traj, std::span<const int> columns);

/// Deterministic point in the per-system initial-condition box.
/// Lorenz: [-15,15] x [-15,15] x [10,40]. Double-Scroll: [-0.5,0.5]^3.
[[nodiscard]] State3 sample_initial_condition(std::uint64_t seed, SystemId system);

struct InitialConditionBox {
  State3 lower;
  State3 upper;
};
[[nodiscard]] InitialConditionBox initial_condition_box(SystemId system) noexcept;

/// Everything needed to reproduce one ground-truth data set.
struct SimulationRequest {
  SystemId system = SystemId::Lorenz63;
  IntegratorId integrator = IntegratorId::ExplicitEuler;
  double h = 0.01;                 // output sampling step
  double integration_step = 0.0;   // 0: Euler integrates at h, RK4 at 0.001
  std::size_t n_steps = 0;         // output steps kept after the transient
  std::size_t n_discard = 10000;   // transient, in output steps
  std::uint64_t seed = 0;

  [[nodiscard]] double effective_integration_step() const noexcept;
  /// Integer ratio h / integration step. Throws ArgumentError if h is not a multiple.
  [[nodiscard]] std::size_t stride() const;
};

/// sample_initial_condition -> integrate -> subsample -> discard_transient.
/// The result has n_steps + 1 rows and is not normalized.
[[nodiscard]] Trajectory simulate(const SimulationRequest& request);

}  // namespace ngrc
