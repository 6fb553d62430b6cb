#include "ngrc/dynamics.hpp"

#include "ngrc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <string>

namespace ngrc {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool finite(const State3& s) { return s.allFinite(); }

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementation.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

constexpr double kDefaultRk4Step = 0.001;

// Advances the state n_fine steps, storing every stride-th state starting
// with the initial one, skipping the first n_skip_samples stored samples.
Trajectory integrate_sampled(SystemId system, IntegratorId integrator, const State3& ic,
                             double step_size, std::size_t stride, std::size_t n_skip_samples,
                             std::size_t n_samples, std::uint64_t seed) {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw ArgumentError("integration step must be positive and finite");
  }
  if (stride == 0) throw ArgumentError("stride must be >= 1");
  if (!finite(ic)) throw ArgumentError("initial condition must be finite");

  Trajectory out;
  out.system = system;
  out.integrator = integrator;
  out.integration_step = step_size;
  out.h = step_size * static_cast<double>(stride);
  out.seed = seed;
  out.coordinates = {0, 1, 2};
  out.states.resize(static_cast<Eigen::Index>(n_samples), 3);

  State3 state = ic;
  std::size_t fine_index = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        state = step(system, integrator, state, step_size);
      } catch (const DomainError& e) {
        throw DivergenceError(fine_index + 1, std::string("trajectory escaped: ") + e.what());
      }
      ++fine_index;
      if (!finite(state)) throw DivergenceError(fine_index, "non-finite state");
    }
  };

  advance(n_skip_samples * stride);
  for (std::size_t s = 0; s < n_samples; ++s) {
    if (s > 0) advance(stride);
    out.states.row(static_cast<Eigen::Index>(s)) = state.transpose();
  }
  return out;
}

}  // namespace

std::string_view to_string(SystemId id) noexcept {
  switch (id) {
    case SystemId::Lorenz63: return "lorenz63";
    case SystemId::DoubleScroll: return "doublescroll";
  }
  return "unknown";
}

std::string_view to_string(IntegratorId id) noexcept {
  switch (id) {
    case IntegratorId::ExplicitEuler: return "euler";
    case IntegratorId::RungeKutta4: return "rk4";
  }
  return "unknown";
}

SystemId parse_system(std::string_view text) {
  const std::string t = lower(text);
  if (t == "lorenz" || t == "lorenz63" || t == "lorenz-63") return SystemId::Lorenz63;
  if (t == "doublescroll" || t == "double_scroll" || t == "double-scroll") return SystemId::DoubleScroll;
  throw ArgumentError("unknown system '" + std::string(text) + "' (expected lorenz63 | doublescroll)");
}

IntegratorId parse_integrator(std::string_view text) {
  const std::string t = lower(text);
  if (t == "euler" || t == "explicit_euler" || t == "expliciteuler") return IntegratorId::ExplicitEuler;
  if (t == "rk4" || t == "runge_kutta4" || t == "rungekutta4") return IntegratorId::RungeKutta4;
  throw ArgumentError("unknown integrator '" + std::string(text) + "' (expected euler | rk4)");
}

double lyapunov_exponent(SystemId id) noexcept {
  switch (id) {
    case SystemId::Lorenz63: return 0.9056;
    case SystemId::DoubleScroll: return 1.0 / 7.81;
  }
  return 1.0;
}

State3 lorenz_rhs(const State3& s) noexcept {
  using namespace lorenz;
  const double x = s[0], y = s[1], z = s[2];
  return {kSigma * (y - x), x * (kRho - z) - y, x * y - (kBetaNumerator * z) / kBetaDenominator};
}

State3 double_scroll_rhs(const State3& s) {
  using namespace double_scroll;
  const double v1 = s[0], v2 = s[1], current = s[2];
  const double dv = v1 - v2;
  const double arg = kAlpha * dv;
  if (!(std::abs(arg) <= kSinhArgumentLimit)) {
    throw DomainError("double-scroll sinh argument out of range: " + std::to_string(arg));
  }
  const double diode = 2.0 * kIr * std::sinh(arg);
  // The second component is dV2/dt.
  return {v1 / kR1 - dv / kR2 - diode, dv / kR2 + diode - current, v2 - kR4 * current};
}

State3 system_rhs(SystemId id, const State3& state) {
  switch (id) {
    case SystemId::Lorenz63: return lorenz_rhs(state);
    case SystemId::DoubleScroll: return double_scroll_rhs(state);
  }
  throw ArgumentError("unknown system");
}

State3 step(SystemId id, IntegratorId integrator, const State3& x, double h) {
  switch (integrator) {
    case IntegratorId::ExplicitEuler:
      return x + h * system_rhs(id, x);
    case IntegratorId::RungeKutta4: {
      const State3 k1 = system_rhs(id, x);
      const State3 k2 = system_rhs(id, x + 0.5 * h * k1);
      const State3 k3 = system_rhs(id, x + 0.5 * h * k2);
      const State3 k4 = system_rhs(id, x + h * k3);
      return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  throw ArgumentError("unknown integrator");
}

Trajectory integrate(SystemId system, IntegratorId integrator, const State3& ic, double h,
                     std::size_t n_steps, std::uint64_t seed) {
  if (n_steps < 1) throw ArgumentError("n_steps must be >= 1");
  return integrate_sampled(system, integrator, ic, h, 1, 0, n_steps + 1, seed);
}

Trajectory discard_transient(const Trajectory& traj, std::size_t n_discard) {
  if (n_discard >= traj.size()) {
    throw ArgumentError("cannot discard " + std::to_string(n_discard) + " states from a trajectory of length " +
                        std::to_string(traj.size()));
  }
  return slice(traj, n_discard, traj.size() - n_discard);
}

Trajectory subsample(const Trajectory& traj, std::size_t stride) {
  if (stride == 0) throw ArgumentError("subsample stride must be >= 1");
  Trajectory out = traj;
  const std::size_t n = (traj.size() + stride - 1) / stride;
  out.states.resize(static_cast<Eigen::Index>(n), traj.states.cols());
  for (std::size_t i = 0; i < n; ++i) {
    out.states.row(static_cast<Eigen::Index>(i)) = traj.states.row(static_cast<Eigen::Index>(i * stride));
  }
  out.h = traj.h * static_cast<double>(stride);
  return out;
}

Trajectory normalize(const Trajectory& traj, std::size_t scale_rows) {
  if (traj.size() == 0) throw ArgumentError("cannot normalize an empty trajectory");
  const auto rows = static_cast<Eigen::Index>(scale_rows == 0 ? traj.size() : std::min(scale_rows, traj.size()));
  const Eigen::VectorXd scale = traj.states.topRows(rows).cwiseAbs().colwise().maxCoeff().transpose();
  return apply_scale(traj, scale);
}

Trajectory apply_scale(const Trajectory& traj, const Eigen::VectorXd& scale) {
  if (scale.size() != traj.states.cols()) throw ArgumentError("scale dimension does not match trajectory");
  for (Eigen::Index i = 0; i < scale.size(); ++i) {
    if (!(scale[i] > 0.0) || !std::isfinite(scale[i])) {
      throw DegenerateDataError("coordinate " + std::to_string(i) + " has zero or non-finite scale");
    }
  }
  Trajectory out = traj;
  out.states = traj.states.array().rowwise() / scale.transpose().array();
  // Normalizing twice composes the divisors so denormalize() returns to raw units.
  out.scale = traj.scale ? Eigen::VectorXd(traj.scale->cwiseProduct(scale)) : scale;
  out.normalized = true;
  return out;
}

Trajectory denormalize(const Trajectory& traj) {
  if (!traj.scale) throw ArgumentError("trajectory has no recorded scale");
  Trajectory out = traj;
  out.states = traj.states.array().rowwise() * traj.scale->transpose().array();
  out.scale.reset();
  out.normalized = false;
  return out;
}

Trajectory slice(const Trajectory& traj, std::size_t begin, std::size_t count) {
  if (begin + count > traj.size()) {
    throw ArgumentError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                        ") exceeds trajectory length " + std::to_string(traj.size()));
  }
  Trajectory out = traj;
  out.states = traj.states.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  return out;
}

Trajectory select_coordinates(const Trajectory& traj, std::span<const int> columns) {
  if (columns.empty()) throw ArgumentError("at least one coordinate must be selected");
  Trajectory out = traj;
  out.states.resize(traj.states.rows(), static_cast<Eigen::Index>(columns.size()));
  out.coordinates.clear();
  Eigen::VectorXd scale(static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) {
    const int c = columns[j];
    if (c < 0 || c >= traj.dim()) throw ArgumentError("coordinate index " + std::to_string(c) + " out of range");
    out.states.col(static_cast<Eigen::Index>(j)) = traj.states.col(c);
    out.coordinates.push_back(static_cast<std::size_t>(c) < traj.coordinates.size() ? traj.coordinates[c] : c);
    if (traj.scale) scale[static_cast<Eigen::Index>(j)] = (*traj.scale)[c];
  }
  if (traj.scale) out.scale = scale;
  return out;
}

InitialConditionBox initial_condition_box(SystemId system) noexcept {
  switch (system) {
    case SystemId::Lorenz63: return {State3(-15.0, -15.0, 10.0), State3(15.0, 15.0, 40.0)};
    case SystemId::DoubleScroll: return {State3(-0.5, -0.5, -0.5), State3(0.5, 0.5, 0.5)};
  }
  return {State3::Zero(), State3::Zero()};
}

State3 sample_initial_condition(std::uint64_t seed, SystemId system) {
  // Distinct streams per system so the same seed does not correlate the two.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(system), 0x6e677263u};
  std::mt19937_64 rng(seq);
  const auto box = initial_condition_box(system);
  State3 out;
  for (int i = 0; i < 3; ++i) out[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * unit_uniform(rng);
  return out;
}

double SimulationRequest::effective_integration_step() const noexcept {
  if (integration_step > 0.0) return integration_step;
  return integrator == IntegratorId::RungeKutta4 ? kDefaultRk4Step : h;
}

std::size_t SimulationRequest::stride() const {
  const double fine = effective_integration_step();
  if (!(h > 0.0) || !(fine > 0.0)) throw ArgumentError("time steps must be positive");
  const double ratio = h / fine;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ArgumentError("sampling step " + std::to_string(h) + " is not a multiple of the integration step " +
                        std::to_string(fine));
  }
  return static_cast<std::size_t>(rounded);
}

Trajectory simulate(const SimulationRequest& request) {
  if (request.n_steps < 1) throw ArgumentError("n_steps must be >= 1");
  const std::size_t stride = request.stride();
  const State3 ic = sample_initial_condition(request.seed, request.system);
  Trajectory out = integrate_sampled(request.system, request.integrator, ic, request.effective_integration_step(),
                                     stride, request.n_discard, request.n_steps + 1, request.seed);
  out.h = request.h;
  return out;
}

}  // namespace ngrc
